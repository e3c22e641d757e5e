"""Closed-form equilibria of a transboundary-pollution game on the circle."""

from ._core import (
    __version__,
    alpha_series,
    alpha_series_advection,
    grid_nodes,
    simulate,
    solve,
)

__all__ = [
    "__version__",
    "alpha_series",
    "alpha_series_advection",
    "grid_nodes",
    "simulate",
    "solve",
]
