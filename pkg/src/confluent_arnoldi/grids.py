"""Sampling grids used by the fits and experiments."""

import numpy as np

FINE_POINTS = 1000


def chebyshev_points(m: int, a: float = -1.0, b: float = 1.0) -> np.ndarray:
    """Chebyshev extreme points ``cos((m - j) pi / (m - 1))``, j = 1..m, ascending.

    Mapped affinely to ``[a, b]``; ``m == 1`` gives the midpoint.
    """
    if m < 1:
        raise ValueError("m must be >= 1")
    if m == 1:
        return np.array([(a + b) / 2])
    x = np.cos((m - np.arange(1, m + 1)) * np.pi / (m - 1))
    return (a + b) / 2 + (b - a) / 2 * x


def chebyshev_points_first_kind(m: int, a: float = -1.0, b: float = 1.0) -> np.ndarray:
    """Chebyshev roots ``cos((2j - 1) pi / (2m))``, ascending, mapped to ``[a, b]``."""
    x = -np.cos((2 * np.arange(1, m + 1) - 1) * np.pi / (2 * m))
    return (a + b) / 2 + (b - a) / 2 * x


def equispaced_union(intervals, m_per_interval: int) -> np.ndarray:
    """``m_per_interval`` equally spaced points (endpoints included) on each interval."""
    return np.concatenate([np.linspace(a, b, m_per_interval) for a, b in intervals])


def fine_grid(intervals, points: int = FINE_POINTS) -> np.ndarray:
    """Error-measurement grid: ``points`` equispaced points per interval."""
    return equispaced_union(intervals, points)
