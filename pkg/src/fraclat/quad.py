"""Shared Gauss-Legendre machinery: cached rules, panel assembly, time panels."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = ["gauss_legendre", "panel_nodes", "geometric_time_panels"]


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on [-1, 1]. Keep n small; rules are cached."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_nodes(bounds: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule: n-point Gauss-Legendre on each panel of `bounds`."""
    x, w = gauss_legendre(n)
    bounds = np.asarray(bounds, dtype=float)
    mid = 0.5 * (bounds[1:] + bounds[:-1])
    half = 0.5 * (bounds[1:] - bounds[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def geometric_time_panels(t0: float, t_max: float, ratio: float = 2.0) -> np.ndarray:
    """Panel boundaries 0, t0, t0*r, ... capped at t_max.

    The first panel starts at 0 (integrands here are smooth at t = 0); the
    geometric progression matches the power-law decay of semigroup orbits.
    """
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    b = [0.0, min(t0, t_max)]
    while b[-1] < t_max:
        b.append(min(b[-1] * ratio, t_max))
    return np.array(b)
