"""Lattice functions on finite windows, norms, and verification records.

Functions on the integer lattice are stored as dense value arrays on an
inclusive integer window [lo, hi] and are exactly zero outside it.  All
operators in this package consume and produce this representation; long-range
sums over the rest of the lattice are closed analytically by the callers,
never truncated silently.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

__all__ = [
    "Window",
    "LatticeFunction",
    "VerificationReport",
    "lq_norm",
    "in_Ds",
]


@dataclass(frozen=True)
class Window:
    """Inclusive integer interval [lo, hi] on the lattice."""

    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"empty window: lo={self.lo} > hi={self.hi}")
        if self.hi - self.lo + 1 > 2**40:
            raise ValueError("window too wide for dense storage")

    @property
    def width(self) -> int:
        return self.hi - self.lo + 1

    def points(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    def contains(self, x: int) -> bool:
        return self.lo <= x <= self.hi

    def pad(self, n: int) -> "Window":
        return Window(self.lo - n, self.hi + n)

    def hull(self, other: "Window") -> "Window":
        return Window(min(self.lo, other.lo), max(self.hi, other.hi))


class LatticeFunction:
    """Finitely supported real function on the lattice.

    Values are stored densely on ``window``; the function is 0 elsewhere.
    Instances are immutable (the value array is locked after construction).
    """

    __slots__ = ("window", "values")

    def __init__(self, window: Window, values) -> None:
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or arr.size != window.width:
            raise ValueError(
                f"expected {window.width} values for {window}, got shape {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise ValueError("lattice function values must be finite")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "window", window)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError("LatticeFunction is immutable")

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, window: Window) -> "LatticeFunction":
        return cls(window, np.zeros(window.width))

    @classmethod
    def delta(cls, x: int) -> "LatticeFunction":
        return cls(Window(x, x), [1.0])

    @classmethod
    def from_values(cls, lo: int, values) -> "LatticeFunction":
        values = np.asarray(values, dtype=float)
        return cls(Window(lo, lo + len(values) - 1), values)

    # -- access ---------------------------------------------------------------

    def value(self, x: int) -> float:
        if self.window.contains(x):
            return float(self.values[x - self.window.lo])
        return 0.0

    __call__ = value

    def sample(self, xs) -> np.ndarray:
        """Values at arbitrary lattice points (0 outside the window)."""
        xs = np.asarray(xs)
        idx = xs - self.window.lo
        inside = (idx >= 0) & (idx < self.window.width)
        out = np.zeros(xs.shape, dtype=float)
        out[inside] = self.values[idx[inside]]
        return out

    def restrict(self, window: Window) -> "LatticeFunction":
        """Same function re-expressed on another window (clipping to 0 outside)."""
        return LatticeFunction(window, self.sample(window.points()))

    @property
    def is_nonnegative(self) -> bool:
        return bool(np.all(self.values >= 0.0))

    def scaled(self, a: float) -> "LatticeFunction":
        return LatticeFunction(self.window, a * self.values)

    def __add__(self, other: "LatticeFunction") -> "LatticeFunction":
        w = self.window.hull(other.window)
        return LatticeFunction(w, self.sample(w.points()) + other.sample(w.points()))

    # -- serialization --------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps({"lo": self.window.lo, "values": self.values.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "LatticeFunction":
        obj = json.loads(text)
        return cls.from_values(int(obj["lo"]), obj["values"])

    def __repr__(self) -> str:
        return f"LatticeFunction([{self.window.lo}, {self.window.hi}], ...)"


def lq_norm(f: LatticeFunction, q: float) -> float:
    """Counting-measure q-norm; q = inf gives the sup norm."""
    if q == math.inf:
        return float(np.max(np.abs(f.values), initial=0.0))
    if q < 1:
        raise ValueError(f"q must be >= 1 or inf, got {q}")
    a = np.abs(f.values)
    m = a.max(initial=0.0)
    if m == 0.0:
        return 0.0
    # factor out the peak to avoid overflow for large q
    return float(m * np.sum((a / m) ** q) ** (1.0 / q))


def in_Ds(f: LatticeFunction, s: float) -> bool:
    """Membership in the natural domain of the nonlocal operator of order s.

    The defining weighted sum is finite for every finitely supported function,
    so this always holds for this representation; the check exists to document
    the hypothesis and to guard the s-range.
    """
    if not 0.0 < s < 1.0:
        raise ValueError(f"s must lie in (0, 1), got {s}")
    weights = (1.0 + np.abs(f.window.points())) ** (-(1.0 + 2.0 * s))
    return bool(np.isfinite(np.sum(np.abs(f.values) * weights)))


@dataclass
class VerificationReport:
    """Pass/fail record of a single numerical identity or inequality check."""

    check_name: str
    parameters: dict = field(default_factory=dict)
    max_abs_error: float = 0.0
    tolerance: float = 0.0
    passed: bool = False
    details: dict | None = None

    @classmethod
    def from_error(
        cls,
        check_name: str,
        max_abs_error: float,
        tolerance: float,
        parameters: dict | None = None,
        details: dict | None = None,
    ) -> "VerificationReport":
        return cls(
            check_name=check_name,
            parameters=parameters or {},
            max_abs_error=float(max_abs_error),
            tolerance=float(tolerance),
            passed=bool(max_abs_error <= tolerance),
            details=details,
        )

    def to_dict(self) -> dict:
        out = {
            "check_name": self.check_name,
            "parameters": _jsonable(self.parameters),
            "max_abs_error": self.max_abs_error,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }
        if self.details is not None:
            out["details"] = _jsonable(self.details)
        return out


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj
