"""Right/left characteristic logarithms and logarithmic interval measures.

For a distribution Z the right characteristic logarithm is

    l_rh(r) = sum over 0 < |z| <= r of Re+(1/z),

and the left one uses Re-(1/z).  A :class:`LogProfile` stores both as
cumulative sums over the sorted distinct moduli, so every interval query
``(r, R]`` is two binary searches.

Prefix sums are kept as unevaluated pairs ``hi + lo`` built with error-free
transformations; an interval value is ``(hi_R - hi_r) + (lo_R - lo_r)``,
which keeps small interval contributions accurate even when the cumulative
total is large.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .points import PointDistribution

__all__ = [
    "IntervalQuery",
    "LogProfile",
    "build_profile",
    "reciprocal_parts",
    "l_right",
    "l_left",
    "l_submeasure",
]


@dataclass(frozen=True)
class IntervalQuery:
    """Half-open interval ``(r, R]`` with ``0 < r < R``; ``R`` may be ``inf``."""

    r: float
    R: float

    def __post_init__(self):
        if not (self.r > 0):
            raise ValueError(f"interval needs r > 0, got r={self.r}")
        if not (self.R > self.r):
            raise ValueError(f"interval needs r < R, got r={self.r}, R={self.R}")


def reciprocal_parts(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(Re+(1/z), Re-(1/z))`` elementwise; zero where ``z == 0``."""
    z = np.asarray(z, dtype=np.complex128)
    x, y = z.real, z.imag
    den = np.hypot(x, y) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        re = np.where(den > 0, x / np.where(den > 0, den, 1.0), 0.0)
    return np.maximum(re, 0.0), np.maximum(-re, 0.0)


def _prefix_dd(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = len(values)
    hi = np.zeros(n + 1)
    lo = np.zeros(n + 1)
    s = 0.0
    c = 0.0
    for k, v in enumerate(values.tolist(), start=1):
        t = s + v
        bp = t - s
        c += (s - (t - bp)) + (v - bp)
        s = t
        hi[k] = s
        lo[k] = c
    return hi, lo


def _group_sums(values: np.ndarray, mod: np.ndarray) -> np.ndarray:
    """Correctly rounded sum of ``values`` over each run of equal ``mod``."""
    if len(mod) == 0:
        return values
    start = np.flatnonzero(np.r_[True, mod[1:] != mod[:-1]])
    if len(start) == len(mod):
        return values
    bounds = np.r_[start, len(mod)].tolist()
    vals = values.tolist()
    return np.array([math.fsum(vals[a:b]) for a, b in zip(bounds[:-1], bounds[1:])])


def _as_q(q) -> IntervalQuery:
    if isinstance(q, IntervalQuery):
        return q
    r, R = q
    return IntervalQuery(float(r), float(R))


@dataclass(frozen=True, eq=False)
class LogProfile:
    """Cumulative right/left characteristic logarithms of a distribution.

    ``moduli[k-1]`` is the k-th smallest distinct nonzero modulus ``t_k``;
    the cumulative arrays have length ``len(moduli) + 1`` with index 0 equal
    to zero, so ``l_rh(r) = right(k(r))`` where ``k(r) = #{k : t_k <= r}``.
    """

    moduli: np.ndarray
    right_hi: np.ndarray
    right_lo: np.ndarray
    left_hi: np.ndarray
    left_lo: np.ndarray

    def _k(self, r) -> np.ndarray:
        # inf maps past the last modulus, i.e. l(inf) == l(t_max)
        return np.searchsorted(self.moduli, r, side="right")

    def l_rh(self, r):
        """Cumulative ``l_rh(r)`` (scalar or array input)."""
        k = self._k(r)
        return self.right_hi[k] + self.right_lo[k]

    def l_lh(self, r):
        k = self._k(r)
        return self.left_hi[k] + self.left_lo[k]

    def right_interval(self, r, R):
        """Vectorized ``l_rh(r, R)``; no argument validation."""
        a, b = self._k(r), self._k(R)
        return (self.right_hi[b] - self.right_hi[a]) + (self.right_lo[b] - self.right_lo[a])

    def left_interval(self, r, R):
        a, b = self._k(r), self._k(R)
        return (self.left_hi[b] - self.left_hi[a]) + (self.left_lo[b] - self.left_lo[a])

    def sub_interval(self, r, R):
        return np.maximum(self.right_interval(r, R), self.left_interval(r, R))

    @property
    def t_max(self) -> float:
        return float(self.moduli[-1]) if len(self.moduli) else 0.0


def build_profile(Z: PointDistribution) -> LogProfile:
    """Build the cumulative profile; origin points are ignored.

    Points on the imaginary axis contribute zero to both sides.  Points of
    equal modulus are first combined with a correctly rounded sum, so the
    profile depends only on the multiset of contributions per modulus:
    permuting the input or conjugating ``Z`` gives bit-identical profiles.
    """
    pts = Z.points
    mults = Z.multiplicities.astype(np.float64)
    mod = np.abs(pts)
    nz = mod > 0
    pts, mults, mod = pts[nz], mults[nz], mod[nz]
    rp, lp = reciprocal_parts(pts)
    rp = _group_sums(rp * mults, mod)
    lp = _group_sums(lp * mults, mod)
    rhi, rlo = _prefix_dd(rp)
    lhi, llo = _prefix_dd(lp)
    arrays = [np.unique(mod), rhi, rlo, lhi, llo]
    for a in arrays:
        a.flags.writeable = False
    return LogProfile(*arrays)


def l_right(P: LogProfile, q) -> float:
    """Right logarithmic measure ``l_rh(R) - l_rh(r)`` of ``(r, R]``."""
    q = _as_q(q)
    return float(P.right_interval(q.r, q.R))


def l_left(P: LogProfile, q) -> float:
    q = _as_q(q)
    return float(P.left_interval(q.r, q.R))


def l_submeasure(P: LogProfile, q) -> float:
    """Logarithmic submeasure ``max(l_rh(r,R), l_lh(r,R))``; zero for the empty distribution."""
    q = _as_q(q)
    return float(max(P.right_interval(q.r, q.R), P.left_interval(q.r, q.R)))

