"""Angle separation of a distribution from the imaginary axis.

Strict separation asks for ``|Re z| >= d |z|`` at every nonzero point.  The
asymptotic version only constrains all but finitely many points; on a finite
truncation it is estimated from the points of largest modulus.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .points import PointDistribution

__all__ = [
    "SeparationReport",
    "angle_ratios",
    "strict_separation",
    "asymptotic_separation",
]


def angle_ratios(z) -> tuple[np.ndarray, np.ndarray]:
    """``(|Re z|/|z|, |Im z|/|z|)`` for nonzero ``z``."""
    z = np.asarray(z, dtype=np.complex128)
    mod = np.abs(z)
    return np.abs(z.real) / mod, np.abs(z.imag) / mod


def _nonzero(Z: PointDistribution) -> tuple[np.ndarray, np.ndarray]:
    keep = Z.points != 0
    return Z.points[keep], Z.multiplicities[keep]


def strict_separation(Z: PointDistribution) -> float:
    """Largest ``d`` with ``|Re z| >= d|z|`` on all nonzero points of ``Z``."""
    pts, _ = _nonzero(Z)
    if len(pts) == 0:
        raise ValueError("strict separation needs at least one nonzero point")
    re_ratio, _ = angle_ratios(pts)
    return float(re_ratio.min())


@dataclass(frozen=True)
class SeparationReport:
    d_strict: float
    tail_liminf_estimate: float
    tail_limsup_im_estimate: float
    tail_fraction: float
    tail_size: int
    threshold: float
    violating_points: list = field(default_factory=list)
    nested_estimates: list = field(default_factory=list)
    decaying: bool = False

    @property
    def consistent(self) -> bool:
        """Truncation is consistent with asymptotic separation (positive tail estimate)."""
        return self.tail_liminf_estimate > 0

    def to_document(self) -> dict:
        return {
            "d_strict": self.d_strict,
            "tail_liminf_estimate": self.tail_liminf_estimate,
            "tail_limsup_im_estimate": self.tail_limsup_im_estimate,
            "tail_fraction": self.tail_fraction,
            "tail_size": self.tail_size,
            "threshold": self.threshold,
            "consistent": self.consistent,
            "decaying": self.decaying,
            "nested_estimates": list(self.nested_estimates),
            "violating_points": [{"re": z.real, "im": z.imag} for z in self.violating_points],
        }


def _tail_start(mod: np.ndarray, count: int) -> int:
    # include every point tied in modulus with the innermost tail point
    start = len(mod) - count
    return int(np.searchsorted(mod, mod[start], side="left"))


def asymptotic_separation(
    Z: PointDistribution,
    tail_fraction: float = 0.5,
    threshold: float | None = None,
    nested: int = 3,
) -> SeparationReport:
    """Tail statistics standing in for the liminf/limsup pair.

    The tail is the ``ceil(tail_fraction * n)`` nonzero points of largest
    modulus (``n`` distinct nonzero points, ties in modulus all included).
    ``violating_points`` are points below ``threshold`` (default: the tail
    estimate itself), i.e. the candidate finite exceptional set.

    ``nested_estimates`` are minima of ``|Re z|/|z|`` over consecutive
    shells of the tail, each holding half the points of the previous one
    (outermost last); ``decaying`` is raised when these strictly decrease,
    the signature of a ratio that drifts to zero beyond the truncation.
    """
    if not (0 < tail_fraction <= 1):
        raise ValueError(f"tail_fraction must be in (0, 1], got {tail_fraction}")
    pts, _ = _nonzero(Z)
    if len(pts) < 2:
        raise ValueError("asymptotic separation needs at least 2 nonzero points")
    mod = np.abs(pts)
    re_ratio, im_ratio = angle_ratios(pts)
    n = len(pts)
    count = max(1, math.ceil(tail_fraction * n))
    start = _tail_start(mod, count)
    tail_re = re_ratio[start:]
    est = float(tail_re.min())
    im_est = float(im_ratio[start:].max())
    d = float(re_ratio.min())
    thr = est if threshold is None else float(threshold)
    violators = [complex(z) for z, q in zip(pts.tolist(), re_ratio) if q < thr]

    shells = []
    lo = start
    size = n - start
    for _ in range(nested):
        half = size // 2
        if half < 1:
            break
        shells.append(float(re_ratio[lo : n - half].min()))
        lo = n - half
        size = half
    shells.append(float(re_ratio[lo:].min()))
    decaying = len(shells) > 1 and all(b < a for a, b in zip(shells, shells[1:]))
    return SeparationReport(
        d_strict=d,
        tail_liminf_estimate=est,
        tail_limsup_im_estimate=im_est,
        tail_fraction=tail_fraction,
        tail_size=n - start,
        threshold=thr,
        violating_points=violators,
        nested_estimates=shells,
        decaying=decaying,
    )
