"""Finite-data checks of the domination criterion and its witness construction.

Every "there exists a constant C" statement is turned into a dyadic grid of
intervals ``(r0 2^a, r0 2^b]``.  The supremum of the functional over the grid
is the empirical constant, and a least-squares fit of the per-level maxima
against ``ln R`` separates bounded behaviour from logarithmic growth.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import entire as ent
from .entire import EntireFunctionModel, PolyRoot, Scalar, SinIzOverZ
from .logchar import build_profile
from .points import PointDistribution
from .quadrature import DEFAULT_TOL, j_integral
from .separation import angle_ratios

__all__ = [
    "GridReport",
    "DominationReport",
    "dyadic_grid",
    "growth_verdict",
    "mr_condition_report",
    "lemma_discrepancy_report",
    "domination_check",
    "domination_grid",
    "tail_split",
    "witness_assemble",
    "subset_tail_factor",
    "vanishes_on",
]

SLOPE_THRESHOLD = 0.01
RESIDUAL_THRESHOLD = 0.05
EXCLUDE_FRACTION = 0.5


@dataclass
class GridReport:
    """Values of a functional on a dyadic interval grid plus a growth fit.

    ``level_max[i]`` is the maximum over cells whose outer radius is
    ``level_radius[i]``; ``growth_slope`` and ``residual`` come from the
    least-squares fit of ``level_max`` against ``ln(level_radius)``.
    """

    grid: list
    values: list
    sup_value: float
    growth_slope: float
    residual: float
    verdict: str
    level_radius: list = field(default_factory=list)
    level_max: list = field(default_factory=list)
    levels_used: int = 0
    work: dict = field(default_factory=dict)

    def to_document(self) -> dict:
        return {
            "grid": [list(c) for c in self.grid],
            "values": list(self.values),
            "sup_value": self.sup_value,
            "growth_slope": self.growth_slope,
            "residual": self.residual,
            "verdict": self.verdict,
            "levels_used": self.levels_used,
            "level_radius": list(self.level_radius),
            "level_max": list(self.level_max),
        }


def dyadic_grid(r0: float, levels: int) -> list[tuple[float, float]]:
    """All ``(r0 2^a, r0 2^b)`` with ``0 <= a < b <= levels``, ordered by ``b`` then ``a``."""
    return [(r0 * 2.0**a, r0 * 2.0**b) for b in range(1, levels + 1) for a in range(b)]


def growth_verdict(
    level_radius,
    level_max,
    slope_threshold: float = SLOPE_THRESHOLD,
    residual_threshold: float = RESIDUAL_THRESHOLD,
) -> tuple[float, float, str]:
    """Fit ``level_max ~ c + slope * ln(radius)``; return ``(slope, rms residual, verdict)``.

    Only the outer half of the levels (at least 3) enters the fit, so that
    transients at small radii do not register as growth.
    """
    x = np.log(np.asarray(level_radius, dtype=float))
    y = np.asarray(level_max, dtype=float)
    keep = max(3, math.ceil(len(x) / 2))
    x, y = x[-keep:], y[-keep:]
    if len(x) < 2:
        return 0.0, 0.0, "inconclusive"
    slope, icpt = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (icpt + slope * x)) ** 2)))
    slope = float(slope)
    if slope <= slope_threshold:
        verdict = "bounded-consistent"
    elif resid < residual_threshold:
        verdict = "growth-detected"
    else:
        verdict = "inconclusive"
    return slope, resid, verdict


def _report(grid, values, r0, levels, slope_threshold, residual_threshold, work=None) -> GridReport:
    values = [float(v) for v in values]
    radii, maxima = [], []
    for b in range(1, levels + 1):
        R = r0 * 2.0**b
        cell = [v for (_, RR), v in zip(grid, values) if RR == R]
        if cell:
            radii.append(R)
            maxima.append(max(cell))
    slope, resid, verdict = growth_verdict(radii, maxima, slope_threshold, residual_threshold)
    return GridReport(
        grid=list(grid),
        values=values,
        sup_value=max(values),
        growth_slope=slope,
        residual=resid,
        verdict=verdict,
        level_radius=radii,
        level_max=maxima,
        levels_used=len(radii),
        work=work or {},
    )


def mr_condition_report(
    Z: PointDistribution,
    W: PointDistribution,
    r0: float = 1.0,
    levels: int = 12,
    exclude_fraction: float = EXCLUDE_FRACTION,
    slope_threshold: float = SLOPE_THRESHOLD,
    residual_threshold: float = RESIDUAL_THRESHOLD,
) -> GridReport:
    """Empirical ``C`` in ``l_Z(r,R) <= l_W(r,R) + C`` on a dyadic grid.

    Cells with ``R`` above ``exclude_fraction`` times the smaller of the two
    truncation radii are dropped, since beyond it the data no longer
    represents the distributions.  Fewer than 3 usable levels is an error.
    """
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    if levels < 3:
        raise ValueError("levels must be >= 3")
    if not Z or not W:
        raise ValueError("Z and W must be nonempty truncations")
    reach = exclude_fraction * min(Z.max_modulus(), W.max_modulus())
    usable = min(levels, int(math.floor(math.log2(reach / r0))) if reach > r0 else 0)
    if usable < 3:
        raise ValueError(
            f"only {max(usable, 0)} dyadic levels fit below {reach:.6g}; "
            "use larger truncations or a smaller r0"
        )
    grid = dyadic_grid(r0, usable)
    r = np.array([c[0] for c in grid])
    R = np.array([c[1] for c in grid])
    pz, pw = build_profile(Z), build_profile(W)
    values = pz.sub_interval(r, R) - pw.sub_interval(r, R)
    return _report(grid, values, r0, usable, slope_threshold, residual_threshold)


def lemma_discrepancy_report(
    F: EntireFunctionModel,
    r0: float = 1.0,
    levels: int = 12,
    tol: float = DEFAULT_TOL,
    slope_threshold: float = SLOPE_THRESHOLD,
    residual_threshold: float = RESIDUAL_THRESHOLD,
) -> GridReport:
    """Grid of ``max(|J - l_rh|, |J - l_lh|)`` with ``J = J(r, R; ln|F|)``.

    ``J`` is computed once per elementary segment ``(r0 2^j, r0 2^(j+1))``
    and summed, so the grid costs ``levels`` quadratures.
    """
    if not r0 > 0:
        raise ValueError("r0 must be positive")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    edges = [r0 * 2.0**j for j in range(levels + 1)]
    segs = [j_integral(F, (a, b), tol=tol) for a, b in zip(edges[:-1], edges[1:])]
    seg_vals = [s.value for s in segs]
    zeros = ent.zeros_of_model(F, edges[-1])
    prof = build_profile(zeros)
    grid = dyadic_grid(r0, levels)
    values = []
    for b in range(1, levels + 1):
        for a in range(b):
            J = math.fsum(seg_vals[a:b])
            r, R = edges[a], edges[b]
            values.append(
                max(abs(J - float(prof.right_interval(r, R))), abs(J - float(prof.left_interval(r, R))))
            )
    work = {
        "quadratures": len(segs),
        "panels": sum(s.panel_count for s in segs),
        "evaluations": sum(s.evaluations for s in segs),
    }
    return _report(grid, values, r0, levels, slope_threshold, residual_threshold, work)


@dataclass(frozen=True)
class DominationReport:
    holds: bool
    worst_margin: float
    worst_y: float
    samples: int

    def to_document(self) -> dict:
        return {
            "holds": self.holds,
            "worst_margin": self.worst_margin,
            "worst_y": self.worst_y,
            "samples": self.samples,
        }


def domination_grid(y_max: float, samples: int) -> np.ndarray:
    """Ordinates ``±y``: ``samples`` log-spaced in ``[1e-3, y_max]`` plus ``samples`` uniform in ``[0, 1]``."""
    y = np.r_[np.geomspace(1e-3, y_max, samples), np.linspace(0.0, 1.0, samples)]
    y = np.unique(y)
    return np.r_[-y[::-1], y]


def domination_check(
    f: EntireFunctionModel,
    g: EntireFunctionModel,
    y_max: float = 50.0,
    samples: int = 400,
    slack: float = 1e-9,
) -> DominationReport:
    """Check ``ln|f(iy)| <= ln|g(iy)|`` on :func:`domination_grid`.

    Ordinates where both sides vanish are skipped; a zero of ``g`` alone is
    a failure (margin ``+inf``).
    """
    if samples < 100:
        raise ValueError("domination check needs samples >= 100")
    if not y_max > 1e-3:
        raise ValueError("y_max must exceed 1e-3")
    y = domination_grid(y_max, samples)
    lf = f.log_modulus(1j * y)
    lg = g.log_modulus(1j * y)
    both = np.isneginf(lf) & np.isneginf(lg)
    with np.errstate(invalid="ignore"):
        margin = np.where(both, -np.inf, lf - lg)
    margin = np.where(np.isneginf(lg) & ~both, np.inf, margin)
    i = int(np.argmax(margin))
    worst = float(margin[i])
    return DominationReport(holds=worst <= slack, worst_margin=worst, worst_y=float(y[i]), samples=len(y))


def tail_split(Z: PointDistribution, d: float) -> tuple[PointDistribution, PointDistribution]:
    """Split ``Z`` into the finite head below angle ratio ``d`` and a separated rest.

    ``Z0`` holds origin entries and points with ``|Re z| < d|z|``; the rest
    satisfies ``|Re z| >= d|z|``.
    """
    if not (0 < d <= 1):
        raise ValueError(f"d must lie in (0, 1], got {d}")
    head, rest = {}, {}
    for z, m in Z.entries:
        if z == 0:
            head[z] = m
            continue
        ratio = float(angle_ratios(np.array([z]))[0][0])
        (head if ratio < d else rest)[z] = m
    return PointDistribution(head), PointDistribution(rest)


def subset_tail_factor(g: EntireFunctionModel, G0: PointDistribution) -> EntireFunctionModel:
    """``g / g0`` where ``g0`` is the monic polynomial with roots ``G0``.

    For ``Z`` inside the zero set of ``g / g0`` this is an admissible choice
    of the tail factor in :func:`witness_assemble`.
    """
    return ent.quotient_by_roots(g, G0)


def _head_envelope(roots: np.ndarray, y: np.ndarray, N: int) -> np.ndarray:
    """``ln(|f0(iy)| * |sin y / y|^N)`` for the monic polynomial ``f0``."""
    z = 1j * y
    out = np.zeros(y.shape)
    for a in roots:
        out += np.log(np.abs(z - a))
    if N:
        with np.errstate(divide="ignore"):
            out += N * np.where(y == 0, 0.0, np.log(np.abs(np.sin(y))) - np.log(np.abs(np.where(y == 0, 1.0, y))))
    return out


def witness_assemble(
    Z0: PointDistribution,
    g0_roots: PointDistribution,
    f_inf: EntireFunctionModel,
    y_probe: float = 50.0,
    samples: int = 400,
) -> EntireFunctionModel:
    """Assemble ``f = f_a * g0 * f_inf`` with ``f_a(z) = a f0(z) (sin(iz)/z)^N``.

    ``f0`` is the monic polynomial with root distribution ``Z0`` and
    ``N = n_Z0(C)``.  The constant ``a`` is the smaller of ``0.5/S`` with
    ``S`` the probe-grid supremum of ``|f0(iy) (sin y / y)^N|`` and
    ``1/prod(1 + |root|)``, an analytic bound for the same quantity on the
    whole axis.  Hence ``|f_a(iy)| <= 1`` for every real ``y``.
    """
    if Z0 and Z0.points[0] == 0:
        raise ValueError("Z0 must not contain the origin; pass origin roots through a power factor")
    roots = Z0.expanded()
    N = int(len(roots))
    y = domination_grid(y_probe, samples)
    env = _head_envelope(roots, y, N)
    log_s_grid = float(env.max())
    log_s_analytic = float(np.sum(np.log1p(np.abs(roots))))
    if not (math.isfinite(log_s_grid) and math.isfinite(log_s_analytic)):
        raise ArithmeticError("non-finite head supremum in witness assembly")
    log_a = min(math.log(0.5) - log_s_grid, -log_s_analytic)
    a = math.exp(log_a)
    if not a > 0:
        raise ArithmeticError(f"witness constant underflowed (ln a = {log_a})")
    head = [Scalar(a)] + [PolyRoot(z, m) for z, m in Z0.entries]
    if N:
        head.append(SinIzOverZ(N))
    f_a = EntireFunctionModel(head)
    f = f_a * ent.polynomial(g0_roots) * f_inf

    check = domination_check(f_a, EntireFunctionModel([Scalar(1.0)]), y_max=y_probe, samples=samples)
    if not check.holds:
        raise ArithmeticError(f"|f_a(iy)| exceeds 1 at y = {check.worst_y}")
    if not vanishes_on(f, Z0):
        raise ArithmeticError("assembled witness does not vanish on Z0")
    return f


def vanishes_on(F: EntireFunctionModel, Z: PointDistribution) -> bool:
    """``F(Z) = 0``: ``Z`` is included in the zero distribution of ``F``."""
    if not Z:
        return True
    have = ent.zeros_of_model(F, Z.max_modulus()).as_dict()
    return all(have.get(z, 0) >= m for z, m in Z.entries)
