"""The boundary functional

    J(r, R; v) = 1/(2 pi) * integral_r^R (v(-iy) + v(iy)) / y^2 dy

for integrands with at most logarithmic singularities.

Integration is global adaptive Gauss-Kronrod (7/15) with bisection.  Panels
never straddle a singular hint.  When the strength of each singularity is
known (always the case for a model, whose zeros on the imaginary axis are
known exactly) the term ``s*ln|y - h|`` is subtracted from the integrand and
its weighted integral added back in closed form.  Hints without a strength
instead get a graded change of variables on the panels touching them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .entire import EntireFunctionModel, zeros_of_model

__all__ = ["QuadratureResult", "IntegrationError", "j_integral", "imaginary_axis_zeros", "log_weight_integral"]

DEFAULT_TOL = 1e-9
MAX_PANELS = 100_000

# Kronrod 15-point nodes on [0, 1); odd indices are the 7-point Gauss nodes.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.r_[-_XK[:-1], _XK[::-1]]
KRONROD_WEIGHTS = np.r_[_WK[:-1], _WK[::-1]]
GAUSS_WEIGHTS = np.zeros(15)
GAUSS_WEIGHTS[1:7:2] = _WG[:3]
GAUSS_WEIGHTS[7] = _WG[3]
GAUSS_WEIGHTS[9:14:2] = _WG[:3][::-1]


class IntegrationError(RuntimeError):
    """Quadrature could not produce a finite, converged value."""


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    panel_count: int
    singular_points_used: list = field(default_factory=list)
    evaluations: int = 0


def imaginary_axis_zeros(F: EntireFunctionModel, radius: float) -> dict[float, int]:
    """Map ``h -> m(ih) + m(-ih)`` for zeros ``±ih`` of ``F`` with ``0 < h <= radius``."""
    out: dict[float, int] = {}
    for z, m in zeros_of_model(F, radius).entries:
        if z.real == 0 and z.imag != 0:
            h = abs(z.imag)
            out[h] = out.get(h, 0) + m
    return out


def _log_antiderivative(y: float, h: float) -> float:
    # d/dy of  -ln|y-h|/y + (ln|y-h| - ln y)/h  is  ln|y-h|/y^2
    if y == h:
        return -math.log(h) / h
    d = math.log(abs(y - h))
    return -d / y + (d - math.log(y)) / h


def log_weight_integral(a: float, b: float, h: float) -> float:
    """Closed form of ``integral_a^b ln|y - h| / y^2 dy`` for ``0 < a < b``, ``h > 0``."""
    return _log_antiderivative(b, h) - _log_antiderivative(a, h)


def _smoothstep(t):
    return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)


def _smoothstep_d(t):
    return 30.0 * t * t * (1.0 - t) ** 2


class _Integrand:
    """``(v(-iy) + v(iy)) / y^2`` minus known log terms, on a panel map."""

    def __init__(self, v, strengths: dict[float, float]):
        self.v = v
        self.strengths = strengths
        self.evaluations = 0

    def __call__(self, y: np.ndarray) -> np.ndarray:
        self.evaluations += y.size
        w = np.asarray(self.v(-1j * y), dtype=float) + np.asarray(self.v(1j * y), dtype=float)
        for h, s in self.strengths.items():
            with np.errstate(divide="ignore"):
                w = w - s * np.log(np.abs(y - h))
        return w / (y * y)


def _eval_panels(f: _Integrand, panels: np.ndarray, graded: np.ndarray):
    """Kronrod value and |K - G| for each ``(a, b)`` row of ``panels``."""
    a, b = panels[:, 0:1], panels[:, 1:2]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    t = mid + half * NODES[None, :]
    jac = np.broadcast_to(half, t.shape).copy()
    if graded.any():
        # graded panels live on [0, 1] in t and map onto the segment (lo, hi)
        lo = panels[graded, 2:3]
        hi = panels[graded, 3:4]
        tg = t[graded]
        jac[graded] = jac[graded] * (hi - lo) * _smoothstep_d(tg)
        t[graded] = lo + (hi - lo) * _smoothstep(tg)
    vals = f(t.ravel()).reshape(t.shape) * jac
    bad = ~np.isfinite(vals)
    if bad.any():
        i, j = np.argwhere(bad)[0]
        raise IntegrationError(f"non-finite integrand at y = {float(t[i, j])!r}")
    k = vals @ KRONROD_WEIGHTS
    g = vals @ GAUSS_WEIGHTS
    return k, np.abs(k - g)


def j_integral(
    v: Callable | EntireFunctionModel,
    q,
    singular_hints: Sequence[float] = (),
    tol: float = DEFAULT_TOL,
    hint_strengths: dict[float, float] | None = None,
    max_panels: int = MAX_PANELS,
) -> QuadratureResult:
    """Adaptive evaluation of ``J(r, R; v)``.

    ``v`` is either an :class:`EntireFunctionModel` (then ``v = ln|F|`` and
    hints and strengths come from its zeros on the imaginary axis) or a
    vectorized callable taking points ``w`` of the imaginary axis and
    returning ``v(w)``.  ``q`` is an ``IntervalQuery`` or ``(r, R)`` pair with
    finite ``R``.  The stopping rule is
    ``error_estimate <= tol * (1 + |value|)``.
    """
    r, R = (q.r, q.R) if hasattr(q, "r") else (float(q[0]), float(q[1]))
    if not (0 < r < R):
        raise ValueError(f"need 0 < r < R, got ({r}, {R})")
    if not math.isfinite(R):
        raise ValueError("J is only evaluated on finite intervals")
    if not tol > 0:
        raise ValueError("tol must be positive")

    if isinstance(v, EntireFunctionModel):
        model = v
        strengths = {h: float(s) for h, s in imaginary_axis_zeros(model, R).items()}
        strengths.update(hint_strengths or {})
        hints = sorted(set(strengths) | {float(h) for h in singular_hints})
        func = model.log_modulus
    else:
        func = v
        strengths = {float(h): float(s) for h, s in (hint_strengths or {}).items()}
        hints = sorted({float(h) for h in singular_hints} | set(strengths))
    hints = [h for h in hints if h > 0]
    graded_hints = {h for h in hints if h not in strengths}
    strengths = {h: s for h, s in strengths.items() if h > 0 and s != 0}

    cuts = sorted({r, R} | {h for h in hints if r < h < R})
    f = _Integrand(func, strengths)

    # rows: a, b, lo, hi (lo/hi only meaningful for graded panels)
    rows, graded = [], []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        g = lo in graded_hints or hi in graded_hints
        rows.append((0.0, 1.0, lo, hi) if g else (lo, hi, lo, hi))
        graded.append(g)
    panels = np.array(rows, dtype=float)
    graded = np.array(graded, dtype=bool)
    vals, errs = _eval_panels(f, panels, graded)

    while True:
        value = math.fsum(vals[np.lexsort((panels[:, 0], panels[:, 2]))].tolist())
        err = float(errs.sum())
        target = tol * (1.0 + abs(value))
        if err <= target:
            break
        n = len(panels)
        # split every panel above its fair share; always the worst one
        pick = errs > target / n
        pick[int(np.argmax(errs))] = True
        if n + int(pick.sum()) > max_panels:
            raise IntegrationError(
                f"panel cap {max_panels} reached with error estimate {err:.3e} > {target:.3e}"
            )
        sel = panels[pick]
        mid = 0.5 * (sel[:, 0] + sel[:, 1])
        left = sel.copy()
        left[:, 1] = mid
        right = sel.copy()
        right[:, 0] = mid
        children = np.vstack([left, right])
        cgraded = np.r_[graded[pick], graded[pick]]
        cv, ce = _eval_panels(f, children, cgraded)
        keep = ~pick
        panels = np.vstack([panels[keep], children])
        graded = np.r_[graded[keep], cgraded]
        vals = np.r_[vals[keep], cv]
        errs = np.r_[errs[keep], ce]

    analytic = math.fsum(s * log_weight_integral(r, R, h) for h, s in sorted(strengths.items()))
    total = (value + analytic) / (2.0 * math.pi)
    return QuadratureResult(
        value=total,
        abs_error_estimate=err / (2.0 * math.pi),
        panel_count=len(panels),
        singular_points_used=[h for h in hints if r <= h <= R],
        evaluations=f.evaluations,
    )
