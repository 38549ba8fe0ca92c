"""Entire functions of exponential type as factored products.

A model is a product of atoms.  Nothing is ever expanded into coefficients;
``ln|F(z)|`` is the sum of per-atom log-magnitudes, which stays finite for
large ``|z|`` and many factors.  Atoms of one kind are packed into arrays so
that evaluation is vectorized over both factors and evaluation points.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .points import PointDistribution

__all__ = [
    "Scalar",
    "PolyRoot",
    "Weierstrass1",
    "EvenPair",
    "Sinc",
    "SinIzOverZ",
    "Power",
    "EntireFunctionModel",
    "even_product",
    "weierstrass_product",
    "polynomial",
    "log_modulus",
    "log1m_abs",
    "log_abs_sin",
    "type_estimate",
    "zeros_of_model",
    "quotient_by_roots",
    "carried_zeros",
    "load_model",
    "dump_model",
    "model_from_document",
    "model_to_document",
]


@dataclass(frozen=True)
class Scalar:
    c: complex

    def __post_init__(self):
        if self.c == 0:
            raise ValueError("scalar factor must be nonzero")


@dataclass(frozen=True)
class PolyRoot:
    """``(z - a)^m``."""

    a: complex
    m: int = 1


@dataclass(frozen=True)
class Weierstrass1:
    """``((1 - z/a) exp(z/a))^m``, genus-one primary factor."""

    a: complex
    m: int = 1

    def __post_init__(self):
        if self.a == 0:
            raise ValueError("weierstrass1 needs a nonzero root")


@dataclass(frozen=True)
class EvenPair:
    """``(1 - z^2/w^2)^m``."""

    w: complex
    m: int = 1

    def __post_init__(self):
        if self.w == 0:
            raise ValueError("even_pair needs a nonzero root")


@dataclass(frozen=True)
class Sinc:
    """``sin(z)/z`` (value 1 at the origin)."""


@dataclass(frozen=True)
class SinIzOverZ:
    """``(sin(iz)/z)^n``; its modulus on the imaginary axis is ``|sin y / y|^n``."""

    n: int = 1


@dataclass(frozen=True)
class Power:
    """``z^k``; negative ``k`` only when cancelled by roots at the origin."""

    k: int


Atom = Union[Scalar, PolyRoot, Weierstrass1, EvenPair, Sinc, SinIzOverZ, Power]


def log1m_abs(u: np.ndarray) -> np.ndarray:
    """``ln|1 - u|`` elementwise, accurate for small ``|u|``.

    Uses ``0.5 * log1p(|u|^2 - 2 Re u)`` with the argument factored as
    ``x(x - 2) + y^2`` when ``|u| < 0.5`` and ``log|1 - u|`` otherwise.
    Returns ``-inf`` at ``u == 1``.
    """
    u = np.asarray(u, dtype=np.complex128)
    x, y = u.real, u.imag
    small = np.abs(u) < 0.5
    out = np.empty(u.shape)
    xs, ys = x[small], y[small]
    out[small] = 0.5 * np.log1p(xs * (xs - 2.0) + ys * ys)
    with np.errstate(divide="ignore"):
        out[~small] = np.log(np.abs(1.0 - u[~small]))
    return out


def log_abs_sin(z: np.ndarray) -> np.ndarray:
    """``ln|sin z|`` without overflow for large ``|Im z|``."""
    z = np.asarray(z, dtype=np.complex128)
    x, y = z.real, np.abs(z.imag)
    out = np.empty(z.shape)
    big = y > 20.0
    with np.errstate(divide="ignore"):
        xb, yb = x[big], y[big]
        e = np.exp(-2.0 * yb)
        # |sin z|^2 = (cosh 2y - cos 2x) / 2
        out[big] = yb - math.log(2.0) + 0.5 * np.log1p(e * (e - 2.0 * np.cos(2.0 * xb)))
        xs, ys = x[~big], y[~big]
        out[~big] = 0.5 * np.log(np.sin(xs) ** 2 + np.sinh(ys) ** 2)
    return out


class EntireFunctionModel:
    """Immutable product of atoms representing a nonzero entire function."""

    def __init__(self, factors: Iterable[Atom] = ()):
        factors = tuple(factors)
        if not factors:
            factors = (Scalar(1.0),)
        self.factors = factors
        scal = 0.0
        poly, weier, even = [], [], []
        sinc = 0
        siniz = 0
        power = 0
        for f in factors:
            if isinstance(f, Scalar):
                scal += math.log(abs(f.c))
            elif isinstance(f, PolyRoot):
                _check_mult(f.m)
                poly.append((complex(f.a), f.m))
            elif isinstance(f, Weierstrass1):
                _check_mult(f.m)
                weier.append((complex(f.a), f.m))
            elif isinstance(f, EvenPair):
                _check_mult(f.m)
                even.append((complex(f.w), f.m))
            elif isinstance(f, Sinc):
                sinc += 1
            elif isinstance(f, SinIzOverZ):
                _check_mult(f.n)
                siniz += f.n
            elif isinstance(f, Power):
                power += int(f.k)
            else:
                raise TypeError(f"unknown factor {f!r}")
        self._log_scalar = scal
        self._poly_a, self._poly_m = _pack(poly)
        self._weier_a, self._weier_m = _pack(weier)
        self._even_w, self._even_m = _pack(even)
        self._even_w2 = self._even_w**2
        self._sinc = sinc
        self._siniz = siniz
        self._power = power
        m0 = int(self._poly_m[self._poly_a == 0].sum())
        self._origin_order = power + m0
        if self._origin_order < 0:
            raise ValueError(
                f"z^{power} is not cancelled by roots at the origin (order {m0}); "
                "the model would not be entire"
            )

    def __repr__(self) -> str:
        kinds = {}
        for f in self.factors:
            kinds[type(f).__name__] = kinds.get(type(f).__name__, 0) + 1
        return f"EntireFunctionModel({kinds})"

    def __mul__(self, other: "EntireFunctionModel") -> "EntireFunctionModel":
        return EntireFunctionModel(self.factors + other.factors)

    @property
    def is_even(self) -> bool:
        """Structurally even: only scalars, even pairs, sinc atoms, even powers."""
        return (
            len(self._poly_a) == 0
            and len(self._weier_a) == 0
            and self._power % 2 == 0
            and self._siniz % 2 == 0
        )

    def log_modulus(self, z) -> np.ndarray:
        """Vectorized ``ln|F(z)|``; ``-inf`` at zeros."""
        z = np.asarray(z, dtype=np.complex128)
        shape = z.shape
        z = z.ravel()
        out = np.full(z.shape, self._log_scalar)
        at0 = z == 0
        zz = np.where(at0, 1.0, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            for chunk in _chunks(len(z)):
                zc = z[chunk]
                acc = np.zeros(len(zc))
                if len(self._even_w):
                    u = (zc[:, None] ** 2) / self._even_w2[None, :]
                    acc += log1m_abs(u) @ self._even_m
                if len(self._weier_a):
                    u = zc[:, None] / self._weier_a[None, :]
                    acc += (log1m_abs(u) + u.real) @ self._weier_m
                if len(self._poly_a):
                    nz = self._poly_a != 0
                    if nz.any():
                        d = np.abs(zc[:, None] - self._poly_a[None, nz])
                        acc += np.log(d) @ self._poly_m[nz]
                out[chunk] += acc
            # sin(z)/z and sin(iz)/z are 1 and i at the origin: log-modulus 0 there
            if self._sinc:
                out += self._sinc * np.where(at0, 0.0, log_abs_sin(zz) - np.log(np.abs(zz)))
            if self._siniz:
                out += self._siniz * np.where(at0, 0.0, log_abs_sin(1j * zz) - np.log(np.abs(zz)))
            if self._origin_order:
                out += np.where(at0, -np.inf, self._origin_order * np.log(np.abs(zz)))
        return out.reshape(shape)

    def __call__(self, z) -> complex:
        """Direct complex evaluation; for small models and tests only."""
        z = complex(z)
        val = complex(1.0)
        for f in self.factors:
            if isinstance(f, Scalar):
                val *= f.c
            elif isinstance(f, PolyRoot):
                # origin roots are folded into the net power below
                if f.a != 0:
                    val *= (z - f.a) ** f.m
            elif isinstance(f, Weierstrass1):
                u = z / f.a
                val *= ((1 - u) * np.exp(u)) ** f.m
            elif isinstance(f, EvenPair):
                val *= (1 - z * z / (f.w * f.w)) ** f.m
            elif isinstance(f, Sinc):
                val *= 1.0 if z == 0 else np.sin(z) / z
            elif isinstance(f, SinIzOverZ):
                val *= (1j if z == 0 else np.sin(1j * z) / z) ** f.n
        if self._origin_order:
            val *= z**self._origin_order
        return complex(val)


def _check_mult(m) -> None:
    if int(m) != m or m < 1:
        raise ValueError(f"multiplicity must be a positive integer, got {m!r}")


def _pack(items):
    if not items:
        return np.zeros(0, dtype=np.complex128), np.zeros(0)
    a = np.array([x for x, _ in items], dtype=np.complex128)
    m = np.array([float(k) for _, k in items])
    return a, m


def _chunks(n: int, step: int = 256):
    for start in range(0, n, step):
        yield slice(start, min(n, start + step))


def even_product(W: PointDistribution) -> EntireFunctionModel:
    """``prod (1 - z^2/w^2)^m`` over the entries of ``W``; zeros ``W`` and ``-W``."""
    if not W:
        raise ValueError("even product needs a nonempty distribution")
    if W.points[0] == 0:
        raise ValueError("even product cannot have a root at the origin")
    return EntireFunctionModel(EvenPair(w, m) for w, m in W.entries)


def weierstrass_product(Z: PointDistribution) -> EntireFunctionModel:
    """Genus-one canonical product with zero set ``Z``."""
    if Z and Z.points[0] == 0:
        raise ValueError("Weierstrass product cannot have a root at the origin; use Power")
    if not Z:
        return EntireFunctionModel([Scalar(1.0)])
    return EntireFunctionModel(Weierstrass1(a, m) for a, m in Z.entries)


def polynomial(roots: PointDistribution, leading: complex = 1.0) -> EntireFunctionModel:
    """Monic (times ``leading``) polynomial with root distribution ``roots``."""
    return EntireFunctionModel([Scalar(leading)] + [PolyRoot(a, m) for a, m in roots.entries])


def log_modulus(F: EntireFunctionModel, z):
    """``ln|F(z)|``; scalar in, float out."""
    out = F.log_modulus(z)
    return float(out) if np.ndim(out) == 0 else out


def type_estimate(F: EntireFunctionModel, radii: Sequence[float], angles: int = 64) -> float:
    """Lower estimate of the exponential type from a finite set of circles.

    Returns ``max_r max_theta ln|F(r e^{i theta})| / r`` over ``angles``
    equally spaced directions.  No extrapolation is attempted.
    """
    radii = np.asarray(radii, dtype=float)
    if radii.size == 0:
        raise ValueError("type estimate needs at least one radius")
    if np.any(radii <= 0):
        raise ValueError("radii must be positive")
    mods = np.unique(np.abs(zeros_of_model(F, float(radii.max()) + 1.0).points))
    radii = np.where(np.isin(radii, mods), radii + 1e-9, radii)
    theta = 2 * np.pi * np.arange(angles) / angles
    z = radii[:, None] * np.exp(1j * theta)[None, :]
    vals = F.log_modulus(z).max(axis=1) / radii
    return float(max(vals.max(), 0.0))


def zeros_of_model(F: EntireFunctionModel, disk_radius: float) -> PointDistribution:
    """All zeros of ``F`` with ``|z| <= disk_radius``, multiplicities summed."""
    if not disk_radius > 0:
        raise ValueError("disk radius must be positive")
    out: dict[complex, int] = {}

    def add(z, m):
        z = complex(z)
        if abs(z) <= disk_radius:
            out[z] = out.get(z, 0) + int(m)

    for a, m in zip(F._poly_a.tolist(), F._poly_m.tolist()):
        if a != 0:
            add(a, m)
    for a, m in zip(F._weier_a.tolist(), F._weier_m.tolist()):
        add(a, m)
    for w, m in zip(F._even_w.tolist(), F._even_m.tolist()):
        add(w, m)
        add(-w, m)
    # floor division can land one short when disk_radius is itself k*pi; add() filters
    kmax = int(disk_radius // math.pi) + 1
    for k in range(1, kmax + 1):
        if F._sinc:
            add(k * math.pi, F._sinc)
            add(-k * math.pi, F._sinc)
        if F._siniz:
            # sin(iz) = 0 at iz = k pi
            add(complex(0, -k * math.pi), F._siniz)
            add(complex(0, k * math.pi), F._siniz)
    if F._origin_order > 0:
        add(0, F._origin_order)
    return PointDistribution(out)


def carried_zeros(F: EntireFunctionModel) -> PointDistribution:
    """Zeros contributed by polynomial, Weierstrass, even-pair and power atoms.

    This is the whole zero set unless ``F`` has sine atoms, whose infinitely
    many zeros are left out.
    """
    mods = [abs(a) for a in np.r_[F._poly_a, F._weier_a, F._even_w]]
    reach = max(mods, default=0.0) + 1.0
    G = _without_sines(F)
    return zeros_of_model(G, reach)


def _without_sines(F: EntireFunctionModel) -> EntireFunctionModel:
    return EntireFunctionModel(f for f in F.factors if not isinstance(f, (Sinc, SinIzOverZ)))


def quotient_by_roots(F: EntireFunctionModel, roots: PointDistribution) -> EntireFunctionModel:
    """``F / prod (z - a)^m`` for ``roots`` carried by polynomial or even-pair atoms.

    An even pair loses one linear factor via
    ``1 - z^2/w^2 = -(z - w)(z + w)/w^2``.  Roots sitting on other atoms are
    rejected.
    """
    poly: dict[complex, int] = {}
    even: dict[complex, int] = {}
    rest: list = []
    for f in F.factors:
        if isinstance(f, PolyRoot):
            poly[complex(f.a)] = poly.get(complex(f.a), 0) + f.m
        elif isinstance(f, EvenPair):
            even[complex(f.w)] = even.get(complex(f.w), 0) + f.m
        else:
            rest.append(f)
    extra: list = []
    for a, m in roots.entries:
        for _ in range(m):
            if poly.get(a, 0) > 0:
                poly[a] -= 1
                continue
            key = a if even.get(a, 0) > 0 else (-a if even.get(-a, 0) > 0 else None)
            if key is None:
                raise ValueError(f"root {a} is not carried by a polynomial or even-pair factor")
            even[key] -= 1
            extra.append(Scalar(-1.0 / (key * key)))
            poly[-a] = poly.get(-a, 0) + 1
    factors = rest + extra
    factors += [PolyRoot(a, m) for a, m in poly.items() if m > 0]
    factors += [EvenPair(w, m) for w, m in even.items() if m > 0]
    return EntireFunctionModel(factors)


# -- documents -----------------------------------------------------------------

_KINDS = {
    "scalar": (Scalar, ("c",)),
    "poly_root": (PolyRoot, ("a", "m")),
    "weierstrass1": (Weierstrass1, ("a", "m")),
    "even_pair": (EvenPair, ("w", "m")),
    "sinc": (Sinc, ()),
    "sin_iz_over_z": (SinIzOverZ, ("n",)),
    "power": (Power, ("k",)),
}
_NAMES = {cls: name for name, (cls, _) in _KINDS.items()}
_COMPLEX = {"c", "a", "w"}


def model_to_document(F: EntireFunctionModel) -> dict:
    recs = []
    for f in F.factors:
        name = _NAMES[type(f)]
        rec = {"kind": name}
        for key in _KINDS[name][1]:
            v = getattr(f, key)
            if key in _COMPLEX:
                v = complex(v)
                rec[key] = {"re": v.real, "im": v.imag}
            else:
                rec[key] = int(v)
        recs.append(rec)
    return {"factors": recs}


def model_from_document(doc) -> EntireFunctionModel:
    """Parse ``{"factors": [{"kind": ..., <params>}]}``.

    Complex parameters are ``{"re": x, "im": y}`` objects (a bare number is
    read as real).  Integer parameters default to 1.
    """
    if not isinstance(doc, dict) or "factors" not in doc:
        raise ValueError("model document needs a top-level 'factors' list")
    unknown = set(doc) - {"factors"}
    if unknown:
        raise ValueError(f"unknown model fields: {sorted(unknown)}")
    atoms = []
    for i, rec in enumerate(doc["factors"]):
        try:
            kind = rec["kind"]
            cls, keys = _KINDS[kind]
        except (KeyError, TypeError):
            raise ValueError(f"factors[{i}]: unknown or missing kind") from None
        extra = set(rec) - set(keys) - {"kind"}
        if extra:
            raise ValueError(f"factors[{i}]: unknown fields {sorted(extra)}")
        kwargs = {}
        try:
            for key in keys:
                if key in _COMPLEX:
                    v = rec[key]
                    kwargs[key] = complex(float(v["re"]), float(v.get("im", 0.0))) if isinstance(v, dict) else complex(float(v))
                elif key in rec:
                    kwargs[key] = int(rec[key])
            atoms.append(cls(**kwargs))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"factors[{i}] ({kind}): {exc}") from None
    return EntireFunctionModel(atoms)


def dump_model(F: EntireFunctionModel, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_document(F), fh)
        fh.write("\n")


def load_model(path) -> EntireFunctionModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_document(json.load(fh))
