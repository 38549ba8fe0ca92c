"""Finite point distributions in the complex plane.

A distribution is a multiset of complex points, identified with its counting
measure.  Entries are stored in canonical order (modulus, argument,
multiplicity) so that serialization and all downstream summations are
bit-stable regardless of input order.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

__all__ = [
    "PointDistribution",
    "RegionPredicate",
    "counting_function",
    "counting_measure",
    "radial_counting",
    "upper_density_estimate",
    "union",
    "difference",
    "includes",
    "equals",
    "reflect",
    "conjugate",
    "scale",
    "load_distribution",
    "dump_distribution",
    "distribution_from_document",
    "distribution_to_document",
]


def _clean(z: complex) -> complex:
    # -0.0 + 0.0 == +0.0: one key per point, one argument convention
    return complex(z.real + 0.0, z.imag + 0.0)


class PointDistribution:
    """Immutable finite multiset of complex points.

    Parameters
    ----------
    entries : mapping or iterable
        Either a mapping ``point -> multiplicity`` or an iterable of
        ``(point, multiplicity)`` pairs.  Repeated points are merged by
        summing multiplicities.  Points are compared exactly.
    """

    __slots__ = ("_points", "_mults", "_index")

    def __init__(self, entries: Mapping[complex, int] | Iterable[tuple[complex, int]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        merged: dict[complex, int] = {}
        for z, m in items:
            z = _clean(complex(z))
            if not (math.isfinite(z.real) and math.isfinite(z.imag)):
                raise ValueError(f"non-finite point {z!r}")
            m = int(m)
            if m < 1:
                raise ValueError(f"multiplicity of {z!r} must be >= 1, got {m}")
            merged[z] = merged.get(z, 0) + m
        self._init_from_merged(merged)

    def _init_from_merged(self, merged: dict[complex, int]) -> None:
        pts = np.fromiter(merged.keys(), dtype=np.complex128, count=len(merged))
        mults = np.fromiter(merged.values(), dtype=np.int64, count=len(merged))
        order = np.lexsort((mults, np.angle(pts), np.abs(pts)))
        self._points = pts[order]
        self._mults = mults[order]
        self._points.flags.writeable = False
        self._mults.flags.writeable = False
        self._index = merged

    @classmethod
    def from_points(cls, points: Iterable[complex]) -> "PointDistribution":
        """Build a distribution from a flat list of points, each with multiplicity 1 per occurrence."""
        return cls((z, 1) for z in points)

    @classmethod
    def from_arrays(cls, points, mults=None) -> "PointDistribution":
        points = np.asarray(points, dtype=np.complex128).ravel()
        if mults is None:
            mults = np.ones(points.shape, dtype=np.int64)
        return cls(zip(points.tolist(), np.asarray(mults).ravel().tolist()))

    @property
    def points(self) -> np.ndarray:
        """Distinct points in canonical order (read-only array)."""
        return self._points

    @property
    def multiplicities(self) -> np.ndarray:
        return self._mults

    @property
    def entries(self) -> list[tuple[complex, int]]:
        return list(zip(self._points.tolist(), self._mults.tolist()))

    def total(self) -> int:
        """Total mass n_Z(C), i.e. the sum of multiplicities."""
        return int(self._mults.sum())

    def max_modulus(self) -> float:
        return float(np.abs(self._points[-1])) if len(self._points) else 0.0

    def expanded(self) -> np.ndarray:
        """Points repeated according to multiplicity."""
        return np.repeat(self._points, self._mults)

    def as_dict(self) -> dict[complex, int]:
        return dict(self._index)

    def __len__(self) -> int:
        return len(self._points)

    def __bool__(self) -> bool:
        return len(self._points) > 0

    def __iter__(self):
        return iter(self.entries)

    def __contains__(self, z) -> bool:
        return counting_function(self, z) > 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointDistribution):
            return NotImplemented
        return equals(self, other)

    def __hash__(self):
        return hash(frozenset(self._index.items()))

    def __or__(self, other: "PointDistribution") -> "PointDistribution":
        return union(self, other)

    def __sub__(self, other: "PointDistribution") -> "PointDistribution":
        return difference(self, other)

    def __le__(self, other: "PointDistribution") -> bool:
        return includes(self, other)

    def __repr__(self) -> str:
        body = ", ".join(f"{z}:{m}" for z, m in self.entries[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"PointDistribution({{{body}{more}}})"


@dataclass(frozen=True)
class RegionPredicate:
    """A subset S of the plane used by :func:`counting_measure`.

    ``kind`` is one of ``disk``, ``right``, ``left``, ``annulus`` or
    ``rectangle``.  Disk and annulus use the closed outer boundary
    ``|z| <= radius``; the annulus is ``r < |z| <= R``.  Half-planes are open.
    """

    kind: str
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0
    d: float = 0.0

    @classmethod
    def disk(cls, radius: float) -> "RegionPredicate":
        return cls("disk", radius)

    @classmethod
    def right_half_plane(cls) -> "RegionPredicate":
        return cls("right")

    @classmethod
    def left_half_plane(cls) -> "RegionPredicate":
        return cls("left")

    @classmethod
    def annulus(cls, r: float, R: float) -> "RegionPredicate":
        return cls("annulus", r, R)

    @classmethod
    def rectangle(cls, re_min: float, re_max: float, im_min: float, im_max: float) -> "RegionPredicate":
        return cls("rectangle", re_min, re_max, im_min, im_max)

    def mask(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        if self.kind == "disk":
            return np.abs(z) <= self.a
        if self.kind == "right":
            return z.real > 0
        if self.kind == "left":
            return z.real < 0
        if self.kind == "annulus":
            mod = np.abs(z)
            return (mod > self.a) & (mod <= self.b)
        if self.kind == "rectangle":
            return (z.real >= self.a) & (z.real <= self.b) & (z.imag >= self.c) & (z.imag <= self.d)
        raise ValueError(f"unknown region kind {self.kind!r}")

    def __contains__(self, z) -> bool:
        return bool(self.mask(np.array([z]))[0])


def counting_function(Z: PointDistribution, z: complex) -> int:
    """Multiplicity of ``z`` in ``Z`` (0 when absent)."""
    return Z._index.get(_clean(complex(z)), 0)


def counting_measure(Z: PointDistribution, S: RegionPredicate) -> int:
    """Number of points of ``Z`` in ``S``, counted with multiplicity."""
    return int(Z.multiplicities[S.mask(Z.points)].sum())


def radial_counting(Z: PointDistribution, r: float) -> int:
    """Points in the closed disk ``|z| <= r``, origin included."""
    if r < 0:
        raise ValueError(f"radius must be >= 0, got {r}")
    k = np.searchsorted(np.abs(Z.points), r, side="right")
    return int(Z.multiplicities[:k].sum())


def upper_density_estimate(Z: PointDistribution, r_min: float) -> float:
    """Finite-truncation surrogate for ``limsup n_rad(r) / r``.

    The sampling set is ``{r_min}`` together with every distinct modulus of
    ``Z`` in ``[r_min, max|z|]``; the maximum of ``n_rad(r)/r`` over that set
    is returned.  Origin points count towards ``n_rad``.  This is an estimate
    over the truncation, not the limit.
    """
    if not Z:
        raise ValueError("upper density of an empty distribution is undefined")
    rmax = Z.max_modulus()
    if not (0 < r_min < rmax):
        raise ValueError(f"r_min must lie in (0, {rmax}), got {r_min}")
    mod = np.abs(Z.points)
    cum = np.cumsum(Z.multiplicities)
    keep = mod >= r_min
    # last occurrence of each modulus carries the full count n_rad(modulus)
    last = np.r_[mod[1:] != mod[:-1], True]
    sel = keep & last
    ratios = cum[sel] / mod[sel]
    head = radial_counting(Z, r_min) / r_min
    return float(max(head, ratios.max(initial=0.0)))


def union(Z: PointDistribution, W: PointDistribution) -> PointDistribution:
    merged = Z.as_dict()
    for z, m in W._index.items():
        merged[z] = merged.get(z, 0) + m
    return _from_merged(merged)


def difference(W: PointDistribution, Z: PointDistribution) -> PointDistribution:
    """``W \\ Z`` for ``Z`` included in ``W``."""
    merged = W.as_dict()
    for z, m in Z._index.items():
        have = merged.get(z, 0)
        if m > have:
            raise ValueError(
                f"difference requires inclusion: point {z} has multiplicity {m} "
                f"in the subtrahend but {have} in the minuend"
            )
        if m == have:
            del merged[z]
        else:
            merged[z] = have - m
    return _from_merged(merged)


def includes(Z: PointDistribution, W: PointDistribution) -> bool:
    """True when ``Z`` is contained in ``W``, i.e. ``n_Z <= n_W`` pointwise."""
    w = W._index
    return all(m <= w.get(z, 0) for z, m in Z._index.items())


def equals(Z: PointDistribution, W: PointDistribution) -> bool:
    return Z._index == W._index


def _map(Z: PointDistribution, fn) -> PointDistribution:
    return PointDistribution((fn(z), m) for z, m in Z._index.items())


def _from_merged(merged: dict[complex, int]) -> PointDistribution:
    out = PointDistribution.__new__(PointDistribution)
    out._init_from_merged(merged)
    return out


def reflect(Z: PointDistribution) -> PointDistribution:
    """Mirror in the imaginary axis, ``z -> -conj(z)``."""
    return _map(Z, lambda z: complex(-z.real, z.imag))


def conjugate(Z: PointDistribution) -> PointDistribution:
    return _map(Z, lambda z: z.conjugate())


def scale(Z: PointDistribution, s: float) -> PointDistribution:
    if not s > 0:
        raise ValueError(f"scale factor must be > 0, got {s}")
    return _map(Z, lambda z: complex(s * z.real, s * z.imag))


# -- documents -----------------------------------------------------------------


def distribution_to_document(Z: PointDistribution) -> dict:
    return {"points": [{"re": z.real, "im": z.imag, "mult": m} for z, m in Z.entries]}


def distribution_from_document(doc) -> PointDistribution:
    """Parse ``{"points": [{"re", "im", "mult"}]}``; ``mult`` defaults to 1."""
    if not isinstance(doc, dict) or "points" not in doc:
        raise ValueError("distribution document needs a top-level 'points' list")
    unknown = set(doc) - {"points"}
    if unknown:
        raise ValueError(f"unknown distribution fields: {sorted(unknown)}")
    entries = []
    for i, rec in enumerate(doc["points"]):
        if not isinstance(rec, dict):
            raise ValueError(f"points[{i}]: expected an object")
        extra = set(rec) - {"re", "im", "mult"}
        if extra:
            raise ValueError(f"points[{i}]: unknown fields {sorted(extra)}")
        try:
            re = float(rec.get("re", 0.0))
            im = float(rec.get("im", 0.0))
            mult = rec.get("mult", 1)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"points[{i}]: {exc}") from None
        if isinstance(mult, bool) or not isinstance(mult, int) or mult < 1:
            raise ValueError(f"points[{i}]: mult must be a positive integer, got {mult!r}")
        entries.append((complex(re, im), mult))
    try:
        return PointDistribution(entries)
    except ValueError as exc:
        raise ValueError(f"points: {exc}") from None


def dump_distribution(Z: PointDistribution, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(distribution_to_document(Z), fh, indent=1)
        fh.write("\n")


def load_distribution(path) -> PointDistribution:
    with open(path, encoding="utf-8") as fh:
        return distribution_from_document(json.load(fh))
