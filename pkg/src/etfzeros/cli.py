"""Command-line front end.

Every command writes one JSON report (to ``--out`` or stdout).  Exit status
is 0 on success, 2 when the run completed but the checked condition failed
(growth detected, domination violated), and 1 when the run could not be
carried out.
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import entire as ent
from . import mrcheck, separation
from .logchar import build_profile
from .points import (
    PointDistribution,
    distribution_from_document,
    distribution_to_document,
    radial_counting,
    reflect,
    union,
    upper_density_estimate,
)
from .quadrature import DEFAULT_TOL, IntegrationError

COMMANDS = ("chars", "density", "separation", "check-mr", "lemma", "product-eval", "dominate", "witness", "gen")
FAMILIES = ("arith", "mirrored-arith", "perturbed-lattice", "sector")


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    z: str | None = None
    w: str | None = None
    model: list = field(default_factory=list)
    r0: float = 1.0
    levels: int = 12
    tol: float = DEFAULT_TOL
    tail_fraction: float = 0.5
    y_max: float = 50.0
    samples: int = 400
    seed: int = 0
    out: str | None = None
    pretty: bool = False
    r_min: float | None = None
    d: float = 0.5
    family: str | None = None
    step: float = 1.0
    count: int = 10
    angle: float = 0.0
    jitter: float = 0.0
    density: float = 1.0
    half_angle: float = 0.5
    product: str = "none"
    power: int = 0

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not self.r0 > 0:
            raise UsageError("--r0 must be positive")
        if self.levels < 1:
            raise UsageError("--levels must be >= 1")
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if not 0 < self.tail_fraction <= 1:
            raise UsageError("--tail-fraction must lie in (0, 1]")
        if not self.y_max > 1e-3:
            raise UsageError("--y-max must exceed 1e-3")
        if self.samples < 100:
            raise UsageError("--samples must be >= 100")
        if not 0 < self.d <= 1:
            raise UsageError("--d must lie in (0, 1]")


# -- generators ----------------------------------------------------------------


def generate_family(
    name: str,
    step: float = 1.0,
    count: int = 10,
    angle: float = 0.0,
    jitter: float = 0.0,
    seed: int = 0,
    density: float = 1.0,
    half_angle: float = 0.5,
) -> PointDistribution:
    """Materialize a truncation of a standard family.

    ``arith``: ``k*step*e^{i angle}``, ``k = 1..count``.
    ``mirrored-arith``: ``arith`` plus its mirror image in the imaginary axis.
    ``perturbed-lattice``: ``k*step`` plus a uniform complex jitter of size
    ``jitter`` per coordinate.
    ``sector``: moduli ``k/density`` with uniform angles in
    ``[-half_angle, half_angle]``.
    """
    if count < 1:
        raise UsageError("count must be >= 1")
    k = np.arange(1, count + 1, dtype=float)
    if name in ("arith", "mirrored-arith"):
        if not step > 0:
            raise UsageError("step must be > 0")
        pts = k * step * complex(math.cos(angle), math.sin(angle))
        Z = PointDistribution.from_points(pts.tolist())
        return union(Z, reflect(Z)) if name == "mirrored-arith" else Z
    if name == "perturbed-lattice":
        if not step > 0:
            raise UsageError("step must be > 0")
        if jitter < 0:
            raise UsageError("jitter must be >= 0")
        rng = np.random.default_rng(seed)
        noise = rng.uniform(-1, 1, size=(count, 2)) * jitter
        pts = k * step + noise[:, 0] + 1j * noise[:, 1]
        return PointDistribution.from_points(pts.tolist())
    if name == "sector":
        if not density > 0:
            raise UsageError("density must be > 0")
        if not 0 < half_angle < math.pi / 2:
            raise UsageError("half-angle must lie in (0, pi/2)")
        rng = np.random.default_rng(seed)
        theta = rng.uniform(-half_angle, half_angle, size=count)
        pts = (k / density) * np.exp(1j * theta)
        return PointDistribution.from_points(pts.tolist())
    raise UsageError(f"unknown family {name!r}; choose from {', '.join(FAMILIES)}")


# -- input ---------------------------------------------------------------------


def _array_lines(text: str, key: str) -> list[int]:
    """1-based line of each element of the top-level array ``key``."""
    m = re.search(r'"%s"\s*:\s*\[' % re.escape(key), text)
    if not m:
        return []
    dec = json.JSONDecoder()
    pos = m.end()
    lines = []
    while True:
        while pos < len(text) and text[pos] in " \t\r\n,":
            pos += 1
        if pos >= len(text) or text[pos] == "]":
            return lines
        lines.append(text.count("\n", 0, pos) + 1)
        try:
            _, pos = dec.raw_decode(text, pos)
        except json.JSONDecodeError:
            return lines


def _load(path: str, parse, key: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return parse(doc)
    except ValueError as exc:
        msg = str(exc)
        m = re.match(r"%s\[(\d+)\]" % key, msg)
        line = 1
        if m:
            lines = _array_lines(text, key)
            i = int(m.group(1))
            if i < len(lines):
                line = lines[i]
        raise UsageError(f"{path}:{line}: {msg}") from None


def _dist(path: str | None, flag: str) -> PointDistribution:
    if path is None:
        raise UsageError(f"{flag} is required")
    return _load(path, distribution_from_document, "points")


def _model(path: str) -> ent.EntireFunctionModel:
    return _load(path, ent.model_from_document, "factors")


# -- commands ------------------------------------------------------------------


def _cmd_gen(cfg: RunConfig):
    if cfg.family is None:
        raise UsageError("gen needs a family")
    Z = generate_family(
        cfg.family, cfg.step, cfg.count, cfg.angle, cfg.jitter, cfg.seed, cfg.density, cfg.half_angle
    )
    if cfg.product == "none":
        if cfg.power:
            raise UsageError("--power only applies with --product")
        return distribution_to_document(Z), 0, [f"{Z.total()} points, max modulus {Z.max_modulus():.6g}"]
    if cfg.product == "even":
        F = ent.even_product(Z)
    elif cfg.product == "weierstrass":
        F = ent.weierstrass_product(Z)
    else:
        raise UsageError(f"unknown product {cfg.product!r}")
    if cfg.power:
        F = F * ent.EntireFunctionModel([ent.Power(cfg.power)])
    return ent.model_to_document(F), 0, [f"model with {len(F.factors)} factors"]


def _cmd_chars(cfg: RunConfig):
    Z = _dist(cfg.z, "--z")
    P = build_profile(Z)
    grid = mrcheck.dyadic_grid(cfg.r0, cfg.levels)
    r = np.array([c[0] for c in grid])
    R = np.array([c[1] for c in grid])
    right = P.right_interval(r, R)
    left = P.left_interval(r, R)
    doc = {
        "grid": [list(c) for c in grid],
        "l_right": right.tolist(),
        "l_left": left.tolist(),
        "l_sub": np.maximum(right, left).tolist(),
        "l_right_total": float(P.l_rh(np.inf)),
        "l_left_total": float(P.l_lh(np.inf)),
    }
    return doc, 0, [f"l_rh(inf) = {doc['l_right_total']:.12g}", f"l_lh(inf) = {doc['l_left_total']:.12g}"]


def _cmd_density(cfg: RunConfig):
    Z = _dist(cfg.z, "--z")
    r_min = cfg.r_min if cfg.r_min is not None else cfg.r0
    try:
        est = upper_density_estimate(Z, r_min)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    doc = {
        "upper_density_estimate": est,
        "r_min": r_min,
        "max_modulus": Z.max_modulus(),
        "total": Z.total(),
        "n_rad_max": radial_counting(Z, Z.max_modulus()),
    }
    return doc, 0, [f"upper density estimate {est:.12g} over [{r_min}, {Z.max_modulus():.6g}]"]


def _cmd_separation(cfg: RunConfig):
    Z = _dist(cfg.z, "--z")
    try:
        rep = separation.asymptotic_separation(Z, cfg.tail_fraction)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    doc = rep.to_document()
    return doc, 0, [
        f"d_strict {rep.d_strict:.6g}, tail liminf {rep.tail_liminf_estimate:.6g}, "
        f"tail limsup |Im|/|z| {rep.tail_limsup_im_estimate:.6g}, decaying {rep.decaying}"
    ]


def _grid_summary(rep: mrcheck.GridReport) -> list[str]:
    return [
        f"sup {rep.sup_value:.9g} over {len(rep.values)} cells ({rep.levels_used} levels)",
        f"slope {rep.growth_slope:.6g}, residual {rep.residual:.6g}: {rep.verdict}",
    ]


def _cmd_check_mr(cfg: RunConfig):
    Z = _dist(cfg.z, "--z")
    W = _dist(cfg.w, "--w")
    try:
        rep = mrcheck.mr_condition_report(Z, W, cfg.r0, cfg.levels)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    status = 2 if rep.verdict == "growth-detected" else 0
    return rep.to_document(), status, _grid_summary(rep), {"cells": len(rep.values)}


def _cmd_lemma(cfg: RunConfig):
    if len(cfg.model) != 1:
        raise UsageError("lemma needs exactly one --model")
    F = _model(cfg.model[0])
    rep = mrcheck.lemma_discrepancy_report(F, cfg.r0, cfg.levels, tol=cfg.tol)
    status = 2 if rep.verdict == "growth-detected" else 0
    return rep.to_document(), status, _grid_summary(rep), dict(rep.work, cells=len(rep.values))


def _finite(x: float):
    return x if math.isfinite(x) else None


def _cmd_product_eval(cfg: RunConfig):
    if len(cfg.model) != 1:
        raise UsageError("product-eval needs exactly one --model")
    F = _model(cfg.model[0])
    Z = _dist(cfg.z, "--z")
    pts = Z.points
    vals = F.log_modulus(pts)
    doc = {
        "values": [
            {"re": z.real, "im": z.imag, "log_modulus": _finite(v), "zero": bool(np.isneginf(v))}
            for z, v in zip(pts.tolist(), vals.tolist())
        ]
    }
    return doc, 0, [f"{len(pts)} evaluations"]


def _cmd_dominate(cfg: RunConfig):
    if len(cfg.model) != 2:
        raise UsageError("dominate needs two --model files: f then g")
    f, g = _model(cfg.model[0]), _model(cfg.model[1])
    rep = mrcheck.domination_check(f, g, cfg.y_max, cfg.samples)
    doc = rep.to_document()
    doc["worst_margin"] = _finite(rep.worst_margin)
    return doc, 0 if rep.holds else 2, [
        f"holds {rep.holds}: worst margin {rep.worst_margin:.6g} at y = {rep.worst_y:.6g}"
    ]


def _cmd_witness(cfg: RunConfig):
    if len(cfg.model) != 1:
        raise UsageError("witness needs exactly one --model (the dominating g)")
    Z = _dist(cfg.z, "--z")
    g = _model(cfg.model[0])
    Z0, Zinf = mrcheck.tail_split(Z, cfg.d)
    G0, _ = mrcheck.tail_split(ent.carried_zeros(g), cfg.d)
    try:
        g_inf = mrcheck.subset_tail_factor(g, G0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if not mrcheck.vanishes_on(g_inf, Zinf):
        raise UsageError(
            "the separated part of Z is not inside the zero set of g/g0; "
            "only that special case of the tail factor is constructive"
        )
    try:
        f = mrcheck.witness_assemble(Z0, G0, g_inf, cfg.y_max, cfg.samples)
    except ArithmeticError as exc:
        raise UsageError(str(exc)) from None
    dom = mrcheck.domination_check(f, g, cfg.y_max, cfg.samples)
    vanishes = mrcheck.vanishes_on(f, Z)
    doc = {
        "head_size": Z0.total(),
        "tail_size": Zinf.total(),
        "g0_size": G0.total(),
        "domination": dict(dom.to_document(), worst_margin=_finite(dom.worst_margin)),
        "vanishes_on_z": vanishes,
        "model": ent.model_to_document(f),
    }
    ok = dom.holds and vanishes
    return doc, 0 if ok else 2, [
        f"head {Z0.total()} points, g0 degree {G0.total()}",
        f"domination holds {dom.holds} (worst margin {dom.worst_margin:.6g}), vanishes on Z {vanishes}",
    ]


_DISPATCH = {
    "gen": _cmd_gen,
    "chars": _cmd_chars,
    "density": _cmd_density,
    "separation": _cmd_separation,
    "check-mr": _cmd_check_mr,
    "lemma": _cmd_lemma,
    "product-eval": _cmd_product_eval,
    "dominate": _cmd_dominate,
    "witness": _cmd_witness,
}


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    """Execute one command; return the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        cfg.validate()
        result = _DISPATCH[cfg.command](cfg)
    except (UsageError, IntegrationError) as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    doc, status, summary = result[:3]
    work = result[3] if len(result) > 3 else {}
    if cfg.command == "gen":
        report = doc
    else:
        report = {"command": cfg.command, "config": _config_echo(cfg), **doc, "timing": work}
    text = json.dumps(report, indent=1, allow_nan=False) + "\n"
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    if cfg.pretty:
        for line in summary:
            print(line, file=stdout)
    elif not cfg.out:
        stdout.write(text)
    return status


def _config_echo(cfg: RunConfig) -> dict:
    keep = {
        "chars": ("z", "r0", "levels"),
        "density": ("z", "r_min", "r0"),
        "separation": ("z", "tail_fraction"),
        "check-mr": ("z", "w", "r0", "levels"),
        "lemma": ("model", "r0", "levels", "tol"),
        "product-eval": ("model", "z"),
        "dominate": ("model", "y_max", "samples"),
        "witness": ("z", "model", "d", "y_max", "samples"),
    }[cfg.command]
    full = asdict(cfg)
    return {k: full[k] for k in keep}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="etfzeros",
        description="Logarithmic characteristics of zero distributions and domination checks on the imaginary axis.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(p, *names):
        if "z" in names:
            p.add_argument("--z", help="point distribution document (JSON)")
        if "w" in names:
            p.add_argument("--w", help="second point distribution document (JSON)")
        if "model" in names:
            p.add_argument("--model", action="append", default=[], help="model document (JSON); repeatable")
        if "r0" in names:
            p.add_argument("--r0", type=float, default=1.0, help="innermost grid radius (default 1)")
        if "levels" in names:
            p.add_argument("--levels", type=int, default=12, help="dyadic grid levels (default 12)")
        if "tol" in names:
            p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative quadrature tolerance")
        if "tail_fraction" in names:
            p.add_argument("--tail-fraction", type=float, default=0.5, help="fraction of points in the tail")
        if "y_max" in names:
            p.add_argument("--y-max", type=float, default=50.0, help="largest |y| probed on the imaginary axis")
        if "samples" in names:
            p.add_argument("--samples", type=int, default=400, help="probe points per spacing rule")
        if "d" in names:
            p.add_argument("--d", type=float, default=0.5, help="angle-ratio threshold for the head split")
        p.add_argument("--out", help="write the JSON report here")
        p.add_argument("--pretty", action="store_true", help="print a human summary")

    common(sub.add_parser("chars", help="right/left logarithmic measures on a dyadic grid"), "z", "r0", "levels")
    p = sub.add_parser("density", help="upper density estimate")
    common(p, "z", "r0")
    p.add_argument("--r-min", type=float, help="smallest sampled radius (defaults to --r0)")
    common(sub.add_parser("separation", help="angle separation from the imaginary axis"), "z", "tail_fraction")
    common(sub.add_parser("check-mr", help="l_Z(r,R) - l_W(r,R) on a dyadic grid"), "z", "w", "r0", "levels")
    common(sub.add_parser("lemma", help="J(r,R; ln|F|) against l(r,R) for a model"), "model", "r0", "levels", "tol")
    common(sub.add_parser("product-eval", help="ln|F(z)| at the points of --z"), "model", "z")
    common(sub.add_parser("dominate", help="check |f(iy)| <= |g(iy)|; pass --model f --model g"), "model", "y_max", "samples")
    common(
        sub.add_parser("witness", help="assemble f = f_a g0 f_inf vanishing on Z and dominated by g"),
        "z", "model", "d", "y_max", "samples",
    )
    p = sub.add_parser("gen", help="generate a distribution (or its canonical product)")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--step", type=float, default=1.0, help="lattice step (arith families, perturbed-lattice)")
    p.add_argument("--count", type=int, default=10, help="number of generated points before mirroring")
    p.add_argument("--angle", type=float, default=0.0, help="ray angle for arith families")
    p.add_argument("--jitter", type=float, default=0.0, help="uniform perturbation size per coordinate")
    p.add_argument("--density", type=float, default=1.0, help="points per unit modulus for sector")
    p.add_argument("--half-angle", type=float, default=0.5, help="sector half-opening around the positive axis")
    p.add_argument("--seed", type=int, default=0, help="seed for the randomized families")
    p.add_argument("--product", choices=("none", "even", "weierstrass"), default="none",
                   help="emit a model document for the canonical product instead of the points")
    p.add_argument("--power", type=int, default=0, help="extra z^k factor with --product")
    p.add_argument("--out", help="write the document here")
    p.add_argument("--pretty", action="store_true", help="print a human summary")
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    kwargs = {k: v for k, v in vars(ns).items() if v is not None or k in ("z", "w", "out", "r_min")}
    return RunConfig(**kwargs)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    return run(config_from_args(ns))


if __name__ == "__main__":
    sys.exit(main())
