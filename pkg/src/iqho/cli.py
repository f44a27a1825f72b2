"""iqho command line: verification sweeps emitting JSON or CSV tables.

Exit status is 0 when every row passes, 1 on a verification failure and 2 on
a usage or configuration error.
"""
from __future__ import annotations

import argparse
import ast
import csv
import io
import json
import math
import operator
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .coherent import (QuadGrid2D, bicoherent, eigenvalue_check, gaussian_probe,
                       identity_resolution_IQHO, identity_resolution_L2, normalization_check)
from .distrib import SchwartzProbe, weak_limit_study
from .errors import (DegreeTooLarge, DomainError, IncompatiblePair, MembershipError,
                     RegimeError, ScheduleError, SpanError)
from .numquad import contour_rotation_check
from .pbops import (Kind, Regime, SpanVector, ThetaParams, algebra_check, biortho_matrix,
                    build_operators, eigenfamily, ladder_check, norm_sq, spectrum_check)
from .report import FIELDS, Report, to_cell, to_jsonable
from .specfun import MAX_DEGREE

CONFIG_ERRORS = (DegreeTooLarge, DomainError, IncompatiblePair, MembershipError, RegimeError,
                 ScheduleError, SpanError)

DEFAULT_SCHEDULE = "pi/2-2^-j:j=1..12"
DEFAULT_THETAS = {
    "verify-algebra": "0,0.3,-0.3,0.9,-0.9,1.4,-1.4,pi/2,-pi/2",
    "norms": "0.3,-0.3,0.9,-0.9,1.4,-1.4",
    "biortho": "0.3,-0.3,0.9,-0.9,1.4,-1.4",
    "coherent": "0,0.6,-0.6,1.0,-1.0,pi/2,-pi/2",
    "resolution": "0.6",
    "contour": "1.0",
}
PROBES = {
    "e0": lambda om: gaussian_probe(om),
    "xg": lambda om: SchwartzProbe.of([0.0, 1.0], 2.0).f,
    "x2g": lambda om: SchwartzProbe.of([0.0, 0.0, 1.0], 1.0).f,
}

# ---------------------------------------------------------------------------
# angle expressions


_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_UNARY = {ast.UAdd: operator.pos, ast.USub: operator.neg}


def eval_expr(text: str, names: dict | None = None) -> float:
    """Arithmetic on numbers, ``pi`` and the given names; '^' means power."""
    env = {"pi": math.pi, **(names or {})}

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return node.value
        if isinstance(node, ast.Name) and node.id in env:
            return env[node.id]
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in _UNARY:
            return _UNARY[type(node.op)](ev(node.operand))
        raise ScheduleError(f"unsupported element in {text!r}")

    try:
        tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ScheduleError(f"cannot parse {text!r}") from exc
    return float(ev(tree))


def theta_params(text: str, omega: float) -> ThetaParams:
    """'pi/2' and '-pi/2' give the exact critical angles; anything past them is rejected."""
    value = eval_expr(text)
    if abs(abs(value) - math.pi / 2) < 1e-15:
        return ThetaParams.critical(1 if value > 0 else -1, omega)
    params = ThetaParams(value, omega)
    if params.regime is Regime.FORBIDDEN:
        raise RegimeError(f"theta={value} is in the forbidden regime |theta| > pi/2; "
                          "H_theta has no admissible eigenfamilies there")
    return params


def parse_schedule(text: str) -> list:
    """'EXPR:VAR=a..b' evaluated at the integers a..b, e.g. 'pi/2-2^-j:j=1..12'."""
    try:
        expr, rng = text.split(":")
        var, bounds = rng.split("=")
        lo, hi = (int(b) for b in bounds.split(".."))
    except ValueError as exc:
        raise ScheduleError(f"schedule {text!r} is not of the form EXPR:VAR=a..b") from exc
    var = var.strip()
    if not var.isidentifier() or lo > hi:
        raise ScheduleError(f"bad range in schedule {text!r}")
    return [eval_expr(expr, {var: j}) for j in range(lo, hi + 1)]


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    command: str
    omega: float = 1.0
    theta: str | None = None
    theta_schedule: str = DEFAULT_SCHEDULE
    n_max: int = 20
    tol: float = 1e-8
    format: str = "json"
    out: str | None = None
    seed: int = 0
    workers: int = 1
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise ValueError(f"--omega must be positive, got {self.omega}")
        if self.n_max < 0:
            raise ValueError("--nmax must be non-negative")
        if self.n_max > MAX_DEGREE:
            raise DegreeTooLarge(f"n_max={self.n_max} exceeds the supported degree {MAX_DEGREE}")
        if not (math.isfinite(self.tol) and self.tol > 0):
            raise ValueError("--tol must be positive")
        if self.workers < 1:
            raise ValueError("--workers must be at least 1")
        self.thetas()
        if self.command == "weak-limit":
            self.schedule()

    def thetas(self) -> list:
        text = self.theta if self.theta is not None else DEFAULT_THETAS.get(self.command, "")
        return [theta_params(t, self.omega) for t in text.split(",") if t.strip()]

    def schedule(self) -> list:
        return parse_schedule(self.theta_schedule)

    def meta(self) -> dict:
        m = asdict(self)
        extra = m.pop("extra")
        m.pop("out")
        if self.theta is None and self.command in DEFAULT_THETAS:
            m["theta"] = DEFAULT_THETAS[self.command]
        if self.command != "weak-limit":
            m.pop("theta_schedule")
        else:
            m["theta_values"] = self.schedule()
        return {**m, **extra}


# ---------------------------------------------------------------------------
# per-point tasks; top-level so worker processes can import them


def _task_algebra(cfg: RunConfig, params: ThetaParams) -> Report:
    rep = Report(f"algebra theta={params.label}")
    rep.extend(algebra_check(params, seed=cfg.seed, tol=cfg.tol))
    ops = build_operators(params)
    rep.extend(ladder_check(eigenfamily(params, Kind.PHI, cfg.n_max), ops, cfg.n_max, cfg.tol))
    rep.extend(spectrum_check(params, cfg.n_max, cfg.tol))
    return rep


def _task_norms(cfg: RunConfig, params: ThetaParams) -> Report:
    rep = Report(f"norms theta={params.label}")
    for n in range(cfg.n_max + 1):
        rep.add(norm_sq(params, n, cfg.tol)[1].rows[0])
    return rep


def _task_biortho(cfg: RunConfig, params: ThetaParams) -> Report:
    return biortho_matrix(params, cfg.n_max, cfg.tol)[1]


def _task_coherent(cfg: RunConfig, params: ThetaParams) -> Report:
    rng = np.random.default_rng([cfg.seed, round(params.theta * 1e9) % 2**32])
    count = cfg.extra.get("samples", 8)
    r = 5 * np.sqrt(rng.random(count))
    zs = r * np.exp(2j * np.pi * rng.random(count))
    rep = Report(f"bi-coherent theta={params.label}")
    ops = build_operators(params)
    for z in zs:
        pair = bicoherent(params, complex(z))
        rep.extend(eigenvalue_check(pair, ops, min(cfg.tol, 1e-12)))
        if params.regime is Regime.SQUARE_INTEGRABLE:
            rep.extend(normalization_check(pair, cfg.tol))
    return rep


def _task_resolution_l2(cfg: RunConfig, params: ThetaParams) -> Report:
    rep = Report(f"L2 resolution theta={params.label}")
    grid = QuadGrid2D(cfg.extra.get("radius", 6.0))
    for i in range(3):
        for j in range(3):
            rep.extend(identity_resolution_L2(params, SpanVector.basis(Kind.PSI, i),
                                              SpanVector.basis(Kind.PHI, j), grid,
                                              max(cfg.tol, 1e-4)))
    return rep


def _task_resolution_iqho(cfg: RunConfig, sign: int) -> Report:
    f = gaussian_probe(2 * cfg.omega)
    grid = QuadGrid2D(cfg.extra.get("radius", 6.0))
    return identity_resolution_IQHO(sign, f, f, grid, cfg.omega, max(cfg.tol, 1e-3))


def _task_weak_limit(cfg: RunConfig, n: int) -> Report:
    sched = cfg.schedule()
    sign = 1 if sched[-1] > 0 else -1
    probe = SchwartzProbe(PROBES[cfg.extra["probe"]](cfg.omega))
    return weak_limit_study(sign, n, probe, cfg.omega, sched, cfg.extra["weak_tol"])


def _task_contour(cfg: RunConfig, params: ThetaParams) -> Report:
    radii = [float(r) for r in cfg.extra["radii"].split(",")]
    return contour_rotation_check(cfg.extra["n"], cfg.extra["m"], params.theta, radii)


def _run(task, cfg: RunConfig, points: list) -> list:
    if cfg.workers == 1 or len(points) == 1:
        return [task(cfg, p) for p in points]
    with ProcessPoolExecutor(max_workers=min(cfg.workers, len(points))) as pool:
        # map yields in submission order, so output order never depends on scheduling
        return list(pool.map(task, [cfg] * len(points), points))


def cmd_verify_algebra(cfg: RunConfig) -> list:
    return _run(_task_algebra, cfg, cfg.thetas())


def cmd_norms(cfg: RunConfig) -> list:
    return _run(_task_norms, cfg, cfg.thetas())


def cmd_biortho(cfg: RunConfig) -> list:
    return _run(_task_biortho, cfg, cfg.thetas())


def cmd_coherent(cfg: RunConfig) -> list:
    return _run(_task_coherent, cfg, cfg.thetas())


def cmd_resolution(cfg: RunConfig) -> list:
    reps = _run(_task_resolution_iqho, cfg, [1, -1])
    l2 = [p for p in cfg.thetas() if p.regime is Regime.SQUARE_INTEGRABLE]
    return reps + _run(_task_resolution_l2, cfg, l2)


def cmd_weak_limit(cfg: RunConfig) -> list:
    if cfg.extra["n"] > cfg.n_max:
        raise DegreeTooLarge(f"--n {cfg.extra['n']} exceeds --nmax {cfg.n_max}")
    return _run(_task_weak_limit, cfg, [cfg.extra["n"]])


def cmd_contour(cfg: RunConfig) -> list:
    for p in cfg.thetas():
        if p.regime is not Regime.SQUARE_INTEGRABLE:
            raise DomainError("the rectangle check needs |theta| < pi/2")
    return _run(_task_contour, cfg, cfg.thetas())


COMMANDS = {
    "verify-algebra": (cmd_verify_algebra, "ladder, commutator, adjoint and spectrum identities"),
    "norms": (cmd_norms, "||phi_n||^2 against the Legendre closed form"),
    "biortho": (cmd_biortho, "<phi_n, psi_m> = delta_nm"),
    "coherent": (cmd_coherent, "bi-coherent eigenvalue and normalization checks"),
    "resolution": (cmd_resolution, "resolutions of the identity at the critical angles"),
    "weak-limit": (cmd_weak_limit, "phi_n^(theta) -> phi_n^(+-) against a test function"),
    "contour": (cmd_contour, "rectangle closure between the real axis and the rotated line"),
}


# ---------------------------------------------------------------------------
# output


def render(cfg: RunConfig, reports: list) -> tuple:
    rows = [r for rep in reports for r in rep.rows]
    ok = all(r.passed for r in rows)
    if cfg.format == "json":
        doc = {"meta": to_jsonable({**cfg.meta(), "pass": ok}),
               "rows": [to_jsonable(r.as_dict()) for r in rows]}
        return json.dumps(doc, indent=2, ensure_ascii=False) + "\n", ok
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(FIELDS)
    for r in rows:
        d = r.as_dict()
        w.writerow([to_cell(d[k]) for k in FIELDS])
    return buf.getvalue(), ok


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--omega", type=float, default=1.0)
    common.add_argument("--theta", default=None,
                        help="comma-separated angles, e.g. '0.3,-0.9,pi/2'")
    common.add_argument("--theta-schedule", default=DEFAULT_SCHEDULE,
                        help="EXPR:VAR=a..b, default %(default)s")
    common.add_argument("--nmax", type=int, default=20, dest="n_max")
    common.add_argument("--tol", type=float, default=1e-8)
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--out", default=None, help="output file (default: stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--workers", type=int, default=1)

    parser = argparse.ArgumentParser(prog="iqho", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {name: sub.add_parser(name, parents=[common], help=help_)
            for name, (_, help_) in COMMANDS.items()}
    subs["coherent"].add_argument("--samples", type=int, default=8,
                                  help="random z per angle, |z| <= 5")
    subs["resolution"].add_argument("--radius", type=float, default=6.0)
    subs["weak-limit"].add_argument("--n", type=int, default=0,
                                    help="eigenfunction index (default 0)")
    subs["weak-limit"].add_argument("--probe", choices=sorted(PROBES), default="e0")
    subs["weak-limit"].add_argument("--weak-tol", type=float, default=1e-3,
                                    help="bound on d at the last angle")
    subs["contour"].add_argument("--n", type=int, default=3)
    subs["contour"].add_argument("--m", type=int, default=3)
    subs["contour"].add_argument("--radii", default="4,5,6")
    return parser


_EXTRA_KEYS = ("samples", "radius", "n", "m", "probe", "weak_tol", "radii")


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    extra = {k: getattr(ns, k) for k in _EXTRA_KEYS if hasattr(ns, k)}
    return RunConfig(ns.command, ns.omega, ns.theta, ns.theta_schedule, ns.n_max, ns.tol,
                     ns.format, ns.out, ns.seed, ns.workers, extra)


def main(argv: list | None = None) -> int:
    ns = build_parser().parse_args(argv)
    cfg = config_from_args(ns)
    try:
        cfg.validate()
        reports = COMMANDS[cfg.command][0](cfg)
    except CONFIG_ERRORS + (ValueError,) as exc:
        print(f"iqho {cfg.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    text, ok = render(cfg, reports)
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
