"""Quadrature oracle: adaptive Gauss-Legendre on straight complex paths and on squares.

``integrate_line`` works panel by panel with a 16-point rule and uses the
8-point rule on the same panel as its error estimate. Integrands are called
on a whole batch of points at once and may return a vector per point.

With ``dps`` set, nodes and arithmetic switch to gmpy2 numbers carrying that
many decimal digits and the integrand receives an object array of
``gmpy2.mpc``; the precision context is active while it runs. That
mode exists for integrands whose integral is many orders of magnitude
smaller than the integral of their modulus (Hermite products on rotated
lines), where double rounding alone exceeds the target tolerance.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import gmpy2
import numpy as np

from .errors import DomainError, NoConvergence
from .report import Report, ReportRow
from .specfun import hermite_norm_sq, hermite_values

MAX_PANELS = 2**14
EPS = np.finfo(float).eps


@dataclass(frozen=True)
class ContourPath:
    """Straight path z(t) = origin + direction*t for t in [t0, t1].

    ``R`` is None for the infinite lines, meaning the truncation radius is
    picked from the integrand's decay.
    """

    kind: str
    origin: complex = 0j
    direction: complex = 1 + 0j
    t0: float = -math.inf
    t1: float = math.inf
    R: float | None = None
    end: complex | None = None

    @classmethod
    def real_line(cls, R: float | None = None) -> "ContourPath":
        return cls("real", 0j, 1 + 0j, R=_check_radius(R))

    @classmethod
    def rotated_line(cls, angle: float, R: float | None = None) -> "ContourPath":
        """z = exp(-i angle/2) t, t in [-R, R]."""
        return cls("rotated", 0j, cmath.exp(-0.5j * angle), R=_check_radius(R))

    @classmethod
    def segment(cls, z0: complex, z1: complex) -> "ContourPath":
        z0, z1 = complex(z0), complex(z1)
        return cls("segment", z0, z1 - z0, 0.0, 1.0, R=abs(z1 - z0), end=z1)

    def bounds(self, R: float) -> tuple:
        if self.kind == "segment":
            return self.t0, self.t1
        return -R, R


def _check_radius(R):
    if R is not None and not R > 0:
        raise ValueError(f"truncation radius must be positive, got {R}")
    return R


@dataclass
class QuadResult:
    """Integral value with its error estimate.

    For vector-valued integrands ``value`` and ``errors`` are arrays and
    ``err_estimate`` is their maximum.
    """

    value: complex | np.ndarray
    err_estimate: float
    n_evals: int
    errors: np.ndarray | None = None
    radius: float | None = None
    panels: int = 0
    abs_integral: np.ndarray | float = field(default=0.0, repr=False)


# ---------------------------------------------------------------------------
# nodes


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def precision(dps: int):
    """Context manager giving gmpy2 arithmetic ``dps`` decimal digits."""
    return gmpy2.context(gmpy2.get_context(), precision=int(math.ceil(dps * 3.3219280948873626)) + 8)


@lru_cache(maxsize=None)
def gauss_legendre_mp(order: int, dps: int) -> tuple:
    """Nodes and weights polished by Newton steps in ``dps`` digits."""
    x0, _ = gauss_legendre(order)
    xs, ws = [], []
    with precision(dps):
        tiny = gmpy2.mpfr(10) ** (-dps - 5)

        def legendre_pair(x):
            p0, p1 = gmpy2.mpfr(1), x
            for k in range(1, order):
                p0, p1 = p1, ((2 * k + 1) * x * p1 - k * p0) / (k + 1)
            return p1, order * (x * p1 - p0) / (x * x - 1)

        for guess in x0:
            x = gmpy2.mpfr(float(guess))
            for _ in range(100):
                p, dp = legendre_pair(x)
                step = p / dp
                x -= step
                if abs(step) < tiny:
                    break
            _, dp = legendre_pair(x)
            xs.append(x)
            ws.append(2 / ((1 - x * x) * dp * dp))
    return np.array(xs, dtype=object), np.array(ws, dtype=object)


def _rule(order: int, dps: int | None):
    if dps is None:
        return gauss_legendre(order)
    return gauss_legendre_mp(order, dps)


def _magnitude(vals) -> np.ndarray:
    """Max modulus over components, as float64, per point."""
    a = np.abs(vals)
    if a.dtype == object:
        a = a.astype(float)
    return a if a.ndim == 1 else a.max(axis=1)


def _call(f: Callable, z) -> np.ndarray:
    vals = np.asarray(f(z))
    if vals.shape[:1] != (len(z),):
        vals = np.broadcast_to(vals, (len(z),) + vals.shape[1:]).copy()
    return vals


# ---------------------------------------------------------------------------
# truncation


def tail_radius(f: Callable, direction: complex = 1 + 0j, start: float = 8.0,
                drop: float = 40.0, r_max: float = 1e4, dps: int | None = None) -> float:
    """Smallest tried radius beyond which |f(direction*t)| stays e^-drop below its peak.

    Raises NoConvergence when no such radius exists up to ``r_max``, which is
    how oscillatory integrands without Gaussian decay are refused.
    """
    R = start
    while R <= r_max:
        t = np.concatenate([np.linspace(-R, R, 801), [-1.5 * R, 1.5 * R, -2 * R, 2 * R]])
        mag = _magnitude(_call(f, _points(0j, direction, t, dps)))
        if not np.all(np.isfinite(mag[:801])):
            raise NoConvergence("integrand is not finite on the path")
        peak = mag[:801].max()
        if peak == 0:
            return R
        outer = np.concatenate([mag[:1], mag[800:801], mag[801:]])
        outer = np.where(np.isfinite(outer), outer, np.inf)
        if outer.max() <= peak * math.exp(-drop):
            return R
        R *= 1.5
    raise NoConvergence(f"integrand does not decay within |t| <= {r_max:g}")


def _points(origin, direction, t, dps):
    if dps is None:
        return origin + direction * np.asarray(t, dtype=float)
    o = gmpy2.mpc(origin)
    d = gmpy2.mpc(direction)
    return np.array([o + d * (ti if isinstance(ti, type(gmpy2.mpfr(0))) else gmpy2.mpfr(float(ti)))
                     for ti in np.asarray(t, dtype=object).reshape(-1)], dtype=object)


# ---------------------------------------------------------------------------
# 1-D adaptive rule


def _panel_pass(f, origin, direction, a, b, dps):
    """G16, G8 and int|f| (by G16) on panels [a_i, b_i]; arrays of shape (P, K)."""
    x16, w16 = _rule(16, dps)
    x8, w8 = _rule(8, dps)
    mid = (a + b) / 2
    half = (b - a) / 2
    t = np.concatenate([mid[:, None] + half[:, None] * x16[None, :],
                        mid[:, None] + half[:, None] * x8[None, :]], axis=1)
    P = len(a)
    z = _points(origin, direction, t.reshape(-1), dps)
    vals = _call(f, z)
    comp = vals.shape[1:]
    vals = vals.reshape((P, 24) + comp)
    if vals.ndim == 2:
        vals = vals[:, :, None]
    scale = (half * (direction if dps is None else _mpc(direction, dps)))[:, None]
    g16 = np.einsum("pnk,n->pk", vals[:, :16], w16) * scale
    g8 = np.einsum("pnk,n->pk", vals[:, 16:], w8) * scale
    absint = np.einsum("pnk,n->pk", np.abs(vals[:, :16]), w16) * np.abs(scale)
    return g16, g8, absint, vals.shape[2] if comp else 0


def _mpc(z, dps):
    return gmpy2.mpc(z)


def _adaptive(f, origin, direction, lo, hi, tol, dps, max_panels, initial):
    span = hi - lo
    unit = eps_of(dps)
    if dps is None:
        edges = np.linspace(lo, hi, initial + 1)
    else:
        lo_m, hi_m = gmpy2.mpfr(lo), gmpy2.mpfr(hi)
        edges = np.array([lo_m + (hi_m - lo_m) * k / initial for k in range(initial + 1)],
                         dtype=object)
    pend_a, pend_b = edges[:-1], edges[1:]
    done = []  # (a, g16, err, absint)
    n_evals = 0
    n_comp = None
    while len(pend_a):
        if len(done) + len(pend_a) > max_panels:
            raise NoConvergence(f"more than {max_panels} panels needed")
        g16, g8, absint, n_comp = _panel_pass(f, origin, direction, pend_a, pend_b, dps)
        n_evals += 24 * len(pend_a)
        err = np.abs(g16 - g8)
        if err.dtype == object:
            err = err.astype(float)
            absint_f = absint.astype(float)
        else:
            absint_f = absint
        if not (np.all(np.isfinite(err)) and np.all(np.isfinite(absint_f))):
            raise NoConvergence("integrand is not finite on the path")
        width = np.array([float(b - a) for a, b in zip(pend_a, pend_b)])
        local = np.asarray(tol, float)[None, :] * (width / span)[:, None] if np.ndim(tol) else \
            float(tol) * (width / span)[:, None]
        ok = np.all((err <= local) | (err <= 64 * unit * absint_f), axis=1)
        for i in np.flatnonzero(ok):
            done.append((float(pend_a[i]), g16[i], err[i], absint_f[i]))
        bad = np.flatnonzero(~ok)
        mids = (pend_a[bad] + pend_b[bad]) / 2
        pend_a, pend_b = (np.concatenate([pend_a[bad], mids]), np.concatenate([mids, pend_b[bad]]))
    done.sort(key=lambda item: item[0])
    value = _ordered_sum([d[1] for d in done])
    errs = np.sum([d[2] for d in done], axis=0)
    absint = np.sum([d[3] for d in done], axis=0)
    errs = errs + 64 * unit * absint
    return value, errs, absint, n_evals, len(done), n_comp


def eps_of(dps: int | None) -> float:
    return EPS if dps is None else 10.0 ** (-dps)


def _ordered_sum(rows):
    acc = rows[0]
    for r in rows[1:]:
        acc = acc + r
    return acc


def integrate_line(f: Callable, path: ContourPath, tol: float | np.ndarray = 1e-10,
                   dps: int | None = None, max_panels: int = MAX_PANELS,
                   initial_panels: int = 16, drop: float | None = None) -> QuadResult:
    """Integral of f(z) dz along ``path`` to absolute tolerance ``tol``.

    ``tol`` may be an array with one entry per component of a vector-valued
    integrand. Raises NoConvergence when the panel budget runs out or when an
    infinite path's integrand does not decay.
    """
    if np.any(np.asarray(tol) <= 0):
        raise ValueError("tol must be positive")
    if dps is not None:
        with precision(dps):
            return _integrate_line(f, path, tol, dps, max_panels, initial_panels, drop)
    return _integrate_line(f, path, tol, dps, max_panels, initial_panels, drop)


def _integrate_line(f, path, tol, dps, max_panels, initial_panels, drop):
    if path.kind == "segment":
        return _integrate_segment(f, path, tol, dps, max_panels, initial_panels)
    R = path.R
    if R is None:
        if drop is None:
            drop = 40.0 if dps is None else max(40.0, 2.31 * dps + 10)
        R = tail_radius(f, path.direction, drop=drop, dps=dps)
    lo, hi = path.bounds(R)
    value, errs, absint, n_evals, panels, n_comp = _adaptive(
        f, path.origin, path.direction, lo, hi, tol, dps, max_panels, initial_panels)
    return _result(value, errs, absint, n_evals, panels, n_comp, R)


def _integrate_segment(f, path, tol, dps, max_panels, initial):
    z0 = path.origin
    z1 = path.end if path.end is not None else path.origin + path.direction
    if path.direction == 0:
        vals = _call(f, np.array([z0]) if dps is None else _points(z0, 0j, [0.0], dps))
        shape = vals.shape[1:]
        zero = np.zeros(shape, complex) if shape else 0j
        return QuadResult(zero, 0.0, 1, np.zeros(shape) if shape else None, 0.0, 0)
    # integrate in a canonical orientation so reversing a segment flips the sign exactly
    flip = (z1.real, z1.imag) < (z0.real, z0.imag)
    if flip:
        z0, z1 = z1, z0
    value, errs, absint, n_evals, panels, n_comp = _adaptive(
        f, z0, z1 - z0, 0.0, 1.0, tol, dps, max_panels, initial)
    if flip:
        value = -value
    return _result(value, errs, absint, n_evals, panels, n_comp, abs(z1 - z0))


def _result(value, errs, absint, n_evals, panels, n_comp, R):
    value = np.array([complex(v) for v in value])
    errs = np.asarray(errs, float)
    absint = np.asarray(absint, float)
    if n_comp == 0:
        return QuadResult(complex(value[0]), float(errs[0]), n_evals, None, R, panels,
                          float(absint[0]))
    return QuadResult(value, float(errs.max()), n_evals, errs, R, panels, absint)


# ---------------------------------------------------------------------------
# 2-D fixed rule


def integrate_plane(F: Callable, R: float = 6.0, panels: int = 48, rule_order: int = 8,
                    chunk_rows: int = 4) -> QuadResult:
    """Tensor Gauss-Legendre over the square [-R, R]^2 with area measure dz_r dz_i.

    The error estimate is the difference to the half-order rule on the same
    panels. Rows of panels are summed in a fixed order, so results are
    reproducible bit for bit.
    """
    if R <= 0 or panels < 1 or rule_order < 2:
        raise ValueError("need R > 0, panels >= 1, rule_order >= 2")
    hi_x, hi_w = gauss_legendre(rule_order)
    lo_x, lo_w = gauss_legendre(max(1, rule_order // 2))
    edges = np.linspace(-R, R, panels + 1)
    half = (edges[1] - edges[0]) / 2
    mids = (edges[:-1] + edges[1:]) / 2

    def nodes(x, w):
        pts = (mids[:, None] + half * x[None, :]).reshape(-1)
        wts = np.tile(w * half, panels)
        return pts, wts

    total_hi = total_lo = absint = None
    n_evals = 0
    for x, w, which in ((hi_x, hi_w, "hi"), (lo_x, lo_w, "lo")):
        pts, wts = nodes(x, w)
        per_row = len(x)
        acc = None
        acc_abs = None
        for r0 in range(0, panels, chunk_rows):
            rows = pts[r0 * per_row:(r0 + chunk_rows) * per_row]
            rw = wts[r0 * per_row:(r0 + chunk_rows) * per_row]
            zi, zr = np.meshgrid(rows, pts, indexing="ij")
            wgrid = np.outer(rw, wts)
            vals = _call(F, (zr + 1j * zi).reshape(-1))
            n_evals += vals.shape[0]
            comp = vals.shape[1:]
            vals = vals.reshape(wgrid.shape + comp)
            wv = wgrid.reshape(wgrid.shape + (1,) * len(comp))
            part = np.sum(vals * wv, axis=(0, 1))
            acc = part if acc is None else acc + part
            if which == "hi":
                pa = np.sum(np.abs(vals) * wv, axis=(0, 1))
                acc_abs = pa if acc_abs is None else acc_abs + pa
        if which == "hi":
            total_hi, absint = acc, acc_abs
        else:
            total_lo = acc
    errs = np.abs(total_hi - total_lo) + 64 * EPS * absint
    if np.ndim(total_hi) == 0:
        return QuadResult(complex(total_hi), float(errs), n_evals, None, R, panels * panels,
                          float(absint))
    return QuadResult(np.asarray(total_hi, complex), float(np.max(errs)), n_evals,
                      np.asarray(errs), R, panels * panels, absint)


# ---------------------------------------------------------------------------
# Hermite products on complex paths


def hermite_products(pairs: list) -> Callable:
    """Vector integrand z -> [H_n(z) H_m(z) exp(-z^2) for (n, m) in pairs].

    Works on complex128 arrays and on object arrays of mpc numbers.
    """
    n_max = max(max(p) for p in pairs)

    def integrand(z):
        if z.dtype == object:
            weight = np.array([gmpy2.exp(-(zz * zz)) for zz in z], dtype=object)
        else:
            weight = np.exp(-z * z)
        h = hermite_values(n_max, z)
        return np.stack([h[n] * h[m] * weight for n, m in pairs], axis=1)

    return integrand


def rotated_hermite_table(n_max: int, theta: float, rtol: float = 1e-10, dps: int = 30):
    """int_{Gamma_theta} H_n H_m e^{-z^2} dz for all n, m <= n_max.

    Returns (matrix, QuadResult). Tolerances are per entry: ``rtol`` times
    2^max(n,m) max(n,m)! sqrt(pi).
    """
    pairs = [(n, m) for n in range(n_max + 1) for m in range(n, n_max + 1)]
    tol = np.array([rtol * hermite_norm_sq(max(p)) for p in pairs])
    res = integrate_line(hermite_products(pairs), ContourPath.rotated_line(theta), tol=tol,
                         dps=dps)
    # the path runs along exp(-i theta/2) t; the integral is oriented left to right
    mat = np.zeros((n_max + 1, n_max + 1), complex)
    for (n, m), v in zip(pairs, res.value):
        mat[n, m] = mat[m, n] = v
    return mat, res


def rectangle_corners(R: float, theta: float) -> dict:
    """Corners of the closed path between the real axis and Gamma_theta, |Re z| <= R."""
    h = R * math.tan(theta / 2)
    return {"A": complex(-R, h), "B": complex(R, -h), "C": complex(R, 0.0), "D": complex(-R, 0.0)}


def rectangle_edges(n: int, m: int, theta: float, R: float, dps: int = 30,
                    rtol: float = 1e-13) -> dict:
    """Edge integrals of H_n H_m e^{-z^2} over A->B->C->D->A."""
    c = rectangle_corners(R, theta)
    f = hermite_products([(n, m)])
    # tolerance relative to the largest edge integrand scale on the rotated edge
    scale = hermite_norm_sq(max(n, m))
    out = {}
    for name, (a, b) in {"AB": (c["A"], c["B"]), "BC": (c["B"], c["C"]),
                         "CD": (c["C"], c["D"]), "DA": (c["D"], c["A"])}.items():
        res = integrate_line(f, ContourPath.segment(a, b), tol=rtol * scale, dps=dps)
        out[name] = complex(res.value[0]) if np.ndim(res.value) else res.value
    return out


def contour_rotation_check(n: int, m: int, theta: float, R_values: list,
                           dps: int = 30) -> Report:
    """Closure, vertical-edge decay and edge parity on the rectangle between R and Gamma_theta."""
    if abs(theta) >= math.pi / 2:
        raise DomainError(f"needs |theta| < pi/2, got {theta}")
    R_values = sorted(float(r) for r in R_values)
    rep = Report(f"contour rotation n={n} m={m} theta={theta}")
    verticals = []
    edges_by_R = {}
    for R in R_values:
        e = rectangle_edges(n, m, theta, R, dps)
        edges_by_R[R] = e
        params = {"n": n, "m": m, "theta": theta, "R": R}
        total = sum(e.values())
        scale = max(abs(v) for v in e.values())
        rel = abs(total) / scale if scale else 0.0
        rep.add(ReportRow("rectangle_closure", params, total, 0.0, abs(total), rel, 1e-9,
                          bool(rel <= 1e-9)))
        sign = (-1) ** (n + m)
        lhs, rhs = e["DA"], sign * e["BC"]
        gap = abs(lhs - rhs)
        ref = max(abs(lhs), abs(rhs))
        row = ReportRow("vertical_edge_parity", params, lhs, rhs, gap,
                        gap / ref if ref else 0.0, 1e-9, bool(gap <= 1e-9 * ref or gap == 0))
        rep.add(row)
        vert = abs(e["BC"]) + abs(e["DA"])
        verticals.append(vert)
    if len(verticals) > 1:
        decreasing = all(b < a for a, b in zip(verticals, verticals[1:])) or all(
            v == 0 for v in verticals)
        rep.add(ReportRow.flag("vertical_edges_decreasing", {"n": n, "m": m, "theta": theta},
                               [float(v) for v in verticals], decreasing))
    rep.data = {"edges": {str(R): {k: complex(v) for k, v in e.items()}
                          for R, e in edges_by_R.items()},
                "vertical": [float(v) for v in verticals], "R": R_values}
    return rep


__all__ = [
    "ContourPath",
    "QuadResult",
    "integrate_line",
    "integrate_plane",
    "tail_radius",
    "gauss_legendre",
    "gauss_legendre_mp",
    "hermite_products",
    "rotated_hermite_table",
    "rectangle_corners",
    "rectangle_edges",
    "contour_rotation_check",
    "MAX_PANELS",
]
