"""Bi-coherent states: closed forms, the number-state series, and resolutions of the identity.

phi(z; x) = (Omega/pi)^{1/4} exp(i theta/4 - Re(z)^2 + sqrt(2 Omega) e^{i theta/2} z x
                                   - e^{i theta} Omega x^2 / 2)

and psi(z; x) is the same expression at -theta. The number-state series
e^{-|z|^2/2} sum_k z^k/sqrt(k!) phi_k sums to phi(z; .) times exp(-i Re z Im z);
``series_truncation`` measures that phase instead of assuming it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import MembershipError, RegimeError
from .numquad import integrate_plane
from .pbops import (Kind, OperatorSet, Regime, SpanVector, ThetaParams, build_operators,
                    eigenfamily, norm_closed_form)
from .polygauss import PolyGaussFn, moment_sum, mp_context, op_residual, pairing, pairing_batch
from .report import Report, ReportRow
from .specfun import hermite_coeffs

SERIES_DPS = 150


@dataclass(frozen=True)
class BiCoherentPair:
    params: ThetaParams
    z: complex
    phi: PolyGaussFn
    psi: PolyGaussFn


@dataclass(frozen=True)
class QuadGrid2D:
    """Square [-R, R]^2 in the z plane, panels x panels tensor Gauss-Legendre."""

    R: float = 6.0
    panels: int = 48
    order: int = 8


def coherent_state(params: ThetaParams, z: complex) -> PolyGaussFn:
    """phi(z; .) at the angle of ``params``."""
    z = complex(z)
    om = params.omega
    alpha = om * params.phase(4)
    if params.critical_sign:
        alpha = complex(0.0, params.critical_sign * om)
    beta = math.sqrt(2 * om) * params.phase(2) * z
    gamma = 0.25 * math.log(om / math.pi) + 0.25j * params.theta - z.real**2
    return PolyGaussFn([1.0], alpha, beta, gamma)


def bicoherent(params: ThetaParams, z: complex) -> BiCoherentPair:
    params.require(Regime.SQUARE_INTEGRABLE, Regime.CRITICAL)
    return BiCoherentPair(params, complex(z), coherent_state(params, z),
                          coherent_state(params.negated(), z))


def eigenvalue_check(pair: BiCoherentPair, ops: OperatorSet | None = None,
                     tol: float = 1e-12) -> Report:
    """A phi(z) = z phi(z) and B^dag psi(z) = z psi(z) as coefficient identities."""
    ops = ops or build_operators(pair.params)
    pr = {**pair.params.as_dict(), "z": pair.z}
    rep = Report(f"bi-coherent eigenvalue theta={pair.params.label} z={pair.z}")
    for name, op, f in (("A phi(z) = z phi(z)", ops.a, pair.phi),
                        ("B^dag psi(z) = z psi(z)", ops.b_dag, pair.psi)):
        r = op_residual(op, f, pair.z * f)
        rep.add(ReportRow(name, pr, None, None, r, r, tol, r <= tol))
    return rep


def normalization_check(pair: BiCoherentPair, tol: float = 1e-10) -> Report:
    if pair.params.regime is not Regime.SQUARE_INTEGRABLE:
        raise RegimeError("<phi(z), psi(z)> diverges at the critical angles")
    rep = Report(f"bi-coherent normalization theta={pair.params.label} z={pair.z}")
    rep.add(ReportRow.compare("<phi(z), psi(z)>", {**pair.params.as_dict(), "z": pair.z}, 1.0,
                              pairing(pair.phi, pair.psi), tol))
    return rep


def log_modulus_slope(pair: BiCoherentPair, x: np.ndarray) -> np.ndarray:
    """d/dx log|phi(z; x)| sampled by finite differences of the log-modulus."""
    logmod = np.log(np.abs(pair.phi(np.asarray(x, float))))
    return np.diff(logmod) / np.diff(x)


# ---------------------------------------------------------------------------
# series in extended precision


def _series_pieces(params: ThetaParams, z: complex, K: int, dps: int):
    """Polynomial of the partial sum and exponent data, all in ``dps`` digits."""
    ctx = mp_context(dps)
    th = ctx.mpf(params.theta)
    om = ctx.mpf(params.omega)
    s = ctx.expj(th / 2)
    zz = ctx.mpc(z.real, z.imag)
    sq = s * ctx.sqrt(om)
    powers = [ctx.one]
    for _ in range(K):
        powers.append(powers[-1] * sq)
    poly = [ctx.zero] * (K + 1)
    zk = ctx.one
    for k in range(K + 1):
        if k:
            zk = zk * zz
        # z^k / sqrt(k!) * 1/sqrt(2^k k!) = (z/sqrt 2)^k / k!
        weight = zk / (ctx.sqrt(ctx.mpf(2) ** k) * ctx.factorial(k))
        for j, h in enumerate(hermite_coeffs(k)):
            if h:
                poly[j] += weight * h * powers[j]
    alpha = om * ctx.expj(th)
    gamma_s = ctx.log(om / ctx.pi) / 4 + ctx.mpc(0, 1) * th / 4 - abs(zz) ** 2 / 2
    beta_t = ctx.sqrt(2 * om) * s * zz
    gamma_t = ctx.log(om / ctx.pi) / 4 + ctx.mpc(0, 1) * th / 4 - ctx.re(zz) ** 2
    return ctx, poly, alpha, gamma_s, beta_t, gamma_t


def series_distance(params: ThetaParams, z: complex, K: int, dps: int = SERIES_DPS) -> tuple:
    """(d_K, optimal phase, <T, S_K>) with d_K = min_phi ||S_K - e^{i phi} T||."""
    ctx, poly, alpha, gs, bt, gt = _series_pieces(params, complex(z), K, dps)
    A = ctx.conj(alpha) + alpha
    conj_poly = [ctx.conj(c) for c in poly]
    ss = moment_sum(ctx, conj_poly, poly, A, ctx.zero, ctx.conj(gs) + gs)
    tt = moment_sum(ctx, [ctx.one], [ctx.one], A, ctx.conj(bt) + bt, ctx.conj(gt) + gt)
    ts = moment_sum(ctx, [ctx.one], poly, A, ctx.conj(bt), ctx.conj(gt) + gs)
    d2 = ctx.re(ss) + ctx.re(tt) - 2 * abs(ts)
    dist = ctx.sqrt(d2) if d2 > 0 else ctx.zero
    phase = ctx.arg(ts) if ts != 0 else ctx.zero
    return float(dist), float(phase), complex(ts)


def series_partial_sum(params: ThetaParams, z: complex, K: int) -> PolyGaussFn:
    """S_K rounded to double precision, as a member of the function class."""
    params.require(Regime.SQUARE_INTEGRABLE)
    ctx, poly, alpha, gs, _, _ = _series_pieces(params, complex(z), K, 40)
    return PolyGaussFn([complex(c) for c in poly], complex(alpha), 0j, complex(gs))


def predicted_tail(params: ThetaParams, z: complex, K: int, n_fit: int = 120) -> float:
    """e^{-|z|^2/2} sum_{k>K} |z|^k/sqrt(k!) K_phi r^k k^{-1/4}, r = sqrt(2/cos theta).

    K_phi is the smallest constant making the norm bound hold for 1 <= n <= n_fit.
    """
    c = params.cos_theta
    r = math.sqrt(2 / c)
    logs = []
    for n in range(1, n_fit + 1):
        logs.append(0.5 * math.log(norm_closed_form(params, n)) - n * math.log(r)
                    + 0.25 * math.log(n))
    log_k = max(logs)
    a = abs(complex(z))
    if a == 0:
        return 0.0
    total = 0.0
    k = K + 1
    while True:
        term = math.exp(-a * a / 2 + k * math.log(a) - 0.5 * math.lgamma(k + 1) + log_k
                        + k * math.log(r) - 0.25 * math.log(k))
        total += term
        if k > 4 * a * a * r * r + K + 20 and term < 1e-18 * total:
            break
        k += 1
    return total


def series_truncation(params: ThetaParams, z: complex, Ks: list, tol: float = 1e-6,
                      dps: int = SERIES_DPS) -> Report:
    """Distances d_K between partial sums and the closed form, up to one global phase.

    Passes when d is strictly decreasing along ``Ks`` and d at the last K is <= tol.
    """
    params.require(Regime.SQUARE_INTEGRABLE)
    z = complex(z)
    Ks = sorted(int(k) for k in Ks)
    rep = Report(f"series convergence theta={params.label} z={z}")
    pr = {**params.as_dict(), "z": z}
    dists, phases = [], []
    for K in Ks:
        d, ph, _ = series_distance(params, z, K, dps)
        dists.append(d)
        phases.append(ph)
        rep.add(ReportRow("d_K", {**pr, "K": K}, predicted_tail(params, z, K), d, d,
                          0.0, math.inf, True))
    expected_phase = -z.real * z.imag
    gap = abs(complex(math.cos(phases[-1]), math.sin(phases[-1]))
              - complex(math.cos(expected_phase), math.sin(expected_phase)))
    decreasing = all(b < a for a, b in zip(dists, dists[1:]))
    rep.add(ReportRow.flag("d_K strictly decreasing", {**pr, "K": Ks}, dists, decreasing))
    rep.add(ReportRow("d_K at last K", {**pr, "K": Ks[-1]}, 0.0, dists[-1], dists[-1],
                      dists[-1], tol, dists[-1] <= tol))
    rep.data = {"K": Ks, "distance": dists, "phase": phases,
                "phase_exp(-i Re z Im z)": expected_phase, "phase_gap": gap}
    return rep


# ---------------------------------------------------------------------------
# resolutions of the identity over the z plane


def _pairing_with_states(f: PolyGaussFn, params: ThetaParams, z: np.ndarray) -> np.ndarray:
    """<f, phi(z; .)> for an array of z in closed form."""
    base = coherent_state(params, 0j)
    shift = math.sqrt(2 * params.omega) * params.phase(2) * z
    return pairing_batch(f, base, shift, -z.real**2)


def resolution_integrand(f: PolyGaussFn, g: PolyGaussFn, left: ThetaParams,
                         right: ThetaParams):
    """z -> <f, phi_left(z)> <phi_right(z), g> / pi (vectorised)."""

    def integrand(z):
        return (_pairing_with_states(f, left, z)
                * np.conj(_pairing_with_states(g, right, z)) / math.pi)

    return integrand


def _boundary_max(F, R: float, n: int = 400) -> float:
    t = np.linspace(-R, R, n)
    edge = np.concatenate([t + 1j * R, t - 1j * R, R + 1j * t, -R + 1j * t])
    return float(np.max(np.abs(F(edge))))


def identity_resolution_L2(params: ThetaParams, f: SpanVector, g: SpanVector,
                           grid: QuadGrid2D = QuadGrid2D(), tol: float = 1e-4) -> Report:
    """(1/pi) int <f, phi(z)><psi(z), g> dz_r dz_i against <f, g>."""
    if params.regime is not Regime.SQUARE_INTEGRABLE:
        raise RegimeError("needs |theta| < pi/2")
    if f.kind is not Kind.PSI or g.kind not in (Kind.PHI, Kind.E):
        raise ValueError("needs f in span psi and g in span phi or span e")
    ff, gg = f.function(params), g.function(params)
    F = resolution_integrand(ff, gg, params, params.negated())
    res = integrate_plane(F, grid.R, grid.panels, grid.order)
    exact = pairing(ff, gg)
    rep = Report(f"L2 resolution theta={params.label}")
    pr = {**params.as_dict(), "R": grid.R, "panels": grid.panels, "order": grid.order}
    rep.add(ReportRow.compare("(1/pi) int <f,phi(z)><psi(z),g> dz", pr, exact, res.value, tol))
    rep.data = {"err_estimate": res.err_estimate, "boundary_max": _boundary_max(F, grid.R),
                "n_evals": res.n_evals}
    return rep


def identity_resolution_IQHO(sign: int, f: PolyGaussFn, g: PolyGaussFn,
                             grid: QuadGrid2D = QuadGrid2D(), omega: float = 1.0,
                             tol: float = 1e-3) -> Report:
    """Both orderings of the critical-angle resolution for f, g with rho f, rho g in L^2."""
    for name, h in (("f", f), ("g", g)):
        if not h.alpha.real > omega:
            raise MembershipError(f"{name}: Re(alpha)={h.alpha.real} <= Omega={omega}, "
                                  "so rho*{name} is not square integrable")
    crit = ThetaParams.critical(sign, omega)
    exact = pairing(f, g)
    rep = Report(f"IQHO resolution sign={'+' if sign > 0 else '-'} omega={omega}")
    pr = {**crit.as_dict(), "R": grid.R, "panels": grid.panels, "order": grid.order}
    data = {}
    for label, left, right in (("<f,psi(z)><phi(z),g>", crit.negated(), crit),
                               ("<f,phi(z)><psi(z),g>", crit, crit.negated())):
        F = resolution_integrand(f, g, left, right)
        res = integrate_plane(F, grid.R, grid.panels, grid.order)
        rep.add(ReportRow.compare(f"(1/pi) int {label} dz", pr, exact, res.value, tol))
        data[label] = {"value": res.value, "err_estimate": res.err_estimate,
                       "boundary_max": _boundary_max(F, grid.R)}
    values = [d["value"] for d in data.values()]
    rep.add(ReportRow.compare("orderings agree", pr, values[0], values[1], tol))
    rep.data = data
    return rep


def gaussian_probe(width: float) -> PolyGaussFn:
    """(width/pi)^{1/4} exp(-width x^2 / 2), unit L^2 norm."""
    return PolyGaussFn([1.0], width, 0j, 0.25 * math.log(width / math.pi))


__all__ = [
    "BiCoherentPair", "QuadGrid2D", "coherent_state", "bicoherent", "eigenvalue_check",
    "normalization_check", "log_modulus_slope", "series_distance", "series_partial_sum",
    "predicted_tail", "series_truncation", "resolution_integrand", "identity_resolution_L2",
    "identity_resolution_IQHO", "gaussian_probe", "SERIES_DPS",
]
