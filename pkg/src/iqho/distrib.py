"""Critical-angle eigenfunctions as functionals on test functions.

At theta = +-pi/2 the eigenfunctions phi_n^(+-) are not square integrable,
but f -> <phi_n^(+-), f> is finite for every decaying f. The probes used
here are polynomial-times-Gaussian functions with Re(alpha) > 0, so each
such pairing has a closed form and weak-limit curves carry no quadrature
noise. Quadrature enters only for the majorants.

rho(x) = exp(Omega x^2 / 2) defines V_rho = {f : rho f in L^2} and
Theta_rho = {Phi : Phi / rho in L^2}; on the function class these reduce to
Re(alpha) > Omega and Re(alpha) + Omega > 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import MembershipError, ScheduleError
from .numquad import ContourPath, integrate_line
from .pbops import Kind, ThetaParams, eigenfamily
from .polygauss import PolyGaussFn, evaluate, pairing, weighted_pairing
from .report import Report, ReportRow
from .specfun import hermite_eval


@dataclass(frozen=True)
class SchwartzProbe:
    f: PolyGaussFn

    def __post_init__(self):
        if not self.f.alpha.real > 0:
            raise ValueError(f"probe needs Re(alpha) > 0, got {self.f.alpha}")

    @classmethod
    def of(cls, coeffs, alpha, beta=0j, gamma=0j) -> "SchwartzProbe":
        return cls(PolyGaussFn(coeffs, alpha, beta, gamma))

    def __call__(self, x):
        return evaluate(self.f, x)


@dataclass(frozen=True)
class RhoSpace:
    """Weight rho(x) = exp(omega x^2 / 2)."""

    omega: float = 1.0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")

    def times_rho(self, f: PolyGaussFn) -> PolyGaussFn:
        """rho f; raises ValueError when the result leaves the class."""
        return f.replace(alpha=f.alpha - self.omega)

    def over_rho(self, phi: PolyGaussFn) -> PolyGaussFn:
        return phi.replace(alpha=phi.alpha + self.omega)


def critical_family(sign: int, omega: float, n: int, side: Kind = Kind.PHI):
    return eigenfamily(ThetaParams.critical(sign, omega), side, n)


def distribution_pairing(sign: int, n: int, probe: SchwartzProbe, omega: float = 1.0,
                         side: Kind = Kind.PHI) -> complex:
    """Phi_n^(sign)[f] = <phi_n^(sign), f>, or Psi_n^(sign)[f] with ``side=Kind.PSI``."""
    fam = critical_family(sign, omega, n, side)
    return pairing(fam.member(n), probe.f)


# ---------------------------------------------------------------------------
# seminorms


def _seminorm_candidates(f: PolyGaussFn, k: int) -> np.ndarray:
    """Real critical points of |x|^k |f(x)|.

    With q = |p|^2 they are the real roots of
    k q + x q'/2 + (Re(beta) x - Re(alpha) x^2) q.
    """
    q = P.polymul(np.conj(f.coeffs), f.coeffs).real
    j = np.arange(len(q))
    eq = np.pad((k + 0.5 * j) * q, (0, 2))
    eq[1: len(q) + 1] += f.beta.real * q
    eq[2: len(q) + 2] -= f.alpha.real * q
    eq = np.trim_zeros(eq, "b")
    roots = P.polyroots(eq) if len(eq) > 1 else np.zeros(0)
    real = roots[np.abs(roots.imag) <= 1e-7 * (1 + np.abs(roots))].real
    deq = P.polyder(eq)
    for _ in range(3):
        d = P.polyval(real, deq)
        safe = np.abs(d) > 0
        real = np.where(safe, real - P.polyval(real, eq) / np.where(safe, d, 1.0), real)
    return np.concatenate([real, [0.0]])


def seminorm(probe: SchwartzProbe | PolyGaussFn, k: int) -> float:
    """p_{k,0}(f) = sup_x |x|^k |f(x)|."""
    f = probe.f if isinstance(probe, SchwartzProbe) else probe
    if k < 0:
        raise ValueError("k must be non-negative")
    if f.is_zero:
        return 0.0
    x = _seminorm_candidates(f, k)
    vals = np.abs(x) ** k * np.abs(evaluate(f, x))
    return float(np.max(vals))


def weighted_sup_bound(probe: SchwartzProbe | PolyGaussFn, power: int) -> float:
    """sum_k binom(power, k) p_{k,0}(f), an upper bound on sup (1+|x|)^power |f|."""
    return sum(comb(power, k) * seminorm(probe, k) for k in range(power + 1))


def _half_line(g, tol: float = 1e-13) -> float:
    """2 int_0^inf g(x) dx for even g, through x = u/(1-u)."""

    def mapped(u):
        u = u.real
        x = u / (1 - u)
        return g(x) / (1 - u) ** 2

    return 2 * integrate_line(mapped, ContourPath.segment(0, 1), tol=tol).value.real


def tempered_constant(n: int, omega: float = 1.0) -> float:
    """M_n = (Omega/pi)^{1/4} / sqrt(2^n n!) int |H_n(e^{i pi/4} sqrt(Omega) x)| / (1+|x|)^{n+2} dx."""
    s = complex(math.sqrt(0.5), math.sqrt(0.5)) * math.sqrt(omega)
    pref = (omega / math.pi) ** 0.25 / math.sqrt(2.0**n * math.factorial(n))
    return pref * _half_line(lambda x: np.abs(hermite_eval(n, s * x)) / (1 + x) ** (n + 2))


def tempered_bound_check(sign: int, n: int, probe: SchwartzProbe, omega: float = 1.0) -> Report:
    """|Phi_n[f]| <= M_n sum_k binom(n+2, k) p_{k,0}(f)."""
    value = distribution_pairing(sign, n, probe, omega)
    bound = tempered_constant(n, omega) * weighted_sup_bound(probe, n + 2)
    rep = Report(f"tempered bound n={n}")
    rep.add(ReportRow("|Phi_n[f]| <= M_n sum binom p_k0", {"n": n, "sign": sign, "omega": omega},
                      bound, abs(value), 0.0, 0.0, 0.0, abs(value) <= bound))
    return rep


# ---------------------------------------------------------------------------
# weak limits


def _validate_schedule(sign: int, schedule: list) -> list:
    th = [float(t) for t in schedule]
    if not th:
        raise ScheduleError("empty schedule")
    for t in th:
        if not abs(t) < math.pi / 2:
            raise ScheduleError(f"theta={t} outside (-pi/2, pi/2)")
    steps = np.diff(th)
    if sign > 0 and not np.all(steps > 0):
        raise ScheduleError("schedule must increase strictly toward +pi/2")
    if sign < 0 and not np.all(steps < 0):
        raise ScheduleError("schedule must decrease strictly toward -pi/2")
    return th


def weak_limit_distance(sign: int, n: int, probe: SchwartzProbe, params: ThetaParams,
                        side: Kind = Kind.PHI) -> float:
    """|<u_n^(sign) - u_n^(theta), f>| with u = phi or psi."""
    limit = critical_family(sign, params.omega, n, side).member(n)
    approx = eigenfamily(params, side, n).member(n)
    if approx.isclose(limit, 0.0):
        return 0.0
    return abs(pairing(limit, probe.f) - pairing(approx, probe.f))


def chi_norm(sign: int, n: int, params: ThetaParams, side: Kind = Kind.PHI) -> float:
    """||(u_n^(sign) - u_n^(theta)) / (1+|x|)^{n+1}||; the integrand is even in x."""
    limit = critical_family(sign, params.omega, n, side).member(n)
    approx = eigenfamily(params, side, n).member(n)

    def g(x):
        return np.abs(evaluate(limit, x) - evaluate(approx, x)) ** 2 / (1 + x) ** (2 * n + 2)

    return math.sqrt(max(_half_line(g), 0.0))


def weighted_probe_norm(probe: SchwartzProbe, power: int) -> float:
    """||(1+|x|)^power f|| by real-line quadrature."""

    def g(x):
        x = x.real
        return (1 + np.abs(x)) ** (2 * power) * np.abs(evaluate(probe.f, x)) ** 2

    return math.sqrt(integrate_line(g, ContourPath.real_line(), tol=1e-13).value.real)


def weak_limit_study(sign: int, n: int, probe: SchwartzProbe, omega: float,
                     theta_schedule: list, tol: float = 1e-3, monotone_from: int | None = None,
                     side: Kind = Kind.PHI, majorant: bool = True) -> Report:
    """d(theta) = |<u_n^(sign) - u_n^(theta), f>| along a schedule approaching sign*pi/2.

    Passes when d at the last point is below ``tol``, d is non-increasing from
    index ``monotone_from`` on (default: the second half of the schedule) and
    d <= ||chi|| ||(1+|x|)^{n+1} f|| at every point.
    """
    th = _validate_schedule(sign, theta_schedule)
    start = len(th) // 2 if monotone_from is None else monotone_from
    rep = Report(f"weak limit sign={sign:+d} n={n} side={side.value}")
    dists, majorants = [], []
    probe_norm = weighted_probe_norm(probe, n + 1) if majorant else None
    for j, t in enumerate(th):
        params = ThetaParams(t, omega)
        d = weak_limit_distance(sign, n, probe, params, side)
        dists.append(d)
        pr = {"sign": sign, "n": n, "omega": omega, "theta": t, "index": j}
        if majorant:
            m = chi_norm(sign, n, params, side) * probe_norm
            majorants.append(m)
            rep.add(ReportRow("d <= ||chi|| ||(1+|x|)^(n+1) f||", pr, m, d, 0.0, 0.0, 0.0,
                              d <= m * (1 + 1e-9)))
    tail = dists[start:]
    monotone = all(b <= a for a, b in zip(tail, tail[1:]))
    pr = {"sign": sign, "n": n, "omega": omega, "side": side.value}
    rep.add(ReportRow.flag("d non-increasing", {**pr, "from_index": start}, tail, monotone))
    rep.add(ReportRow("d at last theta", {**pr, "theta": th[-1]}, 0.0, dists[-1], dists[-1],
                      dists[-1], tol, dists[-1] < tol))
    gaps = np.array([math.pi / 2 - abs(t) for t in th])
    fit_idx = [i for i in range(start, len(th)) if dists[i] > 0]
    slope = float("nan")
    if len(fit_idx) >= 2:
        slope = float(np.polyfit(np.log(gaps[fit_idx]), np.log(np.array(dists)[fit_idx]), 1)[0])
    rep.data = {"theta": th, "distance": dists, "majorant": majorants,
                "power_law_exponent": slope}
    return rep


# ---------------------------------------------------------------------------
# V_rho / Theta_rho


def vrho_membership(space: RhoSpace, f: PolyGaussFn) -> bool:
    """rho f in L^2, i.e. Re(alpha) > Omega (the zero function always belongs)."""
    return f.is_zero or f.alpha.real > space.omega


def thetarho_membership(space: RhoSpace, phi: PolyGaussFn) -> bool:
    """phi / rho in L^2, i.e. Re(alpha) + Omega > 0."""
    return phi.is_zero or phi.alpha.real + space.omega > 0


def thetarho_functional(space: RhoSpace, phi: PolyGaussFn, f: PolyGaussFn,
                        tol: float = 1e-10) -> tuple:
    """F_phi[f] = <phi, f> directly and as <phi/rho, rho f>, with the Cauchy-Schwarz bound."""
    if not thetarho_membership(space, phi):
        raise MembershipError(f"Phi/rho not square integrable: Re(alpha)={phi.alpha.real}")
    if not vrho_membership(space, f):
        raise MembershipError(f"rho f not square integrable: Re(alpha)={f.alpha.real} "
                              f"<= Omega={space.omega}")
    direct = pairing(phi, f)
    weighted = weighted_pairing(space.over_rho(phi), f, -space.omega)
    norm_phi = math.sqrt(weighted_pairing(phi, phi, 2 * space.omega).real)
    norm_f = math.sqrt(weighted_pairing(f, f, -2 * space.omega).real)
    bound = norm_phi * norm_f
    pr = {"omega": space.omega}
    rep = Report("Theta_rho functional")
    rep.add(ReportRow.compare("<Phi,f> vs <Phi/rho, rho f>", pr, direct, weighted, tol,
                              relative=True))
    rep.add(ReportRow("|F| <= ||Phi/rho|| ||rho f||", pr, bound, abs(direct), 0.0, 0.0, 0.0,
                      abs(direct) <= bound * (1 + 1e-12)))
    rep.data = {"slack": bound - abs(direct), "norm_phi_over_rho": norm_phi,
                "norm_rho_f": norm_f}
    return direct, rep


def continuity_surrogate(f: PolyGaussFn, g: PolyGaussFn, l: int, ks: list) -> Report:
    """For f_k = f + g/k: I_k = ||x^l (f_k - f)||^2 <= 2 D_{l+1}(f_k - f)^2 and D -> 0."""
    rep = Report(f"seminorm continuity l={l}")
    Ds = []
    for k in ks:
        h = g / k
        D = weighted_sup_bound(h, l + 1)

        def integrand(x, h=h):
            x = x.real
            return np.abs(x ** l * evaluate(h, x)) ** 2

        I = integrate_line(integrand, ContourPath.real_line(), tol=1e-14).value.real
        Ds.append(D)
        rep.add(ReportRow("I_k <= 2 D_{l+1}^2", {"l": l, "k": k}, 2 * D * D, I, 0.0, 0.0, 0.0,
                          I <= 2 * D * D))
    decreasing = all(b < a for a, b in zip(Ds, Ds[1:]))
    rep.add(ReportRow.flag("D_{l+1}(f_k - f) decreasing", {"l": l, "k": list(ks)}, Ds,
                           decreasing))
    rep.data = {"D": Ds}
    return rep


def rho_inverse_sup(space: RhoSpace, x_max: float = 50.0, points: int = 20001) -> float:
    """Grid supremum of exp(-Omega x^2 / 2)."""
    x = np.linspace(-x_max, x_max, points)
    return float(np.max(np.exp(-0.5 * space.omega * x * x)))


__all__ = [
    "SchwartzProbe", "RhoSpace", "critical_family", "distribution_pairing", "seminorm",
    "weighted_sup_bound", "tempered_constant", "tempered_bound_check", "weak_limit_distance",
    "chi_norm", "weighted_probe_norm", "weak_limit_study", "vrho_membership",
    "thetarho_membership", "thetarho_functional", "continuity_surrogate", "rho_inverse_sup",
]
