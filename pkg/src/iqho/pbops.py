"""Ladder operators, eigenfamilies and the identities they satisfy.

For an angle theta and frequency Omega the lowering/raising pair is

    A = (e^{i theta/2} Omega x + e^{-i theta/2} d/dx) / sqrt(2 Omega)
    B = (e^{i theta/2} Omega x - e^{-i theta/2} d/dx) / sqrt(2 Omega)

with [A, B] = 1, and H = (-d^2/dx^2 + e^{2 i theta} Omega^2 x^2) / 2. The
eigenfunctions phi_n of H are complex-rotated Hermite functions; psi_n is
phi_n at -theta and e_n the theta = 0 case.

|theta| < pi/2 is the square-integrable regime. The endpoints are reached
only through ``ThetaParams.critical``, which uses exact phases, so that
pi/2 - 1e-17 and the critical point are never confused.
"""
from __future__ import annotations

import cmath
import math
import threading
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DegreeTooLarge, RegimeError, SpanError
from .numquad import ContourPath, hermite_products, integrate_line
from .polygauss import DiffOp, PolyGaussFn, apply_op, gram, op_residual, pairing, rotate
from .report import Report, ReportRow
from .specfun import (MAX_DEGREE, hermite_coeffs, hermite_norm_sq, legendre_eval,
                      legendre_growth_ratio)

COEFF_TOL = 1e-12


class Regime(Enum):
    SQUARE_INTEGRABLE = "square-integrable"
    CRITICAL = "critical"
    FORBIDDEN = "forbidden"


class Kind(Enum):
    PHI = "phi"
    PSI = "psi"
    E = "e"


_SQRT_HALF = math.sqrt(0.5)


@dataclass(frozen=True)
class ThetaParams:
    """Angle and frequency; ``critical_sign`` = +1/-1 marks theta = +-pi/2 exactly."""

    theta: float
    omega: float = 1.0
    critical_sign: int = 0

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega}")
        if self.critical_sign not in (-1, 0, 1):
            raise ValueError("critical_sign must be -1, 0 or +1")
        if self.critical_sign:
            object.__setattr__(self, "theta", math.copysign(math.pi / 2, self.critical_sign))

    @classmethod
    def critical(cls, sign: int, omega: float = 1.0) -> "ThetaParams":
        return cls(math.copysign(math.pi / 2, sign), omega, 1 if sign > 0 else -1)

    @property
    def regime(self) -> Regime:
        if self.critical_sign:
            return Regime.CRITICAL
        # the double nearest pi/2 lies below pi/2, so it is still inside the open interval
        if abs(self.theta) <= math.pi / 2:
            return Regime.SQUARE_INTEGRABLE
        return Regime.FORBIDDEN

    def require(self, *allowed: Regime) -> None:
        if self.regime not in allowed:
            raise RegimeError(f"theta={self.theta} is in the {self.regime.value} regime; "
                              f"needs {', '.join(r.value for r in allowed)}")

    def negated(self) -> "ThetaParams":
        return ThetaParams(-self.theta, self.omega, -self.critical_sign)

    def phase(self, quarters: int) -> complex:
        """exp(i quarters theta / 4), exact at the critical angles."""
        if self.critical_sign:
            # exp(i s q pi / 8); even q are eighth roots of unity, taken exactly
            s = self.critical_sign
            q = (s * quarters) % 16
            if q % 2 == 0:
                h = _SQRT_HALF
                roots = (1 + 0j, complex(h, h), 1j, complex(-h, h),
                         -1 + 0j, complex(-h, -h), -1j, complex(h, -h))
                return roots[q // 2]
            return cmath.exp(1j * math.pi / 8 * q)
        return cmath.exp(0.25j * quarters * self.theta)

    @property
    def cos_theta(self) -> float:
        return 0.0 if self.critical_sign else math.cos(self.theta)

    @property
    def label(self) -> str:
        if self.critical_sign:
            return "+pi/2" if self.critical_sign > 0 else "-pi/2"
        return repr(self.theta)

    def as_dict(self) -> dict:
        return {"theta": self.theta, "omega": self.omega, "regime": self.regime.value}


@dataclass(frozen=True)
class OperatorSet:
    params: ThetaParams
    a: DiffOp
    b: DiffOp
    a_dag: DiffOp
    b_dag: DiffOp
    n_op: DiffOp
    h: DiffOp


def _ladder_pair(params: ThetaParams):
    s = params.phase(2)
    om = params.omega
    norm = 1 / math.sqrt(2 * om)
    x, d = DiffOp.x(), DiffOp.d()
    a = (s * om * norm) * x + (s.conjugate() * norm) * d
    b = (s * om * norm) * x - (s.conjugate() * norm) * d
    return a, b


def hamiltonian(params: ThetaParams) -> DiffOp:
    """(-d^2/dx^2 + e^{2 i theta} Omega^2 x^2) / 2, i.e. (p^2 + e^{2 i theta} Omega^2 x^2) / 2."""
    p = DiffOp.p()
    return 0.5 * (p @ p) + (0.5 * params.phase(8) * params.omega**2) * DiffOp.x(2)


def build_operators(params: ThetaParams) -> OperatorSet:
    params.require(Regime.SQUARE_INTEGRABLE, Regime.CRITICAL)
    a, b = _ladder_pair(params)
    return OperatorSet(params, a, b, a.adjoint(), b.adjoint(), b @ a, hamiltonian(params))


def number_state_ops(omega: float = 1.0) -> tuple:
    """c = (Omega x + i p)/sqrt(2 Omega) and its adjoint."""
    norm = 1 / math.sqrt(2 * omega)
    c = (omega * norm) * DiffOp.x() + (1j * norm) * DiffOp.p()
    return c, c.adjoint()


def algebra_check(params: ThetaParams, n_random: int = 5, seed: int = 0,
                  tol: float = COEFF_TOL) -> Report:
    """Operator identities at the DiffOp level plus [A, B] f = f on random functions."""
    ops = build_operators(params)
    rep = Report(f"operator algebra theta={params.label} omega={params.omega}")
    pr = params.as_dict()
    a_neg, b_neg = _ladder_pair(params.negated())
    one = DiffOp.identity()
    checks = {
        "commutator_AB": (ops.a.commutator(ops.b), one),
        "adjoint_A_is_B_minus_theta": (ops.a_dag, b_neg),
        "adjoint_B_is_A_minus_theta": (ops.b_dag, a_neg),
        "H_factorised": (ops.h, params.omega * params.phase(4) * (ops.n_op + 0.5 * one)),
        "H_dagger_factorised": (ops.h.adjoint(),
                                params.omega * params.phase(-4) * (ops.a_dag @ ops.b_dag
                                                                   + 0.5 * one)),
    }
    for name, (lhs, rhs) in checks.items():
        rep.add(ReportRow(name, pr, None, None, lhs.discrepancy(rhs), lhs.discrepancy(rhs), tol,
                          lhs.discrepancy(rhs) <= tol))
    if params.regime is Regime.CRITICAL:
        h_other = hamiltonian(params.negated())
        gap = ops.h.discrepancy(h_other)
        rep.add(ReportRow("H_plus_equals_H_minus", pr, None, None, gap, gap, tol, gap <= tol))
        gap = ops.h.adjoint().discrepancy(ops.h)
        rep.add(ReportRow("H_formally_self_adjoint", pr, None, None, gap, gap, tol, gap <= tol))
        c, c_dag = number_state_ops(params.omega)
        s = params.critical_sign
        target = _SQRT_HALF * (c + (s * 1j) * c_dag)
        gap = ops.a.discrepancy(target)
        rep.add(ReportRow("A_in_terms_of_c", pr, None, None, gap, gap, tol, gap <= tol))
    if params.regime is Regime.SQUARE_INTEGRABLE and params.theta == 0:
        c, c_dag = number_state_ops(params.omega)
        for name, lhs, rhs in (("A0_is_c", ops.a, c), ("B0_is_c_dagger", ops.b, c_dag)):
            gap = lhs.discrepancy(rhs)
            rep.add(ReportRow(name, pr, None, None, gap, gap, tol, gap <= tol))
    rng = np.random.default_rng(seed)
    comm = ops.a.commutator(ops.b)
    for i in range(n_random):
        f = random_polygauss(rng)
        r = op_residual(comm, f, f)
        rep.add(ReportRow("commutator_on_function", {**pr, "sample": i}, None, None, r, r, tol,
                          r <= tol))
    return rep


def random_polygauss(rng: np.random.Generator, max_degree: int = 6) -> PolyGaussFn:
    """Random function of the class with a decaying Gaussian (test corpus helper)."""
    deg = int(rng.integers(0, max_degree + 1))
    coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
    alpha = complex(rng.uniform(0.3, 2.0), rng.uniform(-1.5, 1.5))
    beta = complex(rng.normal(scale=0.5), rng.normal(scale=0.5))
    gamma = complex(rng.normal(scale=0.3), rng.uniform(-math.pi, math.pi))
    return PolyGaussFn(coeffs, alpha, beta, gamma)


# ---------------------------------------------------------------------------
# eigenfamilies


def _family_params(params: ThetaParams, kind: Kind) -> ThetaParams:
    if kind is Kind.PSI:
        return params.negated()
    if kind is Kind.E:
        return ThetaParams(0.0, params.omega)
    return params


def closed_form_member(params: ThetaParams, n: int) -> PolyGaussFn:
    """(Omega/pi)^{1/4} e^{i theta/4} H_n(e^{i theta/2} sqrt(Omega) x) e^{-Omega e^{i theta} x^2/2} / sqrt(2^n n!)."""
    if n > MAX_DEGREE:
        raise DegreeTooLarge(f"n={n} exceeds {MAX_DEGREE}")
    s = params.phase(2) * math.sqrt(params.omega)
    h = hermite_coeffs(n)
    # divide the exact integers before converting so large n does not overflow
    log_norm = 0.5 * (n * math.log(2.0) + math.lgamma(n + 1))
    coeffs = np.zeros(n + 1, complex)
    for k, hk in enumerate(h):
        if hk:
            mag = math.exp(math.log(abs(hk)) - log_norm)
            coeffs[k] = math.copysign(mag, hk) * s**k
    alpha = params.omega * params.phase(4)
    if params.critical_sign:
        alpha = complex(0.0, params.critical_sign * params.omega)
    gamma = 0.25 * math.log(params.omega / math.pi) + 0.25j * params.theta
    return PolyGaussFn(coeffs, alpha, 0j, gamma)


@dataclass
class EigenFamily:
    """Lazily built phi_n / psi_n / e_n with both constructions kept.

    ``member(n)`` is the closed Hermite form, ``raised(n)`` the result of
    applying the raising operator n times to the vacuum and dividing by
    sqrt(n!).
    """

    params: ThetaParams
    kind: Kind
    n_max: int
    _closed: list = field(default_factory=list, repr=False)
    _raised: list = field(default_factory=list, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def own_params(self) -> ThetaParams:
        """Angle at which this family is the phi family."""
        return _family_params(self.params, self.kind)

    def _check(self, n: int) -> None:
        if n < 0 or n > self.n_max:
            raise IndexError(f"member {n} outside 0..{self.n_max}")

    def member(self, n: int) -> PolyGaussFn:
        self._check(n)
        with self._lock:
            while len(self._closed) <= n:
                self._closed.append(closed_form_member(self.own_params, len(self._closed)))
            return self._closed[n]

    def raised(self, n: int) -> PolyGaussFn:
        self._check(n)
        with self._lock:
            if not self._raised:
                self._raised.append(closed_form_member(self.own_params, 0))
            _, raising = _ladder_pair(self.own_params)
            while len(self._raised) <= n:
                k = len(self._raised)
                self._raised.append(apply_op(raising, self._raised[-1]) / math.sqrt(k))
            return self._raised[n]

    def members(self, n: int | None = None) -> list:
        n = self.n_max if n is None else n
        return [self.member(k) for k in range(n + 1)]

    def construction_gap(self, n: int) -> float:
        return self.member(n).discrepancy(self.raised(n))

    def evaluate(self, n: int, x):
        """phi_n(x) via the normalised Hermite recurrence (no large intermediates)."""
        self._check(n)
        p = self.own_params
        y = p.phase(2) * math.sqrt(p.omega) * np.asarray(x, dtype=complex)
        h_prev = np.ones_like(y)
        h = math.sqrt(2.0) * y
        if n == 0:
            h = h_prev
        for k in range(2, n + 1):
            h_prev, h = h, (math.sqrt(2.0) * y * h - math.sqrt(k - 1) * h_prev) / math.sqrt(k)
        pref = (p.omega / math.pi) ** 0.25 * p.phase(1)
        return pref * h * np.exp(-0.5 * p.omega * p.phase(4) * np.asarray(x) ** 2)


_families: dict = {}
_families_lock = threading.Lock()


def eigenfamily(params: ThetaParams, kind: Kind = Kind.PHI, n_max: int = 20) -> EigenFamily:
    """Memoised family; a request for a larger n_max replaces the cached one."""
    params.require(Regime.SQUARE_INTEGRABLE, Regime.CRITICAL)
    if n_max > MAX_DEGREE:
        raise DegreeTooLarge(f"n_max={n_max} exceeds {MAX_DEGREE}")
    key = (params, kind)
    with _families_lock:
        fam = _families.get(key)
        if fam is None or fam.n_max < n_max:
            fam = EigenFamily(params, kind, max(n_max, fam.n_max if fam else 0))
            _families[key] = fam
    return fam


def dual_construction_check(params: ThetaParams, kind: Kind, n_max: int,
                            tol: float = 1e-10) -> Report:
    fam = eigenfamily(params, kind, n_max)
    rep = Report(f"closed form vs raising, {kind.value}, theta={params.label}")
    for n in range(n_max + 1):
        gap = fam.construction_gap(n)
        rep.add(ReportRow("closed_vs_raised", {**params.as_dict(), "kind": kind.value, "n": n},
                          None, None, gap, gap, tol, gap <= tol))
    return rep


def ladder_check(family: EigenFamily, ops: OperatorSet, n_max: int,
                 tol: float = COEFF_TOL) -> Report:
    """The six lowering/raising/number relations for phi_n and psi_n as exact identities."""
    params = ops.params
    phi = eigenfamily(params, Kind.PHI, n_max + 1)
    psi = eigenfamily(params, Kind.PSI, n_max + 1)
    if family.params != params:
        raise ValueError("family and operators built for different parameters")
    n_dag = ops.n_op.adjoint()
    rep = Report(f"ladder relations theta={params.label} omega={params.omega}")
    pr = params.as_dict()
    zero = PolyGaussFn.zero()
    for n in range(n_max + 1):
        relations = (
            ("A phi_n = sqrt(n) phi_n-1", ops.a, phi.member(n),
             math.sqrt(n) * phi.member(n - 1) if n else zero),
            ("B phi_n = sqrt(n+1) phi_n+1", ops.b, phi.member(n),
             math.sqrt(n + 1) * phi.member(n + 1)),
            ("N phi_n = n phi_n", ops.n_op, phi.member(n), n * phi.member(n)),
            ("B^dag psi_n = sqrt(n) psi_n-1", ops.b_dag, psi.member(n),
             math.sqrt(n) * psi.member(n - 1) if n else zero),
            ("A^dag psi_n = sqrt(n+1) psi_n+1", ops.a_dag, psi.member(n),
             math.sqrt(n + 1) * psi.member(n + 1)),
            ("N^dag psi_n = n psi_n", n_dag, psi.member(n), n * psi.member(n)),
        )
        for name, op, f, expected in relations:
            r = op_residual(op, f, expected)
            rep.add(ReportRow(name, {**pr, "n": n}, None, None, r, r, tol, r <= tol))
    for name, op, f in (("A phi_0 is zero", ops.a, phi.member(0)),
                        ("B^dag psi_0 is zero", ops.b_dag, psi.member(0))):
        img = apply_op(op, f)
        rep.add(ReportRow.flag(name, pr, len(img.coeffs), img.is_zero))
    return rep


def eigenvalue(params: ThetaParams, n: int) -> complex:
    """Omega e^{i theta} (n + 1/2); +-i Omega (n + 1/2) at the critical angles."""
    if params.critical_sign:
        return complex(0.0, params.critical_sign * params.omega * (n + 0.5))
    return params.omega * params.phase(4) * (n + 0.5)


def spectrum_check(params: ThetaParams, n_max: int, tol: float = COEFF_TOL) -> Report:
    """E_n from the leading coefficient of H phi_n, plus proportionality of H phi_n to phi_n."""
    ops = build_operators(params)
    fam = eigenfamily(params, Kind.PHI, n_max)
    rep = Report(f"spectrum theta={params.label} omega={params.omega}")
    pr = params.as_dict()
    h_neg = build_operators(params.negated()).h
    fam_neg = eigenfamily(params.negated(), Kind.PHI, n_max)
    for n in range(n_max + 1):
        f = fam.member(n)
        image = apply_op(ops.h, f)
        measured = image.coeffs[f.degree] / f.coeffs[f.degree] if len(image.coeffs) > f.degree \
            else 0j
        exact = eigenvalue(params, n)
        rep.add(ReportRow.compare("E_n", {**pr, "n": n}, exact, measured, tol, relative=True))
        r = op_residual(ops.h, f, exact * f)
        rep.add(ReportRow("H phi_n = E_n phi_n", {**pr, "n": n}, None, None, r, r, tol, r <= tol))
        g = fam_neg.member(n)
        img_neg = apply_op(h_neg, g)
        measured_neg = img_neg.coeffs[g.degree] / g.coeffs[g.degree]
        rep.add(ReportRow.compare("E_n(-theta) = conj E_n(theta)", {**pr, "n": n},
                                  measured.conjugate(), measured_neg, tol, relative=True))
    return rep


# ---------------------------------------------------------------------------
# pairings between families


def contour_biortho_entry(params: ThetaParams, n: int, dps: int = 30) -> complex:
    """<phi_n, psi_n> from a quadrature of H_n^2 e^{-z^2} along Gamma_theta.

    With z = e^{-i theta/2} sqrt(Omega) x the real-line integral of
    conj(phi_n) psi_n = psi_n^2 becomes that contour integral over 2^n n! sqrt(pi).
    """
    tol = 1e-12 * hermite_norm_sq(n)
    res = integrate_line(hermite_products([(n, n)]), ContourPath.rotated_line(params.theta),
                         tol=tol, dps=dps)
    return complex(res.value[0]) / hermite_norm_sq(n)


def biortho_matrix(params: ThetaParams, n_max: int, tol: float = 1e-9,
                   cross_check_n: int | None = 4) -> tuple:
    """G[n, m] = <phi_n, psi_m> and a report of max |G - I|."""
    if params.regime is not Regime.SQUARE_INTEGRABLE:
        raise RegimeError("phi_n and psi_m are not a compatible pair at the critical angles")
    phi = eigenfamily(params, Kind.PHI, n_max).members(n_max)
    psi = eigenfamily(params, Kind.PSI, n_max).members(n_max)
    G = gram(phi, psi)
    dev = float(np.max(np.abs(G - np.eye(n_max + 1))))
    rep = Report(f"biorthonormality theta={params.label} omega={params.omega}")
    pr = {**params.as_dict(), "n_max": n_max}
    rep.add(ReportRow("max |<phi_n,psi_m> - delta|", pr, 0.0, dev, dev, dev, tol, dev <= tol))
    if cross_check_n is not None and cross_check_n <= n_max:
        k = cross_check_n
        oracle = contour_biortho_entry(params, k)
        rep.add(ReportRow.compare("<phi_n,psi_n> contour", {**pr, "n": k}, G[k, k], oracle, tol))
    rep.data = {"max_deviation": dev}
    return G, rep


def norm_closed_form(params: ThetaParams, n: int) -> float:
    """P_n(1/cos theta) / sqrt(cos theta)."""
    c = params.cos_theta
    return legendre_eval(n, 1.0 / c) / math.sqrt(c)


def norm_sq(params: ThetaParams, n: int, tol: float = 1e-8) -> tuple:
    """||phi_n||^2 by exact pairing, compared with the Legendre closed form.

    The report also fits k in ||phi_m||^2 <= k m^{-1/2} (2/cos theta)^m on
    1 <= m <= n/2 and checks the bound at m = n.
    """
    if params.regime is not Regime.SQUARE_INTEGRABLE:
        raise RegimeError("phi_n is not square integrable at the critical angles")
    fam = eigenfamily(params, Kind.PHI, n)
    value = pairing(fam.member(n), fam.member(n)).real
    closed = norm_closed_form(params, n)
    pr = {**params.as_dict(), "n": n}
    rep = Report(f"norm theta={params.label} n={n}")
    rep.add(ReportRow.compare("||phi_n||^2", pr, closed, value, tol, relative=True))
    c = params.cos_theta
    if n >= 2 and c < 1:
        fit_range = range(1, n // 2 + 1)
        ratios = [norm_closed_form(params, m) * math.sqrt(m) / (2 / c) ** m for m in fit_range]
        k = max(ratios)
        bound = k / math.sqrt(n) * (2 / c) ** n
        rep.add(ReportRow("||phi_n||^2 <= k n^-1/2 (2/cos)^n", {**pr, "k": k}, bound, value,
                          0.0, 0.0, 0.0, value <= bound))
        rep.data = {"k": k}
    return value, rep


def growth_sequence(params: ThetaParams, n_max: int) -> list:
    fam = eigenfamily(params, Kind.PHI, n_max)
    return [pairing(fam.member(n), fam.member(n)).real for n in range(n_max + 1)]


def growth_ratio_check(params: ThetaParams, n: int, tol_two_over_cos: float = 0.05,
                       tol_legendre: float = 0.02) -> Report:
    """||phi_{n+1}||^2 / ||phi_n||^2 against 2/cos theta and against the Legendre asymptotic ratio."""
    if params.regime is not Regime.SQUARE_INTEGRABLE:
        raise RegimeError("needs |theta| < pi/2")
    fam = eigenfamily(params, Kind.PHI, n + 1)
    a = pairing(fam.member(n), fam.member(n)).real
    b = pairing(fam.member(n + 1), fam.member(n + 1)).real
    ratio = b / a
    c = params.cos_theta
    pr = {**params.as_dict(), "n": n}
    rep = Report(f"norm growth theta={params.label} n={n}")
    rep.add(ReportRow.compare("norm ratio vs 2/cos", pr, 2 / c, ratio, tol_two_over_cos,
                              relative=True))
    x = 1 / c
    asym = legendre_growth_ratio(x) * math.sqrt(n / (n + 1))
    rep.add(ReportRow.compare("norm ratio vs Legendre asymptotic", pr, asym, ratio, tol_legendre,
                              relative=True))
    rep.data = {"ratio": ratio, "two_over_cos": 2 / c, "legendre_limit": legendre_growth_ratio(x)}
    return rep


def similarity_check(params: ThetaParams, n_max: int, tol: float = 1e-9) -> Report:
    """Rotation identities, symmetry of the rotation on span{e_n}, and norm growth."""
    if params.regime is not Regime.SQUARE_INTEGRABLE:
        raise RegimeError("needs |theta| < pi/2")
    th = params.theta
    e = eigenfamily(params, Kind.E, n_max)
    phi = eigenfamily(params, Kind.PHI, n_max)
    psi = eigenfamily(params, Kind.PSI, n_max)
    rep = Report(f"similarity theta={params.label} omega={params.omega}")
    pr = params.as_dict()
    for n in range(n_max + 1):
        en = e.member(n)
        for name, lhs, rhs, t in (
            ("rotate(e_n, theta) = phi_n", rotate(en, th), phi.member(n), 1e-10),
            ("rotate(e_n, -theta) = psi_n", rotate(en, -th), psi.member(n), 1e-10),
            ("rotate(rotate(e_n, theta), -theta) = e_n", rotate(rotate(en, th), -th), en, 1e-12),
        ):
            gap = lhs.discrepancy(rhs)
            rep.add(ReportRow(name, {**pr, "n": n}, None, None, gap, gap, t, gap <= t))
    es = e.members(n_max)
    left = gram([rotate(f, th) for f in es], es)
    right = gram(es, [rotate(f, th) for f in es])
    gap = float(np.max(np.abs(left - right)))
    rep.add(ReportRow("<V f, g> = <f, V g> on span e", {**pr, "n_max": n_max}, None, None, gap,
                      gap, tol, gap <= tol))
    norms = growth_sequence(params, n_max)
    increasing = all(b > a for a, b in zip(norms, norms[1:]))
    ok = increasing if params.theta != 0 else all(abs(v - 1) < 1e-9 for v in norms)
    rep.add(ReportRow.flag("||phi_n|| strictly increasing", {**pr, "n_max": n_max},
                           norms[-1], ok))
    rep.data = {"norms_sq": norms}
    return rep


# ---------------------------------------------------------------------------
# finite-span resolutions


class Side(Enum):
    """Which resolution: left function's family, right function's family."""

    PSI_PHI = "PsiPhi"
    PHI_PSI = "PhiPsi"
    PSI_E = "PsiE"
    PHI_E = "PhiE"


_SIDE_KINDS = {
    Side.PSI_PHI: (Kind.PSI, Kind.PHI),
    Side.PHI_PSI: (Kind.PHI, Kind.PSI),
    Side.PSI_E: (Kind.PSI, Kind.E),
    Side.PHI_E: (Kind.PHI, Kind.E),
}


@dataclass(frozen=True)
class SpanVector:
    """sum_n coeffs[n] * member_n of the family ``kind``."""

    kind: Kind
    coeffs: tuple

    @classmethod
    def of(cls, kind: Kind, coeffs) -> "SpanVector":
        return cls(kind, tuple(complex(c) for c in coeffs))

    @classmethod
    def basis(cls, kind: Kind, n: int) -> "SpanVector":
        return cls(kind, tuple([0j] * n + [1 + 0j]))

    @property
    def top(self) -> int:
        nz = [k for k, c in enumerate(self.coeffs) if c != 0]
        return nz[-1] if nz else -1

    def function(self, params: ThetaParams) -> PolyGaussFn:
        fam = eigenfamily(params, self.kind, max(self.top, 0))
        out = PolyGaussFn.zero()
        for k, c in enumerate(self.coeffs):
            if c != 0:
                out = out + c * fam.member(k)
        return out


def span_resolution_check(params: ThetaParams, n_max: int, f: SpanVector, g: SpanVector,
                          side: Side, tol: float = 1e-9) -> Report:
    """Truncated sum_n <f, u_n><v_n, g> against <f, g> on finite spans."""
    if params.regime is not Regime.SQUARE_INTEGRABLE:
        raise RegimeError("needs |theta| < pi/2")
    side = Side(side)
    f_kind, g_kind = _SIDE_KINDS[side]
    if f.kind is not f_kind or g.kind is not g_kind:
        raise SpanError(f"side {side.value} needs f in span {f_kind.value}, "
                        f"g in span {g_kind.value}")
    if f.top > n_max or g.top > n_max:
        raise SpanError(f"span coefficients reach index {max(f.top, g.top)} > n_max={n_max}")
    # expansion families: u_n pairs with f, v_n with g
    if side in (Side.PSI_PHI, Side.PSI_E):
        u_kind, v_kind = Kind.PHI, Kind.PSI
    else:
        u_kind, v_kind = Kind.PSI, Kind.PHI
    ff, gg = f.function(params), g.function(params)
    us = eigenfamily(params, u_kind, n_max).members(n_max)
    vs = eigenfamily(params, v_kind, n_max).members(n_max)
    left = np.array([pairing(ff, u) for u in us]) if not ff.is_zero else np.zeros(n_max + 1)
    right = np.array([pairing(v, gg) for v in vs]) if not gg.is_zero else np.zeros(n_max + 1)
    total = complex(np.sum(left * right))
    direct = pairing(ff, gg) if not (ff.is_zero or gg.is_zero) else 0j
    rep = Report(f"span resolution {side.value} theta={params.label}")
    rep.add(ReportRow.compare("sum_n <f,u_n><v_n,g> vs <f,g>",
                              {**params.as_dict(), "side": side.value, "n_max": n_max},
                              total, direct, tol))
    return rep


__all__ = [
    "Regime", "Kind", "Side", "ThetaParams", "OperatorSet", "EigenFamily", "SpanVector",
    "build_operators", "hamiltonian", "number_state_ops", "algebra_check", "random_polygauss",
    "closed_form_member", "eigenfamily", "dual_construction_check", "ladder_check",
    "eigenvalue", "spectrum_check", "biortho_matrix", "contour_biortho_entry",
    "norm_closed_form", "norm_sq", "growth_sequence", "growth_ratio_check",
    "similarity_check", "span_resolution_check",
]
