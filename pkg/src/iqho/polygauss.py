"""Exact algebra on functions p(x) * exp(gamma + beta*x - alpha*x**2/2).

Everything the package manipulates (eigenfunctions, vacua, bi-coherent
states, test functions) lives in this class, and so do the images of those
functions under differential operators with polynomial coefficients.

Pairings are evaluated in closed form from the complex Gaussian moments

    M_k = int x^k exp(-A x^2/2 + B x) dx,   Re A > 0,

with M_0 = sqrt(2 pi / A) exp(B^2 / 2A) (principal branch) and the
integration-by-parts recurrence  M_k = ((k-1) M_{k-2} + B M_{k-1}) / A.
The coefficient sums behind a pairing of two Hermite-type functions cancel
catastrophically (eight or more digits at degree 20), so the recurrence and
the sums are carried out in extended precision from the double inputs.
"""
from __future__ import annotations

import cmath
import threading
from dataclasses import dataclass, field
from math import comb, factorial
from typing import Mapping

import mpmath
import numpy as np
from numpy.polynomial import polynomial as P

from .errors import IncompatiblePair

ZERO_TOL = 1e-14
WORKING_DPS = 40

_ctx_lock = threading.Lock()
_contexts: dict[int, mpmath.ctx_mp.MPContext] = {}


def mp_context(dps: int = WORKING_DPS):
    """A private mpmath context with fixed precision (never mutated after creation)."""
    ctx = _contexts.get(dps)
    if ctx is None:
        with _ctx_lock:
            ctx = _contexts.get(dps)
            if ctx is None:
                ctx = mpmath.MPContext()
                ctx.dps = dps
                _contexts[dps] = ctx
    return ctx


def _as_coeffs(coeffs) -> np.ndarray:
    c = np.array(coeffs, dtype=complex).reshape(-1)
    nz = np.flatnonzero(c)
    c = c[: nz[-1] + 1] if nz.size else c[:0]
    c.setflags(write=False)
    return c


def _close(a: complex, b: complex, rtol: float) -> bool:
    return abs(a - b) <= rtol * max(1.0, abs(a), abs(b))


@dataclass(frozen=True, eq=False)
class PolyGaussFn:
    """p(x) * exp(gamma + beta*x - alpha*x**2/2); coeffs lowest degree first.

    Trailing zero coefficients are stripped; the zero function has no
    coefficients. Re(alpha) < 0 is rejected.
    """

    coeffs: np.ndarray
    alpha: complex = 0j
    beta: complex = 0j
    gamma: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeffs(self.coeffs))
        for name in ("alpha", "beta", "gamma"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if self.alpha.real < 0:
            raise ValueError(f"Re(alpha) must be >= 0, got alpha={self.alpha}")

    @classmethod
    def gaussian(cls, alpha, beta=0j, gamma=0j, scale=1.0) -> "PolyGaussFn":
        return cls([scale], alpha, beta, gamma)

    @classmethod
    def zero(cls, alpha=0j, beta=0j, gamma=0j) -> "PolyGaussFn":
        return cls([], alpha, beta, gamma)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def __call__(self, x):
        return evaluate(self, x)

    def same_exponent(self, other: "PolyGaussFn", rtol: float = 1e-14) -> bool:
        return _close(self.alpha, other.alpha, rtol) and _close(self.beta, other.beta, rtol)

    def coeffs_at_gamma(self, gamma: complex) -> np.ndarray:
        """Coefficients re-expressed with log-prefactor ``gamma``."""
        if self.gamma == gamma:
            return self.coeffs
        return self.coeffs * cmath.exp(self.gamma - gamma)

    def with_gamma(self, gamma: complex) -> "PolyGaussFn":
        return PolyGaussFn(self.coeffs_at_gamma(gamma), self.alpha, self.beta, gamma)

    def replace(self, **kw) -> "PolyGaussFn":
        args = dict(coeffs=self.coeffs, alpha=self.alpha, beta=self.beta, gamma=self.gamma)
        args.update(kw)
        return PolyGaussFn(**args)

    def __mul__(self, c) -> "PolyGaussFn":
        if isinstance(c, PolyGaussFn):
            return NotImplemented
        return self.replace(coeffs=self.coeffs * complex(c))

    __rmul__ = __mul__

    def __truediv__(self, c) -> "PolyGaussFn":
        return self * (1.0 / complex(c))

    def __neg__(self) -> "PolyGaussFn":
        return self * -1.0

    def __add__(self, other: "PolyGaussFn") -> "PolyGaussFn":
        if not isinstance(other, PolyGaussFn):
            return NotImplemented
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        if not self.same_exponent(other):
            raise ValueError("sum leaves the class: exponents differ")
        a = self.coeffs
        b = other.coeffs_at_gamma(self.gamma)
        return self.replace(coeffs=P.polyadd(a, b))

    def __sub__(self, other: "PolyGaussFn") -> "PolyGaussFn":
        return self + (-other)

    def discrepancy(self, other: "PolyGaussFn") -> float:
        """Max coefficient difference relative to the larger coefficient scale.

        Returns inf when the exponents differ (the functions cannot agree).
        """
        if self.is_zero and other.is_zero:
            return 0.0
        if not (self.is_zero or other.is_zero) and not self.same_exponent(other, 1e-12):
            return float("inf")
        ref = other if self.is_zero else self
        a = self.coeffs_at_gamma(ref.gamma)
        b = other.coeffs_at_gamma(ref.gamma)
        n = max(len(a), len(b))
        a = np.pad(a, (0, n - len(a)))
        b = np.pad(b, (0, n - len(b)))
        scale = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0))
        return float(np.max(np.abs(a - b)) / scale)

    def isclose(self, other: "PolyGaussFn", rtol: float = 1e-12) -> bool:
        return self.discrepancy(other) <= rtol

    def __repr__(self) -> str:
        return (
            f"PolyGaussFn(deg={self.degree}, alpha={self.alpha:.6g}, "
            f"beta={self.beta:.6g}, gamma={self.gamma:.6g})"
        )


def evaluate(f: PolyGaussFn, x):
    """Pointwise value; the exponent is summed before exponentiating."""
    x = np.asarray(x, dtype=complex) if not np.isscalar(x) else complex(x)
    if f.is_zero:
        return 0 * x
    poly = P.polyval(x, f.coeffs)
    return poly * np.exp(f.gamma + f.beta * x - 0.5 * f.alpha * x * x)


def rotate(f: PolyGaussFn, theta: float) -> PolyGaussFn:
    """exp(i theta/4) f(exp(i theta/2) x), exactly on the representation."""
    k = np.arange(len(f.coeffs))
    return PolyGaussFn(
        f.coeffs * np.exp(0.5j * theta * k),
        f.alpha * cmath.exp(1j * theta),
        f.beta * cmath.exp(0.5j * theta),
        f.gamma + 0.25j * theta,
    )


# ---------------------------------------------------------------------------
# Differential operators


@dataclass(frozen=True, eq=False)
class DiffOp:
    """Finite sum of c * x^j (d/dx)^k, keyed by (j, k)."""

    terms: Mapping[tuple, complex] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for (j, k), c in dict(self.terms).items():
            if j < 0 or k < 0:
                raise ValueError("powers must be non-negative")
            c = complex(c)
            if c != 0:
                clean[(int(j), int(k))] = clean.get((int(j), int(k)), 0j) + c
        object.__setattr__(self, "terms", {key: c for key, c in sorted(clean.items()) if c != 0})

    @classmethod
    def identity(cls) -> "DiffOp":
        return cls({(0, 0): 1.0})

    @classmethod
    def x(cls, power: int = 1) -> "DiffOp":
        return cls({(power, 0): 1.0})

    @classmethod
    def d(cls, order: int = 1) -> "DiffOp":
        return cls({(0, order): 1.0})

    @classmethod
    def p(cls) -> "DiffOp":
        """Momentum -i d/dx."""
        return cls({(0, 1): -1j})

    def __add__(self, other: "DiffOp") -> "DiffOp":
        if not isinstance(other, DiffOp):
            return NotImplemented
        out = dict(self.terms)
        for key, c in other.terms.items():
            out[key] = out.get(key, 0j) + c
        return DiffOp(out)

    def __neg__(self) -> "DiffOp":
        return self * -1

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def __mul__(self, c) -> "DiffOp":
        if isinstance(c, DiffOp):
            return NotImplemented
        return DiffOp({key: v * complex(c) for key, v in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, c) -> "DiffOp":
        return self * (1.0 / complex(c))

    def __matmul__(self, other: "DiffOp") -> "DiffOp":
        """Composition self o other, normal ordered (x's to the left)."""
        out: dict = {}
        for (j, k), c1 in self.terms.items():
            for (l, m), c2 in other.terms.items():
                # D^k x^l = sum_i C(k,i) l!/(l-i)! x^(l-i) D^(k-i)
                for i in range(min(k, l) + 1):
                    coef = comb(k, i) * factorial(l) // factorial(l - i)
                    key = (j + l - i, k - i + m)
                    out[key] = out.get(key, 0j) + c1 * c2 * coef
        return DiffOp(out)

    def adjoint(self) -> "DiffOp":
        """Formal adjoint on the Schwartz space: (c x^j D^k)^+ = conj(c) (-D)^k x^j."""
        out = DiffOp()
        for (j, k), c in self.terms.items():
            out = out + ((-1) ** k * c.conjugate()) * (DiffOp.d(k) @ DiffOp.x(j))
        return out

    def commutator(self, other: "DiffOp") -> "DiffOp":
        return self @ other - other @ self

    @property
    def scale(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def discrepancy(self, other: "DiffOp") -> float:
        keys = set(self.terms) | set(other.terms)
        scale = max(self.scale, other.scale)
        if scale == 0:
            return 0.0
        return max(abs(self.terms.get(k, 0j) - other.terms.get(k, 0j)) for k in keys) / scale

    def isclose(self, other: "DiffOp", rtol: float = 1e-13) -> bool:
        return self.discrepancy(other) <= rtol

    def __repr__(self) -> str:
        body = " + ".join(f"({c:.4g}) x^{j} D^{k}" for (j, k), c in self.terms.items())
        return f"DiffOp({body or '0'})"


def _derive(p: np.ndarray, alpha: complex, beta: complex) -> np.ndarray:
    """Polynomial part of d/dx [p e^q] with q' = beta - alpha x."""
    if len(p) == 0:
        return p
    out = np.zeros(len(p) + 1, dtype=complex)
    out[: len(p)] += beta * p
    out[1:] -= alpha * p
    out[: len(p) - 1] += p[1:] * np.arange(1, len(p))
    return out


def _derive_abs(p: np.ndarray, alpha: complex, beta: complex) -> np.ndarray:
    out = np.zeros(len(p) + 1)
    out[: len(p)] += abs(beta) * p
    out[1:] += abs(alpha) * p
    out[: len(p) - 1] += p[1:] * np.arange(1, len(p))
    return out


def _apply_with_bound(op: DiffOp, f: PolyGaussFn):
    """Image coefficients plus a coefficient-wise bound on the summed magnitudes."""
    if f.is_zero or not op.terms:
        return np.zeros(0, complex), np.zeros(0)
    max_k = max(k for _, k in op.terms)
    derivs = [f.coeffs]
    bounds = [np.abs(f.coeffs)]
    for _ in range(max_k):
        derivs.append(_derive(derivs[-1], f.alpha, f.beta))
        bounds.append(_derive_abs(bounds[-1], f.alpha, f.beta))
    size = max(j + len(derivs[k]) for j, k in op.terms)
    out = np.zeros(size, dtype=complex)
    bound = np.zeros(size)
    for (j, k), c in op.terms.items():
        out[j : j + len(derivs[k])] += c * derivs[k]
        bound[j : j + len(bounds[k])] += abs(c) * bounds[k]
    return out, bound


def apply_op(op: DiffOp, f: PolyGaussFn) -> PolyGaussFn:
    """Exact image of f under op; coefficients lost to cancellation snap to zero."""
    out, bound = _apply_with_bound(op, f)
    out = np.where(np.abs(out) <= ZERO_TOL * bound, 0j, out)
    return f.replace(coeffs=out)


def op_residual(op: DiffOp, f: PolyGaussFn, expected: PolyGaussFn) -> float:
    """max |op f - expected| over coefficients, relative to the magnitude scale of op f.

    The scale is the largest coefficient of the term-wise magnitude bound, so an
    identity that holds up to roundoff gives ~1e-16 even when op f vanishes.
    """
    out, bound = _apply_with_bound(op, f)
    scale = float(np.max(bound, initial=0.0))
    exp_c = expected.coeffs_at_gamma(f.gamma) if not expected.is_zero else np.zeros(0, complex)
    if not expected.is_zero and not f.is_zero and not expected.same_exponent(f, 1e-12):
        return float("inf")
    n = max(len(out), len(exp_c))
    diff = np.pad(out, (0, n - len(out))) - np.pad(exp_c, (0, n - len(exp_c)))
    scale = max(scale, float(np.max(np.abs(exp_c), initial=0.0)))
    if scale == 0:
        return 0.0
    return float(np.max(np.abs(diff), initial=0.0) / scale)


# ---------------------------------------------------------------------------
# Pairings


def _combined(f: PolyGaussFn, g: PolyGaussFn, weight_alpha: complex = 0j):
    A = f.alpha.conjugate() + g.alpha + weight_alpha
    B = f.beta.conjugate() + g.beta
    C = f.gamma.conjugate() + g.gamma
    return A, B, C


def _mp_list(ctx, arr) -> list:
    return [ctx.mpc(complex(c).real, complex(c).imag) for c in arr]


def moment_sum(ctx, a_conj: list, b: list, A, B, C):
    """sum_{i,j} a_conj[i] b[j] M_{i+j} times exp(C), all in ``ctx`` arithmetic."""
    if not a_conj or not b:
        return ctx.zero
    kmax = len(a_conj) + len(b) - 2
    m = [ctx.one]
    if kmax >= 1:
        m.append(B / A)
    for k in range(2, kmax + 1):
        m.append(((k - 1) * m[k - 2] + B * m[k - 1]) / A)
    nb = len(b)
    v = [ctx.fdot(b, m[i : i + nb]) for i in range(len(a_conj))]
    return ctx.fdot(a_conj, v) * ctx.sqrt(2 * ctx.pi / A) * ctx.exp(B * B / (2 * A) + C)


def _to_complex(z) -> complex:
    try:
        return complex(z)
    except OverflowError:
        return complex(float("inf"), 0.0)


def weighted_pairing(f: PolyGaussFn, g: PolyGaussFn, weight_alpha: complex = 0j) -> complex:
    """int conj(f) g exp(-weight_alpha x^2 / 2) dx in closed form."""
    A, B, C = _combined(f, g, complex(weight_alpha))
    if A.real <= 0:
        raise IncompatiblePair(f"combined quadratic exponent has Re <= 0 (A={A})")
    if f.is_zero or g.is_zero:
        return 0j
    ctx = mp_context()
    a = _mp_list(ctx, np.conj(f.coeffs))
    b = _mp_list(ctx, g.coeffs)
    val = moment_sum(ctx, a, b, ctx.mpc(A.real, A.imag), ctx.mpc(B.real, B.imag), ctx.mpc(C.real, C.imag))
    return _to_complex(val)


def pairing(f: PolyGaussFn, g: PolyGaussFn) -> complex:
    """<f, g> = int conj(f(x)) g(x) dx, conjugate-linear in f."""
    return weighted_pairing(f, g, 0j)


def norm_sq(f: PolyGaussFn) -> float:
    return pairing(f, f).real


def gram(fs: list, gs: list) -> np.ndarray:
    """Matrix <fs[i], gs[j]> for families sharing one exponent on each side.

    Reuses a single moment table, which is what makes biorthonormality sweeps cheap.
    """
    if not fs or not gs:
        return np.zeros((len(fs), len(gs)), complex)
    f0, g0 = fs[0], gs[0]
    if any(not f.same_exponent(f0) for f in fs) or any(not g.same_exponent(g0) for g in gs):
        raise ValueError("gram needs a shared exponent within each family")
    A, B, C = _combined(f0, g0)
    if A.real <= 0:
        raise IncompatiblePair(f"combined quadratic exponent has Re <= 0 (A={A})")
    ctx = mp_context()
    A_, B_ = ctx.mpc(A.real, A.imag), ctx.mpc(B.real, B.imag)
    df = max(f.degree for f in fs)
    dg = max(g.degree for g in gs)
    if df < 0 or dg < 0:
        return np.zeros((len(fs), len(gs)), complex)
    kmax = df + dg
    m = [ctx.one]
    if kmax >= 1:
        m.append(B_ / A_)
    for k in range(2, kmax + 1):
        m.append(((k - 1) * m[k - 2] + B_ * m[k - 1]) / A_)
    out = np.zeros((len(fs), len(gs)), complex)
    a_lists = [_mp_list(ctx, np.conj(f.coeffs_at_gamma(f0.gamma))) for f in fs]
    for jj, g in enumerate(gs):
        b = _mp_list(ctx, g.coeffs_at_gamma(g0.gamma))
        if not b:
            continue
        nb = len(b)
        v = [ctx.fdot(b, m[i : i + nb]) for i in range(df + 1)]
        for ii, a in enumerate(a_lists):
            if a:
                out[ii, jj] = _to_complex(ctx.fdot(a, v[: len(a)]))
    pref = cmath.sqrt(2 * cmath.pi / A) * cmath.exp(B * B / (2 * A) + C)
    return out * pref


def gaussian_moments(A, B, kmax: int) -> np.ndarray:
    """Double-precision moments M_0..M_kmax, vectorized over arrays A, B.

    Adequate for low degrees; high-degree pairings go through ``pairing``.
    """
    A = np.asarray(A, complex)
    B = np.asarray(B, complex)
    shape = np.broadcast(A, B).shape
    M = np.zeros((kmax + 1,) + shape, complex)
    M[0] = np.sqrt(2 * np.pi / A) * np.exp(B * B / (2 * A))
    if kmax >= 1:
        M[1] = B / A * M[0]
    for k in range(2, kmax + 1):
        M[k] = ((k - 1) * M[k - 2] + B * M[k - 1]) / A
    return M


def pairing_batch(f: PolyGaussFn, g: PolyGaussFn, beta_shift, gamma_shift) -> np.ndarray:
    """<f, g * exp(gamma_shift + beta_shift x)> for arrays of shifts (double precision)."""
    beta_shift = np.asarray(beta_shift, complex)
    gamma_shift = np.asarray(gamma_shift, complex)
    A, B0, C0 = _combined(f, g)
    if A.real <= 0:
        raise IncompatiblePair(f"combined quadratic exponent has Re <= 0 (A={A})")
    shape = np.broadcast(beta_shift, gamma_shift).shape
    if f.is_zero or g.is_zero:
        return np.zeros(shape, complex)
    B = B0 + beta_shift
    prod = P.polymul(np.conj(f.coeffs), g.coeffs)
    kmax = len(prod) - 1
    m = np.zeros((kmax + 1,) + B.shape, complex)
    m[0] = 1.0
    if kmax >= 1:
        m[1] = B / A
    for k in range(2, kmax + 1):
        m[k] = ((k - 1) * m[k - 2] + B * m[k - 1]) / A
    s = np.tensordot(prod, m, axes=(0, 0))
    return s * np.sqrt(2 * np.pi / A) * np.exp(B * B / (2 * A) + C0 + gamma_shift)


def moment_integrand(f: PolyGaussFn, g: PolyGaussFn):
    """Vectorized x -> conj(f)(x) g(x) for real x (oracle input)."""

    def integrand(x):
        return np.conj(evaluate(f, np.conj(x))) * evaluate(g, x)

    return integrand


__all__ = [
    "ZERO_TOL",
    "WORKING_DPS",
    "PolyGaussFn",
    "DiffOp",
    "apply_op",
    "op_residual",
    "evaluate",
    "rotate",
    "pairing",
    "weighted_pairing",
    "norm_sq",
    "gram",
    "gaussian_moments",
    "pairing_batch",
    "moment_integrand",
    "moment_sum",
    "mp_context",
]
