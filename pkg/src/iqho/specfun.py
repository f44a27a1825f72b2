"""Hermite and Legendre polynomials.

Values come from three-term recurrences evaluated directly on the argument;
the exact integer coefficient table of H_n is kept for building
polynomial-times-Gaussian eigenfunctions and for cross-checks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import DegreeTooLarge, DomainError

MAX_DEGREE = 128


def _check_degree(n: int, max_n: int) -> None:
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    if n > max_n:
        raise DegreeTooLarge(f"degree {n} exceeds configured maximum {max_n}")


def hermite_eval(n: int, y, max_n: int = MAX_DEGREE):
    """Physicists' Hermite polynomial H_n(y) for complex (or array) y.

    Works for any numeric type closed under +, * (floats, complex, numpy
    arrays, mpmath numbers).
    """
    _check_degree(n, max_n)
    h_prev = 1 + 0 * y
    if n == 0:
        return h_prev
    h = 2 * y
    for k in range(2, n + 1):
        h_prev, h = h, 2 * y * h - 2 * (k - 1) * h_prev
    return h


def hermite_values(n_max: int, y, max_n: int = MAX_DEGREE) -> list:
    """[H_0(y), ..., H_{n_max}(y)] from a single recurrence sweep."""
    _check_degree(n_max, max_n)
    out = [1 + 0 * y]
    if n_max >= 1:
        out.append(2 * y)
    for k in range(2, n_max + 1):
        out.append(2 * y * out[-1] - 2 * (k - 1) * out[-2])
    return out


@dataclass(frozen=True)
class HermiteCache:
    """Exact integer coefficients of H_0..H_max_n, lowest power first."""

    max_n: int
    table: tuple

    @classmethod
    def build(cls, max_n: int = MAX_DEGREE) -> "HermiteCache":
        rows = [(1,), (0, 2)]
        for n in range(2, max_n + 1):
            prev, prev2 = rows[n - 1], rows[n - 2]
            row = [0] * (n + 1)
            for k, c in enumerate(prev):
                row[k + 1] += 2 * c
            for k, c in enumerate(prev2):
                row[k] -= 2 * (n - 1) * c
            rows.append(tuple(row))
        return cls(max_n, tuple(rows[: max_n + 1]))

    def coeffs(self, n: int) -> tuple:
        _check_degree(n, self.max_n)
        return self.table[n]

    def evaluate(self, n: int, y):
        """Horner evaluation on the exact coefficients (cross-check path)."""
        acc = 0 * y
        for c in reversed(self.coeffs(n)):
            acc = acc * y + c
        return acc


@lru_cache(maxsize=None)
def hermite_cache(max_n: int = MAX_DEGREE) -> HermiteCache:
    return HermiteCache.build(max_n)


def hermite_coeffs(n: int) -> tuple:
    return hermite_cache().coeffs(n)


def legendre_eval(n: int, x):
    """P_n(x) by Bonnet's recurrence."""
    if n < 0:
        raise ValueError(f"degree must be non-negative, got {n}")
    p_prev = 1.0 + 0 * x
    if n == 0:
        return p_prev
    p = 1.0 * x
    for k in range(1, n):
        p_prev, p = p, ((2 * k + 1) * x * p - k * p_prev) / (k + 1)
    return p


def legendre_asymptotic(n: int, x: float) -> float:
    """Large-n estimate of P_n(x) for x > 1."""
    if x <= 1:
        raise DomainError(f"asymptotic form needs x > 1, got {x}")
    if n < 1:
        raise ValueError("asymptotic form needs n >= 1")
    s = math.sqrt(x * x - 1.0)
    return (2 * math.pi * n) ** -0.5 * (x * x - 1.0) ** -0.25 * (x + s) ** (n + 0.5)


def legendre_growth_ratio(x: float) -> float:
    """lim P_{n+1}(x)/P_n(x) for x > 1."""
    if x <= 1:
        raise DomainError(f"needs x > 1, got {x}")
    return x + math.sqrt(x * x - 1.0)


def hermite_norm_sq(n: int) -> float:
    """2^n n! sqrt(pi)."""
    return 2.0**n * math.factorial(n) * math.sqrt(math.pi)


__all__ = [
    "MAX_DEGREE",
    "HermiteCache",
    "hermite_cache",
    "hermite_coeffs",
    "hermite_eval",
    "hermite_values",
    "hermite_norm_sq",
    "legendre_eval",
    "legendre_asymptotic",
    "legendre_growth_ratio",
]
