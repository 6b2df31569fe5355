"""Exponential sums over squares: the complete quadratic Gauss sum S(q,a),
its closed-form magnitude, the Weyl sum f(alpha) = sum_{m<=N} e(alpha m^2),
the weighted sum v(beta) = (1/2) sum_{m<=x} m^{-1/2} e(beta m), and the
rational-point approximant f*(alpha) = S(q,a)/q * v(alpha - a/q), where
e(z) = exp(2 pi i z).

Rational phases like a h^2 / q, and the dyadic-rational phases alpha m^2
that a float alpha produces, are reduced mod 1 in exact integer arithmetic
before any complex exponential is taken, so accuracy does not degrade as
the raw phase grows.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import DomainError, NotCoprimeError

ComplexValue = complex


@lru_cache(maxsize=8)
def _gauss_tables(q: int):
    h = np.arange(1, q + 1, dtype=np.int64)
    h2 = (h * h) % q
    roots = np.exp((2j * np.pi / q) * np.arange(q))
    h2.setflags(write=False)
    roots.setflags(write=False)
    return h2, roots


def gauss_sum(q: int, a: int) -> complex:
    """S(q, a) = sum_{h=1..q} e(a h^2 / q); a need not be coprime to q."""
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    h2, roots = _gauss_tables(q)
    idx = (a % q) * h2 % q
    return complex(roots[idx].sum())


def gauss_magnitude_closed(q: int) -> float:
    """|S(q, a)| for any a coprime to q: sqrt(q), sqrt(2q), or 0 by q mod 4."""
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    if q % 2 == 1:
        return math.sqrt(q)
    if q % 4 == 0:
        return math.sqrt(2 * q)
    return 0.0


def weyl_sum(alpha: float, N: int) -> complex:
    """f(alpha) = sum_{m=1..N} e(alpha m^2).

    alpha is taken as the exact dyadic rational num/den the float holds; the
    quadratic phase num*m^2 mod den is advanced by second differences in
    integer arithmetic, one correctly rounded division per term.
    """
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise DomainError("alpha must be finite")
    num, den = alpha.as_integer_ratio()
    num %= den
    fracs = np.empty(N, dtype=np.float64)
    p = num % den
    d = 3 * num % den
    two = 2 * num % den
    for i in range(N):
        fracs[i] = p / den
        p = (p + d) % den
        d = (d + two) % den
    z = np.exp((2j * np.pi) * fracs)
    return complex(z.sum())


@lru_cache(maxsize=4)
def _inv_sqrt_weights(x: int) -> np.ndarray:
    w = 1.0 / np.sqrt(np.arange(1, x + 1, dtype=np.float64))
    w.setflags(write=False)
    return w


def v_sum(beta: float, x: int) -> complex:
    """v(beta) = (1/2) sum_{m=1..x} m^{-1/2} e(beta m).

    Periodic in beta with period 1, so beta is folded to [-1/2, 1/2] first;
    that keeps the phase arguments small and the evaluation accurate.
    """
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    beta = float(beta)
    if not math.isfinite(beta):
        raise DomainError("beta must be finite")
    beta -= round(beta)
    w = _inv_sqrt_weights(x)
    m = np.arange(1, x + 1, dtype=np.float64)
    z = np.exp((2j * np.pi * beta) * m)
    return complex(0.5 * (w * z).sum())


def f_star(alpha: float, q: int, a: int, x: int) -> complex:
    """f*(alpha) = q^{-1} S(q,a) v(alpha - a/q), defined for gcd(a, q) = 1."""
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    if math.gcd(a, q) != 1:
        raise NotCoprimeError(f"gcd({a}, {q}) != 1")
    return gauss_sum(q, a) / q * v_sum(alpha - a / q, x)
