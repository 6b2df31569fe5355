"""Singular-series machinery for sums of three squares.

The q-th term is A(q, n) = sum over a coprime to q of q^{-3} S(q,a)^3 e(-an/q);
its partial sums S3(n, Q) = sum_{q<=Q} A(q, n) converge (slowly) to a limit
with 2 pi sqrt(n) S3(n) = r_3(n). The archimedean counterpart is the singular
integral I(n), computed here exactly by coefficient extraction.

A(q, n) depends on n only through n mod q, and for fixed q the whole residue
profile is two length-q DFTs away from the exact table of squares mod q. That
is how a_term and singular_series evaluate it; the literal double sum is kept
as a_term_direct so tests can cross-check the transform route entry by entry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from ._util import format_real

IMAG_TOLERANCE = 1e-9

_PROFILE_CACHE_MAX = 2048
_profile_cache: dict[int, tuple[np.ndarray, float]] = {}


def _a_profile(q: int) -> tuple[np.ndarray, float]:
    """A(q, r) for every residue r = 0..q-1, plus the imaginary residue.

    g[r] counts solutions of h^2 = r (mod q), so S(q, a) for all a is the
    conjugated DFT of g, and the profile is the forward DFT of the coprime-
    masked S^3/q^3. Both steps are the defining sums, just evaluated for all
    indices at once.
    """
    cached = _profile_cache.get(q)
    if cached is not None:
        return cached
    h = np.arange(1, q + 1, dtype=np.int64)
    g = np.bincount((h * h) % q, minlength=q).astype(np.float64)
    s_all = np.conj(np.fft.fft(g))
    a = np.arange(q)
    masked = np.where(np.gcd(a, q) == 1, s_all**3, 0.0) / float(q) ** 3
    profile = np.fft.fft(masked)
    resid = float(np.abs(profile.imag).max())
    if resid > IMAG_TOLERANCE:
        raise AssertionError(
            f"A({q}, .) imaginary residue {resid:.3e} exceeds {IMAG_TOLERANCE}"
        )
    real = np.ascontiguousarray(profile.real)
    real.setflags(write=False)
    result = (real, resid)
    if q <= _PROFILE_CACHE_MAX:
        _profile_cache[q] = result
    return result


def a_term(q: int, n: int) -> float:
    """A(q, n), real by construction; raises if the imaginary residue is large."""
    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    profile, _ = _a_profile(q)
    return float(profile[n % q])


def a_term_direct(q: int, n: int) -> float:
    """Literal definition of A(q, n), one Gauss sum per coprime a.

    Slow cross-check path for the transform evaluation above.
    """
    from .expsum import gauss_sum

    if q < 1:
        raise DomainError(f"q must be >= 1, got {q}")
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    roots = np.exp((-2j * np.pi / q) * np.arange(q))
    total = 0j
    for a in range(1, q + 1):
        if math.gcd(a, q) != 1:
            continue
        total += gauss_sum(q, a) ** 3 * roots[(a * n) % q]
    total /= float(q) ** 3
    if abs(total.imag) > IMAG_TOLERANCE:
        raise AssertionError(
            f"A({q}, {n}) imaginary residue {abs(total.imag):.3e} "
            f"exceeds {IMAG_TOLERANCE}"
        )
    return total.real


@dataclass(frozen=True, eq=False)
class SingularTruncation:
    """S3(n, Q) together with its per-q terms A(q, n) for q = 1..Q."""

    n: int
    Q: int
    value: float
    terms: np.ndarray

    def __post_init__(self):
        if self.n < 1 or self.Q < 1:
            raise DomainError("n and Q must be >= 1")
        t = np.asarray(self.terms, dtype=np.float64)
        if t.shape != (self.Q,):
            raise DomainError(f"terms length {t.shape} does not match Q={self.Q}")
        if abs(t[0] - 1.0) > 1e-12:
            raise DomainError(f"q=1 term must be 1, got {t[0]!r}")
        if abs(self.value - float(np.sum(t))) > 1e-10 * self.Q:
            raise DomainError("value does not match the sum of terms")
        if t.flags.writeable:
            t.setflags(write=False)
        object.__setattr__(self, "terms", t)


def singular_series(n: int, Q: int) -> SingularTruncation:
    """Partial sum S3(n, Q) with all Q terms retained."""
    return singular_series_many([n], Q)[n]


def singular_series_many(ns, Q: int) -> dict[int, SingularTruncation]:
    """One pass over q = 1..Q serving several n at once.

    The per-q residue profile is the expensive part and is shared by every n.
    """
    if Q < 1:
        raise DomainError(f"Q must be >= 1, got {Q}")
    ns = list(dict.fromkeys(int(n) for n in ns))
    if not ns:
        return {}
    if min(ns) < 1:
        raise DomainError("all n must be >= 1")
    terms = {n: np.empty(Q, dtype=np.float64) for n in ns}
    for q in range(1, Q + 1):
        profile, _ = _a_profile(q)
        for n in ns:
            terms[n][q - 1] = profile[n % q]
    return {
        n: SingularTruncation(n=n, Q=Q, value=float(np.sum(t)), terms=t)
        for n, t in terms.items()
    }


def bateman_factor(n: int) -> float:
    """The constant 2 pi sqrt(n) multiplying S3(n) in the exact count formula.

    The factor follows from the method that defines S3: the positive-triple
    count satisfies r*(n) ~ S3(n) I(n) with I(n) ~ (pi/4) sqrt(n), and signed
    counts are eight positive counts up to lower order, so 8 * pi/4 = 2 pi.
    Truncations of 2 pi sqrt(n) S3(n, Q) converge to r_3(n), which the test
    suite checks against exact counts.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    return 2.0 * math.pi * math.sqrt(n)


def bateman_r3(n: int, Q: int) -> float:
    """Truncated exact-formula approximation 2 pi sqrt(n) S3(n, Q) to r_3(n)."""
    return bateman_factor(n) * singular_series(n, Q).value


def i_exact(n: int, x: int) -> float:
    """Singular integral I(n) evaluated exactly.

    v(beta) is a finite trigonometric sum, so the integral of v^3 e(-beta n)
    is plain coefficient extraction:
    I(n) = (1/8) sum_{m1+m2+m3=n, 1<=mi<=x} (m1 m2 m3)^{-1/2}.
    """
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    m_hi = min(x, n - 2)
    if m_hi < 1:
        return 0.0
    w = 1.0 / np.sqrt(np.arange(1, m_hi + 1, dtype=np.float64))
    pair = np.convolve(w, w)  # pair[j] = sum over m2 + m3 = j + 2
    m1 = np.arange(1, m_hi + 1)
    s = n - m1
    ok = (s >= 2) & (s <= 2 * m_hi)
    total = float(np.sum(w[ok] * pair[s[ok] - 2]))
    return total / 8.0


def i_exact_range(n_max: int, x: int) -> np.ndarray:
    """I(n) for all 0 <= n <= n_max in one triple convolution.

    Matches i_exact pointwise; the per-n truncation min(x, n-2) is immaterial
    because parts larger than n-2 cannot occur in a triple summing to n.
    """
    if x < 1:
        raise DomainError(f"x must be >= 1, got {x}")
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    out = np.zeros(n_max + 1, dtype=np.float64)
    m_hi = min(x, n_max - 2)
    if m_hi < 1:
        return out
    w = 1.0 / np.sqrt(np.arange(1, m_hi + 1, dtype=np.float64))
    triple = np.convolve(np.convolve(w, w), w)  # triple[j] = sum over m1+m2+m3 = j + 3
    hi = min(n_max, 3 * m_hi)
    out[3 : hi + 1] = triple[: hi - 2] / 8.0
    return out


def truncation_csv_lines(trunc: SingularTruncation) -> list[str]:
    """Per-q terms as `q,A_q_n` rows, then a `total,<value>` footer."""
    lines = ["q,A_q_n"]
    for q, t in enumerate(trunc.terms, start=1):
        lines.append(f"{q},{format_real(t)}")
    lines.append(f"total,{format_real(trunc.value)}")
    return lines


def save_truncation_csv(trunc: SingularTruncation, path, header_comment: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if header_comment:
            fh.write(f"# {header_comment}\n")
        fh.write("\n".join(truncation_csv_lines(trunc)))
        fh.write("\n")
