"""Polynomial-phase packings over prime fields, MUBs, and the Gerzon-range
approximation algorithm built from them."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .algebra import PrimeField, largest_prime_leq, smallest_prime_geq
from .errors import DegenerateK, DegreeTooLarge, OutOfGerzonRange, PrimeUnavailable, TooManyBases
from .frames import (
    Packing,
    build_packing,
    c_to_r,
    coherence,
    gerzon_range,
    naimark_complement,
    sampled_coherence,
    welch_bound,
)

APPROX_CONSTANT = 20 * math.sqrt(6)
FULL_SCAN_LIMIT = 10 ** 7  # n * d above this: structured bound plus sampling


def weil_coefficients(q: int, r: int, count: int | None = None) -> np.ndarray:
    """Coefficient rows ``(c_1, ..., c_r)`` of ``f = sum c_i x^i``.

    Ordered lexicographically with the top coefficient most significant, so
    the first ``q^(r-1)`` rows are exactly the degree ``<= r-1`` polynomials.
    """
    total = q ** r
    count = total if count is None else min(count, total)
    idx = np.arange(count, dtype=np.int64)
    coeffs = np.empty((count, r), dtype=np.int64)
    for i in range(r):  # c_{i+1} is digit i in base q (least significant first)
        coeffs[:, i] = (idx // q ** i) % q
    return coeffs


def weil_vectors(q: int, coeffs: np.ndarray) -> np.ndarray:
    """Columns ``psi(f(x)) / sqrt(q)`` for each coefficient row, ``x`` in ``F_q``."""
    x = np.arange(q, dtype=np.int64)
    powers = np.stack([(x ** (i + 1)) % q for i in range(coeffs.shape[1])])  # r x q
    vals = (coeffs @ powers) % q  # count x q
    return (np.exp(2j * np.pi * vals / q) / math.sqrt(q)).T


@dataclass(frozen=True, eq=False)
class WeilFamily:
    q: int
    r: int
    coefficients: np.ndarray
    packing: Packing

    @property
    def correlation_bound(self) -> float:
        return (self.r - 1) / math.sqrt(self.q)


def weil_packing(q: int, r: int, count: int | None = None) -> WeilFamily:
    """``q^r`` unit vectors in ``C^q`` from the polynomials with ``f(0)=0``, ``deg f <= r``."""
    PrimeField(q)
    if r < 1:
        raise ValueError("degree cap r must be >= 1")
    if r >= q:
        raise DegreeTooLarge(f"r={r} must be below the characteristic {q}")
    coeffs = weil_coefficients(q, r, count)
    pack = build_packing(weil_vectors(q, coeffs), "complex", {"family": "weil", "q": q, "r": r})
    return WeilFamily(q, r, coeffs, pack)


def weil_difference_sums(q: int, r: int) -> np.ndarray:
    """``|sum_x psi(h(x))| / q`` for every ``h`` with ``h(0)=0``, ``deg h <= r``.

    ``<phi_f, phi_g>`` only depends on ``g - f``, so the largest entry over
    nonzero ``h`` bounds every pairwise correlation of the family.  The inner
    sum over the linear coefficient is one length-q FFT.
    """
    x = np.arange(q, dtype=np.int64)
    heads = weil_coefficients(q, r - 1) if r > 1 else np.zeros((1, 0), dtype=np.int64)
    out = np.empty((heads.shape[0], q))
    block = max(1, 2 ** 22 // q)
    for s in range(0, heads.shape[0], block):
        h = heads[s:s + block]
        powers = np.stack([(x ** (i + 2)) % q for i in range(h.shape[1])]) if h.shape[1] else np.zeros((0, q), np.int64)
        vals = (h @ powers) % q
        base = np.exp(2j * np.pi * vals / q)
        # sum_x base[x] * exp(2 pi i c x / q) for all c  ==  q * ifft
        out[s:s + block] = np.abs(np.fft.ifft(base, axis=1))
    return out


def weil_structured_bound(q: int, r: int) -> float:
    """Largest correlation over all distinct pairs of the full ``S(r)`` family."""
    sums = weil_difference_sums(q, r)
    sums[0, 0] = 0.0  # h = 0 is the pair (f, f)
    return float(sums.max())


# -- mutually unbiased bases ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class MubFamily:
    p: int
    bases: tuple

    @property
    def k(self) -> int:
        return len(self.bases)

    @property
    def level(self) -> float:
        return 1 / math.sqrt(self.p)


def mub_family(p: int, k: int) -> MubFamily:
    """Identity basis followed by the first ``k-1`` quadratic-phase bases."""
    PrimeField(p)
    if k < 1:
        raise ValueError("need at least one basis")
    if k > p + 1:
        raise TooManyBases(f"at most {p + 1} MUBs in dimension {p}")
    bases = [np.eye(p, dtype=complex)]
    if k > 1:
        if p == 2:
            # r=2 needs r < char; in C^2 use the Fourier and the y-basis directly
            f2 = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
            y2 = np.array([[1, 1], [1j, -1j]], dtype=complex) / math.sqrt(2)
            bases += [f2, y2][: k - 1]
        else:
            cols = weil_packing(p, 2, count=(k - 1) * p).packing.columns
            bases += [np.array(cols[:, b * p:(b + 1) * p]) for b in range(k - 1)]
    for b in bases:
        b.setflags(write=False)
    return MubFamily(p, tuple(bases))


# -- Gerzon-range approximation ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class ApproxResult:
    packing: Packing
    case: str
    d: int
    n: int
    p: int
    k: int | None
    built_n: int
    case_bound: float
    guarantee: float
    coherence: float
    coherence_method: str
    details: dict = field(default_factory=dict)

    @property
    def guarantee_nontrivial(self) -> bool:
        return self.guarantee < 1

    @property
    def meets_case_bound(self) -> bool:
        return self.coherence <= self.case_bound + 1e-10

    @property
    def meets_guarantee(self) -> bool:
        return (not self.guarantee_nontrivial) or self.coherence <= self.guarantee + 1e-10


def approx_case(d: int, n: int) -> str:
    g = gerzon_range(d)
    if not g.contains(n):
        raise OutOfGerzonRange(f"n={n} outside [{g.lower:.4f}, {g.upper}] for d={d}")
    if n >= 1.25 * d:
        return "I"
    if n >= d + math.sqrt(2 * d + 1) + 1:
        return "II"
    return "III"


def _embed(cols: np.ndarray, d: int) -> np.ndarray:
    out = np.zeros((d, cols.shape[1]))
    out[: cols.shape[0]] = cols
    return out


def case_one_columns(d: int, n: int) -> tuple[np.ndarray, int]:
    p = largest_prime_leq(d / 2) if d >= 4 else 0
    if p < 5:
        raise PrimeUnavailable(f"case I needs a prime p >= 5 with 2p <= d (d={d})")
    if n > 2 * p ** 3:
        raise PrimeUnavailable(f"n={n} exceeds the 2p^3={2 * p ** 3} vectors available")
    coeffs = weil_coefficients(p, 3, count=math.ceil(n / 2))
    complex_pack = build_packing(weil_vectors(p, coeffs), "complex")
    real = c_to_r(complex_pack).columns[:, :n]
    return _embed(real, d), p


def case_two_block_matrix(p: int, k: int) -> np.ndarray:
    """The ``2p x kp`` matrix with ``(a, b)`` block ``omega^(ab) U_b / sqrt(2)``."""
    mubs = mub_family(p, k)
    omega = np.exp(2j * np.pi / k)
    top = np.hstack([u for u in mubs.bases])
    bottom = np.hstack([omega ** b * u for b, u in enumerate(mubs.bases)])
    return np.vstack([top, bottom]) / math.sqrt(2)


def case_two_columns(d: int, n: int) -> tuple[np.ndarray, int, int]:
    p = smallest_prime_geq((n - d) / 2)
    k = math.ceil(n / (2 * p))
    if k <= 2:
        raise DegenerateK(f"k={k} leaves no room for the Naimark complement")
    if k > p + 1:
        raise TooManyBases(f"k={k} exceeds p+1={p + 1}")
    a = build_packing(case_two_block_matrix(p, k), "complex")
    real = c_to_r(a)
    comp = naimark_complement(real)
    if comp.d > d:
        raise PrimeUnavailable(f"complement dimension {comp.d} exceeds d={d}")
    return _embed(comp.columns[:, :n], d), p, k


def approx_packing(d: int, n: int, *, full_scan_limit: int = FULL_SCAN_LIMIT,
                   sample_pairs: int = 10 ** 6, seed: int = 0) -> ApproxResult:
    """Real ``n``-packing in ``R^d`` within ``20 sqrt(6)`` of Welch (Gerzon range)."""
    case = approx_case(d, n)
    guarantee = APPROX_CONSTANT * welch_bound(d, n)
    details: dict = {}
    if case == "I":
        cols, p = case_one_columns(d, n)
        k = None
        built_n = n
        case_bound = 2 / math.sqrt(p)
    else:
        built_n = n if case == "II" else n + 1
        cols, p, k = case_two_columns(d, built_n)
        cols = cols[:, :n]
        case_bound = 2 / ((k - 2) * math.sqrt(p))
    pack = build_packing(cols, "real", {"family": "approx", "case": case, "p": p, "k": k})

    if n * d <= full_scan_limit:
        mu = coherence(pack)
        method = "full"
    else:
        sampled = sampled_coherence(pack, sample_pairs, seed=seed)
        details["sampled"] = sampled
        if case == "I":
            # correlations of c_to_r columns are bounded by complex moduli
            structural = weil_structured_bound(p, 3)
            details["structured"] = structural
            mu = max(structural, sampled)
            method = "structured+sampled"
        else:
            mu = sampled
            method = "sampled"
    return ApproxResult(pack, case, d, n, p, k, built_n, case_bound, guarantee, mu, method, details)
