"""Primes, prime fields, Hadamard matrices and exact real-root isolation."""
from __future__ import annotations

import cmath
import math
import re
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import NoPrime, NoRealRoots, NotPrime, OrderUnavailable, TrivialCharacterRequested


# -- primes ---------------------------------------------------------------------

def is_prime(x: int) -> bool:
    if x < 2:
        return False
    if x < 4:
        return True
    if x % 2 == 0:
        return False
    f = 3
    while f * f <= x:
        if x % f == 0:
            return False
        f += 2
    return True


def largest_prime_leq(x) -> int:
    m = math.floor(x)
    if m < 2:
        raise NoPrime(f"no prime <= {x}")
    while not is_prime(m):
        m -= 1
    return m


def smallest_prime_geq(x) -> int:
    m = max(2, math.ceil(x))
    while not is_prime(m):
        m += 1
    return m


@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")

    def elements(self) -> range:
        return range(self.p)

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.p - 2, self.p)

    def is_square(self, a) -> bool:
        a %= self.p
        return a == 0 or pow(a, (self.p - 1) // 2, self.p) == 1


def additive_character(field: PrimeField | int, a: int):
    """The character ``x -> exp(2 pi i a x / p)``.

    ``a = 0`` yields the trivial character with a ``TrivialCharacterRequested``
    warning instead of an error.
    """
    p = field.p if isinstance(field, PrimeField) else PrimeField(field).p
    a %= p
    if a == 0:
        warnings.warn("trivial additive character requested", TrivialCharacterRequested, stacklevel=2)

    def psi(x):
        if isinstance(x, np.ndarray):
            return np.exp(2j * np.pi * ((a * x) % p) / p)
        return cmath.exp(2j * math.pi * ((a * x) % p) / p)

    return psi


# -- Hadamard matrices ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HadamardSource:
    order: int
    matrix: np.ndarray
    construction: str

    @property
    def normalized(self) -> bool:
        return bool(np.all(self.matrix[0] == 1) and np.all(self.matrix[:, 0] == 1))

    def minus(self) -> np.ndarray:
        """``H_-``: the matrix with its all-ones first row removed."""
        return self.matrix[1:]


def _sylvester(h: np.ndarray) -> np.ndarray:
    return np.block([[h, h], [h, -h]])


def _paley1(q: int) -> np.ndarray:
    # Jacobsthal matrix Q, then H = I + [[0, 1^T], [-1, Q]]
    chi = np.zeros(q, dtype=np.int64)
    for x in range(1, q):
        chi[(x * x) % q] = 1
    chi = np.where(chi == 1, 1, -1)
    chi[0] = 0
    jac = np.array([[chi[(j - i) % q] for j in range(q)] for i in range(q)], dtype=np.int64)
    s = np.zeros((q + 1, q + 1), dtype=np.int64)
    s[0, 1:] = 1
    s[1:, 0] = -1
    s[1:, 1:] = jac
    return np.eye(q + 1, dtype=np.int64) + s


@lru_cache(maxsize=None)
def _raw_hadamard(m: int):
    if m == 1:
        return np.ones((1, 1), dtype=np.int64), "trivial"
    if m == 2:
        return _sylvester(np.ones((1, 1), dtype=np.int64)), "sylvester"
    if m % 4:
        raise OrderUnavailable(f"no Hadamard matrix of order {m}")
    if m & (m - 1) == 0:
        return _sylvester(_raw_hadamard(m // 2)[0]), "sylvester"
    q = m - 1
    if is_prime(q) and q % 4 == 3:
        return _paley1(q), f"paley-I(q={q})"
    try:
        half, how = _raw_hadamard(m // 2)
    except OrderUnavailable:
        raise OrderUnavailable(f"order {m} is outside the built-in constructions") from None
    return _sylvester(half), ("sylvester" if how == "sylvester" else f"sylvester*{how}")


def normalize_hadamard(h: np.ndarray) -> np.ndarray:
    """Negate rows, then columns, so row 0 and column 0 are all ones; sort the rest."""
    h = h * h[:, :1]
    h = h * h[:1, :]
    rest = sorted((tuple(r) for r in h[1:]), reverse=True)
    return np.vstack([h[:1], np.array(rest, dtype=h.dtype).reshape(-1, h.shape[1])])


def hadamard(m: int) -> HadamardSource:
    raw, how = _raw_hadamard(int(m))
    h = normalize_hadamard(raw)
    if not np.array_equal(h @ h.T, m * np.eye(m, dtype=np.int64)):
        raise AssertionError(f"construction {how} failed for order {m}")
    h.setflags(write=False)
    return HadamardSource(int(m), h, how)


# -- integer polynomials and real roots -------------------------------------------

@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial, coefficients in ascending degree."""

    coeffs: tuple

    def __post_init__(self):
        c = [int(x) for x in self.coeffs]
        while len(c) > 1 and c[-1] == 0:
            c.pop()
        if not c or (len(c) == 1 and c[0] == 0):
            raise ValueError("zero polynomial")
        object.__setattr__(self, "coeffs", tuple(c))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    @classmethod
    def parse(cls, text: str) -> "IntPolynomial":
        """Parse strings like ``"17x^2-14x+1"`` or ``"x^3 - 9x^2 - x + 1"``."""
        s = text.replace(" ", "").replace("*", "").replace("**", "^")
        if not s:
            raise ValueError("empty polynomial")
        terms = re.findall(r"[+-]?[^+-]+", s)
        out: dict[int, int] = {}
        for t in terms:
            m = re.fullmatch(r"([+-]?)(\d*)(x(?:\^(\d+))?)?", t)
            if not m:
                raise ValueError(f"cannot parse term {t!r} in {text!r}")
            sign, num, xpart, exp = m.groups()
            if not num and not xpart:
                raise ValueError(f"cannot parse term {t!r} in {text!r}")
            c = int(num) if num else 1
            if sign == "-":
                c = -c
            e = (int(exp) if exp else 1) if xpart else 0
            out[e] = out.get(e, 0) + c
        deg = max(out)
        return cls(tuple(out.get(i, 0) for i in range(deg + 1)))

    def __str__(self):
        parts = []
        for e in range(self.degree, -1, -1):
            c = self.coeffs[e]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if e == 0:
                body = str(a)
            else:
                body = ("" if a == 1 else str(a)) + ("x" if e == 1 else f"x^{e}")
            parts.append((sign, body))
        s = "".join(f"{sg}{b}" for sg, b in parts)
        return s[1:] if s.startswith("+") else s


def _trim(p: list) -> list:
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _deriv(p: list) -> list:
    return _trim([i * p[i] for i in range(1, len(p))] or [Fraction(0)])


def _divmod(a: list, b: list):
    a = [Fraction(x) for x in a]
    b = [Fraction(x) for x in b]
    q = [Fraction(0)] * max(1, len(a) - len(b) + 1)
    while len(a) >= len(b) and any(a):
        shift = len(a) - len(b)
        f = a[-1] / b[-1]
        q[shift] = f
        for i, c in enumerate(b):
            a[i + shift] -= f * c
        a.pop()
        _trim(a)
        if len(a) == 1 and a[0] == 0:
            break
    return _trim(q), _trim(a or [Fraction(0)])


def _is_zero(p: list) -> bool:
    return len(p) == 1 and p[0] == 0


def _gcd(a: list, b: list) -> list:
    while not _is_zero(b):
        _, r = _divmod(a, b)
        a, b = b, r
    return [x / a[-1] for x in a]


def _eval(p: list, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _sturm_chain(p: list) -> list:
    chain = [p, _deriv(p)]
    while not _is_zero(chain[-1]) and len(chain[-1]) > 1:
        _, r = _divmod(chain[-2], chain[-1])
        if _is_zero(r):
            break
        chain.append([-x for x in r])
    return chain


def _sign_changes(chain: list, x: Fraction) -> int:
    signs = [s for s in ((_eval(p, x) > 0) - (_eval(p, x) < 0) for p in chain) if s]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def squarefree_part(poly: IntPolynomial) -> list:
    p = [Fraction(c) for c in poly.coeffs]
    g = _gcd(p, _deriv(p))
    q, _ = _divmod(p, g)
    return q


def isolate_real_roots(poly: IntPolynomial, width=Fraction(1, 2 ** 64)) -> list[tuple[Fraction, Fraction]]:
    """Disjoint rational intervals ``(a, b]``, one per distinct real root, ascending.

    Uses a Sturm chain of the square-free part; every interval is refined by
    exact bisection until narrower than ``width``.
    """
    if poly.degree < 1:
        raise NoRealRoots("constant polynomial")
    p = squarefree_part(poly)
    chain = _sturm_chain(p)
    # Cauchy bound on root modulus
    bound = 1 + max(abs(c / p[-1]) for c in p[:-1]) if len(p) > 1 else Fraction(1)
    lo, hi = -Fraction(bound) - 1, Fraction(bound) + 1
    found = []
    stack = [(lo, hi, _sign_changes(chain, lo), _sign_changes(chain, hi))]
    while stack:
        a, b, va, vb = stack.pop()
        count = va - vb
        if count == 0:
            continue
        if count == 1:
            found.append((a, b))
            continue
        mid = (a + b) / 2
        vm = _sign_changes(chain, mid)
        stack.append((a, mid, va, vm))
        stack.append((mid, b, vm, vb))
    out = []
    for a, b in sorted(found):
        fa = _eval(p, a)
        fb = _eval(p, b)
        if fb == 0:
            out.append((b, b))
            continue
        while b - a > width:
            mid = (a + b) / 2
            fm = _eval(p, mid)
            if fm == 0:
                a = b = mid
                break
            if (fm > 0) == (fb > 0):
                b, fb = mid, fm
            else:
                a, fa = mid, fm
        out.append((a, b))
    return out


def real_roots(poly: IntPolynomial | str) -> list[float]:
    """All distinct real roots in ascending order."""
    if isinstance(poly, str):
        poly = IntPolynomial.parse(poly)
    roots = [float((a + b) / 2) for a, b in isolate_real_roots(poly)]
    if not roots:
        raise NoRealRoots(f"{poly} has no real roots")
    return roots


def kth_smallest_root(poly: IntPolynomial | str, k: int) -> float:
    """``k``-th smallest real root, counting from 1."""
    roots = real_roots(poly)
    if not 1 <= k <= len(roots):
        raise NoRealRoots(f"only {len(roots)} real roots, asked for #{k}")
    return roots[k - 1]
