"""Incidence structures, super embeddings and the star-product packings built on them."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .algebra import PrimeField, hadamard
from .errors import (
    BadIntersections,
    BadUniformity,
    BadVectorNorms,
    HalfCase,
    InvalidZ,
    PacklabError,
    UnsupportedQ,
)
from .frames import Packing, build_packing, coherence, gram, is_tight, restrict_to_span, welch_bound


@dataclass(frozen=True)
class IncidenceStructure:
    """Points ``0..num_points-1`` and lines given as sorted point tuples."""

    num_points: int
    lines: tuple

    def __post_init__(self):
        clean = []
        for line in self.lines:
            pts = tuple(sorted(int(p) for p in line))
            if len(set(pts)) != len(pts):
                raise PacklabError(f"line {line} repeats a point")
            if pts and not (0 <= pts[0] and pts[-1] < self.num_points):
                raise PacklabError(f"line {line} leaves the point set")
            clean.append(pts)
        object.__setattr__(self, "lines", tuple(clean))

    @property
    def num_lines(self) -> int:
        return len(self.lines)

    @property
    def uniformity(self) -> int | None:
        sizes = {len(line) for line in self.lines}
        return sizes.pop() if len(sizes) == 1 else None

    def intersection_numbers(self) -> frozenset:
        sets = [set(line) for line in self.lines]
        return frozenset(len(a & b) for a, b in combinations(sets, 2))

    def incidence_matrix(self) -> np.ndarray:
        """``points x lines`` 0/1 matrix."""
        m = np.zeros((self.num_points, self.num_lines), dtype=np.int64)
        for j, line in enumerate(self.lines):
            m[list(line), j] = 1
        return m

    def to_text(self) -> str:
        rows = [f"{self.num_points} {self.num_lines}"]
        rows += [" ".join(str(p + 1) for p in line) for line in self.lines]
        return "\n".join(rows) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "IncidenceStructure":
        rows = [r.split() for r in text.splitlines() if r.strip() and not r.lstrip().startswith("#")]
        if not rows:
            raise PacklabError("empty incidence file")
        npts, nlines = int(rows[0][0]), int(rows[0][1])
        lines = [tuple(int(x) - 1 for x in r) for r in rows[1:]]
        if len(lines) != nlines:
            raise PacklabError(f"header promises {nlines} lines, found {len(lines)}")
        return cls(npts, tuple(lines))


def affine_plane(q: int) -> IncidenceStructure:
    """``AG(2, q)``: point ``(x, y)`` is index ``x*q + y``.

    Lines ``y = a x + b`` come first (``a`` major), then the verticals ``x = c``.
    """
    PrimeField(q)
    lines = [tuple(x * q + (a * x + b) % q for x in range(q)) for a in range(q) for b in range(q)]
    lines += [tuple(c * q + y for y in range(q)) for c in range(q)]
    return IncidenceStructure(q * q, tuple(lines))


def projective_plane(q: int) -> IncidenceStructure:
    """Projective closure of ``affine_plane(q)``.

    Point ``q^2 + a`` is the direction of slope ``a``; ``q^2 + q`` is the
    vertical direction; the last line is the line at infinity.
    """
    aff = affine_plane(q)
    lines = []
    for idx, line in enumerate(aff.lines):
        direction = idx // q if idx < q * q else q
        lines.append(line + (q * q + direction,))
    lines.append(tuple(range(q * q, q * q + q + 1)))
    return IncidenceStructure(q * q + q + 1, tuple(lines))


def dual(c: IncidenceStructure) -> IncidenceStructure:
    """Swap points and lines; the new line ``p`` lists the old lines through ``p``."""
    through = [[] for _ in range(c.num_points)]
    for j, line in enumerate(c.lines):
        for p in line:
            through[p].append(j)
    return IncidenceStructure(c.num_lines, tuple(tuple(t) for t in through))


def complete_graph_structure(m: int) -> IncidenceStructure:
    """Vertices of ``K_m`` as points, its edges as 2-point lines."""
    return IncidenceStructure(m, tuple(combinations(range(m), 2)))


@dataclass(frozen=True)
class SuperEmbedding:
    """Slot ``i`` of ``R^k`` goes to point ``slots[i][0]`` with sign ``slots[i][1]``."""

    line: tuple
    slots: tuple

    def __post_init__(self):
        pts = [p for p, _ in self.slots]
        if len(set(pts)) != len(pts):
            raise PacklabError("super embedding assigns a point twice")
        if set(pts) != set(self.line):
            raise PacklabError("super embedding must cover exactly the points of its line")
        if any(s not in (1, -1) for _, s in self.slots):
            raise PacklabError("super embedding signs must be +1 or -1")

    def matrix(self, num_points: int) -> np.ndarray:
        e = np.zeros((num_points, len(self.slots)))
        for i, (p, s) in enumerate(self.slots):
            e[p, i] = s
        return e


def default_embedding(line) -> SuperEmbedding:
    """Ascending point order, all signs ``+1``."""
    return SuperEmbedding(tuple(line), tuple((p, 1) for p in sorted(line)))


def star_matrix(c: IncidenceStructure, vectors, embeddings=None) -> np.ndarray:
    """Unnormalized columns ``E_l v_j``; lines are the outer loop, vectors the inner."""
    v = np.asarray(vectors, dtype=float)
    k = c.uniformity
    if k is None or k != v.shape[0]:
        raise BadUniformity(f"structure must be {v.shape[0]}-uniform")
    if not c.intersection_numbers() <= {0, 1}:
        raise BadIntersections("intersection numbers must lie in {0, 1}")
    sq = np.sum(v * v, axis=0)
    if np.any(np.abs(sq - k) > 1e-12) or np.any(np.abs(np.abs(v).max(axis=0) - 1) > 1e-12):
        raise BadVectorNorms("each vector needs squared norm k and sup norm 1")
    embeds = list(embeddings) if embeddings is not None else [default_embedding(l) for l in c.lines]
    if len(embeds) != c.num_lines:
        raise PacklabError("one embedding per line is required")
    blocks = [e.matrix(c.num_points) @ v for e in embeds]
    return np.hstack(blocks)


def star_product(c: IncidenceStructure, vectors, embeddings=None) -> Packing:
    """Star product, scaled to unit columns by ``1/sqrt(k)``."""
    m = star_matrix(c, vectors, embeddings)
    k = c.uniformity
    return build_packing(m / math.sqrt(k), "real", {"family": "star"})


# -- the four orthobiangular families ----------------------------------------------------------

THM52_CASES = ("PH", "PHminusT", "AHminus", "AstarH")
_ALIASES = {"P": "PH", "PT": "PHminusT", "A": "AHminus", "Astar": "AstarH", "A*": "AstarH"}
SUPPORTED_Q = (3, 7, 11)


def case_name(case: str) -> str:
    name = _ALIASES.get(case, case)
    if name not in THM52_CASES:
        raise PacklabError(f"unknown family {case!r}; choose from {THM52_CASES}")
    return name


def family_parameters(case: str, q: int) -> tuple[int, int, int]:
    """``(d, n, z)`` of the family: dimension, size and zeros per Gram column."""
    case = case_name(case)
    if case == "PH":
        d = q * q + q + 1
        return d, (q + 1) * d, q
    if case == "PHminusT":
        return q * (q + 1), q * (q * q + q + 1), q - 1
    if case == "AHminus":
        return q * q, q * (q + 1) ** 2, q * q - 1
    return q * (q + 1), q * q * (q + 1), q


@dataclass(frozen=True, eq=False)
class FamilyReport:
    case: str
    q: int
    packing: Packing
    unnormalized: np.ndarray
    d: int
    n: int
    tight: bool
    zero_counts: tuple
    coherence: float
    welch_ratio: float

    @property
    def zero_count(self) -> int | None:
        s = set(self.zero_counts)
        return s.pop() if len(s) == 1 else None


def thm52(case: str, q: int) -> FamilyReport:
    """Orthobiangular tight frame from a plane and a Hadamard matrix of order ``q+1``."""
    case = case_name(case)
    if q not in SUPPORTED_Q:
        raise UnsupportedQ(f"q={q} unsupported; choose from {SUPPORTED_Q}")
    h = np.asarray(hadamard(q + 1).matrix, dtype=float)
    h_minus = h[1:]
    if case == "PH":
        c, v = projective_plane(q), h
    elif case == "PHminusT":
        c, v = projective_plane(q), h_minus.T
    elif case == "AHminus":
        c, v = affine_plane(q), h_minus
    else:
        c, v = dual(affine_plane(q)), h
    raw = star_matrix(c, v)
    k = c.uniformity
    d, n, _ = family_parameters(case, q)
    cols = raw / math.sqrt(k)
    if cols.shape[0] != d:
        # PHminusT: every E_l keeps the all-ones vector, so columns sit in 1-perp
        cols = restrict_to_span(cols, d)
    pack = build_packing(cols, "real", {"family": "thm52", "case": case, "q": q})
    g = gram(pack)
    tight, _ = is_tight(pack, 1e-8)
    mu = coherence(pack)
    return FamilyReport(case, q, pack, raw, pack.d, pack.n, tight,
                        tuple(int(z) for z in g.zero_counts(1e-9)), mu, mu / welch_bound(pack.d, pack.n))


def frobenius_identity(report: FamilyReport) -> tuple[float, float]:
    """``(||Phi^T Phi||_F^2, k^2 n^2 / d)`` on the unnormalized columns."""
    raw = report.unnormalized
    k = float(np.sum(raw[:, 0] ** 2))
    g = raw.T @ raw
    return float(np.sum(g * g)), k * k * report.n ** 2 / report.d


def mu_from_z(d: int, n: int, z: int) -> float:
    """Coherence of an orthobiangular tight frame with ``z`` zeros per Gram column."""
    if n <= d:
        raise InvalidZ("needs n > d")
    if not 0 <= z <= n - 2:
        raise InvalidZ(f"z={z} outside [0, n-2]")
    return math.sqrt((n - d) / (d * (n - z - 1)))


def _is_square(x: Fraction) -> bool:
    if x < 0 or x.denominator != 1:
        return False
    r = math.isqrt(x.numerator)
    return r * r == x.numerator


def obtf_integrality(d: int, n: int, z: int) -> tuple[Fraction, Fraction, bool]:
    """Both radicands that must be perfect squares, and whether they are."""
    if n == 2 * d:
        raise HalfCase("integrality test does not apply when n = 2d")
    if n <= d or not 0 <= z <= n - 2:
        raise InvalidZ(f"invalid (d, n, z) = {(d, n, z)}")
    r1 = Fraction(d * (n - z - 1), n - d)
    r2 = Fraction((n - d) * (n - z - 1), d)
    return r1, r2, _is_square(r1) and _is_square(r2)


@dataclass(frozen=True)
class MinimalityScan:
    case: str
    q: int
    d: int
    n: int
    z: int
    attained: bool
    violations: tuple  # z' values below z that fail integrality

    @property
    def verdict(self) -> bool:
        return self.attained and self.violations == tuple(range(self.z))


def minimality_scan(case: str, q: int) -> MinimalityScan:
    """Confirm every ``z' < z`` breaks integrality, so no smaller coherence is possible."""
    case = case_name(case)
    d, n, z = family_parameters(case, q)
    bad = tuple(zp for zp in range(z) if not obtf_integrality(d, n, zp)[2])
    return MinimalityScan(case, q, d, n, z, obtf_integrality(d, n, z)[2], bad)
