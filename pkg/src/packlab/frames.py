"""Packings, Gram matrices, classical bounds and frame operations.

A packing is stored as a ``d x n`` numpy array whose columns are unit
vectors.  Complex packings keep a complex dtype; everything that talks
about correlation uses moduli.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np

from .errors import (
    AlreadyReal,
    EmptyInput,
    NoComplement,
    NonUnitColumn,
    NotETF,
    NotPSD,
    NotStronglyRegular,
    NotTight,
    RankExceedsD,
    TooFewVectors,
)
from .graph import Graph

UNIT_TOL = 1e-9
RENORM_TOL = 1e-6
RANK_RTOL = 1e-8
ANGLE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Packing:
    columns: np.ndarray
    field: str = "real"
    meta: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        cols = np.array(self.columns, dtype=complex if self.field == "complex" else float)
        if self.field not in ("real", "complex"):
            raise ValueError(f"unknown field tag {self.field!r}")
        if cols.ndim != 2 or cols.size == 0:
            raise EmptyInput("packing needs a non-empty d x n matrix")
        norms = np.linalg.norm(cols, axis=0)
        bad = np.flatnonzero(np.abs(norms - 1) > UNIT_TOL)
        if bad.size:
            raise NonUnitColumn(f"column {bad[0]} has norm {norms[bad[0]]!r}")
        cols.setflags(write=False)
        object.__setattr__(self, "columns", cols)

    @property
    def d(self) -> int:
        return self.columns.shape[0]

    @property
    def n(self) -> int:
        return self.columns.shape[1]

    @property
    def is_complex(self) -> bool:
        return self.field == "complex"

    def __repr__(self):
        return f"Packing(d={self.d}, n={self.n}, field={self.field!r})"


def build_packing(matrix, field: str = "real", meta=None) -> Packing:
    """Validate a ``d x n`` matrix and wrap it as a Packing.

    Columns within ``1e-6`` of unit norm are renormalized; anything further
    off raises ``NonUnitColumn``.
    """
    if field == "real" and np.iscomplexobj(np.asarray(matrix)):
        raise ValueError("complex entries given with field='real'")
    dtype = complex if field == "complex" else float
    m = np.array(matrix, dtype=dtype)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise EmptyInput("matrix dimensions must be positive")
    norms = np.linalg.norm(m, axis=0)
    bad = np.flatnonzero(np.abs(norms - 1) > RENORM_TOL)
    if bad.size:
        raise NonUnitColumn(f"column {bad[0]} has norm {norms[bad[0]]!r}")
    return Packing(m / norms, field, dict(meta or {}))


def normalize_columns(matrix, field: str = "real", meta=None) -> Packing:
    """Scale every nonzero column to unit norm (for constructions)."""
    m = np.array(matrix, dtype=complex if field == "complex" else float)
    norms = np.linalg.norm(m, axis=0)
    if np.any(norms == 0):
        raise NonUnitColumn("zero column cannot be normalized")
    return Packing(m / norms, field, dict(meta or {}))


# -- correlations ------------------------------------------------------------

def _block_max_offdiag(cols: np.ndarray, block: int = 2048) -> float:
    n = cols.shape[1]
    best = 0.0
    ch = cols.conj().T
    for s in range(0, n, block):
        e = min(n, s + block)
        g = np.abs(ch[s:e] @ cols[:, s:])
        # drop the diagonal of the leading square
        idx = np.arange(e - s)
        g[idx, idx] = 0.0
        best = max(best, float(g.max(initial=0.0)))
    return best


def coherence(p: Packing) -> float:
    """Largest correlation ``|<phi_i, phi_j>|`` over distinct pairs."""
    if p.n < 2:
        raise TooFewVectors("coherence needs at least two vectors")
    return _block_max_offdiag(p.columns)


def sampled_coherence(p: Packing, pairs: int, seed: int = 0, chunk: int = 100_000) -> float:
    """Max correlation over ``pairs`` random distinct index pairs (a lower bound)."""
    rng = np.random.default_rng(seed)
    cols = p.columns
    best = 0.0
    left = pairs
    while left > 0:
        m = min(chunk, left)
        i = rng.integers(0, p.n, m)
        j = rng.integers(0, p.n - 1, m)
        j = j + (j >= i)
        vals = np.abs(np.einsum("ij,ij->j", cols[:, i].conj(), cols[:, j]))
        best = max(best, float(vals.max()))
        left -= m
    return best


# -- bounds -------------------------------------------------------------------

def welch_bound(d: int, n: int) -> float:
    """``sqrt((n-d)/(d(n-1)))``; returns 0.0 when ``n <= d`` (trivial bound)."""
    if d < 1 or n < 1:
        raise ValueError("d and n must be positive")
    if n <= d:
        return 0.0
    return math.sqrt((n - d) / (d * (n - 1)))


class GerzonRange(NamedTuple):
    lower: float
    upper: float
    contains: Callable[[int], bool]

    def integers(self) -> range:
        return range(math.ceil(self.lower - 1e-12), math.floor(self.upper) + 1)


def gerzon_range(d: int) -> GerzonRange:
    lower = d + math.sqrt(2 * d + 0.25) + 0.5
    upper = d * (d + 1) / 2
    return GerzonRange(lower, upper, lambda n: lower <= n <= upper)


def orthoplex_bound(d: int, n: int) -> tuple[float, bool]:
    """``(1/sqrt(d), applicable)``; it applies once ``n > d(d+1)/2``."""
    return 1 / math.sqrt(d), n > d * (d + 1) // 2


@dataclass(frozen=True)
class BoundReport:
    d: int
    n: int
    welch: float
    welch_trivial: bool
    gerzon_lower: float
    gerzon_upper: float
    in_gerzon: bool
    orthoplex: float
    orthoplex_applicable: bool

    @property
    def best_lower_bound(self) -> float:
        if self.orthoplex_applicable:
            return max(self.welch, self.orthoplex)
        return self.welch


def bound_report(d: int, n: int) -> BoundReport:
    g = gerzon_range(d) if d >= 2 else GerzonRange(math.nan, math.nan, lambda n: False)
    ortho, applies = orthoplex_bound(d, n)
    return BoundReport(d, n, welch_bound(d, n), n <= d, g.lower, g.upper,
                       bool(g.contains(n)), ortho, applies)


# -- Gram matrices ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GramMatrix:
    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("Gram matrix must be square")
        if not np.allclose(e, e.conj().T, atol=1e-12):
            raise ValueError("Gram matrix must be symmetric/Hermitian")
        if not np.allclose(np.diag(e), 1, atol=1e-12):
            raise ValueError("Gram matrix must have unit diagonal")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.entries)

    def offdiag_abs(self) -> np.ndarray:
        iu = np.triu_indices(self.n, 1)
        return np.abs(self.entries[iu])

    @property
    def coherence(self) -> float:
        return float(self.offdiag_abs().max(initial=0.0))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)

    def rank(self, rtol: float = RANK_RTOL) -> int:
        ev = np.abs(self.eigenvalues())
        return int(np.sum(ev > rtol * ev.max()))

    def is_psd(self, tol: float = 1e-9) -> bool:
        return bool(self.eigenvalues().min() >= -tol)

    def zero_counts(self, tol: float = 1e-9) -> np.ndarray:
        """Number of (off-diagonal) zeros in each column."""
        z = np.abs(self.entries) < tol
        np.fill_diagonal(z, False)
        return z.sum(axis=0)

    def modulus(self) -> np.ndarray:
        """Entrywise modulus, the matrix angle analysis actually looks at."""
        return np.abs(self.entries)


def gram(p: Packing) -> GramMatrix:
    g = p.columns.conj().T @ p.columns
    np.fill_diagonal(g, 1.0)
    if not p.is_complex:
        g = (g + g.T) / 2
    else:
        g = (g + g.conj().T) / 2
    return GramMatrix(g)


def _as_entries(g) -> np.ndarray:
    return g.entries if isinstance(g, GramMatrix) else np.asarray(g)


def factor_gram(g, d: int, tol: float = 1e-9) -> Packing:
    """Realize a PSD Gram matrix of rank <= d as a ``d x n`` packing."""
    e = _as_entries(g)
    w, v = np.linalg.eigh(e)
    if w.min() < -tol * max(1.0, abs(w.max())):
        raise NotPSD(f"minimum eigenvalue {w.min():.3e}")
    nonzero = int(np.sum(w > RANK_RTOL * w.max()))
    if nonzero > d:
        raise RankExceedsD(f"numerical rank {nonzero} exceeds d={d}")
    order = np.argsort(w)[::-1][:d]
    lam = np.clip(w[order], 0, None)
    cols = (v[:, order] * np.sqrt(lam)).conj().T
    field = "complex" if np.iscomplexobj(e) else "real"
    return build_packing(cols, field)


def is_tight(p: Packing, tol: float = 1e-9) -> tuple[bool, float]:
    """``(PhiPhi^* == (n/d) I within tol, n/d)``."""
    c = p.n / p.d
    frame_op = p.columns @ p.columns.conj().T
    ok = bool(np.max(np.abs(frame_op - c * np.eye(p.d)), initial=0.0) <= tol)
    return ok, c


def _sign_fix(v: np.ndarray) -> np.ndarray:
    """Flip each column so its first non-negligible entry is positive."""
    out = v.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size:
            lead = col[nz[0]]
            out[:, j] = col * (abs(lead) / lead).conjugate()
    return out


def naimark_complement(p: Packing, tol: float = 1e-9) -> Packing:
    """Unit-norm tight ``(n-d) x n`` frame whose rows complete those of ``p``."""
    n, d = p.n, p.d
    if n == d:
        raise NoComplement("n == d leaves nothing to complete")
    if n < d:
        raise NotTight("a tight unit-norm frame needs n >= d")
    tight, _ = is_tight(p, tol=max(tol, 1e-9) * max(1.0, n / d))
    if not tight:
        raise NotTight("Naimark complement needs a tight frame")
    # Projection onto the orthogonal complement of the (scaled) row space.
    proj = np.eye(n) - (d / n) * (p.columns.conj().T @ p.columns)
    proj = (proj + proj.conj().T) / 2
    w, v = np.linalg.eigh(proj)
    order = np.argsort(-w, kind="stable")[: n - d]
    basis = _sign_fix(v[:, order])
    rows = basis.conj().T * math.sqrt(n / (n - d))
    return build_packing(rows, p.field)


def c_to_r(p: Packing) -> Packing:
    """Replace each entry ``a+ib`` by the block ``[[a, -b], [b, a]]``."""
    if not p.is_complex:
        raise AlreadyReal("c_to_r expects a complex packing")
    z = p.columns
    d, n = z.shape
    out = np.empty((2 * d, 2 * n))
    out[0::2, 0::2] = z.real
    out[0::2, 1::2] = -z.imag
    out[1::2, 0::2] = z.imag
    out[1::2, 1::2] = z.real
    return build_packing(out, "real")


# -- angles -------------------------------------------------------------------

@dataclass(frozen=True)
class AngleClass:
    tag: str
    levels: tuple  # ((value, multiplicity), ...) ascending

    @property
    def count(self) -> int:
        return len(self.levels)

    @property
    def values(self) -> tuple:
        return tuple(v for v, _ in self.levels)


def cluster_values(vals, tol: float = ANGLE_TOL) -> list[tuple[float, int]]:
    s = np.sort(np.asarray(vals, dtype=float))
    if s.size == 0:
        return []
    cuts = np.flatnonzero(np.diff(s) > tol) + 1
    return [(float(chunk.mean()), int(chunk.size)) for chunk in np.split(s, cuts)]


def classify_angles(g, tol: float = ANGLE_TOL) -> AngleClass:
    e = _as_entries(g)
    iu = np.triu_indices(e.shape[0], 1)
    levels = cluster_values(np.abs(e[iu]), tol)
    if len(levels) == 1:
        tag = "equiangular"
    elif len(levels) == 2:
        tag = "orthobiangular" if abs(levels[0][0]) <= tol else "biangular"
    else:
        tag = "multi-angle"
    levels = [(0.0 if abs(v) <= tol else v, m) for v, m in levels]
    return AngleClass(tag, tuple(levels))


def is_etf(p: Packing, tol: float = 1e-9) -> bool:
    if p.n <= p.d:
        return False
    mu = coherence(p)
    return abs(mu - welch_bound(p.d, p.n)) <= tol


def etf_to_srg(p: Packing, tol: float = 1e-8) -> tuple[Graph, tuple]:
    """Graph of positive pairs after switching every vector against the last.

    Returns ``(graph, (v, k, lambda, mu))``; the parameters come from
    common-neighbour counts on the computed sign pattern.
    """
    if p.is_complex or p.n < 3:
        raise NotETF("needs a real packing with at least 3 vectors")
    g = gram(p).entries
    cls = classify_angles(g, tol)
    tight, _ = is_tight(p, tol)
    if cls.tag != "equiangular" or not tight or cls.values[0] <= tol:
        raise NotETF("packing is not an equiangular tight frame")
    s = np.sign(g[:, -1])
    s[-1] = 1.0
    sw = (s[:, None] * g * s[None, :])[:-1, :-1]
    m = p.n - 1
    edges = [(i, j) for i in range(m) for j in range(i + 1, m) if sw[i, j] > 0]
    graph = Graph.from_edges(m, edges)
    params = graph.srg_parameters()
    if params is None:
        raise NotStronglyRegular("switched sign pattern fails the SRG axioms")
    return graph, params


# -- minimal polynomials ----------------------------------------------------------

def poly_scale(value: float, coefficients) -> float:
    """Sum of ``|c_i| |value|^i`` (coefficients ascending); the natural size of p(value)."""
    return float(sum(abs(c) * abs(value) ** i for i, c in enumerate(coefficients)))


def minimal_poly_check(value: float, coefficients, tol: float = 1e-9) -> bool:
    """True iff ``|p(value)| <= tol * scale``; coefficients in ascending degree."""
    coeffs = list(coefficients)
    if not coeffs:
        raise ValueError("empty coefficient list")
    resid = abs(sum(c * value ** i for i, c in enumerate(coeffs)))
    return resid <= tol * max(1.0, poly_scale(value, coeffs))


def poly_residual(value: float, coefficients) -> float:
    coeffs = list(coefficients)
    resid = abs(sum(c * value ** i for i, c in enumerate(coeffs)))
    return resid / max(1.0, poly_scale(value, coeffs))


# -- helpers for explicit constructions ----------------------------------------------

def antipodal_representatives(vectors, tol: float = 1e-9) -> np.ndarray:
    """One column per line: keep the sign whose first nonzero entry is positive.

    Columns are taken in input order; later duplicates (same line) are dropped.
    """
    v = np.asarray(vectors, dtype=float)
    kept = []
    seen = []
    for j in range(v.shape[1]):
        col = v[:, j]
        nz = np.flatnonzero(np.abs(col) > tol)
        if not nz.size:
            continue
        if col[nz[0]] < 0:
            col = -col
        key = tuple(np.round(col / np.linalg.norm(col), 9))
        if key in seen:
            continue
        seen.append(key)
        kept.append(col)
    return np.array(kept).T


def restrict_to_span(vectors, d: int | None = None) -> np.ndarray:
    """Coordinates of the columns in an orthonormal basis of their span."""
    v = np.asarray(vectors, dtype=float)
    u, s, _ = np.linalg.svd(v, full_matrices=False)
    r = int(np.sum(s > RANK_RTOL * s[0]))
    if d is not None and r != d:
        raise RankExceedsD(f"span has dimension {r}, expected {d}")
    basis = _sign_fix(u[:, :r])
    return basis.T @ v


def exact_rank(matrix) -> int:
    """Rank over Q of a matrix of Fractions/ints (Gaussian elimination)."""
    rows = [[Fraction(x) for x in r] for r in matrix]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c] / rows[rank][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank
