"""Local optimality certificates for packings via the tangent/normal split of the
Gram manifold."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from .errors import (
    BadTheta,
    BoundViolated,
    ConferenceCase,
    DimensionMismatch,
    NonIntegralEigenvalue,
    NotETF,
    NotSpanning,
    NotStronglyRegular,
    WrongRatio,
    ZeroY,
)
from .frames import (
    GramMatrix,
    Packing,
    build_packing,
    factor_gram,
    gram,
    is_etf,
    naimark_complement,
)
from .graph import Graph

SUBSPACE_RTOL = 1e-8


# -- symmetric-matrix coordinates ---------------------------------------------------------

def svec_index(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    iu = np.triu_indices(n)
    scale = np.where(iu[0] == iu[1], 1.0, math.sqrt(2.0))
    return iu[0], iu[1], scale


def svec(m: np.ndarray) -> np.ndarray:
    """Isometric coordinates: ``svec(A) . svec(B) == tr(AB)`` for symmetric A, B."""
    r, c, s = svec_index(m.shape[-1])
    return m[..., r, c] * s


def smat(v: np.ndarray, n: int) -> np.ndarray:
    r, c, s = svec_index(n)
    out = np.zeros(v.shape[:-1] + (n, n))
    out[..., r, c] = v / s
    out[..., c, r] = v / s
    return out


def _orthonormal_rows(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis of the row space of ``m`` and of its complement."""
    _, s, vt = np.linalg.svd(m, full_matrices=True)
    r = int(np.sum(s > SUBSPACE_RTOL * s[0])) if s.size and s[0] > 0 else 0
    return vt[:r], vt[r:]


# -- tangent model --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TangentModel:
    gram: np.ndarray
    factor: np.ndarray
    tangent: np.ndarray  # rows: svec of an orthonormal tangent basis
    normal: np.ndarray   # rows: svec of an orthonormal normal basis

    @property
    def n(self) -> int:
        return self.gram.shape[0]

    @property
    def dimension(self) -> int:
        return self.tangent.shape[0]

    @property
    def normal_dimension(self) -> int:
        return self.normal.shape[0]

    def tangent_matrices(self) -> np.ndarray:
        return smat(self.tangent, self.n)

    def normal_matrices(self) -> np.ndarray:
        return smat(self.normal, self.n)

    def tangent_residual(self, y: np.ndarray) -> float:
        """Norm of the tangent component of ``y`` (Frobenius)."""
        return float(np.linalg.norm(self.tangent @ svec(y)))


def tangent_generators(phi: np.ndarray) -> np.ndarray:
    """``svec(Phi^T E + E^T Phi)`` for ``E = w e_i^T`` with ``w`` orthogonal to ``phi_i``."""
    d, n = phi.shape
    gens = []
    for i in range(n):
        col = phi[:, i:i + 1]
        # orthonormal basis of the complement of phi_i
        q, _ = np.linalg.qr(np.hstack([col, np.eye(d)]))
        perp = q[:, 1:d]
        for w in perp.T:
            m = np.zeros((n, n))
            v = phi.T @ w
            m[:, i] += v
            m[i, :] += v
            gens.append(svec(m))
    return np.array(gens).reshape(-1, n * (n + 1) // 2)


def tangent_model(p: Packing) -> TangentModel:
    if p.is_complex:
        raise NotSpanning("tangent model is defined for real packings")
    phi = np.asarray(p.columns, dtype=float)
    s = np.linalg.svd(phi, compute_uv=False)
    if np.sum(s > SUBSPACE_RTOL * s[0]) < p.d:
        raise NotSpanning(f"packing spans fewer than {p.d} dimensions")
    tangent, normal = _orthonormal_rows(tangent_generators(phi))
    return TangentModel(gram(p).entries, phi, tangent, normal)


# -- certificate checking ---------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CertificateReport:
    y: np.ndarray
    support: tuple
    nonzero: bool
    normality_residual: float
    normal: bool
    sign_condition: bool
    support_condition: bool
    injectivity_rank: int
    tangent_dimension: int
    dual_value: float
    objective: float
    details: dict = field(default_factory=dict)
    searched: bool = False  # a failed search is reported as inconclusive

    @property
    def injective(self) -> bool:
        return self.injectivity_rank == self.tangent_dimension

    @property
    def verdict(self) -> str:
        if not (self.nonzero and self.normal and self.sign_condition and self.support_condition):
            return "inconclusive" if self.searched else "failed"
        return "certified" if self.injective else "inconclusive"

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"


def dual_value(p: Packing, y) -> float:
    """``tr((G - I) Y) / ||Y||_1`` with the entrywise 1-norm."""
    y = np.asarray(y, dtype=float)
    norm1 = float(np.abs(y).sum())
    if norm1 == 0:
        raise ZeroY("dual value is undefined for Y = 0")
    g = gram(p).entries
    return float(np.sum((g - np.eye(p.n)) * y) / norm1)


def check_certificate(p: Packing, y, tol: float = 1e-8, model: TangentModel | None = None) -> CertificateReport:
    """Verify a candidate dual certificate ``Y`` for the packing ``p``.

    Checks are made on ``Y / max|Y|`` so the tolerance is scale free.
    """
    y = np.asarray(y, dtype=float)
    n = p.n
    if y.shape != (n, n):
        raise DimensionMismatch(f"Y has shape {y.shape}, expected {(n, n)}")
    if not np.allclose(y, y.T, atol=1e-12):
        raise DimensionMismatch("Y must be symmetric")
    model = model or tangent_model(p)
    g = model.gram
    off = g - np.eye(n)
    objective = float(np.abs(off).max())
    scale = float(np.abs(y).max())
    nonzero = scale > tol
    yn = y / scale if nonzero else y

    resid = model.tangent_residual(yn)
    sign_ok = bool(np.all(off * yn >= -tol))
    inner = np.abs(off) < objective - tol
    support_ok = bool(np.all(np.abs(yn[inner]) < tol))
    on = np.abs(yn) >= tol
    r, c, _ = svec_index(n)
    cols = on[r, c]
    support = tuple(zip(r[cols].tolist(), c[cols].tolist()))
    restricted = model.tangent[:, cols] if model.dimension else np.zeros((0, 0))
    if restricted.size:
        s = np.linalg.svd(restricted, compute_uv=False)
        rank = int(np.sum(s > SUBSPACE_RTOL * max(s[0], 1.0)))
    else:
        rank = 0
    dv = dual_value(p, y) if nonzero else 0.0
    return CertificateReport(y, support, nonzero, resid, resid < tol, sign_ok, support_ok,
                             rank, model.dimension, dv, objective)


# -- strongly regular graphs --------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SrgData:
    adjacency: np.ndarray
    complement: np.ndarray
    params: tuple
    k: float
    alpha: float
    beta: float
    mult_alpha: int
    mult_beta: int
    j_hat: np.ndarray
    p: np.ndarray
    q: np.ndarray

    @property
    def v(self) -> int:
        return self.params[0]

    @property
    def conference(self) -> bool:
        return self.v == 2 * self.params[1] + 1


def srg_data(graph: Graph, tol: float = 1e-8) -> SrgData:
    params = graph.srg_parameters()
    if params is None:
        raise NotStronglyRegular("graph is not strongly regular")
    v, k, lam, mu = params
    a = graph.adjacency().astype(float)
    b = np.ones((v, v)) - np.eye(v) - a
    # restricted eigenvalues solve x^2 - (lam - mu) x - (k - mu) = 0
    disc = math.sqrt((lam - mu) ** 2 + 4 * (k - mu))
    alpha = ((lam - mu) + disc) / 2
    beta = -((lam - mu) - disc) / 2
    if v != 2 * k + 1:
        if abs(alpha - round(alpha)) > tol or abs(beta - round(beta)) > tol:
            raise NonIntegralEigenvalue(f"eigenvalues {alpha}, {-beta} are not integers")
        alpha, beta = float(round(alpha)), float(round(beta))
    w, vec = np.linalg.eigh(a)
    ones = np.ones((v, 1)) / math.sqrt(v)
    j_hat = ones @ ones.T
    sel_a = np.abs(w - alpha) < 1e-6
    sel_b = np.abs(w + beta) < 1e-6
    p = vec[:, sel_a] @ vec[:, sel_a].T
    q = vec[:, sel_b] @ vec[:, sel_b].T
    recon = k * j_hat + alpha * p - beta * q
    if np.abs(recon - a).max() > 1e-9:
        raise NotStronglyRegular("spectral decomposition does not reproduce A")
    return SrgData(a, b, params, float(k), alpha, beta, int(sel_a.sum()), int(sel_b.sum()), j_hat, p, q)


@dataclass(frozen=True, eq=False)
class SrgPacking:
    gram: GramMatrix
    packing: Packing
    certificate: np.ndarray
    mu: float
    d: int

    def __iter__(self):
        return iter((self.gram, self.packing, self.certificate))


def srg_packing(data: SrgData | Graph) -> SrgPacking:
    """Packing with Gram ``I + mu A - mu B``, ``mu = 1/(2 beta - 1)``, plus its certificate."""
    if isinstance(data, Graph):
        v, k = (data.srg_parameters() or (0, 0))[:2]
        if v and v == 2 * k + 1:
            raise ConferenceCase(f"v = {v} = 2k+1")
        data = srg_data(data)
    v, k = data.params[:2]
    if data.conference:
        raise ConferenceCase(f"v = {v} = 2k+1")
    if v >= 2 * (k + data.beta):
        raise BoundViolated(f"v = {v} >= 2(k + beta) = {2 * (k + data.beta)}")
    mu = 1 / (2 * data.beta - 1)
    g = np.eye(v) + mu * data.adjacency - mu * data.complement
    d = v - data.mult_beta
    pack = factor_gram(g, d)
    c = (1 + data.mult_alpha) / v
    y = data.j_hat + data.p - c * np.eye(v)
    return SrgPacking(GramMatrix(g), pack, y, mu, d)


# -- lifted ETFs --------------------------------------------------------------------------------

def lifted_etf(a: Packing, theta: float = math.pi / 8, tol: float = 1e-9) -> tuple[Packing, np.ndarray]:
    """``[[A cos t, -A sin t], [B sin t, B cos t]]`` for a ``d x 2d`` ETF ``A``; returns it with ``Y = G - I``."""
    if a.is_complex:
        raise NotETF("lifting needs a real ETF")
    if a.n != 2 * a.d:
        raise WrongRatio(f"need n = 2d, got d={a.d}, n={a.n}")
    ratio = (theta - math.pi / 8) / (math.pi / 4)
    if abs(ratio - round(ratio)) > 1e-12 * max(1.0, abs(ratio)):
        raise BadTheta("theta must be an odd multiple of pi/8")
    if not is_etf(a, tol):
        raise NotETF("input is not an equiangular tight frame")
    b = naimark_complement(a).columns
    ac = a.columns
    cs, sn = math.cos(theta), math.sin(theta)
    phi = np.block([[ac * cs, -ac * sn], [b * sn, b * cs]])
    pack = build_packing(phi, "real", {"family": "lifted-etf", "theta": theta})
    y = gram(pack).entries - np.eye(pack.n)
    return pack, y


def lifted_null_vectors(pack: Packing) -> tuple[np.ndarray, np.ndarray]:
    """``z_k = e_k (+) (-V^{-1} U e_k)`` as columns, and ``diag(-V^{-1} U)``."""
    m = pack.n // 2
    u, v = pack.columns[:, :m], pack.columns[:, m:]
    w = -np.linalg.solve(v, u)
    z = np.vstack([np.eye(m), w])
    return z, np.diag(w).copy()


# -- certificate search ----------------------------------------------------------------------------

def search_certificate(p: Packing, tol: float = 1e-8, contact_tol: float = 1e-9) -> CertificateReport:
    """Look for ``Y`` on the max-correlation pairs with signs of ``G``, then verify it.

    The candidate solves ``M y = 0`` (normality) with ``y >= 0``; first the
    projection of the all-ones vector, then a linear program maximizing the
    smallest weight.  A non-certified answer is only a non-answer.
    """
    model = tangent_model(p)
    g = model.gram
    n = p.n
    off = np.abs(g - np.eye(n))
    mu = off.max()
    iu = np.triu_indices(n, 1)
    mask = off[iu] >= mu - contact_tol * max(1.0, mu)
    rows, cols = iu[0][mask], iu[1][mask]
    signs = np.sign(g[rows, cols])
    r, c, s = svec_index(n)
    pos = {(i, j): k for k, (i, j) in enumerate(zip(r.tolist(), c.tolist()))}
    idx = np.array([pos[(i, j)] for i, j in zip(rows.tolist(), cols.tolist())], dtype=np.int64)
    # tangent inner product of sum_ij y_ij sign_ij (E_ij + E_ji)
    m = model.tangent[:, idx] * (signs * s[idx])[None, :] if idx.size else np.zeros((model.dimension, 0))

    def assemble(weights):
        y = np.zeros((n, n))
        y[rows, cols] = weights * signs
        return y + y.T

    y = np.zeros((n, n))
    how = "none"
    if idx.size:
        ones = np.ones(idx.size)
        if m.size:
            _, null = _orthonormal_rows(m)
            guess = null.T @ (null @ ones) if null.size else np.zeros(idx.size)
        else:
            guess = ones
        if guess.size and guess.min() > tol * max(1.0, np.abs(guess).max()):
            y = assemble(guess / guess.max())
            how = "projection"
        else:
            k = idx.size
            cost = np.zeros(k + 1)
            cost[-1] = -1.0
            a_eq = np.zeros((m.shape[0] + 1, k + 1))
            a_eq[:-1, :k] = m
            a_eq[-1, :k] = 1.0
            b_eq = np.zeros(m.shape[0] + 1)
            b_eq[-1] = 1.0
            a_ub = np.hstack([-np.eye(k), np.ones((k, 1))])
            res = linprog(cost, A_ub=a_ub, b_ub=np.zeros(k), A_eq=a_eq, b_eq=b_eq,
                          bounds=[(0, None)] * k + [(0, 1)], method="highs")
            if res.status == 0:
                w = res.x[:k]
                w[w < tol * w.max()] = 0.0
                y = assemble(w / w.max())
                how = "linprog"
    report = check_certificate(p, y, tol=max(tol, 1e-7), model=model)
    report.details["method"] = how
    return dataclasses.replace(report, searched=True)
