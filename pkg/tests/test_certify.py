import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import null_space

from packlab import catalog
from packlab.certify import (
    check_certificate,
    dual_value,
    lifted_etf,
    lifted_null_vectors,
    search_certificate,
    smat,
    srg_data,
    srg_packing,
    svec,
    tangent_model,
)
from packlab.errors import (
    BadTheta,
    BoundViolated,
    ConferenceCase,
    DimensionMismatch,
    NotETF,
    NotSpanning,
    NotStronglyRegular,
    WrongRatio,
    ZeroY,
)
from packlab.frames import build_packing, classify_angles, etf_to_srg, gram, is_tight
from packlab.graph import Graph, paley_graph, petersen_graph, triangular_graph


@pytest.fixture(scope="module")
def t6():
    return srg_packing(triangular_graph(6))


@pytest.fixture(scope="module")
def lifted():
    return lifted_etf(catalog.build((3, 6)))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 7), st.integers(0, 2 ** 32 - 1))
def test_svec_is_an_isometry(n, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n))
    b = rng.standard_normal((n, n))
    a, b = a + a.T, b + b.T
    assert np.allclose(smat(svec(a), n), a)
    assert svec(a) @ svec(b) == pytest.approx(np.trace(a @ b))


def test_tangent_dimension_of_small_etf():
    model = tangent_model(catalog.build((3, 6)))
    assert model.dimension == 9
    assert model.dimension + model.normal_dimension == 21


@pytest.mark.parametrize("d,n", [(2, 4), (3, 5), (3, 8), (4, 7)])
def test_generic_tangent_dimension(d, n):
    rng = np.random.default_rng(d * 100 + n)
    m = rng.standard_normal((d, n))
    model = tangent_model(build_packing(m / np.linalg.norm(m, axis=0)))
    assert model.dimension == d * n - n - d * (d - 1) // 2
    assert model.dimension + model.normal_dimension == n * (n + 1) // 2


def test_tangent_basis_structure():
    p = catalog.build((4, 6))
    model = tangent_model(p)
    mats = model.tangent_matrices()
    assert np.abs(np.einsum("kii->ki", mats)).max() < 1e-9
    cross = model.tangent @ model.normal.T
    assert np.abs(cross).max() < 1e-9
    # tangent basis lies in the span of Phi^T E + E^T Phi, E = w e_i^T, w orthogonal to phi_i
    phi = p.columns
    gens = []
    for i in range(p.n):
        for w in null_space(phi[:, i:i + 1].T).T:
            m = np.zeros((p.n, p.n))
            m[:, i] += phi.T @ w
            m[i, :] += phi.T @ w
            gens.append(svec(m))
    gens = np.array(gens).T
    coef = np.linalg.lstsq(gens, model.tangent.T, rcond=None)[0]
    assert np.abs(gens @ coef - model.tangent.T).max() < 1e-9


def test_not_spanning():
    with pytest.raises(NotSpanning):
        tangent_model(build_packing(np.eye(4)[:, :3]))


def test_t6_instance(t6):
    assert t6.d == 6 and t6.mu == pytest.approx(1 / 3)
    rep = check_certificate(t6.packing, t6.certificate)
    assert rep.verdict == "certified"
    assert rep.dual_value == pytest.approx(1 / 3, abs=1e-9)
    g = t6.gram.entries
    off = ~np.eye(15, dtype=bool)
    assert np.all(np.sign(t6.certificate[off]) == np.sign(g[off]))


def test_srg_structural_identity():
    data = srg_data(triangular_graph(6))
    assert data.params == (15, 8, 4, 4)
    assert (data.alpha, data.beta, data.mult_beta) == (2.0, 2.0, 9)
    g = srg_packing(data).gram.entries
    v, k = data.params[:2]
    lhs = (2 * data.beta - 1) * g
    rhs = (2 * (k + data.beta) - v) * data.j_hat + 2 * (data.alpha + data.beta) * data.p
    assert np.abs(lhs - rhs).max() < 1e-9


def test_schlafli_from_etf():
    graph, params = etf_to_srg(catalog.build((7, 28)))
    assert params == (27, 16, 10, 8)
    sp = srg_packing(graph)
    assert sp.d == 7 and sp.mu == pytest.approx(1 / 3)
    assert check_certificate(sp.packing, sp.certificate).certified


def test_srg_errors():
    with pytest.raises(ConferenceCase):
        srg_packing(paley_graph(5))
    with pytest.raises(BoundViolated):
        srg_packing(petersen_graph())
    with pytest.raises(NotStronglyRegular):
        srg_data(Graph.from_edges(4, [(0, 1), (1, 2)]))
    # conference graphs may carry irrational eigenvalues
    assert srg_data(paley_graph(13)).conference


def test_lifted_instance(lifted):
    pack, y = lifted
    assert (pack.d, pack.n) == (6, 12)
    assert is_tight(pack, 1e-10)[0]
    cls = classify_angles(gram(pack))
    assert cls.tag == "orthobiangular"
    assert cls.values[-1] == pytest.approx(1 / math.sqrt(10))
    rep = check_certificate(pack, y)
    assert rep.certified
    obj = np.abs(gram(pack).entries - np.eye(12)).max()
    assert dual_value(pack, y) == pytest.approx(obj, abs=1e-12)


def test_lifted_gram_identities(lifted):
    pack, _ = lifted
    a = catalog.build((3, 6))
    ga = gram(a).entries
    g = gram(pack).entries
    m, theta = 6, math.pi / 8
    off = ~np.eye(m, dtype=bool)
    uu, uv = g[:m, :m], g[:m, m:]
    assert np.abs(uu[off] - ga[off] * math.cos(2 * theta)).max() < 1e-10
    assert np.abs(uv[off] + ga[off] * math.sin(2 * theta)).max() < 1e-10
    assert np.abs(np.diag(uv)).max() < 1e-10


def test_lifted_null_vectors(lifted):
    pack, _ = lifted
    z, diag = lifted_null_vectors(pack)
    assert np.abs(pack.columns @ z).max() < 1e-10
    assert np.allclose(np.abs(diag), 1.0)
    assert len(set(np.round(diag, 10))) == 1


def test_lifted_ten_twenty():
    pack, y = lifted_etf(catalog.build((5, 10)))
    assert (pack.d, pack.n) == (10, 20)
    assert np.abs(gram(pack).entries - np.eye(20)).max() == pytest.approx(1 / math.sqrt(18))
    assert check_certificate(pack, y).certified


def test_lifted_errors():
    etf = catalog.build((3, 6))
    with pytest.raises(BadTheta):
        lifted_etf(etf, math.pi / 4)
    assert lifted_etf(etf, 3 * math.pi / 8)[0].n == 12
    with pytest.raises(WrongRatio):
        lifted_etf(catalog.build((7, 28)))
    with pytest.raises(NotETF):
        lifted_etf(catalog.build((6, 12)))


def test_certificate_failures(t6):
    p, y = t6.packing, t6.certificate
    rep = check_certificate(p, np.zeros_like(y))
    assert not rep.nonzero and rep.verdict == "failed"
    flipped = y.copy()
    flipped[0, 1] = flipped[1, 0] = -flipped[0, 1]
    rep = check_certificate(p, flipped)
    assert not rep.sign_condition and not rep.certified
    with pytest.raises(DimensionMismatch):
        check_certificate(p, np.eye(3))
    with pytest.raises(DimensionMismatch):
        check_certificate(p, np.triu(np.ones((15, 15))))
    with pytest.raises(ZeroY):
        dual_value(p, np.zeros_like(y))


def test_support_condition(lifted):
    pack, y = lifted
    g = gram(pack).entries
    bad = y.copy()
    i, j = np.argwhere((np.abs(g) < 1e-9) & ~np.eye(12, dtype=bool))[0]
    bad[i, j] = bad[j, i] = 0.5
    assert not check_certificate(pack, bad).support_condition


def test_search_recovers_certificates(t6, lifted):
    rep = search_certificate(lifted[0])
    assert rep.certified
    g = gram(lifted[0]).entries - np.eye(12)
    ratio = rep.y[np.abs(g) > 1e-9] / g[np.abs(g) > 1e-9]
    assert np.allclose(ratio, ratio[0])
    assert search_certificate(t6.packing).certified


def test_search_on_perturbed_is_inconclusive(lifted):
    rng = np.random.default_rng(3)
    cols = lifted[0].columns + 1e-3 * rng.standard_normal((6, 12))
    p = build_packing(cols / np.linalg.norm(cols, axis=0))
    assert search_certificate(p).verdict == "inconclusive"


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_weak_duality(seed):
    rng = np.random.default_rng(seed)
    p = catalog.build(((4, 6), (5, 7), (6, 8), (3, 7))[seed % 4])
    model = tangent_model(p)
    obj = np.abs(model.gram - np.eye(p.n)).max()
    y = smat(rng.standard_normal(model.normal_dimension) @ model.normal, p.n)
    assert dual_value(p, y) <= obj + 1e-9
    assert model.tangent_residual(y) < 1e-9
