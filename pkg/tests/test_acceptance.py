"""The ten acceptance criteria, each at its stated tolerance.

Every test prints one ``criterion N: PASS|FAIL`` line; the lines are also
collected into the terminal summary.  Run directly with
``python tests/test_acceptance.py`` to see only this suite.
"""
import math
import re
import sys
import time
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
import sympy

import oracles
from conftest import record
from packlab import catalog
from packlab.certify import (
    check_certificate,
    dual_value,
    lifted_etf,
    search_certificate,
    smat,
    srg_packing,
    tangent_model,
)
from packlab.frames import (
    build_packing,
    c_to_r,
    classify_angles,
    coherence,
    exact_rank,
    factor_gram,
    gerzon_range,
    gram,
    is_etf,
    is_tight,
    naimark_complement,
    poly_residual,
    welch_bound,
)
from packlab.graph import Graph, triangular_graph
from packlab.incidence import (
    family_parameters,
    frobenius_identity,
    minimality_scan,
    mu_from_z,
    thm52,
)
from packlab.secure import (
    cad_query,
    eq24_form,
    eq24_gram,
    form2_sign_classes,
    minimal_d_secure_graphs,
    seidel_switching_classes,
)
from packlab.weil import APPROX_CONSTANT, approx_packing, weil_packing


def _finish(criterion, ok, detail, elapsed=None, limit=None):
    if limit is not None:
        detail += f" [{elapsed:.1f}s / {limit}s]"
        ok = ok and elapsed < limit
    record(criterion, ok, detail)
    assert ok, detail


def test_criterion_01_table_regression(monkeypatch):
    monkeypatch.delenv(catalog.DATA_ENV, raising=False)
    t0 = time.perf_counter()
    report = catalog.table1_report()
    elapsed = time.perf_counter() - t0
    failures = [r.key for r in report.failures]
    residual_ok = all(r.residual < 1e-9 for r in report.checked)
    n = len(report.checked)
    ok = not failures and residual_ok and n >= 24
    _finish(1, ok, f"{n} rows checked without external data, failures={failures}", elapsed, 60)


def test_criterion_02_equiangular_six_in_four():
    g = eq24_gram()
    third = Fraction(1, 3)
    m = sympy.Matrix(g)
    psd = m.is_positive_semidefinite
    rank_exact = exact_rank(g)
    rank_sympy = m.rank()
    equi = all(abs(g[i][j]) == third for i in range(6) for j in range(6) if i != j)
    form, values = eq24_form()
    system = cad_query(form)
    eqs, ineqs = system.evaluate(values)
    sat = all(v == 0 for v in eqs) and all(v >= 0 for v in ineqs)
    ok = bool(psd) and rank_exact == rank_sympy == 4 and equi and values["mu"] == third and sat
    _finish(2, ok, f"PSD={psd} rank={rank_exact} mu={values['mu']} "
                   f"{len(eqs)} equalities + {len(ineqs)} inequalities satisfied={sat}")


def _sympy_root(expr: str, k: int) -> float:
    x = sympy.Symbol("x")
    text = re.sub(r"(\d)x", r"\1*x", expr).replace("^", "**")
    roots = sorted(float(r) for r in sympy.Poly(sympy.sympify(text), x).real_roots())
    return roots[k - 1]


def test_criterion_03_perfected_grams():
    vals = catalog.conjectured_values()
    g5, g6 = catalog.conjectured_gram(5), catalog.conjectured_gram(6)
    a, b, c = vals["a"], vals["b"], vals["c"]
    r_a = poly_residual(g5.coherence, catalog.POLY_A.coeffs)
    r_b = poly_residual(g6.coherence, catalog.POLY_B.coeffs)
    levels = classify_angles(g6.entries).values
    c_found = min(levels)
    r_c = poly_residual(c_found, catalog.POLY_C.coeffs)
    oracle_ok = (abs(a - _sympy_root("x^3-9x^2-x+1", 2)) < 1e-12
                 and abs(b - _sympy_root(str(catalog.POLY_B), 2)) < 1e-12
                 and abs(c - _sympy_root(str(catalog.POLY_C), 4)) < 1e-12)
    psd = g5.is_psd(1e-12) and g6.is_psd(1e-12)
    ranks = (g5.rank(), g6.rank())
    ok = (psd and ranks == (5, 6) and abs(g5.coherence - a) < 1e-12 and abs(g6.coherence - b) < 1e-12
          and 0 < c_found < b and max(r_a, r_b, r_c) < 1e-12 and oracle_ok)
    _finish(3, ok, f"ranks={ranks} a={a:.12f} b={b:.12f} c={c_found:.12f} "
                   f"residuals=({r_a:.1e},{r_b:.1e},{r_c:.1e})")


def _direct_weil_columns(q, coeffs):
    x = np.arange(q)
    cols = []
    for row in coeffs:
        f = sum(int(c) * x ** (i + 1) for i, c in enumerate(row)) % q
        cols.append(np.exp(2j * np.pi * f / q) / math.sqrt(q))
    return np.array(cols).T


def test_criterion_04_weil_families():
    t0 = time.perf_counter()
    lines, ok = [], True
    for q in (5, 7, 11, 13):
        for r in (1, 2, 3):
            fam = weil_packing(q, r)
            cols = fam.packing.columns
            same = np.abs(cols - _direct_weil_columns(q, fam.coefficients)).max() < 1e-12
            g = np.abs(cols.conj().T @ cols)
            np.fill_diagonal(g, 0.0)
            if r == 1:
                good = g.max() < 1e-10
            elif r == 2:
                basis = fam.coefficients[:, 1]
                across = basis[:, None] != basis[None, :]
                good = (np.abs(g[across] - 1 / math.sqrt(q)).max() < 1e-10
                        and g[~across].max() < 1e-10)
            else:
                good = g.max() <= 2 / math.sqrt(q) + 1e-10
            ok &= bool(good and same and cols.shape[1] == q ** r)
            lines.append(f"{q}^{r}:{'ok' if good else 'bad'}")
    _finish(4, ok, " ".join(lines), time.perf_counter() - t0, 120)


def _criterion5_samples(count=50, seed=2024):
    """Stratified (d, n): a third each near the bottom, middle and top of the range."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        d = int(rng.integers(217, 401))
        g = gerzon_range(d)
        lo = math.ceil(g.lower)
        edge = math.ceil(1.25 * d)
        stratum = k % 3
        if stratum == 0:
            n = int(rng.integers(lo, edge))
        elif stratum == 1:
            n = int(round(math.exp(rng.uniform(math.log(edge), math.log(20 * d)))))
        else:
            n = int(rng.integers(20 * d, int(g.upper) + 1))
        out.append((d, n))
    return out


@pytest.mark.slow
def test_criterion_05_gerzon_approximation():
    t0 = time.perf_counter()
    cases, bad = {}, []
    nontrivial = 0
    for d, n in _criterion5_samples():
        res = approx_packing(d, n)
        cases[res.case] = cases.get(res.case, 0) + 1
        guarantee = APPROX_CONSTANT * welch_bound(d, n)
        if guarantee < 1:
            nontrivial += 1
            if res.coherence > guarantee + 1e-10:
                bad.append((d, n, "guarantee"))
        if res.coherence > res.case_bound + 1e-10:
            bad.append((d, n, "case bound"))
        if res.packing.d != d or res.packing.n != n:
            bad.append((d, n, "shape"))
    elapsed = time.perf_counter() - t0
    _finish(5, not bad, f"50 samples, cases={dict(sorted(cases.items()))}, "
                        f"nontrivial guarantees={nontrivial}, violations={bad}", elapsed, 600)


def _nx(g: Graph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


@pytest.mark.slow
def test_criterion_06_minimal_secure_graphs():
    t0 = time.perf_counter()
    ok, parts = True, []
    for d in (2, 3, 4, 5):
        n = d + 2
        codes = oracles.minimal_secure_codes(n, d)
        classes: list[nx.Graph] = []
        for code in codes:
            h = nx.Graph()
            h.add_nodes_from(range(n))
            h.add_edges_from(oracles.code_to_edges(code, n))
            if not any(nx.is_isomorphic(h, c) for c in classes):
                classes.append(h)
        closed = [_nx(g) for g in minimal_d_secure_graphs(d)]
        match = (len(classes) == 2
                 and all(any(nx.is_isomorphic(c, k) for k in classes) for c in closed)
                 and not nx.is_isomorphic(*closed))
        ok &= match
        parts.append(f"d={d}: {len(codes)} graphs / {len(classes)} classes")
    _finish(6, ok, "; ".join(parts), time.perf_counter() - t0, 300)


def test_criterion_07_switching_classes():
    t0 = time.perf_counter()
    counts = tuple(len(seidel_switching_classes(n)) for n in (3, 4, 5))
    form2 = len(form2_sign_classes(4))
    oracle_counts = tuple(oracles.switching_orbits(oracles.edge_list(n), n, oracles.transpositions(n))
                          for n in (3, 4, 5))
    slots = [e for e in oracles.edge_list(6) if e not in {(0, 1), (2, 3), (4, 5)}]
    oracle_form2 = oracles.switching_orbits(slots, 6, oracles.matching_generators(6))
    ok = counts == (2, 3, 7) == oracle_counts and form2 == 14 == oracle_form2
    _finish(7, ok, f"seidel orders 3,4,5 -> {counts}, form II d=4 -> {form2}",
            time.perf_counter() - t0, 120)


def _perturbed(p, rng):
    noisy = p.columns + 1e-3 * rng.standard_normal(p.columns.shape)
    return build_packing(noisy / np.linalg.norm(noisy, axis=0))


def test_criterion_08_certification():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    srg = srg_packing(triangular_graph(6))
    lifted, y_lift = lifted_etf(catalog.build((3, 6)))
    instances = [("T(6) -> (6,15)", srg.packing, srg.certificate),
                 ("lifted (6,12)", lifted, y_lift)]
    ok, parts = True, []
    for name, p, y in instances:
        rep = check_certificate(p, y)
        obj = np.abs(gram(p).entries - np.eye(p.n)).max()
        dv = dual_value(p, y)
        perturbed_ok = True
        for _ in range(5):
            q = _perturbed(p, rng)
            perturbed_ok &= not check_certificate(q, y).certified
            perturbed_ok &= not search_certificate(q).certified
        good = rep.verdict == "certified" and abs(dv - obj) < 1e-9 and perturbed_ok
        ok &= good
        parts.append(f"{name}: {rep.verdict}, dual-obj={abs(dv - obj):.1e}, perturbed rejected={perturbed_ok}")
    _finish(8, ok, "; ".join(parts), time.perf_counter() - t0, 30)


EXPECTED_ZEROS = {"PH": lambda q: q, "PHminusT": lambda q: q - 1,
                  "AHminus": lambda q: q * q - 1, "AstarH": lambda q: q}


def test_criterion_09_orthobiangular_families():
    t0 = time.perf_counter()
    ok, parts = True, []
    for q in (3, 7):
        for case, zeros in EXPECTED_ZEROS.items():
            rep = thm52(case, q)
            d, n, z = family_parameters(case, q)
            lhs, rhs = frobenius_identity(rep)
            frob = abs(lhs - rhs) <= 1e-8 * rhs
            cls = classify_angles(gram(rep.packing))
            zero_ok = set(rep.zero_counts) == {zeros(q)} == {z}
            mu_ok = abs(rep.coherence - mu_from_z(d, n, z)) < 1e-10
            scan = minimality_scan(case, q)
            good = (rep.tight and frob and cls.tag == "orthobiangular" and zero_ok and mu_ok
                    and scan.verdict and (rep.d, rep.n) == (d, n))
            ok &= good
            parts.append(f"{case}/{q}:{'ok' if good else 'bad'}")
    _finish(9, ok, " ".join(parts), time.perf_counter() - t0, 60)


def test_criterion_10_property_suites():
    rng = np.random.default_rng(11)
    results = {}

    # Naimark: mu(complement) = d/(n-d) mu(frame)
    worst, frames = 0.0, 0
    while frames < 100:
        d = int(rng.integers(2, 7))
        n = int(rng.integers(d + 2, 3 * d + 3))
        phi = oracles.random_untf(d, n, rng)
        if phi is None:
            continue
        p = build_packing(phi)
        comp = naimark_complement(p)
        worst = max(worst, abs(coherence(comp) - d / (n - d) * coherence(p)))
        frames += 1
    results["naimark"] = worst < 1e-10

    # C -> R never raises coherence
    mono = True
    for _ in range(100):
        d, n = int(rng.integers(2, 6)), int(rng.integers(3, 12))
        z = rng.standard_normal((d, n)) + 1j * rng.standard_normal((d, n))
        p = build_packing(z / np.linalg.norm(z, axis=0), "complex")
        mono &= coherence(c_to_r(p)) <= coherence(p) + 1e-12
    results["c_to_r"] = bool(mono)

    # Welch equality iff tight and equiangular, over the whole catalog
    agree = True
    for key in catalog.buildable_keys():
        p = catalog.build(key)
        welch_eq = p.n > p.d and abs(coherence(p) - welch_bound(p.d, p.n)) < 1e-9
        etf = is_tight(p, 1e-9)[0] and classify_angles(gram(p)).count == 1
        agree &= welch_eq == etf == is_etf(p)
    results["welch_etf"] = bool(agree)

    # Gram -> factor -> Gram
    round_trip = True
    for key in catalog.buildable_keys():
        p = catalog.build(key)
        g = gram(p).entries
        round_trip &= np.abs(gram(factor_gram(g, p.d)).entries - g).max() < 1e-9
    results["factor_gram"] = bool(round_trip)

    # weak duality: tr((G-I)Y)/||Y||_1 <= ||G-I||_inf for Y in the normal space
    weak = True
    for key in ((3, 6), (4, 6), (5, 7), (6, 15)):
        p = catalog.build(key)
        model = tangent_model(p)
        obj = np.abs(model.gram - np.eye(p.n)).max()
        for _ in range(20):
            y = smat(rng.standard_normal(model.normal_dimension) @ model.normal, p.n)
            weak &= dual_value(p, y) <= obj + 1e-12
    results["weak_duality"] = bool(weak)

    ok = all(results.values())
    _finish(10, ok, " ".join(f"{k}={'ok' if v else 'bad'}" for k, v in results.items()))


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
