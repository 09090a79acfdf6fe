"""Contact graphs, d-security, switching classes and quantifier-elimination queries
for (d+2)-packings."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .errors import InconsistentForm, SingularInput, TooLarge, UnknownFormat, ZeroCoherence
from .frames import Packing, coherence, gram
from .graph import Graph


# -- contact graphs and security --------------------------------------------------------

def contact_graph(p: Packing, tol: float = 1e-9) -> Graph:
    """Edges at pairs whose correlation reaches the coherence (relative tolerance)."""
    mu = coherence(p)
    if mu <= tol:
        raise ZeroCoherence("contact graph needs a positive coherence")
    a = np.abs(gram(p).entries)
    cut = mu - tol * max(1.0, mu)
    iu = np.triu_indices(p.n, 1)
    hit = a[iu] >= cut
    return Graph.from_edges(p.n, zip(iu[0][hit].tolist(), iu[1][hit].tolist()))


def is_d_secure(g: Graph, d: int) -> tuple[bool, object]:
    """Greedy min-degree peeling.

    Returns ``(False, order)`` when every vertex can be peeled at degree
    below ``d`` (``order`` is the deletion sequence), otherwise
    ``(True, residual)`` with the vertex set of the stuck subgraph.
    """
    alive = set(range(g.n))
    nbrs = {v: g.neighbors(v) for v in range(g.n)}
    order = []
    while alive:
        deg = {v: len(nbrs[v] & alive) for v in alive}
        v = min(alive, key=lambda u: (deg[u], u))
        if deg[v] >= d:
            return True, frozenset(alive)
        order.append(v)
        alive.remove(v)
    return False, tuple(order)


def is_peeling_order(g: Graph, order, d: int) -> bool:
    """True iff deleting ``order`` one by one only ever removes vertices of degree < d."""
    if sorted(order) != list(range(g.n)):
        raise ValueError("order must list every vertex once")
    alive = set(range(g.n))
    for v in order:
        if len(g.neighbors(v) & alive) >= d:
            return False
        alive.remove(v)
    return True


def minimal_d_secure_graphs(d: int) -> tuple[Graph, Graph]:
    """``K_{d+1}`` plus an isolated vertex, and the complement of a maximum matching."""
    if d < 2:
        raise ValueError("d must be at least 2")
    n = d + 2
    clique = Graph.complete(d + 1).disjoint_union(Graph(1, frozenset()))
    matching = Graph.from_edges(n, [(2 * i, 2 * i + 1) for i in range(n // 2)])
    return clique, matching.complement()


def graph_canonical_code(g: Graph) -> int:
    """Smallest edge bitmask over all relabellings (fine for n <= 8)."""
    pairs = list(itertools.combinations(range(g.n), 2))
    index = {e: k for k, e in enumerate(pairs)}
    best = None
    for perm in itertools.permutations(range(g.n)):
        code = 0
        for i, j in g.edges:
            a, b = perm[i], perm[j]
            code |= 1 << index[(min(a, b), max(a, b))]
        if best is None or code < best:
            best = code
    return best


# -- Seidel matrices and switching ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SeidelMatrix:
    entries: np.ndarray

    def __post_init__(self):
        s = np.array(self.entries, dtype=np.int64)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValueError("Seidel matrix must be square")
        if not np.array_equal(s, s.T):
            raise ValueError("Seidel matrix must be symmetric")
        if np.any(np.diag(s) != 0):
            raise ValueError("Seidel matrix needs a zero diagonal")
        if not np.all(np.isin(s, (-1, 0, 1))):
            raise ValueError("entries must lie in {0, 1, -1}")
        s.setflags(write=False)
        object.__setattr__(self, "entries", s)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __eq__(self, other):
        return isinstance(other, SeidelMatrix) and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())


def _upper_to_matrix(bits: int, n: int) -> np.ndarray:
    """Upper triangle row-major, most significant bit first; bit 1 means +1."""
    s = np.zeros((n, n), dtype=np.int64)
    iu = list(zip(*np.triu_indices(n, 1)))
    m = len(iu)
    for k, (i, j) in enumerate(iu):
        s[i, j] = s[j, i] = 1 if (bits >> (m - 1 - k)) & 1 else -1
    return s


def _switch_row0(mats: np.ndarray) -> np.ndarray:
    """Switch each full Seidel matrix so that row 0 is all ``-1``."""
    d = -mats[:, 0, :].copy()
    d[:, 0] = 1
    return d[:, :, None] * mats * d[:, None, :]


def _lex_keys(mats: np.ndarray, iu) -> np.ndarray:
    """Row-major upper-triangle keys; smaller key == lexicographically smaller matrix."""
    bits = (mats[:, iu[0], iu[1]] > 0).astype(np.int64)
    weights = 1 << np.arange(bits.shape[1] - 1, -1, -1, dtype=np.int64)
    return bits @ weights


def canonical_seidel(s) -> SeidelMatrix:
    """Lexicographically smallest matrix over all signed-permutation conjugates.

    For a fixed permutation, the best switching always makes row 0 all ``-1``,
    so only permutations need to be searched.
    """
    e = s.entries if isinstance(s, SeidelMatrix) else np.asarray(s, dtype=np.int64)
    n = e.shape[0]
    if np.any(e[~np.eye(n, dtype=bool)] == 0):
        raise ValueError("canonical_seidel expects a full +-1 pattern")
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    images = _switch_row0(e[perms[:, :, None], perms[:, None, :]])
    iu = np.triu_indices(n, 1)
    best = int(np.argmin(_lex_keys(images, iu)))
    return SeidelMatrix(images[best])


def seidel_switching_classes(n: int) -> list[SeidelMatrix]:
    """Canonical representatives of the switching classes of full Seidel matrices."""
    if n < 3:
        raise ValueError("order must be at least 3")
    if n > 7:
        raise TooLarge(f"order {n} is beyond exhaustive enumeration (max 7)")
    iu = np.triu_indices(n, 1)
    free = [(i, j) for i, j in zip(*iu) if i >= 1]  # row 0 is pinned to -1
    m = len(free)
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    seen = np.zeros(1 << m, dtype=bool)
    reps = []

    def key_of(mats):
        # drop the row-0 bits (all zero after switching)
        sub = mats[:, [i for i, _ in free], [j for _, j in free]]
        bits = (sub > 0).astype(np.int64)
        return bits @ (1 << np.arange(m - 1, -1, -1, dtype=np.int64))

    for start in range(1 << m):
        if seen[start]:
            continue
        s = -np.ones((n, n), dtype=np.int64)
        np.fill_diagonal(s, 0)
        for k, (i, j) in enumerate(free):
            if (start >> (m - 1 - k)) & 1:
                s[i, j] = s[j, i] = 1
        images = _switch_row0(s[perms[:, :, None], perms[:, None, :]])
        keys = key_of(images)
        seen[keys] = True
        reps.append(SeidelMatrix(images[int(np.argmin(keys))]))
    return sorted(reps, key=lambda r: int(_lex_keys(r.entries[None], iu)[0]))


def seidel_mu(s) -> float:
    """``-1 / lambda_min(S)``: the angle at which ``I + mu S`` becomes singular."""
    e = s.entries if isinstance(s, SeidelMatrix) else np.asarray(s, dtype=float)
    lam = float(np.linalg.eigvalsh(np.asarray(e, dtype=float)).min())
    if lam >= -1e-12:
        raise SingularInput("lambda_min(S) >= 0; not a usable Seidel pattern")
    return -1.0 / lam


def form_one_screen(d: int, optimum: float, tol: float = 1e-12) -> list[dict]:
    """Check every equiangular ``(d+1)``-block against Welch and a known optimum.

    A Gram of the complete-graph form contains ``I + mu S`` for some full
    Seidel ``S`` of order ``d+1``, singular, so ``mu = -1/lambda_min(S)``.
    Each row reports whether that ``mu`` passes the Welch bound for
    ``d+2`` vectors and whether it is ruled out by ``optimum``.
    """
    welch_sq = Fraction(2, d * (d + 1))
    rows = []
    for rep in seidel_switching_classes(d + 1):
        mu = seidel_mu(rep)
        passes_welch = mu * mu >= float(welch_sq) - tol
        rows.append({"seidel": rep, "mu": mu, "passes_welch": passes_welch,
                     "below_optimum": mu < optimum - tol})
    return rows


# -- form II sign classes -------------------------------------------------------------------

def _matching_pairs(n: int) -> list[tuple[int, int]]:
    return [(2 * i, 2 * i + 1) for i in range(n // 2)]


def _matching_automorphisms(n: int) -> list[tuple]:
    """Vertex permutations that map the standard maximum matching onto itself."""
    pairs = _matching_pairs(n)
    lone = [n - 1] if n % 2 else []
    out = []
    for order in itertools.permutations(range(len(pairs))):
        for flips in itertools.product((0, 1), repeat=len(pairs)):
            perm = [0] * n
            for src, (dst, flip) in enumerate(zip(order, flips)):
                a, b = pairs[src]
                c, e = pairs[dst]
                perm[a], perm[b] = (e, c) if flip else (c, e)
            for v in lone:
                perm[v] = v
            out.append(tuple(perm))
    return out


def form2_slots(d: int) -> list[tuple[int, int]]:
    """Upper-triangle positions carrying ``+-mu`` in the matching-complement form."""
    n = d + 2
    matched = set(_matching_pairs(n))
    return [(i, j) for i, j in itertools.combinations(range(n), 2) if (i, j) not in matched]


def _form2_matrix(signs, d: int) -> np.ndarray:
    n = d + 2
    s = np.zeros((n, n), dtype=np.int64)
    for (i, j), v in zip(form2_slots(d), signs):
        s[i, j] = s[j, i] = v
    return s


def form2_orbit(s: np.ndarray, d: int) -> np.ndarray:
    """All images of ``s`` under matching-preserving signed permutations."""
    n = d + 2
    perms = np.array(_matching_automorphisms(n), dtype=np.int64)
    signs = np.array([(1,) + t for t in itertools.product((1, -1), repeat=n - 1)], dtype=np.int64)
    permuted = s[perms[:, :, None], perms[:, None, :]]
    out = signs[None, :, :, None] * permuted[:, None] * signs[None, :, None, :]
    return out.reshape(-1, n, n)


def form2_sign_classes(d: int) -> list[SeidelMatrix]:
    """Generalized switching representatives of the matching-complement sign patterns."""
    if d < 2:
        raise ValueError("d must be at least 2")
    if d > 4:
        raise TooLarge(f"d={d} is beyond exhaustive enumeration (max 4)")
    slots = form2_slots(d)
    m = len(slots)
    rows = np.array([i for i, _ in slots])
    cols = np.array([j for _, j in slots])
    weights = 1 << np.arange(m - 1, -1, -1, dtype=np.int64)
    seen = np.zeros(1 << m, dtype=bool)
    reps = []
    for start in range(1 << m):
        if seen[start]:
            continue
        bits = [(start >> (m - 1 - k)) & 1 for k in range(m)]
        s = _form2_matrix([1 if b else -1 for b in bits], d)
        images = form2_orbit(s, d)
        keys = (images[:, rows, cols] > 0).astype(np.int64) @ weights
        seen[keys] = True
        reps.append(SeidelMatrix(images[int(np.argmin(keys))]))
    return reps


def form2_signs(s) -> tuple[int, ...]:
    """Slot signs of a form-II pattern, in ``form2_slots`` order."""
    e = s.entries if isinstance(s, SeidelMatrix) else np.asarray(s)
    d = e.shape[0] - 2
    return tuple(int(e[i, j]) for i, j in form2_slots(d))


# -- Gram forms and polynomial systems -----------------------------------------------------

@dataclass(frozen=True)
class GramForm:
    """Symbolic Gram shape of a ``(d+2)``-packing.

    ``tag`` is ``"I"`` (a ``K_{d+1}`` block plus a free last column) or
    ``"II"`` (free entries on a maximum matching, ``+-mu`` elsewhere).
    ``labels[i][j]`` is ``"1"``, ``"+mu"``, ``"-mu"`` or ``"x<k>"``.
    """

    tag: str
    d: int
    labels: tuple

    @property
    def n(self) -> int:
        return self.d + 2

    @property
    def free_variables(self) -> tuple[str, ...]:
        names = {lab for row in self.labels for lab in row if lab.startswith("x")}
        return tuple(sorted(names, key=lambda s: int(s[1:])))

    def symbolic(self) -> sympy.Matrix:
        mu = sympy.Symbol("mu")
        table = {"1": sympy.Integer(1), "+mu": mu, "-mu": -mu}
        return sympy.Matrix(self.n, self.n,
                            lambda i, j: table.get(self.labels[i][j], sympy.Symbol(self.labels[i][j])))


def form_slots(tag: str, d: int) -> list[tuple[int, int]]:
    if tag == "I":
        return list(itertools.combinations(range(d + 1), 2))
    if tag == "II":
        return form2_slots(d)
    raise InconsistentForm(f"unknown form tag {tag!r}")


def gram_form(tag: str, d: int, signs) -> GramForm:
    """Fill the ``+-mu`` slots of form ``tag`` with ``signs`` (slot order of ``form_slots``)."""
    if d < 2:
        raise InconsistentForm("d must be at least 2")
    slots = form_slots(tag, d)
    signs = tuple(int(s) for s in signs)
    if len(signs) != len(slots) or any(s not in (1, -1) for s in signs):
        raise InconsistentForm(f"form {tag} at d={d} needs {len(slots)} signs in {{+1,-1}}")
    n = d + 2
    lab = [["1" if i == j else "" for j in range(n)] for i in range(n)]
    for (i, j), s in zip(slots, signs):
        lab[i][j] = lab[j][i] = "+mu" if s > 0 else "-mu"
    if tag == "I":
        for i in range(d + 1):
            lab[i][n - 1] = lab[n - 1][i] = f"x{i + 1}"
    else:
        for k, (i, j) in enumerate(_matching_pairs(n)):
            lab[i][j] = lab[j][i] = f"x{k + 1}"
    return GramForm(tag, d, tuple(tuple(r) for r in lab))


Monomial = tuple  # exponent vector aligned with PolynomialSystem.variables


@dataclass(frozen=True)
class PolynomialSystem:
    """Integer polynomials as ``{exponents: coefficient}`` dicts over ``variables``.

    The semi-algebraic set is ``{eq == 0 for eq in equalities}`` and
    ``{q >= 0 for q in inequalities}``; ``optional`` marks inequalities that
    are valid strengthenings rather than part of the defining system.
    """

    variables: tuple
    equalities: tuple
    inequalities: tuple
    optional: tuple = ()

    def __post_init__(self):
        k = len(self.variables)
        for poly in self.equalities + self.inequalities:
            for mono in poly:
                if len(mono) != k:
                    raise InconsistentForm("monomial does not match the variable list")
        if len(self.optional) not in (0, len(self.inequalities)):
            raise InconsistentForm("optional flags must align with inequalities")

    @property
    def flags(self) -> tuple:
        return self.optional or (False,) * len(self.inequalities)

    def evaluate(self, values: dict) -> tuple[list, list]:
        """Exact values of every equality and inequality at a rational point."""
        point = [Fraction(values[v]) for v in self.variables]

        def ev(poly):
            total = Fraction(0)
            for mono, c in poly.items():
                term = Fraction(c)
                for x, e in zip(point, mono):
                    term *= x ** e
                total += term
            return total

        return [ev(p) for p in self.equalities], [ev(p) for p in self.inequalities]

    def satisfied_by(self, values: dict, include_optional: bool = True) -> bool:
        eqs, ineqs = self.evaluate(values)
        return all(v == 0 for v in eqs) and all(
            v >= 0 for v, opt in zip(ineqs, self.flags) if include_optional or not opt)


def _poly_dict(expr, gens) -> dict:
    poly = sympy.Poly(sympy.expand(expr), *gens)
    out = {}
    for mono, c in poly.terms():
        if not c.is_integer:
            raise InconsistentForm(f"non-integer coefficient {c}")
        out[tuple(int(e) for e in mono)] = int(c)
    return out


def cad_query(form: GramForm, signs=None, d: int | None = None, *, welch: bool = True) -> PolynomialSystem:
    """Polynomial system whose real solutions are the Gram matrices of ``form``.

    ``form`` may be a ready :class:`GramForm`, or a tag ``"I"``/``"II"`` with
    ``signs`` and ``d``.  Equalities are all ``(d+1) x (d+1)`` minors (rank at
    most ``d``); inequalities are all principal minors of order >= 2, the box
    ``-mu <= x_i <= mu``, and optionally the Welch bound ``d(d+1)mu^2 - 2 >= 0``.
    """
    if not isinstance(form, GramForm):
        if signs is None or d is None:
            raise InconsistentForm("a form tag needs both signs and d")
        form = gram_form(form, d, signs)
    elif d is not None and d != form.d:
        raise InconsistentForm(f"form is for d={form.d}, got d={d}")
    d, n = form.d, form.n
    names = form.free_variables + ("mu",)
    gens = [sympy.Symbol(v) for v in names]
    mu = gens[-1]
    m = form.symbolic()

    eqs = []
    for rows in itertools.combinations(range(n), d + 1):
        for cols in itertools.combinations(range(n), d + 1):
            eqs.append(_poly_dict(m.extract(list(rows), list(cols)).det(method="berkowitz"), gens))
    ineqs, optional = [], []
    for size in range(2, n + 1):
        for idx in itertools.combinations(range(n), size):
            ineqs.append(_poly_dict(m.extract(list(idx), list(idx)).det(method="berkowitz"), gens))
            optional.append(False)
    for x in gens[:-1]:
        ineqs += [_poly_dict(mu - x, gens), _poly_dict(mu + x, gens)]
        optional += [False, False]
    if welch:
        ineqs.append(_poly_dict(d * (d + 1) * mu ** 2 - 2, gens))
        optional.append(True)
    return PolynomialSystem(tuple(names), tuple(eqs), tuple(ineqs), tuple(optional))


def form_values(g, form: GramForm, tol: float = 1e-12) -> dict:
    """Read ``mu`` and the free variables off a Gram matrix laid out like ``form``.

    Entries may be Fractions (exact) or floats.  Raises ``InconsistentForm``
    when a ``+-mu`` slot disagrees with the others.
    """
    n = form.n
    rows = [list(r) for r in g]
    mu = None
    values = {}
    for i in range(n):
        for j in range(i + 1, n):
            lab = form.labels[i][j]
            v = rows[i][j]
            if lab.startswith("x"):
                values[lab] = v
                continue
            guess = v if lab == "+mu" else -v
            if mu is None:
                mu = guess
            elif abs(guess - mu) > tol:
                raise InconsistentForm(f"entry ({i},{j}) = {v} does not fit label {lab}")
    values["mu"] = mu
    return values


# -- export ----------------------------------------------------------------------------------

def _term_text(mono, coeff, names, power: str) -> str:
    factors = [f"{v}{power}{e}" if e > 1 else v for v, e in zip(names, mono) if e]
    body = "*".join(factors)
    if not body:
        return str(coeff)
    if coeff == 1:
        return body
    if coeff == -1:
        return "-" + body
    return f"{coeff}*{body}"


def poly_text(poly: dict, names, power: str = "^") -> str:
    if not poly:
        return "0"
    terms = [_term_text(m, c, names, power) for m, c in sorted(poly.items(), reverse=True)]
    out = terms[0]
    for t in terms[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out


def _script(sys: PolynomialSystem) -> str:
    names = list(sys.variables)
    conds = [f"{poly_text(p, names)} == 0" for p in sys.equalities]
    conds += [f"{poly_text(p, names)} >= 0" for p in sys.inequalities]
    body = " && ".join(conds) if conds else "True"
    free = [v for v in names if v != "mu"]
    keep = [v for v in names if v == "mu"]
    formula = f"Exists[{{{', '.join(free)}}}, {body}]" if free else body
    return f"Resolve[{formula}, {{{', '.join(keep)}}}, Reals]\n"


def _ast(sys: PolynomialSystem) -> str:
    def enc(poly):
        return [{"coeff": c, "exponents": list(m)} for m, c in sorted(poly.items(), reverse=True)]

    doc = {
        "vars": list(sys.variables),
        "equalities": [enc(p) for p in sys.equalities],
        "inequalities": [enc(p) for p in sys.inequalities],
        "optional": list(sys.flags),
    }
    return json.dumps(doc, indent=1) + "\n"


def export_cad(sys: PolynomialSystem, format: str = "json") -> str:
    """``"json"``: polynomial AST; ``"script"``/``"mathematica"``: a ``Resolve`` query."""
    if format == "json":
        return _ast(sys)
    if format in ("script", "mathematica", "m"):
        return _script(sys)
    raise UnknownFormat(f"unknown CAD export format {format!r}")


def parse_cad_json(text: str) -> PolynomialSystem:
    doc = json.loads(text)

    def dec(terms):
        return {tuple(int(e) for e in t["exponents"]): int(t["coeff"]) for t in terms}

    ineqs = tuple(dec(p) for p in doc["inequalities"])
    optional = tuple(bool(f) for f in doc.get("optional", [False] * len(ineqs)))
    return PolynomialSystem(tuple(doc["vars"]), tuple(dec(p) for p in doc["equalities"]),
                            ineqs, optional if any(optional) else ())


def eq24_gram() -> list[list[Fraction]]:
    """The equiangular 6-vector Gram in R^4 at ``mu = 1/3`` (exact)."""
    signs = [
        [0, 1, 1, -1, -1, 1],
        [1, 0, -1, -1, 1, 1],
        [1, -1, 0, -1, 1, 1],
        [-1, -1, -1, 0, -1, 1],
        [-1, 1, 1, -1, 0, 1],
        [1, 1, 1, 1, 1, 0],
    ]
    third = Fraction(1, 3)
    return [[Fraction(1) if i == j else third * s for j, s in enumerate(row)]
            for i, row in enumerate(signs)]


def eq24_form() -> tuple[GramForm, dict]:
    """The matching-complement form fitting ``eq24_gram`` and its exact values."""
    g = eq24_gram()
    slots = form2_slots(4)
    signs = [1 if g[i][j] > 0 else -1 for i, j in slots]
    form = gram_form("II", 4, signs)
    return form, form_values(g, form)


def welch_mu_floor(d: int) -> float:
    """Welch bound for ``d+2`` vectors in ``R^d``: ``sqrt(2/(d(d+1)))``."""
    return math.sqrt(2 / (d * (d + 1)))
