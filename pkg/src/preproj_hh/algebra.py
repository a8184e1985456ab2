"""The preprojective algebra of type L_n with its canonical monomial basis.

The quiver has vertices 1..n, a loop eps at vertex 1 and arrow pairs
a_i: i -> i+1, ab_i: i+1 -> i.  The algebra is the path algebra modulo the
mesh relations sum_{i(a)=v} a*abar = 0, one per vertex.

Normal forms are computed degree by degree by linear elimination: in degree
d the spanning set {arrow * basis(d-1)} is reduced modulo the relation
vectors {r_v * b}, never by string rewriting, so no confluence argument is
needed.  Each graded piece e_i L_d e_j turns out to be at most
one-dimensional, which the build certifies together with the fact that the
canonical signed monomials form a basis.  All structure constants are
integers (in fact 0, 1 or -1); they are computed once over the rationals
and reduced into the requested field on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .exactla import ExactMatrix, FieldSpec

QQ = FieldSpec(0)


class BasisMismatchError(RuntimeError):
    """The canonical monomial list failed to evaluate to a basis."""


class CenterMismatchError(RuntimeError):
    """The solved center does not match the expected description."""


@dataclass(frozen=True)
class Arrow:
    index: int
    name: str
    source: int
    target: int
    bar: int  # index of the opposite arrow (eps is its own bar)


class Quiver:
    """Double quiver of the graph L_n: a line with a loop at vertex 1."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("need at least one vertex")
        self.n = n
        arrows = [Arrow(0, "eps", 1, 1, 0)]
        for i in range(1, n):
            arrows.append(Arrow(2 * i - 1, f"a{i}", i, i + 1, 2 * i))
            arrows.append(Arrow(2 * i, f"ab{i}", i + 1, i, 2 * i - 1))
        self.arrows = arrows
        self.arrows_from = {v: [a for a in arrows if a.source == v] for v in self.vertices}
        self.arrows_into = {v: [a for a in arrows if a.target == v] for v in self.vertices}

    @property
    def vertices(self):
        return range(1, self.n + 1)

    def bar(self, a: Arrow) -> Arrow:
        return self.arrows[a.bar]


@dataclass(frozen=True)
class BasisMonomial:
    mid: int
    source: int
    target: int
    degree: int
    path: Tuple[int, ...]  # arrow indices, composition order (leftmost applied last)
    sign: int


EPS = 0  # arrow index of the loop


def _canonical_paths(quiver: Quiver) -> Dict[Tuple[int, int, int], Tuple[Tuple[int, ...], int]]:
    """Signed paths of the canonical basis, keyed by (source, target, degree).

    For source 1 the elements are eps^t a_1..a_{j-1}; for 1 < i <= j they
    split into the hook family a_i..a_{j-1+k} ab_{j-1+k}..ab_j and the
    odd-loop family ab_{i-1}..ab_1 eps^{2t+1} a_1..a_{j-1}, whose top
    diagonal element carries the sign (-1)^{i(i-1)/2}.  Entries with source
    above target are the bar-reverses of their mirrors.
    """
    n = quiver.n
    a_idx = {i: 2 * i - 1 for i in range(1, n)}
    ab_idx = {i: 2 * i for i in range(1, n)}

    def up(lo, hi):  # a_lo a_{lo+1} .. a_hi
        return tuple(a_idx[i] for i in range(lo, hi + 1))

    def down(hi, lo):  # ab_hi ab_{hi-1} .. ab_lo
        return tuple(ab_idx[i] for i in range(hi, lo - 1, -1))

    out: dict = {}

    def put(i, j, path, sign=1):
        out[(i, j, len(path))] = (path, sign)

    for j in range(1, n + 1):
        for t in range(0, 2 * (n - j) + 2):
            put(1, j, (EPS,) * t + up(1, j - 1))
    for i in range(2, n + 1):
        for j in range(i, n + 1):
            for k in range(0, n - j + 1):
                put(i, j, up(i, j - 1 + k) + down(j - 1 + k, j))
            for t in range(0, n - j + 1):
                sign = 1
                if i == j and t == n - i:
                    sign = (-1) ** (i * (i - 1) // 2)
                put(i, j, down(i - 1, 1) + (EPS,) * (2 * t + 1) + up(1, j - 1), sign)

    def bar_path(path):
        return tuple(quiver.arrows[a].bar for a in reversed(path))

    for (i, j, d), (path, sign) in sorted(out.items()):
        if i < j:
            out[(j, i, d)] = (bar_path(path), sign)
    return out


class AlgebraTable:
    """P(L_n) over a fixed field: basis, product table, Cartan data.

    Immutable after construction.  `product[m1][m2]` is either absent (the
    product vanishes) or a pair (integer coefficient, monomial id); each
    graded piece is at most one-dimensional, so single terms suffice.
    """

    def __init__(self, n: int, field: FieldSpec, basis, product, act):
        self.n = n
        self.field = field
        self.quiver = Quiver(n)
        self.basis: List[BasisMonomial] = basis
        self.product = product
        self.act = act
        self.dim = len(basis)
        self.by_ijd = {(m.source, m.target, m.degree): m.mid for m in basis}
        self.e_ids = {i: self.by_ijd[(i, i, 0)] for i in self.quiver.vertices}
        self.socle_ids = {i: self.by_ijd[(i, i, 2 * n - 1)] for i in self.quiver.vertices}
        self.arrow_ids = {a.index: self.by_ijd[(a.source, a.target, 1)]
                          for a in self.quiver.arrows}
        self.cartan = [[sum(1 for m in basis if m.source == i and m.target == j)
                        for j in self.quiver.vertices] for i in self.quiver.vertices]
        self.top_degree = 2 * n - 1
        self._center = None

    # -- element helpers ----------------------------------------------------

    def unit(self) -> dict:
        one = self.field.one
        return {self.e_ids[i]: one for i in self.quiver.vertices}

    def monomial_element(self, mid: int, coeff=None) -> dict:
        return {mid: self.field.one if coeff is None else self.field(coeff)}

    def mono_mul(self, m1: int, m2: int) -> Optional[Tuple[int, int]]:
        return self.product[m1].get(m2)

    def serialize(self) -> dict:
        """Canonical JSON-ready description (basis with paths/signs, products)."""
        arrows = [{"name": a.name, "source": a.source, "target": a.target}
                  for a in self.quiver.arrows]
        basis = [{"id": m.mid, "source": m.source, "target": m.target,
                  "degree": m.degree, "sign": m.sign,
                  "path": [self.quiver.arrows[a].name for a in m.path]}
                 for m in self.basis]
        triples = []
        for m1 in range(self.dim):
            for m2 in sorted(self.product[m1]):
                c, m3 = self.product[m1][m2]
                triples.append([m1, m2, c, m3])
        return {"n": self.n, "characteristic": self.field.characteristic,
                "dimension": self.dim, "arrows": arrows, "basis": basis,
                "products": triples}


def build_algebra(n: int, field: FieldSpec) -> AlgebraTable:
    """Construct P(L_n) over `field`, certifying the canonical basis."""
    basis, product, act = _integral_tables(n)
    table = AlgebraTable(n, field, basis, product, act)
    expected = n * (n + 1) * (2 * n + 1) // 3
    if table.dim != expected:
        raise BasisMismatchError(f"dimension {table.dim}, expected {expected}")
    return table


_INTEGRAL_CACHE: dict = {}


def _integral_tables(n: int):
    """Basis monomials plus integer act/product tables, built over Q once per n."""
    if n in _INTEGRAL_CACHE:
        return _INTEGRAL_CACHE[n]
    quiver = Quiver(n)
    canonical = _canonical_paths(quiver)
    max_degree = 2 * n - 1

    basis: List[BasisMonomial] = []
    by_ijd: Dict[Tuple[int, int, int], int] = {}

    def new_monomial(i, j, d):
        path, sign = canonical[(i, j, d)]
        m = BasisMonomial(len(basis), i, j, d, path, sign)
        basis.append(m)
        by_ijd[(i, j, d)] = m.mid
        return m

    # act[(arrow index, mid)] -> (int coeff, mid) or None, for every
    # composable pair with deg(mid) < 2n-1
    act: Dict[Tuple[int, int], Optional[Tuple[int, int]]] = {}

    for i in quiver.vertices:
        new_monomial(i, i, 0)

    prev_degree = [m.mid for m in basis]
    for d in range(1, max_degree + 1):
        current = []
        blocks: Dict[Tuple[int, int], list] = {}
        for mid in prev_degree:
            m = basis[mid]
            for a in quiver.arrows_into[m.source]:
                blocks.setdefault((a.source, m.target), []).append((a.index, mid))
        for (i, j), span in sorted(blocks.items()):
            # at most one relation per block: r_i * b with b the unique
            # monomial of e_i L_{d-2} e_j, expanded through the act table
            rel = None
            if d >= 2 and (i, j, d - 2) in by_ijd:
                b = by_ijd[(i, j, d - 2)]
                vec: dict = {}
                for a in quiver.arrows_from[i]:
                    hit = act[(a.bar, b)]
                    if hit is not None:
                        c, mid2 = hit
                        key = (a.index, mid2)
                        vec[key] = vec.get(key, 0) + c
                rel = {k: v for k, v in vec.items() if v != 0}
            reduction = _reduce_block(span, rel)
            if reduction is None:
                if (i, j, d) in canonical:
                    raise BasisMismatchError(
                        f"canonical monomial for ({i},{j},{d}) evaluates to zero")
                for a, mid in span:
                    act[(a, mid)] = None
                continue
            if (i, j, d) not in canonical:
                raise BasisMismatchError(
                    f"graded piece ({i},{j},{d}) is nonzero but has no canonical monomial")
            path, sign = canonical[(i, j, d)]
            value = _evaluate_path(path, sign, by_ijd, act, quiver)
            free_key, expand = reduction
            if value is not None:
                coeff, key_eval = value
                if key_eval not in expand:
                    raise BasisMismatchError("evaluation left the expected block")
                c_eval = coeff * expand[key_eval]
            else:
                c_eval = 0
            if c_eval == 0:
                raise BasisMismatchError(
                    f"canonical monomial for ({i},{j},{d}) evaluates to zero")
            mono = new_monomial(i, j, d)
            current.append(mono.mid)
            for (a, mid), coeff in expand.items():
                if coeff == 0:
                    act[(a, mid)] = None
                else:
                    q = Fraction(coeff, c_eval)
                    if q.denominator != 1 or abs(q) != 1:
                        raise BasisMismatchError(f"non-unit structure constant {q}")
                    act[(a, mid)] = (int(q), mono.mid)
        got = {(basis[m].source, basis[m].target, d) for m in current}
        expected_d = {k for k in canonical if k[2] == d}
        if got != expected_d:
            raise BasisMismatchError(f"degree {d} basis mismatch: {got ^ expected_d}")
        prev_degree = current

    basis, act = _reorder_basis(basis, act)
    product = _full_product(basis, act, quiver)
    _INTEGRAL_CACHE[n] = (basis, product, act)
    return _INTEGRAL_CACHE[n]


def _reorder_basis(basis, act):
    """Renumber monomials lexicographically by (source, target, degree).

    The build produces them degree by degree; the canonical numbering fixes
    every downstream matrix column order independently of build order.
    """
    order = sorted(range(len(basis)),
                   key=lambda mid: (basis[mid].source, basis[mid].target,
                                    basis[mid].degree))
    perm = {old: new for new, old in enumerate(order)}
    new_basis = [BasisMonomial(perm[m.mid], m.source, m.target, m.degree,
                               m.path, m.sign) for m in basis]
    new_basis.sort(key=lambda m: m.mid)
    new_act = {}
    for (a, mid), hit in act.items():
        new_act[(a, perm[mid])] = None if hit is None else (hit[0], perm[hit[1]])
    return new_basis, new_act


def _reduce_block(span, rel):
    """Quotient a spanning block by its (single) relation vector.

    Returns None if the block dies, otherwise (free spanning key, mapping
    spanning key -> integer coefficient on the free key).  Blocks have at
    most two spanning elements and one relation, so this is a direct case
    analysis rather than a general elimination.
    """
    span = sorted(span)
    if not rel:
        if len(span) != 1:
            raise BasisMismatchError(f"free block with {len(span)} spanning elements")
        key = span[0]
        return key, {key: 1}
    if set(rel) - set(span):
        raise BasisMismatchError("relation leaves the spanning block")
    if len(span) == 1:
        return None
    if len(span) == 2:
        k0, k1 = span
        c0, c1 = rel.get(k0, 0), rel.get(k1, 0)
        if c0 == 0 or c1 == 0:
            dead, free = (k0, k1) if c1 == 0 else (k1, k0)
            return free, {free: 1, dead: 0}
        q = Fraction(-c1, c0)
        if q.denominator != 1:
            raise BasisMismatchError("non-integral reduction")
        return k1, {k1: 1, k0: int(q)}
    raise BasisMismatchError(f"block with {len(span)} spanning elements")


def _evaluate_path(path, sign, by_ijd, act, quiver):
    """Evaluate a signed arrow path through the act table.

    Returns (coefficient, spanning key) where the key is the (arrow,
    monomial) pair the evaluation lands on, or None if it vanishes earlier.
    """
    last = quiver.arrows[path[-1]]
    key = (last.index, by_ijd[(last.target, last.target, 0)])
    coeff = sign
    for a in reversed(path[:-1]):
        hit = act[key]
        if hit is None:
            return None
        c, mid = hit
        coeff *= c
        key = (a, mid)
    return coeff, key


def _full_product(basis, act, quiver):
    """All pairwise products, by iterating the arrow action along paths."""
    top = 2 * quiver.n - 1
    product = [dict() for _ in basis]
    for m1 in basis:
        for m2 in basis:
            if m1.target != m2.source or m1.degree + m2.degree > top:
                continue
            if m1.degree == 0:
                product[m1.mid][m2.mid] = (1, m2.mid)
                continue
            coeff, mid = m1.sign, m2.mid
            for a in reversed(m1.path):
                step = act[(a, mid)]
                if step is None:
                    coeff = 0
                    break
                c, mid = step
                coeff *= c
            if coeff:
                product[m1.mid][m2.mid] = (coeff, mid)
    return product


# -- element arithmetic ------------------------------------------------------


def elem_add(t: AlgebraTable, x: dict, y: dict) -> dict:
    F = t.field
    out = dict(x)
    for k, v in y.items():
        s = F.add(out.get(k, F.zero), v)
        if s == 0:
            out.pop(k, None)
        else:
            out[k] = s
    return out


def elem_scale(t: AlgebraTable, c, x: dict) -> dict:
    F = t.field
    c = F(c)
    if c == 0:
        return {}
    return {k: F.mul(c, v) for k, v in x.items()}


def multiply(t: AlgebraTable, x: dict, y: dict) -> dict:
    """Exact product in the algebra, bilinear extension of the product table."""
    F = t.field
    out: dict = {}
    for m1, c1 in x.items():
        row = t.product[m1]
        for m2, c2 in y.items():
            hit = row.get(m2)
            if hit is None:
                continue
            c, m3 = hit
            val = F.add(out.get(m3, F.zero), F.mul(F.mul(c1, c2), F(c)))
            if val == 0:
                out.pop(m3, None)
            else:
                out[m3] = val
    return out


def elem_eq(x: dict, y: dict) -> bool:
    return {k: v for k, v in x.items() if v != 0} == {k: v for k, v in y.items() if v != 0}


def x0_element(t: AlgebraTable, power: int = 1) -> dict:
    """The degree-2 central generator sum_i (-1)^i a_i ab_i, raised to `power`."""
    if power == 0:
        return t.unit()
    F = t.field
    x0: dict = {}
    for i in range(1, t.n):
        a = t.arrow_ids[2 * i - 1]
        ab = t.arrow_ids[2 * i]
        term = multiply(t, t.monomial_element(a), t.monomial_element(ab))
        x0 = elem_add(t, x0, elem_scale(t, (-1) ** i, term))
    out = x0
    for _ in range(power - 1):
        out = multiply(t, out, x0)
    return out


def socle_basis(t: AlgebraTable) -> List[dict]:
    """The socle generators w_1..w_n; each is killed by every arrow."""
    return [t.monomial_element(t.socle_ids[i]) for i in t.quiver.vertices]


def center_basis(t: AlgebraTable) -> List[dict]:
    """Basis {1, x0, .., x0^(n-1), w_1, .., w_n} of the center, certified.

    The center is solved from scratch as the kernel of z -> (az - za for all
    arrows a) on the span of the diagonal monomials; the solved dimension
    must be 2n and must match the span of the listed elements.
    """
    if t._center is not None:
        return t._center
    F = t.field
    diag = [m.mid for m in t.basis if m.source == m.target]
    cols = []
    for mid in diag:
        col: dict = {}
        for a in t.quiver.arrows:
            am = t.arrow_ids[a.index]
            left = t.mono_mul(am, mid)
            right = t.mono_mul(mid, am)
            if left is not None:
                c, m3 = left
                col[(a.index, m3)] = F.add(col.get((a.index, m3), F.zero), F(c))
            if right is not None:
                c, m3 = right
                col[(a.index, m3)] = F.sub(col.get((a.index, m3), F.zero), F(c))
        cols.append(col)
    keys = sorted({k for col in cols for k in col})
    key_pos = {k: i for i, k in enumerate(keys)}
    mat = ExactMatrix.zero(F, len(keys), len(diag))
    for j, col in enumerate(cols):
        for k, v in col.items():
            mat.rows[key_pos[k]][j] = v
    kernel = mat.kernel_basis()
    if len(kernel) != 2 * t.n:
        raise CenterMismatchError(f"center dimension {len(kernel)}, expected {2 * t.n}")
    listed = [t.unit()]
    for k in range(1, t.n):
        listed.append(x0_element(t, k))
    listed.extend(socle_basis(t))
    span = ExactMatrix.from_columns(
        F, [[z.get(mid, F.zero) for mid in diag] for z in listed])
    if span.rank() != 2 * t.n:
        raise CenterMismatchError("listed central elements are dependent")
    for vec in kernel:
        if span.solve(vec) is None:
            raise CenterMismatchError("solved center leaves the listed span")
    t._center = listed
    return listed


def cartan_matrix(t: AlgebraTable) -> Tuple[List[List[int]], int]:
    """Cartan matrix (dim e_i L e_j) and its exact integer determinant."""
    return t.cartan, int(_det_int(t.cartan))


def _det_int(rows: List[List[int]]) -> Fraction:
    """Exact determinant by fraction-based forward elimination."""
    n = len(rows)
    m = [[Fraction(x) for x in row] for row in rows]
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = -det
        det *= m[c][c]
        inv = 1 / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return det
