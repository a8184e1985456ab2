"""The explicit cochain complex computing Hochschild cohomology, and friends.

Spaces alternate between sums of loop pieces e_i L e_i and sums of parallel
pieces e_{i(a)} L e_{t(a)}, with six-periodic differentials.  Every explicit
differential matrix is cross-checked, entry for entry, against the map
obtained by dualizing the corresponding resolution differential through
Hom(L e_s (x) e_t L, L) = e_s L e_t; a mismatch raises ComplexMismatchError.

One deliberate deviation from the printed formula set: the parallels-to-
loops differential at the twisted spot is abar*p - p*abar, which is what
dualizing the twisted resolution differential actually yields (the two sign
conventions differ by a global -1 and have identical kernels and images;
the loop component, where p commutes with eps powers, cannot tell them
apart).

The homology dimensions come from an independently assembled tensor
complex, and the cyclic homology dimensions from the Connes-image
bookkeeping over it.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Optional, Tuple

from .algebra import (AlgebraTable, center_basis, elem_add, elem_scale,
                      multiply, socle_basis, x0_element)
from .exactla import (ExactMatrix, FieldSpec, PreparedSolver,
                      UnsupportedCharacteristicError, sparse_rank)
from .nakayama import NakayamaForm
from .resolution import ResolutionWindow, build_resolution

LOOPS = "loops"
PARALLELS = "parallels"


class ComplexMismatchError(RuntimeError):
    """Explicit differential disagrees with the dualized resolution."""


class CanonicalBasisError(RuntimeError):
    pass


@dataclass
class CochainSpace:
    degree: int
    kind: str
    basis: List[Tuple[int, int]]   # (component, monomial id); component is a
                                   # vertex for loops, an arrow index for parallels
    pos: Dict[Tuple[int, int], int]

    @property
    def dim(self) -> int:
        return len(self.basis)


def _make_space(t: AlgebraTable, degree: int) -> CochainSpace:
    kind = PARALLELS if degree % 3 == 1 else LOOPS
    basis: List[Tuple[int, int]] = []
    if kind == LOOPS:
        for i in t.quiver.vertices:
            basis.extend((i, m.mid) for m in t.basis
                         if m.source == i and m.target == i)
    else:
        for a in t.quiver.arrows:
            basis.extend((a.index, m.mid) for m in t.basis
                         if m.source == a.source and m.target == a.target)
    return CochainSpace(degree, kind, basis, {k: r for r, k in enumerate(basis)})


class CochainComplex:
    """Spaces V^0..V^maxdeg and differentials d^0..d^(maxdeg-1)."""

    def __init__(self, table: AlgebraTable, form: NakayamaForm, maxdeg: int = 13,
                 window: Optional[ResolutionWindow] = None):
        if maxdeg < 7:
            raise ValueError("maxdeg must be at least 7")
        self.table = table
        self.form = form
        self.maxdeg = maxdeg
        self.window = window or build_resolution(table, form, maxdeg)
        self.spaces = [_make_space(table, i) for i in range(maxdeg + 1)]
        self.diffs: List[ExactMatrix] = []
        for i in range(maxdeg):
            explicit = self._explicit_matrix(i)
            dual = self._dual_matrix(i)
            if explicit.rows != dual.rows:
                raise ComplexMismatchError(
                    f"differential {i}: explicit formula disagrees with the "
                    f"dualized resolution differential")
            self.diffs.append(explicit)
        for i in range(maxdeg - 1):
            if not self.diffs[i + 1].matmul(self.diffs[i]).is_zero():
                raise ComplexMismatchError(f"d{i + 1} o d{i} != 0")
        self._hh_ranks: Dict[int, int] = {}
        self._cob_solvers: Dict[int, PreparedSolver] = {}
        self._canonical_cache: Dict[int, "CanonicalBasis"] = {}

    # -- vectors -------------------------------------------------------------

    def zero_vector(self, degree: int) -> list:
        return [self.table.field.zero] * self.spaces[degree].dim

    def vector_from_terms(self, degree: int, terms: Dict[Tuple[int, int], object]) -> list:
        space = self.spaces[degree]
        v = self.zero_vector(degree)
        F = self.table.field
        for key, c in terms.items():
            v[space.pos[key]] = F(c)
        return v

    def vector_from_components(self, degree: int, comps: Dict[int, dict]) -> list:
        """Build a vector from {component: algebra element} values."""
        terms = {}
        for comp, elem in comps.items():
            for mid, c in elem.items():
                if c != 0:
                    terms[(comp, mid)] = c
        return self.vector_from_terms(degree, terms)

    def component_values(self, degree: int, vec: list) -> Dict[int, dict]:
        out: Dict[int, dict] = {}
        for (comp, mid), c in zip(self.spaces[degree].basis, vec):
            if c != 0:
                out.setdefault(comp, {})[mid] = c
        return out

    def scale_vector(self, degree: int, z: dict, vec: list) -> list:
        """Multiply every component value by the central element z."""
        comps = self.component_values(degree, vec)
        return self.vector_from_components(
            degree, {k: multiply(self.table, z, v) for k, v in comps.items()})

    def diagonal_vector(self, degree: int, elem: dict) -> list:
        """Embed a sum of oriented cycles into a loops-kind space."""
        comps: Dict[int, dict] = {}
        for mid, v in elem.items():
            comps.setdefault(self.table.basis[mid].source, {})[mid] = v
        return self.vector_from_components(degree, comps)

    def is_cocycle(self, degree: int, vec: list) -> bool:
        if degree >= self.maxdeg:
            raise ValueError("degree beyond the built window")
        return all(x == 0 for x in self.diffs[degree].matvec(vec))

    def coboundary_solve(self, degree: int, vec: list) -> Optional[list]:
        """A preimage under d^(degree-1), or None (degree 0: only zero)."""
        if degree == 0:
            return [] if all(x == 0 for x in vec) else None
        solver = self._cob_solvers.get(degree)
        if solver is None:
            solver = PreparedSolver(self.diffs[degree - 1])
            self._cob_solvers[degree] = solver
        return solver.solve(vec)

    # -- differentials ---------------------------------------------------------

    def _explicit_matrix(self, i: int) -> ExactMatrix:
        t = self.table
        src, tgt = self.spaces[i], self.spaces[i + 1]
        F = t.field
        mat = ExactMatrix.zero(F, tgt.dim, src.dim)
        step = i % 6
        for col, (comp, mid) in enumerate(src.basis):
            for (key, coeff) in self._explicit_image(step, comp, mid):
                r = tgt.pos[key]
                mat.rows[r][col] = F.add(mat.rows[r][col], F(coeff))
        return mat

    def _explicit_image(self, step: int, comp: int, mid: int):
        """Value terms ((component, monomial), coeff) of one basis cochain."""
        t = self.table
        out = []
        if step in (0, 3):  # loops -> parallels, untwisted vs twisted
            sign = -1 if step == 0 else 1
            for b in t.quiver.arrows_into[comp]:
                hit = t.mono_mul(t.arrow_ids[b.index], mid)
                if hit is not None:
                    out.append(((b.index, hit[1]), hit[0]))
            for b in t.quiver.arrows_from[comp]:
                hit = t.mono_mul(mid, t.arrow_ids[b.index])
                if hit is not None:
                    out.append(((b.index, hit[1]), sign * hit[0]))
        elif step in (1, 4):  # parallels -> loops
            a = t.quiver.arrows[comp]
            abar = t.arrow_ids[a.bar]
            right = t.mono_mul(mid, abar)
            left = t.mono_mul(abar, mid)
            # untwisted: p.abar + abar.p ; twisted: abar.p - p.abar
            if right is not None:
                out.append(((a.source, right[1]), right[0] if step == 1 else -right[0]))
            if left is not None:
                out.append(((a.target, left[1]), left[0]))
        elif step == 2:  # the zero map
            pass
        else:  # step 5: kills the radical, sends e_i to -sum_j dim(e_j L e_i) w_j
            if self.table.basis[mid].degree == 0:
                i_vertex = comp
                for j in t.quiver.vertices:
                    out.append(((j, t.socle_ids[j]), -t.cartan[j - 1][i_vertex - 1]))
        return out

    def _dual_matrix(self, i: int) -> ExactMatrix:
        t = self.table
        d = self.window.diffs[i + 1]
        src, tgt = self.spaces[i], self.spaces[i + 1]
        F = t.field
        mat = ExactMatrix.zero(F, tgt.dim, src.dim)
        for col, (comp, mid) in enumerate(src.basis):
            comp_pos = comp if src.kind == PARALLELS else comp - 1
            for k, terms in enumerate(d.values):
                tkey = (t.quiver.arrows[k].index if tgt.kind == PARALLELS
                        else k + 1)
                for k2, c, x, y in terms:
                    if k2 != comp_pos:
                        continue
                    lhs = t.mono_mul(x, mid)
                    if lhs is None:
                        continue
                    rhs = t.mono_mul(lhs[1], y)
                    if rhs is None:
                        continue
                    r = tgt.pos[(tkey, rhs[1])]
                    mat.rows[r][col] = F.add(
                        mat.rows[r][col], F(c * lhs[0] * rhs[0]))
        return mat

    # -- ranks and dimensions ----------------------------------------------------

    def diff_rank(self, i: int) -> int:
        if i < 0:
            return 0
        if i not in self._hh_ranks:
            rows = [{j: x for j, x in enumerate(row) if x != 0}
                    for row in self.diffs[i].rows]
            self._hh_ranks[i] = sparse_rank(rows, self.table.field)
        return self._hh_ranks[i]


def build_complex(t: AlgebraTable, f: NakayamaForm, maxdeg: int = 13,
                  window: Optional[ResolutionWindow] = None) -> CochainComplex:
    return CochainComplex(t, f, maxdeg, window)


def hh_dims(c: CochainComplex, upto: int) -> List[int]:
    """dim HH^i for i = 0..upto, by exact rank on the cochain complex."""
    if upto > c.maxdeg - 1:
        raise ValueError("upto exceeds maxdeg - 1")
    out = []
    for i in range(upto + 1):
        ker = c.spaces[i].dim - c.diff_rank(i)
        out.append(ker - c.diff_rank(i - 1))
    return out


# -- homology via the tensor complex ------------------------------------------


def _tensor_space(t: AlgebraTable, term) -> List[Tuple[int, int]]:
    basis = []
    for k, (s, tt) in enumerate(term.summands):
        basis.extend((k, m.mid) for m in t.basis
                     if m.source == tt and m.target == s)
    return basis


def _tensor_matrix(t: AlgebraTable, w: ResolutionWindow, m: int) -> ExactMatrix:
    """Induced map L (x) P^-m -> L (x) P^-(m+1-1): z at (s,t) -> sum y z x."""
    F = t.field
    src = _tensor_space(t, w.terms[m])
    tgt = _tensor_space(t, w.terms[m - 1])
    tgt_pos = {k: r for r, k in enumerate(tgt)}
    mat = ExactMatrix.zero(F, len(tgt), len(src))
    d = w.diffs[m]
    for col, (k, z) in enumerate(src):
        for k2, c, x, y in d.values[k]:
            lhs = t.mono_mul(y, z)
            if lhs is None:
                continue
            rhs = t.mono_mul(lhs[1], x)
            if rhs is None:
                continue
            r = tgt_pos[(k2, rhs[1])]
            mat.rows[r][col] = F.add(mat.rows[r][col], F(c * lhs[0] * rhs[0]))
    return mat


def homology_dims(c: CochainComplex, upto: int) -> List[int]:
    """dim HH_i for i = 0..upto, from the tensor complex over the window."""
    t, w = c.table, c.window
    if upto + 1 > w.depth:
        raise ValueError("window too shallow")
    ranks = [0]
    for m in range(1, upto + 2):
        mat = _tensor_matrix(t, w, m)
        rows = [{j: x for j, x in enumerate(row) if x != 0} for row in mat.rows]
        ranks.append(sparse_rank(rows, t.field))
    dims = []
    for i in range(upto + 1):
        total = len(_tensor_space(t, w.terms[i]))
        dims.append(total - ranks[i] - ranks[i + 1])
    return dims


def commutator_quotient_dim(t: AlgebraTable) -> int:
    """dim L/[L,L], an independent cross-check of the homology degree 0."""
    rows = []
    for m1 in t.basis:
        for m2 in t.basis:
            ab = t.mono_mul(m1.mid, m2.mid)
            ba = t.mono_mul(m2.mid, m1.mid)
            row: dict = {}
            if ab is not None:
                row[ab[1]] = row.get(ab[1], 0) + ab[0]
            if ba is not None:
                row[ba[1]] = row.get(ba[1], 0) - ba[0]
            row = {k: v for k, v in row.items() if v != 0}
            if row:
                rows.append(row)
    return t.dim - sparse_rank(rows, t.field)


def cyclic_dims(c: CochainComplex, upto: int) -> Tuple[List[int], List[int]]:
    """Cyclic homology dimensions (characteristic zero only).

    Returns (HC dims, Connes image dims B^i).  B^0 = dim HH_0 - n and
    B^i = dim HH_i - B^(i-1) by exactness of the Connes sequence; then
    HC_i = HC_i(semisimple part) + B^i.  The computed B^i are verified to
    be n for even i and 0 for odd i.
    """
    t = c.table
    if t.field.characteristic != 0:
        raise UnsupportedCharacteristicError(
            "cyclic homology dimensions are computed in characteristic 0 only")
    n = t.n
    hh = homology_dims(c, upto)
    b = [hh[0] - n]
    for i in range(1, upto + 1):
        b.append(hh[i] - b[i - 1])
    for i, bi in enumerate(b[: upto + 1]):
        expected = n if i % 2 == 0 else 0
        if bi != expected:
            raise CanonicalBasisError(f"Connes image bookkeeping fails at {i}")
    hc = [(n if i % 2 == 0 else 0) + b[i] for i in range(upto + 1)]
    return hc, b[: upto + 1]


# -- canonical cocycles ---------------------------------------------------------


@dataclass
class CanonicalBasis:
    degree: int
    labels: List[str]
    vectors: List[list]


def canonical_cocycles(c: CochainComplex, degree: int) -> CanonicalBasis:
    """The canonical representative cocycles in V^degree.

    Degrees 0..6 carry the fundamental families
      0: 1, x0^k, w_i          1: x0^k y        2: z_k = e_k
      3: t_k = w_k             4: x0^k gamma    5: x0^k y.gamma
      6: x0^k h
    and beyond 6 the same vectors are reused with an h-power label, the
    complex being literally six-periodic.  Each family is verified to
    consist of cocycles independent modulo coboundaries.
    """
    t = c.table
    n = t.n
    if degree in c._canonical_cache:
        return c._canonical_cache[degree]
    if degree > 6:
        m = (degree - 1) // 6
        base = canonical_cocycles(c, degree - 6 * m)
        labels = [f"{lab}*h^{m}" if m > 1 else f"{lab}*h" for lab in base.labels]
        out = CanonicalBasis(degree, labels, base.vectors)
        c._canonical_cache[degree] = out
        return out

    powers = [x0_element(t, k) for k in range(n)]
    if degree == 0:
        labels = ["1"] + [f"x0^{k}" if k > 1 else "x0" for k in range(1, n)] + \
                 [f"x{i}" for i in range(1, n + 1)]
        elems = [t.unit()] + powers[1:] + socle_basis(t)
        vectors = [c.diagonal_vector(0, z) for z in elems]
    elif degree == 1:
        yhat = {a.index: t.monomial_element(t.arrow_ids[a.index])
                for a in t.quiver.arrows}
        vectors, labels = [], []
        for k in range(n):
            comps = {comp: multiply(t, powers[k], val) for comp, val in yhat.items()}
            vectors.append(c.vector_from_components(1, comps))
            labels.append(_x0_label(k, "y"))
    elif degree == 2:
        labels = [f"z{k}" for k in range(1, n + 1)]
        vectors = [c.vector_from_terms(2, {(k, t.e_ids[k]): 1})
                   for k in range(1, n + 1)]
    elif degree == 3:
        labels = [f"t{k}" for k in range(1, n + 1)]
        vectors = [c.vector_from_terms(3, {(k, t.socle_ids[k]): 1})
                   for k in range(1, n + 1)]
    elif degree == 4:
        vectors, labels = [], []
        for k in range(n):
            val = multiply(t, powers[k], t.monomial_element(t.e_ids[1]))
            vectors.append(c.vector_from_components(4, {0: val}))
            labels.append(_x0_label(k, "gamma"))
    elif degree == 5:
        eps = t.monomial_element(t.arrow_ids[0])
        vectors, labels = [], []
        for k in range(n):
            val = multiply(t, powers[k], eps)
            vectors.append(c.vector_from_components(5, {1: val}))
            labels.append(_x0_label(k, "y.gamma"))
    else:
        vectors, labels = [], []
        for k in range(n):
            z = powers[k] if k else t.unit()
            vectors.append(c.diagonal_vector(6, z))
            labels.append(_x0_label(k, "h"))

    for lab, v in zip(labels, vectors):
        if not c.is_cocycle(degree, v):
            raise CanonicalBasisError(f"{lab} is not a cocycle in degree {degree}")
    _check_independent_mod_coboundaries(c, degree, vectors, labels)
    out = CanonicalBasis(degree, labels, vectors)
    c._canonical_cache[degree] = out
    return out


def _x0_label(k: int, gen: str) -> str:
    if k == 0:
        return gen
    if k == 1:
        return f"x0*{gen}"
    return f"x0^{k}*{gen}"


def _check_independent_mod_coboundaries(c, degree, vectors, labels):
    F = c.table.field
    rows = []
    for v in vectors:
        rows.append({j: x for j, x in enumerate(v) if x != 0})
    base_rank = c.diff_rank(degree - 1)
    if degree > 0:
        for row in c.diffs[degree - 1].transpose().rows:
            d = {j: x for j, x in enumerate(row) if x != 0}
            if d:
                rows.append(d)
    total = sparse_rank(rows, F)
    if total != len(vectors) + base_rank:
        raise CanonicalBasisError(
            f"canonical cocycles of degree {degree} ({labels}) are dependent "
            f"modulo coboundaries")


@dataclass
class ZModuleReport:
    socle_kills: bool
    x0_kills_2_3: bool
    x0_power_survives: bool
    failures: List[str] = dc_field(default_factory=list)

    @property
    def ok(self):
        return self.socle_kills and self.x0_kills_2_3 and self.x0_power_survives

    def serialize(self):
        return {"socle_kills": self.socle_kills,
                "x0_kills_2_3": self.x0_kills_2_3,
                "x0_power_survives": self.x0_power_survives,
                "failures": self.failures, "ok": self.ok}


def zmodule_checks(c: CochainComplex) -> ZModuleReport:
    """Module structure of positive cohomology over the center.

    Socle elements annihilate every positive degree; x0 annihilates degrees
    congruent to 2 or 3 mod 6; x0^(n-1) times the cyclic generator survives
    in the other positive degrees.
    """
    t = c.table
    n = t.n
    failures = []
    socle = socle_basis(t)
    degrees = range(1, min(c.maxdeg - 1, 12) + 1)

    socle_ok = True
    for j in degrees:
        basis = canonical_cocycles(c, j)
        for lab, v in zip(basis.labels, basis.vectors):
            for i, w in enumerate(socle, start=1):
                prod = c.scale_vector(j, w, v)
                if c.coboundary_solve(j, prod) is None:
                    socle_ok = False
                    failures.append(f"x{i}*{lab} not a coboundary in degree {j}")

    x0 = x0_element(t, 1)
    x0_23_ok = True
    for j in degrees:
        if j % 6 not in (2, 3):
            continue
        basis = canonical_cocycles(c, j)
        for lab, v in zip(basis.labels, basis.vectors):
            prod = c.scale_vector(j, x0, v)
            if c.coboundary_solve(j, prod) is None:
                x0_23_ok = False
                failures.append(f"x0*{lab} not a coboundary in degree {j}")

    survive_ok = True
    top = x0_element(t, n - 1)
    for j in degrees:
        if j % 6 in (2, 3):
            continue
        gen = canonical_cocycles(c, j).vectors[0]
        prod = c.scale_vector(j, top, gen)
        if c.coboundary_solve(j, prod) is not None:
            survive_ok = False
            failures.append(f"x0^{n - 1} * generator is a coboundary in degree {j}")

    return ZModuleReport(socle_ok, x0_23_ok, survive_ok, failures)
