"""Yoneda products by chain-map lifting along the bimodule resolution.

A cocycle in V^j is a bimodule map P^-j -> L; lifting it produces a chain
map segment f_0..f_s with u o f_0 the cocycle and d o f_k = f_{k-1} o d.
Each f_k is found by solving a linear system on the generators.  The
resolution is graded with degree-0 differentials once each term's
generators are assigned their internal degree, so a homogeneous cocycle
lifts within a single graded piece of each Hom space; the solver exploits
this and additionally splits by source summand, which keeps every system
small.  Products of classes are compositions of a cochain with a lift of
the other factor, identified in the canonical cohomology bases afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .algebra import AlgebraTable, elem_add, elem_scale, multiply
from .cochain import CanonicalBasis, CochainComplex, PARALLELS, canonical_cocycles
from .exactla import ExactMatrix, PreparedSolver
from .resolution import BimoduleMap, ResolutionWindow, compose


class NotACocycleError(RuntimeError):
    pass


class LiftFailedError(RuntimeError):
    """Inconsistent lifting system; impossible over a certified-exact window."""


class IdentificationError(RuntimeError):
    """A cocycle failed to decompose over the canonical basis plus coboundaries."""


class CMatrixMismatchError(RuntimeError):
    pass


@dataclass
class CohomologyClass:
    degree: int
    coords: tuple
    labels: tuple

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def nonzero_items(self):
        return [(lab, c) for lab, c in zip(self.labels, self.coords) if c != 0]

    def __str__(self):
        items = self.nonzero_items()
        if not items:
            return "0"
        return " + ".join(f"{c}*{lab}" if c != 1 else lab for lab, c in items)


@dataclass
class ChainMapSegment:
    base_degree: int
    maps: List[BimoduleMap]   # maps[k]: P^-(base_degree+k) -> P^-k


class YonedaEngine:
    """Caches lifts of cocycles and computes products in canonical coordinates."""

    def __init__(self, cx: CochainComplex):
        self.cx = cx
        self.table: AlgebraTable = cx.table
        self.window: ResolutionWindow = cx.window
        self._canonical: Dict[int, CanonicalBasis] = {}
        self._identify_solvers: Dict[int, PreparedSolver] = {}
        self._lift_cache: Dict[tuple, ChainMapSegment] = {}
        self._gens: Optional[List[Tuple[str, int, list]]] = None

    # -- canonical bases ----------------------------------------------------

    def canonical(self, degree: int) -> CanonicalBasis:
        if degree not in self._canonical:
            self._canonical[degree] = canonical_cocycles(self.cx, degree)
        return self._canonical[degree]

    def generators(self) -> List[Tuple[str, int, list]]:
        """Named cocycle representatives of the ring generators.

        Degree 0 generators are the central elements; the positive-degree
        ones are y, z_1..z_n, t_1..t_n, gamma and h.
        """
        if self._gens is None:
            n = self.table.n
            gens = [("y", 1, self.canonical(1).vectors[0])]
            gens += [(f"z{k}", 2, self.canonical(2).vectors[k - 1]) for k in range(1, n + 1)]
            gens += [(f"t{k}", 3, self.canonical(3).vectors[k - 1]) for k in range(1, n + 1)]
            gens += [("gamma", 4, self.canonical(4).vectors[0])]
            gens += [("h", 6, self.canonical(6).vectors[0])]
            self._gens = gens
        return self._gens

    def generator_vector(self, name: str) -> Tuple[int, list]:
        for gname, deg, vec in self.generators():
            if gname == name:
                return deg, vec
        raise KeyError(name)

    # -- lifting ------------------------------------------------------------

    def lift(self, vec: list, degree: int, steps: int,
             variable_order: str = "forward") -> ChainMapSegment:
        """Chain-map segment over the given cocycle, solving step by step."""
        cx = self.cx
        if not cx.is_cocycle(degree, vec):
            raise NotACocycleError(f"input of degree {degree} is not a cocycle")
        key = (degree, tuple(vec), variable_order)
        seg = self._lift_cache.get(key)
        if seg is None:
            seg = ChainMapSegment(degree, [])
            self._lift_cache[key] = seg
        self._extend(seg, vec, steps, variable_order)
        return seg

    def _extend(self, seg: ChainMapSegment, vec: list, steps: int, variable_order: str):
        w = self.window
        degree = seg.base_degree
        if degree + steps > w.depth:
            raise ValueError("window too shallow for the requested lift")
        while len(seg.maps) <= steps:
            k = len(seg.maps)
            if k == 0:
                rhs_by_summand = self._cochain_rhs(degree, vec)
            else:
                comp = compose(seg.maps[k - 1], w.diffs[degree + k]).normalized()
                rhs_by_summand = comp.values
            seg.maps.append(self._solve_step(degree, k, rhs_by_summand, variable_order))

    def _cochain_rhs(self, degree: int, vec: list):
        """Cochain components reshaped as value-term lists per source summand."""
        cx, t = self.cx, self.table
        term = self.window.terms[degree]
        comps = cx.component_values(degree, vec)
        values = []
        for k, (s, tt) in enumerate(term.summands):
            comp_key = t.quiver.arrows[k].index if cx.spaces[degree].kind == PARALLELS else k + 1
            elem = comps.get(comp_key, {})
            values.append([(0, c, mid, None) for mid, c in sorted(elem.items())])
        return values

    def _solve_step(self, degree: int, k: int, rhs_by_summand,
                    variable_order: str) -> BimoduleMap:
        """Solve d_k o f = rhs (k >= 1) or u o f = cochain (k = 0)."""
        w, t, F = self.window, self.table, self.table.field
        src_term = w.terms[degree + k]
        tgt_term = w.terms[k]
        values: List[list] = []
        for ks, (s, tt) in enumerate(src_term.summands):
            rhs_terms = rhs_by_summand[ks]
            # group by value degree; a graded cocycle lifts within one piece,
            # a mixed one is handled additively
            parts: Dict[int, list] = {}
            for term in rhs_terms:
                if k == 0:
                    _, c, mid, _ = term
                    dv = t.basis[mid].degree
                else:
                    _, c, x, y = term
                    dv = t.basis[x].degree + t.basis[y].degree
                parts.setdefault(dv, []).append(term)
            out_terms: list = []
            degrees = sorted(parts) if parts else []
            for dv in degrees:
                out_terms.extend(
                    self._solve_block(degree, k, ks, s, tt, dv, parts[dv],
                                      variable_order))
            values.append(out_terms)
        return BimoduleMap(t, src_term, tgt_term, values).normalized()

    def _solve_block(self, degree, k, ks, s, tt, rhs_value_degree, rhs_terms,
                     variable_order):
        """One graded linear solve for the values at a single source summand."""
        w, t, F = self.window, self.table, self.table.field
        tgt_term = w.terms[k]
        # the differential raises value degree by g(k) - g(k-1), so the
        # unknown lives that much below the right-hand side
        if k == 0:
            unknown_degree = rhs_value_degree
        else:
            unknown_degree = rhs_value_degree - (w.gen_degrees[k] - w.gen_degrees[k - 1])
        unknowns = []
        for kt, (u, v) in enumerate(tgt_term.summands):
            for x in t.basis:
                if x.source != s or x.target != u:
                    continue
                for y in t.basis:
                    if y.source != v or y.target != tt:
                        continue
                    if x.degree + y.degree == unknown_degree:
                        unknowns.append((kt, x.mid, y.mid))
        if k == 0:
            eq_keys = [m.mid for m in t.basis
                       if m.source == s and m.target == tt
                       and m.degree == rhs_value_degree]
            rhs_vec = {mid: c for _, c, mid, _ in rhs_terms}
        else:
            next_term = w.terms[k - 1]
            eq_keys = []
            for kn, (u, v) in enumerate(next_term.summands):
                for x in t.basis:
                    if x.source != s or x.target != u:
                        continue
                    for y in t.basis:
                        if y.source != v or y.target != tt:
                            continue
                        if x.degree + y.degree == rhs_value_degree:
                            eq_keys.append((kn, x.mid, y.mid))
            rhs_vec = {}
            for kn, c, x, y in rhs_terms:
                rhs_vec[(kn, x, y)] = F.add(rhs_vec.get((kn, x, y), F.zero), F(c))
        eq_pos = {key: r for r, key in enumerate(eq_keys)}
        for key in rhs_vec:
            if key not in eq_pos and rhs_vec[key] != 0:
                raise LiftFailedError("right-hand side outside the graded piece")
        mat = ExactMatrix.zero(F, len(eq_keys), len(unknowns))
        for col, (kt, x, y) in enumerate(unknowns):
            for key, c in self._composed_column(k, kt, x, y):
                mat.rows[eq_pos[key]][col] = F.add(mat.rows[eq_pos[key]][col], F(c))
        b = [rhs_vec.get(key, F.zero) for key in eq_keys]
        order = None
        if variable_order == "reversed":
            order = list(range(len(unknowns)))[::-1]
        sol = mat.solve(b, variable_order=order)
        if sol is None:
            raise LiftFailedError(
                f"lifting system inconsistent at step {k}, summand {ks}")
        return [(kt, c, x, y) for (kt, x, y), c in zip(unknowns, sol) if c != 0]

    def _composed_column(self, k, kt, x, y):
        """Image of the elementary hom with value x (x) y at summand kt."""
        t = self.table
        out = []
        if k == 0:
            hit = t.mono_mul(x, y)
            if hit is not None:
                out.append((hit[1], hit[0]))
            return out
        for k2, c, xd, yd in self.window.diffs[k].values[kt]:
            lhs = t.mono_mul(x, xd)
            if lhs is None:
                continue
            rhs = t.mono_mul(yd, y)
            if rhs is None:
                continue
            out.append(((k2, lhs[1], rhs[1]), c * lhs[0] * rhs[0]))
        return out

    def verify_segment(self, seg: ChainMapSegment, vec: list) -> bool:
        """Symbolic check of the chain-map identities for a given segment."""
        w, t, cx = self.window, self.table, self.cx
        degree = seg.base_degree
        rhs0 = self._cochain_rhs(degree, vec)
        for ks, terms in enumerate(seg.maps[0].values):
            acc: dict = {}
            for kt, c, x, y in terms:
                hit = t.mono_mul(x, y)
                if hit is not None:
                    acc[hit[1]] = acc.get(hit[1], 0) + c * hit[0]
            want = {mid: c for _, c, mid, _ in rhs0[ks]}
            got = {m: t.field(c) for m, c in acc.items() if c != 0}
            want = {m: t.field(c) for m, c in want.items() if t.field(c) != 0}
            if got != want:
                return False
        for k in range(1, len(seg.maps)):
            lhs = compose(w.diffs[k], seg.maps[k])
            rhs = compose(seg.maps[k - 1], w.diffs[degree + k])
            if not lhs.equals(rhs):
                return False
        return True

    # -- products -------------------------------------------------------------

    def central_from_v0(self, vec: list) -> dict:
        comps = self.cx.component_values(0, vec)
        out: dict = {}
        for comp, elem in comps.items():
            out = elem_add(self.table, out, elem)
        return out

    def cup_vec(self, xvec: list, dx: int, yvec: list, dy: int,
                variable_order: str = "forward") -> list:
        """Cochain representative of the product of two cocycles."""
        cx, t = self.cx, self.table
        if dx + dy > cx.maxdeg - 1:
            raise ValueError("product degree exceeds the window")
        if dx == 0:
            return cx.scale_vector(dy, self.central_from_v0(xvec), yvec)
        if dy == 0:
            return cx.scale_vector(dx, self.central_from_v0(yvec), xvec)
        seg = self.lift(yvec, dy, dx, variable_order)
        f = seg.maps[dx]
        xcomps = cx.component_values(dx, xvec)
        src_kind = cx.spaces[dx].kind
        result: Dict[int, dict] = {}
        out_term = self.window.terms[dx + dy]
        out_kind = cx.spaces[dx + dy].kind
        for ks in range(len(out_term.summands)):
            acc: dict = {}
            for kt, c, x, y in f.values[ks]:
                comp_key = (t.quiver.arrows[kt].index if src_kind == PARALLELS
                            else kt + 1)
                val = xcomps.get(comp_key)
                if not val:
                    continue
                prod = multiply(t, multiply(t, t.monomial_element(x), val),
                                t.monomial_element(y))
                acc = elem_add(t, acc, elem_scale(t, c, prod))
            if acc:
                out_key = (t.quiver.arrows[ks].index if out_kind == PARALLELS
                           else ks + 1)
                result[out_key] = acc
        return cx.vector_from_components(dx + dy, result)

    def identify(self, vec: list, degree: int) -> CohomologyClass:
        """Coordinates over the canonical basis, modulo coboundaries."""
        cx, F = self.cx, self.table.field
        if not cx.is_cocycle(degree, vec):
            raise NotACocycleError(f"identify: input of degree {degree} is not a cocycle")
        basis = self.canonical(degree)
        solver = self._identify_solvers.get(degree)
        if solver is None:
            columns = [list(v) for v in basis.vectors]
            if degree > 0:
                d = cx.diffs[degree - 1]
                for j in range(d.ncols):
                    columns.append([d.rows[r][j] for r in range(d.nrows)])
            solver = PreparedSolver(ExactMatrix.from_columns(F, columns))
            self._identify_solvers[degree] = solver
        sol = solver.solve(vec)
        if sol is None:
            raise IdentificationError(
                f"cocycle of degree {degree} not in the canonical span")
        coords = tuple(sol[: len(basis.vectors)])
        return CohomologyClass(degree, coords, tuple(basis.labels))

    def cup(self, xvec: list, dx: int, yvec: list, dy: int) -> CohomologyClass:
        return self.identify(self.cup_vec(xvec, dx, yvec, dy), dx + dy)

    def class_vector(self, cls: CohomologyClass) -> list:
        """A representative cocycle of a class given in canonical coordinates."""
        cx, F = self.cx, self.table.field
        basis = self.canonical(cls.degree)
        vec = cx.zero_vector(cls.degree)
        for c, bvec in zip(cls.coords, basis.vectors):
            if c != 0:
                vec = [F.add(a, F.mul(F(c), b)) for a, b in zip(vec, bvec)]
        return vec

    def product_table(self) -> Dict[Tuple[str, str], CohomologyClass]:
        """All ordered products of the positive-degree ring generators."""
        out = {}
        gens = self.generators()
        for name1, d1, v1 in gens:
            for name2, d2, v2 in gens:
                if d1 + d2 > self.cx.maxdeg - 1:
                    continue
                out[(name1, name2)] = self.cup(v1, d1, v2, d2)
        return out

    # -- the C matrix ----------------------------------------------------------

    def c_matrix(self) -> "CMatrix":
        return c_matrix(self.table, engine=self)


@dataclass
class CMatrix:
    entries: List[List[int]]
    rank: int                  # over the engine's field
    det: int
    adjacency_identity: bool

    def serialize(self):
        return {"entries": self.entries, "rank": self.rank, "det": self.det,
                "det_sign": 0 if self.det == 0 else (1 if self.det > 0 else -1),
                "adjacency_identity": self.adjacency_identity}


def combinatorial_c_matrix(t: AlgebraTable) -> List[List[int]]:
    """Entries sum (-1)^deg(x) deg(x) over the basis monomials of e_j B e_k."""
    n = t.n
    C = [[0] * n for _ in range(n)]
    for m in t.basis:
        C[m.source - 1][m.target - 1] += (-1) ** m.degree * m.degree
    return C


def closed_form_c_matrix(n: int) -> List[List[int]]:
    C = [[0] * n for _ in range(n)]
    for j in range(1, n + 1):
        for k in range(j, n + 1):
            val = (-1) ** (k - j + 1) * (2 * j - 1) * (n - k + 1)
            C[j - 1][k - 1] = val
            C[k - 1][j - 1] = val
    return C


def adjacency_matrix(n: int) -> List[List[int]]:
    D = [[0] * n for _ in range(n)]
    D[0][0] = 1
    for i in range(n - 1):
        D[i][i + 1] = D[i + 1][i] = 1
    return D


def c_matrix(t: AlgebraTable, engine: Optional[YonedaEngine] = None) -> CMatrix:
    """The multiplication-by-y matrix, computed three independent ways.

    The combinatorial basis sum, the closed form, and (when an engine is
    supplied) the cup products y*z_k in the degree-3 canonical basis must
    agree entry for entry.
    """
    n = t.n
    comb = combinatorial_c_matrix(t)
    closed = closed_form_c_matrix(n)
    if comb != closed:
        raise CMatrixMismatchError(
            f"combinatorial and closed-form entries disagree: {comb} vs {closed}")
    F = t.field
    if engine is not None:
        ydeg, yvec = engine.generator_vector("y")
        for k in range(1, n + 1):
            zdeg, zvec = engine.generator_vector(f"z{k}")
            cls = engine.cup(yvec, ydeg, zvec, zdeg)
            for j in range(1, n + 1):
                if cls.coords[j - 1] != F(comb[j - 1][k - 1]):
                    raise CMatrixMismatchError(
                        f"cup product coordinate ({j},{k}) = {cls.coords[j - 1]}, "
                        f"expected {comb[j - 1][k - 1]}")
    rank = ExactMatrix(F, comb).rank()
    from .algebra import _det_int
    det = int(_det_int(comb))
    D = adjacency_matrix(n)
    ident = all(
        -sum(comb[i][k] * (2 * (k == j) + D[k][j]) for k in range(n))
        == (2 * n + 1) * (i == j)
        for i in range(n) for j in range(n))
    return CMatrix(comb, rank, det, ident)


# -- h-periodicity checks ------------------------------------------------------


@dataclass
class StableReport:
    h_bijective: Dict[int, bool]
    degree0_kernel_is_socle: bool
    failures: List[str]

    @property
    def ok(self):
        return all(self.h_bijective.values()) and self.degree0_kernel_is_socle

    def serialize(self):
        return {"h_bijective": {str(k): v for k, v in self.h_bijective.items()},
                "degree0_kernel_is_socle": self.degree0_kernel_is_socle,
                "failures": self.failures, "ok": self.ok}


def stable_structure_check(engine: YonedaEngine) -> StableReport:
    """Multiplication by h: bijective on degrees 1..6, kernel Soc on degree 0."""
    t, F = engine.table, engine.table.field
    n = t.n
    hdeg, hvec = engine.generator_vector("h")
    failures: List[str] = []
    bij: Dict[int, bool] = {}
    for i in range(1, 7):
        basis = engine.canonical(i)
        cols = []
        for vec in basis.vectors:
            cls = engine.cup(vec, i, hvec, hdeg)
            cols.append(list(cls.coords))
        rank = ExactMatrix.from_columns(F, cols).rank()
        bij[i] = rank == len(basis.vectors)
        if not bij[i]:
            failures.append(f"h-multiplication drops rank in degree {i}")
    basis0 = engine.canonical(0)
    cols = []
    for vec in basis0.vectors:
        cls = engine.cup(vec, 0, hvec, hdeg)
        cols.append(list(cls.coords))
    mat = ExactMatrix.from_columns(F, cols)
    kernel = mat.kernel_basis()
    # the kernel must be exactly the span of the socle classes x_1..x_n
    socle_cols = []
    for i in range(1, n + 1):
        col = [F.zero] * len(basis0.labels)
        col[basis0.labels.index(f"x{i}")] = F.one
        socle_cols.append(col)
    ok = len(kernel) == n
    if ok:
        span = ExactMatrix.from_columns(F, socle_cols)
        ok = all(span.solve(v) is not None for v in kernel)
    if not ok:
        failures.append("degree-0 kernel of h-multiplication is not the socle span")
    return StableReport(bij, ok, failures)
