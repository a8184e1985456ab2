import itertools

import pytest

from preproj_hh.algebra import x0_element
from preproj_hh.exactla import ExactMatrix, FieldSpec
from preproj_hh.yoneda import (CMatrixMismatchError, NotACocycleError,
                               adjacency_matrix, c_matrix,
                               closed_form_c_matrix, combinatorial_c_matrix,
                               stable_structure_check)
from conftest import context


def gen(ctx, name):
    return ctx.engine.generator_vector(name)


def classes_equal(c1, c2):
    return c1.degree == c2.degree and c1.coords == c2.coords


def test_lift_rejects_non_cocycles():
    ctx = context(2)
    t, cx = ctx.table, ctx.cx
    # a single arrow in the parallels space is not an R^*-cocycle
    vec = cx.vector_from_terms(1, {(1, t.arrow_ids[1]): 1})
    assert not cx.is_cocycle(1, vec)
    with pytest.raises(NotACocycleError):
        ctx.engine.lift(vec, 1, 1)
    with pytest.raises(NotACocycleError):
        ctx.engine.identify(vec, 1)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_lift_of_h_is_identity_pattern(n):
    ctx = context(n)
    t = ctx.table
    dh, hv = gen(ctx, "h")
    seg = ctx.engine.lift(hv, dh, 2)
    for k in (0, 1, 2):
        values = seg.maps[k].normalized().values
        for ks, terms in enumerate(values):
            s, tt = seg.maps[k].source.summands[ks]
            assert terms == [(ks, 1, t.e_ids[s], t.e_ids[tt])]


@pytest.mark.parametrize("n", [2, 3])
def test_lift_of_gamma_step_one_is_loop_indicator(n):
    ctx = context(n)
    t = ctx.table
    dg, gv = gen(ctx, "gamma")
    seg = ctx.engine.lift(gv, dg, 1)
    values = seg.maps[1].normalized().values
    for ks, terms in enumerate(values):
        if ks == 0:
            assert terms == [(0, 1, t.e_ids[1], t.e_ids[1])]
        else:
            assert terms == []


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("char", [0, 7])
def test_lift_segments_verify(n, char):
    ctx = context(n, char)
    for name in ["y", "z1", "gamma", "h"]:
        d, v = gen(ctx, name)
        seg = ctx.engine.lift(v, d, min(6, 12 - d))
        assert ctx.engine.verify_segment(seg, v)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_identify_canonical_unit_vectors(n):
    ctx = context(n)
    for degree in range(0, 7):
        basis = ctx.engine.canonical(degree)
        for idx, vec in enumerate(basis.vectors):
            cls = ctx.engine.identify(vec, degree)
            expected = tuple(ctx.table.field(1 if i == idx else 0)
                             for i in range(len(basis.vectors)))
            assert cls.coords == expected


@pytest.mark.parametrize("n", [2, 3])
def test_identify_socle_and_eps_power_products(n):
    ctx = context(n)
    t, cx, eng = ctx.table, ctx.cx, ctx.engine
    # w_1 as a degree-5 cocycle is the product x0^(n-1) y gamma
    vec = cx.vector_from_terms(5, {(1, t.socle_ids[1]): 1})
    cls = eng.identify(vec, 5)
    dy, yv = gen(ctx, "y")
    dg, gv = gen(ctx, "gamma")
    prod = eng.cup_vec(yv, dy, gv, dg)
    prod = cx.scale_vector(5, x0_element(t, n - 1), prod)
    assert classes_equal(cls, eng.identify(prod, 5))
    assert cls.nonzero_items() == [(("x0^" + str(n - 1) if n > 2 else "x0")
                                    + "*y.gamma", t.field.one)]
    # eps^(2n-2) as a degree-6 cocycle is x0^(n-1) h
    mid = t.by_ijd[(1, 1, 2 * n - 2)]
    vec6 = cx.vector_from_terms(6, {(1, mid): 1})
    cls6 = eng.identify(vec6, 6)
    assert [lab for lab, _ in cls6.nonzero_items()] == [
        ("x0^" + str(n - 1) if n > 2 else "x0") + "*h"]


@pytest.mark.parametrize("n,char", [(2, 0), (3, 0), (2, 5), (3, 7)])
def test_product_lemmas(n, char):
    ctx = context(n, char)
    eng = ctx.engine
    F = ctx.table.field
    table = eng.product_table()

    def coords_of(label, degree):
        basis = eng.canonical(degree)
        return tuple(F(1 if lab == label else 0) for lab in basis.labels)

    top = "x0^" + str(n - 1) if n > 2 else ("x0" if n == 2 else "")
    prefix = top + "*" if top else ""
    assert table[("y", "y")].is_zero()
    assert table[("gamma", "gamma")].coords == coords_of("z1*h", 8)
    for j in range(1, n + 1):
        expected = [(F((-1) ** j * (n - j + 1)), f"{prefix}h")]
        got = [(c, lab) for lab, c in table[(f"z{j}", "gamma")].nonzero_items()]
        expected = [(c, lab) for c, lab in expected if c != 0]
        assert got == expected
    for j in range(1, n + 1):
        for k in range(1, n + 1):
            cls = table[(f"z{j}", f"t{k}")]
            if j == k:
                assert cls.nonzero_items() == [(f"{prefix}y.gamma", F.one)]
            else:
                assert cls.is_zero()
    for j in range(1, n + 1):
        cls = table[(f"t{j}", "gamma")]
        if j == 1:
            assert [lab for lab, _ in cls.nonzero_items()] == [f"{prefix}y*h"]
        else:
            assert cls.is_zero()
    # z_j z_k = (-1)^(k-j+1) (2j-1)(n-k+1) x0^(n-1) gamma for j <= k
    for j in range(1, n + 1):
        for k in range(j, n + 1):
            coeff = F((-1) ** (k - j + 1) * (2 * j - 1) * (n - k + 1))
            cls = table[(f"z{j}", f"z{k}")]
            if coeff == 0:
                assert cls.is_zero()
            else:
                assert cls.nonzero_items() == [(f"{prefix}gamma", coeff)]
    # degree-3 times odd degrees vanishes
    for j in range(1, n + 1):
        assert table[(f"t{j}", "y")].is_zero()
        assert table[("y", f"t{j}")].is_zero()
        for k in range(1, n + 1):
            assert table[(f"t{j}", f"t{k}")].is_zero()


@pytest.mark.parametrize("n,char", [(2, 0), (3, 0), (2, 5)])
def test_graded_commutativity(n, char):
    ctx = context(n, char)
    eng = ctx.engine
    F = ctx.table.field
    gens = eng.generators()
    for (n1, d1, v1), (n2, d2, v2) in itertools.combinations(gens, 2):
        if d1 + d2 > 12:
            continue
        ab = eng.cup(v1, d1, v2, d2)
        ba = eng.cup(v2, d2, v1, d1)
        sign = F((-1) ** (d1 * d2))
        assert ab.coords == tuple(F.mul(sign, c) for c in ba.coords)


def test_associativity_on_generator_triples():
    ctx = context(2)
    eng = ctx.engine
    gens = eng.generators()
    for (n1, d1, v1), (n2, d2, v2), (n3, d3, v3) in itertools.product(gens, repeat=3):
        if d1 + d2 + d3 > 12:
            continue
        left = eng.cup_vec(eng.cup_vec(v1, d1, v2, d2), d1 + d2, v3, d3)
        right = eng.cup_vec(v1, d1, eng.cup_vec(v2, d2, v3, d3), d2 + d3)
        cl = eng.identify(left, d1 + d2 + d3)
        cr = eng.identify(right, d1 + d2 + d3)
        assert cl.coords == cr.coords, (n1, n2, n3)


@pytest.mark.parametrize("n,char", [(2, 0), (2, 5), (3, 0)])
def test_lift_independence(n, char):
    # a permuted pivot rule yields different chain maps but identical classes
    ctx = context(n, char)
    eng = ctx.engine
    for left, right in [("y", "z1"), ("z1", "gamma"), ("y", "gamma"),
                        ("gamma", "gamma"), ("z1", "t1")]:
        dl, vl = gen(ctx, left)
        dr, vr = gen(ctx, right)
        c1 = eng.identify(eng.cup_vec(vl, dl, vr, dr), dl + dr)
        c2 = eng.identify(eng.cup_vec(vl, dl, vr, dr, variable_order="reversed"),
                          dl + dr)
        assert c1.coords == c2.coords


@pytest.mark.parametrize("n,char", [(2, 0), (3, 7)])
def test_central_scaling_commutes_with_cup(n, char):
    # lifting x0 * w is the x0-scaling of a lift of w, so the product with a
    # scaled class equals the scaled product; check it by direct computation
    ctx = context(n, char)
    eng, cx, t = ctx.engine, ctx.cx, ctx.table
    x0 = x0_element(t, 1)
    for left, right in [("y", "z1"), ("z1", "gamma"), ("y", "gamma")]:
        dl, vl = gen(ctx, left)
        dr, vr = gen(ctx, right)
        scaled_first = eng.cup_vec(vl, dl, cx.scale_vector(dr, x0, vr), dr)
        scaled_after = cx.scale_vector(dl + dr, x0, eng.cup_vec(vl, dl, vr, dr))
        assert (eng.identify(scaled_first, dl + dr).coords
                == eng.identify(scaled_after, dl + dr).coords)


@pytest.mark.parametrize("n,char", [(2, 0), (3, 0), (2, 5), (3, 7)])
def test_h_multiplication_is_coordinate_relabelling(n, char):
    ctx = context(n, char)
    eng = ctx.engine
    dh, hv = gen(ctx, "h")
    for degree in range(1, 7):
        basis = eng.canonical(degree)
        for idx, vec in enumerate(basis.vectors):
            cls = eng.cup(vec, degree, hv, dh)
            assert [c for c in cls.coords] == [
                eng.table.field(1 if i == idx else 0)
                for i in range(len(basis.vectors))]
    assert stable_structure_check(eng).ok


@pytest.mark.parametrize("n", range(1, 7))
def test_c_matrix_three_ways(n):
    ctx = context(n)
    cm = c_matrix(ctx.table, ctx.engine)
    assert cm.entries == closed_form_c_matrix(n) == combinatorial_c_matrix(ctx.table)
    assert cm.rank == n
    assert abs(cm.det) == (2 * n + 1) ** (n - 1)
    assert cm.adjacency_identity


def test_c_matrix_example_n2():
    cm = c_matrix(context(2).table, context(2).engine)
    assert cm.entries == [[-2, 1], [1, -3]]
    assert cm.det == 5


@pytest.mark.parametrize("n,p", [(1, 3), (2, 5), (3, 7), (7, 3), (7, 5)])
def test_c_matrix_rank_drops_in_modular_characteristic(n, p):
    assert (2 * n + 1) % p == 0
    table = context(n, p).table if n <= 3 else None
    if table is not None:
        cm = c_matrix(table)
        assert cm.rank == 1
    else:
        mat = ExactMatrix(FieldSpec(p), closed_form_c_matrix(n))
        assert mat.rank() == 1


def test_adjacency_matrix_shape():
    D = adjacency_matrix(3)
    assert D == [[1, 1, 0], [1, 0, 1], [0, 1, 0]]


def test_c_matrix_mismatch_detection(monkeypatch):
    # corrupting one computation route must be caught against the others
    import preproj_hh.yoneda as ymod
    ctx = context(2)
    monkeypatch.setattr(ymod, "combinatorial_c_matrix",
                        lambda table: [[-2, 1], [1, -2]])
    with pytest.raises(CMatrixMismatchError):
        ymod.c_matrix(ctx.table)
