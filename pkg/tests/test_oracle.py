import pytest

from preproj_hh.cochain import hh_dims
from preproj_hh.exactla import FieldSpec
from preproj_hh.oracle import BarComplex, BudgetExceededError, bar_dims, compare
from conftest import context


def test_bar_dims_single_vertex_through_degree_six():
    t = context(1).table
    assert bar_dims(t, 6) == [2, 1, 1, 1, 1, 1, 1]


def test_bar_dims_two_vertices_low_degrees():
    t = context(2).table
    assert bar_dims(t, 2) == [4, 2, 2]


def test_bar_degree_zero_is_the_center():
    for n in (1, 2):
        t = context(n).table
        assert bar_dims(t, 0)[0] == 2 * n


@pytest.mark.parametrize("char", [3, 5])
def test_bar_dims_prime_fields(char):
    t = context(1, char).table
    assert bar_dims(t, 4) == [2, 1, 1, 1, 1]


def test_budget_guard():
    t = context(2).table
    with pytest.raises(BudgetExceededError) as err:
        bar_dims(t, 4, budget=10000)
    assert err.value.degree == 4
    with pytest.raises(BudgetExceededError):
        bar_dims(context(3).table, 3, budget=10000)


def test_compare_matches_resolution():
    ctx = context(2)
    rep = compare(ctx.table, hh_dims(ctx.cx, 3), 3)
    assert rep.ok
    assert rep.bar == rep.resolution == [4, 2, 2, 2]
    assert rep.rank_field == "Q"
    assert rep.screen == rep.bar


def test_negative_control_perturbation_detected():
    t = context(1).table
    clean = bar_dims(t, 4)
    perturbed = bar_dims(t, 4, perturb_degree=2)
    assert perturbed != clean
    diff = [i for i, (a, b) in enumerate(zip(clean, perturbed)) if a != b]
    assert diff and min(diff) in (2, 3)


@pytest.mark.parametrize("n,degrees", [(1, (0, 1, 2, 3)), (2, (0, 1))])
def test_bar_differentials_compose_to_zero(n, degrees):
    from itertools import product as iproduct
    t = context(n).table
    bc = BarComplex(t)
    for k in degrees:
        rows_k = list(bc.differential_rows(k))
        next_keys = [(T, w) for T in iproduct(bc.reduced_basis, repeat=k + 1)
                     for w in range(t.dim)]
        next_rows = dict(zip(next_keys, bc.differential_rows(k + 1)))
        for row in rows_k:
            acc = {}
            for key, c in row.items():
                for key2, c2 in next_rows[key].items():
                    acc[key2] = acc.get(key2, 0) + c * c2
            assert all(v == 0 for v in acc.values())
