"""Shared build contexts, cached across the whole test session."""

import sys
from dataclasses import replace
from types import SimpleNamespace

from preproj_hh.algebra import AlgebraTable, build_algebra
from preproj_hh.cochain import build_complex
from preproj_hh.exactla import FieldSpec
from preproj_hh.nakayama import associated_form
from preproj_hh.yoneda import YonedaEngine

sys.setrecursionlimit(10000)

_CTX = {}


def context(n: int, char: int = 0, maxdeg: int = 13) -> SimpleNamespace:
    """Algebra, form, resolution window, cochain complex and product engine."""
    key = (n, char, maxdeg)
    if key not in _CTX:
        field = FieldSpec(char)
        table = build_algebra(n, field)
        form = associated_form(table)
        cx = build_complex(table, form, maxdeg)
        _CTX[key] = SimpleNamespace(
            n=n, field=field, table=table, form=form,
            window=cx.window, cx=cx, engine=YonedaEngine(cx))
    return _CTX[key]


def variant_socle_table(n: int, char: int = 0) -> AlgebraTable:
    """The basis variant with unsigned top diagonal monomials.

    Obtained from the canonical table by rescaling the socle basis elements
    by their canonical signs; products pick up the corresponding sign
    factors.  This is the fixture for the failing dualizability check.
    """
    base = build_algebra(n, FieldSpec(char))
    sigma = {}
    for mid in range(base.dim):
        m = base.basis[mid]
        if m.degree == 2 * n - 1 and m.source == m.target:
            sigma[mid] = m.sign
    s = lambda mid: sigma.get(mid, 1)

    basis = [replace(m, sign=1) if m.mid in sigma else m for m in base.basis]
    product = []
    for m1 in range(base.dim):
        row = {}
        for m2, (c, m3) in base.product[m1].items():
            row[m2] = (c * s(m1) * s(m2) * s(m3), m3)
        product.append(row)
    act = {}
    for (a, mid), hit in base.act.items():
        if hit is None:
            act[(a, mid)] = None
        else:
            c, m3 = hit
            act[(a, mid)] = (c * s(mid) * s(m3), m3)
    return AlgebraTable(n, base.field, basis, product, act)
