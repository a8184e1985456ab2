"""Nakayama bilinear form of the canonical basis, dual basis, dualizability.

The form is (x, y) = sum over vertices of the coefficient of w_i in x*y.
On the canonical basis the associated gram matrix has exactly one nonzero
entry per row, the partner map is an involution, and the matrix is
symmetric; `certify_dualizable` checks the three equivalent conditions of
the dualizable-basis criterion independently and reports witnesses for any
failure.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Dict, List, Tuple

from .algebra import AlgebraTable, elem_eq, multiply
from .exactla import ExactMatrix


class DegenerateFormError(RuntimeError):
    pass


@dataclass
class NakayamaForm:
    table: AlgebraTable
    gram: dict                       # mid -> {mid: scalar}, sparse rows
    dual: Dict[int, Tuple[object, int]]  # mid -> (scalar, mid) with b* = scalar * partner

    def pair(self, x: dict, y: dict):
        """Evaluate the form on two algebra elements."""
        t, F = self.table, self.table.field
        prod = multiply(t, x, y)
        s = F.zero
        for i in t.quiver.vertices:
            s = F.add(s, prod.get(t.socle_ids[i], F.zero))
        return s

    def dual_element(self, mid: int) -> dict:
        s, m = self.dual[mid]
        return {m: s}

    def gram_matrix(self) -> ExactMatrix:
        t, F = self.table, self.table.field
        return ExactMatrix(F, [[self.gram[b].get(c, F.zero) for c in range(t.dim)]
                               for b in range(t.dim)])

    def serialize(self) -> dict:
        return {"dual": [[mid, str(s), m] for mid, (s, m) in sorted(self.dual.items())]}


def associated_form(t: AlgebraTable) -> NakayamaForm:
    """Assemble the gram matrix on B x B and extract the dual basis.

    Nondegeneracy is certified structurally: every row must carry exactly one
    nonzero entry and the partner assignment must be a bijection.  If that
    structure ever failed, the fallback is an honest rank computation.
    """
    F = t.field
    gram: dict = {}
    for b in range(t.dim):
        row = {}
        for c in range(t.dim):
            hit = t.mono_mul(b, c)
            if hit is None:
                continue
            coeff, m = hit
            if m in t.socle_ids.values():
                row[c] = F(coeff)
        gram[b] = row

    partner = {}
    structural = all(len(row) == 1 for row in gram.values())
    if structural:
        for b, row in gram.items():
            partner[b] = next(iter(row))
        structural = sorted(partner.values()) == list(range(t.dim))
    if not structural:
        mat = ExactMatrix(F, [[gram[b].get(c, F.zero) for c in range(t.dim)]
                              for b in range(t.dim)])
        if mat.rank() < t.dim:
            raise DegenerateFormError("gram matrix is singular")
        raise DegenerateFormError("gram matrix nondegenerate but not monomial")

    dual = {b: (F.inv(gram[b][c]), c) for b, c in partner.items()}
    return NakayamaForm(table=t, gram=gram, dual=dual)


def dual_basis(f: NakayamaForm) -> Dict[int, Tuple[object, int]]:
    """The map b -> b* as {monomial id: (scalar, partner monomial id)}."""
    return dict(f.dual)


@dataclass
class DualizabilityReport:
    arrow_condition: bool        # a* a = w_{t(a)} for every arrow
    double_dual_condition: bool  # b** = b for every basis element
    symmetry_condition: bool     # the gram matrix is symmetric
    witnesses: List[str] = dataclass_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (self.arrow_condition and self.double_dual_condition
                and self.symmetry_condition)

    def serialize(self) -> dict:
        return {"arrow_condition": self.arrow_condition,
                "double_dual_condition": self.double_dual_condition,
                "symmetry_condition": self.symmetry_condition,
                "witnesses": self.witnesses}


def certify_dualizable(f: NakayamaForm) -> DualizabilityReport:
    """Check the three equivalent dualizability conditions independently."""
    t, F = f.table, f.table.field
    witnesses: List[str] = []

    arrow_ok = True
    for a in t.quiver.arrows:
        amid = t.arrow_ids[a.index]
        lhs = multiply(t, f.dual_element(amid), t.monomial_element(amid))
        rhs = t.monomial_element(t.socle_ids[a.target])
        if not elem_eq(lhs, rhs):
            arrow_ok = False
            witnesses.append(f"{a.name}* {a.name} = {_show(t, lhs)} != w_{a.target}")

    double_ok = True
    for b in range(t.dim):
        s, m = f.dual[b]
        sm, mm = f.dual[m]
        # (s*m)* = (1/s) m*, so b** = (sm/s) mm
        coeff = F.mul(F.inv(s), sm)
        if mm != b or coeff != F.one:
            double_ok = False
            witnesses.append(f"b**  !=  b for monomial {b}")

    sym_ok = True
    for b, row in f.gram.items():
        for c, v in row.items():
            if f.gram[c].get(b, F.zero) != v:
                sym_ok = False
                witnesses.append(f"({b},{c}) asymmetric")
                break
        if not sym_ok:
            break

    return DualizabilityReport(arrow_ok, double_ok, sym_ok, witnesses)


def _show(t: AlgebraTable, x: dict) -> str:
    if not x:
        return "0"
    parts = []
    for mid, c in sorted(x.items()):
        m = t.basis[mid]
        path = ".".join(t.quiver.arrows[a].name for a in m.path) or f"e{m.source}"
        parts.append(f"{c}*{path}")
    return " + ".join(parts)
