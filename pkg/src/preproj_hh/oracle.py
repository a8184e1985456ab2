"""Resolution-free cross-check: cohomology of the reduced bar complex.

C^k is Hom of the k-fold tensor power of L/(K.1) into L, with the standard
Hochschild differential; the quotient basis drops the idempotent of the
last vertex, whose class is minus the sum of the remaining ones.  Ranks are
taken by sparse elimination: over the prime field of the table, or, in
characteristic 0, first over a screening prime and then over the rationals
(the rational ranks are the ones reported).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

from .algebra import AlgebraTable
from .exactla import FieldSpec, sparse_rank

_SCREEN_PRIME = 1009


class BudgetExceededError(RuntimeError):
    def __init__(self, degree: int, cost: int, budget: int):
        super().__init__(
            f"bar cochain space in degree {degree} needs {cost} coordinates, "
            f"budget is {budget}")
        self.degree = degree


class BarComplex:
    """Reduced bar cochain data for one algebra table."""

    def __init__(self, t: AlgebraTable):
        self.table = t
        drop = t.e_ids[t.n]
        self.reduced_basis = [m.mid for m in t.basis if m.mid != drop]
        self.drop = drop
        self.other_vertices = [t.e_ids[i] for i in range(1, t.n)]
        # reduced product expansions: (x, y) -> {mid: coeff} in the quotient
        self.pair_hits: Dict[int, List[Tuple[Tuple[int, int], int]]] = {
            m: [] for m in self.reduced_basis}
        for x in self.reduced_basis:
            for y in self.reduced_basis:
                hit = t.mono_mul(x, y)
                if hit is None:
                    continue
                c, m = hit
                for mid, cc in self._reduce(m, c):
                    self.pair_hits[mid].append(((x, y), cc))

    def _reduce(self, mid: int, coeff: int):
        if mid != self.drop:
            return [(mid, coeff)]
        return [(m, -coeff) for m in self.other_vertices]

    def space_dim(self, k: int) -> int:
        return len(self.reduced_basis) ** k * self.table.dim

    def differential_rows(self, k: int, perturb: bool = False):
        """Image rows of the degree-k differential, one per C^k basis cochain.

        Keys of the row dicts are (argument tuple, output monomial) pairs in
        C^(k+1).  `perturb` is a test hook that corrupts one entry.
        """
        t = self.table
        from itertools import product as iproduct
        first = True
        sign_last = (-1) ** (k + 1)
        for T in iproduct(self.reduced_basis, repeat=k):
            for w in range(t.dim):
                row: dict = {}
                for b in self.reduced_basis:
                    hit = t.mono_mul(b, w)
                    if hit is not None:
                        key = ((b,) + T, hit[1])
                        row[key] = row.get(key, 0) + hit[0]
                for i in range(1, k + 1):
                    for (x, y), c in self.pair_hits[T[i - 1]]:
                        key = (T[: i - 1] + (x, y) + T[i:], w)
                        row[key] = row.get(key, 0) + (-1) ** i * c
                for b in self.reduced_basis:
                    hit = t.mono_mul(w, b)
                    if hit is not None:
                        key = (T + (b,), hit[1])
                        row[key] = row.get(key, 0) + sign_last * hit[0]
                if perturb and first:
                    key = ((self.reduced_basis[0],) * (k + 1), 0)
                    row[key] = row.get(key, 0) + 1
                    first = False
                yield {kk: v for kk, v in row.items() if v != 0}


def bar_dims(t: AlgebraTable, upto: int, budget: int = 10000,
             field: Optional[FieldSpec] = None,
             perturb_degree: Optional[int] = None) -> List[int]:
    """dim HH^i for i = 0..upto from reduced bar cochain ranks.

    `field` overrides the rank field (used for the characteristic-0
    screening pass); `perturb_degree` is the negative-control hook.
    """
    bc = BarComplex(t)
    for k in range(upto + 1):
        cost = bc.space_dim(k)
        if cost > budget:
            raise BudgetExceededError(k, cost, budget)
    F = field or t.field
    ranks = []
    for k in range(upto + 1):
        rows = bc.differential_rows(k, perturb=(perturb_degree == k))
        ranks.append(sparse_rank(rows, F))
    dims = []
    for i in range(upto + 1):
        dims.append(bc.space_dim(i) - ranks[i] - (ranks[i - 1] if i else 0))
    return dims


@dataclass
class OracleReport:
    upto: int
    bar: List[int]
    resolution: List[int]
    screen: Optional[List[int]]
    rank_field: str

    @property
    def ok(self) -> bool:
        return self.bar == self.resolution

    def serialize(self):
        return {"upto": self.upto, "bar_dims": self.bar,
                "resolution_dims": self.resolution,
                "screen_dims": self.screen, "rank_field": self.rank_field,
                "ok": self.ok}


def compare(t: AlgebraTable, resolution_dims: List[int], upto: int,
            budget: int = 10000) -> OracleReport:
    """Elementwise comparison of bar dims against the resolution dims.

    Over the rationals a fast screening pass runs first over a fixed prime;
    the rational elimination (whose dims are the ones reported) only runs
    when the screen already agrees.
    """
    expected = resolution_dims[: upto + 1]
    if t.field.characteristic == 0:
        screen = bar_dims(t, upto, budget, field=FieldSpec(_SCREEN_PRIME))
        if screen != expected:
            return OracleReport(upto, screen, expected, screen,
                                f"F{_SCREEN_PRIME} (screen failed)")
        dims = bar_dims(t, upto, budget)
        return OracleReport(upto, dims, expected, screen, "Q")
    dims = bar_dims(t, upto, budget)
    return OracleReport(upto, dims, expected, None, str(t.field))
