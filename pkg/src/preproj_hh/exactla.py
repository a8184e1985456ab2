"""Exact linear algebra over the rationals and over odd prime fields.

Scalars are `fractions.Fraction` in characteristic 0 and plain ints in the
range 0..p-1 over the p-element field.  No floating point is used anywhere.
Row reduction follows one fixed pivot rule (leftmost nonzero column, topmost
nonzero row, pivot scaled to 1) so that every derived object is reproducible
byte for byte.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterable, Optional, Sequence, Union

import numpy

Scalar = Union[Fraction, int]


class UnsupportedCharacteristicError(ValueError):
    pass


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for q in range(2, isqrt(p) + 1):
        if p % q == 0:
            return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Ground field: the rationals (characteristic 0) or F_p with p an odd prime.

    Characteristic 2 is rejected outright: every construction in this package
    is built under the standing hypothesis that 2 is invertible in the ground
    field, and several of them divide by 2.
    """

    characteristic: int = 0

    def __post_init__(self):
        c = self.characteristic
        if c == 0:
            return
        if c == 2:
            raise UnsupportedCharacteristicError(
                "characteristic 2 is unsupported: the engine assumes 2 is "
                "invertible in the ground field"
            )
        if not _is_prime(c):
            raise UnsupportedCharacteristicError(
                f"characteristic must be 0 or an odd prime, got {c}"
            )

    # -- scalar arithmetic ------------------------------------------------

    def __call__(self, x) -> Scalar:
        """Coerce an int / Fraction into a canonical scalar of this field."""
        p = self.characteristic
        if p == 0:
            return x if isinstance(x, Fraction) else Fraction(x)
        if isinstance(x, Fraction):
            num, den = x.numerator, x.denominator
            if den % p == 0:
                raise ZeroDivisionError(f"denominator divisible by {p}")
            return num * pow(den, -1, p) % p
        return x % p

    @property
    def zero(self) -> Scalar:
        return Fraction(0) if self.characteristic == 0 else 0

    @property
    def one(self) -> Scalar:
        return Fraction(1) if self.characteristic == 0 else 1

    def add(self, a, b):
        return a + b if self.characteristic == 0 else (a + b) % self.characteristic

    def sub(self, a, b):
        return a - b if self.characteristic == 0 else (a - b) % self.characteristic

    def mul(self, a, b):
        return a * b if self.characteristic == 0 else (a * b) % self.characteristic

    def neg(self, a):
        return -a if self.characteristic == 0 else (-a) % self.characteristic

    def inv(self, a):
        if self.characteristic == 0:
            return 1 / a
        return pow(a, -1, self.characteristic)

    def is_zero(self, a) -> bool:
        return a == 0

    def __str__(self):
        return "Q" if self.characteristic == 0 else f"F{self.characteristic}"


@dataclass(frozen=True)
class EchelonForm:
    rank: int
    pivot_columns: tuple
    reduced: "ExactMatrix"


class ExactMatrix:
    """Dense matrix with exact entries over one FieldSpec.

    Immutable by convention: the reduction routines return fresh objects.
    """

    __slots__ = ("field", "nrows", "ncols", "rows")

    def __init__(self, field: FieldSpec, rows: Sequence[Sequence]):
        self.field = field
        self.rows = [[field(x) for x in row] for row in rows]
        self.nrows = len(self.rows)
        self.ncols = len(self.rows[0]) if self.rows else 0
        for row in self.rows:
            if len(row) != self.ncols:
                raise ValueError("ragged rows")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, field: FieldSpec, nrows: int, ncols: int) -> "ExactMatrix":
        m = cls.__new__(cls)
        m.field = field
        m.nrows = nrows
        m.ncols = ncols
        m.rows = [[field.zero] * ncols for _ in range(nrows)]
        return m

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "ExactMatrix":
        m = cls.zero(field, n, n)
        for i in range(n):
            m.rows[i][i] = field.one
        return m

    @classmethod
    def from_columns(cls, field: FieldSpec, columns: Sequence[Sequence]) -> "ExactMatrix":
        if not columns:
            return cls.zero(field, 0, 0)
        nrows = len(columns[0])
        return cls(field, [[columns[j][i] for j in range(len(columns))] for i in range(nrows)])

    def copy(self) -> "ExactMatrix":
        m = ExactMatrix.__new__(ExactMatrix)
        m.field = self.field
        m.nrows = self.nrows
        m.ncols = self.ncols
        m.rows = [row[:] for row in self.rows]
        return m

    # -- basic ops ---------------------------------------------------------

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.field == other.field
            and self.rows == other.rows
        )

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.field, [[self.rows[i][j] for i in range(self.nrows)]
                                        for j in range(self.ncols)])

    def matvec(self, v: Sequence) -> list:
        F = self.field
        out = []
        for row in self.rows:
            s = F.zero
            for a, x in zip(row, v):
                if a != 0 and x != 0:
                    s = F.add(s, F.mul(a, x))
            out.append(s)
        return out

    def matmul(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        F = self.field
        ot = other.transpose()
        out = []
        for row in self.rows:
            new = []
            for col in ot.rows:
                s = F.zero
                for a, b in zip(row, col):
                    if a != 0 and b != 0:
                        s = F.add(s, F.mul(a, b))
                new.append(s)
            out.append(new)
        return ExactMatrix(F, out)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.rows for x in row)

    # -- elimination -------------------------------------------------------

    def echelonize(self) -> EchelonForm:
        """Reduced row echelon form with the fixed deterministic pivot rule."""
        F = self.field
        rows = [row[:] for row in self.rows]
        pivots = []
        r = 0
        for c in range(self.ncols):
            pivot_row = None
            for i in range(r, self.nrows):
                if rows[i][c] != 0:
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
            inv = F.inv(rows[r][c])
            if inv != 1:
                rows[r] = [F.mul(inv, x) for x in rows[r]]
            prow = rows[r]
            for i in range(self.nrows):
                if i != r and rows[i][c] != 0:
                    f = rows[i][c]
                    rows[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[i], prow)]
            pivots.append(c)
            r += 1
            if r == self.nrows:
                break
        reduced = ExactMatrix.__new__(ExactMatrix)
        reduced.field = F
        reduced.nrows = self.nrows
        reduced.ncols = self.ncols
        reduced.rows = rows
        return EchelonForm(rank=r, pivot_columns=tuple(pivots), reduced=reduced)

    def rank(self) -> int:
        return self.echelonize().rank

    def kernel_basis(self) -> list:
        """Basis of the right kernel; one vector per free column, ascending."""
        ech = self.echelonize()
        F = self.field
        pivots = list(ech.pivot_columns)
        pivot_set = set(pivots)
        free = [c for c in range(self.ncols) if c not in pivot_set]
        basis = []
        for fc in free:
            v = [F.zero] * self.ncols
            v[fc] = F.one
            for r, pc in enumerate(pivots):
                coef = ech.reduced.rows[r][fc]
                if coef != 0:
                    v[pc] = F.neg(coef)
            basis.append(v)
        return basis

    def solve(self, b: Sequence, variable_order: Optional[Sequence[int]] = None) -> Optional[list]:
        """Echelon-canonical solution of self @ x = b, or None if inconsistent.

        Free variables are set to zero.  `variable_order` permutes the columns
        before elimination; a different order yields a different (equally
        valid) particular solution, which the lifting property tests use.
        """
        F = self.field
        order = list(range(self.ncols)) if variable_order is None else list(variable_order)
        aug_rows = []
        for i in range(self.nrows):
            row = [self.rows[i][j] for j in order]
            row.append(F(b[i]))
            aug_rows.append(row)
        aug = ExactMatrix.__new__(ExactMatrix)
        aug.field = F
        aug.nrows = self.nrows
        aug.ncols = self.ncols + 1
        aug.rows = aug_rows
        ech = aug.echelonize()
        if self.ncols in ech.pivot_columns:
            return None
        x = [F.zero] * self.ncols
        for r, pc in enumerate(ech.pivot_columns):
            x[order[pc]] = ech.reduced.rows[r][-1]
        return x


class PreparedSolver:
    """Repeated exact solves against one fixed matrix.

    The reduction of [A | I] is computed once; each solve is then a matrix-
    vector product with the recorded transform plus a consistency check on
    the zero rows.  Solutions are echelon-canonical (free variables zero),
    identical to ExactMatrix.solve.
    """

    def __init__(self, matrix: "ExactMatrix"):
        F = matrix.field
        self.field = F
        self.ncols = matrix.ncols
        nrows = matrix.nrows
        rows = [row[:] + [F.one if i == j else F.zero for j in range(nrows)]
                for i, row in enumerate(matrix.rows)]
        pivots = []
        r = 0
        for c in range(matrix.ncols):
            pivot_row = next((i for i in range(r, nrows) if rows[i][c] != 0), None)
            if pivot_row is None:
                continue
            rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
            inv = F.inv(rows[r][c])
            if inv != 1:
                rows[r] = [F.mul(inv, x) for x in rows[r]]
            prow = rows[r]
            for i in range(nrows):
                if i != r and rows[i][c] != 0:
                    f = rows[i][c]
                    rows[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(rows[i], prow)]
            pivots.append(c)
            r += 1
            if r == nrows:
                break
        self.rank = r
        self.pivots = pivots
        self.transform = [row[matrix.ncols:] for row in rows]
        self.reduced = [row[: matrix.ncols] for row in rows]

    def solve(self, b) -> Optional[list]:
        F = self.field
        y = []
        for trow in self.transform:
            s = F.zero
            for a, x in zip(trow, b):
                if a != 0 and x != 0:
                    s = F.add(s, F.mul(a, x))
            y.append(s)
        for r in range(self.rank, len(y)):
            if y[r] != 0:
                return None
        x = [F.zero] * self.ncols
        for r, pc in enumerate(self.pivots):
            x[pc] = y[r]
        return x


# -- sparse and fast-path ranks -------------------------------------------


def sparse_rank(row_dicts: Iterable[dict], field: FieldSpec) -> int:
    """Rank of a matrix given as an iterable of {column: scalar} rows.

    Incremental forward elimination: each incoming row is reduced against the
    pivot rows found so far, keyed by leading column.  Exact over either kind
    of field; intended for the large, very sparse differential matrices.
    """
    F = field
    pivots: dict = {}
    rank = 0
    for row in row_dicts:
        row = {c: fv for c, v in row.items() if (fv := F(v)) != 0}
        while row:
            c = min(row)
            if c in pivots:
                f = row.pop(c)
                for pc, pv in pivots[c].items():
                    if pc == c:
                        continue
                    val = F.sub(row.get(pc, F.zero), F.mul(f, pv))
                    if val == 0:
                        row.pop(pc, None)
                    else:
                        row[pc] = val
            else:
                inv = F.inv(row[c])
                if inv != 1:
                    row = {k: F.mul(inv, v) for k, v in row.items()}
                pivots[c] = row
                rank += 1
                break
    return rank


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    """Rank over F_p of an integer matrix, via vectorized elimination.

    Entries are reduced mod p up front; p is small so int64 row updates
    cannot overflow.  Used as the fast path for the big flattened
    resolution-term matrices.
    """
    a = numpy.array(rows, dtype=numpy.int64) % p
    if a.size == 0:
        return 0
    nrows, ncols = a.shape
    r = 0
    for c in range(ncols):
        col = a[r:, c]
        nz = numpy.nonzero(col)[0]
        if len(nz) == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = (a[r] * inv) % p
        mask = numpy.nonzero(a[:, c])[0]
        mask = mask[mask != r]
        if len(mask):
            a[mask] = (a[mask] - numpy.outer(a[mask, c], a[r])) % p
        r += 1
        if r == nrows:
            break
    return r
