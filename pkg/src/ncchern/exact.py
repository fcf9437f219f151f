"""Exact rational linear algebra on sparse matrices.

Scalars are :class:`fractions.Fraction`. Elimination runs on integer rows
(denominators cleared per row, content divided out after every update) and
picks pivots Markowitz-style: the sparsest active row first, and within it
the column touching the fewest other active rows. Ranks never depend on the
pivot order, so the heuristic only affects speed.
"""

from __future__ import annotations

import heapq
from collections import defaultdict
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

from .errors import CompositionNonzero, InputError, NonSquare

Rational = Fraction
Vector = dict  # column index -> nonzero Fraction

__all__ = [
    "Rational", "SparseMatrix", "Subspace", "Echelon",
    "parse_rational", "format_rational",
    "rank", "kernel_basis", "homology_rank", "solve", "det", "is_psd",
]


def parse_rational(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise InputError(f"expected a rational string, got {text!r}")
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {text!r}") from exc


def format_rational(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


class SparseMatrix:
    """rows x cols matrix holding only nonzero Fraction entries.

    Treated as immutable once built.
    """

    __slots__ = ("rows", "cols", "_rows")

    def __init__(self, rows: int, cols: int, entries: Mapping | None = None):
        if rows < 0 or cols < 0:
            raise InputError("matrix shape must be non-negative")
        self.rows = rows
        self.cols = cols
        data: dict[int, dict[int, Fraction]] = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise InputError(f"entry ({r}, {c}) outside {rows}x{cols}")
            v = Fraction(v)
            if v:
                data.setdefault(r, {})[c] = v
        self._rows = data

    @classmethod
    def _from_row_dicts(cls, rows, cols, data):
        m = cls.__new__(cls)
        m.rows, m.cols = rows, cols
        m._rows = {r: d for r, d in data.items() if d}
        return m

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence]) -> "SparseMatrix":
        nrows = len(dense)
        ncols = len(dense[0]) if nrows else 0
        entries = {}
        for r, row in enumerate(dense):
            if len(row) != ncols:
                raise InputError("ragged dense matrix")
            for c, v in enumerate(row):
                if v:
                    entries[r, c] = v
        return cls(nrows, ncols, entries)

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping]) -> "SparseMatrix":
        """Matrix whose j-th column is the sparse vector ``columns[j]``."""
        data: dict[int, dict[int, Fraction]] = defaultdict(dict)
        for c, col in enumerate(columns):
            for r, v in col.items():
                if v:
                    if not 0 <= r < rows:
                        raise InputError(f"row index {r} outside {rows}")
                    data[r][c] = Fraction(v)
        return cls._from_row_dicts(rows, len(columns), data)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols)

    @property
    def shape(self):
        return (self.rows, self.cols)

    @property
    def entries(self) -> dict:
        return {(r, c): v for r, d in self._rows.items() for c, v in d.items()}

    @property
    def nnz(self) -> int:
        return sum(len(d) for d in self._rows.values())

    def row(self, r: int) -> dict:
        return dict(self._rows.get(r, {}))

    def row_dicts(self) -> list[dict]:
        return [d for _, d in sorted(self._rows.items())]

    def __getitem__(self, rc):
        r, c = rc
        return self._rows.get(r, {}).get(c, Fraction(0))

    def is_zero(self) -> bool:
        return not self._rows

    def transpose(self) -> "SparseMatrix":
        data: dict[int, dict] = defaultdict(dict)
        for r, d in self._rows.items():
            for c, v in d.items():
                data[c][r] = v
        return SparseMatrix._from_row_dicts(self.cols, self.rows, data)

    T = property(transpose)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise InputError(f"shape mismatch {self.shape} @ {other.shape}")
        data = {}
        for r, d in self._rows.items():
            acc: dict[int, Fraction] = defaultdict(Fraction)
            for k, v in d.items():
                for c, w in other._rows.get(k, {}).items():
                    acc[c] += v * w
            acc = {c: v for c, v in acc.items() if v}
            if acc:
                data[r] = acc
        return SparseMatrix._from_row_dicts(self.rows, other.cols, data)

    def apply(self, vec: Mapping) -> dict:
        """Matrix times sparse column vector."""
        out = {}
        for r, d in self._rows.items():
            s = sum((v * vec[c] for c, v in d.items() if c in vec), Fraction(0))
            if s:
                out[r] = s
        return out

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for r, d in self._rows.items():
            for c, v in d.items():
                out[r][c] = v
        return out

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={self.nnz})"


# -- elimination core ------------------------------------------------------

def _integer_row(vec: Mapping) -> dict[int, int]:
    vals = [Fraction(v) for v in vec.values()]
    if not vals:
        return {}
    den = lcm(*(v.denominator for v in vals))
    row = {c: int(Fraction(v) * den) for c, v in vec.items() if v}
    g = gcd(*row.values())
    if g != 1:
        row = {c: v // g for c, v in row.items()}
    return row


def _echelon(rows: Iterable[Mapping], late_cols=frozenset()):
    """Sparse fraction-free elimination.

    Returns the pivots as ``(col, integer_row)`` in elimination order. Row k
    vanishes on the pivot columns of all earlier pivots, which is what
    :meth:`Echelon.reduce` relies on. Columns in ``late_cols`` are chosen as
    pivots only when nothing else is left in the row.
    """
    active: dict[int, dict[int, int]] = {}
    colrows: dict[int, set] = defaultdict(set)
    for rid, r in enumerate(rows):
        r = _integer_row(r)
        if r:
            active[rid] = r
            for c in r:
                colrows[c].add(rid)
    heap = [(len(r), rid) for rid, r in active.items()]
    heapq.heapify(heap)
    pivots = []
    while heap:
        n, rid = heapq.heappop(heap)
        row = active.get(rid)
        if row is None or len(row) != n:
            continue
        candidates = [c for c in row if c not in late_cols] or list(row)
        col = min(candidates, key=lambda c: (len(colrows[c]), c))
        del active[rid]
        for c in row:
            colrows[c].discard(rid)
        pv = row[col]
        for other in sorted(colrows[col]):
            orow = active[other]
            a = orow[col]
            g = gcd(pv, a)
            mp, ma = pv // g, a // g
            new = orow if mp == 1 else {c: v * mp for c, v in orow.items()}
            if new is orow:
                new = dict(orow)
            for c, v in row.items():
                w = new.get(c, 0) - v * ma
                if w:
                    if c not in new:
                        colrows[c].add(other)
                    new[c] = w
                elif c in new:
                    del new[c]
                    colrows[c].discard(other)
            if new:
                if mp != 1:
                    cg = gcd(*new.values())
                    if cg != 1:
                        new = {c: v // cg for c, v in new.items()}
                active[other] = new
                heapq.heappush(heap, (len(new), other))
            else:
                del active[other]
        pivots.append((col, row))
    return pivots


class Echelon:
    """Row echelon data for the span of a set of sparse vectors."""

    def __init__(self, ambient_dim: int, vectors: Iterable[Mapping]):
        self.ambient_dim = ambient_dim
        self.pivots = _echelon(vectors)
        self.pivot_cols = {c for c, _ in self.pivots}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: Mapping) -> dict:
        """Normal form of ``vec`` modulo the span (supported off pivot columns)."""
        v = {c: Fraction(x) for c, x in vec.items() if x}
        for col, prow in self.pivots:
            a = v.get(col)
            if not a:
                continue
            f = a / prow[col]
            for c, x in prow.items():
                w = v.get(c, 0) - f * x
                if w:
                    v[c] = w
                else:
                    v.pop(c, None)
        return v

    def contains(self, vec: Mapping) -> bool:
        return not self.reduce(vec)

    def free_columns(self) -> list[int]:
        return [c for c in range(self.ambient_dim) if c not in self.pivot_cols]


def _columns_of(m: SparseMatrix) -> list[dict]:
    return m.transpose().row_dicts()


def rank(m: SparseMatrix) -> int:
    """Exact rank over Q."""
    if m.rows <= m.cols:
        return len(_echelon(m.row_dicts()))
    return len(_echelon(_columns_of(m)))


def kernel_basis(m: SparseMatrix) -> "Subspace":
    """Basis of {v : m v = 0}, one vector per free column."""
    pivots = _echelon(m.row_dicts())
    pivot_cols = {c for c, _ in pivots}
    basis = []
    for f in range(m.cols):
        if f in pivot_cols:
            continue
        x = {f: Fraction(1)}
        for col, prow in reversed(pivots):
            s = sum((v * x[c] for c, v in prow.items() if c != col and c in x), Fraction(0))
            if s:
                x[col] = -s / prow[col]
        basis.append(x)
    return Subspace(m.cols, basis, _checked=True)


def homology_rank(d_in: SparseMatrix, d_out: SparseMatrix) -> int:
    """dim ker(d_out) - rank(d_in) for  X --d_in--> Y --d_out--> Z."""
    if d_in.rows != d_out.cols:
        raise InputError(f"incompatible maps {d_in.shape} then {d_out.shape}")
    if not (d_out @ d_in).is_zero():
        raise CompositionNonzero("d_out . d_in != 0")
    return d_out.cols - rank(d_out) - rank(d_in)


def solve(m: SparseMatrix, b: Mapping) -> dict | None:
    """Some x with m x = b, or None if the system is inconsistent."""
    aug = m.cols
    rows = [dict(m.row(r)) for r in range(m.rows)]
    for r, v in b.items():
        if v:
            rows[r][aug] = Fraction(v)
    pivots = _echelon(rows, late_cols={aug})
    if any(col == aug for col, _ in pivots):
        return None
    x: dict[int, Fraction] = {}
    for col, prow in reversed(pivots):
        s = Fraction(prow.get(aug, 0))
        s -= sum((v * x[c] for c, v in prow.items() if c not in (col, aug) and c in x), Fraction(0))
        if s:
            x[col] = s / prow[col]
    return x


def det(dense: Sequence[Sequence]) -> Fraction:
    n = len(dense)
    a = [[Fraction(v) for v in row] for row in dense]
    if any(len(row) != n for row in a):
        raise NonSquare(f"determinant of non-square {n}x{len(a[0]) if a else 0} matrix")
    result = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if a[i][k]), None)
        if p is None:
            return Fraction(0)
        if p != k:
            a[k], a[p] = a[p], a[k]
            result = -result
        pv = a[k][k]
        result *= pv
        for i in range(k + 1, n):
            f = a[i][k] / pv
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
    return result


def is_psd(sym: Sequence[Sequence]) -> tuple[bool, int]:
    """Decide positive semidefiniteness of a symmetric rational matrix.

    Symmetric pivoting on positive diagonal entries (an exact LDL^T). A
    negative diagonal, or a zero diagonal with a nonzero row, refutes PSD.
    Returns (psd, rank); rank is only meaningful when psd holds.
    """
    a = [[Fraction(v) for v in row] for row in sym]
    n = len(a)
    for i in range(n):
        for j in range(i):
            if a[i][j] != a[j][i]:
                raise InputError("is_psd needs a symmetric matrix")
    live = list(range(n))
    r = 0
    while live:
        if any(a[i][i] < 0 for i in live):
            return False, r
        k = next((i for i in live if a[i][i] > 0), None)
        if k is None:
            if any(a[i][j] for i in live for j in live):
                return False, r
            break
        live.remove(k)
        pv = a[k][k]
        for i in live:
            if a[i][k]:
                f = a[i][k] / pv
                for j in live:
                    a[i][j] -= f * a[k][j]
        r += 1
    return True, r


class Subspace:
    """Linearly independent sparse vectors spanning a subspace of Q^n."""

    def __init__(self, ambient_dim: int, basis: Sequence[Mapping], _checked=False):
        self.ambient_dim = ambient_dim
        self.basis = [{c: Fraction(v) for c, v in b.items() if v} for b in basis]
        self._echelon = Echelon(ambient_dim, self.basis)
        if not _checked and self._echelon.rank != len(self.basis):
            raise InputError("subspace basis is linearly dependent")

    @classmethod
    def span(cls, ambient_dim: int, vectors: Iterable[Mapping]) -> "Subspace":
        # the echelon rows themselves are an independent spanning set
        ech = Echelon(ambient_dim, vectors)
        return cls(ambient_dim, [dict(row) for _, row in ech.pivots], _checked=True)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def contains(self, vec: Mapping) -> bool:
        return self._echelon.contains(vec)

    def reduce(self, vec: Mapping) -> dict:
        return self._echelon.reduce(vec)

    def quotient_dim(self) -> int:
        return self.ambient_dim - self.dim

    def __len__(self):
        return self.dim

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim})"
