"""Finite-dimensional unital involutive algebras given by structure constants.

Each value models one finite stage of a group C*-algebra: matrix algebras,
their finite products (the ideals I_N), cyclic group algebras, and matrix
amplifications M_k(A). Everything is over Q.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import product as cartesian
from typing import Iterable, Mapping, Sequence

from .errors import (AlgebraMismatch, EmptyProduct, InputError, InvalidSize,
                     InvariantViolation, NotIdempotent, NotInvertible)
from .exact import (SparseMatrix, format_rational, is_psd, kernel_basis,
                    parse_rational, rank, solve)


def _clean(vec: Mapping) -> dict:
    return {k: Fraction(v) for k, v in vec.items() if v}


def _axpy(acc: dict, coeff, vec: Mapping):
    for k, v in vec.items():
        w = acc.get(k, 0) + coeff * v
        if w:
            acc[k] = w
        else:
            acc.pop(k, None)


class StructureAlgebra:
    """Basis e_0..e_{d-1} with e_i e_j = sum_k c[i][j][k] e_k.

    ``table`` maps (i, j) to a sparse dict {k: c}; ``star`` lists the
    coordinates of e_i^*. Instances are immutable and hash by identity.
    """

    def __init__(self, labels: Sequence[str], table: Mapping, unit: Mapping,
                 star: Sequence[Mapping], name: str | None = None,
                 amplified_from: tuple | None = None):
        self.dim = len(labels)
        self.labels = tuple(labels)
        self.name = name or f"algebra[{self.dim}]"
        self._table = {}
        for (i, j), vec in table.items():
            if not (0 <= i < self.dim and 0 <= j < self.dim):
                raise InputError(f"structure constant index ({i}, {j}) out of range")
            vec = _clean(vec)
            if any(not 0 <= k < self.dim for k in vec):
                raise InputError("structure constant target out of range")
            if vec:
                self._table[i, j] = vec
        self.unit = _clean(unit)
        if len(star) != self.dim:
            raise InputError("involution needs one image per basis element")
        self._star = tuple(_clean(s) for s in star)
        # (base algebra, k) when this is amplify(base, k)
        self.amplified_from = amplified_from

    def __repr__(self):
        return f"StructureAlgebra({self.name}, dim={self.dim})"

    def renamed(self, name: str) -> "StructureAlgebra":
        return StructureAlgebra(self.labels, self._table, self.unit, self._star,
                                name=name, amplified_from=self.amplified_from)

    # -- arithmetic on coordinate dicts --------------------------------

    def mul_basis(self, i: int, j: int) -> dict:
        return self._table.get((i, j), {})

    def mul(self, u: Mapping, v: Mapping) -> dict:
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                t = self._table.get((i, j))
                if t:
                    _axpy(out, a * b, t)
        return out

    def star(self, u: Mapping) -> dict:
        out: dict = {}
        for i, a in u.items():
            _axpy(out, a, self._star[i])
        return out

    def star_basis(self, i: int) -> dict:
        return self._star[i]

    def element(self, coords) -> "AlgebraElement":
        if isinstance(coords, Mapping):
            return AlgebraElement(self, coords)
        coords = list(coords)
        if len(coords) != self.dim:
            raise InputError(f"expected {self.dim} coordinates, got {len(coords)}")
        return AlgebraElement(self, {i: c for i, c in enumerate(coords)})

    def basis_element(self, i: int) -> "AlgebraElement":
        return AlgebraElement(self, {i: 1})

    def one(self) -> "AlgebraElement":
        return AlgebraElement(self, self.unit)

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, {})

    # -- invariants ------------------------------------------------------

    def invariant_failures(self) -> list[str]:
        """Associativity, unit, and involution checks on all basis tuples."""
        d = self.dim
        fails = []
        for i, j, k in cartesian(range(d), repeat=3):
            left = self.mul(self.mul_basis(i, j), {k: 1})
            right = self.mul({i: 1}, self.mul_basis(j, k))
            if left != right:
                fails.append(f"associativity fails on ({i},{j},{k})")
                break
        for i in range(d):
            if self.mul(self.unit, {i: 1}) != {i: 1} or self.mul({i: 1}, self.unit) != {i: 1}:
                fails.append(f"unit fails on e_{i}")
                break
        for i in range(d):
            if self.star(self._star[i]) != {i: Fraction(1)}:
                fails.append(f"(e_{i}*)* != e_{i}")
                break
        for i, j in cartesian(range(d), repeat=2):
            if self.star(self.mul_basis(i, j)) != self.mul(self._star[j], self._star[i]):
                fails.append(f"involution is not an anti-homomorphism on ({i},{j})")
                break
        return fails

    def verify(self) -> "StructureAlgebra":
        fails = self.invariant_failures()
        if fails:
            raise InvariantViolation(f"{self.name}: " + "; ".join(fails))
        return self

    # -- derived data ----------------------------------------------------

    def left_regular(self, u: Mapping) -> SparseMatrix:
        """Matrix of x -> u x in the basis."""
        cols = [self.mul(u, {j: 1}) for j in range(self.dim)]
        return SparseMatrix.from_columns(self.dim, cols)

    def regular_trace(self) -> "TraceFunctional":
        """tau(a) = Tr(L_a) / dim; a trace on every algebra, tau(1) = 1."""
        coords = []
        for i in range(self.dim):
            t = sum((self.mul_basis(i, j).get(j, 0) for j in range(self.dim)), Fraction(0))
            coords.append(t / self.dim)
        return TraceFunctional(coords)

    def commutator_matrix(self) -> SparseMatrix:
        """Rows indexed by (j, k): coefficient of e_k in [e_j, x] for x = e_i (column i)."""
        d = self.dim
        entries = {}
        for i in range(d):
            for j in range(d):
                diff = dict(self.mul_basis(j, i))
                _axpy(diff, -1, self.mul_basis(i, j))
                for k, v in diff.items():
                    entries[j * d + k, i] = v
        return SparseMatrix(d * d, d, entries)

    def center_dim(self) -> int:
        return kernel_basis(self.commutator_matrix()).dim

    def commutator_span_dim(self) -> int:
        """dim [A, A]."""
        vecs = []
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                diff = dict(self.mul_basis(i, j))
                _axpy(diff, -1, self.mul_basis(j, i))
                if diff:
                    vecs.append(diff)
        if not vecs:
            return 0
        return rank(SparseMatrix.from_columns(self.dim, vecs))

    # -- serialization ---------------------------------------------------

    def to_json(self) -> str:
        sc = []
        for (i, j), vec in sorted(self._table.items()):
            for k, v in sorted(vec.items()):
                sc.append([i, j, k, format_rational(v)])
        inv = [[format_rational(self._star[i].get(j, 0)) for j in range(self.dim)]
               for i in range(self.dim)]
        doc = {
            "dim": self.dim,
            "labels": list(self.labels),
            "unit": [format_rational(self.unit.get(i, 0)) for i in range(self.dim)],
            "involution": inv,
            "sc": sc,
        }
        return json.dumps(doc, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str, name: str | None = None) -> "StructureAlgebra":
        doc = json.loads(text)
        dim = doc["dim"]
        table: dict = {}
        for i, j, k, v in doc["sc"]:
            table.setdefault((i, j), {})[k] = parse_rational(v)
        unit = {i: parse_rational(v) for i, v in enumerate(doc["unit"])}
        star = [{j: parse_rational(v) for j, v in enumerate(row)} for row in doc["involution"]]
        if len(doc["labels"]) != dim:
            raise InputError("labels/dim mismatch")
        return cls(doc["labels"], table, unit, star, name=name)


class AlgebraElement:
    """An element of a StructureAlgebra, as sparse coordinates."""

    __slots__ = ("algebra", "coords")

    def __init__(self, algebra: StructureAlgebra, coords: Mapping):
        if any(not 0 <= i < algebra.dim for i in coords):
            raise InputError("coordinate index out of range")
        self.algebra = algebra
        self.coords = _clean(coords)

    def _check(self, other):
        if not isinstance(other, AlgebraElement):
            return False
        if other.algebra is not self.algebra:
            raise AlgebraMismatch(f"{self.algebra.name} vs {other.algebra.name}")
        return True

    def __add__(self, other):
        self._check(other)
        out = dict(self.coords)
        _axpy(out, 1, other.coords)
        return AlgebraElement(self.algebra, out)

    def __sub__(self, other):
        self._check(other)
        out = dict(self.coords)
        _axpy(out, -1, other.coords)
        return AlgebraElement(self.algebra, out)

    def __neg__(self):
        return AlgebraElement(self.algebra, {k: -v for k, v in self.coords.items()})

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            self._check(other)
            return AlgebraElement(self.algebra, self.algebra.mul(self.coords, other.coords))
        c = Fraction(other)
        return AlgebraElement(self.algebra, {k: c * v for k, v in self.coords.items()})

    def __rmul__(self, c):
        return self * c

    def __eq__(self, other):
        if not isinstance(other, AlgebraElement):
            return NotImplemented
        return other.algebra is self.algebra and other.coords == self.coords

    def __hash__(self):
        return hash((id(self.algebra), tuple(sorted(self.coords.items()))))

    def __repr__(self):
        if not self.coords:
            return "0"
        parts = [f"{format_rational(v)}*{self.algebra.labels[k]}" for k, v in sorted(self.coords.items())]
        return " + ".join(parts)

    def dense(self) -> list[Fraction]:
        return [self.coords.get(i, Fraction(0)) for i in range(self.algebra.dim)]

    def star(self) -> "AlgebraElement":
        return AlgebraElement(self.algebra, self.algebra.star(self.coords))

    def is_zero(self) -> bool:
        return not self.coords

    def is_idempotent(self) -> bool:
        return self * self == self

    def require_idempotent(self):
        if not self.is_idempotent():
            raise NotIdempotent(f"{self!r} is not idempotent")
        return self

    def inverse(self) -> "AlgebraElement":
        """Two-sided inverse, found by solving u x = 1 exactly."""
        A = self.algebra
        x = solve(A.left_regular(self.coords), A.unit)
        if x is None:
            raise NotInvertible(f"{self!r} has no inverse")
        inv = AlgebraElement(A, x)
        if inv * self != A.one():
            raise NotInvertible(f"{self!r} has a right inverse only")
        return inv


class TraceFunctional:
    """Linear functional tau with tau(e_i) = coords[i]."""

    def __init__(self, coords: Iterable):
        self.coords = tuple(Fraction(c) for c in coords)

    def __call__(self, u) -> Fraction:
        if isinstance(u, AlgebraElement):
            u = u.coords
        return sum((self.coords[i] * v for i, v in u.items()), Fraction(0))

    def __repr__(self):
        return f"TraceFunctional({[format_rational(c) for c in self.coords]})"

    @classmethod
    def from_json(cls, text: str) -> "TraceFunctional":
        doc = json.loads(text)
        if isinstance(doc, dict):
            doc = doc["coords"]
        return cls(parse_rational(v) for v in doc)


@dataclass(frozen=True)
class ValidationReport:
    normalized: bool
    positive: bool
    strictly_positive: bool
    ad_invariant: bool

    @property
    def ok(self) -> bool:
        return self.normalized and self.positive and self.strictly_positive and self.ad_invariant

    def to_dict(self) -> dict:
        return {
            "normalized": self.normalized,
            "positive": self.positive,
            "strictly_positive": self.strictly_positive,
            "ad_invariant": self.ad_invariant,
            "ok": self.ok,
        }


def gram_matrix(A: StructureAlgebra, tau: TraceFunctional) -> list[list[Fraction]]:
    """G[a][b] = tau(e_a^* e_b)."""
    return [[tau(A.mul(A.star_basis(a), {b: 1})) for b in range(A.dim)] for a in range(A.dim)]


def validate_trace(A: StructureAlgebra, tau: TraceFunctional) -> ValidationReport:
    if len(tau.coords) != A.dim:
        raise InputError(f"trace has {len(tau.coords)} coordinates, algebra has dim {A.dim}")
    normalized = tau(A.unit) == 1
    g = gram_matrix(A, tau)
    # tau(a* a) for real coordinate vectors only sees the symmetric part
    sym = [[(g[i][j] + g[j][i]) / 2 for j in range(A.dim)] for i in range(A.dim)]
    positive, r = is_psd(sym)
    strictly = positive and r == A.dim
    ad_inv = all(tau(A.mul_basis(i, j)) == tau(A.mul_basis(j, i))
                 for i in range(A.dim) for j in range(i + 1, A.dim))
    return ValidationReport(normalized, positive, strictly, ad_inv)


# -- constructors -----------------------------------------------------------

def _maybe_unitalize(A: StructureAlgebra, adjoin_unit: bool) -> StructureAlgebra:
    return unitalization(A) if adjoin_unit else A


def make_matrix_algebra(n: int, adjoin_unit: bool = False) -> StructureAlgebra:
    """Mat_n(Q) with basis E_ij (index i*n + j) and E_ij^* = E_ji."""
    if not isinstance(n, int) or n < 1:
        raise InvalidSize(f"matrix size must be >= 1, got {n}")
    sep = "" if n < 10 else ","
    labels = [f"E{i + 1}{sep}{j + 1}" for i in range(n) for j in range(n)]
    table = {}
    for i, j, l in cartesian(range(n), repeat=3):
        table[i * n + j, j * n + l] = {i * n + l: 1}
    unit = {i * n + i: 1 for i in range(n)}
    star = [{j * n + i: 1} for i in range(n) for j in range(n)]
    return _maybe_unitalize(StructureAlgebra(labels, table, unit, star, name=f"mat({n})"), adjoin_unit)


def product(factors: Sequence[StructureAlgebra], adjoin_unit: bool = False) -> StructureAlgebra:
    """Direct product; factor blocks are laid out consecutively."""
    factors = list(factors)
    if not factors:
        raise EmptyProduct("product of no algebras")
    labels, table, unit, star = [], {}, {}, []
    off = 0
    for f, A in enumerate(factors):
        labels += [f"f{f}.{lab}" for lab in A.labels]
        for (i, j), vec in A._table.items():
            table[i + off, j + off] = {k + off: v for k, v in vec.items()}
        unit.update({k + off: v for k, v in A.unit.items()})
        star += [{k + off: v for k, v in s.items()} for s in A._star]
        off += A.dim
    name = "prod(" + ",".join(A.name for A in factors) + ")"
    return _maybe_unitalize(StructureAlgebra(labels, table, unit, star, name=name), adjoin_unit)


def cyclic_group_algebra(m: int, adjoin_unit: bool = False) -> StructureAlgebra:
    """Q[Z/m] with g_i g_j = g_{i+j mod m} and g_i^* = g_{-i}."""
    if not isinstance(m, int) or m < 1:
        raise InvalidSize(f"group order must be >= 1, got {m}")
    labels = [f"g{i}" for i in range(m)]
    table = {(i, j): {(i + j) % m: 1} for i in range(m) for j in range(m)}
    star = [{(-i) % m: 1} for i in range(m)]
    A = StructureAlgebra(labels, table, {0: 1}, star, name=f"cyclic({m})")
    return _maybe_unitalize(A, adjoin_unit)


def ground_field() -> StructureAlgebra:
    return make_matrix_algebra(1).renamed("Q")


def group_stage(G, N: int, adjoin_unit: bool = False) -> StructureAlgebra:
    """The ideal I_N: product of Mat_{n_i} over the first N irreps of G."""
    from .lie import irrep_dims
    if N < 1:
        raise InvalidSize(f"stage index must be >= 1, got {N}")
    dims = [d for _, d in irrep_dims(G, N)]
    A = product([make_matrix_algebra(d) for d in dims]) if N > 1 else make_matrix_algebra(dims[0])
    A = A.renamed(f"stage({G.token()},{N})")
    return _maybe_unitalize(A, adjoin_unit)


def amplify(A: StructureAlgebra, k: int) -> StructureAlgebra:
    """M_k(A) with basis E_ij (x) e_b at index (i*k + j)*dim + b."""
    if not isinstance(k, int) or k < 1:
        raise InvalidSize(f"amplification size must be >= 1, got {k}")
    d = A.dim

    def idx(i, j, b):
        return (i * k + j) * d + b

    labels = [f"E{i + 1}{j + 1}({A.labels[b]})" for i in range(k) for j in range(k) for b in range(d)]
    table = {}
    for i, j, l in cartesian(range(k), repeat=3):
        for (a, b), vec in A._table.items():
            table[idx(i, j, a), idx(j, l, b)] = {idx(i, l, c): v for c, v in vec.items()}
    unit = {idx(i, i, b): v for i in range(k) for b, v in A.unit.items()}
    star = [None] * (k * k * d)
    for i, j, b in cartesian(range(k), range(k), range(d)):
        star[idx(i, j, b)] = {idx(j, i, c): v for c, v in A.star_basis(b).items()}
    return StructureAlgebra(labels, table, unit, star, name=f"amplify({A.name},{k})",
                            amplified_from=(A, k))


def unitalization(A: StructureAlgebra) -> StructureAlgebra:
    """A with a formally adjoined unit, placed as the last basis vector."""
    d = A.dim
    labels = list(A.labels) + ["1~"]
    table = dict(A._table)
    for i in range(d + 1):
        table[d, i] = {i: 1}
        table[i, d] = {i: 1}
    star = list(A._star) + [{d: 1}]
    return StructureAlgebra(labels, table, {d: 1}, star, name=f"unitalize({A.name})")


def structure_isomorphic_by(A: StructureAlgebra, B: StructureAlgebra, perm: Sequence[int]) -> bool:
    """True if e_i -> f_{perm[i]} carries A's structure constants onto B's."""
    if A.dim != B.dim or sorted(perm) != list(range(B.dim)):
        return False
    for i, j in cartesian(range(A.dim), repeat=2):
        mapped = {perm[k]: v for k, v in A.mul_basis(i, j).items()}
        if mapped != B.mul_basis(perm[i], perm[j]):
            return False
    return {perm[k]: v for k, v in A.unit.items()} == B.unit


def trace_form(A: StructureAlgebra) -> list[list[Fraction]]:
    """Tr(L_{e_i e_j}), the regular-representation trace form."""
    tau = A.regular_trace()
    return [[tau(A.mul_basis(i, j)) * A.dim for j in range(A.dim)] for i in range(A.dim)]
