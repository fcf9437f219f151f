"""Hochschild, cyclic and periodic cyclic homology via the cyclic bicomplex.

Chains of degree n live in A^(n+1) (tensor words over the algebra basis).
The bicomplex has b in even columns, -b' in odd columns, 1 - lambda from
odd to even columns and N from even to odd columns. Periodic ranks are
read off once HC has stabilised across consecutive degrees of each parity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as cartesian
from typing import Iterable, Mapping, Sequence

from .algebra import AlgebraElement, StructureAlgebra, TraceFunctional
from .errors import (AlgebraMismatch, InputError, NotIdempotent, OddDegree,
                     SizeBound)
from .exact import (Echelon, SparseMatrix, format_rational, parse_rational,
                    rank)

DEFAULT_MAX_DIM = 200_000


def _add(acc: dict, key, v):
    w = acc.get(key, 0) + v
    if w:
        acc[key] = w
    else:
        acc.pop(key, None)


class Chain:
    """Element of A^(degree+1): sparse map from basis words to rationals."""

    __slots__ = ("algebra", "degree", "coeffs")

    def __init__(self, algebra: StructureAlgebra, degree: int, coeffs: Mapping):
        if degree < 0:
            raise InputError("chain degree must be >= 0")
        clean = {}
        for w, v in coeffs.items():
            w = tuple(w)
            if len(w) != degree + 1 or any(not 0 <= i < algebra.dim for i in w):
                raise InputError(f"word {w!r} does not fit degree {degree}")
            if v:
                clean[w] = Fraction(v)
        self.algebra = algebra
        self.degree = degree
        self.coeffs = clean

    @classmethod
    def zero(cls, algebra, degree):
        return cls(algebra, degree, {})

    def _check(self, other: "Chain"):
        if other.algebra is not self.algebra:
            raise AlgebraMismatch(f"{self.algebra.name} vs {other.algebra.name}")
        if other.degree != self.degree:
            raise InputError(f"degree {self.degree} vs {other.degree}")

    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for w, v in other.coeffs.items():
            _add(out, w, v)
        return Chain(self.algebra, self.degree, out)

    def __sub__(self, other):
        return self + (-1) * other

    def __rmul__(self, c):
        c = Fraction(c)
        return Chain(self.algebra, self.degree, {w: c * v for w, v in self.coeffs.items()})

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return (other.algebra is self.algebra and other.degree == self.degree
                and other.coeffs == self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __repr__(self):
        labels = self.algebra.labels
        parts = [f"{format_rational(v)}*" + "(x)".join(labels[i] for i in w)
                 for w, v in sorted(self.coeffs.items())]
        return f"Chain[{self.degree}](" + (" + ".join(parts) or "0") + ")"

    @classmethod
    def from_elements(cls, elements: Sequence[AlgebraElement]) -> "Chain":
        """The elementary tensor a_0 (x) ... (x) a_n."""
        A = elements[0].algebra
        out = {(): Fraction(1)}
        for a in elements:
            if a.algebra is not A:
                raise AlgebraMismatch("tensor factors from different algebras")
            out = {w + (i,): c * v for w, c in out.items() for i, v in a.coords.items()}
        return cls(A, len(elements) - 1, out)


# -- operators on basis words -------------------------------------------------

def _bprime_word(A: StructureAlgebra, w: tuple) -> dict:
    out: dict = {}
    n = len(w) - 1
    for j in range(n):
        sign = -1 if j % 2 else 1
        for k, c in A.mul_basis(w[j], w[j + 1]).items():
            _add(out, w[:j] + (k,) + w[j + 2:], sign * c)
    return out


def _b_word(A: StructureAlgebra, w: tuple) -> dict:
    out = _bprime_word(A, w)
    n = len(w) - 1
    sign = -1 if n % 2 else 1
    for k, c in A.mul_basis(w[n], w[0]).items():
        _add(out, (k,) + w[1:n], sign * c)
    return out


def _lambda_word(w: tuple) -> tuple[tuple, int]:
    n = len(w) - 1
    return (w[n],) + w[:n], (-1 if n % 2 else 1)


def _apply(c: Chain, word_map, degree_shift: int) -> Chain:
    out: dict = {}
    for w, v in c.coeffs.items():
        for w2, u in word_map(w).items():
            _add(out, w2, v * u)
    return Chain(c.algebra, c.degree + degree_shift, out)


def op_bprime(c: Chain) -> Chain:
    """b'(a_0..a_n) = sum_{j<n} (-1)^j a_0..a_j a_{j+1}..a_n; zero on degree 0."""
    if c.degree == 0:
        return Chain.zero(c.algebra, 0)
    return _apply(c, lambda w: _bprime_word(c.algebra, w), -1)


def op_b(c: Chain) -> Chain:
    """Hochschild boundary: b' plus (-1)^n a_n a_0 (x) a_1..a_{n-1}."""
    if c.degree == 0:
        return Chain.zero(c.algebra, 0)
    return _apply(c, lambda w: _b_word(c.algebra, w), -1)


def op_lambda(c: Chain) -> Chain:
    out = {}
    for w, v in c.coeffs.items():
        w2, s = _lambda_word(w)
        _add(out, w2, s * v)
    return Chain(c.algebra, c.degree, out)


def op_N(c: Chain) -> Chain:
    total = c
    cur = c
    for _ in range(c.degree):
        cur = op_lambda(cur)
        total = total + cur
    return total


def is_entire_finite(norms: Sequence) -> bool:
    """Entireness of a chain with finitely many nonzero components.

    The growth series sum n!/[n/2]! |f_n| z^n is then a polynomial, whose
    radius of convergence is infinite, so the answer is always True.
    """
    for x in norms:
        if Fraction(x) < 0:
            raise InputError("norms must be non-negative")
    return True


# -- bicomplex homology -------------------------------------------------------

@dataclass
class HomologyReport:
    algebra: str
    method: str
    cap: int
    hh: list[int] = field(default_factory=list)
    hc: list[int] = field(default_factory=list)
    hp0: int | None = None
    hp1: int | None = None
    stable: bool = False
    stabilized_at: int | None = None

    @property
    def hp(self) -> tuple:
        return (self.hp0, self.hp1)

    def to_dict(self) -> dict:
        doc = {"algebra": self.algebra, "method": self.method}
        if self.method == "bicomplex":
            doc.update(cap=self.cap, hh=list(self.hh), hc=list(self.hc))
        else:
            doc["order"] = self.cap
        doc["hp"] = {"even": self.hp0, "odd": self.hp1, "stable": self.stable}
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def _word_index(w: tuple, d: int) -> int:
    i = 0
    for x in w:
        i = i * d + x
    return i


def _words(d: int, q: int):
    return cartesian(range(d), repeat=q + 1)


def tot_dim(d: int, n: int) -> int:
    """Dimension of the degree-n total space, sum over columns of d^(q+1)."""
    return sum(d ** (q + 1) for q in range(n + 1))


def _check_composites(maps: Sequence[SparseMatrix]):
    from .errors import CompositionNonzero
    for lo, hi in zip(maps, maps[1:]):
        if lo.cols != hi.rows:
            continue
        if not (lo @ hi).is_zero():
            raise CompositionNonzero("boundary squared is nonzero")


def _b_matrix(A, q, images) -> SparseMatrix:
    """b : C_q -> C_{q-1} as a matrix (columns are images of basis words)."""
    d = A.dim
    return SparseMatrix.from_columns(d ** q, [{_word_index(w, d): v for w, v in img.items()}
                                              for img in images])


def _total_differential(A: StructureAlgebra, n: int, b_img, bp_img) -> SparseMatrix:
    """d : Tot_n -> Tot_{n-1}; Tot_n = sum_{p=0}^{n} C_{n-p} in column order."""
    d = A.dim
    off_src = [sum(d ** (n - r + 1) for r in range(p)) for p in range(n + 1)]
    off_dst = [sum(d ** (n - 1 - r + 1) for r in range(p)) for p in range(n)]
    columns = []
    for p in range(n + 1):
        q = n - p
        for idx, w in enumerate(_words(d, q)):
            col: dict = {}
            if q >= 1:
                # vertical, stays in column p, degree q-1
                img = b_img[q][idx] if p % 2 == 0 else bp_img[q][idx]
                s = 1 if p % 2 == 0 else -1
                for w2, v in img.items():
                    _add(col, off_dst[p] + _word_index(w2, d), s * v)
            if p >= 1:
                # horizontal, to column p-1, same q
                base = off_dst[p - 1]
                if p % 2 == 1:
                    _add(col, base + idx, 1)
                    w2, s = _lambda_word(w)
                    _add(col, base + _word_index(w2, d), -s)
                else:
                    cur, s = w, 1
                    for _ in range(q + 1):
                        _add(col, base + _word_index(cur, d), s)
                        cur, t = _lambda_word(cur)
                        s *= t
            columns.append(col)
    return SparseMatrix.from_columns(tot_dim(d, n - 1), columns)


def _declare_hp(hc: Sequence[int], cap: int):
    evens = [n for n in range(cap + 1) if n % 2 == 0]
    odds = [n for n in range(cap + 1) if n % 2 == 1]
    even_ok = len(evens) >= 2 and hc[evens[-1]] == hc[evens[-2]]
    # with a single odd degree available there is nothing to compare against
    odd_ok = len(odds) < 2 or hc[odds[-1]] == hc[odds[-2]]
    stable = even_ok and odd_ok and bool(odds)
    hp0 = hc[evens[-1]] if stable else None
    hp1 = hc[odds[-1]] if stable else None
    return hp0, hp1, stable


def bicomplex_homology(A: StructureAlgebra, cap: int, max_dim: int = DEFAULT_MAX_DIM) -> HomologyReport:
    """HH_n and HC_n for n <= cap, with HP declared by stabilisation."""
    if cap < 2:
        raise InputError(f"cap must be >= 2, got {cap}")
    d = A.dim
    need = tot_dim(d, cap + 1)
    if need > max_dim:
        raise SizeBound(f"total chain space of dimension {need} exceeds bound {max_dim}")

    b_img = {q: [_b_word(A, w) for w in _words(d, q)] for q in range(1, cap + 2)}
    bp_img = {q: [_bprime_word(A, w) for w in _words(d, q)] for q in range(1, cap + 2)}

    b_mats = [_b_matrix(A, q, b_img[q]) for q in range(1, cap + 2)]
    _check_composites(b_mats)
    b_rank = {q: rank(m) for q, m in zip(range(1, cap + 2), b_mats)}
    b_rank[0] = 0
    hh = [d ** (n + 1) - b_rank[n] - b_rank[n + 1] for n in range(cap + 1)]

    tot = [_total_differential(A, n, b_img, bp_img) for n in range(1, cap + 2)]
    _check_composites(tot)
    t_rank = {n: rank(m) for n, m in zip(range(1, cap + 2), tot)}
    t_rank[0] = 0
    hc = [tot_dim(d, n) - t_rank[n] - t_rank[n + 1] for n in range(cap + 1)]

    hp0, hp1, stable = _declare_hp(hc, cap)
    return HomologyReport(A.name, "bicomplex", cap, hh, hc, hp0, hp1, stable,
                          stabilized_at=cap - cap % 2)


def hc0_inclusion_rank(A: StructureAlgebra, B: StructureAlgebra, embedding: Sequence[Mapping]) -> int:
    """Rank of HC_0(A) -> HC_0(B) = B/[B,B] induced by an algebra map.

    ``embedding[i]`` holds the B-coordinates of the image of e_i.
    """
    comm = []
    for i in range(B.dim):
        for j in range(i + 1, B.dim):
            diff = dict(B.mul_basis(i, j))
            for k, v in B.mul_basis(j, i).items():
                _add(diff, k, -v)
            if diff:
                comm.append(diff)
    base = Echelon(B.dim, comm)
    images = [base.reduce(v) for v in embedding]
    return Echelon(B.dim, [v for v in images if v]).rank


# -- cochains and the pairing ---------------------------------------------------

class CochainFunctional:
    """(n+1)-linear functional, stored by its values on basis words."""

    __slots__ = ("algebra", "degree", "values")

    def __init__(self, algebra: StructureAlgebra, degree: int, values: Mapping):
        clean = {}
        for w, v in values.items():
            w = tuple(w)
            if len(w) != degree + 1 or any(not 0 <= i < algebra.dim for i in w):
                raise InputError(f"word {w!r} does not fit degree {degree}")
            if v:
                clean[w] = Fraction(v)
        self.algebra = algebra
        self.degree = degree
        self.values = clean

    @classmethod
    def from_trace(cls, A: StructureAlgebra, tau: TraceFunctional) -> "CochainFunctional":
        return cls(A, 0, {(i,): c for i, c in enumerate(tau.coords)})

    @classmethod
    def trace_cocycle(cls, A: StructureAlgebra, tau: TraceFunctional, degree: int) -> "CochainFunctional":
        """phi(a_0, ..., a_n) = tau(a_0 a_1 ... a_n); a cyclic cocycle for even n."""
        vals = {}
        for w in _words(A.dim, degree):
            prod_vec = {w[0]: Fraction(1)}
            for i in w[1:]:
                prod_vec = A.mul(prod_vec, {i: 1})
                if not prod_vec:
                    break
            val = tau(prod_vec)
            if val:
                vals[w] = val
        return cls(A, degree, vals)

    def __call__(self, *elements) -> Fraction:
        if len(elements) != self.degree + 1:
            raise InputError(f"need {self.degree + 1} arguments")
        coords = [e.coords if isinstance(e, AlgebraElement) else e for e in elements]
        total = Fraction(0)
        for w, v in self.values.items():
            t = v
            for c, i in zip(coords, w):
                x = c.get(i)
                if not x:
                    break
                t *= x
            else:
                total += t
        return total

    def __add__(self, other):
        if other.algebra is not self.algebra or other.degree != self.degree:
            raise AlgebraMismatch("cochains live on different spaces")
        out = dict(self.values)
        for w, v in other.values.items():
            _add(out, w, v)
        return CochainFunctional(self.algebra, self.degree, out)

    def __rmul__(self, c):
        c = Fraction(c)
        return CochainFunctional(self.algebra, self.degree, {w: c * v for w, v in self.values.items()})

    def __eq__(self, other):
        if not isinstance(other, CochainFunctional):
            return NotImplemented
        return (other.algebra is self.algebra and other.degree == self.degree
                and other.values == self.values)

    def op_lambda(self) -> "CochainFunctional":
        """(lambda phi)(a_0..a_n) = (-1)^n phi(a_n, a_0, .., a_{n-1})."""
        n = self.degree
        s = -1 if n % 2 else 1
        # phi(a_n, a_0..a_{n-1}) at word w is the value at (w_n, w_0..w_{n-1})
        out = {w[1:] + w[:1]: s * v for w, v in self.values.items()}
        return CochainFunctional(self.algebra, n, out)

    def cyclic_sum(self) -> "CochainFunctional":
        """sum_j lambda^j phi, a cyclic cochain."""
        total, cur = self, self
        for _ in range(self.degree):
            cur = cur.op_lambda()
            total = total + cur
        return total

    def is_cyclic(self) -> bool:
        return self.op_lambda() == self

    def coboundary(self) -> "CochainFunctional":
        """Hochschild coboundary (b phi)(a_0..a_{n+1})."""
        A, n = self.algebra, self.degree
        out: dict = {}
        for w in _words(A.dim, n + 1):
            val = Fraction(0)
            for w2, c in _b_word(A, w).items():
                x = self.values.get(w2)
                if x:
                    val += c * x
            if val:
                out[w] = val
        return CochainFunctional(A, n + 1, out)

    def to_json(self) -> str:
        vals = [[list(w), format_rational(v)] for w, v in sorted(self.values.items())]
        return json.dumps({"degree": self.degree, "values": vals}, separators=(",", ":"))

    @classmethod
    def from_json(cls, A: StructureAlgebra, text: str) -> "CochainFunctional":
        doc = json.loads(text)
        return cls(A, doc["degree"], {tuple(w): parse_rational(v) for w, v in doc["values"]})


def cocycle_amplify(phi: CochainFunctional, k: int, target: StructureAlgebra | None = None) -> CochainFunctional:
    """(phi # tr)(m_0 (x) a_0, ..., m_n (x) a_n) = tr(m_0 ... m_n) phi(a_0, ..., a_n).

    ``target`` must be ``amplify(phi.algebra, k)`` when given; it is built
    otherwise.
    """
    from .algebra import amplify
    A = phi.algebra
    if k == 1 and target is None:
        return phi
    if target is None:
        target = amplify(A, k)
    if target.amplified_from is None or target.amplified_from[0] is not A or target.amplified_from[1] != k:
        raise AlgebraMismatch(f"{target.name} is not amplify({A.name}, {k})")
    d = A.dim
    n = phi.degree
    out = {}
    # tr(E_{i0 i1} E_{i1 i2} ... E_{in i0}) = 1; every other unit word has trace 0
    for cyc in cartesian(range(k), repeat=n + 1):
        mats = [(cyc[t], cyc[(t + 1) % (n + 1)]) for t in range(n + 1)]
        for w, v in phi.values.items():
            out[tuple((i * k + j) * d + b for (i, j), b in zip(mats, w))] = v
    return CochainFunctional(target, n, out)


def pair_idempotent(e: AlgebraElement, phi: CochainFunctional) -> Fraction:
    """((-1)^m / m!) (phi # tr)(e, ..., e) for phi of degree 2m."""
    if phi.degree % 2:
        raise OddDegree(f"pairing with idempotents needs even degree, got {phi.degree}")
    if not e.is_idempotent():
        raise NotIdempotent(f"{e!r} is not idempotent")
    B = e.algebra
    if B is phi.algebra:
        amp = phi
    elif B.amplified_from is not None and B.amplified_from[0] is phi.algebra:
        amp = cocycle_amplify(phi, B.amplified_from[1], target=B)
    else:
        raise AlgebraMismatch(f"{B.name} is neither {phi.algebra.name} nor an amplification of it")
    m = phi.degree // 2
    value = amp(*([e] * (phi.degree + 1)))
    return Fraction((-1) ** m, math.factorial(m)) * value
