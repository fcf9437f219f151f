"""Noncommutative differential forms, the Fedosov product and X-complexes.

Forms over a unital algebra A are written a_0 da_1 ... da_k with a_0 in A and
a_1..a_k in A/Q1, so d1 = 0. We fix the basis of A as {1} together with all
basis vectors except one "pivot" vector that carries the unit; heads of
words are UNIT or a non-pivot basis index, slots are non-pivot indices.

RA is the space of even forms with the Fedosov product
u o v = uv - (-1)^|u| du dv, and IA (forms of degree >= 2) satisfies
(IA)^n = forms of degree >= 2n. Truncating at degree 2m is therefore exactly
the quotient RA/(IA)^(m+1), which is where every X-complex computation lives.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product as cartesian
from math import comb, factorial
from typing import Mapping, Sequence

from .algebra import AlgebraElement, StructureAlgebra
from .cyclic import DEFAULT_MAX_DIM, HomologyReport
from .errors import (AlgebraMismatch, CapMismatch, CompositionNonzero,
                     InputError, InvariantViolation, NotIdempotent,
                     NotInvertible, SizeBound)
from .exact import (Echelon, SparseMatrix, format_rational, homology_rank,
                    parse_rational, rank)

UNIT = -1


def _add(acc: dict, key, v):
    w = acc.get(key, 0) + v
    if w:
        acc[key] = w
    else:
        acc.pop(key, None)


class FormSpace:
    """Form calculus for one algebra: reduced basis and Leibniz rewriting."""

    def __init__(self, A: StructureAlgebra):
        if not A.unit:
            raise InputError(f"{A.name} has no unit")
        self.algebra = A
        self.pivot = min(A.unit)
        self.slots = tuple(i for i in range(A.dim) if i != self.pivot)
        self.heads = (UNIT,) + self.slots
        self._head_mul: dict = {}
        self._rmul: dict = {}

    def to_reduced(self, coords: Mapping) -> dict:
        """Coordinates in the basis {1} + non-pivot basis vectors."""
        A, p = self.algebra, self.pivot
        up = A.unit[p]
        xp = Fraction(coords.get(p, 0))
        out = {}
        if xp:
            out[UNIT] = xp / up
        for i in self.slots:
            w = Fraction(coords.get(i, 0))
            if xp:
                w -= xp * A.unit.get(i, 0) / up
            if w:
                out[i] = w
        return out

    def from_reduced(self, red: Mapping) -> dict:
        out: dict = {}
        for h, c in red.items():
            if h == UNIT:
                for k, v in self.algebra.unit.items():
                    _add(out, k, c * v)
            else:
                _add(out, h, c)
        return out

    def head_mul(self, h1: int, h2: int) -> dict:
        key = (h1, h2)
        res = self._head_mul.get(key)
        if res is None:
            if h1 == UNIT:
                res = {h2: Fraction(1)}
            elif h2 == UNIT:
                res = {h1: Fraction(1)}
            else:
                res = self.to_reduced(self.algebra.mul_basis(h1, h2))
            self._head_mul[key] = res
        return res

    def rmul(self, word: tuple, b: int) -> dict:
        """(a_0 da_1..da_k) * b with b a head, rewritten into normal form."""
        if b == UNIT:
            return {word: Fraction(1)}
        key = (word, b)
        res = self._rmul.get(key)
        if res is not None:
            return res
        if len(word) == 1:
            res = {(h,): c for h, c in self.head_mul(word[0], b).items()}
        else:
            # w da_k b = w d(a_k b) - (w a_k) db
            prefix, last = word[:-1], word[-1]
            res = {}
            for h, c in self.head_mul(last, b).items():
                if h != UNIT:
                    _add(res, prefix + (h,), c)
            for w2, c in self.rmul(prefix, last).items():
                _add(res, w2 + (b,), -c)
        self._rmul[key] = res
        return res

    def even_words(self, max_degree: int) -> list[tuple]:
        out = []
        for k in range(0, max_degree + 1, 2):
            for h in self.heads:
                for s in cartesian(self.slots, repeat=k):
                    out.append((h,) + s)
        return out

    def words(self, degree: int) -> list[tuple]:
        return [(h,) + s for h in self.heads for s in cartesian(self.slots, repeat=degree)]


@lru_cache(maxsize=None)
def form_space(A: StructureAlgebra) -> FormSpace:
    return FormSpace(A)


# -- raw operations on term dicts -------------------------------------------

def _mul_terms(fs: FormSpace, u: Mapping, v: Mapping, cap: int):
    out: dict = {}
    dropped = False
    for wu, cu in u.items():
        du = len(wu) - 1
        for wv, cv in v.items():
            if du + len(wv) - 1 > cap:
                dropped = True
                continue
            tail = wv[1:]
            for w, c in fs.rmul(wu, wv[0]).items():
                _add(out, w + tail, cu * cv * c)
    return out, dropped


def _d_terms(u: Mapping, cap: int, signed=False):
    out: dict = {}
    dropped = False
    for w, c in u.items():
        if w[0] == UNIT:
            continue
        if len(w) > cap:
            dropped = True
            continue
        if signed and (len(w) - 1) % 2:
            c = -c
        _add(out, (UNIT,) + w, c)
    return out, dropped


def _fedosov_terms(fs: FormSpace, u: Mapping, v: Mapping, cap: int):
    out, dropped = _mul_terms(fs, u, v, cap)
    # only du dv of total degree <= cap survives, so a cap-2 bound is enough
    du, _ = _d_terms(u, cap, signed=True)
    dv, _ = _d_terms(v, cap)
    corr, _ = _mul_terms(fs, du, dv, cap)
    for w, c in corr.items():
        _add(out, w, -c)
    return out, dropped


# -- public form types ---------------------------------------------------------

class NCForm:
    """Truncated noncommutative differential form over a unital algebra."""

    __slots__ = ("space", "cap", "terms", "truncated")

    def __init__(self, space: FormSpace | StructureAlgebra, cap: int, terms: Mapping,
                 truncated: bool = False):
        if isinstance(space, StructureAlgebra):
            space = form_space(space)
        if cap < 0:
            raise InputError("cap must be >= 0")
        slots = set(space.slots)
        clean = {}
        for w, c in terms.items():
            w = tuple(w)
            if not w or (w[0] != UNIT and w[0] not in slots) or any(s not in slots for s in w[1:]):
                raise InputError(f"{w!r} is not a reduced form word")
            if len(w) - 1 > cap:
                raise CapMismatch(f"term of degree {len(w) - 1} above cap {cap}")
            if c:
                clean[w] = Fraction(c)
        self.space = space
        self.cap = cap
        self.terms = clean
        self.truncated = truncated

    @property
    def algebra(self) -> StructureAlgebra:
        return self.space.algebra

    @classmethod
    def from_element(cls, a: AlgebraElement, cap: int) -> "NCForm":
        fs = form_space(a.algebra)
        return cls(fs, cap, {(h,): c for h, c in fs.to_reduced(a.coords).items()})

    @classmethod
    def unit(cls, A: StructureAlgebra, cap: int) -> "NCForm":
        return cls(A, cap, {(UNIT,): 1})

    @classmethod
    def d_of(cls, a: AlgebraElement, cap: int) -> "NCForm":
        """da for a in A (degree one)."""
        fs = form_space(a.algebra)
        return cls(fs, cap, {(UNIT, h): c for h, c in fs.to_reduced(a.coords).items() if h != UNIT})

    def _same(self, other: "NCForm"):
        if other.space is not self.space:
            raise AlgebraMismatch(f"{self.algebra.name} vs {other.algebra.name}")
        if other.cap != self.cap:
            raise CapMismatch(f"cap {self.cap} vs {other.cap}")

    def _new(self, terms, truncated=False):
        return type(self)(self.space, self.cap, terms, truncated)

    def __add__(self, other):
        self._same(other)
        out = dict(self.terms)
        for w, c in other.terms.items():
            _add(out, w, c)
        return self._new(out, self.truncated or other.truncated)

    def __neg__(self):
        return self._new({w: -c for w, c in self.terms.items()}, self.truncated)

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        c = Fraction(c)
        return self._new({w: c * v for w, v in self.terms.items()}, self.truncated)

    def __eq__(self, other):
        if not isinstance(other, NCForm):
            return NotImplemented
        return other.space is self.space and other.cap == self.cap and other.terms == self.terms

    def __repr__(self):
        return f"{type(self).__name__}(cap={self.cap}, {self.to_text()})"

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        labels = self.algebra.labels
        parts = []
        for w, c in sorted(self.terms.items()):
            head = "1" if w[0] == UNIT else labels[w[0]]
            parts.append(f"{format_rational(c)}*{head}" + "".join(f" d{labels[s]}" for s in w[1:]))
        return " + ".join(parts)

    def degrees(self) -> set[int]:
        return {len(w) - 1 for w in self.terms}

    def part(self, degree: int) -> "NCForm":
        return self._new({w: c for w, c in self.terms.items() if len(w) - 1 == degree})

    def is_zero(self) -> bool:
        return not self.terms

    def is_even(self) -> bool:
        return all((len(w) - 1) % 2 == 0 for w in self.terms)

    def with_cap(self, cap: int) -> "NCForm":
        """Re-truncate (or extend) to another cap."""
        kept = {w: c for w, c in self.terms.items() if len(w) - 1 <= cap}
        return type(self)(self.space, cap, kept, self.truncated or len(kept) < len(self.terms))

    def degree0_projection(self) -> AlgebraElement:
        """The quotient map RA -> RA/IA = A."""
        red = {w[0]: c for w, c in self.terms.items() if len(w) == 1}
        return AlgebraElement(self.algebra, self.space.from_reduced(red))

    def in_adic_ideal(self, m: int) -> bool:
        """Membership in (IA)^(m+1), i.e. every term has degree >= 2m + 2."""
        return all(len(w) - 1 >= 2 * m + 2 for w in self.terms)

    def to_json(self) -> str:
        terms = [{"head": "UNIT" if w[0] == UNIT else w[0], "d": list(w[1:]), "c": format_rational(c)}
                 for w, c in sorted(self.terms.items())]
        return json.dumps({"cap": self.cap, "terms": terms}, separators=(",", ":"))

    @classmethod
    def from_json(cls, A: StructureAlgebra, text: str) -> "NCForm":
        doc = json.loads(text)
        terms = {}
        for t in doc["terms"]:
            head = UNIT if t["head"] == "UNIT" else int(t["head"])
            terms[(head, *t["d"])] = parse_rational(t["c"])
        return cls(A, doc["cap"], terms)


class FedosovElement(NCForm):
    """Even form, an element of RA under the Fedosov product."""

    __slots__ = ()

    def __init__(self, space, cap, terms, truncated=False):
        super().__init__(space, cap, terms, truncated)
        if not self.is_even():
            raise InputError("Fedosov elements must be even forms")

    @classmethod
    def of(cls, u: NCForm) -> "FedosovElement":
        return cls(u.space, u.cap, u.terms, u.truncated)

    def __matmul__(self, other):
        return fedosov_mul(self, other)

    def power(self, n: int) -> "FedosovElement":
        out = FedosovElement.unit(self.algebra, self.cap)
        for _ in range(n):
            out = fedosov_mul(out, self)
        return out


def form_mul(u: NCForm, v: NCForm) -> NCForm:
    """Product in the universal differential algebra, truncated at the cap."""
    u._same(v)
    terms, dropped = _mul_terms(u.space, u.terms, v.terms, u.cap)
    return NCForm(u.space, u.cap, terms, dropped or u.truncated or v.truncated)


def form_d(u: NCForm) -> NCForm:
    terms, dropped = _d_terms(u.terms, u.cap)
    return NCForm(u.space, u.cap, terms, dropped or u.truncated)


def fedosov_mul(u: NCForm, v: NCForm) -> FedosovElement:
    """u o v = uv - (-1)^|u| du dv, for even u and v."""
    u._same(v)
    if not (u.is_even() and v.is_even()):
        raise InputError("Fedosov product is defined on even forms")
    terms, dropped = _fedosov_terms(u.space, u.terms, v.terms, u.cap)
    return FedosovElement(u.space, u.cap, terms, dropped or u.truncated or v.truncated)


# -- the identification of Omega A with RA + Omega^1(RA)_natural -----------------

@dataclass
class RAImage:
    """Image under the identification: an even part in the tensor algebra
    T(A/Q1) (words of slot indices, () = 1) and an odd part in
    T(A/Q1) (x) A/Q1, i.e. classes x d(rho a) in Omega^1(RA)_natural.
    """

    even: dict
    odd: dict


def _tmul(x: Mapping, y: Mapping) -> dict:
    out: dict = {}
    for a, c in x.items():
        for b, e in y.items():
            _add(out, a + b, c * e)
    return out


def _rho(h: int) -> dict:
    return {(): Fraction(1)} if h == UNIT else {(h,): Fraction(1)}


def _omega(fs: FormSpace, a: int, b: int) -> dict:
    """omega(a, b) = rho(ab) - rho(a) rho(b) in the tensor algebra."""
    out = {}
    for h, c in fs.head_mul(a, b).items():
        _add(out, () if h == UNIT else (h,), c)
    _add(out, (a, b), -1)
    return out


def _phi_even_word(fs: FormSpace, w: tuple) -> dict:
    acc = _rho(w[0])
    for i in range(1, len(w), 2):
        acc = _tmul(acc, _omega(fs, w[i], w[i + 1]))
    return acc


def omega_to_ra(u: NCForm) -> RAImage:
    """a_0 da_1..da_2n -> rho(a_0) omega(a_1,a_2)..omega(a_{2n-1},a_2n), and
    a_0 da_1..da_{2n+1} -> [same] d rho(a_{2n+1}).
    """
    fs = u.space
    even: dict = {}
    odd: dict = {}
    for w, c in u.terms.items():
        k = len(w) - 1
        if k % 2 == 0:
            for t, v in _phi_even_word(fs, w).items():
                _add(even, t, c * v)
        else:
            for t, v in _phi_even_word(fs, w[:-1]).items():
                _add(odd, (t, w[-1]), c * v)
    return RAImage(even, odd)


def tensor_mul(x: Mapping, y: Mapping) -> dict:
    """Concatenation product in the tensor algebra model of RA."""
    return _tmul(x, y)


def omega_to_ra_rank(A: StructureAlgebra, max_degree: int) -> tuple[int, int, int, int]:
    """(rank, dim) of the identification on even and on odd forms of degree <= max_degree."""
    fs = form_space(A)
    results = []
    for parity in (0, 1):
        words = [w for k in range(parity, max_degree + 1, 2) for w in fs.words(k)]
        images = []
        for w in words:
            img = omega_to_ra(NCForm(fs, max_degree, {w: 1}))
            images.append(img.even if parity == 0 else img.odd)
        index: dict = {}
        cols = []
        for img in images:
            cols.append({index.setdefault(t, len(index)): v for t, v in img.items()})
        m = SparseMatrix.from_columns(max(len(index), 1), cols)
        results += [rank(m), len(words)]
    return tuple(results)


# -- X-complex stages -------------------------------------------------------------

class XStage:
    """Truncated X-complex of (RA, IA) at adic order m.

    Even side: S = RA/(IA)^(m+1), the even forms of degree <= 2m under the
    Fedosov product. Odd side: Omega^1(RA)_natural modulo
    natural((IA)^(m+1) dRA + (IA)^m dIA), realised as (S (x) S/Q1) modulo
    [S, Omega^1 S] and the classes x' d omega(b1, b2) with x' in (IA)^m.
    With ``filtration=False`` the second family is left out, which gives the
    X-complex of the algebra S itself; its odd homology carries extra classes
    that only die further up the tower.

    The commutator relations only need commutators with the algebra
    generators rho(e_i), since [yz, w] = [y, zw] + [z, wy].
    """

    def __init__(self, A: StructureAlgebra, m: int, max_dim: int = DEFAULT_MAX_DIM,
                 filtration: bool = True):
        if m < 0:
            raise InputError("adic order must be >= 0")
        fs = form_space(A)
        self.algebra = A
        self.space = fs
        self.m = m
        self.cap = 2 * m
        self.basis = fs.even_words(self.cap)
        self.index = {w: i for i, w in enumerate(self.basis)}
        D = len(self.basis)
        self.D = D
        self.unit_index = self.index[(UNIT,)]
        self.bar = [i for i in range(D) if i != self.unit_index]
        self.bar_pos = {i: k for k, i in enumerate(self.bar)}
        self.W = D * (D - 1)
        if self.W > max_dim:
            raise SizeBound(f"one-form space of dimension {self.W} exceeds bound {max_dim}")
        self._prod: dict = {}
        self.generators = [self.index[(s,)] for s in fs.slots]

        relations = []
        for z in self.generators:
            for x in range(D):
                zx = self.mul(z, x)
                for y in self.bar:
                    rel: dict = {}
                    for a, c in zx.items():
                        self._w_add(rel, a, {y: 1}, c)
                    self._w_add(rel, x, self.mul(y, z), -1)
                    self._w_add(rel, None, {z: 1}, 1, left=self.mul(x, y))
                    if rel:
                        relations.append(rel)
        # natural(x' d omega(b1, b2)) for x' in (IA)^m, omega(b1,b2) = b1b2 - b1 o b2
        for x in range(D if filtration else 0):
            if len(self.basis[x]) - 1 != self.cap:
                continue
            for b1 in self.generators:
                for b2 in self.generators:
                    rel = {}
                    ab = {self.index[(h,)]: c for h, c in
                          fs.head_mul(self.basis[b1][0], self.basis[b2][0]).items()}
                    self._w_add(rel, x, ab, 1)
                    self._w_add(rel, None, {b1: 1}, -1, left=self.mul(b2, x))
                    self._w_add(rel, None, {b2: 1}, -1, left=self.mul(x, b1))
                    if rel:
                        relations.append(rel)
        self.relations = Echelon(self.W, relations)
        self.free = [c for c in range(self.W) if c not in self.relations.pivot_cols]
        self.free_pos = {c: k for k, c in enumerate(self.free)}
        self.Q = len(self.free)

        natd_cols = [self.to_quotient(self._w_vec(self.unit_index, {s: 1})) for s in range(D)]
        self.natd = SparseMatrix.from_columns(self.Q, natd_cols)
        bbar_cols = []
        for c in self.free:
            x, y = divmod(c, D - 1)
            y = self.bar[y]
            comm = dict(self.mul(x, y))
            for k, v in self.mul(y, x).items():
                _add(comm, k, -v)
            bbar_cols.append(comm)
        self.bbar = SparseMatrix.from_columns(D, bbar_cols)
        self._check_well_defined(relations)

    # S arithmetic on basis indices
    def mul(self, i: int, j: int) -> dict:
        key = (i, j)
        res = self._prod.get(key)
        if res is None:
            terms, _ = _fedosov_terms(self.space, {self.basis[i]: 1}, {self.basis[j]: 1}, self.cap)
            res = {self.index[w]: c for w, c in terms.items()}
            self._prod[key] = res
        return res

    def mul_vec(self, u: Mapping, v: Mapping) -> dict:
        out: dict = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.mul(i, j).items():
                    _add(out, k, a * b * c)
        return out

    def _w_add(self, acc, x, yvec, coeff, left=None):
        """acc += coeff * (x (x) y) with y given as an S-vector (unit part dropped)."""
        lefts = {x: Fraction(1)} if left is None else left
        for a, ca in lefts.items():
            for y, cy in yvec.items():
                if y == self.unit_index:
                    continue
                _add(acc, a * (self.D - 1) + self.bar_pos[y], coeff * ca * cy)

    def _w_vec(self, x: int, yvec: Mapping) -> dict:
        acc: dict = {}
        self._w_add(acc, x, yvec, 1)
        return acc

    def w_vector(self, left: Mapping, right: Mapping) -> dict:
        """The one-form sum left_i d(right_j) as a vector of S (x) S/Q1."""
        acc: dict = {}
        self._w_add(acc, None, right, 1, left=left)
        return acc

    def to_quotient(self, wvec: Mapping) -> dict:
        red = self.relations.reduce(wvec)
        return {self.free_pos[c]: v for c, v in red.items()}

    def _check_well_defined(self, relations):
        for rel in relations:
            img: dict = {}
            for c, v in rel.items():
                x, y = divmod(c, self.D - 1)
                y = self.bar[y]
                for k, w in self.mul(x, y).items():
                    _add(img, k, v * w)
                for k, w in self.mul(y, x).items():
                    _add(img, k, -v * w)
            if img:
                raise CompositionNonzero("commutator map does not vanish on [S, Omega^1 S]")

    def vector(self, u: NCForm) -> dict:
        """S-coordinates of an even form (terms above the stage are dropped)."""
        if u.space is not self.space:
            raise AlgebraMismatch("form over a different algebra")
        return {self.index[w]: c for w, c in u.terms.items() if len(w) - 1 <= self.cap}

    def homology(self) -> tuple[int, int]:
        h0 = homology_rank(self.bbar, self.natd)
        h1 = homology_rank(self.natd, self.bbar)
        return h0, h1

    def h0_normal_form(self, svec: Mapping) -> dict:
        """Normal form of an even cycle modulo [S, S]."""
        if self.natd.apply(svec):
            raise InvariantViolation("not a cycle: natural d does not vanish")
        if not hasattr(self, "_im_bbar"):
            self._im_bbar = Echelon(self.D, self.bbar.transpose().row_dicts())
        return self._im_bbar.reduce(svec)

    def h1_normal_form(self, qvec: Mapping) -> dict:
        """Normal form of an odd cycle modulo the image of natural d."""
        if self.bbar.apply(qvec):
            raise InvariantViolation("not a cycle: commutator map does not vanish")
        if not hasattr(self, "_im_natd"):
            self._im_natd = Echelon(self.Q, self.natd.transpose().row_dicts())
        return self._im_natd.reduce(qvec)

    def project_odd(self, qvec: Mapping, lower: "XStage") -> dict:
        """Image of an odd class under the truncation map to a lower stage."""
        if lower.algebra is not self.algebra or lower.m > self.m:
            raise InputError("can only project to a lower stage of the same algebra")
        acc: dict = {}
        for k, v in qvec.items():
            x, y = divmod(self.free[k], self.D - 1)
            wx, wy = self.basis[x], self.basis[self.bar[y]]
            if len(wx) - 1 > lower.cap or len(wy) - 1 > lower.cap:
                continue
            _add(acc, lower.index[wx] * (lower.D - 1) + lower.bar_pos[lower.index[wy]], v)
        return lower.to_quotient(acc)


def x_complex_homology(A: StructureAlgebra, m: int, max_dim: int = DEFAULT_MAX_DIM) -> HomologyReport:
    """(H_0, H_1) of X(RA/(IA)^(m+1)); stable when stage m-1 agrees."""
    if m < 1:
        raise InputError(f"adic order must be >= 1, got {m}")
    h = XStage(A, m, max_dim).homology()
    prev = XStage(A, m - 1, max_dim).homology()
    return HomologyReport(A.name, "xcomplex", m, [], [], h[0], h[1], stable=(h == prev),
                          stabilized_at=m)


# -- idempotent lifting ------------------------------------------------------------

def lift_coefficient(n: int) -> int:
    """2^n (2n-1)!! / n!, the coefficient of q^n in (1 - 4q)^(-1/2)."""
    if n < 1:
        raise InputError("n must be >= 1")
    double_fact = 1
    for j in range(1, 2 * n, 2):
        double_fact *= j
    value = Fraction(2 ** n * double_fact, factorial(n))
    assert value.denominator == 1
    assert value == comb(2 * n, n)
    return int(value)


def curvature(x: FedosovElement) -> FedosovElement:
    """q = x - x o x."""
    return x - fedosov_mul(x, x)


def _lift(e: AlgebraElement, m: int, cap: int) -> FedosovElement:
    x = FedosovElement.of(NCForm.from_element(e, cap))
    q = curvature(x)
    series = FedosovElement(x.space, cap, {})
    qn = FedosovElement.unit(e.algebra, cap)
    for n in range(1, m + 1):
        qn = fedosov_mul(qn, q)
        if qn.is_zero():
            break
        series = series + lift_coefficient(n) * qn
    half = Fraction(1, 2) * FedosovElement.unit(e.algebra, cap)
    return x + fedosov_mul(x - half, series)


def lift_idempotent(e: AlgebraElement, m: int) -> FedosovElement:
    """Idempotent of RA/(IA)^(m+1) lifting e:  x + (x - 1/2) sum C(2n,n) q^n.

    Returned with cap 2m. Since (IA)^(m+1) is spanned by the forms of degree
    >= 2m + 2, the defect e o e - e lies in it exactly when it vanishes at cap
    2m; that is verified before returning.
    """
    if m < 1:
        raise InputError("adic order must be >= 1")
    if not e.is_idempotent():
        raise NotIdempotent(f"{e!r} is not idempotent")
    lifted = _lift(e, m, 2 * m)
    if not idempotency_defect(lifted).is_zero():
        raise InvariantViolation("lifted idempotent fails e o e = e modulo (IA)^(m+1)")
    return lifted


def idempotency_defect(u: FedosovElement) -> FedosovElement:
    """u o u - u, exact in every degree up to the cap of u."""
    return fedosov_mul(u, u) - u


# -- the odd class of an invertible ---------------------------------------------

@dataclass
class OddClass:
    stage: XStage
    vector: dict           # coordinates in Omega^1(S)_natural
    normal_form: dict      # modulo the image of natural d

    @property
    def is_boundary(self) -> bool:
        return not self.normal_form


def odd_chain_of_invertible(g: AlgebraElement, g_inv: AlgebraElement, stage: XStage,
                            literal: bool = False) -> dict:
    """One-form representing g^-1 dg on the stage, as S (x) S/Q1 coordinates.

    With lifts p of g and q of g^-1 and x = 1 - q o p, the inverse of p is
    (sum_n x^n) o q, so g^-1 dg lifts to sum_{n<=m} x^n o q dp. With
    ``literal=True`` the chain -sum_{n<=m} x^n dx is built instead; that one
    is always a boundary, since it is the natural d of -log(1 - x).
    """
    A = g.algebra
    if g_inv.algebra is not A or stage.algebra is not A:
        raise AlgebraMismatch("elements and stage must share the algebra")
    if g * g_inv != A.one() or g_inv * g != A.one():
        raise NotInvertible("g * g_inv != 1")
    cap = stage.cap
    p = stage.vector(NCForm.from_element(g, cap))
    q = stage.vector(NCForm.from_element(g_inv, cap))
    one = {stage.unit_index: Fraction(1)}
    x = dict(one)
    for k, v in stage.mul_vec(q, p).items():
        _add(x, k, -v)
    powers = [one]
    for _ in range(stage.m):
        powers.append(stage.mul_vec(powers[-1], x))
    acc: dict = {}
    for xn in powers:
        if literal:
            part = stage.w_vector(xn, x)
            for k, v in part.items():
                _add(acc, k, -v)
        else:
            part = stage.w_vector(stage.mul_vec(xn, q), p)
            for k, v in part.items():
                _add(acc, k, v)
    return acc


def odd_class_of_invertible(g: AlgebraElement, g_inv: AlgebraElement, m: int,
                            stage: XStage | None = None, literal: bool = False) -> OddClass:
    if stage is None:
        stage = XStage(g.algebra, m)
    elif stage.m != m:
        raise InputError("stage order does not match m")
    vec = stage.to_quotient(odd_chain_of_invertible(g, g_inv, stage, literal))
    return OddClass(stage, vec, stage.h1_normal_form(vec))
