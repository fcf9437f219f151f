"""Classical compact groups: irreps, primitive generators, Chern tables.

Irreducible representations are enumerated by highest weight (Dynkin
labels) with dimensions from the Weyl dimension formula. The Chern
character of the Bott generators is tabulated through the integer
function ``phi`` and checked for nonsingularity.
"""

from __future__ import annotations

import csv
import heapq
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, prod
from typing import Mapping, Sequence

from .errors import AlgebraMismatch, DomainError, InputError, NonSquare
from .exact import det, format_rational

FAMILIES = ("SU", "SO_odd", "Sp")


@dataclass(frozen=True)
class GroupDescriptor:
    """SU(n+1), SO(2n+1) or Sp(n), all with ``parameter`` n = rank."""

    family: str
    parameter: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InputError(f"unknown group family {self.family!r}")
        if not isinstance(self.parameter, int) or self.parameter < 1:
            raise InputError(f"group parameter must be >= 1, got {self.parameter!r}")

    @property
    def rank(self) -> int:
        return self.parameter

    def token(self) -> str:
        """Short name as written in algebra descriptors: su2, so5, sp3."""
        n = self.parameter
        if self.family == "SU":
            return f"su{n + 1}"
        if self.family == "SO_odd":
            return f"so{2 * n + 1}"
        return f"sp{n}"

    def __str__(self):
        n = self.parameter
        return {"SU": f"SU({n + 1})", "SO_odd": f"SO({2 * n + 1})", "Sp": f"Sp({n})"}[self.family]


def SU(m: int) -> GroupDescriptor:
    return GroupDescriptor("SU", m - 1)


def SO(m: int) -> GroupDescriptor:
    if m < 3 or m % 2 == 0:
        raise InputError(f"SO(m) needs odd m >= 3, got {m}")
    return GroupDescriptor("SO_odd", (m - 1) // 2)


def Sp(n: int) -> GroupDescriptor:
    return GroupDescriptor("Sp", n)


def primitive_degrees(G: GroupDescriptor) -> list[int]:
    n = G.parameter
    if G.family == "SU":
        return [2 * i + 1 for i in range(1, n + 1)]
    return [4 * i - 1 for i in range(1, n + 1)]


# -- root systems and the Weyl dimension formula ---------------------------

def cartan_matrix(G: GroupDescriptor) -> tuple[tuple[int, ...], ...]:
    """A[i][j] = <alpha_i, alpha_j^vee>, Bourbaki numbering."""
    n = G.parameter
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        a[i][i] = 2
        if i + 1 < n:
            a[i][i + 1] = a[i + 1][i] = -1
    if n >= 2 and G.family == "SO_odd":
        # B_n: alpha_n short
        a[n - 2][n - 1] = -2
    elif n >= 2 and G.family == "Sp":
        # C_n: alpha_n long
        a[n - 1][n - 2] = -2
    return tuple(tuple(r) for r in a)


def positive_roots(cartan: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Positive roots in simple-root coordinates, grown by root strings."""
    n = len(cartan)
    simple = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    roots = set(simple)
    layer = list(simple)
    while layer:
        nxt = []
        for beta in layer:
            for i in range(n):
                # p = how far beta - k*alpha_i stays a root
                p = 0
                while True:
                    down = tuple(b - (p + 1) * (j == i) for j, b in enumerate(beta))
                    if down in roots:
                        p += 1
                    else:
                        break
                pairing = sum(beta[j] * cartan[j][i] for j in range(n))
                if p - pairing > 0:
                    up = tuple(b + (j == i) for j, b in enumerate(beta))
                    if up not in roots:
                        roots.add(up)
                        nxt.append(up)
        layer = nxt
    return sorted(roots, key=lambda r: (sum(r), r))


@lru_cache(maxsize=None)
def _positive_coroots(G: GroupDescriptor) -> tuple[tuple[int, ...], ...]:
    # coroots of a system are the roots of the dual system (transposed Cartan)
    a = cartan_matrix(G)
    dual = [[a[j][i] for j in range(len(a))] for i in range(len(a))]
    return tuple(positive_roots(dual))


def weyl_dimension(G: GroupDescriptor, weight: Sequence[int]) -> int:
    """prod over positive coroots of <lambda + rho, a^vee> / <rho, a^vee>."""
    if len(weight) != G.parameter or any(w < 0 for w in weight):
        raise InputError(f"{weight!r} is not a dominant weight of {G}")
    num, den = 1, 1
    for c in _positive_coroots(G):
        num *= sum(ci * (w + 1) for ci, w in zip(c, weight))
        den *= sum(c)
    q, r = divmod(num, den)
    assert r == 0, "Weyl dimension must be an integer"
    return q


def _steps(G: GroupDescriptor) -> list[tuple[int, ...]]:
    n = G.parameter
    steps = [tuple(int(i == j) for j in range(n)) for i in range(n)]
    if G.family == "SO_odd":
        # SO(2n+1) rather than Spin: the last Dynkin label must be even
        steps[-1] = tuple(2 * int(j == n - 1) for j in range(n))
    return steps


def irrep_dims(G: GroupDescriptor, N: int) -> list[tuple[tuple[int, ...], int]]:
    """First N irreps as (Dynkin labels, dimension), by (dim, labels) ascending.

    The dimension strictly increases along every admissible step in the
    weight lattice, so a best-first walk from the trivial weight yields
    weights in exactly this order.
    """
    if N < 1:
        raise DomainError(f"need N >= 1, got {N}")
    steps = _steps(G)
    zero = (0,) * G.parameter
    heap = [(1, zero)]
    seen = {zero}
    out = []
    while len(out) < N:
        d, w = heapq.heappop(heap)
        out.append((w, d))
        for s in steps:
            nw = tuple(a + b for a, b in zip(w, s))
            if nw not in seen:
                seen.add(nw)
                heapq.heappush(heap, (weyl_dimension(G, nw), nw))
    return out


# -- the integer coefficient function -------------------------------------

def phi(n: int, k: int, q: int) -> int:
    """sum_{i=1}^k (-1)^(i-1) C(n, k-i) i^(q-1)."""
    if not (1 <= k <= n) or q < 1:
        raise DomainError(f"phi needs 1 <= k <= n and q >= 1, got ({n}, {k}, {q})")
    return sum((-1) ** (i - 1) * comb(n, k - i) * i ** (q - 1) for i in range(1, k + 1))


# -- Chern tables ------------------------------------------------------------

@dataclass(frozen=True)
class ChernTable:
    group: GroupDescriptor
    row_labels: tuple[str, ...]
    columns: tuple[str, ...]
    matrix: tuple[tuple[Fraction, ...], ...]

    @property
    def shape(self):
        return (len(self.matrix), len(self.columns))

    def row_element(self, k: int) -> "ExtElement":
        """Row k as a degree-one element of the exterior algebra."""
        E = ExteriorAlgebra(primitive_degrees(self.group))
        return E.element({(i,): v for i, v in enumerate(self.matrix[k])})

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["row", *self.columns])
        for lab, row in zip(self.row_labels, self.matrix):
            w.writerow([lab, *(format_rational(v) for v in row)])
        if self.shape[0] == self.shape[1]:
            ok, d = is_generating(self)
            w.writerow(["det", format_rational(d)])
        return buf.getvalue()

    def to_dict(self) -> dict:
        doc = {
            "group": str(self.group),
            "rows": list(self.row_labels),
            "columns": list(self.columns),
            "matrix": [[format_rational(v) for v in row] for row in self.matrix],
        }
        if self.shape[0] == self.shape[1]:
            ok, d = is_generating(self)
            doc["det"] = format_rational(d)
            doc["generating"] = ok
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))


def chern_su(n: int) -> ChernTable:
    """ch(beta(rho_k)) = sum_i (-1)^i / i! * phi(n+1, k, i+1) x_{2i+1}."""
    if n < 1:
        raise DomainError(f"chern_su needs n >= 1, got {n}")
    G = GroupDescriptor("SU", n)
    m = tuple(
        tuple(Fraction((-1) ** i, factorial(i)) * phi(n + 1, k, i + 1) for i in range(1, n + 1))
        for k in range(1, n + 1)
    )
    return ChernTable(G, tuple(f"rho{k}" for k in range(1, n + 1)),
                      tuple(f"x{2 * i + 1}" for i in range(1, n + 1)), m)


def chern_so_odd(n: int, lambda_rows: str = "n-1") -> ChernTable:
    """Chern table of SO(2n+1): lambda_k rows, then the epsilon row.

    ``lambda_rows="n-1"`` (default) takes k = 1..n-1, giving a square table;
    ``"n"`` takes k = 1..n as the epsilon sum does, giving n+1 rows.
    """
    if n < 2:
        raise DomainError(f"chern_so_odd needs n >= 2, got {n}")
    if lambda_rows not in ("n-1", "n"):
        raise InputError("lambda_rows must be 'n-1' or 'n'")
    G = GroupDescriptor("SO_odd", n)
    top = n - 1 if lambda_rows == "n-1" else n
    rows = []
    for k in range(1, top + 1):
        rows.append(tuple(Fraction(2 * (-1) ** (i - 1), factorial(2 * i - 1)) * phi(2 * n + 1, k, 2 * i)
                          for i in range(1, n + 1)))
    rows.append(tuple(
        Fraction((-1) ** (i - 1), 2 ** (n - 1) * factorial(2 * i - 1))
        * sum(phi(2 * n + 1, k, 2 * i) for k in range(1, n + 1))
        for i in range(1, n + 1)))
    labels = tuple(f"lambda{k}" for k in range(1, top + 1)) + (f"eps{2 * n + 1}",)
    return ChernTable(G, labels, tuple(f"x{4 * i - 1}" for i in range(1, n + 1)), tuple(rows))


def is_generating(T: ChernTable) -> tuple[bool, Fraction]:
    rows, cols = T.shape
    if rows != cols:
        raise NonSquare(f"Chern table is {rows}x{cols}")
    d = det(T.matrix)
    return d != 0, d


# -- exterior algebras -------------------------------------------------------

class ExteriorAlgebra:
    """Exterior algebra on odd-degree generators x_{d_0}, x_{d_1}, ..."""

    def __init__(self, degrees: Sequence[int]):
        degrees = tuple(degrees)
        if any(d % 2 == 0 for d in degrees) or list(degrees) != sorted(set(degrees)):
            raise InputError("generator degrees must be odd and strictly increasing")
        self.degrees = degrees

    def __eq__(self, other):
        return isinstance(other, ExteriorAlgebra) and other.degrees == self.degrees

    def __hash__(self):
        return hash(self.degrees)

    def basis(self) -> list[tuple[int, ...]]:
        n = len(self.degrees)
        return [tuple(i for i in range(n) if mask >> i & 1) for mask in range(1 << n)]

    def element(self, terms: Mapping) -> "ExtElement":
        return ExtElement(self, terms)

    def generator(self, i: int) -> "ExtElement":
        return ExtElement(self, {(i,): 1})

    def one(self) -> "ExtElement":
        return ExtElement(self, {(): 1})


class ExtElement:
    __slots__ = ("algebra", "terms")

    def __init__(self, algebra: ExteriorAlgebra, terms: Mapping):
        n = len(algebra.degrees)
        clean = {}
        for s, v in terms.items():
            s = tuple(s)
            if list(s) != sorted(set(s)) or any(not 0 <= i < n for i in s):
                raise InputError(f"{s!r} is not a sorted subset of the generators")
            if v:
                clean[s] = Fraction(v)
        self.algebra = algebra
        self.terms = clean

    def _check(self, other):
        if other.algebra != self.algebra:
            raise AlgebraMismatch("exterior algebras differ")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for s, v in other.terms.items():
            out[s] = out.get(s, 0) + v
        return ExtElement(self.algebra, out)

    def __neg__(self):
        return ExtElement(self.algebra, {s: -v for s, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        c = Fraction(c)
        return ExtElement(self.algebra, {s: c * v for s, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, ExtElement) and other.algebra == self.algebra and other.terms == self.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        deg = self.algebra.degrees
        parts = []
        for s, v in sorted(self.terms.items()):
            mono = "^".join(f"x{deg[i]}" for i in s) or "1"
            parts.append(f"{format_rational(v)}*{mono}")
        return " + ".join(parts)

    def wedge(self, other: "ExtElement") -> "ExtElement":
        return ext_mul(self, other)

    __xor__ = wedge


def _koszul_sign(s: tuple[int, ...], t: tuple[int, ...], degrees) -> int:
    sign = 1
    for a in s:
        for b in t:
            if a > b and degrees[a] * degrees[b] % 2:
                sign = -sign
    return sign


def ext_mul(u: ExtElement, v: ExtElement) -> ExtElement:
    u._check(v)
    deg = u.algebra.degrees
    out: dict = {}
    for s, a in u.terms.items():
        for t, b in v.terms.items():
            if set(s) & set(t):
                continue
            key = tuple(sorted(s + t))
            out[key] = out.get(key, 0) + _koszul_sign(s, t, deg) * a * b
    return ExtElement(u.algebra, out)
