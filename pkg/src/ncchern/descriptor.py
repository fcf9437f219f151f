"""Parser for the algebra descriptor language used on the command line.

    algebra := "mat" "(" INT ")" | "prod" "(" algebra ("," algebra)+ ")"
             | "cyclic" "(" INT ")" | "stage" "(" group "," INT ")"
    group   := "su" INT | "so" INT | "sp" INT

Whitespace between tokens is ignored. ``str(ast)`` prints the canonical
form, which reparses to an equal tree.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError, RangeError

_TOKEN = re.compile(r"\s*(?:(?P<word>[a-z]+)|(?P<int>\d+)|(?P<punct>[(),]))")


@dataclass(frozen=True)
class Mat:
    n: int

    def __str__(self):
        return f"mat({self.n})"

    def build(self):
        from .algebra import make_matrix_algebra
        return make_matrix_algebra(self.n)


@dataclass(frozen=True)
class Prod:
    items: tuple

    def __str__(self):
        return "prod(" + ",".join(map(str, self.items)) + ")"

    def build(self):
        from .algebra import product
        return product([it.build() for it in self.items])


@dataclass(frozen=True)
class Cyclic:
    m: int

    def __str__(self):
        return f"cyclic({self.m})"

    def build(self):
        from .algebra import cyclic_group_algebra
        return cyclic_group_algebra(self.m)


@dataclass(frozen=True)
class GroupSpec:
    family: str   # "su", "so" or "sp"
    n: int

    def __str__(self):
        return f"{self.family}{self.n}"

    def descriptor(self):
        from .lie import SO, SU, Sp
        return {"su": SU, "so": SO, "sp": Sp}[self.family](self.n)


@dataclass(frozen=True)
class Stage:
    group: GroupSpec
    count: int

    def __str__(self):
        return f"stage({self.group},{self.count})"

    def build(self):
        from .algebra import group_stage
        return group_stage(self.group.descriptor(), self.count)


Descriptor = Mat | Prod | Cyclic | Stage


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        mt = _TOKEN.match(text, pos)
        if mt is None or mt.end() == pos:
            bad = len(text[:pos]) + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = mt.lastgroup
        tokens.append((kind, mt.group(kind), mt.start(kind)))
        pos = mt.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind, value=None):
        tok = self.toks[self.i]
        if tok[0] != kind or (value is not None and tok[1] != value):
            want = repr(value) if value is not None else kind
            got = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {want}, found {got}", tok[2])
        self.i += 1
        return tok

    def integer(self, lo: int, what: str) -> int:
        _, val, pos = self.take("int")
        n = int(val)
        if n < lo:
            raise RangeError(f"{what} must be >= {lo}, got {n} (at position {pos})")
        return n

    def algebra(self):
        _, word, pos = self.take("word")
        self.take("punct", "(")
        if word == "mat":
            node = Mat(self.integer(1, "matrix size"))
        elif word == "cyclic":
            node = Cyclic(self.integer(1, "group order"))
        elif word == "prod":
            items = [self.algebra()]
            while self.peek()[1] == ",":
                self.take("punct", ",")
                items.append(self.algebra())
            if len(items) < 2:
                raise ParseError("prod needs at least two factors", self.peek()[2])
            node = Prod(tuple(items))
        elif word == "stage":
            group = self.group()
            self.take("punct", ",")
            node = Stage(group, self.integer(1, "stage count"))
        else:
            raise ParseError(f"unknown constructor {word!r}", pos)
        self.take("punct", ")")
        return node

    def group(self) -> GroupSpec:
        _, word, pos = self.take("word")
        if word not in ("su", "so", "sp"):
            raise ParseError(f"unknown group family {word!r}", pos)
        _, val, ipos = self.take("int")
        n = int(val)
        if word == "su" and n < 2:
            raise RangeError(f"su needs n >= 2, got {n} (at position {ipos})")
        if word == "so" and (n < 3 or n % 2 == 0):
            raise RangeError(f"so needs odd n >= 3, got {n} (at position {ipos})")
        if word == "sp" and n < 1:
            raise RangeError(f"sp needs n >= 1, got {n} (at position {ipos})")
        return GroupSpec(word, n)


def parse_descriptor(text: str) -> Descriptor:
    p = _Parser(text)
    node = p.algebra()
    p.take("end")
    return node


def parse_group(text: str) -> GroupSpec:
    """A bare group token such as "su3" or "so5"."""
    p = _Parser(text)
    g = p.group()
    p.take("end")
    return g
