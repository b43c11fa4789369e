"""Sums of products of sines of angle differences.

A factor ``s(i,j)`` stands for ``sin(theta_j - theta_i)`` with ``i < j``.  A
monomial is a sorted tuple of such pairs (repeats allowed) and a
:class:`SineSum` maps monomials to nonzero integer coefficients.

The only rewrite rule is the four-angle identity::

    s(a,c) s(b,d) = s(a,b) s(c,d) + s(a,d) s(b,c)      (a < b < c < d)

Applying it until no monomial contains an interleaved pair of pairs gives a
normal form that does not depend on the order of rewriting, so two sums are
identically equal as functions of theta exactly when their normal forms agree.
"""
from __future__ import annotations

import math
import random
import re
from collections import defaultdict
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping, Optional, Tuple

Pair = Tuple[int, int]
Monomial = Tuple[Pair, ...]

__all__ = [
    "Pair", "Monomial", "SineSum", "MissingAngleError", "SineParseError",
    "pair", "monomial", "sine", "expand_once", "find_expandable",
    "interleaved_pairs", "is_normal_monomial", "normalize", "rewrite",
    "equivalent", "evaluate", "merge_indices", "size_measure", "parse_sum",
    "format_sum",
]


class MissingAngleError(KeyError):
    """An angle index needed for evaluation has no value."""

    def __init__(self, index: int):
        super().__init__(index)
        self.index = index

    def __str__(self) -> str:
        return f"no angle given for index {self.index}"


class SineParseError(ValueError):
    def __init__(self, msg: str, line: Optional[int] = None):
        self.line = line
        self.msg = msg
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def pair(i: int, j: int) -> Pair:
    if not (isinstance(i, int) and isinstance(j, int)):
        raise TypeError("angle indices must be integers")
    if i < 1 or j < 1:
        raise ValueError(f"angle indices are 1-based, got ({i},{j})")
    if not i < j:
        raise ValueError(f"pair needs lo < hi, got ({i},{j})")
    return (i, j)


def monomial(pairs: Iterable[Pair]) -> Monomial:
    return tuple(sorted(pair(*p) for p in pairs))


class SineSum:
    """Immutable integer combination of sine monomials.

    Arithmetic re-canonicalizes but never normalizes; call :func:`normalize`
    for that.  Equality is structural, use :func:`equivalent` for identity
    of functions.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, int]] = None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if not isinstance(c, int):
                    raise TypeError(f"coefficient {c!r} is not an integer")
                if c:
                    clean[monomial(m)] = clean.get(monomial(m), 0) + c
        self._terms = tuple(sorted((m, c) for m, c in clean.items() if c))
        self._hash = None

    @classmethod
    def _raw(cls, terms: Mapping[Monomial, int]) -> "SineSum":
        # trusted constructor: keys already canonical
        obj = cls.__new__(cls)
        obj._terms = tuple(sorted((m, c) for m, c in terms.items() if c))
        obj._hash = None
        return obj

    @classmethod
    def one(cls) -> "SineSum":
        return cls._raw({(): 1})

    @classmethod
    def zero(cls) -> "SineSum":
        return cls._raw({})

    @classmethod
    def constant(cls, k: int) -> "SineSum":
        return cls._raw({(): k})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Monomial, int]]:
        return iter(self._terms)

    def monomials(self) -> list:
        return [m for m, _ in self._terms]

    def indices(self) -> frozenset:
        return frozenset(i for m, _ in self._terms for p in m for i in p)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self._terms
        return isinstance(other, SineSum) and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self._terms)
        return self._hash

    def __add__(self, other: "SineSum") -> "SineSum":
        if isinstance(other, int):
            other = SineSum.constant(other)
        acc = dict(self._terms)
        for m, c in other._terms:
            acc[m] = acc.get(m, 0) + c
        return SineSum._raw(acc)

    __radd__ = __add__

    def __neg__(self) -> "SineSum":
        return SineSum._raw({m: -c for m, c in self._terms})

    def __sub__(self, other: "SineSum") -> "SineSum":
        if isinstance(other, int):
            other = SineSum.constant(other)
        return self + (-other)

    def __rsub__(self, other) -> "SineSum":
        return (-self) + other

    def __mul__(self, other) -> "SineSum":
        if isinstance(other, int):
            return SineSum._raw({m: c * other for m, c in self._terms})
        acc: dict = defaultdict(int)
        for m1, c1 in self._terms:
            for m2, c2 in other._terms:
                acc[tuple(sorted(m1 + m2))] += c1 * c2
        return SineSum._raw(acc)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "SineSum":
        out = SineSum.one()
        for _ in range(k):
            out = out * self
        return out

    def __repr__(self) -> str:
        return f"SineSum({format_sum(self)!r})"

    def __str__(self) -> str:
        return format_sum(self)


def sine(i: int, j: int) -> SineSum:
    """``sin(theta_j - theta_i)`` for any distinct i, j (sign-adjusted)."""
    if i == j:
        return SineSum.zero()
    if i < j:
        return SineSum._raw({(pair(i, j),): 1})
    return SineSum._raw({(pair(j, i),): -1})


# ---------------------------------------------------------------- rewriting

def interleaved_pairs(m: Monomial) -> Iterator[Tuple[Pair, Pair]]:
    """All ``((a,c),(b,d))`` in m with a < b < c < d, in lexicographic order."""
    distinct = sorted(set(m))
    for x in distinct:
        a, c = x
        for y in distinct:
            b, d = y
            if a < b < c < d:
                yield x, y


def find_expandable(m: Monomial) -> Optional[Tuple[Pair, Pair]]:
    return next(interleaved_pairs(m), None)


def is_normal_monomial(m: Monomial) -> bool:
    return find_expandable(m) is None


def expand_once(m: Monomial, target: Tuple[Pair, Pair]) -> SineSum:
    """Rewrite one interleaved occurrence ``s(a,c)s(b,d)`` inside ``m``."""
    x, y = target
    if x > y:
        x, y = y, x
    (a, c), (b, d) = x, y
    if not a < b < c < d:
        raise ValueError(f"pairs {x}, {y} are not interleaved (need a<b<c<d)")
    rest = list(m)
    for p in (x, y):
        try:
            rest.remove(p)
        except ValueError:
            raise ValueError(f"pair {p} does not occur in {m}") from None
    q = tuple(sorted(rest + [(a, b), (c, d)]))
    r = tuple(sorted(rest + [(a, d), (b, c)]))
    acc: dict = defaultdict(int)
    acc[q] += 1
    acc[r] += 1
    return SineSum._raw(acc)


@lru_cache(maxsize=200_000)
def _normal_monomial(m: Monomial) -> Tuple[Tuple[Monomial, int], ...]:
    target = find_expandable(m)
    if target is None:
        return ((m, 1),)
    acc: dict = defaultdict(int)
    for q, cq in expand_once(m, target).items():
        for nm, cn in _normal_monomial(q):
            acc[nm] += cq * cn
    return tuple((k, v) for k, v in acc.items() if v)


def normalize(s: SineSum) -> SineSum:
    """Normal form: no monomial contains an interleaved pair of pairs.

    Each monomial is expanded independently (memoized) using the
    lexicographically first interleaved pair; by confluence this equals the
    result of any other rewriting order.
    """
    acc: dict = defaultdict(int)
    for m, c in s.items():
        for nm, cn in _normal_monomial(m):
            acc[nm] += c * cn
    return SineSum._raw(acc)


Chooser = Callable[[SineSum], Tuple[Monomial, Tuple[Pair, Pair]]]


def _lex_chooser(s: SineSum):
    for m, _ in s.items():
        t = find_expandable(m)
        if t is not None:
            return m, t
    return None


def random_chooser(rng: random.Random) -> Chooser:
    def choose(s: SineSum):
        options = [(m, t) for m, _ in s.items() for t in interleaved_pairs(m)]
        return rng.choice(options) if options else None
    return choose


def rewrite(s: SineSum, chooser: Optional[Chooser] = None,
            max_steps: int = 1_000_000, trace: Optional[list] = None) -> SineSum:
    """Explicit step-by-step rewriting of the whole sum.

    ``chooser`` picks ``(monomial, (x, y))`` to expand; the default takes the
    lexicographically smallest monomial and pair-of-pairs.  If ``trace`` is a
    list, the sum after every step is appended to it.
    """
    choose = chooser or _lex_chooser
    cur = s
    for _ in range(max_steps):
        pick = choose(cur)
        if pick is None:
            return cur
        m, target = pick
        c = cur.terms[m]
        cur = cur - SineSum._raw({m: c}) + expand_once(m, target) * c
        if trace is not None:
            trace.append(cur)
    raise RuntimeError(f"rewriting did not terminate in {max_steps} steps")


def size_measure(s: SineSum) -> Tuple[int, int]:
    """(largest product of pair widths over non-normal monomials, its multiplicity)."""
    widths = [
        (math.prod(hi - lo for lo, hi in m), abs(c))
        for m, c in s.items() if not is_normal_monomial(m)
    ]
    if not widths:
        return (0, 0)
    top = max(w for w, _ in widths)
    return (top, sum(k for w, k in widths if w == top))


def equivalent(s1: SineSum, s2: SineSum) -> bool:
    return normalize(s1 - s2).is_zero()


# ---------------------------------------------------------------- numerics

def evaluate(s: SineSum, theta: Mapping[int, float]) -> float:
    """Value of ``s`` at angles given in degrees."""
    total = 0.0
    cache = {}
    for m, c in s.items():
        prod = float(c)
        for lo, hi in m:
            v = cache.get((lo, hi))
            if v is None:
                for idx in (lo, hi):
                    if idx not in theta:
                        raise MissingAngleError(idx)
                v = math.sin(math.radians(theta[hi] - theta[lo]))
                cache[(lo, hi)] = v
            prod *= v
        total += prod
    return total


def merge_indices(s: SineSum, source: int, target: int) -> SineSum:
    """Substitute ``theta_source := theta_target``.

    Pairs collapsing to ``(i,i)`` kill their monomial; pairs whose endpoints
    swap order are flipped with a sign change, so evaluation commutes with the
    substitution.
    """
    if source == target:
        raise ValueError("merge needs two distinct indices")
    acc: dict = defaultdict(int)
    for m, c in s.items():
        sign = c
        new = []
        for lo, hi in m:
            lo = target if lo == source else lo
            hi = target if hi == source else hi
            if lo == hi:
                sign = 0
                break
            if lo > hi:
                lo, hi = hi, lo
                sign = -sign
            new.append((lo, hi))
        if sign:
            acc[tuple(sorted(new))] += sign
    return SineSum._raw(acc)


# ---------------------------------------------------------------- text form

def _format_monomial(m: Monomial) -> str:
    return "".join(f"s({lo},{hi})" for lo, hi in m)


def format_sum(s: SineSum) -> str:
    """Render as ``s(1,2)s(3,4) - 2*s(1,3) + 5``; the empty sum is ``0``."""
    if s.is_zero():
        return "0"
    parts = []
    for idx, (m, c) in enumerate(s.items()):
        sign = "-" if c < 0 else "+"
        k = abs(c)
        if not m:
            body = str(k)
        elif k == 1:
            body = _format_monomial(m)
        else:
            body = f"{k}*{_format_monomial(m)}"
        if idx == 0:
            parts.append(body if sign == "+" else f"-{body}")
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<sine>(?:s|SN)\(\s*(\d+)\s*,\s*(\d+)\s*\))|(?P<op>[-+*·()]))")


def _tokenize(text: str, line: Optional[int] = None) -> list:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        mt = _TOKEN.match(text, pos)
        if not mt or mt.end() == pos:
            raise SineParseError(f"unexpected input at column {pos + 1}: {text[pos:pos + 12]!r}", line)
        pos = mt.end()
        if mt.group("int"):
            out.append(("int", int(mt.group("int"))))
        elif mt.group("sine"):
            out.append(("sine", (int(mt.group(3)), int(mt.group(4)))))
        else:
            op = mt.group("op")
            out.append(("op", "*" if op == "·" else op))
    return out


class _Parser:
    # expr := term (('+'|'-') term)* ; term := unary ('*'? unary)* ;
    # unary := '-' unary | '+' unary | atom ; atom := INT | s(i,j) | '(' expr ')'
    def __init__(self, tokens, lines=None):
        self.toks = tokens
        self.lines = lines or [None] * len(tokens)
        self.i = 0

    def error(self, msg: str) -> SineParseError:
        k = min(self.i, len(self.lines) - 1)
        return SineParseError(msg, self.lines[k] if k >= 0 else None)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expr(self) -> SineSum:
        acc = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> SineSum:
        acc = self.unary()
        while True:
            tok = self.peek()
            if tok == ("op", "*"):
                self.take()
                acc = acc * self.unary()
            elif tok is not None and (tok[0] in ("int", "sine") or tok == ("op", "(")):
                acc = acc * self.unary()
            else:
                return acc

    def unary(self) -> SineSum:
        tok = self.peek()
        if tok == ("op", "-"):
            self.take()
            return -self.unary()
        if tok == ("op", "+"):
            self.take()
            return self.unary()
        return self.atom()

    def atom(self) -> SineSum:
        tok = self.take()
        if tok is None:
            self.i -= 1
            raise self.error("unexpected end of expression")
        kind, val = tok
        if kind == "int":
            return SineSum.constant(val)
        if kind == "sine":
            i, j = val
            if i < 1 or j < 1:
                self.i -= 1
                raise self.error(f"angle indices are 1-based: s({i},{j})")
            return sine(i, j)
        if val == "(":
            inner = self.expr()
            if self.take() != ("op", ")"):
                self.i -= 1
                raise self.error("missing ')'")
            return inner
        self.i -= 1
        raise self.error(f"unexpected {val!r}")


def parse_sum(text: str) -> SineSum:
    """Parse the textual form produced by :func:`format_sum`.

    Also accepts products of parenthesized sums, ``SN(i,j)`` as a synonym of
    ``s(i,j)``, ``·`` for ``*``, and reversed pairs ``s(j,i) = -s(i,j)``.
    Lines starting with ``#`` are ignored; remaining lines are joined.
    """
    toks, lines = [], []
    for n, line in enumerate(text.splitlines(), 1):
        got = _tokenize(line.split("#", 1)[0], n)
        toks.extend(got)
        lines.extend([n] * len(got))
    if not toks:
        raise SineParseError("empty expression")
    p = _Parser(toks, lines)
    result = p.expr()
    if p.peek() is not None:
        raise p.error(f"unexpected {p.peek()[1]!r} after a complete expression")
    return result
