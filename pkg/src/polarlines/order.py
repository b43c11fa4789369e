"""Finite strict partial orders on integer labels."""
from __future__ import annotations

import random
from itertools import combinations
from typing import Iterable, Iterator, Sequence, Tuple


class OrderError(ValueError):
    pass


class PartialOrder:
    """Transitively closed strict order on a finite set of integer labels.

    Built from generating relations ``(a, b)`` meaning ``a < b``; chains
    ``(a, b, c)`` are also accepted and read as ``a < b < c``.
    """

    __slots__ = ("elements", "relation", "_down", "_up")

    def __init__(self, elements: Iterable[int], relations: Iterable[Sequence[int]] = ()):
        elems = frozenset(elements)
        gens = set()
        for chain in relations:
            chain = tuple(chain)
            for a, b in zip(chain, chain[1:]):
                if a not in elems or b not in elems:
                    raise OrderError(f"relation {a} < {b} mentions an unknown element")
                gens.add((a, b))
        up = {e: set() for e in elems}
        for a, b in gens:
            up[a].add(b)
        # transitive closure by DFS from each element
        closed = {}
        for e in elems:
            seen = set()
            stack = list(up[e])
            while stack:
                x = stack.pop()
                if x in seen:
                    continue
                seen.add(x)
                stack.extend(up[x])
            if e in seen:
                raise OrderError(f"relations contain a cycle through {e}")
            closed[e] = frozenset(seen)
        self.elements = elems
        self._up = closed
        self._down = {e: frozenset(x for x in elems if e in closed[x]) for e in elems}
        self.relation = frozenset((a, b) for a in elems for b in closed[a])

    @classmethod
    def chain(cls, seq: Sequence[int]) -> "PartialOrder":
        return cls(seq, [tuple(seq)])

    @classmethod
    def range(cls, n: int, relations: Iterable[Sequence[int]] = ()) -> "PartialOrder":
        return cls(range(1, n + 1), relations)

    @property
    def n(self) -> int:
        return len(self.elements)

    def less(self, a: int, b: int) -> bool:
        return b in self._up.get(a, ())

    def comparable(self, a: int, b: int) -> bool:
        return a == b or self.less(a, b) or self.less(b, a)

    def above(self, a: int) -> frozenset:
        return self._up[a]

    def below(self, a: int) -> frozenset:
        return self._down[a]

    def is_total_on(self, subset: Iterable[int]) -> bool:
        s = list(subset)
        return all(self.comparable(a, b) for i, a in enumerate(s) for b in s[i + 1:])

    def sorted(self, subset: Iterable[int]) -> list:
        """Subset in increasing order; it must be a chain."""
        s = list(subset)
        if not self.is_total_on(s):
            raise OrderError(f"{sorted(s)} is not totally ordered")
        return sorted(s, key=lambda x: len(self._down[x] & set(s)))

    def cover_relations(self) -> list:
        return sorted(
            (a, b) for a, b in self.relation
            if not any(b in self._up[c] for c in self._up[a])
        )

    def restrict(self, subset: Iterable[int]) -> "PartialOrder":
        s = frozenset(subset)
        return PartialOrder(s, [(a, b) for a, b in self.relation if a in s and b in s])

    def without(self, a: int, b: int) -> "PartialOrder":
        """The order with cover relation ``a < b`` removed."""
        if (a, b) not in self.cover_relations():
            raise OrderError(f"{a} < {b} is not a cover relation")
        return PartialOrder(self.elements, [r for r in self.relation if r != (a, b)])

    def union(self, other: "PartialOrder") -> "PartialOrder":
        return PartialOrder(self.elements | other.elements, list(self.relation | other.relation))

    def linear_extensions(self) -> Iterator[Tuple[int, ...]]:
        """All total orders extending this one, in lexicographic order."""
        elems = sorted(self.elements)
        placed: list = []
        used = set()

        def rec():
            if len(placed) == len(elems):
                yield tuple(placed)
                return
            for e in elems:
                if e not in used and all(d in used for d in self._down[e]):
                    used.add(e)
                    placed.append(e)
                    yield from rec()
                    placed.pop()
                    used.discard(e)

        yield from rec()

    def random_extension(self, rng: random.Random) -> Tuple[int, ...]:
        remaining = set(self.elements)
        out = []
        while remaining:
            minimal = sorted(e for e in remaining if not (self._down[e] & remaining))
            e = rng.choice(minimal)
            out.append(e)
            remaining.discard(e)
        return tuple(out)

    def random_theta(self, rng: random.Random, lo: float = 0.0, hi: float = 180.0,
                     margin: float = 1.0) -> dict:
        """Random angles in degrees respecting the order (strictly inside (lo, hi))."""
        ext = self.random_extension(rng)
        vals = sorted(rng.uniform(lo + margin, hi - margin) for _ in ext)
        return dict(zip(ext, vals))

    def respects(self, theta, tol: float = 0.0) -> bool:
        if any(not (0 < theta[e] < 180) for e in self.elements):
            return False
        return all(theta[a] < theta[b] - tol for a, b in self.relation)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PartialOrder) and self.elements == other.elements
                and self.relation == other.relation)

    def __hash__(self) -> int:
        return hash((self.elements, self.relation))

    def __repr__(self) -> str:
        rel = ", ".join(f"{a}<{b}" for a, b in self.cover_relations())
        return f"PartialOrder({sorted(self.elements)}, [{rel}])"


def random_poset(n: int, rng: random.Random, density: float = 0.3) -> PartialOrder:
    """Random order on 1..n from a random permutation and random forward edges."""
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    rel = [(perm[i], perm[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < density]
    return PartialOrder(range(1, n + 1), rel)


def all_posets(n: int) -> Iterator[PartialOrder]:
    """Every strict partial order on 1..n (labelled), each exactly once.

    Element k+1 is added to each order on 1..k with a down-closed set D below
    it and an up-closed set U above it, where every member of D is below
    every member of U.
    """
    def grow(k, rel):
        if k == n:
            yield PartialOrder(range(1, n + 1), list(rel))
            return
        elems = range(1, k + 1)
        below = {e: {a for a, b in rel if b == e} for e in elems}
        above = {e: {b for a, b in rel if a == e} for e in elems}
        subsets = [frozenset(c) for r in range(k + 1) for c in combinations(elems, r)]
        downs = [d for d in subsets if all(below[x] <= d for x in d)]
        ups = [u for u in subsets if all(above[x] <= u for x in u)]
        new = k + 1
        for d in downs:
            for u in ups:
                if d & u or any(y not in above[x] for x in d for y in u):
                    continue
                extra = {(x, new) for x in d} | {(new, y) for y in u}
                yield from grow(k + 1, rel | extra)

    yield from grow(0, frozenset())
