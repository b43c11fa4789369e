"""Signed sets, the rank-two matroids of orders, graphic matroids and hats.

Circuits of the order matroid ``M(<)`` on ``e1 < ... < en`` are the signed
triples ``({a, c}, {b})`` with ``a < b < c`` and their opposites.  The
cocircuits split the ground set around one element.  A directed graph gives
the graphic oriented matroid whose circuits are signed cycles and whose
cocircuits are signed minimal cuts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from .order import OrderError, PartialOrder


# ---------------------------------------------------------------- signed sets

@dataclass(frozen=True, order=True)
class SignedSet:
    pos: FrozenSet[int] = frozenset()
    neg: FrozenSet[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "pos", frozenset(self.pos))
        object.__setattr__(self, "neg", frozenset(self.neg))
        if self.pos & self.neg:
            raise ValueError(f"element(s) {sorted(self.pos & self.neg)} signed both ways")

    @classmethod
    def of(cls, mapping: Mapping[int, int]) -> "SignedSet":
        return cls({e for e, s in mapping.items() if s > 0}, {e for e, s in mapping.items() if s < 0})

    @property
    def support(self) -> FrozenSet[int]:
        return self.pos | self.neg

    def __call__(self, e: int) -> int:
        return 1 if e in self.pos else -1 if e in self.neg else 0

    def __neg__(self) -> "SignedSet":
        return SignedSet(self.neg, self.pos)

    opposite = __neg__

    def compose(self, other: "SignedSet") -> "SignedSet":
        """``self o other``: signs of ``self`` win where both are defined."""
        pos = self.pos | (other.pos - self.neg)
        neg = self.neg | (other.neg - self.pos)
        return SignedSet(pos, neg)

    def conformal(self, other: "SignedSet") -> bool:
        return not (self.pos & other.neg or self.neg & other.pos)

    def conforms_to(self, other: "SignedSet") -> bool:
        """``self`` lies below ``other``: contained support, agreeing signs."""
        return self.pos <= other.pos and self.neg <= other.neg

    def orthogonal(self, other: "SignedSet") -> bool:
        agree = bool(self.pos & other.pos or self.neg & other.neg)
        disagree = bool(self.pos & other.neg or self.neg & other.pos)
        return agree == disagree

    def is_empty(self) -> bool:
        return not (self.pos or self.neg)

    def restrict(self, ground: Iterable[int]) -> "SignedSet":
        g = frozenset(ground)
        return SignedSet(self.pos & g, self.neg & g)

    def __str__(self) -> str:
        items = sorted(self.support)
        return "(" + " ".join(f"{'+' if e in self.pos else '-'}{e}" for e in items) + ")"

    def __repr__(self) -> str:
        return f"SignedSet({sorted(self.pos)}, {sorted(self.neg)})"


def compose_all(sets: Iterable[SignedSet]) -> SignedSet:
    out = SignedSet()
    for s in sets:
        out = out.compose(s)
    return out


def sign_changes(x: SignedSet, sequence: Sequence[int]) -> int:
    signs = [x(e) for e in sequence if x(e)]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


# ---------------------------------------------------------------- order matroids

def _ground(n_or_seq) -> Tuple[int, ...]:
    return tuple(range(1, n_or_seq + 1)) if isinstance(n_or_seq, int) else tuple(n_or_seq)


def triple_circuit(a: int, b: int, c: int, sign: int = 1) -> SignedSet:
    """``+({a, c}, {b})`` for ``a < b < c``; ``sign=-1`` gives the opposite."""
    s = SignedSet({a, c}, {b})
    return s if sign > 0 else -s


def circuits_of_total_order(order) -> Set[SignedSet]:
    """``order`` is ``n`` (meaning 1..n) or an increasing sequence of labels."""
    seq = _ground(order)
    out = set()
    for a, b, c in combinations(seq, 3):
        out.add(triple_circuit(a, b, c))
        out.add(triple_circuit(a, b, c, -1))
    return out


def cocircuits_of_total_order(order) -> Set[SignedSet]:
    seq = _ground(order)
    out = set()
    for k in range(len(seq)):
        x = SignedSet(seq[:k], seq[k + 1:])
        if not x.is_empty():
            out.add(x)
            out.add(-x)
    return out


def circuits_of_partial_order(order: PartialOrder) -> Set[SignedSet]:
    out = set()
    for y in order.elements:
        for x in order.below(y):
            for z in order.above(y):
                out.add(triple_circuit(x, y, z))
                out.add(triple_circuit(x, y, z, -1))
    return out


def circuits_by_extensions(order: PartialOrder) -> Set[SignedSet]:
    """Brute-force intersection of ``C(<)`` over all linear extensions."""
    result = None
    for ext in order.linear_extensions():
        cs = circuits_of_total_order(ext)
        result = cs if result is None else result & cs
        if not result:
            break
    return result or set()


def is_order_circuit(x: SignedSet, order: PartialOrder) -> bool:
    """Whether ``x`` is in ``C(order)``: three elements, middle one opposite."""
    if len(x.support) != 3:
        return False
    for odd in x.support:
        rest = x.support - {odd}
        if all(x(e) == -x(odd) for e in rest):
            a, c = sorted(rest)
            return (order.less(a, odd) and order.less(odd, c)) or (order.less(c, odd) and order.less(odd, a))
    return False


def is_vector_of_order(x: SignedSet, order: Sequence[int]) -> bool:
    """Vector of ``M(<)`` iff orthogonal to every cocircuit."""
    return all(x.orthogonal(c) for c in cocircuits_of_total_order(order))


def is_conformal_composition_of_circuits(x: SignedSet, order: Sequence[int]) -> bool:
    """Brute-force vector test: every element is covered by a circuit below ``x``."""
    if x.is_empty():
        return True
    below = [c for c in circuits_of_total_order(order) if c.conforms_to(x)]
    covered = set().union(*(c.support for c in below)) if below else set()
    return covered == set(x.support)


def conformal_decomposition(x: SignedSet, order: Sequence[int]) -> Optional[List[SignedSet]]:
    """Circuits of ``M(<)`` below ``x`` composing to ``x``, or ``None``."""
    if x.is_empty():
        return []
    below = sorted(c for c in circuits_of_total_order(order) if c.conforms_to(x))
    chosen, covered = [], set()
    for c in below:
        if not c.support <= covered:
            chosen.append(c)
            covered |= c.support
    return chosen if covered == set(x.support) else None


# ---------------------------------------------------------------- directed graphs

class GraphError(ValueError):
    pass


@dataclass(frozen=True)
class DirectedGraph:
    """Simple directed graph with integer edge labels.

    ``edges`` maps label -> (tail, head).  Vertex order is kept as given
    (or first-appearance order) and drives the order of vertex rows.
    """

    edges: Tuple[Tuple[int, Tuple[str, str]], ...]
    vertices: Tuple[str, ...] = ()

    def __post_init__(self):
        edges = tuple(sorted((int(l), (str(u), str(v))) for l, (u, v) in dict(self.edges).items()))
        if len(edges) != len(self.edges):
            raise GraphError("duplicate edge labels")
        verts = list(dict.fromkeys(self.vertices))
        for _, (u, v) in edges:
            for w in (u, v):
                if w not in verts:
                    verts.append(w)
        seen = set()
        for label, (u, v) in edges:
            if u == v:
                raise GraphError(f"edge {label} is a loop at {u}")
            key = frozenset((u, v))
            if key in seen:
                raise GraphError(f"edge {label} is parallel or antiparallel to another edge")
            seen.add(key)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "vertices", tuple(str(v) for v in verts))

    @classmethod
    def from_edges(cls, edges: Mapping[int, Tuple[str, str]], vertices: Sequence[str] = ()) -> "DirectedGraph":
        return cls(tuple(edges.items()), tuple(vertices))

    @property
    def edge_map(self) -> Dict[int, Tuple[str, str]]:
        return dict(self.edges)

    @property
    def labels(self) -> Tuple[int, ...]:
        return tuple(l for l, _ in self.edges)

    def tail(self, e: int) -> str:
        return self.edge_map[e][0]

    def head(self, e: int) -> str:
        return self.edge_map[e][1]

    def undirected(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        for l, (u, v) in self.edges:
            g.add_edge(u, v, label=l)
        return g

    def digraph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.vertices)
        for l, (u, v) in self.edges:
            g.add_edge(u, v, label=l)
        return g

    def degree(self, v: str) -> int:
        return sum(1 for _, (a, b) in self.edges if v in (a, b))

    def is_connected(self) -> bool:
        return len(self.vertices) > 0 and nx.is_connected(self.undirected())

    def without_edge(self, e: int) -> "DirectedGraph":
        return DirectedGraph(tuple((l, uv) for l, uv in self.edges if l != e), self.vertices)

    def reversed_edges(self, labels: Iterable[int]) -> "DirectedGraph":
        flip = set(labels)
        return DirectedGraph(tuple((l, (v, u) if l in flip else (u, v)) for l, (u, v) in self.edges),
                             self.vertices)

    def cut(self, side: Iterable[str]) -> SignedSet:
        """``C*_S``: edges entering ``S`` positive, edges leaving ``S`` negative."""
        s = set(side)
        pos = {l for l, (u, v) in self.edges if v in s and u not in s}
        neg = {l for l, (u, v) in self.edges if u in s and v not in s}
        return SignedSet(pos, neg)

    def vertex_cocircuit(self, v: str) -> SignedSet:
        if v not in self.vertices:
            raise GraphError(f"unknown vertex {v}")
        return self.cut({v})

    def _require_connected(self):
        if not self.is_connected():
            raise GraphError("underlying graph is not connected")

    def circuits(self) -> Set[SignedSet]:
        """Signed cycles in both traversal directions."""
        self._require_connected()
        g = self.undirected()
        em = self.edge_map
        out = set()
        for cyc in nx.simple_cycles(g):
            if len(cyc) < 3:
                continue
            pos, neg = set(), set()
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                l = g[a][b]["label"]
                (pos if em[l] == (a, b) else neg).add(l)
            x = SignedSet(pos, neg)
            out.add(x)
            out.add(-x)
        return out

    def cocircuits(self) -> Set[SignedSet]:
        """Signed minimal cuts (both sides connected), both signs."""
        self._require_connected()
        g = self.undirected()
        verts = list(self.vertices)
        root, rest = verts[0], verts[1:]
        out = set()
        for k in range(0, len(rest)):
            for extra in combinations(rest, k):
                side = {root, *extra}
                other = set(verts) - side
                if not other:
                    continue
                if nx.is_connected(g.subgraph(side)) and nx.is_connected(g.subgraph(other)):
                    x = self.cut(side)
                    out.add(x)
                    out.add(-x)
        return out

    def is_totally_cyclic(self) -> bool:
        d = self.digraph()
        comp = {}
        for i, scc in enumerate(nx.strongly_connected_components(d)):
            for v in scc:
                comp[v] = i
        return all(comp[u] == comp[v] for _, (u, v) in self.edges)

    def three_edge_connected(self) -> bool:
        g = self.undirected()
        if g.number_of_nodes() < 2 or not nx.is_connected(g):
            return False
        return nx.edge_connectivity(g) >= 3

    def __str__(self) -> str:
        return format_graph(self)


def _as_sequence(order) -> Tuple[int, ...]:
    return tuple(order)


def strong_map_total(G: DirectedGraph, order: Sequence[int], cuts: Optional[Iterable[SignedSet]] = None) -> bool:
    """Every signed cut of ``G`` is a vector of ``M(<)`` for the given sequence."""
    seq = _as_sequence(order)
    if sorted(seq) != sorted(G.labels):
        raise OrderError("order must list every edge label exactly once")
    cocs = cocircuits_of_total_order(seq)
    for x in (G.cocircuits() if cuts is None else cuts):
        if not all(x.orthogonal(c) for c in cocs):
            return False
    return True


@dataclass
class StrongMapResult:
    holds: bool
    exhaustive: bool
    checked: int
    witness: Optional[Tuple[int, ...]] = None

    def __bool__(self) -> bool:
        return self.holds


EXHAUSTIVE_LIMIT = 10


def strong_map_exists(G: DirectedGraph, order, rng=None, samples: int = 2000,
                      check_pre: bool = True) -> StrongMapResult:
    """Strong map ``M*(G) -> M(<)``.

    A sequence is checked directly.  For a :class:`PartialOrder` every
    linear extension must admit the map: all of them are tried when there
    are at most ``EXHAUSTIVE_LIMIT`` edges, otherwise ``samples`` random
    extensions (reported as non-exhaustive).  ``witness`` is a failing
    extension when one is found.
    """
    if check_pre:
        _check_graph_pre(G)
    cuts = list(G.cocircuits())
    if not isinstance(order, PartialOrder):
        ok = strong_map_total(G, order, cuts)
        return StrongMapResult(ok, True, 1, None if ok else tuple(order))
    if set(order.elements) != set(G.labels):
        raise OrderError("order must be on the edge labels")
    if len(G.labels) <= EXHAUSTIVE_LIMIT:
        exts: Iterable = order.linear_extensions()
        exhaustive = True
    else:
        import random
        r = rng or random.Random(0)
        exts = (order.random_extension(r) for _ in range(samples))
        exhaustive = False
    n = 0
    for ext in exts:
        n += 1
        if not strong_map_total(G, ext, cuts):
            return StrongMapResult(False, exhaustive, n, tuple(ext))
    return StrongMapResult(True, exhaustive, n)


def _check_graph_pre(G: DirectedGraph):
    if not G.is_connected():
        raise GraphError("underlying graph is not connected")
    if not G.is_totally_cyclic():
        raise GraphError("directed graph is not totally cyclic")
    if not G.three_edge_connected():
        raise GraphError("underlying graph is not three-edge-connected")


class SearchCapExceeded(RuntimeError):
    pass


def find_compatible_total_order(G: DirectedGraph, within: Optional[PartialOrder] = None,
                                cap: int = 2_000_000) -> Optional[Tuple[int, ...]]:
    """Backtracking search for a sequence of edge labels admitting the strong map.

    Labels are placed one at a time (respecting ``within`` if given); a cut
    is checked as soon as all its edges are placed.  Returns ``None`` only
    after the whole space was searched; raises :class:`SearchCapExceeded`
    when ``cap`` nodes were visited first.
    """
    _check_graph_pre(G)
    labels = sorted(G.labels)
    # orthogonality is blind to negation, so one of each opposite pair suffices
    cuts = sorted({min(c, -c) for c in G.cocircuits()})
    placed: List[int] = []
    pos_of: Dict[int, int] = {}
    visited = 0

    def ok_cut(c: SignedSet) -> bool:
        seq = sorted(c.support, key=pos_of.__getitem__)
        return sign_changes(c, seq) >= 2

    def rec() -> bool:
        nonlocal visited
        visited += 1
        if visited > cap:
            raise SearchCapExceeded(f"visited more than {cap} partial orders")
        if len(placed) == len(labels):
            return True
        for e in labels:
            if e in pos_of:
                continue
            if within is not None and any(d not in pos_of for d in within.below(e)):
                continue
            pos_of[e] = len(placed)
            placed.append(e)
            good = all(ok_cut(c) for c in cuts if e in c.support and all(x in pos_of for x in c.support))
            if good and rec():
                return True
            placed.pop()
            del pos_of[e]
        return False

    return tuple(placed) if rec() else None


# ---------------------------------------------------------------- graph text format

class GraphParseError(ValueError):
    def __init__(self, msg: str, line: Optional[int] = None, source: str = "<graph>"):
        self.line = line
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + msg)


@dataclass
class GraphSpec:
    graph: DirectedGraph
    order: Optional[PartialOrder]
    chains: List[Tuple[int, ...]] = field(default_factory=list)
    triples: List[Tuple[Tuple[int, int, int], int]] = field(default_factory=list)


def parse_graph(text: str, source: str = "<graph>") -> GraphSpec:
    """Lines: ``vertices v1 v2 ...``, ``edge <label> <tail> <head>``,
    ``order a < b < c`` (chains, accumulated), ``triple e1 e2 e3 +|-``."""
    edges: Dict[int, Tuple[str, str]] = {}
    verts: List[str] = []
    chains: List[Tuple[int, ...]] = []
    triples = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, *rest = line.split(None, 1)
        body = rest[0] if rest else ""
        if head == "vertices":
            verts.extend(body.split())
        elif head == "edge":
            toks = body.split()
            if len(toks) != 3:
                raise GraphParseError("expected: edge <label> <tail> <head>", lineno, source)
            try:
                label = int(toks[0])
            except ValueError:
                raise GraphParseError(f"edge label {toks[0]!r} is not an integer", lineno, source) from None
            if label in edges:
                raise GraphParseError(f"edge {label} declared twice", lineno, source)
            edges[label] = (toks[1], toks[2])
        elif head == "order":
            parts = [p.strip() for p in body.split("<")]
            try:
                chain = tuple(int(p) for p in parts)
            except ValueError:
                raise GraphParseError("order chains are integers separated by '<'", lineno, source) from None
            if len(chain) < 2:
                raise GraphParseError("an order line needs at least two labels", lineno, source)
            chains.append(chain)
        elif head == "triple":
            toks = body.split()
            if len(toks) != 4 or toks[3] not in "+-" or len(toks[3]) != 1:
                raise GraphParseError("expected: triple <e1> <e2> <e3> <+|->", lineno, source)
            try:
                t = tuple(int(x) for x in toks[:3])
            except ValueError:
                raise GraphParseError("triple labels must be integers", lineno, source) from None
            triples.append((t, 1 if toks[3] == "+" else -1))
        else:
            raise GraphParseError(f"unknown directive {head!r}", lineno, source)
    try:
        graph = DirectedGraph.from_edges(edges, verts)
    except GraphError as exc:
        raise GraphParseError(str(exc), None, source) from None
    order = None
    if chains:
        try:
            order = PartialOrder(graph.labels, chains)
        except OrderError as exc:
            raise GraphParseError(str(exc), None, source) from None
    return GraphSpec(graph, order, chains, triples)


def format_graph(G: DirectedGraph, order=None, triples=()) -> str:
    lines = ["vertices " + " ".join(G.vertices)]
    lines += [f"edge {l} {u} {v}" for l, (u, v) in G.edges]
    if isinstance(order, PartialOrder):
        lines += [f"order {a} < {b}" for a, b in order.cover_relations()]
    elif order is not None:
        lines.append("order " + " < ".join(str(e) for e in order))
    for (a, b, c), s in triples:
        lines.append(f"triple {a} {b} {c} {'+' if s > 0 else '-'}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- hat vectors

def _sin_deg(x: float) -> float:
    return math.sin(math.radians(x))


def _labels_by_theta(theta: Mapping[int, float]) -> List[int]:
    return sorted(theta)


def hat_circuit(c: SignedSet, theta: Mapping[int, float]) -> np.ndarray:
    """Point for a circuit ``+-({i, k}, {j})``, coordinates in label order."""
    if len(c.support) != 3:
        raise ValueError(f"{c} is not a three-element circuit")
    i, j, k = sorted(c.support, key=lambda e: theta[e])
    if len({theta[i], theta[j], theta[k]}) != 3:
        raise ValueError("circuit elements need distinct angles")
    if not (c(i) == c(k) == -c(j)):
        raise ValueError(f"{c} is not of the form +-({{i,k}},{{j}}) for the angles given")
    s = c(i)
    labels = _labels_by_theta(theta)
    out = np.zeros(len(labels))
    idx = {e: n for n, e in enumerate(labels)}
    out[idx[i]] = s * _sin_deg(theta[k] - theta[j])
    out[idx[j]] = -s * _sin_deg(theta[k] - theta[i])
    out[idx[k]] = s * _sin_deg(theta[j] - theta[i])
    return out


def hat_cocircuit(c: SignedSet, theta: Mapping[int, float]) -> np.ndarray:
    """Point for ``+-C*_i``: entry ``sin(theta_i - theta_j)`` at each ``j``.

    ``+C*_i = ({j below i}, {j above i})`` so the entries carry the signs of
    the signed set.
    """
    labels = _labels_by_theta(theta)
    missing = set(labels) - c.support
    if len(missing) != 1 or not c.support <= set(labels):
        raise ValueError(f"{c} does not omit exactly one element of the ground set")
    (i,) = missing
    lo = {j for j in labels if theta[j] < theta[i]}
    hi = {j for j in labels if theta[j] > theta[i]}
    if c.pos == lo and c.neg == hi:
        s = 1
    elif c.pos == hi and c.neg == lo:
        s = -1
    else:
        raise ValueError(f"{c} does not split the ground set around {i}")
    return np.array([s * _sin_deg(theta[i] - theta[j]) for j in labels])


def rank_of_span(vectors: Sequence[np.ndarray], rtol: float = 1e-8) -> int:
    vs = [np.asarray(v, dtype=float) for v in vectors]
    if not vs:
        return 0
    A = np.vstack(vs)
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


# ---------------------------------------------------------------- polar normalization

class PolarNormalizationError(ValueError):
    def __init__(self, hypothesis: str, msg: str):
        self.hypothesis = hypothesis
        super().__init__(f"{hypothesis}: {msg}")


@dataclass
class HomogeneousRealization:
    """Vectors ``v_e`` in R^3 for each element plus the line at infinity ``omega``."""

    vectors: Dict[object, np.ndarray]
    omega: object = "omega"

    def __post_init__(self):
        self.vectors = {e: np.asarray(v, dtype=float).reshape(3) for e, v in self.vectors.items()}
        if self.omega not in self.vectors:
            raise PolarNormalizationError("omega", f"no vector for {self.omega!r}")
        for e, v in self.vectors.items():
            if not np.any(v):
                raise PolarNormalizationError("nonzero", f"v_{e} is the zero vector")

    @classmethod
    def from_polar(cls, lines: Mapping[object, Tuple[float, float]], omega="omega") -> "HomogeneousRealization":
        """Line ``{p : p . (cos t, sin t) = r}`` becomes ``(-cos t, -sin t, r)``."""
        vecs = {e: np.array([-math.cos(math.radians(t)), -math.sin(math.radians(t)), r])
                for e, (r, t) in lines.items()}
        vecs[omega] = np.array([0.0, 0.0, 1.0])
        return cls(vecs, omega)

    @property
    def elements(self) -> List:
        return [e for e in self.vectors if e != self.omega]

    def chi(self, a, b, c, tol: float = 1e-12) -> int:
        d = np.linalg.det(np.column_stack([self.vectors[a], self.vectors[b], self.vectors[c]]))
        scale = np.prod([np.linalg.norm(self.vectors[x]) for x in (a, b, c)])
        return 0 if abs(d) <= tol * scale else (1 if d > 0 else -1)

    def transform(self, P: np.ndarray) -> "HomogeneousRealization":
        return HomogeneousRealization({e: P @ v for e, v in self.vectors.items()}, self.omega)

    def scale(self, lam: Mapping) -> "HomogeneousRealization":
        return HomogeneousRealization({e: lam.get(e, 1.0) * v for e, v in self.vectors.items()}, self.omega)


@dataclass
class PolarResult:
    coords: Dict[object, Tuple[float, float]]
    realization: HomogeneousRealization
    steps: List[str]

    def triangle_sign(self, i, j, k) -> int:
        """Sign of ``r_i s(j,k) - r_j s(i,k) + r_k s(i,j)`` with the triple sorted by angle."""
        (ri, ti), (rj, tj), (rk, tk) = sorted((self.coords[e] for e in (i, j, k)), key=lambda p: p[1])
        v = ri * _sin_deg(tk - tj) - rj * _sin_deg(tk - ti) + rk * _sin_deg(tj - ti)
        return 0 if abs(v) < 1e-9 else (1 if v > 0 else -1)


def _angle(v: np.ndarray) -> float:
    """theta in [0, 360) with (x, y) = (-cos theta, -sin theta) up to scale."""
    return math.degrees(math.atan2(-v[1], -v[0])) % 360.0


def angle_classes(R: HomogeneousRealization) -> List[List]:
    """Elements grouped into parallel classes, sorted by ``chi(omega, x, y)``."""
    w = R.omega
    elems = R.elements
    classes: List[List] = []
    for e in elems:
        for cl in classes:
            if R.chi(w, cl[0], e) == 0:
                cl.append(e)
                break
        else:
            classes.append([e])
    from functools import cmp_to_key
    classes.sort(key=cmp_to_key(lambda a, b: -R.chi(w, a[0], b[0])))
    return classes


def default_cocircuits(R: HomogeneousRealization) -> Tuple[Set, Set]:
    """Positive cocircuits through ``omega`` and the last / first angle class."""
    cls = angle_classes(R)
    if len(cls) < 2:
        raise PolarNormalizationError("cocircuits", "need at least two directions")
    everything = set(R.elements)
    return everything - set(cls[-1]), everything - set(cls[0])


def polar_normalize(R: HomogeneousRealization, A: Optional[Iterable] = None,
                    B: Optional[Iterable] = None) -> PolarResult:
    """Bring a realization into polar form ``v_e = (-cos t_e, -sin t_e, r_e)``.

    Each step is skipped when its target property already holds; the
    transforms used all have positive determinant or are positive scalings,
    so chirotope signs are preserved.
    """
    w = R.omega
    X = R.elements
    if len(X) < 2:
        raise PolarNormalizationError("elements", "need at least two elements besides omega")
    if np.linalg.matrix_rank(np.vstack([R.vectors[e] for e in X]), tol=1e-10) < 3:
        raise PolarNormalizationError("omega-coloop", "omega is a coloop (other elements span rank < 3)")
    for e in X:
        if np.linalg.matrix_rank(np.vstack([R.vectors[e], R.vectors[w]]), tol=1e-10) < 2:
            raise PolarNormalizationError("omega-parallel", f"omega is parallel or antiparallel to {e}")
    if A is None or B is None:
        A, B = default_cocircuits(R)
    A, B = set(A), set(B)
    if A == B:
        raise PolarNormalizationError("cocircuits", "A and B must be distinct")
    if w in A or w in B:
        raise PolarNormalizationError("cocircuits", "A and B must avoid omega")
    if not (A - B) or not (B - A):
        raise PolarNormalizationError("cocircuits", "A \\ B and B \\ A must be non-empty")
    for a in A - B:
        for b in B - A:
            if R.chi(w, a, b) != 1:
                raise PolarNormalizationError("chi(omega,a,b)", f"chi(omega, {a}, {b}) != 1")
    a0 = sorted(A - B, key=str)[0]
    b0 = sorted(B - A, key=str)[0]
    steps = []
    cur = R

    if not np.allclose(cur.vectors[w], [0.0, 0.0, 1.0]):
        P = np.linalg.inv(np.column_stack([cur.vectors[a0], cur.vectors[b0], cur.vectors[w]]))
        cur = cur.transform(P)
        steps.append("basis")
    if not all(abs(cur.vectors[e][0] ** 2 + cur.vectors[e][1] ** 2 - 1) < 1e-12 for e in X):
        cur = cur.scale({e: 1.0 / math.hypot(cur.vectors[e][0], cur.vectors[e][1]) for e in X})
        steps.append("scale")
    theta = {e: _angle(cur.vectors[e]) for e in X}
    if not all(0 <= theta[e] < 180 for e in X):
        t = math.radians(theta[a0])
        P = np.array([[math.cos(t), math.sin(t), 0], [-math.sin(t), math.cos(t), 0], [0, 0, 1]])
        cur = cur.transform(P)
        theta = {e: _angle(cur.vectors[e]) for e in X}
        theta = {e: (0.0 if abs(t_) < 1e-9 or abs(t_ - 360) < 1e-9 else t_) for e, t_ in theta.items()}
        steps.append("rotate")
        if not all(0 <= theta[e] < 180 for e in X):
            raise PolarNormalizationError("chi(omega,a,b)", "angles do not fit in [0, 180) after rotation")
    if not all(0 < theta[e] < 180 for e in X):
        eps = (180.0 - max(theta.values())) / 2.0
        t = math.radians(eps)
        P = np.array([[math.cos(t), -math.sin(t), 0], [math.sin(t), math.cos(t), 0], [0, 0, 1]])
        cur = cur.transform(P)
        theta = {e: _angle(cur.vectors[e]) for e in X}
        steps.append("epsilon")
    if not all(cur.vectors[e][2] > 0 for e in X):
        mu = 1.0 + max(cur.vectors[e][2] / cur.vectors[e][1] for e in X)
        P = np.array([[1, 0, 0], [0, 1, 0], [0, -mu, 1]], dtype=float)
        cur = cur.transform(P)
        steps.append("shear")
    coords = {e: (float(cur.vectors[e][2]), float(theta[e])) for e in X}
    return PolarResult(coords, cur, steps)
