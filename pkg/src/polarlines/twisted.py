"""Twisted graphs: vertex cuts split into order-circuit triples.

A twisted graph pairs a three-edge-connected, totally cyclic digraph with a
partial order on its edges and a set ``A`` of signed triples.  Each triple is
a circuit ``+-({x, z}, {y})`` with ``x < y < z`` and the triples at a vertex
compose conformally to the vertex cut ``(in-edges, out-edges)``.  Each triple
gives one row of the constraint matrix ``Sigma(T)``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .lp import Feasible, solve_strict
from .matrix import (ZERO_TOL, ConstraintMatrix, Orientation, TriangleConstraint, det_scale,
                     evaluate_matrix, is_simplex, numeric_det)
from .matroid import (DirectedGraph, GraphError, SignedSet, compose_all, is_order_circuit,
                      strong_map_exists)
from .order import OrderError, PartialOrder


class TwistError(ValueError):
    pass


# ---------------------------------------------------------------- splitting cuts

def triple_as_triangle(a: SignedSet, order: PartialOrder) -> TriangleConstraint:
    """``+({x, z}, {y})`` is the positive triangle ``(x, y, z)``; its opposite the negative one."""
    if not is_order_circuit(a, order):
        raise TwistError(f"{a} is not a circuit of the order")
    for y in a.support:
        rest = sorted(a.support - {y})
        if all(a(e) == -a(y) for e in rest):
            x, z = rest if order.less(rest[0], y) else rest[::-1]
            orient = Orientation.POSITIVE if a(x) > 0 else Orientation.NEGATIVE
            return TriangleConstraint(x, y, z, orient)
    raise TwistError(f"{a} is not a circuit of the order")


def split_vertex_cocircuit(cut: SignedSet, order: PartialOrder) -> List[SignedSet]:
    """Order-circuit triples conformal to ``cut`` whose composition is ``cut``.

    A degree-``d`` cut is split into ``d - 2`` triples when possible (the
    lexicographically first such cover), otherwise the smallest cover found
    is returned.  Raises :class:`TwistError` when no cover exists.
    """
    supp = sorted(cut.support)
    if len(supp) < 3:
        raise TwistError(f"cut {cut} has fewer than three edges")
    cands = []
    for t in combinations(supp, 3):
        x = cut.restrict(t)
        if is_order_circuit(x, order):
            cands.append(x)
    target = frozenset(supp)

    def cover(k: int) -> Optional[List[SignedSet]]:
        def rec(start: int, chosen: List[SignedSet], covered: frozenset):
            if len(chosen) == k:
                return list(chosen) if covered == target else None
            # prune: remaining picks cannot cover the rest
            if len(target - covered) > 3 * (k - len(chosen)):
                return None
            for i in range(start, len(cands)):
                c = cands[i]
                if c.support <= covered:
                    continue
                chosen.append(c)
                got = rec(i + 1, chosen, covered | c.support)
                chosen.pop()
                if got:
                    return got
            return None
        return rec(0, [], frozenset())

    if not cands:
        raise TwistError(f"no circuit of the order is conformal to the cut {cut}")
    d = len(supp)
    for k in [d - 2] + [k for k in range(1, len(cands) + 1) if k != d - 2]:
        if k < 1 or k > len(cands):
            continue
        got = cover(k)
        if got:
            return got
    raise TwistError(f"the cut {cut} is not a conformal composition of order circuits")


# ---------------------------------------------------------------- the structure

@dataclass(frozen=True)
class TwistedGraph:
    digraph: DirectedGraph
    order: PartialOrder
    triples: Tuple[SignedSet, ...]
    vertex_of: Tuple[str, ...]

    @property
    def edges(self) -> Tuple[int, ...]:
        return self.digraph.labels

    def triangles(self) -> List[TriangleConstraint]:
        return [triple_as_triangle(a, self.order) for a in self.triples]

    def row_labels(self) -> List[str]:
        out, seen = [], {}
        for v in self.vertex_of:
            k = seen.get(v, 0)
            seen[v] = k + 1
            out.append(v + "'" * k)
        return out


def _assign_vertices(G: DirectedGraph, triples: Sequence[SignedSet]) -> List[str]:
    out = []
    for a in triples:
        hits = [v for v in G.vertices
                if all(G.vertex_cocircuit(v)(e) == a(e) for e in a.support)]
        if len(hits) != 1:
            raise TwistError(f"triple {a} does not sit conformally at a single vertex")
        out.append(hits[0])
    return out


def validate(T: TwistedGraph, check_strong_map: bool = True) -> None:
    """Raise :class:`TwistError` naming the first broken condition."""
    G = T.digraph
    if not G.three_edge_connected():
        raise TwistError("underlying graph is not three-edge-connected")
    if set(T.order.elements) != set(G.labels):
        raise TwistError("order must be on the edge labels")
    for a in T.triples:
        if not is_order_circuit(a, T.order):
            raise TwistError(f"triple {a} is not a circuit of the order")
    for v in G.vertices:
        mine = [a for a, w in zip(T.triples, T.vertex_of) if w == v]
        cut = G.vertex_cocircuit(v)
        if not mine or compose_all(mine) != cut or not all(a.conforms_to(cut) for a in mine):
            raise TwistError(f"triples at {v} do not compose to its cut {cut}")
    if check_strong_map:
        if not G.is_totally_cyclic():
            raise TwistError("directed graph is not totally cyclic")
        res = strong_map_exists(G, T.order, check_pre=False)
        if not res:
            raise TwistError(f"no strong map for the extension {res.witness}")


def build_twisted(G: DirectedGraph, order, triples: Optional[Sequence[SignedSet]] = None,
                  check_strong_map: bool = True) -> TwistedGraph:
    """Split every vertex cut into order triples (or use the ones given).

    ``order`` is a :class:`PartialOrder` on the edge labels or a total
    sequence of them.  Vertices are processed in the graph's vertex order.
    """
    if not isinstance(order, PartialOrder):
        seq = tuple(order)
        order = PartialOrder(seq, [seq])
    if not G.is_connected():
        raise TwistError("underlying graph is not connected")
    if not G.is_totally_cyclic():
        raise TwistError("directed graph is not totally cyclic")
    if not G.three_edge_connected():
        raise TwistError("underlying graph is not three-edge-connected")
    if set(order.elements) != set(G.labels):
        raise TwistError("order must be on the edge labels")
    if triples is None:
        A, verts = [], []
        for v in G.vertices:
            parts = split_vertex_cocircuit(G.vertex_cocircuit(v), order)
            A.extend(parts)
            verts.extend([v] * len(parts))
    else:
        A = list(triples)
        verts = _assign_vertices(G, A)
    T = TwistedGraph(G, order, tuple(A), tuple(verts))
    validate(T, check_strong_map)
    return T


def triples_from_spec(spec: Iterable[Tuple[Tuple[int, int, int], int]]) -> List[SignedSet]:
    """``((e1, e2, e3), s)`` means ``s * ({e1, e3}, {e2})``."""
    out = []
    for (a, b, c), s in spec:
        x = SignedSet({a, c}, {b})
        out.append(x if s > 0 else -x)
    return out


def sigma_matrix(T: TwistedGraph) -> ConstraintMatrix:
    """Rows ``Sigma_{a,e} = a(e) sin(theta_e'' - theta_e')`` over columns in label order."""
    n_labels = list(T.edges)
    tris = T.triangles()
    rows = []
    from .matrix import row_for_triangle
    full = max(n_labels)
    for t in tris:
        r = row_for_triangle(t, full)
        rows.append(tuple(r[e - 1] for e in n_labels))
    return ConstraintMatrix(tuple(rows), tuple(n_labels), tuple(T.row_labels()))


def totally_cyclic_orientation(G: DirectedGraph) -> DirectedGraph:
    """Reorient edges so every edge lies on a directed cycle.

    For each edge not yet covered, a cycle through it (a path in the graph
    minus that edge) is composed into a running signed vector; edges signed
    negatively in the full-support result are reversed.  A graph that is
    already totally cyclic is returned as is.
    """
    if not G.three_edge_connected():
        raise TwistError("underlying graph is not three-edge-connected")
    if G.is_totally_cyclic():
        return G
    g = G.undirected()
    em = G.edge_map
    vec = SignedSet()
    for label in sorted(G.labels):
        if label in vec.support:
            continue
        u, v = em[label]
        h = g.copy()
        h.remove_edge(u, v)
        path = nx.shortest_path(h, v, u)
        pos, neg = {label}, set()
        for a, b in zip(path, path[1:]):
            l = g[a][b]["label"]
            (pos if em[l] == (a, b) else neg).add(l)
        vec = vec.compose(SignedSet(pos, neg))
    out = G.reversed_edges(vec.neg)
    if not out.is_totally_cyclic():
        raise TwistError("reorientation did not produce a totally cyclic graph")
    return out


# ---------------------------------------------------------------- positive sequences

@dataclass(frozen=True)
class PositiveSequence:
    rows: Tuple[int, ...]            # indices into T.triples
    F: Tuple[int, ...]               # f_2 .. f_m


def check_positive_sequence(T: TwistedGraph, seq: PositiveSequence) -> bool:
    A = [T.triples[i] for i in seq.rows]
    if sorted(seq.rows) != list(range(len(T.triples))) or len(seq.F) != len(A) - 1:
        return False
    if len(set(seq.F)) != len(seq.F):
        return False
    for j in range(1, len(A)):
        f = seq.F[j - 1]
        s = A[j](f)
        if s == 0:
            return False
        if any(A[k](f) != 0 for k in range(j + 1, len(A))):
            return False
        if any(A[i](f) not in (0, -s) for i in range(j)):
            return False
    return True


def _tree_sequence(T: TwistedGraph) -> Optional[PositiveSequence]:
    """Cubic case: one triple per vertex, BFS order, F = tree edges."""
    G = T.digraph
    if len(T.triples) != len(G.vertices) or any(G.degree(v) != 3 for v in G.vertices):
        return None
    row_of = {v: i for i, v in enumerate(T.vertex_of)}
    g = G.undirected()
    root = T.vertex_of[0]
    order, F = [root], []
    for parent, child in nx.bfs_edges(g, root):
        order.append(child)
        F.append(g[parent][child]["label"])
    return PositiveSequence(tuple(row_of[v] for v in order), tuple(F))


def _search_sequence(T: TwistedGraph, cap: int) -> Optional[PositiveSequence]:
    A = T.triples
    m = len(A)
    dead = set()
    visited = 0

    def rec(placed: List[int], F: List[int]) -> Optional[PositiveSequence]:
        nonlocal visited
        visited += 1
        if visited > cap:
            return None
        if len(placed) == m:
            return PositiveSequence(tuple(placed), tuple(F))
        key = frozenset(placed)
        if key in dead:
            return None
        rest = [i for i in range(m) if i not in key]
        for j in rest:
            later = [k for k in rest if k != j]
            for f in sorted(A[j].support):
                s = A[j](f)
                if any(A[k](f) for k in later):
                    continue
                if any(A[i](f) not in (0, -s) for i in placed):
                    continue
                got = rec(placed + [j], F + [f])
                if got:
                    return got
        dead.add(key)
        return None

    for first in range(m):
        got = rec([first], [])
        if got:
            return got
    return None


def find_positive_sequence(T: TwistedGraph, cap: int = 200_000) -> Optional[PositiveSequence]:
    seq = _tree_sequence(T)
    if seq is not None and check_positive_sequence(T, seq):
        return seq
    seq = _search_sequence(T, cap)
    if seq is not None and not check_positive_sequence(T, seq):
        raise AssertionError("search produced an invalid positive sequence")
    return seq


# ---------------------------------------------------------------- simplicial status

def _columns(T: TwistedGraph, F: Iterable[int]) -> List[int]:
    F = list(F)
    if len(F) != len(T.triples) - 1:
        raise TwistError(f"|F| must be |A| - 1 = {len(T.triples) - 1}, got {len(F)}")
    if not set(F) <= set(T.edges) or len(set(F)) != len(F):
        raise TwistError("F must be distinct edge labels")
    return sorted(F)


def is_simplicial(T: TwistedGraph, F: Iterable[int]) -> bool:
    cols = _columns(T, F)
    return is_simplex(sigma_matrix(T).submatrix(cols=cols), T.order)


def is_strictly_simplicial(T: TwistedGraph, F: Iterable[int]) -> bool:
    cols = _columns(T, F)
    rest = [e for e in T.edges if e not in cols]
    return len(rest) == 3 and T.order.is_total_on(rest) and is_simplicial(T, cols)


@dataclass
class SigmaSign:
    det_sign: int                 # sign of det Sigma[A; F + {x1}], columns ascending
    sigma: int                    # sigma_C
    sigma_opposite: int           # sigma_{-C}
    soluble: bool                 # predicted solubility of Sigma r > 0 with the C row appended
    determinant: float


def sigma_sign(T: TwistedGraph, F: Iterable[int], C: SignedSet, theta: Mapping[int, float],
               tol: float = ZERO_TOL, check: bool = True) -> SigmaSign:
    """Sign data deciding solubility of ``[Sigma(T); hat C] r > 0`` at ``theta``.

    With ``lambda`` the positive row dependency of ``Sigma[:, F]``, the
    combination ``lambda . Sigma`` lives on ``{x1, x2, x3}`` and is a
    multiple ``kappa * hat C``; the system is soluble iff ``kappa > 0``.
    ``sign(kappa)`` is read off at ``x1`` through one determinant.
    """
    cols = _columns(T, F)
    rest = [e for e in T.edges if e not in cols]
    if len(rest) != 3 or not T.order.is_total_on(rest):
        raise TwistError("E \\ F must be three totally ordered edges")
    x1, x2, x3 = T.order.sorted(rest)
    if C.support != {x1, x2, x3} or not (C(x1) == C(x3) == -C(x2)):
        raise TwistError(f"C must be +-({{{x1},{x3}}},{{{x2}}})")
    if check and not is_strictly_simplicial(T, cols):
        raise TwistError("T is not strictly simplicial on F")
    S = sigma_matrix(T)
    m = len(T.triples)
    SF = evaluate_matrix(S.submatrix(cols=cols), theta)
    d_last = numeric_det(SF[:-1])
    ext_cols = sorted(cols + [x1])
    p = ext_cols.index(x1) + 1
    Ext = evaluate_matrix(S.submatrix(cols=ext_cols), theta)
    det = numeric_det(Ext)
    det_sign = 0 if abs(det) <= tol * det_scale(Ext) else (1 if det > 0 else -1)
    sigma = (-1) ** (m + p) * C(x1) * (1 if d_last > 0 else -1)
    return SigmaSign(det_sign, sigma, -sigma, det_sign != 0 and det_sign == sigma, det)


# ---------------------------------------------------------------- minimality and exploration

def is_twisted(G: DirectedGraph, order: PartialOrder, triples: Optional[Sequence[SignedSet]] = None) -> bool:
    try:
        build_twisted(G, order, triples)
    except (TwistError, GraphError, OrderError):
        return False
    return True


def _accepts_triples(T: TwistedGraph, triples: Sequence[SignedSet], order: PartialOrder) -> bool:
    """Twisted-graph conditions with the given triples, partitioned by vertex."""
    try:
        verts = _assign_vertices(T.digraph, triples)
        validate(TwistedGraph(T.digraph, order, tuple(triples), tuple(verts)))
    except (TwistError, GraphError, OrderError):
        return False
    return True


def is_irredundant(T: TwistedGraph) -> bool:
    """No triple can be dropped and no cover relation of the order removed.

    Both conditions are monotone, so single removals suffice.
    """
    for i in range(len(T.triples)):
        rest = T.triples[:i] + T.triples[i + 1:]
        if _accepts_triples(T, rest, T.order):
            return False
    for a, b in T.order.cover_relations():
        if _accepts_triples(T, T.triples, T.order.without(a, b)):
            return False
    return True


def is_order_minimal(T: TwistedGraph) -> bool:
    """No edge deletion leaves a graph that can be twisted under the restricted order."""
    for e in T.edges:
        G2 = T.digraph.without_edge(e)
        o2 = T.order.restrict(set(T.edges) - {e})
        if is_twisted(G2, o2):
            return False
    return True


@dataclass
class Exploration:
    samples: int
    infeasible: List[Dict[int, float]]

    @property
    def constraining_witness(self) -> Optional[Dict[int, float]]:
        return self.infeasible[0] if self.infeasible else None


def explore_constraining(T: TwistedGraph, samples: int = 200, seed: int = 0,
                         stop_at_first: bool = True) -> Exploration:
    """Sample angles respecting the order and record those where ``Sigma r > 0`` fails.

    A sample counts when the strict system is insoluble and ``Sigma r = 0``
    has a non-trivial solution.  Finding none proves nothing.
    """
    rng = random.Random(seed)
    S = sigma_matrix(T)
    bad = []
    for _ in range(samples):
        th = T.order.random_theta(rng)
        A = evaluate_matrix(S, th)
        if np.linalg.matrix_rank(A) < A.shape[1] and not isinstance(solve_strict(A), Feasible):
            bad.append(th)
            if stop_at_first:
                break
    return Exploration(samples, bad)
