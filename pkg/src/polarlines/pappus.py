"""Machine check of the ten-line non-stretchability argument.

Nine triangle constraints on ten lines give a 9 x 10 matrix ``M9``; its
first eight rows form ``M8``.  The checks below rebuild every determinant
involved, compare it with its expected closed form, derive the final
contradiction after merging lines 4 -> 3 and 10 -> 9, and replay the
twisted-graph argument at a concrete angle vector.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .lp import Feasible, Infeasible, solve_strict, verify_certificate
from .matrix import (ConstraintMatrix, Orientation, Sign, TriangleConstraint, alternates, build_matrix,
                     definite_sign, evaluate_matrix, maximal_subdeterminants, sign_under,
                     symbolic_det)
from .matroid import DirectedGraph, SignedSet
from .order import PartialOrder
from .sines import SineSum, equivalent, evaluate, format_sum, merge_indices, normalize, parse_sum
from .twisted import (PositiveSequence, build_twisted, check_positive_sequence, is_strictly_simplicial,
                      sigma_sign)

_P, _N = Orientation.POSITIVE, Orientation.NEGATIVE

TRIANGLES = (
    TriangleConstraint(3, 5, 8, _N),
    TriangleConstraint(2, 8, 9, _N),
    TriangleConstraint(2, 4, 6, _P),
    TriangleConstraint(6, 7, 10, _N),
    TriangleConstraint(1, 3, 7, _N),
    TriangleConstraint(1, 4, 7, _N),
    TriangleConstraint(1, 5, 9, _P),
    TriangleConstraint(1, 5, 10, _P),
    TriangleConstraint(1, 5, 7, _P),
)
ROWS = tuple("ABCDEFGHI")
S8_COLS = (2, 3, 4, 6, 8, 9, 10)
S9_COLS = (2, 3, 4, 5, 6, 8, 9, 10)
THETA_STAR = dict(zip(range(1, 11), (42, 20, 62, 80, 120, 98, 158, 125, 149, 170)))
THETA_DEGENERATE = dict(zip(range(1, 11), (10, 20, 30, 30, 50, 60, 70, 80, 90, 90)))
POSITIVE_SEQUENCE_F = (8, 2, 6, 3, 4, 9, 10)

# the left side of the main inequality
MAIN = ("SN(8,9)SN(1,10)SN(2,4)SN(3,5)SN(6,7) + SN(4,6)SN(1,9)SN(7,10)SN(3,5)SN(2,8)"
        " - SN(4,6)SN(3,8)SN(7,10)SN(2,9)SN(1,5)")

S8_SUBDETS = (
    "-SN(4,6)SN(1,7)SN(1,7)SN(7,10)SN(2,9)SN(1,5)SN(1,5)",
    "+SN(4,6)SN(1,7)SN(1,7)SN(7,10)SN(3,5)SN(1,5)SN(1,5)",
    "-SN(8,9)SN(1,7)SN(1,7)SN(7,10)SN(3,5)SN(1,5)SN(1,5)",
    "+SN(8,9)SN(1,7)SN(1,7)SN(2,4)SN(3,5)SN(1,5)SN(1,5)",
    "-SN(4,6)SN(5,8)SN(1,7)SN(7,10)SN(2,9)SN(1,5)SN(1,5)",
    "+SN(8,9)SN(1,7)SN(2,6)SN(7,10)SN(3,5)SN(1,5)SN(1,5)",
    "-SN(4,6)SN(1,7)SN(1,7)SN(7,10)SN(3,5)SN(2,8)SN(1,5)",
    "+SN(8,9)SN(1,7)SN(1,7)SN(2,4)SN(3,5)SN(1,5)SN(6,7)",
)

D1 = ("-SN(5,10)SN(8,9)SN(1,7)SN(1,7)SN(2,4)SN(3,5)SN(1,5)SN(6,7)"
      " - SN(5,9)SN(4,6)SN(1,7)SN(1,7)SN(7,10)SN(3,5)SN(2,8)SN(1,5)"
      " + SN(4,7)SN(8,9)SN(1,7)SN(2,6)SN(7,10)SN(3,5)SN(1,5)SN(1,5)"
      " + SN(3,7)SN(4,6)SN(5,8)SN(1,7)SN(7,10)SN(2,9)SN(1,5)SN(1,5)")
D5 = ("+SN(4,6)SN(1,7)SN(1,7)SN(3,8)SN(7,10)SN(2,9)SN(1,5)SN(1,5)"
      " - SN(4,6)SN(1,7)SN(1,7)SN(1,9)SN(7,10)SN(3,5)SN(2,8)SN(1,5)"
      " - SN(8,9)SN(1,7)SN(1,7)SN(1,10)SN(2,4)SN(3,5)SN(1,5)SN(6,7)")
D7 = ("+SN(4,6)SN(5,8)SN(1,7)SN(7,10)SN(1,3)SN(2,9)SN(1,5)SN(1,5)"
      " - SN(8,9)SN(1,7)SN(1,7)SN(2,4)SN(6,10)SN(3,5)SN(1,5)SN(1,5)"
      " + SN(8,9)SN(1,7)SN(2,6)SN(7,10)SN(1,4)SN(3,5)SN(1,5)SN(1,5)")
D_COLS = {1: (1, 2, 3, 4, 6, 8, 9, 10), 5: S9_COLS, 7: (2, 3, 4, 6, 7, 8, 9, 10)}

# the contradiction after merging 4 -> 3 and 10 -> 9, as three positive terms
CONTRADICTION = ("SN(1,9)SN(2,3)SN(3,7)SN(5,6)SN(8,9) + SN(1,9)SN(2,3)SN(3,6)SN(5,9)SN(7,8)"
                 " + SN(3,6)SN(7,9)SN(3,8)SN(1,2)SN(5,9)")
MERGED_CHAIN = (1, 2, 3, 5, 6, 7, 8, 9)

# directed graph whose vertex cuts give the rows of M8 (vertex order = row order)
DIGRAPH_EDGES = {1: ("C", "D"), 2: ("X", "Z"), 3: ("E", "C"), 4: ("Z", "C"), 5: ("D", "E"),
                 6: ("B", "Z"), 7: ("C", "B"), 8: ("E", "X"), 9: ("X", "D"), 10: ("B", "D")}
DIGRAPH_VERTICES = ("E", "X", "Z", "B", "C", "D")


@dataclass
class Canonical:
    M9: ConstraintMatrix
    M8: ConstraintMatrix
    S8: ConstraintMatrix
    S9: ConstraintMatrix
    order: PartialOrder


def build_canonical_matrices() -> Canonical:
    order = PartialOrder(range(1, 11), [t.lines for t in TRIANGLES])
    M9 = build_matrix(TRIANGLES, 10, order, ROWS)
    M8 = M9.submatrix(ROWS[:8])
    return Canonical(M9, M8, M8.submatrix(cols=S8_COLS), M9.submatrix(cols=S9_COLS), order)


def canonical_digraph() -> DirectedGraph:
    return DirectedGraph.from_edges(DIGRAPH_EDGES, DIGRAPH_VERTICES)


def main_expression() -> SineSum:
    return parse_sum(MAIN)


# ---------------------------------------------------------------- reporting

@dataclass
class Check:
    key: str
    passed: bool
    detail: str = ""
    value: Optional[float] = None


@dataclass
class VerificationReport:
    checks: List[Check] = field(default_factory=list)

    def add(self, key: str, passed: bool, detail: str = "", value: Optional[float] = None) -> bool:
        self.checks.append(Check(key, bool(passed), detail, value))
        return bool(passed)

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        self.checks.extend(other.checks)
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, key: str) -> Check:
        for c in self.checks:
            if c.key == key:
                return c
        raise KeyError(key)

    def text(self) -> str:
        lines = []
        for c in self.checks:
            line = f"[{'PASS' if c.passed else 'FAIL'}] {c.key}"
            if c.value is not None:
                line += f"  value={c.value:.6g}"
            if c.detail:
                line += f"  {c.detail}"
            lines.append(line)
        total = sum(c.passed for c in self.checks)
        lines.append(f"{total}/{len(self.checks)} checks passed")
        return "\n".join(lines)

    def summary(self) -> Dict:
        return {
            "passed": self.passed,
            "checks": {c.key: {"passed": c.passed, **({"value": c.value} if c.value is not None else {})}
                       for c in self.checks},
        }

    def json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def _diff(got: SineSum, want: SineSum) -> str:
    return f"got {format_sum(normalize(got))}; expected {format_sum(normalize(want))}"


# ---------------------------------------------------------------- individual checks

def verify_subdeterminants(can: Optional[Canonical] = None) -> VerificationReport:
    can = can or build_canonical_matrices()
    rep = VerificationReport()
    subs = maximal_subdeterminants(can.S8)
    for k, (got, text) in enumerate(zip(subs, S8_SUBDETS), 1):
        want = parse_sum(text)
        ok = normalize(got) == normalize(want)
        rep.add(f"s8.subdet.{k}", ok, "" if ok else _diff(got, want))
    signs = [sign_under(d, can.order) for d in subs]
    rep.add("s8.alternating", alternates(signs), " ".join(s.symbol for s in signs))

    subs9 = maximal_subdeterminants(can.S9)
    factor = parse_sum("-SN(1,7)")
    ok = all(normalize(a) == normalize(b * factor) for a, b in zip(subs9[:8], subs))
    rep.add("s9.first_eight_times_minus_s17", ok)
    ninth = subs9[8]
    ok = normalize(ninth) == normalize(parse_sum(D5))
    rep.add("s9.ninth_displayed", ok, "" if ok else _diff(ninth, parse_sum(D5)))
    want = parse_sum("-SN(1,7)SN(1,7)SN(1,5)") * main_expression()
    ok = normalize(ninth) == normalize(want)
    rep.add("s9.ninth_factor_of_main", ok, "" if ok else _diff(ninth, want))
    return rep


def verify_d_identities(can: Optional[Canonical] = None) -> VerificationReport:
    can = can or build_canonical_matrices()
    rep = VerificationReport()
    d = {k: symbolic_det(can.M8.submatrix(cols=cols)) for k, cols in D_COLS.items()}
    for k, text in ((1, D1), (5, D5), (7, D7)):
        want = parse_sum(text)
        ok = d[k] == normalize(want)
        rep.add(f"d{k}.displayed", ok, "" if ok else _diff(d[k], want))
    a = parse_sum("SN(1,7)SN(1,5)") * d[1]
    b = parse_sum("SN(1,5)SN(5,7)") * d[5]
    c = parse_sum("SN(1,7)SN(5,7)") * d[7]
    r = normalize(a - b)
    rep.add("d1_vs_d5", r.is_zero(), "" if r.is_zero() else f"residual {format_sum(r)}")
    r = normalize(b - c)
    rep.add("d5_vs_d7", r.is_zero(), "" if r.is_zero() else f"residual {format_sum(r)}")
    for name, drop in (("d15", (7,)), ("d57", (1,))):
        cols = [x for x in range(1, 11) if x not in drop]
        z = symbolic_det(can.M9.submatrix(cols=cols))
        rep.add(f"{name}.zero", z.is_zero(), "" if z.is_zero() else f"residual {format_sum(z)}")
    return rep


def merged_main() -> SineSum:
    return merge_indices(merge_indices(main_expression(), 4, 3), 10, 9)


def verify_rin_contradiction(can: Optional[Canonical] = None) -> VerificationReport:
    can = can or build_canonical_matrices()
    rep = VerificationReport()
    merged = normalize(merged_main())
    coeffs = [c for _, c in merged.items()]
    rep.add("rin.all_negative", bool(coeffs) and all(c < 0 for c in coeffs), format_sum(merged))
    want = -parse_sum(CONTRADICTION)
    rep.add("rin.equivalent_to_contradiction", equivalent(merged, want),
            "" if equivalent(merged, want) else _diff(merged, want))
    chain = PartialOrder.chain(MERGED_CHAIN)
    sg = definite_sign(merged, chain)
    rep.add("rin.definite_negative", sg is Sign.NEGATIVE, sg.name)
    sg = definite_sign(main_expression(), can.order)
    rep.add("rin.unmerged_indeterminate", sg is Sign.INDETERMINATE, sg.name)
    return rep


def verify_second_proof(can: Optional[Canonical] = None) -> VerificationReport:
    can = can or build_canonical_matrices()
    rep = VerificationReport()
    th = THETA_STAR
    rep.add("theta_star.respects_order", can.order.respects(th))
    T = build_twisted(canonical_digraph(), can.order)
    S = T.triples
    rows_match = [r for r in _sigma_rows(T)] == list(can.M8.rows)
    rep.add("twisted.sigma_is_m8", rows_match)
    seq = PositiveSequence(tuple(range(len(S))), POSITIVE_SEQUENCE_F)
    rep.add("second.positive_sequence", check_positive_sequence(T, seq),
            "F = " + ",".join(map(str, POSITIVE_SEQUENCE_F)))
    F = sorted(POSITIVE_SEQUENCE_F)
    rep.add("second.strictly_simplicial", is_strictly_simplicial(T, F), "E \\ F = {1,5,7}")
    d5 = evaluate(symbolic_det(can.M8.submatrix(cols=S9_COLS)), th)
    rep.add("second.d5_at_theta_star", abs(d5 - (-0.17)) <= 0.03, "expected -0.17 +- 0.03", d5)
    C = SignedSet({1, 7}, {5})
    sg = sigma_sign(T, F, C, th, check=False)
    rep.add("second.sigma", sg.sigma == -1 and sg.det_sign == -1 and sg.soluble,
            f"sigma_C={sg.sigma} det_sign={sg.det_sign}", float(sg.determinant))
    A = evaluate_matrix(can.M9, th)
    res = solve_strict(A)
    ok = isinstance(res, Feasible) and verify_certificate(A, res) and res.slack > 1e-7
    rep.add("second.m9_feasible", ok, type(res).__name__, getattr(res, "slack", None))
    A = evaluate_matrix(can.M9, THETA_DEGENERATE)
    res = solve_strict(A)
    ok = isinstance(res, Infeasible) and verify_certificate(A, res)
    rep.add("second.degenerate_infeasible", ok, type(res).__name__, getattr(res, "residual", None))
    val = evaluate(main_expression(), th)
    rep.add("second.main_positive", val > 0, "", val)
    d5_sym = symbolic_det(can.M8.submatrix(cols=S9_COLS))
    want = parse_sum("-SN(1,7)SN(1,7)SN(1,5)") * main_expression()
    rep.add("second.d5_factor_of_main", d5_sym == normalize(want))
    return rep


def _sigma_rows(T):
    from .twisted import sigma_matrix
    return sigma_matrix(T).rows


def verify_numeric_zeros(can: Optional[Canonical] = None, samples: int = 20, seed: int = 0) -> VerificationReport:
    """Symbolic zeros and identities also vanish numerically at sampled angles."""
    can = can or build_canonical_matrices()
    rep = VerificationReport()
    rng = random.Random(seed)
    d = {k: symbolic_det(can.M8.submatrix(cols=cols), normal=False) for k, cols in D_COLS.items()}
    z15 = symbolic_det(can.M9.submatrix(cols=[x for x in range(1, 11) if x != 7]), normal=False)
    z57 = symbolic_det(can.M9.submatrix(cols=list(range(2, 11))), normal=False)
    ident = (parse_sum("SN(1,7)SN(1,5)") * d[1] - parse_sum("SN(1,5)SN(5,7)") * d[5])
    worst = 0.0
    for _ in range(samples):
        th = can.order.random_theta(rng)
        for expr in (z15, z57, ident):
            worst = max(worst, abs(evaluate(expr, th)))
    rep.add("numeric.zeros", worst <= 1e-8, f"{samples} samples", worst)
    return rep


def verify_all() -> VerificationReport:
    can = build_canonical_matrices()
    rep = VerificationReport()
    for fn in (verify_subdeterminants, verify_d_identities, verify_rin_contradiction,
               verify_second_proof, verify_numeric_zeros):
        rep.extend(fn(can))
    return rep
