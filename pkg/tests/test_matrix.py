import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarlines.matrix import (ConstraintMatrix, MatrixParseError, Orientation, Sign,
                               TriangleConstraint, alternates, build_matrix, definite_sign, entry,
                               evaluate_matrix, format_matrix, is_simplex, is_simplex_array,
                               maximal_subdeterminants, minimal_insoluble_array,
                               minimal_insoluble_certificate, numeric_det, order_from_rows,
                               parse_matrix, row_for_triangle, sign_under, subdeterminant_signs,
                               symbolic_det)
from polarlines.order import OrderError, PartialOrder
from polarlines.pappus import S9_COLS, THETA_DEGENERATE, THETA_STAR, build_canonical_matrices
from polarlines.sines import evaluate, normalize, parse_sum


def test_entry_canonical_form():
    assert entry(1, 3, 1) == (-1, (1, 3))
    with pytest.raises(ValueError):
        entry(2, 1, 3)
    with pytest.raises(ValueError):
        entry(1, 2, 2)


def test_triangle_row_measures_orientation():
    # three lines in polar form; the row dotted with r is the signed area test
    th = {1: 20.0, 2: 75.0, 3: 140.0}
    r = np.array([1.0, 0.3, 2.0])
    row = build_matrix([TriangleConstraint(1, 2, 3)], 3)
    neg = build_matrix([TriangleConstraint(1, 2, 3, Orientation.NEGATIVE)], 3)
    a = evaluate_matrix(row, th) @ r
    s = lambda i, j: np.sin(np.radians(th[j] - th[i]))
    assert a[0] == pytest.approx(r[0] * s(2, 3) - r[1] * s(1, 3) + r[2] * s(1, 2))
    assert (evaluate_matrix(neg, th) @ r)[0] == pytest.approx(-a[0])


def test_triangle_checks_order():
    t = TriangleConstraint(1, 3, 2)
    with pytest.raises(OrderError):
        row_for_triangle(t, 3, PartialOrder.chain([1, 2, 3]))
    with pytest.raises(ValueError):
        TriangleConstraint(1, 1, 2)


def test_coincident_rows_are_equalities_and_duplicates_warn():
    tris = [TriangleConstraint(1, 2, 3, Orientation.COINCIDENT), TriangleConstraint(1, 2, 4)]
    M = build_matrix(tris, 4)
    assert M.equalities == {0}
    assert M.strict_part().shape == (1, 4)
    with pytest.warns(UserWarning):
        build_matrix([TriangleConstraint(1, 2, 3)] * 2, 3)


def test_submatrix_and_labels():
    M = build_canonical_matrices().M9
    S = M.submatrix(["B", "A"], [3, 5])
    assert S.row_labels == ("B", "A") and S.col_labels == (3, 5)
    with pytest.raises(IndexError):
        M.submatrix(cols=[11])
    with pytest.raises(IndexError):
        M.submatrix(["Z"])


def test_determinant_of_small_matrix():
    M = parse_matrix("SN(1,2) SN(3,4)\nSN(2,4) SN(1,3)\n")
    assert symbolic_det(M, normal=False) == parse_sum("s(1,2)s(1,3) - s(3,4)s(2,4)")
    assert symbolic_det(M) == normalize(parse_sum("s(1,2)s(1,3) - s(3,4)s(2,4)"))
    with pytest.raises(ValueError):
        symbolic_det(parse_matrix("SN(1,2) .\n"))


def _random_matrix(rng, n, density=0.6, labels=6):
    rows = []
    for _ in range(n):
        row = []
        for _ in range(n):
            if rng.random() < density:
                a, b = rng.sample(range(1, labels + 1), 2)
                row.append(entry(rng.choice([1, -1]), a, b))
            else:
                row.append(None)
        rows.append(tuple(row))
    return ConstraintMatrix(tuple(rows), tuple(range(1, n + 1)))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**31))
def test_symbolic_det_matches_numeric(n, seed):
    rng = random.Random(seed)
    M = _random_matrix(rng, n)
    th = {i: rng.uniform(0, 180) for i in range(1, 7)}
    A = evaluate_matrix(M, th)
    d = symbolic_det(M, normal=False)
    assert evaluate(d, th) == pytest.approx(numeric_det(A), abs=1e-9)
    assert evaluate(normalize(d), th) == pytest.approx(numeric_det(A), abs=1e-9)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(0, 2**31))
def test_format_parse_round_trip(n, seed):
    rng = random.Random(seed)
    M = _random_matrix(rng, n)
    M = ConstraintMatrix(M.rows, M.col_labels, M.row_labels, frozenset(rng.sample(range(n), n // 2)))
    again = parse_matrix(format_matrix(M))
    assert again == M


def test_parse_errors_cite_lines():
    with pytest.raises(MatrixParseError) as info:
        parse_matrix("(1) (2)\nSN(1,2) .\nSN(1,2) foo\n", source="m.mat")
    assert info.value.line == 3 and str(info.value).startswith("m.mat:3:")
    with pytest.raises(MatrixParseError) as info:
        parse_matrix("SN(1,2) .\nSN(1,2)\n")
    assert info.value.line == 2
    with pytest.raises(MatrixParseError):
        parse_matrix("SN(2,2)\n")


def test_definite_sign_handles_reversed_and_incomparable_pairs():
    P = PartialOrder(range(1, 5), [(1, 2, 3), (4, 2)])
    assert definite_sign(parse_sum("s(1,2)s(2,3)"), P) is Sign.POSITIVE
    assert definite_sign(parse_sum("s(2,4)"), P) is Sign.NEGATIVE
    assert definite_sign(parse_sum("s(1,4)"), P) is Sign.INDETERMINATE
    assert definite_sign(parse_sum("s(1,2) - s(1,3)"), P) is Sign.INDETERMINATE
    assert definite_sign(parse_sum("0"), P) is Sign.ZERO


def test_sign_under_falls_back_to_normal_form():
    # s(1,3)s(2,4) - s(1,4)s(2,3) normalizes to s(1,2)s(3,4)
    P = PartialOrder.chain([1, 2, 3, 4])
    s = parse_sum("s(1,3)s(2,4) - s(1,4)s(2,3)")
    assert definite_sign(s, P) is Sign.INDETERMINATE
    assert sign_under(s, P) is Sign.POSITIVE


def test_alternation():
    P, N, Z, Q = Sign.POSITIVE, Sign.NEGATIVE, Sign.ZERO, Sign.INDETERMINATE
    assert alternates([P, N, P]) and alternates([N, P])
    assert not alternates([P, P]) and not alternates([P, Z, P]) and not alternates([P, Q])


def test_single_triangle_is_a_simplex():
    M = build_matrix([TriangleConstraint(1, 2, 3)], 3).submatrix(cols=[])
    # 1 x 0 has one empty subdeterminant
    assert maximal_subdeterminants(M) == [parse_sum("1")]
    tri = build_matrix([TriangleConstraint(1, 2, 3), TriangleConstraint(1, 2, 3, Orientation.NEGATIVE)], 3)
    assert is_simplex(tri.submatrix(cols=[2]), PartialOrder.chain([1, 2, 3]))


def test_s8_is_simplex_and_order_recovered():
    can = build_canonical_matrices()
    assert is_simplex(can.S8, can.order)
    assert order_from_rows(can.M9) == can.order
    signs = subdeterminant_signs(can.S9, can.order)
    assert signs[-1] is Sign.INDETERMINATE and alternates(signs[:-1])


def test_minimal_insolubility_symbolic_and_numeric():
    can = build_canonical_matrices()
    sym = minimal_insoluble_certificate(can.M9, S9_COLS, order=can.order)
    assert sym.simplex is None and all(sym.zero.values()) and not sym.holds
    deg = minimal_insoluble_certificate(can.M9, S9_COLS, theta=THETA_DEGENERATE)
    assert deg.holds
    star = minimal_insoluble_certificate(can.M9, S9_COLS, theta=THETA_STAR)
    assert star.simplex is False and not star
    with pytest.raises(ValueError):
        minimal_insoluble_certificate(can.M9, S9_COLS)
    with pytest.raises(ValueError):
        minimal_insoluble_certificate(can.M9, S9_COLS[:-1], order=can.order)


def test_minimal_insoluble_array():
    A = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [-1.0, -1.0, -2.0]])
    assert minimal_insoluble_array(A, [0, 1])
    B = A.copy()
    B[2, 2] = 0.0
    assert not minimal_insoluble_array(B, [0, 1])
    assert is_simplex_array(A[:, :2])
