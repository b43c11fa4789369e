"""Constraint matrices over sines, symbolic determinants and simplex tests.

A line ``i`` with polar coordinates ``(r_i, theta_i)`` contributes the column
``r_i``.  Three lines ``i < j < k`` (in the angular order) form a positively
oriented triangle when::

    r_i s(j,k) - r_j s(i,k) + r_k s(i,j) > 0

and a negatively oriented one when the left side is negative; it vanishes for
three concurrent lines.  Stacking such rows gives a matrix ``M`` and the
arrangement exists for fixed angles iff ``M r > 0`` is soluble.
"""
from __future__ import annotations

import enum
import re
import warnings
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .order import OrderError, PartialOrder
from .sines import SineSum, evaluate, normalize, sine

Entry = Optional[Tuple[int, Tuple[int, int]]]

ZERO_TOL = 1e-9


class Orientation(enum.Enum):
    POSITIVE = "+"
    NEGATIVE = "-"
    COINCIDENT = "0"


class Sign(enum.Enum):
    POSITIVE = 1
    NEGATIVE = -1
    ZERO = 0
    INDETERMINATE = None

    @classmethod
    def of(cls, x: float, tol: float = 0.0) -> "Sign":
        if abs(x) <= tol:
            return cls.ZERO
        return cls.POSITIVE if x > 0 else cls.NEGATIVE

    def __neg__(self) -> "Sign":
        if self is Sign.POSITIVE:
            return Sign.NEGATIVE
        if self is Sign.NEGATIVE:
            return Sign.POSITIVE
        return self

    @property
    def symbol(self) -> str:
        return {1: "+", -1: "-", 0: "0", None: "?"}[self.value]


def entry(coef: int, a: int, b: int) -> Entry:
    """``coef * sin(theta_b - theta_a)`` stored with ``lo < hi``."""
    if coef not in (1, -1):
        raise ValueError("entries carry a unit sign")
    if a == b:
        raise ValueError("sin(theta_i - theta_i) is identically zero")
    return (coef, (a, b)) if a < b else (-coef, (b, a))


def entry_sum(e: Entry) -> SineSum:
    if e is None:
        return SineSum.zero()
    s, (lo, hi) = e
    return sine(lo, hi) * s


def format_entry(e: Entry) -> str:
    if e is None:
        return "."
    s, (lo, hi) = e
    return f"{'-' if s < 0 else ''}SN({lo},{hi})"


# ---------------------------------------------------------------- triangles

@dataclass(frozen=True)
class TriangleConstraint:
    """Lines ``i, j, k`` with ``theta_i < theta_j < theta_k`` and an orientation."""

    i: int
    j: int
    k: int
    orientation: Orientation = Orientation.POSITIVE

    def __post_init__(self):
        if len({self.i, self.j, self.k}) != 3:
            raise ValueError(f"triangle needs three distinct lines, got {self.lines}")
        if isinstance(self.orientation, str):
            object.__setattr__(self, "orientation", Orientation(self.orientation))

    @property
    def lines(self) -> Tuple[int, int, int]:
        return (self.i, self.j, self.k)

    def check(self, order: PartialOrder) -> None:
        i, j, k = self.lines
        if not (order.less(i, j) and order.less(j, k)):
            raise OrderError(f"triangle {self.lines} needs {i} < {j} < {k} in the order")

    def coefficients(self) -> Dict[int, Entry]:
        """Column -> entry, the pattern ``(+s(j,k), -s(i,k), +s(i,j))`` times the sign."""
        i, j, k = self.lines
        eps = -1 if self.orientation is Orientation.NEGATIVE else 1
        return {i: entry(eps, j, k), j: entry(-eps, i, k), k: entry(eps, i, j)}


def order_of_triangles(triangles: Iterable[TriangleConstraint], n: Optional[int] = None,
                       elements: Optional[Iterable[int]] = None) -> PartialOrder:
    tris = list(triangles)
    if elements is None:
        top = n or max((max(t.lines) for t in tris), default=0)
        elements = range(1, top + 1)
    return PartialOrder(elements, [t.lines for t in tris])


def row_for_triangle(t: TriangleConstraint, n: int,
                     order: Optional[PartialOrder] = None) -> Tuple[Entry, ...]:
    if order is not None:
        t.check(order)
    if max(t.lines) > n or min(t.lines) < 1:
        raise ValueError(f"triangle {t.lines} outside columns 1..{n}")
    coeffs = t.coefficients()
    return tuple(coeffs.get(c) for c in range(1, n + 1))


# ---------------------------------------------------------------- matrices

@dataclass(frozen=True)
class ConstraintMatrix:
    """Sparse matrix of unit-signed sine entries.

    Columns carry integer labels (the angle index of the line, by default
    ``1..n``) and rows carry string labels.  Rows listed in ``equalities`` come
    from concurrent triples and are excluded from strict systems.
    """

    rows: Tuple[Tuple[Entry, ...], ...]
    col_labels: Tuple[int, ...]
    row_labels: Tuple[str, ...] = ()
    equalities: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "col_labels", tuple(self.col_labels))
        if not self.row_labels:
            object.__setattr__(self, "row_labels", tuple(default_row_label(i) for i in range(len(rows))))
        if len(self.row_labels) != len(rows):
            raise ValueError("one label per row required")
        if len(set(self.col_labels)) != len(self.col_labels):
            raise ValueError("column labels must be distinct")
        for r in rows:
            if len(r) != len(self.col_labels):
                raise ValueError(f"row of length {len(r)} in a matrix with {len(self.col_labels)} columns")
        object.__setattr__(self, "equalities", frozenset(self.equalities))

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.rows), len(self.col_labels))

    @property
    def n_cols(self) -> int:
        return len(self.col_labels)

    def col_index(self, label: int) -> int:
        try:
            return self.col_labels.index(label)
        except ValueError:
            raise IndexError(f"no column labelled {label}") from None

    def row_index(self, label: Union[str, int]) -> int:
        if isinstance(label, int):
            if not 0 <= label < len(self.rows):
                raise IndexError(f"row {label} out of range")
            return label
        try:
            return self.row_labels.index(label)
        except ValueError:
            raise IndexError(f"no row labelled {label!r}") from None

    def submatrix(self, rows: Optional[Sequence] = None, cols: Optional[Sequence[int]] = None) -> "ConstraintMatrix":
        """Select rows (labels or positions) and columns (labels) in the given order."""
        ri = list(range(len(self.rows))) if rows is None else [self.row_index(r) for r in rows]
        ci = list(range(self.n_cols)) if cols is None else [self.col_index(c) for c in cols]
        return ConstraintMatrix(
            rows=tuple(tuple(self.rows[r][c] for c in ci) for r in ri),
            col_labels=tuple(self.col_labels[c] for c in ci),
            row_labels=tuple(self.row_labels[r] for r in ri),
            equalities=frozenset(k for k, r in enumerate(ri) if r in self.equalities),
        )

    def without_row(self, pos: int) -> "ConstraintMatrix":
        return self.submatrix([r for r in range(len(self.rows)) if r != pos])

    def strict_part(self) -> "ConstraintMatrix":
        return self.submatrix([r for r in range(len(self.rows)) if r not in self.equalities])

    def stack(self, other: "ConstraintMatrix") -> "ConstraintMatrix":
        if other.col_labels != self.col_labels:
            raise ValueError("column labels differ")
        off = len(self.rows)
        return ConstraintMatrix(self.rows + other.rows, self.col_labels,
                                self.row_labels + other.row_labels,
                                self.equalities | {off + k for k in other.equalities})

    def sums(self) -> List[List[SineSum]]:
        return [[entry_sum(e) for e in r] for r in self.rows]

    def indices(self) -> frozenset:
        return frozenset(x for r in self.rows for e in r if e is not None for x in e[1])

    def evaluate(self, theta: Mapping[int, float]) -> np.ndarray:
        return evaluate_matrix(self, theta)

    def nonzero_columns(self, row: int) -> List[int]:
        return [self.col_labels[c] for c, e in enumerate(self.rows[row]) if e is not None]

    def __str__(self) -> str:
        return format_matrix(self)


def default_row_label(i: int) -> str:
    # A..Z, then AA, AB, ...
    s = ""
    i += 1
    while i:
        i, rem = divmod(i - 1, 26)
        s = chr(65 + rem) + s
    return s


def build_matrix(constraints: Sequence[TriangleConstraint], n: int,
                 order: Optional[PartialOrder] = None,
                 row_labels: Sequence[str] = ()) -> ConstraintMatrix:
    """One row per triangle, in input order, over columns ``1..n``."""
    rows = [row_for_triangle(t, n, order) for t in constraints]
    seen = set()
    for t, r in zip(constraints, rows):
        key = (r, t.orientation is Orientation.COINCIDENT)
        if key in seen:
            warnings.warn(f"duplicate row for triangle {t.lines}", stacklevel=2)
        seen.add(key)
    eq = frozenset(k for k, t in enumerate(constraints) if t.orientation is Orientation.COINCIDENT)
    return ConstraintMatrix(tuple(rows), tuple(range(1, n + 1)), tuple(row_labels), eq)


def evaluate_matrix(M: ConstraintMatrix, theta: Mapping[int, float]) -> np.ndarray:
    out = np.zeros(M.shape)
    for r, row in enumerate(M.rows):
        for c, e in enumerate(row):
            if e is not None:
                out[r, c] = evaluate(entry_sum(e), theta)
    return out


# ---------------------------------------------------------------- determinants

def _det_generic(grid: Sequence[Sequence[SineSum]]) -> SineSum:
    n = len(grid)
    if any(len(r) != n for r in grid):
        raise ValueError("determinant of a non-square matrix")
    cells = {(r, c): grid[r][c] for r in range(n) for c in range(n) if not grid[r][c].is_zero()}
    memo: Dict[Tuple[frozenset, frozenset], SineSum] = {}

    def det(rows: frozenset, cols: frozenset) -> SineSum:
        if not rows:
            return SineSum.one()
        key = (rows, cols)
        if key in memo:
            return memo[key]
        rs = sorted(rows)
        cs = sorted(cols)
        # expand along the sparsest remaining row or column
        best = None
        for r in rs:
            nz = [c for c in cs if (r, c) in cells]
            if best is None or len(nz) < best[0]:
                best = (len(nz), "row", r, nz)
        for c in cs:
            nz = [r for r in rs if (r, c) in cells]
            if len(nz) < best[0]:
                best = (len(nz), "col", c, nz)
        _, kind, fixed, nz = best
        acc = SineSum.zero()
        for other in nz:
            r, c = (fixed, other) if kind == "row" else (other, fixed)
            sign = -1 if (rs.index(r) + cs.index(c)) % 2 else 1
            minor = det(rows - {r}, cols - {c})
            if not minor.is_zero():
                acc = acc + cells[(r, c)] * minor * sign
        memo[key] = acc
        return acc

    return det(frozenset(range(n)), frozenset(range(n)))


def symbolic_det(M: Union[ConstraintMatrix, Sequence[Sequence[SineSum]]],
                 normal: bool = True) -> SineSum:
    """Exact determinant by sparse cofactor expansion.

    With ``normal=False`` the collected expansion is returned as is, which
    keeps products in the shape they came out of the matrix (useful for sign
    reading under an order).
    """
    grid = M.sums() if isinstance(M, ConstraintMatrix) else M
    if isinstance(M, ConstraintMatrix) and M.shape[0] != M.shape[1]:
        raise ValueError(f"determinant of a non-square {M.shape} matrix")
    raw = _det_generic(grid)
    return normalize(raw) if normal else raw


def maximal_subdeterminants(M: ConstraintMatrix, normal: bool = False) -> List[SineSum]:
    """Determinants of M with row i deleted, i = 1..r+1, no extra sign factor."""
    m, n = M.shape
    if m != n + 1:
        raise ValueError(f"need r+1 rows and r columns, got {M.shape}")
    return [symbolic_det(M.without_row(i), normal=normal) for i in range(m)]


def numeric_det(A: np.ndarray) -> float:
    if A.shape[0] == 0:
        return 1.0
    return float(np.linalg.det(A))


def det_scale(A: np.ndarray) -> float:
    """Hadamard bound on |det A|, used to scale zero tolerances."""
    if A.shape[0] == 0:
        return 1.0
    return float(max(np.prod(np.linalg.norm(A, axis=1)), 1e-300))


# ---------------------------------------------------------------- signs

def definite_sign(s: SineSum, order: PartialOrder) -> Sign:
    """Sign of ``s`` valid for every theta respecting the order, if one exists.

    Each factor ``s(i,j)`` must have ``i < j`` or ``j < i`` in the order (the
    latter makes the factor negative).  All monomials must then agree in sign.
    """
    if s.is_zero():
        return Sign.ZERO
    found = None
    for m, c in s.items():
        sgn = 1 if c > 0 else -1
        for lo, hi in m:
            if order.less(lo, hi):
                continue
            if order.less(hi, lo):
                sgn = -sgn
                continue
            return Sign.INDETERMINATE
        if found is None:
            found = sgn
        elif found != sgn:
            return Sign.INDETERMINATE
    return Sign.POSITIVE if found > 0 else Sign.NEGATIVE


def sign_under(s: SineSum, order: PartialOrder) -> Sign:
    """:func:`definite_sign` of the expression, retried on its normal form."""
    sg = definite_sign(s, order)
    if sg is Sign.INDETERMINATE:
        sg = definite_sign(normalize(s), order)
    return sg


def alternates(signs: Sequence[Sign]) -> bool:
    if any(s not in (Sign.POSITIVE, Sign.NEGATIVE) for s in signs):
        return False
    return all(a.value == -b.value for a, b in zip(signs, signs[1:]))


def subdeterminant_signs(M: ConstraintMatrix, order: PartialOrder) -> List[Sign]:
    return [sign_under(d, order) for d in maximal_subdeterminants(M, normal=False)]


def is_simplex(M: ConstraintMatrix, order: PartialOrder) -> bool:
    """Symbolic simplex test: definite, strictly alternating subdeterminant signs."""
    return alternates(subdeterminant_signs(M, order))


def numeric_subdeterminants(A: np.ndarray) -> List[float]:
    m, n = A.shape
    if m != n + 1:
        raise ValueError(f"need r+1 rows and r columns, got {A.shape}")
    return [numeric_det(np.delete(A, i, axis=0)) for i in range(m)]


def numeric_subdeterminant_signs(A: np.ndarray, tol: float = ZERO_TOL) -> List[Sign]:
    out = []
    for i, d in enumerate(numeric_subdeterminants(A)):
        out.append(Sign.of(d, tol * det_scale(np.delete(A, i, axis=0))))
    return out


def is_simplex_array(A: np.ndarray, tol: float = ZERO_TOL) -> bool:
    return alternates(numeric_subdeterminant_signs(np.asarray(A, dtype=float), tol))


def is_simplex_numeric(M: ConstraintMatrix, theta: Mapping[int, float], tol: float = ZERO_TOL) -> bool:
    return is_simplex_array(evaluate_matrix(M, theta), tol)


# ---------------------------------------------------------------- minimal insolubility

@dataclass
class InsolubilityCheck:
    """Outcome of the minimal-insolubility test on ``M`` with simplex columns ``S``.

    ``simplex`` is ``None`` when the subdeterminant signs are not definite
    under the order.  ``residuals`` maps each column outside ``S`` to the
    determinant of ``S`` extended by that column (a normal form, or a float
    in the numeric variant).
    """

    simplex_cols: Tuple[int, ...]
    simplex: Optional[bool]
    subdet_signs: List[Sign]
    residuals: Dict[int, object]
    zero: Dict[int, bool]

    @property
    def holds(self) -> bool:
        return bool(self.simplex) and all(self.zero.values())

    def __bool__(self) -> bool:
        return self.holds


def _with_column(M: ConstraintMatrix, simplex_cols: Sequence[int], c: int) -> ConstraintMatrix:
    # columns kept in their original relative order
    keep = set(simplex_cols) | {c}
    return M.submatrix(cols=[x for x in M.col_labels if x in keep])


def minimal_insoluble_certificate(M: ConstraintMatrix, simplex_cols: Sequence[int],
                                  order: Optional[PartialOrder] = None,
                                  theta: Optional[Mapping[int, float]] = None,
                                  tol: float = ZERO_TOL) -> InsolubilityCheck:
    """Test whether ``M r > 0`` is minimally insoluble via the simplex ``M[:, S]``.

    Symbolic when ``order`` is given (zero means normal form is empty),
    numeric when ``theta`` is given.  Columns already in ``S`` give trivially
    singular extensions and are skipped.
    """
    m, n = M.shape
    S = [c for c in M.col_labels if c in set(simplex_cols)]
    if len(S) != len(set(simplex_cols)):
        raise IndexError("simplex columns must be column labels of M")
    if len(S) != m - 1:
        raise ValueError(f"simplex needs {m - 1} columns for {m} rows, got {len(S)}")
    if (order is None) == (theta is None):
        raise ValueError("give exactly one of order (symbolic) or theta (numeric)")
    sub = M.submatrix(cols=S)
    outside = [c for c in M.col_labels if c not in set(S)]
    residuals: Dict[int, object] = {}
    zero: Dict[int, bool] = {}
    if order is not None:
        signs = subdeterminant_signs(sub, order)
        simplex = alternates(signs) if all(s is not Sign.INDETERMINATE for s in signs) else None
        for c in outside:
            d = symbolic_det(_with_column(M, S, c))
            residuals[c] = d
            zero[c] = d.is_zero()
    else:
        A = evaluate_matrix(sub, theta)
        signs = numeric_subdeterminant_signs(A, tol)
        simplex = alternates(signs)
        for c in outside:
            B = evaluate_matrix(_with_column(M, S, c), theta)
            d = numeric_det(B)
            residuals[c] = d
            zero[c] = abs(d) <= tol * det_scale(B)
    return InsolubilityCheck(tuple(S), simplex, signs, residuals, zero)


def minimal_insoluble_array(A: np.ndarray, simplex_cols: Sequence[int], tol: float = ZERO_TOL) -> bool:
    """Numeric variant on a plain array; ``simplex_cols`` are 0-based positions."""
    A = np.asarray(A, dtype=float)
    m, n = A.shape
    S = sorted(simplex_cols)
    if len(S) != m - 1:
        raise ValueError(f"simplex needs {m - 1} columns for {m} rows")
    if not is_simplex_array(A[:, S], tol):
        return False
    for c in range(n):
        if c in S:
            continue
        B = A[:, sorted(S + [c])]
        if abs(numeric_det(B)) > tol * det_scale(B):
            return False
    return True


# ---------------------------------------------------------------- order inference

def order_from_rows(M: ConstraintMatrix) -> PartialOrder:
    """Read ``i < j < k`` off each three-entry row.

    The middle line is the column whose entry sign differs from the other
    two; the outer two are taken in label order, matching the convention of
    writing triangles with increasing indices.
    """
    rel = []
    for r, row in enumerate(M.rows):
        nz = [(M.col_labels[c], e) for c, e in enumerate(row) if e is not None]
        if len(nz) != 3:
            continue
        signs = [e[0] for _, e in nz]
        odd = [k for k in range(3) if signs.count(signs[k]) == 1]
        if len(odd) != 1:
            raise ValueError(f"row {M.row_labels[r]} does not have the alternating triangle pattern")
        mid = nz[odd[0]][0]
        outer = sorted(lbl for k, (lbl, _) in enumerate(nz) if k != odd[0])
        rel.append((outer[0], mid, outer[1]))
    return PartialOrder(set(M.col_labels) | M.indices(), rel)


# ---------------------------------------------------------------- text format

_LABEL = re.compile(r"^\((?P<lbl>[^()\s]+)\)$")
_CELL = re.compile(r"^(?P<neg>-)?\+?SN\((?P<a>\d+),(?P<b>\d+)\)$")


class MatrixParseError(ValueError):
    def __init__(self, msg: str, line: Optional[int] = None, source: str = "<matrix>"):
        self.line = line
        self.source = source
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + msg)


def parse_matrix(text: str, source: str = "<matrix>") -> ConstraintMatrix:
    """Parse rows of ``SN(i,j)`` / ``-SN(i,j)`` / ``.`` tokens.

    An optional header line of ``(label)`` tokens names the columns (integers);
    an optional leading ``(label)`` names each row.  A trailing ``=`` token
    marks an equality row.  ``#`` starts a comment.
    """
    col_labels: Optional[List[int]] = None
    rows: List[Tuple[Entry, ...]] = []
    labels: List[str] = []
    eqs = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if all(_LABEL.match(t) for t in toks) and not rows and col_labels is None:
            try:
                col_labels = [int(_LABEL.match(t).group("lbl")) for t in toks]
            except ValueError:
                raise MatrixParseError("column labels must be integers", lineno, source) from None
            continue
        label = None
        mt = _LABEL.match(toks[0])
        if mt:
            label = mt.group("lbl")
            toks = toks[1:]
        is_eq = False
        if toks and toks[-1] == "=":
            is_eq = True
            toks = toks[:-1]
        cells: List[Entry] = []
        for t in toks:
            if t in (".", "0"):
                cells.append(None)
                continue
            mc = _CELL.match(t)
            if not mc:
                raise MatrixParseError(f"bad entry {t!r}", lineno, source)
            a, b = int(mc.group("a")), int(mc.group("b"))
            if a == b:
                raise MatrixParseError(f"degenerate entry {t!r}", lineno, source)
            cells.append(entry(-1 if mc.group("neg") else 1, a, b))
        if rows and len(cells) != len(rows[0]):
            raise MatrixParseError(f"row has {len(cells)} entries, expected {len(rows[0])}", lineno, source)
        if col_labels is not None and len(cells) != len(col_labels):
            raise MatrixParseError(f"row has {len(cells)} entries, header has {len(col_labels)}", lineno, source)
        if is_eq:
            eqs.add(len(rows))
        rows.append(tuple(cells))
        labels.append(label if label is not None else default_row_label(len(labels)))
    if col_labels is None:
        width = len(rows[0]) if rows else 0
        col_labels = list(range(1, width + 1))
    return ConstraintMatrix(tuple(rows), tuple(col_labels), tuple(labels), frozenset(eqs))


def format_matrix(M: ConstraintMatrix) -> str:
    cells = [[format_entry(e) for e in r] for r in M.rows]
    header = [f"({c})" for c in M.col_labels]
    width = max([len(x) for x in header] + [len(x) for r in cells for x in r] + [1])
    lab_w = max([len(f"({l})") for l in M.row_labels] + [0])
    lines = [" " * lab_w + " " + " ".join(h.rjust(width) for h in header)]
    for k, (lbl, r) in enumerate(zip(M.row_labels, cells)):
        line = f"({lbl})".ljust(lab_w) + " " + " ".join(x.rjust(width) for x in r)
        if k in M.equalities:
            line += " ="
        lines.append(line.rstrip())
    return "\n".join(lines) + "\n"
