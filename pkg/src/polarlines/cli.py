"""polarlines: symbolic and numeric checks for angle-ordered line arrangements.

Exit codes: 0 success / true, 1 false / infeasible, 2 usage or input error,
3 internal failure.
"""
from __future__ import annotations

import argparse
import re
import sys
from typing import Dict, List, Optional, Sequence

from . import __version__
from .lp import Feasible, NumericalFailure, solve_at, split_rows, verify_certificate
from .matrix import (MatrixParseError, Sign, alternates, evaluate_matrix, format_matrix,
                     numeric_subdeterminant_signs, order_from_rows, parse_matrix, sign_under,
                     subdeterminant_signs, symbolic_det)
from .matroid import (GraphError, GraphParseError, find_compatible_total_order, parse_graph,
                      strong_map_exists, SearchCapExceeded)
from .order import OrderError, PartialOrder
from .sines import SineParseError, equivalent, format_sum, normalize, parse_sum
from .twisted import (TwistError, build_twisted, explore_constraining, find_positive_sequence,
                      is_irredundant, is_order_minimal, is_simplicial, is_strictly_simplicial,
                      sigma_matrix, triples_from_spec)

OK, FALSE, USAGE, INTERNAL = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def read_expr(path: str):
    try:
        return parse_sum(_read(path))
    except SineParseError as exc:
        raise InputError(f"{path}:{exc.line}: {exc.msg}" if exc.line else f"{path}: {exc}") from None


def read_matrix(path: str):
    return parse_matrix(_read(path), source=path)


_THETA = re.compile(r"^\s*(\d+)\s*=\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*$")


def parse_theta(text: str, source: str = "<theta>") -> Dict[int, float]:
    """Lines ``i = degrees``; ``#`` starts a comment."""
    out: Dict[int, float] = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _THETA.match(line)
        if not m:
            raise InputError(f"{source}:{n}: expected 'i = degrees', got {line!r}")
        i = int(m.group(1))
        if i in out:
            raise InputError(f"{source}:{n}: angle {i} given twice")
        out[i] = float(m.group(2))
    return out


def format_theta(theta: Dict[int, float]) -> str:
    return "".join(f"{i} = {theta[i]:g}\n" for i in sorted(theta))


def read_theta(path: str) -> Dict[int, float]:
    return parse_theta(_read(path), path)


def parse_order_args(chains: Optional[Sequence[str]], elements) -> Optional[PartialOrder]:
    if not chains:
        return None
    rel = []
    for c in chains:
        try:
            rel.append(tuple(int(x) for x in c.split("<")))
        except ValueError:
            raise InputError(f"bad order chain {c!r}; use e.g. 1<2<3") from None
    elems = set(elements) | {x for ch in rel for x in ch}
    return PartialOrder(elems, rel)


def parse_cols(spec: Sequence[str]) -> List[int]:
    out = []
    for item in spec:
        for tok in item.replace(",", " ").split():
            try:
                out.append(int(tok))
            except ValueError:
                raise InputError(f"column label {tok!r} is not an integer") from None
    return out


# ---------------------------------------------------------------- commands

def cmd_normalize(a) -> int:
    print(format_sum(normalize(read_expr(a.file))))
    return OK


def cmd_equiv(a) -> int:
    same = equivalent(read_expr(a.lhs), read_expr(a.rhs))
    print("true" if same else "false")
    return OK if same else FALSE


def cmd_det(a) -> int:
    M = read_matrix(a.file)
    if a.cols:
        M = M.submatrix(cols=parse_cols(a.cols))
    if M.shape[0] != M.shape[1]:
        raise InputError(f"determinant needs a square matrix, got {M.shape[0]}x{M.shape[1]}")
    print(format_sum(symbolic_det(M, normal=not a.raw)))
    return OK


def cmd_sign(a) -> int:
    s = read_expr(a.file)
    order = parse_order_args(a.order, s.indices())
    if order is None:
        raise InputError("sign needs at least one --order chain")
    sg = sign_under(s, order)
    print(sg.name.lower())
    return OK if sg is not Sign.INDETERMINATE else FALSE


def cmd_simplex(a) -> int:
    full = read_matrix(a.file)
    M = full.submatrix(cols=parse_cols(a.cols)) if a.cols else full
    if M.shape[0] != M.shape[1] + 1:
        raise InputError(f"simplex test needs r+1 rows and r columns, got {M.shape[0]}x{M.shape[1]}")
    if a.theta:
        signs = numeric_subdeterminant_signs(evaluate_matrix(M, read_theta(a.theta)))
    else:
        # rows only reveal their triangle before columns are dropped
        order = parse_order_args(a.order, M.indices()) or order_from_rows(full)
        signs = subdeterminant_signs(M, order)
    verdict = alternates(signs)
    print(("simplex" if verdict else "not a simplex") + ": " + " ".join(s.symbol for s in signs))
    return OK if verdict else FALSE


def cmd_feasible(a) -> int:
    M = read_matrix(a.matrix)
    theta = read_theta(a.theta)
    missing = sorted(M.indices() - set(theta))
    if missing:
        raise InputError(f"{a.theta}: no angle for index {missing[0]}")
    res = solve_at(M, theta)
    A, E = split_rows(M, theta)
    ok = verify_certificate(A, res, A_eq=E)
    print(res)
    print(f"verified: {'yes' if ok else 'no'}")
    if not ok:
        return INTERNAL
    return OK if isinstance(res, Feasible) else FALSE


def _graph_and_order(path: str):
    spec = parse_graph(_read(path), source=path)
    return spec


def cmd_om(a) -> int:
    spec = _graph_and_order(a.graph)
    G = spec.graph
    if a.what == "circuits":
        for c in sorted(G.circuits(), key=lambda x: (len(x.support), sorted(x.support), sorted(x.pos))):
            print(c)
        return OK
    if a.what == "cocircuits":
        for c in sorted(G.cocircuits(), key=lambda x: (len(x.support), sorted(x.support), sorted(x.pos))):
            print(c)
        return OK
    if a.what == "find-order":
        seq = find_compatible_total_order(G, within=spec.order)
        if seq is None:
            print("none")
            return FALSE
        print("order " + " < ".join(map(str, seq)))
        return OK
    order = spec.order if spec.order is not None else PartialOrder.chain(sorted(G.labels))
    res = strong_map_exists(G, order)
    note = "" if res.exhaustive else f" (sampled {res.checked} extensions)"
    print(("true" if res else "false") + note)
    if not res and res.witness:
        print("failing order " + " < ".join(map(str, res.witness)))
    return OK if res else FALSE


def cmd_twist(a) -> int:
    spec = _graph_and_order(a.graph)
    G = spec.graph
    order = spec.order
    if order is None:
        seq = find_compatible_total_order(G)
        if seq is None:
            raise InputError(f"{a.graph}: no compatible total order exists")
        order = PartialOrder(seq, [seq])
        print("order " + " < ".join(map(str, seq)))
    triples = triples_from_spec(spec.triples) if spec.triples else None
    T = build_twisted(G, order, triples)
    print("Sigma(T):")
    print(format_matrix(sigma_matrix(T)), end="")
    seq = find_positive_sequence(T)
    if seq is None:
        print("positive sequence: none found")
        status = FALSE
    else:
        rows = [T.row_labels()[i] for i in seq.rows]
        print("positive sequence: rows " + " ".join(rows) + "; F = " + ",".join(map(str, seq.F)))
        F = sorted(seq.F)
        simp = is_simplicial(T, F)
        strict = is_strictly_simplicial(T, F)
        print(f"simplicial: {'yes' if simp else 'no'}")
        print(f"strictly simplicial: {'yes' if strict else 'no'}")
        status = OK if simp else FALSE
    if a.minimality:
        print(f"irredundant: {'yes' if is_irredundant(T) else 'no'}")
        print(f"order-minimal: {'yes' if is_order_minimal(T) else 'no'}")
    if a.explore:
        ex = explore_constraining(T, a.explore, seed=a.seed)
        w = ex.constraining_witness
        if w is None:
            print(f"constraining: no witness in {a.explore} samples (not a proof)")
        else:
            print("constraining: witness angles " + " ".join(f"{i}={w[i]:.6g}" for i in sorted(w)))
    return status


def cmd_verify_pappus(a) -> int:
    from .pappus import verify_all
    rep = verify_all()
    print(rep.json() if a.json else rep.text())
    return OK if rep.passed else FALSE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="polarlines", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("normalize", help="print the normal form of a sine expression")
    s.add_argument("file")
    s.set_defaults(fn=cmd_normalize)

    s = sub.add_parser("equiv", help="decide whether two sine expressions are identical")
    s.add_argument("lhs")
    s.add_argument("rhs")
    s.set_defaults(fn=cmd_equiv)

    s = sub.add_parser("det", help="symbolic determinant of a square matrix")
    s.add_argument("file")
    s.add_argument("cols", nargs="*", help="column labels to keep (e.g. 2,3,4)")
    s.add_argument("--raw", action="store_true", help="print the collected expansion without normalizing")
    s.set_defaults(fn=cmd_det)

    s = sub.add_parser("sign", help="definite sign of an expression under an order")
    s.add_argument("file")
    s.add_argument("--order", action="append", help="chain such as 1<2<5 (repeatable)")
    s.set_defaults(fn=cmd_sign)

    s = sub.add_parser("simplex", help="simplex test on an (r+1) x r matrix")
    s.add_argument("file")
    s.add_argument("cols", nargs="*")
    s.add_argument("--order", action="append", help="chain such as 1<2<5 (default: read off the rows)")
    s.add_argument("--theta", help="angle file; test numerically instead of symbolically")
    s.set_defaults(fn=cmd_simplex)

    s = sub.add_parser("feasible", help="solve M r > 0 at given angles")
    s.add_argument("matrix")
    s.add_argument("theta")
    s.set_defaults(fn=cmd_feasible)

    s = sub.add_parser("om", help="oriented matroid queries on a directed graph")
    s.add_argument("what", choices=["circuits", "cocircuits", "strongmap", "find-order"])
    s.add_argument("graph")
    s.set_defaults(fn=cmd_om)

    s = sub.add_parser("twist", help="build a twisted graph and report its matrix and status")
    s.add_argument("graph")
    s.add_argument("--minimality", action="store_true", help="also test irredundancy and order-minimality")
    s.add_argument("--explore", type=int, default=0, metavar="N",
                   help="sample N angle vectors looking for an insoluble one")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(fn=cmd_twist)

    s = sub.add_parser("verify-pappus", help="run the full ten-line verification")
    s.add_argument("--json", action="store_true", help="machine-readable summary")
    s.set_defaults(fn=cmd_verify_pappus)
    return p


_INPUT_ERRORS = (InputError, MatrixParseError, GraphParseError, GraphError, OrderError, TwistError,
                 SineParseError, KeyError, IndexError, ValueError)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (NumericalFailure, SearchCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INTERNAL
    except _INPUT_ERRORS as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return USAGE
    except Exception as exc:  # pragma: no cover - last resort
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return INTERNAL


if __name__ == "__main__":
    sys.exit(main())
