"""Command line entry point.

Every subcommand prints one JSON document on stdout.  Exit status is 0 for
success or an affirmative verdict, 1 for a negative verdict and 2 for bad
input.
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from fractions import Fraction

import numpy as np

from . import constructions as cons
from . import feng, polynomials as poly
from .entanglement import Bipartition, StateSet, prop1_check, product_defect
from .linalg import haar_unitary, is_unitary
from .search import PRODUCT_MAPPING_FOUND, SearchConfig, minimize_over_unitaries
from .serialize import (
    dumps, matrix_json, partitioned_from_json, read_json, stateset_from_json, stateset_to_json,
)

log = logging.getLogger("aeset")

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _complexes(text: str) -> list[complex]:
    try:
        return [complex(t.strip().replace(" ", "")) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _bip(text: str) -> Bipartition:
    try:
        return Bipartition.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _frac(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _roots_json(roots) -> list[dict]:
    return [{"value": r.value, "interval": [_frac(r.interval[0]), _frac(r.interval[1])]} for r in roots]


def _basis(args, d: int):
    return haar_unitary(d, args.seed) if args.random_basis else None


# -- construct ------------------------------------------------------------------

def cmd_construct(args) -> tuple[dict, int]:
    if args.family == "thm1":
        a = args.a if len(args.a) > 1 else args.a * (args.d - 1)
        b = args.b if len(args.b) > 1 else args.b * (args.d - 1)
        holds, lam = cons.theorem1_premise(a, b)
        states = cons.theorem1_set(args.d, a, b, _basis(args, args.d))
        meta = {"family": "thm1", "lambda_star": lam, "premise_holds": holds}
    elif args.family == "ex1":
        states = cons.example1_set(args.x, _basis(args, 4))
        meta = {"family": "ex1", "x": args.x, "p": 2}
    else:
        states = cons.theorem2_set(args.n, args.p, args.x, _basis(args, 2 * args.n))
        meta = {"family": "thm2", "n": args.n, "p": args.p, "x": args.x}
    out = stateset_to_json(states)
    out["construction"] = meta
    return out, EXIT_OK


# -- checks and unitaries ---------------------------------------------------------

def _load_states(path) -> StateSet:
    return stateset_from_json(read_json(path))


def _image_report(u: np.ndarray, states: StateSet, bip: Bipartition) -> dict:
    defects = [product_defect(u @ s, bip) for s in states.states]
    return {
        "unitary": matrix_json(u),
        "unitarity_error": float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))),
        "image_defects": defects,
        "all_product": bool(max(defects) < 1e-10 and is_unitary(u)),
    }


def cmd_check(args) -> tuple[dict, int]:
    states = _load_states(args.input)
    verdict = prop1_check(states, args.bipartition, args.tol)
    out = {
        "check": "prop1",
        "bipartition": str(args.bipartition),
        "threshold": verdict.threshold,
        "passed": verdict.passed,
        "entries": [
            {"index": e.index + 1, "label": states.labels[e.index], "dim": e.dim, "passed": e.passed}
            for e in verdict.entries
        ],
    }
    return out, EXIT_OK if verdict.passed else EXIT_NEGATIVE


def cmd_embed(args) -> tuple[dict, int]:
    data = read_json(args.input)
    pset = partitioned_from_json(data, args.bipartition)
    u = cons.prop2_embed_unitary(pset)
    out = {"embed": "prop2", "bipartition": str(args.bipartition), "parts": len(pset.parts)}
    out.update(_image_report(u, pset.all_states(), args.bipartition))
    return out, EXIT_OK if out["all_product"] else EXIT_NEGATIVE


def cmd_witness(args) -> tuple[dict, int]:
    states = _load_states(args.input)
    i = args.index - 1
    u = cons.prop1_witness_unitary(states, i, args.bipartition)
    out = {
        "witness": "prop1",
        "index": args.index,
        "case": cons.witness_case(states, i),
        "bipartition": str(args.bipartition),
    }
    out.update(_image_report(u, states, args.bipartition))
    return out, EXIT_OK if out["all_product"] else EXIT_NEGATIVE


# -- polynomials ------------------------------------------------------------------

def cmd_poly(args) -> tuple[dict, int]:
    if args.kind == "pair":
        if len(args.indices) != 4:
            raise InputError("--indices needs exactly four integers")
        f = poly.poly_f_pair(args.p, *args.indices)
        out = {"kind": "pair", "p": args.p, "indices": args.indices, "terms": len(f), "poly": f.to_json()}
        if args.roots:
            out["roots"] = _roots_json(poly.real_roots(f, args.tol))
    else:
        f = poly.poly_f_general(args.p, args.h, args.g)
        first, second = poly.family_terms(args.p, args.h, args.g)
        diag = poly.diagonal_exponents(args.p, args.h, args.g)
        out = {
            "kind": "general", "p": args.p, "h": args.h, "g": args.g,
            "nonzero": bool(f), "terms": len(f),
            "diagonal_cancelled": all(f.coefficient(e) == 0 for e in diag),
            "matching_exponents": len(poly.matching_exponents(first, second)),
            "poly": f.to_json(),
        }
    return out, EXIT_OK


def table1(tol: float = 1e-9, match_tol: float = 1e-5) -> dict:
    rows = []
    for idx in poly.TABLE1_INDICES:
        f = poly.poly_f_pair(2, *idx)
        printed = poly.SparsePoly(poly.PRINTED_EXPANSIONS[idx])
        roots = poly.real_roots(f, tol)
        expected = poly.TABLE1_ROOTS[idx]
        ok = len(roots) == len(expected)
        err = max((abs(r.value - e) for r, e in zip(roots, expected)), default=float("inf"))
        i, j, k, l = idx
        rows.append({
            "name": f"f_{{{i}{j}|{k}{l}}}^(2)",
            "indices": list(idx),
            "poly": f.to_json(),
            "printed_relative_sign": poly.relative_sign(f, printed),
            "roots": _roots_json(roots),
            "expected": list(expected),
            "max_abs_error": err,
            "match": bool(ok and err <= match_tol),
        })
    excluded = poly.merge_close([r["value"] for row in rows for r in row["roots"]])
    return {
        "rows": rows,
        "excluded_count": len(excluded),
        "match": all(r["match"] for r in rows) and len(excluded) == 15,
    }


def cmd_table1(args) -> tuple[dict, int]:
    out = table1(args.tol)
    return out, EXIT_OK if out["match"] else EXIT_NEGATIVE


def cmd_excluded(args) -> tuple[dict, int]:
    values = poly.excluded_values(args.p)
    out = {"p": args.p, "count": len(values), "values": values}
    code = EXIT_OK
    if args.p == 2:
        out["expected_count"] = 15
        if len(values) != 15:
            log.warning("expected 15 excluded values, found %d", len(values))
            code = EXIT_NEGATIVE
    return out, code


# -- search -----------------------------------------------------------------------

def cmd_search(args) -> tuple[dict, int]:
    states = _load_states(args.input)
    cfg = SearchConfig(
        restarts=args.restarts, max_iters=args.max_iters, objective_tol=args.tol,
        seed=args.seed, stop_on_success=args.stop_on_success,
    )
    report = minimize_over_unitaries(states, args.bipartition, cfg)
    out = report.to_json()
    out["bipartition"] = str(args.bipartition)
    return out, EXIT_OK if report.verdict == PRODUCT_MAPPING_FOUND else EXIT_NEGATIVE


# -- feng -------------------------------------------------------------------------

def _feng_input(path) -> list[np.ndarray]:
    data = read_json(path)
    if "blocks" in data:
        return feng.FengBasis.from_json(data).flatten()
    return list(stateset_from_json(data).states)


def cmd_feng(args) -> tuple[dict, int]:
    if args.action == "gen":
        fb = feng.feng_generate(args.n, args.partition, args.seed)
        out = fb.to_json()
        out["partition"] = fb.partition
        return out, EXIT_OK
    if args.action == "decompose":
        try:
            fb = feng.feng_decompose(_feng_input(args.input), args.tol)
        except feng.FengStructureError as exc:
            return {"error": str(exc)}, EXIT_NEGATIVE
        out = fb.to_json()
        out["partition"] = sorted(fb.partition, reverse=True)
        return out, EXIT_OK
    data = read_json(args.input)
    if "blocks" not in data:
        raise InputError("feng validate expects FengBasis JSON with a 'blocks' array")
    verdict = feng.feng_validate(feng.FengBasis.from_json(data), args.tol)
    return verdict.to_json(), EXIT_OK if verdict.passed else EXIT_NEGATIVE


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="aeset", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    con = sub.add_parser("construct", help="build a candidate state set")
    csub = con.add_subparsers(dest="family", required=True)
    t1 = csub.add_parser("thm1")
    t1.add_argument("--d", type=int, required=True)
    t1.add_argument("--a", type=_complexes, required=True)
    t1.add_argument("--b", type=_complexes, required=True)
    e1 = csub.add_parser("ex1")
    e1.add_argument("--x", type=float, required=True)
    t2 = csub.add_parser("thm2")
    t2.add_argument("--n", type=int, required=True)
    t2.add_argument("--p", type=int, required=True)
    t2.add_argument("--x", type=float, required=True)
    for p in (t1, e1, t2):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--random-basis", action="store_true", help="use a seeded Haar basis instead of the computational one")
        p.set_defaults(func=cmd_construct)

    chk = sub.add_parser("check", help="necessary-condition checks")
    chk_sub = chk.add_subparsers(dest="which", required=True)
    p1 = chk_sub.add_parser("prop1")
    p1.add_argument("--input", required=True)
    p1.add_argument("--bipartition", type=_bip, required=True)
    p1.add_argument("--tol", type=float, default=1e-9)
    p1.set_defaults(func=cmd_check)

    emb = sub.add_parser("embed", help="product-mapping unitary for orthogonal parts")
    emb_sub = emb.add_subparsers(dest="which", required=True)
    p2 = emb_sub.add_parser("prop2")
    p2.add_argument("--input", required=True)
    p2.add_argument("--bipartition", type=_bip, required=True)
    p2.set_defaults(func=cmd_embed)

    wit = sub.add_parser("witness", help="product-mapping unitary for a low-rank leave-one-out set")
    wit_sub = wit.add_subparsers(dest="which", required=True)
    w1 = wit_sub.add_parser("prop1")
    w1.add_argument("--input", required=True)
    w1.add_argument("--index", type=int, required=True, help="1-based index of the removed state")
    w1.add_argument("--bipartition", type=_bip, required=True)
    w1.set_defaults(func=cmd_witness)

    pol = sub.add_parser("poly", help="exact obstruction polynomials")
    pol_sub = pol.add_subparsers(dest="kind", required=True)
    pp = pol_sub.add_parser("pair")
    pp.add_argument("--p", type=int, required=True)
    pp.add_argument("--indices", type=_ints, required=True)
    pp.add_argument("--roots", action="store_true")
    pp.add_argument("--tol", type=float, default=1e-9)
    pp.set_defaults(func=cmd_poly)
    pg = pol_sub.add_parser("general")
    pg.add_argument("--p", type=int, required=True)
    pg.add_argument("--h", type=_ints, required=True)
    pg.add_argument("--g", type=_ints, required=True)
    pg.set_defaults(func=cmd_poly)

    tb = sub.add_parser("table1", help="reproduce the root table")
    tb.add_argument("--tol", type=float, default=1e-9, help="bracket width")
    tb.set_defaults(func=cmd_table1)

    ex = sub.add_parser("excluded", help="union of real roots of the three pair polynomials")
    ex.add_argument("--p", type=int, default=2)
    ex.set_defaults(func=cmd_excluded)

    se = sub.add_parser("search", help="multi-start search for a product mapping")
    se.add_argument("--input", required=True)
    se.add_argument("--bipartition", type=_bip, required=True)
    se.add_argument("--restarts", type=int, default=50)
    se.add_argument("--seed", type=int, default=0)
    se.add_argument("--tol", type=float, default=1e-6)
    se.add_argument("--max-iters", type=int, default=200)
    se.add_argument("--stop-on-success", action="store_true")
    se.set_defaults(func=cmd_search)

    fe = sub.add_parser("feng", help="block form of product bases of C^2 x C^n")
    fe_sub = fe.add_subparsers(dest="action", required=True)
    fg = fe_sub.add_parser("gen")
    fg.add_argument("--n", type=int, required=True)
    fg.add_argument("--partition", type=_ints, required=True)
    fg.add_argument("--seed", type=int, default=0)
    fd = fe_sub.add_parser("decompose")
    fd.add_argument("--input", required=True)
    fd.add_argument("--tol", type=float, default=1e-8)
    fv = fe_sub.add_parser("validate")
    fv.add_argument("--input", required=True)
    fv.add_argument("--tol", type=float, default=1e-10)
    for p in (fg, fd, fv):
        p.set_defaults(func=cmd_feng)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            payload, code = args.func(args)
    except (InputError, ValueError, IndexError, KeyError, OSError) as exc:
        print(f"aeset: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(dumps(payload) + "\n")
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
