"""Command-line front end.

Every subcommand prints a single JSON document to stdout (sorted keys,
canonical "p/q" rationals, floats at 12 significant digits) and echoes the
resolved configuration under "meta", so identical inputs and seeds give
byte-identical output.  Progress and errors go to stderr only.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import config, gyni, polytope, upb, witness
from .core import Box, BellExpression, InputDistribution
from .exact import rat_to_str


def _emit(payload: dict, args) -> None:
    meta = {
        "command": args.command,
        "seed": getattr(args, "seed", None),
        "threads": getattr(args, "threads", 1),
        "cap": getattr(args, "cap", None),
        "tolerance": config.TOLERANCE,
    }
    payload = dict(payload)
    payload["meta"] = {k: v for k, v in meta.items() if v is not None}
    out = json.dumps(payload, sort_keys=True, indent=2)
    stream = sys.stdout
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(out + "\n")
    else:
        stream.write(out + "\n")


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _promise(args, n: int) -> InputDistribution:
    if args.promise == "parity":
        return gyni.parity_promise(n)
    if args.promise == "uniform":
        return gyni.uniform_promise(n)
    return InputDistribution.from_json(_load_json(args.promise))


def _resolve_expression(args) -> BellExpression:
    if getattr(args, "expr", None):
        return BellExpression.from_json(_load_json(args.expr))
    if getattr(args, "gyni", None):
        game = gyni.gyni_expression(args.gyni, _promise(args, args.gyni))
        if getattr(args, "form", "weighted") == "sum":
            return gyni.gyni_sum_expression(args.gyni, _promise(args, args.gyni))
        return game.expression
    if getattr(args, "known", None):
        return _known_expression(args.known)
    raise SystemExit("no expression given")


def _known_expression(name: str) -> BellExpression:
    sets = {
        "shifts": upb.shifts,
        "genshifts2": lambda: upb.gen_shifts(2),
        "genshifts3": lambda: upb.gen_shifts(3),
        "nc-3-2": lambda: upb.niset_cerf(3, 2),
        "nc-3-3": lambda: upb.niset_cerf(3, 3),
        "nc-4-3": lambda: upb.niset_cerf(4, 3),
        "wupb": upb.wupb_example,
    }
    if name == "four-partite":
        return upb.four_partite_tight_inequality()
    if name in sets:
        return upb.bell_from_set(sets[name]())
    raise ValueError(f"unknown inequality name {name!r}")


def _named_set(name: str, args):
    if name == "shifts":
        return upb.shifts()
    if name == "genshifts":
        return upb.gen_shifts(args.k)
    if name == "nc":
        return upb.niset_cerf(args.n, args.d)
    if name == "wupb":
        return upb.wupb_example()
    if name == "tiles":
        vectors = upb.tiles()
        return upb.build_local_subsets(vectors, (3, 3))
    return upb.ProductVectorSet.from_json(_load_json(name))


# ---------------------------------------------------------------------------
# subcommands


def _cmd_gyni(args) -> dict:
    q = _promise(args, args.n)
    game = gyni.gyni_expression(args.n, q)
    out = {
        "n": args.n,
        "expression": game.expression.to_json(),
        "classical_bound": rat_to_str(game.expression.classical_bound),
        "orthogonality_certificate": gyni.orthogonality_certificate(game.expression),
    }
    if args.bound == "classical":
        opt = polytope.classical_max(game.expression, cap=args.cap)
        out["value"] = rat_to_str(opt.value)
    elif args.bound == "ns":
        opt = polytope.ns_max(game.expression)
        out["value"] = rat_to_str(opt.value)
    elif args.bound == "tobl":
        opt = polytope.tobl_max(gyni.gyni_sum_expression(args.n, q))
        out["value"] = rat_to_str(opt.value)
    return out


def _cmd_bounds(args) -> dict:
    expression = _resolve_expression(args)
    out = {"label": expression.label, "set": args.set}
    if args.set == "classical":
        opt = polytope.classical_max(expression, cap=args.cap)
        out["value"] = rat_to_str(opt.value)
        out["strategy"] = [list(r) for r in opt.strategy.responses]
    elif args.set == "ns":
        opt = polytope.ns_max(expression)
        out["value"] = rat_to_str(opt.value)
        out["box"] = opt.box.to_json()
    elif args.set == "tobl":
        opt = polytope.tobl_max(expression)
        out["value"] = rat_to_str(opt.value)
        out["box"] = opt.box.to_json()
    return out


def _cmd_tobl(args) -> dict:
    if args.gyni:
        expression = gyni.gyni_sum_expression(args.gyni)
    else:
        expression = BellExpression.from_json(_load_json(args.expr))
    opt = polytope.tobl_max(expression)
    return {
        "label": expression.label,
        "value": rat_to_str(opt.value),
        "box": opt.box.to_json(),
    }


def _cmd_facet(args) -> dict:
    expression = _resolve_expression(args)
    bound = expression.classical_bound
    if bound is None:
        bound = polytope.classical_max(expression, cap=args.cap).value
    report = polytope.facet_check(expression, bound, cap=args.cap)
    out = report.to_json()
    out["label"] = expression.label
    out["bound"] = rat_to_str(Fraction(bound))
    return out


def _cmd_upb(args) -> dict:
    pvs = _named_set(args.set, args)
    out = {"label": pvs.label, "size": len(pvs), "dims": list(pvs.dims)}
    if args.check in ("indep", "all"):
        out["local_independence"] = upb.check_local_independence(pvs)
    if args.check in ("wupb", "all"):
        out["is_wupb"] = upb.is_wupb(pvs)
    if args.check in ("upb", "all"):
        verdict = upb.is_upb(pvs, cap=args.cap)
        out["is_upb"] = verdict.is_upb
        out["is_wupb"] = verdict.is_wupb
        if verdict.extension_witness is not None:
            out["extension_witness"] = [
                [[float(z.real), float(z.imag)] for z in v]
                for v in verdict.extension_witness
            ]
    if args.emit_bell:
        out["bell"] = upb.bell_from_set(pvs).to_json()
    return out


def _cmd_witness(args) -> dict:
    pvs = _named_set(args.set, args)
    pi = witness.projector_onto_span(pvs)
    verdict = upb.is_upb(pvs, cap=args.cap)
    if verdict.is_upb:
        eps = witness.epsilon_min(pi, starts=args.starts, seed=args.seed, threads=args.threads)
    else:
        eps = witness.epsilon_min_restricted(pi, pvs)
    report = witness.witness_and_state(pvs, eps)
    out = report.to_json()
    out["is_upb"] = verdict.is_upb
    out["is_ppt"] = witness.is_ppt(report.state)
    out["starts"] = args.starts
    return out


def _cmd_membership(args) -> dict:
    box = Box.from_json(_load_json(args.box))
    result = polytope.local_membership(box, cap=args.cap)
    out = {"is_local": result.is_local}
    if result.is_local:
        out["weights"] = [
            {"responses": [list(r) for r in s.responses], "weight": rat_to_str(w)}
            for s, w in result.weights
        ]
    else:
        expr, bound, value = result.separating
        out["separating"] = {
            "expression": expr.to_json(),
            "local_bound": rat_to_str(bound),
            "value_at_box": rat_to_str(value),
        }
    return out


# ---------------------------------------------------------------------------
# parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _build_parser() -> _Parser:
    parser = _Parser(prog="gynibell")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--cap", type=int, default=None)
        p.add_argument("--output", default=None)

    p = sub.add_parser("gyni", help="emit a GYNI game and optionally a bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--promise", default="parity")
    p.add_argument("--bound", choices=["classical", "ns", "tobl"], default=None)
    common(p)

    p = sub.add_parser("bounds", help="optimize an expression over a correlation set")
    p.add_argument("--expr", default=None)
    p.add_argument("--gyni", type=int, default=None)
    p.add_argument("--known", default=None)
    p.add_argument("--promise", default="parity")
    p.add_argument("--form", choices=["weighted", "sum"], default="weighted")
    p.add_argument("--set", choices=["classical", "ns", "tobl"], required=True)
    common(p)

    p = sub.add_parser("tobl", help="time-ordered bilocal maximum")
    p.add_argument("--gyni", type=int, default=None)
    p.add_argument("--expr", default=None)
    common(p)

    p = sub.add_parser("facet", help="tightness (facet) check")
    p.add_argument("--expr", default=None)
    p.add_argument("--gyni", type=int, default=None)
    p.add_argument("--known", default=None)
    p.add_argument("--promise", default="parity")
    p.add_argument("--form", choices=["weighted", "sum"], default="weighted")
    common(p)

    p = sub.add_parser("upb", help="product-set checks and Bell synthesis")
    p.add_argument("set", help="shifts|genshifts|nc|wupb|tiles|<json file>")
    p.add_argument("--check", choices=["upb", "wupb", "indep", "all"], default="all")
    p.add_argument("--emit-bell", action="store_true")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--d", type=int, default=2)
    common(p)

    p = sub.add_parser("witness", help="witness operator and bound-entangled state")
    p.add_argument("--set", default="shifts")
    p.add_argument("--starts", type=int, default=witness.DEFAULT_STARTS)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--d", type=int, default=2)
    common(p)

    p = sub.add_parser("membership", help="local-polytope membership of a box")
    p.add_argument("--box", required=True)
    common(p)

    return parser


_DISPATCH = {
    "gyni": _cmd_gyni,
    "bounds": _cmd_bounds,
    "tobl": _cmd_tobl,
    "facet": _cmd_facet,
    "upb": _cmd_upb,
    "witness": _cmd_witness,
    "membership": _cmd_membership,
}


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return 2
    try:
        payload = _DISPATCH[args.command](args)
    except (ValueError, ZeroDivisionError, FileNotFoundError, RuntimeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    _emit(payload, args)
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
