"""Command-line front end: ``schreierlab {family,norm,index} <action> [options]``.

Output is compact JSON on stdout (or ``--out``). Exit codes: 0 success,
1 property violation, 2 parse error, 3 resource cap, 4 failed precondition.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from datetime import datetime, timezone
from fractions import Fraction
from itertools import product
from pathlib import Path

from . import __version__
from . import families as fam
from . import indices as idx
from . import norms
from . import trees
from .ordinal import OrdinalError, parse, render

EXIT_OK, EXIT_VIOLATION, EXIT_PARSE, EXIT_RESOURCE, EXIT_PRECONDITION = 0, 1, 2, 3, 4


class ParseError(ValueError):
    pass


class Violation(Exception):
    """Carries a report whose property check failed; printed, then exit 1."""

    def __init__(self, payload):
        super().__init__("property violation")
        self.payload = payload


# --- argument helpers -----------------------------------------------------------------

def _spec(text):
    try:
        return fam.parse_family(text)
    except (fam.FamilyError, OrdinalError) as e:
        raise ParseError(str(e)) from e


def _finset(text):
    try:
        data = json.loads(text)
        if not isinstance(data, list) or not all(isinstance(v, int) for v in data):
            raise ValueError("expected a JSON list of integers")
        return fam.finset(data)
    except (ValueError, fam.FamilyError) as e:
        raise ParseError(f"bad set {text!r}: {e}") from e


def _ordinal(text):
    try:
        return parse(str(text))
    except OrdinalError as e:
        raise ParseError(str(e)) from e


def _rational(text):
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as e:
        raise ParseError(f"bad rational {text!r}") from e


def _vector(args):
    text = args.vec
    if args.vec_file:
        text = ",".join(line.strip() for line in Path(args.vec_file).read_text().splitlines() if line.strip())
    if text is None:
        raise ParseError("give --vec or --vec-file")
    try:
        return norms.parse_vec(text)
    except norms.NormError as e:
        raise ParseError(str(e)) from e


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, ValueError) as e:
        raise ParseError(f"cannot read {path}: {e}") from e


# --- family --------------------------------------------------------------------------------

def cmd_family(args):
    spec = _spec(args.spec)
    if args.action == "member":
        return fam.member(spec, _finset(args.set))
    if args.action == "rank":
        return {"rank": render(fam.cb_rank(spec, _finset(args.set)))}
    if args.action == "derivative":
        F, rho = _finset(args.set), _ordinal(args.rho)
        out = {"in_derivative": fam.in_derivative(spec, F, rho)}
        if args.brute:
            if not rho.is_finite():
                raise ParseError("--brute needs a finite --rho")
            out["brute"] = fam.brute_derivative_member(spec, F, int(rho), args.window)
            if out["brute"] != out["in_derivative"]:
                raise Violation(out)
        return out
    if args.action == "restrict":
        members = fam.restrict(spec, args.n, cap=args.cap).members_sorted
        return {"count": len(members), "members": [list(F) for F in members]}
    if args.action == "check":
        explicit = spec if isinstance(spec, fam.Explicit) else fam.restrict(spec, args.n, cap=args.cap)
        out = {
            "adequate": fam.is_adequate(explicit),
            "spreading": fam.is_spreading(spec, args.n, cap=args.cap),
        }
        if not all(out.values()):
            raise Violation(out)
        return out
    raise ParseError(f"unknown action {args.action}")


# --- norm -------------------------------------------------------------------------------------

def _bench(args):
    rng = random.Random(args.seed)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["support", "engine", "seconds", "value"])
    for n in range(args.step, args.max_support + 1, args.step):
        x = {i: Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 3)) for i in range(1, n + 1)}
        for engine in ("naive", "memoized"):
            start = time.perf_counter()
            try:
                value = str(norms.tsirelson_norm(args.alpha, x, engine).value)
            except fam.ResourceCapExceeded:
                value = "skipped"
            w.writerow([n, engine, f"{time.perf_counter() - start:.4f}", value])
    return buf.getvalue()


def _certify(args):
    if args.cube is not None:
        pts = list(product((0, 1), repeat=args.cube))
        functions = [{p: p[i] for p in pts} for i in range(args.cube)]
    elif args.functions:
        data = _read_json(args.functions)
        try:
            functions = [{i: Fraction(str(v)) for i, v in enumerate(row)} for row in data["functions"]]
        except (KeyError, TypeError, ValueError) as e:
            raise ParseError(f"bad function file: {e}") from e
    else:
        raise ParseError("give --cube or --functions")
    try:
        rep = norms.boolean_l1_certify(functions, _rational(args.r), _rational(args.delta), trials=args.trials, seed=args.seed)
    except norms.HypothesisFailed as e:
        raise Violation({"certified": False, "dead_pattern": list(e.pattern)}) from e
    out = {
        "certified": rep["certified"],
        "constant": str(rep["constant"]),
        "lower_ratio": str(rep["lower_ratio"]),
        "worst_ratio": None if rep["worst_ratio"] is None else str(rep["worst_ratio"]),
        "vectors": rep["vectors"],
    }
    if not rep["certified"]:
        raise Violation(out)
    return out


def cmd_norm(args):
    if args.action == "family":
        r = norms.family_norm(_spec(args.spec), _vector(args), method=args.method)
        return {"value": str(r.value), "witness": list(r.witness or ())}
    if args.action == "tsirelson":
        r = norms.tsirelson_norm(_ordinal(args.alpha), _vector(args), args.engine, args.final_endpoint)
        out = {"value": str(r.value)}
        if r.witness is not None:
            js = r.to_json()
            out["iterations"] = js["iterations"]
            out["witness"] = js["witness"]
        return out
    if args.action == "bench":
        return _bench(args)
    if args.action == "certify-l1":
        return _certify(args)
    raise ParseError(f"unknown action {args.action}")


# --- index --------------------------------------------------------------------------------------

def _tree_index(args):
    if args.delta:
        if not args.spec:
            raise ParseError("--delta needs --spec")
        try:
            t = trees.parse_tree(args.spec)
        except (trees.TreeError, fam.FamilyError, OrdinalError) as e:
            raise ParseError(str(e)) from e
        return {"order": render(trees.delta_order(t))}
    if args.wf:
        data = _read_json(args.wf)
        t = trees.WellFoundedTree(frozenset(tuple(n) for n in data))
        return {"order": render(trees.wf_order(t))}
    if args.boolean:
        data = _read_json(args.boolean)
        pairs = [(frozenset(map(str, A)), frozenset(map(str, B))) for A, B in data]
        t = trees.boolean_tree(pairs, depth_cap=args.depth_cap)
        return {"index": render(trees.wf_order(t)), "truncated": t.truncated, "nodes": len(t.nodes)}
    raise ParseError("give one of --delta, --wf, --boolean")


def cmd_index(args):
    if args.action == "tree":
        return _tree_index(args)
    if args.action == "lavrentiev":
        try:
            f = idx.parse_stepfn(Path(args.fn).read_text())
        except OSError as e:
            raise ParseError(f"cannot read {args.fn}: {e}") from e
        c, d = _rational(args.c), _rational(args.d)
        if not c < d:
            raise norms.PreconditionError("need c < d")
        return idx.lavrentiev_index(f, c, d).to_json()
    seq = idx.IndicatorSeq(_spec(args.spec))
    if args.action == "oscillation":
        if args.level is None:
            return {"index": render(idx.oscillation_index(seq))}
        F = _finset(args.set)
        got = idx.oscillation_membership(seq, F, _ordinal(args.level), _rational(args.epsilon), mode=args.mode)
        return {"member": got}
    if args.action == "l1tree":
        return idx.build_l1_tree(seq, args.order, _rational(args.epsilon)).to_json()
    if args.action == "consistency":
        rep = idx.index_consistency_report(seq, args.level or 3, args.window)
        if not rep["ok"]:
            raise Violation(rep)
        return rep
    raise ParseError(f"unknown action {args.action}")


# --- parser -------------------------------------------------------------------------------------

def _common():
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", help="write output here instead of stdout")
    p.add_argument("--no-meta", action="store_true", help="omit version and timestamp")
    p.add_argument("--config", help="key=value file; explicit flags win")
    return p


def build_parser():
    common = _common()
    parser = argparse.ArgumentParser(prog="schreierlab", description="Schreier families, ordinal indices and exact norms.")
    parser.add_argument("--version", action="version", version=__version__)
    groups = parser.add_subparsers(dest="command", required=True)
    leaves = []

    def leaf(group, name, help_text):
        p = group.add_parser(name, parents=[common], help=help_text)
        leaves.append(p)
        return p

    fam_p = groups.add_parser("family", help="membership, ranks and derivatives of families")
    fam_sub = fam_p.add_subparsers(dest="action", required=True)
    for name in ("member", "rank", "derivative", "restrict", "check"):
        p = leaf(fam_sub, name, f"family {name}")
        p.add_argument("--spec", required=True, help='e.g. "schreier(2)", "singletons", "explicit([[],[1]])"')
        if name in ("member", "rank", "derivative"):
            p.add_argument("--set", default="[]", help="JSON list, e.g. [3,5,9]")
        if name == "derivative":
            p.add_argument("--rho", required=True)
            p.add_argument("--brute", action="store_true", help="also run the window-probing check")
            p.add_argument("--window", type=int, default=20)
        if name in ("restrict", "check"):
            p.add_argument("--n", type=int, default=8, help="ground set [1..n]")
            p.add_argument("--cap", type=int, default=fam.DEFAULT_MEMBER_CAP)

    norm_p = groups.add_parser("norm", help="family norms, Tsirelson-type norms, l1 certificates")
    norm_sub = norm_p.add_subparsers(dest="action", required=True)
    p = leaf(norm_sub, "family", "norm from an adequate family")
    p.add_argument("--spec", required=True)
    p.add_argument("--method", choices=["auto", "fast", "enumerate"], default="auto")
    p = leaf(norm_sub, "tsirelson", "Tsirelson-type norm")
    p.add_argument("--alpha", default="0")
    p.add_argument("--engine", choices=["naive", "memoized"], default="memoized")
    p.add_argument("--final-endpoint", choices=["support", "free"], default="support")
    for p in leaves[-2:]:
        p.add_argument("--vec", help='e.g. "3:1,4:-2/3"')
        p.add_argument("--vec-file")
    p = leaf(norm_sub, "bench", "CSV of engine timings over growing supports")
    p.add_argument("--alpha", default="0")
    p.add_argument("--max-support", type=int, default=12)
    p.add_argument("--step", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p = leaf(norm_sub, "certify-l1", "l1 lower bound from Boolean independence")
    p.add_argument("--cube", type=int, help="coordinate indicators on {0,1}^m")
    p.add_argument("--functions", help='JSON file {"functions": [[v_1, v_2, ...], ...]}')
    p.add_argument("--r", default="0")
    p.add_argument("--delta", default="1")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    idx_p = groups.add_parser("index", help="oscillation, Lavrentiev, l1 trees, tree orders")
    idx_sub = idx_p.add_subparsers(dest="action", required=True)
    p = leaf(idx_sub, "oscillation", "oscillation index or membership")
    p.add_argument("--spec", required=True)
    p.add_argument("--set", default="[]")
    p.add_argument("--level", help="decide membership at this level instead of computing the index")
    p.add_argument("--epsilon", default="1/2")
    p.add_argument("--mode", choices=["symbolic", "direct"], default="symbolic")
    p = leaf(idx_sub, "lavrentiev", "Lavrentiev index of a step function")
    p.add_argument("--fn", required=True, help="step function file, lines like [a,b) -> p/q")
    p.add_argument("--c", required=True)
    p.add_argument("--d", required=True)
    p = leaf(idx_sub, "l1tree", "finite-order l1 tree with certificates")
    p.add_argument("--spec", required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--epsilon", default="1/2")
    p = leaf(idx_sub, "consistency", "cross-index consistency report")
    p.add_argument("--spec", required=True)
    p.add_argument("--level", type=int, default=3)
    p.add_argument("--window", type=int, default=20)
    p = leaf(idx_sub, "tree", "delta order, well-founded order or Boolean index")
    p.add_argument("--delta", action="store_true")
    p.add_argument("--spec", help='tree spec, e.g. "L(schreier(1),2)"')
    p.add_argument("--wf", help="JSON file: list of nodes (lists)")
    p.add_argument("--boolean", help="JSON file: list of [A, B] pairs")
    p.add_argument("--depth-cap", type=int, default=8)
    return parser, leaves


def _apply_config(path, leaves):
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as e:
        raise ParseError(f"cannot read config {path}: {e}") from e
    cfg = {}
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, eq, value = line.partition("=")
        if not eq:
            raise ParseError(f"bad config line {raw!r}")
        cfg[key.strip().replace("-", "_")] = value.strip()
    for p in leaves:
        known = {a.dest: a for a in p._actions}
        defaults = {}
        for key, value in cfg.items():
            action = known.get(key)
            if action is None:
                continue
            action.required = False
            if isinstance(action, argparse._StoreTrueAction):
                defaults[key] = value.lower() in ("1", "true", "yes")
            else:
                defaults[key] = action.type(value) if action.type else value
        p.set_defaults(**defaults)


def _render(result, args, command):
    if isinstance(result, str):
        return result
    if isinstance(result, dict) and not args.no_meta:
        result = dict(result)
        result["meta"] = {
            "version": __version__,
            "command": command,
            "generated": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        }
    return json.dumps(result, separators=(",", ":"), ensure_ascii=False) + "\n"


def _emit(text, args):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser, leaves = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            _apply_config(known.config, leaves)
    except (ParseError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_PARSE if e.code else EXIT_OK
    handler = {"family": cmd_family, "norm": cmd_norm, "index": cmd_index}[args.command]
    command = f"{args.command} {args.action}"
    try:
        result = handler(args)
        code = EXIT_OK
    except Violation as v:
        result, code = v.payload, EXIT_VIOLATION
    except fam.ResourceCapExceeded as e:
        print(f"error: resource cap: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except (norms.PreconditionError, fam.NotAMember, trees.UnsupportedTree) as e:
        print(f"error: precondition: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    except (ParseError, OrdinalError, fam.FamilyError, trees.TreeError, norms.NormError, idx.IndexError_) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    _emit(_render(result, args, command), args)
    return code


if __name__ == "__main__":
    sys.exit(main())
