"""Command-line front end.

Exit codes: 0 computed, 1 input or validation error, 2 search budget
exhausted (bounds only).  Reports are JSON by default; machine fields hold
rationals as strings and display decimals are labelled as such.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import formats
from .equivalence import exists_isometry, same_branching, same_branching_oracle
from .formats import FormatError
from .generators import (
    gen_example41, gen_random_tree, gen_random_ultrametric, gen_regular, gen_shape_twin,
)
from .rationals import format_rational, parse_rational
from .search import KappaResult, exact_kappa, kappa_upper_heuristic
from .suites import run_suite, SUITES
from .trees import TreeError, dendrogram_from_ultrametric, end_space, lemma_lower_bound
from .ultrametric import InvalidSpaceError, UNBOUNDED, pseudo_discreteness_gap, validate

FORMAT_VERSION = 1


class UsageError(Exception):
    pass


def _input(path: str) -> dict:
    data = Path(path).read_bytes()
    return {"path": path, "sha256": hashlib.sha256(data).hexdigest()}


def _checked_space(path: str):
    space = formats.load_space(path)
    verdict = validate(space)
    if not verdict.ok:
        raise InvalidSpaceError(verdict)
    return space


def _emit(report: dict, args) -> None:
    if args.format == "text":
        lines = [f"{report['command']}:"]
        for key, value in report["result"].items():
            if isinstance(value, (dict, list)):
                value = json.dumps(value)
            lines.append(f"  {key}: {value}")
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _report(command: str, inputs, config: dict, result: dict) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "command": command,
        "inputs": inputs,
        "config": config,
        "result": result,
    }


# -- commands ----------------------------------------------------------------

def cmd_validate(args):
    space = formats.load_space(args.path)
    verdict = validate(space)
    result = {"valid": verdict.ok, "verdict": verdict.kind, "where": list(verdict.where),
              "points": len(space)}
    return _report("validate", [_input(args.path)], {}, result), 0 if verdict.ok else 1


def cmd_rho(args):
    U, V = _checked_space(args.a), _checked_space(args.b)
    config = {"mode": "bound" if args.bound else "exact", "budget": args.budget,
              "time_limit": args.time_limit, "jobs": args.jobs}
    if args.bound:
        if len(U) != len(V):
            r = KappaResult(None, None, None, None, complete=True)
        else:
            up, cert = kappa_upper_heuristic(U, V)
            r = KappaResult(None, cert, Fraction(0), up, complete=False)
        code = 0
    else:
        r = exact_kappa(U, V, max_nodes=args.budget, time_limit=args.time_limit, jobs=args.jobs)
        code = 0 if r.complete else 2
    result = r.to_dict()
    if args.jobs > 1:
        result.pop("node_count")
    if isinstance(result.get("rho"), str) and result["rho"] != "INFINITE":
        result["rho_display"] = result.pop("rho")
    return _report("rho", [_input(args.a), _input(args.b)], config, result), code


def cmd_branching(args):
    U, V = _checked_space(args.a), _checked_space(args.b)
    result = {"same_branching": same_branching(U, V)}
    if args.oracle:
        result["oracle"] = same_branching_oracle(U, V, cap=args.cap)
    return _report("branching", [_input(args.a), _input(args.b)], {"oracle": args.oracle}, result), 0


def cmd_isometry(args):
    U, V = _checked_space(args.a), _checked_space(args.b)
    witness = exists_isometry(U, V)
    result = {"isometric": witness is not None, "witness": witness}
    return _report("isometry", [_input(args.a), _input(args.b)], {}, result), 0


def cmd_delta(args):
    space = _checked_space(args.path)
    g = pseudo_discreteness_gap(space)
    if g == UNBOUNDED:
        result = {"gap": "UNBOUNDED", "delta_display": "UNBOUNDED"}
    else:
        import math

        result = {"gap": format_rational(g), "delta_display": f"{math.exp(g):.12g}"}
    return _report("delta", [_input(args.path)], {}, result), 0


def cmd_bound(args):
    T, T2 = formats.load_tree(args.a), formats.load_tree(args.b)
    b = lemma_lower_bound(T, T2)
    result = {
        "kappa_lower_bound": b.value,
        "vertex": b.vertex,
        "tree": b.side,
        "no_qualifying_k": b.vertex is None,
    }
    return _report("bound", [_input(args.a), _input(args.b)], {}, result), 0


def _gen_recipe(args) -> dict:
    if args.manifest:
        recipe = json.loads(Path(args.manifest).read_text())
        if not isinstance(recipe, dict) or "kind" not in recipe:
            raise UsageError("manifest must be an object with a 'kind'")
        return recipe
    recipe = {k: v for k, v in vars(args).items()
            if k in ("kind", "N", "arity", "depth", "seed", "min_children",
                     "max_children", "n", "heights", "input", "map") and v is not None}
    return recipe


def cmd_gen(args):
    recipe = _gen_recipe(args)
    kind = recipe["kind"]
    seed = int(recipe.get("seed", os.environ.get("DENDRO_SEED", 0)))
    outputs = {}
    if kind == "example41":
        U, V = gen_example41(int(recipe.get("N", 1)))
        outputs = {"U.json": formats.space_to_json(U), "U_prime.json": formats.space_to_json(V)}
    elif kind == "regular":
        t = gen_regular(int(recipe.get("arity", 2)), int(recipe.get("depth", 2)))
        outputs = {"tree.nwk": formats.tree_to_newick(t)}
    elif kind == "random_tree":
        t = gen_random_tree(seed, int(recipe.get("depth", 3)), int(recipe.get("min_children", 2)),
                            int(recipe.get("max_children", 3)))
        outputs = {"tree.nwk": formats.tree_to_newick(t)}
    elif kind == "random_ultrametric":
        heights = recipe.get("heights", "0,1,2")
        if isinstance(heights, str):
            heights = heights.split(",")
        s = gen_random_ultrametric(seed, int(recipe.get("n", 6)), [parse_rational(h) for h in heights])
        outputs = {"space.json": formats.space_to_json(s)}
    elif kind == "shape_twin":
        if "input" not in recipe or "map" not in recipe:
            raise UsageError("shape_twin needs --input and --map")
        space = _checked_space(recipe["input"])
        hm = recipe["map"]
        if isinstance(hm, str):
            hm = dict(item.split(":") for item in hm.split(","))
        outputs = {"twin.json": formats.space_to_json(gen_shape_twin(space, hm))}
    else:
        raise UsageError(f"unknown generator kind {kind!r}")
    recipe = {**recipe, "seed": seed}
    files = []
    if args.dir:
        d = Path(args.dir)
        d.mkdir(parents=True, exist_ok=True)
        for name, text in outputs.items():
            (d / name).write_text(text)
            files.append(str(d / name))
        result = {"files": files}
    else:
        result = {"documents": outputs}
    return _report("gen", [], recipe, result), 0


def cmd_tree2um(args):
    tree = formats.load_tree(args.path)
    text = formats.space_to_json(end_space(tree))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return None, 0


def cmd_um2tree(args):
    space = _checked_space(args.path)
    tree = dendrogram_from_ultrametric(space)
    text = formats.tree_to_json(tree) if args.tree_format == "json" else formats.tree_to_newick(tree)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return None, 0


def cmd_suite(args):
    seed = args.seed if args.seed is not None else int(os.environ.get("DENDRO_SEED", 0))
    res = run_suite(args.name, seed=seed, trials=args.trials)
    report = _report("suite", [], {"name": args.name, "seed": seed, "trials": args.trials}, res.to_dict())
    return report, 0 if res.passed else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dendrorho", description=__doc__.splitlines()[0])
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--out", help="write the report here instead of stdout")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check an ultrametric space or tree file")
    s.add_argument("path")
    s.set_defaults(func=cmd_validate)

    s = sub.add_parser("rho", help="optimal distortion exponent and rho")
    s.add_argument("a")
    s.add_argument("b")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", default=True)
    mode.add_argument("--bound", action="store_true", help="heuristic bracket only")
    s.add_argument("--budget", type=int, default=None, help="maximum search nodes")
    s.add_argument("--time-limit", type=float, default=None, help="seconds (non-deterministic)")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_rho)

    s = sub.add_parser("branching", help="decide branching equivalence")
    s.add_argument("a")
    s.add_argument("b")
    s.add_argument("--oracle", action="store_true", help="also run exhaustive search")
    s.add_argument("--cap", type=int, default=8)
    s.set_defaults(func=cmd_branching)

    s = sub.add_parser("isometry", help="decide isometry, with a witness")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_isometry)

    s = sub.add_parser("delta", help="pseudo-discreteness gap")
    s.add_argument("path")
    s.set_defaults(func=cmd_delta)

    s = sub.add_parser("bound", help="lower bound from vertex orders of two trees")
    s.add_argument("a")
    s.add_argument("b")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("gen", help="generate spaces or trees")
    s.add_argument("kind", nargs="?", choices=(
        "example41", "regular", "random_tree", "random_ultrametric", "shape_twin"))
    s.add_argument("--manifest", help="JSON generator recipe instead of flags")
    s.add_argument("--N", type=int)
    s.add_argument("--arity", type=int)
    s.add_argument("--depth", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--min-children", dest="min_children", type=int)
    s.add_argument("--max-children", dest="max_children", type=int)
    s.add_argument("--n", type=int)
    s.add_argument("--heights", help="comma-separated rationals")
    s.add_argument("--input", help="space to twin")
    s.add_argument("--map", help="height map, e.g. 1:3/2,2:5/2")
    s.add_argument("--dir", help="write generated files into this directory")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("tree2um", help="end space of a tree")
    s.add_argument("path")
    s.set_defaults(func=cmd_tree2um)

    s = sub.add_parser("um2tree", help="canonical dendrogram of a space")
    s.add_argument("path")
    s.add_argument("--tree-format", choices=("newick", "json"), default="newick")
    s.set_defaults(func=cmd_um2tree)

    s = sub.add_parser("suite", help="run an acceptance suite")
    s.add_argument("name", choices=sorted(SUITES))
    s.add_argument("--seed", type=int, default=None)
    s.add_argument("--trials", type=int, default=None)
    s.set_defaults(func=cmd_suite)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gen" and not args.kind and not args.manifest:
        parser.error("gen needs a kind or --manifest")
    try:
        report, code = args.func(args)
    except (FormatError, InvalidSpaceError, TreeError, UsageError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if report is not None:
        _emit(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
