"""Command-line surface for batch use.

Structure references are either ``builtin:<name>`` or paths to JSON
structure files.  Output ordering is deterministic (alphabet order,
length-lexicographic) so the commands are safe to golden-test.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import instances  # noqa: F401  (populates the oracle registry)
from .constructions import ExtensionData, GraphSpec, IndexData, extension, finite_index, graph_product
from .fsa import Fsa, SyncAcceptor
from .instances import builtin, builtin_names
from .stacking import StackingStructure, check_psi_monotonicity
from .words import format_word, parse_word


def load_structure(ref: str) -> StackingStructure:
    if ref.startswith("builtin:"):
        return builtin(ref.split(":", 1)[1])
    with open(ref) as fh:
        return StackingStructure.from_doc(json.load(fh))


def _save_json(path: str, doc: dict):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _load_recipe_structure(ref, base_dir: str = "."):
    if isinstance(ref, dict):
        return StackingStructure.from_doc(ref)
    return load_structure(ref)


def cmd_normalize(args) -> int:
    structure = load_structure(args.structure)
    word = parse_word(args.word)
    result = structure.normalize(word, budget=args.budget)
    if args.json:
        print(json.dumps({"input": args.word, "normal_form": format_word(result)}))
    else:
        print(format_word(result))
    return 0


def cmd_verify(args) -> int:
    structure = load_structure(args.structure)
    report = structure.verify(
        args.radius, budget=args.budget, samples=args.random_words,
        max_len=args.max_len, seed=args.seed)
    ok = report.passed
    if structure.psi is not None:
        mono = check_psi_monotonicity(structure, min(args.radius, 3))
        ok = ok and mono.ok
    if args.json:
        doc = report.to_doc()
        if structure.psi is not None:
            doc["psi_monotonic"] = mono.ok
            doc["psi_checked"] = mono.checked
            doc["psi_violations"] = mono.violations[:10]
        print(json.dumps(doc, indent=1))
    else:
        print(report.summary())
        if structure.psi is not None:
            tag = "PASS" if mono.ok else "FAIL"
            print(f"[{tag}] certificate monotonicity: {mono.checked} comparisons,"
                  f" {mono.indeterminate} indeterminate")
            for v in mono.violations[:5]:
                print(f"       witness: {v}")
    return 0 if ok else 1


def cmd_ball(args) -> int:
    structure = load_structure(args.structure)
    ball = structure.ball(args.radius, budget=args.budget)
    if args.json:
        print(json.dumps([format_word(w) for w in ball]))
    else:
        for w in ball:
            print(format_word(w))
    return 0


def cmd_rules(args) -> int:
    structure = load_structure(args.structure)
    rules = structure.to_prefix_rules(args.radius, budget=args.budget)
    shown = [r for r in rules if not r.tree]
    if args.json:
        print(json.dumps([
            {
                "lhs": format_word(r.lhs),
                "rhs": format_word(r.rhs),
                "display": format_word(r.reduced_rhs),
            }
            for r in shown
        ], indent=1))
    else:
        for r in shown:
            print(r.display())
    return 0


def _recipe_graph_product(doc) -> StackingStructure:
    graph = doc["graph"]
    spec = GraphSpec(graph["n"], {tuple(e) for e in graph["edges"]})
    vertices = [_load_recipe_structure(ref) for ref in doc["vertices"]]
    return graph_product(spec, vertices)


def _recipe_extension(doc) -> StackingStructure:
    K = _load_recipe_structure(doc["K"])
    Q = _load_recipe_structure(doc["Q"])
    conj = {(e["letter"], e["base"]): parse_word(e["word"]) for e in doc["conj"]}
    corr = {(e["letter"], parse_word(e["output"])): parse_word(e["word"])
            for e in doc["corr"]}
    hat = doc.get("hat") or None
    images = {parse_word(e["relator"]): parse_word(e["word"])
              for e in doc.get("q_relator_images", [])}
    return extension(ExtensionData(K, Q, conj, corr, hat=hat, q_relator_images=images))


def _recipe_finite_index(doc) -> StackingStructure:
    H = _load_recipe_structure(doc["H"])
    table1 = {e["letter"]: (parse_word(e["word"]), e.get("t", ""))
              for e in doc["table1"]}
    table2 = {(e["letter"], e["other"]): (parse_word(e["word"]), e.get("t", ""))
              for e in doc["table2"]}
    return finite_index(IndexData(
        H, tuple(doc["S"]), table1, table2,
        self_inverse=tuple(doc.get("self_inverse", ()))))


_RECIPES = {
    "graph_product": _recipe_graph_product,
    "extension": _recipe_extension,
    "finite_index": _recipe_finite_index,
}


def _cmd_recipe(kind: str):
    def run(args) -> int:
        with open(args.recipe) as fh:
            doc = json.load(fh)
        if doc.get("kind") != kind:
            raise ValueError(f"recipe kind {doc.get('kind')!r} does not match {kind!r}")
        structure = _RECIPES[kind](doc)
        _save_json(args.output, structure.to_doc())
        print(f"wrote {args.output}")
        return 0

    return run


def cmd_export_fsa(args) -> int:
    structure = load_structure(args.structure)
    fsa = structure.normal_forms
    if args.dot:
        with open(args.output, "w") as fh:
            fh.write(fsa.to_dot("normal_forms"))
            fh.write("\n")
    else:
        _save_json(args.output, fsa.to_doc())
    print(f"wrote {args.output}")
    return 0


def cmd_graph_automaton(args) -> int:
    structure = load_structure(args.structure)
    sync = structure.graph_automaton()
    if args.dot:
        with open(args.output, "w") as fh:
            fh.write(sync.fsa.to_dot("stacking_graph"))
            fh.write("\n")
    else:
        _save_json(args.output, sync.to_doc())
    print(f"wrote {args.output}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="autostack",
        description="Flow-function word problem solver and verifier. "
                    f"Builtin structures: {', '.join(builtin_names())}.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, radius_default=3):
        p.add_argument("structure", help="builtin:<name> or a structure file path")
        p.add_argument("--radius", type=int, default=radius_default)
        p.add_argument("--budget", type=int, default=None)
        p.add_argument("--json", action="store_true")

    p = sub.add_parser("normalize", help="rewrite a word to its normal form")
    p.add_argument("structure")
    p.add_argument("word")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("verify", help="check the flow-function axioms on a ball")
    add_common(p)
    p.add_argument("--random-words", type=int, default=0,
                   help="extra random oracle cross-checks")
    p.add_argument("--max-len", type=int, default=12)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("ball", help="normal forms within a word-metric radius")
    add_common(p, radius_default=2)
    p.set_defaults(fn=cmd_ball)

    p = sub.add_parser("rules", help="prefix-rewriting rules on a ball")
    add_common(p, radius_default=2)
    p.set_defaults(fn=cmd_rules)

    for kind, verb in (("graph_product", "product"), ("extension", "extend"),
                       ("finite_index", "index")):
        p = sub.add_parser(verb, help=f"build a {kind.replace('_', ' ')} from a recipe")
        p.add_argument("recipe", help="recipe JSON path")
        p.add_argument("-o", "--output", required=True)
        p.set_defaults(fn=_cmd_recipe(kind))

    p = sub.add_parser("export-fsa", help="write the normal-form acceptor")
    p.add_argument("structure")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--dot", action="store_true")
    p.set_defaults(fn=cmd_export_fsa)

    p = sub.add_parser("graph-automaton", help="write the stacking-map graph acceptor")
    p.add_argument("structure")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--dot", action="store_true")
    p.set_defaults(fn=cmd_graph_automaton)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.fn(args)
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
