"""Command-line entry points: run workspace queries, check files, render trees.

Reports are deterministic: byte-identical across runs and across any `--jobs`
setting, because per-world work is merged in enumeration order.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Optional

from .concepts import TreeNode
from .errors import IfolError, ValidationError
from .kernel import ConceptRef, Element, element_lexeme
from .semantics import (
    Countermodel,
    bealer_montague_check,
    consequence,
    montague_intension,
)
from .sorting import check_formula
from .syntax import format_formula, free_vars, ground_instance
from .workspace import (
    BealerMontagueQuery,
    CheckQuery,
    ConceptsQuery,
    ConsequenceQuery,
    EvalQuery,
    IntensionQuery,
    Workspace,
    load_workspace,
)


def _render_tuple(t: tuple[Element, ...]) -> str:
    return "(" + ", ".join(element_lexeme(e) for e in t) + ")"


def _sorted_tuples(rel: Iterable[tuple[Element, ...]]) -> list[tuple[Element, ...]]:
    return sorted(rel, key=lambda t: tuple(element_lexeme(e) for e in t))


def render_countermodel(ws: Workspace, cm: Countermodel) -> list[str]:
    lines = [f"WORLD {cm.world.label}"]
    for pred, concept in ws.registry.by_predicate.items():
        rel = cm.world.relation(concept.name)
        cells = " ".join(_render_tuple(t) for t in _sorted_tuples(rel))
        lines.append(f"  {concept.name}: {cells if cells else '{}'}")
    for var, el in sorted(cm.assignment, key=lambda it: it[0].name):
        lines.append(f"ASSIGN {var.name}={element_lexeme(el)}")
    return lines


def render_concept_tree(ws: Workspace, predicate: str) -> str:
    tree = ws.registry.subconcept_tree(predicate)

    def walk(node: TreeNode, depth: int, out: list[str]) -> None:
        out.append("  " * depth + node.concept.render())
        for child in node.children:
            walk(child, depth + 1, out)

    lines: list[str] = []
    walk(tree, 0, lines)
    return "\n".join(lines)


def run_queries(ws: Workspace, jobs: int = 1) -> tuple[str, int]:
    """Execute every query in order; one report block per query.

    Exit status is 0 iff every check / consequence / bealer-montague query
    succeeds; a failing query never aborts the ones after it.
    """
    blocks: list[str] = []
    ok = True

    def execute(map_fn: Callable) -> None:
        nonlocal ok
        for query in ws.queries:
            try:
                block, passed = _run_query(ws, query, map_fn)
            except IfolError as exc:
                block = [f"ERROR {type(exc).__name__}: {exc}"]
                passed = not isinstance(query, (CheckQuery, ConsequenceQuery,
                                                BealerMontagueQuery))
            blocks.append("\n".join(block))
            ok = ok and passed

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            execute(pool.map)
    else:
        execute(map)
    return "\n\n".join(blocks) + ("\n" if blocks else ""), 0 if ok else 1


def _run_query(ws: Workspace, query, map_fn: Callable) -> tuple[list[str], bool]:
    if isinstance(query, CheckQuery):
        lines = []
        for label, phi in ws.all_formulas():
            for err in check_formula(phi, ws.signature, ws.domain.lattice, ws.domain):
                lines.append(f"SORT-ERR {label} arg{err.position}: "
                             f"found {err.found} required {err.required}")
        if lines:
            return lines, False
        return [f"CHECK ok ({len(ws.all_formulas())} formulas)"], True

    if isinstance(query, ConsequenceQuery):
        holds, cm = consequence(ws.space, ws.axioms, query.formula,
                                worlds=ws.worlds(), map_fn=map_fn)
        if holds:
            return ["CONSEQUENCE yes"], True
        assert cm is not None
        return ["CONSEQUENCE no"] + render_countermodel(ws, cm), False

    if isinstance(query, EvalQuery):
        phi = query.formula
        by_name = {v.name: v for v in free_vars(phi)}
        grounding = {}
        for name, lexeme in query.bindings.items():
            var = by_name[name]
            el = ws.domain.lookup(lexeme)
            assert el is not None
            if not ws.domain.lattice.is_subsort(ws.domain.dynamic_sort(el), var.sort):
                raise IfolError(
                    f"{lexeme!r} has dynamic sort {ws.domain.dynamic_sort(el)!r}, "
                    f"variable {name} wants {var.sort!r}")
            grounding[var] = lexeme
        ground = ground_instance(phi, grounding)
        prop = ws.interp.of_formula(ground)
        arity = prop.concept.arity if isinstance(prop, ConceptRef) else prop.arity
        lines = [f"EVAL {format_formula(phi)}",
                 f"GROUND {format_formula(ground)}",
                 f"PROPOSITION D{arity} {_element_id(prop)}"]
        return lines, True

    if isinstance(query, IntensionQuery):
        worlds = ws.worlds()
        meaning = montague_intension(ws.space, query.formula, worlds, map_fn=map_fn)
        lines = [f"INTENSION {format_formula(query.formula)}"]
        for world in worlds:
            ext = meaning[world.label]
            if isinstance(ext, bool):
                lines.append(f"WORLD {world.label} {'t' if ext else 'f'}")
            else:
                lines.append(f"WORLD {world.label}")
                for t in _sorted_tuples(ext):
                    lines.append(f"  {_render_tuple(t)}")
        return lines, True

    if isinstance(query, ConceptsQuery):
        return [render_concept_tree(ws, query.predicate)], True

    assert isinstance(query, BealerMontagueQuery)
    mismatch = bealer_montague_check(ws.space, query.formula,
                                     worlds=ws.worlds(), map_fn=map_fn)
    if mismatch is None:
        return [f"BEALER-MONTAGUE ok ({len(ws.worlds())} worlds)"], True
    lines = [f"BEALER-MONTAGUE mismatch WORLD {mismatch.world_label}",
             f"  concept-extension: {_render_side(mismatch.concept_side)}",
             f"  intension: {_render_side(mismatch.intension_side)}"]
    return lines, False


def _element_id(el) -> str:
    return getattr(el, "fingerprint", None) or element_lexeme(el)


def _render_side(side) -> str:
    if isinstance(side, bool):
        return "t" if side else "f"
    cells = " ".join(_render_tuple(t) for t in _sorted_tuples(side))
    return cells if cells else "{}"


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="ifol",
                                     description="Many-sorted intensional FOL engine")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="load a workspace and execute its queries")
    run_p.add_argument("file", type=Path)
    run_p.add_argument("--jobs", type=int, default=1,
                       help="worker threads for per-world checks")
    run_p.add_argument("--max-worlds", type=int, default=2 ** 20,
                       help="refuse to enumerate beyond this many candidate worlds")

    check_p = sub.add_parser("check", help="load and validate a workspace only")
    check_p.add_argument("file", type=Path)

    tree_p = sub.add_parser("concepts", help="render a predicate's subconcept tree")
    tree_p.add_argument("file", type=Path)
    tree_p.add_argument("predicate")

    args = parser.parse_args(argv)
    try:
        ws = load_workspace(Path(args.file),
                            max_worlds=getattr(args, "max_worlds", 2 ** 20))
    except ValidationError as exc:
        for diag in exc.diagnostics:
            print(diag, file=sys.stderr)
        return 2
    except (OSError, IfolError) as exc:
        print(exc, file=sys.stderr)
        return 2

    if args.command == "check":
        print(f"ok: {len(ws.all_formulas())} formulas, "
              f"{len(ws.registry.by_predicate)} concepts")
        return 0
    if args.command == "concepts":
        try:
            print(render_concept_tree(ws, args.predicate))
        except IfolError as exc:
            print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
            return 1
        return 0

    report, status = run_queries(ws, jobs=args.jobs)
    sys.stdout.write(report)
    return status


if __name__ == "__main__":
    sys.exit(main())
