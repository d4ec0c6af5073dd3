"""Workspace files: the declaration unit the CLI loads and runs.

One declaration per line, `#` comments.  Loading is atomic: every diagnostic is
collected and the whole file is rejected on any failure.  Declarations are
order-independent; the loader canonicalizes by kind and name, so permutations
of independent lines build identical workspaces.

    sort <name> [: <attribute-sort>] [isa <name>]
    isa <sub> <super>
    concept <phrase> arity <k> sorts <s1> ... <sk> predicate <p>
    particular <lexeme> : <sort>
    extent <sort> = { <lexeme>, ... }
    function <f>/<k> : <s1> x ... x <sk> -> <s>
    builtin function <f>/<k> : <s1> x ... x <sk> -> <s> = <evaluator>
    builtin predicate <p>/<k> : <s1> x ... x <sk> = <evaluator>
    axiom <formula>
    query check | consequence <f> | eval <f> with x=<lexeme>,... | intension <f>
          | concepts <p> | bealer-montague <f>
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from . import builtins as builtin_defs
from .concepts import ConceptRegistry, Interpretation
from .errors import IfolError, ParseError, ValidationError
from .kernel import (
    Domain,
    NESTED_SENTENCE_SORT,
    RESERVED_SORTS,
    SortId,
    TRUTH_VALUES_SORT,
    VERB_FORMS,
    VERB_FORM_SORT,
)
from .parser import SORT_ALIASES, parse_formula, resolve_sort_token
from .semantics import Structure, World, enumerate_worlds
from .sorting import Signature, check_formula
from .syntax import Formula, format_formula, free_vars


@dataclass
class CheckQuery:
    pass


@dataclass
class ConsequenceQuery:
    formula: Formula


@dataclass
class EvalQuery:
    formula: Formula
    bindings: dict[str, str]


@dataclass
class IntensionQuery:
    formula: Formula


@dataclass
class ConceptsQuery:
    predicate: str


@dataclass
class BealerMontagueQuery:
    formula: Formula


Query = Union[CheckQuery, ConsequenceQuery, EvalQuery, IntensionQuery,
              ConceptsQuery, BealerMontagueQuery]


class Workspace:
    """Sorts, signatures, finite extents, axioms and queries -- and the derived
    structure the semantic layer evaluates over."""

    def __init__(self, max_worlds: int = 2 ** 20):
        self.domain = Domain()
        self.signature = Signature()
        self.registry = ConceptRegistry(self.domain, self.signature)
        self.interp = Interpretation(self.domain, self.registry)
        self.space = Structure(self.domain, self.signature, self.registry, self.interp)
        self.axioms: list[Formula] = []
        self.queries: list[Query] = []
        self.max_worlds = max_worlds
        self._worlds: Optional[list[World]] = None
        self._worlds_error: Optional[IfolError] = None

    # --- declaration helpers ------------------------------------------------

    def declare_sort(self, name: str, attribute: Optional[SortId] = None) -> None:
        self.domain.declare_sort(name, 1, (attribute or name,))

    def declare_isa(self, sub: SortId, sup: SortId) -> None:
        self.domain.declare_isa(sub, sup)

    def register_concept(self, phrase: str, sorts: Sequence[SortId], predicate: str) -> None:
        self.signature.declare_predicate(predicate, tuple(sorts), self.domain.lattice)
        self.registry.register_predicate_concept(predicate, phrase, tuple(sorts))

    def has_sort(self, name: str) -> bool:
        return name in self.domain.lattice

    def is_constant(self, lexeme: str) -> bool:
        return self.domain.lookup(lexeme) is not None

    def parse(self, text: str, line: int = 0) -> Formula:
        return parse_formula(text, self.has_sort, self.is_constant, line)

    def add_axiom(self, phi: Formula) -> None:
        self.axioms.append(phi)
        self._worlds = None

    def worlds(self) -> list[World]:
        if self._worlds_error is not None:
            raise self._worlds_error
        if self._worlds is None:
            try:
                self._worlds = enumerate_worlds(self.space, self.max_worlds)
            except IfolError as exc:
                self._worlds_error = exc
                raise
        return self._worlds

    def all_formulas(self) -> list[tuple[str, Formula]]:
        out = [(f"axiom{i + 1}", phi) for i, phi in enumerate(self.axioms)]
        for i, q in enumerate(self.queries):
            phi = getattr(q, "formula", None)
            if phi is not None:
                out.append((f"query{i + 1}", phi))
        return out


# --- loader ---------------------------------------------------------------------

@dataclass
class _Line:
    number: int
    kind: str
    text: str


def _classify(number: int, text: str) -> _Line:
    head = text.split(None, 1)[0]
    if head == "builtin":
        rest = text.split(None, 2)
        if len(rest) >= 2 and rest[1] in ("function", "predicate"):
            return _Line(number, f"builtin-{rest[1]}", text)
        raise ParseError("expected 'builtin function' or 'builtin predicate'", line=number)
    if head in ("sort", "isa", "concept", "particular", "extent", "function",
                "axiom", "query"):
        return _Line(number, head, text)
    raise ParseError(f"unknown declaration {head!r}", line=number)


def load_workspace(source: Union[str, Path], max_worlds: int = 2 ** 20) -> Workspace:
    """Parse and validate a workspace; raises ValidationError with every
    line-numbered diagnostic on any failure.

    A Path is read from disk; a plain string is taken as the file content.
    """
    if isinstance(source, Path):
        text = source.read_text(encoding="utf-8")
    else:
        text = source
    lines: list[_Line] = []
    diagnostics: list[str] = []
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if not stripped:
            continue
        try:
            lines.append(_classify(number, stripped))
        except ParseError as exc:
            diagnostics.append(str(exc))
    if diagnostics:
        raise ValidationError(diagnostics)

    ws = Workspace(max_worlds=max_worlds)
    loader = _Loader(ws, lines)
    loader.run()
    if loader.diagnostics:
        raise ValidationError(loader.diagnostics)
    return ws


class _Loader:
    def __init__(self, ws: Workspace, lines: list[_Line]):
        self.ws = ws
        self.lines = lines
        self.diagnostics: list[str] = []

    def run(self) -> None:
        by_kind: dict[str, list[_Line]] = {}
        for line in self.lines:
            by_kind.setdefault(line.kind, []).append(line)

        self._sorts(by_kind.get("sort", []))
        self._concepts(by_kind.get("concept", []))
        self._isa_edges(by_kind.get("sort", []), by_kind.get("isa", []))
        for line in sorted(by_kind.get("extent", []), key=lambda l: l.text):
            self._guard(line, self._extent)
        for line in sorted(by_kind.get("particular", []), key=lambda l: l.text):
            self._guard(line, self._particular)
        for line in sorted(by_kind.get("function", []), key=lambda l: l.text):
            self._guard(line, self._function)
        for line in sorted(by_kind.get("builtin-function", []), key=lambda l: l.text):
            self._guard(line, self._builtin_function)
        for line in sorted(by_kind.get("builtin-predicate", []), key=lambda l: l.text):
            self._guard(line, self._builtin_predicate)
        if self.diagnostics:
            return  # formulas would cascade spurious errors
        for line in by_kind.get("axiom", []):
            self._guard(line, self._axiom)
        for line in by_kind.get("query", []):
            self._guard(line, self._query)
        self._check_formulas()

    def _guard(self, line: _Line, action) -> None:
        try:
            action(line)
        except IfolError as exc:
            self.diagnostics.append(f"line {line.number}: {exc}")

    # --- per-kind handlers -----------------------------------------------

    def _sorts(self, lines: list[_Line]) -> None:
        # Attribute references may point forward; retry until a fixpoint.
        pending = sorted(lines, key=lambda l: l.text)
        parsed: list[tuple[_Line, str, Optional[str]]] = []
        for line in pending:
            try:
                name, attr, _ = self._parse_sort(line)
                parsed.append((line, name, attr))
            except IfolError as exc:
                self.diagnostics.append(f"line {line.number}: {exc}")
        remaining = parsed
        while remaining:
            progressed = []
            stuck = []
            for item in remaining:
                line, name, attr = item
                if attr is not None and attr != name and attr not in self.ws.domain.lattice \
                        and attr != NESTED_SENTENCE_SORT:
                    stuck.append(item)
                    continue
                try:
                    self.ws.declare_sort(name, attr)
                except IfolError as exc:
                    self.diagnostics.append(f"line {line.number}: {exc}")
                progressed.append(item)
            if not progressed:
                for line, name, attr in stuck:
                    self.diagnostics.append(
                        f"line {line.number}: unknown attribute sort {attr!r}")
                break
            remaining = stuck

    def _parse_sort(self, line: _Line) -> tuple[str, Optional[str], Optional[str]]:
        body = line.text[len("sort"):].strip()
        sup = None
        if " isa " in body:
            body, sup_token = body.rsplit(" isa ", 1)
            sup = resolve_sort_token(sup_token.strip())
        attr = None
        if ":" in body:
            body, attr_token = body.split(":", 1)
            attr = resolve_sort_token(attr_token.strip())
        name = resolve_sort_token(body.strip())
        if not name:
            raise ParseError("empty sort name", line=line.number)
        return name, attr, sup

    def _isa_edges(self, sort_lines: list[_Line], isa_lines: list[_Line]) -> None:
        edges: list[tuple[_Line, str, str]] = []
        for line in sort_lines:
            try:
                name, _, sup = self._parse_sort(line)
            except IfolError:
                continue
            if sup is not None:
                edges.append((line, name, sup))
        for line in isa_lines:
            parts = line.text.split()
            if len(parts) != 3:
                self.diagnostics.append(f"line {line.number}: expected 'isa <sub> <super>'")
                continue
            edges.append((line, resolve_sort_token(parts[1]), resolve_sort_token(parts[2])))
        for line, sub, sup in sorted(edges, key=lambda e: (e[1], e[2])):
            try:
                self.ws.declare_isa(sub, sup)
            except IfolError as exc:
                self.diagnostics.append(f"line {line.number}: {exc}")

    def _concepts(self, lines: list[_Line]) -> None:
        for line in sorted(lines, key=lambda l: l.text):
            self._guard(line, self._concept)

    def _concept(self, line: _Line) -> None:
        body = line.text[len("concept"):].strip()
        if " arity " not in body or " sorts " not in body or " predicate " not in body:
            raise ParseError("expected 'concept <phrase> arity <k> sorts ... predicate <p>'",
                             line=line.number)
        phrase, rest = body.split(" arity ", 1)
        arity_text, rest = rest.split(" sorts ", 1)
        sorts_text, pred = rest.rsplit(" predicate ", 1)
        try:
            arity = int(arity_text.strip())
        except ValueError:
            raise ParseError(f"bad arity {arity_text.strip()!r}", line=line.number) from None
        sorts = tuple(resolve_sort_token(t) for t in sorts_text.split())
        if len(sorts) != arity:
            raise ParseError(f"arity {arity} but {len(sorts)} sorts", line=line.number)
        self.ws.register_concept(phrase.strip(), sorts, pred.strip())

    def _particular(self, line: _Line) -> None:
        body = line.text[len("particular"):].strip()
        if " : " not in body:
            raise ParseError("expected 'particular <lexeme> : <sort>'", line=line.number)
        lexeme, sort = body.rsplit(" : ", 1)
        self.ws.domain.declare_particular(lexeme.strip(), resolve_sort_token(sort.strip()))

    def _extent(self, line: _Line) -> None:
        body = line.text[len("extent"):].strip()
        if "=" not in body:
            raise ParseError("expected 'extent <sort> = { ... }'", line=line.number)
        sort_token, members = body.split("=", 1)
        members = members.strip()
        if not (members.startswith("{") and members.endswith("}")):
            raise ParseError("extent members must be braced", line=line.number)
        lexemes = [m.strip() for m in members[1:-1].split(",") if m.strip()]
        self.ws.domain.declare_extent(resolve_sort_token(sort_token.strip()), lexemes)

    def _signature_parts(self, line: _Line, text: str) -> tuple[str, int, str]:
        head, rest = text.split(":", 1)
        head = head.strip()
        if "/" not in head:
            raise ParseError(f"expected '<symbol>/<arity>', found {head!r}", line=line.number)
        symbol, arity_text = head.rsplit("/", 1)
        try:
            arity = int(arity_text)
        except ValueError:
            raise ParseError(f"bad arity {arity_text!r}", line=line.number) from None
        return symbol.strip(), arity, rest.strip()

    def _arg_sorts(self, line: _Line, text: str, arity: int) -> tuple[str, ...]:
        tokens = [resolve_sort_token(t.strip()) for t in text.split(" x ")] if text else []
        if arity == 0 and text in ("", "()"):
            tokens = []
        if len(tokens) != arity:
            raise ParseError(f"arity {arity} but {len(tokens)} argument sorts",
                             line=line.number)
        return tuple(tokens)

    def _function(self, line: _Line) -> None:
        symbol, arity, rest = self._signature_parts(line, line.text[len("function"):].strip())
        if "->" not in rest:
            raise ParseError("expected '-> <return sort>'", line=line.number)
        args_text, ret = rest.rsplit("->", 1)
        arg_sorts = self._arg_sorts(line, args_text.strip(), arity)
        self.ws.signature.declare_function(symbol, arg_sorts,
                                           resolve_sort_token(ret.strip()),
                                           self.ws.domain.lattice)

    def _builtin_function(self, line: _Line) -> None:
        body = line.text[len("builtin function"):].strip()
        symbol, arity, rest = self._signature_parts(line, body)
        if "=" not in rest or "->" not in rest:
            raise ParseError("expected '-> <sort> = <evaluator>'", line=line.number)
        rest, evaluator = rest.rsplit("=", 1)
        args_text, ret = rest.rsplit("->", 1)
        evaluator = evaluator.strip()
        if not builtin_defs.known_function_evaluator(evaluator):
            raise ParseError(f"unknown function evaluator {evaluator!r}", line=line.number)
        arg_sorts = self._arg_sorts(line, args_text.strip(), arity)
        self.ws.signature.declare_function(symbol, arg_sorts,
                                           resolve_sort_token(ret.strip()),
                                           self.ws.domain.lattice, evaluator=evaluator)

    def _builtin_predicate(self, line: _Line) -> None:
        body = line.text[len("builtin predicate"):].strip()
        symbol, arity, rest = self._signature_parts(line, body)
        if "=" not in rest:
            raise ParseError("expected '= <evaluator>'", line=line.number)
        args_text, evaluator = rest.rsplit("=", 1)
        evaluator = evaluator.strip()
        if not builtin_defs.known_predicate_evaluator(evaluator):
            raise ParseError(f"unknown predicate evaluator {evaluator!r}", line=line.number)
        arg_sorts = self._arg_sorts(line, args_text.strip(), arity)
        self.ws.signature.declare_predicate(symbol, arg_sorts, self.ws.domain.lattice,
                                            evaluator=evaluator)

    def _axiom(self, line: _Line) -> None:
        self.ws.add_axiom(self.ws.parse(line.text[len("axiom"):].strip(), line.number))

    def _query(self, line: _Line) -> None:
        body = line.text[len("query"):].strip()
        kind, _, rest = body.partition(" ")
        rest = rest.strip()
        if kind == "check":
            self.ws.queries.append(CheckQuery())
        elif kind == "consequence":
            self.ws.queries.append(ConsequenceQuery(self.ws.parse(rest, line.number)))
        elif kind == "intension":
            self.ws.queries.append(IntensionQuery(self.ws.parse(rest, line.number)))
        elif kind == "bealer-montague":
            self.ws.queries.append(BealerMontagueQuery(self.ws.parse(rest, line.number)))
        elif kind == "concepts":
            self.ws.registry.concept_of(rest)
            self.ws.queries.append(ConceptsQuery(rest))
        elif kind == "eval":
            formula_text, bindings = rest, {}
            if " with " in rest:
                formula_text, binding_text = rest.rsplit(" with ", 1)
                bindings = self._bindings(line, binding_text)
            phi = self.ws.parse(formula_text.strip(), line.number)
            names = {v.name for v in free_vars(phi)}
            for var_name, lexeme in bindings.items():
                if var_name not in names:
                    raise ParseError(f"binding for unknown variable {var_name!r}",
                                     line=line.number)
                if not self.ws.is_constant(lexeme):
                    raise ParseError(f"unknown element {lexeme!r}", line=line.number)
            self.ws.queries.append(EvalQuery(phi, bindings))
        else:
            raise ParseError(f"unknown query kind {kind!r}", line=line.number)

    def _bindings(self, line: _Line, text: str) -> dict[str, str]:
        out: dict[str, str] = {}
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "=" not in part:
                raise ParseError(f"expected 'x=<lexeme>', found {part!r}", line=line.number)
            name, lexeme = part.split("=", 1)
            out[name.strip()] = lexeme.strip()
        return out

    def _check_formulas(self) -> None:
        for label, phi in self.ws.all_formulas():
            try:
                errors = check_formula(phi, self.ws.signature, self.ws.domain.lattice,
                                       self.ws.domain)
            except IfolError as exc:
                self.diagnostics.append(f"{label}: {exc}")
                continue
            for err in errors:
                self.diagnostics.append(
                    f"SORT-ERR {label} arg{err.position}: found {err.found} "
                    f"required {err.required}")


# --- canonical rendering ----------------------------------------------------------

def render_workspace(ws: Workspace) -> str:
    """Emit the workspace back as declaration lines; reloading the result gives
    a workspace with identical behavior on every query."""
    reverse_alias = {v: k for k, v in SORT_ALIASES.items()}

    def sort_token(name: str) -> str:
        return reverse_alias.get(name, name)

    out: list[str] = []
    registered = {c.name for c in ws.registry.by_predicate.values()}
    canonical = set(ws.registry._subconcept_home)
    for name in ws.domain.lattice.nodes:
        if name in RESERVED_SORTS or name in registered or name in canonical:
            continue
        concept = ws.domain.concepts.get(name)
        attr = ""
        if concept is not None and concept.arity == 1 and concept.attribute_sorts[0] != name:
            attr = f" : {sort_token(concept.attribute_sorts[0])}"
        out.append(f"sort {sort_token(name)}{attr}")
    for sub, sup in sorted(ws.domain.lattice.isa_edges):
        if sub in canonical:
            continue
        out.append(f"isa {sort_token(sub)} {sort_token(sup)}")
    for pred in sorted(ws.registry.by_predicate):
        concept = ws.registry.by_predicate[pred]
        sorts = " ".join(sort_token(s) for s in concept.attribute_sorts)
        out.append(f"concept {concept.name} arity {concept.arity} sorts {sorts} "
                   f"predicate {pred}")
    overridden: set[str] = set()
    for sort in ws.domain.finite_numeric_sorts():
        members = sorted(p.lexeme for p in ws.domain.valid_elements(sort))
        overridden.update(members)
        out.append(f"extent {sort_token(sort)} = {{ {', '.join(members)} }}")
    auto_forms = set(VERB_FORMS) if VERB_FORM_SORT in ws.domain.lattice else set()
    for p in ws.domain.all_particulars():
        if p.sort == TRUTH_VALUES_SORT or p.lexeme in overridden:
            continue
        if p.sort == VERB_FORM_SORT and p.lexeme in auto_forms:
            continue  # recreated automatically when the sort is declared
        out.append(f"particular {p.lexeme} : {sort_token(p.sort)}")
    for symbol in sorted(ws.signature.functions):
        arg_sorts, ret = ws.signature.functions[symbol]
        evaluator = ws.signature.builtin_functions.get(symbol)
        args = " x ".join(sort_token(s) for s in arg_sorts)
        head = f"function {symbol}/{len(arg_sorts)} : {args} -> {sort_token(ret)}"
        out.append(f"builtin {head} = {evaluator}" if evaluator else head)
    for symbol in sorted(ws.signature.predicates):
        if symbol in ws.registry.by_predicate or symbol == "true":
            continue
        evaluator = ws.signature.builtin_predicates.get(symbol)
        if evaluator is None:
            continue
        args = " x ".join(sort_token(s) for s in ws.signature.predicates[symbol])
        out.append(f"builtin predicate {symbol}/{len(ws.signature.predicates[symbol])} : "
                   f"{args} = {evaluator}")
    for phi in ws.axioms:
        out.append(f"axiom {format_formula(phi)}")
    for q in ws.queries:
        out.append(_render_query(q))
    return "\n".join(out) + "\n"


def _render_query(q: Query) -> str:
    if isinstance(q, CheckQuery):
        return "query check"
    if isinstance(q, ConsequenceQuery):
        return f"query consequence {format_formula(q.formula)}"
    if isinstance(q, IntensionQuery):
        return f"query intension {format_formula(q.formula)}"
    if isinstance(q, BealerMontagueQuery):
        return f"query bealer-montague {format_formula(q.formula)}"
    if isinstance(q, ConceptsQuery):
        return f"query concepts {q.predicate}"
    bindings = ", ".join(f"{name}={lexeme}" for name, lexeme in sorted(q.bindings.items()))
    text = f"query eval {format_formula(q.formula)}"
    return f"{text} with {bindings}" if bindings else text
