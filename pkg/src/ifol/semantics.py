"""Possible worlds, assignments, and the two equivalent satisfaction routes.

A world is an extensionalization function: it fixes a relation for every
registered concept (under the sorted constraints and IS-A inclusion) plus a
total graph for every declared function.  Truth can then be computed two ways:

* `tarski_eval` -- the plain inductive interpretation with sorted quantifier
  ranges, used as the independent oracle;
* `satisfies` -- Kripke satisfaction over generalized worlds (world,
  assignment), where the existential quantifier is an accessibility step that
  rebinds one variable.

Logical consequence, the per-world meaning of open formulas (their Montague
intension) and the identity between a concept's extension and that intension
are all decided by exhaustive enumeration over these worlds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .builtins import PREDICATE_EVALUATORS, apply_function
from .concepts import ConceptRegistry, Interpretation
from .errors import (
    EvaluationFailure,
    ExplosionGuard,
    FunctionUndefinedAt,
    InfiniteHiddenDomain,
    UnboundVariable,
    UnknownSymbol,
)
from .kernel import (
    Concept,
    ConceptRef,
    Domain,
    Element,
    Intension,
    NESTED_SENTENCE_SORT,
    element_lexeme,
)
from .sorting import Signature
from .syntax import (
    Abstracted,
    And,
    Atom,
    Const,
    FnApp,
    Formula,
    Not,
    Term,
    Var,
    Variable,
    free_vars,
    substitute,
)

Assignment = dict[Variable, Element]
MapFn = Callable[..., Iterable]


@dataclass
class Structure:
    """The immutable declaration half of a workspace: domain, signature,
    concept registry and the fixed intensional interpretation."""

    domain: Domain
    signature: Signature
    registry: ConceptRegistry
    interp: Interpretation


@dataclass
class World:
    """One extensionalization function over the structure's concepts."""

    label: str
    space: Structure
    relations: dict[str, frozenset[tuple[Element, ...]]]
    functions: dict[str, dict[tuple[Element, ...], Element]] = field(default_factory=dict)
    _prop_memo: dict[str, bool] = field(default_factory=dict, repr=False)

    def relation(self, concept_name: str) -> frozenset[tuple[Element, ...]]:
        return self.relations.get(concept_name, frozenset())

    def sort_extent(self, sort_name: str) -> frozenset[Element]:
        """The unary extent of a sort in this world: the assigned relation for
        an enumerated unary concept, the declared members otherwise."""
        concept = self.space.domain.concepts.get(sort_name)
        if sort_name in self.relations and concept is not None and concept.arity == 1:
            return frozenset(t[0] for t in self.relations[sort_name])
        return frozenset(self.space.domain.valid_elements(sort_name))

    def truth_of(self, prop: Intension) -> bool:
        if prop.arity != 0:
            raise EvaluationFailure(f"{prop.fingerprint!r} is not a proposition")
        cached = self._prop_memo.get(prop.fingerprint)
        if cached is None:
            if prop.parts is not None:
                # union of propositions: true where any part is (f is the empty
                # extension, t the singleton)
                cached = any(self.truth_of(p) for p in prop.parts
                             if isinstance(p, Intension))
            elif prop.origin is None:
                cached = False
            else:
                cached = tarski_eval(self, {}, prop.origin)
            self._prop_memo[prop.fingerprint] = cached
        return cached

    def extension_of(self, el: Element) -> frozenset[tuple[Element, ...]] | bool:
        """The extensionalization of an intensional element in this world."""
        if isinstance(el, Intension):
            if el.arity == 0:
                return self.truth_of(el)
            if el.parts is not None:
                out: frozenset[tuple[Element, ...]] = frozenset()
                for part in el.parts:
                    ext = self.extension_of(part)
                    assert not isinstance(ext, bool)
                    out |= ext
                return out
            if el.origin is None:
                return frozenset()
            return self._formula_extension(el.origin)
        if isinstance(el, ConceptRef):
            return self._concept_extension(el.concept)
        raise EvaluationFailure(f"particular {el!r} has no extension")

    def _formula_extension(self, phi: Formula) -> frozenset[tuple[Element, ...]]:
        # Derived-concept extension rule: collect tuples through the Tarski route.
        fv = free_vars(phi)
        found = []
        for g in many_sorted_assignments(fv, self.space.domain):
            if tarski_eval(self, g, phi):
                found.append(tuple(g[v] for v in fv))
        return frozenset(found)

    def _concept_extension(self, concept: Concept) -> frozenset[tuple[Element, ...]]:
        if concept.name in self.relations:
            return self.relations[concept.name]
        registry = self.space.registry
        if concept.name in registry._subconcept_home:
            pred, fixed = registry.atom_pattern(concept)
            parent = registry.concept_of(pred)
            parent_rel = self._concept_extension(parent)
            keep = [i for i in range(parent.arity) if i not in fixed]
            out = []
            for t in parent_rel:
                if all(element_lexeme(t[i]) == lex for i, lex in fixed.items()):
                    out.append(tuple(t[i] for i in keep))
            return frozenset(out)
        if concept.arity == 1:
            return frozenset((p,) for p in self.space.domain.valid_elements(concept.name))
        return frozenset()


# --- assignments and accessibility ------------------------------------------------

def many_sorted_assignments(variables: Sequence[Variable],
                            domain: Domain) -> Iterator[Assignment]:
    """Every assignment sending each variable into the valid elements of its sort."""
    variables = tuple(variables)
    pools = [domain.valid_elements(v.sort) for v in variables]
    for combo in itertools.product(*pools):
        yield dict(zip(variables, combo))


def is_many_sorted(g: Assignment, domain: Domain) -> bool:
    return all(domain.lattice.is_subsort(domain.dynamic_sort(u), v.sort)
               for v, u in g.items())


def accessible(g1: Assignment, g2: Assignment, x: Variable) -> bool:
    """Accessibility for the existential modality on x: agreement off x."""
    keys = set(g1) | set(g2)
    return all(g1.get(v) == g2.get(v) for v in keys if v != x)


def successors(g: Assignment, x: Variable, domain: Domain) -> Iterator[Assignment]:
    """The assignments reachable from g along the accessibility relation for x,
    rebinding x within the valid elements of its sort."""
    for u in domain.valid_elements(x.sort):
        g2 = dict(g)
        g2[x] = u
        yield g2


@dataclass
class KripkeModel:
    """Explicit worlds plus the per-variable accessibility structure; the
    generalized possible worlds are the (world, assignment) pairs."""

    space: Structure
    worlds: tuple[World, ...]


# --- term and atom evaluation -----------------------------------------------------

def eval_term(t: Term, g: Assignment, world: World) -> Element:
    """Extend the assignment over a term.

    Function applications go through the world's function graph (or a built-in
    evaluator); an abstraction term denotes the interpretation of its body with
    the beta variables ground through g, landing in the layer fixed by alpha.
    """
    space = world.space
    if isinstance(t, Var):
        try:
            return g[t.var]
        except KeyError:
            raise UnboundVariable(t.var.name) from None
    if isinstance(t, Const):
        return space.interp.of_constant(t.symbol)
    if isinstance(t, FnApp):
        args = tuple(eval_term(a, g, world) for a in t.args)
        evaluator = space.signature.builtin_functions.get(t.symbol)
        if evaluator is not None:
            return space.domain.numeric_particular(apply_function(evaluator, args))
        graph = world.functions.get(t.symbol)
        if graph is None:
            raise UnknownSymbol(f"function {t.symbol!r} has no graph in world {world.label}")
        try:
            return graph[args]
        except KeyError:
            rendered = ", ".join(element_lexeme(a) for a in args)
            raise FunctionUndefinedAt(f"{t.symbol}({rendered})") from None
    if not t.beta:
        return space.interp.of_ground_term(t)
    body = t.body
    for v in t.beta:
        if v not in g:
            raise UnboundVariable(v.name)
        body = substitute(body, v, Const(element_lexeme(g[v])))
    return space.interp.of_ground_term(Abstracted(body, t.alpha, ()))


def _atom_truth(a: Atom, g: Assignment, world: World) -> bool:
    space = world.space
    args = tuple(eval_term(t, g, world) for t in a.args)
    evaluator = space.signature.builtin_predicates.get(a.pred)
    if evaluator is not None:
        return PREDICATE_EVALUATORS[evaluator](args)
    concept = space.registry.by_predicate.get(a.pred)
    if concept is None:
        raise UnknownSymbol(f"predicate {a.pred!r} has no concept and no evaluator")
    return args in world.relation(concept.name)


def eval_atom(a: Atom, g: Assignment, world: World) -> bool | frozenset[tuple[Element, ...]]:
    """Generalized interpretation of one atom under a (possibly partial) assignment.

    Ground after g: a truth value.  Otherwise the atom is a virtual predicate:
    its extension ranges over the directly-free variables, and any beta
    variables still hidden inside abstraction arguments are unioned out over
    all of their sorted assignments.
    """
    domain = world.space.domain
    hidden: list[Variable] = []
    direct: list[Variable] = []
    for t in a.args:
        if isinstance(t, Abstracted):
            for v in t.beta:
                if v not in g and v not in hidden:
                    hidden.append(v)
        else:
            for v in _direct_vars(t):
                if v not in g and v not in direct:
                    direct.append(v)
    if hidden:
        for v in hidden:
            if not domain.sort_is_finite(v.sort):
                raise InfiniteHiddenDomain(f"{v.name}:{v.sort}")
        out: frozenset[tuple[Element, ...]] = frozenset()
        for g_hidden in many_sorted_assignments(hidden, domain):
            merged = dict(g)
            merged.update(g_hidden)
            summand = eval_atom(a, merged, world)
            if isinstance(summand, bool):
                summand = frozenset([()]) if summand else frozenset()
            out |= summand
        return out
    if direct:
        found = []
        for g1 in many_sorted_assignments(direct, domain):
            merged = dict(g)
            merged.update(g1)
            if _atom_truth(a, merged, world):
                found.append(tuple(g1[v] for v in direct))
        return frozenset(found)
    return _atom_truth(a, g, world)


def _direct_vars(t: Term) -> Iterator[Variable]:
    if isinstance(t, Var):
        yield t.var
    elif isinstance(t, FnApp):
        for a in t.args:
            yield from _direct_vars(a)


# --- the two satisfaction routes ---------------------------------------------------

def satisfies(model: KripkeModel, world: World, g: Assignment, phi: Formula) -> bool:
    """Kripke satisfaction at the generalized world (world, g).

    The existential quantifier is the low-level modality for its variable: it
    holds when some accessible assignment (one rebinding the variable inside
    its sort) satisfies the body.
    """
    if isinstance(phi, Atom):
        truth = eval_atom(phi, g, world)
        if not isinstance(truth, bool):
            raise UnboundVariable(f"free variables left in atom {phi.pred}")
        return truth
    if isinstance(phi, And):
        return satisfies(model, world, g, phi.left) and satisfies(model, world, g, phi.right)
    if isinstance(phi, Not):
        return not satisfies(model, world, g, phi.sub)
    for g2 in successors(g, phi.var, model.space.domain):
        assert accessible(g, g2, phi.var)
        if satisfies(model, world, g2, phi.body):
            return True
    return False


def tarski_eval(world: World, g: Assignment, phi: Formula) -> bool:
    """Plain inductive truth with sorted quantifier ranges; kept free of the
    accessibility machinery so it can serve as the independent oracle."""
    if isinstance(phi, Atom):
        space = world.space
        args = tuple(eval_term(t, g, world) for t in phi.args)
        evaluator = space.signature.builtin_predicates.get(phi.pred)
        if evaluator is not None:
            return PREDICATE_EVALUATORS[evaluator](args)
        concept = space.registry.by_predicate.get(phi.pred)
        if concept is None:
            raise UnknownSymbol(f"predicate {phi.pred!r} has no concept and no evaluator")
        return args in world.relation(concept.name)
    if isinstance(phi, And):
        return tarski_eval(world, g, phi.left) and tarski_eval(world, g, phi.right)
    if isinstance(phi, Not):
        return not tarski_eval(world, g, phi.sub)
    for u in world.space.domain.valid_elements(phi.var.sort):
        g2 = dict(g)
        g2[phi.var] = u
        if tarski_eval(world, g2, phi.body):
            return True
    return False


# --- world enumeration ---------------------------------------------------------------

def enumerate_worlds(space: Structure, max_worlds: int = 2 ** 20) -> list[World]:
    """All extensionalization functions over the registered concepts.

    Each registered predicate-concept receives every subset of its sorted tuple
    pool; positions of nested-sentence sort have no element-level extent, which
    forces those relations empty.  Declared functions receive every total graph.
    Candidates violating IS-A extent inclusion are dropped.  Deterministic
    order: concepts by registration, pool tuples lexicographic by lexeme.
    """
    domain = space.domain
    concepts = list(space.registry.by_predicate.values())
    pools: list[tuple[str, list[tuple[Element, ...]]]] = []
    candidates = 1
    for c in concepts:
        pool = _tuple_pool(domain, c.attribute_sorts)
        pools.append((c.name, pool))
        candidates *= 2 ** len(pool)
        if candidates > max_worlds:
            raise ExplosionGuard(f"more than {max_worlds} candidate worlds")

    fn_graphs: list[tuple[str, list[dict[tuple[Element, ...], Element]]]] = []
    for symbol in sorted(space.signature.functions):
        if symbol in space.signature.builtin_functions:
            continue
        arg_sorts, ret = space.signature.functions[symbol]
        arg_pool = _tuple_pool(domain, arg_sorts)
        ret_pool = sorted(domain.valid_elements(ret), key=element_lexeme)
        count = len(ret_pool) ** len(arg_pool)
        candidates *= max(count, 1)
        if candidates > max_worlds:
            raise ExplosionGuard(f"more than {max_worlds} candidate worlds")
        # no graphs at all (empty return pool, nonempty domain) means no total
        # function exists, hence no world
        graphs = [dict(zip(arg_pool, values))
                  for values in itertools.product(ret_pool, repeat=len(arg_pool))]
        fn_graphs.append((symbol, graphs))

    subset_choices = [_subsets(pool) for _, pool in pools]
    worlds: list[World] = []
    for relation_combo in itertools.product(*subset_choices):
        relations = {name: rel for (name, _), rel in zip(pools, relation_combo)}
        if not _isa_inclusion_ok(space, relations):
            continue
        for graph_combo in itertools.product(*(graphs for _, graphs in fn_graphs)):
            functions = {symbol: graph
                         for (symbol, _), graph in zip(fn_graphs, graph_combo)}
            worlds.append(World(f"w{len(worlds)}", space, relations, functions))
    return worlds


def _tuple_pool(domain: Domain, sorts: Sequence[str]) -> list[tuple[Element, ...]]:
    per_position: list[list[Element]] = []
    for s in sorts:
        if s == NESTED_SENTENCE_SORT:
            return []
        per_position.append(sorted(domain.valid_elements(s), key=element_lexeme))
    pool = [tuple(t) for t in itertools.product(*per_position)]
    pool.sort(key=lambda t: tuple(element_lexeme(e) for e in t))
    return pool


def _subsets(pool: list[tuple[Element, ...]]) -> list[frozenset[tuple[Element, ...]]]:
    out = []
    for mask in range(2 ** len(pool)):
        out.append(frozenset(pool[i] for i in range(len(pool)) if mask >> i & 1))
    return out


def _isa_inclusion_ok(space: Structure,
                      relations: dict[str, frozenset[tuple[Element, ...]]]) -> bool:
    domain = space.domain
    for sub, sup in domain.lattice.isa_edges:
        sub_ext = _unary_extent(space, relations, sub)
        sup_ext = _unary_extent(space, relations, sup)
        if sub_ext is None or sup_ext is None:
            continue
        if not sub_ext <= sup_ext:
            return False
    return True


def _unary_extent(space: Structure, relations: dict[str, frozenset[tuple[Element, ...]]],
                  name: str) -> Optional[frozenset[Element]]:
    if name in relations:
        concept = space.domain.concepts.get(name)
        if concept is None or concept.arity != 1:
            return None
        return frozenset(t[0] for t in relations[name])
    concept = space.domain.concepts.get(name)
    if concept is None or concept.arity != 1 or not space.domain.sort_is_finite(name):
        return None
    return frozenset(space.domain.valid_elements(name))


# --- consequence, intension, and the extension identity ------------------------------

@dataclass(frozen=True)
class Countermodel:
    world: World
    assignment: tuple[tuple[Variable, Element], ...]


def is_model_of(world: World, axioms: Sequence[Formula]) -> bool:
    """Open axioms are read universally closed."""
    for ax in axioms:
        fv = free_vars(ax)
        if not fv:
            if not tarski_eval(world, {}, ax):
                return False
        else:
            for g in many_sorted_assignments(fv, world.space.domain):
                if not tarski_eval(world, g, ax):
                    return False
    return True


def consequence(space: Structure, axioms: Sequence[Formula], phi: Formula,
                worlds: Optional[Sequence[World]] = None,
                max_worlds: int = 2 ** 20,
                map_fn: MapFn = map) -> tuple[bool, Optional[Countermodel]]:
    """phi follows from the axioms iff it holds at every generalized world
    (model of the axioms, many-sorted assignment); otherwise the first failing
    pair is the countermodel certificate."""
    if worlds is None:
        worlds = enumerate_worlds(space, max_worlds)
    model = KripkeModel(space, tuple(worlds))
    fv = free_vars(phi)

    def check(world: World) -> Optional[Countermodel]:
        if not is_model_of(world, axioms):
            return None
        if not fv:
            if not satisfies(model, world, {}, phi):
                return Countermodel(world, ())
            return None
        for g in many_sorted_assignments(fv, space.domain):
            if not satisfies(model, world, g, phi):
                return Countermodel(world, tuple(g.items()))
        return None

    for failure in map_fn(check, worlds):
        if failure is not None:
            return False, failure
    return True, None


def montague_intension(space: Structure, phi: Formula,
                       worlds: Optional[Sequence[World]] = None,
                       max_worlds: int = 2 ** 20,
                       map_fn: MapFn = map) -> dict[str, frozenset[tuple[Element, ...]] | bool]:
    """The meaning of phi as a map from worlds to extensions: per world, the
    set of free-variable tuples it satisfies, or its truth value if closed."""
    if worlds is None:
        worlds = enumerate_worlds(space, max_worlds)
    model = KripkeModel(space, tuple(worlds))
    fv = free_vars(phi)

    def per_world(world: World) -> frozenset[tuple[Element, ...]] | bool:
        if not fv:
            return satisfies(model, world, {}, phi)
        found = []
        for g in many_sorted_assignments(fv, space.domain):
            if satisfies(model, world, g, phi):
                found.append(tuple(g[v] for v in fv))
        return frozenset(found)

    return {w.label: ext for w, ext in zip(worlds, map_fn(per_world, worlds))}


@dataclass(frozen=True)
class ExtensionMismatch:
    world_label: str
    concept_side: frozenset | bool
    intension_side: frozenset | bool


def bealer_montague_check(space: Structure, phi: Formula,
                          worlds: Optional[Sequence[World]] = None,
                          max_worlds: int = 2 ** 20,
                          map_fn: MapFn = map) -> Optional[ExtensionMismatch]:
    """Verify that extensionalizing the interpreted concept of phi agrees with
    phi's per-world meaning; returns the first mismatch, None when exact."""
    if worlds is None:
        worlds = enumerate_worlds(space, max_worlds)
    concept = space.interp.of_formula(phi)
    intension = montague_intension(space, phi, worlds, map_fn=map_fn)

    def check(world: World) -> Optional[ExtensionMismatch]:
        lhs = world.extension_of(concept)
        rhs = intension[world.label]
        if lhs != rhs:
            return ExtensionMismatch(world.label, lhs, rhs)
        return None

    for mismatch in map_fn(check, worlds):
        if mismatch is not None:
            return mismatch
    return None
