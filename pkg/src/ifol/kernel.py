"""Structured domain of particulars, propositions and relation concepts.

The kernel owns the finite IS-A lattice of sorts (bounded by "everything" and
"empty set"), the concept table, and the pool of declared domain elements with
their dynamic sorts.  Everything here is built once while a workspace loads and
is immutable afterwards; evaluation layers only read it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional

from .errors import (
    CycleDetected,
    DuplicateName,
    InfiniteExtent,
    NestedSentenceSortHasNoElements,
    NotARelationalConcept,
    UnknownAttributeSort,
    UnknownSort,
    ZeroArityNonProposition,
)

SortId = str

TOP_SORT: SortId = "everything"
BOTTOM_SORT: SortId = "empty set"
TRUTH_VALUES_SORT: SortId = "truth values"
NESTED_SENTENCE_SORT: SortId = "nested sentence"

RESERVED_SORTS = (TOP_SORT, BOTTOM_SORT, TRUTH_VALUES_SORT, NESTED_SENTENCE_SORT)

# Numeric sorts recognised by name.  They are infinite unless the workspace
# declares a finite override extent; ordered most specific first.
NUMERIC_SORTS = ("naturals", "integers", "rationals", "reals")

VERB_FORM_SORT: SortId = "verb-form"
VERB_FORMS = ("past", "present", "future", "gerund")


@dataclass(frozen=True)
class Concept:
    """A named k-ary relation concept; its attribute list fixes the arity."""

    name: str
    arity: int
    attribute_sorts: tuple[SortId, ...]

    def __post_init__(self) -> None:
        if self.arity != len(self.attribute_sorts):
            raise ValueError(f"arity {self.arity} != {len(self.attribute_sorts)} attributes")

    @property
    def layer(self) -> int:
        return self.arity

    def render(self) -> str:
        if not self.attribute_sorts:
            return self.name
        return f"{self.name}:{','.join(self.attribute_sorts)}"


class SortLattice:
    """Finite IS-A partial order with materialised reflexive-transitive closure.

    The closure is recomputed on each edge insertion; workspaces are small and
    correctness wins over cleverness.  "empty set" and "everything" bound every
    node.
    """

    def __init__(self) -> None:
        self._nodes: list[SortId] = []
        self._edges: set[tuple[SortId, SortId]] = set()
        self._up: dict[SortId, frozenset[SortId]] = {}
        for name in RESERVED_SORTS:
            self.declare(name)

    @property
    def nodes(self) -> tuple[SortId, ...]:
        return tuple(self._nodes)

    @property
    def isa_edges(self) -> frozenset[tuple[SortId, SortId]]:
        return frozenset(self._edges)

    def __contains__(self, name: SortId) -> bool:
        return name in self._up

    def declare(self, name: SortId) -> None:
        if name in self._up:
            raise DuplicateName(f"sort {name!r} already declared")
        self._nodes.append(name)
        self._up[name] = frozenset()
        self._recompute()

    def add_edge(self, sub: SortId, sup: SortId) -> None:
        if sub not in self._up:
            raise UnknownSort(sub)
        if sup not in self._up:
            raise UnknownSort(sup)
        if NESTED_SENTENCE_SORT in (sub, sup):
            raise UnknownSort("'nested sentence' takes part in no IS-A edge")
        if sub != sup and sub in self._up[sup]:
            raise CycleDetected(f"{sup} ⊑ {sub} already holds; adding {sub} ⊑ {sup} forms a cycle")
        self._edges.add((sub, sup))
        self._recompute()

    def _recompute(self) -> None:
        # Implicit bounds: bottom below everything, top above everything.
        up: dict[SortId, set[SortId]] = {n: {n, TOP_SORT} for n in self._nodes}
        if BOTTOM_SORT in up:
            up[BOTTOM_SORT] = set(self._nodes) | {TOP_SORT}
        for sub, sup in self._edges:
            up[sub].add(sup)
        changed = True
        while changed:
            changed = False
            for n in self._nodes:
                extra: set[SortId] = set()
                for m in up[n]:
                    extra |= up[m]
                if not extra <= up[n]:
                    up[n] |= extra
                    changed = True
        self._up = {n: frozenset(s) for n, s in up.items()}

    def is_subsort(self, s1: SortId, s2: SortId) -> bool:
        if s1 not in self._up:
            raise UnknownSort(s1)
        if s2 not in self._up:
            raise UnknownSort(s2)
        return s2 in self._up[s1]

    def supersorts(self, s: SortId) -> frozenset[SortId]:
        if s not in self._up:
            raise UnknownSort(s)
        return self._up[s]

    def subsorts(self, s: SortId) -> frozenset[SortId]:
        if s not in self._up:
            raise UnknownSort(s)
        return frozenset(n for n in self._nodes if s in self._up[n])

    def meet(self, s1: SortId, s2: SortId) -> SortId:
        """Greatest lower bound when unique, else "empty set"."""
        lower = self.subsorts(s1) & self.subsorts(s2)
        maximal = [s for s in lower if not any(t != s and self.is_subsort(s, t) for t in lower)]
        return maximal[0] if len(maximal) == 1 else BOTTOM_SORT

    def join(self, s1: SortId, s2: SortId) -> SortId:
        """Least upper bound when unique, else "everything"."""
        upper = self.supersorts(s1) & self.supersorts(s2)
        minimal = [s for s in upper if not any(t != s and self.is_subsort(t, s) for t in upper)]
        return minimal[0] if len(minimal) == 1 else TOP_SORT


# --- domain elements ---------------------------------------------------------

@dataclass(frozen=True)
class Particular:
    """An individual: a lexeme plus its unique dynamic sort."""

    lexeme: str
    sort: SortId
    value: Optional[Fraction] = field(default=None, compare=False)


@dataclass(frozen=True)
class ConceptRef:
    """A concept reified as a domain element."""

    concept: Concept


@dataclass(frozen=True)
class Intension:
    """A proposition (arity 0) or derived concept produced by interpretation.

    Identity is the normalized-syntax fingerprint; `origin` keeps the formula
    whose per-world evaluation yields the element's extension, `parts` marks a
    derived union of same-arity concepts.
    """

    fingerprint: str
    arity: int
    origin: object = field(default=None, compare=False, hash=False)
    parts: Optional[tuple["Element", ...]] = field(default=None, compare=False, hash=False)


Element = Particular | ConceptRef | Intension


def numeric_value(lexeme: str) -> Optional[Fraction]:
    """Parse a numeric lexeme (integer, decimal or num/den) exactly, else None."""
    try:
        return Fraction(lexeme)
    except (ValueError, ZeroDivisionError):
        return None


def numeric_lexeme(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def element_lexeme(el: Element) -> str:
    if isinstance(el, Particular):
        return el.lexeme
    if isinstance(el, ConceptRef):
        return el.concept.name
    return el.fingerprint


class Domain:
    """Sort lattice, concept table and the fixed pool of declared elements.

    Dynamic sorts are total: particulars carry their declared sort, propositions
    sit at "truth values", reified concepts at their own sort per the static
    sort rules.  Numeric particulars materialised during evaluation are interned
    but stay out of the quantifier pools, which are frozen at load time.
    """

    def __init__(self) -> None:
        self.lattice = SortLattice()
        self.concepts: dict[str, Concept] = {}
        self._pool: list[Particular] = []
        self._by_lexeme: dict[str, Particular] = {}
        self._transient: dict[str, Particular] = {}
        self._finite_numeric: set[SortId] = set()
        self._valid_cache: dict[SortId, tuple[Particular, ...]] = {}
        for name in RESERVED_SORTS:
            self.concepts[name] = Concept(name, 1, (name,))
        # Truth-value extent is fixed: f is the empty set, t the singleton tuple.
        for tv in ("f", "t"):
            self._add_particular(Particular(tv, TRUTH_VALUES_SORT))

    # --- declarations ---------------------------------------------------

    def declare_sort(self, name: str, arity: int, attribute_sorts: Iterable[SortId]) -> Concept:
        attrs = tuple(attribute_sorts)
        if arity == 0:
            raise ZeroArityNonProposition(
                f"{name!r}: arity 0 is reserved for propositions created by interpretation")
        if name in self.concepts:
            raise DuplicateName(f"concept {name!r} already declared")
        for s in attrs:
            if s == BOTTOM_SORT:
                raise UnknownAttributeSort(f"{name!r}: attribute sort may not be 'empty set'")
            if s != NESTED_SENTENCE_SORT and s != name and s not in self.lattice:
                raise UnknownAttributeSort(f"{name!r}: unknown attribute sort {s!r}")
        concept = Concept(name, arity, attrs)
        self.lattice.declare(name)
        self.concepts[name] = concept
        if name == VERB_FORM_SORT:
            for form in VERB_FORMS:
                self._add_particular(Particular(form, VERB_FORM_SORT))
        return concept

    def replace_concept(self, concept: Concept) -> None:
        # Single-writer load phase only: attribute inheritance swaps concepts in place.
        if concept.name not in self.concepts:
            raise UnknownSort(concept.name)
        self.concepts[concept.name] = concept

    def declare_isa(self, sub: SortId, sup: SortId) -> None:
        self.lattice.add_edge(sub, sup)
        self._valid_cache.clear()

    def is_subsort(self, s1: SortId, s2: SortId) -> bool:
        return self.lattice.is_subsort(s1, s2)

    def declare_particular(self, lexeme: str, sort: SortId) -> Particular:
        if sort not in self.lattice:
            raise UnknownSort(sort)
        if sort == NESTED_SENTENCE_SORT:
            raise NestedSentenceSortHasNoElements(lexeme)
        if lexeme in self._by_lexeme:
            existing = self._by_lexeme[lexeme]
            if existing.sort != sort and not self.lattice.is_subsort(existing.sort, sort):
                raise DuplicateName(f"particular {lexeme!r} already has sort {existing.sort!r}")
            return existing
        value = numeric_value(lexeme)
        if value is not None and sort in NUMERIC_SORTS:
            # Numeric reading: the dynamic sort comes from the numeric tower
            # (integral values sit at the integer sort even when declared at a
            # wider one) and the declaration finitizes the named sort.
            p = self.numeric_particular(value)
            self._add_particular(p)
            self._finite_numeric.add(sort)
            if p.sort != sort and not self.lattice.is_subsort(p.sort, sort):
                raise UnknownSort(f"numeric lexeme {lexeme!r} cannot carry sort {sort!r}")
            return p
        p = Particular(lexeme, sort, value)
        self._add_particular(p)
        return p

    def declare_extent(self, sort: SortId, lexemes: Iterable[str]) -> None:
        """Bulk particular declaration; on a numeric sort it is the finite override."""
        if sort not in self.lattice:
            raise UnknownSort(sort)
        if sort in NUMERIC_SORTS:
            self._finite_numeric.add(sort)
            self._valid_cache.clear()
        for lex in lexemes:
            self.declare_particular(lex, sort)

    def _add_particular(self, p: Particular) -> None:
        if p.lexeme not in self._by_lexeme:
            self._pool.append(p)
            self._by_lexeme[p.lexeme] = p
            self._valid_cache.clear()

    # --- numeric elements -------------------------------------------------

    def numeric_sort_of(self, value: Fraction) -> SortId:
        """Most specific declared numeric sort containing the value."""
        candidates: list[SortId] = []
        if value.denominator == 1:
            if value >= 0:
                candidates.append("naturals")
            candidates.append("integers")
        candidates.extend(["rationals", "reals"])
        for s in candidates:
            if s in self.lattice:
                return s
        raise UnknownSort(f"no numeric sort declared for value {value}")

    def numeric_particular(self, value: Fraction) -> Particular:
        lex = numeric_lexeme(value)
        cached = self._by_lexeme.get(lex) or self._transient.get(lex)
        if cached is not None:
            return cached
        p = Particular(lex, self.numeric_sort_of(value), value)
        self._transient[lex] = p
        return p

    def lookup(self, lexeme: str) -> Optional[Particular]:
        p = self._by_lexeme.get(lexeme)
        if p is not None:
            return p
        value = numeric_value(lexeme)
        if value is not None:
            return self.numeric_particular(value)
        return None

    # --- element views ------------------------------------------------------

    def dynamic_sort(self, el: Element) -> SortId:
        if isinstance(el, Particular):
            return el.sort
        if isinstance(el, Intension):
            return TRUTH_VALUES_SORT if el.arity == 0 else TOP_SORT
        c = el.concept
        if c.arity == 1:
            return c.attribute_sorts[0]
        return c.name

    def all_particulars(self) -> tuple[Particular, ...]:
        return tuple(sorted(self._pool, key=lambda p: p.lexeme))

    def valid_elements(self, sort: SortId) -> tuple[Particular, ...]:
        """Declared elements whose dynamic sort lies at or below `sort`,
        ordered by lexeme so iteration never depends on declaration order."""
        cached = self._valid_cache.get(sort)
        if cached is not None:
            return cached
        if sort not in self.lattice:
            raise UnknownSort(sort)
        if sort == NESTED_SENTENCE_SORT:
            raise NestedSentenceSortHasNoElements(sort)
        if self._is_infinite(sort):
            raise InfiniteExtent(f"sort {sort!r} has no finite extent declared")
        if sort == TOP_SORT:
            found = self.all_particulars()
        else:
            found = tuple(sorted((p for p in self._pool
                                  if self.lattice.is_subsort(p.sort, sort)),
                                 key=lambda p: p.lexeme))
        self._valid_cache[sort] = found
        return found

    def _is_infinite(self, sort: SortId) -> bool:
        if sort not in NUMERIC_SORTS:
            return False
        if sort in self._finite_numeric:
            return False
        return not any(sup in self._finite_numeric
                       for sup in self.lattice.supersorts(sort) if sup in NUMERIC_SORTS)

    def sort_is_finite(self, sort: SortId) -> bool:
        return sort in self.lattice and sort != NESTED_SENTENCE_SORT and not self._is_infinite(sort)

    def finite_numeric_sorts(self) -> tuple[SortId, ...]:
        return tuple(sorted(self._finite_numeric))

    def fixed_extent(self, sort: SortId) -> tuple[Particular, ...]:
        """The world-independent extent ‖sort‖: declared members of the sort."""
        return self.valid_elements(sort)

    def derived_sort_extent(self, concept: Concept, world=None) -> set[str]:
        """Name-level extent of a relational concept used as a single sort.

        Collects the names of its relational subconcepts and, for each unary
        leaf subconcept, the concatenations of the leaf's name with the members
        of its attribute sort's extent (taken in `world` when one is given).
        """
        if concept.arity < 2:
            raise NotARelationalConcept(concept.name)
        out: set[str] = set()
        for sub in self.lattice.subsorts(concept.name):
            if sub in (concept.name, BOTTOM_SORT):
                continue
            c = self.concepts.get(sub)
            if c is None:
                continue
            if c.arity >= 2:
                out.add(c.name)
            elif c.arity == 1:
                attr = c.attribute_sorts[0]
                if attr in self.lattice and self.sort_is_finite(attr):
                    if world is not None:
                        members = world.sort_extent(attr)
                    else:
                        members = self.valid_elements(attr)
                    for p in sorted(members, key=element_lexeme):
                        out.add(f"{c.name} {element_lexeme(p)}")
        return out
