"""Decidable evaluators backing built-in predicates and functions.

Built-in symbols are declared in the workspace with an evaluator name from the
tables below; they are sort-checked like user symbols but evaluated by these
functions instead of world relations, so they behave identically in every
possible world.  All arithmetic is exact (rationals).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

from .errors import EvaluationFailure
from .kernel import Element, Particular


def _num(el: Element) -> Fraction:
    if isinstance(el, Particular) and el.value is not None:
        return el.value
    raise EvaluationFailure(f"{el!r} is not a numeric particular")


def _cmp(op: Callable[[Fraction, Fraction], bool]) -> Callable[[Sequence[Element]], bool]:
    def run(args: Sequence[Element]) -> bool:
        if len(args) != 2:
            raise EvaluationFailure(f"comparison expects 2 args, got {len(args)}")
        return op(_num(args[0]), _num(args[1]))
    return run


PREDICATE_EVALUATORS: dict[str, Callable[[Sequence[Element]], bool]] = {
    "true": lambda args: True,
    "leq": _cmp(lambda a, b: a <= b),
    "lt": _cmp(lambda a, b: a < b),
    "geq": _cmp(lambda a, b: a >= b),
    "gt": _cmp(lambda a, b: a > b),
    "eq": _cmp(lambda a, b: a == b),
}


def _add(args: Sequence[Fraction]) -> Fraction:
    return args[0] + args[1]


def _sub(args: Sequence[Fraction]) -> Fraction:
    return args[0] - args[1]


def _mul(args: Sequence[Fraction]) -> Fraction:
    return args[0] * args[1]


def _div(args: Sequence[Fraction]) -> Fraction:
    if args[1] == 0:
        raise EvaluationFailure("division by zero")
    return args[0] / args[1]


def _pow(args: Sequence[Fraction]) -> Fraction:
    if args[1].denominator != 1:
        raise EvaluationFailure(f"exponent {args[1]} is not an integer")
    return args[0] ** int(args[1])


def _neg(args: Sequence[Fraction]) -> Fraction:
    return -args[0]


_FUNCTIONS: dict[str, tuple[int, Callable[[Sequence[Fraction]], Fraction]]] = {
    "add": (2, _add),
    "sub": (2, _sub),
    "mul": (2, _mul),
    "div": (2, _div),
    "pow": (2, _pow),
    "neg": (1, _neg),
}


def apply_function(evaluator: str, args: Sequence[Element]) -> Fraction:
    try:
        arity, fn = _FUNCTIONS[evaluator]
    except KeyError:
        raise EvaluationFailure(f"unknown function evaluator {evaluator!r}") from None
    if len(args) != arity:
        raise EvaluationFailure(f"{evaluator} expects {arity} args, got {len(args)}")
    return fn([_num(a) for a in args])


def known_predicate_evaluator(name: str) -> bool:
    return name in PREDICATE_EVALUATORS


def known_function_evaluator(name: str) -> bool:
    return name in _FUNCTIONS
