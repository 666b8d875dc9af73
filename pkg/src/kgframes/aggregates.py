"""Aggregation function kernel shared by both local evaluators.

Both the operator-by-operator evaluator and the query-model evaluator
delegate here, so a bug in a function would cancel out between them;
the kernel is therefore kept small enough to audit directly, and the
unit tests pin each function against hand-computed values.

An aggregation over ill-typed input yields ``ERROR``, in which case the
caller leaves the result column unbound for that group. Only ``count``
and ``sum`` are defined on an empty input.
"""

from __future__ import annotations

from typing import List, Sequence

from .terms import numeric_value, sort_key

# Unique sentinel: aggregation failed, the result binding is dropped.
ERROR = object()


def apply_aggregation(fn: str, values: Sequence[object], distinct: bool) -> object:
    """Apply one aggregation function to the bound values of a group.

    ``values`` excludes unbound cells; duplicates carry multiplicity.
    """
    if distinct:
        values = _dedupe(values)
    if fn == "count":
        return len(values)
    if fn == "sum":
        numbers = [numeric_value(v) for v in values]
        if any(n is None for n in numbers):
            return ERROR
        return float(sum(numbers))
    if fn == "avg":
        numbers = [numeric_value(v) for v in values]
        if not numbers or any(n is None for n in numbers):
            return ERROR
        return float(sum(numbers)) / len(numbers)
    if fn == "min":
        if not values:
            return ERROR
        return min(values, key=sort_key)
    if fn == "max":
        if not values:
            return ERROR
        return max(values, key=sort_key)
    if fn == "sample":
        if not values:
            return ERROR
        return min(values, key=sort_key)
    raise ValueError(f"unknown aggregation function: {fn!r}")


def _dedupe(values: Sequence[object]) -> List[object]:
    seen = set()
    out: List[object] = []
    for value in values:
        if value not in seen:
            seen.add(value)
            out.append(value)
    return out
