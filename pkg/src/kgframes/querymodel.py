"""Intermediate representation between recorded operators and query text.

A query model holds every component of one SELECT query: patterns with
their source graphs, filters, optional blocks, nested subquery models,
union branches, grouping/aggregation, and modifiers. Models are built
single-threaded by the generator and treated as immutable once built.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from .conditions import Compare, Condition, FunctionTest
from .terms import Iri, PatternTerm, is_variable

TriplePattern = Tuple[PatternTerm, PatternTerm, PatternTerm]


@dataclass
class PatternEntry:
    """One triple pattern and the graph it is matched against."""

    pattern: TriplePattern
    graph: Iri


@dataclass
class FilterClause:
    """One FILTER: conjunction of per-column condition lists, in order."""

    parts: Tuple[Tuple[str, Tuple[Condition, ...]], ...]

    def conditions(self):
        for col, conds in self.parts:
            for cond in conds:
                yield col, cond


@dataclass
class AggregationSpec:
    fn: str
    src: str
    target: str
    distinct: bool = False


@dataclass
class PatternGroup:
    """An OPTIONAL block: patterns and/or subqueries with their filters."""

    patterns: List[PatternEntry] = field(default_factory=list)
    filters: List[FilterClause] = field(default_factory=list)
    subqueries: List["QueryModel"] = field(default_factory=list)

    def is_empty(self) -> bool:
        return not (self.patterns or self.subqueries)


@dataclass
class QueryModel:
    prefixes: Dict[str, str] = field(default_factory=dict)
    from_graphs: List[Iri] = field(default_factory=list)
    select_vars: List[str] = field(default_factory=list)
    distinct: bool = False
    patterns: List[PatternEntry] = field(default_factory=list)
    filters: List[FilterClause] = field(default_factory=list)
    optionals: List[PatternGroup] = field(default_factory=list)
    subqueries: List["QueryModel"] = field(default_factory=list)
    union_branches: List["QueryModel"] = field(default_factory=list)
    group_vars: List[str] = field(default_factory=list)
    aggregations: List[AggregationSpec] = field(default_factory=list)
    having: List[Tuple[AggregationSpec, Condition]] = field(default_factory=list)
    order: List[Tuple[str, str]] = field(default_factory=list)
    limit: Optional[int] = None
    offset: Optional[int] = None
    in_scope: Set[str] = field(default_factory=set)

    # -- scope ----------------------------------------------------------------

    def visible_vars(self) -> List[str]:
        """Variables this model exposes to an enclosing scope, in order."""
        if self.select_vars:
            return list(self.select_vars)
        if self.group_vars or self.aggregations:
            return list(self.group_vars) + [a.target for a in self.aggregations]
        return ordered_vars(self.in_scope)

    def is_grouped(self) -> bool:
        return bool(self.group_vars or self.aggregations)

    def has_modifiers(self) -> bool:
        return bool(self.order) or self.limit is not None or self.offset is not None

    # -- structural helpers -----------------------------------------------------

    def validate(self) -> None:
        """Check scope soundness of every referenced variable."""
        visible = set(self.visible_vars()) | self.in_scope
        for var in self.select_vars:
            if var not in self.in_scope and var not in {
                a.target for a in self.aggregations
            }:
                raise ValueError(f"select variable out of scope: {var!r}")
        for var in self.group_vars:
            if var not in self.in_scope:
                raise ValueError(f"grouping variable out of scope: {var!r}")
        for spec in self.aggregations:
            if spec.src not in self.in_scope:
                raise ValueError(f"aggregation source out of scope: {spec.src!r}")
        for var, _ in self.order:
            if var not in visible:
                raise ValueError(f"order variable out of scope: {var!r}")
        for clause in self.filters:
            for col, cond in clause.conditions():
                if isinstance(cond, FunctionTest) and cond.name == "raw":
                    continue
                if col not in self.in_scope:
                    raise ValueError(f"filter variable out of scope: {col!r}")
        for branch in self.union_branches:
            branch.validate()
        for sub in self.subqueries:
            sub.validate()
        for block in self.optionals:
            for sub in block.subqueries:
                sub.validate()

    def to_tree(self, indent: int = 0) -> str:
        """Stable human-readable tree rendering for debugging and tests."""
        pad = "  " * indent
        lines = [f"{pad}model"]

        def add(label: str, value: str) -> None:
            lines.append(f"{pad}  {label}: {value}")

        add("select", ("DISTINCT " if self.distinct else "") + (
            " ".join(self.select_vars) if self.select_vars else "*"
        ))
        if self.from_graphs:
            add("from", " ".join(g.text for g in self.from_graphs))
        for entry in self.patterns:
            add("pattern", _pattern_text(entry))
        for clause in self.filters:
            add("filter", _clause_text(clause))
        for sub in self.subqueries:
            lines.append(f"{pad}  subquery:")
            lines.append(sub.to_tree(indent + 2))
        for block in self.optionals:
            lines.append(f"{pad}  optional:")
            for entry in block.patterns:
                lines.append(f"{pad}    pattern: {_pattern_text(entry)}")
            for clause in block.filters:
                lines.append(f"{pad}    filter: {_clause_text(clause)}")
            for sub in block.subqueries:
                lines.append(f"{pad}    subquery:")
                lines.append(sub.to_tree(indent + 3))
        for branch in self.union_branches:
            lines.append(f"{pad}  union-branch:")
            lines.append(branch.to_tree(indent + 2))
        if self.group_vars:
            add("group-by", " ".join(self.group_vars))
        for spec in self.aggregations:
            distinct = "DISTINCT " if spec.distinct else ""
            add("aggregation", f"{spec.fn}({distinct}{spec.src}) -> {spec.target}")
        for spec, cond in self.having:
            add("having", f"{spec.fn}({spec.src}) {cond}")
        if self.order:
            add("order", " ".join(f"{v}:{d}" for v, d in self.order))
        if self.limit is not None:
            add("limit", str(self.limit))
        if self.offset is not None:
            add("offset", str(self.offset))
        return "\n".join(lines)

    def structurally_equal(self, other: "QueryModel") -> bool:
        return self.to_tree() == other.to_tree()


def ordered_vars(names: Set[str]) -> List[str]:
    return sorted(names)


def _pattern_text(entry: PatternEntry) -> str:
    from .emitter import render_pattern_term

    s, p, o = entry.pattern
    return (
        f"{render_pattern_term(s)} {render_pattern_term(p)} "
        f"{render_pattern_term(o)} @ {entry.graph.text}"
    )


def _clause_text(clause: FilterClause) -> str:
    parts = []
    for col, cond in clause.conditions():
        parts.append(f"{col} {cond}")
    return " && ".join(parts)


# ============================================================================
# Model operations
# ============================================================================


def new_model() -> QueryModel:
    return QueryModel()


def pattern_vars(pattern: TriplePattern) -> List[str]:
    return [p for p in pattern if is_variable(p)]


def add_triple(model: QueryModel, pattern: TriplePattern, graph: Iri) -> None:
    model.patterns.append(PatternEntry(pattern, graph))
    model.in_scope.update(pattern_vars(pattern))


def add_filter(model: QueryModel, clause: FilterClause) -> None:
    for col, cond in clause.conditions():
        if isinstance(cond, FunctionTest) and cond.name == "raw":
            continue
        if col not in model.in_scope:
            raise ValueError(f"filter variable out of scope: {col!r}")
        if isinstance(cond, Compare) and isinstance(cond.operand, str):
            if cond.operand not in model.in_scope:
                raise ValueError(f"filter operand out of scope: {cond.operand!r}")
    model.filters.append(clause)


def add_optional_block(model: QueryModel, block: PatternGroup) -> None:
    if block.is_empty():
        raise ValueError("optional block must contain a pattern or subquery")
    model.optionals.append(block)
    for entry in block.patterns:
        model.in_scope.update(pattern_vars(entry.pattern))
    for sub in block.subqueries:
        model.in_scope.update(sub.visible_vars())


def add_subquery(model: QueryModel, inner: QueryModel) -> None:
    model.subqueries.append(inner)
    model.in_scope.update(inner.visible_vars())


def set_grouping(
    model: QueryModel, group_vars: Sequence[str], aggregations: Sequence[AggregationSpec]
) -> None:
    if model.is_grouped():
        raise ValueError("grouping already set on this model")
    model.group_vars = list(group_vars)
    model.aggregations = list(aggregations)
    model.in_scope.update(a.target for a in aggregations)
    # A distinct-flagged aggregation renders as a distinct selection of the
    # grouped result; grouping keys are unique so this is sound.
    model.distinct = any(a.distinct for a in aggregations)


def add_aggregation(model: QueryModel, spec: AggregationSpec) -> None:
    model.aggregations.append(spec)
    model.in_scope.add(spec.target)
    model.distinct = model.distinct or spec.distinct


def add_having(model: QueryModel, spec: AggregationSpec, condition: Condition) -> None:
    if not model.is_grouped():
        raise ValueError("having requires a grouped model")
    model.having.append((spec, condition))


def set_modifiers(
    model: QueryModel,
    order: Optional[Sequence[Tuple[str, str]]] = None,
    limit: Optional[int] = None,
    offset: Optional[int] = None,
) -> None:
    if limit is not None:
        if limit < 0:
            raise ValueError("limit must be non-negative")
        model.limit = limit
    if offset is not None:
        if offset < 0:
            raise ValueError("offset must be non-negative")
        model.offset = offset
    if order is not None:
        model.order = list(order)


def wrap_as_subquery(inner: QueryModel) -> QueryModel:
    """A fresh outer model whose only content is ``inner`` as a subquery.

    The outer scope sees exactly the inner SELECT list; the inner model
    keeps its aggregations and modifiers.
    """
    outer = QueryModel()
    outer.prefixes = dict(inner.prefixes)
    outer.from_graphs = list(inner.from_graphs)
    outer.subqueries.append(inner)
    outer.in_scope = set(inner.visible_vars())
    return outer


def union_models(a: QueryModel, b: QueryModel) -> QueryModel:
    """A union node over two branch models with equal visible variables."""
    a_vars, b_vars = a.visible_vars(), b.visible_vars()
    if set(a_vars) != set(b_vars):
        raise ValueError("union branches must expose the same variables")
    node = QueryModel()
    node.prefixes = {**b.prefixes, **a.prefixes}
    node.from_graphs = list(a.from_graphs) + [
        g for g in b.from_graphs if g not in a.from_graphs
    ]
    node.union_branches = [a, b]
    node.in_scope = set(a_vars)
    return node


def merge_models(a: QueryModel, b: QueryModel) -> QueryModel:
    """Combine two non-grouped models into one: a's components first.

    When both models carry a limit/offset, the merged model keeps the
    maximum limit and the minimum offset.
    """
    if a.is_grouped() or b.is_grouped():
        raise ValueError("cannot merge a grouped model; nest it instead")
    merged = QueryModel()
    merged.prefixes = {**b.prefixes, **a.prefixes}
    merged.from_graphs = list(a.from_graphs) + [
        g for g in b.from_graphs if g not in a.from_graphs
    ]
    merged.patterns = a.patterns + b.patterns
    merged.filters = a.filters + b.filters
    merged.optionals = a.optionals + b.optionals
    merged.subqueries = a.subqueries + b.subqueries
    merged.union_branches = a.union_branches + b.union_branches
    merged.in_scope = a.in_scope | b.in_scope
    if a.select_vars or b.select_vars:
        seen = list(a.select_vars) or a.visible_vars()
        merged.select_vars = seen + [
            v for v in (b.select_vars or b.visible_vars()) if v not in seen
        ]
    if a.limit is not None and b.limit is not None:
        merged.limit = max(a.limit, b.limit)
    else:
        merged.limit = a.limit if a.limit is not None else b.limit
    if a.offset is not None and b.offset is not None:
        merged.offset = min(a.offset, b.offset)
    else:
        merged.offset = a.offset if a.offset is not None else b.offset
    merged.order = a.order + b.order
    return merged


def rename_variable(model: QueryModel, old: str, new: str) -> None:
    """Rename a visible variable throughout the model tree.

    Recurses into a nested model only when the variable is part of its
    exposed SELECT list; hidden inner variables of the same name belong
    to a different scope and are left alone.
    """
    if old == new:
        return
    model.patterns = [
        PatternEntry(_rename_pattern(e.pattern, old, new), e.graph)
        for e in model.patterns
    ]
    model.filters = [_rename_clause(c, old, new) for c in model.filters]
    for block in model.optionals:
        block.patterns = [
            PatternEntry(_rename_pattern(e.pattern, old, new), e.graph)
            for e in block.patterns
        ]
        block.filters = [_rename_clause(c, old, new) for c in block.filters]
        for sub in block.subqueries:
            if old in sub.visible_vars():
                rename_variable(sub, old, new)
    for sub in model.subqueries:
        if old in sub.visible_vars():
            rename_variable(sub, old, new)
    for branch in model.union_branches:
        if old in branch.visible_vars():
            rename_variable(branch, old, new)
    model.select_vars = [new if v == old else v for v in model.select_vars]
    model.group_vars = [new if v == old else v for v in model.group_vars]
    for spec in model.aggregations:
        if spec.src == old:
            spec.src = new
        if spec.target == old:
            spec.target = new
    model.having = [
        (spec, _rename_condition(cond, old, new)) for spec, cond in model.having
    ]
    model.order = [(new if v == old else v, d) for v, d in model.order]
    if old in model.in_scope:
        model.in_scope.discard(old)
        model.in_scope.add(new)


def _rename_pattern(pattern: TriplePattern, old: str, new: str) -> TriplePattern:
    return tuple(new if p == old else p for p in pattern)  # type: ignore[return-value]


def _rename_clause(clause: FilterClause, old: str, new: str) -> FilterClause:
    parts = tuple(
        (
            new if col == old else col,
            tuple(_rename_condition(c, old, new) for c in conds),
        )
        for col, conds in clause.parts
    )
    return FilterClause(parts)


def _rename_condition(cond: Condition, old: str, new: str) -> Condition:
    if isinstance(cond, Compare) and cond.operand == old:
        return Compare(cond.op, new)
    return cond
