"""Solution-mapping evaluation of query models over local stores.

The second reference route: a query model is lowered onto bag-semantics
operators over solution mappings (join, left join, union, filter,
extend, project, distinct, grouping with aggregation), mirroring how an
engine evaluates the emitted query. Mappings are partial: an unbound
variable is simply absent, and only turns into a null cell when the bag
is flattened to a table.
"""

from __future__ import annotations

from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

from .aggregates import ERROR, apply_aggregation
from .conditions import eval_condition
from .querymodel import AggregationSpec, FilterClause, PatternEntry, QueryModel
from .store import GraphStore
from .tables import ResultTable, row_sort_key
from .terms import Iri, sort_key

Solution = Dict[str, object]
SolutionBag = List[Tuple[Solution, int]]
ConditionFn = Callable[[Solution], bool]


def unit_bag() -> SolutionBag:
    return [({}, 1)]


def compatible(a: Solution, b: Solution) -> bool:
    """Mappings agree on every shared variable."""
    for var, value in a.items():
        if var in b and b[var] != value:
            return False
    return True


def pattern_bag(entry: PatternEntry, stores: Mapping[str, GraphStore]) -> SolutionBag:
    store = _store_for(entry.graph, stores)
    return [(binding, 1) for binding in store.match(entry.pattern)]


def join_bags(a: SolutionBag, b: SolutionBag) -> SolutionBag:
    out: SolutionBag = []
    for mu1, m1 in a:
        for mu2, m2 in b:
            if compatible(mu1, mu2):
                out.append(({**mu1, **mu2}, m1 * m2))
    return out


def left_join_bags(
    a: SolutionBag, b: SolutionBag, condition: Optional[ConditionFn] = None
) -> SolutionBag:
    """Join where unmatched left mappings survive unextended.

    A left mapping also survives when every compatible right mapping
    fails the condition.
    """
    out: SolutionBag = []
    for mu1, m1 in a:
        matched = False
        for mu2, m2 in b:
            if compatible(mu1, mu2):
                merged = {**mu1, **mu2}
                if condition is None or condition(merged):
                    matched = True
                    out.append((merged, m1 * m2))
        if not matched:
            out.append((dict(mu1), m1))
    return out


def union_bags(a: SolutionBag, b: SolutionBag) -> SolutionBag:
    return list(a) + list(b)


def filter_bag(bag: SolutionBag, condition: ConditionFn) -> SolutionBag:
    return [(mu, m) for mu, m in bag if condition(mu)]


def extend_bag(bag: SolutionBag, target: str, source: str) -> SolutionBag:
    """Bind ``target`` to the value of ``source``; an unbound source is
    an evaluation error, which keeps the mapping unextended."""
    out: SolutionBag = []
    for mu, m in bag:
        if target in mu:
            raise ValueError(f"extend target already bound: {target!r}")
        if source in mu:
            out.append(({**mu, target: mu[source]}, m))
        else:
            out.append((dict(mu), m))
    return out


def project_bag(bag: SolutionBag, variables: Sequence[str]) -> SolutionBag:
    """Restrict mappings to ``variables``, summing multiplicities."""
    keep = list(variables)
    merged: Dict[frozenset, Tuple[Solution, int]] = {}
    for mu, m in bag:
        projected = {v: mu[v] for v in keep if v in mu}
        key = _solution_key(projected)
        if key in merged:
            merged[key] = (merged[key][0], merged[key][1] + m)
        else:
            merged[key] = (projected, m)
    return list(merged.values())


def distinct_bag(bag: SolutionBag) -> SolutionBag:
    merged: Dict[frozenset, Solution] = {}
    for mu, _ in bag:
        merged.setdefault(_solution_key(mu), mu)
    return [(mu, 1) for mu in merged.values()]


def group_agg_bag(
    bag: SolutionBag,
    group_vars: Sequence[str],
    specs: Sequence[AggregationSpec],
) -> SolutionBag:
    """One mapping per group: group keys plus aggregation results.

    Grouping an empty bag yields an empty bag, also when there are no
    grouping variables. A failing aggregation leaves its result variable
    unbound in that group.
    """
    groups: Dict[Tuple, Tuple[Solution, List[Tuple[Solution, int]]]] = {}
    for mu, m in bag:
        marker = tuple(sort_key(mu.get(v)) for v in group_vars)
        if marker not in groups:
            key = {v: mu[v] for v in group_vars if v in mu}
            groups[marker] = (key, [])
        groups[marker][1].append((mu, m))
    out: SolutionBag = []
    for key, members in groups.values():
        solution = dict(key)
        for spec in specs:
            values: List[object] = []
            for mu, m in members:
                if spec.src in mu:
                    values.extend([mu[spec.src]] * m)
            result = apply_aggregation(spec.fn, values, spec.distinct)
            if result is not ERROR:
                solution[spec.target] = result
        out.append((solution, 1))
    return out


def _solution_key(mu: Solution) -> frozenset:
    return frozenset((v, sort_key(value)) for v, value in mu.items())


def _store_for(graph: Iri, stores: Mapping[str, GraphStore]) -> GraphStore:
    try:
        return stores[graph.text]
    except KeyError:
        raise KeyError(f"no store loaded for graph <{graph.text}>") from None


# ============================================================================
# Model lowering
# ============================================================================


def lower_model(model: QueryModel, stores: Mapping[str, GraphStore]) -> SolutionBag:
    """Evaluate a model's group as a solution bag.

    Patterns, subqueries, and the union group join together; optional
    blocks left-join in order; filters apply over the whole group;
    grouping, having, projection, and distinct follow. Row-order
    modifiers are applied by ``eval_model`` on the flattened table.
    """
    bag = unit_bag()
    for entry in model.patterns:
        bag = join_bags(bag, pattern_bag(entry, stores))
    for sub in model.subqueries:
        bag = join_bags(bag, lower_model(sub, stores))
    if model.union_branches:
        union: SolutionBag = []
        for branch in model.union_branches:
            union = union_bags(union, lower_model(branch, stores))
        bag = join_bags(bag, union)
    for block in model.optionals:
        inner = unit_bag()
        for entry in block.patterns:
            inner = join_bags(inner, pattern_bag(entry, stores))
        for sub in block.subqueries:
            inner = join_bags(inner, lower_model(sub, stores))
        bag = left_join_bags(bag, inner, _block_condition(block.filters))
    for clause in model.filters:
        bag = filter_bag(bag, _clause_condition(clause))
    if model.is_grouped():
        bag = group_agg_bag(bag, model.group_vars, model.aggregations)
        for spec, cond in model.having:
            bag = filter_bag(
                bag, lambda mu, s=spec, c=cond: eval_condition(mu, s.target, c)
            )
    if model.select_vars:
        bag = project_bag(bag, model.select_vars)
    if model.distinct:
        bag = distinct_bag(bag)
    return bag


def _clause_condition(clause: FilterClause) -> ConditionFn:
    def check(mu: Solution) -> bool:
        return all(eval_condition(mu, col, cond) for col, cond in clause.conditions())

    return check


def _block_condition(clauses: Sequence[FilterClause]) -> Optional[ConditionFn]:
    if not clauses:
        return None
    checks = [_clause_condition(clause) for clause in clauses]

    def check(mu: Solution) -> bool:
        return all(c(mu) for c in checks)

    return check


def bag_to_table(bag: SolutionBag, columns: Sequence[str]) -> ResultTable:
    """Flatten a bag: unbound variables become null cells, multiplicity
    becomes row repetition."""
    columns = tuple(columns)
    rows: List[Tuple[object, ...]] = []
    for mu, m in bag:
        row = tuple(mu.get(c) for c in columns)
        rows.extend([row] * m)
    return ResultTable(columns, rows)


def eval_model(model: QueryModel, stores: Mapping[str, GraphStore]) -> ResultTable:
    """Evaluate a query model to a table, applying row-order modifiers."""
    bag = lower_model(model, stores)
    columns = model.visible_vars()
    table = bag_to_table(bag, columns)
    rows = table.rows
    if model.order:
        rows = sorted(rows, key=row_sort_key)
        for var, direction in reversed(model.order):
            if var not in columns:
                raise ValueError(f"order variable out of scope: {var!r}")
            i = columns.index(var)
            rows.sort(key=lambda r: sort_key(r[i]), reverse=direction == "desc")
    if model.offset is not None or model.limit is not None:
        start = model.offset or 0
        stop = None if model.limit is None else start + model.limit
        rows = rows[start:stop]
    return ResultTable(table.columns, rows)
