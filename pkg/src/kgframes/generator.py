"""Translation of recorded operator queues into query models.

``generate`` folds a frame's queue into a single model, nesting a
subquery only where flattening would change meaning: expanding or
filtering a grouping column after a grouping, joining with a grouped
frame, and full outer joins (a union of the two one-sided outer
joins). ``naive_generate`` is the contrast baseline: one subquery per
navigational operator, joins always nesting both sides.
"""

from __future__ import annotations

import copy
from typing import Dict, Iterable, List, Optional, Set, Tuple

from .conditions import Compare, FunctionTest
from .frames import (
    HAVING,
    INCOMING,
    Aggregate,
    Aggregation,
    Expand,
    Filter,
    FrameDescriptor,
    GroupBy,
    Head,
    InnerJoin,
    Join,
    LeftOuterJoin,
    OuterJoin,
    RightOuterJoin,
    Seed,
    SelectCols,
    Sort,
)
from .querymodel import (
    AggregationSpec,
    FilterClause,
    PatternEntry,
    PatternGroup,
    QueryModel,
    TriplePattern,
    add_aggregation,
    add_filter,
    add_having,
    add_optional_block,
    add_subquery,
    add_triple,
    merge_models,
    new_model,
    pattern_vars,
    rename_variable,
    set_grouping,
    set_modifiers,
    union_models,
    wrap_as_subquery,
)
from .terms import Iri


def generate(frame: FrameDescriptor) -> QueryModel:
    """Build the optimized query model for a recorded frame."""
    model = _build(frame)
    _prune(model, None)
    model.validate()
    return model


def _build(frame: FrameDescriptor) -> QueryModel:
    if not frame.queue:
        raise ValueError("frame records no operators")
    model = new_model()
    model.prefixes = dict(frame.prefixes)
    model.from_graphs = list(frame.graphs)
    home = frame.graphs[0]
    for record in frame.queue:
        model = _apply(record, model, home)
    return model


def _apply(record, model: QueryModel, home: Iri) -> QueryModel:
    if isinstance(record, Seed):
        add_triple(model, (record.subject, record.predicate, record.object), home)
        return model
    if isinstance(record, Expand):
        return _apply_expand(record, model, home)
    if isinstance(record, Filter):
        return _apply_filter(record, model)
    if isinstance(record, SelectCols):
        model.select_vars = list(record.cols)
        return model
    if isinstance(record, Join):
        return _apply_join(record, model)
    if isinstance(record, GroupBy):
        if model.is_grouped():
            model = wrap_as_subquery(model)
        model.select_vars = []
        set_grouping(model, record.cols, [])
        return model
    if isinstance(record, Aggregation):
        spec = AggregationSpec(record.fn, record.col, record.new_col, record.distinct)
        if model.is_grouped():
            add_aggregation(model, spec)
        else:
            set_grouping(model, [], [spec])
        return model
    if isinstance(record, Aggregate):
        if model.is_grouped() or model.has_modifiers():
            model = wrap_as_subquery(model)
        model.select_vars = []
        spec = AggregationSpec(record.fn, record.col, record.new_col, record.distinct)
        set_grouping(model, [], [spec])
        return model
    if isinstance(record, Sort):
        set_modifiers(model, order=record.keys)
        return model
    if isinstance(record, Head):
        set_modifiers(
            model, limit=record.limit, offset=record.offset if record.offset else None
        )
        return model
    raise TypeError(f"unknown operator record: {record!r}")


def _apply_expand(record: Expand, model: QueryModel, home: Iri) -> QueryModel:
    # Expanding a grouping or aggregation column continues navigation
    # from the grouped result, so the grouped model becomes a subquery.
    if model.is_grouped():
        model = wrap_as_subquery(model)
    else:
        model = _close_projection(model)
    if record.direction == INCOMING:
        pattern: TriplePattern = (record.new_col, record.predicate, record.col)
    else:
        pattern = (record.col, record.predicate, record.new_col)
    if record.optional:
        block = PatternGroup(patterns=[PatternEntry(pattern, home)])
        add_optional_block(model, block)
    else:
        add_triple(model, pattern, home)
    if model.select_vars:
        model.select_vars.append(record.new_col)
    return model


def _apply_filter(record: Filter, model: QueryModel) -> QueryModel:
    # Marks from record time are applied contextually: a HAVING mark only
    # holds while the current model is still the grouped one.
    plain_entries = []
    if model.is_grouped():
        targets = {a.target: a for a in model.aggregations}
        for entry in record.entries:
            if entry.kind == HAVING and entry.col in targets:
                for cond in entry.conditions:
                    add_having(model, targets[entry.col], cond)
            else:
                plain_entries.append(entry)
    else:
        plain_entries = list(record.entries)
    if not plain_entries:
        return model
    if model.is_grouped():
        model = wrap_as_subquery(model)
    clause = FilterClause(tuple((e.col, e.conditions) for e in plain_entries))
    add_filter(model, clause)
    return model


def _apply_join(record: Join, model: QueryModel) -> QueryModel:
    other = _build(record.other)
    model = _close_projection(model)
    other = _close_projection(other)
    rename_variable(model, record.col, record.new_col)
    rename_variable(other, record.other_col, record.new_col)
    if record.jtype == InnerJoin:
        return _inner_join(model, other)
    if record.jtype == LeftOuterJoin:
        return _left_join(model, other)
    if record.jtype == RightOuterJoin:
        return _left_join(other, model)
    if record.jtype == OuterJoin:
        return _full_outer_join(model, other)
    raise ValueError(f"unknown join type: {record.jtype!r}")


def _close_projection(model: QueryModel) -> QueryModel:
    """Seal a projection that hides in-scope variables into a subquery.

    Later operators merge patterns into the surrounding group, where a
    hidden variable would otherwise still be bound and could capture a
    reused name. A projection that keeps everything only fixes column
    order, so the model may keep growing in place.
    """
    if model.select_vars and model.in_scope - set(model.select_vars):
        return wrap_as_subquery(model)
    return model


def _extend_select(model: QueryModel, exposed: Iterable[str]) -> None:
    """Keep an explicit SELECT list complete as the scope gains columns."""
    if model.select_vars:
        model.select_vars.extend(
            v for v in exposed if v not in model.select_vars
        )


def _inner_join(left: QueryModel, right: QueryModel) -> QueryModel:
    if not left.is_grouped() and not right.is_grouped():
        return merge_models(left, right)
    if left.is_grouped() and right.is_grouped():
        outer = new_model()
        _merge_env(outer, left, right)
        add_subquery(outer, left)
        add_subquery(outer, right)
        return outer
    if right.is_grouped():
        _merge_env(left, right)
        add_subquery(left, right)
        _extend_select(left, right.visible_vars())
        return left
    # Left side grouped: it nests inside the right model, listed first.
    _merge_env(right, left)
    right.subqueries.insert(0, left)
    right.in_scope.update(left.visible_vars())
    _extend_select(right, left.visible_vars())
    return right


def _left_join(left: QueryModel, right: QueryModel) -> QueryModel:
    if left.is_grouped():
        left = wrap_as_subquery(left)
    _merge_env(left, right)
    add_optional_block(left, _as_optional_block(right))
    _extend_select(left, right.visible_vars())
    return left


def _as_optional_block(model: QueryModel) -> PatternGroup:
    flat = (
        not model.is_grouped()
        and not model.select_vars
        and not model.optionals
        and not model.subqueries
        and not model.union_branches
        and not model.has_modifiers()
    )
    if flat:
        return PatternGroup(patterns=list(model.patterns), filters=list(model.filters))
    return PatternGroup(subqueries=[model])


def _full_outer_join(left: QueryModel, right: QueryModel) -> QueryModel:
    left2 = copy.deepcopy(left)
    right2 = copy.deepcopy(right)
    branch1 = new_model()
    _merge_env(branch1, left, right)
    add_subquery(branch1, left)
    add_optional_block(branch1, PatternGroup(subqueries=[right]))
    branch2 = new_model()
    _merge_env(branch2, right2, left2)
    add_subquery(branch2, right2)
    add_optional_block(branch2, PatternGroup(subqueries=[left2]))
    return union_models(branch1, branch2)


def _merge_env(target: QueryModel, *sources: QueryModel) -> None:
    for source in sources:
        for name, ns in source.prefixes.items():
            target.prefixes.setdefault(name, ns)
        for graph in source.from_graphs:
            if graph not in target.from_graphs:
                target.from_graphs.append(graph)


# ============================================================================
# Projection pruning
# ============================================================================


def _prune(model: QueryModel, needed: Optional[Set[str]]) -> None:
    """Drop aggregation targets no enclosing scope refers to.

    ``needed`` is the set of variables the parent may reference, or None
    when the parent exposes everything (SELECT *). Grouping variables
    are always kept so the grouped result stays joinable.
    """
    if model.is_grouped():
        visible = model.visible_vars()
        kept = [
            v
            for v in visible
            if v in model.group_vars or needed is None or v in needed
        ]
        if kept and kept != visible:
            model.select_vars = kept
    child_needed = _needed_for_children(model)
    children = list(model.subqueries)
    for block in model.optionals:
        children.extend(block.subqueries)
    for child in children:
        if child_needed is None:
            _prune(child, None)
            continue
        # A variable exposed by one sibling can be join glue for another.
        sibling_vars: Set[str] = set()
        for sibling in children:
            if sibling is not child:
                sibling_vars.update(sibling.visible_vars())
        _prune(child, child_needed | sibling_vars)
    for branch in model.union_branches:
        _prune(branch, child_needed)


def _needed_for_children(model: QueryModel) -> Optional[Set[str]]:
    if not model.select_vars and not model.is_grouped():
        return None
    needed: Set[str] = set(model.select_vars or model.visible_vars())
    for entry in model.patterns:
        needed.update(pattern_vars(entry.pattern))
    for clause in model.filters:
        needed.update(_clause_vars(clause))
    for block in model.optionals:
        for entry in block.patterns:
            needed.update(pattern_vars(entry.pattern))
        for clause in block.filters:
            needed.update(_clause_vars(clause))
    needed.update(model.group_vars)
    needed.update(a.src for a in model.aggregations)
    needed.update(spec.src for spec, _ in model.having)
    needed.update(v for v, _ in model.order)
    return needed


def _clause_vars(clause: FilterClause) -> Iterable[str]:
    for col, cond in clause.conditions():
        yield col
        if isinstance(cond, Compare) and isinstance(cond.operand, str):
            yield cond.operand


# ============================================================================
# Measurement
# ============================================================================


def subquery_count(model: QueryModel) -> int:
    """Number of subquery nodes anywhere in the model tree.

    Union branches themselves are groups, not subqueries, but nodes
    nested inside them are counted.
    """
    count = len(model.subqueries)
    for sub in model.subqueries:
        count += subquery_count(sub)
    for block in model.optionals:
        count += len(block.subqueries)
        for sub in block.subqueries:
            count += subquery_count(sub)
    for branch in model.union_branches:
        count += subquery_count(branch)
    return count


# ============================================================================
# Naive generation
# ============================================================================


def naive_generate(frame: FrameDescriptor) -> QueryModel:
    """One subquery per navigational operator, without flattening.

    Each seed and expand becomes its own nested SELECT; a filter whose
    column's defining pattern is still fully visible re-derives that
    pattern in a nested SELECT of its own; joins nest both sides. The
    result is equivalent to the optimized query, only deeper.
    """
    model = _naive_build(frame)
    model.validate()
    return model


def _naive_build(frame: FrameDescriptor) -> QueryModel:
    if not frame.queue:
        raise ValueError("frame records no operators")
    builder = _NaiveBuilder(frame)
    for record in frame.queue:
        builder.apply(record)
    return builder.outer


class _NaiveBuilder:
    def __init__(self, frame: FrameDescriptor):
        self.home = frame.graphs[0]
        self.outer = new_model()
        self.outer.prefixes = dict(frame.prefixes)
        self.outer.from_graphs = list(frame.graphs)
        # col -> (defining pattern, graph, born optional)
        self.defs: Dict[str, Tuple[TriplePattern, Iri, bool]] = {}
        self.visible: Set[str] = set()
        self.group: Optional[QueryModel] = None
        self.post_group = False

    # -- leaf plumbing --------------------------------------------------------

    def _leaf(self, pattern: TriplePattern, graph: Iri) -> QueryModel:
        leaf = new_model()
        add_triple(leaf, pattern, graph)
        leaf.select_vars = pattern_vars(pattern)
        return leaf

    def _define(self, pattern: TriplePattern, graph: Iri, optional: bool) -> None:
        for var in pattern_vars(pattern):
            self.defs.setdefault(var, (pattern, graph, optional))
            self.visible.add(var)

    def _fresh_outer(self) -> QueryModel:
        fresh = new_model()
        fresh.prefixes = dict(self.outer.prefixes)
        fresh.from_graphs = list(self.outer.from_graphs)
        return fresh

    def _close_projection(self) -> None:
        """Seal a projection that hides scope variables into one more
        nesting level, mirroring the optimized route's boundary."""
        hidden = self.outer.in_scope - set(self.outer.select_vars)
        if self.outer.select_vars and hidden:
            sealed = self.outer
            self.outer = self._fresh_outer()
            add_subquery(self.outer, sealed)
            self.defs = {}
            self.group = None
            self.post_group = False

    # -- operators --------------------------------------------------------------

    def apply(self, record) -> None:
        if isinstance(record, Seed):
            pattern = (record.subject, record.predicate, record.object)
            add_subquery(self.outer, self._leaf(pattern, self.home))
            self._define(pattern, self.home, optional=False)
        elif isinstance(record, Expand):
            self._apply_expand(record)
        elif isinstance(record, Filter):
            self._apply_filter(record)
        elif isinstance(record, SelectCols):
            self.outer.select_vars = list(record.cols)
            self.visible = set(record.cols)
        elif isinstance(record, Join):
            self._apply_join(record)
        elif isinstance(record, GroupBy):
            self._wrap_grouped(record.cols, [])
        elif isinstance(record, Aggregation):
            spec = AggregationSpec(record.fn, record.col, record.new_col, record.distinct)
            assert self.group is not None
            add_aggregation(self.group, spec)
            self.outer.in_scope.add(spec.target)
            self.visible.add(spec.target)
        elif isinstance(record, Aggregate):
            spec = AggregationSpec(record.fn, record.col, record.new_col, record.distinct)
            self._wrap_grouped((), [spec])
            self.visible = {spec.target}
        elif isinstance(record, Sort):
            set_modifiers(self.outer, order=record.keys)
        elif isinstance(record, Head):
            set_modifiers(
                self.outer,
                limit=record.limit,
                offset=record.offset if record.offset else None,
            )
        else:
            raise TypeError(f"unknown operator record: {record!r}")

    def _apply_expand(self, record: Expand) -> None:
        self._close_projection()
        if record.direction == INCOMING:
            pattern: TriplePattern = (record.new_col, record.predicate, record.col)
        else:
            pattern = (record.col, record.predicate, record.new_col)
        leaf = self._leaf(pattern, self.home)
        if record.optional:
            add_optional_block(self.outer, PatternGroup(subqueries=[leaf]))
        else:
            add_subquery(self.outer, leaf)
        self._define(pattern, self.home, optional=record.optional)
        if self.outer.select_vars:
            self.outer.select_vars.append(record.new_col)

    def _apply_filter(self, record: Filter) -> None:
        for entry in record.entries:
            if self._filter_as_subquery(entry.col):
                pattern, graph, _ = self.defs[entry.col]
                leaf = self._leaf(pattern, graph)
                add_filter(leaf, FilterClause(((entry.col, entry.conditions),)))
                add_subquery(self.outer, leaf)
            else:
                add_filter(
                    self.outer, FilterClause(((entry.col, entry.conditions),))
                )

    def _filter_as_subquery(self, col: str) -> bool:
        if self.post_group or col not in self.defs:
            return False
        pattern, _, optional = self.defs[col]
        if optional:
            return False
        return all(v in self.visible for v in pattern_vars(pattern))

    def _wrap_grouped(self, cols, specs) -> None:
        grouped = self.outer
        grouped.select_vars = []
        set_grouping(grouped, cols, specs)
        self.outer = self._fresh_outer()
        add_subquery(self.outer, grouped)
        self.group = grouped
        self.post_group = True
        self.visible = set(cols) | {spec.target for spec in specs}

    def _apply_join(self, record: Join) -> None:
        other = _naive_build(record.other)
        rename_variable(self.outer, record.col, record.new_col)
        rename_variable(other, record.other_col, record.new_col)
        mine = {record.new_col if v == record.col else v for v in self.visible}
        theirs = {
            record.new_col if v == record.other_col else v
            for v in record.other.columns
        }
        left, right = self.outer, other
        if record.jtype == InnerJoin:
            fresh = self._fresh_outer()
            _merge_env(fresh, right)
            add_subquery(fresh, left)
            add_subquery(fresh, right)
        elif record.jtype in (LeftOuterJoin, RightOuterJoin):
            if record.jtype == RightOuterJoin:
                left, right = right, left
            fresh = self._fresh_outer()
            _merge_env(fresh, left, right)
            add_subquery(fresh, left)
            add_optional_block(fresh, PatternGroup(subqueries=[right]))
        elif record.jtype == OuterJoin:
            left2 = copy.deepcopy(left)
            right2 = copy.deepcopy(right)
            branch1 = self._fresh_outer()
            _merge_env(branch1, right)
            add_subquery(branch1, left)
            add_optional_block(branch1, PatternGroup(subqueries=[right]))
            branch2 = self._fresh_outer()
            _merge_env(branch2, right2)
            add_subquery(branch2, right2)
            add_optional_block(branch2, PatternGroup(subqueries=[left2]))
            fresh = union_models(branch1, branch2)
        else:
            raise ValueError(f"unknown join type: {record.jtype!r}")
        self.outer = fresh
        self.defs = {}
        self.group = None
        self.post_group = False
        self.visible = mine | theirs
