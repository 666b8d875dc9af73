"""Query model invariants: scope tracking, nesting, merging, renaming."""

import pytest

from kgframes.conditions import Compare, FunctionTest
from kgframes.querymodel import (
    AggregationSpec,
    FilterClause,
    PatternGroup,
    QueryModel,
    add_aggregation,
    add_filter,
    add_having,
    add_optional_block,
    add_subquery,
    add_triple,
    merge_models,
    new_model,
    rename_variable,
    set_grouping,
    set_modifiers,
    union_models,
    wrap_as_subquery,
)
from kgframes.terms import Iri

G = Iri("http://g")


def clause(col, *conds):
    return FilterClause(((col, tuple(conds)),))


def simple_model(*variables):
    model = new_model()
    for var in variables:
        add_triple(model, (var, Iri("http://p"), var + "_val"), G)
    return model


def test_add_triple_tracks_scope():
    model = simple_model("a")
    assert model.in_scope == {"a", "a_val"}
    assert model.visible_vars() == ["a", "a_val"]


def test_visible_vars_precedence():
    model = simple_model("a")
    set_grouping(model, ["a"], [AggregationSpec("count", "a_val", "n")])
    assert model.visible_vars() == ["a", "n"]
    model.select_vars = ["n"]
    assert model.visible_vars() == ["n"]


def test_add_filter_checks_scope():
    model = simple_model("a")
    add_filter(model, clause("a", Compare(">=", 1)))
    with pytest.raises(ValueError):
        add_filter(model, clause("ghost", Compare(">=", 1)))
    with pytest.raises(ValueError):
        add_filter(model, clause("a", Compare("=", "ghost_operand")))
    # Raw conditions mention variables we cannot see; they are trusted.
    add_filter(model, clause("a", FunctionTest("raw", ("?anything > 1",))))


def test_optional_block_contributes_scope():
    model = simple_model("a")
    block = PatternGroup(patterns=[], filters=[])
    with pytest.raises(ValueError):
        add_optional_block(model, block)
    inner = simple_model("b")
    add_optional_block(model, PatternGroup(subqueries=[inner]))
    assert "b" in model.in_scope


def test_wrap_as_subquery_narrows_scope_to_the_select_list():
    inner = simple_model("a")
    inner.select_vars = ["a"]
    inner.prefixes = {"ex": "http://e/"}
    inner.from_graphs = [G]
    outer = wrap_as_subquery(inner)
    assert outer.in_scope == {"a"}
    assert outer.subqueries == [inner]
    assert outer.prefixes == {"ex": "http://e/"}
    assert outer.from_graphs == [G]


def test_grouping_cannot_be_set_twice():
    model = simple_model("a")
    set_grouping(model, ["a"], [])
    with pytest.raises(ValueError):
        set_grouping(model, ["a"], [])


def test_distinct_follows_aggregation_flags():
    model = simple_model("a")
    set_grouping(model, ["a"], [AggregationSpec("count", "a_val", "n", distinct=True)])
    assert model.distinct
    other = simple_model("b")
    set_grouping(other, ["b"], [AggregationSpec("count", "b_val", "n")])
    assert not other.distinct
    add_aggregation(other, AggregationSpec("sum", "b_val", "s", distinct=True))
    assert other.distinct


def test_having_requires_grouping():
    model = simple_model("a")
    with pytest.raises(ValueError):
        add_having(model, AggregationSpec("count", "a_val", "n"), Compare(">=", 1))


def test_modifiers_validated():
    model = simple_model("a")
    set_modifiers(model, limit=0)
    assert model.limit == 0
    set_modifiers(model, order=[("a", "desc")], limit=5, offset=2)
    assert (model.order, model.limit, model.offset) == ([("a", "desc")], 5, 2)
    with pytest.raises(ValueError):
        set_modifiers(model, limit=-1)
    with pytest.raises(ValueError):
        set_modifiers(model, offset=-1)


def test_union_requires_equal_visible_variables():
    with pytest.raises(ValueError):
        union_models(simple_model("a"), simple_model("b"))
    left, right = simple_model("a"), simple_model("a")
    node = union_models(left, right)
    assert node.union_branches == [left, right]
    assert node.in_scope == {"a", "a_val"}


def test_merge_concatenates_left_components_first():
    left, right = simple_model("a"), simple_model("b")
    add_filter(left, clause("a", Compare(">=", 1)))
    merged = merge_models(left, right)
    assert merged.patterns == left.patterns + right.patterns
    assert merged.filters == left.filters
    assert merged.in_scope == {"a", "a_val", "b", "b_val"}


def test_merge_keeps_max_limit_and_min_offset():
    left, right = simple_model("a"), simple_model("a")
    set_modifiers(left, limit=10, offset=5)
    set_modifiers(right, limit=20, offset=2)
    merged = merge_models(left, right)
    assert (merged.limit, merged.offset) == (20, 2)


def test_merge_takes_the_only_limit_present():
    left, right = simple_model("a"), simple_model("a")
    set_modifiers(right, limit=7)
    merged = merge_models(left, right)
    assert (merged.limit, merged.offset) == (7, None)


def test_merge_rejects_grouped_models():
    grouped = simple_model("a")
    set_grouping(grouped, ["a"], [])
    with pytest.raises(ValueError):
        merge_models(grouped, simple_model("b"))


def test_merge_unions_explicit_select_lists():
    left, right = simple_model("a"), simple_model("b")
    left.select_vars = ["a"]
    merged = merge_models(left, right)
    assert merged.select_vars == ["a", "b", "b_val"]


def test_rename_reaches_patterns_filters_and_modifiers():
    model = simple_model("a")
    add_filter(model, clause("a", Compare("=", "a_val")))
    set_modifiers(model, order=[("a", "asc")])
    model.select_vars = ["a", "a_val"]
    rename_variable(model, "a", "renamed")
    assert model.patterns[0].pattern[0] == "renamed"
    assert model.filters[0].parts[0][0] == "renamed"
    assert model.order == [("renamed", "asc")]
    assert model.select_vars == ["renamed", "a_val"]
    assert "renamed" in model.in_scope and "a" not in model.in_scope


def test_rename_skips_hidden_inner_variables():
    inner = simple_model("a")
    inner.select_vars = ["a_val"]
    outer = wrap_as_subquery(inner)
    rename_variable(outer, "a", "renamed")
    assert inner.patterns[0].pattern[0] == "a"
    inner_exposed = simple_model("a")
    outer2 = wrap_as_subquery(inner_exposed)
    rename_variable(outer2, "a", "renamed")
    assert inner_exposed.patterns[0].pattern[0] == "renamed"


def test_validate_catches_out_of_scope_references():
    model = simple_model("a")
    model.select_vars = ["ghost"]
    with pytest.raises(ValueError):
        model.validate()
    ok = simple_model("a")
    set_grouping(ok, ["a"], [AggregationSpec("count", "a_val", "n")])
    ok.select_vars = ["a", "n"]
    ok.validate()


def test_structural_equality_via_tree_text():
    left, right = simple_model("a"), simple_model("a")
    assert left.structurally_equal(right)
    add_filter(right, clause("a", Compare(">=", 1)))
    assert not left.structurally_equal(right)
