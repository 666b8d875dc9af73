"""Aggregation kernel, pinned against hand-computed values."""

from kgframes.aggregates import ERROR, apply_aggregation
from kgframes.terms import Iri, Literal


def agg(fn, values, distinct=False):
    return apply_aggregation(fn, values, distinct)


def test_count_counts_bound_values():
    assert agg("count", [1, 1, 2]) == 3
    assert agg("count", []) == 0
    assert agg("count", [1, 1, 2], distinct=True) == 2


def test_sum_over_numbers_and_numeric_literals():
    # 1 + 2 + 2.5 = 5.5; the literal "2" is numeric by lexical form.
    assert agg("sum", [1, Literal("2"), 2.5]) == 5.5
    assert agg("sum", []) == 0.0
    assert agg("sum", [1, Literal("2"), 1], distinct=True) == 3.0


def test_sum_of_non_numeric_input_is_an_error():
    assert agg("sum", [1, Literal("abc")]) is ERROR
    assert agg("sum", [Iri("http://x")]) is ERROR


def test_avg_is_mean_of_numeric_values():
    # (2 + 4) / 2 = 3.0
    assert agg("avg", [2, 4]) == 3.0
    assert agg("avg", [Literal("1"), Literal("2"), Literal("6")]) == 3.0
    assert agg("avg", []) is ERROR
    assert agg("avg", [1, Literal("x")]) is ERROR


def test_min_max_use_the_value_order():
    values = [Literal("10"), 3, Literal("2")]
    assert agg("min", values) == Literal("2")
    assert agg("max", values) == Literal("10")
    assert agg("min", []) is ERROR
    assert agg("max", []) is ERROR


def test_min_max_fall_back_to_text_for_non_numeric_terms():
    values = [Iri("http://b"), Iri("http://a")]
    assert agg("min", values) == Iri("http://a")
    assert agg("max", values) == Iri("http://b")


def test_sample_is_deterministic():
    values = [Iri("http://b"), Iri("http://a"), Iri("http://c")]
    assert agg("sample", values) == agg("sample", list(reversed(values)))
    assert agg("sample", []) is ERROR


def test_distinct_dedupes_before_aggregating():
    assert agg("sum", [2, 2, 3], distinct=True) == 5.0
    assert agg("avg", [2, 2, 8], distinct=True) == 5.0
