"""Operator-by-operator reference evaluation over local graph stores.

This route never looks at the query model: it replays the recorded
queue directly with textbook bag-relational operators (natural join on
all shared columns, left/right/full outer joins by padding, selection,
projection, grouping). Running it against the query-model evaluator
gives two independently derived answers for every frame.
"""

from __future__ import annotations

from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .aggregates import ERROR, apply_aggregation
from .conditions import eval_condition
from .frames import (
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
from .store import GraphStore
from .tables import ResultTable, row_sort_key
from .terms import Iri, sort_key

Row = Dict[str, object]


def eval_frame(frame: FrameDescriptor, stores: Mapping[str, GraphStore]) -> ResultTable:
    """Evaluate a recorded frame directly against local stores."""
    columns, rows = _replay(frame, stores)
    return ResultTable(tuple(columns), [tuple(r.get(c) for c in columns) for r in rows])


def _replay(
    frame: FrameDescriptor, stores: Mapping[str, GraphStore]
) -> Tuple[List[str], List[Row]]:
    if not frame.queue:
        raise ValueError("frame records no operators")
    home = _store_for(frame.graphs[0], stores)
    columns: List[str] = []
    rows: List[Row] = []
    pending_groups: Optional[List[Tuple[Row, List[Row]]]] = None
    for record in frame.queue:
        if pending_groups is not None and not isinstance(record, Aggregation):
            rows = [dict(key) for key, _ in pending_groups]
            pending_groups = None
        if isinstance(record, Seed):
            pattern = (record.subject, record.predicate, record.object)
            rows = home.match(pattern)
            columns = [p for p in pattern if isinstance(p, str)]
        elif isinstance(record, Expand):
            columns, rows = _expand(record, columns, rows, home)
        elif isinstance(record, Filter):
            rows = [
                row
                for row in rows
                if all(
                    eval_condition(row, entry.col, cond)
                    for entry in record.entries
                    for cond in entry.conditions
                )
            ]
        elif isinstance(record, SelectCols):
            columns = list(record.cols)
            rows = [{c: row.get(c) for c in columns} for row in rows]
        elif isinstance(record, Join):
            columns, rows = _join(record, columns, rows, stores)
        elif isinstance(record, GroupBy):
            pending_groups = _group(rows, record.cols)
            columns = list(record.cols)
        elif isinstance(record, Aggregation):
            assert pending_groups is not None
            for key, members in pending_groups:
                values = [m[record.col] for m in members if m.get(record.col) is not None]
                result = apply_aggregation(record.fn, values, record.distinct)
                key[record.new_col] = None if result is ERROR else result
            columns.append(record.new_col)
        elif isinstance(record, Aggregate):
            values = [r[record.col] for r in rows if r.get(record.col) is not None]
            if rows:
                result = apply_aggregation(record.fn, values, record.distinct)
                rows = [{record.new_col: None if result is ERROR else result}]
            else:
                rows = []
            columns = [record.new_col]
        elif isinstance(record, Sort):
            rows = _sort(rows, columns, record.keys)
        elif isinstance(record, Head):
            rows = rows[record.offset : record.offset + record.limit]
        else:
            raise TypeError(f"unknown operator record: {record!r}")
    if pending_groups is not None:
        rows = [dict(key) for key, _ in pending_groups]
    return columns, rows


def _store_for(graph: Iri, stores: Mapping[str, GraphStore]) -> GraphStore:
    try:
        return stores[graph.text]
    except KeyError:
        raise KeyError(f"no store loaded for graph <{graph.text}>") from None


def _expand(
    record: Expand, columns: List[str], rows: List[Row], home: GraphStore
) -> Tuple[List[str], List[Row]]:
    if record.direction == INCOMING:
        pattern = (record.new_col, record.predicate, record.col)
    else:
        pattern = (record.col, record.predicate, record.new_col)
    matches = home.match(pattern)
    out_columns = columns + [record.new_col]
    if record.optional:
        joined = _left_outer(rows, matches, [record.new_col])
    else:
        joined = _natural_join(rows, matches)
    return out_columns, joined


def _shared_columns(a: Row, b: Row) -> List[str]:
    return [c for c in a if c in b]


def _natural_join(left: List[Row], right: List[Row]) -> List[Row]:
    """All pairs agreeing on every shared column; null keys never match."""
    out = []
    for l in left:
        for r in right:
            merged = _merge(l, r)
            if merged is not None:
                out.append(merged)
    return out


def _merge(l: Row, r: Row) -> Optional[Row]:
    for c in l:
        if c in r:
            if l[c] is None or r[c] is None or l[c] != r[c]:
                return None
    merged = dict(l)
    merged.update(r)
    return merged


def _left_outer(left: List[Row], right: List[Row], pad_cols: Sequence[str]) -> List[Row]:
    out = []
    for l in left:
        matched = False
        for r in right:
            merged = _merge(l, r)
            if merged is not None:
                matched = True
                out.append(merged)
        if not matched:
            padded = dict(l)
            for c in pad_cols:
                padded.setdefault(c, None)
            out.append(padded)
    return out


def _join(
    record: Join,
    columns: List[str],
    rows: List[Row],
    stores: Mapping[str, GraphStore],
) -> Tuple[List[str], List[Row]]:
    other_columns, other_rows = _replay(record.other, stores)
    columns = [record.new_col if c == record.col else c for c in columns]
    rows = [_rename(r, record.col, record.new_col) for r in rows]
    other_columns = [
        record.new_col if c == record.other_col else c for c in other_columns
    ]
    other_rows = [_rename(r, record.other_col, record.new_col) for r in other_rows]
    merged_columns = columns + [c for c in other_columns if c not in columns]
    if record.jtype == InnerJoin:
        return merged_columns, _natural_join(rows, other_rows)
    if record.jtype == LeftOuterJoin:
        pad = [c for c in other_columns if c not in columns]
        return merged_columns, _left_outer(rows, other_rows, pad)
    if record.jtype == RightOuterJoin:
        pad = [c for c in columns if c not in other_columns]
        return merged_columns, _left_outer(other_rows, rows, pad)
    if record.jtype == OuterJoin:
        pad_right = [c for c in other_columns if c not in columns]
        pad_left = [c for c in columns if c not in other_columns]
        both = _left_outer(rows, other_rows, pad_right)
        both.extend(_left_outer(other_rows, rows, pad_left))
        return merged_columns, both
    raise ValueError(f"unknown join type: {record.jtype!r}")


def _rename(row: Row, old: str, new: str) -> Row:
    if old == new or old not in row:
        return dict(row)
    out = {c: v for c, v in row.items() if c != old}
    out[new] = row[old]
    return out


def _group(rows: List[Row], cols: Sequence[str]) -> List[Tuple[Row, List[Row]]]:
    """Group rows by their values in ``cols``; nulls group like values."""
    groups: List[Tuple[Row, List[Row]]] = []
    index: Dict[Tuple, int] = {}
    for row in rows:
        key = tuple(row.get(c) for c in cols)
        marker = tuple(sort_key(v) for v in key)
        if marker not in index:
            index[marker] = len(groups)
            groups.append(({c: row.get(c) for c in cols}, []))
        groups[index[marker]][1].append(row)
    return groups


def _sort(
    rows: List[Row], columns: Sequence[str], keys: Sequence[Tuple[str, str]]
) -> List[Row]:
    # Full-row pre-sort makes ties deterministic across evaluators.
    out = sorted(rows, key=lambda r: row_sort_key(r.get(c) for c in columns))
    for col, direction in reversed(keys):
        out.sort(key=lambda r: sort_key(r.get(col)), reverse=direction == "desc")
    return out
