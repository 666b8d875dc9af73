"""Result tables with bag semantics.

A table is an ordered column list plus rows whose repetition carries
multiplicity. Cells hold terms, plain numbers (aggregation results),
or None for an unbound cell. Comparison helpers align columns by name
so two evaluation routes can disagree on column order without failing
the equality check.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .terms import sort_key


@dataclass
class ResultTable:
    columns: Tuple[str, ...]
    rows: List[Tuple[object, ...]] = field(default_factory=list)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        self.rows = [tuple(row) for row in self.rows]
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("row width does not match column count")

    def __len__(self) -> int:
        return len(self.rows)

    def as_dicts(self) -> List[Dict[str, object]]:
        return [dict(zip(self.columns, row)) for row in self.rows]

    def reorder(self, columns: Sequence[str]) -> "ResultTable":
        """The same table with columns in the given order."""
        columns = tuple(columns)
        if set(columns) != set(self.columns) or len(columns) != len(self.columns):
            raise ValueError("reorder requires a permutation of the columns")
        index = [self.columns.index(c) for c in columns]
        return ResultTable(columns, [tuple(row[i] for i in index) for row in self.rows])

    def sorted_rows(self) -> List[Tuple[object, ...]]:
        return sorted(self.rows, key=row_sort_key)


def row_sort_key(row: Iterable[object]) -> Tuple:
    return tuple(sort_key(value) for value in row)


def bag_equal(a: ResultTable, b: ResultTable) -> bool:
    """Same column names and same rows with the same multiplicities."""
    if set(a.columns) != set(b.columns):
        return False
    aligned = b.reorder(a.columns)
    return a.sorted_rows() == aligned.sorted_rows()


def first_difference(a: ResultTable, b: ResultTable) -> Optional[Dict[str, object]]:
    """A witness for inequality: one row present in only one table.

    Returns None when the tables are bag-equal. The witness dict has a
    ``side`` key naming the table the row came from.
    """
    if set(a.columns) != set(b.columns):
        return {"side": "columns", "left": a.columns, "right": b.columns}
    aligned = b.reorder(a.columns)
    left, right = a.sorted_rows(), aligned.sorted_rows()
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i] == right[j]:
            i += 1
            j += 1
        elif row_sort_key(left[i]) <= row_sort_key(right[j]):
            return {"side": "left", "row": dict(zip(a.columns, left[i]))}
        else:
            return {"side": "right", "row": dict(zip(a.columns, right[j]))}
    if i < len(left):
        return {"side": "left", "row": dict(zip(a.columns, left[i]))}
    if j < len(right):
        return {"side": "right", "row": dict(zip(a.columns, right[j]))}
    return None
