"""Lazy dataframe-style operator surface over knowledge graphs.

Every operator call is recorded into a FIFO queue on an immutable
descriptor; nothing touches the network or a store until the descriptor
is compiled and executed. Deriving from a frame never mutates it, so a
shared base can branch into several pipelines ("copy on branch").
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from .conditions import Compare, Condition, FunctionTest, parse_condition, parse_term_text
from .terms import Iri, PatternTerm, PrefixedName, check_variable

RDF_NS = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"

# Expand flags, usable positionally in the pair form of expand().
OUTGOING = "out"
INCOMING = "in"
OPTIONAL = "optional"

# Join types, named as they read at call sites.
InnerJoin = "inner"
LeftOuterJoin = "left_outer"
RightOuterJoin = "right_outer"
OuterJoin = "full_outer"

JOIN_TYPES = (InnerJoin, LeftOuterJoin, RightOuterJoin, OuterJoin)

AGGREGATION_FNS = ("count", "sum", "avg", "min", "max", "sample")

# Filter placement decided at record time.
PLAIN = "plain"
HAVING = "having"
POST_GROUP = "post_group"


# ============================================================================
# Operator records
# ============================================================================


@dataclass(frozen=True)
class Seed:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm


@dataclass(frozen=True)
class Expand:
    col: str
    predicate: Union[Iri, PrefixedName, str]
    new_col: str
    direction: str = OUTGOING
    optional: bool = False


@dataclass(frozen=True)
class FilterEntry:
    col: str
    conditions: Tuple[Condition, ...]
    kind: str = PLAIN


@dataclass(frozen=True)
class Filter:
    entries: Tuple[FilterEntry, ...]


@dataclass(frozen=True)
class SelectCols:
    cols: Tuple[str, ...]


@dataclass(frozen=True)
class Join:
    other: "FrameDescriptor"
    col: str
    other_col: str
    jtype: str
    new_col: str


@dataclass(frozen=True)
class GroupBy:
    cols: Tuple[str, ...]


@dataclass(frozen=True)
class Aggregation:
    fn: str
    col: str
    new_col: str
    distinct: bool = False


@dataclass(frozen=True)
class Aggregate:
    fn: str
    col: str
    new_col: str
    distinct: bool = False


@dataclass(frozen=True)
class Sort:
    keys: Tuple[Tuple[str, str], ...]


@dataclass(frozen=True)
class Head:
    limit: int
    offset: int = 0


OpRecord = Union[
    Seed, Expand, Filter, SelectCols, Join, GroupBy, Aggregation, Aggregate, Sort, Head
]


# ============================================================================
# Descriptor
# ============================================================================


@dataclass(frozen=True)
class FrameDescriptor:
    """A recorded operator pipeline plus the state derivable from it.

    ``columns`` is always recomputable by replaying ``queue``; the extra
    flags cache what the next append needs to validate (grouping state,
    aggregation-result columns, terminality).
    """

    graphs: Tuple[Iri, ...]
    prefixes: Tuple[Tuple[str, str], ...] = ()
    columns: Tuple[str, ...] = ()
    queue: Tuple[OpRecord, ...] = ()
    grouped: bool = False
    grouping_cols: Tuple[str, ...] = ()
    aggregation_cols: Tuple[str, ...] = ()
    terminal: bool = False
    in_grouping_stage: bool = False

    # -- queue plumbing ------------------------------------------------------

    def _append(self, record: OpRecord, **changes) -> "FrameDescriptor":
        if self.terminal:
            raise ValueError("frame is terminal; no further operators can be applied")
        return replace(
            self, queue=self.queue + (record,), in_grouping_stage=False, **changes
        )

    def replay_columns(self) -> Tuple[str, ...]:
        """Recompute the column list from the queue alone."""
        columns: Tuple[str, ...] = ()
        group_stage_targets: Tuple[str, ...] = ()
        grouping: Tuple[str, ...] = ()
        for record in self.queue:
            if isinstance(record, Seed):
                columns = tuple(
                    p for p in (record.subject, record.predicate, record.object)
                    if isinstance(p, str)
                )
            elif isinstance(record, Expand):
                columns = columns + (record.new_col,)
            elif isinstance(record, SelectCols):
                columns = record.cols
            elif isinstance(record, Join):
                mine = tuple(record.new_col if c == record.col else c for c in columns)
                theirs = tuple(
                    record.new_col if c == record.other_col else c
                    for c in record.other.columns
                )
                columns = mine + tuple(c for c in theirs if c not in mine)
            elif isinstance(record, GroupBy):
                grouping = record.cols
                group_stage_targets = ()
                columns = grouping
            elif isinstance(record, Aggregation):
                group_stage_targets = group_stage_targets + (record.new_col,)
                columns = grouping + group_stage_targets
            elif isinstance(record, Aggregate):
                columns = (record.new_col,)
        return columns

    def _prefix_map(self) -> Dict[str, str]:
        return dict(self.prefixes)

    def _require_columns(self, cols: Iterable[str]) -> None:
        for col in cols:
            if col not in self.columns:
                raise ValueError(f"unknown column: {col!r}")

    def _require_fresh(self, col: str) -> None:
        check_variable(col)
        if col in self.columns:
            raise ValueError(f"column already exists: {col!r}")

    # -- navigational operators ----------------------------------------------

    def expand(self, col, spec=None, new_col=None, direction=OUTGOING, optional=False):
        """Navigate from ``col`` over a predicate into a new column.

        Either ``expand(col, pred, new_col, direction, optional)`` for a
        single step, or ``expand(col, [(pred, new_col, *flags), ...])``
        to record several steps in order; flags are INCOMING/OUTGOING
        and OPTIONAL.
        """
        if isinstance(spec, (list, tuple)) and not isinstance(spec, str):
            frame = self
            for pair in spec:
                pred, target, *flags = pair
                frame = frame.expand(
                    col,
                    pred,
                    target,
                    direction=INCOMING if INCOMING in flags else OUTGOING,
                    optional=OPTIONAL in flags,
                )
            return frame
        if new_col is None:
            raise ValueError("expand requires a new column name")
        self._require_columns([col])
        self._require_fresh(new_col)
        if direction not in (OUTGOING, INCOMING):
            raise ValueError(f"unknown direction: {direction!r}")
        predicate = self._parse_predicate(spec)
        record = Expand(col, predicate, new_col, direction, bool(optional))
        return self._append(record, columns=self.columns + (new_col,))

    def _parse_predicate(self, pred) -> Union[Iri, PrefixedName]:
        if isinstance(pred, (Iri, PrefixedName)):
            if isinstance(pred, PrefixedName) and pred.expansion is None:
                expansion = self._prefix_map().get(pred.prefix)
                if expansion:
                    return PrefixedName(pred.prefix, pred.local, expansion)
            return pred
        parsed = parse_term_text(pred, self._prefix_map())
        if isinstance(parsed, (Iri, PrefixedName)):
            return parsed
        raise ValueError(f"predicate must be an IRI or prefixed name: {pred!r}")

    # -- relational operators --------------------------------------------------

    def filter(self, conditions: Mapping[str, object]) -> "FrameDescriptor":
        """Keep rows satisfying all conditions (conjunctive per column).

        On a grouped frame, a condition keyed by an aggregation result
        becomes a HAVING-style filter, and one keyed by a grouping
        column applies after the grouping (forcing a nested query).
        """
        if not conditions:
            return self
        prefixes = self._prefix_map()
        entries: List[FilterEntry] = []
        for col, conds in conditions.items():
            self._require_columns([col])
            if isinstance(conds, str) or not isinstance(conds, (list, tuple)):
                conds = [conds]
            parsed = []
            for cond in conds:
                if isinstance(cond, str):
                    parsed.append(parse_condition(cond, prefixes))
                elif isinstance(cond, (Compare, FunctionTest)):
                    parsed.append(cond)
                else:
                    raise TypeError(f"not a condition: {cond!r}")
            entries.append(FilterEntry(col, tuple(parsed), self._filter_kind(col)))
        return self._append(Filter(tuple(entries)))

    def _filter_kind(self, col: str) -> str:
        if self.grouped and col in self.aggregation_cols:
            return HAVING
        if self.grouped and col in self.grouping_cols:
            return POST_GROUP
        return PLAIN

    def select_cols(self, cols: Sequence[str]) -> "FrameDescriptor":
        cols = tuple(cols)
        self._require_columns(cols)
        return self._append(SelectCols(cols), columns=cols)

    def join(self, other, col, col2=None, jtype=InnerJoin, new_col=None):
        """Join with another frame on one column from each side.

        ``col2`` defaults to ``col`` and may be omitted even when a join
        type is passed positionally; both join columns are replaced by
        ``new_col`` (defaulting to ``col``) in the result.
        """
        if col2 in JOIN_TYPES and jtype == InnerJoin:
            col2, jtype = None, col2
        if col2 is None:
            col2 = col
        if new_col is None:
            new_col = col
        if jtype not in JOIN_TYPES:
            raise ValueError(f"unknown join type: {jtype!r}")
        if not isinstance(other, FrameDescriptor):
            raise TypeError("join target must be a frame")
        self._require_columns([col])
        other._require_columns([col2])
        check_variable(new_col)
        mine = tuple(new_col if c == col else c for c in self.columns)
        theirs = tuple(new_col if c == col2 else c for c in other.columns)
        merged = mine + tuple(c for c in theirs if c not in mine)
        if merged.count(new_col) > 1:
            raise ValueError(f"join column name collides: {new_col!r}")
        graphs = self.graphs + tuple(g for g in other.graphs if g not in self.graphs)
        prefixes = dict(other.prefixes)
        prefixes.update(self._prefix_map())
        record = Join(other, col, col2, jtype, new_col)
        return self._append(
            record,
            columns=merged,
            graphs=graphs,
            prefixes=tuple(sorted(prefixes.items())),
            grouped=self.grouped or other.grouped,
            grouping_cols=(),
            aggregation_cols=(),
        )

    def group_by(self, cols: Sequence[str]) -> "FrameDescriptor":
        cols = tuple(cols)
        if not cols:
            raise ValueError("group_by requires at least one column")
        self._require_columns(cols)
        if not self._may_group_again():
            raise ValueError("frame is already grouped")
        frame = self._append(
            GroupBy(cols),
            columns=cols,
            grouped=True,
            grouping_cols=cols,
            aggregation_cols=(),
        )
        return replace(frame, in_grouping_stage=True)

    def _may_group_again(self) -> bool:
        """Grouping is allowed when no previous grouping is still open.

        Expanding, joining, or filtering on a grouping column nests the
        grouped query, after which the result behaves as an ordinary
        frame that may be grouped again.
        """
        for record in reversed(self.queue):
            if isinstance(record, GroupBy):
                return False
            if isinstance(record, (Expand, Join)):
                return True
            if isinstance(record, Filter) and any(
                e.kind == POST_GROUP for e in record.entries
            ):
                return True
        return True

    def aggregation(self, fn, col, new_col, distinct=False) -> "FrameDescriptor":
        """Attach an aggregation to the pending grouping."""
        fn = _normalize_fn(fn)
        if fn == "distinct_count":
            fn, distinct = "count", True
        if fn not in AGGREGATION_FNS:
            raise ValueError(f"unknown aggregation function: {fn!r}")
        if not self.in_grouping_stage:
            raise ValueError("aggregation requires an immediately preceding group_by")
        last_pre = self._pre_grouping_columns()
        if col not in last_pre:
            raise ValueError(f"unknown column: {col!r}")
        self._require_fresh(new_col)
        frame = self._append(
            Aggregation(fn, col, new_col, bool(distinct)),
            columns=self.columns + (new_col,),
            aggregation_cols=self.aggregation_cols + (new_col,),
        )
        return replace(frame, in_grouping_stage=True)

    def _pre_grouping_columns(self) -> Tuple[str, ...]:
        """Columns visible just before the current grouping stage."""
        trimmed = list(self.queue)
        while trimmed and isinstance(trimmed[-1], (GroupBy, Aggregation)):
            trimmed.pop()
        probe = replace(self, queue=tuple(trimmed))
        return probe.replay_columns()

    def count(self, col, new_col, unique=False, distinct=None):
        return self.aggregation(
            "count", col, new_col, distinct=unique if distinct is None else distinct
        )

    def sum(self, col, new_col):
        return self.aggregation("sum", col, new_col)

    def avg(self, col, new_col):
        return self.aggregation("avg", col, new_col)

    def min(self, col, new_col):
        return self.aggregation("min", col, new_col)

    def max(self, col, new_col):
        return self.aggregation("max", col, new_col)

    def sample(self, col, new_col):
        return self.aggregation("sample", col, new_col)

    def distinct_count(self, col, new_col):
        return self.aggregation("count", col, new_col, distinct=True)

    def aggregate(self, fn, col, new_col, distinct=False) -> "FrameDescriptor":
        """Collapse the whole frame to one aggregated value; terminal."""
        fn = _normalize_fn(fn)
        if fn == "distinct_count":
            fn, distinct = "count", True
        if fn not in AGGREGATION_FNS:
            raise ValueError(f"unknown aggregation function: {fn!r}")
        self._require_columns([col])
        check_variable(new_col)
        return self._append(
            Aggregate(fn, col, new_col, bool(distinct)),
            columns=(new_col,),
            grouped=False,
            grouping_cols=(),
            aggregation_cols=(),
            terminal=True,
        )

    def sort(self, cols_order) -> "FrameDescriptor":
        if isinstance(cols_order, Mapping):
            keys = tuple(cols_order.items())
        else:
            keys = tuple(tuple(pair) for pair in cols_order)
        for col, order in keys:
            self._require_columns([col])
            if order not in ("asc", "desc"):
                raise ValueError(f"sort order must be 'asc' or 'desc': {order!r}")
        return self._append(Sort(keys))

    def head(self, k: int, i: int = 0) -> "FrameDescriptor":
        """First ``k`` rows starting at row ``i``; terminal."""
        if k < 0 or i < 0:
            raise ValueError("head requires k >= 0 and i >= 0")
        return self._append(Head(int(k), int(i)), terminal=True)

    def cache(self) -> "FrameDescriptor":
        """Mark a branch point. Descriptors are immutable values, so
        derivations already copy the queue; this is advisory."""
        return self


def _normalize_fn(fn: str) -> str:
    fn = fn.lower()
    return {"average": "avg"}.get(fn, fn)


# ============================================================================
# Graph entry points
# ============================================================================


class KnowledgeGraph:
    """Entry point binding frames to one or more graph URIs and prefixes."""

    def __init__(self, uri, prefixes: Optional[Mapping[str, str]] = None):
        uris = [uri] if isinstance(uri, (str, Iri)) else list(uri)
        self.graphs: Tuple[Iri, ...] = tuple(
            u if isinstance(u, Iri) else Iri(u) for u in uris
        )
        self.prefixes: Dict[str, str] = dict(prefixes or {})

    def _blank_frame(self) -> FrameDescriptor:
        return FrameDescriptor(
            graphs=self.graphs, prefixes=tuple(sorted(self.prefixes.items()))
        )

    def seed(self, s, p, o) -> FrameDescriptor:
        """Start a frame from one triple pattern; string positions that
        are bare identifiers become columns."""
        frame = self._blank_frame()
        prefixes = self.prefixes
        positions = tuple(
            parse_term_text(x, prefixes) if isinstance(x, str) else x for x in (s, p, o)
        )
        columns = tuple(p for p in positions if isinstance(p, str))
        if not columns:
            raise ValueError("seed requires at least one column position")
        for col in columns:
            check_variable(col)
        if len(set(columns)) != len(columns):
            raise ValueError("seed columns must be distinct")
        return frame._append(Seed(*positions), columns=columns)

    def feature_domain_range(self, pred, subject_col, object_col) -> FrameDescriptor:
        """All pairs connected by ``pred``: seed(subject_col, pred, object_col)."""
        return self.seed(subject_col, pred, object_col)

    def entities(self, class_name, col) -> FrameDescriptor:
        """Instances of a class: seed(col, rdf:type, class_name)."""
        rdf_type = PrefixedName("rdf", "type", self.prefixes.get("rdf", RDF_NS))
        frame = self._blank_frame()
        class_term = (
            parse_term_text(class_name, self.prefixes)
            if isinstance(class_name, str)
            else class_name
        )
        if isinstance(class_term, str):
            raise ValueError("entities requires a ground class term")
        check_variable(col)
        return frame._append(Seed(col, rdf_type, class_term), columns=(col,))

    def explore_classes(self) -> FrameDescriptor:
        """Classes with instance counts: (class, frequency) pairs."""
        rdf_type = PrefixedName("rdf", "type", self.prefixes.get("rdf", RDF_NS))
        frame = self._blank_frame()
        frame = frame._append(Seed("instance", rdf_type, "class"), columns=("instance", "class"))
        return frame.group_by(["class"]).count("instance", "frequency")
