"""In-memory triple store for one named graph.

Holds a set of triples (duplicate inserts are no-ops) with hash indexes
on each of the subject, predicate, and object positions. Stores are
loaded once and treated as immutable afterwards; all evaluation paths
only read.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

from .terms import (
    BlankNode,
    Iri,
    PatternTerm,
    PrefixedName,
    Term,
    Triple,
    check_variable,
    is_variable,
)

Pattern = Tuple[PatternTerm, PatternTerm, PatternTerm]
Binding = Dict[str, Term]


class GraphStore:
    """A named graph backed by subject/predicate/object hash indexes."""

    def __init__(self, name: Iri, triples: Iterable[Triple] = ()):
        self.name = name
        self._triples: set = set()
        self._by_subject: Dict[Term, List[Triple]] = defaultdict(list)
        self._by_predicate: Dict[Term, List[Triple]] = defaultdict(list)
        self._by_object: Dict[Term, List[Triple]] = defaultdict(list)
        for t in triples:
            self.insert(t)

    @classmethod
    def from_ntriples(cls, name: Iri, text) -> "GraphStore":
        from .ntriples import parse_ntriples

        return cls(name, parse_ntriples(text))

    def insert(self, triple: Triple) -> "GraphStore":
        """Add a triple; inserting an existing triple changes nothing."""
        if triple in self._triples:
            return self
        self._triples.add(triple)
        self._by_subject[triple.subject].append(triple)
        self._by_predicate[triple.predicate].append(triple)
        self._by_object[triple.object].append(triple)
        return self

    def __len__(self) -> int:
        return len(self._triples)

    def __contains__(self, triple: Triple) -> bool:
        return triple in self._triples

    def triples(self) -> Iterator[Triple]:
        return iter(self._triples)

    def match(self, pattern: Pattern) -> List[Binding]:
        """All variable bindings under which the pattern is in the store.

        Positions are ground terms, prefixed names (resolved against
        their declared namespace), or variable names. A repeated
        variable must bind to the same term in every position. Each
        matching triple contributes exactly one binding dict.
        """
        positions = tuple(_normalize(p) for p in pattern)
        results: List[Binding] = []
        for triple in self._candidates(positions):
            binding: Binding = {}
            if (
                _accept(positions[0], triple.subject, binding)
                and _accept(positions[1], triple.predicate, binding)
                and _accept(positions[2], triple.object, binding)
            ):
                results.append(binding)
        return results

    def _candidates(self, positions: Tuple[PatternTerm, ...]) -> Iterable[Triple]:
        subject, predicate, obj = positions
        if not is_variable(subject):
            return self._by_subject.get(subject, [])
        if not is_variable(obj):
            return self._by_object.get(obj, [])
        if not is_variable(predicate):
            return self._by_predicate.get(predicate, [])
        return self._triples


def _normalize(position: PatternTerm) -> PatternTerm:
    if isinstance(position, str):
        check_variable(position)
        return position
    if isinstance(position, PrefixedName):
        return position.resolve()
    if isinstance(position, BlankNode):
        raise ValueError("blank nodes are not allowed in patterns")
    return position


def _accept(position: PatternTerm, term: Term, binding: Binding) -> bool:
    if is_variable(position):
        bound = binding.get(position)
        if bound is None:
            binding[position] = term
            return True
        return bound == term
    return position == term
