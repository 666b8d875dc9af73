"""Shared fixtures: tiny graph stores, pipeline builders, and a mock
endpoint transport that honours nested LIMIT/OFFSET windows."""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple

import pytest

from kgframes.emitter import tokenize
from kgframes.executor import encode_results
from kgframes.frames import KnowledgeGraph
from kgframes.store import GraphStore
from kgframes.tables import ResultTable
from kgframes.terms import Iri, Literal, Triple

EX = "http://example.org/"
DBP = "http://dbpedia.org"

PREFIXES = {
    "dbpp": "http://dbpedia.org/property/",
    "dbpo": "http://dbpedia.org/ontology/",
    "dbpr": "http://dbpedia.org/resource/",
    "rdfs": "http://www.w3.org/2000/01/rdf-schema#",
    "rdf": "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
}


def iri(local: str, base: str = EX) -> Iri:
    return Iri(base + local)


def lit(value, datatype: Optional[str] = None, lang: Optional[str] = None) -> Literal:
    return Literal(str(value), datatype=Iri(datatype) if datatype else None, lang=lang)


def triples_from(rows: Iterable[Tuple[object, str, object]]) -> List[Triple]:
    """Triples from (subject local name, predicate local name, object)
    rows; string objects become example IRIs, other terms pass through."""
    out = []
    for s, p, o in rows:
        subject = iri(s) if isinstance(s, str) else s
        obj = iri(o) if isinstance(o, str) else o
        out.append(Triple(subject, iri(p), obj))
    return out


def store_from(rows: Iterable[Tuple[object, str, object]], name: str = DBP) -> GraphStore:
    return GraphStore(Iri(name), triples_from(rows))


@pytest.fixture
def movie_graph() -> KnowledgeGraph:
    return KnowledgeGraph(DBP, PREFIXES)


def dbp_triple(s: str, p: str, o) -> Triple:
    """Triple with dbpp: predicate; string objects become example IRIs."""
    obj = iri(o) if isinstance(o, str) else o
    return Triple(iri(s), Iri(PREFIXES["dbpp"] + p), obj)


@pytest.fixture
def movie_store() -> GraphStore:
    """Movies and actors: three actors, two American, one of whom stars
    in two movies."""
    united_states = Iri(PREFIXES["dbpr"] + "UnitedStates")
    rows = [
        dbp_triple("m1", "starring", "a1"),
        dbp_triple("m2", "starring", "a1"),
        dbp_triple("m3", "starring", "a2"),
        dbp_triple("m1", "starring", "a3"),
        dbp_triple("m2", "starring", "a3"),
        dbp_triple("a1", "birthPlace", united_states),
        dbp_triple("a2", "birthPlace", united_states),
        dbp_triple("a3", "birthPlace", "Canada"),
        dbp_triple("a1", "name", lit("Alice")),
        dbp_triple("a2", "name", lit("Bob")),
        dbp_triple("a3", "name", lit("Carol")),
    ]
    return GraphStore(Iri(DBP), rows)


class MockEndpoint:
    """Transport double: serves a fixed table, applying LIMIT/OFFSET
    windows innermost-first, and logs every request."""

    def __init__(self, table: ResultTable, fail_statuses: Optional[Dict[int, int]] = None):
        self.table = table
        self.log: List[Tuple[str, str]] = []
        # Map request ordinal (1-based) to an HTTP status to fail with.
        self.fail_statuses = fail_statuses or {}

    def __call__(self, url: str, params: dict, timeout: float, method: str):
        ordinal = len(self.log) + 1
        self.log.append((method, params["query"]))
        if ordinal in self.fail_statuses:
            return self.fail_statuses[ordinal], "injected failure"
        rows = self.table.rows
        for window in nested_windows(params["query"]):
            rows = rows[window.get("OFFSET", 0):]
            if "LIMIT" in window:
                rows = rows[: window["LIMIT"]]
        return 200, encode_results(ResultTable(self.table.columns, rows))


def nested_windows(query: str) -> List[Dict[str, int]]:
    """LIMIT/OFFSET clauses keyed by brace depth, innermost first."""
    depth = 0
    found: Dict[int, Dict[str, int]] = {}
    tokens = tokenize(query)
    for i, token in enumerate(tokens):
        if token == "{":
            depth += 1
        elif token == "}":
            depth -= 1
        elif token.upper() in ("LIMIT", "OFFSET") and i + 1 < len(tokens):
            if tokens[i + 1].isdigit():
                found.setdefault(depth, {})[token.upper()] = int(tokens[i + 1])
    return [found[d] for d in sorted(found, reverse=True)]
