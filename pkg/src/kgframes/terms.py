"""RDF terms and triples.

Terms are immutable values with structural equality: IRIs, literals
(plain, typed, or language-tagged), and blank nodes. Pattern positions
may additionally hold a prefixed name (rendered short in query text) or
a plain string, which always denotes a variable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

VAR_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

XSD = "http://www.w3.org/2001/XMLSchema#"
RDF_TYPE_IRI = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"


@dataclass(frozen=True)
class Iri:
    """An absolute IRI reference."""

    text: str

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("IRI text must be non-empty")


@dataclass(frozen=True)
class Literal:
    """An RDF literal: lexical form plus at most one of datatype/language."""

    lexical: str
    datatype: Optional[Iri] = None
    lang: Optional[str] = None

    def __post_init__(self) -> None:
        if self.datatype is not None and self.lang is not None:
            raise ValueError("literal cannot carry both a datatype and a language tag")


@dataclass(frozen=True)
class BlankNode:
    """A blank node, identified by its local label."""

    label: str


@dataclass(frozen=True)
class PrefixedName:
    """A prefix:local name as written by the user.

    Rendered in its short form in query text. When the enclosing program
    declares the prefix, ``expansion`` holds the namespace IRI so the
    name can be resolved for local evaluation.
    """

    prefix: str
    local: str
    expansion: Optional[str] = None

    @property
    def text(self) -> str:
        return f"{self.prefix}:{self.local}"

    def resolve(self) -> Iri:
        """Full IRI when the prefix is declared, else the short text as-is."""
        if self.expansion is not None:
            return Iri(self.expansion + self.local)
        return Iri(self.text)


Term = Union[Iri, Literal, BlankNode]

# A position in a triple pattern: a ground term, a prefixed name, or a
# variable given as a bare string.
PatternTerm = Union[Iri, Literal, BlankNode, PrefixedName, str]


@dataclass(frozen=True)
class Triple:
    """A ground RDF triple. Subjects are IRIs or blank nodes, predicates IRIs."""

    subject: Term
    predicate: Iri
    object: Term

    def __post_init__(self) -> None:
        if isinstance(self.subject, Literal):
            raise ValueError("triple subject cannot be a literal")
        if not isinstance(self.predicate, Iri):
            raise ValueError("triple predicate must be an IRI")


def is_variable(position: PatternTerm) -> bool:
    return isinstance(position, str)


def check_variable(name: str) -> str:
    """Validate a column/variable name so it maps 1:1 to a SPARQL variable."""
    if not VAR_NAME_RE.match(name):
        raise ValueError(f"invalid column name: {name!r}")
    return name


_NUMERIC_RE = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?\Z")


def numeric_value(value: object) -> Optional[float]:
    """Numeric interpretation of a cell, or None.

    Numbers pass through; literals whose lexical form parses as a number
    are numeric regardless of datatype. Everything else is non-numeric.
    """
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, Literal) and _NUMERIC_RE.match(value.lexical.strip()):
        return float(value.lexical)
    return None


def sort_key(value: object) -> tuple:
    """Deterministic total order over cell values.

    Nulls sort first, then numeric values (numbers and numeric literals
    together, by magnitude), then IRIs, plain/typed literals, and blank
    nodes, each band ordered textually. Used for ORDER BY ties, min/max
    over non-numeric terms, and sample determinism, so repeated runs and
    both evaluation routes agree.
    """
    if value is None:
        return (0,)
    number = numeric_value(value)
    if number is not None:
        return (1, number, _text_key(value))
    if isinstance(value, Iri):
        return (2, value.text)
    if isinstance(value, Literal):
        return (
            3,
            value.lexical,
            value.datatype.text if value.datatype else "",
            value.lang or "",
        )
    if isinstance(value, BlankNode):
        return (4, value.label)
    if isinstance(value, PrefixedName):
        return (2, value.resolve().text)
    raise TypeError(f"unorderable cell value: {value!r}")


def _text_key(value: object) -> str:
    if isinstance(value, Literal):
        datatype = value.datatype.text if value.datatype else ""
        return f"L{value.lexical}\x00{datatype}\x00{value.lang or ''}"
    return f"N{value!r}"
