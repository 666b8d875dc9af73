"""Filter conditions: parsing from their string form and evaluation.

Conditions are parsed when an operator is recorded, so malformed input
fails at call time rather than at query generation. Evaluation here is
the single definition of comparison semantics shared by every local
evaluation route; rendering to SPARQL expression text lives with the
emitter.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Mapping, Optional, Tuple, Union

from .terms import Iri, Literal, PrefixedName, numeric_value

COMPARE_OPS = ("<=", ">=", "!=", "=", "<", ">")

# A comparison operand: a ground term, a number, or (as a bare string) a
# reference to another column.
Operand = Union[Iri, Literal, PrefixedName, int, float, str]


@dataclass(frozen=True)
class Compare:
    op: str
    operand: Operand

    def __post_init__(self) -> None:
        if self.op not in COMPARE_OPS:
            raise ValueError(f"unknown comparison operator: {self.op!r}")


@dataclass(frozen=True)
class FunctionTest:
    """A predefined boolean test: isURI, isLiteral, regex, in, or raw."""

    name: str
    args: Tuple[Operand, ...] = ()

    def __post_init__(self) -> None:
        if self.name not in ("isURI", "isLiteral", "regex", "in", "raw"):
            raise ValueError(f"unknown condition function: {self.name!r}")


Condition = Union[Compare, FunctionTest]

_IN_RE = re.compile(r"(?i)in\s*\((.*)\)\s*\Z", re.S)
_REGEX_RE = re.compile(r'regex\s*\(\s*"((?:[^"\\]|\\.)*)"\s*\)\s*\Z', re.S)
_RAW_RE = re.compile(r"raw\s*\((.*)\)\s*\Z", re.S)
_NUMBER_RE = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?\Z")
_PREFIXED_RE = re.compile(r"([A-Za-z_][\w.-]*):([\w.~-]+)\Z")
_BARE_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def parse_condition(text: str, prefixes: Optional[Mapping[str, str]] = None) -> Condition:
    """Parse one condition string of the operator API.

    Accepted forms: ``OP value`` (e.g. ``>=50``, ``=dbpr:United_States``),
    ``isURI``, ``isLiteral``, ``In(term, ...)``, ``regex("pattern")``,
    and ``raw(expression text)`` for an expression inserted verbatim.
    """
    text = text.strip()
    if not text:
        raise ValueError("empty condition")
    if text in ("isURI", "isIRI"):
        return FunctionTest("isURI")
    if text == "isLiteral":
        return FunctionTest("isLiteral")
    match = _RAW_RE.match(text)
    if match:
        return FunctionTest("raw", (match.group(1).strip(),))
    match = _REGEX_RE.match(text)
    if match:
        return FunctionTest("regex", (match.group(1),))
    match = _IN_RE.match(text)
    if match:
        args = tuple(
            parse_term_text(part.strip(), prefixes)
            for part in _split_arguments(match.group(1))
        )
        if not args:
            raise ValueError("empty in-list")
        return FunctionTest("in", args)
    for op in COMPARE_OPS:
        if text.startswith(op):
            return Compare(op, parse_term_text(text[len(op) :].strip(), prefixes))
    raise ValueError(f"cannot parse condition: {text!r}")


def parse_term_text(text: str, prefixes: Optional[Mapping[str, str]] = None) -> Operand:
    """Parse a term as written in conditions and program files.

    ``<iri>``, quoted literals, numbers, ``prefix:local`` names, and bare
    identifiers (which denote columns) are recognized.
    """
    text = text.strip()
    if not text:
        raise ValueError("empty term")
    if text.startswith("<") and text.endswith(">"):
        return Iri(text[1:-1])
    if text.startswith('"'):
        return _parse_quoted_literal(text)
    if _NUMBER_RE.match(text):
        try:
            return int(text)
        except ValueError:
            return float(text)
    match = _PREFIXED_RE.match(text)
    if match:
        prefix, local = match.groups()
        expansion = prefixes.get(prefix) if prefixes else None
        return PrefixedName(prefix, local, expansion)
    if _BARE_RE.match(text):
        return text
    raise ValueError(f"cannot parse term: {text!r}")


def _parse_quoted_literal(text: str) -> Literal:
    i = 1
    chars: List[str] = []
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            chars.append(text[i + 1])
            i += 2
        elif ch == '"':
            i += 1
            break
        else:
            chars.append(ch)
            i += 1
    else:
        raise ValueError(f"unterminated literal: {text!r}")
    lexical = "".join(chars)
    rest = text[i:]
    if not rest:
        return Literal(lexical)
    if rest.startswith("^^<") and rest.endswith(">"):
        return Literal(lexical, datatype=Iri(rest[3:-1]))
    if rest.startswith("@"):
        return Literal(lexical, lang=rest[1:])
    raise ValueError(f"trailing content after literal: {rest!r}")


def _split_arguments(text: str) -> List[str]:
    """Split on top-level commas, respecting quoted strings."""
    parts: List[str] = []
    current: List[str] = []
    in_quote = False
    i = 0
    while i < len(text):
        ch = text[i]
        if in_quote:
            current.append(ch)
            if ch == "\\" and i + 1 < len(text):
                current.append(text[i + 1])
                i += 1
            elif ch == '"':
                in_quote = False
        elif ch == '"':
            in_quote = True
            current.append(ch)
        elif ch == ",":
            parts.append("".join(current))
            current = []
        else:
            current.append(ch)
        i += 1
    if current or parts:
        parts.append("".join(current))
    return [p for p in (part.strip() for part in parts) if p]


def eval_condition(row: Mapping[str, object], col: str, cond: Condition) -> bool:
    """Decide one condition against a row; nulls never satisfy a test."""
    value = row.get(col)
    if isinstance(cond, Compare):
        operand = cond.operand
        if isinstance(operand, str):
            operand = row.get(operand)
        return _compare(value, cond.op, operand)
    if cond.name == "isURI":
        return isinstance(value, Iri)
    if cond.name == "isLiteral":
        return isinstance(value, Literal)
    if cond.name == "regex":
        if value is None:
            return False
        return re.search(cond.args[0], _string_form(value)) is not None
    if cond.name == "in":
        return any(_compare(value, "=", arg) for arg in cond.args)
    raise NotImplementedError("raw conditions cannot be evaluated locally")


def _compare(left: object, op: str, right: object) -> bool:
    if left is None or right is None:
        return False
    left_num = numeric_value(left)
    right_num = numeric_value(right)
    if left_num is not None and right_num is not None:
        return _apply(left_num, op, right_num)
    return _apply(_comparison_text(left), op, _comparison_text(right))


def _apply(left, op: str, right) -> bool:
    if op == "=":
        return left == right
    if op == "!=":
        return left != right
    if op == "<":
        return left < right
    if op == "<=":
        return left <= right
    if op == ">":
        return left > right
    return left >= right


def _comparison_text(value: object) -> str:
    if isinstance(value, PrefixedName):
        return value.resolve().text
    return _string_form(value)


def _string_form(value: object) -> str:
    """The str() form a SPARQL engine would use: IRI text or lexical form."""
    if isinstance(value, Iri):
        return value.text
    if isinstance(value, Literal):
        return value.lexical
    if isinstance(value, PrefixedName):
        return value.resolve().text
    return str(value)
