"""N-Triples parsing and serialization.

Line-oriented: one triple per line terminated by ``.``, with comment and
blank lines skipped. Parsing stops at the first malformed line and the
error names the line number.
"""

from __future__ import annotations

import io
from typing import Iterable, List, Union

from .terms import BlankNode, Iri, Literal, Term, Triple


class NTriplesError(ValueError):
    """Syntax error, carrying the 1-based line number it occurred on."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


_ESCAPES = {
    "t": "\t",
    "b": "\b",
    "n": "\n",
    "r": "\r",
    "f": "\f",
    '"': '"',
    "'": "'",
    "\\": "\\",
}


def parse_ntriples(source: Union[bytes, str, io.IOBase]) -> List[Triple]:
    """Parse N-Triples text into triples, in file order.

    Accepts bytes, text, or a file-like object; bytes are decoded as UTF-8.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        raw = source.read()
        text = raw.decode("utf-8") if isinstance(raw, bytes) else raw

    triples: List[Triple] = []
    # Lines end at CR/LF only; splitlines() would also break at Unicode
    # separators such as NEL, which may appear raw inside IRIs.
    normalized = text.replace("\r\n", "\n").replace("\r", "\n")
    for line_number, line in enumerate(normalized.split("\n"), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        triples.append(_parse_line(stripped, line_number))
    return triples


def _parse_line(line: str, line_number: int) -> Triple:
    parser = _LineParser(line, line_number)
    subject = parser.read_term(allow_literal=False)
    predicate = parser.read_term(allow_literal=False)
    if not isinstance(predicate, Iri):
        raise NTriplesError(line_number, "predicate must be an IRI")
    obj = parser.read_term(allow_literal=True)
    parser.expect_dot()
    return Triple(subject, predicate, obj)


class _LineParser:
    def __init__(self, line: str, line_number: int):
        self.line = line
        self.pos = 0
        self.line_number = line_number

    def error(self, message: str) -> NTriplesError:
        return NTriplesError(self.line_number, message)

    def skip_space(self) -> None:
        while self.pos < len(self.line) and self.line[self.pos] in " \t":
            self.pos += 1

    def read_term(self, allow_literal: bool) -> Term:
        self.skip_space()
        if self.pos >= len(self.line):
            raise self.error("unexpected end of line")
        ch = self.line[self.pos]
        if ch == "<":
            return self._read_iri()
        if ch == "_":
            return self._read_blank()
        if ch == '"':
            if not allow_literal:
                raise self.error("literal not allowed in this position")
            return self._read_literal()
        raise self.error(f"unexpected token starting at {self.line[self.pos:self.pos + 10]!r}")

    def _read_iri(self) -> Iri:
        end = self.line.find(">", self.pos + 1)
        if end < 0:
            raise self.error("unterminated IRI")
        raw = self.line[self.pos + 1 : end]
        self.pos = end + 1
        return Iri(_unescape(raw, self))

    def _read_blank(self) -> BlankNode:
        if not self.line.startswith("_:", self.pos):
            raise self.error("malformed blank node label")
        start = self.pos + 2
        end = start
        while end < len(self.line) and self.line[end] not in " \t":
            end += 1
        if end == start:
            raise self.error("empty blank node label")
        self.pos = end
        return BlankNode(self.line[start:end])

    def _read_literal(self) -> Literal:
        chars: List[str] = []
        i = self.pos + 1
        while True:
            if i >= len(self.line):
                raise self.error("unterminated literal")
            ch = self.line[i]
            if ch == "\\":
                decoded, i = _decode_escape(self.line, i, self)
                chars.append(decoded)
            elif ch == '"':
                i += 1
                break
            else:
                chars.append(ch)
                i += 1
        lexical = "".join(chars)
        self.pos = i
        if self.line.startswith("^^", self.pos):
            self.pos += 2
            if self.pos >= len(self.line) or self.line[self.pos] != "<":
                raise self.error("datatype must be an IRI")
            datatype = self._read_iri()
            return Literal(lexical, datatype=datatype)
        if self.line.startswith("@", self.pos):
            start = self.pos + 1
            end = start
            while end < len(self.line) and (self.line[end].isalnum() or self.line[end] == "-"):
                end += 1
            if end == start:
                raise self.error("empty language tag")
            self.pos = end
            return Literal(lexical, lang=self.line[start:end])
        return Literal(lexical)

    def expect_dot(self) -> None:
        self.skip_space()
        if self.pos >= len(self.line) or self.line[self.pos] != ".":
            raise self.error("missing terminating '.'")
        rest = self.line[self.pos + 1 :].strip()
        if rest and not rest.startswith("#"):
            raise self.error(f"trailing content after '.': {rest!r}")


def _decode_escape(text: str, pos: int, parser: _LineParser):
    code = text[pos + 1] if pos + 1 < len(text) else ""
    if code in _ESCAPES:
        return _ESCAPES[code], pos + 2
    if code == "u":
        return _decode_codepoint(text, pos + 2, 4, parser)
    if code == "U":
        return _decode_codepoint(text, pos + 2, 8, parser)
    raise parser.error(f"bad escape sequence \\{code}")


def _decode_codepoint(text: str, start: int, width: int, parser: _LineParser):
    digits = text[start : start + width]
    if len(digits) < width:
        raise parser.error("truncated unicode escape")
    try:
        return chr(int(digits, 16)), start + width
    except ValueError:
        raise parser.error(f"bad unicode escape {digits!r}")


def _unescape(raw: str, parser: _LineParser) -> str:
    if "\\" not in raw:
        return raw
    chars: List[str] = []
    i = 0
    while i < len(raw):
        if raw[i] == "\\":
            decoded, i = _decode_escape(raw, i, parser)
            chars.append(decoded)
        else:
            chars.append(raw[i])
            i += 1
    return "".join(chars)


def serialize_ntriples(triples: Iterable[Triple]) -> str:
    """Render triples back to N-Triples text, one per line."""
    return "".join(serialize_triple(t) + "\n" for t in triples)


def serialize_triple(triple: Triple) -> str:
    return (
        f"{_render(triple.subject)} {_render(triple.predicate)} "
        f"{_render(triple.object)} ."
    )


def _render(term: Term) -> str:
    if isinstance(term, Iri):
        return f"<{term.text}>"
    if isinstance(term, BlankNode):
        return f"_:{term.label}"
    if isinstance(term, Literal):
        escaped = (
            term.lexical.replace("\\", "\\\\")
            .replace('"', '\\"')
            .replace("\n", "\\n")
            .replace("\r", "\\r")
            .replace("\t", "\\t")
        )
        if term.datatype is not None:
            return f'"{escaped}"^^<{term.datatype.text}>'
        if term.lang is not None:
            return f'"{escaped}"@{term.lang}'
        return f'"{escaped}"'
    raise TypeError(f"cannot serialize {term!r}")
