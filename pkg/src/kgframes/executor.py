"""Query execution over the standard HTTP protocol with pagination.

Results are fetched in pages by slicing with LIMIT/OFFSET: appended
textually when the query has no row modifiers of its own, otherwise by
wrapping the whole query as a subquery of an outer ``SELECT *`` so the
page window never interferes with user-specified limits. Page-to-page
consistency assumes a quiescent endpoint.

The HTTP transport is a plain callable so tests can substitute a local
fake and count requests; the default transport uses ``requests``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple
from urllib.parse import urlencode

from .tables import ResultTable
from .terms import BlankNode, Iri, Literal
from .emitter import tokenize

RESULTS_JSON = "application/sparql-results+json"

# Requests below this encoded size go out as GET, larger ones as form
# POST, avoiding URL-length limits.
GET_SIZE_LIMIT = 2000


class ExecutorError(Exception):
    """Base class for execution failures."""


class EndpointError(ExecutorError):
    """The endpoint answered with an error status."""

    def __init__(self, status: int, body: str):
        excerpt = body[:200]
        super().__init__(f"endpoint returned status {status}: {excerpt}")
        self.status = status
        self.body = excerpt


class EndpointTimeout(ExecutorError):
    """No response within the configured timeout after all retries."""


class ResultParseError(ExecutorError):
    """The response body is not a well-formed results document."""


class ProtocolError(ExecutorError):
    """Responses violated the protocol (e.g. columns changed between pages)."""


class TransportTimeout(Exception):
    """Raised by transports when a request times out."""


class TransportFailure(Exception):
    """Raised by transports on connection-level failures."""


# A transport takes (url, params, timeout, method) and returns
# (status code, body text); it raises the transport exceptions above.
Transport = Callable[[str, dict, float, str], Tuple[int, str]]


@dataclass
class EndpointConfig:
    url: str
    default_graph: Optional[Iri] = None
    page_size: int = 10000
    timeout: float = 60.0
    max_retries: int = 2

    def __post_init__(self):
        if self.page_size < 1:
            raise ValueError("page size must be at least 1")
        if self.max_retries < 0:
            raise ValueError("max retries must be non-negative")


def _requests_transport(url: str, params: dict, timeout: float, method: str):
    import requests

    headers = {"Accept": RESULTS_JSON}
    try:
        if method == "GET":
            response = requests.get(url, params=params, headers=headers, timeout=timeout)
        else:
            response = requests.post(url, data=params, headers=headers, timeout=timeout)
    except requests.Timeout as exc:
        raise TransportTimeout(str(exc)) from exc
    except requests.RequestException as exc:
        raise TransportFailure(str(exc)) from exc
    return response.status_code, response.text


def execute(
    query: str, config: EndpointConfig, transport: Optional[Transport] = None
) -> ResultTable:
    """Run a SELECT query, fetching pages until the result is complete.

    A page smaller than the page size ends the iteration; a user LIMIT
    within one page is sent through unmodified in a single request.
    """
    transport = transport or _requests_transport
    user_limit, _ = top_level_modifiers(query)
    if user_limit is not None and user_limit <= config.page_size:
        columns, rows = _request(query, config, transport)
        return ResultTable(tuple(columns), rows)
    columns: Optional[Sequence[str]] = None
    rows: List[tuple] = []
    remaining = user_limit
    page_index = 0
    while True:
        if remaining is not None and remaining <= config.page_size:
            # Last window under a user LIMIT: the row count tells us
            # we are done, no probe needed.
            fetch_limit = deliver = remaining
        else:
            # One row beyond the page signals continuation, so a result
            # that fills its last page exactly costs no extra request.
            fetch_limit = config.page_size + 1
            deliver = config.page_size
        paged = paged_query(query, fetch_limit, page_index * config.page_size)
        page_columns, fetched = _request(paged, config, transport)
        if columns is None:
            columns = page_columns
        elif list(columns) != list(page_columns):
            raise ProtocolError(
                f"columns changed between pages: {columns} then {page_columns}"
            )
        page_rows = fetched[:deliver]
        rows.extend(page_rows)
        if remaining is not None:
            remaining -= len(page_rows)
            if remaining <= 0:
                break
        if len(fetched) <= deliver:
            break
        page_index += 1
    return ResultTable(tuple(columns or ()), rows)


def _request(query: str, config: EndpointConfig, transport: Transport):
    params = {"query": query}
    if config.default_graph is not None:
        params["default-graph-uri"] = config.default_graph.text
    size = len(config.url) + 1 + len(urlencode(params))
    method = "GET" if size < GET_SIZE_LIMIT else "POST"
    attempts = config.max_retries + 1
    last_error: Optional[Exception] = None
    for _ in range(attempts):
        try:
            status, body = transport(config.url, params, config.timeout, method)
        except TransportTimeout as exc:
            last_error = exc
            continue
        except TransportFailure as exc:
            last_error = exc
            continue
        if 400 <= status < 500:
            raise EndpointError(status, body)
        if status >= 500:
            last_error = EndpointError(status, body)
            continue
        return parse_results(body)
    if isinstance(last_error, TransportTimeout):
        raise EndpointTimeout(f"no response after {attempts} attempts") from last_error
    if isinstance(last_error, EndpointError):
        raise last_error
    raise EndpointError(0, str(last_error))


# ============================================================================
# Query text slicing
# ============================================================================


def top_level_modifiers(query: str) -> Tuple[Optional[int], Optional[int]]:
    """(limit, offset) written at the outermost level of the query."""
    depth = 0
    limit = offset = None
    tokens = tokenize(query)
    for i, token in enumerate(tokens):
        if token == "{":
            depth += 1
        elif token == "}":
            depth -= 1
        elif depth == 0 and token.upper() in ("LIMIT", "OFFSET"):
            if i + 1 >= len(tokens) or not tokens[i + 1].isdigit():
                raise ValueError(f"malformed {token} clause")
            if token.upper() == "LIMIT":
                limit = int(tokens[i + 1])
            else:
                offset = int(tokens[i + 1])
    return limit, offset


def paged_query(query: str, limit: int, offset: int) -> str:
    """The query text for one page window.

    Without user modifiers the window is appended directly; otherwise
    the query nests as a subquery so its own LIMIT/OFFSET apply first
    and the window slices the already-modified result.
    """
    user_limit, user_offset = top_level_modifiers(query)
    if user_limit is None and user_offset is None:
        return f"{query.rstrip()}\nLIMIT {limit} OFFSET {offset}\n"
    prefixes, datasets, core = _split_header(query)
    lines = prefixes + ["SELECT *"] + datasets + ["WHERE {", "  {"]
    lines.extend("    " + line for line in core.splitlines())
    lines.extend(["  }", "}", f"LIMIT {limit} OFFSET {offset}"])
    return "\n".join(lines) + "\n"


def _split_header(query: str) -> Tuple[List[str], List[str], str]:
    """Separate PREFIX and FROM lines (illegal inside a subquery) from
    the body."""
    prefixes: List[str] = []
    datasets: List[str] = []
    core_lines: List[str] = []
    for line in query.splitlines():
        stripped = line.strip()
        if stripped.startswith("PREFIX "):
            prefixes.append(stripped)
        elif stripped.startswith("FROM "):
            datasets.append(stripped)
        else:
            core_lines.append(line)
    return prefixes, datasets, "\n".join(core_lines).strip()


# ============================================================================
# Results decoding
# ============================================================================


def parse_results(body: str) -> Tuple[List[str], List[tuple]]:
    """Decode a results-JSON document into (columns, rows)."""
    try:
        document = json.loads(body)
    except json.JSONDecodeError as exc:
        raise ResultParseError(
            f"malformed results document at byte {exc.pos}: {exc.msg}"
        ) from exc
    try:
        columns = list(document["head"]["vars"])
        bindings = document["results"]["bindings"]
    except (KeyError, TypeError) as exc:
        raise ResultParseError(f"missing results structure: {exc}") from exc
    rows = []
    for binding in bindings:
        if not isinstance(binding, dict):
            raise ResultParseError(f"binding is not an object: {binding!r}")
        rows.append(tuple(_decode_cell(binding.get(c)) for c in columns))
    return columns, rows


def _decode_cell(cell):
    if cell is None:
        return None
    try:
        kind = cell["type"]
        value = cell["value"]
    except (KeyError, TypeError) as exc:
        raise ResultParseError(f"malformed binding cell: {cell!r}") from exc
    if kind == "uri":
        return Iri(value)
    if kind in ("literal", "typed-literal"):
        datatype = cell.get("datatype")
        return Literal(
            value,
            datatype=Iri(datatype) if datatype else None,
            lang=cell.get("xml:lang"),
        )
    if kind == "bnode":
        return BlankNode(value)
    raise ResultParseError(f"unknown term type: {kind!r}")


def encode_results(table: ResultTable) -> str:
    """Serialize a table as a results-JSON document (mock endpoints and
    round-trip tests)."""
    bindings = []
    for row in table.rows:
        binding = {}
        for column, value in zip(table.columns, row):
            if value is None:
                continue
            binding[column] = _encode_cell(value)
        bindings.append(binding)
    return json.dumps(
        {"head": {"vars": list(table.columns)}, "results": {"bindings": bindings}}
    )


def _encode_cell(value) -> dict:
    if isinstance(value, Iri):
        return {"type": "uri", "value": value.text}
    if isinstance(value, BlankNode):
        return {"type": "bnode", "value": value.label}
    if isinstance(value, Literal):
        cell = {"type": "literal", "value": value.lexical}
        if value.datatype is not None:
            cell["datatype"] = value.datatype.text
        if value.lang is not None:
            cell["xml:lang"] = value.lang
        return cell
    if isinstance(value, bool):
        return {
            "type": "literal",
            "value": "true" if value else "false",
            "datatype": "http://www.w3.org/2001/XMLSchema#boolean",
        }
    if isinstance(value, int):
        return {
            "type": "literal",
            "value": str(value),
            "datatype": "http://www.w3.org/2001/XMLSchema#integer",
        }
    if isinstance(value, float):
        return {
            "type": "literal",
            "value": repr(value),
            "datatype": "http://www.w3.org/2001/XMLSchema#double",
        }
    raise TypeError(f"cannot encode cell: {value!r}")


# ============================================================================
# Table export
# ============================================================================


def cell_text(value) -> str:
    """Plain text form of a cell for delimited output."""
    if value is None:
        return ""
    if isinstance(value, Iri):
        return value.text
    if isinstance(value, Literal):
        return value.lexical
    if isinstance(value, BlankNode):
        return f"_:{value.label}"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_csv(table: ResultTable) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([cell_text(v) for v in row])
    return out.getvalue()


def to_tsv(table: ResultTable) -> str:
    def clean(text: str) -> str:
        return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")

    lines = ["\t".join(table.columns)]
    for row in table.rows:
        lines.append("\t".join(clean(cell_text(v)) for v in row))
    return "\n".join(lines) + "\n"


def to_json(table: ResultTable) -> str:
    rows = []
    for row in table.rows:
        rows.append([None if v is None else _encode_cell(v) for v in row])
    return json.dumps({"columns": list(table.columns), "rows": rows}, indent=2) + "\n"
