"""Deterministic rendering of query models into query text.

Inside each group the order is fixed: triple patterns (consecutive
patterns with the same subject share one subject via ``;``), then
filters, subqueries, optional blocks, and union groups. PREFIX lines
appear only for declared prefixes the query actually uses, and FROM
clauses only on the outermost query.
"""

from __future__ import annotations

import re
from typing import List, Optional, Sequence

from .conditions import Compare, Condition, FunctionTest
from .querymodel import AggregationSpec, FilterClause, PatternEntry, QueryModel
from .terms import Iri, Literal, PatternTerm, PrefixedName

_AGG_NAMES = {
    "count": "COUNT",
    "sum": "SUM",
    "avg": "AVG",
    "min": "MIN",
    "max": "MAX",
    "sample": "SAMPLE",
}


class _RenderCtx:
    def __init__(self, graph_wrap: bool = False):
        self.used_prefixes: set = set()
        self.graph_wrap = graph_wrap


def emit(model: QueryModel) -> str:
    """Render a model as executable query text."""
    ctx = _RenderCtx(graph_wrap=len(model.from_graphs) > 1)
    lines = _render_model(model, 0, ctx, root=True)
    header = [
        f"PREFIX {name}: <{ns}>"
        for name, ns in model.prefixes.items()
        if name in ctx.used_prefixes
    ]
    return "\n".join(header + lines) + "\n"


def _render_model(
    model: QueryModel, indent: int, ctx: _RenderCtx, root: bool
) -> List[str]:
    pad = "  " * indent
    lines = [f"{pad}SELECT {_select_text(model, ctx)}"]
    if root:
        for graph in model.from_graphs:
            keyword = "FROM NAMED" if ctx.graph_wrap else "FROM"
            lines.append(f"{pad}{keyword} <{graph.text}>")
    lines.append(f"{pad}WHERE {{")
    lines.extend(_render_body(model, indent + 1, ctx))
    lines.append(f"{pad}}}")
    if model.group_vars:
        lines.append(f"{pad}GROUP BY " + " ".join(f"?{v}" for v in model.group_vars))
    if model.having:
        rendered = [
            _condition_text(_agg_expr(spec, ctx), cond, ctx)
            for spec, cond in model.having
        ]
        if len(rendered) == 1:
            lines.append(f"{pad}HAVING ( {rendered[0]} )")
        else:
            joined = " && ".join(f"( {r} )" for r in rendered)
            lines.append(f"{pad}HAVING ( {joined} )")
    if model.order:
        keys = [f"?{v}" if d == "asc" else f"DESC(?{v})" for v, d in model.order]
        lines.append(f"{pad}ORDER BY " + " ".join(keys))
    if model.limit is not None:
        lines.append(f"{pad}LIMIT {model.limit}")
    if model.offset is not None:
        lines.append(f"{pad}OFFSET {model.offset}")
    return lines


def _select_text(model: QueryModel, ctx: _RenderCtx) -> str:
    head = "DISTINCT " if model.distinct else ""
    if model.is_grouped():
        targets = {a.target: a for a in model.aggregations}
        items = []
        for var in model.visible_vars():
            if var in targets:
                items.append(f"({_agg_expr(targets[var], ctx)} AS ?{var})")
            else:
                items.append(f"?{var}")
        return head + " ".join(items)
    if model.select_vars:
        return head + " ".join(f"?{v}" for v in model.select_vars)
    return head + "*"


def _render_body(model: QueryModel, indent: int, ctx: _RenderCtx) -> List[str]:
    pad = "  " * indent
    lines = _pattern_lines(model.patterns, indent, ctx)
    for clause in model.filters:
        lines.append(pad + _filter_text(clause, ctx))
    for sub in model.subqueries:
        lines.append(f"{pad}{{")
        lines.extend(_render_model(sub, indent + 1, ctx, root=False))
        lines.append(f"{pad}}}")
    for block in model.optionals:
        lines.append(f"{pad}OPTIONAL {{")
        if not block.patterns and not block.filters and len(block.subqueries) == 1:
            lines.extend(_render_model(block.subqueries[0], indent + 1, ctx, root=False))
        else:
            lines.extend(_pattern_lines(block.patterns, indent + 1, ctx))
            for clause in block.filters:
                lines.append(f"{pad}  " + _filter_text(clause, ctx))
            for sub in block.subqueries:
                lines.append(f"{pad}  {{")
                lines.extend(_render_model(sub, indent + 2, ctx, root=False))
                lines.append(f"{pad}  }}")
        lines.append(f"{pad}}}")
    if model.union_branches:
        lines.append(f"{pad}{{")
        for index, branch in enumerate(model.union_branches):
            if index:
                lines.append(f"{pad}  UNION")
            lines.append(f"{pad}  {{")
            lines.extend(_render_model(branch, indent + 2, ctx, root=False))
            lines.append(f"{pad}  }}")
        lines.append(f"{pad}}}")
    return lines


def _pattern_lines(
    entries: Sequence[PatternEntry], indent: int, ctx: _RenderCtx
) -> List[str]:
    if not entries:
        return []
    if not ctx.graph_wrap:
        return _run_lines(entries, indent, ctx)
    pad = "  " * indent
    lines: List[str] = []
    start = 0
    for i in range(1, len(entries) + 1):
        if i == len(entries) or entries[i].graph != entries[start].graph:
            lines.append(f"{pad}GRAPH <{entries[start].graph.text}> {{")
            lines.extend(_run_lines(entries[start:i], indent + 1, ctx))
            lines.append(f"{pad}}}")
            start = i
    return lines


def _run_lines(
    entries: Sequence[PatternEntry], indent: int, ctx: _RenderCtx
) -> List[str]:
    """Triple lines; consecutive same-subject patterns share the subject."""
    pad = "  " * indent
    runs: List[List[PatternEntry]] = []
    for entry in entries:
        if runs and runs[-1][0].pattern[0] == entry.pattern[0]:
            runs[-1].append(entry)
        else:
            runs.append([entry])
    lines: List[str] = []
    for run_index, run in enumerate(runs):
        last_run = run_index == len(runs) - 1
        for i, entry in enumerate(run):
            s, p, o = entry.pattern
            p_text = render_pattern_term(p, ctx)
            o_text = render_pattern_term(o, ctx)
            text = f"{pad}  {p_text} {o_text}" if i else (
                f"{pad}{render_pattern_term(s, ctx)} {p_text} {o_text}"
            )
            if i < len(run) - 1:
                text += " ;"
            elif not last_run:
                text += " ."
            lines.append(text)
    return lines


def _agg_expr(spec: AggregationSpec, ctx: _RenderCtx) -> str:
    distinct = "DISTINCT " if spec.distinct else ""
    return f"{_AGG_NAMES[spec.fn]}({distinct}?{spec.src})"


def _filter_text(clause: FilterClause, ctx: _RenderCtx) -> str:
    items = list(clause.conditions())
    rendered = [_condition_text(f"?{col}", cond, ctx) for col, cond in items]
    if len(rendered) == 1:
        cond = items[0][1]
        if isinstance(cond, FunctionTest) and cond.name == "regex":
            return f"FILTER {rendered[0]}"
        return f"FILTER ( {rendered[0]} )"
    joined = " && ".join(f"( {r} )" for r in rendered)
    return f"FILTER ( {joined} )"


def render_condition(col: str, cond: Condition) -> str:
    """The expression text of one condition against a column."""
    return _condition_text(f"?{col}", cond, _RenderCtx())


def _condition_text(subject: str, cond: Condition, ctx: _RenderCtx) -> str:
    if isinstance(cond, Compare):
        return f"{subject} {cond.op} {_operand_text(cond.operand, ctx)}"
    if cond.name == "isURI":
        return f"isIRI({subject})"
    if cond.name == "isLiteral":
        return f"isLiteral({subject})"
    if cond.name == "regex":
        return f'regex(str({subject}), "{cond.args[0]}")'
    if cond.name == "in":
        rendered = ", ".join(_operand_text(arg, ctx) for arg in cond.args)
        return f"{subject} IN ({rendered})"
    if cond.name == "raw":
        return str(cond.args[0])
    raise ValueError(f"unknown condition function: {cond.name!r}")


def _operand_text(operand, ctx: _RenderCtx) -> str:
    if isinstance(operand, str):
        return f"?{operand}"
    if isinstance(operand, bool):
        return "true" if operand else "false"
    if isinstance(operand, (int, float)):
        return repr(operand)
    return render_pattern_term(operand, ctx)


def render_pattern_term(term: PatternTerm, ctx: Optional[_RenderCtx] = None) -> str:
    """One pattern position as query text; bare strings are variables."""
    if isinstance(term, str):
        return f"?{term}"
    if isinstance(term, Iri):
        return f"<{term.text}>"
    if isinstance(term, PrefixedName):
        if ctx is not None:
            ctx.used_prefixes.add(term.prefix)
        return f"{term.prefix}:{term.local}"
    if isinstance(term, Literal):
        quoted = '"' + _escape(term.lexical) + '"'
        if term.datatype is not None:
            return f"{quoted}^^<{term.datatype.text}>"
        if term.lang is not None:
            return f"{quoted}@{term.lang}"
        return quoted
    raise TypeError(f"cannot render term: {term!r}")


def _escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\r", "\\r")
        .replace("\t", "\\t")
    )


# ============================================================================
# Token comparison
# ============================================================================

_IRI_TOKEN_RE = re.compile(r'<[^<>"{}|^`\\\s]*>')


def tokenize(text: str) -> List[str]:
    """Split query text into comparison tokens.

    Quoted strings and ``<...>`` IRIs stay single tokens; braces,
    parentheses, commas, and semicolons always separate.
    """
    tokens: List[str] = []
    i = 0
    length = len(text)
    while i < length:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == '"':
            j = i + 1
            while j < length and text[j] != '"':
                if text[j] == "\\":
                    j += 1
                j += 1
            tokens.append(text[i : j + 1])
            i = j + 1
            continue
        if c == "<":
            match = _IRI_TOKEN_RE.match(text, i)
            if match:
                tokens.append(match.group(0))
                i = match.end()
                continue
            op = "<=" if text.startswith("<=", i) else "<"
            tokens.append(op)
            i += len(op)
            continue
        if c in "{}(),;":
            tokens.append(c)
            i += 1
            continue
        j = i
        while j < length and not text[j].isspace() and text[j] not in '{}(),;"<':
            j += 1
        tokens.append(text[i:j])
        i = j
    return tokens


def normalized_tokens(text: str) -> List[str]:
    """Comparison tokens with bare dot separators dropped."""
    return [t for t in tokenize(text) if t != "."]
