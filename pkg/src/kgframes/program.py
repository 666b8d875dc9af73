"""Line-oriented frame program files.

A program declares prefixes and graphs, builds named frames with one
operator call per line, and marks exactly one frame as the result:

    prefix dbpp: <http://dbpedia.org/property/>
    graph dbpedia = <http://dbpedia.org>
    frame movies = dbpedia.seed("movie", "dbpp:starring", "actor")
    movies.expand("actor", [("dbpp:birthPlace", "actor_country")])
    return movies

Frame lines are Python call syntax, parsed with ``ast`` and evaluated
against a whitelist of frame operations, so listings written for the
fluent API transcribe nearly verbatim. A call line without assignment
rebinds the frame at the root of the call chain.
"""

from __future__ import annotations

import ast
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .frames import (
    INCOMING,
    OPTIONAL,
    OUTGOING,
    FrameDescriptor,
    InnerJoin,
    KnowledgeGraph,
    LeftOuterJoin,
    OuterJoin,
    RightOuterJoin,
)
from .terms import Iri


class ProgramError(Exception):
    """A parse or validation failure, carrying the offending line."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass
class FrameProgram:
    graphs: Dict[str, Iri] = field(default_factory=dict)
    prefixes: Dict[str, str] = field(default_factory=dict)
    frames: Dict[str, FrameDescriptor] = field(default_factory=dict)
    result_name: Optional[str] = None

    @property
    def result(self) -> FrameDescriptor:
        if self.result_name is None:
            raise ProgramError("program has no result frame")
        return self.frames[self.result_name]


_PREFIX_LINE = re.compile(r"prefix\s+([A-Za-z_][\w-]*):\s*<([^<>\s]*)>\s*\Z")
_GRAPH_LINE = re.compile(r"graph\s+([A-Za-z_]\w*)\s*=\s*<([^<>\s]*)>\s*\Z")
_RETURN_LINE = re.compile(r"return\s+([A-Za-z_]\w*)\s*\Z")
_FRAME_LINE = re.compile(r"frame\s+([A-Za-z_]\w*)\s*=\s*(.*)\Z", re.S)

# Names usable inside frame expressions, mirroring the fluent API's
# module-level constants.
_CONSTANTS = {
    "InnerJoin": InnerJoin,
    "LeftOuterJoin": LeftOuterJoin,
    "RightOuterJoin": RightOuterJoin,
    "OuterJoin": OuterJoin,
    "FullOuterJoin": OuterJoin,
    "Optional": OPTIONAL,
    "OPTIONAL": OPTIONAL,
    "Incoming": INCOMING,
    "INCOMING": INCOMING,
    "Outgoing": OUTGOING,
    "OUTGOING": OUTGOING,
}

_GRAPH_METHODS = ("seed", "feature_domain_range", "entities", "explore_classes")
_FRAME_METHODS = (
    "expand",
    "filter",
    "select_cols",
    "join",
    "group_by",
    "aggregation",
    "count",
    "sum",
    "avg",
    "min",
    "max",
    "sample",
    "distinct_count",
    "aggregate",
    "sort",
    "head",
    "cache",
)


def parse_program(text: str) -> FrameProgram:
    """Parse and evaluate a program, validating structure as it goes."""
    program = FrameProgram()
    statements = _logical_lines(text)
    for line_no, line in statements:
        if _PREFIX_LINE.match(line):
            match = _PREFIX_LINE.match(line)
            program.prefixes[match.group(1)] = match.group(2)
    env: Dict[str, object] = {}
    for line_no, line in statements:
        if _PREFIX_LINE.match(line):
            continue
        match = _GRAPH_LINE.match(line)
        if match:
            name, uri = match.group(1), match.group(2)
            program.graphs[name] = Iri(uri)
            env[name] = KnowledgeGraph(uri, program.prefixes)
            continue
        match = _RETURN_LINE.match(line)
        if match:
            if program.result_name is not None:
                raise ProgramError("program already has a result frame", line_no)
            name = match.group(1)
            if not isinstance(env.get(name), FrameDescriptor):
                raise ProgramError(f"result {name!r} is not a defined frame", line_no)
            program.result_name = name
            continue
        match = _FRAME_LINE.match(line)
        if match:
            name, expr = match.group(1), match.group(2)
            env[name] = _eval_expression(expr, env, line_no)
            continue
        _eval_statement(line, env, line_no)
    program.frames = {
        name: value for name, value in env.items() if isinstance(value, FrameDescriptor)
    }
    if not program.frames:
        raise ProgramError("program defines no frames")
    if program.result_name is None:
        raise ProgramError("program has no return line")
    return program


def load_program(path: str) -> FrameProgram:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_program(handle.read())


def _logical_lines(text: str) -> List[Tuple[int, str]]:
    """Join physical lines while brackets are open, tracking line numbers."""
    statements: List[Tuple[int, str]] = []
    pending: List[str] = []
    start = 0
    depth = 0
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not pending:
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            start = number
        pending.append(line)
        depth += _bracket_delta(line, number)
        if depth < 0:
            raise ProgramError("unbalanced brackets", number)
        if depth == 0:
            statements.append((start, " ".join(part.strip() for part in pending)))
            pending = []
    if pending:
        raise ProgramError("unclosed bracket at end of program", start)
    return statements


def _bracket_delta(line: str, number: int) -> int:
    delta = 0
    quote = None
    for char in line:
        if quote:
            if char == quote:
                quote = None
        elif char in "'\"":
            quote = char
        elif char in "([{":
            delta += 1
        elif char in ")]}":
            delta -= 1
    if quote:
        raise ProgramError("unterminated string", number)
    return delta


def _parse_ast(source: str, line_no: int) -> ast.AST:
    try:
        return ast.parse(source, mode="exec")
    except SyntaxError as exc:
        raise ProgramError(f"syntax error: {exc.msg}", line_no) from exc


def _eval_statement(line: str, env: Dict[str, object], line_no: int) -> None:
    tree = _parse_ast(line, line_no)
    if len(tree.body) != 1:
        raise ProgramError("one statement per line", line_no)
    node = tree.body[0]
    if isinstance(node, ast.Assign):
        if len(node.targets) != 1 or not isinstance(node.targets[0], ast.Name):
            raise ProgramError("assignment target must be a plain name", line_no)
        env[node.targets[0].id] = _eval_node(node.value, env, line_no)
        return
    if isinstance(node, ast.Expr) and isinstance(node.value, ast.Call):
        root = _chain_root(node.value, line_no)
        result = _eval_node(node.value, env, line_no)
        if not isinstance(result, FrameDescriptor):
            raise ProgramError("bare call must produce a frame", line_no)
        env[root] = result
        return
    raise ProgramError("expected a frame definition or operator call", line_no)


def _eval_expression(expr: str, env: Dict[str, object], line_no: int):
    tree = _parse_ast(expr, line_no)
    if len(tree.body) != 1 or not isinstance(tree.body[0], ast.Expr):
        raise ProgramError("expected a single expression", line_no)
    return _eval_node(tree.body[0].value, env, line_no)


def _chain_root(node: ast.Call, line_no: int) -> str:
    """Name at the base of a method-call chain, for rebinding."""
    target = node.func
    while isinstance(target, ast.Attribute):
        if isinstance(target.value, ast.Call):
            target = target.value.func
        else:
            target = target.value
    if isinstance(target, ast.Name):
        return target.id
    raise ProgramError("call chain must start from a named frame or graph", line_no)


def _eval_node(node: ast.AST, env: Dict[str, object], line_no: int):
    if isinstance(node, ast.Call):
        return _eval_call(node, env, line_no)
    if isinstance(node, ast.Name):
        if node.id in env:
            return env[node.id]
        if node.id in _CONSTANTS:
            return _CONSTANTS[node.id]
        raise ProgramError(f"unknown name: {node.id}", line_no)
    if isinstance(node, ast.Constant):
        return node.value
    if isinstance(node, ast.List):
        return [_eval_node(item, env, line_no) for item in node.elts]
    if isinstance(node, ast.Tuple):
        return tuple(_eval_node(item, env, line_no) for item in node.elts)
    if isinstance(node, ast.Dict):
        out = {}
        for key, value in zip(node.keys, node.values):
            if key is None:
                raise ProgramError("dict unpacking is not supported", line_no)
            out[_eval_node(key, env, line_no)] = _eval_node(value, env, line_no)
        return out
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        operand = _eval_node(node.operand, env, line_no)
        if isinstance(operand, (int, float)):
            return -operand
    raise ProgramError(
        f"unsupported expression: {ast.dump(node, include_attributes=False)[:60]}",
        line_no,
    )


def _eval_call(node: ast.Call, env: Dict[str, object], line_no: int):
    if not isinstance(node.func, ast.Attribute):
        raise ProgramError("only method calls are supported", line_no)
    receiver = _eval_node(node.func.value, env, line_no)
    method = node.func.attr
    if isinstance(receiver, KnowledgeGraph):
        allowed = _GRAPH_METHODS
    elif isinstance(receiver, FrameDescriptor):
        allowed = _FRAME_METHODS
    else:
        raise ProgramError(
            f"cannot call methods on {type(receiver).__name__}", line_no
        )
    if method not in allowed:
        raise ProgramError(f"unknown operation: {method}", line_no)
    args = [_eval_node(arg, env, line_no) for arg in node.args]
    kwargs = {}
    for keyword in node.keywords:
        if keyword.arg is None:
            raise ProgramError("keyword unpacking is not supported", line_no)
        kwargs[keyword.arg] = _eval_node(keyword.value, env, line_no)
    try:
        return getattr(receiver, method)(*args, **kwargs)
    except (TypeError, ValueError) as exc:
        raise ProgramError(f"{method}: {exc}", line_no) from exc
