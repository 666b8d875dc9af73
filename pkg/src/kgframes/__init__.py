"""Dataframe-style queries over RDF knowledge graphs.

Frames record operator sequences lazily; the generator folds a whole
recording into one query model, the emitter prints it as SPARQL, and
the executor pages results from an endpoint. Two independent local
evaluation routes (direct operator replay and query-model algebra)
exist so generated queries can be verified against ground truth.
"""

from .conditions import Compare, Condition, FunctionTest, parse_condition
from .emitter import emit
from .executor import EndpointConfig, EndpointError, EndpointTimeout, execute
from .frames import (
    AGGREGATION_FNS,
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
from .generator import generate, naive_generate, subquery_count
from .program import FrameProgram, ProgramError, load_program, parse_program
from .querymodel import QueryModel
from .store import GraphStore
from .tables import ResultTable, bag_equal, first_difference
from .terms import BlankNode, Iri, Literal, PrefixedName, Triple

__version__ = "0.1.0"

__all__ = [
    "AGGREGATION_FNS",
    "BlankNode",
    "Compare",
    "Condition",
    "EndpointConfig",
    "EndpointError",
    "EndpointTimeout",
    "FrameDescriptor",
    "FrameProgram",
    "FunctionTest",
    "GraphStore",
    "INCOMING",
    "InnerJoin",
    "Iri",
    "KnowledgeGraph",
    "LeftOuterJoin",
    "Literal",
    "OPTIONAL",
    "OUTGOING",
    "OuterJoin",
    "PrefixedName",
    "ProgramError",
    "QueryModel",
    "ResultTable",
    "RightOuterJoin",
    "Triple",
    "bag_equal",
    "emit",
    "execute",
    "first_difference",
    "generate",
    "load_program",
    "naive_generate",
    "parse_condition",
    "parse_program",
    "subquery_count",
    "__version__",
]
