export {
  BoundFrame,
  KnowledgeGraph,
  type ExpandStep,
  type FilterConditions,
  type SortOrder,
} from './frames.js';
export {
  Direction,
  FrameRef,
  Incoming,
  InnerJoin,
  JoinType,
  LeftOuterJoin,
  Optional,
  OuterJoin,
  Outgoing,
  RightOuterJoin,
  StepFlag,
  Tuple,
  type Value,
} from './values.js';
export { serializeProgram } from './program.js';
export { EngineError, compile, compileProgram, type CompileOptions } from './engine.js';
export { Cell, DataFrame } from './dataframe.js';
export { ResultParseError, decodeResults, type DecodedResults } from './results.js';
export {
  EndpointHttpError,
  EndpointTimeoutError,
  ProtocolError,
  RESULTS_JSON,
  TransportFailureError,
  TransportTimeoutError,
  execute,
  executeQuery,
  fetchTransport,
  pagedQuery,
  topLevelModifiers,
  type EndpointOptions,
  type Transport,
} from './endpoint.js';
