import type { Cell } from './dataframe.js';

/** The response body is not a well-formed results document. */
export class ResultParseError extends Error {}

const XSD = 'http://www.w3.org/2001/XMLSchema#';

const NUMERIC_DATATYPES = new Set(
  [
    'integer',
    'decimal',
    'double',
    'float',
    'int',
    'long',
    'short',
    'byte',
    'nonNegativeInteger',
    'nonPositiveInteger',
    'negativeInteger',
    'positiveInteger',
    'unsignedLong',
    'unsignedInt',
    'unsignedShort',
    'unsignedByte',
  ].map((name) => XSD + name),
);

export interface DecodedResults {
  columns: string[];
  rows: Cell[][];
}

/**
 * Decode a results-JSON document into columns and rows of plain
 * JavaScript values: IRIs as their text, blank nodes as ``_:label``,
 * numeric and boolean literals as numbers and booleans, every other
 * literal as its lexical form, and unbound variables as null.
 */
export function decodeResults(body: string): DecodedResults {
  let document: unknown;
  try {
    document = JSON.parse(body);
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    throw new ResultParseError(`malformed results document: ${message}`);
  }
  const head = (document as { head?: { vars?: unknown } }).head;
  const results = (document as { results?: { bindings?: unknown } }).results;
  if (!head || !Array.isArray(head.vars) || !results || !Array.isArray(results.bindings)) {
    throw new ResultParseError('missing results structure');
  }
  const columns = head.vars.map((name) => {
    if (typeof name !== 'string') {
      throw new ResultParseError(`variable name is not a string: ${JSON.stringify(name)}`);
    }
    return name;
  });
  const rows: Cell[][] = [];
  for (const binding of results.bindings) {
    if (binding === null || typeof binding !== 'object' || Array.isArray(binding)) {
      throw new ResultParseError(`binding is not an object: ${JSON.stringify(binding)}`);
    }
    const record = binding as { [name: string]: unknown };
    rows.push(columns.map((name) => decodeCell(record[name])));
  }
  return { columns, rows };
}

function decodeCell(cell: unknown): Cell {
  if (cell === undefined || cell === null) {
    return null;
  }
  if (typeof cell !== 'object' || Array.isArray(cell)) {
    throw new ResultParseError(`malformed binding cell: ${JSON.stringify(cell)}`);
  }
  const { type, value, datatype } = cell as {
    type?: unknown;
    value?: unknown;
    datatype?: unknown;
  };
  if (typeof type !== 'string' || typeof value !== 'string') {
    throw new ResultParseError(`malformed binding cell: ${JSON.stringify(cell)}`);
  }
  if (type === 'uri') {
    return value;
  }
  if (type === 'bnode') {
    return `_:${value}`;
  }
  if (type === 'literal' || type === 'typed-literal') {
    if (typeof datatype === 'string') {
      if (datatype === `${XSD}boolean`) {
        return value === 'true' || value === '1';
      }
      if (NUMERIC_DATATYPES.has(datatype)) {
        const parsed = Number(value);
        return Number.isNaN(parsed) ? value : parsed;
      }
    }
    return value;
  }
  throw new ResultParseError(`unknown term type: ${JSON.stringify(type)}`);
}
