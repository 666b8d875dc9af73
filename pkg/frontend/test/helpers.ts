import type { Transport } from '../src/endpoint.js';
import { BoundFrame, KnowledgeGraph } from '../src/frames.js';
import { Incoming, Optional } from '../src/values.js';

/**
 * The prolific-American-actors pipeline written as a program file, the
 * command-line twin of {@link awardActorsFrame}.
 */
export const REFERENCE_PROGRAM = `graph dbpedia = <http://dbpedia.org>

frame movies = dbpedia.feature_domain_range("dbpp:starring", "movie", "actor")
frame american = movies.expand("actor", [("dbpp:birthPlace", "actor_country")])
american.filter({"actor_country": ["=dbpr:United_States"]})
frame prolific = american.group_by(["actor"])
prolific.count("movie", "movie_count", unique=True)
prolific.filter({"movie_count": [">=50"]})
frame result = prolific.expand("actor", [
    ("dbpp:starring", "movie", Incoming),
    ("dbpp:academyAward", "award", Optional),
])
return result
`;

/** The same pipeline recorded through the fluent bindings. */
export function awardActorsFrame(): BoundFrame {
  const kg = new KnowledgeGraph('http://dbpedia.org');
  return kg
    .feature_domain_range('dbpp:starring', 'movie', 'actor')
    .expand('actor', [['dbpp:birthPlace', 'actor_country']])
    .filter({ actor_country: ['=dbpr:United_States'] })
    .group_by(['actor'])
    .count('movie', 'movie_count', true)
    .filter({ movie_count: ['>=50'] })
    .expand('actor', [
      ['dbpp:starring', 'movie', Incoming],
      ['dbpp:academyAward', 'award', Optional],
    ]);
}

export interface TermCell {
  type: string;
  value: string;
  datatype?: string;
  'xml:lang'?: string;
}

export function uri(value: string): TermCell {
  return { type: 'uri', value };
}

export function str(value: string): TermCell {
  return { type: 'literal', value };
}

export function int(value: number): TermCell {
  return {
    type: 'literal',
    value: String(value),
    datatype: 'http://www.w3.org/2001/XMLSchema#integer',
  };
}

/** A results-JSON document; null cells become unbound variables. */
export function resultsBody(
  vars: readonly string[],
  rows: ReadonlyArray<ReadonlyArray<TermCell | null>>,
): string {
  const bindings = rows.map((row) => {
    const binding: { [name: string]: TermCell } = {};
    vars.forEach((name, i) => {
      const cell = row[i];
      if (cell !== null && cell !== undefined) {
        binding[name] = cell;
      }
    });
    return binding;
  });
  return JSON.stringify({ head: { vars: [...vars] }, results: { bindings } });
}

export interface RecordedRequest {
  url: string;
  query: string;
  method: 'GET' | 'POST';
}

/**
 * A transport that answers from a fixed table, honouring the trailing
 * LIMIT/OFFSET window of each paged query, and records every request.
 */
export function windowedTransport(
  vars: readonly string[],
  rows: ReadonlyArray<ReadonlyArray<TermCell | null>>,
): { transport: Transport; requests: RecordedRequest[] } {
  const requests: RecordedRequest[] = [];
  const transport: Transport = async (url, params, _timeoutMs, method) => {
    const query = params['query'] ?? '';
    requests.push({ url, query, method });
    const window = /LIMIT (\d+) OFFSET (\d+)\s*$/.exec(query);
    let page = rows;
    if (window) {
      const limit = Number(window[1]);
      const offset = Number(window[2]);
      page = rows.slice(offset, offset + limit);
    }
    return { status: 200, body: resultsBody(vars, page) };
  };
  return { transport, requests };
}

/** A transport that replays scripted responses (or thrown errors). */
export function scriptedTransport(
  script: ReadonlyArray<{ status: number; body: string } | Error>,
): { transport: Transport; requests: RecordedRequest[] } {
  const requests: RecordedRequest[] = [];
  let cursor = 0;
  const transport: Transport = async (url, params, _timeoutMs, method) => {
    requests.push({ url, query: params['query'] ?? '', method });
    const step = script[Math.min(cursor, script.length - 1)];
    cursor += 1;
    if (step instanceof Error) {
      throw step;
    }
    if (step === undefined) {
      throw new Error('scripted transport ran out of responses');
    }
    return step;
  };
  return { transport, requests };
}
