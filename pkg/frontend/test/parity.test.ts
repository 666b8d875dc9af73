import { describe, expect, it } from 'vitest';

import { compile, compileProgram } from '../src/engine.js';
import { KnowledgeGraph } from '../src/frames.js';
import {
  Incoming,
  LeftOuterJoin,
  OuterJoin,
  RightOuterJoin,
} from '../src/values.js';
import { REFERENCE_PROGRAM, awardActorsFrame } from './helpers.js';

describe('engine parity', () => {
  it('compiles the fluent transcription byte-identical to the command-line path', () => {
    const viaBindings = compile(awardActorsFrame());
    const viaCli = compileProgram(REFERENCE_PROGRAM);
    expect(viaBindings).toBe(viaCli);
    expect(viaBindings).toContain('SELECT');
  });

  it('compiles deterministically', () => {
    expect(compile(awardActorsFrame())).toBe(compile(awardActorsFrame()));
  });

  it('compiles the naive translation on request', () => {
    const optimized = compile(awardActorsFrame());
    const naive = compile(awardActorsFrame(), { naive: true });
    expect(naive).not.toBe(optimized);
    expect(naive).toContain('SELECT');
  });

  it('surfaces engine validation errors with their line numbers', () => {
    const kg = new KnowledgeGraph('http://dbpedia.org');
    const bad = kg.seed('s', 'dbpp:p', 'o').filter({ missing: ['isURI'] });
    expect(() => compile(bad)).toThrow(/line 4/);
  });

  it('fails clearly when the engine command does not exist', () => {
    const kg = new KnowledgeGraph('http://dbpedia.org');
    const frame = kg.seed('s', 'dbpp:p', 'o');
    expect(() => compile(frame, { command: '/nonexistent/engine' })).toThrow(
      /cannot run engine command/,
    );
  });
});

describe('operator reachability', () => {
  const kg = new KnowledgeGraph('http://example.org', {
    ex: 'http://example.org/ns/',
  });

  it('compiles every navigational and relational operator', () => {
    const frame = kg
      .seed('s', 'ex:p0', 'o')
      .expand('o', 'ex:p1', 'x', Incoming)
      .expand('o', 'ex:p2', 'y', undefined, true)
      .filter({ x: ['isURI'], y: ['!=3'] })
      .select_cols(['o', 'x'])
      .sort({ o: 'asc', x: 'desc' })
      .head(5, 2);
    expect(compile(frame)).toContain('SELECT');
  });

  it('compiles grouped aggregations of every kind', () => {
    const grouped = kg
      .entities('ex:Film', 'film')
      .expand('film', 'ex:gross', 'gross')
      .group_by(['film'])
      .sum('gross', 'total')
      .avg('gross', 'mean')
      .min('gross', 'low')
      .max('gross', 'high')
      .sample('gross', 'one')
      .distinct_count('gross', 'kinds')
      .aggregation('count', 'gross', 'n', true)
      .filter({ total: ['>=10'] });
    expect(compile(grouped)).toContain('GROUP BY');
  });

  it('compiles a global aggregate', () => {
    const frame = kg.seed('s', 'ex:p0', 'o').aggregate('count', 's', 'n');
    expect(compile(frame)).toContain('COUNT');
  });

  it('compiles every join type', () => {
    const base = kg.feature_domain_range('ex:p0', 's', 'o').cache();
    const other = kg.seed('s2', 'ex:p1', 'o2');
    const joined = base
      .join(other, 'o', 'o2', LeftOuterJoin, 'shared')
      .join(kg.seed('s3', 'ex:p2', 'shared'), 'shared', RightOuterJoin)
      .join(kg.seed('s4', 'ex:p3', 'shared'), 'shared', OuterJoin);
    expect(compile(joined)).toContain('UNION');
  });

  it('compiles the class frequency scan', () => {
    expect(compile(kg.explore_classes())).toContain('SELECT');
  });
});
