import { describe, expect, it } from 'vitest';

import { KnowledgeGraph } from '../src/frames.js';
import { serializeProgram } from '../src/program.js';
import {
  Incoming,
  InnerJoin,
  LeftOuterJoin,
  Optional,
  OuterJoin,
  quoteString,
} from '../src/values.js';

describe('quoteString', () => {
  it('double-quotes plain strings', () => {
    expect(quoteString('=dbpr:United_States')).toBe('"=dbpr:United_States"');
  });

  it('single-quotes strings containing double quotes', () => {
    expect(quoteString('regex("USA")')).toBe('\'regex("USA")\'');
  });

  it('escapes control characters either way', () => {
    expect(quoteString('a\nb')).toBe('"a\\nb"');
    expect(quoteString('a"\nb')).toBe("'a\"\\nb'");
  });

  it('rejects strings containing both quote characters', () => {
    expect(() => quoteString(`both "and" 'quotes'`)).toThrow(/both quote characters/);
  });
});

describe('serializeProgram', () => {
  it('writes a linear pipeline as one frame with rebinding lines', () => {
    const kg = new KnowledgeGraph('http://dbpedia.org');
    const frame = kg
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
    expect(serializeProgram(frame)).toBe(
      `graph dbpedia = <http://dbpedia.org>

frame f0 = dbpedia.feature_domain_range("dbpp:starring", "movie", "actor")
f0.expand("actor", [("dbpp:birthPlace", "actor_country")])
f0.filter({"actor_country": ["=dbpr:United_States"]})
f0.group_by(["actor"])
f0.count("movie", "movie_count", unique=True)
f0.filter({"movie_count": [">=50"]})
f0.expand("actor", [("dbpp:starring", "movie", Incoming), ("dbpp:academyAward", "award", Optional)])
return f0
`,
    );
  });

  it('names a shared frame once and branches the rest from it', () => {
    const kg = new KnowledgeGraph('http://dbpedia.org');
    const shared = kg.seed('movie', 'dbpp:starring', 'actor').cache();
    const left = shared.filter({ actor: ['isURI'] });
    const right = shared.group_by(['actor']).count('movie', 'n');
    const joined = left.join(right, 'actor', OuterJoin).join(shared, 'actor', InnerJoin);
    expect(serializeProgram(joined)).toBe(
      `graph dbpedia = <http://dbpedia.org>

frame f0 = dbpedia.seed("movie", "dbpp:starring", "actor")
f0.cache()
frame f1 = f0.group_by(["actor"])
f1.count("movie", "n")
frame f2 = f0.filter({"actor": ["isURI"]})
f2.join(f1, "actor", OuterJoin)
f2.join(f0, "actor")
return f2
`,
    );
  });

  it('declares prefixes from every graph and keeps first-use order', () => {
    const dbpedia = new KnowledgeGraph('http://dbpedia.org', {
      dbpp: 'http://dbpedia.org/property/',
    });
    const dblp = new KnowledgeGraph('http://dblp.l3s.de', {
      dc: 'http://purl.org/dc/elements/1.1/',
    });
    const left = dbpedia.seed('movie', 'dbpp:starring', 'actor');
    const right = dblp.seed('paper', 'dc:creator', 'actor');
    const text = serializeProgram(left.join(right, 'actor'));
    expect(text.split('\n').slice(0, 4)).toEqual([
      'prefix dc: <http://purl.org/dc/elements/1.1/>',
      'prefix dbpp: <http://dbpedia.org/property/>',
      'graph dblp = <http://dblp.l3s.de>',
      'graph dbpedia = <http://dbpedia.org>',
    ]);
  });

  it('rejects one prefix bound to two expansions', () => {
    const a = new KnowledgeGraph('http://one.example.org', { p: 'http://x/' });
    const b = new KnowledgeGraph('http://two.example.org', { p: 'http://y/' });
    const frame = a.seed('s', 'p:q', 'o').join(b.seed('s2', 'p:q', 'o2'), 'o', 'o2');
    expect(() => serializeProgram(frame)).toThrow(/prefix p:/);
  });

  it('suffixes graph names that collide and falls back on odd URIs', () => {
    const first = new KnowledgeGraph('http://example.org/a');
    const second = new KnowledgeGraph('http://example.org/b');
    const third = new KnowledgeGraph('not a uri');
    const frame = first
      .seed('s', '<http://x/p>', 'o')
      .join(second.seed('s2', '<http://x/p>', 'o2'), 'o', 'o2')
      .join(third.seed('s3', '<http://x/p>', 'o3'), 'o', 'o3', InnerJoin, 'merged');
    const text = serializeProgram(frame);
    expect(text).toContain('graph example = <http://example.org/b>');
    expect(text).toContain('graph example2 = <http://example.org/a>');
    expect(text).toContain('graph g = <not a uri>');
    expect(text).toContain('f2.join(f0, "o", "o2")');
    expect(text).toContain('f2.join(f1, "o", "o3", new_col="merged")');
  });

  it('serializes single-step expands with direction and optional flag', () => {
    const kg = new KnowledgeGraph('http://dbpedia.org');
    const frame = kg
      .seed('movie', 'dbpp:starring', 'actor')
      .expand('actor', 'dbpp:birthPlace', 'country')
      .expand('actor', 'dbpp:starring', 'film', Incoming)
      .expand('movie', 'dbpp:genre', 'genre', undefined, true);
    const text = serializeProgram(frame);
    expect(text).toContain('f0.expand("actor", "dbpp:birthPlace", "country")');
    expect(text).toContain('f0.expand("actor", "dbpp:starring", "film", Incoming)');
    expect(text).toContain('f0.expand("movie", "dbpp:genre", "genre", optional=True)');
  });

  it('serializes sorting, slicing, and join types', () => {
    const kg = new KnowledgeGraph('http://dbpedia.org');
    const base = kg.seed('movie', 'dbpp:starring', 'actor');
    const counts = base.group_by(['actor']).count('movie', 'n');
    const frame = counts
      .join(base, 'actor', LeftOuterJoin)
      .sort({ n: 'desc', actor: 'asc' })
      .head(10, 5);
    const text = serializeProgram(frame);
    expect(text).toContain('f1.join(f0, "actor", LeftOuterJoin)');
    expect(text).toContain('f1.sort({"n": "desc", "actor": "asc"})');
    expect(text).toContain('f1.head(10, 5)');
  });

  it('normalizes single filter conditions to lists', () => {
    const kg = new KnowledgeGraph('http://dbpedia.org');
    const frame = kg.seed('s', 'dbpp:p', 'o').filter({ o: 'isLiteral' });
    expect(serializeProgram(frame)).toContain('f0.filter({"o": ["isLiteral"]})');
  });

  it('requires a new column name for single-step expand', () => {
    const kg = new KnowledgeGraph('http://dbpedia.org');
    const seeded = kg.seed('s', 'dbpp:p', 'o');
    expect(() => seeded.expand('o', 'dbpp:q' as never)).toThrow(/new column name/);
  });
});
