import {
  Direction,
  FrameRef,
  Incoming,
  InnerJoin,
  JoinType,
  Optional,
  Outgoing,
  StepFlag,
  Tuple,
  Value,
} from './values.js';

/**
 * One expansion step in list form: predicate, new column, then any of
 * the Incoming/Outgoing direction markers and the Optional flag.
 */
export type ExpandStep = readonly [string, string, ...(Direction | StepFlag)[]];

/** Conditions per column; each condition is an engine filter string. */
export type FilterConditions = {
  readonly [column: string]: string | readonly string[];
};

export type SortOrder = { readonly [column: string]: 'asc' | 'desc' };

interface SeedNode {
  readonly kind: 'seed';
  readonly graph: KnowledgeGraph;
  readonly method: string;
  readonly args: readonly Value[];
}

interface OpNode {
  readonly kind: 'op';
  readonly parent: BoundFrame;
  readonly method: string;
  readonly args: readonly Value[];
  readonly kwargs: { readonly [name: string]: Value };
}

export type FrameNode = SeedNode | OpNode;

/**
 * A lazily recorded operator pipeline bound to a knowledge graph.
 *
 * Methods mirror the engine's frame API name for name and signature
 * for signature; every call returns a new frame and records nothing
 * but the call itself. Compilation, validation, and execution all
 * happen in the engine, which this package reaches through its
 * command line and through the standard query protocol.
 */
export class BoundFrame {
  /** Recorded call this frame adds to its parent. Internal. */
  readonly node: FrameNode;

  constructor(node: FrameNode) {
    this.node = node;
  }

  private chain(
    method: string,
    args: readonly Value[],
    kwargs: { readonly [name: string]: Value } = {},
  ): BoundFrame {
    return new BoundFrame({ kind: 'op', parent: this, method, args, kwargs });
  }

  /**
   * Navigate from a column over a predicate into a new column, either
   * one step at a time or as a list of steps applied in order.
   */
  expand(col: string, steps: readonly ExpandStep[]): BoundFrame;
  expand(
    col: string,
    predicate: string,
    newCol: string,
    direction?: Direction,
    optional?: boolean,
  ): BoundFrame;
  expand(
    col: string,
    spec: string | readonly ExpandStep[],
    newCol?: string,
    direction: Direction = Outgoing,
    optional = false,
  ): BoundFrame {
    if (typeof spec !== 'string') {
      const steps = spec.map((step) => new Tuple(step as readonly Value[]));
      return this.chain('expand', [col, steps]);
    }
    if (newCol === undefined) {
      throw new TypeError('expand requires a new column name');
    }
    const args: Value[] = [col, spec, newCol];
    if (direction === Incoming) {
      args.push(Incoming);
    }
    const kwargs: { [name: string]: Value } = optional ? { optional: true } : {};
    return this.chain('expand', args, kwargs);
  }

  /** Keep rows satisfying all conditions (conjunctive per column). */
  filter(conditions: FilterConditions): BoundFrame {
    const normalized: { [column: string]: Value } = {};
    for (const [column, conds] of Object.entries(conditions)) {
      normalized[column] = typeof conds === 'string' ? [conds] : [...conds];
    }
    return this.chain('filter', [normalized]);
  }

  /** Project to the given columns, in the given order. */
  select_cols(cols: readonly string[]): BoundFrame {
    return this.chain('select_cols', [[...cols]]);
  }

  /**
   * Join with another frame on one column from each side. The second
   * column defaults to the first, and the join type may be passed in
   * its place, as in ``join(other, "actor", OuterJoin)``.
   */
  join(
    other: BoundFrame,
    col: string,
    col2?: string | JoinType,
    jtype: JoinType = InnerJoin,
    newCol?: string,
  ): BoundFrame {
    if (col2 instanceof JoinType) {
      jtype = col2;
      col2 = undefined;
    }
    const args: Value[] = [new FrameRef(other), col];
    const kwargs: { [name: string]: Value } = {};
    if (col2 !== undefined && col2 !== col) {
      args.push(col2);
      if (jtype !== InnerJoin) {
        args.push(jtype);
      }
    } else if (jtype !== InnerJoin) {
      args.push(jtype);
    }
    if (newCol !== undefined) {
      kwargs['new_col'] = newCol;
    }
    return this.chain('join', args, kwargs);
  }

  /** Group rows by the given columns; aggregations follow. */
  group_by(cols: readonly string[]): BoundFrame {
    return this.chain('group_by', [[...cols]]);
  }

  /** Apply an aggregation function within the current grouping. */
  aggregation(fn: string, col: string, newCol: string, distinct = false): BoundFrame {
    const kwargs: { [name: string]: Value } = distinct ? { distinct: true } : {};
    return this.chain('aggregation', [fn, col, newCol], kwargs);
  }

  count(col: string, newCol: string, unique = false): BoundFrame {
    const kwargs: { [name: string]: Value } = unique ? { unique: true } : {};
    return this.chain('count', [col, newCol], kwargs);
  }

  sum(col: string, newCol: string): BoundFrame {
    return this.chain('sum', [col, newCol]);
  }

  avg(col: string, newCol: string): BoundFrame {
    return this.chain('avg', [col, newCol]);
  }

  min(col: string, newCol: string): BoundFrame {
    return this.chain('min', [col, newCol]);
  }

  max(col: string, newCol: string): BoundFrame {
    return this.chain('max', [col, newCol]);
  }

  sample(col: string, newCol: string): BoundFrame {
    return this.chain('sample', [col, newCol]);
  }

  distinct_count(col: string, newCol: string): BoundFrame {
    return this.chain('distinct_count', [col, newCol]);
  }

  /** Aggregate over the whole frame without grouping. */
  aggregate(fn: string, col: string, newCol: string, distinct = false): BoundFrame {
    const kwargs: { [name: string]: Value } = distinct ? { distinct: true } : {};
    return this.chain('aggregate', [fn, col, newCol], kwargs);
  }

  /** Order rows by the given columns and directions. */
  sort(order: SortOrder): BoundFrame {
    return this.chain('sort', [order as { readonly [key: string]: Value }]);
  }

  /** Keep the first ``k`` rows, optionally after skipping ``offset``. */
  head(k: number, offset = 0): BoundFrame {
    const args: Value[] = offset === 0 ? [k] : [k, offset];
    return this.chain('head', args);
  }

  /** Mark this point of the pipeline for reuse by later frames. */
  cache(): BoundFrame {
    return this.chain('cache', []);
  }
}

/**
 * A named RDF graph on some endpoint, the root of every pipeline.
 * Prefixes declared here are usable in predicate and filter strings
 * of every frame seeded from the graph.
 */
export class KnowledgeGraph {
  readonly uri: string;
  readonly prefixes: { readonly [prefix: string]: string };

  constructor(uri: string, prefixes: { readonly [prefix: string]: string } = {}) {
    this.uri = uri;
    this.prefixes = { ...prefixes };
  }

  private blank(method: string, args: readonly Value[]): BoundFrame {
    return new BoundFrame({ kind: 'seed', graph: this, method, args });
  }

  /** Start a frame from one triple pattern; variables become columns. */
  seed(s: string, p: string, o: string): BoundFrame {
    return this.blank('seed', [s, p, o]);
  }

  /** All subject/object pairs of a predicate (a variable scans all). */
  feature_domain_range(pred: string, subjectCol: string, objectCol: string): BoundFrame {
    return this.blank('feature_domain_range', [pred, subjectCol, objectCol]);
  }

  /** All instances of a class, as a one-column frame. */
  entities(className: string, col: string): BoundFrame {
    return this.blank('entities', [className, col]);
  }

  /** Class frequency table of the graph. */
  explore_classes(): BoundFrame {
    return this.blank('explore_classes', []);
  }
}
