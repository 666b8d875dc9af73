/** A decoded result cell; unbound variables decode to null. */
export type Cell = string | number | boolean | null;

/**
 * An immutable columnar table of decoded query results. Column order
 * is the query's projection order; rows keep the endpoint's order.
 */
export class DataFrame {
  readonly columns: readonly string[];
  private readonly _rows: ReadonlyArray<readonly Cell[]>;

  constructor(columns: readonly string[], rows: ReadonlyArray<readonly Cell[]>) {
    const seen = new Set<string>();
    for (const name of columns) {
      if (seen.has(name)) {
        throw new Error(`duplicate column name: ${name}`);
      }
      seen.add(name);
    }
    for (const row of rows) {
      if (row.length !== columns.length) {
        throw new Error(
          `row of width ${row.length} in a table of ${columns.length} columns`,
        );
      }
    }
    this.columns = [...columns];
    this._rows = rows.map((row) => [...row]);
  }

  get length(): number {
    return this._rows.length;
  }

  row(index: number): { [column: string]: Cell } {
    const cells = this._rows[index];
    if (cells === undefined) {
      throw new RangeError(`row ${index} out of bounds for ${this.length} rows`);
    }
    const out: { [column: string]: Cell } = {};
    this.columns.forEach((name, i) => {
      out[name] = cells[i]!;
    });
    return out;
  }

  col(name: string): Cell[] {
    const index = this.columns.indexOf(name);
    if (index < 0) {
      throw new Error(`unknown column ${name}; have ${this.columns.join(', ')}`);
    }
    return this._rows.map((row) => row[index]!);
  }

  toArray(): { [column: string]: Cell }[] {
    return this._rows.map((_, i) => this.row(i));
  }

  *[Symbol.iterator](): Iterator<{ [column: string]: Cell }> {
    for (let i = 0; i < this.length; i += 1) {
      yield this.row(i);
    }
  }
}
