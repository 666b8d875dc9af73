import { BoundFrame, KnowledgeGraph } from './frames.js';
import { FrameRef, ProgramConstant, Tuple, Value, quoteString } from './values.js';

/**
 * Serialize a frame into engine program text.
 *
 * The program declares every prefix and graph the pipeline reaches,
 * builds frames with one operator call per line, and returns the
 * given frame. Frames shared by several pipelines (branch points and
 * join operands) are named once and referenced; a frame used in only
 * one place extends its parent's lines in place.
 */
export function serializeProgram(result: BoundFrame): string {
  return new ProgramWriter(result).write();
}

class ProgramWriter {
  private readonly result: BoundFrame;
  private readonly references = new Map<BoundFrame, number>();
  private readonly frameNames = new Map<BoundFrame, string>();
  private readonly graphNames = new Map<KnowledgeGraph, string>();
  private readonly usedNames = new Set<string>();
  private readonly prefixes = new Map<string, string>();
  private readonly graphLines: string[] = [];
  private readonly frameLines: string[] = [];
  private frameCount = 0;

  constructor(result: BoundFrame) {
    this.result = result;
    this.countReferences();
  }

  write(): string {
    const name = this.emitFrame(this.result);
    const lines: string[] = [];
    for (const [prefix, expansion] of this.prefixes) {
      lines.push(`prefix ${prefix}: <${expansion}>`);
    }
    lines.push(...this.graphLines);
    lines.push('');
    lines.push(...this.frameLines);
    lines.push(`return ${name}`);
    return lines.join('\n') + '\n';
  }

  // -- reference counting ----------------------------------------------------

  private countReferences(): void {
    const visited = new Set<BoundFrame>();
    const stack = [this.result];
    this.bump(this.result);
    while (stack.length > 0) {
      const frame = stack.pop()!;
      if (visited.has(frame)) {
        continue;
      }
      visited.add(frame);
      const node = frame.node;
      if (node.kind === 'op') {
        this.bump(node.parent);
        stack.push(node.parent);
        for (const ref of frameRefs(node.args)) {
          this.bump(ref.frame);
          stack.push(ref.frame);
        }
      }
    }
  }

  private bump(frame: BoundFrame): void {
    this.references.set(frame, (this.references.get(frame) ?? 0) + 1);
  }

  // -- frame emission ----------------------------------------------------------

  private emitFrame(frame: BoundFrame): string {
    const known = this.frameNames.get(frame);
    if (known !== undefined) {
      return known;
    }
    type OpNode = Extract<BoundFrame['node'], { kind: 'op' }>;
    const ops: OpNode[] = [];
    let cursor: BoundFrame = frame;
    let sharedBase: BoundFrame | null = null;
    while (cursor.node.kind === 'op') {
      ops.unshift(cursor.node);
      const parent = cursor.node.parent;
      if (this.frameNames.has(parent) || (this.references.get(parent) ?? 0) >= 2) {
        sharedBase = parent;
        break;
      }
      cursor = parent;
    }
    // A shared base and any join operands must be defined on earlier
    // lines than the operator lines that name them.
    const baseName = sharedBase === null ? null : this.emitFrame(sharedBase);
    for (const op of ops) {
      for (const ref of frameRefs(op.args)) {
        this.emitFrame(ref.frame);
      }
    }
    const name = this.freshFrameName();
    let rest: OpNode[];
    if (baseName !== null) {
      const first = ops[0]!;
      this.frameLines.push(`frame ${name} = ${baseName}.${this.renderCall(first)}`);
      rest = ops.slice(1);
    } else {
      const seed = cursor.node as Extract<BoundFrame['node'], { kind: 'seed' }>;
      const graph = this.graphName(seed.graph);
      this.frameLines.push(
        `frame ${name} = ${graph}.${seed.method}(${this.renderArgs(seed.args, {})})`,
      );
      rest = ops;
    }
    for (const op of rest) {
      this.frameLines.push(`${name}.${this.renderCall(op)}`);
    }
    this.frameNames.set(frame, name);
    return name;
  }

  private renderCall(op: { method: string; args: readonly Value[]; kwargs: { readonly [name: string]: Value } }): string {
    return `${op.method}(${this.renderArgs(op.args, op.kwargs)})`;
  }

  private renderArgs(
    args: readonly Value[],
    kwargs: { readonly [name: string]: Value },
  ): string {
    const parts = args.map((arg) => this.renderValue(arg));
    for (const [key, value] of Object.entries(kwargs)) {
      parts.push(`${key}=${this.renderValue(value)}`);
    }
    return parts.join(', ');
  }

  private renderValue(value: Value): string {
    if (value instanceof ProgramConstant) {
      return value.token;
    }
    if (value instanceof FrameRef) {
      const name = this.frameNames.get(value.frame);
      if (name === undefined) {
        throw new Error('frame referenced before being serialized');
      }
      return name;
    }
    if (value instanceof Tuple) {
      const items = value.items.map((item) => this.renderValue(item));
      return items.length === 1 ? `(${items[0]},)` : `(${items.join(', ')})`;
    }
    if (typeof value === 'string') {
      return quoteString(value);
    }
    if (typeof value === 'number') {
      if (!Number.isFinite(value)) {
        throw new Error(`cannot serialize a non-finite number: ${value}`);
      }
      return String(value);
    }
    if (typeof value === 'boolean') {
      return value ? 'True' : 'False';
    }
    if (Array.isArray(value)) {
      return `[${value.map((item) => this.renderValue(item)).join(', ')}]`;
    }
    const entries = Object.entries(value as { [key: string]: Value });
    const rendered = entries.map(
      ([key, item]) => `${quoteString(key)}: ${this.renderValue(item)}`,
    );
    return `{${rendered.join(', ')}}`;
  }

  // -- naming -------------------------------------------------------------------

  private freshFrameName(): string {
    let name: string;
    do {
      name = `f${this.frameCount}`;
      this.frameCount += 1;
    } while (this.usedNames.has(name));
    this.usedNames.add(name);
    return name;
  }

  private graphName(graph: KnowledgeGraph): string {
    const known = this.graphNames.get(graph);
    if (known !== undefined) {
      return known;
    }
    let name = hostLabel(graph.uri);
    if (this.usedNames.has(name)) {
      let counter = 2;
      while (this.usedNames.has(`${name}${counter}`)) {
        counter += 1;
      }
      name = `${name}${counter}`;
    }
    this.usedNames.add(name);
    this.graphNames.set(graph, name);
    this.graphLines.push(`graph ${name} = <${graph.uri}>`);
    for (const [prefix, expansion] of Object.entries(graph.prefixes)) {
      const existing = this.prefixes.get(prefix);
      if (existing !== undefined && existing !== expansion) {
        throw new Error(
          `prefix ${prefix}: declared as both <${existing}> and <${expansion}>`,
        );
      }
      this.prefixes.set(prefix, expansion);
    }
    return name;
  }
}

function* frameRefs(values: readonly Value[]): Iterable<FrameRef> {
  for (const value of values) {
    if (value instanceof FrameRef) {
      yield value;
    } else if (value instanceof Tuple) {
      yield* frameRefs(value.items);
    } else if (Array.isArray(value)) {
      yield* frameRefs(value);
    } else if (
      value !== null &&
      typeof value === 'object' &&
      !(value instanceof ProgramConstant)
    ) {
      yield* frameRefs(Object.values(value));
    }
  }
}

/** Program identifier derived from a graph URI's first host label. */
function hostLabel(uri: string): string {
  let host = '';
  try {
    host = new URL(uri).hostname;
  } catch {
    host = '';
  }
  const label = host.split('.')[0] ?? '';
  const cleaned = label.replace(/[^A-Za-z0-9_]/g, '');
  if (cleaned && /^[A-Za-z_]/.test(cleaned)) {
    return cleaned;
  }
  return 'g';
}
