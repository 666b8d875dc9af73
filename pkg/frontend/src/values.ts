import type { BoundFrame } from './frames.js';

/** A named constant rendered bare (unquoted) in engine program text. */
export class ProgramConstant {
  constructor(readonly token: string) {}
}

/** Edge direction for expansion steps. */
export class Direction extends ProgramConstant {}

/** Marks an expansion step as optional inside a multi-step list. */
export class StepFlag extends ProgramConstant {}

/** How two frames combine in a join. */
export class JoinType extends ProgramConstant {}

export const Outgoing = new Direction('Outgoing');
export const Incoming = new Direction('Incoming');
export const Optional = new StepFlag('Optional');

export const InnerJoin = new JoinType('InnerJoin');
export const LeftOuterJoin = new JoinType('LeftOuterJoin');
export const RightOuterJoin = new JoinType('RightOuterJoin');
export const OuterJoin = new JoinType('OuterJoin');

/** A reference to another frame inside an operator's arguments. */
export class FrameRef {
  constructor(readonly frame: BoundFrame) {}
}

/** Renders between parentheses rather than brackets in program text. */
export class Tuple {
  constructor(readonly items: readonly Value[]) {}
}

/**
 * An argument value as recorded by the fluent API, covering everything
 * the engine's program grammar can express.
 */
export type Value =
  | string
  | number
  | boolean
  | ProgramConstant
  | FrameRef
  | Tuple
  | readonly Value[]
  | { readonly [key: string]: Value };

/**
 * Quote a string for a program line.
 *
 * The engine joins multi-line statements with a character scanner that
 * tracks quotes but not backslash escapes, so a quote character can
 * never appear escaped inside a string delimited by the same quote.
 * Strings are double-quoted unless they contain a double quote, and a
 * string containing both quote characters cannot be written at all.
 */
export function quoteString(text: string): string {
  if (!text.includes('"')) {
    return JSON.stringify(text);
  }
  if (!text.includes("'")) {
    const escaped = text
      .replace(/\\/g, '\\\\')
      .replace(/\n/g, '\\n')
      .replace(/\r/g, '\\r')
      .replace(/\t/g, '\\t');
    return `'${escaped}'`;
  }
  throw new Error(
    `cannot quote a string containing both quote characters: ${JSON.stringify(text)}`,
  );
}
