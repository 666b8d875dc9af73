import { spawnSync } from 'node:child_process';
import { mkdtempSync, rmSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';

import type { BoundFrame } from './frames.js';
import { serializeProgram } from './program.js';

/** The engine command failed or could not be run at all. */
export class EngineError extends Error {}

export interface CompileOptions {
  /** Engine executable; defaults to $KGFRAMES_BIN, then "kgframes". */
  command?: string;
  /** Emit the unoptimized one-subquery-per-operator translation. */
  naive?: boolean;
}

export function engineCommand(options: CompileOptions = {}): string {
  return options.command ?? process.env['KGFRAMES_BIN'] ?? 'kgframes';
}

/**
 * Compile program text to SPARQL by running the engine's command line.
 * The output is exactly the engine's, byte for byte; this package adds
 * no query text of its own.
 */
export function compileProgram(programText: string, options: CompileOptions = {}): string {
  const command = engineCommand(options);
  const dir = mkdtempSync(join(tmpdir(), 'kgframes-client-'));
  try {
    const file = join(dir, 'program.kgf');
    writeFileSync(file, programText, 'utf8');
    const args = ['compile', ...(options.naive ? ['--naive'] : []), file];
    const proc = spawnSync(command, args, { encoding: 'utf8' });
    if (proc.error) {
      throw new EngineError(`cannot run engine command ${command}: ${proc.error.message}`);
    }
    if (proc.status !== 0) {
      const detail = (proc.stderr ?? '').trim() || `exit status ${proc.status}`;
      throw new EngineError(`engine compile failed: ${detail}`);
    }
    return proc.stdout;
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

/** Serialize a frame and compile it through the engine. */
export function compile(frame: BoundFrame, options: CompileOptions = {}): string {
  return compileProgram(serializeProgram(frame), options);
}
