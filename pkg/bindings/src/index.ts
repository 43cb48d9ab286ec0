/**
 * Thin bindings over the gazetrace CLI for analysis scripts.
 *
 * No pipeline logic lives here: every call shells out to the CLI and
 * returns its JSON payload unchanged, so results are field-for-field
 * identical to what the command line produces. Set GAZETRACE_CMD to
 * override the command used to invoke the core (default
 * "python3 -m gazetrace").
 */

import { execFileSync } from 'node:child_process'
import { mkdtempSync, rmSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { join } from 'node:path'

export interface FixationRecord {
  snapshot: number
  t_start: number
  t_end: number
  duration_ms: number
  centroid_x: number
  centroid_y: number
  line: number
  col: number
  token_id: number | null
  sample_count: number
}

export interface TokenFixations {
  token_id: number
  fixations: FixationRecord[]
}

export interface AdjustedPosition {
  fixation_index: number
  target_snapshot: number
  mapped: boolean
  line: number | null
  col: number | null
}

export interface TokenChangeSet {
  batch: number
  died: number[]
  born: number[]
  affected_fixations: FixationRecord[]
}

function defaultCommand(): string[] {
  return (process.env.GAZETRACE_CMD ?? 'python3 -m gazetrace').split(' ')
}

export function runCli(args: string[], command: string[] = defaultCommand()): string {
  const [head, ...rest] = command
  try {
    return execFileSync(head, [...rest, ...args], {
      encoding: 'utf-8',
      stdio: ['ignore', 'pipe', 'pipe'],
      maxBuffer: 64 * 1024 * 1024,
    })
  } catch (err: any) {
    if (err.status === undefined) throw err
    const stderr = err.stderr?.toString().trim() ?? ''
    throw new Error(`gazetrace ${args[0]} exited ${err.status}: ${stderr}`)
  }
}

/**
 * A processed session. Opening runs the whole pipeline once (which also
 * checks that replay reproduces the saved final file); the handle stays
 * valid until close() is called.
 */
export class BoundSession {
  private artifacts: string | null

  private constructor(
    readonly sessionDir: string,
    artifactsDir: string,
    private readonly command: string[],
  ) {
    this.artifacts = artifactsDir
  }

  static open(sessionDir: string, command: string[] = defaultCommand()): BoundSession {
    const artifacts = mkdtempSync(join(tmpdir(), 'gazetrace-'))
    try {
      runCli(['process', sessionDir, '--out', artifacts], command)
    } catch (err) {
      rmSync(artifacts, { recursive: true, force: true })
      throw err
    }
    return new BoundSession(sessionDir, artifacts, command)
  }

  /** Directory holding the artifacts written while opening the session. */
  get artifactsDir(): string {
    this.ensureOpen()
    return this.artifacts as string
  }

  get closed(): boolean {
    return this.artifacts === null
  }

  close(): void {
    if (this.artifacts !== null) {
      rmSync(this.artifacts, { recursive: true, force: true })
      this.artifacts = null
    }
  }

  private ensureOpen(): void {
    if (this.artifacts === null) throw new Error('session handle is closed')
  }

  private query<T>(args: string[]): T {
    this.ensureOpen()
    return JSON.parse(runCli(['query', this.sessionDir, ...args], this.command)) as T
  }

  /** Every fixation ever attributed to one token, across all snapshots. */
  fixationsOnToken(tokenId: number): TokenFixations {
    return this.query(['fixations-on-token', '--id', String(tokenId)])
  }

  /** A fixation's position re-expressed in another snapshot, if its token lives there. */
  adjustToSnapshot(fixationIndex: number, targetSnapshot: number): AdjustedPosition {
    return this.query([
      'adjust-to-snapshot',
      '--fixation', String(fixationIndex),
      '--target', String(targetSnapshot),
    ])
  }

  /** Token ids killed and created by one edit batch, with orphaned fixations. */
  tokensChangedBy(batchIndex: number): TokenChangeSet {
    return this.query(['tokens-changed-by', '--batch', String(batchIndex)])
  }
}

export function open(sessionDir: string, command?: string[]): BoundSession {
  return BoundSession.open(sessionDir, command)
}
