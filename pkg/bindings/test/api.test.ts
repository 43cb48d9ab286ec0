import { cpSync, mkdtempSync, readFileSync, rmSync, writeFileSync } from 'node:fs'
import { tmpdir } from 'node:os'
import { join, resolve } from 'node:path'
import { afterAll, describe, expect, it } from 'vitest'

import { BoundSession } from '../src/index'

const repoRoot = resolve(__dirname, '..', '..')
const lineInsert = join(repoRoot, 'demos', 'data', 'line_insert_session')

describe('handle lifecycle and error mapping', () => {
  const scratch: string[] = []
  afterAll(() => scratch.forEach((d) => rmSync(d, { recursive: true, force: true })))

  it('unknown token id raises, mirroring the CLI error', () => {
    const session = BoundSession.open(lineInsert)
    try {
      expect(() => session.fixationsOnToken(999_999)).toThrowError(/never issued/)
    } finally {
      session.close()
    }
  })

  it('unknown batch raises', () => {
    const session = BoundSession.open(lineInsert)
    try {
      expect(() => session.tokensChangedBy(7)).toThrowError(/out of range/)
    } finally {
      session.close()
    }
  })

  it('a closed handle refuses further queries', () => {
    const session = BoundSession.open(lineInsert)
    session.close()
    expect(session.closed).toBe(true)
    expect(() => session.fixationsOnToken(0)).toThrowError(/closed/)
    session.close() // idempotent
  })

  it('open fails when the replay does not reproduce the final file', () => {
    const copy = mkdtempSync(join(tmpdir(), 'gazetrace-bad-'))
    scratch.push(copy)
    cpSync(lineInsert, copy, { recursive: true })
    const finalPath = join(copy, 'final.c')
    writeFileSync(finalPath, readFileSync(finalPath, 'utf-8') + 'tampered\n')
    expect(() => BoundSession.open(copy)).toThrowError(/exited 2/)
  })

  it('open fails on a missing session directory', () => {
    expect(() => BoundSession.open('/nonexistent/session')).toThrowError(/exited 1/)
  })
})
