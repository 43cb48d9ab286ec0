import { defineConfig } from 'vitest/config'

export default defineConfig({
  test: {
    // every query shells out to the Python CLI, which reprocesses the session
    testTimeout: 240_000,
    hookTimeout: 240_000,
  },
})
