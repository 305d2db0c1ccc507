import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    environment: 'happy-dom',
    // the e2e spec drives a real server process and needs headroom
    testTimeout: 30_000,
    hookTimeout: 60_000,
  },
});
