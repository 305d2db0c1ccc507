export { Api, ApiError, ConnectionError } from './api';
export { ConflictQueue, POLL_MS } from './conflict-queue';
export { MemoryBrowser } from './memory-browser';
export { DailySummaryPanel } from './daily-summary';
export { MemgrainDashboard } from './app';
