/** Small shared helpers for the dashboard elements. */

/** customElements.define that tolerates repeat registration (test mounts). */
export function define(name: string, ctor: CustomElementConstructor): void {
  if (!customElements.get(name)) {
    customElements.define(name, ctor);
  }
}

/** Epoch milliseconds -> "YYYY-MM-DD HH:MM:SS" UTC, matching server logs. */
export function formatMs(ms: number): string {
  return new Date(ms).toISOString().replace('T', ' ').slice(0, 19);
}

/** A score like 0.9499999 renders as "0.950". */
export function formatScore(score: number): string {
  return score.toFixed(3);
}

/** Today's date as the server expects it (UTC YYYY-MM-DD). */
export function todayUtc(): string {
  return new Date().toISOString().slice(0, 10);
}
