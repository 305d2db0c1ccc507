/**
 * <conflict-queue> — the live review queue.
 *
 * Polls the conflict list every five seconds, newest first, with a badge
 * for the open count. Each card shows the incoming record verbatim plus
 * its scored candidates, and offers the three resolution actions.
 * Resolution is optimistic: the card disappears immediately, comes back
 * if the server refuses, and an already-resolved verdict from another
 * session renders as a non-retryable notice. Fetch failures raise a
 * connection banner while the last good data stays visible.
 */
import { html, nothing, render } from 'lit-html';

import {
  Api,
  ApiError,
  ConflictView,
  ConnectionError,
  MemoryRecordView,
  ResolveAction,
} from './api';
import { define, formatMs, formatScore } from './util';

export const POLL_MS = 5_000;

const ACTIONS: ResolveAction[] = ['supersede', 'retain', 'annotate'];

interface Notice {
  kind: 'ok' | 'warn' | 'error';
  text: string;
}

export class ConflictQueue extends HTMLElement {
  api: Api | null = null;
  namespace: string | null = null;
  pollMs = POLL_MS;

  private conflicts: ConflictView[] = [];
  private records = new Map<string, MemoryRecordView>();
  private offline = false;
  private loaded = false;
  private notice: Notice | null = null;
  private inFlight = new Set<string>();
  private timer: ReturnType<typeof setInterval> | null = null;

  connectedCallback(): void {
    this.namespace = this.getAttribute('namespace') || this.namespace;
    void this.refresh();
    this.timer = setInterval(() => void this.refresh(), this.pollMs);
  }

  disconnectedCallback(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }

  get openCount(): number {
    return this.conflicts.length;
  }

  /** One poll: the open queue plus any new-record bodies not yet cached. */
  async refresh(): Promise<void> {
    if (!this.api) return;
    try {
      const conflicts = await this.api.listConflicts(this.namespace ?? undefined, 'open');
      const missing = conflicts
        .map((c) => c.new_record)
        .filter((id) => !this.records.has(id));
      const fetched = await Promise.all(missing.map((id) => this.api!.getMemory(id)));
      for (const rec of fetched) this.records.set(rec.id, rec);
      this.conflicts = conflicts;
      this.offline = false;
      this.loaded = true;
    } catch (err) {
      if (err instanceof ConnectionError) {
        this.offline = true; // stale queue stays on screen
      } else if (err instanceof ApiError) {
        this.notice = { kind: 'error', text: `${err.code}: ${err.message}` };
      } else {
        throw err;
      }
    }
    this._render();
  }

  async resolve(conflict: ConflictView, action: ResolveAction): Promise<void> {
    if (!this.api || this.inFlight.has(conflict.conflict_id)) return;
    this.inFlight.add(conflict.conflict_id);
    // optimistic: drop the card now, restore only if the server refuses
    this.conflicts = this.conflicts.filter(
      (c) => c.conflict_id !== conflict.conflict_id,
    );
    this.notice = null;
    this._render();
    try {
      await this.api.resolveConflict(conflict.conflict_id, action, {
        namespace: conflict.namespace,
        actor: 'dashboard',
      });
      this.notice = { kind: 'ok', text: `resolved ${conflict.conflict_id}: ${action}` };
    } catch (err) {
      if (err instanceof ApiError && err.code === 'already_resolved') {
        // someone else got there first; the card stays gone and there is
        // nothing to retry
        this.notice = {
          kind: 'warn',
          text: `${conflict.conflict_id} was already resolved elsewhere`,
        };
      } else if (err instanceof ApiError) {
        this.restore(conflict);
        this.notice = { kind: 'error', text: `${err.code}: ${err.message} — retry available` };
      } else if (err instanceof ConnectionError) {
        this.restore(conflict);
        this.offline = true;
        this.notice = { kind: 'error', text: 'server unreachable — retry available' };
      } else {
        this.inFlight.delete(conflict.conflict_id);
        throw err;
      }
    }
    this.inFlight.delete(conflict.conflict_id);
    this._render();
  }

  private restore(conflict: ConflictView): void {
    this.conflicts = [...this.conflicts, conflict].sort(
      (a, b) => b.opened_at - a.opened_at || (a.conflict_id < b.conflict_id ? -1 : 1),
    );
  }

  private card(conflict: ConflictView) {
    const rec = this.records.get(conflict.new_record);
    return html`
      <div class="card" data-conflict=${conflict.conflict_id}>
        <div class="card-head">
          <code>${conflict.conflict_id}</code>
          <span class="when">opened ${formatMs(conflict.opened_at)}</span>
        </div>
        ${rec
          ? html`
            <div class="incoming">
              <span class="type-badge">${rec.type}</span>
              <span class="content">${rec.content}</span>
              <span class="when">written ${formatMs(rec.created_at)}</span>
            </div>`
          : html`<div class="incoming"><code>${conflict.new_record}</code></div>`}
        <ul class="candidates">
          ${conflict.candidates.map(
            (cand) => html`
              <li>
                <span class="score">${formatScore(cand.score)}</span>
                <code>${cand.record_id}</code>
              </li>`,
          )}
        </ul>
        <div class="actions">
          ${ACTIONS.map(
            (action) => html`
              <button
                data-action=${action}
                ?disabled=${this.inFlight.has(conflict.conflict_id)}
                @click=${() => void this.resolve(conflict, action)}
              >${action}</button>`,
          )}
        </div>
      </div>
    `;
  }

  private template() {
    return html`
      ${this.offline
        ? html`<div class="banner">connection lost — showing last known queue</div>`
        : nothing}
      <div class="queue-head">
        <span class="badge">${this.openCount} open</span>
      </div>
      ${this.notice
        ? html`<div class="notice notice-${this.notice.kind}">${this.notice.text}</div>`
        : nothing}
      ${this.loaded && this.conflicts.length === 0
        ? html`<div class="empty">No open conflicts. Nothing needs review.</div>`
        : this.conflicts.map((c) => this.card(c))}
    `;
  }

  _render(): void {
    render(this.template(), this);
  }
}

define('conflict-queue', ConflictQueue);
