/**
 * <memory-browser> — read-only search and time travel.
 *
 * With a query it issues a scored recall (optionally pinned to an as-of
 * instant, optionally including superseded versions, which render struck
 * through). With the as-of toggle on and no query it lists everything the
 * store believed at that instant. Validation failures from the server are
 * shown verbatim.
 */
import { html, nothing, render } from 'lit-html';

import { Api, ApiError, ConnectionError, MemoryRecordView, ScoredHitView } from './api';
import { define, formatMs, formatScore } from './util';

interface Row {
  score: number | null;
  record: MemoryRecordView;
}

export class MemoryBrowser extends HTMLElement {
  api: Api | null = null;
  namespace = '';
  query = '';
  asOfEnabled = false;
  asOfMs = '';
  includeSuperseded = false;

  private rows: Row[] | null = null;
  private error: string | null = null;
  private searched = false;

  connectedCallback(): void {
    this.namespace = this.getAttribute('namespace') || this.namespace;
    this._render();
  }

  async search(): Promise<void> {
    if (!this.api) return;
    this.error = null;
    try {
      if (this.query.trim() === '' && this.asOfEnabled) {
        const records = await this.api.asOf(this.namespace, Number(this.asOfMs));
        this.rows = records.map((record) => ({ score: null, record }));
      } else {
        const hits: ScoredHitView[] = await this.api.recall({
          namespace: this.namespace,
          query: this.query,
          include_superseded: this.includeSuperseded,
          ...(this.asOfEnabled ? { as_of: Number(this.asOfMs) } : {}),
        });
        this.rows = hits.map((h) => ({ score: h.score, record: h.record }));
      }
      this.searched = true;
    } catch (err) {
      if (err instanceof ApiError) {
        this.error = `${err.code}: ${err.message}`;
      } else if (err instanceof ConnectionError) {
        this.error = 'server unreachable';
      } else {
        throw err;
      }
    }
    this._render();
  }

  private row({ score, record }: Row) {
    const struck = record.state === 'superseded';
    return html`
      <tr class=${struck ? 'superseded' : ''} data-record=${record.id}>
        <td class="score">${score === null ? '—' : formatScore(score)}</td>
        <td><span class="type-badge">${record.type}</span></td>
        <td><span class="state-badge state-${record.state}">${record.state}</span></td>
        <td class="content">${struck ? html`<s>${record.content}</s>` : record.content}</td>
        <td class="when">${formatMs(record.created_at)}</td>
      </tr>
    `;
  }

  private onSubmit(e: Event): void {
    e.preventDefault();
    void this.search();
  }

  private template() {
    return html`
      <form class="browser-form" @submit=${(e: Event) => this.onSubmit(e)}>
        <input
          name="namespace" placeholder="namespace" .value=${this.namespace}
          @input=${(e: Event) => { this.namespace = (e.target as HTMLInputElement).value; }}
        />
        <input
          name="query" placeholder="query (empty + as-of lists everything)"
          .value=${this.query}
          @input=${(e: Event) => { this.query = (e.target as HTMLInputElement).value; }}
        />
        <label>
          <input
            type="checkbox" name="as-of-toggle" .checked=${this.asOfEnabled}
            @change=${(e: Event) => {
              this.asOfEnabled = (e.target as HTMLInputElement).checked;
              this._render();
            }}
          />
          as of
        </label>
        <input
          name="as-of-ms" placeholder="epoch ms" .value=${this.asOfMs}
          ?disabled=${!this.asOfEnabled}
          @input=${(e: Event) => { this.asOfMs = (e.target as HTMLInputElement).value; }}
        />
        <label>
          <input
            type="checkbox" name="include-superseded" .checked=${this.includeSuperseded}
            @change=${(e: Event) => {
              this.includeSuperseded = (e.target as HTMLInputElement).checked;
            }}
          />
          include superseded
        </label>
        <button type="submit">search</button>
      </form>
      ${this.error ? html`<div class="notice notice-error">${this.error}</div>` : nothing}
      ${this.rows === null
        ? nothing
        : this.rows.length === 0
          ? html`<div class="empty">${this.searched ? 'No matching memories.' : ''}</div>`
          : html`
            <table class="hits">
              <thead>
                <tr><th>score</th><th>type</th><th>state</th><th>content</th><th>created</th></tr>
              </thead>
              <tbody>${this.rows.map((r) => this.row(r))}</tbody>
            </table>`}
    `;
  }

  _render(): void {
    render(this.template(), this);
  }
}

define('memory-browser', MemoryBrowser);
