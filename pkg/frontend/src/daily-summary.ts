/**
 * <daily-summary-view> — one namespace, one day, one digest.
 *
 * Fetches the rendered daily summary and shows the per-type counts, the
 * session windows, and the Markdown body the server wrote to disk, all
 * verbatim.
 */
import { html, nothing, render } from 'lit-html';

import { Api, ApiError, ConnectionError, DailySummaryView } from './api';
import { define, formatMs, todayUtc } from './util';

export class DailySummaryPanel extends HTMLElement {
  api: Api | null = null;
  namespace = '';
  date = todayUtc();

  private summary: DailySummaryView | null = null;
  private error: string | null = null;

  connectedCallback(): void {
    this.namespace = this.getAttribute('namespace') || this.namespace;
    this._render();
  }

  async load(): Promise<void> {
    if (!this.api) return;
    this.error = null;
    try {
      this.summary = await this.api.dailySummary(this.namespace, this.date);
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

  private onSubmit(e: Event): void {
    e.preventDefault();
    void this.load();
  }

  private template() {
    const s = this.summary;
    return html`
      <form class="daily-form" @submit=${(e: Event) => this.onSubmit(e)}>
        <input
          name="namespace" placeholder="namespace" .value=${this.namespace}
          @input=${(e: Event) => { this.namespace = (e.target as HTMLInputElement).value; }}
        />
        <input
          name="date" placeholder="YYYY-MM-DD" .value=${this.date}
          @input=${(e: Event) => { this.date = (e.target as HTMLInputElement).value; }}
        />
        <button type="submit">load</button>
      </form>
      ${this.error ? html`<div class="notice notice-error">${this.error}</div>` : nothing}
      ${s
        ? html`
          <div class="daily-counts">
            ${Object.entries(s.counts_by_type).map(
              ([type, n]) => html`<span class="count"><span class="type-badge">${type}</span> ${n}</span>`,
            )}
          </div>
          <ul class="daily-sessions">
            ${s.sessions.map(
              (sess) => html`<li><code>${sess.session_id}</code> ${formatMs(sess.start)} → ${formatMs(sess.end)}</li>`,
            )}
          </ul>
          <pre class="daily-rendered">${s.rendered}</pre>`
        : nothing}
    `;
  }

  _render(): void {
    render(this.template(), this);
  }
}

define('daily-summary-view', DailySummaryPanel);
