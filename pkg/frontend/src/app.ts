/**
 * <memgrain-dashboard> — the page shell.
 *
 * Three tabs (review queue, memory browser, daily summary) sharing one
 * API client. The server base URL comes from the element's `base-url`
 * attribute or a `MEMGRAIN_BASE` global; empty means same-origin, which
 * is how the bundle is served from /ui/. The token field is the whole
 * auth story: it just sets the Bearer header on subsequent calls.
 */
import { html, render } from 'lit-html';

import { Api } from './api';
import { define } from './util';
import './conflict-queue';
import './daily-summary';
import './memory-browser';

type Tab = 'queue' | 'browser' | 'daily';

const TABS: { id: Tab; label: string }[] = [
  { id: 'queue', label: 'Review queue' },
  { id: 'browser', label: 'Memories' },
  { id: 'daily', label: 'Daily summary' },
];

declare global {
  interface Window {
    MEMGRAIN_BASE?: string;
  }
}

export class MemgrainDashboard extends HTMLElement {
  api: Api | null = null;
  tab: Tab = 'queue';
  namespace = '';

  connectedCallback(): void {
    const base = this.getAttribute('base-url') ?? window.MEMGRAIN_BASE ?? '';
    this.api = this.api ?? new Api(base);
    this.namespace = this.getAttribute('namespace') || this.namespace;
    this._render();
  }

  private switchTab(tab: Tab): void {
    this.tab = tab;
    this._render();
  }

  private panel() {
    switch (this.tab) {
      case 'queue':
        return html`<conflict-queue .api=${this.api} .namespace=${this.namespace || null}></conflict-queue>`;
      case 'browser':
        return html`<memory-browser .api=${this.api} .namespace=${this.namespace}></memory-browser>`;
      case 'daily':
        return html`<daily-summary-view .api=${this.api} .namespace=${this.namespace}></daily-summary-view>`;
    }
  }

  private template() {
    return html`
      <header>
        <h1>memgrain</h1>
        <input
          name="namespace-filter" placeholder="namespace (blank = all)"
          .value=${this.namespace}
          @change=${(e: Event) => {
            this.namespace = (e.target as HTMLInputElement).value;
            this._render();
          }}
        />
        <input
          name="token" type="password" placeholder="API token"
          @change=${(e: Event) => this.api?.setToken((e.target as HTMLInputElement).value)}
        />
      </header>
      <nav>
        ${TABS.map(
          ({ id, label }) => html`
            <button
              class=${this.tab === id ? 'tab active' : 'tab'}
              data-tab=${id}
              @click=${() => this.switchTab(id)}
            >${label}</button>`,
        )}
      </nav>
      <main>${this.panel()}</main>
    `;
  }

  _render(): void {
    render(this.template(), this);
  }
}

define('memgrain-dashboard', MemgrainDashboard);
