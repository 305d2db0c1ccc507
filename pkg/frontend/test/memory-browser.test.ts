import { afterEach, describe, expect, it, vi } from 'vitest';

import { Api, ApiError, MemoryRecordView, ScoredHitView } from '../src/api';
import '../src/memory-browser'; // registers the element
import type { MemoryBrowser } from '../src/memory-browser';

function rec(id: string, content: string, state = 'active'): MemoryRecordView {
  return {
    id, namespace: 'team', session_id: 's-000000000000', type: 'fact', content,
    tags: [], code: 'ff'.repeat(32), created_at: 1_700_000_000_000,
    superseded_at: state === 'superseded' ? 1_700_000_100_000 : null,
    superseded_by: state === 'superseded' ? 'm-new' : null,
    retired_at: null, state, conflict_flag: false, provenance: 'api',
    change_times: [1_700_000_000_000],
  };
}

function hit(record: MemoryRecordView, score: number): ScoredHitView {
  return { record, score, age_ms: 1_000 };
}

function mount() {
  const api = {
    recall: vi.fn(async (): Promise<ScoredHitView[]> => []),
    asOf: vi.fn(async (): Promise<MemoryRecordView[]> => []),
  };
  const el = document.createElement('memory-browser') as MemoryBrowser;
  el.api = api as unknown as Api;
  document.body.appendChild(el);
  return { el, api };
}

afterEach(() => {
  document.body.innerHTML = '';
});

describe('memory-browser', () => {
  it('issues a recall and renders scored rows', async () => {
    const { el, api } = mount();
    api.recall.mockResolvedValueOnce([
      hit(rec('m1', 'billing runs nightly'), 0.8125),
      hit(rec('m2', 'billing owner is dana'), 0.5),
    ]);
    el.namespace = 'team';
    el.query = 'billing';
    await el.search();

    expect(api.recall).toHaveBeenCalledWith({
      namespace: 'team', query: 'billing', include_superseded: false,
    });
    const rows = [...el.querySelectorAll('tbody tr')];
    expect(rows).toHaveLength(2);
    expect(rows[0].querySelector('.score')?.textContent).toBe('0.813');
    expect(rows[0].querySelector('.content')?.textContent).toBe('billing runs nightly');
    expect(rows[0].querySelector('.state-badge')?.textContent).toBe('active');
  });

  it('strikes through superseded versions and only those', async () => {
    const { el, api } = mount();
    api.recall.mockResolvedValueOnce([
      hit(rec('m2', 'deadline is friday'), 0.9),
      hit(rec('m1', 'deadline is tuesday', 'superseded'), 0.88),
    ]);
    el.namespace = 'team';
    el.query = 'deadline';
    el.includeSuperseded = true;
    await el.search();

    expect(api.recall).toHaveBeenCalledWith({
      namespace: 'team', query: 'deadline', include_superseded: true,
    });
    const rows = [...el.querySelectorAll<HTMLTableRowElement>('tbody tr')];
    expect(rows[0].classList.contains('superseded')).toBe(false);
    expect(rows[0].querySelector('s')).toBeNull();
    expect(rows[1].classList.contains('superseded')).toBe(true);
    expect(rows[1].querySelector('s')?.textContent).toBe('deadline is tuesday');
  });

  it('pins recall to an instant when the as-of toggle is on', async () => {
    const { el, api } = mount();
    el.namespace = 'team';
    el.query = 'deadline';
    el.asOfEnabled = true;
    el.asOfMs = '1700000050000';
    await el.search();
    expect(api.recall).toHaveBeenCalledWith({
      namespace: 'team', query: 'deadline',
      include_superseded: false, as_of: 1_700_000_050_000,
    });
  });

  it('lists everything at the instant when as-of is on and the query is empty', async () => {
    const { el, api } = mount();
    api.asOf.mockResolvedValueOnce([rec('m1', 'alpha'), rec('m2', 'beta')]);
    el.namespace = 'team';
    el.asOfEnabled = true;
    el.asOfMs = '42';
    await el.search();

    expect(api.asOf).toHaveBeenCalledWith('team', 42);
    expect(api.recall).not.toHaveBeenCalled();
    const scores = [...el.querySelectorAll('tbody .score')].map((td) => td.textContent);
    expect(scores).toEqual(['—', '—']); // snapshot listing has no scores
  });

  it('shows server validation errors verbatim and keeps the form usable', async () => {
    const { el, api } = mount();
    api.recall.mockRejectedValueOnce(
      new ApiError(422, 'empty_query', 'query must not be empty'),
    );
    el.namespace = 'team';
    await el.search();
    expect(el.querySelector('.notice-error')?.textContent)
      .toBe('empty_query: query must not be empty');

    api.recall.mockResolvedValueOnce([]);
    el.query = 'anything';
    await el.search();
    expect(el.querySelector('.notice-error')).toBeNull();
    expect(el.querySelector('.empty')?.textContent).toBe('No matching memories.');
  });

  it('wires the form inputs: typing then submitting searches with those values', async () => {
    const { el, api } = mount();
    const ns = el.querySelector<HTMLInputElement>('input[name="namespace"]')!;
    ns.value = 'ops';
    ns.dispatchEvent(new Event('input'));
    const q = el.querySelector<HTMLInputElement>('input[name="query"]')!;
    q.value = 'rotation';
    q.dispatchEvent(new Event('input'));

    el.querySelector('form')!.dispatchEvent(new Event('submit', { cancelable: true }));
    await vi.waitFor(() => expect(api.recall).toHaveBeenCalled());
    expect(api.recall).toHaveBeenCalledWith({
      namespace: 'ops', query: 'rotation', include_superseded: false,
    });
  });

  it('disables the instant input until the toggle is on', () => {
    const { el } = mount();
    const ms = el.querySelector<HTMLInputElement>('input[name="as-of-ms"]')!;
    expect(ms.disabled).toBe(true);
    const toggle = el.querySelector<HTMLInputElement>('input[name="as-of-toggle"]')!;
    toggle.checked = true;
    toggle.dispatchEvent(new Event('change'));
    expect(el.querySelector<HTMLInputElement>('input[name="as-of-ms"]')!.disabled).toBe(false);
  });
});
