/**
 * Typed client for the memory server's REST surface.
 *
 * Every method resolves to the parsed response body. A non-2xx response
 * throws ApiError carrying the server's {code, message, detail} envelope;
 * a failed fetch (server down, DNS, abort) throws ConnectionError so
 * callers can tell "the server said no" from "there is no server".
 */

export interface MemoryRecordView {
  id: string;
  namespace: string;
  session_id: string;
  type: string;
  content: string;
  tags: string[];
  code: string;
  created_at: number;
  superseded_at: number | null;
  superseded_by: string | null;
  retired_at: number | null;
  state: string;
  conflict_flag: boolean;
  provenance: string;
  change_times: number[];
}

export interface ScoredHitView {
  record: MemoryRecordView;
  score: number;
  age_ms: number;
}

export interface ConflictCandidateView {
  record_id: string;
  score: number;
}

export interface ResolutionView {
  action: string;
  target: string | null;
  actor: string | null;
  at: number;
}

export interface ConflictView {
  conflict_id: string;
  namespace: string;
  new_record: string;
  candidates: ConflictCandidateView[];
  opened_at: number;
  state: 'open' | 'resolved';
  resolution: ResolutionView | null;
}

export interface SessionView {
  session_id: string;
  namespace: string;
  start: number;
  end: number;
}

export interface DailySummaryView {
  namespace: string;
  date: string;
  sessions: SessionView[];
  counts_by_type: Record<string, number>;
  new_conflicts: ConflictView[];
  unresolved_conflicts: ConflictView[];
  rendered: string;
}

export interface RememberResponse {
  id: string;
  state: string;
  records: MemoryRecordView[];
  conflicts: ConflictView[];
}

export interface RecallRequest {
  namespace: string;
  query: string;
  threshold?: number;
  max_k?: number;
  types?: string[];
  as_of?: number;
  include_superseded?: boolean;
}

export type ResolveAction = 'supersede' | 'retain' | 'annotate';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail: Record<string, unknown> = {},
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export class ConnectionError extends Error {
  constructor(cause: unknown) {
    super(`server unreachable: ${String(cause)}`);
    this.name = 'ConnectionError';
  }
}

type FetchFn = (input: string, init?: RequestInit) => Promise<Response>;

export class Api {
  private readonly fetchFn: FetchFn;

  constructor(
    readonly baseUrl: string = '',
    private token: string = '',
    fetchFn?: FetchFn,
  ) {
    // bind lazily so tests can swap globalThis.fetch after construction
    this.fetchFn = fetchFn ?? ((input, init) => fetch(input, init));
  }

  setToken(token: string): void {
    this.token = token;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers['content-type'] = 'application/json';
    if (this.token) headers['authorization'] = `Bearer ${this.token}`;
    let resp: Response;
    try {
      resp = await this.fetchFn(this.baseUrl + path, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ConnectionError(err);
    }
    if (!resp.ok) {
      let envelope: { code?: string; message?: string; detail?: Record<string, unknown> } = {};
      try {
        envelope = await resp.json();
      } catch {
        // non-JSON failure body; fall through to the generic error
      }
      throw new ApiError(
        resp.status,
        envelope.code ?? 'error',
        envelope.message ?? `HTTP ${resp.status}`,
        envelope.detail ?? {},
      );
    }
    return (await resp.json()) as T;
  }

  health(): Promise<{ status: string; namespaces: number; records: number; open_conflicts: number }> {
    return this.request('GET', '/healthz');
  }

  listConflicts(namespace?: string, state: 'open' | 'resolved' | 'all' = 'open'): Promise<ConflictView[]> {
    const params = new URLSearchParams({ state });
    if (namespace) params.set('namespace', namespace);
    return this.request<{ conflicts: ConflictView[] }>('GET', `/v1/conflicts?${params}`)
      .then((r) => r.conflicts);
  }

  resolveConflict(
    conflictId: string,
    action: ResolveAction,
    opts: { namespace?: string; actor?: string } = {},
  ): Promise<ConflictView> {
    const body: Record<string, unknown> = { action };
    if (opts.namespace) body.namespace = opts.namespace;
    if (opts.actor) body.actor = opts.actor;
    return this.request<{ conflict: ConflictView }>(
      'POST', `/v1/conflicts/${conflictId}/resolve`, body,
    ).then((r) => r.conflict);
  }

  recall(req: RecallRequest): Promise<ScoredHitView[]> {
    return this.request<{ hits: ScoredHitView[] }>('POST', '/v1/recall', req)
      .then((r) => r.hits);
  }

  remember(req: { namespace: string; content: string; type?: string }): Promise<RememberResponse> {
    return this.request('POST', '/v1/remember', req);
  }

  getMemory(recordId: string): Promise<MemoryRecordView> {
    return this.request('GET', `/v1/memories/${recordId}`);
  }

  asOf(namespace: string, t: number): Promise<MemoryRecordView[]> {
    const params = new URLSearchParams({ namespace, t: String(t) });
    return this.request<{ records: MemoryRecordView[] }>('GET', `/v1/memories/asof?${params}`)
      .then((r) => r.records);
  }

  changedSince(namespace: string, since: number, until?: number): Promise<MemoryRecordView[]> {
    const params = new URLSearchParams({ namespace, changed_since: String(since) });
    if (until !== undefined) params.set('until', String(until));
    return this.request<{ records: MemoryRecordView[] }>('GET', `/v1/memories?${params}`)
      .then((r) => r.records);
  }

  sessions(namespace?: string): Promise<SessionView[]> {
    const params = new URLSearchParams();
    if (namespace) params.set('namespace', namespace);
    const qs = params.size ? `?${params}` : '';
    return this.request<{ sessions: SessionView[] }>('GET', `/v1/sessions${qs}`)
      .then((r) => r.sessions);
  }

  dailySummary(namespace: string, date: string): Promise<DailySummaryView> {
    const params = new URLSearchParams({ namespace, date });
    return this.request('GET', `/v1/daily-summary?${params}`);
  }
}
