/**
 * Thin typed client for the diagnosis service HTTP API.
 * All knowledge lives on the server; this file only moves JSON.
 */

export interface Question {
  text: string;
  options: string[];
}

export interface Diagnosis {
  rule_id: number;
  conclusion: string;
  solution: string;
}

export interface RuleRow {
  id: number;
  if: string;
  and: string;
  then: string;
  solution: string;
}

export type RuleFields = Omit<RuleRow, 'id'>;

export type AnswerResult = { question: Question } | { diagnosis: Diagnosis };

export interface BeepResult {
  linguistic: string;
  message: string;
  memberships: Record<string, number>;
}

export interface SourceReport {
  url: string;
  fetched: boolean;
  candidates: number;
  added: number;
  skipped_duplicates: number;
  malformed: number;
  error: string | null;
}

export interface SyncReport {
  started: string;
  finished: string;
  total_added: number;
  sources: SourceReport[];
}

/** Non-2xx response, decoded from the service's error body. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly validOptions?: string[],
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class Client {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { 'content-type': 'application/json' };
      init.body = JSON.stringify(body);
    }
    // a rejected fetch (network down) propagates as-is; callers treat
    // anything that is not an ApiError as a connectivity problem
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (response.status === 204) {
      return undefined as T;
    }
    const data = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new ApiError(
        response.status,
        typeof data.error === 'string' ? data.error : 'error',
        typeof data.message === 'string' ? data.message : `HTTP ${response.status}`,
        Array.isArray(data.valid_options) ? data.valid_options : undefined,
      );
    }
    return data as T;
  }

  startSession(): Promise<{ session_id: string; question: Question }> {
    return this.request('POST', '/sessions');
  }

  answer(sessionId: string, choice: string): Promise<AnswerResult> {
    return this.request('POST', `/sessions/${encodeURIComponent(sessionId)}/answer`, { choice });
  }

  listRules(category?: string): Promise<{ version: number; rules: RuleRow[] }> {
    const query = category === undefined ? '' : `?category=${encodeURIComponent(category)}`;
    return this.request('GET', `/rules${query}`);
  }

  addRule(fields: RuleFields): Promise<RuleRow> {
    return this.request('POST', '/admin/rules', fields);
  }

  updateRule(id: number, patch: Partial<RuleFields>): Promise<RuleRow> {
    return this.request('PUT', `/admin/rules/${id}`, patch);
  }

  deleteRule(id: number): Promise<void> {
    return this.request('DELETE', `/admin/rules/${id}`);
  }

  classifyBeep(seconds: number, repeating: boolean): Promise<BeepResult> {
    return this.request('POST', '/beep', {
      duration_seconds: seconds,
      repeating_without_end: repeating,
    });
  }

  runAgentSync(): Promise<SyncReport> {
    return this.request('POST', '/admin/agent/sync');
  }

  recentReports(): Promise<{ reports: SyncReport[] }> {
    return this.request('GET', '/admin/agent/reports');
  }

  health(): Promise<{ status: string; rulebase_version: number; rule_count: number }> {
    return this.request('GET', '/health');
  }
}
