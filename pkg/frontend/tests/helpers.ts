/**
 * Test support: a wire-level fake of the diagnosis service backed by
 * the exported seed corpus, and a polling waitFor for async renders.
 *
 * The fake speaks the same JSON bodies and status codes as the real
 * service so the panels are exercised through their fetch layer; the
 * canned beep grades below were captured from the real classifier.
 */

import { FetchLike, RuleRow } from '../src/api';
import seedFile from './fixtures/seed_rules.json';

export const SEED_RULES: RuleRow[] = seedFile.rules as RuleRow[];

const key = (text: string) => text.trim().replace(/\s+/g, ' ').toLowerCase();
const tidy = (text: string) => text.trim().replace(/\s+/g, ' ');

const CATEGORY_QUESTION = 'What type of problem are you having?';
const SYMPTOM_QUESTION = 'Which symptom do you observe?';

interface FakeSession {
  stage: 'category' | 'symptom' | 'closed';
  category: string;
}

// degrees recorded from the service for the durations the tests use
const BEEP_TABLE: Record<string, { linguistic: string; message: string; memberships: Record<string, number> }> = {
  '0.1|false': {
    linguistic: 'very short',
    message: 'normal POST, system is OK',
    memberships: { 'very short': 1, short: 0, long: 0, 'very long': 0, continuous: 0 },
  },
  '0.35|false': {
    linguistic: 'short',
    message: 'POST error',
    memberships: {
      'very short': 0.5000000000000001,
      short: 0.4999999999999999,
      long: 0,
      'very long': 0,
      continuous: 0,
    },
  },
  '1|true': {
    linguistic: 'infinite',
    message: 'power supply or system board problem or keyboard',
    memberships: {
      'very short': 0,
      short: 0.6666666666666666,
      long: 0.3333333333333333,
      'very long': 0,
      continuous: 0,
    },
  },
};

function json(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

export class FakeService {
  rules: RuleRow[] = SEED_RULES.map((rule) => ({ ...rule }));
  version = 0;
  nextId = Math.max(...SEED_RULES.map((rule) => rule.id)) + 1;
  sessions = new Map<string, FakeSession>();
  sessionsOpened = 0;
  answerCalls = 0;
  networkDown = false;

  private sessionCounter = 0;
  private gate: Promise<void> | null = null;
  private openGate: (() => void) | null = null;
  private forcedAnswer: { status: number; body: unknown } | null = null;

  /** Park every request until release() is called. */
  hold(): void {
    this.gate = new Promise((resolve) => {
      this.openGate = resolve;
    });
  }

  release(): void {
    this.openGate?.();
    this.gate = null;
    this.openGate = null;
  }

  /** Make the next answer request fail with a fixed response. */
  failNextAnswer(status: number, body: unknown): void {
    this.forcedAnswer = { status, body };
  }

  categories(): string[] {
    const seen = new Map<string, string>();
    for (const rule of this.rules) {
      if (!seen.has(key(rule.if))) seen.set(key(rule.if), rule.if);
    }
    return [...seen.entries()].sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0)).map(([, label]) => label);
  }

  symptoms(category: string): string[] {
    const wanted = key(category);
    return this.rules
      .filter((rule) => key(rule.if) === wanted)
      .map((rule) => rule.and)
      .sort((a, b) => (key(a) < key(b) ? -1 : key(a) > key(b) ? 1 : 0));
  }

  findRule(category: string, symptom: string): RuleRow | undefined {
    return this.rules.find(
      (rule) => key(rule.if) === key(category) && key(rule.and) === key(symptom),
    );
  }

  fetch: FetchLike = async (url, init) => {
    if (this.networkDown) throw new TypeError('fetch failed');
    if (this.gate) await this.gate;

    const parsed = new URL(url, 'http://fake.test');
    const path = parsed.pathname;
    const method = init?.method ?? 'GET';
    const body = typeof init?.body === 'string' ? JSON.parse(init.body) : undefined;

    if (method === 'POST' && path === '/sessions') {
      const id = `s${++this.sessionCounter}`;
      this.sessions.set(id, { stage: 'category', category: '' });
      this.sessionsOpened += 1;
      return json({
        session_id: id,
        question: { text: CATEGORY_QUESTION, options: this.categories() },
      });
    }

    const answerMatch = path.match(/^\/sessions\/([^/]+)\/answer$/);
    if (method === 'POST' && answerMatch) {
      this.answerCalls += 1;
      if (this.forcedAnswer) {
        const forced = this.forcedAnswer;
        this.forcedAnswer = null;
        return json(forced.body, forced.status);
      }
      const session = this.sessions.get(answerMatch[1]);
      if (!session) {
        return json({ error: 'unknown_session', message: 'no such session' }, 404);
      }
      if (session.stage === 'closed') {
        return json({ error: 'session_closed', message: 'session already concluded' }, 410);
      }
      const choice = String(body.choice);
      if (session.stage === 'category') {
        const canonical = this.categories().find((c) => key(c) === key(choice));
        if (canonical === undefined) {
          return json(
            {
              error: 'invalid_choice',
              message: `${JSON.stringify(choice)} is not one of the offered options`,
              valid_options: this.categories(),
            },
            400,
          );
        }
        session.stage = 'symptom';
        session.category = canonical;
        return json({
          question: { text: SYMPTOM_QUESTION, options: this.symptoms(canonical) },
        });
      }
      const rule = this.findRule(session.category, choice);
      if (!rule) {
        return json(
          {
            error: 'invalid_choice',
            message: `${JSON.stringify(choice)} is not one of the offered options`,
            valid_options: this.symptoms(session.category),
          },
          400,
        );
      }
      session.stage = 'closed';
      return json({
        diagnosis: { rule_id: rule.id, conclusion: rule.then, solution: rule.solution },
      });
    }

    if (method === 'GET' && path === '/rules') {
      const category = parsed.searchParams.get('category');
      const rules =
        category === null
          ? this.rules
          : this.rules.filter((rule) => key(rule.if) === key(category));
      return json({ version: this.version, rules });
    }

    const oneRule = path.match(/^\/rules\/(\d+)$/);
    if (method === 'GET' && oneRule) {
      const rule = this.rules.find((r) => r.id === Number(oneRule[1]));
      return rule ? json(rule) : json({ error: 'not_found', message: 'no such rule' }, 404);
    }

    if (method === 'POST' && path === '/admin/rules') {
      const fields = {
        if: tidy(String(body.if ?? '')),
        and: tidy(String(body.and ?? '')),
        then: tidy(String(body.then ?? '')),
        solution: tidy(String(body.solution ?? '')),
      };
      if (Object.values(fields).some((value) => value === '')) {
        return json({ error: 'empty_field', message: 'rule fields must be non-empty' }, 422);
      }
      if (this.findRule(fields.if, fields.and)) {
        return json({ error: 'duplicate_rule', message: 'condition pair already present' }, 409);
      }
      const rule: RuleRow = { id: this.nextId++, ...fields };
      this.rules.push(rule);
      this.version += 1;
      return json(rule, 201);
    }

    const adminRule = path.match(/^\/admin\/rules\/(\d+)$/);
    if (adminRule && method === 'PUT') {
      const rule = this.rules.find((r) => r.id === Number(adminRule[1]));
      if (!rule) return json({ error: 'not_found', message: 'no such rule' }, 404);
      const merged = { ...rule };
      for (const name of ['if', 'and', 'then', 'solution'] as const) {
        if (body[name] !== undefined && body[name] !== null) {
          merged[name] = tidy(String(body[name]));
          if (merged[name] === '') {
            return json({ error: 'empty_field', message: 'rule fields must be non-empty' }, 422);
          }
        }
      }
      const clash = this.findRule(merged.if, merged.and);
      if (clash && clash.id !== rule.id) {
        return json({ error: 'duplicate_rule', message: 'condition pair already present' }, 409);
      }
      Object.assign(rule, merged);
      this.version += 1;
      return json(rule);
    }
    if (adminRule && method === 'DELETE') {
      const index = this.rules.findIndex((r) => r.id === Number(adminRule[1]));
      if (index < 0) return json({ error: 'not_found', message: 'no such rule' }, 404);
      this.rules.splice(index, 1);
      this.version += 1;
      return new Response(null, { status: 204 });
    }

    if (method === 'POST' && path === '/beep') {
      const canned = BEEP_TABLE[`${body.duration_seconds}|${body.repeating_without_end}`];
      if (!canned) {
        return json({ error: 'error', message: 'no canned grades for this duration' }, 500);
      }
      return json(canned);
    }

    if (method === 'POST' && path === '/admin/agent/sync') {
      return json({ error: 'no_sources', message: 'no sources configured' }, 409);
    }
    if (method === 'GET' && path === '/admin/agent/reports') {
      return json({ reports: [] });
    }
    if (method === 'GET' && path === '/health') {
      return json({ status: 'ok', rulebase_version: this.version, rule_count: this.rules.length });
    }

    return json({ error: 'not_found', message: `no route for ${method} ${path}` }, 404);
  };
}

export async function waitFor<T>(
  probe: () => T | null | undefined | false,
  timeoutMs = 5000,
): Promise<T> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    const value = probe();
    if (value) return value;
    if (Date.now() > deadline) throw new Error('timed out waiting for condition');
    await new Promise((resolve) => setTimeout(resolve, 10));
  }
}

/** waitFor for probes that must themselves await something. */
export async function waitUntil(
  probe: () => Promise<boolean>,
  timeoutMs = 10_000,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    if (await probe()) return;
    if (Date.now() > deadline) throw new Error('timed out waiting for condition');
    await new Promise((resolve) => setTimeout(resolve, 100));
  }
}

/** Buttons and inputs used by the panels, looked up by class. */
export function byClass<T extends HTMLElement>(root: HTMLElement, name: string): T {
  const found = root.querySelector<T>(`.${name}`);
  if (!found) throw new Error(`no element with class ${name}`);
  return found;
}

export function clickOption(root: HTMLElement, label: string): void {
  const buttons = [...root.querySelectorAll<HTMLButtonElement>('button.option')];
  const target = buttons.find((button) => button.textContent === label);
  if (!target) {
    throw new Error(`no option button labeled ${JSON.stringify(label)}`);
  }
  target.click();
}

export function setInput(input: HTMLInputElement, value: string): void {
  input.value = value;
  input.dispatchEvent(new Event('input', { bubbles: true }));
}
