import { describe, expect, it } from 'vitest';
import { ApiError, Client } from '../src/api';
import { Store } from '../src/store';
import { FakeService } from './helpers';

describe('store', () => {
  it('notifies subscribers on set and merges patches', () => {
    const store = new Store<{ a: number; b: string }>({ a: 1, b: 'x' });
    let seen = 0;
    const stop = store.subscribe(() => {
      seen += 1;
    });
    store.set({ a: 2 });
    expect(store.get()).toEqual({ a: 2, b: 'x' });
    expect(seen).toBe(1);
    stop();
    store.set({ b: 'y' });
    expect(seen).toBe(1);
    expect(store.get().b).toBe('y');
  });
});

describe('client', () => {
  it('walks a session against the fake service', async () => {
    const fake = new FakeService();
    const client = new Client('', fake.fetch);
    const opened = await client.startSession();
    expect(opened.question.text).toBe('What type of problem are you having?');
    expect(opened.question.options).toContain('Hard Disk');

    const next = await client.answer(opened.session_id, 'Hard Disk');
    if (!('question' in next)) throw new Error('expected a follow-up question');
    expect(next.question.options).toContain('SMART Warning Displayed');

    const last = await client.answer(opened.session_id, 'SMART Warning Displayed');
    if (!('diagnosis' in last)) throw new Error('expected a diagnosis');
    expect(last.diagnosis.solution).toBe('Backup & Replace Your Drive');
  });

  it('turns error bodies into ApiError with code and options', async () => {
    const fake = new FakeService();
    const client = new Client('', fake.fetch);
    const opened = await client.startSession();
    const failed = await client.answer(opened.session_id, 'Flux Capacitor').catch((e) => e);
    expect(failed).toBeInstanceOf(ApiError);
    expect(failed.status).toBe(400);
    expect(failed.code).toBe('invalid_choice');
    expect(failed.validOptions).toContain('Mouse');
  });

  it('treats 204 as a void result', async () => {
    const fake = new FakeService();
    const client = new Client('', fake.fetch);
    await expect(client.deleteRule(1)).resolves.toBeUndefined();
    expect(fake.rules.find((rule) => rule.id === 1)).toBeUndefined();
  });

  it('propagates network failures as non-ApiError rejections', async () => {
    const fake = new FakeService();
    fake.networkDown = true;
    const client = new Client('', fake.fetch);
    const failed = await client.health().catch((e) => e);
    expect(failed).toBeInstanceOf(TypeError);
  });

  it('sends the category filter as a query parameter', async () => {
    const fake = new FakeService();
    const client = new Client('', fake.fetch);
    const filtered = await client.listRules('Mouse');
    expect(filtered.rules).toHaveLength(4);
    expect(filtered.rules.every((rule) => rule.if === 'Mouse')).toBe(true);
  });
});
