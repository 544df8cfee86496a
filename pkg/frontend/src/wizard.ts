/**
 * Step-by-step diagnosis wizard. Every transition comes from the
 * service: the client never walks the rule tree on its own.
 */

import { ApiError, Client, Diagnosis, Question } from './api';
import { Store } from './store';

export interface WizardState {
  phase: 'idle' | 'question' | 'diagnosis';
  sessionId: string | null;
  question: Question | null;
  diagnosis: Diagnosis | null;
  trail: { question: string; answer: string }[];
  pending: boolean;
  notice: string | null;
  failure: { text: string; retry: () => void } | null;
}

const fresh = (): WizardState => ({
  phase: 'idle',
  sessionId: null,
  question: null,
  diagnosis: null,
  trail: [],
  pending: false,
  notice: null,
  failure: null,
});

export function renderWizard(root: HTMLElement, client: Client): Store<WizardState> {
  const store = new Store<WizardState>(fresh());

  async function start(notice: string | null = null) {
    store.set({ ...fresh(), pending: true, notice });
    try {
      const opened = await client.startSession();
      store.set({
        phase: 'question',
        sessionId: opened.session_id,
        question: opened.question,
        pending: false,
      });
    } catch {
      store.set({
        pending: false,
        failure: { text: 'Cannot reach the diagnosis service.', retry: () => void start(notice) },
      });
    }
  }

  async function choose(choice: string) {
    const s = store.get();
    if (s.pending || s.phase !== 'question' || !s.sessionId || !s.question) return;
    const asked = s.question.text;
    store.set({ pending: true, notice: null, failure: null });
    try {
      const result = await client.answer(s.sessionId, choice);
      const trail = [...s.trail, { question: asked, answer: choice }];
      if ('diagnosis' in result) {
        store.set({ phase: 'diagnosis', diagnosis: result.diagnosis, question: null, trail, pending: false });
      } else {
        store.set({ question: result.question, trail, pending: false });
      }
    } catch (err) {
      if (err instanceof ApiError && err.status === 400) {
        // offer exactly what the server says is on the table
        const options = err.validOptions ?? s.question.options;
        store.set({
          question: { text: asked, options },
          notice: 'That choice is not available. Pick one of the options below.',
          pending: false,
        });
      } else if (err instanceof ApiError && (err.status === 410 || err.status === 404)) {
        void start('Your session ended on the server. Starting over.');
      } else {
        store.set({
          pending: false,
          failure: { text: 'Cannot reach the diagnosis service.', retry: () => void choose(choice) },
        });
      }
    }
  }

  const container = document.createElement('div');
  container.className = 'wizard';
  root.appendChild(container);

  function sync() {
    const s = store.get();
    container.innerHTML = '';

    if (s.failure) {
      const banner = document.createElement('div');
      banner.className = 'banner';
      const text = document.createElement('span');
      text.textContent = s.failure.text;
      const retry = document.createElement('button');
      retry.className = 'retry';
      retry.textContent = 'Retry';
      retry.addEventListener('click', s.failure.retry);
      banner.append(text, retry);
      container.appendChild(banner);
    }

    if (s.notice) {
      const notice = document.createElement('div');
      notice.className = 'notice';
      notice.textContent = s.notice;
      container.appendChild(notice);
    }

    if (s.trail.length > 0) {
      const crumbs = document.createElement('ol');
      crumbs.className = 'breadcrumbs';
      for (const step of s.trail) {
        const crumb = document.createElement('li');
        crumb.textContent = step.answer;
        crumb.title = step.question;
        crumbs.appendChild(crumb);
      }
      container.appendChild(crumbs);
    }

    if (s.phase === 'question' && s.question) {
      const heading = document.createElement('h2');
      heading.className = 'question-text';
      heading.textContent = s.question.text;
      container.appendChild(heading);

      const options = document.createElement('div');
      options.className = 'options';
      for (const option of s.question.options) {
        const button = document.createElement('button');
        button.className = 'option';
        button.textContent = option;
        button.disabled = s.pending;
        button.addEventListener('click', () => void choose(option));
        options.appendChild(button);
      }
      container.appendChild(options);
    }

    if (s.phase === 'diagnosis' && s.diagnosis) {
      const card = document.createElement('div');
      card.className = 'diagnosis-card';
      const conclusion = document.createElement('h3');
      conclusion.className = 'conclusion';
      conclusion.textContent = s.diagnosis.conclusion;
      const solution = document.createElement('p');
      solution.className = 'solution';
      solution.textContent = s.diagnosis.solution;
      const restart = document.createElement('button');
      restart.className = 'restart';
      restart.textContent = 'Start over';
      restart.addEventListener('click', () => void start());
      card.append(conclusion, solution, restart);
      container.appendChild(card);
    }

    if (s.pending && s.phase === 'idle') {
      const loading = document.createElement('p');
      loading.className = 'loading';
      loading.textContent = 'Starting...';
      container.appendChild(loading);
    }
  }

  store.subscribe(sync);
  sync();
  void start();
  return store;
}
