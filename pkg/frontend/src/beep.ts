/**
 * POST beep tester: duration slider plus a repeating toggle, with the
 * service's membership grades drawn as bars under the verdict.
 */

import { BeepResult, Client } from './api';
import { Store } from './store';

export interface BeepState {
  secondsText: string;
  repeating: boolean;
  result: BeepResult | null;
  pending: boolean;
  failure: string | null;
}

export const SLIDER_MAX = 10;

/** Display order for the finite duration grades. */
const GRADE_ORDER = ['very short', 'short', 'long', 'very long', 'continuous'];

export function parseSeconds(text: string): number | null {
  if (text.trim() === '') return null;
  const value = Number(text);
  if (!Number.isFinite(value) || value < 0 || value > SLIDER_MAX) return null;
  return value;
}

export function renderBeep(root: HTMLElement, client: Client): Store<BeepState> {
  const store = new Store<BeepState>({
    secondsText: '1.0',
    repeating: false,
    result: null,
    pending: false,
    failure: null,
  });

  async function classify() {
    const s = store.get();
    const seconds = parseSeconds(s.secondsText);
    if (seconds === null || s.pending) return;
    store.set({ pending: true, failure: null });
    try {
      const result = await client.classifyBeep(seconds, s.repeating);
      store.set({ result, pending: false });
    } catch {
      store.set({ pending: false, failure: 'Cannot reach the diagnosis service.' });
    }
  }

  const container = document.createElement('div');
  container.className = 'beep';
  root.appendChild(container);

  function sync() {
    const s = store.get();
    const seconds = parseSeconds(s.secondsText);
    container.innerHTML = '';

    const controls = document.createElement('div');
    controls.className = 'controls';

    const slider = document.createElement('input');
    slider.type = 'range';
    slider.className = 'duration-slider';
    slider.min = '0';
    slider.max = String(SLIDER_MAX);
    slider.step = '0.01';
    slider.value = seconds === null ? '0' : String(seconds);
    slider.addEventListener('input', () => store.set({ secondsText: slider.value }));
    controls.appendChild(slider);

    const number = document.createElement('input');
    number.type = 'number';
    number.className = 'duration-number';
    number.min = '0';
    number.max = String(SLIDER_MAX);
    number.step = '0.01';
    number.value = s.secondsText;
    number.addEventListener('input', () => store.set({ secondsText: number.value }));
    controls.appendChild(number);

    const unit = document.createElement('span');
    unit.className = 'unit';
    unit.textContent = 'seconds';
    controls.appendChild(unit);

    const repeatLabel = document.createElement('label');
    repeatLabel.className = 'repeat';
    const repeat = document.createElement('input');
    repeat.type = 'checkbox';
    repeat.className = 'repeating';
    repeat.checked = s.repeating;
    repeat.addEventListener('change', () => store.set({ repeating: repeat.checked }));
    repeatLabel.append(repeat, document.createTextNode(' repeats without end'));
    controls.appendChild(repeatLabel);

    const submit = document.createElement('button');
    submit.className = 'classify';
    submit.textContent = 'Classify';
    submit.disabled = seconds === null || s.pending;
    submit.addEventListener('click', () => void classify());
    controls.appendChild(submit);

    if (seconds === null) {
      const invalid = document.createElement('span');
      invalid.className = 'invalid-input';
      invalid.textContent = `Enter a duration between 0 and ${SLIDER_MAX} seconds.`;
      controls.appendChild(invalid);
    }

    container.appendChild(controls);

    if (s.failure) {
      const banner = document.createElement('div');
      banner.className = 'banner';
      banner.textContent = s.failure;
      container.appendChild(banner);
    }

    if (s.result) {
      const card = document.createElement('div');
      card.className = 'result-card';
      const verdict = document.createElement('strong');
      verdict.className = 'linguistic';
      verdict.textContent = s.result.linguistic;
      const message = document.createElement('p');
      message.className = 'message';
      message.textContent = s.result.message;
      card.append(verdict, message);
      container.appendChild(card);

      const bars = document.createElement('div');
      bars.className = 'bars';
      for (const grade of GRADE_ORDER) {
        const degree = s.result.memberships[grade] ?? 0;
        const wrap = document.createElement('div');
        wrap.className = 'bar-wrap';
        const bar = document.createElement('div');
        bar.className = grade === s.result.linguistic ? 'bar winning' : 'bar';
        // one-decimal display keeps analytically equal grades equal on
        // screen even when the raw floats differ in the last bits
        bar.style.height = `${(degree * 100).toFixed(1)}%`;
        bar.dataset.value = grade;
        bar.dataset.degree = degree.toFixed(4);
        const label = document.createElement('span');
        label.className = 'bar-label';
        label.textContent = grade;
        wrap.append(bar, label);
        bars.appendChild(wrap);
      }
      container.appendChild(bars);
    }
  }

  store.subscribe(sync);
  sync();
  return store;
}
