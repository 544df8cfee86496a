/** Entry point: tab shell wiring the three panels to one API client. */

import { Client } from './api';
import { renderAdmin } from './admin';
import { renderBeep } from './beep';
import { renderWizard } from './wizard';

interface Tab {
  id: string;
  label: string;
  mount: (root: HTMLElement, client: Client) => unknown;
}

const TABS: Tab[] = [
  { id: 'wizard', label: 'Diagnose', mount: renderWizard },
  { id: 'admin', label: 'Rules', mount: renderAdmin },
  { id: 'beep', label: 'Beep codes', mount: renderBeep },
];

export function mountApp(root: HTMLElement, client: Client): void {
  const nav = document.createElement('nav');
  nav.className = 'tabs';
  const panels = new Map<string, HTMLElement>();
  const mounted = new Set<string>();

  function activate(id: string) {
    for (const [panelId, panel] of panels) {
      panel.hidden = panelId !== id;
    }
    for (const button of nav.querySelectorAll('button')) {
      button.classList.toggle('active', button.dataset.tab === id);
    }
    // panels mount lazily; the wizard opens its session on first view
    if (!mounted.has(id)) {
      mounted.add(id);
      const tab = TABS.find((t) => t.id === id);
      const panel = panels.get(id);
      if (tab && panel) tab.mount(panel, client);
    }
  }

  for (const tab of TABS) {
    const button = document.createElement('button');
    button.dataset.tab = tab.id;
    button.textContent = tab.label;
    button.addEventListener('click', () => activate(tab.id));
    nav.appendChild(button);

    const panel = document.createElement('section');
    panel.className = `panel panel-${tab.id}`;
    panel.hidden = true;
    panels.set(tab.id, panel);
  }

  root.appendChild(nav);
  for (const panel of panels.values()) root.appendChild(panel);
  activate('wizard');
}

/** Service location: ?api= query override, else same origin. */
export function resolveBaseUrl(search: string, origin: string): string {
  const override = new URLSearchParams(search).get('api');
  if (override !== null && override !== '') {
    return override.replace(/\/+$/, '');
  }
  return origin;
}

const appRoot = document.getElementById('app');
if (appRoot) {
  const base = resolveBaseUrl(window.location.search, window.location.origin);
  mountApp(appRoot, new Client(base));
}
