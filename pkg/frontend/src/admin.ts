/**
 * Rule administration grid: filter, add, edit in place, delete with an
 * inline confirm step. Edits apply optimistically and roll back when
 * the service refuses them; duplicate-pair and blank-field refusals
 * show up as messages on the offending inputs.
 */

import { ApiError, Client, RuleFields, RuleRow, SyncReport } from './api';
import { Store } from './store';

export interface AdminState {
  rules: RuleRow[];
  version: number;
  filter: string;
  loading: boolean;
  notice: string | null;
  editing: number | null;
  confirmDelete: number | null;
  fieldErrors: Record<string, string>;
  errorScope: 'add' | number | null;
  advancedOpen: boolean;
  reports: SyncReport[];
}

const FIELD_NAMES: (keyof RuleFields)[] = ['if', 'and', 'then', 'solution'];

const FIELD_LABELS: Record<keyof RuleFields, string> = {
  if: 'Category',
  and: 'Symptom',
  then: 'Cause',
  solution: 'Fix',
};

/** Map a service refusal onto per-field messages for one form. */
function fieldMessages(err: ApiError, submitted: Partial<RuleFields>): Record<string, string> {
  if (err.status === 409) {
    return { and: 'duplicate rule: this category and symptom pair already exists' };
  }
  if (err.status === 422) {
    const messages: Record<string, string> = {};
    for (const name of FIELD_NAMES) {
      const value = submitted[name];
      if (value !== undefined && value.trim() === '') {
        messages[name] = 'required';
      }
    }
    if (Object.keys(messages).length === 0) {
      messages.solution = err.message;
    }
    return messages;
  }
  return { solution: err.message };
}

export function renderAdmin(root: HTMLElement, client: Client): Store<AdminState> {
  const store = new Store<AdminState>({
    rules: [],
    version: 0,
    filter: '',
    loading: true,
    notice: null,
    editing: null,
    confirmDelete: null,
    fieldErrors: {},
    errorScope: null,
    advancedOpen: false,
    reports: [],
  });

  // survives re-renders so typed-but-unsubmitted text is not lost
  const addDraft: Record<string, string> = { if: '', and: '', then: '', solution: '' };
  const editDraft: Record<string, string> = { if: '', and: '', then: '', solution: '' };

  async function refresh() {
    const filter = store.get().filter.trim();
    store.set({ loading: true });
    try {
      const listed = await client.listRules(filter === '' ? undefined : filter);
      store.set({ rules: listed.rules, version: listed.version, loading: false, notice: null });
    } catch {
      store.set({ loading: false, notice: 'Cannot reach the diagnosis service.' });
    }
  }

  async function add() {
    const fields: RuleFields = {
      if: addDraft.if,
      and: addDraft.and,
      then: addDraft.then,
      solution: addDraft.solution,
    };
    try {
      await client.addRule(fields);
      for (const name of FIELD_NAMES) addDraft[name] = '';
      store.set({ fieldErrors: {}, errorScope: null });
      await refresh();
    } catch (err) {
      if (err instanceof ApiError) {
        store.set({ fieldErrors: fieldMessages(err, fields), errorScope: 'add' });
      } else {
        store.set({ notice: 'Cannot reach the diagnosis service.' });
      }
    }
  }

  function beginEdit(rule: RuleRow) {
    for (const name of FIELD_NAMES) editDraft[name] = rule[name];
    store.set({ editing: rule.id, fieldErrors: {}, errorScope: null, confirmDelete: null });
  }

  async function saveEdit(id: number) {
    const patch: Partial<RuleFields> = {
      if: editDraft.if,
      and: editDraft.and,
      then: editDraft.then,
      solution: editDraft.solution,
    };
    const before = store.get().rules;
    // show the edit immediately, undo if the service says no
    const optimistic = before.map((rule) =>
      rule.id === id ? { ...rule, ...patch } : rule,
    );
    store.set({ rules: optimistic, editing: null, fieldErrors: {}, errorScope: null });
    try {
      await client.updateRule(id, patch);
      await refresh();
    } catch (err) {
      if (err instanceof ApiError) {
        store.set({
          rules: before,
          editing: id,
          fieldErrors: fieldMessages(err, patch),
          errorScope: id,
          notice: 'Edit rolled back.',
        });
      } else {
        store.set({ rules: before, editing: id, notice: 'Cannot reach the diagnosis service. Edit rolled back.' });
      }
    }
  }

  async function remove(id: number) {
    const before = store.get().rules;
    store.set({ rules: before.filter((rule) => rule.id !== id), confirmDelete: null });
    try {
      await client.deleteRule(id);
      await refresh();
    } catch (err) {
      const reason = err instanceof ApiError ? err.message : 'Cannot reach the diagnosis service.';
      store.set({ rules: before, notice: `Delete rolled back: ${reason}` });
    }
  }

  async function runSync() {
    try {
      const report = await client.runAgentSync();
      store.set({ notice: `Agent sync finished: ${report.total_added} rule(s) added.` });
      await Promise.all([refresh(), loadReports()]);
    } catch (err) {
      if (err instanceof ApiError && err.code === 'no_sources') {
        store.set({ notice: 'No agent sources are configured on the server.' });
      } else {
        store.set({ notice: 'Agent sync failed.' });
      }
    }
  }

  async function loadReports() {
    try {
      const recent = await client.recentReports();
      store.set({ reports: recent.reports });
    } catch {
      // advanced panel is best-effort; the grid stays usable
    }
  }

  function fieldInput(
    draft: Record<string, string>,
    name: keyof RuleFields,
    errors: Record<string, string>,
  ): HTMLElement {
    const wrap = document.createElement('div');
    wrap.className = 'field';
    const input = document.createElement('input');
    input.name = name;
    input.placeholder = FIELD_LABELS[name];
    input.value = draft[name];
    input.addEventListener('input', () => {
      draft[name] = input.value;
    });
    wrap.appendChild(input);
    const message = errors[name];
    if (message !== undefined) {
      const error = document.createElement('span');
      error.className = 'field-error';
      error.dataset.field = name;
      error.textContent = message;
      wrap.appendChild(error);
    }
    return wrap;
  }

  const container = document.createElement('div');
  container.className = 'admin';
  root.appendChild(container);

  function sync() {
    const s = store.get();
    // the whole panel is rebuilt per change; keep the filter box usable
    const refocusFilter = document.activeElement instanceof HTMLInputElement
      && document.activeElement.classList.contains('filter');
    container.innerHTML = '';

    const toolbar = document.createElement('div');
    toolbar.className = 'toolbar';
    const filter = document.createElement('input');
    filter.className = 'filter';
    filter.placeholder = 'Filter by category';
    filter.value = s.filter;
    filter.addEventListener('input', () => {
      store.set({ filter: filter.value });
      void refresh();
    });
    toolbar.appendChild(filter);
    const count = document.createElement('span');
    count.className = 'row-count';
    count.textContent = s.loading ? 'loading' : `${s.rules.length} rule(s)`;
    toolbar.appendChild(count);
    container.appendChild(toolbar);

    if (s.notice) {
      const notice = document.createElement('div');
      notice.className = 'notice';
      notice.textContent = s.notice;
      container.appendChild(notice);
    }

    const table = document.createElement('table');
    table.className = 'rule-grid';
    const head = document.createElement('thead');
    const headRow = document.createElement('tr');
    for (const label of ['#', 'Category', 'Symptom', 'Cause', 'Fix', '']) {
      const cell = document.createElement('th');
      cell.textContent = label;
      headRow.appendChild(cell);
    }
    head.appendChild(headRow);
    table.appendChild(head);

    const body = document.createElement('tbody');
    for (const rule of s.rules) {
      const row = document.createElement('tr');
      row.dataset.id = String(rule.id);

      if (s.editing === rule.id) {
        row.className = 'editing';
        const idCell = document.createElement('td');
        idCell.textContent = String(rule.id);
        row.appendChild(idCell);
        const errors = s.errorScope === rule.id ? s.fieldErrors : {};
        for (const name of FIELD_NAMES) {
          const cell = document.createElement('td');
          cell.appendChild(fieldInput(editDraft, name, errors));
          row.appendChild(cell);
        }
        const actions = document.createElement('td');
        const save = document.createElement('button');
        save.className = 'save';
        save.textContent = 'Save';
        save.addEventListener('click', () => void saveEdit(rule.id));
        const cancel = document.createElement('button');
        cancel.className = 'cancel';
        cancel.textContent = 'Cancel';
        cancel.addEventListener('click', () =>
          store.set({ editing: null, fieldErrors: {}, errorScope: null }),
        );
        actions.append(save, cancel);
        row.appendChild(actions);
      } else {
        const cells = [String(rule.id), rule.if, rule.and, rule.then, rule.solution];
        for (const text of cells) {
          const cell = document.createElement('td');
          cell.textContent = text;
          row.appendChild(cell);
        }
        const actions = document.createElement('td');
        if (s.confirmDelete === rule.id) {
          const confirm = document.createElement('button');
          confirm.className = 'confirm-delete';
          confirm.textContent = 'Confirm';
          confirm.addEventListener('click', () => void remove(rule.id));
          const keep = document.createElement('button');
          keep.className = 'keep';
          keep.textContent = 'Keep';
          keep.addEventListener('click', () => store.set({ confirmDelete: null }));
          actions.append(confirm, keep);
        } else {
          const edit = document.createElement('button');
          edit.className = 'edit';
          edit.textContent = 'Edit';
          edit.addEventListener('click', () => beginEdit(rule));
          const del = document.createElement('button');
          del.className = 'delete';
          del.textContent = 'Delete';
          del.addEventListener('click', () => store.set({ confirmDelete: rule.id }));
          actions.append(edit, del);
        }
        row.appendChild(actions);
      }
      body.appendChild(row);
    }
    table.appendChild(body);
    container.appendChild(table);

    const addForm = document.createElement('div');
    addForm.className = 'add-form';
    const addErrors = s.errorScope === 'add' ? s.fieldErrors : {};
    for (const name of FIELD_NAMES) {
      addForm.appendChild(fieldInput(addDraft, name, addErrors));
    }
    const addButton = document.createElement('button');
    addButton.className = 'add';
    addButton.textContent = 'Add rule';
    addButton.addEventListener('click', () => void add());
    addForm.appendChild(addButton);
    container.appendChild(addForm);

    const advanced = document.createElement('div');
    advanced.className = 'advanced';
    const toggle = document.createElement('button');
    toggle.className = 'advanced-toggle';
    toggle.textContent = s.advancedOpen ? 'Hide advanced' : 'Advanced';
    toggle.addEventListener('click', () => {
      const opening = !store.get().advancedOpen;
      store.set({ advancedOpen: opening });
      if (opening) void loadReports();
    });
    advanced.appendChild(toggle);
    if (s.advancedOpen) {
      const panel = document.createElement('div');
      panel.className = 'advanced-panel';
      const syncButton = document.createElement('button');
      syncButton.className = 'agent-sync';
      syncButton.textContent = 'Run agent sync now';
      syncButton.addEventListener('click', () => void runSync());
      panel.appendChild(syncButton);
      const reports = document.createElement('ul');
      reports.className = 'sync-reports';
      for (const report of s.reports) {
        const item = document.createElement('li');
        item.textContent = `${report.finished}: added ${report.total_added}`;
        reports.appendChild(item);
      }
      panel.appendChild(reports);
      advanced.appendChild(panel);
    }
    container.appendChild(advanced);

    if (refocusFilter) filter.focus();  // focus works only once attached
  }

  store.subscribe(sync);
  sync();
  void refresh();
  return store;
}
