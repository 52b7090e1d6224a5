// Popup UI: one fraction row per category in canonical order, plus scan
// controls. Rendering is a pure function of PopupState so it can be
// exercised without the extension runtime.
import { CATEGORIES } from './taxonomy';
import { scanStorageKey, type ScanReply, type ScanSummary } from './messages';

export interface PopupState {
  summary: ScanSummary | null;
  stale: boolean;
  offline: boolean;
  emptyPage: boolean;
}

// Matches the service's report rounding (6 digits, no trailing zeros).
export function formatFraction(value: number): string {
  return Number(value.toFixed(6)).toString();
}

function statusLine(state: PopupState): { text: string; className: string } {
  if (state.offline) {
    return {
      text: 'Service offline. Check the endpoint on the options page.',
      className: 'status offline',
    };
  }
  if (state.emptyPage) {
    return { text: 'No classifiable text on this page.', className: 'status' };
  }
  if (!state.summary) {
    return { text: 'No scan yet for this tab. Run one below.', className: 'status prompt' };
  }
  if (state.stale) {
    return { text: 'Page changed since this scan. Results may be stale.', className: 'status stale' };
  }
  const s = state.summary;
  return {
    text: `${s.flaggedCount} of ${s.total} segments flagged (backend: ${s.backend}).`,
    className: 'status',
  };
}

export function renderPopup(root: HTMLElement, state: PopupState): void {
  const doc = root.ownerDocument;
  root.textContent = '';

  const status = doc.createElement('div');
  const line = statusLine(state);
  status.textContent = line.text;
  status.className = line.className;
  root.appendChild(status);

  if (!state.summary) return;

  const table = doc.createElement('table');
  table.className = 'fractions';
  const head = doc.createElement('tr');
  for (const label of ['Category', 'Share']) {
    const th = doc.createElement('th');
    th.textContent = label;
    head.appendChild(th);
  }
  table.appendChild(head);
  for (const category of CATEGORIES) {
    const row = doc.createElement('tr');
    const name = doc.createElement('td');
    name.textContent = category;
    const value = doc.createElement('td');
    value.textContent = formatFraction(state.summary.fractions[category]);
    value.className = 'value';
    row.appendChild(name);
    row.appendChild(value);
    table.appendChild(row);
  }
  root.appendChild(table);
}

async function activeTab(): Promise<chrome.tabs.Tab | undefined> {
  const tabs = await chrome.tabs.query({ active: true, currentWindow: true });
  return tabs[0];
}

async function storedSummary(tabId: number): Promise<ScanSummary | null> {
  const key = scanStorageKey(tabId);
  const stored = await chrome.storage.session.get(key);
  return (stored[key] as ScanSummary | undefined) ?? null;
}

async function init(): Promise<void> {
  const root = document.getElementById('app');
  if (!root) return;
  const tab = await activeTab();
  const state: PopupState = { summary: null, stale: false, offline: false, emptyPage: false };

  if (tab?.id != null) {
    state.summary = await storedSummary(tab.id);
    state.stale = state.summary !== null && state.summary.url !== (tab.url ?? '');
  }
  renderPopup(root, state);

  const scanButton = document.getElementById('scan') as HTMLButtonElement | null;
  const toggle = document.getElementById('toggle') as HTMLInputElement | null;

  scanButton?.addEventListener('click', async () => {
    if (tab?.id == null) return;
    scanButton.disabled = true;
    try {
      const reply = (await chrome.tabs.sendMessage(tab.id, { type: 'scan' })) as ScanReply;
      state.offline = reply.kind === 'offline';
      state.emptyPage = reply.kind === 'empty';
      if (reply.kind === 'summary') {
        state.summary = reply.summary;
        state.stale = false;
        if (toggle) toggle.checked = true;
        await chrome.storage.session.set({ [scanStorageKey(tab.id)]: reply.summary });
      }
    } catch {
      // No content script on this page (e.g. chrome:// URLs).
      state.offline = true;
    }
    scanButton.disabled = false;
    renderPopup(root, state);
  });

  toggle?.addEventListener('change', () => {
    if (tab?.id == null) return;
    void chrome.tabs
      .sendMessage(tab.id, { type: 'set-highlights', visible: toggle.checked })
      .catch(() => undefined);
  });
}

if (typeof chrome !== 'undefined' && chrome.tabs) {
  void init();
}
