// Endpoint configuration, stored in chrome.storage.sync by the options page.
export const DEFAULT_ENDPOINT = 'http://127.0.0.1:8787';

function hasSyncStorage(): boolean {
  return typeof chrome !== 'undefined' && !!chrome.storage?.sync;
}

export async function getEndpoint(): Promise<string> {
  if (!hasSyncStorage()) return DEFAULT_ENDPOINT;
  const stored = await chrome.storage.sync.get('endpoint');
  const value = typeof stored.endpoint === 'string' ? stored.endpoint.trim() : '';
  return value ? value.replace(/\/+$/, '') : DEFAULT_ENDPOINT;
}

export async function setEndpoint(url: string): Promise<void> {
  await chrome.storage.sync.set({ endpoint: url.trim() });
}
