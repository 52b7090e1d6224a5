// Options page: stores the service endpoint URL.
import { DEFAULT_ENDPOINT, getEndpoint, setEndpoint } from './settings';

async function init(): Promise<void> {
  const input = document.getElementById('endpoint') as HTMLInputElement | null;
  const form = document.getElementById('settings') as HTMLFormElement | null;
  const status = document.getElementById('status');
  if (!input || !form) return;

  input.placeholder = DEFAULT_ENDPOINT;
  input.value = await getEndpoint();

  form.addEventListener('submit', (event) => {
    event.preventDefault();
    void setEndpoint(input.value || DEFAULT_ENDPOINT).then(() => {
      if (status) status.textContent = 'Saved.';
    });
  });
}

if (typeof chrome !== 'undefined' && chrome.storage) {
  void init();
}
