// Service worker: owns the action badge and drops stored scans for
// closed tabs. Navigations clear the badge so a stale count never lingers.
import { scanStorageKey, type BadgeMessage } from './messages';

const OFFLINE_COLOR = '#6b7280';
const FLAGGED_COLOR = '#b91c1c';

chrome.runtime.onMessage.addListener((message: BadgeMessage, sender) => {
  if (message?.type !== 'badge') return;
  const tabId = sender.tab?.id;
  if (tabId == null) return;
  const color = message.text === 'offline' ? OFFLINE_COLOR : FLAGGED_COLOR;
  void chrome.action.setBadgeBackgroundColor({ tabId, color });
  void chrome.action.setBadgeText({ tabId, text: message.text });
});

chrome.tabs.onUpdated.addListener((tabId, change) => {
  if (change.status === 'loading') {
    void chrome.action.setBadgeText({ tabId, text: '' });
  }
});

chrome.tabs.onRemoved.addListener((tabId) => {
  void chrome.storage.session.remove(scanStorageKey(tabId));
});
