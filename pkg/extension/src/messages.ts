// Message shapes exchanged between popup, content script, and background.
import type { Fractions } from './aggregate';

export interface ScanSummary {
  url: string;
  scannedAt: number;
  total: number;
  flaggedCount: number;
  fractions: Fractions;
  backend: string;
}

export type ScanReply =
  | { kind: 'summary'; summary: ScanSummary }
  | { kind: 'offline' }
  | { kind: 'empty' };

export type ContentRequest =
  | { type: 'scan' }
  | { type: 'set-highlights'; visible: boolean };

export interface BadgeMessage {
  type: 'badge';
  text: string;
}

// chrome.storage.session key for the last scan of a given tab.
export function scanStorageKey(tabId: number): string {
  return `scan:${tabId}`;
}
