// Content script. Scans run only on demand from the popup, so the page
// load path is never blocked; a scan classifies every visible segment
// through the service and wraps flagged ones in outline spans.
import { argmaxFractions } from './aggregate';
import {
  classifyTexts,
  fetchHealth,
  type ClassifyResult,
} from './client';
import { applyHighlights, clearHighlights, type Highlight } from './highlight';
import { extractSegments } from './segmenter';
import { getEndpoint } from './settings';
import type { BadgeMessage, ContentRequest, ScanReply, ScanSummary } from './messages';
import type { Category } from './taxonomy';

export interface ScanOutcome {
  reply: ScanReply;
  highlights: Highlight[];
}

// Highest-probability flagged category; the service lists flags in
// canonical order, so a strict comparison keeps the tie-break rule.
function topFlagged(
  result: ClassifyResult,
): { category: Category; probability: number } | null {
  let best: Category | null = null;
  for (const category of result.flagged) {
    if (best === null || result.probabilities[category] > result.probabilities[best]) {
      best = category;
    }
  }
  if (best === null) return null;
  return { category: best, probability: result.probabilities[best] };
}

export async function performScan(doc: Document, endpoint: string): Promise<ScanOutcome> {
  const segments = extractSegments(doc);
  if (segments.length === 0) {
    return { reply: { kind: 'empty' }, highlights: [] };
  }

  // All service traffic happens before any DOM change: an unreachable
  // service must leave the page untouched.
  let backend: string;
  let results: ClassifyResult[];
  try {
    backend = (await fetchHealth(endpoint)).backend;
    results = await classifyTexts(endpoint, segments.map((s) => s.text));
  } catch {
    return { reply: { kind: 'offline' }, highlights: [] };
  }

  clearHighlights(doc);
  const highlights: Highlight[] = [];
  results.forEach((result, i) => {
    const top = topFlagged(result);
    if (top) {
      highlights.push({ segment: segments[i], ...top });
    }
  });
  applyHighlights(doc, highlights);

  const summary: ScanSummary = {
    url: doc.location?.href ?? '',
    scannedAt: Date.now(),
    total: segments.length,
    flaggedCount: highlights.length,
    fractions: argmaxFractions(results.map((r) => r.predicted)),
    backend,
  };
  return { reply: { kind: 'summary', summary }, highlights };
}

let lastHighlights: Highlight[] = [];

function sendBadge(text: string): void {
  const message: BadgeMessage = { type: 'badge', text };
  void chrome.runtime.sendMessage(message).catch(() => undefined);
}

async function handleScan(): Promise<ScanReply> {
  const endpoint = await getEndpoint();
  const outcome = await performScan(document, endpoint);
  lastHighlights = outcome.highlights;
  if (outcome.reply.kind === 'offline') {
    sendBadge('offline');
  } else if (outcome.reply.kind === 'summary') {
    const n = outcome.reply.summary.flaggedCount;
    sendBadge(n > 0 ? String(n) : '');
  }
  return outcome.reply;
}

export function installListener(): void {
  chrome.runtime.onMessage.addListener(
    (message: ContentRequest, _sender, sendResponse) => {
      if (message?.type === 'scan') {
        handleScan().then(sendResponse, () => sendResponse({ kind: 'offline' }));
        return true; // async response
      }
      if (message?.type === 'set-highlights') {
        clearHighlights(document);
        if (message.visible) {
          applyHighlights(document, lastHighlights);
        }
        sendResponse({ kind: 'toggled', visible: message.visible });
      }
      return false;
    },
  );
}

if (typeof chrome !== 'undefined' && chrome.runtime?.onMessage) {
  installListener();
}
