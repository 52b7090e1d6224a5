// Visible-text segmentation with the same rules the darkscan service
// applies server-side. Parity matters: the popup's fractions only match a
// /v1/scan of the same page if both sides carve out identical segments.
// The walk replays the service's streaming algorithm over the DOM tree:
// text accumulates across inline elements and flushes at block boundaries;
// excluded and hidden subtrees never emit.

export interface SegmentRules {
  minChars: number;
  extractAttributes: boolean;
}

export const DEFAULT_RULES: SegmentRules = { minChars: 3, extractAttributes: true };

export interface PageSegment {
  text: string;
  index: number;
  // Text nodes that contributed to the run; empty for attribute-sourced text.
  textNodes: Text[];
  // Element whose alt/title/placeholder/value supplied the text, if any.
  attrOwner: Element | null;
}

// Subtrees that are never visible text.
const EXCLUDED_TAGS = new Set([
  'script', 'style', 'noscript', 'template', 'head', 'title',
]);

// Elements that terminate a text run. Inline elements (span, b, a, ...) do not.
const BLOCK_TAGS = new Set([
  'address', 'article', 'aside', 'blockquote', 'body', 'button', 'caption',
  'dd', 'details', 'dialog', 'div', 'dl', 'dt', 'fieldset', 'figcaption',
  'figure', 'footer', 'form', 'h1', 'h2', 'h3', 'h4', 'h5', 'h6', 'header',
  'hr', 'html', 'legend', 'li', 'main', 'nav', 'ol', 'optgroup', 'option',
  'p', 'pre', 'section', 'select', 'summary', 'table', 'tbody', 'td',
  'textarea', 'tfoot', 'th', 'thead', 'tr', 'ul', 'video',
]);

const HIDDEN_STYLE_RE = /display\s*:\s*none|visibility\s*:\s*hidden/i;

// Attributes whose text users see even though it is not a text node.
const TEXT_ATTRS = ['alt', 'title', 'placeholder'] as const;

// Marker carried by our own highlight wrappers. Their tooltips must not
// count as page text, or a rescan would segment its own annotations.
export const WRAPPER_ATTR = 'data-darkscan';

// The service treats these as whitespace; \s would disagree on
// \u001c-\u001f (not \s) and \ufeff (\s, but stripped as a format
// character instead).
const SPACE_RE = /[\t\n\v\f\r\u001c-\u001f\u0085\p{Z}]/gu;
const CONTROL_RE = /[\p{Cc}\p{Cf}]/gu;

export function normalizeText(raw: string): string {
  let text = raw.normalize('NFC');
  text = text.replace(SPACE_RE, ' ');
  text = text.replace(CONTROL_RE, '');
  return text.replace(/ +/g, ' ').trim();
}

function isHidden(el: Element): boolean {
  if (el.hasAttribute('hidden')) return true;
  if ((el.getAttribute('aria-hidden') ?? '').trim().toLowerCase() === 'true') return true;
  return HIDDEN_STYLE_RE.test(el.getAttribute('style') ?? '');
}

interface RawRun {
  raw: string;
  textNodes: Text[];
  attrOwner: Element | null;
}

function collectRuns(root: Element, rules: SegmentRules): RawRun[] {
  const out: RawRun[] = [];
  let runParts: string[] = [];
  let runNodes: Text[] = [];
  let pendingAttrs: { text: string; owner: Element }[] = [];

  // Run text first, then any attribute text queued since the last boundary.
  const flush = () => {
    if (runParts.length) {
      out.push({ raw: runParts.join(''), textNodes: runNodes, attrOwner: null });
      runParts = [];
      runNodes = [];
    }
    for (const attr of pendingAttrs) {
      out.push({ raw: attr.text, textNodes: [], attrOwner: attr.owner });
    }
    pendingAttrs = [];
  };

  const queueAttrText = (el: Element, tag: string) => {
    if (!rules.extractAttributes) return;
    if (el.hasAttribute(WRAPPER_ATTR)) return;
    for (const name of TEXT_ATTRS) {
      const value = el.getAttribute(name);
      if (value) pendingAttrs.push({ text: value, owner: el });
    }
    if (tag === 'input') {
      const type = (el.getAttribute('type') ?? '').toLowerCase();
      if (type === 'button' || type === 'submit' || type === 'reset') {
        const value = el.getAttribute('value');
        if (value) pendingAttrs.push({ text: value, owner: el });
      }
    }
  };

  const visit = (node: Node, hidden: boolean, excluded: boolean) => {
    if (node.nodeType === Node.TEXT_NODE) {
      if (hidden || excluded) return;
      const data = (node as Text).data;
      // Whitespace-only text never opens a run, but extends one.
      if (!data.trim() && runParts.length === 0) return;
      runParts.push(data);
      runNodes.push(node as Text);
      return;
    }
    if (node.nodeType !== Node.ELEMENT_NODE) return;
    const el = node as Element;
    const tag = el.tagName.toLowerCase();
    const selfHidden = hidden || isHidden(el);
    const selfExcluded = excluded || EXCLUDED_TAGS.has(tag);
    // Block boundaries flush even inside hidden subtrees.
    if (BLOCK_TAGS.has(tag) || tag === 'br') flush();
    if (!(selfHidden || selfExcluded)) queueAttrText(el, tag);
    for (let child = el.firstChild; child; child = child.nextSibling) {
      visit(child, selfHidden, selfExcluded);
    }
    if (BLOCK_TAGS.has(tag)) flush();
  };

  visit(root, false, false);
  flush();
  return out;
}

export function extractSegments(
  root: Document | Element,
  rules: SegmentRules = DEFAULT_RULES,
): PageSegment[] {
  const rootEl = 'documentElement' in root ? root.documentElement : root;
  const segments: PageSegment[] = [];
  for (const run of collectRuns(rootEl, rules)) {
    const text = normalizeText(run.raw);
    if (Array.from(text).length < rules.minChars) continue;
    if (!/\p{L}/u.test(text)) continue;
    segments.push({
      text,
      index: segments.length,
      textNodes: run.textNodes,
      attrOwner: run.attrOwner,
    });
  }
  return segments;
}
