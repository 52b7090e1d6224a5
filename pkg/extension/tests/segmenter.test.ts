import { readFileSync } from 'node:fs';
import path from 'node:path';
import { describe, expect, it } from 'vitest';

import { DEFAULT_RULES, extractSegments, normalizeText } from '../src/segmenter';

// expected.json is generated from the darkscan CLI (scripts/
// make_parity_fixtures.py): the service's segmentation of the same pages.
const EXPECTED: Record<string, string[]> = JSON.parse(
  readFileSync(path.join(__dirname, 'fixtures/parity/expected.json'), 'utf-8'),
);

function parseFixture(name: string): Document {
  const html = readFileSync(path.join(__dirname, 'fixtures/parity', name), 'utf-8');
  return new DOMParser().parseFromString(html, 'text/html');
}

function parseHtml(html: string): Document {
  return new DOMParser().parseFromString(html, 'text/html');
}

describe('service parity', () => {
  for (const [name, texts] of Object.entries(EXPECTED)) {
    it(`segments ${name} like the service`, () => {
      const doc = parseFixture(name);
      expect(extractSegments(doc).map((s) => s.text)).toEqual(texts);
    });
  }
});

describe('normalizeText', () => {
  it('collapses whitespace runs and trims', () => {
    expect(normalizeText('  a\t\tb \n c  ')).toBe('a b c');
  });

  it('treats non-breaking spaces as whitespace', () => {
    expect(normalizeText('4 EUR')).toBe('4 EUR');
  });

  it('strips control and format characters', () => {
    expect(normalizeText('so\u0000ft\u200bware')).toBe('software');
  });

  it('applies canonical composition', () => {
    expect(normalizeText('café')).toBe('café');
  });
});

describe('extractSegments', () => {
  it('drops short and letterless runs', () => {
    const doc = parseHtml('<body><p>ab</p><p>409</p><p>abc</p></body>');
    expect(extractSegments(doc).map((s) => s.text)).toEqual(['abc']);
  });

  it('records contributing text nodes for a merged inline run', () => {
    const doc = parseHtml('<body><p>Only <b>2</b> left</p></body>');
    const [segment] = extractSegments(doc);
    expect(segment.text).toBe('Only 2 left');
    expect(segment.textNodes.map((n) => n.data)).toEqual(['Only ', '2', ' left']);
    expect(segment.attrOwner).toBeNull();
  });

  it('points attribute segments at the owning element', () => {
    const doc = parseHtml('<body><p><img src="x.png" alt="A photo"></p></body>');
    const [segment] = extractSegments(doc);
    expect(segment.text).toBe('A photo');
    expect(segment.textNodes).toEqual([]);
    expect(segment.attrOwner?.tagName.toLowerCase()).toBe('img');
  });

  it('keeps document order as segment index', () => {
    const doc = parseHtml('<body><p>first one</p><p>second one</p></body>');
    expect(extractSegments(doc).map((s) => s.index)).toEqual([0, 1]);
  });

  it('ignores tooltips carried by its own highlight wrappers', () => {
    const doc = parseHtml(
      '<body><p><span data-darkscan="Scarcity" title="Scarcity (p=0.9)">two left</span></p></body>',
    );
    expect(extractSegments(doc).map((s) => s.text)).toEqual(['two left']);
  });

  it('is deterministic across repeat runs', () => {
    const doc = parseFixture('storefront.html');
    const first = extractSegments(doc).map((s) => s.text);
    const second = extractSegments(doc).map((s) => s.text);
    const third = extractSegments(doc).map((s) => s.text);
    expect(second).toEqual(first);
    expect(third).toEqual(first);
  });

  it('honors the attribute extraction switch', () => {
    const doc = parseHtml('<body><p><img alt="A photo"> caption text</p></body>');
    const rules = { ...DEFAULT_RULES, extractAttributes: false };
    expect(extractSegments(doc, rules).map((s) => s.text)).toEqual(['caption text']);
  });
});
