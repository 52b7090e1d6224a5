// In-page annotations. Every mutation is an added wrapper element carrying
// the marker attribute, so a toggle can unwind the page to its exact
// pre-scan DOM: unwrapping moves the original children back in place.
import { CATEGORY_COLORS, type Category } from './taxonomy';
import { WRAPPER_ATTR, type PageSegment } from './segmenter';

export { WRAPPER_ATTR };

export interface Highlight {
  segment: PageSegment;
  category: Category;
  probability: number;
}

function makeWrapper(doc: Document, highlight: Highlight): HTMLElement {
  const span = doc.createElement('span');
  span.setAttribute(WRAPPER_ATTR, highlight.category);
  span.title = `${highlight.category} (p=${highlight.probability.toFixed(3)})`;
  span.style.outline = `2px solid ${CATEGORY_COLORS[highlight.category]}`;
  span.style.outlineOffset = '1px';
  return span;
}

export function applyHighlights(doc: Document, highlights: readonly Highlight[]): number {
  let applied = 0;
  for (const highlight of highlights) {
    const { segment } = highlight;
    if (segment.attrOwner) {
      const owner = segment.attrOwner;
      if (!owner.parentNode) continue;
      const wrapper = makeWrapper(doc, highlight);
      owner.parentNode.insertBefore(wrapper, owner);
      wrapper.appendChild(owner);
      applied += 1;
      continue;
    }
    for (const node of segment.textNodes) {
      if (!node.parentNode) continue;
      const wrapper = makeWrapper(doc, highlight);
      node.parentNode.insertBefore(wrapper, node);
      wrapper.appendChild(node);
    }
    if (segment.textNodes.length) applied += 1;
  }
  return applied;
}

export function clearHighlights(doc: Document): void {
  for (const wrapper of Array.from(doc.querySelectorAll(`[${WRAPPER_ATTR}]`))) {
    const parent = wrapper.parentNode;
    if (!parent) continue;
    while (wrapper.firstChild) {
      parent.insertBefore(wrapper.firstChild, wrapper);
    }
    parent.removeChild(wrapper);
  }
}

export function highlightCount(doc: Document): number {
  return doc.querySelectorAll(`[${WRAPPER_ATTR}]`).length;
}
