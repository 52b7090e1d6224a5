// The eight categories in canonical order (alphabetical by internal name),
// spelled exactly as the service's wire format spells them. Every table,
// tie-break, and fraction map iterates in this order.
export const CATEGORIES = [
  'Forced Action',
  'Misdirection',
  'Not Dark Pattern',
  'Obstruction',
  'Scarcity',
  'Sneaking',
  'Social Proof',
  'Urgency',
] as const;

export type Category = (typeof CATEGORIES)[number];

export const NOT_DARK: Category = 'Not Dark Pattern';

// A benign prediction is never a flag, so it gets no outline color.
export const DARK_CATEGORIES: readonly Category[] = CATEGORIES.filter(
  (c) => c !== NOT_DARK,
);

export const CATEGORY_COLORS: Record<Category, string> = {
  'Forced Action': '#d62728',
  'Misdirection': '#9467bd',
  'Not Dark Pattern': '#7f7f7f',
  'Obstruction': '#8c564b',
  'Scarcity': '#ff7f0e',
  'Sneaking': '#2ca02c',
  'Social Proof': '#1f77b4',
  'Urgency': '#e377c2',
};

export function isCategory(value: unknown): value is Category {
  return typeof value === 'string' && (CATEGORIES as readonly string[]).includes(value);
}
