// Client-side roll-up of per-segment predictions into page fractions,
// matching the service's argmax aggregation so the popup table agrees
// with a /v1/scan of the same page.
import { CATEGORIES, type Category } from './taxonomy';

export type Probabilities = Record<Category, number>;

export type Fractions = Record<Category, number>;

// First maximum in canonical order wins, which is also the tie-break rule.
export function argmaxCategory(probs: Probabilities): Category {
  let best: Category = CATEGORIES[0];
  for (const category of CATEGORIES) {
    if (probs[category] > probs[best]) best = category;
  }
  return best;
}

export function argmaxFractions(predicted: readonly Category[]): Fractions {
  if (predicted.length === 0) {
    throw new Error('no segments to aggregate');
  }
  const counts = Object.fromEntries(CATEGORIES.map((c) => [c, 0])) as Record<Category, number>;
  for (const category of predicted) {
    counts[category] += 1;
  }
  const fractions = {} as Fractions;
  for (const category of CATEGORIES) {
    fractions[category] = counts[category] / predicted.length;
  }
  return fractions;
}
