import { describe, expect, it } from 'vitest';

import { argmaxCategory, argmaxFractions, type Probabilities } from '../src/aggregate';
import { CATEGORIES, type Category } from '../src/taxonomy';

function probs(overrides: Partial<Probabilities>): Probabilities {
  const base = Object.fromEntries(CATEGORIES.map((c) => [c, 0])) as Probabilities;
  return { ...base, ...overrides };
}

describe('argmaxCategory', () => {
  it('picks the highest probability', () => {
    expect(argmaxCategory(probs({ Scarcity: 0.9, Urgency: 0.1 }))).toBe('Scarcity');
  });

  it('breaks ties by canonical order', () => {
    const uniform = Object.fromEntries(CATEGORIES.map((c) => [c, 0.125])) as Probabilities;
    expect(argmaxCategory(uniform)).toBe('Forced Action');
    expect(argmaxCategory(probs({ Sneaking: 0.5, Urgency: 0.5 }))).toBe('Sneaking');
  });
});

describe('argmaxFractions', () => {
  it('matches a hand count', () => {
    const predicted: Category[] = [
      'Not Dark Pattern', 'Not Dark Pattern', 'Not Dark Pattern', 'Scarcity',
    ];
    const fractions = argmaxFractions(predicted);
    expect(fractions['Not Dark Pattern']).toBe(0.75);
    expect(fractions['Scarcity']).toBe(0.25);
    expect(fractions['Urgency']).toBe(0);
  });

  it('always sums to one', () => {
    const predicted: Category[] = [
      'Urgency', 'Scarcity', 'Scarcity', 'Misdirection', 'Not Dark Pattern',
      'Social Proof', 'Urgency',
    ];
    const total = Object.values(argmaxFractions(predicted)).reduce((a, b) => a + b, 0);
    expect(total).toBeCloseTo(1, 9);
  });

  it('covers all eight categories', () => {
    const fractions = argmaxFractions(['Obstruction']);
    expect(Object.keys(fractions)).toEqual([...CATEGORIES]);
  });

  it('rejects an empty page', () => {
    expect(() => argmaxFractions([])).toThrow('no segments');
  });
});
