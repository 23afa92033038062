import { describe, expect, it } from 'vitest';
import { clusterCharacterNames, isTokenSubsequence } from '../src/clustering.js';

function asSets(clusters: { names: string[] }[]): string[][] {
  return clusters.map((c) => [...c.names].sort());
}

describe('isTokenSubsequence', () => {
  it('matches prefixes, suffixes and gapped subsequences', () => {
    expect(isTokenSubsequence(['tom'], ['tom', 'sawyer'])).toBe(true);
    expect(isTokenSubsequence(['potter'], ['harry', 'potter'])).toBe(true);
    expect(isTokenSubsequence(['tom', 'sawyer'], ['tom', 'middle', 'sawyer'])).toBe(true);
  });

  it('rejects out-of-order, equal-length and unrelated names', () => {
    expect(isTokenSubsequence(['sawyer', 'tom'], ['tom', 'sawyer'])).toBe(false);
    expect(isTokenSubsequence(['tom'], ['tom'])).toBe(false);
    expect(isTokenSubsequence(['becky'], ['tom', 'sawyer'])).toBe(false);
  });
});

describe('clusterCharacterNames', () => {
  it('assembles name variants of one character', () => {
    const clusters = clusterCharacterNames(['Tom', 'Tom Sawyer', 'Becky']);
    expect(asSets(clusters)).toEqual([['Becky'], ['Tom', 'Tom Sawyer']]);
    expect(clusters.map((c) => c.canonical)).toEqual(['Becky', 'Tom Sawyer']);
  });

  it('anchors first names over shared surnames', () => {
    const clusters = clusterCharacterNames(['Harry', 'Harry Potter', 'James Potter']);
    expect(asSets(clusters)).toEqual([['Harry', 'Harry Potter'], ['James Potter']]);
  });

  it('leaves names matching multiple clusters as singletons', () => {
    const clusters = clusterCharacterNames(['Potter', 'Harry Potter', 'James Potter']);
    expect(asSets(clusters)).toEqual([
      ['Harry Potter'], ['James Potter'], ['Potter'],
    ]);
  });

  it('keeps a single name as one singleton cluster', () => {
    expect(asSets(clusterCharacterNames(['Becky']))).toEqual([['Becky']]);
  });

  it('is order-independent and deduplicates case-insensitively', () => {
    const base = clusterCharacterNames(['Tom', 'Tom Sawyer', 'Becky']);
    const permuted = clusterCharacterNames(['Becky', 'tom sawyer', 'Tom', 'TOM']);
    expect(asSets(permuted).map((names) => names.map((n) => n.toLowerCase())))
      .toEqual(asSets(base).map((names) => names.map((n) => n.toLowerCase())));
  });

  it('ignores empty and whitespace-only names', () => {
    expect(asSets(clusterCharacterNames(['', '  ', 'Becky']))).toEqual([['Becky']]);
  });
});
