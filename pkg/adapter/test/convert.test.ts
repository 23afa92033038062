import { readFileSync } from 'node:fs';
import { fileURLToPath } from 'node:url';
import { dirname, join } from 'node:path';
import { describe, expect, it } from 'vitest';
import { convert } from '../src/convert.js';
import { AlignmentError, RawAnnotationBundle, SchemaError } from '../src/types.js';

const here = dirname(fileURLToPath(import.meta.url));

function loadBundle(): RawAnnotationBundle {
  return JSON.parse(
    readFileSync(join(here, 'fixtures', 'bundle-tomsawyer.json'), 'utf-8'));
}

describe('convert', () => {
  it('clusters characters and assigns stable entity ids', () => {
    const doc = convert(loadBundle());
    expect(doc.doc_id).toBe('tomsawyer-adapter-fixture');
    expect(doc.characters).toEqual([
      { id: 1, name: 'Becky' },
      { id: 2, name: 'Tom Sawyer' },
    ]);
  });

  it('merges coref chains by union, pronouns included', () => {
    const doc = convert(loadBundle());
    // Tom Sawyer (s0), he (s1) and Tom (s2) all land on entity 2
    expect(doc.sentences[0].mentions).toContainEqual({ entity: 2, start: 0, end: 2 });
    expect(doc.sentences[1].mentions).toContainEqual({ entity: 2, start: 1, end: 2 });
    expect(doc.sentences[2].mentions).toContainEqual({ entity: 2, start: 0, end: 1 });
    // Becky's chain adds "her"
    expect(doc.sentences[1].mentions).toContainEqual({ entity: 1, start: 3, end: 4 });
    // the named mention duplicated by chain 0 in s2 is not added twice
    expect(doc.sentences[2].mentions).toHaveLength(1);
  });

  it('passes frames through and leaves missing layers empty', () => {
    const doc = convert(loadBundle());
    expect(doc.sentences[0].frames).toEqual([
      {
        name: 'forgiveness', lu: 2,
        elements: [
          { name: 'judge', start: 0, end: 2 },
          { name: 'evaluee', start: 3, end: 4 },
        ],
      },
    ]);
    expect(doc.sentences[1].frames).toEqual([]);
  });

  it('accepts a bundle with no frames tool', () => {
    const bundle = loadBundle();
    delete bundle.tools.frames;
    const doc = convert(bundle);
    expect(doc.sentences.every((s) => s.frames.length === 0)).toBe(true);
  });

  it('rejects mismatched token counts', () => {
    const bundle = loadBundle();
    bundle.tools.coref!.sentences[1].num_tokens = 7;
    expect(() => convert(bundle)).toThrow(AlignmentError);
  });

  it('rejects mismatched sentence counts', () => {
    const bundle = loadBundle();
    bundle.tools.frames!.sentences.pop();
    expect(() => convert(bundle)).toThrow(AlignmentError);
  });

  it('rejects bundles without pipeline sentences', () => {
    const bundle = loadBundle();
    (bundle.tools as { pipeline?: unknown }).pipeline = { sentences: [] };
    expect(() => convert(bundle)).toThrow(SchemaError);
  });

  it('drops chains with conflicting matches under the conservative policy', () => {
    const bundle = loadBundle();
    const dropped: number[] = [];
    // spans touching both Tom Sawyer and Becky mentions
    bundle.tools.coref!.chains.push({
      id: 9,
      spans: [
        { sentence: 0, start: 0, end: 2, text: 'Tom Sawyer' },
        { sentence: 0, start: 3, end: 4, text: 'Becky' },
        { sentence: 1, start: 0, end: 1, text: 'Later' },
      ],
    });
    const doc = convert(bundle, { onDroppedChain: (id) => dropped.push(id) });
    expect(dropped).toEqual([9]);
    // "Later" was not attached to anyone
    expect(doc.sentences[1].mentions).toHaveLength(2);
  });

  it('assigns conflicted chains by plurality under the majority policy', () => {
    const bundle = loadBundle();
    bundle.tools.coref!.chains.push({
      id: 9,
      spans: [
        { sentence: 0, start: 0, end: 2, text: 'Tom Sawyer' },
        { sentence: 2, start: 0, end: 1, text: 'Tom' },
        { sentence: 0, start: 3, end: 4, text: 'Becky' },
        { sentence: 1, start: 0, end: 1, text: 'Later' },
      ],
    });
    const doc = convert(bundle, { mergePolicy: 'majority' });
    // two votes for Tom Sawyer, one for Becky: "Later" joins entity 2
    expect(doc.sentences[1].mentions).toContainEqual({ entity: 2, start: 0, end: 1 });
  });

  it('drops chains matching nothing', () => {
    const bundle = loadBundle();
    const dropped: number[] = [];
    bundle.tools.coref!.chains.push({
      id: 4,
      spans: [{ sentence: 1, start: 0, end: 1, text: 'Later' }],
    });
    convert(bundle, { onDroppedChain: (id) => dropped.push(id) });
    expect(dropped).toEqual([4]);
  });
});
