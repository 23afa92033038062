/**
 * Cross-boundary round trip: converted bundles must validate against the
 * canonical schema shipped with the Python package and load through its
 * document loader without error.
 */

import { execFileSync } from 'node:child_process';
import { mkdtempSync, readFileSync, writeFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { fileURLToPath } from 'node:url';
import { dirname, join } from 'node:path';
import { describe, expect, it } from 'vitest';
import { convert } from '../src/convert.js';
import { validateDocument } from '../src/validate.js';
import type { RawAnnotationBundle } from '../src/types.js';

const here = dirname(fileURLToPath(import.meta.url));

function loadBundle(): RawAnnotationBundle {
  return JSON.parse(
    readFileSync(join(here, 'fixtures', 'bundle-tomsawyer.json'), 'utf-8'));
}

describe('round trip into the Python pipeline', () => {
  it('validates against the shipped canonical schema', () => {
    const doc = convert(loadBundle());
    expect(() => validateDocument(doc)).not.toThrow();
  });

  it('loads through the corpus document loader and extracts the pair', () => {
    const doc = convert(loadBundle());
    const dir = mkdtempSync(join(tmpdir(), 'reltraj-adapter-'));
    const path = join(dir, 'doc.json');
    writeFileSync(path, JSON.stringify(doc));

    const script = [
      'import json, sys',
      'from reltraj.corpus import load_document, extract_pair_sequences',
      'doc = load_document(sys.argv[1])',
      'seqs = extract_pair_sequences(doc, min_cooccurrence=2)',
      'print(json.dumps({',
      '    "doc_id": doc.doc_id,',
      '    "characters": sorted(doc.character_ids()),',
      '    "pairs": [[list(s.pair), len(s)] for s in seqs],',
      '}))',
    ].join('\n');
    const out = execFileSync('python3', ['-c', script, path], { encoding: 'utf-8' });
    const result = JSON.parse(out);
    expect(result.doc_id).toBe('tomsawyer-adapter-fixture');
    expect(result.characters).toEqual([1, 2]);
    // both characters co-occur in sentences 0 and 1 (via the merged pronouns)
    expect(result.pairs).toEqual([[[1, 2], 2]]);
  });

  it('CLI converts with --validate and exits cleanly', () => {
    const dir = mkdtempSync(join(tmpdir(), 'reltraj-adapter-cli-'));
    const out = join(dir, 'doc.json');
    execFileSync('node', [
      join(here, '..', 'dist', 'cli.js'), 'convert',
      join(here, 'fixtures', 'bundle-tomsawyer.json'),
      '-o', out, '--validate',
    ], { encoding: 'utf-8' });
    const doc = JSON.parse(readFileSync(out, 'utf-8'));
    expect(doc.characters).toHaveLength(2);
  });

  it('CLI cluster-names reproduces the documented clustering', () => {
    const dir = mkdtempSync(join(tmpdir(), 'reltraj-adapter-names-'));
    const names = join(dir, 'names.txt');
    writeFileSync(names, 'Tom\nTom Sawyer\nBecky\n');
    const out = execFileSync('node', [
      join(here, '..', 'dist', 'cli.js'), 'cluster-names', names,
    ], { encoding: 'utf-8' });
    const clusters = JSON.parse(out);
    expect(clusters.map((c: { names: string[] }) => c.names)).toEqual([
      ['Becky'], ['Tom', 'Tom Sawyer'],
    ]);
  });
});
