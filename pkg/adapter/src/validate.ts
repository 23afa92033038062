/**
 * Validation of converted documents against the canonical JSON schema
 * shipped with the Python package, plus the referential checks the
 * schema alone cannot express (index ranges, declared entities).
 */

import { readFileSync } from 'node:fs';
import { fileURLToPath } from 'node:url';
import { dirname, resolve } from 'node:path';
import { Ajv2020 } from 'ajv/dist/2020.js';
import { CanonicalDocument, SchemaError } from './types.js';

/** Default location of the schema inside this repository. */
export function defaultSchemaPath(): string {
  const here = dirname(fileURLToPath(import.meta.url));
  return resolve(here, '../../src/reltraj/data/document.schema.json');
}

export function validateAgainstSchema(doc: unknown, schemaPath?: string): void {
  const path = schemaPath ?? defaultSchemaPath();
  const schema = JSON.parse(readFileSync(path, 'utf-8'));
  const ajv = new Ajv2020({ allErrors: true });
  const check = ajv.compile(schema);
  if (!check(doc)) {
    const details = (check.errors ?? [])
      .map((e) => `${e.instancePath || '/'}: ${e.message}`)
      .join('; ');
    throw new SchemaError(`document does not match the canonical schema: ${details}`);
  }
}

/** Range and referential checks beyond the structural schema. */
export function validateReferences(doc: CanonicalDocument): void {
  const declared = new Set(doc.characters.map((c) => c.id));
  doc.sentences.forEach((s, i) => {
    const n = s.tokens.length;
    for (const d of s.deps) {
      if (d.head < -1 || d.head >= n || d.dep < 0 || d.dep >= n) {
        throw new SchemaError(`sentence ${i}: dependency indices out of range`);
      }
    }
    for (const m of s.mentions) {
      if (!declared.has(m.entity)) {
        throw new SchemaError(`sentence ${i}: mention entity ${m.entity} not declared`);
      }
      if (m.start < 0 || m.end > n || m.start >= m.end) {
        throw new SchemaError(`sentence ${i}: mention span [${m.start},${m.end}) invalid`);
      }
    }
    for (const f of s.frames) {
      if (f.lu < 0 || f.lu >= n) {
        throw new SchemaError(`sentence ${i}: frame lexical unit ${f.lu} out of range`);
      }
      for (const e of f.elements) {
        if (e.start < 0 || e.end > n || e.start >= e.end) {
          throw new SchemaError(
            `sentence ${i}: frame element span [${e.start},${e.end}) invalid`);
        }
      }
    }
  });
}

export function validateDocument(doc: CanonicalDocument, schemaPath?: string): void {
  validateAgainstSchema(doc, schemaPath);
  validateReferences(doc);
}
