/**
 * Bundle-to-canonical-document conversion.
 *
 * The primary pipeline payload provides tokens, dependencies and named
 * character mentions; names are clustered into characters and each
 * mention span resolves to its cluster's entity id. Coreference chains
 * from the secondary source are merged in by union: a chain is anchored
 * to the entity that any of its spans overlaps or string-matches, and
 * then all spans of the chain (pronouns included) become mentions of
 * that entity. Chains whose spans match conflicting entities are
 * dropped under the default conservative policy, or assigned to the
 * plurality entity under the "majority" policy.
 */

import { clusterCharacterNames, NameCluster } from './clustering.js';
import {
  AlignmentError,
  CanonicalDocument,
  CanonicalMention,
  CanonicalSentence,
  CorefChain,
  RawAnnotationBundle,
  SchemaError,
} from './types.js';

export type MergePolicy = 'conservative' | 'majority';

export interface ConvertOptions {
  mergePolicy?: MergePolicy;
  /** Called once per dropped chain with a human-readable reason. */
  onDroppedChain?: (chainId: number, reason: string) => void;
}

function checkBundleShape(bundle: RawAnnotationBundle): void {
  if (typeof bundle.doc_id !== 'string' || bundle.doc_id.length === 0) {
    throw new SchemaError('bundle is missing a doc_id');
  }
  const pipeline = bundle.tools?.pipeline;
  if (!pipeline || !Array.isArray(pipeline.sentences) || pipeline.sentences.length === 0) {
    throw new SchemaError(`${bundle.doc_id}: bundle has no pipeline sentences`);
  }
  pipeline.sentences.forEach((s, i) => {
    if (!Array.isArray(s.tokens) || s.tokens.length === 0) {
      throw new SchemaError(`${bundle.doc_id}: sentence ${i} has no tokens`);
    }
    for (const t of s.tokens) {
      if (typeof t.surface !== 'string' || t.surface.length === 0) {
        throw new SchemaError(`${bundle.doc_id}: sentence ${i} has a token without a surface form`);
      }
    }
  });
}

function checkAlignment(bundle: RawAnnotationBundle): void {
  const base = bundle.tools.pipeline.sentences;
  for (const toolName of ['coref', 'frames'] as const) {
    const tool = bundle.tools[toolName];
    if (!tool) continue;
    if (tool.sentences.length !== base.length) {
      throw new AlignmentError(
        `${bundle.doc_id}: ${toolName} has ${tool.sentences.length} sentences, `
        + `pipeline has ${base.length}`);
    }
    tool.sentences.forEach((s, i) => {
      if (s.num_tokens !== base[i].tokens.length) {
        throw new AlignmentError(
          `${bundle.doc_id}: ${toolName} sentence ${i} has ${s.num_tokens} tokens, `
          + `pipeline has ${base[i].tokens.length}`);
      }
    });
  }
}

interface EntityTable {
  characters: { id: number; name: string }[];
  idOfName: Map<string, number>; // lowercase member name -> entity id
}

function buildEntityTable(clusters: NameCluster[]): EntityTable {
  const characters = clusters.map((c, i) => ({ id: i + 1, name: c.canonical }));
  const idOfName = new Map<string, number>();
  clusters.forEach((c, i) => {
    for (const name of c.names) idOfName.set(name.toLowerCase(), i + 1);
  });
  return { characters, idOfName };
}

function spansOverlap(aStart: number, aEnd: number, bStart: number, bEnd: number): boolean {
  return aStart < bEnd && bStart < aEnd;
}

/** Entities a chain's spans touch, by overlap with existing mentions or
 * by string match against a clustered name. */
function chainEntityVotes(chain: CorefChain, sentences: CanonicalSentence[],
                          table: EntityTable): Map<number, number> {
  const votes = new Map<number, number>();
  const bump = (id: number) => votes.set(id, (votes.get(id) ?? 0) + 1);
  for (const span of chain.spans) {
    const sentence = sentences[span.sentence];
    if (!sentence) continue;
    let matched = false;
    for (const m of sentence.mentions) {
      if (spansOverlap(span.start, span.end, m.start, m.end)) {
        bump(m.entity);
        matched = true;
      }
    }
    if (!matched) {
      const byName = table.idOfName.get(span.text.trim().toLowerCase());
      if (byName !== undefined) bump(byName);
    }
  }
  return votes;
}

export function convert(bundle: RawAnnotationBundle,
                        options: ConvertOptions = {}): CanonicalDocument {
  const policy = options.mergePolicy ?? 'conservative';
  checkBundleShape(bundle);
  checkAlignment(bundle);

  const pipeline = bundle.tools.pipeline.sentences;
  const names = pipeline.flatMap((s) => (s.mentions ?? []).map((m) => m.name));
  const table = buildEntityTable(clusterCharacterNames(names));

  const sentences: CanonicalSentence[] = pipeline.map((s, i) => {
    const mentions: CanonicalMention[] = [];
    for (const m of s.mentions ?? []) {
      if (m.start < 0 || m.end > s.tokens.length || m.start >= m.end) {
        throw new SchemaError(
          `${bundle.doc_id}: sentence ${i} mention span [${m.start},${m.end}) is invalid`);
      }
      const entity = table.idOfName.get(m.name.toLowerCase());
      if (entity === undefined) {
        throw new SchemaError(
          `${bundle.doc_id}: sentence ${i} mention name ${m.name} failed to cluster`);
      }
      mentions.push({ entity, start: m.start, end: m.end });
    }
    return {
      tokens: s.tokens.map((t) => ({
        surface: t.surface,
        lemma: t.lemma ?? t.surface.toLowerCase(),
        pos: t.pos ?? '',
      })),
      deps: (s.deps ?? []).map((d) => ({ head: d.head, dep: d.dep, rel: d.rel })),
      mentions,
      frames: [],
    };
  });

  for (const chain of bundle.tools.coref?.chains ?? []) {
    const votes = chainEntityVotes(chain, sentences, table);
    let entity: number | undefined;
    if (votes.size === 1) {
      entity = [...votes.keys()][0];
    } else if (votes.size > 1 && policy === 'majority') {
      const ranked = [...votes.entries()].sort((a, b) => b[1] - a[1] || a[0] - b[0]);
      if (ranked[0][1] > ranked[1][1]) entity = ranked[0][0];
    }
    if (entity === undefined) {
      const reason = votes.size === 0 ? 'no entity match' : 'conflicting entity matches';
      options.onDroppedChain?.(chain.id, reason);
      continue;
    }
    for (const span of chain.spans) {
      const sentence = sentences[span.sentence];
      if (!sentence || span.start < 0 || span.end > sentence.tokens.length
          || span.start >= span.end) {
        throw new SchemaError(
          `${bundle.doc_id}: coref chain ${chain.id} span `
          + `[${span.start},${span.end}) in sentence ${span.sentence} is invalid`);
      }
      const exists = sentence.mentions.some(
        (m) => m.entity === entity && m.start === span.start && m.end === span.end);
      if (!exists) {
        sentence.mentions.push({ entity, start: span.start, end: span.end });
      }
    }
  }

  for (const [i, frameSentence] of (bundle.tools.frames?.sentences ?? []).entries()) {
    sentences[i].frames = (frameSentence.frames ?? []).map((f) => ({
      name: f.name,
      lu: f.lu,
      elements: (f.elements ?? []).map((e) => ({
        name: e.name, start: e.start, end: e.end,
      })),
    }));
  }

  for (const s of sentences) {
    s.mentions.sort((a, b) => a.start - b.start || a.end - b.end || a.entity - b.entity);
  }

  return {
    doc_id: bundle.doc_id,
    characters: table.characters,
    sentences,
  };
}
