/**
 * Wire types: the raw per-tool annotation bundle on the input side and
 * the canonical narrative-document JSON on the output side.
 *
 * A bundle carries one document's payloads keyed by tool:
 *   - `pipeline` (required): tokens with POS/lemma, dependency edges and
 *     named character mentions, per sentence
 *   - `coref` (optional): coreference chains from a second system, whose
 *     spans may include pronouns already resolved by that system
 *   - `frames` (optional): a frame-semantic parse
 *
 * Every tool must agree with the pipeline tokenization sentence by
 * sentence (same sentence count, same token counts) or the document is
 * rejected.
 */

export interface BundleToken {
  surface: string;
  lemma: string;
  pos: string;
}

export interface BundleDep {
  head: number; // token index, -1 for root
  dep: number;
  rel: string;
}

/** A named character mention from the primary pipeline. */
export interface NamedMention {
  name: string;
  start: number; // token span, end-exclusive
  end: number;
}

export interface PipelineSentence {
  tokens: BundleToken[];
  deps?: BundleDep[];
  mentions?: NamedMention[];
}

export interface CorefSpan {
  sentence: number;
  start: number;
  end: number;
  text: string;
}

export interface CorefChain {
  id: number;
  spans: CorefSpan[];
}

export interface FrameElementSpan {
  name: string;
  start: number;
  end: number;
}

export interface BundleFrame {
  name: string;
  lu: number;
  elements?: FrameElementSpan[];
}

/** Per-sentence envelope for secondary tools; used for token alignment. */
export interface AlignedSentence {
  num_tokens: number;
  frames?: BundleFrame[];
}

export interface RawAnnotationBundle {
  doc_id: string;
  tools: {
    pipeline: { sentences: PipelineSentence[] };
    coref?: { sentences: AlignedSentence[]; chains: CorefChain[] };
    frames?: { sentences: AlignedSentence[] };
  };
}

// ---------------------------------------------------------------------------
// canonical output document

export interface CanonicalToken {
  surface: string;
  lemma: string;
  pos: string;
}

export interface CanonicalDep {
  head: number;
  dep: number;
  rel: string;
}

export interface CanonicalMention {
  entity: number;
  start: number;
  end: number;
}

export interface CanonicalFrameElement {
  name: string;
  start: number;
  end: number;
}

export interface CanonicalFrame {
  name: string;
  lu: number;
  elements: CanonicalFrameElement[];
}

export interface CanonicalSentence {
  tokens: CanonicalToken[];
  deps: CanonicalDep[];
  mentions: CanonicalMention[];
  frames: CanonicalFrame[];
}

export interface CanonicalCharacter {
  id: number;
  name: string;
}

export interface CanonicalDocument {
  doc_id: string;
  characters: CanonicalCharacter[];
  sentences: CanonicalSentence[];
}

export class AlignmentError extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'AlignmentError';
  }
}

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = 'SchemaError';
  }
}
