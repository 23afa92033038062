export { clusterCharacterNames, isTokenSubsequence } from './clustering.js';
export type { NameCluster } from './clustering.js';
export { convert } from './convert.js';
export type { ConvertOptions, MergePolicy } from './convert.js';
export { defaultSchemaPath, validateAgainstSchema, validateDocument, validateReferences } from './validate.js';
export * from './types.js';
