#!/usr/bin/env node
/**
 * Adapter CLI.
 *
 *   reltraj-adapter convert <bundle.json> [-o out.json] [--validate]
 *       [--schema path] [--merge conservative|majority]
 *   reltraj-adapter cluster-names <names.txt>
 *
 * `convert` reads one raw annotation bundle and writes the canonical
 * document JSON; `cluster-names` reads one name per line and prints the
 * resulting clusters as JSON.
 */

import { readFileSync, writeFileSync } from 'node:fs';
import process from 'node:process';
import { clusterCharacterNames } from './clustering.js';
import { convert, MergePolicy } from './convert.js';
import { validateDocument } from './validate.js';

function fail(message: string): never {
  process.stderr.write(JSON.stringify({ error: message }) + '\n');
  process.exit(1);
}

interface Flags {
  positional: string[];
  out?: string;
  schema?: string;
  merge: MergePolicy;
  validate: boolean;
}

function parseFlags(argv: string[]): Flags {
  const flags: Flags = { positional: [], merge: 'conservative', validate: false };
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === '--validate') flags.validate = true;
    else if (arg === '-o' || arg === '--out') flags.out = argv[++i];
    else if (arg === '--schema') flags.schema = argv[++i];
    else if (arg === '--merge') {
      const value = argv[++i];
      if (value !== 'conservative' && value !== 'majority') {
        fail(`--merge must be conservative or majority, got ${value}`);
      }
      flags.merge = value;
    } else if (arg.startsWith('-')) fail(`unknown flag ${arg}`);
    else flags.positional.push(arg);
  }
  return flags;
}

function cmdConvert(flags: Flags): void {
  const [input] = flags.positional;
  if (!input) fail('convert: missing bundle path');
  const bundle = JSON.parse(readFileSync(input, 'utf-8'));
  const doc = convert(bundle, {
    mergePolicy: flags.merge,
    onDroppedChain: (id, reason) =>
      process.stderr.write(`dropped coref chain ${id}: ${reason}\n`),
  });
  if (flags.validate) validateDocument(doc, flags.schema);
  const text = JSON.stringify(doc, null, 2) + '\n';
  if (flags.out) {
    writeFileSync(flags.out, text);
    process.stderr.write(`wrote ${flags.out}\n`);
  } else {
    process.stdout.write(text);
  }
}

function cmdClusterNames(flags: Flags): void {
  const [input] = flags.positional;
  if (!input) fail('cluster-names: missing names file');
  const names = readFileSync(input, 'utf-8')
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  const clusters = clusterCharacterNames(names);
  process.stdout.write(JSON.stringify(clusters, null, 2) + '\n');
}

function main(): void {
  const [command, ...rest] = process.argv.slice(2);
  const flags = parseFlags(rest);
  try {
    if (command === 'convert') cmdConvert(flags);
    else if (command === 'cluster-names') cmdClusterNames(flags);
    else fail(`usage: reltraj-adapter <convert|cluster-names> ...`);
  } catch (err) {
    fail(err instanceof Error ? `${err.name}: ${err.message}` : String(err));
  }
}

main();
