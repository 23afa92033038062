/**
 * Character-name clustering: group name variants of one character, e.g.
 * "Tom" with "Tom Sawyer".
 *
 * A name joins a longer name's cluster when its tokens form a
 * subsequence of the longer name's tokens. A name whose tokens fit more
 * than one otherwise-unrelated cluster (e.g. "Potter" against both
 * "Harry Potter" and "James Potter") is ambiguous and stays a
 * singleton. Clustering is deterministic and order-independent.
 */

export interface NameCluster {
  /** Longest member, ties broken alphabetically. */
  canonical: string;
  /** All member names, sorted. */
  names: string[];
}

function tokensOf(name: string): string[] {
  return name.toLowerCase().split(/\s+/).filter((t) => t.length > 0);
}

/** True when `short`'s tokens appear, in order, among `long`'s tokens. */
export function isTokenSubsequence(short: string[], long: string[]): boolean {
  if (short.length === 0 || short.length >= long.length) return false;
  let i = 0;
  for (const token of long) {
    if (i < short.length && token === short[i]) i++;
  }
  return i === short.length;
}

export function clusterCharacterNames(names: string[]): NameCluster[] {
  // dedupe case-insensitively, keeping the first-seen surface form
  const surface = new Map<string, string>();
  for (const raw of names) {
    const name = raw.trim();
    if (!name) continue;
    const key = tokensOf(name).join(' ');
    if (key && !surface.has(key)) surface.set(key, name);
  }
  const keys = [...surface.keys()].sort();
  const tokenized = new Map(keys.map((k) => [k, k.split(' ')]));

  // maximal names (not a subsequence of any other) seed the clusters
  const maximal = keys.filter((k) =>
    !keys.some((other) => other !== k
      && isTokenSubsequence(tokenized.get(k)!, tokenized.get(other)!)));

  const members = new Map<string, string[]>(maximal.map((k) => [k, [k]]));
  const singletons: string[] = [];
  for (const k of keys) {
    if (members.has(k)) continue;
    const hosts = maximal.filter((m) =>
      isTokenSubsequence(tokenized.get(k)!, tokenized.get(m)!));
    if (hosts.length === 1) {
      members.get(hosts[0])!.push(k);
    } else {
      // ambiguous (or orphaned) shorter name: keep it on its own
      singletons.push(k);
    }
  }

  const clusters: NameCluster[] = [];
  for (const [anchor, keyList] of members) {
    const nameList = keyList.map((k) => surface.get(k)!).sort();
    clusters.push({ canonical: surface.get(anchor)!, names: nameList });
  }
  for (const k of singletons) {
    clusters.push({ canonical: surface.get(k)!, names: [surface.get(k)!] });
  }
  clusters.sort((a, b) => a.canonical.localeCompare(b.canonical));
  return clusters;
}
