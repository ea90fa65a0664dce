/**
 * Corpus reading and channels writing.
 *
 * Input: the corpus JSONL format (one object per line, `id` and `text`
 * required, other keys ignored). Output: one ChannelRecord per line.
 */

import { readFileSync, writeFileSync } from "node:fs";

import type { ChannelRecord, DocumentRecord } from "./extract.js";

export function readCorpus(path: string): DocumentRecord[] {
  const docs: DocumentRecord[] = [];
  const seen = new Set<string>();
  const lines = readFileSync(path, "utf-8").split("\n");
  lines.forEach((line, index) => {
    if (line.trim() === "") return;
    let record: unknown;
    try {
      record = JSON.parse(line);
    } catch {
      throw new Error(`bad JSON at line ${index + 1}`);
    }
    const { id, text } = record as Partial<DocumentRecord>;
    if (typeof id !== "string" || id === "") {
      throw new Error(`missing or empty id at line ${index + 1}`);
    }
    if (seen.has(id)) {
      throw new Error(`duplicate id ${id} at line ${index + 1}`);
    }
    if (typeof text !== "string" || text.trim() === "") {
      throw new Error(`missing or empty text at line ${index + 1}`);
    }
    seen.add(id);
    docs.push({ id, text });
  });
  if (docs.length === 0) {
    throw new Error("empty corpus");
  }
  return docs;
}

export function writeChannels(path: string, records: readonly ChannelRecord[]): void {
  const body = records.map((r) => JSON.stringify(r)).join("\n");
  writeFileSync(path, body + "\n", "utf-8");
}
