/**
 * Per-position channel extraction.
 *
 * For each document and model `m`, three channels over the first
 * MAX_POSITIONS tokens of the model's own tokenization:
 *
 *   m_logp_obs  log-probability of the observed token
 *   m_logp_max  log-probability of the most likely token
 *   m_entropy   entropy (nats) of the full next-token distribution
 *
 * The model conditions on BOS, so position 0 is a predicted position
 * and every emitted position is masked valid. Invariants guaranteed
 * here and checked by the consumer: logp_obs <= logp_max, and
 * 0 <= entropy <= ln(vocab size).
 */

import { BOS, type CausalLM } from "./lm.js";

export const MAX_POSITIONS = 128;

export interface DocumentRecord {
  id: string;
  text: string;
}

/** One JSONL line of the channels file consumed downstream. */
export interface ChannelRecord {
  doc_id: string;
  channels: string[];
  values: number[][];
  mask: boolean[];
}

function entropyNats(dist: Float64Array): number {
  let h = 0;
  for (const p of dist) {
    if (p > 0) h -= p * Math.log(p);
  }
  return Math.max(0, h);
}

export function extractDocument(
  lm: CausalLM,
  doc: DocumentRecord,
  maxPositions: number = MAX_POSITIONS,
): ChannelRecord {
  if (!Number.isInteger(maxPositions) || maxPositions < 1 || maxPositions > MAX_POSITIONS) {
    throw new Error(`maxPositions must be in [1, ${MAX_POSITIONS}], got ${maxPositions}`);
  }
  const ids = lm.tokenize(doc.text);
  if (ids.length === 0) {
    throw new Error(`document ${doc.id} produced no tokens`);
  }
  const positions = Math.min(ids.length, maxPositions);
  const context: number[] = [BOS];
  const values: number[][] = [];
  for (let i = 0; i < positions; i++) {
    const dist = lm.distribution(context);
    const observed = dist[ids[i]!]!;
    let max = 0;
    for (const p of dist) {
      if (p > max) max = p;
    }
    values.push([Math.log(observed), Math.log(max), entropyNats(dist)]);
    context.push(ids[i]!);
  }
  return {
    doc_id: doc.id,
    channels: [`${lm.name}_logp_obs`, `${lm.name}_logp_max`, `${lm.name}_entropy`],
    values,
    mask: Array(positions).fill(true),
  };
}

export function extractCorpus(
  lm: CausalLM,
  docs: readonly DocumentRecord[],
  maxPositions: number = MAX_POSITIONS,
): ChannelRecord[] {
  return docs.map((doc) => extractDocument(lm, doc, maxPositions));
}
