/**
 * Self-contained causal language models.
 *
 * The extractor needs per-position next-token distributions from an
 * autoregressive model. The CausalLM interface is the minimal contract;
 * NgramLM is the bundled implementation: an order-N model with
 * Jelinek-Mercer interpolation down to an add-one unigram, so every
 * vocabulary item has strictly positive probability in every context
 * and all log-probabilities stay finite.
 */

/** Beginning-of-sequence sentinel; a context id, never a prediction. */
export const BOS = -1;

export interface CausalLM {
  /** Prefix for emitted channel names (`${name}_logp_obs`, ...). */
  readonly name: string;
  /** Prediction targets; distributions range over exactly this list. */
  readonly vocab: readonly string[];
  /** Map text to vocab ids; out-of-vocabulary tokens map to `<unk>`. */
  tokenize(text: string): number[];
  /**
   * P(next token | context) over the full vocabulary. `context` is the
   * complete preceding id sequence (BOS included); implementations use
   * as much of its tail as they condition on. Sums to 1 and every
   * component is > 0 for NgramLM.
   */
  distribution(context: readonly number[]): Float64Array;
}

const UNK = "<unk>";
const TOKEN_RE = /[\p{L}\p{N}']+/gu;

interface ContextCounts {
  total: number;
  byToken: Map<number, number>;
}

export interface NgramLMOptions {
  /** Model order: condition on up to order-1 preceding tokens. */
  order?: number;
  /** Weight of the maximum-likelihood estimate at each backoff level. */
  lambda?: number;
  name?: string;
}

/** Serialized model; `vocab` and `order` are the public parts. */
export interface NgramLMJson {
  format: 1;
  name: string;
  order: number;
  lambda: number;
  vocab: string[];
  counts: Record<string, Record<string, Record<string, number>>>;
}

export function wordTokens(text: string): string[] {
  return text.toLowerCase().match(TOKEN_RE) ?? [];
}

export class NgramLM implements CausalLM {
  readonly name: string;
  readonly vocab: readonly string[];
  readonly order: number;
  readonly lambda: number;
  private readonly ids: Map<string, number>;
  /** counts[len] maps a len-token context key to its successor counts. */
  private readonly counts: Array<Map<string, ContextCounts>>;

  private constructor(
    name: string,
    vocab: string[],
    order: number,
    lambda: number,
    counts: Array<Map<string, ContextCounts>>,
  ) {
    this.name = name;
    this.vocab = vocab;
    this.order = order;
    this.lambda = lambda;
    this.counts = counts;
    this.ids = new Map(vocab.map((t, i) => [t, i]));
  }

  static train(texts: readonly string[], options: NgramLMOptions = {}): NgramLM {
    const order = options.order ?? 2;
    const lambda = options.lambda ?? 0.75;
    const name = options.name ?? "ngram";
    if (!Number.isInteger(order) || order < 1) {
      throw new Error(`order must be a positive integer, got ${order}`);
    }
    if (!(lambda > 0 && lambda < 1)) {
      throw new Error(`lambda must be in (0, 1), got ${lambda}`);
    }

    const types = new Set<string>();
    for (const text of texts) {
      for (const token of wordTokens(text)) types.add(token);
    }
    const vocab = [UNK, ...[...types].sort()];
    const ids = new Map(vocab.map((t, i) => [t, i]));

    const counts: Array<Map<string, ContextCounts>> = Array.from(
      { length: order },
      () => new Map(),
    );
    for (const text of texts) {
      const seq = [BOS, ...wordTokens(text).map((t) => ids.get(t) ?? 0)];
      for (let t = 1; t < seq.length; t++) {
        const target = seq[t]!;
        for (let len = 0; len < order && len < t; len++) {
          const key = seq.slice(t - len, t).join(",");
          const level = counts[len]!;
          let entry = level.get(key);
          if (entry === undefined) {
            entry = { total: 0, byToken: new Map() };
            level.set(key, entry);
          }
          entry.total += 1;
          entry.byToken.set(target, (entry.byToken.get(target) ?? 0) + 1);
        }
      }
    }
    return new NgramLM(name, vocab, order, lambda, counts);
  }

  tokenize(text: string): number[] {
    return wordTokens(text).map((t) => this.ids.get(t) ?? 0);
  }

  distribution(context: readonly number[]): Float64Array {
    const v = this.vocab.length;
    const unigram = this.counts[0]!.get("") ?? { total: 0, byToken: new Map() };
    let dist = new Float64Array(v);
    const denom = unigram.total + v;
    dist.fill(1 / denom);
    for (const [token, count] of unigram.byToken) {
      dist[token] = (count + 1) / denom;
    }
    for (let len = 1; len < this.order && len <= context.length; len++) {
      const key = context.slice(context.length - len).join(",");
      const entry = this.counts[len]!.get(key);
      if (entry === undefined || entry.total === 0) continue;
      const blended = new Float64Array(v);
      const keep = 1 - this.lambda;
      for (let i = 0; i < v; i++) blended[i] = keep * dist[i]!;
      for (const [token, count] of entry.byToken) {
        blended[token]! += (this.lambda * count) / entry.total;
      }
      dist = blended;
    }
    return dist;
  }

  toJSON(): NgramLMJson {
    const counts: NgramLMJson["counts"] = {};
    this.counts.forEach((level, len) => {
      const out: Record<string, Record<string, number>> = {};
      for (const [key, entry] of level) {
        const byToken: Record<string, number> = {};
        for (const [token, count] of entry.byToken) byToken[token] = count;
        out[key] = byToken;
      }
      counts[String(len)] = out;
    });
    return {
      format: 1,
      name: this.name,
      order: this.order,
      lambda: this.lambda,
      vocab: [...this.vocab],
      counts,
    };
  }

  static fromJSON(json: NgramLMJson): NgramLM {
    if (json.format !== 1) {
      throw new Error(`unsupported model format ${json.format}`);
    }
    const counts: Array<Map<string, ContextCounts>> = Array.from(
      { length: json.order },
      () => new Map(),
    );
    for (const [len, level] of Object.entries(json.counts)) {
      const target = counts[Number(len)];
      if (target === undefined) {
        throw new Error(`context length ${len} exceeds order ${json.order}`);
      }
      for (const [key, byToken] of Object.entries(level)) {
        const entry: ContextCounts = { total: 0, byToken: new Map() };
        for (const [token, count] of Object.entries(byToken)) {
          entry.byToken.set(Number(token), count);
          entry.total += count;
        }
        target.set(key, entry);
      }
    }
    return new NgramLM(json.name, [...json.vocab], json.order, json.lambda, counts);
  }
}
