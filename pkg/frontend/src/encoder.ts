/**
 * Deterministic sentence encoder.
 *
 * Hashed unigram + bigram counts with a sign bit, L2-normalized. No
 * model download, no randomness: the same text always maps to the same
 * unit vector, which is what the downstream pipeline needs from an
 * offline exporter. The model name is pinned because vector values are
 * a function of this exact scheme.
 */

export const MODEL_NAME = "hashed-ngram-64.v1";
export const DIM = 64;

const TOKEN_RE = /[\p{L}\p{N}]+/gu;

export function tokenize(text: string): string[] {
  return text.toLowerCase().match(TOKEN_RE) ?? [];
}

// FNV-1a over UTF-16 code units, two bytes each.
function fnv1a(s: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < s.length; i++) {
    const c = s.charCodeAt(i);
    h ^= c & 0xff;
    h = Math.imul(h, 0x01000193) >>> 0;
    h ^= c >>> 8;
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h >>> 0;
}

export function encode(text: string): number[] {
  const tokens = tokenize(text);
  const grams = [...tokens];
  for (let i = 0; i + 1 < tokens.length; i++) {
    grams.push(tokens[i] + " " + tokens[i + 1]);
  }
  const acc = new Float64Array(DIM);
  for (const gram of grams) {
    const h = fnv1a(gram);
    const sign = (h >>> 16) & 1 ? 1.0 : -1.0;
    acc[h % DIM] += sign;
  }
  let norm = Math.hypot(...acc);
  if (norm === 0) {
    // empty text, or signs cancelled exactly: fixed fallback direction
    acc[0] = 1.0;
    norm = 1.0;
  }
  return Array.from(acc, (v) => v / norm);
}

export function encodeBatch(texts: string[], batchSize = 64): number[][] {
  if (!Number.isInteger(batchSize) || batchSize < 1) {
    throw new Error(`batch size must be a positive integer, got ${batchSize}`);
  }
  const out: number[][] = [];
  for (let start = 0; start < texts.length; start += batchSize) {
    for (const text of texts.slice(start, start + batchSize)) {
      out.push(encode(text));
    }
  }
  return out;
}

export function cosine(u: number[], v: number[]): number {
  if (u.length !== v.length) {
    throw new Error(`dimension mismatch: ${u.length} vs ${v.length}`);
  }
  let dot = 0;
  let nu = 0;
  let nv = 0;
  for (let i = 0; i < u.length; i++) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu === 0 || nv === 0) {
    throw new Error("cosine undefined for a zero vector");
  }
  return dot / Math.sqrt(nu * nv);
}
