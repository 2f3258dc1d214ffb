/**
 * Embedding export: JSONL corpus (and optional query file) in, one
 * whitespace-delimited vector table out.
 *
 * Output format, consumed by the Python pipeline's embedding loader:
 *
 *   dim 64
 *   p:<paragraph-id>\t<v1> <v2> ... <v64>
 *   qt:<query-id>\t...          (query title)
 *   ql:<query-id>\t...          (query lead, only when present)
 *
 * Rows are sorted by id and values printed to six decimals, so a
 * re-export of the same inputs is byte-identical. A sidecar manifest
 * pins the encoder name and dimension next to the table.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { DIM, MODEL_NAME, encodeBatch } from "./encoder.js";

export interface ExportJob {
  corpusPath: string;
  queriesPath: string | null;
  outPath: string;
  modelName: string;
  batchSize: number;
}

export interface ExportResult {
  rows: number;
  dim: number;
  manifestPath: string;
}

interface ParagraphRecord {
  id: string;
  text: string;
}

interface QueryRecord {
  id: string;
  title: string;
  lead?: string;
}

function readJsonl(filePath: string): unknown[] {
  let raw: string;
  try {
    raw = fs.readFileSync(filePath, "utf8");
  } catch (err) {
    throw new Error(`cannot read ${filePath}: ${(err as Error).message}`);
  }
  const records: unknown[] = [];
  const lines = raw.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    try {
      records.push(JSON.parse(line));
    } catch {
      throw new Error(`${filePath}:${i + 1}: not valid JSON`);
    }
  }
  return records;
}

function asNonBlankString(value: unknown, what: string): string {
  if (typeof value !== "string" || value.trim() === "") {
    throw new Error(`${what} must be a non-blank string`);
  }
  return value;
}

function checkId(id: string, what: string): string {
  if (/[\s/]/.test(id)) {
    throw new Error(`${what} id ${JSON.stringify(id)} contains whitespace or '/'`);
  }
  return id;
}

/** Gather (row id, text) pairs: p: per paragraph, qt:/ql: per query. */
export function collectRows(job: ExportJob): Array<[string, string]> {
  const rows: Array<[string, string]> = [];
  for (const rec of readJsonl(job.corpusPath)) {
    const para = rec as ParagraphRecord;
    const id = checkId(asNonBlankString(para.id, "paragraph id"), "paragraph");
    rows.push(["p:" + id, asNonBlankString(para.text, `paragraph ${id} text`)]);
  }
  if (job.queriesPath !== null) {
    for (const rec of readJsonl(job.queriesPath)) {
      const query = rec as QueryRecord;
      const id = checkId(asNonBlankString(query.id, "query id"), "query");
      rows.push(["qt:" + id, asNonBlankString(query.title, `query ${id} title`)]);
      if (typeof query.lead === "string" && query.lead.trim() !== "") {
        rows.push(["ql:" + id, query.lead]);
      }
    }
  }
  const seen = new Set<string>();
  for (const [id] of rows) {
    if (seen.has(id)) {
      throw new Error(`duplicate embedding id ${JSON.stringify(id)}`);
    }
    seen.add(id);
  }
  rows.sort((a, b) => (a[0] < b[0] ? -1 : a[0] > b[0] ? 1 : 0));
  return rows;
}

export function exportEmbeddings(job: ExportJob): ExportResult {
  if (job.modelName !== MODEL_NAME) {
    throw new Error(
      `unknown encoder ${JSON.stringify(job.modelName)}; this build provides ${JSON.stringify(MODEL_NAME)}`,
    );
  }
  const rows = collectRows(job);
  const vectors = encodeBatch(
    rows.map(([, text]) => text),
    job.batchSize,
  );

  const lines = [`dim ${DIM}`];
  for (let i = 0; i < rows.length; i++) {
    const values = vectors[i].map((v) => v.toFixed(6)).join(" ");
    lines.push(`${rows[i][0]}\t${values}`);
  }

  const tmpPath = `${job.outPath}.tmp-${process.pid}`;
  try {
    fs.mkdirSync(path.dirname(path.resolve(job.outPath)), { recursive: true });
    fs.writeFileSync(tmpPath, lines.join("\n") + "\n", "utf8");
    fs.renameSync(tmpPath, job.outPath);
  } catch (err) {
    fs.rmSync(tmpPath, { force: true });
    throw err;
  }

  const manifestPath = job.outPath + ".manifest.json";
  const manifest = {
    dim: DIM,
    model: MODEL_NAME,
    rows: rows.length,
  };
  fs.writeFileSync(manifestPath, JSON.stringify(manifest, null, 2) + "\n", "utf8");
  return { rows: rows.length, dim: DIM, manifestPath };
}
