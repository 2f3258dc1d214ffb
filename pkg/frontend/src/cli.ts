#!/usr/bin/env node
/**
 * embed-export <command>
 *
 *   export --corpus corpus.jsonl --out vectors.tsv
 *          [--queries queries.jsonl] [--model NAME] [--batch-size N]
 *   serve  [--port N] [--max-bytes N]
 */

import { parseArgs } from "node:util";

import { MODEL_NAME } from "./encoder.js";
import { exportEmbeddings } from "./export.js";
import { serveProviders } from "./server.js";

const USAGE = `usage: embed-export export --corpus FILE --out FILE [--queries FILE]
                            [--model NAME] [--batch-size N]
       embed-export serve [--port N] [--max-bytes N]`;

function fail(message: string): never {
  process.stderr.write(`embed-export: ${message}\n`);
  process.exit(1);
}

function positiveInt(raw: string, flag: string): number {
  const value = Number(raw);
  if (!Number.isInteger(value) || value < 1) {
    fail(`${flag} must be a positive integer, got ${JSON.stringify(raw)}`);
  }
  return value;
}

function runExport(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      corpus: { type: "string" },
      queries: { type: "string" },
      out: { type: "string" },
      model: { type: "string", default: MODEL_NAME },
      "batch-size": { type: "string", default: "64" },
    },
  });
  if (!values.corpus || !values.out) {
    fail("export needs --corpus and --out");
  }
  const result = exportEmbeddings({
    corpusPath: values.corpus,
    queriesPath: values.queries ?? null,
    outPath: values.out,
    modelName: values.model as string,
    batchSize: positiveInt(values["batch-size"] as string, "--batch-size"),
  });
  process.stdout.write(
    `wrote ${result.rows} vectors (dim ${result.dim}) to ${values.out}\n`,
  );
}

function runServe(argv: string[]): void {
  const { values } = parseArgs({
    args: argv,
    options: {
      port: { type: "string", default: "8763" },
      "max-bytes": { type: "string", default: "1000000" },
    },
  });
  serveProviders(positiveInt(values.port as string, "--port"), {
    maxBytes: positiveInt(values["max-bytes"] as string, "--max-bytes"),
  });
}

function main(): void {
  const [command, ...rest] = process.argv.slice(2);
  try {
    if (command === "export") {
      runExport(rest);
    } else if (command === "serve") {
      runServe(rest);
    } else {
      process.stderr.write(USAGE + "\n");
      process.exit(1);
    }
  } catch (err) {
    fail((err as Error).message);
  }
}

main();
