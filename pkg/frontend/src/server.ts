/**
 * Provider endpoints over plain node:http.
 *
 *   POST /embed      {"texts": ["...", ...]}            -> {"vectors": [[...], ...]}
 *   POST /summarize  {"text": "...", "max_sentences": N} -> {"summary": "..."}
 *
 * Bad method 405, unknown path 404, malformed body 400, payload over
 * the byte cap 413; every error body is {"error": "..."}.
 */

import * as http from "node:http";

import { encode } from "./encoder.js";

export const DEFAULT_MAX_BYTES = 1_000_000;

export interface ServerOptions {
  maxBytes?: number;
}

const SENTENCE_BREAK = /(?<=[.!?])\s+/;

export function summarize(text: string, maxSentences: number): string {
  const pieces = text
    .trim()
    .split(SENTENCE_BREAK)
    .map((s) => s.trim())
    .filter((s) => s.length > 0);
  return pieces.slice(0, maxSentences).join(" ");
}

function sendJson(res: http.ServerResponse, status: number, body: unknown): void {
  const payload = JSON.stringify(body);
  res.writeHead(status, {
    "content-type": "application/json",
    "content-length": Buffer.byteLength(payload),
  });
  res.end(payload);
}

function handleEmbed(payload: unknown, res: http.ServerResponse): void {
  const texts = (payload as { texts?: unknown }).texts;
  if (!Array.isArray(texts) || texts.some((t) => typeof t !== "string")) {
    sendJson(res, 400, { error: "'texts' must be an array of strings" });
    return;
  }
  sendJson(res, 200, { vectors: texts.map((t) => encode(t as string)) });
}

function handleSummarize(payload: unknown, res: http.ServerResponse): void {
  const body = payload as { text?: unknown; max_sentences?: unknown };
  if (typeof body.text !== "string" || body.text.trim() === "") {
    sendJson(res, 400, { error: "'text' must be a non-blank string" });
    return;
  }
  if (!Number.isInteger(body.max_sentences) || (body.max_sentences as number) < 1) {
    sendJson(res, 400, { error: "'max_sentences' must be a positive integer" });
    return;
  }
  sendJson(res, 200, { summary: summarize(body.text, body.max_sentences as number) });
}

export function createProviderServer(options: ServerOptions = {}): http.Server {
  const maxBytes = options.maxBytes ?? DEFAULT_MAX_BYTES;

  return http.createServer((req, res) => {
    if (req.method !== "POST") {
      sendJson(res, 405, { error: "POST only" });
      return;
    }
    if (req.url !== "/embed" && req.url !== "/summarize") {
      sendJson(res, 404, { error: `no such endpoint: ${req.url}` });
      return;
    }

    const chunks: Buffer[] = [];
    let received = 0;
    let refused = false;
    req.on("data", (chunk: Buffer) => {
      if (refused) return;
      received += chunk.length;
      if (received > maxBytes) {
        refused = true;
        chunks.length = 0;
        sendJson(res, 413, { error: `payload exceeds ${maxBytes} bytes` });
        // drain the rest instead of cutting the socket so the client
        // can always read the 413
        req.resume();
        return;
      }
      chunks.push(chunk);
    });
    req.on("end", () => {
      if (refused) return;
      let payload: unknown;
      try {
        payload = JSON.parse(Buffer.concat(chunks).toString("utf8"));
      } catch {
        sendJson(res, 400, { error: "body is not valid JSON" });
        return;
      }
      if (payload === null || typeof payload !== "object") {
        sendJson(res, 400, { error: "body must be a JSON object" });
        return;
      }
      if (req.url === "/embed") {
        handleEmbed(payload, res);
      } else {
        handleSummarize(payload, res);
      }
    });
  });
}

export function serveProviders(port: number, options: ServerOptions = {}): http.Server {
  const server = createProviderServer(options);
  server.listen(port, "127.0.0.1", () => {
    const addr = server.address();
    const bound = typeof addr === "object" && addr !== null ? addr.port : port;
    process.stderr.write(`providers listening on http://127.0.0.1:${bound}\n`);
  });
  return server;
}
