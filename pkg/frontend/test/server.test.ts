import { execFile } from "node:child_process";
import type { AddressInfo } from "node:net";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { DIM, encode } from "../src/encoder.js";
import { createProviderServer, summarize } from "../src/server.js";

import type * as http from "node:http";

let server: http.Server;
let base: string;

beforeAll(async () => {
  server = createProviderServer();
  await new Promise<void>((resolve) => server.listen(0, "127.0.0.1", resolve));
  base = `http://127.0.0.1:${(server.address() as AddressInfo).port}`;
});

afterAll(() => new Promise<void>((resolve) => void server.close(() => resolve())));

async function post(path: string, body: string): Promise<{ status: number; json: any }> {
  const resp = await fetch(base + path, {
    method: "POST",
    headers: { "content-type": "application/json" },
    body,
  });
  return { status: resp.status, json: await resp.json() };
}

describe("summarize", () => {
  it("keeps the first N sentences", () => {
    expect(summarize("One. Two! Three? Four.", 2)).toBe("One. Two!");
    expect(summarize("One. Two.", 5)).toBe("One. Two.");
    expect(summarize("no terminator at all", 1)).toBe("no terminator at all");
  });
});

describe("POST /embed", () => {
  it("returns one vector per text, matching the library encoder", async () => {
    const texts = ["kestrel moraine", "brine lagoon"];
    const { status, json } = await post("/embed", JSON.stringify({ texts }));
    expect(status).toBe(200);
    expect(json.vectors).toHaveLength(2);
    for (let i = 0; i < texts.length; i++) {
      expect(json.vectors[i]).toHaveLength(DIM);
      expect(json.vectors[i]).toEqual(encode(texts[i]));
    }
  });

  it("handles an empty text list", async () => {
    const { status, json } = await post("/embed", JSON.stringify({ texts: [] }));
    expect(status).toBe(200);
    expect(json.vectors).toEqual([]);
  });

  it("rejects a non-array payload", async () => {
    for (const body of [{ texts: "nope" }, { texts: [1, 2] }, {}]) {
      const { status, json } = await post("/embed", JSON.stringify(body));
      expect(status).toBe(400);
      expect(json.error).toMatch(/array of strings/);
    }
  });
});

describe("POST /summarize", () => {
  it("truncates to max_sentences", async () => {
    const { status, json } = await post(
      "/summarize",
      JSON.stringify({ text: "One. Two. Three.", max_sentences: 2 }),
    );
    expect(status).toBe(200);
    expect(json.summary).toBe("One. Two.");
  });

  it("rejects blank text and bad counts", async () => {
    const blank = await post("/summarize", JSON.stringify({ text: "  ", max_sentences: 1 }));
    expect(blank.status).toBe(400);
    expect(blank.json.error).toMatch(/non-blank string/);

    for (const bad of [0, -1, 1.5, "2", undefined]) {
      const { status, json } = await post(
        "/summarize",
        JSON.stringify({ text: "Fine.", max_sentences: bad }),
      );
      expect(status).toBe(400);
      expect(json.error).toMatch(/positive integer/);
    }
  });
});

describe("protocol errors", () => {
  it("404s unknown paths and 405s non-POST methods", async () => {
    const missing = await post("/nope", "{}");
    expect(missing.status).toBe(404);
    expect(missing.json.error).toMatch(/no such endpoint/);

    const got = await fetch(base + "/embed");
    expect(got.status).toBe(405);
    expect((await got.json()).error).toBe("POST only");
  });

  it("400s malformed JSON and non-object bodies", async () => {
    const broken = await post("/embed", "{not json");
    expect(broken.status).toBe(400);
    expect(broken.json.error).toMatch(/not valid JSON/);

    const scalar = await post("/embed", "42");
    expect(scalar.status).toBe(400);
    expect(scalar.json.error).toMatch(/JSON object/);
  });

  it("413s payloads over the byte cap", async () => {
    const small = createProviderServer({ maxBytes: 200 });
    await new Promise<void>((resolve) => small.listen(0, "127.0.0.1", resolve));
    const port = (small.address() as AddressInfo).port;
    try {
      const body = JSON.stringify({ texts: ["x".repeat(10_000)] });
      const resp = await fetch(`http://127.0.0.1:${port}/embed`, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body,
      });
      expect(resp.status).toBe(413);
      expect((await resp.json()).error).toMatch(/exceeds 200 bytes/);
      const ok = await fetch(`http://127.0.0.1:${port}/embed`, {
        method: "POST",
        body: JSON.stringify({ texts: ["small"] }),
      });
      expect(ok.status).toBe(200);
    } finally {
      await new Promise<void>((resolve) => void small.close(() => resolve()));
    }
  });
});

describe("Python pipeline clients", () => {
  // async subprocess: a blocking exec would starve the event loop the
  // in-process server runs on
  it("serves the remote embedder and summarizer end to end", async () => {
    const probe = [
      "import sys",
      "from articlegen.providers import RemoteEmbedder, RemoteSummarizer",
      "base = sys.argv[1]",
      "vectors = RemoteEmbedder(endpoint=base + '/embed').embed(['kestrel moraine', 'brine lagoon'])",
      "assert len(vectors) == 2 and all(len(v) == 64 for v in vectors), vectors",
      "summary = RemoteSummarizer(endpoint=base + '/summarize').summarize('One. Two. Three.', 2)",
      "assert summary == 'One. Two.', summary",
      "print('ok')",
    ].join("\n");
    const { stdout } = await promisify(execFile)("python3", ["-c", probe, base]);
    expect(stdout.trim()).toBe("ok");
  }, 30_000);
});
