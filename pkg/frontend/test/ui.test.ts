// @vitest-environment jsdom
//
// Drives a full curation session through the UI against a live backend and
// checks the exported article set against the terminal path given the same
// decision script.

import { afterAll, beforeAll, expect, test } from "vitest";
import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

// vitest's jsdom environment rewrites import.meta.url to an http scheme,
// so locate fixtures from the package root instead
const HERE = join(process.cwd(), "test");
const GRAPH = join(HERE, "fixtures", "graph.json");
const START = "Food and drink";
const SCRIPT = ["y", "s", "n", "y", "y", "n", "y", "s", "s", "y"];

let backend: ChildProcess;
let base: string;
let workdir: string;

function curateArgs(extra: string[]): string[] {
  return ["-m", "panner.cli", "curate", "--graph", GRAPH, "--start", START,
          "--class-name", "FOOD", ...extra];
}

async function waitForBackend(proc: ChildProcess): Promise<string> {
  let output = "";
  return new Promise((resolve, reject) => {
    const timer = setTimeout(
      () => reject(new Error(`backend did not start:\n${output}`)), 15000);
    proc.stdout!.on("data", (chunk: Buffer) => {
      output += chunk.toString();
      const match = output.match(/serving curation session on port (\d+)/);
      if (match) {
        clearTimeout(timer);
        resolve(`http://127.0.0.1:${match[1]}`);
      }
    });
    proc.on("exit", (code) =>
      reject(new Error(`backend exited early (${code}):\n${output}`)));
  });
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "curator-ui-"));
  backend = spawn("python3", curateArgs(["--serve", "--port", "0"]),
                  { stdio: ["ignore", "pipe", "pipe"] });
  base = await waitForBackend(backend);
});

afterAll(() => {
  backend?.kill("SIGKILL");
  rmSync(workdir, { recursive: true, force: true });
});

function loadPage(): Document {
  const html = readFileSync(join(HERE, "..", "public", "index.html"), "utf-8");
  const body = html.replace(/^[\s\S]*<body>/, "").replace(/<\/body>[\s\S]*$/, "")
    .replace(/<script[\s\S]*?<\/script>/g, "");
  document.body.innerHTML = body;
  return document;
}

function text(id: string): string {
  return document.getElementById(id)!.textContent ?? "";
}

test("10 UI decisions match the terminal path exactly", async () => {
  window.__curatorTest = true;
  const { createApp } = await import("../dist/app.js");
  const doc = loadPage();
  const app = createApp(doc, base);
  await app.start();
  await app.settled();

  const visited: string[] = [];
  for (const key of SCRIPT) {
    const category = text("category");
    visited.push(category);
    doc.dispatchEvent(new window.KeyboardEvent("keydown", { key }));
    await app.settled();
    // the prompt advanced (or the session finished)
    expect(text("category") === category && key !== undefined
           && !document.getElementById("prompt")!.classList.contains("hidden"))
      .toBe(false);
  }

  // after 10 decisions the queue is spent: export enabled, actions gone
  expect(document.getElementById("done-panel")!.classList.contains("hidden"))
    .toBe(false);
  expect(text("decision-count")).toBe("10");
  expect(visited[0]).toBe(START);

  (document.getElementById("export") as HTMLButtonElement).click();
  await app.settled();
  const uiExport = text("export-output").trim().split("\n");

  // same script through the terminal session
  const outPath = join(workdir, "kept_tty.txt");
  const tty = spawnSync("python3",
                        curateArgs(["--tty", "--out", outPath]),
                        { input: SCRIPT.join("\n") + "\n" });
  expect(tty.status).toBe(0);
  const ttyExport = readFileSync(outPath, "utf-8").trim().split("\n");

  expect(uiExport).toEqual(ttyExport);
  expect(uiExport.length).toBeGreaterThan(0);
}, 30000);

test("stale decision shows a banner and recovers", async () => {
  // the session is already done here; a direct POST for a stale category
  // must 409 and the UI must surface errors without corrupting state
  const resp = await fetch(`${base}/session/decision`, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify({ category: "Cheeses", decision: "keep_all" }),
  });
  expect(resp.status).toBe(409);
  const state = await (await fetch(`${base}/session`)).json();
  expect(state.decision_count).toBe(10);
  expect(state.done).toBe(true);
});
