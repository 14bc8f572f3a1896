import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { AnnotationSession } from "../src/session.js";

const SERVER_SCRIPT = `
import sys
import uvicorn
from ncrel.extraction import CompoundCandidate, Pattern
from ncrel.service import AnnotationService, AnnotationStore, create_app

candidates = [
    CompoundCandidate(
        f"cap{i:02d}", f"cap{i:02d}", f"mod{i:02d}", f"mod{i:02d}",
        Pattern.NPN, f"s{i:02d}", 1, "de",
    )
    for i in range(40)
]
store = AnnotationStore(sys.argv[1])
service = AnnotationService(candidates, store)
uvicorn.run(create_app(service), host="127.0.0.1", port=int(sys.argv[2]), log_level="error")
`;

const backendAvailable =
  spawnSync("python3", ["-c", "import ncrel, uvicorn"]).status === 0;

describe.skipIf(!backendAvailable)("against the real service", () => {
  const port = 18000 + (process.pid % 1000);
  const base = `http://127.0.0.1:${port}`;
  let proc: ChildProcess;
  let storePath: string;

  beforeAll(async () => {
    storePath = join(mkdtempSync(join(tmpdir(), "annot-")), "annotations.tsv");
    proc = spawn("python3", ["-c", SERVER_SCRIPT, storePath, String(port)], {
      stdio: "ignore",
    });
    const deadline = Date.now() + 20_000;
    for (;;) {
      try {
        const probe = await fetch(`${base}/api/progress`);
        if (probe.ok) {
          return;
        }
      } catch {
        // not listening yet
      }
      if (Date.now() > deadline) {
        throw new Error("annotation service did not come up");
      }
      await new Promise((resolve) => setTimeout(resolve, 200));
    }
  }, 30_000);

  afterAll(() => {
    proc?.kill();
  });

  function storedRecords(): Array<{ compound: string; annotator: string; category: number }> {
    return readFileSync(storePath, "utf-8")
      .split("\n")
      .filter((line) => line.trim())
      .map((line) => {
        const [compound, annotator, category] = line.split("\t");
        return { compound: compound!, annotator: annotator!, category: Number(category) };
      });
  }

  it("runs onboarding, twenty labels, and 409 recovery end to end", async () => {
    const api = new ApiClient((url, init) => fetch(url, init), base);
    const session = new AnnotationSession(api);

    await session.start("ana");
    expect(session.snapshot.phase).toBe("onboarding");
    expect(session.snapshot.categories).toHaveLength(17);
    expect(session.snapshot.categories[0]?.name).toBe("None of the categories");

    await session.begin();
    const clicked: Array<{ compound: string; category: number }> = [];
    for (let i = 0; i < 20; i++) {
      const assignment = session.snapshot.assignment;
      expect(assignment).not.toBeNull();
      const category = (i % 17) + 1;
      clicked.push({ compound: assignment!.compound_id, category });
      session.select(category);
      await session.submit();
    }
    expect(session.snapshot.submitted).toBe(20);

    const afterTwenty = storedRecords();
    expect(
      afterTwenty.map((r) => ({ compound: r.compound, category: r.category })),
    ).toEqual(clicked);
    expect((await api.progress()).per_annotator["ana"]).toBe(20);

    // saturate the currently displayed compound behind the session's back
    const held = session.snapshot.assignment!.compound_id;
    await api.submit("rival1", held, 2);
    await api.submit("rival2", held, 3);

    session.select(9);
    await session.submit();
    const state = session.snapshot;
    expect(state.notice).toMatch(/fresh/);
    expect(state.submitted).toBe(20);
    expect(state.assignment).not.toBeNull();
    expect(state.assignment!.compound_id).not.toBe(held);

    const heldRecords = storedRecords().filter((r) => r.compound === held);
    expect(heldRecords).toHaveLength(2);
    expect(heldRecords.map((r) => r.annotator).sort()).toEqual(["rival1", "rival2"]);

    session.select(4);
    await session.submit();
    expect(session.snapshot.submitted).toBe(21);
    expect(storedRecords()).toHaveLength(23);
  }, 60_000);
});
