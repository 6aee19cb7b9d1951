// End-to-end walkthrough against the real service: spawn it on a scratch
// workspace, create the buggy-isort session over HTTP, then drive the UI
// (DOM clicks only) through the five-answer sequence.

import { spawn, spawnSync, ChildProcess } from "node:child_process";
import { cpSync, mkdtempSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";

import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { SessionApi } from "../src/api.js";
import { SessionController } from "../src/session.js";
import { renderSession } from "../src/view.js";

const WALKTHROUGH_ANSWERS: ("yes" | "no")[] = ["no", "yes", "no", "yes", "yes"];
const LOCATED_INSTANCE = "insert(1,[3],[3,1]) :- 3>1, insert(1,[],[1]).";
const PORT = 18731;
const BASE = `http://127.0.0.1:${PORT}`;

const pythonAvailable =
  spawnSync("python3", ["-c", "import declog"], { encoding: "utf8" }).status === 0;

describe.skipIf(!pythonAvailable)("live service walkthrough", () => {
  let proc: ChildProcess;

  beforeAll(async () => {
    const ws = mkdtempSync(join(tmpdir(), "declog-ws-"));
    cpSync(resolve(__dirname, "../../workspace"), ws, { recursive: true });
    proc = spawn("python3", ["-m", "declog.cli", "--workspace", ws, "serve",
                             "--port", String(PORT)], { stdio: "ignore" });
    for (let i = 0; i < 100; i++) {
      try {
        const res = await fetch(`${BASE}/workspace`);
        if (res.ok) return;
      } catch {
        /* not up yet */
      }
      await new Promise((r) => setTimeout(r, 200));
    }
    throw new Error("service did not come up");
  });

  afterAll(() => {
    proc?.kill();
  });

  it("runs the five-answer isort session through the UI", async () => {
    const created = await fetch(`${BASE}/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        kind: "incorrectness",
        program: "isort_buggy.pl",
        query: "isort([2,1,3],Ys)",
        oracle: "interactive",
        corr_spec: "s_isort_corr",
      }),
    });
    expect(created.status).toBe(201);
    const { id } = await created.json();

    const host = document.createElement("div");
    document.body.replaceChildren(host);
    const api = new SessionApi(BASE);
    const controller = new SessionController(api, id);
    const draw = () =>
      host.replaceChildren(renderSession(controller.current(), (v) => void controller.answer(v)));
    controller.onChange(draw);
    await controller.refresh();

    const asked: string[] = [];
    for (const answer of WALKTHROUGH_ANSWERS) {
      const prompt = host.querySelector(".question .prompt");
      expect(prompt, "expected a pending question").not.toBeNull();
      asked.push(prompt!.textContent ?? "");
      const button = host.querySelector(
        answer === "yes" ? "button.yes" : "button.no") as HTMLButtonElement;
      button.click();
      // wait for the POST round-trip to re-render
      for (let i = 0; i < 100 && controller.current().transcript.length <= asked.length - 1; i++) {
        await new Promise((r) => setTimeout(r, 50));
      }
    }

    expect(asked[0]).toBe("Is isort([1,3],[3,1]) correct?");
    expect(controller.current().phase).toBe("done");
    const banner = host.querySelector("#result-banner");
    expect(banner).not.toBeNull();
    expect(banner!.textContent).toContain(LOCATED_INSTANCE);

    // the displayed transcript equals the service-persisted one
    const persisted = await (await fetch(`${BASE}/sessions/${id}`)).json();
    expect(controller.current().transcript).toEqual(persisted.transcript);
  });
});
