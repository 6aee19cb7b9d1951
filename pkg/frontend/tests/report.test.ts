import { describe, expect, it } from "vitest";

import type { JobDoc } from "../src/api.js";
import { renderReport } from "../src/view.js";

const base = {
  id: "j1",
  kind: "correctness",
  params: {},
  error: null,
};

describe("check report view", () => {
  it("shows a progress state for a pending job", () => {
    const el = renderReport({ ...base, status: "running", report: null } as JobDoc);
    expect(el.querySelector(".banner.progress")!.textContent).toContain("running");
  });

  it("shows a green banner with instance counts for a verified report", () => {
    const el = renderReport({
      ...base,
      status: "done",
      report: {
        check: "check_correctness", verdict: "verified", bound: 6,
        instances_checked: 15144, witness: null, reason: null, details: {},
      },
    } as JobDoc);
    const banner = el.querySelector(".banner.green")!;
    expect(banner.textContent).toContain("VERIFIED");
    expect(banner.textContent).toContain("15144 instances");
  });

  it("highlights the violating clause instance of a refuted report", () => {
    const el = renderReport({
      ...base,
      status: "done",
      report: {
        check: "check_correctness", verdict: "refuted", bound: 4,
        instances_checked: 4, reason: null, details: {},
        witness: {
          kind: "clause-instance",
          rendering: "instance of c2 has its body in the specification but not its head: app([],'$c1','$c1').",
          data: { clause: "c2", instance: "app([],'$c1','$c1')." },
        },
      },
    } as JobDoc);
    expect(el.querySelector(".banner.red")!.textContent).toContain("REFUTED");
    expect(el.querySelector(".violating-instance")!.textContent).toBe("app([],'$c1','$c1').");
  });

  it("shows an amber banner with the budget reason when inconclusive", () => {
    const el = renderReport({
      ...base,
      status: "done",
      report: {
        check: "check_correctness", verdict: "inconclusive", bound: 7,
        instances_checked: 120, witness: null,
        reason: "instance budget exceeded (1000000)", details: {},
      },
    } as JobDoc);
    expect(el.querySelector(".banner.amber")!.textContent).toContain("INCONCLUSIVE");
    expect(el.querySelector(".reason")!.textContent).toContain("budget exceeded");
  });
});
