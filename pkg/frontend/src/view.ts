// DOM rendering for sessions and check reports.  Pure view code: everything
// shown is lifted verbatim from service payloads.

import { CheckReport, JobDoc, ProofTreeNode } from "./api.js";
import { SessionState } from "./session.js";

function el(tag: string, className?: string, text?: string): HTMLElement {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function judgementsOf(transcript: [string, string][]): Map<string, string> {
  const out = new Map<string, string>();
  for (const [atom, answer] of transcript) out.set(atom, answer);
  return out;
}

export function renderProofTree(
  root: ProofTreeNode,
  currentPath: number[] | null,
  transcript: [string, string][],
): HTMLElement {
  const judged = judgementsOf(transcript);

  const build = (node: ProofTreeNode, path: number[]): HTMLElement => {
    const isCurrent = currentPath !== null &&
      path.length === currentPath.length && path.every((v, i) => v === currentPath[i]);
    const answer = judged.get(node.atom);
    let cls = "node";
    if (isCurrent) cls += " current";
    if (answer === "yes") cls += " judged-correct";
    if (answer === "no") cls += " judged-incorrect";

    const label = el("span", cls, node.atom);
    label.setAttribute("data-path", path.join("."));
    const meta = el("span", "clause", " (" + node.clause + ")");
    if (node.children.length === 0) {
      const leaf = el("div", "leaf");
      leaf.appendChild(label);
      leaf.appendChild(meta);
      return leaf;
    }
    const details = el("details") as HTMLDetailsElement;
    details.open = true;
    const summary = el("summary");
    summary.appendChild(label);
    summary.appendChild(meta);
    details.appendChild(summary);
    const kids = el("div", "children");
    node.children.forEach((c, i) => kids.appendChild(build(c, [...path, i])));
    details.appendChild(kids);
    return details;
  };

  const box = el("div", "proof-tree");
  box.appendChild(build(root, []));
  return box;
}

export function renderTranscript(transcript: [string, string][]): HTMLElement {
  const box = el("div", "transcript");
  box.appendChild(el("h3", undefined, "Transcript"));
  const list = el("ol");
  for (const [atom, answer] of transcript) {
    list.appendChild(el("li", "entry " + answer, `${atom}? ${answer}`));
  }
  box.appendChild(list);
  return box;
}

export function renderSession(
  state: SessionState,
  onAnswer: (value: "yes" | "no") => void,
): HTMLElement {
  const box = el("div", "session");

  if (state.phase === "error") {
    box.appendChild(el("div", "banner error", state.message ?? "error"));
    return box;
  }

  if (state.proofTree) {
    box.appendChild(renderProofTree(
      state.proofTree, state.question ? state.question.path : null, state.transcript));
  }

  if (state.phase === "question" && state.question) {
    const ask = el("div", "question");
    ask.appendChild(el("p", "prompt", state.question.prompt));
    const yes = el("button", "yes", "Yes") as HTMLButtonElement;
    const no = el("button", "no", "No") as HTMLButtonElement;
    yes.addEventListener("click", () => onAnswer("yes"));
    no.addEventListener("click", () => onAnswer("no"));
    ask.appendChild(yes);
    ask.appendChild(no);
    box.appendChild(ask);
  }

  if (state.phase === "done" && state.result) {
    const r = state.result;
    let text: string;
    if (r.kind === "incorrect-clause-instance") {
      text = `Incorrect clause instance (${r.clause}): ${r.instance}`;
    } else if (r.kind === "uncovered-atom") {
      text = `Uncovered specified atom ${r.atom} in procedure ${r.procedure}`;
    } else {
      text = `${r.kind}: ${r.reason ?? ""}`;
    }
    const banner = el("div", "banner result " + r.kind, text);
    banner.id = "result-banner";
    box.appendChild(banner);
  }

  // spec-driven sessions show their transcript read-only, with no controls
  box.appendChild(renderTranscript(state.transcript));
  return box;
}

export function renderReport(job: JobDoc): HTMLElement {
  const box = el("div", "report");
  if (job.status !== "done" && job.status !== "error") {
    box.appendChild(el("div", "banner progress", `job ${job.id}: ${job.status}...`));
    return box;
  }
  if (job.status === "error" || !job.report) {
    box.appendChild(el("div", "banner error", job.error ?? "job failed"));
    return box;
  }
  const rep: CheckReport = job.report;
  const color = rep.verdict === "verified" ? "green"
    : rep.verdict === "refuted" ? "red" : "amber";
  const head = `${rep.check}: ${rep.verdict.toUpperCase()}` +
    (rep.bound !== null ? ` (bound ${rep.bound}, ${rep.instances_checked} instances)` : "");
  box.appendChild(el("div", `banner ${color}`, head));
  if (rep.reason) box.appendChild(el("p", "reason", rep.reason));
  if (rep.witness) {
    const w = el("div", "witness");
    w.appendChild(el("h3", undefined, `Witness (${rep.witness.kind})`));
    w.appendChild(el("p", undefined, rep.witness.rendering));
    const inst = rep.witness.data["instance"];
    if (typeof inst === "string") {
      w.appendChild(el("pre", "violating-instance", inst));
    }
    box.appendChild(w);
  }
  return box;
}
