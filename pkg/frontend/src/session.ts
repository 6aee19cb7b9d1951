// Session controller: a thin state machine over the service responses.
// Answering posts to the service and refreshes; a stale-answer conflict
// refreshes the state instead of failing (another tab may have answered).

import { ApiError, DiagnosisResult, ProofTreeNode, Question, SessionApi, SessionDoc } from "./api.js";

export interface SessionState {
  id: string;
  phase: "loading" | "question" | "done" | "error";
  question: Question | null;
  result: DiagnosisResult | null;
  transcript: [string, string][];
  proofTree: ProofTreeNode | null;
  oracle: string;
  kind: string;
  message: string | null;
}

export type Listener = (state: SessionState) => void;

export class SessionController {
  private state: SessionState;
  private listeners: Listener[] = [];

  constructor(private api: SessionApi, id: string) {
    this.state = {
      id,
      phase: "loading",
      question: null,
      result: null,
      transcript: [],
      proofTree: null,
      oracle: "",
      kind: "",
      message: null,
    };
  }

  current(): SessionState {
    return this.state;
  }

  onChange(fn: Listener): void {
    this.listeners.push(fn);
  }

  private set(patch: Partial<SessionState>): void {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
  }

  async refresh(): Promise<SessionState> {
    try {
      const doc = await this.api.getSession(this.state.id);
      this.absorb(doc);
    } catch (e) {
      this.fail(e);
    }
    return this.state;
  }

  private absorb(doc: SessionDoc): void {
    this.set({
      kind: doc.kind,
      oracle: doc.oracle,
      transcript: doc.transcript,
      proofTree: doc.proof_tree ?? this.state.proofTree,
      question: doc.pending,
      result: doc.result,
      phase: doc.state === "done" ? "done"
        : doc.state === "error" ? "error"
        : doc.state === "awaiting-answer" ? "question" : "loading",
      message: doc.error,
    });
  }

  async answer(value: "yes" | "no"): Promise<SessionState> {
    const q = this.state.question;
    if (!q) return this.state;
    try {
      const doc = await this.api.submitAnswer(this.state.id, value, q.index);
      this.absorb(doc);
    } catch (e) {
      if (e instanceof ApiError && e.status === 409) {
        // stale answer: someone advanced the session; re-sync, keep going
        return this.refresh();
      }
      this.fail(e);
    }
    return this.state;
  }

  private fail(e: unknown): void {
    const message = e instanceof Error ? e.message : String(e);
    // network problems and 404s are shown, they never wipe loaded content
    this.set({ phase: this.state.result ? "done" : "error", message });
  }
}
