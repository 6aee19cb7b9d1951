// Typed client for the session service. The UI computes nothing itself: every
// judgment, transcript entry and result shown comes from these responses.

export interface StructuredTerm {
  var?: string;
  functor?: string;
  args?: StructuredTerm[];
}

export interface Question {
  atom: string;
  structured: { pred: string; args: StructuredTerm[] };
  path: number[];
  index: number;
  prompt: string;
}

export interface DiagnosisResult {
  kind: string; // incorrect-clause-instance | uncovered-atom | no-error | inconclusive
  clause: string | null;
  instance: string | null;
  atom: string | null;
  procedure: string | null;
  reason: string | null;
  transcript: [string, string][];
  mode: string;
}

export interface ProofTreeNode {
  atom: string;
  clause: string;
  children: ProofTreeNode[];
}

export interface SessionDoc {
  id: string;
  kind: string;
  oracle: string;
  state: string; // awaiting-answer | running | done | error
  pending: Question | null;
  transcript: [string, string][];
  result: DiagnosisResult | null;
  proof_tree?: ProofTreeNode;
  error: string | null;
}

export interface QuestionView {
  done: boolean;
  question: Question | null;
  result: DiagnosisResult | null;
  state: string;
}

export interface Witness {
  kind: string;
  rendering: string;
  data: Record<string, unknown>;
}

export interface CheckReport {
  check: string;
  verdict: string; // verified | refuted | inconclusive
  bound: number | null;
  instances_checked: number;
  witness: Witness | null;
  reason: string | null;
  details: Record<string, unknown>;
}

export interface JobDoc {
  id: string;
  kind: string;
  params: Record<string, unknown>;
  status: string; // queued | running | done | error
  report: CheckReport | null;
  error: string | null;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

async function asJson<T>(res: Response): Promise<T> {
  if (!res.ok) {
    let detail = res.statusText;
    try {
      const body = await res.json();
      if (body && body.detail) detail = String(body.detail);
    } catch {
      /* keep the status text */
    }
    throw new ApiError(res.status, detail);
  }
  return (await res.json()) as T;
}

export class SessionApi {
  constructor(
    private baseUrl: string = "",
    private fetchFn: typeof fetch = fetch,
  ) {}

  getSession(id: string): Promise<SessionDoc> {
    return this.request(`/sessions/${id}`);
  }

  getQuestion(id: string): Promise<QuestionView> {
    return this.request(`/sessions/${id}/question`);
  }

  submitAnswer(id: string, answer: "yes" | "no", questionIndex: number): Promise<SessionDoc> {
    return this.request(`/sessions/${id}/answer`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ answer, question_index: questionIndex }),
    });
  }

  getJob(id: string): Promise<JobDoc> {
    return this.request(`/checks/${id}`);
  }

  listWorkspace(): Promise<Record<string, string[]>> {
    return this.request(`/workspace`);
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(`${this.baseUrl}${path}`, init);
    return asJson<T>(res);
  }
}
