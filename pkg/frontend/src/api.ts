/** Typed client for the study-service HTTP endpoints. */

export interface EmojiEntry {
  emoji: string;
  name: string;
}

export interface SessionInfo {
  session_id: string;
  task_kind: "translate" | "cloze";
  condition: string;
  total: number;
}

export interface TranslateTask {
  item_id: string;
  task_kind: "translate";
  position: number;
  total: number;
  text: string;
  target: string;
}

export interface ClozeTask {
  item_id: string;
  task_kind: "cloze";
  position: number;
  total: number;
  text: string;
  condition: string;
  blanks: number;
}

export type Task = TranslateTask | ClozeTask | { complete: true };

export interface SubmitOutcome {
  status: "accepted" | "rejected";
  reason?: string;
  detail?: string;
  position?: number;
  total?: number;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

async function toJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    const body = await response.text();
    throw new ApiError(response.status, body.slice(0, 200));
  }
  return (await response.json()) as T;
}

export class StudyApi {
  constructor(private readonly baseUrl: string = "") {}

  inventory(): Promise<EmojiEntry[]> {
    return fetch(`${this.baseUrl}/emoji`).then((r) => toJson<EmojiEntry[]>(r));
  }

  createSession(taskKind: "translate" | "cloze", count?: number): Promise<SessionInfo> {
    return fetch(`${this.baseUrl}/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ task_kind: taskKind, count: count ?? null }),
    }).then((r) => toJson<SessionInfo>(r));
  }

  nextItem(sessionId: string): Promise<Task> {
    return fetch(`${this.baseUrl}/sessions/${sessionId}/next`).then((r) => toJson<Task>(r));
  }

  submit(sessionId: string, itemId: string, payload: string): Promise<SubmitOutcome> {
    return fetch(`${this.baseUrl}/sessions/${sessionId}/submit`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ item_id: itemId, payload }),
    }).then((r) => toJson<SubmitOutcome>(r));
  }
}
