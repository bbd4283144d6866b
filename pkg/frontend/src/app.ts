/**
 * Participant flow: pick a task (or follow ?task=), work through the assigned
 * items one at a time, finish screen at the end. One submission is in flight
 * at a time; while waiting, the form is disabled. Server rejections re-enable
 * the form with the reason; network failures show a retry banner.
 */

import { ApiError, StudyApi, type ClozeTask, type Task, type TranslateTask } from "./api.js";
import { renderCloze } from "./cloze.js";
import { renderPicker, selectionPayload, type PickerState } from "./picker.js";

export interface AppOptions {
  api: StudyApi;
  root: HTMLElement;
  viewportWidth(): number;
  itemCount?: number;
}

interface TaskState {
  sessionId: string;
  taskKind: "translate" | "cloze";
  submitting: boolean;
}

function message(root: HTMLElement, className: string, text: string): HTMLElement {
  const el = root.ownerDocument.createElement("div");
  el.className = className;
  el.textContent = text;
  root.appendChild(el);
  return el;
}

export class App {
  private state: TaskState | null = null;
  private picker: PickerState = { inventory: [], selection: [] };

  constructor(private readonly options: AppOptions) {}

  async start(): Promise<void> {
    const doc = this.options.root.ownerDocument;
    const params = new URLSearchParams(doc.defaultView?.location.search ?? "");
    const task = params.get("task");
    if (task === "translate" || task === "cloze") {
      await this.begin(task);
    } else {
      this.renderLanding();
    }
  }

  private renderLanding(): void {
    const root = this.options.root;
    const doc = root.ownerDocument;
    root.textContent = "";
    message(root, "landing-title", "Emoji study");
    for (const kind of ["translate", "cloze"] as const) {
      const button = doc.createElement("button");
      button.type = "button";
      button.className = `start-${kind}`;
      button.textContent = kind === "translate" ? "Translate words to emoji" : "Guess hidden words";
      button.addEventListener("click", () => void this.begin(kind));
      root.appendChild(button);
    }
  }

  async begin(taskKind: "translate" | "cloze"): Promise<void> {
    const session = await this.options.api.createSession(taskKind, this.options.itemCount);
    this.state = { sessionId: session.session_id, taskKind, submitting: false };
    if (taskKind === "translate" && this.picker.inventory.length === 0) {
      this.picker = { inventory: await this.options.api.inventory(), selection: [] };
    }
    await this.showNext();
  }

  private async showNext(): Promise<void> {
    if (!this.state) return;
    let task: Task;
    try {
      task = await this.options.api.nextItem(this.state.sessionId);
    } catch (error) {
      this.renderRetry(() => void this.showNext(), error);
      return;
    }
    if ("complete" in task) {
      this.renderFinished();
      return;
    }
    if (task.task_kind === "translate") {
      this.renderTranslate(task);
    } else {
      this.renderClozeTask(task);
    }
  }

  private renderTranslate(task: TranslateTask): void {
    const root = this.options.root;
    const doc = root.ownerDocument;
    root.textContent = "";

    const header = doc.createElement("div");
    header.className = "translate-header";
    const progress = doc.createElement("div");
    progress.className = "progress";
    progress.textContent = `Word ${task.position + 1} of ${task.total}`;
    header.appendChild(progress);
    const passage = doc.createElement("p");
    passage.className = "translate-text";
    passage.textContent = task.text;
    header.appendChild(passage);
    const prompt = doc.createElement("p");
    prompt.className = "translate-prompt";
    prompt.textContent = `Translate "${task.target}" into emoji.`;
    header.appendChild(prompt);
    root.appendChild(header);

    const pickerHost = doc.createElement("div");
    root.appendChild(pickerHost);
    const status = message(root, "status", "");

    const submit = doc.createElement("button");
    submit.type = "button";
    submit.className = "translate-submit";
    submit.textContent = "Submit translation";

    const redraw = () => {
      renderPicker(
        pickerHost,
        this.picker,
        { onChange: (next) => { this.picker = next; redraw(); } },
        this.options.viewportWidth(),
      );
      submit.disabled = this.state?.submitting || this.picker.selection.length === 0;
    };
    submit.addEventListener("click", () => {
      void this.submitPayload(task.item_id, selectionPayload(this.picker), status, [submit], () => {
        this.picker = { ...this.picker, selection: [] };
      });
    });
    root.appendChild(submit);
    redraw();
  }

  private renderClozeTask(task: ClozeTask): void {
    const root = this.options.root;
    root.textContent = "";
    const host = root.ownerDocument.createElement("div");
    root.appendChild(host);
    const status = message(root, "status", "");
    renderCloze(host, task, {
      onSubmit: (guess) => {
        const controls = Array.from(host.querySelectorAll<HTMLButtonElement | HTMLInputElement>("button, input"));
        void this.submitPayload(task.item_id, guess, status, controls);
      },
    });
  }

  private async submitPayload(
    itemId: string,
    payload: string,
    status: HTMLElement,
    controls: (HTMLButtonElement | HTMLInputElement)[],
    onAccepted?: () => void,
  ): Promise<void> {
    if (!this.state || this.state.submitting) return;
    this.state.submitting = true;
    controls.forEach((c) => (c.disabled = true));
    status.textContent = "";
    try {
      const outcome = await this.options.api.submit(this.state.sessionId, itemId, payload);
      this.state.submitting = false;
      if (outcome.status === "accepted") {
        onAccepted?.();
        await this.showNext();
      } else {
        controls.forEach((c) => (c.disabled = false));
        status.textContent =
          outcome.reason === "InvalidEmoji"
            ? "Only emoji are allowed in a translation. Adjust your selection and try again."
            : `Submission rejected: ${outcome.reason ?? "unknown"}`;
        status.className = "status error";
      }
    } catch (error) {
      this.state.submitting = false;
      controls.forEach((c) => (c.disabled = false));
      this.renderRetryBanner(status, error);
    }
  }

  private renderRetryBanner(status: HTMLElement, error: unknown): void {
    status.className = "status banner";
    status.textContent =
      error instanceof ApiError
        ? `Server error (${error.status}). Please try again.`
        : "Network problem. Check your connection and try again.";
  }

  private renderRetry(retry: () => void, error: unknown): void {
    const root = this.options.root;
    root.textContent = "";
    const banner = message(root, "status banner", "");
    this.renderRetryBanner(banner, error);
    const button = root.ownerDocument.createElement("button");
    button.type = "button";
    button.className = "retry";
    button.textContent = "Retry";
    button.addEventListener("click", retry);
    root.appendChild(button);
  }

  private renderFinished(): void {
    const root = this.options.root;
    root.textContent = "";
    message(root, "finished", "All done. Thank you for participating!");
  }
}

export function boot(doc: Document = document): App {
  const root = doc.getElementById("app");
  if (!root) throw new Error("missing #app element");
  const app = new App({
    api: new StudyApi(""),
    root,
    viewportWidth: () => doc.defaultView?.innerWidth ?? 1280,
  });
  void app.start();
  return app;
}

declare global {
  interface Window {
    __emojinizeBooted?: boolean;
  }
}

if (typeof document !== "undefined" && !globalThis.window?.__emojinizeBooted) {
  if (globalThis.window) {
    globalThis.window.__emojinizeBooted = true;
    if (document.readyState === "loading") {
      document.addEventListener("DOMContentLoaded", () => boot());
    } else if (document.getElementById("app")) {
      boot();
    }
  }
}
