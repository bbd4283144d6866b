import { beforeEach, describe, expect, it } from "vitest";

import { App } from "../src/app.js";
import type { StudyApi, SubmitOutcome, Task } from "../src/api.js";

class FakeApi {
  tasks: Task[];
  outcomes: SubmitOutcome[];
  submitted: { itemId: string; payload: string }[] = [];
  failNextSubmit = false;

  constructor(tasks: Task[], outcomes: SubmitOutcome[]) {
    this.tasks = tasks;
    this.outcomes = outcomes;
  }

  async inventory() {
    return [
      { emoji: "🐈", name: "cat" },
      { emoji: "🏠", name: "house" },
    ];
  }

  async createSession(taskKind: "translate" | "cloze") {
    return { session_id: "s1", task_kind: taskKind, condition: "emojinize", total: this.tasks.length };
  }

  async nextItem(): Promise<Task> {
    return this.tasks.length ? this.tasks[0] : { complete: true };
  }

  async submit(_sid: string, itemId: string, payload: string): Promise<SubmitOutcome> {
    if (this.failNextSubmit) {
      this.failNextSubmit = false;
      throw new TypeError("network down");
    }
    this.submitted.push({ itemId, payload });
    const outcome = this.outcomes.shift() ?? { status: "accepted" as const };
    if (outcome.status === "accepted") this.tasks.shift();
    return outcome;
  }
}

function clozeTask(id: string, position: number, total: number): Task {
  return {
    item_id: id,
    task_kind: "cloze",
    position,
    total,
    text: `The ____ (hint: 🐈) sat on mat ${id}.`,
    condition: "emojinize",
    blanks: 1,
  };
}

function makeApp(api: FakeApi): { app: App; root: HTMLElement } {
  const root = document.createElement("main");
  document.body.appendChild(root);
  const app = new App({
    api: api as unknown as StudyApi,
    root,
    viewportWidth: () => 960,
    itemCount: 2,
  });
  return { app, root };
}

async function settle() {
  for (let i = 0; i < 10; i++) await Promise.resolve();
}

function submitGuess(root: HTMLElement, guess: string) {
  const input = root.querySelector<HTMLInputElement>(".cloze-input")!;
  input.value = guess;
  root.querySelector("form")!.dispatchEvent(new window.Event("submit", { bubbles: true, cancelable: true }));
}

beforeEach(() => {
  document.body.innerHTML = "";
});

describe("cloze flow", () => {
  it("walks through all items and reaches the finish screen", async () => {
    const api = new FakeApi([clozeTask("a", 0, 2), clozeTask("b", 1, 2)], []);
    const { app, root } = makeApp(api);
    await app.begin("cloze");
    expect(root.querySelector(".cloze-text")?.textContent).toContain("(hint: 🐈)");

    submitGuess(root, "cat");
    await settle();
    expect(root.querySelector(".progress")?.textContent).toContain("2 of 2");

    submitGuess(root, "dog");
    await settle();
    expect(root.querySelector(".finished")).toBeTruthy();
    expect(api.submitted.map((s) => s.payload)).toEqual(["cat", "dog"]);
  });

  it("re-enables the form with a message on rejection", async () => {
    const api = new FakeApi([clozeTask("a", 0, 1)], [{ status: "rejected", reason: "WrongItem" }]);
    const { app, root } = makeApp(api);
    await app.begin("cloze");
    submitGuess(root, "sofa");
    await settle();
    expect(root.querySelector(".status")?.textContent).toContain("rejected");
    expect(root.querySelector<HTMLInputElement>(".cloze-input")?.disabled).toBe(false);
  });

  it("shows a retryable banner on network failure", async () => {
    const api = new FakeApi([clozeTask("a", 0, 1)], []);
    const { app, root } = makeApp(api);
    await app.begin("cloze");
    api.failNextSubmit = true;
    submitGuess(root, "sofa");
    await settle();
    expect(root.querySelector(".status.banner")?.textContent).toContain("try again");
  });
});

describe("translate flow", () => {
  it("submits the picker selection in click order", async () => {
    const api = new FakeApi(
      [
        {
          item_id: "t1",
          task_kind: "translate",
          position: 0,
          total: 1,
          text: "The <cat> sat.",
          target: "cat",
        },
      ],
      [],
    );
    const { app, root } = makeApp(api);
    await app.begin("translate");
    (root.querySelector('.picker-cell[data-emoji="🐈"]') as HTMLButtonElement).click();
    (root.querySelector('.picker-cell[data-emoji="🏠"]') as HTMLButtonElement).click();
    (root.querySelector(".translate-submit") as HTMLButtonElement).click();
    await settle();
    expect(api.submitted).toEqual([{ itemId: "t1", payload: "🐈🏠" }]);
    expect(root.querySelector(".finished")).toBeTruthy();
  });

  it("keeps the selection when the server rejects it", async () => {
    const api = new FakeApi(
      [
        {
          item_id: "t1",
          task_kind: "translate",
          position: 0,
          total: 1,
          text: "The <cat> sat.",
          target: "cat",
        },
      ],
      [{ status: "rejected", reason: "InvalidEmoji" }],
    );
    const { app, root } = makeApp(api);
    await app.begin("translate");
    (root.querySelector('.picker-cell[data-emoji="🐈"]') as HTMLButtonElement).click();
    (root.querySelector(".translate-submit") as HTMLButtonElement).click();
    await settle();
    expect(root.querySelector(".status")?.textContent).toContain("Only emoji");
    const chips = Array.from(root.querySelectorAll(".selection-chip")).map((c) => c.textContent);
    expect(chips).toEqual(["🐈"]); // selection preserved for another try
  });
});
