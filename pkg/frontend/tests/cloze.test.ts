import { describe, expect, it } from "vitest";

import type { ClozeTask } from "../src/api.js";
import { renderCloze } from "../src/cloze.js";

function task(overrides: Partial<ClozeTask> = {}): ClozeTask {
  return {
    item_id: "c1",
    task_kind: "cloze",
    position: 2,
    total: 10,
    text: "The ____ (hint: 🐈) sat.",
    condition: "emojinize",
    blanks: 1,
    ...overrides,
  };
}

describe("renderCloze", () => {
  it("shows the server-rendered passage verbatim", () => {
    const container = document.createElement("div");
    renderCloze(container, task(), { onSubmit: () => {} });
    expect(container.querySelector(".cloze-text")?.textContent).toBe("The ____ (hint: 🐈) sat.");
    expect(container.querySelector(".progress")?.textContent).toBe("Question 3 of 10");
  });

  it("passes the typed guess to the callback", () => {
    const container = document.createElement("div");
    document.body.appendChild(container);
    let got = "";
    renderCloze(container, task(), { onSubmit: (g) => (got = g) });
    const input = container.querySelector<HTMLInputElement>(".cloze-input")!;
    input.value = "sofa";
    container.querySelector("form")!.dispatchEvent(new window.Event("submit", { bubbles: true, cancelable: true }));
    expect(got).toBe("sofa");
  });

  it("hints a word count for multi-word blanks", () => {
    const container = document.createElement("div");
    renderCloze(container, task({ blanks: 3, text: "Don't ____ ____ ____ (hint: 🤫) now." }), {
      onSubmit: () => {},
    });
    expect(container.querySelector<HTMLInputElement>(".cloze-input")?.placeholder).toContain("3 words");
  });
});
