/**
 * Cloze question page: the passage with blanks (and the emoji hint, when the
 * condition provides one) plus a free-text answer box. The ground-truth word
 * never reaches the browser; everything shown comes from the server's
 * pre-rendered task text.
 */

import type { ClozeTask } from "./api.js";

export interface ClozeCallbacks {
  onSubmit(guess: string): void;
}

export function renderCloze(container: HTMLElement, task: ClozeTask, callbacks: ClozeCallbacks): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  container.classList.add("cloze");

  const progress = doc.createElement("div");
  progress.className = "progress";
  progress.textContent = `Question ${task.position + 1} of ${task.total}`;
  container.appendChild(progress);

  const passage = doc.createElement("p");
  passage.className = "cloze-text";
  passage.textContent = task.text;
  container.appendChild(passage);

  const form = doc.createElement("form");
  form.className = "cloze-form";
  const input = doc.createElement("input");
  input.type = "text";
  input.name = "guess";
  input.className = "cloze-input";
  input.placeholder = task.blanks > 1 ? `your guess (${task.blanks} words)` : "your guess";
  input.autocomplete = "off";
  const submit = doc.createElement("button");
  submit.type = "submit";
  submit.textContent = "Submit";
  form.appendChild(input);
  form.appendChild(submit);
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    callbacks.onSubmit(input.value);
  });
  container.appendChild(form);
  input.focus();
}
