/**
 * Full-screen emoji picker grid.
 *
 * Deliberately bare: the entire inventory in one flat grid that fills the
 * viewport, no categories, no search, no recently-used shelf. Hovering (or
 * focusing) a cell enlarges it with a scale transform, which never reflows
 * its neighbors. Clicking toggles selection; the current selection is shown
 * in click order above the grid with per-emoji remove and a clear-all.
 */

import type { EmojiEntry } from "./api.js";

export interface PickerState {
  inventory: EmojiEntry[];
  selection: string[];
}

export const CELL_SIZE_PX = 48;

export function columnsFor(viewportWidth: number, cellSize: number = CELL_SIZE_PX): number {
  return Math.max(1, Math.floor(viewportWidth / cellSize));
}

/** Click order is selection order; clicking a selected emoji deselects it. */
export function toggleSelect(state: PickerState, emoji: string): PickerState {
  if (!state.inventory.some((entry) => entry.emoji === emoji)) {
    return state;
  }
  const selection = state.selection.includes(emoji)
    ? state.selection.filter((e) => e !== emoji)
    : [...state.selection, emoji];
  return { ...state, selection };
}

export function selectionPayload(state: PickerState): string {
  return state.selection.join("");
}

export interface PickerCallbacks {
  onChange(state: PickerState): void;
}

export function renderPicker(
  container: HTMLElement,
  state: PickerState,
  callbacks: PickerCallbacks,
  viewportWidth: number,
): void {
  const doc = container.ownerDocument;
  container.textContent = "";
  container.classList.add("picker");

  const selectionBar = doc.createElement("div");
  selectionBar.className = "selection-bar";
  const selectionLabel = doc.createElement("span");
  selectionLabel.className = "selection-label";
  selectionLabel.textContent = state.selection.length ? "Your translation:" : "Pick one or more emoji:";
  selectionBar.appendChild(selectionLabel);
  for (const emoji of state.selection) {
    const chip = doc.createElement("button");
    chip.type = "button";
    chip.className = "selection-chip";
    chip.textContent = emoji;
    chip.title = "remove";
    chip.addEventListener("click", () => callbacks.onChange(toggleSelect(state, emoji)));
    selectionBar.appendChild(chip);
  }
  if (state.selection.length) {
    const clear = doc.createElement("button");
    clear.type = "button";
    clear.className = "selection-clear";
    clear.textContent = "clear";
    clear.addEventListener("click", () => callbacks.onChange({ ...state, selection: [] }));
    selectionBar.appendChild(clear);
  }
  container.appendChild(selectionBar);

  const grid = doc.createElement("div");
  grid.className = "picker-grid";
  grid.setAttribute("role", "listbox");
  grid.setAttribute("aria-label", "all emoji");
  grid.style.setProperty("--cell", `${CELL_SIZE_PX}px`);
  grid.style.gridTemplateColumns = `repeat(${columnsFor(viewportWidth)}, 1fr)`;

  state.inventory.forEach((entry, index) => {
    const cell = doc.createElement("button");
    cell.type = "button";
    cell.className = "picker-cell";
    cell.textContent = entry.emoji;
    cell.setAttribute("role", "option");
    cell.setAttribute("aria-label", entry.name);
    cell.setAttribute("aria-selected", String(state.selection.includes(entry.emoji)));
    if (state.selection.includes(entry.emoji)) {
      cell.classList.add("selected");
    }
    cell.tabIndex = index === 0 ? 0 : -1; // roving tabindex for arrow-key navigation
    cell.dataset.emoji = entry.emoji;
    cell.addEventListener("click", () => callbacks.onChange(toggleSelect(state, entry.emoji)));
    grid.appendChild(cell);
  });

  grid.addEventListener("keydown", (event) => {
    const key = (event as KeyboardEvent).key;
    const cells = Array.from(grid.querySelectorAll<HTMLButtonElement>(".picker-cell"));
    const current = cells.indexOf(doc.activeElement as HTMLButtonElement);
    if (current < 0) return;
    const columns = columnsFor(viewportWidth);
    let next = -1;
    if (key === "ArrowRight") next = current + 1;
    else if (key === "ArrowLeft") next = current - 1;
    else if (key === "ArrowDown") next = current + columns;
    else if (key === "ArrowUp") next = current - columns;
    else if (key === "Enter" || key === " ") {
      event.preventDefault();
      callbacks.onChange(toggleSelect(state, cells[current].dataset.emoji!));
      return;
    }
    if (next >= 0 && next < cells.length) {
      event.preventDefault();
      cells[current].tabIndex = -1;
      cells[next].tabIndex = 0;
      cells[next].focus();
    }
  });

  container.appendChild(grid);
}
