// DOM wiring: create a session, render snapshots, poll while the server
// generates, submit answers through the gate.

import { SessionApi, WrongPhaseError, ApiError } from "./api.js";
import { AnswerGate } from "./gate.js";
import { buildViewModel, ViewModel } from "./viewmodel.js";
import { Snapshot, TERMINAL_PHASES } from "./types.js";

const POLL_MS = 500;

const api = new SessionApi("");
const gate = new AnswerGate();

let sessionId: string | null = null;
let pollTimer: number | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function renderGrid(vm: ViewModel): void {
  const grid = el<HTMLDivElement>("grid");
  grid.innerHTML = "";
  grid.className = vm.layout === "board" ? "board" : "list";
  if (vm.layout === "board") {
    grid.style.gridTemplateColumns = `repeat(${vm.side}, 2.2em)`;
    vm.cells.forEach((cell, i) => {
      const div = document.createElement("div");
      div.className = "cell" + (cell.assigned ? " assigned" : "");
      if (vm.boxSide > 0) {
        const row = Math.floor(i / vm.side);
        const col = i % vm.side;
        if (col % vm.boxSide === 0 && col > 0) div.classList.add("box-left");
        if (row % vm.boxSide === 0 && row > 0) div.classList.add("box-top");
      }
      div.textContent = cell.text;
      div.title = cell.label;
      grid.appendChild(div);
    });
  } else {
    for (const cell of vm.cells) {
      const row = document.createElement("div");
      row.className = "list-row" + (cell.assigned ? " assigned" : "");
      row.textContent = `${cell.label} = ${cell.text}`;
      grid.appendChild(row);
    }
  }
}

function render(snapshot: Snapshot): void {
  gate.settle(snapshot.phase);
  const vm = buildViewModel(snapshot);
  el<HTMLDivElement>("banner").textContent = vm.banner;
  el<HTMLDivElement>("banner").dataset.phase = vm.phase;
  el<HTMLSpanElement>("count-queries").textContent = String(vm.counters.queries);
  el<HTMLSpanElement>("count-learned").textContent = String(vm.counters.learned);
  el<HTMLSpanElement>("count-bias").textContent = String(vm.counters.bias);
  renderGrid(vm);
  const learnedList = el<HTMLUListElement>("learned");
  learnedList.innerHTML = "";
  for (const text of vm.learned) {
    const li = document.createElement("li");
    li.textContent = text;
    learnedList.appendChild(li);
  }
  (el<HTMLButtonElement>("btn-yes")).disabled = !gate.enabled;
  (el<HTMLButtonElement>("btn-no")).disabled = !gate.enabled;
  if (vm.phase === "generating") {
    schedulePoll();
  } else if (vm.terminal) {
    stopPolling();
  }
}

function schedulePoll(): void {
  stopPolling();
  pollTimer = window.setTimeout(poll, POLL_MS);
}

function stopPolling(): void {
  if (pollTimer !== null) {
    window.clearTimeout(pollTimer);
    pollTimer = null;
  }
}

async function poll(): Promise<void> {
  if (!sessionId) return;
  try {
    render(await api.snapshot(sessionId));
  } catch (err) {
    showError(err);
  }
}

function showError(err: unknown): void {
  const box = el<HTMLDivElement>("error");
  if (err instanceof WrongPhaseError) {
    box.textContent = `wrong phase: ${err.message}`;
  } else if (err instanceof ApiError) {
    box.textContent = `${err.status}: ${err.message}`;
  } else {
    box.textContent = `network failure: ${String(err)} - retry when ready`;
  }
  box.hidden = false;
  window.setTimeout(() => (box.hidden = true), 4000);
}

async function submitAnswer(positive: boolean): Promise<void> {
  if (!sessionId || !gate.begin()) return;
  (el<HTMLButtonElement>("btn-yes")).disabled = true;
  (el<HTMLButtonElement>("btn-no")).disabled = true;
  try {
    render(await api.answer(sessionId, positive));
  } catch (err) {
    showError(err);
    gate.settle("awaiting_answer");
    await poll();
  }
}

async function createSession(): Promise<void> {
  const benchmark = el<HTMLInputElement>("benchmark").value.trim();
  const oracle = el<HTMLSelectElement>("oracle").value as "human" | "simulated";
  const seed = Number(el<HTMLInputElement>("seed").value || "0");
  try {
    const snapshot = await api.create({
      benchmark,
      oracle,
      seed,
      cut_min: 1.0,
      cut_max: 5.0,
    });
    sessionId = snapshot.id;
    el<HTMLDivElement>("session-info").textContent = `session ${snapshot.id} (${snapshot.name})`;
    render(snapshot);
  } catch (err) {
    showError(err);
  }
}

export function start(): void {
  el<HTMLButtonElement>("btn-create").addEventListener("click", () => void createSession());
  el<HTMLButtonElement>("btn-yes").addEventListener("click", () => void submitAnswer(true));
  el<HTMLButtonElement>("btn-no").addEventListener("click", () => void submitAnswer(false));
}

if (typeof document !== "undefined" && document.readyState !== "loading") {
  start();
} else if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", start);
}
