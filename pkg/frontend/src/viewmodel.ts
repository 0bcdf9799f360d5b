// Pure presentation logic: a server snapshot becomes a renderable view.

import { Snapshot, TERMINAL_PHASES } from "./types.js";

export interface GridCell {
  label: string;
  text: string;
  assigned: boolean;
}

export interface ViewModel {
  phase: string;
  banner: string;
  layout: "board" | "list";
  side: number; // board side length when layout is "board", else 0
  boxSide: number; // sudoku-style separator period, 0 when none applies
  cells: GridCell[];
  answerEnabled: boolean;
  counters: { queries: number; learned: number; bias: number };
  learned: string[];
  terminal: boolean;
}

const BANNERS: Record<string, string> = {
  generating: "Generating the next query…",
  awaiting_answer: "Does this (partial) assignment satisfy your constraints?",
  converged: "Converged - the network is fully learned",
  premature_convergence: "Premature convergence - agreement reached, equivalence unproven",
  collapsed: "Collapsed - no network in the bias agrees with the answers",
  aborted: "Session aborted",
};

function intSqrt(n: number): number {
  const r = Math.round(Math.sqrt(n));
  return r * r === n ? r : 0;
}

function uniformDomains(domains: number[][]): boolean {
  if (domains.length === 0) return false;
  const first = JSON.stringify(domains[0]);
  return domains.every((d) => JSON.stringify(d) === first);
}

export function pickLayout(snapshot: Snapshot): { layout: "board" | "list"; side: number; boxSide: number } {
  const side = intSqrt(snapshot.variables);
  if (side >= 2 && uniformDomains(snapshot.domains)) {
    return { layout: "board", side, boxSide: intSqrt(side) >= 2 ? intSqrt(side) : 0 };
  }
  return { layout: "list", side: 0, boxSide: 0 };
}

export function buildViewModel(snapshot: Snapshot): ViewModel {
  const { layout, side, boxSide } = pickLayout(snapshot);
  const pending = snapshot.pending_query;
  const cells: GridCell[] = [];
  for (let i = 0; i < snapshot.variables; i++) {
    const entry = pending ? pending[i] : null;
    const assigned = entry !== null && entry.value !== null;
    cells.push({
      label: `x${i}`,
      text: assigned ? String(entry!.value) : "·",
      assigned,
    });
  }
  return {
    phase: snapshot.phase,
    banner: BANNERS[snapshot.phase] ?? snapshot.phase,
    layout,
    side,
    boxSide,
    cells,
    answerEnabled: snapshot.phase === "awaiting_answer",
    counters: {
      queries: snapshot.queries,
      learned: snapshot.learned_size,
      bias: snapshot.bias_size,
    },
    learned: snapshot.learned,
    terminal: TERMINAL_PHASES.has(snapshot.phase),
  };
}
