// Payload shapes of the session JSON protocol.

export interface PendingCell {
  variable: number;
  value: number | null;
}

export interface SnapshotMetrics {
  avg_query_size: number;
  avg_wait: number;
  max_wait: number;
}

export interface Snapshot {
  id: string;
  name: string;
  phase: string;
  variables: number;
  domains: number[][];
  pending_query: PendingCell[] | null;
  queries: number;
  learned_size: number;
  bias_size: number;
  learned: string[];
  metrics: SnapshotMetrics;
  final_metrics?: Record<string, number>;
}

export interface CreateRequest {
  instance?: unknown;
  benchmark?: string;
  params?: Record<string, number>;
  oracle?: "human" | "simulated";
  name?: string;
  algorithm?: string;
  findscope?: number;
  qgen?: string;
  var?: string;
  val?: string;
  cut_min?: number;
  cut_max?: number;
  seed?: number;
}

export interface TranscriptRecord {
  variables: number[];
  values: number[];
  answer: boolean;
  origin: string;
  asked_at: number;
  wait_time: number;
  answer_time: number;
}

export interface Transcript {
  id: string;
  name: string;
  phase: string;
  records: TranscriptRecord[];
  learned: string[];
}

export const TERMINAL_PHASES = new Set([
  "converged",
  "premature_convergence",
  "collapsed",
  "aborted",
]);
