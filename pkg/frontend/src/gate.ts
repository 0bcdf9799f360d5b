// One-outstanding-answer guard: the buttons disable the moment an answer is
// submitted and stay disabled until the next snapshot lands, so the client
// can never emit two answers for one query (the server's WrongPhase check
// is the backstop).

export class AnswerGate {
  private inFlight = false;
  private phase = "generating";

  observe(phase: string): void {
    this.phase = phase;
  }

  get enabled(): boolean {
    return this.phase === "awaiting_answer" && !this.inFlight;
  }

  begin(): boolean {
    if (!this.enabled) return false;
    this.inFlight = true;
    return true;
  }

  settle(phase: string): void {
    this.inFlight = false;
    this.phase = phase;
  }
}
