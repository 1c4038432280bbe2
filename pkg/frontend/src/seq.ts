/** Per-panel request sequencing: at most one logical in-flight request, and
 * responses arriving for superseded requests are discarded. */

export class SequenceGate {
  private current = 0;

  begin(): number {
    this.current += 1;
    return this.current;
  }

  isCurrent(token: number): boolean {
    return token === this.current;
  }
}
