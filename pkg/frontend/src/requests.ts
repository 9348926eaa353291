// Debounce and latest-wins request management: at most one projection
// request is in flight, and a newer draft aborts or supersedes older ones.

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  ms: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => fn(...args), ms);
  };
}

export const SUPERSEDED: unique symbol = Symbol("superseded");

export class LatestWins {
  private seq = 0;
  private controller: AbortController | null = null;

  /** Run a task, aborting any task started earlier. Superseded results
   * (including their failures) collapse to the SUPERSEDED marker so stale
   * responses can never overwrite newer ones. */
  async run<T>(task: (signal: AbortSignal) => Promise<T>): Promise<T | typeof SUPERSEDED> {
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const ticket = ++this.seq;
    try {
      const result = await task(controller.signal);
      return ticket === this.seq ? result : SUPERSEDED;
    } catch (error) {
      if (ticket !== this.seq || controller.signal.aborted) return SUPERSEDED;
      throw error;
    }
  }
}
