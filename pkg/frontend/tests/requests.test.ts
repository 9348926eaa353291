import { afterEach, beforeEach, describe, expect, test, vi } from "vitest";

import { LatestWins, SUPERSEDED, debounce } from "../src/requests.js";

describe("debounce", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  test("collapses a burst into one trailing call", () => {
    const calls: number[] = [];
    const run = debounce((n: number) => calls.push(n), 300);
    run(1);
    run(2);
    vi.advanceTimersByTime(299);
    expect(calls).toEqual([]);
    run(3);
    vi.advanceTimersByTime(300);
    expect(calls).toEqual([3]);
  });

  test("separate bursts each fire", () => {
    const calls: number[] = [];
    const run = debounce((n: number) => calls.push(n), 100);
    run(1);
    vi.advanceTimersByTime(100);
    run(2);
    vi.advanceTimersByTime(100);
    expect(calls).toEqual([1, 2]);
  });
});

describe("LatestWins", () => {
  test("a newer run supersedes an older unresolved one", async () => {
    const requests = new LatestWins();
    let resolveFirst!: (value: string) => void;
    const first = requests.run(
      () => new Promise<string>((resolve) => { resolveFirst = resolve; }),
    );
    const second = requests.run(async () => "second");
    await expect(second).resolves.toBe("second");
    resolveFirst("first");
    await expect(first).resolves.toBe(SUPERSEDED);
  });

  test("the superseded task's signal is aborted", async () => {
    const requests = new LatestWins();
    let seenSignal!: AbortSignal;
    void requests.run(
      (signal) => new Promise<never>(() => { seenSignal = signal; }),
    );
    expect(seenSignal.aborted).toBe(false);
    await requests.run(async () => "next");
    expect(seenSignal.aborted).toBe(true);
  });

  test("failures of superseded runs are swallowed", async () => {
    const requests = new LatestWins();
    let rejectFirst!: (reason: Error) => void;
    const first = requests.run(
      () => new Promise<string>((_, reject) => { rejectFirst = reject; }),
    );
    await requests.run(async () => "next");
    rejectFirst(new Error("boom"));
    await expect(first).resolves.toBe(SUPERSEDED);
  });

  test("failures of the current run propagate", async () => {
    const requests = new LatestWins();
    await expect(requests.run(async () => { throw new Error("boom"); })).rejects.toThrow("boom");
  });

  test("sequential runs all resolve", async () => {
    const requests = new LatestWins();
    expect(await requests.run(async () => 1)).toBe(1);
    expect(await requests.run(async () => 2)).toBe(2);
  });
});
