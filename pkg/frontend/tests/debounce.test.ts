import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { LatestWins } from "../src/debounce.js";

describe("LatestWins", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("collapses rapid schedules into one task", async () => {
    const results: number[] = [];
    const runner = new LatestWins<number>(300, (v) => results.push(v));
    let calls = 0;
    const task = async () => {
      calls += 1;
      return calls;
    };
    runner.schedule(task);
    vi.advanceTimersByTime(100);
    runner.schedule(task);
    vi.advanceTimersByTime(100);
    runner.schedule(task);
    vi.advanceTimersByTime(300);
    await vi.runAllTimersAsync();
    expect(calls).toBe(1);
    expect(results).toEqual([1]);
  });

  it("drops a superseded in-flight result (latest wins)", async () => {
    const results: number[] = [];
    const runner = new LatestWins<number>(0, (v) => results.push(v));
    let resolveFirst!: (v: number) => void;
    runner.fire(
      () => new Promise<number>((resolve) => {
        resolveFirst = resolve;
      }),
    );
    runner.fire(async () => 2);
    resolveFirst(1); // late arrival of the superseded request
    await vi.runAllTimersAsync();
    expect(results).toEqual([2]);
  });

  it("aborts the in-flight request when superseded", async () => {
    const seen: AbortSignal[] = [];
    const runner = new LatestWins<number>(0, () => {});
    runner.fire((signal) => {
      seen.push(signal);
      return new Promise<number>(() => {});
    });
    runner.fire(async () => 1);
    expect(seen[0].aborted).toBe(true);
  });

  it("reports errors only for the current generation", async () => {
    const errors: unknown[] = [];
    const runner = new LatestWins<number>(0, () => {}, (e) => errors.push(e));
    let rejectFirst!: (e: Error) => void;
    runner.fire(
      () => new Promise<number>((_res, rej) => {
        rejectFirst = rej;
      }),
    );
    runner.fire(async () => 5);
    rejectFirst(new Error("stale failure"));
    await vi.runAllTimersAsync();
    expect(errors).toEqual([]);
  });

  it("exposes whether a debounce is pending", () => {
    const runner = new LatestWins<number>(300, () => {});
    expect(runner.pending()).toBe(false);
    runner.schedule(async () => 1);
    expect(runner.pending()).toBe(true);
    vi.advanceTimersByTime(300);
    expect(runner.pending()).toBe(false);
  });
});
