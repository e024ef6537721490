// Debounced latest-wins scheduler: edits within the window collapse into
// one request, and an in-flight request is aborted when a newer edit
// supersedes it.

export type Task<T> = (signal: AbortSignal) => Promise<T>;

export class LatestWins<T> {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private controller: AbortController | null = null;
  private generation = 0;

  constructor(
    private delayMs: number,
    private onResult: (value: T) => void,
    private onError: (err: unknown) => void = () => {},
  ) {}

  schedule(task: Task<T>): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      this.fire(task);
    }, this.delayMs);
  }

  /** Run immediately, aborting anything in flight. */
  fire(task: Task<T>): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.controller?.abort();
    const controller = new AbortController();
    this.controller = controller;
    const gen = ++this.generation;
    task(controller.signal).then(
      (value) => {
        if (gen === this.generation) this.onResult(value);
      },
      (err) => {
        if (gen !== this.generation) return; // superseded, drop silently
        if (err instanceof DOMException && err.name === "AbortError") return;
        this.onError(err);
      },
    );
  }

  pending(): boolean {
    return this.timer !== null;
  }
}
