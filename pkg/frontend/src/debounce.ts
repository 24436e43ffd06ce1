/** Trailing-edge debouncer: only the most recent callback survives the window. */
export class Debouncer {
  private handle: ReturnType<typeof setTimeout> | null = null;

  constructor(readonly delayMs: number = 400) {}

  schedule(op: () => void): void {
    this.cancel();
    this.handle = setTimeout(() => {
      this.handle = null;
      op();
    }, this.delayMs);
  }

  cancel(): void {
    if (this.handle !== null) {
      clearTimeout(this.handle);
      this.handle = null;
    }
  }

  get pending(): boolean {
    return this.handle !== null;
  }
}
