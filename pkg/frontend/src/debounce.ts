// Trailing-edge debounce for edit events: the service sees one /plan per
// pause in dragging, not one per mousemove.

export const EDIT_DEBOUNCE_MS = 150;

export class Debouncer {
  private timer: ReturnType<typeof setTimeout> | null = null;

  constructor(private delayMs: number = EDIT_DEBOUNCE_MS) {}

  schedule(func: () => void): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => {
      this.timer = null;
      func();
    }, this.delayMs);
  }

  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  get pending(): boolean {
    return this.timer !== null;
  }
}
