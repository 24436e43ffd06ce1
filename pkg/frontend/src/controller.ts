import { CheckResult } from './types.js';
import { Debouncer } from './debounce.js';

export type RequestStatus = 'idle' | 'pending' | 'error';

export interface DraftState {
  text: string;
  /** Verdict being rendered, or null when nothing applies (empty draft, error). */
  lastResult: CheckResult | null;
  /** The draft text lastResult was computed for. */
  checkedText: string | null;
  status: RequestStatus;
  debouncePending: boolean;
}

export type CheckFn = (text: string) => Promise<CheckResult>;
export type StateListener = (state: DraftState) => void;

const INITIAL_STATE: DraftState = {
  text: '',
  lastResult: null,
  checkedText: null,
  status: 'idle',
  debouncePending: false,
};

/**
 * Drives the live-check loop for one composer box: debounce keystrokes,
 * issue at most one check per distinct draft, and make sure a slow response
 * for an old draft can never overwrite the verdict for a newer one.
 *
 * Freshness is enforced with a sequence number: each issued request takes
 * the next value, and a response is applied only if its number still equals
 * the latest issued one. Everything else is discarded on arrival.
 */
export class DraftController {
  private state: DraftState = INITIAL_STATE;
  private listeners: StateListener[] = [];
  private debouncer: Debouncer;
  private seq = 0;
  private inFlightText: string | null = null;

  constructor(
    private check: CheckFn,
    debounceMs: number = 400,
  ) {
    this.debouncer = new Debouncer(debounceMs);
  }

  getState(): DraftState {
    return this.state;
  }

  subscribe(listener: StateListener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  onDraftChange(text: string): void {
    if (text === this.state.text) {
      return; // input event replayed the same value, nothing to do
    }
    if (text.trim() === '') {
      // Empty drafts are never sent. Orphan any in-flight request so a late
      // response cannot resurrect a banner for text the user already erased.
      this.debouncer.cancel();
      this.seq += 1;
      this.inFlightText = null;
      this.update({ ...INITIAL_STATE, text });
      return;
    }
    this.update({ text, debouncePending: true });
    this.debouncer.schedule(() => this.issue());
  }

  private issue(): void {
    const text = this.state.text;
    this.update({ debouncePending: false });
    if (this.inFlightText === text) {
      return; // identical draft already being checked
    }
    const seq = ++this.seq;
    this.inFlightText = text;
    this.update({ status: 'pending' });
    this.check(text).then(
      (result) => this.settle(seq, text, result),
      () => this.settle(seq, text, null),
    );
  }

  private settle(seq: number, text: string, result: CheckResult | null): void {
    if (seq !== this.seq) {
      return; // superseded; a newer request owns the banner now
    }
    this.inFlightText = null;
    if (result === null) {
      // network trouble or a server error: drop the old verdict rather than
      // show one that no longer matches the draft, and surface a notice
      this.update({ status: 'error', lastResult: null, checkedText: null });
    } else {
      this.update({ status: 'idle', lastResult: result, checkedText: text });
    }
  }

  private update(patch: Partial<DraftState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }
}
