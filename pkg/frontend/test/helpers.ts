import { DraftState } from '../src/controller.js';
import { CheckResult, CheckWarning } from '../src/types.js';

/** Build a service-shaped verdict whose stages match the given warning codes. */
export function verdict(codes: string[], score = 1.5): CheckResult {
  const warnings: CheckWarning[] = codes.map((code) => ({
    code,
    message: `detail for ${code}`,
  }));
  const deleted = codes.includes('DELETE_RISK');
  const disinfo = codes.some((code) => code.startsWith('WARN_'));
  return {
    deletion: { label: deleted ? 'deleted' : 'not_deleted', score },
    disinfo: { label: disinfo ? 'disinfo' : 'not_disinfo', score },
    reason: disinfo ? { label: 'hate_speech', score } : null,
    warnings,
    model_fingerprint: 'f'.repeat(64),
  };
}

export function draftState(overrides: Partial<DraftState> = {}): DraftState {
  return {
    text: '',
    lastResult: null,
    checkedText: null,
    status: 'idle',
    debouncePending: false,
    ...overrides,
  };
}

/** Run a few microtask turns so settled promises propagate through .then chains. */
export async function flushMicrotasks(turns = 4): Promise<void> {
  for (let i = 0; i < turns; i++) {
    await Promise.resolve();
  }
}
