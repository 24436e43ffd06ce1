import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';
import { CheckClient } from '../src/api.js';
import { DraftController, DraftState } from '../src/controller.js';
import { CheckResult } from '../src/types.js';
import { flushMicrotasks, verdict } from './helpers.js';

interface PendingCall {
  text: string;
  resolve: (result: CheckResult) => void;
  reject: (error: unknown) => void;
}

/** A check function whose responses are settled by hand, in any order. */
function scriptedCheck() {
  const calls: PendingCall[] = [];
  const check = (text: string) =>
    new Promise<CheckResult>((resolve, reject) => {
      calls.push({ text, resolve, reject });
    });
  return { calls, check };
}

describe('DraftController', () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it('debounces for 400 ms before checking the draft', () => {
    const { calls, check } = scriptedCheck();
    const controller = new DraftController(check);

    controller.onDraftChange('hello moderation');
    expect(controller.getState().debouncePending).toBe(true);
    vi.advanceTimersByTime(399);
    expect(calls).toHaveLength(0);
    vi.advanceTimersByTime(1);
    expect(calls).toHaveLength(1);
    expect(calls[0]?.text).toBe('hello moderation');
    expect(controller.getState().status).toBe('pending');
  });

  it('coalesces rapid edits into one request for the final text', () => {
    const { calls, check } = scriptedCheck();
    const controller = new DraftController(check);

    controller.onDraftChange('a');
    vi.advanceTimersByTime(200);
    controller.onDraftChange('ab');
    vi.advanceTimersByTime(200);
    controller.onDraftChange('abc');
    vi.advanceTimersByTime(400);

    expect(calls).toHaveLength(1);
    expect(calls[0]?.text).toBe('abc');
  });

  it('applies a completed check to the state', async () => {
    const { calls, check } = scriptedCheck();
    const controller = new DraftController(check);

    controller.onDraftChange('risky draft');
    vi.advanceTimersByTime(400);
    calls[0]?.resolve(verdict(['DELETE_RISK', 'WARN_HS']));
    await flushMicrotasks();

    const state = controller.getState();
    expect(state.status).toBe('idle');
    expect(state.checkedText).toBe('risky draft');
    expect(state.lastResult?.warnings.map((w) => w.code)).toEqual(['DELETE_RISK', 'WARN_HS']);
  });

  it('sends nothing for an empty or whitespace draft', () => {
    const { calls, check } = scriptedCheck();
    const controller = new DraftController(check);

    controller.onDraftChange('   ');
    vi.advanceTimersByTime(1000);
    expect(calls).toHaveLength(0);
    expect(controller.getState().status).toBe('idle');
  });

  it('clears the verdict when the draft empties and ignores the orphaned response', async () => {
    const { calls, check } = scriptedCheck();
    const controller = new DraftController(check);

    controller.onDraftChange('soon deleted');
    vi.advanceTimersByTime(400);
    expect(calls).toHaveLength(1);

    controller.onDraftChange('');
    expect(controller.getState().lastResult).toBeNull();
    expect(controller.getState().status).toBe('idle');

    // the response for the erased text arrives late and must change nothing
    calls[0]?.resolve(verdict(['DELETE_RISK']));
    await flushMicrotasks();
    expect(controller.getState().lastResult).toBeNull();
    expect(controller.getState().status).toBe('idle');
  });

  it('cancels a pending debounce when the draft empties', () => {
    const { calls, check } = scriptedCheck();
    const controller = new DraftController(check);

    controller.onDraftChange('about to vanish');
    vi.advanceTimersByTime(100);
    controller.onDraftChange('');
    vi.advanceTimersByTime(2000);
    expect(calls).toHaveLength(0);
  });

  it('never lets a stale response overwrite a newer verdict', async () => {
    const { calls, check } = scriptedCheck();
    const controller = new DraftController(check);

    controller.onDraftChange('first draft');
    vi.advanceTimersByTime(400);
    controller.onDraftChange('second draft');
    vi.advanceTimersByTime(400);
    expect(calls).toHaveLength(2);

    // the newer request answers first
    calls[1]?.resolve(verdict(['DELETE_RISK', 'WARN_HS']));
    await flushMicrotasks();
    expect(controller.getState().checkedText).toBe('second draft');

    // then the stale one trickles in
    calls[0]?.resolve(verdict([]));
    await flushMicrotasks();

    const state = controller.getState();
    expect(state.checkedText).toBe('second draft');
    expect(state.lastResult?.warnings).toHaveLength(2);
  });

  it('discards a superseded response even when it arrives before the newer one', async () => {
    const { calls, check } = scriptedCheck();
    const controller = new DraftController(check);
    const seen: DraftState[] = [];
    controller.subscribe((state) => seen.push(state));

    controller.onDraftChange('first');
    vi.advanceTimersByTime(400);
    controller.onDraftChange('second');
    vi.advanceTimersByTime(400);

    calls[0]?.resolve(verdict(['WARN_SPAM']));
    await flushMicrotasks();
    expect(controller.getState().lastResult).toBeNull();
    expect(controller.getState().status).toBe('pending');

    calls[1]?.resolve(verdict([]));
    await flushMicrotasks();
    expect(controller.getState().checkedText).toBe('second');
    expect(controller.getState().lastResult?.warnings).toHaveLength(0);

    // no observer ever saw the stale verdict
    expect(seen.every((state) => state.checkedText !== 'first')).toBe(true);
  });

  it('does not issue a duplicate request while the same text is in flight', () => {
    const { calls, check } = scriptedCheck();
    const controller = new DraftController(check);

    controller.onDraftChange('same text');
    vi.advanceTimersByTime(400);
    expect(calls).toHaveLength(1);

    // wander away and back before the response lands
    controller.onDraftChange('same text!');
    controller.onDraftChange('same text');
    vi.advanceTimersByTime(400);
    expect(calls).toHaveLength(1);
  });

  it('ignores input events that repeat the current text', async () => {
    const { calls, check } = scriptedCheck();
    const controller = new DraftController(check);

    controller.onDraftChange('stable');
    vi.advanceTimersByTime(400);
    calls[0]?.resolve(verdict([]));
    await flushMicrotasks();

    controller.onDraftChange('stable');
    vi.advanceTimersByTime(1000);
    expect(calls).toHaveLength(1);
  });

  it('reports an error state without blocking further typing', async () => {
    const { calls, check } = scriptedCheck();
    const controller = new DraftController(check);

    controller.onDraftChange('doomed draft');
    vi.advanceTimersByTime(400);
    calls[0]?.reject(new TypeError('fetch failed'));
    await flushMicrotasks();

    expect(controller.getState().status).toBe('error');
    expect(controller.getState().lastResult).toBeNull();

    controller.onDraftChange('recovered draft');
    vi.advanceTimersByTime(400);
    expect(calls).toHaveLength(2);
    calls[1]?.resolve(verdict([]));
    await flushMicrotasks();
    expect(controller.getState().status).toBe('idle');
    expect(controller.getState().checkedText).toBe('recovered draft');
  });

  it('keeps the newest verdict when an older request fails late', async () => {
    const { calls, check } = scriptedCheck();
    const controller = new DraftController(check);

    controller.onDraftChange('one');
    vi.advanceTimersByTime(400);
    controller.onDraftChange('two');
    vi.advanceTimersByTime(400);

    calls[1]?.resolve(verdict(['WARN_RUMOR']));
    await flushMicrotasks();
    calls[0]?.reject(new Error('slow network, gave up'));
    await flushMicrotasks();

    const state = controller.getState();
    expect(state.status).toBe('idle');
    expect(state.checkedText).toBe('two');
    expect(state.lastResult?.warnings.map((w) => w.code)).toEqual(['WARN_RUMOR']);
  });

  it('drives the real API client end to end through a mocked fetch', async () => {
    const body = verdict(['DELETE_RISK', 'WARN_HS']);
    const fetchMock = vi.fn(
      async (_url: RequestInfo | URL, _init?: RequestInit) =>
        new Response(JSON.stringify(body), {
          status: 200,
          headers: { 'Content-Type': 'application/json' },
        }),
    );
    const client = new CheckClient('http://moderation.test', fetchMock);
    const controller = new DraftController((text) => client.check(text));

    controller.onDraftChange('a nasty draft');
    // async variant so the body-parsing steps inside fetch get to run
    await vi.advanceTimersByTimeAsync(400);
    await vi.runAllTimersAsync();
    await flushMicrotasks(8);

    expect(fetchMock).toHaveBeenCalledTimes(1);
    expect(fetchMock.mock.calls[0]?.[0]).toBe('http://moderation.test/v1/check');
    const state = controller.getState();
    expect(state.lastResult?.model_fingerprint).toBe('f'.repeat(64));
    expect(state.lastResult?.warnings.map((w) => w.code)).toEqual(['DELETE_RISK', 'WARN_HS']);
  });
});
