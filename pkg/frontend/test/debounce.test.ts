import { afterEach, beforeEach, describe, expect, it, vi } from 'vitest';
import { Debouncer } from '../src/debounce.js';

describe('Debouncer', () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.useRealTimers();
  });

  it('fires once after the full delay', () => {
    const fired = vi.fn();
    const debouncer = new Debouncer(400);
    debouncer.schedule(fired);
    vi.advanceTimersByTime(399);
    expect(fired).not.toHaveBeenCalled();
    vi.advanceTimersByTime(1);
    expect(fired).toHaveBeenCalledTimes(1);
  });

  it('restarts the window on every schedule and keeps only the last callback', () => {
    const first = vi.fn();
    const second = vi.fn();
    const debouncer = new Debouncer(400);
    debouncer.schedule(first);
    vi.advanceTimersByTime(300);
    debouncer.schedule(second);
    vi.advanceTimersByTime(399);
    expect(first).not.toHaveBeenCalled();
    expect(second).not.toHaveBeenCalled();
    vi.advanceTimersByTime(1);
    expect(first).not.toHaveBeenCalled();
    expect(second).toHaveBeenCalledTimes(1);
  });

  it('cancel prevents the pending callback', () => {
    const fired = vi.fn();
    const debouncer = new Debouncer(400);
    debouncer.schedule(fired);
    debouncer.cancel();
    vi.advanceTimersByTime(1000);
    expect(fired).not.toHaveBeenCalled();
  });

  it('reports whether a callback is pending', () => {
    const debouncer = new Debouncer(100);
    expect(debouncer.pending).toBe(false);
    debouncer.schedule(() => {});
    expect(debouncer.pending).toBe(true);
    vi.advanceTimersByTime(100);
    expect(debouncer.pending).toBe(false);
  });

  it('honours a custom delay', () => {
    const fired = vi.fn();
    const debouncer = new Debouncer(50);
    debouncer.schedule(fired);
    vi.advanceTimersByTime(50);
    expect(fired).toHaveBeenCalledTimes(1);
  });
});
