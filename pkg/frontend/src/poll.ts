/** Fixed-interval polling (the server pushes nothing). */

export const QUEUE_POLL_INTERVAL_MS = 10_000;

export interface PollHandle {
  stop(): void;
}

/** Run ``tick`` immediately and then every ``intervalMs``; overlapping
 *  ticks are skipped rather than queued. Errors go to ``onError``. */
export function startPolling(
  tick: () => Promise<void>,
  intervalMs: number = QUEUE_POLL_INTERVAL_MS,
  onError: (error: unknown) => void = () => undefined,
): PollHandle {
  let running = false;
  const fire = () => {
    if (running) {
      return;
    }
    running = true;
    tick()
      .catch(onError)
      .finally(() => {
        running = false;
      });
  };
  fire();
  const timer = setInterval(fire, intervalMs);
  return {
    stop() {
      clearInterval(timer);
    },
  };
}
