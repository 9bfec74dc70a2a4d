/**
 * Deform request scheduler: at most one in-flight request, pending
 * payloads coalesced to the newest, and responses applied strictly in
 * issue order (stale responses are dropped).
 */

export interface SchedulerOptions {
    /** Minimum spacing between issued requests, ms. */
    debounceMs?: number;
    now?: () => number;
    setTimer?: (fn: () => void, ms: number) => unknown;
}

export class DeformScheduler<T, R> {
    private inFlight = false;
    private pending: T | null = null;
    private lastIssued = -Infinity;
    private seq = 0;
    private lastApplied = 0;
    private debounceMs: number;
    private now: () => number;
    private setTimer: (fn: () => void, ms: number) => unknown;
    private timerArmed = false;

    constructor(
        private send: (payload: T) => Promise<R>,
        private apply: (result: R) => void,
        private onError: (err: unknown) => void = () => {},
        opts: SchedulerOptions = {},
    ) {
        this.debounceMs = opts.debounceMs ?? 16;
        this.now = opts.now ?? (() => Date.now());
        this.setTimer = opts.setTimer ?? ((fn, ms) => setTimeout(fn, ms));
    }

    /** Queue a payload; superseded payloads are silently dropped. */
    submit(payload: T): void {
        this.pending = payload;
        this.pump();
    }

    private pump(): void {
        if (this.inFlight || this.pending === null) {
            return;
        }
        const wait = this.lastIssued + this.debounceMs - this.now();
        if (wait > 0) {
            if (!this.timerArmed) {
                this.timerArmed = true;
                this.setTimer(() => {
                    this.timerArmed = false;
                    this.pump();
                }, wait);
            }
            return;
        }
        const payload = this.pending;
        this.pending = null;
        this.inFlight = true;
        this.lastIssued = this.now();
        const ticket = ++this.seq;
        this.send(payload).then(
            (result) => {
                this.inFlight = false;
                if (ticket > this.lastApplied) {
                    this.lastApplied = ticket;
                    this.apply(result);
                }
                this.pump();
            },
            (err) => {
                this.inFlight = false;
                this.onError(err);
                this.pump();
            },
        );
    }
}
