import { describe, expect, it } from "vitest";
import { DeformScheduler } from "./scheduler";

/** Manual clock + timer queue so the debounce is fully deterministic. */
class FakeClock {
    t = 0;
    timers: { at: number; fn: () => void }[] = [];

    now = (): number => this.t;

    setTimer = (fn: () => void, ms: number): void => {
        this.timers.push({ at: this.t + ms, fn });
    };

    advance(ms: number): void {
        this.t += ms;
        const due = this.timers.filter((x) => x.at <= this.t);
        this.timers = this.timers.filter((x) => x.at > this.t);
        due.forEach((x) => x.fn());
    }
}

interface Deferred {
    payload: number;
    resolve: (r: number) => void;
    reject: (e: unknown) => void;
}

function harness(debounceMs = 16) {
    const clock = new FakeClock();
    const sent: Deferred[] = [];
    const applied: number[] = [];
    const errors: unknown[] = [];
    const sched = new DeformScheduler<number, number>(
        (payload) =>
            new Promise<number>((resolve, reject) => {
                sent.push({ payload, resolve, reject });
            }),
        (r) => applied.push(r),
        (e) => errors.push(e),
        { debounceMs, now: clock.now, setTimer: clock.setTimer },
    );
    return { clock, sent, applied, errors, sched };
}

const settle = () => new Promise<void>((r) => setTimeout(r, 0));

describe("DeformScheduler", () => {
    it("sends the first submit immediately", () => {
        const h = harness();
        h.sched.submit(1);
        expect(h.sent.map((s) => s.payload)).toEqual([1]);
    });

    it("keeps a single request in flight and coalesces to the newest", async () => {
        const h = harness();
        h.sched.submit(1);
        h.sched.submit(2);
        h.sched.submit(3);
        expect(h.sent.length).toBe(1);
        h.sent[0].resolve(10);
        await settle();
        h.clock.advance(16);
        // intermediate payload 2 was dropped, only the newest went out
        expect(h.sent.map((s) => s.payload)).toEqual([1, 3]);
    });

    it("spaces requests by the debounce interval", async () => {
        const h = harness(16);
        h.sched.submit(1);
        h.sent[0].resolve(0);
        await settle();
        h.clock.advance(5);
        h.sched.submit(2);
        expect(h.sent.length).toBe(1); // too soon, timer armed
        h.clock.advance(10);
        expect(h.sent.length).toBe(1);
        h.clock.advance(1);
        expect(h.sent.length).toBe(2);
    });

    it("drops stale responses that settle out of order", async () => {
        const h = harness(0);
        h.sched.submit(1);
        h.sent[0].resolve(100);
        await settle();
        h.sched.submit(2);
        h.sent[1].resolve(200);
        await settle();
        expect(h.applied).toEqual([100, 200]);
        // a late re-settle of ticket 1 must not clobber ticket 2's result
        h.sent[0].resolve(999);
        await settle();
        expect(h.applied).toEqual([100, 200]);
    });

    it("reports errors and keeps pumping", async () => {
        const h = harness(0);
        h.sched.submit(1);
        h.sched.submit(2);
        h.sent[0].reject(new Error("boom"));
        await settle();
        expect(h.errors.length).toBe(1);
        expect(h.sent.map((s) => s.payload)).toEqual([1, 2]);
        h.sent[1].resolve(20);
        await settle();
        expect(h.applied).toEqual([20]);
    });
});
