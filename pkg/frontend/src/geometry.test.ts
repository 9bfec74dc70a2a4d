import { describe, expect, it } from "vitest";
import { Pt, bezierPoint, dist, elevateDegree, lowerDegree } from "./geometry";

const CUBIC: Pt[] = [[0, 0], [1, 2], [3, 2.5], [4, 0]];

function maxCurveDeviation(a: Pt[], b: Pt[], samples = 200): number {
    let worst = 0;
    for (let s = 0; s <= samples; s++) {
        const t = s / samples;
        worst = Math.max(worst, dist(bezierPoint(a, t), bezierPoint(b, t)));
    }
    return worst;
}

describe("bezierPoint", () => {
    it("hits the endpoints", () => {
        expect(bezierPoint(CUBIC, 0)).toEqual([0, 0]);
        expect(bezierPoint(CUBIC, 1)).toEqual([4, 0]);
    });

    it("matches the closed form for a quadratic", () => {
        const q: Pt[] = [[0, 0], [1, 1], [2, 0]];
        const t = 0.3;
        const x = (1 - t) * (1 - t) * 0 + 2 * (1 - t) * t * 1 + t * t * 2;
        const y = 2 * (1 - t) * t * 1;
        const p = bezierPoint(q, t);
        expect(p[0]).toBeCloseTo(x, 12);
        expect(p[1]).toBeCloseTo(y, 12);
    });
});

describe("elevateDegree", () => {
    it("is exact: elevated curve traces the same path", () => {
        for (const order of [4, 5, 7]) {
            const up = elevateDegree(CUBIC, order);
            expect(up.length).toBe(order + 1);
            expect(maxCurveDeviation(CUBIC, up)).toBeLessThan(1e-12);
        }
    });

    it("is a no-op at the current order", () => {
        expect(elevateDegree(CUBIC, 3)).toEqual(CUBIC);
    });

    it("refuses to lower", () => {
        expect(() => elevateDegree(CUBIC, 2)).toThrow(/elevate/);
    });
});

describe("lowerDegree", () => {
    it("pins both endpoints", () => {
        const down = lowerDegree(CUBIC, 2);
        expect(down[0]).toEqual(CUBIC[0]);
        expect(down[down.length - 1]).toEqual(CUBIC[3]);
        expect(down.length).toBe(3);
    });

    it("recovers an elevated curve almost exactly", () => {
        // raise then lower: the cubic is exactly representable, so the
        // least-squares fit should land back on it
        const up = elevateDegree(CUBIC, 6);
        const back = lowerDegree(up, 3);
        expect(maxCurveDeviation(CUBIC, back)).toBeLessThan(1e-6);
    });

    it("degrades gracefully to a segment", () => {
        const seg = lowerDegree(CUBIC, 1);
        expect(seg).toEqual([[0, 0], [4, 0]]);
    });

    it("copies when the target order is not lower", () => {
        const same = lowerDegree(CUBIC, 3);
        expect(same).toEqual(CUBIC);
        expect(same).not.toBe(CUBIC);
    });
});
