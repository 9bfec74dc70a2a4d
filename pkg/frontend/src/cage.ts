import { Pt, dist, elevateDegree, lowerDegree } from "./geometry";

/** Control-point view of a cage: one Bezier point list per curve. */
export type BezierCage = Pt[][];

export interface CageJson {
    curves: { basis?: string; points: number[][] }[];
}

export function parseCage(doc: CageJson): BezierCage {
    if (!doc.curves || doc.curves.length < 1) {
        throw new Error("cage JSON needs a non-empty curves array");
    }
    return doc.curves.map((c) => {
        if ((c.basis ?? "bezier") !== "bezier") {
            throw new Error("editor only loads bezier-basis cages");
        }
        return c.points.map((p): Pt => [p[0], p[1]]);
    });
}

export function cageToJson(cage: BezierCage): CageJson {
    return {
        curves: cage.map((pts) => ({
            basis: "bezier",
            points: pts.map((p) => [p[0], p[1]]),
        })),
    };
}

export function cloneCage(cage: BezierCage): BezierCage {
    return cage.map((pts) => pts.map((p): Pt => [p[0], p[1]]));
}

/** Largest joint gap between consecutive curves (0 for a closed cage). */
export function maxClosureGap(cage: BezierCage): number {
    let worst = 0;
    for (let k = 0; k < cage.length; k++) {
        const next = cage[(k + 1) % cage.length];
        worst = Math.max(worst, dist(cage[k][cage[k].length - 1], next[0]));
    }
    return worst;
}

/**
 * Move one control point, returning a new cage.
 *
 * Endpoints are shared joints: dragging a curve's first point also moves
 * the previous curve's last point (and vice versa), so the cage can never
 * open while dragging.
 */
export function dragControlPoint(
    cage: BezierCage,
    curve: number,
    point: number,
    to: Pt,
): BezierCage {
    const out = cloneCage(cage);
    const pts = out[curve];
    pts[point] = [to[0], to[1]];
    const n = out.length;
    if (point === 0) {
        const prev = out[(curve - 1 + n) % n];
        prev[prev.length - 1] = [to[0], to[1]];
    } else if (point === pts.length - 1) {
        out[(curve + 1) % n][0] = [to[0], to[1]];
    }
    return out;
}

/** Convert every curve to the given order (elevation exact, reduction LS). */
export function convertOrder(cage: BezierCage, order: number): BezierCage {
    return cage.map((pts) =>
        pts.length - 1 <= order ? elevateDegree(pts, order) : lowerDegree(pts, order),
    );
}

/** Hit test against all control points; returns [curve, point] or null. */
export function pickControlPoint(
    cage: BezierCage,
    at: Pt,
    radius: number,
): [number, number] | null {
    let best: [number, number] | null = null;
    let bestD = radius;
    cage.forEach((pts, ci) => {
        pts.forEach((p, pi) => {
            const d = dist(p, at);
            if (d <= bestD) {
                bestD = d;
                best = [ci, pi];
            }
        });
    });
    return best;
}
