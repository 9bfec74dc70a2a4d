export type Pt = [number, number];

export function add(a: Pt, b: Pt): Pt {
    return [a[0] + b[0], a[1] + b[1]];
}

export function sub(a: Pt, b: Pt): Pt {
    return [a[0] - b[0], a[1] - b[1]];
}

export function scale(a: Pt, s: number): Pt {
    return [a[0] * s, a[1] * s];
}

export function dist(a: Pt, b: Pt): number {
    return Math.hypot(a[0] - b[0], a[1] - b[1]);
}

/** Evaluate a Bezier curve at t by de Casteljau subdivision. */
export function bezierPoint(ctrl: Pt[], t: number): Pt {
    let pts = ctrl.map((p): Pt => [p[0], p[1]]);
    while (pts.length > 1) {
        const next: Pt[] = [];
        for (let i = 0; i + 1 < pts.length; i++) {
            next.push([
                (1 - t) * pts[i][0] + t * pts[i + 1][0],
                (1 - t) * pts[i][1] + t * pts[i + 1][1],
            ]);
        }
        pts = next;
    }
    return pts[0];
}

/** One exact degree-elevation step: n+1 -> n+2 control points. */
function elevateOnce(ctrl: Pt[]): Pt[] {
    const n = ctrl.length - 1;
    const out: Pt[] = [ctrl[0]];
    for (let i = 1; i <= n; i++) {
        const w = i / (n + 1);
        out.push([
            w * ctrl[i - 1][0] + (1 - w) * ctrl[i][0],
            w * ctrl[i - 1][1] + (1 - w) * ctrl[i][1],
        ]);
    }
    out.push(ctrl[n]);
    return out;
}

/** Elevate a Bezier curve to the target order (exact, shape-preserving). */
export function elevateDegree(ctrl: Pt[], order: number): Pt[] {
    if (order < ctrl.length - 1) {
        throw new Error(`cannot elevate order ${ctrl.length - 1} curve to ${order}`);
    }
    let out = ctrl;
    while (out.length - 1 < order) {
        out = elevateOnce(out);
    }
    return out;
}

function binomial(n: number, k: number): number {
    let r = 1;
    for (let i = 0; i < k; i++) {
        r = (r * (n - i)) / (i + 1);
    }
    return r;
}

function bernstein(n: number, i: number, t: number): number {
    return binomial(n, i) * Math.pow(t, i) * Math.pow(1 - t, n - i);
}

/**
 * Least-squares degree reduction with pinned endpoints.
 *
 * Lowering the order genuinely changes the shape in general; this picks
 * the interior control points minimizing the sampled L2 deviation, which
 * is what the order selector needs for a sensible preview.
 */
export function lowerDegree(ctrl: Pt[], order: number): Pt[] {
    const n = ctrl.length - 1;
    if (order >= n) {
        return ctrl.map((p): Pt => [p[0], p[1]]);
    }
    if (order < 1) {
        throw new Error("target order must be >= 1");
    }
    const nSamples = 64;
    const free = order - 1; // interior control points to solve for
    const out: Pt[] = [ctrl[0]];
    if (free === 0) {
        out.push(ctrl[n]);
        return out;
    }
    // normal equations A^T A x = A^T b, per coordinate
    const ata: number[][] = Array.from({ length: free }, () => new Array(free).fill(0));
    const atb: Pt[] = Array.from({ length: free }, (): Pt => [0, 0]);
    for (let s = 0; s <= nSamples; s++) {
        const t = s / nSamples;
        const target = bezierPoint(ctrl, t);
        const fixed: Pt = [
            bernstein(order, 0, t) * ctrl[0][0] + bernstein(order, order, t) * ctrl[n][0],
            bernstein(order, 0, t) * ctrl[0][1] + bernstein(order, order, t) * ctrl[n][1],
        ];
        const resid = sub(target, fixed);
        const basis: number[] = [];
        for (let i = 1; i < order; i++) {
            basis.push(bernstein(order, i, t));
        }
        for (let i = 0; i < free; i++) {
            for (let j = 0; j < free; j++) {
                ata[i][j] += basis[i] * basis[j];
            }
            atb[i] = add(atb[i], scale(resid, basis[i]));
        }
    }
    const solX = solve(ata, atb.map((p) => p[0]));
    const solY = solve(ata, atb.map((p) => p[1]));
    for (let i = 0; i < free; i++) {
        out.push([solX[i], solY[i]]);
    }
    out.push(ctrl[n]);
    return out;
}

/** Gaussian elimination with partial pivoting for the small LS systems. */
function solve(a: number[][], b: number[]): number[] {
    const n = b.length;
    const m = a.map((row, i) => [...row, b[i]]);
    for (let col = 0; col < n; col++) {
        let piv = col;
        for (let r = col + 1; r < n; r++) {
            if (Math.abs(m[r][col]) > Math.abs(m[piv][col])) piv = r;
        }
        [m[col], m[piv]] = [m[piv], m[col]];
        if (Math.abs(m[col][col]) < 1e-14) {
            throw new Error("singular least-squares system");
        }
        for (let r = 0; r < n; r++) {
            if (r === col) continue;
            const f = m[r][col] / m[col][col];
            for (let c = col; c <= n; c++) {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    return m.map((row, i) => row[n] / m[i][i]);
}
