import { SessionClient } from "./api";
import {
    BezierCage,
    cageToJson,
    cloneCage,
    convertOrder,
    dragControlPoint,
    parseCage,
    pickControlPoint,
} from "./cage";
import { DeformScheduler } from "./scheduler";
import { Pt, bezierPoint } from "./geometry";

const PICK_RADIUS = 8;

interface Mesh {
    rest: number[][];
    triangles: number[][];
}

/** Canvas editor: drag control points, preview the warp live. */
export class Editor {
    private client: SessionClient;
    private ctx: CanvasRenderingContext2D;
    private image: HTMLImageElement | null = null;
    private restCage: BezierCage | null = null;
    private cage: BezierCage | null = null;
    private sessionId: string | null = null;
    private mesh: Mesh | null = null;
    private deformed: number[][] | null = null;
    private drag: [number, number] | null = null;
    private targetOrder = 3;
    private scheduler: DeformScheduler<BezierCage, number[][]>;
    private banner: (msg: string) => void;

    constructor(
        private canvas: HTMLCanvasElement,
        serviceUrl: string,
        banner: (msg: string) => void = () => {},
    ) {
        this.client = new SessionClient(serviceUrl);
        this.banner = banner;
        const ctx = canvas.getContext("2d");
        if (!ctx) throw new Error("2d canvas context unavailable");
        this.ctx = ctx;
        this.scheduler = new DeformScheduler(
            (cage) => this.client.updateCage(this.sessionId!, cage),
            (grid) => {
                this.deformed = grid;
                this.render();
            },
            (err) => this.banner(`deform failed: ${err}`),
        );
        canvas.addEventListener("pointerdown", (e) => this.onDown(e));
        canvas.addEventListener("pointermove", (e) => this.onMove(e));
        canvas.addEventListener("pointerup", () => (this.drag = null));
    }

    async load(image: HTMLImageElement, cageDoc: unknown): Promise<void> {
        const cage = convertOrder(parseCage(cageDoc as never), this.targetOrder);
        this.image = image;
        this.canvas.width = image.width;
        this.canvas.height = image.height;
        await this.openSession(cage);
    }

    private async openSession(cage: BezierCage): Promise<void> {
        try {
            if (this.sessionId) await this.client.deleteSession(this.sessionId);
            const created = await this.client.createSession(
                cageToJson(cage),
                64,
                this.targetOrder,
            );
            this.sessionId = created.id;
            this.mesh = { rest: created.rest_grid, triangles: created.triangles };
            this.restCage = cloneCage(cage);
            this.cage = cloneCage(cage);
            this.deformed = created.rest_grid;
            this.render();
        } catch (err) {
            this.banner(String(err));
        }
    }

    async setTargetOrder(order: number): Promise<void> {
        if (order < 1 || order > 8 || !this.cage) return;
        this.targetOrder = order;
        await this.openSession(convertOrder(this.cage, order));
    }

    reset(): void {
        if (!this.restCage) return;
        this.cage = cloneCage(this.restCage);
        this.scheduler.submit(this.cage);
        this.render();
    }

    private canvasPos(e: PointerEvent): Pt {
        const r = this.canvas.getBoundingClientRect();
        return [e.clientX - r.left, e.clientY - r.top];
    }

    private onDown(e: PointerEvent): void {
        if (!this.cage) return;
        this.drag = pickControlPoint(this.cage, this.canvasPos(e), PICK_RADIUS);
    }

    private onMove(e: PointerEvent): void {
        if (!this.drag || !this.cage) return;
        const [c, p] = this.drag;
        this.cage = dragControlPoint(this.cage, c, p, this.canvasPos(e));
        this.scheduler.submit(this.cage);
        this.render();
    }

    /** Draw the warped image as textured triangles, then the cage overlay. */
    private render(): void {
        const { ctx, image, mesh, deformed } = this;
        ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
        if (image && mesh && deformed) {
            for (const [a, b, c] of mesh.triangles) {
                drawTexturedTriangle(
                    ctx, image,
                    mesh.rest[a], mesh.rest[b], mesh.rest[c],
                    deformed[a], deformed[b], deformed[c],
                );
            }
        }
        if (this.cage) this.drawCage();
    }

    private drawCage(): void {
        const { ctx } = this;
        ctx.save();
        ctx.strokeStyle = "#2266cc";
        ctx.lineWidth = 1.5;
        for (const pts of this.cage!) {
            ctx.beginPath();
            ctx.moveTo(pts[0][0], pts[0][1]);
            for (let s = 1; s <= 24; s++) {
                const q = bezierPoint(pts, s / 24);
                ctx.lineTo(q[0], q[1]);
            }
            ctx.stroke();
            ctx.fillStyle = "#cc3322";
            for (const p of pts) {
                ctx.beginPath();
                ctx.arc(p[0], p[1], 3, 0, 2 * Math.PI);
                ctx.fill();
            }
        }
        ctx.restore();
    }
}

/** Map one source triangle of the image onto a destination triangle. */
export function drawTexturedTriangle(
    ctx: CanvasRenderingContext2D,
    img: CanvasImageSource,
    s0: number[], s1: number[], s2: number[],
    d0: number[], d1: number[], d2: number[],
): void {
    const den =
        (s1[0] - s0[0]) * (s2[1] - s0[1]) - (s2[0] - s0[0]) * (s1[1] - s0[1]);
    if (Math.abs(den) < 1e-12) return;
    // affine transform taking the source triangle to the destination one
    const a = ((d1[0] - d0[0]) * (s2[1] - s0[1]) - (d2[0] - d0[0]) * (s1[1] - s0[1])) / den;
    const b = ((d1[1] - d0[1]) * (s2[1] - s0[1]) - (d2[1] - d0[1]) * (s1[1] - s0[1])) / den;
    const c = ((d2[0] - d0[0]) * (s1[0] - s0[0]) - (d1[0] - d0[0]) * (s2[0] - s0[0])) / den;
    const d = ((d2[1] - d0[1]) * (s1[0] - s0[0]) - (d1[1] - d0[1]) * (s2[0] - s0[0])) / den;
    const e = d0[0] - a * s0[0] - c * s0[1];
    const f = d0[1] - b * s0[0] - d * s0[1];
    ctx.save();
    ctx.beginPath();
    ctx.moveTo(d0[0], d0[1]);
    ctx.lineTo(d1[0], d1[1]);
    ctx.lineTo(d2[0], d2[1]);
    ctx.closePath();
    ctx.clip();
    ctx.transform(a, b, c, d, e, f);
    ctx.drawImage(img, 0, 0);
    ctx.restore();
}
