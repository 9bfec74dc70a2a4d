import { BezierCage, CageJson } from "./cage";

export interface SessionCreated {
    id: string;
    rest_grid: number[][];
    triangles: number[][];
}

export interface SessionMeta {
    id: string;
    grid_res: number;
    target_order: number;
    n_points: number;
    n_curves: number;
    has_image: boolean;
}

export class ServiceError extends Error {
    constructor(public status: number, detail: string) {
        super(detail);
    }
}

type FetchLike = typeof fetch;

/** Thin client for the session service; all math stays on the server. */
export class SessionClient {
    constructor(
        private baseUrl: string,
        private fetchImpl: FetchLike = fetch,
    ) {}

    private async request(path: string, init?: RequestInit): Promise<Response> {
        const resp = await this.fetchImpl(`${this.baseUrl}${path}`, init);
        if (!resp.ok) {
            let detail = resp.statusText;
            try {
                const body = await resp.json();
                if (body && body.detail) detail = String(body.detail);
            } catch {
                /* non-JSON error body */
            }
            throw new ServiceError(resp.status, detail);
        }
        return resp;
    }

    async createSession(
        cage: CageJson,
        gridRes: number,
        targetOrder: number,
    ): Promise<SessionCreated> {
        const resp = await this.request("/sessions", {
            method: "POST",
            headers: { "content-type": "application/json" },
            body: JSON.stringify({
                cage,
                grid_res: gridRes,
                target_order: targetOrder,
            }),
        });
        return resp.json();
    }

    async updateCage(id: string, cage: BezierCage): Promise<number[][]> {
        const resp = await this.request(`/sessions/${id}/cage`, {
            method: "PUT",
            headers: { "content-type": "application/json" },
            body: JSON.stringify({ curves: cage, basis: "bezier" }),
        });
        return (await resp.json()).deformed_grid;
    }

    async getSession(id: string): Promise<SessionMeta> {
        return (await this.request(`/sessions/${id}`)).json();
    }

    async deleteSession(id: string): Promise<void> {
        await this.request(`/sessions/${id}`, { method: "DELETE" });
    }

    async uploadImage(id: string, file: Blob): Promise<void> {
        const form = new FormData();
        form.append("file", file, "image.png");
        await this.request(`/sessions/${id}/image`, { method: "POST", body: form });
    }
}
