// Typed client for the advisory service. The UI never computes advice
// locally: every decision shown comes from a server response, and the
// region payload is kept as the verbatim bytes the server sent.

export interface ProblemDescriptor {
    name: string;
    id: string;
    params: Record<string, string>;
    doc: string;
}

export interface RegionPayload {
    problem: string;
    params: Record<string, unknown>;
    value: number;
    nu: number;
    max_rank: number;
    t: number[];
    threshold: (number | null)[];
    curves: Record<string, (number | null)[]>;
    islands: Record<string, [number, number][]>;
}

export interface SessionSummary {
    id: string;
    problem: string;
    params: Record<string, unknown>;
    nu: number;
    value: number;
    orientation: string;
    t: number;
    history: number[];
    state: "active" | "stopped" | "exhausted";
    stopped_at?: number;
    region?: RegionPayload;
}

export interface Advice {
    t: number;
    r: number;
    y?: number;
    threshold?: number | null;
    advice: "stop" | "continue" | null;
    stop_value_estimate?: number;
    value_to_go_if_continue?: number | null;
    state: "active" | "stopped" | "exhausted";
    history?: number[];
    note?: string;
}

export class ApiError extends Error {
    constructor(readonly status: number, message: string) {
        super(message);
    }
}

async function asJson<T>(resp: Response): Promise<T> {
    const text = await resp.text();
    let doc: unknown;
    try {
        doc = JSON.parse(text);
    } catch {
        throw new ApiError(resp.status, `malformed response: ${text.slice(0, 120)}`);
    }
    if (!resp.ok) {
        const msg = (doc as { message?: string }).message ?? resp.statusText;
        throw new ApiError(resp.status, msg);
    }
    return doc as T;
}

export class AdvisorClient {
    constructor(readonly baseUrl: string) {}

    private url(path: string): string {
        return this.baseUrl.replace(/\/$/, "") + path;
    }

    async listProblems(): Promise<ProblemDescriptor[]> {
        const doc = await asJson<{ problems: ProblemDescriptor[] }>(
            await fetch(this.url("/problems")));
        return doc.problems;
    }

    async createSession(spec: Record<string, unknown>): Promise<SessionSummary> {
        return asJson(await fetch(this.url("/sessions"), {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(spec),
        }));
    }

    async session(id: string): Promise<SessionSummary> {
        return asJson(await fetch(this.url(`/sessions/${id}`)));
    }

    async observe(id: string, r: number,
                  opts: { accept?: boolean; dryRun?: boolean } = {}): Promise<Advice> {
        const body: Record<string, unknown> = { r };
        if (opts.accept) body.accept = true;
        if (opts.dryRun) body.dry_run = true;
        return asJson(await fetch(this.url(`/sessions/${id}/observe`), {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        }));
    }

    whatIf(id: string, r: number): Promise<Advice> {
        return this.observe(id, r, { dryRun: true });
    }

    /** Region payload plus the exact bytes the server sent. */
    async regionRaw(id: string): Promise<{ payload: RegionPayload; raw: string }> {
        const resp = await fetch(this.url(`/sessions/${id}/region`));
        const raw = await resp.text();
        if (!resp.ok) {
            const msg = (JSON.parse(raw) as { message?: string }).message ?? "";
            throw new ApiError(resp.status, msg);
        }
        return { payload: JSON.parse(raw) as RegionPayload, raw };
    }
}
