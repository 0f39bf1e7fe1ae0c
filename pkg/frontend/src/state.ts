// Client-side mirror of a server session. State only changes in response
// to a server round-trip; advice is never recomputed locally.

import { AdvisorClient, Advice, RegionPayload, SessionSummary } from "./api.js";
import { rankCandidates } from "./validate.js";

export class SessionView {
    readonly id: string;
    readonly problem: string;
    readonly nu: number;
    readonly value: number;
    readonly orientation: string;
    t: number;
    history: number[];
    state: "active" | "stopped" | "exhausted";
    latestAdvice: Advice | null = null;
    regionRawBytes: string | null = null;
    region: RegionPayload | null = null;

    constructor(private readonly client: AdvisorClient, summary: SessionSummary) {
        this.id = summary.id;
        this.problem = summary.problem;
        this.nu = summary.nu;
        this.value = summary.value;
        this.orientation = summary.orientation;
        this.t = summary.t;
        this.history = [...summary.history];
        this.state = summary.state;
    }

    static async start(client: AdvisorClient,
                       spec: Record<string, unknown>): Promise<SessionView> {
        const summary = await client.createSession(spec);
        const view = new SessionView(client, summary);
        await view.loadRegion();
        return view;
    }

    get terminal(): boolean {
        return this.state !== "active";
    }

    get randomHorizon(): boolean {
        // rank 0 (process ended) is only meaningful under a random horizon
        const hz = (this.region?.params as { horizon?: unknown })?.horizon;
        return hz !== undefined && (hz as { type?: string }).type !== "fixed";
    }

    validRank(r: number): boolean {
        return Number.isInteger(r) && r >= 1 && r <= this.t;
    }

    private apply(advice: Advice): Advice {
        this.latestAdvice = advice;
        this.state = advice.state;
        if (advice.history) {
            this.history = [...advice.history];
            // server invariant: an active session sits one past its history
            this.t = this.state === "active" ? this.history.length + 1 : this.t;
        }
        return advice;
    }

    /** Submit the observed rank; out-of-range ranks never reach the server. */
    async submitRank(r: number, accept = false): Promise<Advice> {
        if (this.terminal) {
            throw new Error(`session is ${this.state}`);
        }
        if (r === 0) {
            return this.reportProcessEnded();
        }
        if (!this.validRank(r)) {
            throw new Error(`rank must lie in 1..${this.t}`);
        }
        return this.apply(await this.client.observe(this.id, r, { accept }));
    }

    /** Random-horizon only: the observation process ended before selection. */
    async reportProcessEnded(): Promise<Advice> {
        const advice = await this.client.observe(this.id, 0);
        this.latestAdvice = advice;
        this.state = advice.state;
        return advice;
    }

    /** Dry-run advice for every hypothetical rank at the current time. */
    async whatIf(): Promise<Advice[]> {
        const out: Advice[] = [];
        for (const r of rankCandidates(this.t)) {
            out.push(await this.client.whatIf(this.id, r));
        }
        return out;
    }

    async loadRegion(): Promise<RegionPayload> {
        const { payload, raw } = await this.client.regionRaw(this.id);
        this.region = payload;
        this.regionRawBytes = raw;
        return payload;
    }

    /** Re-fetch the authoritative server state (consistency audits). */
    async sync(): Promise<SessionSummary> {
        const summary = await this.client.session(this.id);
        this.t = summary.t;
        this.history = [...summary.history];
        this.state = summary.state;
        return summary;
    }
}
