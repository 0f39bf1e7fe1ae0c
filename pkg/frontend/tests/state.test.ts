// Unit tests with a stubbed fetch: local validation, state mirroring,
// and the no-local-advice rule.

import { afterEach, describe, expect, it, vi } from "vitest";

import { AdvisorClient, ApiError } from "../src/api.js";
import { SessionView } from "../src/state.js";
import { rankCandidates, validateConfig } from "../src/validate.js";

const SUMMARY = {
    id: "abc123", problem: "classical", params: { n: 4 }, nu: 4,
    value: 0.4583333333333333, orientation: "probability",
    t: 1, history: [], state: "active" as const,
};

const REGION = {
    problem: "classical", params: { n: 4 }, value: SUMMARY.value,
    nu: 4, max_rank: 1, t: [1, 2, 3, 4],
    threshold: [0.4, 0.3, 0.25, null],
    curves: { "1": [0.25, 0.5, 0.75, 1.0] },
    islands: { "1": [[3, 4]] },
};

function stubFetch(routes: Record<string, { status?: number; body: unknown }>) {
    const calls: { url: string; body?: unknown }[] = [];
    vi.stubGlobal("fetch", async (url: string, init?: RequestInit) => {
        const key = Object.keys(routes).find((k) => url.endsWith(k));
        calls.push({ url, body: init?.body ? JSON.parse(String(init.body)) : undefined });
        if (!key) {
            return new Response(JSON.stringify({ code: 404, message: "no route" }),
                                { status: 404 });
        }
        const { status = 200, body } = routes[key];
        return new Response(JSON.stringify(body), { status });
    });
    return calls;
}

afterEach(() => {
    vi.unstubAllGlobals();
});

describe("validateConfig", () => {
    it("accepts a plain fixed-horizon problem", () => {
        expect(validateConfig({ problem: "classical", n: 100 })).toStrictEqual([]);
    });

    it("rejects n below one", () => {
        expect(validateConfig({ problem: "classical", n: 0 })).toHaveLength(1);
    });

    it("rejects k above the horizon bound", () => {
        const errs = validateConfig({ problem: "gusein_zade", n: 5, k: 6 });
        expect(errs.join(" ")).toContain("k must not exceed");
    });

    it("rejects a gamma vector that does not sum to one", () => {
        const errs = validateConfig({
            problem: "csp_random",
            horizon: { type: "explicit", gamma: ["0.5", "0.2"] },
        });
        expect(errs.join(" ")).toContain("sum to 1");
    });

    it("bad gamma never produces a request", async () => {
        const calls = stubFetch({});
        const errs = validateConfig({
            problem: "csp_random",
            horizon: { type: "explicit", gamma: ["0.9", "0.2"] },
        });
        expect(errs.length).toBeGreaterThan(0);
        expect(calls).toHaveLength(0);   // validation is purely local
    });

    it("pettitt horizon needs a positive alpha", () => {
        const errs = validateConfig({
            problem: "pettitt", horizon: { type: "pettitt", n_max: 10, alpha: 0 },
        });
        expect(errs.join(" ")).toContain("alpha");
    });
});

describe("rank candidates", () => {
    it("single candidate at the first step", () => {
        expect(rankCandidates(1)).toStrictEqual([1]);
    });

    it("t candidates at time t", () => {
        expect(rankCandidates(4)).toStrictEqual([1, 2, 3, 4]);
    });
});

describe("SessionView", () => {
    it("mirrors the server summary and region verbatim", async () => {
        stubFetch({
            "/sessions": { body: SUMMARY },
            [`/sessions/${SUMMARY.id}/region`]: { body: REGION },
        });
        const view = await SessionView.start(new AdvisorClient("http://x"), {
            problem: "classical", n: 4,
        });
        expect(view.t).toBe(1);
        expect(view.value).toBe(SUMMARY.value);
        expect(view.region).toStrictEqual(REGION);
        expect(JSON.parse(view.regionRawBytes!)).toStrictEqual(REGION);
    });

    it("blocks out-of-range ranks before any request", async () => {
        const calls = stubFetch({
            "/sessions": { body: SUMMARY },
            [`/sessions/${SUMMARY.id}/region`]: { body: REGION },
        });
        const view = await SessionView.start(new AdvisorClient("http://x"), {});
        const before = calls.length;
        await expect(view.submitRank(2)).rejects.toThrow("1..1");
        expect(calls.length).toBe(before);
    });

    it("advances only on the server's say-so", async () => {
        stubFetch({
            "/sessions": { body: SUMMARY },
            [`/sessions/${SUMMARY.id}/region`]: { body: REGION },
            [`/sessions/${SUMMARY.id}/observe`]: {
                body: { t: 1, r: 1, y: 0.25, threshold: 0.4, advice: "continue",
                        state: "active", history: [1],
                        value_to_go_if_continue: 0.44 },
            },
        });
        const view = await SessionView.start(new AdvisorClient("http://x"), {});
        const advice = await view.submitRank(1);
        expect(advice.advice).toBe("continue");
        expect(view.t).toBe(2);                   // history length + 1
        expect(view.history).toStrictEqual([1]);
        expect(view.latestAdvice).toBe(advice);   // displayed, not recomputed
    });

    it("terminal sessions refuse further ranks", async () => {
        stubFetch({
            "/sessions": { body: { ...SUMMARY, state: "stopped" } },
            [`/sessions/${SUMMARY.id}/region`]: { body: REGION },
        });
        const view = await SessionView.start(new AdvisorClient("http://x"), {});
        await expect(view.submitRank(1)).rejects.toThrow("stopped");
    });

    it("surfaces server errors with their status", async () => {
        stubFetch({
            "/sessions": { status: 400, body: { code: 400, message: "bad gamma" } },
        });
        await expect(SessionView.start(new AdvisorClient("http://x"), {}))
            .rejects.toThrowError(ApiError);
    });
});
