// Local form validation before any request leaves the browser.

export interface ProblemConfig {
    problem: string;
    n?: number;
    k?: number;
    horizon?: {
        type: string;
        n_max?: number;
        alpha?: number;
        gamma?: string[];
    };
}

const GAMMA_TOL = 1e-9;

export function validateConfig(cfg: ProblemConfig): string[] {
    const errors: string[] = [];
    if (!cfg.problem) {
        errors.push("choose a problem");
    }
    if (cfg.n !== undefined && (!Number.isInteger(cfg.n) || cfg.n < 1)) {
        errors.push("n must be an integer >= 1");
    }
    if (cfg.k !== undefined) {
        if (!Number.isInteger(cfg.k) || cfg.k < 1) {
            errors.push("k must be an integer >= 1");
        } else {
            const bound = cfg.n ?? cfg.horizon?.n_max ??
                (cfg.horizon?.gamma ? cfg.horizon.gamma.length : undefined);
            if (bound !== undefined && cfg.k > bound) {
                errors.push(`k must not exceed the horizon bound ${bound}`);
            }
        }
    }
    const hz = cfg.horizon;
    if (hz) {
        if (hz.n_max !== undefined && (!Number.isInteger(hz.n_max) || hz.n_max < 1)) {
            errors.push("n_max must be an integer >= 1");
        }
        if (hz.type === "pettitt" && (hz.alpha === undefined || hz.alpha <= 0)) {
            errors.push("alpha must be > 0");
        }
        if (hz.type === "explicit") {
            const gamma = (hz.gamma ?? []).map(Number);
            if (gamma.length === 0 || gamma.some((g) => !Number.isFinite(g) || g < 0)) {
                errors.push("gamma entries must be finite and >= 0");
            } else {
                const total = gamma.reduce((a, b) => a + b, 0);
                if (Math.abs(total - 1) > GAMMA_TOL) {
                    errors.push(`gamma must sum to 1 (got ${total})`);
                }
            }
        }
    }
    return errors;
}

/** Hypothetical ranks available at time t (1..t). */
export function rankCandidates(t: number): number[] {
    return Array.from({ length: t }, (_, i) => i + 1);
}
