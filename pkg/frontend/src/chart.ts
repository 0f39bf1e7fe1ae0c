// SVG region chart: the moving threshold and the per-rank observable
// curves share one axis, stop islands are shaded per rank. Rendered from
// the verbatim /region payload; the chart never rescales or mutates the
// data it was given.

import { RegionPayload } from "./api.js";

const CURVE_COLORS = ["#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"];
const THRESHOLD_COLOR = "#d62728";

export class RegionChart {
    constructor(readonly payload: RegionPayload, readonly rawBytes: string) {}

    private extent(): { lo: number; hi: number } {
        let lo = Infinity;
        let hi = -Infinity;
        const see = (v: number | null) => {
            if (v !== null && Number.isFinite(v)) {
                lo = Math.min(lo, v);
                hi = Math.max(hi, v);
            }
        };
        this.payload.threshold.forEach(see);
        Object.values(this.payload.curves).forEach((c) => c.forEach(see));
        if (!Number.isFinite(lo)) {
            lo = 0;
            hi = 1;
        }
        if (hi === lo) {
            hi = lo + 1;
        }
        return { lo, hi };
    }

    svg(width = 720, height = 360, pad = 36): string {
        const { nu } = this.payload;
        const { lo, hi } = this.extent();
        const x = (t: number) => pad + ((t - 1) / Math.max(nu - 1, 1)) * (width - 2 * pad);
        const y = (v: number) => height - pad - ((v - lo) / (hi - lo)) * (height - 2 * pad);
        const parts: string[] = [];
        parts.push(`<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 ${width} ${height}" `
            + `width="${width}" height="${height}" role="img">`);
        for (const [rank, spans] of Object.entries(this.payload.islands)) {
            const idx = (Number(rank) - 1) % CURVE_COLORS.length;
            for (const [a, b] of spans) {
                parts.push(`<rect x="${x(a) - 2}" y="${pad}" `
                    + `width="${Math.max(x(b) - x(a) + 4, 2)}" height="${height - 2 * pad}" `
                    + `fill="${CURVE_COLORS[idx]}" opacity="0.07" `
                    + `data-island="r${rank}:${a}-${b}"/>`);
            }
        }
        parts.push(this.polyline(
            this.payload.threshold, x, y, THRESHOLD_COLOR, "threshold"));
        for (const [rank, curve] of Object.entries(this.payload.curves)) {
            const idx = (Number(rank) - 1) % CURVE_COLORS.length;
            parts.push(this.polyline(curve, x, y, CURVE_COLORS[idx], `rank-${rank}`));
        }
        parts.push(`<text x="${width / 2}" y="${height - 8}" font-size="11" `
            + `text-anchor="middle">t</text>`);
        parts.push("</svg>");
        return parts.join("");
    }

    marker(t: number, value: number, width = 720, height = 360, pad = 36): string {
        const { nu } = this.payload;
        const { lo, hi } = this.extent();
        const cx = pad + ((t - 1) / Math.max(nu - 1, 1)) * (width - 2 * pad);
        const cy = height - pad - ((value - lo) / (hi - lo)) * (height - 2 * pad);
        return `<circle cx="${cx}" cy="${cy}" r="4" fill="black" data-marker="t${t}"/>`;
    }

    private polyline(values: (number | null)[],
                     x: (t: number) => number, y: (v: number) => number,
                     color: string, label: string): string {
        const segments: string[] = [];
        let current: string[] = [];
        values.forEach((v, i) => {
            if (v === null || !Number.isFinite(v)) {
                if (current.length > 1) segments.push(current.join(" "));
                current = [];
            } else {
                current.push(`${x(i + 1)},${y(v)}`);
            }
        });
        if (current.length > 1) segments.push(current.join(" "));
        return segments.map((pts) =>
            `<polyline points="${pts}" fill="none" stroke="${color}" `
            + `stroke-width="1.4" data-curve="${label}"/>`).join("");
    }
}
