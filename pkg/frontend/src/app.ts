// DOM glue: configuration form, advice panel, what-if panel, region chart.
// All numbers shown are server responses relayed verbatim.

import { AdvisorClient, Advice, ApiError } from "./api.js";
import { RegionChart } from "./chart.js";
import { SessionView } from "./state.js";
import { ProblemConfig, rankCandidates, validateConfig } from "./validate.js";

const RANK_PROBLEMS = ["classical", "gusein_zade", "postdoc", "chow",
    "squared_rank", "csp_random", "gusein_random", "pettitt"];

function el<K extends keyof HTMLElementTagNameMap>(
        tag: K, attrs: Record<string, string> = {}, text = ""): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
    if (text) node.textContent = text;
    return node;
}

export class App {
    private client: AdvisorClient;
    private session: SessionView | null = null;
    private chart: RegionChart | null = null;

    constructor(private readonly root: HTMLElement,
                baseUrl = "http://127.0.0.1:8787") {
        this.client = new AdvisorClient(baseUrl);
        this.renderForm();
    }

    private renderForm(): void {
        this.root.innerHTML = "";
        const form = el("form", { id: "config" });
        form.append(
            el("label", {}, "service URL "),
            el("input", { id: "base", value: this.client.baseUrl, size: "28" }),
            el("label", {}, " problem "),
        );
        const select = el("select", { id: "problem" });
        for (const name of RANK_PROBLEMS) {
            select.append(el("option", { value: name }, name));
        }
        form.append(select,
            el("label", {}, " n "), el("input", { id: "n", value: "100", size: "6" }),
            el("label", {}, " k "), el("input", { id: "k", size: "4" }),
            el("label", {}, " horizon "));
        const hz = el("select", { id: "horizon" });
        for (const name of ["fixed", "uniform", "zib_mixture", "u_shaped", "pettitt"]) {
            hz.append(el("option", { value: name }, name));
        }
        form.append(hz,
            el("label", {}, " alpha "), el("input", { id: "alpha", size: "4" }),
            el("button", { type: "submit" }, "start session"));
        const errors = el("div", { id: "errors", class: "errors" });
        form.addEventListener("submit", (ev) => {
            ev.preventDefault();
            void this.start(errors);
        });
        this.root.append(form, errors,
            el("div", { id: "summary" }), el("div", { id: "advice" }),
            el("div", { id: "whatif" }), el("div", { id: "chart" }));
    }

    private readConfig(): ProblemConfig {
        const val = (id: string) =>
            (this.root.querySelector(`#${id}`) as HTMLInputElement | HTMLSelectElement).value;
        const cfg: ProblemConfig = { problem: val("problem") };
        const n = val("n");
        const k = val("k");
        const hz = val("horizon");
        if (hz === "fixed") {
            if (n) cfg.n = Number(n);
        } else {
            cfg.horizon = { type: hz };
            if (n) cfg.horizon.n_max = Number(n);
            const alpha = val("alpha");
            if (alpha) cfg.horizon.alpha = Number(alpha);
        }
        if (k) cfg.k = Number(k);
        return cfg;
    }

    async start(errorBox: HTMLElement): Promise<void> {
        errorBox.textContent = "";
        const base = (this.root.querySelector("#base") as HTMLInputElement).value;
        this.client = new AdvisorClient(base);
        const cfg = this.readConfig();
        const problems = validateConfig(cfg);
        if (problems.length > 0) {
            errorBox.textContent = problems.join("; ");   // no request leaves
            return;
        }
        try {
            this.session = await SessionView.start(
                this.client, cfg as unknown as Record<string, unknown>);
        } catch (err) {
            errorBox.textContent = err instanceof ApiError
                ? `server ${err.status}: ${err.message}` : String(err);
            return;
        }
        this.chart = new RegionChart(this.session.region!,
                                     this.session.regionRawBytes!);
        this.renderSession();
    }

    private renderSession(): void {
        const s = this.session!;
        const summary = this.root.querySelector("#summary")!;
        summary.innerHTML = "";
        summary.append(
            el("p", {}, `session ${s.id}  ${s.problem}  horizon bound ${s.nu}`),
            el("p", {}, `optimal value (${s.orientation}): ${s.value}`),
        );
        this.renderAdvicePanel();
        const chartBox = this.root.querySelector("#chart")!;
        chartBox.innerHTML = this.chart!.svg();
    }

    private renderAdvicePanel(): void {
        const s = this.session!;
        const box = this.root.querySelector("#advice")!;
        box.innerHTML = "";
        if (s.terminal) {
            const a = s.latestAdvice;
            box.append(el("p", { class: "terminal" },
                s.state === "stopped"
                    ? `accepted at t=${s.history.length}`
                    : `process ended (${a?.note ?? "horizon exhausted"})`));
            return;
        }
        box.append(el("p", {}, `t = ${s.t}; enter the observed relative rank (1..${s.t})`));
        const input = el("input", { id: "rank", size: "4" });
        const submit = el("button", {}, "submit");
        const accept = el("button", {}, "accept this one");
        const whatif = el("button", {}, "what-if");
        const msg = el("span", { id: "advice-msg" });
        submit.addEventListener("click", () => void this.onRank(input.value, false, msg));
        accept.addEventListener("click", () => void this.onRank(input.value, true, msg));
        whatif.addEventListener("click", () => void this.onWhatIf());
        box.append(input, submit, accept, whatif, msg);
        if (s.randomHorizon) {
            const ended = el("button", {}, "process ended (rank 0)");
            ended.addEventListener("click", () => void this.onEnded());
            box.append(ended);
        }
    }

    private async onRank(text: string, accept: boolean, msg: HTMLElement): Promise<void> {
        const s = this.session!;
        const r = Number(text);
        if (!s.validRank(r)) {
            msg.textContent = ` rank must lie in 1..${s.t}`;   // blocked client-side
            return;
        }
        const t = s.t;
        const advice = await s.submitRank(r, accept);
        msg.textContent = ` advice: ${advice.advice}`
            + ` (y=${advice.y}, threshold=${advice.threshold ?? "always stop"}`
            + `, continue pays ${advice.value_to_go_if_continue ?? "nothing further"})`;
        const chartBox = this.root.querySelector("#chart")!;
        chartBox.innerHTML = this.chart!.svg()
            + (advice.y !== undefined ? this.chart!.marker(t, advice.y) : "");
        this.renderAdvicePanel();
        this.root.querySelector("#advice")!.append(msg);
    }

    private async onWhatIf(): Promise<void> {
        const s = this.session!;
        const panel = this.root.querySelector("#whatif")!;
        panel.innerHTML = "";
        const advices = await s.whatIf();
        const table = el("table");
        table.append(el("caption", {},
            `what-if at t = ${s.t} (${rankCandidates(s.t).length} candidates)`));
        for (const a of advices) {
            const row = el("tr");
            row.append(el("td", {}, `r=${a.r}`),
                       el("td", {}, String(a.advice)),
                       el("td", {}, `y=${a.y}`));
            table.append(row);
        }
        panel.append(table);
    }

    private async onEnded(): Promise<void> {
        await this.session!.reportProcessEnded();
        this.renderAdvicePanel();
    }
}
