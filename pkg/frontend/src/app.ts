// Step-by-step elicitation wizard: create a session, answer one comparison
// at a time ("which bundle do you prefer?"), then review the allocation.
//
// The view is a pure function of the latest server response; polling keeps
// it mirrored while a query is open. Bundles render as labeled chips and
// never show numeric values, because the model has none to show.

import { ApiError, SessionApi, SessionReport, SessionState } from "./api.js";

export interface AppOptions {
  pollMs?: number; // 0 disables polling (tests drive steps manually)
}

export class App {
  private api: SessionApi;
  private root: HTMLElement;
  private pollMs: number;
  private sessionId: string | null = null;
  private submitting = false;
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  constructor(root: HTMLElement, api: SessionApi, options: AppOptions = {}) {
    this.root = root;
    this.api = api;
    this.pollMs = options.pollMs ?? 1000;
    this.renderCreateForm();
  }

  // ---- create ------------------------------------------------------------

  renderCreateForm(errorText = ""): void {
    this.stopPolling();
    this.root.innerHTML = `
      <form class="create" aria-label="new session">
        <h1>fairdiv</h1>
        <label>algorithm
          <select name="algorithm">
            <option value="ef1-2">ef1-2 (two agents)</option>
            <option value="ef1-3">ef1-3 (three agents)</option>
            <option value="ef1-identical">ef1-identical</option>
            <option value="prop1">prop1</option>
            <option value="prop1-identical">prop1-identical</option>
            <option value="prop1-mms">prop1-mms</option>
          </select>
        </label>
        <label>agents <input name="n" type="number" min="1" value="2"></label>
        <label>items (comma separated)
          <input name="items" value="book, lamp, mug, plant">
        </label>
        <button type="submit">start</button>
        <p class="error" role="alert">${errorText}</p>
      </form>`;
    const form = this.root.querySelector("form")!;
    form.addEventListener("submit", (event) => {
      event.preventDefault();
      const data = new FormData(form);
      const labels = String(data.get("items") ?? "")
        .split(",")
        .map((s) => s.trim())
        .filter((s) => s.length > 0);
      void this.createSession({
        algorithm: String(data.get("algorithm")),
        n: Number(data.get("n")),
        item_labels: labels,
      });
    });
  }

  async createSession(request: { algorithm: string; n: number; item_labels: string[] }): Promise<void> {
    try {
      const state = await this.api.createSession(request);
      this.sessionId = state.session;
      await this.showState(state);
    } catch (err) {
      this.renderCreateForm(err instanceof ApiError ? err.message : String(err));
    }
  }

  // ---- query screen --------------------------------------------------------

  private async showState(state: SessionState): Promise<void> {
    if (state.status === "finished") {
      this.stopPolling();
      const report = await this.api.getReport(state.session);
      this.renderResults(report);
      return;
    }
    this.renderQuery(state);
    this.startPolling();
  }

  renderQuery(state: Extract<SessionState, { status: "pending" }>): void {
    const chips = (labels: string[]) =>
      labels.length === 0
        ? `<span class="chip empty">nothing</span>`
        : labels.map((l) => `<span class="chip">${l}</span>`).join("");
    this.root.innerHTML = `
      <section class="query" aria-live="polite">
        <p class="progress">query ${state.answered + 1} &middot; answering as agent ${state.agent}</p>
        <h2>Which bundle do you prefer?</h2>
        <div class="choices">
          <button class="bundle" data-choice="x" accesskey="x" aria-keyshortcuts="x">
            <span class="key">x</span><div class="items">${chips(state.x_labels)}</div>
          </button>
          <button class="bundle" data-choice="y" accesskey="y" aria-keyshortcuts="y">
            <span class="key">y</span><div class="items">${chips(state.y_labels)}</div>
          </button>
        </div>
        <p class="error" role="alert"></p>
      </section>`;
    for (const button of this.root.querySelectorAll<HTMLButtonElement>("button.bundle")) {
      button.addEventListener("click", () => {
        void this.answer(button.dataset.choice as "x" | "y");
      });
    }
    this.root.querySelector("section")!.addEventListener("keydown", (event) => {
      const key = (event as KeyboardEvent).key;
      if (key === "x" || key === "y") void this.answer(key);
    });
  }

  async answer(choice: "x" | "y"): Promise<void> {
    if (this.submitting || !this.sessionId) return; // double-submit guard
    this.submitting = true;
    for (const b of this.root.querySelectorAll<HTMLButtonElement>("button.bundle")) {
      b.disabled = true;
    }
    try {
      const state = await this.api.answer(this.sessionId, choice);
      await this.showState(state);
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // somebody answered first: re-fetch the authoritative state
        await this.refresh();
      } else {
        const slot = this.root.querySelector(".error");
        if (slot) slot.textContent = err instanceof ApiError ? err.message : String(err);
        for (const b of this.root.querySelectorAll<HTMLButtonElement>("button.bundle")) {
          b.disabled = false;
        }
      }
    } finally {
      this.submitting = false;
    }
  }

  async refresh(): Promise<void> {
    if (!this.sessionId || this.submitting) return;
    const state = await this.api.getQuery(this.sessionId);
    await this.showState(state);
  }

  private startPolling(): void {
    if (this.pollTimer !== null || this.pollMs <= 0) return;
    this.pollTimer = setInterval(() => void this.refresh(), this.pollMs);
  }

  private stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  // ---- results -------------------------------------------------------------

  renderResults(report: SessionReport): void {
    const agents = Object.keys(report.allocation_labels).sort((a, b) => Number(a) - Number(b));
    const cards = agents
      .map((agent) => {
        const labels = report.allocation_labels[agent];
        const body =
          labels.length === 0
            ? `<span class="chip empty" title="nothing (PROP1 via hypothetical item)">nothing</span>`
            : labels.map((l) => `<span class="chip">${l}</span>`).join("");
        return `<div class="card" data-agent="${agent}">
            <h3>agent ${agent}</h3><div class="items">${body}</div>
          </div>`;
      })
      .join("");
    this.root.innerHTML = `
      <section class="results">
        <h2>Allocation</h2>
        <p><span class="badge" data-testid="query-count">${report.total_queries}</span>
           comparisons answered</p>
        <div class="cards">${cards}</div>
        <button class="again">start another session</button>
      </section>`;
    this.root.querySelector("button.again")!.addEventListener("click", () => {
      this.sessionId = null;
      this.renderCreateForm();
    });
  }
}
