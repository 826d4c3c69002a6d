// @vitest-environment happy-dom
// Wizard behavior against a scripted in-memory server double.

import { beforeEach, describe, expect, it } from "vitest";
import { ApiError, SessionApi, SessionReport, SessionState } from "../src/api.js";
import { App } from "../src/app.js";

function pending(answered: number, over: Partial<Extract<SessionState, { status: "pending" }>> = {}) {
  return {
    status: "pending" as const,
    session: "s1",
    agent: 0,
    x: [0],
    y: [1, 2],
    x_labels: ["book"],
    y_labels: ["lamp", "mug"],
    answered,
    ...over,
  };
}

const FINISHED: SessionState = {
  status: "finished",
  session: "s1",
  allocation: { bundles: { "0": [0], "1": [1, 2] }, pool: [] },
  total_queries: 2,
};

const REPORT: SessionReport = {
  session: "s1",
  algorithm: "ef1-2",
  allocation: { bundles: { "0": [0], "1": [1, 2] }, pool: [] },
  allocation_labels: { "0": ["book"], "1": ["lamp", "mug"] },
  query_counts: { "0": 1, "1": 1 },
  total_queries: 2,
  transcript: ["x", "y"],
};

class FakeApi extends SessionApi {
  answers: string[] = [];
  answerCalls = 0;
  conflictOnce = false;
  script: SessionState[];

  constructor(script: SessionState[]) {
    super("", (() => {
      throw new Error("network disabled in this double");
    }) as unknown as typeof fetch);
    this.script = script;
  }

  private current(): SessionState {
    return this.script[Math.min(this.answers.length, this.script.length - 1)];
  }

  override async createSession(): Promise<SessionState> {
    return this.current();
  }

  override async getQuery(): Promise<SessionState> {
    return this.current();
  }

  override async answer(_id: string, choice: "x" | "y"): Promise<SessionState> {
    this.answerCalls += 1;
    if (this.conflictOnce) {
      this.conflictOnce = false;
      throw new ApiError(409, "session has no pending query");
    }
    this.answers.push(choice);
    return this.current();
  }

  override async getReport(): Promise<SessionReport> {
    return REPORT;
  }
}

function mount(script: SessionState[]) {
  const root = document.createElement("div");
  document.body.appendChild(root);
  const api = new FakeApi(script);
  const app = new App(root, api, { pollMs: 0 });
  return { root, api, app };
}

describe("App wizard", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("shows the create form first and surfaces validation errors inline", async () => {
    const { root, api, app } = mount([pending(0)]);
    expect(root.querySelector("form.create")).toBeTruthy();
    api.createSession = async () => {
      throw new ApiError(400, "item labels must be unique");
    };
    await app.createSession({ algorithm: "ef1-2", n: 2, item_labels: ["a", "a"] });
    expect(root.querySelector(".error")!.textContent).toContain("unique");
  });

  it("renders the two-bundle choice screen after create", async () => {
    const { root, app } = mount([pending(0)]);
    await app.createSession({ algorithm: "ef1-2", n: 2, item_labels: ["book", "lamp", "mug"] });
    const buttons = root.querySelectorAll("button.bundle");
    expect(buttons).toHaveLength(2);
    expect(root.textContent).toContain("agent 0");
    const chips = root.querySelectorAll(".chip");
    expect(chips).toHaveLength(3); // book | lamp, mug
  });

  it("goes straight to results when the session starts finished", async () => {
    const { root, app } = mount([FINISHED]);
    await app.createSession({ algorithm: "prop1", n: 1, item_labels: ["book"] });
    expect(root.querySelector(".results")).toBeTruthy();
  });

  it("advances one answer at a time and lands on the results view", async () => {
    const { root, api, app } = mount([pending(0), pending(1), FINISHED]);
    await app.createSession({ algorithm: "ef1-2", n: 2, item_labels: ["book", "lamp", "mug"] });
    await app.answer("x");
    expect(root.textContent).toContain("query 2");
    await app.answer("y");
    expect(api.answers).toEqual(["x", "y"]);
    expect(root.querySelector(".results")).toBeTruthy();
    // badge equals the server-reported total
    expect(root.querySelector('[data-testid="query-count"]')!.textContent).toBe("2");
  });

  it("ignores a second submit while one is in flight", async () => {
    const { api, app } = mount([pending(0), pending(1)]);
    await app.createSession({ algorithm: "ef1-2", n: 2, item_labels: ["book", "lamp", "mug"] });
    const first = app.answer("x");
    const second = app.answer("y"); // double click
    await Promise.all([first, second]);
    expect(api.answerCalls).toBe(1);
  });

  it("refetches the current query on a 409 conflict", async () => {
    const { root, api, app } = mount([pending(3)]);
    await app.createSession({ algorithm: "ef1-2", n: 2, item_labels: ["book", "lamp", "mug"] });
    api.conflictOnce = true;
    await app.answer("x");
    expect(api.answers).toEqual([]); // nothing recorded
    expect(root.textContent).toContain("query 4"); // state re-mirrored from the server
  });

  it("is keyboard operable: x and y keys answer", async () => {
    const { root, api, app } = mount([pending(0), FINISHED]);
    await app.createSession({ algorithm: "ef1-2", n: 2, item_labels: ["book", "lamp", "mug"] });
    const section = root.querySelector("section.query")!;
    section.dispatchEvent(new KeyboardEvent("keydown", { key: "y", bubbles: true }));
    await new Promise((r) => setTimeout(r, 0));
    expect(api.answers).toEqual(["y"]);
  });

  it("renders empty bundles with the hypothetical-item tooltip", async () => {
    const { root, app } = mount([FINISHED]);
    await app.createSession({ algorithm: "ef1-2", n: 2, item_labels: ["book"] });
    const report = { ...REPORT, allocation_labels: { "0": [], "1": ["book"] } };
    app.renderResults(report);
    const empty = root.querySelector(".chip.empty")!;
    expect(empty.getAttribute("title")).toBe("nothing (PROP1 via hypothetical item)");
  });
});
