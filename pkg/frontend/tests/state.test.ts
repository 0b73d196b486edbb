// Response-order safety: whatever the network interleaving, the rendered
// page always corresponds to the newest completed request.

import { describe, expect, it } from "vitest";

import { applyError, applyResponse, beginRequest, initialState } from "../src/state.js";
import type { SearchResponse } from "../src/types.js";

function responseFor(query: string): SearchResponse {
  return {
    query,
    facets: { distribution: {}, specificity: 0, fetch_probability: 0 },
    groups: [],
    pills: [],
    timing_ms: 1,
    snapshot: 1,
  };
}

describe("sequence gating", () => {
  it("drops a response for 'so' arriving after 'son' rendered", () => {
    let state = initialState();
    const so = beginRequest(state, "so");
    state = so.state;
    const son = beginRequest(state, "son");
    state = son.state;

    const fresh = applyResponse(state, son.seq, responseFor("son"));
    state = fresh.state;
    expect(fresh.rendered).toBe(true);

    const stale = applyResponse(state, so.seq, responseFor("so"));
    expect(stale.rendered).toBe(false);
    expect(stale.state.page?.query).toBe("son");
  });

  it("renders in-order completions normally", () => {
    let state = initialState();
    const a = beginRequest(state, "s");
    state = a.state;
    const first = applyResponse(state, a.seq, responseFor("s"));
    state = first.state;
    expect(first.rendered).toBe(true);

    const b = beginRequest(state, "so");
    state = b.state;
    const second = applyResponse(state, b.seq, responseFor("so"));
    expect(second.rendered).toBe(true);
    expect(second.state.page?.query).toBe("so");
  });

  it("any completion interleaving renders the highest completed sequence", () => {
    // all 3! completion orders of three requests
    const orders = [
      [0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0],
    ];
    for (const order of orders) {
      let state = initialState();
      const queries = ["s", "so", "son"];
      const begun = queries.map((query) => {
        const result = beginRequest(state, query);
        state = result.state;
        return { seq: result.seq, query };
      });
      let highestCompleted = 0;
      for (const index of order) {
        const { seq, query } = begun[index];
        const applied = applyResponse(state, seq, responseFor(query));
        state = applied.state;
        highestCompleted = Math.max(highestCompleted, seq);
        expect(state.page?.query).toBe(begun[highestCompleted - 1].query);
      }
    }
  });

  it("a failure keeps the last good page and raises the banner", () => {
    let state = initialState();
    const ok = beginRequest(state, "sonic");
    state = ok.state;
    state = applyResponse(state, ok.seq, responseFor("sonic")).state;

    const failing = beginRequest(state, "sonic t");
    state = failing.state;
    const applied = applyError(state, failing.seq, "network down");
    expect(applied.rendered).toBe(true);
    expect(applied.state.error).toBe("network down");
    expect(applied.state.page?.query).toBe("sonic");
  });

  it("a stale failure after a newer success is ignored", () => {
    let state = initialState();
    const slow = beginRequest(state, "so");
    state = slow.state;
    const fast = beginRequest(state, "son");
    state = fast.state;
    state = applyResponse(state, fast.seq, responseFor("son")).state;

    const applied = applyError(state, slow.seq, "timeout");
    expect(applied.rendered).toBe(false);
    expect(applied.state.error).toBeNull();
  });
});
