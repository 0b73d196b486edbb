// View state with sequence-number gating: responses carry the sequence of
// the request that produced them, and only a response newer than everything
// already rendered may touch the page. A slow response for "so" arriving
// after "son" has rendered is silently dropped.

import type { SearchResponse } from "./types.js";

export interface ViewState {
  query: string;
  nextSeq: number;
  inFlightSeq: number | null;
  renderedSeq: number;
  page: SearchResponse | null;
  error: string | null;
}

export function initialState(): ViewState {
  return {
    query: "",
    nextSeq: 1,
    inFlightSeq: null,
    renderedSeq: 0,
    page: null,
    error: null,
  };
}

export interface BeginResult {
  state: ViewState;
  seq: number;
}

export function beginRequest(state: ViewState, query: string): BeginResult {
  const seq = state.nextSeq;
  return {
    state: { ...state, query, nextSeq: seq + 1, inFlightSeq: seq },
    seq,
  };
}

export interface ApplyResult {
  state: ViewState;
  rendered: boolean;
}

export function applyResponse(
  state: ViewState,
  seq: number,
  response: SearchResponse,
): ApplyResult {
  if (seq <= state.renderedSeq) {
    return { state, rendered: false }; // stale: something newer already rendered
  }
  return {
    state: {
      ...state,
      renderedSeq: seq,
      inFlightSeq: state.inFlightSeq === seq ? null : state.inFlightSeq,
      page: response,
      error: null,
    },
    rendered: true,
  };
}

export function applyError(state: ViewState, seq: number, message: string): ApplyResult {
  if (seq <= state.renderedSeq) {
    return { state, rendered: false };
  }
  // keep the last good page visible under the banner
  return {
    state: {
      ...state,
      inFlightSeq: state.inFlightSeq === seq ? null : state.inFlightSeq,
      error: message,
    },
    rendered: true,
  };
}
