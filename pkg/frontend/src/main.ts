import { fetchHealth, fetchSearch } from "./api.js";
import { debounce } from "./debounce.js";
import { renderError, renderPage } from "./render.js";
import { applyError, applyResponse, beginRequest, initialState } from "./state.js";

const DEBOUNCE_MS = 80;

function apiBase(): string {
  const params = new URLSearchParams(window.location.search);
  return params.get("api") ?? window.location.origin;
}

function start(): void {
  const input = document.getElementById("search-input") as HTMLInputElement;
  const results = document.getElementById("results") as HTMLElement;
  const banner = document.getElementById("error-banner") as HTMLElement;
  const status = document.getElementById("status") as HTMLElement;
  const base = apiBase();

  let state = initialState();

  const issue = (query: string) => {
    const begun = beginRequest(state, query);
    state = begun.state;
    const seq = begun.seq;
    fetchSearch(base, query)
      .then((response) => {
        const applied = applyResponse(state, seq, response);
        state = applied.state;
        if (applied.rendered && state.page) {
          renderError(banner, null);
          renderPage(results, state.page, {
            onPillClick: (label) => {
              input.value = label;
              issue(label);
            },
          });
        }
      })
      .catch((error: Error) => {
        const applied = applyError(state, seq, error.message);
        state = applied.state;
        if (applied.rendered) {
          renderError(banner, `Search unavailable: ${error.message}`);
        }
      });
  };

  const debouncedIssue = debounce(issue, DEBOUNCE_MS);
  input.addEventListener("input", () => debouncedIssue(input.value));

  fetchHealth(base)
    .then((health) => {
      status.textContent = `${health.videos} videos · snapshot ${health.snapshot}`;
    })
    .catch(() => {
      status.textContent = "service unreachable";
    });

  issue("");
}

document.addEventListener("DOMContentLoaded", start);
