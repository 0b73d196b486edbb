// DOM rendering: one horizontal row per group, pills above the rows,
// provenance badge per card, facet diagnostics in the footer.

import type { SearchResponse, VideoCard } from "./types.js";

export interface RenderHandlers {
  onPillClick?: (label: string) => void;
}

const BADGE_LABEL: Record<string, string> = {
  match: "match",
  recommendation: "rec",
  both: "match+rec",
};

function videoCard(doc: Document, video: VideoCard): HTMLElement {
  const card = doc.createElement("article");
  card.className = "video-card";
  card.dataset.videoId = String(video.id);

  const title = doc.createElement("div");
  title.className = "video-title";
  title.textContent = video.title;
  card.appendChild(title);

  const badge = doc.createElement("span");
  badge.className = `badge badge-${video.provenance}`;
  badge.textContent = BADGE_LABEL[video.provenance] ?? video.provenance;
  card.appendChild(badge);

  const score = doc.createElement("span");
  score.className = "video-score";
  score.textContent = video.score.toFixed(3);
  card.appendChild(score);

  return card;
}

export function renderPage(
  root: HTMLElement,
  response: SearchResponse,
  handlers: RenderHandlers = {},
): void {
  const doc = root.ownerDocument;
  root.replaceChildren();

  if (response.pills.length > 0) {
    const pillBar = doc.createElement("div");
    pillBar.className = "pill-bar";
    for (const label of response.pills) {
      const pill = doc.createElement("button");
      pill.type = "button";
      pill.className = "pill";
      pill.textContent = label;
      pill.addEventListener("click", () => handlers.onPillClick?.(label));
      pillBar.appendChild(pill);
    }
    root.appendChild(pillBar);
  }

  if (response.groups.length === 0) {
    const empty = doc.createElement("p");
    empty.className = "empty-state";
    empty.textContent = response.query
      ? `No results for "${response.query}"`
      : "Start typing to search";
    root.appendChild(empty);
  }

  for (const group of response.groups) {
    const row = doc.createElement("section");
    row.className = "group-row";
    row.dataset.definition = group.evidence.definition;

    const header = doc.createElement("h2");
    header.className = "group-header";
    header.textContent = group.header;
    row.appendChild(header);

    const rail = doc.createElement("div");
    rail.className = "video-rail";
    for (const video of group.videos) {
      rail.appendChild(videoCard(doc, video));
    }
    row.appendChild(rail);
    root.appendChild(row);
  }

  const diagnostics = doc.createElement("footer");
  diagnostics.className = "diagnostics";
  const facets = Object.entries(response.facets.distribution)
    .filter(([, p]) => p > 0)
    .sort((a, b) => b[1] - a[1])
    .map(([facet, p]) => `${facet} ${(p * 100).toFixed(0)}%`)
    .join(" · ");
  diagnostics.textContent =
    `${facets || "no facet evidence"} · specificity ${response.facets.specificity.toFixed(2)}` +
    ` · ${response.timing_ms.toFixed(1)} ms · snapshot ${response.snapshot}`;
  root.appendChild(diagnostics);
}

export function renderError(banner: HTMLElement, message: string | null): void {
  banner.textContent = message ?? "";
  banner.classList.toggle("visible", message !== null);
}
