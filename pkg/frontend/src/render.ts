// Pure DOM builders for the query and result screens. Each takes server
// data plus callbacks and returns a detached element; app.ts mounts them.

import type { PendingQuery, SessionResult, Snapshot } from "./api";

const SEGMENT_COLORS = ["#e07a5f", "#81b29a", "#f2cc8f", "#6d99c9", "#b085c9", "#c9a185"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

// Selection model: one primary choice plus optional "also acceptable" extras.
// The submitted set is primary + extras; the server treats it as a preference set.
export interface SelectionState {
  primary: number | null;
  extras: Set<number>;
  alsoMode: boolean;
}

export function emptySelection(): SelectionState {
  return { primary: null, extras: new Set(), alsoMode: false };
}

export function selectedLabels(sel: SelectionState): number[] {
  const out = new Set(sel.extras);
  if (sel.primary !== null) out.add(sel.primary);
  return [...out].sort((a, b) => a - b);
}

export function toggleChoice(sel: SelectionState, index: number): SelectionState {
  const next: SelectionState = { primary: sel.primary, extras: new Set(sel.extras), alsoMode: sel.alsoMode };
  if (!sel.alsoMode) {
    next.primary = sel.primary === index ? null : index;
    next.extras.delete(index);
    return next;
  }
  if (index === sel.primary) return next;
  if (next.extras.has(index)) next.extras.delete(index);
  else next.extras.add(index);
  return next;
}

export interface QueryScreenHandlers {
  onToggle(index: number): void;
  onAlsoMode(enabled: boolean): void;
  onSubmit(): void;
}

export function renderQueryScreen(
  query: PendingQuery,
  sel: SelectionState,
  handlers: QueryScreenHandlers,
  submitError?: string,
): HTMLElement {
  const root = el("section", "query-screen");
  root.dataset.queryId = query.query_id;
  root.appendChild(el("h2", undefined, `${query.participant}, which would you choose?`));

  if (query.rendering.pieces) {
    root.appendChild(renderCakeBar(query, sel, handlers));
  } else if (query.rendering.rooms) {
    root.appendChild(renderRoomCards(query, sel, handlers));
  }

  const alsoRow = el("label", "also-row");
  const toggle = el("input") as HTMLInputElement;
  toggle.type = "checkbox";
  toggle.checked = sel.alsoMode;
  toggle.addEventListener("change", () => handlers.onAlsoMode(toggle.checked));
  alsoRow.appendChild(toggle);
  alsoRow.appendChild(el("span", undefined, "mark more options as also acceptable"));
  root.appendChild(alsoRow);

  const submit = el("button", "submit", "Submit choice") as HTMLButtonElement;
  submit.disabled = selectedLabels(sel).length === 0;
  submit.addEventListener("click", () => handlers.onSubmit());
  root.appendChild(submit);

  if (submitError) {
    const err = el("p", "error", submitError);
    root.appendChild(err);
  }
  return root;
}

function renderCakeBar(
  query: PendingQuery,
  sel: SelectionState,
  handlers: QueryScreenHandlers,
): HTMLElement {
  const wrap = el("div", "cake");
  const bar = el("div", "cake-bar");
  const chosen = new Set(selectedLabels(sel));
  for (const piece of query.rendering.pieces!) {
    const seg = el("button", "segment") as HTMLButtonElement;
    seg.dataset.index = String(piece.index);
    seg.style.flexGrow = String(Math.max(piece.end - piece.start, 0));
    seg.style.background = SEGMENT_COLORS[piece.index % SEGMENT_COLORS.length];
    seg.title = `piece ${piece.index}: [${piece.start}, ${piece.end}]`;
    if (chosen.has(piece.index)) seg.classList.add("selected");
    if (piece.end - piece.start <= 0) seg.classList.add("empty");
    seg.addEventListener("click", () => handlers.onToggle(piece.index));
    bar.appendChild(seg);
  }
  wrap.appendChild(bar);
  const cuts = el("div", "cuts");
  for (const c of query.rendering.cuts ?? []) {
    cuts.appendChild(el("span", "cut", String(c)));
  }
  wrap.appendChild(cuts);
  return wrap;
}

function renderRoomCards(
  query: PendingQuery,
  sel: SelectionState,
  handlers: QueryScreenHandlers,
): HTMLElement {
  const wrap = el("div", "rooms");
  const chosen = new Set(selectedLabels(sel));
  for (const room of query.rendering.rooms!) {
    const card = el("button", "room-card") as HTMLButtonElement;
    card.dataset.index = String(room.index);
    if (chosen.has(room.index)) card.classList.add("selected");
    card.appendChild(el("div", "room-name", `room ${room.index}`));
    card.appendChild(el("div", "room-rent", String(room.rent)));
    if (room.free) card.appendChild(el("span", "badge-free", "free"));
    card.addEventListener("click", () => handlers.onToggle(room.index));
    wrap.appendChild(card);
  }
  return wrap;
}

export function renderProgress(snap: Snapshot): HTMLElement {
  const root = el("div", "progress");
  const res = snap.resolution === null ? "-" : String(snap.resolution);
  root.appendChild(el("span", "resolution", `resolution ${res}`));
  root.appendChild(
    el("span", "counts", `${snap.answered} answered, ${snap.pending_queries} waiting`),
  );
  return root;
}

export function renderResultScreen(result: SessionResult, participants: string[]): HTMLElement {
  const root = el("section", "result-screen");
  root.appendChild(el("h2", undefined, "Allocation"));
  const table = el("table", "allocation");
  for (let j = 0; j < result.permutation.length; j++) {
    const row = el("tr");
    row.appendChild(el("td", "who", participants[j] ?? `player ${j}`));
    const got = result.permutation[j];
    if (result.kind === "cake") {
      const [a, b] = result.pieces![got];
      row.appendChild(el("td", "what", `piece ${got}: [${a}, ${b}]`));
    } else {
      row.appendChild(el("td", "what", `room ${got} at rent ${result.rents![got]}`));
    }
    table.appendChild(row);
  }
  root.appendChild(table);

  const witness = el("p", "witness", `witness x = [${result.x.join(", ")}]`);
  root.appendChild(witness);
  if (result.kind === "rent") {
    root.appendChild(el("p", "total", `total rent ${result.total_rent}`));
  }
  root.appendChild(
    el(
      "p",
      "envy-bound",
      `cell diameter ${result.cell_diameter} at resolution ${result.resolution}; ` +
        `envy is bounded by 2 x (max density) x this diameter`,
    ),
  );
  return root;
}

export function renderFailed(message: string): HTMLElement {
  const root = el("section", "failed-screen");
  root.appendChild(el("h2", undefined, "Session failed"));
  root.appendChild(el("p", "error", message));
  return root;
}
