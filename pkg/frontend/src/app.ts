// Session driver: 1s polling, one in-flight submission, server-gated
// progression. All rendering delegates to render.ts; all data to api.ts.

import {
  ApiError,
  createSession,
  getQueries,
  getResult,
  getSession,
  postAnswer,
  type PendingQuery,
  type SessionKind,
  type Snapshot,
} from "./api";
import {
  emptySelection,
  renderFailed,
  renderProgress,
  renderQueryScreen,
  renderResultScreen,
  selectedLabels,
  toggleChoice,
  type SelectionState,
} from "./render";

export const POLL_INTERVAL_MS = 1000;

export class SessionApp {
  private sessionId: string | null = null;
  private participants: string[] = [];
  private timer: ReturnType<typeof setInterval> | null = null;
  private selections = new Map<string, SelectionState>();
  private submitting = false;
  private lastError = new Map<string, string>();
  private done = false;

  constructor(private root: HTMLElement) {}

  async start(kind: SessionKind, players: number, totalRent?: number): Promise<string> {
    const snap = await createSession(kind, players, totalRent ? { total_rent: totalRent } : {});
    this.sessionId = snap.id;
    this.participants = snap.participants;
    await this.tick();
    this.timer = setInterval(() => void this.tick(), POLL_INTERVAL_MS);
    return snap.id;
  }

  stop(): void {
    if (this.timer !== null) clearInterval(this.timer);
    this.timer = null;
  }

  async tick(): Promise<void> {
    if (this.sessionId === null || this.done) return;
    let snap: Snapshot;
    try {
      snap = await getSession(this.sessionId);
    } catch {
      return; // transient poll failure: keep the last render
    }
    if (snap.status === "completed") {
      const result = await getResult(this.sessionId);
      this.done = true;
      this.stop();
      this.mount(renderResultScreen(result, this.participants));
      return;
    }
    if (snap.status === "failed") {
      this.done = true;
      this.stop();
      this.mount(renderFailed(snap.error ?? "solver gave up"));
      return;
    }
    const { queries } = await getQueries(this.sessionId);
    this.renderPending(snap, queries);
  }

  private renderPending(snap: Snapshot, queries: PendingQuery[]): void {
    const frame = document.createElement("div");
    frame.appendChild(renderProgress(snap));
    const query = queries[0];
    if (!query) return;
    if (!this.selections.has(query.query_id)) {
      this.selections.set(query.query_id, emptySelection());
    }
    const sel = this.selections.get(query.query_id)!;
    frame.appendChild(
      renderQueryScreen(
        query,
        sel,
        {
          onToggle: (i) => {
            this.selections.set(query.query_id, toggleChoice(sel, i));
            this.renderPending(snap, queries);
          },
          onAlsoMode: (enabled) => {
            this.selections.set(query.query_id, { ...sel, alsoMode: enabled });
            this.renderPending(snap, queries);
          },
          onSubmit: () => void this.submit(query.query_id),
        },
        this.lastError.get(query.query_id),
      ),
    );
    this.mount(frame);
  }

  async submit(queryId: string): Promise<void> {
    if (this.sessionId === null || this.submitting) return;
    const sel = this.selections.get(queryId);
    const labels = sel ? selectedLabels(sel) : [];
    if (labels.length === 0) return;
    this.submitting = true;
    try {
      await postAnswer(this.sessionId, queryId, labels);
      this.lastError.delete(queryId);
      this.selections.delete(queryId);
      await this.tick();
    } catch (e) {
      if (e instanceof ApiError && e.status === 409) {
        this.lastError.set(queryId, "already answered differently; refreshing");
        this.selections.delete(queryId);
        await this.tick();
      } else if (e instanceof ApiError && e.status === 422) {
        this.lastError.set(queryId, `rejected: ${e.detail} - adjust your choice and retry`);
        await this.tick();
      } else {
        this.lastError.set(queryId, "submission failed; will retry on next poll");
      }
    } finally {
      this.submitting = false;
    }
  }

  private mount(node: HTMLElement): void {
    this.root.replaceChildren(node);
  }
}
