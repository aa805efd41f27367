// Single-page client for the curation session API. The server is the only
// authority: every rendered number comes straight from the last response,
// and a reload resumes wherever the server-side session is.

export type Decision = "keep_all" | "keep_category_only" | "skip";

export interface DecisionRecord {
  category: string;
  decision: string;
}

export interface PromptView {
  done: boolean;
  category?: string;
  sample_articles?: string[];
  queue_length?: number;
  visited_count?: number;
  kept_count?: number;
  decision_count?: number;
  decision_tail?: DecisionRecord[];
}

const KEY_BINDINGS: Record<string, Decision> = {
  y: "keep_all",
  s: "keep_category_only",
  n: "skip",
};

export class CuratorApp {
  private doc: Document;
  private base: string;
  private prompt: PromptView | null = null;
  private pending: Promise<void> = Promise.resolve();
  private inFlight = false;

  constructor(doc: Document, base = "") {
    this.doc = doc;
    this.base = base;
  }

  /** Resolves when the current chain of requests has finished. */
  settled(): Promise<void> {
    return this.pending;
  }

  start(): Promise<void> {
    for (const button of this.actionButtons()) {
      button.addEventListener("click", () => {
        const decision = button.dataset.decision as Decision;
        this.decide(decision);
      });
    }
    this.element("export").addEventListener("click", () => this.export());
    this.doc.addEventListener("keydown", (event) => {
      const decision = KEY_BINDINGS[(event as KeyboardEvent).key];
      if (decision) this.decide(decision);
    });
    return this.enqueue(() => this.refresh());
  }

  /** Chains an async step so only one request is in flight at a time. */
  private enqueue(step: () => Promise<void>): Promise<void> {
    this.pending = this.pending.then(step, step);
    return this.pending;
  }

  decide(decision: Decision): Promise<void> {
    if (this.inFlight || !this.prompt || this.prompt.done) {
      return this.pending;
    }
    const category = this.prompt.category as string;
    this.inFlight = true;
    this.setActionsEnabled(false);
    return this.enqueue(async () => {
      try {
        const resp = await fetch(`${this.base}/session/decision`, {
          method: "POST",
          headers: { "Content-Type": "application/json" },
          body: JSON.stringify({ category, decision }),
        });
        if (resp.status === 409) {
          this.showBanner("Prompt was stale; reloaded the current category.");
        } else if (!resp.ok) {
          const body = await resp.json().catch(() => ({ error: resp.statusText }));
          this.showBanner(`Decision rejected: ${body.error}`);
        } else {
          this.hideBanner();
        }
      } catch (err) {
        this.showBanner(`Network failure, nothing was recorded. Retry. (${err})`);
      } finally {
        this.inFlight = false;
      }
      await this.refresh();
    });
  }

  export(): Promise<void> {
    return this.enqueue(async () => {
      try {
        const resp = await fetch(`${this.base}/session/export`, {
          method: "POST",
          body: "{}",
        });
        const body = await resp.json();
        const ids: string[] = body.article_ids;
        this.element("export-output").textContent = ids.join("\n");
        this.offerDownload(ids);
        this.hideBanner();
      } catch (err) {
        this.showBanner(`Export failed: ${err}`);
      }
    });
  }

  private async refresh(): Promise<void> {
    try {
      const resp = await fetch(`${this.base}/session/next`);
      this.prompt = (await resp.json()) as PromptView;
    } catch (err) {
      this.showBanner(`Cannot reach the session backend: ${err}`);
      return;
    }
    this.render();
  }

  private render(): void {
    const view = this.prompt;
    if (!view) return;
    this.setText("queue-count", view.queue_length);
    this.setText("visited-count", view.visited_count);
    this.setText("kept-count", view.kept_count);
    this.setText("decision-count", view.decision_count);

    const tail = this.element("decision-tail");
    tail.innerHTML = "";
    for (const rec of view.decision_tail ?? []) {
      const item = this.doc.createElement("li");
      item.textContent = `${rec.category}: ${rec.decision}`;
      tail.appendChild(item);
    }

    if (view.done) {
      this.element("prompt").classList.add("hidden");
      this.element("done-panel").classList.remove("hidden");
      this.setActionsEnabled(false);
      return;
    }
    this.element("prompt").classList.remove("hidden");
    this.element("done-panel").classList.add("hidden");
    this.element("category").textContent = view.category ?? "";
    const list = this.element("articles");
    list.innerHTML = "";
    for (const title of view.sample_articles ?? []) {
      const item = this.doc.createElement("li");
      item.textContent = title;
      list.appendChild(item);
    }
    this.setActionsEnabled(true);
  }

  private offerDownload(ids: string[]): void {
    const win = this.doc.defaultView as (Window & typeof globalThis) | null;
    if (!win || typeof win.URL?.createObjectURL !== "function") {
      return; // no blob support (test DOM); the list is already rendered
    }
    const blob = new win.Blob([ids.join("\n") + "\n"], { type: "text/plain" });
    const link = this.doc.createElement("a");
    link.href = win.URL.createObjectURL(blob);
    link.download = "kept_articles.txt";
    link.click();
    win.URL.revokeObjectURL(link.href);
  }

  private actionButtons(): HTMLButtonElement[] {
    return Array.from(
      this.doc.querySelectorAll<HTMLButtonElement>("#actions button"),
    );
  }

  private setActionsEnabled(enabled: boolean): void {
    for (const button of this.actionButtons()) {
      button.disabled = !enabled;
    }
  }

  private showBanner(message: string): void {
    const banner = this.element("banner");
    banner.textContent = message;
    banner.classList.remove("hidden");
  }

  private hideBanner(): void {
    this.element("banner").classList.add("hidden");
  }

  private setText(id: string, value: number | undefined): void {
    this.element(id).textContent = value === undefined ? "-" : String(value);
  }

  private element(id: string): HTMLElement {
    const el = this.doc.getElementById(id);
    if (!el) throw new Error(`missing element #${id}`);
    return el;
  }
}

export function createApp(doc: Document, base = ""): CuratorApp {
  return new CuratorApp(doc, base);
}

declare global {
  interface Window {
    __curatorTest?: boolean;
  }
}

if (typeof window !== "undefined" && !window.__curatorTest) {
  createApp(window.document).start();
}
