import { ApiClient, ApiError } from "./api.js";
import type { Assignment, Category } from "./types.js";

export type Phase = "login" | "onboarding" | "annotating" | "done";

export interface SessionState {
  phase: Phase;
  token: string;
  categories: Category[];
  assignment: Assignment | null;
  selected: number | null;
  submitted: number;
  notice: string | null;
  error: string | null;
  busy: boolean;
}

type Listener = (state: SessionState) => void;

/**
 * Annotation flow kept free of DOM concerns so it can be tested headless.
 *
 * Exactly one assignment is held at a time. A submission in flight
 * blocks further submits; a 409 from the server drops the stale
 * assignment and fetches a fresh one without touching the submitted
 * count. A network failure keeps the current assignment and selection
 * so nothing typed or clicked is lost.
 */
export class AnnotationSession {
  private state: SessionState = {
    phase: "login",
    token: "",
    categories: [],
    assignment: null,
    selected: null,
    submitted: 0,
    notice: null,
    error: null,
    busy: false,
  };
  private listeners: Listener[] = [];

  constructor(private readonly api: ApiClient) {}

  get snapshot(): SessionState {
    return { ...this.state, categories: [...this.state.categories] };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private patch(changes: Partial<SessionState>): void {
    this.state = { ...this.state, ...changes };
    for (const listener of this.listeners) {
      listener(this.snapshot);
    }
  }

  /** Validate the token and load the onboarding material. */
  async start(token: string): Promise<void> {
    const trimmed = token.trim();
    if (!trimmed) {
      this.patch({ error: "enter an annotator name first" });
      return;
    }
    if (this.state.busy) {
      return;
    }
    this.patch({ busy: true, error: null });
    try {
      const categories = await this.api.categories();
      this.patch({
        phase: "onboarding",
        token: trimmed,
        categories,
        busy: false,
      });
    } catch (failure) {
      this.patch({ busy: false, error: describe(failure) });
    }
  }

  /** Leave onboarding and fetch the first assignment. */
  async begin(): Promise<void> {
    if (this.state.phase !== "onboarding" || this.state.busy) {
      return;
    }
    this.patch({ phase: "annotating" });
    await this.fetchNext();
  }

  select(categoryId: number): void {
    if (this.state.phase !== "annotating" || this.state.assignment === null) {
      return;
    }
    this.patch({ selected: categoryId, error: null });
  }

  /**
   * Post the current selection. No-op without a selection or while a
   * previous submit is still in flight, so a double click cannot send
   * the same label twice.
   */
  async submit(): Promise<void> {
    const { phase, assignment, selected, busy, token } = this.state;
    if (phase !== "annotating" || assignment === null || selected === null || busy) {
      return;
    }
    this.patch({ busy: true, error: null, notice: null });
    try {
      await this.api.submit(token, assignment.compound_id, selected);
      this.patch({
        submitted: this.state.submitted + 1,
        selected: null,
        assignment: null,
        busy: false,
      });
      await this.fetchNext();
    } catch (failure) {
      if (failure instanceof ApiError && failure.status === 409) {
        this.patch({
          notice: "that compound was just completed by others; loading a fresh one",
          selected: null,
          assignment: null,
          busy: false,
        });
        await this.fetchNext();
      } else {
        // keep assignment and selection so a retry can resend as-is
        this.patch({ busy: false, error: describe(failure) });
      }
    }
  }

  /** Fetch the next assignment; also the retry path after a failure. */
  async fetchNext(): Promise<void> {
    if (this.state.phase !== "annotating" || this.state.busy) {
      return;
    }
    this.patch({ busy: true, error: null });
    try {
      const assignment = await this.api.next(this.state.token);
      if (assignment === null) {
        this.patch({ phase: "done", assignment: null, selected: null, busy: false });
      } else {
        this.patch({ assignment, selected: null, busy: false });
      }
    } catch (failure) {
      this.patch({ busy: false, error: describe(failure) });
    }
  }
}

function describe(failure: unknown): string {
  if (failure instanceof ApiError) {
    return failure.status === 0
      ? "annotation service unreachable; check the server and retry"
      : failure.message;
  }
  return String(failure);
}
