import type { FetchLike } from "../src/api.js";
import type { Category } from "../src/types.js";

export interface StoredRecord {
  compound: string;
  annotator: string;
  category: number;
}

export const FAKE_CATEGORIES: Category[] = Array.from({ length: 17 }, (_, i) => ({
  id: i + 1,
  name: `category ${i + 1}`,
  examples: [`exemplu ${i + 1}a`, `exemplu ${i + 1}b`],
}));

function respond(status: number, body: unknown): Response {
  return {
    ok: status >= 200 && status < 300,
    status,
    json: async () => body,
  } as unknown as Response;
}

/**
 * In-memory stand-in for the annotation server: same routing rule
 * (fewest missing annotations first, ties by id), same two-per-compound
 * and one-per-annotator limits, same status codes.
 */
export class FakeService {
  records: StoredRecord[] = [];
  posts: unknown[] = [];
  requests = 0;
  unreachable = false;
  rejectNextSubmit = false;
  private gate: Promise<void> | null = null;
  private openGate: (() => void) | null = null;

  constructor(private readonly compounds: string[]) {}

  /** Make the next submit hang until releaseSubmits() is called. */
  holdSubmits(): void {
    this.gate = new Promise((resolve) => {
      this.openGate = resolve;
    });
  }

  releaseSubmits(): void {
    this.openGate?.();
    this.gate = null;
    this.openGate = null;
  }

  count(compound: string): number {
    return this.records.filter((r) => r.compound === compound).length;
  }

  private hasPair(compound: string, annotator: string): boolean {
    return this.records.some(
      (r) => r.compound === compound && r.annotator === annotator,
    );
  }

  private nextFor(annotator: string) {
    let best: string | null = null;
    let bestKey: [number, string] | null = null;
    for (const compound of this.compounds) {
      const count = this.count(compound);
      if (count >= 2 || this.hasPair(compound, annotator)) {
        continue;
      }
      const key: [number, string] = [-count, compound];
      if (
        bestKey === null ||
        key[0] < bestKey[0] ||
        (key[0] === bestKey[0] && key[1] < bestKey[1])
      ) {
        best = compound;
        bestKey = key;
      }
    }
    if (best === null) {
      return null;
    }
    return {
      compound_id: best,
      head: `cap_${best}`,
      preposition: "de",
      modifier: `mod_${best}`,
      categories: FAKE_CATEGORIES,
    };
  }

  fetch: FetchLike = async (url, init) => {
    this.requests += 1;
    if (this.unreachable) {
      throw new TypeError("fetch failed");
    }
    if (url.startsWith("/api/categories")) {
      return respond(200, { categories: FAKE_CATEGORIES });
    }
    if (url.startsWith("/api/next")) {
      const annotator = decodeURIComponent(url.split("annotator=")[1] ?? "");
      if (!annotator) {
        return respond(404, { detail: "annotator id is empty" });
      }
      return respond(200, { assignment: this.nextFor(annotator) });
    }
    if (url.startsWith("/api/annotations")) {
      const body = JSON.parse(String(init?.body)) as {
        annotator: string;
        compound_id: string;
        category_id: number;
      };
      this.posts.push(body);
      if (this.gate) {
        await this.gate;
      }
      if (this.rejectNextSubmit) {
        this.rejectNextSubmit = false;
        return respond(409, { detail: "compound already fully annotated" });
      }
      if (!this.compounds.includes(body.compound_id)) {
        return respond(404, { detail: `unknown compound ${body.compound_id}` });
      }
      if (body.category_id < 1 || body.category_id > 17) {
        return respond(400, { detail: `category id ${body.category_id} out of range` });
      }
      if (this.hasPair(body.compound_id, body.annotator)) {
        return respond(409, { detail: "duplicate annotation" });
      }
      if (this.count(body.compound_id) >= 2) {
        return respond(409, { detail: "compound already fully annotated" });
      }
      this.records.push({
        compound: body.compound_id,
        annotator: body.annotator,
        category: body.category_id,
      });
      return respond(200, {
        status: "recorded",
        compound_id: body.compound_id,
        annotator: body.annotator,
        category_id: body.category_id,
        timestamp: "2026-01-01T00:00:00+00:00",
      });
    }
    if (url.startsWith("/api/progress")) {
      const perAnnotator: Record<string, number> = {};
      for (const record of this.records) {
        perAnnotator[record.annotator] = (perAnnotator[record.annotator] ?? 0) + 1;
      }
      return respond(200, {
        total_compounds: this.compounds.length,
        fully_annotated: this.compounds.filter((c) => this.count(c) === 2).length,
        per_annotator: perAnnotator,
      });
    }
    return respond(404, { detail: `no route for ${url}` });
  };
}
