import type { Assignment, Category, Progress, SubmitAck } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Server-reported failure; status 0 means the service was unreachable. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function reject(response: Response): Promise<never> {
  let detail = `request failed with status ${response.status}`;
  try {
    const body = (await response.json()) as { detail?: string };
    if (typeof body.detail === "string" && body.detail) {
      detail = body.detail;
    }
  } catch {
    // non-JSON error body, keep the generic message
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(
    private readonly fetchImpl: FetchLike,
    private readonly base = "",
  ) {}

  private async request(url: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.base + url, init);
    } catch (cause) {
      throw new ApiError(0, "annotation service unreachable");
    }
    if (!response.ok) {
      await reject(response);
    }
    return response;
  }

  async categories(): Promise<Category[]> {
    const response = await this.request("/api/categories");
    const body = (await response.json()) as { categories: Category[] };
    return body.categories;
  }

  async next(annotator: string): Promise<Assignment | null> {
    const response = await this.request(
      `/api/next?annotator=${encodeURIComponent(annotator)}`,
    );
    const body = (await response.json()) as { assignment: Assignment | null };
    return body.assignment;
  }

  async submit(
    annotator: string,
    compoundId: string,
    categoryId: number,
  ): Promise<SubmitAck> {
    const response = await this.request("/api/annotations", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({
        annotator,
        compound_id: compoundId,
        category_id: categoryId,
      }),
    });
    return (await response.json()) as SubmitAck;
  }

  async progress(): Promise<Progress> {
    const response = await this.request("/api/progress");
    return (await response.json()) as Progress;
  }
}
