import type {
  AgreementReport,
  AnnotationTask,
  ClusterSample,
  Guideline,
  LabelSubmission,
  TaskKind,
} from "./types.js";

/** Error carrying the HTTP status and the service's error body. */
export class ApiError extends Error {
  constructor(
    public status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

/** Network-level failure (service unreachable): the UI shows a retry state. */
export class UnreachableError extends Error {
  constructor(cause: unknown) {
    super(`annotation service unreachable: ${String(cause)}`);
    this.name = "UnreachableError";
  }
}

type FetchLike = typeof fetch;

export class ApiClient {
  constructor(
    private baseUrl: string = "",
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T | null> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    } catch (err) {
      throw new UnreachableError(err);
    }
    if (response.status === 204) {
      return null;
    }
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      // non-JSON error body; fall through with the status alone
    }
    if (!response.ok) {
      const message =
        body && typeof body === "object" && "error" in body
          ? String((body as { error: unknown }).error)
          : `HTTP ${response.status}`;
      throw new ApiError(response.status, message);
    }
    return body as T;
  }

  /** Next open task for this annotator, or null when the queue is empty. */
  nextTask(annotator: string, kind?: TaskKind): Promise<AnnotationTask | null> {
    const params = new URLSearchParams({ annotator });
    if (kind) params.set("kind", kind);
    return this.request<AnnotationTask>(`/api/tasks/next?${params}`);
  }

  async getTask(taskId: string): Promise<AnnotationTask> {
    const task = await this.request<AnnotationTask>(`/api/tasks/${encodeURIComponent(taskId)}`);
    if (task === null) throw new ApiError(404, `no such task: ${taskId}`);
    return task;
  }

  async submitLabel(taskId: string, submission: LabelSubmission): Promise<void> {
    await this.request(`/api/tasks/${encodeURIComponent(taskId)}/label`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(submission),
    });
  }

  async resolve(taskId: string, label: string): Promise<{ consensus?: string; notice?: string }> {
    const out = await this.request<{ consensus?: string; notice?: string }>(
      `/api/tasks/${encodeURIComponent(taskId)}/resolve`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ label }),
      },
    );
    return out ?? {};
  }

  async agreement(batch: string): Promise<AgreementReport> {
    const report = await this.request<AgreementReport>(
      `/api/agreement?${new URLSearchParams({ batch })}`,
    );
    if (report === null) throw new ApiError(500, "empty agreement response");
    return report;
  }

  async clusterSample(cluster: number): Promise<ClusterSample> {
    const sample = await this.request<ClusterSample>(`/api/clusters/${cluster}/sample`);
    if (sample === null) throw new ApiError(404, `no sample for cluster ${cluster}`);
    return sample;
  }

  async guideline(): Promise<Guideline> {
    const guide = await this.request<Guideline>("/api/guideline");
    if (guide === null) throw new ApiError(500, "empty guideline response");
    return guide;
  }
}
