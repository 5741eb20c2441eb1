/** HTTP client for the comparison service, plus async-call ordering helpers. */

import type {
  BrushResponse,
  CatalogFilters,
  CatalogResponse,
  ComparisonPayload,
  ConfigModel,
  PresentationModel,
  SessionModel,
  Side,
  VisibilityModel,
  WorkbenchService,
} from "./types";

export class ServiceError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
  ) {
    super(message);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const res = await fetch(url, {
    headers: { "content-type": "application/json" },
    ...init,
  });
  if (!res.ok) {
    let code = "http_error";
    let message = `${res.status}`;
    try {
      const body = await res.json();
      if (body?.error) {
        code = body.error.code;
        message = body.error.message;
      }
    } catch {
      // non-JSON error body: keep the status text
    }
    throw new ServiceError(code, message, res.status);
  }
  return res.json() as Promise<T>;
}

export class HttpService implements WorkbenchService {
  constructor(private baseUrl: string = "") {}

  catalog(filters: CatalogFilters): Promise<CatalogResponse> {
    const params = new URLSearchParams();
    for (const [key, value] of Object.entries(filters)) {
      if (value) params.set(key, value);
    }
    const qs = params.toString();
    return request(`${this.baseUrl}/catalog${qs ? "?" + qs : ""}`);
  }

  createComparison(
    patientId: string,
    motionType: string,
    config?: ConfigModel,
  ): Promise<ComparisonPayload> {
    return request(`${this.baseUrl}/comparisons`, {
      method: "POST",
      body: JSON.stringify({
        patient_id: patientId,
        motion_type: motionType,
        ...(config ? { config } : {}),
      }),
    });
  }

  getComparison(handleId: string): Promise<ComparisonPayload> {
    return request(`${this.baseUrl}/comparisons/${handleId}`);
  }

  setThreshold(handleId: string, tau: number): Promise<VisibilityModel> {
    return request(`${this.baseUrl}/comparisons/${handleId}/threshold`, {
      method: "POST",
      body: JSON.stringify({ tau }),
    });
  }

  mute(handleId: string, muscle: string): Promise<ComparisonPayload> {
    return request(`${this.baseUrl}/comparisons/${handleId}/mute`, {
      method: "POST",
      body: JSON.stringify({ muscle }),
    });
  }

  unmute(handleId: string, muscle: string): Promise<ComparisonPayload> {
    return request(`${this.baseUrl}/comparisons/${handleId}/unmute`, {
      method: "POST",
      body: JSON.stringify({ muscle }),
    });
  }

  truncate(
    handleId: string,
    side: Side | "both",
    t0: number,
    t1: number,
  ): Promise<ComparisonPayload> {
    return request(`${this.baseUrl}/comparisons/${handleId}/truncate`, {
      method: "POST",
      body: JSON.stringify({ side, t0, t1 }),
    });
  }

  brush(handleId: string, side: Side, t0: number, t1: number): Promise<BrushResponse> {
    return request(`${this.baseUrl}/comparisons/${handleId}/brush`, {
      method: "POST",
      body: JSON.stringify({ side, t0, t1 }),
    });
  }

  getSession(id: string): Promise<SessionModel> {
    return request(`${this.baseUrl}/sessions/${id}`);
  }

  putSession(id: string, session: SessionModel): Promise<{ id: string }> {
    return request(`${this.baseUrl}/sessions/${id}`, {
      method: "PUT",
      body: JSON.stringify(session),
    });
  }

  getPresentation(id: string): Promise<PresentationModel> {
    return request(`${this.baseUrl}/presentations/${id}`);
  }

  putPresentation(id: string, doc: PresentationModel): Promise<{ id: string }> {
    return request(`${this.baseUrl}/presentations/${id}`, {
      method: "PUT",
      body: JSON.stringify(doc),
    });
  }

  async exportPresentation(
    id: string,
    format: "document" | "static-render",
  ): Promise<string> {
    const res = await fetch(
      `${this.baseUrl}/presentations/${id}/export?format=${format}`,
    );
    if (!res.ok) {
      const body = await res.json().catch(() => null);
      throw new ServiceError(
        body?.error?.code ?? "http_error",
        body?.error?.message ?? `${res.status}`,
        res.status,
      );
    }
    return res.text();
  }
}

/**
 * Keeps exactly one request in flight and discards stale responses by
 * sequence number.  While a request is pending the latest queued value
 * replaces any earlier queued one, so a fast slider drag settles on the
 * final position without flooding the service.
 */
export class LatestGate<A, R> {
  private seq = 0;
  private applied = 0;
  private inFlight = false;
  private queued: A | null = null;

  constructor(
    private send: (arg: A) => Promise<R>,
    private apply: (result: R, arg: A) => void,
  ) {}

  submit(arg: A): void {
    if (this.inFlight) {
      this.queued = arg;
      return;
    }
    void this.dispatch(arg);
  }

  get pending(): boolean {
    return this.inFlight || this.queued !== null;
  }

  private async dispatch(arg: A): Promise<void> {
    const mySeq = ++this.seq;
    this.inFlight = true;
    try {
      const result = await this.send(arg);
      if (mySeq > this.applied) {
        this.applied = mySeq;
        this.apply(result, arg);
      }
    } catch {
      // a failed call leaves the last acknowledged state in place
    } finally {
      this.inFlight = false;
      if (this.queued !== null) {
        const next = this.queued;
        this.queued = null;
        void this.dispatch(next);
      }
    }
  }
}
