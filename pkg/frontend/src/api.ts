import type {
  ApiErrorBody,
  BackendInfo,
  SessionJson,
  SessionSettings,
  TemplateInfo,
} from "./types.js";

/** Non-2xx reply from the gateway, surfaced with its code and message verbatim. */
export class GatewayError extends Error {
  readonly code: string;
  readonly status: number;
  readonly detail: Record<string, unknown> | null;

  constructor(status: number, body: ApiErrorBody | null) {
    const code = body?.error?.code ?? `http_${status}`;
    const message = body?.error?.message ?? `request failed with status ${status}`;
    super(message);
    this.name = "GatewayError";
    this.code = code;
    this.status = status;
    this.detail = body?.error?.detail ?? null;
  }
}

/**
 * Typed client over the gateway's JSON endpoints. Every method issues exactly
 * one HTTP request and returns the parsed body; formula text is passed through
 * untouched in both directions.
 */
export class GatewayClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "Content-Type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const response = await fetch(this.baseUrl + path, init);
    let payload: unknown = null;
    try {
      payload = await response.json();
    } catch {
      payload = null;
    }
    if (!response.ok) {
      throw new GatewayError(response.status, payload as ApiErrorBody | null);
    }
    return payload as T;
  }

  health(): Promise<{ status: string; version: string }> {
    return this.request("GET", "/api/health");
  }

  createSession(nl: string, settings?: Partial<SessionSettings>): Promise<SessionJson> {
    const body = settings === undefined ? { nl } : { nl, settings };
    return this.request("POST", "/api/sessions", body);
  }

  getSession(sessionId: string): Promise<SessionJson> {
    return this.request("GET", `/api/sessions/${encodeURIComponent(sessionId)}`);
  }

  translate(sessionId: string): Promise<SessionJson> {
    return this.request("POST", `/api/sessions/${encodeURIComponent(sessionId)}/translate`);
  }

  addSubTranslation(
    sessionId: string,
    fragment: string,
    formulaText: string,
  ): Promise<SessionJson> {
    return this.request(
      "POST",
      `/api/sessions/${encodeURIComponent(sessionId)}/subtranslations`,
      { fragment, formulaText },
    );
  }

  editSubTranslation(
    sessionId: string,
    fragmentHash: string,
    formulaText: string,
  ): Promise<SessionJson> {
    return this.request(
      "PUT",
      `/api/sessions/${encodeURIComponent(sessionId)}/subtranslations/${encodeURIComponent(fragmentHash)}`,
      { formulaText },
    );
  }

  deleteSubTranslation(sessionId: string, fragmentHash: string): Promise<SessionJson> {
    return this.request(
      "DELETE",
      `/api/sessions/${encodeURIComponent(sessionId)}/subtranslations/${encodeURIComponent(fragmentHash)}`,
    );
  }

  /** `target` is "final" or a fragment hash; index 0 is the current best. */
  selectAlternative(sessionId: string, target: string, index: number): Promise<SessionJson> {
    return this.request("POST", `/api/sessions/${encodeURIComponent(sessionId)}/select`, {
      target,
      index,
    });
  }

  approve(sessionId: string): Promise<SessionJson> {
    return this.request("POST", `/api/sessions/${encodeURIComponent(sessionId)}/approve`);
  }

  listTemplates(): Promise<{ templates: TemplateInfo[] }> {
    return this.request("GET", "/api/templates");
  }

  listBackends(): Promise<{ backends: BackendInfo[] }> {
    return this.request("GET", "/api/backends");
  }
}
