import type { EnrollResult, VerifyResult, WireTap } from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

type FetchLike = typeof fetch;

/** Thin client over the gateway HTTP API; all decisions come from the service. */
export class GatewayClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, {
        method,
        headers: body === undefined ? undefined : { "Content-Type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError("unreachable", `service unreachable: ${String(err)}`, 0);
    }
    const text = await response.text();
    const payload = text ? JSON.parse(text) : null;
    if (!response.ok) {
      const detail = payload?.error ?? { code: "error", message: text || response.statusText };
      throw new ApiError(detail.code, detail.message, response.status);
    }
    return payload as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/api/health");
  }

  listUsers(): Promise<string[]> {
    return this.request("GET", "/api/users");
  }

  enroll(userId: string, samples: WireTap[][]): Promise<EnrollResult> {
    return this.request("POST", `/api/users/${encodeURIComponent(userId)}/enroll`, {
      samples: samples.map((taps) => ({ taps })),
    });
  }

  verify(userId: string, taps: WireTap[]): Promise<VerifyResult> {
    return this.request("POST", `/api/users/${encodeURIComponent(userId)}/verify`, { taps });
  }

  deleteUser(userId: string): Promise<void> {
    return this.request("DELETE", `/api/users/${encodeURIComponent(userId)}`);
  }
}
