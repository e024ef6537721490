// Typed client for the prediction service. Every number shown in the UI
// comes from one of these responses; the client never computes physics.

import {
  DesignConfig,
  FootprintSpec,
  ModelInfoResponse,
  PredictResponse,
  SchemaResponse,
  SensitivityResponse,
  ServiceError,
  TreeResponse,
} from "./types.js";

export interface PredictOutcome {
  response: PredictResponse;
  outOfRange: boolean; // service answered 422: prediction valid, inputs extrapolate
}

export class ApiClient {
  constructor(private baseUrl: string = "") {}

  private async request<T>(
    path: string,
    init?: RequestInit,
    signal?: AbortSignal,
  ): Promise<{ status: number; body: T }> {
    const res = await fetch(this.baseUrl + path, { ...init, signal });
    const body = (await res.json()) as T;
    if (res.status >= 400 && res.status !== 422) {
      const err = body as { error?: string; details?: { field: string; message: string }[] };
      throw new ServiceError(
        res.status,
        err.error ?? `request failed (${res.status})`,
        err.details ?? [],
      );
    }
    return { status: res.status, body };
  }

  private post<T>(path: string, payload: unknown, signal?: AbortSignal) {
    return this.request<T>(
      path,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify(payload),
      },
      signal,
    );
  }

  async modelInfo(): Promise<ModelInfoResponse> {
    return (await this.request<ModelInfoResponse>("/model/info")).body;
  }

  async schema(): Promise<SchemaResponse> {
    return (await this.request<SchemaResponse>("/schema")).body;
  }

  async predict(
    config: DesignConfig,
    footprint: FootprintSpec | null,
    signal?: AbortSignal,
  ): Promise<PredictOutcome> {
    const { status, body } = await this.post<PredictResponse>(
      "/predict",
      { config, footprint },
      signal,
    );
    return { response: body, outOfRange: status === 422 };
  }

  async sensitivity(
    config: DesignConfig,
    footprint: FootprintSpec | null,
    options: { delta?: number; n?: number; seed?: number } = {},
    signal?: AbortSignal,
  ): Promise<SensitivityResponse> {
    const { body } = await this.post<SensitivityResponse>(
      "/sensitivity",
      { config, footprint, ...options },
      signal,
    );
    return body;
  }

  async tree(
    config: DesignConfig,
    footprint: FootprintSpec | null,
    target: string,
    options: { max_depth?: number; n?: number; seed?: number } = {},
    signal?: AbortSignal,
  ): Promise<TreeResponse> {
    const { body } = await this.post<TreeResponse>(
      "/tree",
      { config, footprint, target, ...options },
      signal,
    );
    return body;
  }
}
