/** Thin fetch client for the travista HTTP API. */

import type { AggregatesPayload, TraceSummaryWire } from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let code = 'HTTP_ERROR';
    let message = response.statusText;
    try {
      const body = await response.json();
      code = body.code ?? code;
      message = body.message ?? message;
    } catch {
      // non-JSON error body
    }
    throw new ApiError(response.status, code, message);
  }
  return response.json() as Promise<T>;
}

export class TravistaClient {
  constructor(private baseUrl: string) {}

  async listTraces(limit = 200, order = 'duration'): Promise<TraceSummaryWire[]> {
    const response = await fetch(
      `${this.baseUrl}/api/traces?limit=${limit}&order=${order}`,
    );
    const body = await asJson<{ traces: TraceSummaryWire[] }>(response);
    return body.traces;
  }

  async getAggregates(
    traceId: string,
    params: { bins: number; threshold: number; rarityCutoff: number },
  ): Promise<AggregatesPayload> {
    const query = new URLSearchParams({
      bins: String(params.bins),
      threshold: String(params.threshold),
      rarity_cutoff: String(params.rarityCutoff),
    });
    const response = await fetch(
      `${this.baseUrl}/api/trace/${encodeURIComponent(traceId)}/aggregates?${query}`,
    );
    return asJson<AggregatesPayload>(response);
  }
}
