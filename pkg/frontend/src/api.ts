/** Thin typed client for the planning service. The fetch implementation is
 * injectable so tests run without a network or a DOM. */

import { validatePlanResponse, validateSelectAck } from './schema';
import type { PlanResponse, SelectAck } from './types';

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}

export class Api {
  constructor(
    private baseUrl: string = '',
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async post(path: string, body: unknown): Promise<unknown> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}${path}`, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, `cannot reach the planning service: ${String(err)}`);
    }
    const payload = await response.json().catch(() => ({}));
    if (!response.ok) {
      const detail = (payload as { detail?: string; error?: string });
      throw new ApiError(response.status,
        detail.detail ?? detail.error ?? `HTTP ${response.status}`);
    }
    return payload;
  }

  async plan(text: string): Promise<PlanResponse> {
    return validatePlanResponse(await this.post('/plan', { text }));
  }

  async select(sessionId: string, option: string): Promise<SelectAck> {
    return validateSelectAck(
      await this.post('/select', { session_id: sessionId, option }),
    );
  }
}
