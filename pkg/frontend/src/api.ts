import { CheckResult, HealthStatus } from './types.js';

/** HTTP failure decoded from the service's error envelope. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

export const DEFAULT_BASE_URL = 'http://127.0.0.1:8000';

export class CheckClient {
  private base: string;
  private fetchImpl: typeof fetch;

  constructor(baseUrl: string = DEFAULT_BASE_URL, fetchImpl?: typeof fetch) {
    this.base = baseUrl.replace(/\/+$/, '');
    // bare `fetch` loses its `this` binding in browsers, so wrap the global
    this.fetchImpl = fetchImpl ?? ((input, init) => globalThis.fetch(input, init));
  }

  async check(text: string): Promise<CheckResult> {
    const response = await this.fetchImpl(`${this.base}/v1/check`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ text }),
    });
    return (await this.parse(response)) as CheckResult;
  }

  async health(): Promise<HealthStatus> {
    const response = await this.fetchImpl(`${this.base}/v1/health`);
    return (await this.parse(response)) as HealthStatus;
  }

  private async parse(response: Response): Promise<unknown> {
    if (response.ok) {
      return response.json();
    }
    let code = 'UNKNOWN';
    let message = `request failed with status ${response.status}`;
    try {
      const body = await response.json();
      if (body && typeof body === 'object' && body.error) {
        code = body.error.code ?? code;
        message = body.error.message ?? message;
      }
    } catch {
      // error body was not the JSON envelope; keep the fallback text
    }
    throw new ApiError(response.status, code, message);
  }
}
