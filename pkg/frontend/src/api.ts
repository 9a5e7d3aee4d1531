// Typed client for the auth service. Every outcome the UI renders comes
// from these responses; the UI itself holds no authentication logic.

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export type OutcomeKind = "Authenticated" | "Retry" | "Locked" | "SessionInvalid";

export interface OtpResult {
  outcome: OutcomeKind;
  remaining?: number;
}

export interface MailMessage {
  recipient: string;
  session_id: string;
  otps: string[];
  sent_at: number;
}

export interface ServerInfo {
  n_otps: number;
  demo_mode: boolean;
}

export class ApiError extends Error {
  constructor(
    readonly reason: string,
    readonly status: number,
  ) {
    super(reason);
  }
}

async function parse(res: Response): Promise<any> {
  const body = await res.json().catch(() => ({}));
  if (!res.ok && body.outcome === undefined) {
    throw new ApiError(body.error ?? `http-${res.status}`, res.status);
  }
  return body;
}

export class ApiClient {
  constructor(
    private readonly baseUrl = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private post(path: string, body: unknown): Promise<Response> {
    return this.fetchFn(`${this.baseUrl}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  async serverInfo(): Promise<ServerInfo> {
    return parse(await this.fetchFn(`${this.baseUrl}/healthz`));
  }

  async register(username: string, password: string, position: number): Promise<void> {
    await parse(
      await this.post("/register", {
        username,
        password,
        honeytoken_position: position,
      }),
    );
  }

  async login(username: string, password: string): Promise<string> {
    const body = await parse(await this.post("/login", { username, password }));
    return body.session_id as string;
  }

  async submitOtp(sessionId: string, otp: string): Promise<OtpResult> {
    // 423/410 carry an outcome body rather than an error; parse() lets them through
    return parse(await this.post("/otp", { session_id: sessionId, otp }));
  }

  async mailbox(username: string): Promise<MailMessage[]> {
    const body = await parse(await this.fetchFn(`${this.baseUrl}/demo/mailbox/${username}`));
    return body.messages as MailMessage[];
  }
}
