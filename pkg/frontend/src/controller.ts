// UI state machine. Three screens (register, login+mailbox+OTP, outcome);
// every transition mirrors a server response and nothing is decided locally.

import { ApiClient, ApiError, OutcomeKind } from "./api.js";

export type View = "register" | "login" | "otp" | "success" | "locked";

export interface UiSession {
  sessionId: string;
  username: string;
  stage: "AwaitingOtp" | "Closed";
  lastOutcome?: OutcomeKind;
  remainingAttempts?: number;
}

export interface UiState {
  view: View;
  nOtps: number;
  banner: string | null;
  session: UiSession | null;
  mailboxOtps: string[] | null;
}

export class AppController {
  state: UiState = {
    view: "register",
    nOtps: 3,
    banner: null,
    session: null,
    mailboxOtps: null,
  };

  constructor(
    private readonly api: ApiClient,
    private readonly onChange: (state: UiState) => void = () => {},
  ) {}

  private update(patch: Partial<UiState>): void {
    this.state = { ...this.state, ...patch };
    this.onChange(this.state);
  }

  async init(): Promise<void> {
    try {
      const info = await this.api.serverInfo();
      this.update({ nOtps: info.n_otps });
    } catch {
      this.update({ banner: "server unreachable" });
    }
  }

  showRegister(): void {
    this.update({ view: "register", banner: null });
  }

  showLogin(): void {
    this.update({ view: "login", banner: null, session: null, mailboxOtps: null });
  }

  async register(username: string, password: string, position: number): Promise<void> {
    try {
      await this.api.register(username, password, position);
    } catch (err) {
      this.update({ banner: this.describe(err) });
      return; // stay on the register view, form preserved
    }
    // the chosen position is not retained anywhere past this call
    this.update({ view: "login", banner: null });
  }

  async login(username: string, password: string): Promise<void> {
    let sessionId: string;
    try {
      sessionId = await this.api.login(username, password);
    } catch (err) {
      const locked = err instanceof ApiError && err.status === 423;
      this.update({ banner: this.describe(err), view: locked ? "locked" : "login" });
      return;
    }
    this.update({
      view: "otp",
      banner: null,
      session: { sessionId, username, stage: "AwaitingOtp" },
      mailboxOtps: null,
    });
    await this.refreshMailbox();
  }

  async refreshMailbox(): Promise<void> {
    const session = this.state.session;
    if (!session || session.stage !== "AwaitingOtp") return;
    try {
      const messages = await this.api.mailbox(session.username);
      const current = messages.find((m) => m.session_id === session.sessionId);
      if (current) this.update({ mailboxOtps: current.otps });
    } catch (err) {
      this.update({ banner: this.describe(err) });
    }
  }

  async submitOtp(value: string): Promise<void> {
    const session = this.state.session;
    if (!session) return;
    let result;
    try {
      result = await this.api.submitOtp(session.sessionId, value);
    } catch (err) {
      this.update({ banner: this.describe(err) });
      return;
    }
    const updated: UiSession = {
      ...session,
      lastOutcome: result.outcome,
      remainingAttempts: result.remaining,
    };
    switch (result.outcome) {
      case "Authenticated":
        this.update({ view: "success", banner: null, session: { ...updated, stage: "Closed" } });
        break;
      case "Locked":
        this.update({ view: "locked", banner: null, session: { ...updated, stage: "Closed" } });
        break;
      case "Retry":
        this.update({
          banner: `not one of your codes - ${result.remaining} attempt(s) remaining`,
          session: updated,
        });
        break;
      case "SessionInvalid":
        this.update({
          view: "login",
          banner: "session expired or closed - log in again",
          session: null,
          mailboxOtps: null,
        });
        break;
    }
  }

  private describe(err: unknown): string {
    if (err instanceof ApiError) return err.reason;
    return "network failure";
  }
}
