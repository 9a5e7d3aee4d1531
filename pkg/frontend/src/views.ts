// HTML builders, kept pure so tests can inspect the exact markup.

import { UiState } from "./controller.js";

function esc(text: string): string {
  return text.replace(/[&<>"']/g, (ch) => `&#${ch.charCodeAt(0)};`);
}

export function renderBanner(state: UiState): string {
  if (!state.banner) return "";
  return `<p class="banner" role="alert">${esc(state.banner)}</p>`;
}

export function renderRegister(state: UiState): string {
  const radios = Array.from({ length: state.nOtps }, (_, i) => i + 1)
    .map(
      (p) => `
      <label class="position-choice">
        <input type="radio" name="position" value="${p}" ${p === 1 ? "checked" : ""} />
        position ${p}
      </label>`,
    )
    .join("");
  return `
    <section id="register-view">
      <h2>Create account</h2>
      <form id="register-form">
        <label>Username <input name="username" required /></label>
        <label>Password <input name="password" type="password" required minlength="8" /></label>
        <fieldset>
          <legend>Which of the ${state.nOtps} emailed codes will be your real one?</legend>
          ${radios}
        </fieldset>
        <button type="submit">Register</button>
        <p><a href="#" id="goto-login">I already have an account</a></p>
      </form>
    </section>`;
}

export function renderLogin(): string {
  return `
    <section id="login-view">
      <h2>Sign in</h2>
      <form id="login-form">
        <label>Username <input name="username" required /></label>
        <label>Password <input name="password" type="password" required /></label>
        <button type="submit">Sign in</button>
        <p><a href="#" id="goto-register">Create an account</a></p>
      </form>
    </section>`;
}

// Every OTP renders through the identical template: the mailbox must not
// hint at which position is real.
export function renderMailbox(otps: string[] | null): string {
  if (otps === null) {
    return `<div id="mailbox" class="mailbox"><p class="waiting">waiting for mail…</p></div>`;
  }
  const items = otps
    .map((otp) => `<li><button type="button" class="otp" data-otp="${esc(otp)}">${esc(otp)}</button></li>`)
    .join("");
  return `
    <div id="mailbox" class="mailbox">
      <h3>Inbox: your one-time codes</h3>
      <ol class="otp-list">${items}</ol>
      <p class="hint">Click your code, or type it below. Only the one you picked at registration works.</p>
    </div>`;
}

export function renderOtpEntry(state: UiState): string {
  return `
    <section id="otp-view">
      <h2>Second factor</h2>
      ${renderMailbox(state.mailboxOtps)}
      <form id="otp-form">
        <label>Code <input name="otp" inputmode="numeric" autocomplete="one-time-code" required /></label>
        <button type="submit">Verify</button>
      </form>
    </section>`;
}

export function renderSuccess(state: UiState): string {
  const who = state.session ? esc(state.session.username) : "";
  return `
    <section id="success-view">
      <h2>Authenticated</h2>
      <p>Welcome, ${who}. Both factors checked out.</p>
      <p><a href="#" id="goto-login">Start over</a></p>
    </section>`;
}

export function renderLocked(): string {
  return `
    <section id="locked-view">
      <h2>Account locked</h2>
      <p>A code that was never yours was entered, so this account is now locked.
      Ask an administrator to unlock it.</p>
      <p><a href="#" id="goto-login">Back to sign in</a></p>
    </section>`;
}

export function renderApp(state: UiState): string {
  const body = {
    register: () => renderRegister(state),
    login: () => renderLogin(),
    otp: () => renderOtpEntry(state),
    success: () => renderSuccess(state),
    locked: () => renderLocked(),
  }[state.view]();
  return `${renderBanner(state)}${body}`;
}
