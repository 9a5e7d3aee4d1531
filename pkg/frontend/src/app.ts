// Browser bootstrap: render on every state change, wire form events,
// poll the demo mailbox once a second while an OTP is pending.

import { ApiClient } from "./api.js";
import { AppController } from "./controller.js";
import { renderApp } from "./views.js";

const MAILBOX_POLL_MS = 1000;

export function mount(root: HTMLElement, api = new ApiClient()): AppController {
  let pollTimer: number | null = null;

  const controller = new AppController(api, (state) => {
    root.innerHTML = renderApp(state);
    wire();
    if (state.view === "otp" && pollTimer === null) {
      pollTimer = window.setInterval(() => controller.refreshMailbox(), MAILBOX_POLL_MS);
    } else if (state.view !== "otp" && pollTimer !== null) {
      window.clearInterval(pollTimer);
      pollTimer = null;
    }
  });

  function field(form: HTMLFormElement, name: string): string {
    return (form.elements.namedItem(name) as HTMLInputElement).value;
  }

  function wire(): void {
    root.querySelector("#register-form")?.addEventListener("submit", (e) => {
      e.preventDefault();
      const form = e.target as HTMLFormElement;
      void controller.register(
        field(form, "username"),
        field(form, "password"),
        Number(field(form, "position")),
      );
    });

    root.querySelector("#login-form")?.addEventListener("submit", (e) => {
      e.preventDefault();
      const form = e.target as HTMLFormElement;
      void controller.login(field(form, "username"), field(form, "password"));
    });

    root.querySelector("#otp-form")?.addEventListener("submit", (e) => {
      e.preventDefault();
      void controller.submitOtp(field(e.target as HTMLFormElement, "otp"));
    });

    root.querySelectorAll("button.otp").forEach((button) => {
      button.addEventListener("click", () => {
        void controller.submitOtp((button as HTMLElement).dataset.otp ?? "");
      });
    });

    root.querySelector("#goto-login")?.addEventListener("click", (e) => {
      e.preventDefault();
      controller.showLogin();
    });
    root.querySelector("#goto-register")?.addEventListener("click", (e) => {
      e.preventDefault();
      controller.showRegister();
    });
  }

  root.innerHTML = renderApp(controller.state);
  wire();
  void controller.init(); // re-renders with the server's N when it answers
  return controller;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount(document.getElementById("app") as HTMLElement);
}
