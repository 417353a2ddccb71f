// Home page: sign in with a session token; routes to the instructor
// dashboard or the student portal based on the token's role claim.

import { clear, el } from "../dom.js";
import { ViewState, signIn, signOut } from "../state.js";

export function renderHome(container: HTMLElement, state: ViewState): void {
  const error = el("p", { class: "error-panel", hidden: true });
  const tokenInput = el("input", {
    type: "password",
    placeholder: "session token",
    class: "token-input",
  }) as HTMLInputElement;

  const form = el("form", { class: "login-form" });
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    error.hidden = true;
    try {
      const role = await signIn(state, tokenInput.value.trim());
      location.hash = role === "instructor" ? "#/instructor" : "#/portal";
    } catch {
      error.textContent = "That token was not accepted.";
      error.hidden = false;
    }
  });
  form.append(el("label", { class: "field" }, "Session token", tokenInput),
    el("button", { type: "submit" }, "Sign in"), error);

  const body: (HTMLElement | string)[] = [
    el("h1", {}, "tutorkit"),
    el("p", {},
      "Practice questions with adaptive, answer-free hints. Instructors author courses and download engagement reports; students work through questions and learn from their own error history."),
  ];
  if (state.role) {
    body.push(
      el("p", {}, `Signed in as ${state.role}.`),
      el("nav", { class: "home-nav" },
        el("a", { href: state.role === "instructor" ? "#/instructor" : "#/portal" },
          state.role === "instructor" ? "Open instructor dashboard" : "Open student portal"),
        el("button", {
          type: "button",
          onclick: () => {
            signOut(state);
            renderHome(container, state);
          },
        }, "Sign out")),
    );
  } else {
    body.push(form);
  }

  clear(container);
  container.append(el("section", { class: "home" }, ...body));
}
