// Hash router wiring the five surfaces together. The API base URL comes
// from the TUTORKIT_API global (set in index.html) or defaults to the
// same origin.

import { createState } from "./state.js";
import { renderHome } from "./views/home.js";
import { renderCourseAdmin, renderInstructorDashboard } from "./views/instructor.js";
import { renderCourseQuestions, renderPortal, renderQuestionAttempt } from "./views/portal.js";

declare global {
  interface Window {
    TUTORKIT_API?: string;
  }
}

const baseUrl = window.TUTORKIT_API ?? "";
const state = createState(baseUrl);
const root = document.getElementById("app") as HTMLElement;

async function route(): Promise<void> {
  const hash = location.hash || "#/";
  const parts = hash.slice(2).split("/").filter(Boolean);
  try {
    if (parts.length === 0) {
      renderHome(root, state);
    } else if (parts[0] === "instructor" && parts.length === 1) {
      await renderInstructorDashboard(root, state);
    } else if (parts[0] === "instructor" && parts[1] === "course" && parts[2]) {
      await renderCourseAdmin(root, state, parts[2]);
    } else if (parts[0] === "portal" && parts.length === 1) {
      await renderPortal(root, state);
    } else if (parts[0] === "portal" && parts[1] === "course" && parts[2] && parts[3] === "question" && parts[4]) {
      await renderQuestionAttempt(root, state, parts[2], parts[4]);
    } else if (parts[0] === "portal" && parts[1] === "course" && parts[2]) {
      await renderCourseQuestions(root, state, parts[2]);
    } else {
      renderHome(root, state);
    }
  } catch (error) {
    // auth failures land back on the sign-in page
    location.hash = "#/";
    renderHome(root, state);
    console.error(error);
  }
}

window.addEventListener("hashchange", () => void route());
void route();
