// Student portal: browse courses, pick questions, see the running score.

import { clear, el } from "../dom.js";
import { ViewState } from "../state.js";
import { renderAnswerFlow } from "./answerFlow.js";

export async function renderPortal(container: HTMLElement, state: ViewState): Promise<void> {
  const [courses, score] = await Promise.all([
    state.client.listCourses(),
    state.client.myScore(),
  ]);
  const list = el("ul", { class: "course-cards" });
  for (const course of courses) {
    list.append(
      el("li", { class: "course-card" },
        el("a", { href: `#/portal/course/${course.id}` }, course.title),
        el("p", {}, course.description)),
    );
  }
  clear(container);
  container.append(
    el("section", { class: "student-portal" },
      el("h2", {}, "Student portal"),
      el("p", { class: "score" }, `Your score: ${score.score}`),
      list),
  );
}

export async function renderCourseQuestions(
  container: HTMLElement,
  state: ViewState,
  courseId: string,
): Promise<void> {
  const [courses, questions] = await Promise.all([
    state.client.listCourses(),
    state.client.listQuestions(courseId),
  ]);
  const course = courses.find((c) => c.id === courseId);
  const list = el("ul", { class: "question-cards" });
  for (const q of questions) {
    list.append(
      el("li", {},
        el("a", { href: `#/portal/course/${courseId}/question/${q.id}` },
          `${q.topic} / ${q.sub_topic} — ${q.body.slice(0, 90)}`),
        el("span", { class: "points" }, ` ${q.point_value} pt`)),
    );
  }
  clear(container);
  container.append(
    el("section", { class: "course-questions" },
      el("a", { href: "#/portal" }, "← courses"),
      el("h2", {}, course?.title ?? "Course"),
      list),
  );
}

export async function renderQuestionAttempt(
  container: HTMLElement,
  state: ViewState,
  courseId: string,
  questionId: string,
): Promise<void> {
  const courses = await state.client.listCourses();
  const course = courses.find((c) => c.id === courseId);
  const wrapper = el("section", { class: "attempt-page" },
    el("a", { href: `#/portal/course/${courseId}` }, "← back to questions"));
  const mount = el("div", {});
  wrapper.append(mount);
  clear(container);
  container.append(wrapper);
  // The hint panel only exists for feedback-cohort courses; the service
  // never sends hints for baseline courses either.
  await renderAnswerFlow(mount, state.client, questionId, course?.feedback_enabled ?? true);
}
