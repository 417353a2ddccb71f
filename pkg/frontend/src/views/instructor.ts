// Instructor dashboard: course CRUD, per-course question management with
// the authoring form, student-session minting, and report download.

import { clear, el } from "../dom.js";
import { ViewState } from "../state.js";
import type { QuestionDraft, QuestionFull, QuestionView } from "../types.js";
import { renderQuestionForm } from "./questionForm.js";

export async function renderInstructorDashboard(container: HTMLElement, state: ViewState): Promise<void> {
  const courses = await state.client.listCourses();

  const createForm = el("form", { class: "course-form" });
  const title = el("input", { type: "text", placeholder: "course title" }) as HTMLInputElement;
  const description = el("input", { type: "text", placeholder: "description" }) as HTMLInputElement;
  const feedback = el("input", { type: "checkbox", checked: true }) as HTMLInputElement;
  createForm.append(
    title, description,
    el("label", { class: "cohort-toggle" }, feedback, "AI hints enabled (feedback cohort)"),
    el("button", { type: "submit" }, "Create course"),
  );
  createForm.addEventListener("submit", async (event) => {
    event.preventDefault();
    await state.client.createCourse(title.value, description.value, feedback.checked);
    await renderInstructorDashboard(container, state);
  });

  const list = el("ul", { class: "course-list" });
  for (const course of courses) {
    const open = el("a", { href: `#/instructor/course/${course.id}` }, course.title);
    const cohort = el("span", { class: "cohort-badge" },
      course.feedback_enabled ? "hints on" : "baseline (no hints)");
    const remove = el("button", { type: "button", class: "delete-course" }, "Delete");
    remove.addEventListener("click", async () => {
      await state.client.deleteCourse(course.id);
      await renderInstructorDashboard(container, state);
    });
    list.append(el("li", {}, open, " ", cohort, " ", remove));
  }

  clear(container);
  container.append(
    el("section", { class: "instructor-dashboard" },
      el("h2", {}, "Instructor dashboard"),
      createForm,
      list),
  );
}

export async function renderCourseAdmin(
  container: HTMLElement,
  state: ViewState,
  courseId: string,
): Promise<void> {
  const [course, questions] = await Promise.all([
    state.client.listCourses().then((all) => all.find((c) => c.id === courseId)),
    state.client.listQuestions(courseId),
  ]);
  if (!course) {
    clear(container).append(el("p", { class: "error-panel" }, "Course not found."));
    return;
  }

  const formMount = el("div", { class: "question-form-mount" });
  const candidates = questions.map((q) => ({ id: q.id, course_id: q.course_id, body: q.body }));

  function openForm(initial?: QuestionDraft) {
    renderQuestionForm(formMount, state.client, courseId, candidates, initial, {
      onSaved: () => void renderCourseAdmin(container, state, courseId),
    });
  }

  const questionRows = el("ul", { class: "question-list" });
  for (const q of questions) {
    const edit = el("button", { type: "button", class: "edit-question" }, "Edit");
    edit.addEventListener("click", async () => {
      const full = (await state.client.getQuestion(q.id)) as QuestionFull;
      openForm(draftFromQuestion(full));
    });
    const remove = el("button", { type: "button", class: "delete-question" }, "Delete");
    remove.addEventListener("click", async () => {
      await state.client.deleteQuestion(q.id);
      await renderCourseAdmin(container, state, courseId);
    });
    questionRows.append(
      el("li", { "data-question-id": q.id },
        el("span", { class: "question-kind" }, q.kind),
        ` ${q.topic} / ${q.sub_topic}: ${q.body.slice(0, 90)} `,
        edit, " ", remove),
    );
  }

  const download = el("button", { type: "button", class: "download-report" }, "Download engagement CSV");
  download.addEventListener("click", async () => {
    const csv = await state.client.downloadReportCsv(courseId);
    const blob = new Blob([csv], { type: "text/csv" });
    const link = el("a", {
      href: URL.createObjectURL(blob),
      download: `report-${courseId}.csv`,
    });
    link.click();
    URL.revokeObjectURL(link.href);
  });

  const mintStudent = el("button", { type: "button", class: "mint-student" }, "Mint student token");
  const minted = el("code", { class: "minted-token" });
  mintStudent.addEventListener("click", async () => {
    const session = await state.client.createStudentSession();
    minted.textContent = session.session_token;
  });

  clear(container);
  container.append(
    el("section", { class: "course-admin" },
      el("a", { href: "#/instructor" }, "← all courses"),
      el("h2", {}, course.title),
      el("p", { class: "cohort-badge" }, course.feedback_enabled ? "hints on" : "baseline (no hints)"),
      el("div", { class: "course-actions" }, download, mintStudent, minted),
      el("h3", {}, "Questions"),
      questionRows,
      el("button", { type: "button", class: "new-question", onclick: () => openForm() }, "New question"),
      formMount),
  );
}

function draftFromQuestion(q: QuestionFull): QuestionDraft {
  return {
    id: q.id,
    topic: q.topic,
    sub_topic: q.sub_topic,
    kind: q.kind,
    body: q.body,
    options: q.kind === "true_false" ? [] : q.options.map((o) => o.text),
    answer_key: q.answer_key,
    reference_answer: q.reference_answer,
    explanation: q.explanation,
    context: q.context,
    media: [],
    point_value: q.point_value,
    attempt_limit: q.attempt_limit,
    related_question_ids: q.related_question_ids ?? [],
  };
}

export type { QuestionView };
