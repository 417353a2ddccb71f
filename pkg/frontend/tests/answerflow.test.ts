// @vitest-environment happy-dom
//
// DOM behavior of the student answer flow, driven against the live
// service with the mock provider.

import { beforeEach, describe, expect, it } from "vitest";

import { renderAnswerFlow } from "../src/views/answerFlow.js";
import { makeCourseWithQuestion, studentSession, waitFor } from "./helpers.js";

let container: HTMLElement;

beforeEach(() => {
  document.body.innerHTML = "";
  container = document.createElement("div");
  document.body.append(container);
});

function pick(key: string): void {
  const input = container.querySelector<HTMLInputElement>(`input[value="${key}"]`);
  if (!input) throw new Error(`no option ${key} rendered`);
  input.click();
}

function submit(): void {
  const form = container.querySelector("form");
  if (!form) throw new Error("no form rendered");
  form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));
}

describe("answer flow", () => {
  it("shows the hint panel verbatim after a wrong answer in a feedback course", async () => {
    const { question } = await makeCourseWithQuestion(true);
    const { client } = await studentSession();
    await renderAnswerFlow(container, client, question.id, true);

    pick("C");
    submit();
    await waitFor(() => container.querySelector(".hint-panel") !== null);
    const hint = container.querySelector(".hint-text")!.textContent;
    expect(hint && hint.length).toBeTruthy();
    // re-attempt stays possible
    const button = container.querySelector<HTMLButtonElement>(".submit-answer")!;
    expect(button.disabled).toBe(false);
  });

  it("never renders a hint panel for a baseline-cohort course", async () => {
    const { question } = await makeCourseWithQuestion(false);
    const { client } = await studentSession();
    await renderAnswerFlow(container, client, question.id, false);

    for (const key of ["C", "D"]) {
      pick(key);
      submit();
      await waitFor(() => container.querySelector(".wrong-panel") !== null);
      expect(container.querySelector(".hint-panel")).toBeNull();
      expect(container.querySelector(".hint-unavailable")).toBeNull();
    }
  });

  it("shows success and points on a correct answer", async () => {
    const { question } = await makeCourseWithQuestion(true);
    const { client } = await studentSession();
    await renderAnswerFlow(container, client, question.id, true);

    pick("B");
    submit();
    await waitFor(() => container.querySelector(".success-panel") !== null);
    expect(container.querySelector(".success-panel")!.textContent).toContain("+2 points");
    expect(container.querySelector(".explanation-panel")!.textContent).toContain(
      "the tandem shares the load",
    );
  });

  it("disables input and reveals the explanation at attempt exhaustion", async () => {
    const { question } = await makeCourseWithQuestion(true); // limit 3
    const { client } = await studentSession();
    await renderAnswerFlow(container, client, question.id, true);

    for (let i = 0; i < 3; i++) {
      pick("C");
      submit();
      await waitFor(() =>
        container.querySelectorAll(".hint-panel, .limit-panel").length > 0 &&
        container.querySelector(".attempt-status")!.textContent!.includes(`${2 - i} attempt`),
      );
    }
    await waitFor(() => container.querySelector(".limit-panel") !== null);
    const button = container.querySelector<HTMLButtonElement>(".submit-answer")!;
    expect(button.disabled).toBe(true);
    const option = container.querySelector<HTMLInputElement>('input[value="C"]')!;
    expect(option.disabled).toBe(true);
    expect(container.querySelector(".explanation-panel")!.textContent).toContain(
      "the tandem shares the load",
    );
  });

  it("renders a short-answer textarea for short answers", async () => {
    const { instructor, course } = await makeCourseWithQuestion(true);
    const short = await instructor.upsertQuestion(course.id, {
      topic: "t", sub_topic: "s", kind: "short_answer", body: "explain",
      options: [], answer_key: [], reference_answer: "ref", explanation: "",
      context: "", media: [], point_value: 1, attempt_limit: null,
      related_question_ids: [],
    });
    const { client } = await studentSession();
    await renderAnswerFlow(container, client, short.id, true);
    expect(container.querySelector("textarea.short-answer-input")).not.toBeNull();
    expect(container.querySelector("fieldset.options")).toBeNull();
  });
});
