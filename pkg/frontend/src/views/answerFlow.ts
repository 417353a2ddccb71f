// Student answer flow: render the question, submit, show the hint or the
// success panel, allow re-attempts until the limit is reached, then
// disable input and reveal the instructor explanation.
//
// opened_at is captured when the question renders (trust-limited: the
// service only rejects submissions that precede it).

import { ApiClient, ApiError } from "../api.js";
import { clear, el } from "../dom.js";
import type { QuestionView, SubmitOutcome } from "../types.js";

export interface AnswerFlowHooks {
  onFinished?: () => void;
}

export async function renderAnswerFlow(
  container: HTMLElement,
  client: ApiClient,
  questionId: string,
  hintsEnabled: boolean,
  hooks: AnswerFlowHooks = {},
): Promise<void> {
  const question = (await client.getQuestion(questionId)) as QuestionView;
  const openedAt = new Date().toISOString();

  const feedback = el("div", { class: "feedback" });
  const status = el("p", { class: "attempt-status" }, attemptStatusText(question.attempt_limit));
  const form = el("form", { class: "answer-form" });
  const submit = el("button", { type: "submit", class: "submit-answer" }, "Submit answer");

  const inputs = renderInputs(question);
  form.append(inputs.root, submit);
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    submit.disabled = true;
    try {
      const outcome = await client.submitAttempt(question.id, inputs.read(), openedAt);
      showOutcome(outcome);
    } catch (error) {
      showError(error);
    } finally {
      if (!done) submit.disabled = false;
    }
  });

  let done = false;

  function finish(explanation: string | null) {
    done = true;
    submit.disabled = true;
    inputs.disable();
    if (explanation) {
      feedback.append(
        el("div", { class: "explanation-panel" },
          el("h4", {}, "Instructor explanation"),
          el("p", {}, explanation)),
      );
    }
    hooks.onFinished?.();
  }

  function showOutcome(outcome: SubmitOutcome) {
    clear(feedback);
    if (outcome.attempts_remaining !== null) {
      status.textContent = `${outcome.attempts_remaining} attempt(s) remaining`;
    }
    if (outcome.correct) {
      feedback.append(
        el("div", { class: "success-panel" },
          el("strong", {}, "Correct!"),
          el("span", {}, outcome.points_awarded > 0 ? ` +${outcome.points_awarded} points` : " (already solved, no points)")),
      );
      finish(outcome.explanation);
      return;
    }
    if (outcome.hint !== null && hintsEnabled) {
      // the hint is displayed verbatim
      feedback.append(
        el("div", { class: "hint-panel" },
          el("h4", {}, "Hint"),
          el("p", { class: "hint-text" }, outcome.hint)),
      );
    } else if (outcome.hint_unavailable) {
      feedback.append(
        el("div", { class: "hint-unavailable" }, "Hint unavailable right now; your attempt was still recorded."),
      );
    } else {
      feedback.append(el("div", { class: "wrong-panel" }, "Not quite. Try again."));
    }
    if (outcome.attempts_remaining === 0) {
      feedback.append(el("div", { class: "limit-panel" }, "No attempts left."));
      finish(outcome.explanation);
    }
  }

  function showError(error: unknown) {
    clear(feedback);
    if (error instanceof ApiError && error.errorCode === "attempt_limit_exceeded") {
      feedback.append(el("div", { class: "limit-panel" }, "Attempt limit reached."));
      finish((error.details["explanation"] as string) ?? null);
      return;
    }
    if (error instanceof ApiError && error.errorCode === "provider_error") {
      feedback.append(
        el("div", { class: "hint-unavailable" }, "The grader is unavailable; this attempt was not recorded. Try again."),
      );
      return;
    }
    feedback.append(
      el("div", { class: "error-panel" }, error instanceof Error ? error.message : String(error)),
    );
  }

  clear(container);
  container.append(
    el("section", { class: "answer-flow", "data-question-id": question.id },
      el("header", {},
        el("h3", {}, question.body),
        el("p", { class: "question-meta" },
          `${question.topic} / ${question.sub_topic} · ${question.point_value} point(s)`)),
      ...question.media.map((m) =>
        el("img", { src: client.mediaUrl(m.digest), class: "question-media", alt: "question attachment" })),
      form,
      status,
      feedback,
    ),
  );
}

function attemptStatusText(limit: number | null): string {
  return limit === null ? "Unlimited attempts" : `Up to ${limit} attempt(s)`;
}

interface InputGroup {
  root: HTMLElement;
  read: () => string[] | string;
  disable: () => void;
}

function renderInputs(question: QuestionView): InputGroup {
  if (question.kind === "short_answer") {
    const area = el("textarea", { name: "answer", rows: "4", class: "short-answer-input" });
    return {
      root: el("label", { class: "field" }, "Your answer", area),
      read: () => area.value,
      disable: () => {
        area.disabled = true;
      },
    };
  }
  const multiple = question.kind === "multiple_choice";
  const type = multiple ? "checkbox" : "radio";
  const boxes: HTMLInputElement[] = [];
  const root = el("fieldset", { class: "options" });
  for (const option of question.options) {
    const input = el("input", { type, name: "answer", value: option.key }) as HTMLInputElement;
    boxes.push(input);
    root.append(el("label", { class: "option" }, input, `${option.key}. ${option.text}`));
  }
  return {
    root,
    read: () => boxes.filter((b) => b.checked).map((b) => b.value),
    disable: () => boxes.forEach((b) => (b.disabled = true)),
  };
}
