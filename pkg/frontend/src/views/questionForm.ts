// Instructor question-authoring form. The field set follows the selected
// kind: choice kinds get an option editor with positional keys and
// correct-answer pickers, true/false collapses to the fixed T/F pair,
// short answer swaps options for a reference answer. Validation mirrors
// the service and is advisory; server field errors land inline too.

import { ApiClient, ApiError } from "../api.js";
import { clear, el } from "../dom.js";
import {
  FieldError,
  QuestionDraft,
  QuestionKind,
  QUESTION_KINDS,
  TRUE_FALSE_OPTIONS,
  emptyDraft,
  optionKeyForIndex,
  relatedCandidates,
  validateQuestionDraft,
} from "../types.js";

export interface QuestionFormHooks {
  onSaved?: () => void;
}

export function renderQuestionForm(
  container: HTMLElement,
  client: ApiClient,
  courseId: string,
  sameCourseQuestions: { id: string; course_id: string; body: string }[],
  initial?: QuestionDraft,
  hooks: QuestionFormHooks = {},
): void {
  let draft: QuestionDraft = initial ?? emptyDraft();

  const errorsBox = el("ul", { class: "field-errors" });
  const optionsArea = el("div", { class: "options-area" });
  const answerArea = el("div", { class: "answer-area" });

  function showErrors(errors: FieldError[]) {
    clear(errorsBox as HTMLElement);
    for (const err of errors) {
      errorsBox.append(el("li", { "data-field": err.field }, `${err.field}: ${err.message}`));
    }
  }

  function textField(label: string, field: keyof QuestionDraft, multiline = false) {
    const input = multiline
      ? el("textarea", { rows: "3", "data-field": field })
      : el("input", { type: "text", "data-field": field });
    (input as HTMLInputElement).value = String(draft[field] ?? "");
    input.addEventListener("input", () => {
      (draft as unknown as Record<string, unknown>)[field] = (input as HTMLInputElement).value;
    });
    return el("label", { class: "field" }, label, input);
  }

  function renderOptionsArea() {
    clear(optionsArea);
    clear(answerArea);
    if (draft.kind === "true_false") {
      // fixed pair, no editing
      optionsArea.append(
        el("p", { class: "fixed-options" },
          TRUE_FALSE_OPTIONS.map((o) => `${o.key}. ${o.text}`).join("   ")),
      );
      answerArea.append(answerPicker(TRUE_FALSE_OPTIONS.map((o) => o.key), false));
      return;
    }
    if (draft.kind === "short_answer") {
      answerArea.append(textField("Reference answer", "reference_answer", true));
      return;
    }
    const list = el("div", { class: "option-editor" });
    draft.options.forEach((text, index) => {
      const input = el("input", {
        type: "text",
        value: text,
        "data-option-index": String(index),
      }) as HTMLInputElement;
      input.addEventListener("input", () => {
        draft.options[index] = input.value;
      });
      const remove = el("button", { type: "button", class: "remove-option" }, "×");
      remove.addEventListener("click", () => {
        draft.options.splice(index, 1);
        draft.answer_key = draft.answer_key.filter((k) =>
          draft.options.map((_, i) => optionKeyForIndex(i)).includes(k));
        renderOptionsArea();
      });
      list.append(el("div", { class: "option-row" }, el("span", {}, optionKeyForIndex(index) + "."), input, remove));
    });
    const add = el("button", { type: "button", class: "add-option" }, "Add option");
    add.addEventListener("click", () => {
      draft.options.push("");
      renderOptionsArea();
    });
    optionsArea.append(list, add);
    answerArea.append(
      answerPicker(draft.options.map((_, i) => optionKeyForIndex(i)), draft.kind === "multiple_choice"),
    );
  }

  function answerPicker(keys: string[], multiple: boolean): HTMLElement {
    const box = el("fieldset", { class: "answer-picker" }, el("legend", {}, "Correct answer"));
    for (const key of keys) {
      const input = el("input", {
        type: multiple ? "checkbox" : "radio",
        name: "answer_key",
        value: key,
      }) as HTMLInputElement;
      input.checked = draft.answer_key.includes(key);
      input.addEventListener("change", () => {
        if (multiple) {
          draft.answer_key = input.checked
            ? [...draft.answer_key, key]
            : draft.answer_key.filter((k) => k !== key);
        } else {
          draft.answer_key = [key];
        }
      });
      box.append(el("label", { class: "answer-option" }, input, key));
    }
    return box;
  }

  const kindSelect = el("select", { class: "kind-select" }) as HTMLSelectElement;
  for (const kind of QUESTION_KINDS) {
    kindSelect.append(el("option", { value: kind, selected: kind === draft.kind }, kind));
  }
  kindSelect.addEventListener("change", () => {
    const kind = kindSelect.value as QuestionKind;
    const keep = { topic: draft.topic, sub_topic: draft.sub_topic, body: draft.body, id: draft.id };
    draft = { ...emptyDraft(kind), ...keep, kind };
    renderOptionsArea();
  });

  // Related questions: only this course's questions are offered, so a
  // cross-course link cannot be expressed in the UI.
  const relatedBox = el("fieldset", { class: "related-picker" }, el("legend", {}, "Related questions"));
  for (const candidate of relatedCandidates(sameCourseQuestions, courseId, draft.id)) {
    const input = el("input", { type: "checkbox", value: candidate.id }) as HTMLInputElement;
    input.checked = draft.related_question_ids.includes(candidate.id);
    input.addEventListener("change", () => {
      draft.related_question_ids = input.checked
        ? [...draft.related_question_ids, candidate.id]
        : draft.related_question_ids.filter((id) => id !== candidate.id);
    });
    relatedBox.append(el("label", { class: "related-option" }, input, candidate.body.slice(0, 80)));
  }

  const mediaInput = el("input", { type: "file", accept: "image/*", multiple: true }) as HTMLInputElement;
  mediaInput.addEventListener("change", async () => {
    draft.media = [];
    for (const file of Array.from(mediaInput.files ?? [])) {
      draft.media.push({ content_b64: await fileToBase64(file), media_type: file.type || "image/png" });
    }
  });

  const pointInput = el("input", { type: "number", min: "1", value: String(draft.point_value) }) as HTMLInputElement;
  pointInput.addEventListener("input", () => {
    draft.point_value = Number(pointInput.value);
  });
  const limitInput = el("input", {
    type: "number", min: "1", placeholder: "unlimited",
    value: draft.attempt_limit === null ? "" : String(draft.attempt_limit),
  }) as HTMLInputElement;
  limitInput.addEventListener("input", () => {
    draft.attempt_limit = limitInput.value === "" ? null : Number(limitInput.value);
  });

  const form = el("form", { class: "question-form" });
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const errors = validateQuestionDraft(draft);
    showErrors(errors);
    if (errors.length > 0) return; // advisory gate; the service re-validates
    try {
      await client.upsertQuestion(courseId, draft);
      showErrors([]);
      hooks.onSaved?.();
    } catch (error) {
      if (error instanceof ApiError && error.errorCode === "validation_error") {
        showErrors((error.details["field_errors"] as FieldError[]) ?? []);
      } else {
        showErrors([{ field: "form", message: error instanceof Error ? error.message : String(error) }]);
      }
    }
  });

  form.append(
    el("label", { class: "field" }, "Kind", kindSelect),
    textField("Topic", "topic"),
    textField("Sub-topic", "sub_topic"),
    textField("Question text", "body", true),
    optionsArea,
    answerArea,
    textField("Explanation (revealed after completion)", "explanation", true),
    textField("Context for the hint engine", "context", true),
    el("label", { class: "field" }, "Images", mediaInput),
    el("label", { class: "field" }, "Point value", pointInput),
    el("label", { class: "field" }, "Attempt limit", limitInput),
    relatedBox,
    errorsBox,
    el("button", { type: "submit", class: "save-question" }, draft.id ? "Save changes" : "Create question"),
  );

  renderOptionsArea();
  clear(container);
  container.append(form);
}

function fileToBase64(file: File): Promise<string> {
  return new Promise((resolve, reject) => {
    const reader = new FileReader();
    reader.onload = () => {
      const url = String(reader.result);
      resolve(url.slice(url.indexOf(",") + 1));
    };
    reader.onerror = () => reject(reader.error);
    reader.readAsDataURL(file);
  });
}
