// Mirrors of the service's HTTP payloads plus the client-side validation
// that shadows the server's question invariants. Client validation is
// advisory only: the service re-validates everything.

export type Role = "student" | "instructor";

export type QuestionKind =
  | "multiple_choice"
  | "single_choice"
  | "true_false"
  | "short_answer";

export const QUESTION_KINDS: QuestionKind[] = [
  "multiple_choice",
  "single_choice",
  "true_false",
  "short_answer",
];

export const TRUE_FALSE_OPTIONS: Option[] = [
  { key: "T", text: "True" },
  { key: "F", text: "False" },
];

export interface Option {
  key: string;
  text: string;
}

export interface Course {
  id: string;
  title: string;
  description: string;
  feedback_enabled: boolean;
  cohort: "hints_on" | "hints_off";
  topic_index: Record<string, string[]>;
  created_at: string;
}

export interface MediaRef {
  digest: string;
  media_type: string;
}

// Student-facing question payload; grading fields never appear here.
export interface QuestionView {
  id: string;
  course_id: string;
  topic: string;
  sub_topic: string;
  kind: QuestionKind;
  body: string;
  options: Option[];
  media: MediaRef[];
  point_value: number;
  attempt_limit: number | null;
  related_question_ids?: string[];
}

// Instructor payload adds the grading fields.
export interface QuestionFull extends QuestionView {
  answer_key: string[];
  reference_answer: string;
  explanation: string;
  context: string;
}

export interface SubmitOutcome {
  correct: boolean;
  hint: string | null;
  attempts_remaining: number | null;
  points_awarded: number;
  explanation: string | null;
  hint_unavailable: boolean;
}

export interface ApiErrorBody {
  error_code: string;
  message: string;
  details: Record<string, unknown>;
}

export interface FieldError {
  field: string;
  message: string;
}

// The exact header the service writes; the dashboard checks downloads
// against it.
export const REPORT_CSV_HEADER =
  "student_token,question_id,total_attempts,correct,correctness_ratio," +
  "first_opened_at,last_submitted_at,time_spent_seconds,points_awarded,hints";

// Authoring draft mirroring the service's question-create body.
export interface QuestionDraft {
  id?: string;
  topic: string;
  sub_topic: string;
  kind: QuestionKind;
  body: string;
  options: string[];
  answer_key: string[];
  reference_answer: string;
  explanation: string;
  context: string;
  media: { content_b64: string; media_type: string }[];
  point_value: number;
  attempt_limit: number | null;
  related_question_ids: string[];
}

export function emptyDraft(kind: QuestionKind = "single_choice"): QuestionDraft {
  return {
    topic: "",
    sub_topic: "",
    kind,
    body: "",
    options: kind === "true_false" || kind === "short_answer" ? [] : ["", ""],
    answer_key: [],
    reference_answer: "",
    explanation: "",
    context: "",
    media: [],
    point_value: 1,
    attempt_limit: null,
    related_question_ids: [],
  };
}

export function optionKeyForIndex(index: number): string {
  return String.fromCharCode(65 + index); // A..Z by position
}

// Kind-dependent shape rules, mirroring the service.
export function validateQuestionDraft(draft: QuestionDraft): FieldError[] {
  const errors: FieldError[] = [];
  if (!draft.topic.trim()) errors.push({ field: "topic", message: "required" });
  if (!draft.sub_topic.trim()) errors.push({ field: "sub_topic", message: "required" });
  if (!draft.body.trim()) errors.push({ field: "body", message: "required" });
  if (!Number.isInteger(draft.point_value) || draft.point_value < 1) {
    errors.push({ field: "point_value", message: "must be a positive integer" });
  }
  if (draft.attempt_limit !== null && (!Number.isInteger(draft.attempt_limit) || draft.attempt_limit < 1)) {
    errors.push({ field: "attempt_limit", message: "must be >= 1 or unlimited" });
  }

  const kind = draft.kind;
  if (kind === "true_false") {
    if (draft.options.length > 0) {
      errors.push({ field: "options", message: "true/false uses the fixed T/F pair" });
    }
    if (draft.answer_key.length !== 1 || !["T", "F"].includes(draft.answer_key[0])) {
      errors.push({ field: "answer_key", message: "pick exactly one of T / F" });
    }
  } else if (kind === "single_choice" || kind === "multiple_choice") {
    if (draft.options.length < 2) {
      errors.push({ field: "options", message: "needs at least 2 options" });
    }
    if (draft.options.length > 26) {
      errors.push({ field: "options", message: "at most 26 options" });
    }
    draft.options.forEach((text, i) => {
      if (!text.trim()) errors.push({ field: `options[${i}]`, message: "option text required" });
    });
    const keys = draft.options.map((_, i) => optionKeyForIndex(i));
    if (kind === "single_choice" && draft.answer_key.length !== 1) {
      errors.push({ field: "answer_key", message: "pick exactly one correct option" });
    }
    if (kind === "multiple_choice" && draft.answer_key.length === 0) {
      errors.push({ field: "answer_key", message: "pick at least one correct option" });
    }
    for (const key of draft.answer_key) {
      if (!keys.includes(key)) {
        errors.push({ field: "answer_key", message: `key ${key} has no option` });
      }
    }
  } else if (kind === "short_answer") {
    if (draft.options.length > 0) {
      errors.push({ field: "options", message: "short answer takes no options" });
    }
    if (draft.answer_key.length > 0) {
      errors.push({ field: "answer_key", message: "short answer has no answer key" });
    }
    if (!draft.reference_answer.trim()) {
      errors.push({ field: "reference_answer", message: "required for short answer" });
    }
  }
  return errors;
}

// The related-question picker only ever offers questions from the same
// course; cross-course links are blocked client-side by construction.
export function relatedCandidates(
  all: { id: string; course_id: string; body: string }[],
  courseId: string,
  selfId?: string,
): { id: string; course_id: string; body: string }[] {
  return all.filter((q) => q.course_id === courseId && q.id !== selfId);
}
