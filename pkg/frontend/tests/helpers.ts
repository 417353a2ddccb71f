import { readFileSync } from "node:fs";
import { join } from "node:path";

import { ApiClient } from "../src/api.js";
import type { QuestionDraft } from "../src/types.js";

export interface ServerInfo {
  baseUrl: string;
  instructorToken: string;
}

export function serverInfo(): ServerInfo {
  return JSON.parse(readFileSync(join(__dirname, ".server.json"), "utf-8"));
}

export function instructorClient(): ApiClient {
  const info = serverInfo();
  return new ApiClient(info.baseUrl, info.instructorToken);
}

export async function studentSession(): Promise<{ client: ApiClient; token: string }> {
  const instructor = instructorClient();
  const session = await instructor.createStudentSession("UI Test Student", "ui-test@example.com");
  return {
    client: new ApiClient(serverInfo().baseUrl, session.session_token),
    token: session.session_token,
  };
}

export function choiceDraft(overrides: Partial<QuestionDraft> = {}): QuestionDraft {
  return {
    topic: "traffic loading",
    sub_topic: "axles",
    kind: "single_choice",
    body: "Which configuration lowers per-axle stress?",
    options: ["Single axle", "Tandem axle", "Tridem axle", "Steering axle"],
    answer_key: ["B"],
    reference_answer: "",
    explanation: "the tandem shares the load",
    context: "watch for load sharing",
    media: [],
    point_value: 2,
    attempt_limit: 3,
    related_question_ids: [],
    ...overrides,
  };
}

export async function makeCourseWithQuestion(feedbackEnabled = true) {
  const instructor = instructorClient();
  const course = await instructor.createCourse(
    `UI test course ${Date.now()}-${Math.random().toString(36).slice(2, 8)}`,
    "fixture",
    feedbackEnabled,
  );
  const question = await instructor.upsertQuestion(course.id, choiceDraft());
  return { instructor, course, question };
}

export async function waitFor(
  predicate: () => boolean,
  timeoutMs = 10_000,
  stepMs = 25,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (Date.now() < deadline) {
    if (predicate()) return;
    await new Promise((r) => setTimeout(r, stepMs));
  }
  throw new Error("condition not met in time");
}
