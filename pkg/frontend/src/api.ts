// Typed client for the tutorkit HTTP API. Every method goes through one
// fetch wrapper that attaches the bearer token and converts the
// service's {error_code, message, details} bodies into ApiError.

import type {
  ApiErrorBody,
  Course,
  QuestionDraft,
  QuestionFull,
  QuestionView,
  Role,
  SubmitOutcome,
} from "./types.js";

export class ApiError extends Error {
  readonly errorCode: string;
  readonly status: number;
  readonly details: Record<string, unknown>;

  constructor(status: number, body: ApiErrorBody) {
    super(body.message);
    this.status = status;
    this.errorCode = body.error_code;
    this.details = body.details ?? {};
  }
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private token: string | null = null,
  ) {}

  setToken(token: string | null): void {
    this.token = token;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    if (body !== undefined) headers["Content-Type"] = "application/json";
    const response = await fetch(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
      // the bearer header must survive cross-origin requests
      credentials: "include",
    });
    if (!response.ok) {
      let parsed: ApiErrorBody;
      try {
        parsed = (await response.json()) as ApiErrorBody;
      } catch {
        parsed = { error_code: "http_error", message: response.statusText, details: {} };
      }
      throw new ApiError(response.status, parsed);
    }
    if (response.status === 204) return undefined as T;
    return (await response.json()) as T;
  }

  whoami(): Promise<{ role: Role; student_token: string | null }> {
    return this.request("GET", "/sessions/me");
  }

  createStudentSession(displayName = "", email = ""): Promise<{ session_token: string; student_token: string }> {
    return this.request("POST", "/sessions/students", { display_name: displayName, email });
  }

  listCourses(): Promise<Course[]> {
    return this.request("GET", "/courses");
  }

  createCourse(title: string, description: string, feedbackEnabled: boolean): Promise<Course> {
    return this.request("POST", "/courses", {
      title,
      description,
      feedback_enabled: feedbackEnabled,
    });
  }

  deleteCourse(courseId: string): Promise<void> {
    return this.request("DELETE", `/courses/${courseId}`);
  }

  listQuestions(courseId: string, topic?: string): Promise<QuestionView[]> {
    const query = topic ? `?topic=${encodeURIComponent(topic)}` : "";
    return this.request("GET", `/courses/${courseId}/questions${query}`);
  }

  getQuestion(questionId: string): Promise<QuestionView | QuestionFull> {
    return this.request("GET", `/questions/${questionId}`);
  }

  upsertQuestion(courseId: string, draft: QuestionDraft): Promise<QuestionFull> {
    return this.request("POST", `/courses/${courseId}/questions`, draft);
  }

  deleteQuestion(questionId: string): Promise<void> {
    return this.request("DELETE", `/questions/${questionId}`);
  }

  submitAttempt(
    questionId: string,
    answer: string[] | string,
    openedAt: string,
  ): Promise<SubmitOutcome> {
    return this.request("POST", `/questions/${questionId}/attempts`, {
      answer,
      opened_at: openedAt,
    });
  }

  myScore(): Promise<{ score: number }> {
    return this.request("GET", "/me/score");
  }

  async downloadReportCsv(courseId: string): Promise<string> {
    const headers: Record<string, string> = {};
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await fetch(`${this.baseUrl}/courses/${courseId}/report.csv`, {
      headers,
      credentials: "include",
    });
    if (!response.ok) {
      throw new ApiError(response.status, (await response.json()) as ApiErrorBody);
    }
    return response.text();
  }

  mediaUrl(digest: string): string {
    return `${this.baseUrl}/media/${digest}`;
  }
}
