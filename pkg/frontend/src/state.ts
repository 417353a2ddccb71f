// Session-scoped view state. The token lives in sessionStorage so a
// reload keeps the session; everything else is re-fetched from the API.

import { ApiClient } from "./api.js";
import type { Role } from "./types.js";

const TOKEN_KEY = "tutorkit.token";
const ROLE_KEY = "tutorkit.role";

export interface ViewState {
  client: ApiClient;
  role: Role | null;
  studentToken: string | null;
}

export function createState(baseUrl: string): ViewState {
  const token = sessionStorage.getItem(TOKEN_KEY);
  const role = sessionStorage.getItem(ROLE_KEY) as Role | null;
  return { client: new ApiClient(baseUrl, token), role, studentToken: null };
}

export async function signIn(state: ViewState, token: string): Promise<Role> {
  state.client.setToken(token);
  const me = await state.client.whoami();
  state.role = me.role;
  state.studentToken = me.student_token;
  sessionStorage.setItem(TOKEN_KEY, token);
  sessionStorage.setItem(ROLE_KEY, me.role);
  return me.role;
}

export function signOut(state: ViewState): void {
  state.client.setToken(null);
  state.role = null;
  state.studentToken = null;
  sessionStorage.removeItem(TOKEN_KEY);
  sessionStorage.removeItem(ROLE_KEY);
}
