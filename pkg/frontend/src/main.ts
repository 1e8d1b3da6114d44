import { SessionApi } from "./api";
import { ChatApp } from "./app";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("api") ?? "";
const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app mount point");
}

const app = new ChatApp(root, new SessionApi(baseUrl), {
  persistSession: (id) => window.sessionStorage.setItem("hemsagent-session", id),
  restoreSession: () => window.sessionStorage.getItem("hemsagent-session"),
});
void app.start();
