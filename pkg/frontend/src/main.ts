import { ApiClient } from "./api.js";
import { AnnotationSession } from "./session.js";
import { render } from "./view.js";

const api = new ApiClient((url, init) => window.fetch(url, init));
const session = new AnnotationSession(api);
const root = document.getElementById("app");
if (root === null) {
  throw new Error("missing #app mount point");
}
session.subscribe((state) => render(root, state, session));
render(root, session.snapshot, session);
