import type { AnnotationSession, SessionState } from "./session.js";
import { compoundText } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

function banner(state: SessionState, session: AnnotationSession): HTMLElement {
  const box = el("div", "messages");
  if (state.notice) {
    const notice = el("div", "notice", state.notice);
    notice.setAttribute("role", "status");
    box.append(notice);
  }
  if (state.error) {
    const error = el("div", "error");
    error.setAttribute("role", "alert");
    error.append(el("span", undefined, state.error));
    if (state.phase === "annotating") {
      const retry = el("button", "retry", "retry");
      retry.id = "retry";
      retry.addEventListener("click", () => {
        // resend the pending label if one is held, otherwise re-fetch
        if (state.assignment !== null && state.selected !== null) {
          void session.submit();
        } else {
          void session.fetchNext();
        }
      });
      error.append(retry);
    }
    box.append(error);
  }
  return box;
}

function loginView(state: SessionState, session: AnnotationSession): HTMLElement {
  const pane = el("section", "pane login");
  pane.append(el("h1", undefined, "Compound annotation"));
  pane.append(
    el("p", undefined, "Sign in with your annotator name to begin."),
  );
  const input = el("input");
  input.id = "token";
  input.type = "text";
  input.placeholder = "annotator name";
  input.value = state.token;
  const start = el("button", "primary", "start");
  start.id = "start";
  start.addEventListener("click", () => void session.start(input.value));
  input.addEventListener("keydown", (event) => {
    if (event.key === "Enter") {
      void session.start(input.value);
    }
  });
  pane.append(input, start, banner(state, session));
  return pane;
}

function onboardingView(state: SessionState, session: AnnotationSession): HTMLElement {
  const pane = el("section", "pane onboarding");
  pane.append(el("h1", undefined, "The seventeen categories"));
  pane.append(
    el(
      "p",
      undefined,
      "Read each category and its examples before you start. " +
        "You will pick exactly one category per compound.",
    ),
  );
  const list = el("ol", "categories");
  for (const category of state.categories) {
    const item = el("li", "category");
    item.append(el("strong", undefined, category.name));
    item.append(el("span", "examples", ` ${category.examples.join(", ")}`));
    list.append(item);
  }
  pane.append(list);
  const begin = el("button", "primary", "begin annotating");
  begin.id = "begin";
  begin.addEventListener("click", () => void session.begin());
  pane.append(begin, banner(state, session));
  return pane;
}

function taskView(state: SessionState, session: AnnotationSession): HTMLElement {
  const pane = el("section", "pane task");
  const progress = el("div", "progress", `labeled: ${state.submitted}`);
  progress.id = "progress";
  pane.append(progress);

  if (state.assignment === null) {
    pane.append(el("p", undefined, "fetching the next compound"));
    pane.append(banner(state, session));
    return pane;
  }

  const compound = el("div", "compound", compoundText(state.assignment));
  compound.id = "compound";
  pane.append(compound);

  const options = el("div", "options");
  options.setAttribute("role", "radiogroup");
  for (const category of state.categories) {
    const row = el("label", "option");
    const radio = el("input");
    radio.type = "radio";
    radio.name = "category";
    radio.value = String(category.id);
    radio.checked = state.selected === category.id;
    radio.addEventListener("change", () => session.select(category.id));
    row.append(radio, el("span", undefined, category.name));
    const hint = el("details", "hint");
    hint.append(el("summary", undefined, "examples"));
    hint.append(el("span", undefined, category.examples.join(", ")));
    row.append(hint);
    options.append(row);
  }
  pane.append(options);

  const submit = el("button", "primary", state.busy ? "sending" : "submit");
  submit.id = "submit";
  submit.disabled = state.selected === null || state.busy;
  submit.addEventListener("click", () => void session.submit());
  pane.append(submit, banner(state, session));
  return pane;
}

function doneView(state: SessionState): HTMLElement {
  const pane = el("section", "pane done");
  pane.append(el("h1", undefined, "All done"));
  pane.append(
    el(
      "p",
      undefined,
      `No compounds left for you. You labeled ${state.submitted} this session.`,
    ),
  );
  return pane;
}

export function render(
  root: HTMLElement,
  state: SessionState,
  session: AnnotationSession,
): void {
  root.textContent = "";
  switch (state.phase) {
    case "login":
      root.append(loginView(state, session));
      break;
    case "onboarding":
      root.append(onboardingView(state, session));
      break;
    case "annotating":
      root.append(taskView(state, session));
      break;
    case "done":
      root.append(doneView(state));
      break;
  }
}
