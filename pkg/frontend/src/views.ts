// DOM construction. All state changes flow back through callbacks; nothing
// here talks to the network.

import type { AnnotationTask, Criterion, Guideline } from "./types.js";
import {
  SelectionState,
  agreementBadge,
  canSubmit,
  canSubmitClusterLabel,
  describeTask,
  formatKappa,
  taskComments,
} from "./logic.js";
import type { AgreementReport } from "./types.js";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function commentCards(task: AnnotationTask): HTMLElement {
  const wrap = el("div", "comments");
  for (const comment of taskComments(task)) {
    const card = el("div", "comment-card");
    card.appendChild(el("div", "comment-id", comment.comment_id));
    card.appendChild(el("div", "comment-text", comment.text));
    wrap.appendChild(card);
  }
  return wrap;
}

function criteriaGroup(
  title: string,
  criteria: Criterion[],
  state: SelectionState,
  onChange: () => void,
): HTMLElement {
  const box = el("fieldset", "criteria-group");
  box.appendChild(el("legend", undefined, title));
  for (const criterion of criteria) {
    const row = el("label", "criterion");
    const check = el("input") as HTMLInputElement;
    check.type = "checkbox";
    check.value = criterion.id;
    check.addEventListener("change", () => {
      if (check.checked) {
        state.checkedCriteria.push(criterion.id);
      } else {
        state.checkedCriteria = state.checkedCriteria.filter((id) => id !== criterion.id);
      }
      onChange();
    });
    row.appendChild(check);
    row.appendChild(el("span", "criterion-id", criterion.id));
    row.appendChild(el("span", undefined, criterion.text));
    box.appendChild(row);
  }
  return box;
}

export interface HopeTaskView {
  root: HTMLElement;
  state: SelectionState;
}

/** Hope-speech / wild-verification card: label radios + criteria checklists. */
export function hopeTaskView(
  task: AnnotationTask,
  guideline: Guideline,
  onSubmit: (state: SelectionState) => void,
): HopeTaskView {
  const state: SelectionState = { label: null, checkedCriteria: [], noneApply: false };
  const root = el("section", "task");
  root.appendChild(el("h2", undefined, describeTask(task)));
  root.appendChild(commentCards(task));

  const submit = el("button", "submit", "Submit label") as HTMLButtonElement;
  submit.disabled = true;
  const refresh = () => {
    submit.disabled = !canSubmit(state);
  };

  const labels = el("div", "label-choice");
  for (const value of ["hope", "not_hope", "indeterminate"]) {
    const row = el("label");
    const radio = el("input") as HTMLInputElement;
    radio.type = "radio";
    radio.name = `label-${task.task_id}`;
    radio.value = value;
    radio.addEventListener("change", () => {
      state.label = value;
      refresh();
    });
    row.appendChild(radio);
    row.appendChild(el("span", undefined, value));
    labels.appendChild(row);
  }
  root.appendChild(labels);

  root.appendChild(criteriaGroup("Positive criteria (hope)", guideline.positive, state, refresh));
  root.appendChild(criteriaGroup("Negative criteria (not hope)", guideline.negative, state, refresh));

  const noneRow = el("label", "none-apply");
  const none = el("input") as HTMLInputElement;
  none.type = "checkbox";
  none.addEventListener("change", () => {
    state.noneApply = none.checked;
    refresh();
  });
  noneRow.appendChild(none);
  noneRow.appendChild(el("span", undefined, "no negative criterion applies (plain not-hope)"));
  root.appendChild(noneRow);

  submit.addEventListener("click", () => onSubmit(state));
  root.appendChild(submit);
  return { root, state };
}

/** Cluster card: exactly the audit sample plus a language input. */
export function clusterTaskView(
  task: AnnotationTask,
  onSubmit: (language: string, romanized: boolean) => void,
): HTMLElement {
  const root = el("section", "task");
  root.appendChild(el("h2", undefined, describeTask(task)));
  root.appendChild(commentCards(task));

  const form = el("div", "cluster-form");
  const input = el("input") as HTMLInputElement;
  input.type = "text";
  input.placeholder = "dominant language";
  const roman = el("input") as HTMLInputElement;
  roman.type = "checkbox";
  const romanLabel = el("label");
  romanLabel.appendChild(roman);
  romanLabel.appendChild(el("span", undefined, "written in Roman script (E)"));
  const submit = el("button", "submit", "Assign language") as HTMLButtonElement;
  submit.disabled = true;
  input.addEventListener("input", () => {
    submit.disabled = !canSubmitClusterLabel(input.value);
  });
  submit.addEventListener("click", () => onSubmit(input.value.trim(), roman.checked));
  form.appendChild(input);
  form.appendChild(romanLabel);
  form.appendChild(submit);
  root.appendChild(form);
  return root;
}

export function relevanceTaskView(
  task: AnnotationTask,
  onSubmit: (label: string) => void,
): HTMLElement {
  const root = el("section", "task");
  root.appendChild(el("h2", undefined, describeTask(task)));
  root.appendChild(commentCards(task));
  for (const value of ["relevant", "irrelevant"]) {
    const button = el("button", "submit", value);
    button.addEventListener("click", () => onSubmit(value));
    root.appendChild(button);
  }
  return root;
}

export function agreementView(
  report: AgreementReport,
  onOpenTask: (taskId: string) => void,
): HTMLElement {
  const root = el("section", "agreement");
  root.appendChild(el("h2", undefined, `Agreement for batch "${report.batch}"`));
  const badge = el("span", "badge", agreementBadge(report.kappa));
  if (report.kappa !== null && report.kappa >= 0.82) badge.classList.add("badge-strong");
  const stats = el("p");
  stats.append(
    `completed pairs: ${report.n}, observed agreement: ` +
      `${report.p_o === null ? "n/a" : report.p_o.toFixed(2)}, kappa: ${formatKappa(report.kappa)} `,
  );
  stats.appendChild(badge);
  root.appendChild(stats);

  const list = el("ul", "disagreements");
  if (!report.disagreements.length) {
    root.appendChild(el("p", undefined, "No disagreements in this batch."));
  }
  for (const taskId of report.disagreements) {
    const item = el("li");
    const link = el("button", "link", taskId);
    link.addEventListener("click", () => onOpenTask(taskId));
    item.appendChild(link);
    list.appendChild(item);
  }
  root.appendChild(list);
  return root;
}

/** Disagreed task: both raw labels plus consensus buttons. */
export function resolutionView(
  task: AnnotationTask,
  onResolve: (label: string) => void,
): HTMLElement {
  const root = el("section", "resolution");
  root.appendChild(el("h2", undefined, `Resolve ${task.task_id}`));
  root.appendChild(commentCards(task));
  const table = el("div", "raw-labels");
  const seen = new Set<string>();
  for (const [annotator, submitted] of Object.entries(task.labels ?? {})) {
    table.appendChild(
      el("div", undefined, `${annotator}: ${submitted.label} [${submitted.criteria.join(", ")}]`),
    );
    seen.add(submitted.label);
  }
  root.appendChild(table);
  if (task.consensus) {
    root.appendChild(el("p", "notice", `consensus already recorded: ${task.consensus}`));
    return root;
  }
  if (seen.size <= 1) {
    root.appendChild(el("p", "notice", "labels agree; nothing to resolve"));
    return root;
  }
  for (const label of seen) {
    const button = el("button", "submit", `consensus: ${label}`);
    button.addEventListener("click", () => onResolve(label));
    root.appendChild(button);
  }
  return root;
}

export function retryBanner(message: string, onRetry: () => void): HTMLElement {
  const banner = el("div", "retry-banner");
  banner.appendChild(el("span", undefined, message));
  const retry = el("button", "retry", "Retry");
  retry.addEventListener("click", onRetry);
  banner.appendChild(retry);
  return banner;
}
