// Pure UI rules, kept out of the DOM layer so they are directly testable.

import type { AnnotationTask, SubmittedLabel } from "./types.js";

/** Inter-rater agreement at or above this kappa gets the "strong" badge. */
export const STRONG_AGREEMENT_KAPPA = 0.82;

export interface SelectionState {
  label: string | null;
  checkedCriteria: string[];
  noneApply: boolean; // explicit "no negative criterion applies" choice
}

export const EMPTY_SELECTION: SelectionState = {
  label: null,
  checkedCriteria: [],
  noneApply: false,
};

function positives(criteria: string[]): string[] {
  return criteria.filter((id) => id.startsWith("P"));
}

function negatives(criteria: string[]): string[] {
  return criteria.filter((id) => id.startsWith("N"));
}

/**
 * Submission gate for hope-speech (and wild-verification) tasks:
 * no label, no submit; "hope" needs at least one positive criterion;
 * "not_hope" needs a negative criterion or the explicit "none apply" choice.
 * Other label values (e.g. "indeterminate") only need the label itself.
 */
export function canSubmit(state: SelectionState): boolean {
  if (!state.label) return false;
  if (state.label === "hope") return positives(state.checkedCriteria).length >= 1;
  if (state.label === "not_hope") {
    return negatives(state.checkedCriteria).length >= 1 || state.noneApply;
  }
  return true;
}

/** Cluster-labeling gate: a non-empty language name. */
export function canSubmitClusterLabel(language: string): boolean {
  return language.trim().length > 0;
}

export function agreementBadge(kappa: number | null): "strong agreement" | "weak agreement" | "no data" {
  if (kappa === null) return "no data";
  return kappa >= STRONG_AGREEMENT_KAPPA ? "strong agreement" : "weak agreement";
}

export function formatKappa(kappa: number | null): string {
  return kappa === null ? "n/a" : kappa.toFixed(4);
}

/** True when the task's two submitted labels disagree and no consensus exists. */
export function needsResolution(task: AnnotationTask): boolean {
  if (task.status !== "complete" || !task.labels) return false;
  const values = new Set(Object.values(task.labels).map((l) => l.label));
  return values.size > 1 && !task.consensus;
}

/**
 * Per-criterion counts over confirmed positives; the raw material for the
 * "breakdown of positives found in the wild" chart.
 */
export function tallyCriteria(labels: SubmittedLabel[]): Map<string, number> {
  const counts = new Map<string, number>();
  for (const submitted of labels) {
    if (submitted.label !== "hope") continue;
    for (const id of submitted.criteria) {
      counts.set(id, (counts.get(id) ?? 0) + 1);
    }
  }
  return counts;
}

/** Cluster tasks render their sample comments; others render the one comment. */
export function taskComments(task: AnnotationTask): Array<{ comment_id: string; text: string }> {
  if (task.kind === "cluster_label") {
    return task.payload.comments ?? [];
  }
  return [
    {
      comment_id: task.payload.comment_id ?? task.task_id,
      text: task.payload.text ?? "",
    },
  ];
}

export function describeTask(task: AnnotationTask): string {
  switch (task.kind) {
    case "cluster_label":
      return `Assign the dominant language of cluster ${task.payload.cluster}`;
    case "hope_label":
      return "Is this comment hope-speech?";
    case "wild_verify":
      return `Verify classifier positive (p=${(task.payload.probability ?? 0).toFixed(2)})`;
    case "relevance_label":
      return "Is this video relevant to the event coverage?";
  }
}
