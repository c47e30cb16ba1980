import { ApiClient, ApiError, UnreachableError } from "./api.js";
import { SelectionState } from "./logic.js";
import type { AnnotationTask, Guideline, LabelSubmission, TaskKind } from "./types.js";
import {
  agreementView,
  clusterTaskView,
  el,
  hopeTaskView,
  relevanceTaskView,
  resolutionView,
  retryBanner,
} from "./views.js";

const api = new ApiClient("");

interface Session {
  annotator: string;
  kind?: TaskKind;
}

const app = () => document.getElementById("app")!;
const status = () => document.getElementById("status")!;

function setStatus(text: string) {
  status().textContent = text;
}

function show(node: HTMLElement) {
  const root = app();
  root.replaceChildren(node);
}

/**
 * Submit with an explicit retry loop: a failed submission keeps the payload
 * and shows a banner instead of dropping the label on the floor.
 */
async function submitWithRetry(taskId: string, submission: LabelSubmission): Promise<"ok" | "conflict"> {
  for (;;) {
    try {
      await api.submitLabel(taskId, submission);
      return "ok";
    } catch (err) {
      if (err instanceof ApiError) {
        // 409: already labeled / task complete; surface and move on
        setStatus(`service says: ${err.message}`);
        return "conflict";
      }
      const reason = err instanceof UnreachableError ? err.message : String(err);
      await new Promise<void>((resolve) => {
        const banner = retryBanner(`submission not saved (${reason})`, () => {
          banner.remove();
          resolve();
        });
        app().prepend(banner);
      });
    }
  }
}

async function labelLoop(session: Session, guideline: Guideline): Promise<void> {
  for (;;) {
    let task: AnnotationTask | null;
    try {
      task = await api.nextTask(session.annotator, session.kind);
    } catch (err) {
      const reason = err instanceof Error ? err.message : String(err);
      await new Promise<void>((resolve) => {
        show(retryBanner(`cannot fetch tasks (${reason})`, resolve));
      });
      continue;
    }
    if (task === null) {
      show(el("p", "done", "No open tasks for you. Check agreement below or take a break."));
      setStatus(`queue empty for ${session.annotator}`);
      return;
    }
    setStatus(`task ${task.task_id} (${task.kind}, batch ${task.batch})`);
    const outcome = await presentTask(session, task, guideline);
    if (outcome === "conflict") {
      // someone else completed it meanwhile; just continue to the next task
      continue;
    }
  }
}

function presentTask(
  session: Session,
  task: AnnotationTask,
  guideline: Guideline,
): Promise<"ok" | "conflict"> {
  return new Promise((resolve) => {
    const submitSelection = async (state: SelectionState) => {
      const submission: LabelSubmission = {
        annotator: session.annotator,
        label: state.label!,
        criteria: [...state.checkedCriteria],
      };
      resolve(await submitWithRetry(task.task_id, submission));
    };

    switch (task.kind) {
      case "hope_label":
      case "wild_verify": {
        const view = hopeTaskView(task, guideline, submitSelection);
        show(view.root);
        break;
      }
      case "cluster_label": {
        show(
          clusterTaskView(task, async (language, romanized) => {
            const submission: LabelSubmission = {
              annotator: session.annotator,
              label: romanized ? `${language} (E)` : language,
              criteria: [],
            };
            resolve(await submitWithRetry(task.task_id, submission));
          }),
        );
        break;
      }
      case "relevance_label": {
        show(
          relevanceTaskView(task, async (label) => {
            resolve(
              await submitWithRetry(task.task_id, {
                annotator: session.annotator,
                label,
                criteria: [],
              }),
            );
          }),
        );
        break;
      }
    }
  });
}

async function showAgreement(batch: string): Promise<void> {
  try {
    const report = await api.agreement(batch);
    show(
      agreementView(report, async (taskId) => {
        const task = await api.getTask(taskId);
        show(
          resolutionView(task, async (label) => {
            const out = await api.resolve(taskId, label);
            setStatus(out.notice ?? `consensus recorded: ${out.consensus ?? label}`);
            await showAgreement(batch);
          }),
        );
      }),
    );
    setStatus(`agreement for batch ${batch}`);
  } catch (err) {
    setStatus(err instanceof Error ? err.message : String(err));
  }
}

function wireControls(): void {
  const annotatorInput = document.getElementById("annotator") as HTMLInputElement;
  const kindSelect = document.getElementById("kind") as HTMLSelectElement;
  const startButton = document.getElementById("start") as HTMLButtonElement;
  const batchInput = document.getElementById("batch") as HTMLInputElement;
  const agreementButton = document.getElementById("show-agreement") as HTMLButtonElement;

  startButton.addEventListener("click", async () => {
    const annotator = annotatorInput.value.trim();
    if (!annotator) {
      setStatus("enter an annotator id first");
      return;
    }
    const kind = (kindSelect.value || undefined) as TaskKind | undefined;
    try {
      const guideline = await api.guideline();
      await labelLoop({ annotator, kind }, guideline);
    } catch (err) {
      setStatus(err instanceof Error ? err.message : String(err));
    }
  });

  agreementButton.addEventListener("click", () => {
    const batch = batchInput.value.trim();
    if (!batch) {
      setStatus("enter a batch name first");
      return;
    }
    void showAgreement(batch);
  });
}

document.addEventListener("DOMContentLoaded", wireControls);
