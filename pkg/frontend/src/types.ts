// Wire-protocol types (the annotation service's JSON bodies).

export type TaskKind = "cluster_label" | "hope_label" | "relevance_label" | "wild_verify";

export type HopeLabel = "hope" | "not_hope" | "indeterminate";

export interface AnnotationTask {
  task_id: string;
  kind: TaskKind;
  batch: string;
  payload: {
    comment_id?: string;
    text?: string;
    week_bucket?: number;
    probability?: number;
    day?: string;
    cluster?: number;
    comments?: Array<{ comment_id: string; text: string }>;
    [key: string]: unknown;
  };
  assigned_annotators: string[];
  status: "open" | "complete";
  labels?: Record<string, SubmittedLabel>;
  consensus?: string | null;
}

export interface SubmittedLabel {
  label: string;
  criteria: string[];
}

export interface LabelSubmission {
  annotator: string;
  label: string;
  criteria: string[];
}

export interface Criterion {
  id: string;
  text: string;
}

export interface Guideline {
  task: string;
  summary: string;
  positive: Criterion[];
  negative: Criterion[];
  text?: string;
}

export interface AgreementReport {
  batch: string;
  n: number;
  p_o: number | null;
  kappa: number | null;
  disagreements: string[];
}

export interface ClusterSample {
  cluster: number;
  sample: Array<{ comment_id: string; text: string }>;
}
