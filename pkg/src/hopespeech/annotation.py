"""Annotation task store and HTTP service.

Tasks live in a JSONL queue file; every annotator submission and every
consensus resolution is appended to its own JSONL file, never rewritten.
The HTTP layer is a thin JSON wrapper over the store, consumed by the
browser UI and by scripted annotators alike.

Wire protocol (UTF-8 JSON bodies):

    GET  /api/tasks/next?annotator=ID&kind=K  -> one open task or 204
    POST /api/tasks/{id}/label                -> {annotator, label, criteria}
    GET  /api/tasks/{id}                      -> task; labels once complete
    GET  /api/agreement?batch=B               -> {p_o, kappa, disagreements}
    POST /api/tasks/{id}/resolve              -> {label}
    GET  /api/clusters/{k}/sample             -> cluster audit sample
    GET  /api/guideline                       -> hope-speech criteria
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import urlparse, parse_qs

from .classifier import cohen_kappa
from .resources import guideline_criteria, guideline_text

__all__ = [
    "AnnotationTask",
    "AnnotationStore",
    "StoreError",
    "make_server",
    "serve",
]

TASK_KINDS = ("cluster_label", "hope_label", "relevance_label", "wild_verify")


class StoreError(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status
        self.message = message


@dataclass
class AnnotationTask:
    task_id: str
    kind: str
    payload: dict
    batch: str = ""
    assigned_annotators: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "task_id": self.task_id,
            "kind": self.kind,
            "batch": self.batch,
            "payload": self.payload,
            "assigned_annotators": list(self.assigned_annotators),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AnnotationTask":
        kind = obj["kind"]
        if kind not in TASK_KINDS:
            raise ValueError(f"unknown task kind {kind!r}")
        return cls(
            task_id=str(obj["task_id"]),
            kind=kind,
            payload=obj.get("payload", {}),
            batch=str(obj.get("batch", "")),
            assigned_annotators=[str(a) for a in obj.get("assigned_annotators", [])],
        )


def write_tasks_jsonl(tasks, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in tasks:
            fh.write(json.dumps(t.to_json(), ensure_ascii=False, sort_keys=True) + "\n")


class AnnotationStore:
    """Task queue plus append-only label and resolution logs.

    Writes are serialized by a single lock; raw submissions are never
    modified once written.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.tasks_path = self.root / "tasks.jsonl"
        self.labels_path = self.root / "labels.jsonl"
        self.resolutions_path = self.root / "resolutions.jsonl"
        if not self.tasks_path.exists():
            raise FileNotFoundError(f"task queue file not initialized: {self.tasks_path}")
        self._lock = threading.Lock()
        self.tasks: dict[str, AnnotationTask] = {}
        self.task_order: list[str] = []
        # task_id -> annotator -> {"label": ..., "criteria": [...]}
        self.labels: dict[str, dict[str, dict]] = {}
        self.resolutions: dict[str, str] = {}
        self._load()

    def _load(self) -> None:
        with open(self.tasks_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                task = AnnotationTask.from_json(json.loads(line))
                if task.task_id in self.tasks:
                    raise ValueError(f"duplicate task id {task.task_id!r}")
                self.tasks[task.task_id] = task
                self.task_order.append(task.task_id)
        for path, sink in ((self.labels_path, "label"), (self.resolutions_path, "resolve")):
            if not path.exists():
                continue
            with open(path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    rec = json.loads(line)
                    if sink == "label":
                        self.labels.setdefault(rec["task_id"], {})[rec["annotator"]] = {
                            "label": rec["label"],
                            "criteria": rec.get("criteria", []),
                        }
                    else:
                        self.resolutions[rec["task_id"]] = rec["label"]

    # -- queries ---------------------------------------------------------

    def _required_annotators(self, task: AnnotationTask) -> int:
        return len(task.assigned_annotators) if task.assigned_annotators else 2

    def status(self, task_id: str) -> str:
        task = self.tasks[task_id]
        submitted = self.labels.get(task_id, {})
        if len(submitted) >= self._required_annotators(task):
            return "complete"
        return "open"

    def consensus(self, task_id: str) -> str | None:
        """Resolved label; agreeing annotators auto-resolve."""
        if task_id in self.resolutions:
            return self.resolutions[task_id]
        submitted = self.labels.get(task_id, {})
        if self.status(task_id) == "complete":
            values = {rec["label"] for rec in submitted.values()}
            if len(values) == 1:
                return next(iter(values))
        return None

    def task_view(self, task_id: str) -> dict:
        task = self.tasks.get(task_id)
        if task is None:
            raise StoreError(404, f"no such task: {task_id}")
        view = task.to_json()
        status = self.status(task_id)
        view["status"] = status
        if status == "complete":  # raw labels are private until both are in
            view["labels"] = self.labels.get(task_id, {})
            view["consensus"] = self.consensus(task_id)
        return view

    def next_task(self, annotator: str, kind: str | None = None) -> dict | None:
        if not annotator:
            raise StoreError(400, "annotator required")
        for task_id in self.task_order:
            task = self.tasks[task_id]
            if kind and task.kind != kind:
                continue
            if task.assigned_annotators and annotator not in task.assigned_annotators:
                continue
            if self.status(task_id) == "complete":
                continue
            if annotator in self.labels.get(task_id, {}):
                continue
            view = task.to_json()
            view["status"] = "open"
            return view
        return None

    def agreement(self, batch: str) -> dict:
        seq_a: list[str] = []
        seq_b: list[str] = []
        disagreements: list[str] = []
        for task_id in self.task_order:
            task = self.tasks[task_id]
            if task.batch != batch or self.status(task_id) != "complete":
                continue
            submitted = self.labels[task_id]
            annotators = (
                [a for a in task.assigned_annotators if a in submitted]
                if task.assigned_annotators
                else sorted(submitted)
            )
            if len(annotators) < 2:
                continue
            la = submitted[annotators[0]]["label"]
            lb = submitted[annotators[1]]["label"]
            seq_a.append(la)
            seq_b.append(lb)
            if la != lb:
                disagreements.append(task_id)
        if not seq_a:
            return {"batch": batch, "n": 0, "p_o": None, "kappa": None, "disagreements": []}
        p_o = sum(a == b for a, b in zip(seq_a, seq_b)) / len(seq_a)
        return {
            "batch": batch,
            "n": len(seq_a),
            "p_o": p_o,
            "kappa": cohen_kappa(seq_a, seq_b),
            "disagreements": disagreements,
        }

    # -- mutations (append-only) ------------------------------------------

    def submit_label(self, task_id: str, annotator: str, label: str, criteria=()) -> dict:
        with self._lock:
            task = self.tasks.get(task_id)
            if task is None:
                raise StoreError(404, f"no such task: {task_id}")
            if not annotator or not label:
                raise StoreError(400, "annotator and label required")
            if task.assigned_annotators and annotator not in task.assigned_annotators:
                raise StoreError(403, f"annotator {annotator!r} not assigned to task {task_id}")
            if self.status(task_id) == "complete":
                raise StoreError(409, "task already complete")
            if annotator in self.labels.get(task_id, {}):
                raise StoreError(409, f"already labeled by {annotator}")
            record = {
                "task_id": task_id,
                "annotator": annotator,
                "label": label,
                "criteria": list(criteria),
            }
            with open(self.labels_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
            self.labels.setdefault(task_id, {})[annotator] = {
                "label": label,
                "criteria": list(criteria),
            }
            return {"ok": True, "task_id": task_id, "status": self.status(task_id)}

    def resolve(self, task_id: str, label: str) -> dict:
        with self._lock:
            if task_id not in self.tasks:
                raise StoreError(404, f"no such task: {task_id}")
            if self.status(task_id) != "complete":
                raise StoreError(409, "cannot resolve before both annotators submit")
            submitted = self.labels[task_id]
            values = {rec["label"] for rec in submitted.values()}
            if len(values) == 1:
                return {
                    "ok": True,
                    "task_id": task_id,
                    "consensus": next(iter(values)),
                    "notice": "labels already agree; nothing to resolve",
                }
            if task_id in self.resolutions:
                raise StoreError(409, "already resolved")
            if not label:
                raise StoreError(400, "label required")
            record = {"task_id": task_id, "label": label}
            with open(self.resolutions_path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
            self.resolutions[task_id] = label
            return {"ok": True, "task_id": task_id, "consensus": label}


_ROUTE_TASK = re.compile(r"^/api/tasks/([^/]+)$")
_ROUTE_LABEL = re.compile(r"^/api/tasks/([^/]+)/label$")
_ROUTE_RESOLVE = re.compile(r"^/api/tasks/([^/]+)/resolve$")
_ROUTE_CLUSTER = re.compile(r"^/api/clusters/(\d+)/sample$")

_STATIC_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json; charset=utf-8",
    ".map": "application/json; charset=utf-8",
}


def _make_handler(store: AnnotationStore, cluster_model_path: Path | None, static_dir: Path | None):
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def _send_json(self, obj, status: int = 200) -> None:
            body = json.dumps(obj, ensure_ascii=False).encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()
            self.wfile.write(body)

        def _send_empty(self, status: int = 204) -> None:
            self.send_response(status)
            self.send_header("Content-Length", "0")
            self.send_header("Access-Control-Allow-Origin", "*")
            self.end_headers()

        def _read_body(self) -> dict:
            length = int(self.headers.get("Content-Length", 0))
            raw = self.rfile.read(length) if length else b""
            if not raw:
                return {}
            try:
                return json.loads(raw.decode("utf-8"))
            except json.JSONDecodeError as exc:
                raise StoreError(400, f"malformed JSON body: {exc}") from exc

        def _serve_static(self, path: str) -> None:
            if static_dir is None:
                self._send_json({"error": "not found"}, 404)
                return
            rel = path.lstrip("/") or "index.html"
            target = (static_dir / rel).resolve()
            if not str(target).startswith(str(static_dir.resolve())) or not target.is_file():
                self._send_json({"error": "not found"}, 404)
                return
            body = target.read_bytes()
            self.send_response(200)
            ctype = _STATIC_TYPES.get(target.suffix, "application/octet-stream")
            self.send_header("Content-Type", ctype)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_OPTIONS(self):
            self.send_response(204)
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.send_header("Content-Length", "0")
            self.end_headers()

        def do_GET(self):
            try:
                url = urlparse(self.path)
                query = parse_qs(url.query)
                if url.path == "/api/tasks/next":
                    annotator = query.get("annotator", [""])[0]
                    kind = query.get("kind", [None])[0]
                    if kind is not None and kind not in TASK_KINDS:
                        raise StoreError(400, f"unknown kind {kind!r}")
                    task = store.next_task(annotator, kind)
                    if task is None:
                        self._send_empty(204)  # no tasks
                    else:
                        self._send_json(task)
                    return
                m = _ROUTE_TASK.match(url.path)
                if m:
                    self._send_json(store.task_view(m.group(1)))
                    return
                if url.path == "/api/agreement":
                    batch = query.get("batch", [""])[0]
                    self._send_json(store.agreement(batch))
                    return
                m = _ROUTE_CLUSTER.match(url.path)
                if m:
                    if cluster_model_path is None or not cluster_model_path.exists():
                        raise StoreError(404, "no cluster model configured")
                    obj = json.loads(cluster_model_path.read_text(encoding="utf-8"))
                    samples = obj.get("audit_samples") or []
                    idx = int(m.group(1))
                    if idx >= len(samples):
                        raise StoreError(404, f"no audit sample for cluster {idx}")
                    self._send_json({"cluster": idx, "sample": samples[idx]})
                    return
                if url.path == "/api/guideline":
                    crit = guideline_criteria()
                    crit["text"] = guideline_text()
                    self._send_json(crit)
                    return
                self._serve_static(url.path)
            except StoreError as exc:
                self._send_json({"error": exc.message}, exc.status)

        def do_POST(self):
            try:
                url = urlparse(self.path)
                body = self._read_body()
                m = _ROUTE_LABEL.match(url.path)
                if m:
                    result = store.submit_label(
                        m.group(1),
                        str(body.get("annotator", "")),
                        str(body.get("label", "")),
                        body.get("criteria", []),
                    )
                    self._send_json(result)
                    return
                m = _ROUTE_RESOLVE.match(url.path)
                if m:
                    self._send_json(store.resolve(m.group(1), str(body.get("label", ""))))
                    return
                raise StoreError(404, f"no such endpoint: {url.path}")
            except StoreError as exc:
                self._send_json({"error": exc.message}, exc.status)

    return Handler


def make_server(
    store: AnnotationStore,
    host: str = "127.0.0.1",
    port: int = 8787,
    cluster_model: str | Path | None = None,
    static_dir: str | Path | None = None,
) -> ThreadingHTTPServer:
    handler = _make_handler(
        store,
        Path(cluster_model) if cluster_model else None,
        Path(static_dir) if static_dir else None,
    )
    return ThreadingHTTPServer((host, port), handler)


def serve(store: AnnotationStore, host: str, port: int, cluster_model=None, static_dir=None) -> None:
    server = make_server(store, host, port, cluster_model, static_dir)
    addr = server.server_address
    print(f"annotation service on http://{addr[0]}:{addr[1]}/ (store: {store.root})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
