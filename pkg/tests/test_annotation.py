import json
import threading

import pytest
import requests

from hopespeech.annotation import AnnotationStore, AnnotationTask, make_server, write_tasks_jsonl
from hopespeech.classifier import cohen_kappa


def make_tasks(n=10, batch="round1", annotators=("anno1", "anno2")):
    return [
        AnnotationTask(
            task_id=f"t{i:02d}",
            kind="hope_label",
            payload={"comment_id": f"c{i}", "text": f"comment number {i}"},
            batch=batch,
            assigned_annotators=list(annotators),
        )
        for i in range(n)
    ]


@pytest.fixture()
def store_dir(tmp_path):
    write_tasks_jsonl(make_tasks(), tmp_path / "tasks.jsonl")
    return tmp_path


@pytest.fixture()
def server(store_dir):
    store = AnnotationStore(store_dir)
    srv = make_server(store, port=0)
    thread = threading.Thread(target=srv.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{srv.server_address[1]}"
    yield base, store_dir
    srv.shutdown()
    srv.server_close()
    thread.join(timeout=5)


class TestStore:
    def test_requires_task_queue(self, tmp_path):
        with pytest.raises(FileNotFoundError, match="task queue"):
            AnnotationStore(tmp_path)

    def test_label_flow_and_reload(self, store_dir):
        store = AnnotationStore(store_dir)
        assert store.status("t00") == "open"
        store.submit_label("t00", "anno1", "hope", ["P8"])
        assert store.status("t00") == "open"
        store.submit_label("t00", "anno2", "hope", ["P6"])
        assert store.status("t00") == "complete"
        assert store.consensus("t00") == "hope"  # agreement auto-resolves
        # a fresh store sees the same state (everything is on disk)
        again = AnnotationStore(store_dir)
        assert again.status("t00") == "complete"
        assert again.labels["t00"]["anno1"]["criteria"] == ["P8"]


class TestWireProtocol:
    def label(self, base, task_id, annotator, label, criteria=()):
        return requests.post(
            f"{base}/api/tasks/{task_id}/label",
            json={"annotator": annotator, "label": label, "criteria": list(criteria)},
            timeout=5,
        )

    def test_next_task_cycle(self, server):
        base, _ = server
        r = requests.get(f"{base}/api/tasks/next", params={"annotator": "anno1"}, timeout=5)
        assert r.status_code == 200
        task = r.json()
        assert task["task_id"] == "t00"
        assert task["status"] == "open"
        assert self.label(base, "t00", "anno1", "hope", ["P8"]).status_code == 200
        # anno1 moves on, anno2 still sees t00
        assert (
            requests.get(f"{base}/api/tasks/next", params={"annotator": "anno1"}, timeout=5).json()[
                "task_id"
            ]
            == "t01"
        )
        assert (
            requests.get(f"{base}/api/tasks/next", params={"annotator": "anno2"}, timeout=5).json()[
                "task_id"
            ]
            == "t00"
        )

    def test_empty_queue_gives_204(self, server):
        base, _ = server
        r = requests.get(
            f"{base}/api/tasks/next", params={"annotator": "anno1", "kind": "wild_verify"}, timeout=5
        )
        assert r.status_code == 204
        assert r.content == b""

    def test_double_label_conflict(self, server):
        base, _ = server
        assert self.label(base, "t01", "anno1", "hope").status_code == 200
        r = self.label(base, "t01", "anno1", "not_hope")
        assert r.status_code == 409
        assert "already labeled" in r.json()["error"]

    def test_unassigned_annotator_rejected(self, server):
        base, _ = server
        assert self.label(base, "t02", "intruder", "hope").status_code == 403

    def test_labels_hidden_until_complete(self, server):
        base, _ = server
        self.label(base, "t03", "anno1", "hope")
        view = requests.get(f"{base}/api/tasks/t03", timeout=5).json()
        assert view["status"] == "open"
        assert "labels" not in view
        self.label(base, "t03", "anno2", "not_hope")
        view = requests.get(f"{base}/api/tasks/t03", timeout=5).json()
        assert view["status"] == "complete"
        assert view["labels"]["anno1"]["label"] == "hope"
        # immutable once both submitted
        assert self.label(base, "t03", "anno1", "hope").status_code == 409

    def test_two_annotator_session_agreement_and_resolution(self, server):
        base, store_dir = server
        labels_a = ["hope"] * 5 + ["not_hope"] * 5
        labels_b = ["hope"] * 5 + ["not_hope"] * 3 + ["hope"] * 2  # 2 disagreements
        for i, (la, lb) in enumerate(zip(labels_a, labels_b)):
            assert self.label(base, f"t{i:02d}", "anno1", la, ["P8"]).status_code == 200
            assert self.label(base, f"t{i:02d}", "anno2", lb).status_code == 200

        r = requests.get(f"{base}/api/agreement", params={"batch": "round1"}, timeout=5).json()
        assert r["n"] == 10
        assert r["p_o"] == pytest.approx(0.8)
        assert r["kappa"] == pytest.approx(0.6)  # hand: p_e=0.5 -> (0.8-0.5)/0.5
        assert r["kappa"] == pytest.approx(cohen_kappa(labels_a, labels_b))
        assert r["disagreements"] == ["t08", "t09"]

        # resolve one disagreement
        r = requests.post(f"{base}/api/tasks/t08/resolve", json={"label": "hope"}, timeout=5)
        assert r.status_code == 200 and r.json()["consensus"] == "hope"
        # resolving an agreed task is a no-op with a notice
        r = requests.post(f"{base}/api/tasks/t00/resolve", json={"label": "not_hope"}, timeout=5)
        assert r.status_code == 200
        assert "already agree" in r.json()["notice"]

        # raw submissions are never rewritten: labels file holds all 20 rows
        lines = (store_dir / "labels.jsonl").read_text().strip().splitlines()
        assert len(lines) == 20
        recs = [json.loads(l) for l in lines]
        assert {r_["annotator"] for r_ in recs} == {"anno1", "anno2"}
        resolutions = (store_dir / "resolutions.jsonl").read_text().strip().splitlines()
        assert len(resolutions) == 1
        assert json.loads(resolutions[0]) == {"task_id": "t08", "label": "hope"}

    def test_resolve_before_completion_conflict(self, server):
        base, _ = server
        r = requests.post(f"{base}/api/tasks/t05/resolve", json={"label": "hope"}, timeout=5)
        assert r.status_code == 409

    def test_malformed_body_rejected(self, server):
        base, _ = server
        r = requests.post(
            f"{base}/api/tasks/t06/label",
            data=b"{not json",
            headers={"Content-Type": "application/json"},
            timeout=5,
        )
        assert r.status_code == 400
        assert "malformed" in r.json()["error"]

    def test_unknown_task_404(self, server):
        base, _ = server
        assert requests.get(f"{base}/api/tasks/zzz", timeout=5).status_code == 404
        assert self.label(base, "zzz", "anno1", "hope").status_code == 404

    def test_guideline_endpoint(self, server):
        base, _ = server
        crit = requests.get(f"{base}/api/guideline", timeout=5).json()
        assert len(crit["positive"]) == 8
        assert len(crit["negative"]) == 5
        assert crit["positive"][0]["id"] == "P1"
        assert "text" in crit


class TestClusterSampleEndpoint:
    def test_sample_served_from_model(self, tmp_path):
        import numpy as np

        from hopespeech.langid import ClusterModel, LanguageTag, save_cluster_model

        model = ClusterModel(
            k=2,
            centroids=np.zeros((2, 3)),
            labels=[LanguageTag("english"), None],
            inertia=0.0,
            seed=0,
            audit_samples=[
                [{"comment_id": f"c{i}", "text": f"sample {i}"} for i in range(10)],
                [{"comment_id": "d0", "text": "other"}],
            ],
        )
        model_path = tmp_path / "clusters.json"
        save_cluster_model(model, model_path)
        write_tasks_jsonl(make_tasks(1), tmp_path / "tasks.jsonl")
        store = AnnotationStore(tmp_path)
        srv = make_server(store, port=0, cluster_model=model_path)
        thread = threading.Thread(target=srv.serve_forever, daemon=True)
        thread.start()
        base = f"http://127.0.0.1:{srv.server_address[1]}"
        try:
            r = requests.get(f"{base}/api/clusters/0/sample", timeout=5).json()
            assert len(r["sample"]) == 10
            assert r["sample"][0]["text"] == "sample 0"
            assert requests.get(f"{base}/api/clusters/9/sample", timeout=5).status_code == 404
        finally:
            srv.shutdown()
            srv.server_close()
            thread.join(timeout=5)
