"""Command-line pipeline orchestration.

Every subcommand wraps one library operation, reads/writes the documented
file formats, and is rerunnable: identical configuration, inputs and seeds
produce byte-identical outputs. A JSON config file can provide defaults
for any flag; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

from . import annotation, classifier, corpus, embedding, intent, langid, resources


class CliError(Exception):
    pass


def _fail_missing(kind: str, path) -> None:
    raise CliError(f"missing {kind}: {path}")


def _need_file(path, kind: str) -> Path:
    if path is None:
        raise CliError(f"missing {kind} (no flag or config value)")
    p = Path(path)
    if not p.exists():
        _fail_missing(kind, p)
    return p


def load_config(path: str | None) -> dict:
    if not path:
        return {}
    p = Path(path)
    if not p.exists():
        _fail_missing("config file", p)
    try:
        with open(p, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CliError(f"config parse error at {p}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    if not isinstance(cfg, dict):
        raise CliError(f"config root must be an object: {p}")
    return cfg


def _cfg(config: dict, section: str, key: str, flag_value, default=None):
    """Flag > config-file value > default."""
    if flag_value is not None:
        return flag_value
    return config.get(section, {}).get(key, default)


def _parse_day(raw: str) -> datetime:
    return datetime.strptime(raw, "%Y-%m-%d").replace(tzinfo=timezone.utc)


def _window_args(args) -> tuple[datetime, datetime] | None:
    if args.start is None and args.end is None:
        return None
    if args.start is None or args.end is None:
        raise CliError("--start and --end must be given together")
    return (_parse_day(args.start), _parse_day(args.end) + timedelta(days=1))


def _read_lines(path: Path) -> list[str]:
    return [ln.strip() for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]


def _load_lexicon(args, config) -> intent.PhraseLexicon:
    lex_path = _cfg(config, "intent", "lexicon", args.lexicon)
    if lex_path is None:
        return resources.demo_lexicon()
    return intent.PhraseLexicon.from_tsv(_need_file(lex_path, "lexicon file"))


def _load_stopwords(args, config) -> set[str]:
    if getattr(args, "keep_stopwords", False):
        return set()
    sw_path = _cfg(config, "intent", "stopwords", getattr(args, "stopwords", None))
    if sw_path is None:
        return resources.default_stopwords()
    return set(corpus.load_word_list(_need_file(sw_path, "stopword list")))


# ---------------------------------------------------------------- commands


def cmd_ingest(args, config) -> int:
    src = _need_file(_cfg(config, "paths", "comments", args.comments), "comments file")
    comments = corpus.read_comments_jsonl(src, window=_window_args(args))
    if args.out:
        corpus.write_comments_jsonl(comments, args.out)
    print(corpus.summarize_corpus(comments).format())
    if args.out:
        print(f"wrote {len(comments)} comments -> {args.out}")
    return 0


def cmd_build_queries(args, config) -> int:
    related = _read_lines(_need_file(args.related, "related-queries file"))
    news = _read_lines(_need_file(args.news, "news-channels file"))
    seed = _read_lines(_need_file(args.seed_file, "seed file")) if args.seed_file else []
    qs = corpus.build_query_set(seed, related, news)
    if args.out:
        Path(args.out).write_text("\n".join(qs.final) + "\n", encoding="utf-8")
    print(f"final queries: {len(qs.final)} ({len(related)} related x {len(news)} channels)")
    return 0


def cmd_filter_videos(args, config) -> int:
    comments = corpus.read_comments_jsonl(_need_file(args.comments, "comments file"))
    videos = corpus.read_video_records(_need_file(args.videos, "videos file"), comments)
    kept = corpus.filter_popular(videos, min_comments=args.min_comments)
    with open(args.out, "w", encoding="utf-8") as fh:
        for v in kept:
            fh.write(
                json.dumps(
                    {"video_id": v.video_id, "comment_count": v.comment_count, "relevant": v.relevant},
                    sort_keys=True,
                )
                + "\n"
            )
    print(f"videos kept: {len(kept)} / {len(videos)}")
    if args.comments_out:
        keep_ids = {v.video_id for v in kept}
        subset = [c for c in comments if c.video_id in keep_ids]
        corpus.write_comments_jsonl(subset, args.comments_out)
        print(f"comments kept: {len(subset)} / {len(comments)} -> {args.comments_out}")
    return 0


def _embedding_config(args, config) -> embedding.EmbeddingConfig:
    sec = "embedding"
    return embedding.EmbeddingConfig(
        dim=int(_cfg(config, sec, "dim", args.dim, 100)),
        window=int(_cfg(config, sec, "window", args.window, 5)),
        negatives=int(_cfg(config, sec, "negatives", args.negatives, 5)),
        epochs=int(_cfg(config, sec, "epochs", args.epochs, 5)),
        learning_rate=float(_cfg(config, sec, "learning_rate", args.lr, 0.05)),
        min_count=int(_cfg(config, sec, "min_count", args.min_count, 5)),
        subword_min=int(_cfg(config, sec, "subword_min", args.subword_min, 3)),
        subword_max=int(_cfg(config, sec, "subword_max", args.subword_max, 6)),
        bucket_count=int(_cfg(config, sec, "bucket_count", args.buckets, 2_000_000)),
        seed=int(_cfg(config, sec, "seed", args.seed, 1)),
        workers=int(_cfg(config, sec, "workers", args.workers, 1)),
        holdout_fraction=float(_cfg(config, sec, "holdout_fraction", args.holdout, 0.0)),
    )


def cmd_train_embed(args, config) -> int:
    src = _need_file(_cfg(config, "paths", "comments", args.corpus), "corpus file")
    cfg = _embedding_config(args, config)
    comments = corpus.read_comments_jsonl(src)
    docs = [corpus.tokenize(c.text) for c in comments]
    model = embedding.train_embeddings(docs, cfg)
    embedding.save_model(model, args.out)
    print(f"vocab: {len(model.vocab)}  dim: {cfg.dim}  seed: {cfg.seed}")
    print("epoch mean loss: " + " ".join(f"{x:.4f}" for x in model.epoch_losses))
    if model.holdout_losses:
        print(f"holdout loss: {model.holdout_losses[0]:.4f} -> {model.holdout_losses[1]:.4f}")
    if args.text_out:
        embedding.export_text(model, args.text_out)
    print(f"model -> {args.out}")
    return 0


def _doc_embeddings(model, comments):
    return [embedding.doc_embedding(model, corpus.tokenize(c.text), c.id) for c in comments]


def cmd_langid_fit(args, config) -> int:
    comments = corpus.read_comments_jsonl(_need_file(args.corpus, "corpus file"))
    model = embedding.load_model(_need_file(args.model, "embedding model"))
    docs = _doc_embeddings(model, comments)
    points = [d for d in docs if not d.empty]
    seed = int(_cfg(config, "langid", "seed", args.seed, 0))
    if args.k is not None:
        k = args.k
    else:
        k_min = int(_cfg(config, "langid", "k_min", args.k_min, 2))
        k_max = int(_cfg(config, "langid", "k_max", args.k_max, 12))
        k = langid.select_k(points, range(k_min, k_max + 1), seed=seed)
        print(f"selected k = {k} by mean silhouette")
    cluster = langid.kmeans(points, k, seed=seed)
    kept_comments = [c for c, d in zip(comments, docs) if not d.empty]
    cluster.audit_samples = langid.draw_audit_samples(
        cluster, [d for d in docs if not d.empty], kept_comments, args.sample_size, seed
    )
    langid.save_cluster_model(cluster, args.out)
    print(f"k: {cluster.k}  inertia: {cluster.inertia:.6f}  -> {args.out}")
    if args.tasks_out:
        annotators = args.annotators.split(",") if args.annotators else []
        tasks = [
            annotation.AnnotationTask(
                task_id=f"cluster-{j}",
                kind="cluster_label",
                payload={"cluster": j, "comments": sample},
                batch=args.batch or "cluster-labeling",
                assigned_annotators=annotators,
            )
            for j, sample in enumerate(cluster.audit_samples)
        ]
        annotation.write_tasks_jsonl(tasks, args.tasks_out)
        print(f"cluster label tasks -> {args.tasks_out}")
    return 0


def cmd_langid_label(args, config) -> int:
    cluster = langid.load_cluster_model(_need_file(args.clusters, "cluster model"))
    labels = langid.load_label_file(_need_file(args.labels, "label file"))
    missing = [j for j in range(cluster.k) if j not in labels]
    if missing:
        raise CliError(f"unlabeled cluster: {missing}")
    cluster.labels = [labels[j] for j in range(cluster.k)]
    langid.save_cluster_model(cluster, args.out)
    print(f"labeled {cluster.k} clusters -> {args.out}")
    return 0


def cmd_langid_classify(args, config) -> int:
    comments = corpus.read_comments_jsonl(_need_file(args.corpus, "corpus file"))
    model = embedding.load_model(_need_file(args.model, "embedding model"))
    cluster = langid.load_cluster_model(_need_file(args.clusters, "cluster model"))
    if not cluster.labeled:
        raise CliError("cluster model is unlabeled; run langid-label first")
    with open(args.out, "w", encoding="utf-8") as fh:
        for c in comments:
            doc = embedding.doc_embedding(model, corpus.tokenize(c.text), c.id)
            tag = langid.classify(cluster, doc)
            fh.write(
                json.dumps(
                    {
                        "comment_id": c.id,
                        "language": tag.language,
                        "script_variant": tag.script_variant,
                        "label": tag.render(),
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )
    print(f"classified {len(comments)} comments -> {args.out}")
    return 0


def _read_label_tsv(path: Path) -> dict[str, str]:
    out: dict[str, str] = {}
    for line in _read_lines(path):
        if line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) < 2:
            raise CliError(f"{path}: expected 'id\\tlabel' lines")
        out[parts[0]] = parts[1]
    return out


def cmd_langid_eval(args, config) -> int:
    gold = _read_label_tsv(_need_file(args.gold, "gold label file"))
    if args.adapter:
        if not args.languages:
            raise CliError("--languages required with --adapter (the corpus language set)")
        allowed = {l.strip() for l in args.languages.split(",") if l.strip()}
        preds = {}
        for comment_id, ranked in langid.read_ranked_predictions(_need_file(args.adapter, "adapter file")):
            preds[comment_id] = langid.fair_restrict(ranked, allowed)
    else:
        pred_path = _need_file(args.pred, "predictions file")
        preds = {}
        with open(pred_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                preds[str(obj["comment_id"])] = obj.get("label") or obj["language"]
    ids = [i for i in gold if i in preds]
    if len(ids) < len(gold):
        print(f"warning: {len(gold) - len(ids)} gold ids missing from predictions", file=sys.stderr)
    if not ids:
        raise CliError("no overlapping ids between gold and predictions")
    report = langid.evaluate([preds[i] for i in ids], [gold[i] for i in ids])
    print(report.format())
    if args.out:
        payload = {
            "accuracy": report.accuracy,
            "per_language": {
                lang: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support_share": m.support_share,
                }
                for lang, m in report.per_language.items()
            },
        }
        Path(args.out).write_text(
            json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=1) + "\n", encoding="utf-8"
        )
    return 0


def cmd_intent_score(args, config) -> int:
    comments = corpus.read_comments_jsonl(_need_file(args.corpus, "corpus file"))
    lexicon = _load_lexicon(args, config)
    with open(args.out, "w", encoding="utf-8") as fh:
        for c in comments:
            s = intent.score_comment(corpus.tokenize(c.text), lexicon, c.id)
            fh.write(
                json.dumps(
                    {
                        "comment_id": s.comment_id,
                        "peace_hits": s.peace_hits,
                        "war_hits": s.war_hits,
                        "score": s.score,
                        "class": s.intent_class,
                        "matched_spans": [
                            {"start": a, "end": b, "phrase": ph, "polarity": pol}
                            for a, b, ph, pol in s.matched_spans
                        ],
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )
    print(f"scored {len(comments)} comments -> {args.out}")
    return 0


def _scores_for(comments, args, config) -> list[intent.IntentScore]:
    lexicon = _load_lexicon(args, config)
    return [intent.score_comment(corpus.tokenize(c.text), lexicon, c.id) for c in comments]


def cmd_intent_trends(args, config) -> int:
    comments = corpus.read_comments_jsonl(_need_file(args.corpus, "corpus file"))
    scores = _scores_for(comments, args, config)
    trends = intent.daily_trends(comments, scores)
    intent.write_trends_csv(trends, args.out)
    cov_c, cov_l = intent.corpus_coverage(comments, scores)
    print(f"days: {len(trends)}  coverage: {cov_c * 100:.2f}% of comments, {cov_l * 100:.2f}% of likes")
    print(f"trends -> {args.out}")
    return 0


def cmd_intent_overlap(args, config) -> int:
    comments = corpus.read_comments_jsonl(_need_file(args.corpus, "corpus file"))
    scores = _scores_for(comments, args, config)
    peace, war, both, jac = intent.user_intent_overlap(scores, comments)
    print(f"peace users: {len(peace)}  war users: {len(war)}  both: {len(both)}  jaccard: {jac:.4f}")
    if args.out:
        payload = {
            "peace_users": len(peace),
            "war_users": len(war),
            "both": len(both),
            "jaccard": jac,
        }
        Path(args.out).write_text(json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8")
    return 0


def cmd_intent_shift(args, config) -> int:
    comments = corpus.read_comments_jsonl(_need_file(args.corpus, "corpus file"))
    a0 = _parse_day(args.a_start)
    b0 = _parse_day(args.b_start)
    a1 = a0 + timedelta(days=args.days)
    b1 = b0 + timedelta(days=args.days)
    win_a = [corpus.tokenize(c.text) for c in comments if a0 <= c.timestamp < a1]
    win_b = [corpus.tokenize(c.text) for c in comments if b0 <= c.timestamp < b1]
    stop = _load_stopwords(args, config)
    up_a, up_b = intent.token_shift(win_a, win_b, top_n=args.top_n, stopwords=stop)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("# window_a gainers\n")
        for tok, score in up_a:
            fh.write(f"a\t{tok}\t{score!r}\n")
        fh.write("# window_b gainers\n")
        for tok, score in up_b:
            fh.write(f"b\t{tok}\t{score!r}\n")
    print(f"window a: {args.a_start} +{args.days}d ({len(win_a)} comments)")
    print(f"window b: {args.b_start} +{args.days}d ({len(win_b)} comments)")
    print(f"token shift -> {args.out}")
    return 0


def cmd_hope_train(args, config) -> int:
    examples = classifier.read_labeled_jsonl(_need_file(args.data, "labeled data"))
    lexicon = _load_lexicon(args, config)
    model = embedding.load_model(_need_file(args.model, "embedding model"))
    lam = float(_cfg(config, "hope", "lambda", args.lam, 1.0))
    clf = classifier.train(
        examples,
        lexicon,
        model,
        lam=lam,
        min_df=args.min_df,
        embedding_model_ref=str(args.model),
    )
    classifier.save_classifier(clf, args.out)
    print(f"features: {len(clf.feature_vocab)} n-grams + intent + {clf.embedding_dim}-dim embedding")
    print(f"lambda: {lam}  threshold: {clf.threshold}  -> {args.out}")
    return 0


def cmd_hope_eval(args, config) -> int:
    examples = classifier.read_labeled_jsonl(_need_file(args.data, "labeled data"))
    lexicon = _load_lexicon(args, config)
    model = embedding.load_model(_need_file(args.model, "embedding model"))
    runs = int(_cfg(config, "hope", "runs", args.runs, 100))
    seed = int(_cfg(config, "hope", "seed", args.seed, 0))
    summary = classifier.evaluate_repeated(
        examples, lexicon, model, runs=runs, seed=seed,
        use_ngrams=not args.no_ngrams,
        use_intent=not args.no_intent,
        use_embedding=not args.no_embedding,
    )
    print(summary.format())
    if args.out:
        payload = {
            "precision": summary.precision,
            "recall": summary.recall,
            "f1": summary.f1,
            "auc": summary.auc,
            "runs": summary.runs,
        }
        Path(args.out).write_text(json.dumps(payload, sort_keys=True) + "\n", encoding="utf-8")
    return 0


def _pool_items(comments, clf, lexicon, model, corpus_start):
    start = min((c.timestamp for c in comments), default=None) if corpus_start is None else corpus_start
    items = []
    for c in comments:
        fv = classifier.featurize(corpus.tokenize(c.text), lexicon, model, clf.feature_vocab)
        items.append(
            classifier.PoolItem(c.id, classifier.week_bucket(c.timestamp, start), fv)
        )
    return items


def cmd_hope_sample(args, config) -> int:
    pool_comments = corpus.read_comments_jsonl(_need_file(args.pool, "pool corpus"))
    clf = classifier.load_classifier(_need_file(args.clf, "classifier file"))
    lexicon = _load_lexicon(args, config)
    model = embedding.load_model(_need_file(args.model, "embedding model"))
    labeled_ids: set[str] = set()
    if args.data:
        labeled_ids = {e.comment_id for e in classifier.read_labeled_jsonl(_need_file(args.data, "labeled data"))}
    start = _parse_day(args.corpus_start) if args.corpus_start else None
    items = _pool_items(pool_comments, clf, lexicon, model, start)
    batch = classifier.uncertainty_sample(clf, items, args.batch_size, labeled_ids)
    spot: list[classifier.PoolItem] = []
    if args.spot_fraction > 0:
        n_spot = max(1, int(round(args.batch_size * args.spot_fraction)))
        in_batch = {b.comment_id for b in batch}
        spot = classifier.certainty_spot_checks(clf, items, n_spot, labeled_ids | in_batch)
    by_id = {c.id: c for c in pool_comments}
    annotators = args.annotators.split(",") if args.annotators else []
    tasks = [
        annotation.AnnotationTask(
            task_id=item.comment_id,
            kind="hope_label",
            payload={
                "comment_id": item.comment_id,
                "text": by_id[item.comment_id].text,
                "week_bucket": item.week_bucket,
                "source": source,
            },
            batch=args.batch or "hope-round",
            assigned_annotators=annotators,
        )
        for source, group in (("uncertainty", batch), ("spot_check", spot))
        for item in group
    ]
    annotation.write_tasks_jsonl(tasks, args.out)
    print(f"sampled {len(batch)} uncertain + {len(spot)} spot-check comments -> {args.out}")
    return 0


def cmd_hope_wild(args, config) -> int:
    comments = corpus.read_comments_jsonl(_need_file(args.corpus, "corpus file"))
    clf = classifier.load_classifier(_need_file(args.clf, "classifier file"))
    lexicon = _load_lexicon(args, config)
    model = embedding.load_model(_need_file(args.model, "embedding model"))

    def featurizer(tokens):
        return classifier.featurize(tokens, lexicon, model, clf.feature_vocab)

    result = classifier.wild_run(clf, comments, featurizer, per_day_quota=args.quota, seed=args.seed)
    n_sampled = sum(len(v) for v in result.sampled_ids.values())
    with open(args.out, "w", encoding="utf-8") as fh:
        for p in result.positives:
            fh.write(
                json.dumps(
                    {"comment_id": p.comment_id, "probability": p.probability, "day": p.day},
                    sort_keys=True,
                )
                + "\n"
            )
    print(f"sampled {n_sampled} comments over {len(result.sampled_ids)} days")
    print(f"predicted positives: {len(result.positives)} -> {args.out}")
    if args.tasks_out:
        by_id = {c.id: c for c in comments}
        annotators = args.annotators.split(",") if args.annotators else []
        tasks = [
            annotation.AnnotationTask(
                task_id=p.comment_id,
                kind="wild_verify",
                payload={
                    "comment_id": p.comment_id,
                    "text": by_id[p.comment_id].text,
                    "probability": p.probability,
                    "day": p.day,
                },
                batch=args.batch or "wild-verify",
                assigned_annotators=annotators,
            )
            for p in result.positives
        ]
        annotation.write_tasks_jsonl(tasks, args.tasks_out)
        print(f"verification tasks -> {args.tasks_out}")
    return 0


def cmd_kappa(args, config) -> int:
    a = _read_label_tsv(_need_file(args.a, "label file A"))
    b = _read_label_tsv(_need_file(args.b, "label file B"))
    if set(a) != set(b):
        raise CliError(
            f"label files disagree on ids: {len(set(a) ^ set(b))} ids appear in only one file"
        )
    ids = sorted(a)
    kappa = classifier.cohen_kappa([a[i] for i in ids], [b[i] for i in ids])
    p_o = sum(a[i] == b[i] for i in ids) / len(ids)
    print(f"items: {len(ids)}  p_o: {p_o:.4f}  kappa: {kappa:.4f}")
    return 0


def cmd_serve_annotation(args, config) -> int:
    store_dir = _cfg(config, "service", "store", args.store)
    if store_dir is None:
        raise CliError("missing annotation store directory")
    host = _cfg(config, "service", "host", args.host, "127.0.0.1")
    port = int(_cfg(config, "service", "port", args.port, 8787))
    cluster_model = _cfg(config, "service", "cluster_model", args.clusters)
    static_dir = _cfg(config, "service", "static", args.static)
    try:
        store = annotation.AnnotationStore(store_dir)
    except FileNotFoundError as exc:
        raise CliError(str(exc)) from exc
    try:
        annotation.serve(store, host, port, cluster_model, static_dir)
    except OSError as exc:
        raise CliError(f"cannot bind {host}:{port}: {exc}") from exc
    return 0


# ------------------------------------------------------------------ parser


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file supplying flag defaults")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hopespeech", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate, window-filter and summarize a comment dump")
    p.add_argument("--comments")
    p.add_argument("--out")
    p.add_argument("--start", help="YYYY-MM-DD (UTC, inclusive)")
    p.add_argument("--end", help="YYYY-MM-DD (UTC, inclusive)")
    _add_common(p)
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("build-queries", help="expand related queries with news-channel concatenations")
    p.add_argument("--related", required=True)
    p.add_argument("--news", required=True)
    p.add_argument("--seed-file")
    p.add_argument("--out")
    _add_common(p)
    p.set_defaults(fn=cmd_build_queries)

    p = sub.add_parser("filter-videos", help="drop irrelevant and unpopular videos")
    p.add_argument("--videos", required=True)
    p.add_argument("--comments", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--comments-out")
    p.add_argument("--min-comments", type=int, default=11)
    _add_common(p)
    p.set_defaults(fn=cmd_filter_videos)

    p = sub.add_parser("train-embed", help="train polyglot subword skip-gram embeddings")
    p.add_argument("--corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--text-out")
    p.add_argument("--dim", type=int)
    p.add_argument("--window", type=int)
    p.add_argument("--negatives", type=int)
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--min-count", type=int)
    p.add_argument("--subword-min", type=int)
    p.add_argument("--subword-max", type=int)
    p.add_argument("--buckets", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--holdout", type=float)
    _add_common(p)
    p.set_defaults(fn=cmd_train_embed)

    p = sub.add_parser("langid-fit", help="cluster document embeddings (k by silhouette unless --k)")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--k-min", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--sample-size", type=int, default=10, help="audit sample size per cluster")
    p.add_argument("--tasks-out", help="also emit cluster_label annotation tasks")
    p.add_argument("--annotators", help="comma-separated annotator ids for tasks")
    p.add_argument("--batch", help="task batch name")
    _add_common(p)
    p.set_defaults(fn=cmd_langid_fit)

    p = sub.add_parser("langid-label", help="attach language labels to clusters from a TSV")
    p.add_argument("--clusters", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_langid_label)

    p = sub.add_parser("langid-classify", help="nearest-centroid language per comment")
    p.add_argument("--corpus", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--clusters", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_langid_classify)

    p = sub.add_parser("langid-eval", help="score predictions against gold labels")
    p.add_argument("--pred", help="predictions JSONL from langid-classify")
    p.add_argument("--gold", required=True, help="TSV comment_id<TAB>label")
    p.add_argument("--adapter", help="external ranked-prediction JSONL (fairness-restricted)")
    p.add_argument("--languages", help="comma-separated corpus languages for --adapter")
    p.add_argument("--out")
    _add_common(p)
    p.set_defaults(fn=cmd_langid_eval)

    p = sub.add_parser("intent-score", help="score comments against the phrase lexicon")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_intent_score)

    p = sub.add_parser("intent-trends", help="daily war/peace shares over comments and likes")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_intent_trends)

    p = sub.add_parser("intent-shift", help="token usage shift between two date windows")
    p.add_argument("--corpus", required=True)
    p.add_argument("--a-start", required=True, help="YYYY-MM-DD window A start (00:00 UTC)")
    p.add_argument("--b-start", required=True, help="YYYY-MM-DD window B start (00:00 UTC)")
    p.add_argument("--days", type=int, default=3)
    p.add_argument("--top-n", type=int, default=20)
    p.add_argument("--keep-stopwords", action="store_true")
    p.add_argument("--stopwords", help="custom stopword list")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_intent_shift)

    p = sub.add_parser("intent-overlap", help="peace/war user sets and their Jaccard index")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--out")
    _add_common(p)
    p.set_defaults(fn=cmd_intent_overlap)

    p = sub.add_parser("hope-train", help="fit the hope-speech classifier")
    p.add_argument("--data", required=True, help="labeled JSONL")
    p.add_argument("--lexicon")
    p.add_argument("--model", required=True, help="embedding model")
    p.add_argument("--out", required=True)
    p.add_argument("--lam", type=float)
    p.add_argument("--min-df", type=int, default=2)
    _add_common(p)
    p.set_defaults(fn=cmd_hope_train)

    p = sub.add_parser("hope-eval", help="repeated 80/10/10 split evaluation")
    p.add_argument("--data", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--model", required=True)
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--no-ngrams", action="store_true")
    p.add_argument("--no-intent", action="store_true")
    p.add_argument("--no-embedding", action="store_true")
    p.add_argument("--out")
    _add_common(p)
    p.set_defaults(fn=cmd_hope_eval)

    p = sub.add_parser("hope-sample", help="uncertainty-sample the next annotation batch")
    p.add_argument("--pool", required=True, help="unlabeled pool corpus JSONL")
    p.add_argument("--clf", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--model", required=True)
    p.add_argument("--data", help="already-labeled JSONL (ids excluded)")
    p.add_argument("--batch-size", type=int, required=True)
    p.add_argument("--spot-fraction", type=float, default=0.05)
    p.add_argument("--corpus-start", help="YYYY-MM-DD anchor for week buckets")
    p.add_argument("--out", required=True, help="annotation tasks JSONL")
    p.add_argument("--annotators")
    p.add_argument("--batch")
    _add_common(p)
    p.set_defaults(fn=cmd_hope_sample)

    p = sub.add_parser("hope-wild", help="score a per-day random sample in the wild")
    p.add_argument("--corpus", required=True)
    p.add_argument("--clf", required=True)
    p.add_argument("--lexicon")
    p.add_argument("--model", required=True)
    p.add_argument("--quota", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--tasks-out")
    p.add_argument("--annotators")
    p.add_argument("--batch")
    _add_common(p)
    p.set_defaults(fn=cmd_hope_wild)

    p = sub.add_parser("kappa", help="Cohen's kappa between two label files")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_kappa)

    p = sub.add_parser("serve-annotation", help="run the annotation HTTP service")
    p.add_argument("--store", help="directory containing tasks.jsonl")
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--clusters", help="cluster model JSON for /api/clusters")
    p.add_argument("--static", help="directory of UI static files to serve at /")
    _add_common(p)
    p.set_defaults(fn=cmd_serve_annotation)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(getattr(args, "config", None))
        return args.fn(args, config)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: missing input: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
