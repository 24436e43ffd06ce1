"""Command-line interface: the full experiment lifecycle plus the service.

Subcommands: split, train, evaluate, predict, agree, analyze, serve, and
fixture-cascade (writes a tiny hand-built cascade for demos and UI work).

Failures exit non-zero with a single machine-parsable JSON line on stderr:
exit 2 usage, 3 data, 4 model, 5 internal. Reports that depend on a seed
include it, and ``--timestamp`` (or PREDELETE_TIMESTAMP) pins the bundle
metadata so training output is reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import datetime
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import analysis as analysis_mod
from .bundle import ModelBundle, TrainingMetadata, load_bundle, save_bundle
from .corpus import (
    CategoryLabel,
    CorpusFormat,
    DeletionLabel,
    SplitSpec,
    StratifyAxis,
    corpus_fingerprint,
    infer_format,
    load_corpus,
    save_corpus,
    stratified_split,
)
from .errors import DataError, ModelError, PredeleteError, UsageError
from .evaluation import (
    agreement_report,
    agreement_to_dict,
    evaluate,
    load_agreement_table,
    render_agreement_report,
    render_eval_report,
    report_to_dict,
)
from .experiments import (
    Setting,
    label_map_for,
    reason_majority_note,
    records_for_setting,
)
from .features import (
    DEFAULT_MAX_FEATURES,
    DEFAULT_MIN_DF,
    fit_vocabulary,
    vectorize_text,
)
from .fixtures import save_fixture_cascade
from .models import (
    ForestHyperparams,
    SvmHyperparams,
    load_external_scores,
    predict,
    train_forest,
    train_majority,
    train_svm,
)
from .service import BIND_ENV, MANIFEST_ENV, ServiceConfig, create_app, parse_bind
from .textprep import DEFAULT_CONFIG

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_MODEL = 4
EXIT_INTERNAL = 5

TIMESTAMP_ENV = "PREDELETE_TIMESTAMP"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2) with free-form text
        raise UsageError(message)


def _emit(payload: dict) -> None:
    sys.stdout.write(json.dumps(payload, ensure_ascii=False) + "\n")


def _timestamp(value: str | None) -> str:
    if value:
        return value
    env = os.environ.get(TIMESTAMP_ENV)
    if env:
        return env
    return datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _parse_fractions(text: str) -> tuple[Fraction, Fraction, Fraction]:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"--fractions needs three comma-separated values, got {text!r}")
    try:
        return tuple(Fraction(p.strip()) for p in parts)  # type: ignore[return-value]
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad fraction in {text!r}: {exc}") from None


def _cmd_split(args) -> int:
    corpus = load_corpus(args.input)
    spec = SplitSpec(
        fractions=_parse_fractions(args.fractions),
        seed=args.seed,
        stratify_on=StratifyAxis(args.stratify),
    )
    result = stratified_split(corpus, spec)
    fmt = CorpusFormat(args.format) if args.format else infer_format(args.input)
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {}
    counts = {}
    for name, part in result.parts():
        path = out_dir / f"{name}.{fmt.value}"
        save_corpus(part, path, fmt)
        files[name] = str(path)
        counts[name] = len(part)
    _emit({"split": counts, "seed": args.seed, "stratify": args.stratify, "files": files})
    return 0


def _svm_hyperparams(args, seed: int) -> SvmHyperparams:
    return SvmHyperparams(
        lambda_reg=args.lambda_reg,
        epochs=args.epochs,
        seed=seed,
        balance_classes=args.balance,
    )


def _forest_hyperparams(args, seed: int) -> ForestHyperparams:
    split_features: int | str | None = args.split_features
    if split_features not in (None, "sqrt"):
        split_features = int(split_features)
    return ForestHyperparams(
        n_trees=args.trees,
        max_depth=args.max_depth,
        max_features=split_features,
        seed=seed,
        bootstrap=not args.no_bootstrap,
    )


def _train_one(args, records, class_idx, label_map, vocab, seed):
    if args.model == "majority":
        return train_majority(class_idx, label_map)
    pairs = [
        (vectorize_text(r.text, vocab, DEFAULT_CONFIG), c) for r, c in zip(records, class_idx)
    ]
    if args.model == "svm":
        return train_svm(pairs, label_map, _svm_hyperparams(args, seed), n_features=len(vocab))
    return train_forest(pairs, label_map, _forest_hyperparams(args, seed), n_features=len(vocab))


def _dev_weighted_f1(model, dev_records, dev_gold, label_map, vocab) -> float:
    preds = [predict(model, vectorize_text(r.text, vocab, DEFAULT_CONFIG)) for r in dev_records]
    return evaluate(dev_gold, preds, label_map).weighted_f1


def _cmd_train(args) -> int:
    setting = Setting(args.setting)
    label_map = label_map_for(setting)
    corpus = load_corpus(args.input)
    records, gold = records_for_setting(corpus, setting, include_weak=args.include_weak)
    class_idx = [label_map.index_of(g) for g in gold]
    vocab = fit_vocabulary(
        [r.text for r in records],
        DEFAULT_CONFIG,
        min_df=args.min_df,
        max_features=args.max_features,
    )
    reruns = args.reruns
    if reruns > 1 and not args.dev:
        raise UsageError("--reruns needs --dev to select the best model")
    dev_records = dev_gold = None
    if args.dev:
        dev_corpus = load_corpus(args.dev)
        dev_records, dev_gold = records_for_setting(
            dev_corpus, setting, include_weak=args.include_weak
        )
    candidates = []
    for offset in range(max(1, reruns)):
        seed = args.seed + offset
        model = _train_one(args, records, class_idx, label_map, vocab, seed)
        score = None
        if dev_records is not None:
            score = _dev_weighted_f1(model, dev_records, dev_gold, label_map, vocab)
        candidates.append((seed, model, score))
    if reruns > 1:
        best = max(candidates, key=lambda c: (c[2], -c[0]))
    else:
        best = candidates[0]
    seed, model, dev_score = best
    metadata = TrainingMetadata(
        corpus_fingerprint=corpus_fingerprint(corpus),
        seed=seed,
        timestamp=_timestamp(args.timestamp),
    )
    bundle = ModelBundle(
        config=DEFAULT_CONFIG, vocabulary=vocab, model=model, labels=label_map, metadata=metadata
    )
    fingerprint = save_bundle(bundle, args.output)
    if reruns > 1:
        log_path = args.rerun_log or f"{args.output}.reruns.tsv"
        with open(log_path, "w", encoding="utf-8", newline="") as handle:
            handle.write("seed\tdev_weighted_f1\tselected\n")
            for cand_seed, _, cand_score in candidates:
                flag = "yes" if cand_seed == seed else "no"
                handle.write(f"{cand_seed}\t{cand_score!r}\t{flag}\n")
    summary = {
        "model": args.model,
        "setting": setting.value,
        "seed": seed,
        "n_train": len(records),
        "vocabulary_size": len(vocab),
        "fingerprint": fingerprint,
        "output": str(args.output),
    }
    if dev_score is not None:
        summary["dev_weighted_f1"] = dev_score
    _emit(summary)
    return 0


def _cmd_evaluate(args) -> int:
    setting = Setting(args.setting)
    label_map = label_map_for(setting)
    corpus = load_corpus(args.input)
    records, gold = records_for_setting(corpus, setting, include_weak=args.include_weak)
    note = None
    if args.scores:
        preds = load_external_scores(args.scores, label_map, [r.id for r in records])
    else:
        if not args.bundle:
            raise UsageError("evaluate needs --bundle or --scores")
        bundle = load_bundle(args.bundle)
        if bundle.labels != label_map:
            raise ModelError(
                f"bundle classes {bundle.labels.names} do not match the "
                f"{setting.value} setting {label_map.names}"
            )
        preds = [
            predict(bundle.model, vectorize_text(r.text, bundle.vocabulary, bundle.config))
            for r in records
        ]
    report = evaluate(gold, preds, label_map)
    if not args.scores and setting is Setting.REASON and bundle.model.kind == "majority":
        note = reason_majority_note(report.accuracy)
    if args.json:
        Path(args.json).write_text(
            json.dumps(report_to_dict(report, note), ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )
    if args.format == "json":
        _emit(report_to_dict(report, note))
    else:
        sys.stdout.write(render_eval_report(report, note))
    return 0


def _cmd_predict(args) -> int:
    corpus = load_corpus(args.input)
    bundle = load_bundle(args.bundle)
    header = "id\tlabel\t" + "\t".join(f"score_{n}" for n in bundle.labels.names)
    lines = [header]
    for record in corpus:
        pred = predict(bundle.model, vectorize_text(record.text, bundle.vocabulary, bundle.config))
        scores = "\t".join(repr(s) for s in pred.scores)
        lines.append(f"{record.id}\t{pred.label}\t{scores}")
    text = "\n".join(lines) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_agree(args) -> int:
    table, categories = load_agreement_table(args.input)
    report = agreement_report(table)
    if args.format == "json":
        payload = agreement_to_dict(report)
        payload["categories"] = list(categories)
        _emit(payload)
    else:
        sys.stdout.write(render_agreement_report(report))
    return 0


def _cmd_analyze(args) -> int:
    corpus = load_corpus(args.input)
    if args.report == "attributes":
        slices = [
            ("non_deleted", corpus.filter(lambda r: r.deletion_label is DeletionLabel.NOT_DELETED)),
            ("deleted", corpus.filter(lambda r: r.deletion_label is DeletionLabel.DELETED)),
            ("disinformative", corpus.filter(lambda r: r.is_disinformative)),
        ]
        report = analysis_mod.attribute_distribution(slices)
        rendered = analysis_mod.render_attribute_report(report)
        payload = analysis_mod.attribute_report_to_dict(report)
    elif args.report == "status":
        report = analysis_mod.user_status_breakdown(corpus)
        rendered = analysis_mod.render_status_report(report)
        payload = analysis_mod.status_report_to_dict(report)
    else:
        category = CategoryLabel(args.category) if args.category else None
        rows = analysis_mod.target_frequencies(corpus, category)
        rendered = analysis_mod.render_target_frequencies(rows)
        payload = {"targets": [{"target": t, "count": c} for t, c in rows]}
    if args.format == "json":
        _emit(payload)
    else:
        sys.stdout.write(rendered)
    return 0


def _cmd_serve(args) -> int:
    manifest = args.manifest or os.environ.get(MANIFEST_ENV)
    if not manifest:
        raise UsageError(f"serve needs --manifest or {MANIFEST_ENV}")
    bind = args.bind or os.environ.get(BIND_ENV) or "127.0.0.1:8000"
    host, port = parse_bind(bind)
    config = ServiceConfig(
        host=host,
        port=port,
        manifest_path=manifest,
        max_body_bytes=args.body_limit,
        log_path=args.log,
        cors_origins=tuple(args.cors.split(",")) if args.cors else ("*",),
    )
    app = create_app(config)
    import uvicorn

    uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    return 0


def _cmd_fixture_cascade(args) -> int:
    manifest = save_fixture_cascade(args.output_dir)
    _emit({"manifest": str(manifest)})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="predelete", description=__doc__)
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("split", help="write stratified train/dev/test corpus files")
    p.add_argument("--input", required=True)
    p.add_argument("--output-dir", required=True)
    p.add_argument("--fractions", default="0.7,0.1,0.2")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stratify", choices=["deletion", "category"], default="deletion")
    p.add_argument("--format", choices=["jsonl", "tsv"], default=None)
    p.set_defaults(handler=_cmd_split)

    p = sub.add_parser("train", help="train a model and write a bundle")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--model", choices=["majority", "svm", "forest"], required=True)
    p.add_argument("--setting", choices=["deletion", "disinfo", "reason"], required=True)
    p.add_argument("--dev", default=None, help="dev corpus for rerun selection")
    p.add_argument("--reruns", type=int, default=1, help="train N seeds, keep best dev wF1")
    p.add_argument("--rerun-log", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--include-weak", action="store_true")
    p.add_argument("--min-df", type=int, default=DEFAULT_MIN_DF)
    p.add_argument("--max-features", type=int, default=DEFAULT_MAX_FEATURES)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--lambda", dest="lambda_reg", type=float, default=1e-4)
    p.add_argument("--balance", action="store_true", help="inverse-frequency class weights")
    p.add_argument("--trees", type=int, default=100)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--split-features", default="sqrt", help="candidates per split: int or sqrt")
    p.add_argument("--no-bootstrap", action="store_true")
    p.add_argument("--timestamp", default=None, help="pin bundle metadata timestamp")
    p.set_defaults(handler=_cmd_train)

    p = sub.add_parser("evaluate", help="score a bundle or external predictions on a corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--setting", choices=["deletion", "disinfo", "reason"], required=True)
    p.add_argument("--bundle", default=None)
    p.add_argument("--scores", default=None, help="external per-document score TSV")
    p.add_argument("--include-weak", action="store_true")
    p.add_argument("--json", default=None, help="also write the report as JSON here")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(handler=_cmd_evaluate)

    p = sub.add_parser("predict", help="stream predictions for a corpus as TSV")
    p.add_argument("--input", required=True)
    p.add_argument("--bundle", required=True)
    p.add_argument("--output", default=None)
    p.set_defaults(handler=_cmd_predict)

    p = sub.add_parser("agree", help="kappa / observed agreement from an annotation TSV")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(handler=_cmd_agree)

    p = sub.add_parser("analyze", help="attribute, user-status, or target reports")
    p.add_argument("--input", required=True)
    p.add_argument("--report", choices=["attributes", "status", "targets"], default="attributes")
    p.add_argument(
        "--category",
        choices=[c.value for c in CategoryLabel if c.value not in ("not_disinfo", "unlabeled")],
        default=None,
    )
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(handler=_cmd_analyze)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--manifest", default=None)
    p.add_argument("--bind", default=None, help="host:port")
    p.add_argument("--body-limit", type=int, default=16384)
    p.add_argument("--log", default=None, help="salted-hash request log path")
    p.add_argument("--cors", default=None, help="comma-separated allowed origins")
    p.set_defaults(handler=_cmd_serve)

    p = sub.add_parser("fixture-cascade", help="write the hand-built demo cascade")
    p.add_argument("--output-dir", required=True)
    p.set_defaults(handler=_cmd_fixture_cascade)

    return parser


def _fail(code: str, message: str, exit_code: int) -> int:
    sys.stderr.write(json.dumps({"error": {"code": code, "message": message}}) + "\n")
    return exit_code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not hasattr(args, "handler"):
            raise UsageError("a subcommand is required (see --help)")
        return args.handler(args)
    except UsageError as exc:
        return _fail("USAGE", str(exc), EXIT_USAGE)
    except (DataError, OSError) as exc:
        return _fail("DATA", str(exc), EXIT_DATA)
    except ModelError as exc:
        return _fail("MODEL", str(exc), EXIT_MODEL)
    except PredeleteError as exc:
        return _fail("INTERNAL", str(exc), EXIT_INTERNAL)
    except Exception as exc:  # noqa: BLE001 - last-resort machine-parsable error
        return _fail("INTERNAL", f"{type(exc).__name__}: {exc}", EXIT_INTERNAL)


if __name__ == "__main__":
    sys.exit(main())
