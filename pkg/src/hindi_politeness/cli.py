"""Command-line entry point: ``hindi-politeness <command> ...``.

Exit status: 0 on success, 1 on usage errors, 2 on data errors. All
randomness comes from ``--seed`` (default 0); no environment variables
are read.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .corpus import SplitSpec, compute_agreement, load_annotations, load_corpus, write_corpus, write_split
from .errors import PolitenessError
from .evaluation import DEFAULT_LAMBDA_GRID, evaluate, format_metrics, run_ablation, tune
from .features import PRESETS, Vocabulary, build_vocabulary, preset, vectorize_corpus, write_sparse
from .structures import load_lexicon, profile_text
from .svm import TrainConfig, load_model, predict, save_model, train

DEFAULT_SEED = 0

log = logging.getLogger("hindi_politeness")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, sort_keys=False)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text if text.endswith("\n") or not text else text + "\n")
    elif text:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _feature_config(args):
    overrides = {}
    if args.min_df is not None:
        overrides["min_term_frequency"] = args.min_df
    if args.no_l2:
        overrides["l2_normalize"] = False
    return preset(args.preset, **overrides)


def _train_config(args) -> TrainConfig:
    return TrainConfig(lam=args.lam, epochs=args.epochs, seed=args.seed,
                       shuffle_each_epoch=not args.no_shuffle, step_offset=args.step_offset,
                       average=not args.last_iterate)


def _default_vocab_path(model_path) -> Path:
    return Path(f"{model_path}.vocab.json")


# ---------------------------------------------------------------------------
# commands

def cmd_split(args) -> int:
    corpus = load_corpus(args.input)
    spec = SplitSpec(args.train_fraction, args.test_fraction, args.validation_fraction, args.seed)
    prefix = args.out_prefix or str(Path(args.input).with_suffix(""))
    manifest = write_split(corpus, spec, prefix)
    if args.format == "json":
        _emit(json.dumps(manifest, ensure_ascii=False, indent=2), None)
    else:
        c = manifest["counts"]
        _emit(f"seed={spec.seed} n={manifest['n']} train={c['train']} test={c['test']} "
              f"validation={c['validation']} -> {prefix}.{{train,test,valid}}.jsonl", None)
    return 0


def cmd_agreement(args) -> int:
    report = compute_agreement(load_annotations(args.a), load_annotations(args.b))
    if args.format == "json":
        _emit(json.dumps(report.to_dict(), ensure_ascii=False, indent=2), args.output)
        return 0
    kappa = "undefined" if report.cohen_kappa is None else f"{report.cohen_kappa:.4f}"
    lines = [f"items              {report.n_items}",
             f"percent agreement  {100 * report.percent_agreement:.2f}%",
             f"cohen kappa        {kappa}", "",
             "confusion (annotator A rows, annotator B columns)"]
    labels = report.to_dict()["labels"]
    lines.append(" " * 12 + "".join(f"{lab:>12}" for lab in labels))
    for lab, row in zip(labels, report.confusion):
        lines.append(f"{lab:<12}" + "".join(f"{c:>12}" for c in row))
    _emit("\n".join(lines), args.output)
    return 0


def cmd_detect(args) -> int:
    lexicon = load_lexicon(args.lexicon)
    corpus = load_corpus(args.input)
    lines = [_dump({"id": c.id, **profile_text(c.text, lexicon).to_dict()}) for c in corpus]
    _emit("\n".join(lines), args.output)
    return 0


def cmd_extract_features(args) -> int:
    lexicon = load_lexicon(args.lexicon)
    train_corpus = load_corpus(args.train)
    vocab = build_vocabulary(train_corpus, _feature_config(args), lexicon)
    out_dir = Path(args.out_dir or Path(args.train).parent)
    out_dir.mkdir(parents=True, exist_ok=True)
    vocab_path = out_dir / f"{Path(args.train).stem}.vocab.json"
    vocab.save(vocab_path)
    written = [str(vocab_path)]
    for path in [args.train, *(args.apply or [])]:
        corpus = train_corpus if path == args.train else load_corpus(path)
        target = out_dir / f"{Path(path).stem}.features.txt"
        write_sparse(target, corpus.comments, vectorize_corpus(corpus, vocab, lexicon), vocab)
        written.append(str(target))
    log.info("dimension=%d fingerprint=%s", vocab.dimension, vocab.fingerprint)
    _emit("\n".join(written), None)
    return 0


def cmd_train(args) -> int:
    lexicon = load_lexicon(args.lexicon)
    corpus = load_corpus(args.train)
    vocab = build_vocabulary(corpus, _feature_config(args), lexicon)
    config = _train_config(args)
    unlabeled = [c.id for c in corpus if c.label is None]
    if unlabeled:
        raise PolitenessError(f"{args.train}: {len(unlabeled)} unlabeled comments (first: {unlabeled[0]!r})")
    log.info("training on %d comments, dimension=%d, seed=%d, lambda=%g, epochs=%d",
             len(corpus), vocab.dimension, config.seed, config.lam, config.epochs)
    xs = vectorize_corpus(corpus, vocab, lexicon)
    model = train(list(zip(xs, (c.label for c in corpus))), config)
    save_model(model, args.output)
    vocab_path = Path(args.vocab_out) if args.vocab_out else _default_vocab_path(args.output)
    vocab.save(vocab_path)
    _emit(f"model={args.output} vocab={vocab_path} fingerprint={vocab.fingerprint} seed={config.seed}", None)
    return 0


def _load_model_and_vocab(args):
    model = load_model(args.model)
    vocab = Vocabulary.load(args.vocab or _default_vocab_path(args.model))
    if vocab.fingerprint != model.fingerprint:
        raise PolitenessError(f"vocabulary {vocab.fingerprint} does not belong to model {model.fingerprint}")
    return model, vocab


def cmd_predict(args) -> int:
    model, vocab = _load_model_and_vocab(args)
    lexicon = load_lexicon(args.lexicon)
    corpus = load_corpus(args.input)
    lines = []
    for c, x in zip(corpus, vectorize_corpus(corpus, vocab, lexicon)):
        lines.append(_dump({"id": c.id, **predict(model, x).to_dict()}))
    _emit("\n".join(lines), args.output)
    return 0


def cmd_evaluate(args) -> int:
    model, vocab = _load_model_and_vocab(args)
    lexicon = load_lexicon(args.lexicon)
    corpus = load_corpus(args.input)
    metrics = evaluate(model, list(zip(vectorize_corpus(corpus, vocab, lexicon), (c.label for c in corpus))))
    text = json.dumps(metrics.to_dict(), indent=2) if args.format == "json" else format_metrics(metrics)
    _emit(text, args.output)
    return 0


def cmd_ablate(args) -> int:
    lexicon = load_lexicon(args.lexicon)
    corpus = load_corpus(args.input)
    spec = SplitSpec(args.train_fraction, args.test_fraction, args.validation_fraction, args.seed)
    report = run_ablation(corpus, spec, _train_config(args), args.presets, lexicon)
    _emit(report.to_json() if args.format == "json" else report.to_text(), args.output)
    return 0


def cmd_tune(args) -> int:
    lexicon = load_lexicon(args.lexicon)
    corpus = load_corpus(args.input)
    spec = SplitSpec(args.train_fraction, args.test_fraction, args.validation_fraction, args.seed)
    result = tune(corpus, spec, _train_config(args), _feature_config(args), args.grid, lexicon)
    if args.format == "json":
        text = json.dumps({"seed": args.seed, **result.to_dict()}, indent=2)
    else:
        rows = [f"{'lambda':>10}  validation accuracy"]
        rows += [f"{lam:>10g}  {100 * acc:6.2f}%" for lam, acc in result.validation_accuracy.items()]
        rows.append(f"best lambda={result.best_lambda:g} (seed={args.seed})")
        text = "\n".join(rows)
    _emit(text, args.output)
    return 0


def cmd_synth(args) -> int:
    from .synthetic import generate_corpus

    write_corpus(generate_corpus(args.n, args.seed, name=Path(args.output).stem), args.output)
    _emit(f"wrote {args.n} comments to {args.output} (seed={args.seed})", None)
    return 0


# ---------------------------------------------------------------------------
# parser

def _add_seed(p):
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"random seed for splitting/training (default {DEFAULT_SEED})")


def _add_split_fractions(p):
    p.add_argument("--train-fraction", type=float, default=0.7, help="default 0.7")
    p.add_argument("--test-fraction", type=float, default=0.1, help="default 0.1")
    p.add_argument("--validation-fraction", type=float, default=0.2, help="default 0.2")


def _add_lexicon(p):
    p.add_argument("--lexicon", help="lexicon file whose entries extend the built-in lexicon")


def _add_features(p, default="UNI_BI_STRUCT"):
    p.add_argument("--preset", default=default, choices=sorted(PRESETS), type=str.upper,
                   help=f"feature configuration (default {default})")
    p.add_argument("--min-df", type=int, default=None, help="minimum document frequency (default 2)")
    p.add_argument("--no-l2", action="store_true", help="disable L2 normalization of feature vectors")


def _add_training(p):
    p.add_argument("--lambda", dest="lam", type=float, default=1e-4, help="regularization strength (default 1e-4)")
    p.add_argument("--epochs", type=int, default=20, help="passes over the training data (default 20)")
    p.add_argument("--no-shuffle", action="store_true", help="reuse the first epoch's order for every epoch")
    p.add_argument("--step-offset", type=float, default=None,
                   help="step-size clock offset t0 in 1/(lambda*(t+t0)); default 1/lambda")
    p.add_argument("--last-iterate", action="store_true",
                   help="keep the final SGD iterate instead of the average of all iterates")


def _add_format(p):
    p.add_argument("--format", choices=("text", "json"), default="text", help="output format (default text)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hindi-politeness", description="Hindi politeness classification toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-q", "--quiet", action="store_true", help="suppress progress logging on stderr")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("split", help="split a corpus into train/test/validation files")
    p.add_argument("input")
    p.add_argument("--out-prefix", help="output prefix (default: input path without extension)")
    _add_seed(p); _add_split_fractions(p); _add_format(p)
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("agreement", help="percent agreement and Cohen's kappa of two annotation files")
    p.add_argument("a"); p.add_argument("b")
    p.add_argument("-o", "--output")
    _add_format(p)
    p.set_defaults(func=cmd_agreement)

    p = sub.add_parser("detect", help="emit per-comment structure profiles as JSONL")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    _add_lexicon(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("extract-features", help="build a vocabulary and write sparse feature files")
    p.add_argument("train")
    p.add_argument("--apply", nargs="+", metavar="JSONL", help="further corpora to vectorize with the same vocabulary")
    p.add_argument("--out-dir", help="output directory (default: next to the training file)")
    _add_features(p); _add_lexicon(p)
    p.set_defaults(func=cmd_extract_features)

    p = sub.add_parser("train", help="train a model file from a labeled corpus")
    p.add_argument("train")
    p.add_argument("-o", "--output", required=True, help="model file to write")
    p.add_argument("--vocab-out", help="vocabulary file (default MODEL.vocab.json)")
    _add_features(p); _add_training(p); _add_seed(p); _add_lexicon(p)
    p.set_defaults(func=cmd_train)

    for name, func, helptext in (("predict", cmd_predict, "label comments with a trained model"),
                                 ("evaluate", cmd_evaluate, "score a trained model on a labeled corpus")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("model"); p.add_argument("input")
        p.add_argument("--vocab", help="vocabulary file (default MODEL.vocab.json)")
        p.add_argument("-o", "--output")
        _add_lexicon(p)
        if name == "evaluate":
            _add_format(p)
        p.set_defaults(func=func)

    p = sub.add_parser("ablate", help="compare feature presets on one shared split")
    p.add_argument("input")
    p.add_argument("--presets", nargs="+", type=str.upper, choices=sorted(PRESETS),
                   default=["UNI", "UNI_BI", "UNI_BI_STRUCT"])
    p.add_argument("-o", "--output")
    _add_seed(p); _add_split_fractions(p); _add_training(p); _add_lexicon(p); _add_format(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("tune", help="choose lambda by validation accuracy")
    p.add_argument("input")
    p.add_argument("--grid", nargs="+", type=float, default=list(DEFAULT_LAMBDA_GRID))
    p.add_argument("-o", "--output")
    _add_seed(p); _add_split_fractions(p); _add_features(p); _add_training(p); _add_lexicon(p); _add_format(p)
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("synth", help="write a synthetic structure-labeled corpus")
    p.add_argument("output")
    p.add_argument("-n", type=int, default=2000)
    _add_seed(p)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(message)s", stream=sys.stderr, force=True)
    try:
        return args.func(args)
    except (PolitenessError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
