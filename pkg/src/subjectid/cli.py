"""Command-line front end: ``subjectid train|score|eval|inspect``.

Exit status is 0 on success, 1 for usage errors and 2 for bad data.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import corpus, evaluation, interpolation, scoring, training

log = logging.getLogger("subjectid")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class DataError(Exception):
    pass


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fraction(text):
    value = float(text)
    if not 0 < value <= 1:
        raise argparse.ArgumentTypeError(f"{text} is not in (0, 1]")
    return value


def _open_fraction(text):
    value = float(text)
    if not 0 < value < 1:
        raise argparse.ArgumentTypeError(f"{text} is not in (0, 1)")
    return value


def _positive(text):
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{text} must be positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="subjectid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="collect corpus statistics and fit mixture weights")
    p.add_argument("--corpus", required=True, metavar="DIR")
    p.add_argument("--model", required=True, metavar="PATH")
    p.add_argument("--tagset", metavar="PATH")
    p.add_argument("--idf-variant", choices=["printed", "classic"], default="printed")
    p.add_argument("--window", choices=["paragraph", "document"], default="paragraph")
    p.add_argument("--tol", type=_positive, default=interpolation.DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=interpolation.DEFAULT_MAX_ITER)
    p.add_argument("--heldout-fraction", type=_open_fraction, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("score", help="rank the nouns of tagged documents")
    p.add_argument("inputs", nargs="*", metavar="FILE")
    p.add_argument("--model", required=True, metavar="PATH")
    p.add_argument("--corpus", metavar="DIR", help="score every file of DIR")
    p.add_argument("--tagset", metavar="PATH")
    p.add_argument("--idf-variant", choices=["printed", "classic"])
    p.add_argument("--top-fraction", type=_fraction, default=0.3333)
    p.add_argument("--all", action="store_true", help="emit the full ranking")
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("eval", help="reader agreement and model overlap reports")
    p.add_argument("gold", metavar="ANNOTATIONS")
    p.add_argument("predictions", nargs="?", metavar="PREDICTIONS")
    p.add_argument("--report", choices=["table4", "table5", "table6", "all"], default="all")
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("inspect", help="show IDF/MF statistics stored in a model")
    p.add_argument("words", nargs="+", metavar="WORD")
    p.add_argument("--model", required=True, metavar="PATH")
    p.add_argument("--format", choices=["text", "json"], default="text")
    return parser


def _tagset(path):
    if path is None:
        return None
    try:
        return corpus.load_tagset(path)
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read tagset {path}: {exc}") from None


def _read_docs(paths):
    docs = []
    for path in paths:
        try:
            docs.append(corpus.read_document(path, source_tag=Path(path).name))
        except corpus.ParseError as exc:
            raise DataError(str(exc)) from None
        except (OSError, UnicodeDecodeError) as exc:
            raise DataError(f"{path}: {exc}") from None
    return docs


def _load_bundle(path):
    try:
        return training.load_bundle(path)
    except OSError as exc:
        raise DataError(f"cannot read model {path}: {exc}") from None
    except training.ModelFileError as exc:
        raise DataError(f"{path}: {exc}") from None


def _emit(text, out):
    out.write(text)
    if not text.endswith("\n"):
        out.write("\n")


def fit_weights(docs, config, window, variant, fraction, seed, tol, max_iter):
    """Held-out mixture weights; equal weights when nothing can be fitted."""
    try:
        fit_docs, heldout = interpolation.heldout_split(docs, fraction, seed)
    except interpolation.TooFewDocuments as exc:
        log.warning("%s; using equal weights", exc)
        return interpolation.EQUAL_WEIGHTS
    partial = training.train(fit_docs, config, window, variant)
    samples = interpolation.collect_samples(heldout, partial, config)
    try:
        return interpolation.estimate_weights(samples, tol=tol, max_iter=max_iter)
    except interpolation.NoUsableSamples:
        log.warning("held-out nouns have no co-occurrence evidence; using equal weights")
        return interpolation.EQUAL_WEIGHTS


def cmd_train(args, out) -> int:
    directory = Path(args.corpus)
    if not directory.is_dir():
        raise DataError(f"corpus directory {directory} does not exist")
    paths = corpus.corpus_files(directory)
    if not paths:
        raise DataError(f"corpus directory {directory} contains no documents")
    config = _tagset(args.tagset) or corpus.DEFAULT_TAGSET
    window = training.Window(args.window)
    variant = training.IdfVariant(args.idf_variant)
    docs = _read_docs(paths)

    weights = fit_weights(docs, config, window, variant, args.heldout_fraction,
                          args.seed, args.tol, args.max_iter)
    model = training.train(docs, config, window, variant)
    training.save_model(model, args.model, weights)

    summary = {
        "model": str(args.model),
        "documents": model.doc_count,
        "vocabulary": len(model.term_freq),
        "pairs": len(model.pair_count),
        "weights": weights.to_dict(),
    }
    if args.format == "json":
        _emit(json.dumps(summary, ensure_ascii=False, sort_keys=True), out)
    else:
        _emit(
            f"documents (P): {model.doc_count}\n"
            f"vocabulary:    {len(model.term_freq)}\n"
            f"pairs:         {len(model.pair_count)}\n"
            f"weights:       pn={weights.pn:.6f} pv={weights.pv:.6f} "
            f"iterations={weights.iterations} converged={weights.converged}",
            out,
        )
    return EXIT_OK


def cmd_score(args, out) -> int:
    model, weights = _load_bundle(args.model)
    if args.idf_variant:
        model = model.with_variant(training.IdfVariant(args.idf_variant))
    if weights is None:
        log.warning("model %s carries no weights; using equal weights", args.model)
        weights = interpolation.EQUAL_WEIGHTS
    config = _tagset(args.tagset) or model.tagset
    if config.digest() != model.tagset_digest:
        log.warning("tagset differs from the one the model was trained with")

    paths = [Path(p) for p in args.inputs]
    if args.corpus:
        paths.extend(corpus.corpus_files(args.corpus))
    if not paths:
        raise UsageError("no documents to score")
    docs = _read_docs(paths)

    blocks = []
    for path, doc in zip(paths, docs):
        doc_id = path.stem
        try:
            ranking = scoring.score_document(doc, model, weights, config)
        except scoring.NoNouns:
            log.warning("%s: no nouns to rank", path)
            ranking = scoring.SubjectRanking(())
        if not args.all:
            ranking = scoring.select_top(ranking, args.top_fraction)
        if args.format == "json":
            record = scoring.ranking_record(ranking, doc_id, weights)
            blocks.append(json.dumps(record, ensure_ascii=False))
        else:
            blocks.append(scoring.format_table(ranking, doc_id))
    _emit(("\n" if args.format == "json" else "\n\n").join(blocks), out)
    return EXIT_OK


def cmd_eval(args, out) -> int:
    try:
        annotations = evaluation.load_annotations(args.gold)
        predictions = evaluation.load_predictions(args.predictions) if args.predictions else None
    except OSError as exc:
        raise DataError(str(exc)) from None
    except (ValueError, KeyError, TypeError) as exc:
        raise DataError(f"malformed annotation or prediction file: {exc}") from None
    if not annotations:
        raise DataError(f"{args.gold} holds no annotations")

    reports = ["table4", "table5", "table6"] if args.report == "all" else [args.report]
    if predictions is None:
        if args.report == "table6":
            raise UsageError("table6 needs a predictions file")
        reports = [r for r in reports if r != "table6"]
    else:
        try:
            evaluation.match_predictions(annotations, predictions)
        except evaluation.IdMismatch as exc:
            raise DataError(f"text ids differ: {exc}") from None

    if args.format == "json":
        record = evaluation.report_records(annotations, predictions, reports)
        _emit(json.dumps(record, ensure_ascii=False, sort_keys=True), out)
        return EXIT_OK

    sections = []
    if "table4" in reports:
        stats = evaluation.count_stats(annotations)
        sections.append("Number of subjects selected by readers\n" + evaluation.table4(stats))
    if "table5" in reports:
        sections.append("Repetition of subjects among readers\n" + evaluation.table5(annotations))
    if "table6" in reports:
        sections.append("Overlap of model subjects with readers\n"
                        + evaluation.table6(annotations, predictions))
    _emit("\n\n".join(sections), out)
    return EXIT_OK


def cmd_inspect(args, out) -> int:
    model, _ = _load_bundle(args.model)
    if len(args.words) > 2:
        raise UsageError("inspect takes one word or a pair of words")
    info: dict = {"words": {}}
    for w in args.words:
        info["words"][w] = {
            "doc_freq": model.doc_freq.get(w, 0),
            "term_freq": model.term_freq.get(w, 0),
            "idf": model.idf(w),
        }
    if len(args.words) == 2:
        a, b = args.words
        info["pair"] = {"cooccurrence": model.cooccurrence(a, b), "mf": model.mf(a, b)}
    if args.format == "json":
        _emit(json.dumps(info, ensure_ascii=False, sort_keys=True), out)
        return EXIT_OK
    lines = [f"P = {model.doc_count}  idf variant = {model.idf_variant.value}"]
    for w, d in info["words"].items():
        lines.append(f"{w}: O={d['doc_freq']} f={d['term_freq']} idf={d['idf']:.6g}")
    if "pair" in info:
        lines.append(f"f({a},{b})={info['pair']['cooccurrence']} mf={info['pair']['mf']:.6g}")
    _emit("\n".join(lines), out)
    return EXIT_OK


COMMANDS = {"train": cmd_train, "score": cmd_score, "eval": cmd_eval, "inspect": cmd_inspect}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(levelname)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"subjectid {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"subjectid {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
