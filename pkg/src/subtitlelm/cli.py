"""Command line interface.

Subcommands: normalize, count, train, train-groups, interp, ppl, wer.
Exit status is 0 on success, 1 when a batch finished with per-item
failures, and 2 on fatal usage or input errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import arpa, counts, evaluation, interp, mkn
from .manifest import CorpusManifest, ManifestEntry, ManifestError, group_filename, read_manifest
from .textnorm import (
    MalformedSrt,
    NormalizedCorpus,
    RuleError,
    UnreadableFile,
    ingest,
    load_rules,
    normalize,
    normalize_sentence,
)

log = logging.getLogger("subtitlelm")

EXIT_OK, EXIT_PARTIAL, EXIT_FATAL = 0, 1, 2


class FatalError(Exception):
    pass


def _read_sentences(paths) -> NormalizedCorpus:
    corpus = NormalizedCorpus()
    for p in paths:
        try:
            text = Path(p).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise FatalError(f"cannot read {p}: {exc}") from None
        corpus.extend(NormalizedCorpus.from_text(text))
    return corpus


def _normalize_entry(entry: ManifestEntry, rules, errors: str):
    try:
        doc = ingest(entry.path, entry.source_format, errors=errors)
        return normalize(doc, rules), None
    except (UnreadableFile, MalformedSrt, ValueError) as exc:
        return None, str(exc)


def _normalize_all(entries, rules, errors, jobs):
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        # map() yields in submission order, whatever order work finishes in
        return list(pool.map(lambda e: _normalize_entry(e, rules, errors), entries))


def _entries_from_args(args) -> list[ManifestEntry]:
    if args.manifest:
        return read_manifest(args.manifest).entries
    entries = [ManifestEntry(Path(p), Path(p).stem, "", (), None if args.format == "auto" else args.format)
               for p in args.paths]
    return CorpusManifest(entries).entries


def _output_names(entries) -> list[str]:
    names, used = [], set()
    for e in entries:
        name = e.path.stem
        candidate, n = name, 1
        while candidate in used:
            n += 1
            candidate = f"{name}-{n}"
        used.add(candidate)
        names.append(candidate + ".txt")
    return names


def cmd_normalize(args) -> int:
    rules = load_rules(args.rules_dir)
    entries = _entries_from_args(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = _normalize_all(entries, rules, args.encoding_errors, args.jobs)
    failures = 0
    report = ["source\tstatus\toutput\tsentences\tdropped\twarnings\tmessage"]
    for entry, name, (corpus, error) in zip(entries, _output_names(entries), results):
        if corpus is None:
            failures += 1
            report.append(f"{entry.path}\tfailed\t-\t0\t0\t0\t{error}")
            log.error("%s: %s", entry.path, error)
            continue
        (out_dir / name).write_text(corpus.render(), encoding="utf-8", newline="\n")
        r = corpus.report
        msg = "; ".join(r.warnings)
        report.append(f"{entry.path}\tok\t{name}\t{len(corpus)}\t{len(r.dropped)}\t{len(r.warnings)}\t{msg}")
    (out_dir / "normalize_report.tsv").write_text("\n".join(report) + "\n", encoding="utf-8")
    print(f"normalized {len(entries) - failures}/{len(entries)} sources into {out_dir}")
    return EXIT_PARTIAL if failures else EXIT_OK


def _count_inputs(paths, order: int) -> counts.CountTable:
    tables = []
    for p in paths:
        if str(p).endswith((".counts", ".counts.gz")):
            try:
                tables.append(counts.read_counts(p, order))
            except (OSError, counts.MalformedCountLine) as exc:
                raise FatalError(f"{p}: {exc}") from None
        else:
            tables.append(counts.count_ngrams(_read_sentences([p]), order))
    return counts.merge(*tables) if tables else counts.CountTable(order)


def cmd_count(args) -> int:
    table = _count_inputs(args.inputs, args.order)
    counts.write_counts(table, args.out)
    sizes = ", ".join(f"{k}-grams: {len(t)}" for k, t in sorted(table.tables.items()))
    print(f"wrote {args.out} ({sizes})")
    return EXIT_OK


def _config(args) -> mkn.ModelConfig:
    policy = counts.VocabPolicy.capped(args.vocab_cap) if args.vocab_cap else counts.VocabPolicy()
    return mkn.ModelConfig(order=args.order, vocab_policy=policy)


def cmd_train(args) -> int:
    inputs = list(args.inputs) + ([args.counts] if args.counts else [])
    if not inputs:
        raise FatalError("train needs --counts or normalized text inputs")
    table = _count_inputs(inputs, args.order)
    try:
        model = mkn.estimate(table, _config(args))
    except mkn.InsufficientStatistics as exc:
        raise FatalError(f"cannot estimate a model: {exc}") from None
    arpa.write_arpa(model, args.out)
    sizes = ", ".join(f"ngram {k}={n}" for k, n in model.counts().items())
    print(f"wrote {args.out} ({sizes})")
    return EXIT_OK


def cmd_train_groups(args) -> int:
    try:
        manifest = read_manifest(args.manifest)
    except OSError as exc:
        raise FatalError(str(exc)) from None
    rules = load_rules(args.rules_dir)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    results = _normalize_all(manifest.entries, rules, args.encoding_errors, args.jobs)
    per_entry: list[counts.CountTable | None] = []
    failures = 0
    for entry, (corpus, error) in zip(manifest.entries, results):
        if corpus is None:
            log.error("%s: %s", entry.path, error)
            failures += 1
            per_entry.append(None)
        else:
            per_entry.append(counts.count_ngrams(corpus, args.order))
    report = ["group\tstatus\tsources\tsentences\tmodel"]
    for label, members in sorted(manifest.groups(args.by).items()):
        tables = [per_entry[i] for i in members if per_entry[i] is not None]
        table = counts.merge(*tables) if tables else counts.CountTable(args.order)
        if table.is_empty():
            log.warning("group %r has no training text, skipped", label)
            report.append(f"{label}\tskipped\t{len(members)}\t0\t-")
            continue
        name = group_filename(label) + ".arpa"
        try:
            model = mkn.estimate(table, _config(args))
        except mkn.InsufficientStatistics as exc:
            log.error("group %r: %s", label, exc)
            failures += 1
            report.append(f"{label}\tfailed\t{len(members)}\t{table.num_sentences}\t-")
            continue
        arpa.write_arpa(model, out_dir / name)
        report.append(f"{label}\tok\t{len(members)}\t{table.num_sentences}\t{name}")
    (out_dir / f"train_groups_{args.by}.tsv").write_text("\n".join(report) + "\n", encoding="utf-8")
    trained = sum(1 for row in report[1:] if row.split("\t")[1] == "ok")
    print(f"trained {trained} {args.by} models in {out_dir}")
    return EXIT_PARTIAL if failures else EXIT_OK


def _load_models(paths) -> list[arpa.ArpaModel]:
    models = []
    for p in paths:
        try:
            models.append(arpa.read_arpa(p))
        except (OSError, arpa.MalformedArpa) as exc:
            raise FatalError(f"{p}: {exc}") from None
    return models


def _model_names(paths) -> list[str]:
    names = []
    for p in paths:
        name = Path(p).name
        for suffix in (".gz", ".arpa", ".lm"):
            name = name.removesuffix(suffix)
        names.append(name)
    return names


def cmd_interp(args) -> int:
    models = _load_models(args.models)
    dev = _read_sentences([args.dev])
    try:
        weights = interp.fit_em(models, dev, tol=args.tol, max_iters=args.max_iters)
    except (interp.EmptyDevSet, interp.AllZeroLikelihood) as exc:
        raise FatalError(str(exc)) from None
    names = _model_names(args.models)
    interp.write_weights(args.out, weights, names)
    for name, lam in zip(names, weights.lambdas):
        print(f"{name}\t{lam:.6f}")
    print(f"dev log10 likelihood {weights.final_dev_loglik:.4f} after {weights.iterations} iterations"
          + ("" if weights.converged else " (not converged)"))
    return EXIT_OK


def cmd_ppl(args) -> int:
    models = _load_models(args.models)
    if args.weights:
        names, weights = interp.read_weights(args.weights)
        if len(names) != len(models):
            raise FatalError(f"{args.weights} has {len(names)} weights for {len(models)} models")
        scorer = interp.InterpolatedModel(models, weights, names)
    elif len(models) == 1:
        scorer = models[0]
    else:
        raise FatalError("several models need --weights")
    test = _read_sentences([args.test])
    try:
        report = evaluation.perplexity(scorer, test, skip_oov=args.skip_oov)
    except evaluation.EmptyCorpus as exc:
        raise FatalError(str(exc)) from None
    print(f"{len(report.sentences)} sentences, {report.token_count} words, {report.oov_count} OOVs")
    print(f"logprob= {report.log10_prob_total:.6f} ppl= {report.perplexity:.6f}")
    if args.out:
        evaluation.write_report(args.out, report.as_pairs())
    return EXIT_OK


def cmd_wer(args) -> int:
    ref_lines = _read_lines(args.ref)
    hyp_lines = _read_lines(args.hyp)
    if len(ref_lines) != len(hyp_lines):
        raise FatalError(f"{len(ref_lines)} reference lines but {len(hyp_lines)} hypothesis lines")
    if args.no_normalize:
        condition = str.split
    else:
        rules = load_rules(args.rules_dir)

        def condition(line):
            return list(normalize_sentence(line, rules) or ())
    pairs = [(condition(r), condition(h)) for r, h in zip(ref_lines, hyp_lines)]
    try:
        report = evaluation.corpus_wer(pairs)
    except evaluation.EmptyReference as exc:
        raise FatalError(str(exc)) from None
    print(f"WER {100 * report.wer:.2f}% "
          f"(S={report.substitutions} I={report.insertions} D={report.deletions} N={report.ref_len})")
    if args.out:
        evaluation.write_report(args.out, report.as_pairs())
    return EXIT_OK


def _read_lines(path) -> list[str]:
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise FatalError(f"cannot read {path}: {exc}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="subtitlelm",
        description="Normalize Dutch subtitles, count n-grams, train and combine n-gram language models.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_norm_opts(p):
        p.add_argument("--rules-dir", help="directory overriding the shipped normalization tables")
        p.add_argument("--encoding-errors", default="strict", choices=["strict", "replace"],
                       help="UTF-8 decoding policy for source files")
        p.add_argument("--jobs", type=int, default=1, help="sources normalized concurrently")

    p = sub.add_parser("normalize", help="normalize subtitle sources")
    p.add_argument("paths", nargs="*")
    p.add_argument("--manifest")
    p.add_argument("--format", default="auto", choices=["auto", "plain", "srt", "sentences"])
    p.add_argument("--out", required=True, help="output directory")
    add_norm_opts(p)
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("count", help="count n-grams of normalized text")
    p.add_argument("inputs", nargs="+", help="normalized text or .counts files")
    p.add_argument("--order", type=int, default=5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("train", help="estimate a modified Kneser-Ney ARPA model")
    p.add_argument("inputs", nargs="*", help="normalized text or .counts files")
    p.add_argument("--counts")
    p.add_argument("--order", type=int, default=5)
    p.add_argument("--vocab-cap", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("train-groups", help="one model per show type or domain")
    p.add_argument("manifest")
    p.add_argument("--by", choices=["type", "domain"], default="type")
    p.add_argument("--order", type=int, default=5)
    p.add_argument("--vocab-cap", type=int)
    p.add_argument("--out", required=True, help="output directory")
    add_norm_opts(p)
    p.set_defaults(func=cmd_train_groups)

    p = sub.add_parser("interp", help="fit interpolation weights by EM")
    p.add_argument("models", nargs="+")
    p.add_argument("--dev", required=True, help="normalized development text")
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--out", required=True, help="weights file")
    p.set_defaults(func=cmd_interp)

    p = sub.add_parser("ppl", help="perplexity of a model or mixture")
    p.add_argument("models", nargs="+")
    p.add_argument("--test", required=True, help="normalized test text")
    p.add_argument("--weights", help="weights file written by interp")
    p.add_argument("--skip-oov", action="store_true", help="leave OOV words out instead of scoring <unk>")
    p.add_argument("--out", help="metric<TAB>value report")
    p.set_defaults(func=cmd_ppl)

    p = sub.add_parser("wer", help="word error rate of line-aligned transcripts")
    p.add_argument("ref")
    p.add_argument("hyp")
    p.add_argument("--no-normalize", action="store_true", help="compare whitespace tokens as they are")
    p.add_argument("--rules-dir")
    p.add_argument("--out", help="metric<TAB>value report")
    p.set_defaults(func=cmd_wer)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    if getattr(args, "order", 1) < 1:
        parser.error("--order must be >= 1")
    try:
        return args.func(args)
    except (FatalError, ManifestError, RuleError, OSError) as exc:
        print(f"subtitlelm {args.command}: {exc}", file=sys.stderr)
        return EXIT_FATAL


if __name__ == "__main__":
    sys.exit(main())
