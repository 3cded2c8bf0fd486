"""``scorequery`` command-line entry point.

Exit codes: 0 success, 1 validation failure, 2 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .encode import QueryClass, encode_all
from .engine import CorpusIndex, evaluate_matcher, search
from .errors import ScoreQueryError
from .io import (
    atomic_write,
    corpus_checksum,
    dumps_dataset,
    kern_files,
    load_corpus,
    make_manifest,
    read_dataset,
    read_predictions,
    write_manifest,
)
from .kern import parse_kern
from .metrics import aggregate, random_baseline_f1
from .omrnoise import NoiseConfig, degradation_curve, format_curve
from .querygen import GenConfig, LabeledQuery, build_dataset
from .synth import write_corpus

logger = logging.getLogger("scorequery")

DEFAULT_LEVELS = "0,10,...,100"


class ValidationFailed(Exception):
    """Raised to exit with status 1 after output has been written."""


def parse_levels(text: str) -> list[float]:
    """``"0,10,...,100"`` or ``"0,5,72"`` -> list of floats."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if "..." in parts:
        i = parts.index("...")
        if i < 2 or i != len(parts) - 2:
            raise argparse.ArgumentTypeError("'...' needs two leading values and one final value")
        head = [float(p) for p in parts[:i]]
        step, stop = head[-1] - head[-2], float(parts[-1])
        if step <= 0:
            raise argparse.ArgumentTypeError("levels must increase")
        out = list(head)
        while out[-1] + step <= stop + 1e-9:
            out.append(round(out[-1] + step, 10))
        return out
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad level list {text!r}") from None


def parse_mix(text: str) -> tuple:
    try:
        mix = tuple(float(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad mix {text!r}") from None
    if len(mix) != 3:
        raise argparse.ArgumentTypeError("mix needs three comma-separated weights")
    return mix


def parse_classes(text: str) -> list[QueryClass]:
    if not text or text == "all":
        return list(QueryClass)
    return [QueryClass.parse(c) for c in text.split(",") if c.strip()]


def parse_classes_opt(text: str) -> list[QueryClass]:
    return [QueryClass.parse(c) for c in text.split(",") if c.strip()]


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _emit(text: str, out) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


def _fmt(value) -> str:
    return f"{value:.2f}" if isinstance(value, float) else str(value)


# ---------------------------------------------------------------------------
# subcommands


def cmd_parse(args) -> int:
    rows = ["file\tstatus\tdetail"]
    failed = 0
    for path in kern_files(args.corpus):
        try:
            staff = parse_kern(path.read_text(encoding="utf-8"), path.stem)
            rows.append(f"{path.name}\tok\t{len(staff.symbols)} symbols")
        except ScoreQueryError as exc:
            failed += 1
            rows.append(f"{path.name}\t{type(exc).__name__}\t{exc}")
    _emit("\n".join(rows) + "\n", args.out)
    if failed and args.strict:
        raise ValidationFailed(f"{failed} file(s) failed to parse")
    return 0


def cmd_encode(args) -> int:
    staff = parse_kern(Path(args.file).read_text(encoding="utf-8"), Path(args.file).stem)
    lines = [f"{qc.value}\t{' '.join(enc.tokens)}" for qc, enc in encode_all(staff, args.classes).items()]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _gen_config(args) -> GenConfig:
    return GenConfig(
        seed=args.seed,
        min_len=args.min_len,
        max_len=args.max_len,
        max_positives=args.max_positives,
        cross_staff_negatives=args.cross_staff_negatives,
        mutation_negatives=args.mutation_negatives,
        max_mutation_attempts=args.max_mutation_attempts,
    )


def cmd_gen_queries(args) -> int:
    corpus = load_corpus(args.corpus)
    config = _gen_config(args)
    dataset = build_dataset(corpus, args.classes, config)
    _emit(dumps_dataset(dataset), args.out)
    if args.out:
        cfg = dict(config.to_dict(), classes=[qc.value for qc in args.classes])
        write_manifest(f"{args.out}.manifest.json", make_manifest("gen-queries", cfg, corpus_checksum(args.corpus)))
    return 0


def cmd_search(args) -> int:
    corpus = load_corpus(args.corpus)
    qc = QueryClass.parse(args.query_class)
    tokens = args.query.split()
    if not tokens:
        raise ScoreQueryError("empty query")
    query = LabeledQuery("cli", "", qc, tokens, False, "cross_staff")
    hits = search(CorpusIndex(corpus, [qc]), query)
    _emit("".join(f"{sid}\n" for sid in hits), args.out)
    return 0


def cmd_evaluate(args) -> int:
    dataset = read_dataset(args.dataset)
    joined = evaluate_matcher(dataset, read_predictions(args.predictions))
    if joined.missing:
        print(f"warning: {len(joined.missing)} queries without a decision", file=sys.stderr)
    report = aggregate(joined.pairs, args.exclude)
    lines = ["class\ttp\tfp\tfn\ttn\tprecision\trecall\tf1"]
    lines += ["\t".join(_fmt(v) for v in row) for row in report.rows()]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _noise_config(args) -> NoiseConfig:
    return NoiseConfig(mix=args.mix, protect_header=args.protect_header, seed=args.seed)


def _curve(corpus, dataset, args) -> str:
    rows = degradation_curve(corpus, dataset, args.ser, _noise_config(args), args.exclude)
    return format_curve(rows)


def _simulate_config(args) -> dict:
    return dict(
        _noise_config(args).to_dict(),
        ser_levels=args.ser,
        exclude=[qc.value for qc in args.exclude],
    )


def cmd_simulate(args) -> int:
    corpus = load_corpus(args.corpus)
    dataset = read_dataset(args.dataset)
    _emit(_curve(corpus, dataset, args), args.out)
    if args.out:
        write_manifest(
            f"{args.out}.manifest.json",
            make_manifest("simulate", _simulate_config(args), corpus_checksum(args.corpus)),
        )
    return 0


def cmd_baseline(args) -> int:
    _emit(f"{random_baseline_f1(args.rho, args.q):.2f}\n", args.out)
    return 0


def cmd_gen_synthetic(args) -> int:
    if not args.out:
        raise ScoreQueryError("gen-synthetic needs --out DIR")
    write_corpus(args.out, args.n, (args.min_length, args.max_length), args.seed)
    cfg = {"n_staves": args.n, "length_range": [args.min_length, args.max_length], "seed": args.seed}
    write_manifest(Path(args.out) / "manifest.json", make_manifest("gen-synthetic", cfg, corpus_checksum(args.out)))
    return 0


def cmd_pipeline(args) -> int:
    if not args.out:
        raise ScoreQueryError("pipeline needs --out DIR")
    out = Path(args.out)
    corpus = load_corpus(args.corpus)
    gen = _gen_config(args)
    dataset = build_dataset(corpus, args.classes, gen)
    atomic_write(out / "dataset.jsonl", dumps_dataset(dataset))
    atomic_write(out / "curve.tsv", _curve(corpus, dataset, args))
    cfg = {
        "gen": dict(gen.to_dict(), classes=[qc.value for qc in args.classes]),
        "noise": _simulate_config(args),
    }
    write_manifest(out / "manifest.json", make_manifest("pipeline", cfg, corpus_checksum(args.corpus)))
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (stdout when omitted, where allowed)")
    common.add_argument("--strict", action="store_true", help="treat per-item failures as fatal")
    common.add_argument("-v", "--verbose", action="store_true")

    seeded = argparse.ArgumentParser(add_help=False)
    seeded.add_argument("--seed", type=_u64, required=True)

    gen = argparse.ArgumentParser(add_help=False)
    gen.add_argument("--classes", type=parse_classes, default=list(QueryClass), help="comma list or 'all'")
    gen.add_argument("--min-len", type=int, default=4)
    gen.add_argument("--max-len", type=int, default=12)
    gen.add_argument("--max-positives", type=int, default=3)
    gen.add_argument("--cross-staff-negatives", type=int, default=3)
    gen.add_argument("--mutation-negatives", type=int, default=2)
    gen.add_argument("--max-mutation-attempts", type=int, default=20)

    noise = argparse.ArgumentParser(add_help=False)
    noise.add_argument("--ser", type=parse_levels, default=parse_levels(DEFAULT_LEVELS))
    noise.add_argument("--mix", type=parse_mix, default=(0.6, 0.2, 0.2))
    noise.add_argument("--protect-header", action="store_true")
    noise.add_argument("--exclude", type=parse_classes_opt, default=[])

    parser = argparse.ArgumentParser(prog="scorequery", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common], help="parse a kern directory and report status")
    p.add_argument("corpus")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("encode", parents=[common], help="print the query encodings of a kern file")
    p.add_argument("file")
    p.add_argument("--classes", type=parse_classes, default=list(QueryClass))
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("gen-queries", parents=[common, seeded, gen], help="build a labeled query dataset")
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=cmd_gen_queries)

    p = sub.add_parser("search", parents=[common], help="exact-match search over a corpus")
    p.add_argument("--class", dest="query_class", required=True)
    p.add_argument("--query", required=True, help="space-separated tokens")
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("evaluate", parents=[common], help="score predictions against a dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--exclude", type=parse_classes_opt, default=[])
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("simulate", parents=[common, seeded, noise], help="SER -> F1 degradation curve")
    p.add_argument("--corpus", required=True)
    p.add_argument("--dataset", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("baseline", parents=[common], help="random-classifier F1")
    p.add_argument("--rho", type=float, default=0.4, help="positive fraction")
    p.add_argument("--q", type=float, default=0.5, help="probability of answering yes")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("gen-synthetic", parents=[common, seeded], help="write a synthetic kern corpus")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--min-length", type=int, default=10)
    p.add_argument("--max-length", type=int, default=60)
    p.set_defaults(func=cmd_gen_synthetic)

    p = sub.add_parser("pipeline", parents=[common, seeded, gen, noise], help="gen-queries + simulate")
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (ValidationFailed, ScoreQueryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
