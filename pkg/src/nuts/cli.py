"""Command line interface: eval, sweep, synth and parse subcommands."""

from __future__ import annotations

import argparse
import sys

from . import narsese
from .classifier import REDUCTIONS, TrialConfig
from .dimreduce import PRNG_NAME
from .errors import NutsError
from .harness import (DESK_CLASSES, DESK_REPEATS, SweepGrid, ingest_dataset,
                      parse_config, run_sweep, run_synthetic_experiment,
                      run_trials, write_csv)
from .nal_core import DEFAULT_CAPACITY
from .synthetic import SyntheticSpec

_TRACE_PREFIX = {"input": "", "suppressed": "#suppressed ", "synth": "#synth "}


def _print_trace(tag: str, sentence) -> None:
    print(_TRACE_PREFIX[tag] + narsese.render(sentence))


def _split_words(text: str) -> tuple[str, ...]:
    return tuple(w.strip() for w in text.split(",") if w.strip())


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nuts")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="run repeated few-shot trials on a dataset")
    p_eval.add_argument("--data", required=True, help="dataset root (one word per subdirectory)")
    p_eval.add_argument("--classes", help="comma-separated subset of words")
    p_eval.add_argument("--desk", action="store_true",
                        help=f"preset: first {len(DESK_CLASSES)} words, {DESK_REPEATS} repeats")
    p_eval.add_argument("--dims", type=int, default=4)
    p_eval.add_argument("--examples", type=int, default=2, help="training examples per class (K)")
    p_eval.add_argument("--repeats", type=int, default=100)
    p_eval.add_argument("--seed", type=int, default=7)
    p_eval.add_argument("--aikr", type=int, default=DEFAULT_CAPACITY)
    p_eval.add_argument("--reduction", choices=REDUCTIONS, default="projection")
    p_eval.add_argument("--shuffle-labels", action="store_true")
    p_eval.add_argument("--dump-narsese", action="store_true",
                        help="print reasoner inputs; '#suppressed'/'#synth' mark nalifier activity")
    p_eval.add_argument("-o", "--output", help="write per-word CSV rows here")

    p_sweep = sub.add_parser("sweep", help="run a config-file grid of trials")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--data", help="dataset root (overrides the config's data key)")
    p_sweep.add_argument("-o", "--output", required=True)

    p_synth = sub.add_parser("synth", help="synthetic triple experiment")
    p_synth.add_argument("--props", type=int, default=2000)
    p_synth.add_argument("--noise", type=float, default=0.05)
    p_synth.add_argument("--separation", type=float, default=0.25)
    p_synth.add_argument("--seed", type=int, default=7)
    p_synth.add_argument("--repeats", type=int, default=50)
    p_synth.add_argument("--aikr", type=int, default=DEFAULT_CAPACITY)
    p_synth.add_argument("--dump-narsese", action="store_true")

    p_parse = sub.add_parser("parse", help="check a file of Narsese sentences")
    p_parse.add_argument("file", help="path, or '-' for stdin")

    return parser


def _cmd_eval(args) -> int:
    if args.desk:
        classes = DESK_CLASSES
        repeats = DESK_REPEATS if args.repeats == 100 else args.repeats
    else:
        classes = _split_words(args.classes) if args.classes else None
        repeats = args.repeats
    dataset = ingest_dataset(args.data, classes)
    cfg = TrialConfig(
        classes=tuple(dataset), k=args.examples, dims=args.dims,
        seed=args.seed, aikr_limit=args.aikr, reduction=args.reduction,
        repeats=repeats, shuffle_labels=args.shuffle_labels)
    trace = _print_trace if args.dump_narsese else None
    print(f"# prng={PRNG_NAME} classes={len(cfg.classes)} dims={cfg.dims} "
          f"K={cfg.k} repeats={cfg.repeats} seed={cfg.seed} "
          f"aikr={cfg.aikr_limit} reduction={cfg.reduction}")
    result = run_trials(dataset, cfg, trace)
    print(f"overall_accuracy={result.overall:.4f} trials={result.n_trials} "
          f"sec_per_inference={result.sec_per_inference:.4f}")
    if args.output:
        write_csv([result], args.output)
    return 0


def _grid_from_config(cfg: dict[str, str], data_override: str | None) -> tuple[str, SweepGrid]:
    data = data_override or cfg.get("data")
    if not data:
        raise NutsError("sweep config needs a data=<dir> line (or pass --data)")
    classes = _split_words(cfg["classes"]) if "classes" in cfg else None
    dataset_classes = classes  # resolved by ingest; grid echoes the request

    def ints(key, default):
        if key not in cfg:
            return default
        return tuple(int(v) for v in cfg[key].split(","))

    grid = SweepGrid(
        classes=dataset_classes or (),
        dims=ints("dims", (4,)),
        k=ints("examples", (2,)),
        aikr=ints("aikr", (DEFAULT_CAPACITY,)),
        reduction=tuple(cfg["reduction"].split(",")) if "reduction" in cfg else ("projection",),
        seed=ints("seed", (0,)),
        repeats=int(cfg.get("repeats", DESK_REPEATS)),
        shuffle_labels=cfg.get("shuffle_labels", "false").lower() in ("1", "true", "yes"),
    )
    return data, grid


def _cmd_sweep(args) -> int:
    cfg = parse_config(args.config)
    data, grid = _grid_from_config(cfg, args.data)
    dataset = ingest_dataset(data, grid.classes or None)
    if not grid.classes:
        grid = SweepGrid(**{**grid.__dict__, "classes": tuple(dataset)})
    results = run_sweep(dataset, grid)
    write_csv(results, args.output)
    print(f"# prng={PRNG_NAME} cells={len(results)} -> {args.output}")
    for r in results:
        print(f"dims={r.config.dims} K={r.config.k} aikr={r.config.aikr_limit} "
              f"reduction={r.config.reduction} seed={r.config.seed} "
              f"overall={r.overall:.4f}")
    return 0


def _cmd_synth(args) -> int:
    spec = SyntheticSpec(n_props=args.props, separation=args.separation,
                         noise=args.noise, seed=args.seed)
    trace = _print_trace if args.dump_narsese else None
    outcome = run_synthetic_experiment(spec, args.repeats, args.aikr, trace=trace)
    print(f"success_rate={outcome.success_rate:.4f} repeats={outcome.repeats} "
          f"seconds={outcome.seconds:.2f}")
    return 0


def _cmd_parse(args) -> int:
    if args.file == "-":
        lines = sys.stdin.read().splitlines()
    else:
        with open(args.file) as fh:
            lines = fh.read().splitlines()
    failures = 0
    for lineno, line in enumerate(lines, start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        try:
            print(narsese.render(narsese.parse(text)))
        except NutsError as e:
            failures += 1
            print(f"line {lineno}: {e}", file=sys.stderr)
    return 1 if failures else 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"eval": _cmd_eval, "sweep": _cmd_sweep,
                "synth": _cmd_synth, "parse": _cmd_parse}
    try:
        return handlers[args.command](args)
    except NutsError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
