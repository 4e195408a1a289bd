"""Experiment runner: dataset ingestion, sweeps over the trial grid, the
synthetic-triple experiment, and CSV emission."""

from __future__ import annotations

import csv
import itertools
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .classifier import (REDUCTION_PROJECTION, TrialConfig, TrialResult,
                         run_trials)
from .encoder import PropertyNaming, encode_instance, label_judgment, label_question
from .errors import NutsError
from .nal_core import DEFAULT_CAPACITY, Memory, choose
from .nalifier import DEFAULT_THRESHOLD, Nalifier, TraceFn
from .synthetic import SyntheticSpec, gen_triple

#: The 35 single-word commands of Speech Commands v2.
SPEECH_COMMANDS_WORDS = (
    "bed", "cat", "down", "five", "forward", "go", "house", "left", "marvin",
    "no", "on", "seven", "six", "tree", "up", "visual", "yes", "backward",
    "bird", "dog", "eight", "follow", "four", "happy", "learn", "nine", "off",
    "one", "right", "sheila", "stop", "three", "two", "wow", "zero",
)

#: Desk-scale preset: first ten canonical words, 30 repeats.
DESK_CLASSES = SPEECH_COMMANDS_WORDS[:10]
DESK_REPEATS = 30

CSV_COLUMNS = ("dims", "K", "aikr", "reduction", "seed", "repeats", "word",
               "accuracy", "overall", "sec_per_inference")

WORKER_ENV_VAR = "NUTS_THREADS"


class MissingWords(NutsError):
    """Dataset directory lacks one or more of the requested word classes."""


class EmptyClass(NutsError):
    """A requested word directory exists but holds no WAV files."""


def ingest_dataset(root, classes: Sequence[str] | None = None) -> dict[str, list[Path]]:
    """Index a dataset directory: one subdirectory of WAVs per word.

    Without `classes` the full 35-word list is required; unknown
    subdirectories are warned about and skipped.
    """
    root = Path(root)
    wanted = tuple(classes) if classes else SPEECH_COMMANDS_WORDS
    found: dict[str, list[Path]] = {}
    for entry in sorted(p for p in root.iterdir() if p.is_dir()):
        if entry.name not in wanted:
            warnings.warn(f"skipping unknown class directory {entry.name!r}",
                          stacklevel=2)
            continue
        found[entry.name] = sorted(entry.glob("*.wav"))
    missing = [w for w in wanted if w not in found]
    if missing:
        raise MissingWords(f"dataset at {root} lacks classes: {', '.join(missing)}")
    empty = [w for w in wanted if not found[w]]
    if empty:
        raise EmptyClass(f"no WAV files for classes: {', '.join(empty)}")
    return {w: found[w] for w in wanted}


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian grid of trial configurations; list-valued axes multiply."""

    classes: tuple[str, ...]
    dims: tuple[int, ...] = (4,)
    k: tuple[int, ...] = (2,)
    aikr: tuple[int, ...] = (DEFAULT_CAPACITY,)
    reduction: tuple[str, ...] = (REDUCTION_PROJECTION,)
    seed: tuple[int, ...] = (0,)
    repeats: int = DESK_REPEATS
    shuffle_labels: bool = False

    def cells(self) -> list[TrialConfig]:
        out = []
        for dims, k, aikr, reduction, seed in itertools.product(
                self.dims, self.k, self.aikr, self.reduction, self.seed):
            out.append(TrialConfig(
                classes=self.classes, k=k, dims=dims, seed=seed,
                aikr_limit=aikr, reduction=reduction, repeats=self.repeats,
                shuffle_labels=self.shuffle_labels))
        return out


def worker_count(n_cells: int, requested: int | None = None) -> int:
    """Worker pool size for a sweep, capped by the NUTS_THREADS env var."""
    limit = n_cells
    if requested is not None:
        limit = min(limit, max(1, requested))
    else:
        limit = min(limit, os.cpu_count() or 1)
    env = os.environ.get(WORKER_ENV_VAR)
    if env:
        limit = min(limit, max(1, int(env)))
    return max(1, limit)


def _sweep_cell(payload: tuple[dict, TrialConfig]) -> TrialResult:
    dataset, cfg = payload
    return run_trials(dataset, cfg)


def run_sweep(dataset: Mapping[str, Sequence], grid: SweepGrid,
              workers: int | None = None,
              trace: TraceFn | None = None) -> list[TrialResult]:
    """Evaluate every grid cell; results come back in deterministic grid order.

    Cells are independent (own matrix, nalifier and memory) and run in a
    process pool unless a single worker is forced or tracing is active.
    """
    cells = grid.cells()
    n_workers = worker_count(len(cells), workers)
    if n_workers <= 1 or trace is not None:
        return [run_trials(dataset, cfg, trace) for cfg in cells]
    dataset = {w: list(files) for w, files in dataset.items()}
    with ProcessPoolExecutor(max_workers=n_workers) as pool:
        return list(pool.map(_sweep_cell, [(dataset, cfg) for cfg in cells]))


def result_rows(result: TrialResult) -> list[dict]:
    """One CSV row per word of the trial, each echoing the cell's overall."""
    cfg = result.config
    rows = []
    for word in cfg.classes:
        rows.append({
            "dims": cfg.dims,
            "K": cfg.k,
            "aikr": cfg.aikr_limit,
            "reduction": cfg.reduction,
            "seed": cfg.seed,
            "repeats": cfg.repeats,
            "word": word,
            "accuracy": repr(result.per_word[word]),
            "overall": repr(result.overall),
            "sec_per_inference": repr(result.sec_per_inference),
        })
    return rows


def write_csv(results: Iterable[TrialResult], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for result in results:
            writer.writerows(result_rows(result))


@dataclass(frozen=True)
class SyntheticOutcome:
    success_rate: float
    seconds: float
    repeats: int


LABEL_A = "labelA"
LABEL_B = "labelB"


def run_synthetic_experiment(spec: SyntheticSpec, repeats: int,
                             aikr_limit: int = DEFAULT_CAPACITY,
                             threshold: float = DEFAULT_THRESHOLD,
                             trace: TraceFn | None = None) -> SyntheticOutcome:
    """Label two synthetic instances, query the constructed near-copy of the
    first; success means the query comes back with the first one's label."""
    t0 = time.perf_counter()
    successes = 0
    for rep in range(repeats):
        child = int(np.random.SeedSequence([spec.seed, rep]).generate_state(1, np.uint64)[0])
        a, b, c = gen_triple(replace(spec, seed=child))
        nalifier = Nalifier(threshold, trace=trace)
        memory = Memory(aikr_limit)
        for instance_id, vec, label in (("A", a, LABEL_A), ("B", b, LABEL_B)):
            for pj in encode_instance(instance_id, vec, PropertyNaming.REDUCED_DIM):
                nalifier.observe(pj)
            closed = nalifier.close_instance(instance_id)
            if closed is not None:
                for sent in closed.sentences:
                    memory.assert_sentence(sent)
            sent = label_judgment(instance_id, label)
            memory.assert_sentence(sent)
            if trace is not None:
                trace("input", sent)
        for pj in encode_instance("C", c, PropertyNaming.REDUCED_DIM):
            nalifier.observe(pj)
        closed = nalifier.close_instance("C")
        if closed is not None:
            for sent in closed.sentences:
                memory.assert_sentence(sent)
        answers = []
        for label in (LABEL_A, LABEL_B):
            q = label_question("C", label)
            if trace is not None:
                trace("input", q)
            j = memory.answer(q)
            if j is not None:
                answers.append(j)
        best = choose(answers)
        if best is not None and best.statement.predicate.name == LABEL_A:
            successes += 1
    return SyntheticOutcome(successes / repeats, time.perf_counter() - t0, repeats)


def parse_config(path) -> dict[str, str]:
    """Plain key=value lines; '#' starts a comment, blank lines are ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise NutsError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out
