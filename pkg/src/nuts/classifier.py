"""Few-shot train/predict orchestration and the repeated-trial evaluator.

One trial: project the training utterances' feature vectors with a fresh
seeded matrix, calibrate strengths on the training set only, encode each
instance as property judgments, run them through the nalifier (which emits
similarity links), assert one label judgment per training instance, then
answer one label question per class for the query and keep the judgment with
the highest truth expectation.
"""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Mapping, Sequence

import numpy as np

from . import narsese
from .audio_frontend import FrontendConfig, PcmBuffer, feature_vector, load_wav
from .dimreduce import (Calibration, ProjectionMatrix, calibrate,
                        generate_projection, project, subsample_indices,
                        to_unit_interval)
from .encoder import PropertyNaming, encode_instance, label_judgment, label_question
from .errors import NutsError
from .nal_core import DEFAULT_CAPACITY, Memory, choose
from .nalifier import DEFAULT_THRESHOLD, Nalifier, TraceFn
from .narsese import TruthValue

REDUCTION_PROJECTION = "projection"
REDUCTION_SUBSAMPLE = "subsample"
REDUCTIONS = (REDUCTION_PROJECTION, REDUCTION_SUBSAMPLE)


class ClassImbalance(NutsError):
    """Training classes must all have exactly the same number of examples."""


class TooFewExamples(NutsError):
    """Similarity needs at least two examples per class."""


class InsufficientData(NutsError):
    """A class has fewer than K+1 utterances available."""


@dataclass(frozen=True)
class TrialConfig:
    """Everything one experiment run depends on (and is reproducible from)."""

    classes: tuple[str, ...]
    k: int = 2
    dims: int = 4
    seed: int = 0
    aikr_limit: int = DEFAULT_CAPACITY
    reduction: str = REDUCTION_PROJECTION
    repeats: int = 1
    shuffle_labels: bool = False
    nalifier_threshold: float = DEFAULT_THRESHOLD
    default_confidence: float = narsese.DEFAULT_CONFIDENCE
    frontend: FrontendConfig = FrontendConfig()

    def __post_init__(self):
        if self.dims < 1:
            raise ValueError("dims must be >= 1")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.reduction not in REDUCTIONS:
            raise ValueError(f"reduction must be one of {REDUCTIONS}")


@dataclass
class FewShotModel:
    projection: ProjectionMatrix | None  # None when reduction == subsample
    sample_indices: np.ndarray | None
    calibration: Calibration
    nalifier: Nalifier
    memory: Memory
    classes: tuple[str, ...]
    k: int
    config: TrialConfig


def _reduce_all(vectors, cfg: TrialConfig):
    if cfg.reduction == REDUCTION_PROJECTION:
        matrix = generate_projection(cfg.seed, cfg.dims)
        return [project(v, matrix) for v in vectors], matrix, None
    indices = subsample_indices(cfg.seed, cfg.dims)
    return [np.asarray(v, dtype=float)[indices] for v in vectors], None, indices


def fit_vectors(examples: Sequence[tuple[np.ndarray, str]], cfg: TrialConfig,
                trace: TraceFn | None = None) -> FewShotModel:
    """Fit from precomputed 8000-dim feature vectors (see `fit` for audio)."""
    counts = Counter(word for _, word in examples)
    if not counts:
        raise TooFewExamples("no training examples")
    if len(set(counts.values())) > 1:
        raise ClassImbalance(f"uneven examples per class: {dict(counts)}")
    k = next(iter(counts.values()))
    if k < 2:
        raise TooFewExamples(
            "need at least 2 examples per class to exploit similarity")

    reduced, matrix, indices = _reduce_all([v for v, _ in examples], cfg)
    calibration = calibrate(reduced)
    nalifier = Nalifier(cfg.nalifier_threshold, cfg.default_confidence, trace)
    memory = Memory(cfg.aikr_limit)

    for i, ((_, word), vec) in enumerate(zip(examples, reduced)):
        strengths = to_unit_interval(vec, calibration)
        instance_id = f"U{i + 1}"
        for pj in encode_instance(instance_id, strengths,
                                  PropertyNaming.REDUCED_DIM,
                                  cfg.default_confidence):
            nalifier.observe(pj)
        closed = nalifier.close_instance(instance_id)
        if closed is not None:
            for sent in closed.sentences:
                memory.assert_sentence(sent)
        label = label_judgment(instance_id, word, cfg.default_confidence)
        memory.assert_sentence(label)
        if trace is not None:
            trace("input", label)

    return FewShotModel(matrix, indices, calibration, nalifier, memory,
                        tuple(counts), k, cfg)


def fit(examples: Sequence[tuple[PcmBuffer, str]], cfg: TrialConfig,
        trace: TraceFn | None = None) -> FewShotModel:
    """Fit a few-shot model on labeled utterances (exactly K per class, K >= 2)."""
    feats = [(feature_vector(pcm, cfg.frontend), word) for pcm, word in examples]
    return fit_vectors(feats, cfg, trace)


def predict_vector(model: FewShotModel, features: np.ndarray,
                   ) -> tuple[str, TruthValue] | None:
    """Classify a precomputed feature vector; the model state is not mutated."""
    nalifier = model.nalifier.clone()
    memory = model.memory.clone()
    cfg = model.config
    if model.projection is not None:
        reduced = project(features, model.projection)
    else:
        reduced = np.asarray(features, dtype=float)[model.sample_indices]
    strengths = to_unit_interval(reduced, model.calibration)

    query_id = "Q"
    for pj in encode_instance(query_id, strengths, PropertyNaming.REDUCED_DIM,
                              cfg.default_confidence):
        nalifier.observe(pj)
    closed = nalifier.close_instance(query_id)
    if closed is not None:
        for sent in closed.sentences:
            memory.assert_sentence(sent)

    candidates = []
    for word in model.classes:
        q = label_question(query_id, word)
        if nalifier.trace is not None:
            nalifier.trace("input", q)
        j = memory.answer(q)
        if j is not None:
            candidates.append(j)
    best = choose(candidates)
    if best is None:
        return None
    return best.statement.predicate.name, best.truth


def predict(model: FewShotModel, utterance: PcmBuffer,
            ) -> tuple[str, TruthValue] | None:
    """Classify one utterance, or None (unknown) when no label judgment exists."""
    return predict_vector(model, feature_vector(utterance, model.config.frontend))


@dataclass
class TrialResult:
    """Outcome of `run_trials`: per-word and overall accuracy plus timing."""

    config: TrialConfig
    per_word: dict[str, float]
    overall: float
    sec_per_inference: float
    timestamp: str
    n_trials: int


class _UtteranceCache:
    """Loads dataset entries (paths or PcmBuffers) at most once, and their
    feature vectors at most once."""

    def __init__(self, dataset: Mapping[str, Sequence], frontend: FrontendConfig):
        self.dataset = dataset
        self.frontend = frontend
        self._pcm: dict[tuple[str, int], PcmBuffer] = {}
        self._features: dict[tuple[str, int], np.ndarray] = {}

    def pcm(self, word: str, i: int) -> PcmBuffer:
        key = (word, i)
        if key not in self._pcm:
            entry = self.dataset[word][i]
            self._pcm[key] = entry if isinstance(entry, PcmBuffer) else load_wav(entry)
        return self._pcm[key]

    def features(self, word: str, i: int) -> np.ndarray:
        key = (word, i)
        if key not in self._features:
            self._features[key] = feature_vector(self.pcm(word, i), self.frontend)
        return self._features[key]


def _repeat_seeds(seed: int, rep: int) -> tuple[int, int]:
    state = np.random.SeedSequence([seed, rep]).generate_state(2, np.uint64)
    return int(state[0]), int(state[1])


def run_trials(dataset: Mapping[str, Sequence], cfg: TrialConfig,
               trace: TraceFn | None = None) -> TrialResult:
    """Repeated few-shot trials: per repeat, regenerate the projection, sample
    K training utterances plus one query per class, fit and score.

    Queries go through `predict` from raw PCM, so the timing column includes
    MEL encoding and dimensionality reduction.
    """
    classes = cfg.classes if cfg.classes else tuple(sorted(dataset))
    for word in classes:
        if word not in dataset or len(dataset[word]) < cfg.k + 1:
            raise InsufficientData(
                f"class {word!r} needs at least {cfg.k + 1} utterances")

    cache = _UtteranceCache(dataset, cfg.frontend)
    correct: Counter = Counter()
    totals: Counter = Counter()
    times: list[float] = []

    for rep in range(cfg.repeats):
        matrix_seed, sample_seed = _repeat_seeds(cfg.seed, rep)
        rng = np.random.default_rng(sample_seed)
        train: list[tuple[np.ndarray, str]] = []
        queries: list[tuple[str, PcmBuffer]] = []
        for word in classes:
            picks = rng.choice(len(dataset[word]), size=cfg.k + 1, replace=False)
            for i in picks[:cfg.k]:
                train.append((cache.features(word, int(i)), word))
            queries.append((word, cache.pcm(word, int(picks[-1]))))
        if cfg.shuffle_labels:
            labels = [word for _, word in train]
            perm = rng.permutation(len(labels))
            train = [(vec, labels[perm[i]]) for i, (vec, _) in enumerate(train)]

        model = fit_vectors(train, replace(cfg, seed=matrix_seed), trace)
        for word, pcm in queries:
            t0 = time.perf_counter()
            result = predict(model, pcm)
            times.append(time.perf_counter() - t0)
            totals[word] += 1
            if result is not None and result[0] == word:
                correct[word] += 1

    n = sum(totals.values())
    return TrialResult(
        config=cfg,
        per_word={w: correct[w] / totals[w] for w in classes},
        overall=sum(correct.values()) / n,
        sec_per_inference=sum(times) / len(times),
        timestamp=datetime.now(timezone.utc).isoformat(),
        n_trials=n,
    )


def evaluate(dataset: Mapping[str, Sequence], cfg: TrialConfig) -> float:
    """Overall accuracy over cfg.repeats trials per class; unknowns count as
    incorrect."""
    return run_trials(dataset, cfg).overall
