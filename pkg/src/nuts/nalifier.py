"""Closest-instance preprocessor.

Absorbs instance-property judgments instead of forwarding them to the
reasoner; when an instance is closed (all its properties received) it is
compared against every previously closed instance in one vectorized pass, and
a synthesized similarity sentence ``<{new} <-> {closest}>.`` is emitted when
the best score clears the threshold.

Similarity between two instances is 1 minus the mean absolute gap of signed
strengths over the union of their base property names, where the signed
strength of p is f if [p] is held, 1-f if only [NOTp] is held, and 0.5 when
absent. Closing one instance among n with p properties costs O(n*p).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import narsese
from .encoder import NEGATION_PREFIX, PropertyJudgment
from .errors import NutsError
from .narsese import Copula, Sentence, Statement, TruthValue

ABSENT_STRENGTH = 0.5
DEFAULT_THRESHOLD = 0.5

#: Optional sink for dump-narsese style tracing: receives (tag, sentence) with
#: tag in {"input", "suppressed", "synth"}.
TraceFn = Callable[[str, Sentence], None]


class InstanceClosed(NutsError):
    """Instance already closed; its profile is immutable."""


class UnknownInstance(NutsError):
    pass


class EmptyProfile(NutsError):
    """Instance has no properties to compare."""


@dataclass
class InstanceRecord:
    id: str
    profile: dict[str, float] = field(default_factory=dict)  # property name -> frequency
    closed: bool = False


@dataclass(frozen=True)
class SimilarityResult:
    other: str
    score: float


@dataclass(frozen=True)
class CloseResult:
    match: SimilarityResult
    sentences: tuple[Sentence, ...]


def _base_name(name: str) -> str:
    if name.startswith(NEGATION_PREFIX) and len(name) > len(NEGATION_PREFIX):
        return name[len(NEGATION_PREFIX):]
    return name


def _signed_strength(profile: dict[str, float], base: str) -> float:
    f = profile.get(base)
    if f is not None:  # the positive form wins if both are somehow held
        return f
    nf = profile.get(NEGATION_PREFIX + base)
    if nf is not None:
        return 1.0 - nf
    return ABSENT_STRENGTH


def similarity(a: InstanceRecord, b: InstanceRecord) -> float:
    """Symmetric score in [0, 1]; 1 for identical profiles, 0 for a profile
    against its full NOT-mirror at full strength."""
    if not a.profile or not b.profile:
        raise EmptyProfile("similarity needs two non-empty profiles")
    names = {_base_name(n) for n in a.profile} | {_base_name(n) for n in b.profile}
    gap = 0.0
    for n in sorted(names):  # fixed order keeps float sums reproducible
        gap += abs(_signed_strength(a.profile, n) - _signed_strength(b.profile, n))
    return 1.0 - gap / len(names)


class Nalifier:
    """Single-writer per trial; distinct trials own independent instances."""

    def __init__(self, threshold: float = DEFAULT_THRESHOLD,
                 default_confidence: float = narsese.DEFAULT_CONFIDENCE,
                 trace: TraceFn | None = None):
        self.threshold = threshold
        self.default_confidence = default_confidence
        self.trace = trace
        self._records: dict[str, InstanceRecord] = {}
        self._vocab: dict[str, int] = {}  # base property name -> column
        self._closed_ids: list[str] = []
        self._strengths: list[np.ndarray] = []  # row i aligned to vocab at close time
        self._masks: list[np.ndarray] = []

    def record(self, instance_id: str) -> InstanceRecord:
        rec = self._records.get(instance_id)
        if rec is None:
            raise UnknownInstance(instance_id)
        return rec

    def clone(self) -> "Nalifier":
        """Copy for side-effect-free probing; closed rows are immutable and shared."""
        other = Nalifier(self.threshold, self.default_confidence, self.trace)
        other._records = {k: InstanceRecord(r.id, dict(r.profile), r.closed)
                          for k, r in self._records.items()}
        other._vocab = dict(self._vocab)
        other._closed_ids = list(self._closed_ids)
        other._strengths = list(self._strengths)
        other._masks = list(self._masks)
        return other

    def observe(self, j: PropertyJudgment) -> None:
        """Record one property; duplicates overwrite (last wins)."""
        rec = self._records.get(j.instance)
        if rec is None:
            rec = InstanceRecord(j.instance)
            self._records[j.instance] = rec
        if rec.closed:
            raise InstanceClosed(j.instance)
        rec.profile[j.property] = j.truth.frequency

    def close_instance(self, instance_id: str) -> CloseResult | None:
        """Finalize an instance and search the closed set for its nearest match.

        Raw property judgments are never forwarded: on a match only the
        synthesized similarity sentence comes out, otherwise nothing.
        """
        rec = self._records.get(instance_id)
        if rec is None:
            raise UnknownInstance(instance_id)
        if rec.closed:
            raise InstanceClosed(instance_id)
        if not rec.profile:
            raise EmptyProfile(instance_id)

        strengths, mask = self._vectorize(rec.profile)
        result = None
        if self._closed_ids:
            scores = self._scores_against_closed(strengths, mask)
            best = int(np.argmax(scores))  # first maximum: earliest close wins ties
            if scores[best] >= self.threshold:
                other = self._closed_ids[best]
                score = float(scores[best])
                stmt = Statement(narsese.instance(instance_id), Copula.SIMILARITY,
                                 narsese.instance(other))
                sent = narsese.judgment(stmt, TruthValue(score, self.default_confidence))
                result = CloseResult(SimilarityResult(other, score), (sent,))

        rec.closed = True
        self._closed_ids.append(instance_id)
        self._strengths.append(strengths)
        self._masks.append(mask)

        if self.trace is not None:
            for name, f in rec.profile.items():
                pj = PropertyJudgment(instance_id, name,
                                      TruthValue(f, self.default_confidence))
                self.trace("suppressed", pj.sentence())
            if result is not None:
                self.trace("synth", result.sentences[0])
        return result

    def _vectorize(self, profile: dict[str, float]) -> tuple[np.ndarray, np.ndarray]:
        for name in profile:
            base = _base_name(name)
            if base not in self._vocab:
                self._vocab[base] = len(self._vocab)
        arr = np.full(len(self._vocab), ABSENT_STRENGTH)
        mask = np.zeros(len(self._vocab), dtype=bool)
        for name, f in profile.items():  # positive forms first, mirroring _signed_strength
            if name == _base_name(name):
                i = self._vocab[name]
                arr[i] = f
                mask[i] = True
        for name, f in profile.items():
            base = _base_name(name)
            if name != base:
                i = self._vocab[base]
                if not mask[i]:
                    arr[i] = 1.0 - f
                    mask[i] = True
        return arr, mask

    def _scores_against_closed(self, strengths: np.ndarray, mask: np.ndarray) -> np.ndarray:
        n = len(self._closed_ids)
        width = len(self._vocab)
        matrix = np.full((n, width), ABSENT_STRENGTH)
        masks = np.zeros((n, width), dtype=bool)
        for r, (row, rmask) in enumerate(zip(self._strengths, self._masks)):
            matrix[r, :len(row)] = row  # older rows predate newer vocab columns
            masks[r, :len(rmask)] = rmask
        # columns held by neither side are 0.5 on both and contribute nothing
        gaps = np.abs(matrix - strengths).sum(axis=1)
        unions = (masks | mask).sum(axis=1)
        return 1.0 - gaps / unions
