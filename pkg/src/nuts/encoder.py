"""Strength vectors to instance-property judgments, plus label sentences.

Weak signals are encoded by negating the property *name*: a strength v < 0.5
for property p becomes ``<{id} --> [NOTp]>. %1-v%``, so the reasoner can use
the absence of a feature as evidence. Every emitted frequency therefore lands
in [0.5, 1].
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import narsese
from .audio_frontend import FEATURE_DIM, N_FRAMES
from .errors import NutsError
from .narsese import Copula, Punctuation, Sentence, Statement, TruthValue

NEGATION_PREFIX = "NOT"


class StrengthOutOfRange(NutsError):
    """Strength values must be finite and within [0, 1]."""


class PropertyNaming(enum.Enum):
    """Property naming scheme, fixed per trial: raw MEL grid cells
    (mel<bin>x<frame>) or reduced dimensions (dim<k>)."""

    RAW_MEL = "mel"
    REDUCED_DIM = "dim"


def property_name(naming: PropertyNaming, index: int) -> str:
    if naming is PropertyNaming.RAW_MEL:
        return f"mel{index // N_FRAMES}x{index % N_FRAMES}"
    return f"dim{index}"


@dataclass(frozen=True)
class PropertyJudgment:
    """One ``<{instance} --> [property]>`` percept; the property name already
    carries the NOT prefix when the underlying strength was weak."""

    instance: str
    property: str
    truth: TruthValue

    def sentence(self) -> Sentence:
        stmt = Statement(narsese.instance(self.instance), Copula.INHERITANCE,
                         narsese.prop(self.property))
        return Sentence(stmt, Punctuation.JUDGMENT, self.truth)


def encode_instance(instance_id: str, strengths, naming: PropertyNaming,
                    default_confidence: float = narsese.DEFAULT_CONFIDENCE,
                    ) -> list[PropertyJudgment]:
    """One judgment per dimension, in index order.

    Strength v >= 0.5 keeps the property name with frequency v; v < 0.5 flips
    to the NOT-name with frequency 1 - v. Ties at exactly 0.5 stay positive.
    """
    narsese.instance(instance_id)  # validate the name early
    values = np.asarray(strengths, dtype=float)
    if values.ndim != 1:
        raise StrengthOutOfRange("strengths must be a flat vector")
    if not np.all(np.isfinite(values)) or (values.size and
                                           (values.min() < 0.0 or values.max() > 1.0)):
        raise StrengthOutOfRange("strength values must lie in [0, 1]")
    if naming is PropertyNaming.RAW_MEL and values.size != FEATURE_DIM:
        raise StrengthOutOfRange(
            f"raw MEL naming expects {FEATURE_DIM} values, got {values.size}")

    out = []
    for k, v in enumerate(values.tolist()):
        name = property_name(naming, k)
        if v >= 0.5:
            out.append(PropertyJudgment(instance_id, name,
                                        TruthValue(v, default_confidence)))
        else:
            out.append(PropertyJudgment(instance_id, NEGATION_PREFIX + name,
                                        TruthValue(1.0 - v, default_confidence)))
    return out


def label_judgment(instance_id: str, label: str,
                   default_confidence: float = narsese.DEFAULT_CONFIDENCE) -> Sentence:
    """Full-strength assertion ``<{id} --> label>.``"""
    stmt = Statement(narsese.instance(instance_id), Copula.INHERITANCE,
                     narsese.atom(label))
    return narsese.judgment(stmt, TruthValue(1.0, default_confidence))


def label_question(instance_id: str, label: str) -> Sentence:
    """Query ``<{id} --> label>?``"""
    stmt = Statement(narsese.instance(instance_id), Copula.INHERITANCE,
                     narsese.atom(label))
    return narsese.question(stmt)
