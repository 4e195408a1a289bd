"""Minimal non-axiomatic inference core.

Holds judgments in a capacity-bounded memory, revises truths when the same
statement arrives with disjoint evidence, derives inheritance conclusions
across similarity links (the analogy rule), and answers ground questions by
truth expectation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from .narsese import Copula, Punctuation, Sentence, Statement, TruthValue

#: Default AIKR capacity: maximum number of judgments held at once.
DEFAULT_CAPACITY = 1 << 16

# Evidence never reaches certainty; revision confidence saturates just below 1.
_MAX_CONFIDENCE = math.nextafter(1.0, 0.0)


def expectation(t: TruthValue) -> float:
    """Decision scalar c*(f-0.5)+0.5, used for choice and for eviction priority."""
    return t.confidence * (t.frequency - 0.5) + 0.5


def revise(t1: TruthValue, t2: TruthValue) -> TruthValue:
    """Merge two truths for the same statement backed by disjoint evidence.

    With evidence weights w_i = c_i/(1-c_i):
        f = (w1*f1 + w2*f2) / (w1 + w2)
        c = (w1 + w2) / (w1 + w2 + 1)
    """
    w1 = t1.confidence / (1.0 - t1.confidence)
    w2 = t2.confidence / (1.0 - t2.confidence)
    w = w1 + w2
    f = (w1 * t1.frequency + w2 * t2.frequency) / w
    c = w / (w + 1.0)
    return TruthValue(f, min(c, _MAX_CONFIDENCE))


def analogy(inh: TruthValue, sim: TruthValue) -> TruthValue:
    """<A --> P> plus <C <-> A> yields <C --> P> with
    f = f_inh * f_sim and c = c_inh * c_sim * f_sim."""
    return TruthValue(inh.frequency * sim.frequency,
                      inh.confidence * sim.confidence * sim.frequency)


@dataclass(frozen=True)
class Judgment:
    statement: Statement
    truth: TruthValue
    stamp: frozenset[int]

    @property
    def priority(self) -> float:
        return expectation(self.truth)


def choose(judgments: Iterable[Judgment]) -> Judgment | None:
    """Highest expectation wins; exact ties go to the earliest evidence id."""
    best = None
    best_key = None
    for j in judgments:
        key = (-expectation(j.truth), min(j.stamp))
        if best is None or key < best_key:
            best, best_key = j, key
    return best


class Memory:
    """Judgment store keyed by statement, bounded by an AIKR capacity limit.

    Input sentences get fresh serial numbers as evidence stamps; derived
    judgments union their parents' stamps. Revision only fires on disjoint
    stamps, so the same evidence is never counted twice.
    """

    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self._judgments: dict[Statement, Judgment] = {}
        self._next_serial = 1
        # (sim statement, inh statement, sim truth, inh truth) pairs already
        # expanded; a revision changes a truth and therefore re-enables the pair
        self._derived_seen: set[tuple] = set()

    def __len__(self) -> int:
        return len(self._judgments)

    def judgments(self) -> list[Judgment]:
        return list(self._judgments.values())

    def get(self, statement: Statement) -> Judgment | None:
        return self._judgments.get(statement)

    def clone(self) -> "Memory":
        """Cheap copy; judgments are immutable so containers are copied shallowly."""
        other = Memory(self.capacity)
        other._judgments = dict(self._judgments)
        other._next_serial = self._next_serial
        other._derived_seen = set(self._derived_seen)
        return other

    def assert_sentence(self, s: Sentence) -> Judgment:
        """Insert a judgment with a fresh evidence serial, revising on re-entry."""
        if s.punctuation is not Punctuation.JUDGMENT:
            raise ValueError("only judgments can be asserted")
        stamp = frozenset((self._next_serial,))
        self._next_serial += 1
        return self._insert(s.statement, s.truth, stamp)

    def _insert(self, statement: Statement, truth: TruthValue,
                stamp: frozenset[int]) -> Judgment:
        existing = self._judgments.get(statement)
        if existing is not None:
            if existing.stamp & stamp:
                return existing
            j = Judgment(statement, revise(existing.truth, truth),
                         existing.stamp | stamp)
            self._judgments[statement] = j
            return j
        j = Judgment(statement, truth, stamp)
        self._judgments[statement] = j
        self.enforce_capacity()
        return j

    def enforce_capacity(self, limit: int | None = None) -> None:
        """Evict lowest-expectation judgments (oldest evidence first on ties)
        until at most `limit` remain."""
        limit = self.capacity if limit is None else limit
        if limit < 1:
            raise ValueError("limit must be >= 1")
        while len(self._judgments) > limit:
            victim = min(self._judgments.values(),
                         key=lambda j: (expectation(j.truth), min(j.stamp)))
            del self._judgments[victim.statement]

    def derive(self) -> list[Judgment]:
        """One analogy pass over every (similarity, inheritance) pair sharing a
        term; conclusions are asserted with unioned stamps, subject to capacity.

        Already-expanded pairs are skipped: re-deriving them would hit the
        overlapping-stamp rule and change nothing.
        """
        snapshot = list(self._judgments.values())
        sims = []
        by_subject: dict = {}
        by_predicate: dict = {}
        for j in snapshot:
            if j.statement.copula is Copula.SIMILARITY:
                sims.append(j)
            else:
                by_subject.setdefault(j.statement.subject, []).append(j)
                by_predicate.setdefault(j.statement.predicate, []).append(j)

        new: list[Judgment] = []
        for sim in sims:
            st = sim.statement
            for shared, other in ((st.subject, st.predicate),
                                  (st.predicate, st.subject)):
                for inh in by_subject.get(shared, ()):
                    if inh.statement.predicate == other:
                        continue  # would conclude <x --> x>
                    conclusion = Statement(other, Copula.INHERITANCE,
                                           inh.statement.predicate)
                    j = self._derive_pair(sim, inh, conclusion)
                    if j is not None:
                        new.append(j)
                for inh in by_predicate.get(shared, ()):
                    if inh.statement.subject == other:
                        continue
                    conclusion = Statement(inh.statement.subject,
                                           Copula.INHERITANCE, other)
                    j = self._derive_pair(sim, inh, conclusion)
                    if j is not None:
                        new.append(j)
        return new

    def _derive_pair(self, sim: Judgment, inh: Judgment,
                     conclusion: Statement) -> Judgment | None:
        key = (sim.statement, inh.statement, sim.truth, inh.truth)
        if key in self._derived_seen:
            return None
        self._derived_seen.add(key)
        if sim.stamp & inh.stamp:
            return None
        truth = analogy(inh.truth, sim.truth)
        if truth.confidence <= 0.0:
            return None  # zero-strength similarity carries no conclusion
        before = self._judgments.get(conclusion)
        j = self._insert(conclusion, truth, sim.stamp | inh.stamp)
        return j if j is not before else None

    def answer(self, q: Sentence) -> Judgment | None:
        """Derive, then return the judgment matching the question's statement."""
        if q.punctuation is not Punctuation.QUESTION:
            raise ValueError("only questions can be answered")
        self.derive()
        return self._judgments.get(q.statement)
