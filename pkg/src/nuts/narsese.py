"""Parser and printer for the Narsese subset spoken by this pipeline.

Grammar (whitespace-tolerant between tokens):

    sentence ::= '<' term copula term '>' punctuation truth?
    term     ::= '{' name '}' | '[' name ']' | name
    copula   ::= '-->' | '<->'
    punct    ::= '.' | '?'
    truth    ::= '%' number (';' number)? '%'
    name     ::= [A-Za-z0-9_]+

``{name}`` is an instance term, ``[name]`` a property term, a bare name an
atomic predicate. Judgments (``.``) always carry a truth value: a missing
annotation means full-strength belief ``(1.0, default_confidence)`` and the
single-value form ``%f%`` gets the default confidence. Questions (``?``)
carry no truth annotation.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass

from .errors import NutsError

#: Confidence assumed for input judgments whose annotation omits it.
DEFAULT_CONFIDENCE = 0.9

_NAME_RE = re.compile(r"[A-Za-z0-9_]+")
_NUMBER_RE = re.compile(r"[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?")
_WS_RE = re.compile(r"\s*")


class NarseseError(NutsError):
    """Base class for Narsese construction and parsing errors."""


class NarseseSyntaxError(NarseseError):
    """Input text does not match the grammar."""

    def __init__(self, position: int, expected: str):
        super().__init__(f"at position {position}: expected {expected}")
        self.position = position
        self.expected = expected


class TruthOutOfRange(NarseseError):
    """Frequency or confidence outside its legal range."""


class InvalidTerm(NarseseError):
    """Term name empty or containing characters outside [A-Za-z0-9_]."""


class TermKind(enum.Enum):
    ATOM = "atom"
    INSTANCE = "instance"
    PROPERTY = "property"


@dataclass(frozen=True)
class Term:
    kind: TermKind
    name: str

    def __post_init__(self):
        if not _NAME_RE.fullmatch(self.name):
            raise InvalidTerm(f"bad term name {self.name!r}")

    def render(self) -> str:
        if self.kind is TermKind.INSTANCE:
            return "{%s}" % self.name
        if self.kind is TermKind.PROPERTY:
            return "[%s]" % self.name
        return self.name


def atom(name: str) -> Term:
    return Term(TermKind.ATOM, name)


def instance(name: str) -> Term:
    return Term(TermKind.INSTANCE, name)


def prop(name: str) -> Term:
    return Term(TermKind.PROPERTY, name)


class Copula(enum.Enum):
    INHERITANCE = "-->"
    SIMILARITY = "<->"


@dataclass(frozen=True)
class Statement:
    subject: Term
    copula: Copula
    predicate: Term

    def __post_init__(self):
        if self.copula is Copula.SIMILARITY and self.subject == self.predicate:
            raise NarseseError("similarity needs two distinct terms")

    def render(self) -> str:
        return f"<{self.subject.render()} {self.copula.value} {self.predicate.render()}>"


@dataclass(frozen=True)
class TruthValue:
    """(frequency, confidence) pair.

    Frequency lives in [0, 1]. Confidence lives in [0, 1): 1 would mean
    unrevisable certainty. Confidence 0 can only arise in derived dead-end
    conclusions (zero-strength analogy); the parser rejects it on input.
    """

    frequency: float
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.frequency <= 1.0:
            raise TruthOutOfRange(f"frequency {self.frequency!r} outside [0, 1]")
        if not 0.0 <= self.confidence < 1.0:
            raise TruthOutOfRange(f"confidence {self.confidence!r} outside [0, 1)")


class Punctuation(enum.Enum):
    JUDGMENT = "."
    QUESTION = "?"


@dataclass(frozen=True)
class Sentence:
    statement: Statement
    punctuation: Punctuation
    truth: TruthValue | None

    def __post_init__(self):
        if self.punctuation is Punctuation.QUESTION and self.truth is not None:
            raise NarseseError("questions carry no truth value")
        if self.punctuation is Punctuation.JUDGMENT and self.truth is None:
            raise NarseseError("judgments carry a truth value")


def judgment(statement: Statement, truth: TruthValue | None = None,
             default_confidence: float = DEFAULT_CONFIDENCE) -> Sentence:
    if truth is None:
        truth = TruthValue(1.0, default_confidence)
    return Sentence(statement, Punctuation.JUDGMENT, truth)


def question(statement: Statement) -> Sentence:
    return Sentence(statement, Punctuation.QUESTION, None)


class _Scanner:
    __slots__ = ("text", "pos")

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        self.pos = _WS_RE.match(self.text, self.pos).end()

    def take(self, literal: str) -> bool:
        if self.text.startswith(literal, self.pos):
            self.pos += len(literal)
            return True
        return False

    def expect(self, literal: str, expected: str):
        if not self.take(literal):
            raise NarseseSyntaxError(self.pos, expected)

    def regex(self, pattern: re.Pattern, expected: str) -> str:
        m = pattern.match(self.text, self.pos)
        if m is None:
            raise NarseseSyntaxError(self.pos, expected)
        self.pos = m.end()
        return m.group()


def _parse_term(sc: _Scanner) -> Term:
    sc.skip_ws()
    if sc.take("{"):
        sc.skip_ws()
        name = sc.regex(_NAME_RE, "term name")
        sc.skip_ws()
        sc.expect("}", "'}'")
        return instance(name)
    if sc.take("["):
        sc.skip_ws()
        name = sc.regex(_NAME_RE, "term name")
        sc.skip_ws()
        sc.expect("]", "']'")
        return prop(name)
    return atom(sc.regex(_NAME_RE, "term name"))


def _parse_number(sc: _Scanner) -> float:
    sc.skip_ws()
    return float(sc.regex(_NUMBER_RE, "number"))


def parse(text: str, default_confidence: float = DEFAULT_CONFIDENCE) -> Sentence:
    """Parse one sentence. Raises NarseseSyntaxError / TruthOutOfRange, never
    anything else, for arbitrary input strings."""
    sc = _Scanner(text)
    sc.skip_ws()
    stmt_pos = sc.pos
    sc.expect("<", "'<'")
    subject = _parse_term(sc)
    sc.skip_ws()
    if sc.take("-->"):
        copula = Copula.INHERITANCE
    elif sc.take("<->"):
        copula = Copula.SIMILARITY
    else:
        raise NarseseSyntaxError(sc.pos, "'-->' or '<->'")
    predicate = _parse_term(sc)
    sc.skip_ws()
    sc.expect(">", "'>'")
    if copula is Copula.SIMILARITY and subject == predicate:
        raise NarseseSyntaxError(stmt_pos, "two distinct terms for similarity")
    statement = Statement(subject, copula, predicate)

    sc.skip_ws()
    if sc.take("."):
        punctuation = Punctuation.JUDGMENT
    elif sc.take("?"):
        punctuation = Punctuation.QUESTION
    else:
        raise NarseseSyntaxError(sc.pos, "'.' or '?'")

    sc.skip_ws()
    truth = None
    if sc.text.startswith("%", sc.pos):
        if punctuation is Punctuation.QUESTION:
            raise NarseseSyntaxError(sc.pos, "end of input (questions carry no truth)")
        sc.take("%")
        f = _parse_number(sc)
        sc.skip_ws()
        c = default_confidence
        if sc.take(";"):
            c = _parse_number(sc)
            sc.skip_ws()
        sc.expect("%", "'%'")
        if not 0.0 <= f <= 1.0:
            raise TruthOutOfRange(f"frequency {f!r} outside [0, 1]")
        if not 0.0 < c < 1.0:
            raise TruthOutOfRange(f"confidence {c!r} outside (0, 1)")
        truth = TruthValue(f, c)

    sc.skip_ws()
    if sc.pos != len(sc.text):
        raise NarseseSyntaxError(sc.pos, "end of input")
    if punctuation is Punctuation.JUDGMENT and truth is None:
        truth = TruthValue(1.0, default_confidence)
    return Sentence(statement, punctuation, truth)


def _fmt(x: float) -> str:
    # repr gives the shortest string that round-trips the float exactly
    return repr(float(x))


def render(s: Sentence, default_confidence: float = DEFAULT_CONFIDENCE) -> str:
    """Canonical single-space form; parse(render(s)) == s."""
    core = s.statement.render() + s.punctuation.value
    if s.punctuation is Punctuation.QUESTION:
        return core
    t = s.truth
    if t.frequency == 1.0 and t.confidence == default_confidence:
        return core
    if t.confidence == default_confidence:
        return f"{core} %{_fmt(t.frequency)}%"
    return f"{core} %{_fmt(t.frequency)};{_fmt(t.confidence)}%"
