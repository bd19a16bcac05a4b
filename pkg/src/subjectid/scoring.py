"""Subject scores for the nouns of one document.

Every noun and verb occurrence gets a cardinal number: its 1-based
position among the content words of its paragraph.  The strength of a
noun with another word is

    idf(noun) * idf(other) * mf(noun, other) / distance

where distance is the closest same-paragraph gap between the two words'
cardinals.  Summing over the other nouns gives ``snn``, over the verbs
``snv``, and the subject score is ``pn * snn + pv * snv``.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterator, Sequence

from .corpus import DEFAULT_TAGSET, Document, TagsetConfig, WordClass, classify

DEFAULT_TOP_FRACTION = 1 / 3


class CrossParagraph(ValueError):
    pass


class NoCommonParagraph(ValueError):
    pass


class UnknownNoun(KeyError):
    pass


class NoNouns(ValueError):
    pass


@dataclass(frozen=True)
class Occurrence:
    word: str
    word_class: WordClass
    paragraph: int
    cardinal: int


class CardinalIndex:
    """Cardinal numbers of every noun and verb occurrence of a document."""

    def __init__(self, occurrences: Sequence[Occurrence]):
        self.occurrences = tuple(occurrences)
        # (word, class) -> paragraph -> cardinals, all in reading order.
        self._positions: dict = defaultdict(lambda: defaultdict(list))
        for occ in self.occurrences:
            self._positions[occ.word, occ.word_class][occ.paragraph].append(occ.cardinal)

    def __len__(self):
        return len(self.occurrences)

    def __iter__(self) -> Iterator[Occurrence]:
        return iter(self.occurrences)

    def paragraph(self, i: int) -> list[Occurrence]:
        return [o for o in self.occurrences if o.paragraph == i]

    def words(self, word_class: WordClass) -> list[str]:
        """Distinct words of a class, sorted."""
        return sorted({w for w, c in self._positions if c is word_class})

    def positions(self, word: str, word_class: WordClass | None = None) -> dict[int, list[int]]:
        classes = [word_class] if word_class else [WordClass.NOUN, WordClass.VERB]
        merged: dict[int, list[int]] = defaultdict(list)
        for cls in classes:
            for par, cards in self._positions.get((word, cls), {}).items():
                merged[par].extend(cards)
        return dict(merged)


def assign_cardinals(doc: Document, config: TagsetConfig = DEFAULT_TAGSET) -> CardinalIndex:
    occurrences = []
    for p, paragraph in enumerate(doc.paragraphs):
        cardinal = 0
        for token in paragraph.tokens():
            cls = classify(token, config)
            if cls is WordClass.OTHER:
                continue
            cardinal += 1
            occurrences.append(Occurrence(token.surface, cls, p, cardinal))
    return CardinalIndex(occurrences)


build_index = assign_cardinals


def distance(index: CardinalIndex | None, a: Occurrence, b: Occurrence) -> int:
    if a.paragraph != b.paragraph:
        raise CrossParagraph(f"{a.word!r} and {b.word!r} are in different paragraphs")
    return abs(a.cardinal - b.cardinal)


def type_distance(
    index: CardinalIndex,
    word_a: str,
    word_b: str,
    class_a: WordClass | None = None,
    class_b: WordClass | None = None,
) -> int:
    """Smallest same-paragraph distance between any occurrences of two words.

    The optional classes restrict which occurrences count, so that a
    surface tagged both as noun and as verb is measured from the right
    occurrences.
    """
    pos_a = index.positions(word_a, class_a)
    pos_b = index.positions(word_b, class_b)
    best = None
    for par in pos_a.keys() & pos_b.keys():
        for ca in pos_a[par]:
            for cb in pos_b[par]:
                d = abs(ca - cb)
                if d and (best is None or d < best):
                    best = d
    if best is None:
        raise NoCommonParagraph(f"{word_a!r} and {word_b!r} share no paragraph")
    return best


def _strength(index, model, noun, others, other_class):
    idf_noun = model.idf(noun)
    terms = []
    for other in others:
        if other == noun:
            continue
        joint = model.mf(noun, other)
        if joint == 0:
            continue
        try:
            d = type_distance(index, noun, other, WordClass.NOUN, other_class)
        except NoCommonParagraph:
            continue
        terms.append(idf_noun * model.idf(other) * joint / d)
    return math.fsum(terms)


def _check_noun(index, noun):
    if not index.positions(noun, WordClass.NOUN):
        raise UnknownNoun(noun)


def snn(noun: str, index: CardinalIndex, model) -> float:
    """Strength of ``noun`` with the document's other nouns."""
    _check_noun(index, noun)
    return _strength(index, model, noun, index.words(WordClass.NOUN), WordClass.NOUN)


def snv(noun: str, index: CardinalIndex, model) -> float:
    """Strength of ``noun`` with the document's verbs."""
    _check_noun(index, noun)
    return _strength(index, model, noun, index.words(WordClass.VERB), WordClass.VERB)


def strengths(index: CardinalIndex, model) -> dict[str, tuple[float, float]]:
    """``noun -> (snn, snv)`` for every distinct noun of the document."""
    nouns = index.words(WordClass.NOUN)
    verbs = index.words(WordClass.VERB)
    return {
        n: (
            _strength(index, model, n, nouns, WordClass.NOUN),
            _strength(index, model, n, verbs, WordClass.VERB),
        )
        for n in nouns
    }


@dataclass(frozen=True)
class SubjectScore:
    noun: str
    snn: float
    snv: float
    ss: float

    def to_dict(self) -> dict:
        return {"noun": self.noun, "ss": self.ss, "snn": self.snn, "snv": self.snv}


@dataclass(frozen=True)
class SubjectRanking:
    scores: tuple[SubjectScore, ...]

    def __iter__(self):
        return iter(self.scores)

    def __len__(self):
        return len(self.scores)

    def __getitem__(self, i):
        return self.scores[i]

    @property
    def nouns(self) -> list[str]:
        return [s.noun for s in self.scores]


def rank(scores) -> SubjectRanking:
    return SubjectRanking(tuple(sorted(scores, key=lambda s: (-s.ss, s.noun))))


def score_document(
    doc: Document, model, weights, config: TagsetConfig | None = None
) -> SubjectRanking:
    """Rank every distinct noun of ``doc`` by subject score.

    ``weights`` only needs ``pn`` and ``pv`` attributes.  The tagset
    defaults to the one the model was trained with.
    """
    if config is None:
        config = getattr(model, "tagset", DEFAULT_TAGSET)
    index = assign_cardinals(doc, config)
    table = strengths(index, model)
    if not table:
        raise NoNouns("document contains no nouns")
    return rank(
        SubjectScore(n, a, b, weights.pn * a + weights.pv * b) for n, (a, b) in table.items()
    )


def select_top(ranking: SubjectRanking, fraction: float = DEFAULT_TOP_FRACTION) -> SubjectRanking:
    """Leading ``ceil(fraction * n)`` entries of a ranking."""
    if not 0 < fraction <= 1:
        raise ValueError("fraction must lie in (0, 1]")
    n = len(ranking)
    # Guard against float noise such as 0.1 * 30 = 3.0000000000000004.
    keep = max(1, math.ceil(fraction * n - 1e-9)) if n else 0
    return SubjectRanking(ranking.scores[:keep])


# -- output ----------------------------------------------------------------


def format_table(ranking: SubjectRanking, doc_id: str | None = None) -> str:
    lines = []
    if doc_id is not None:
        lines.append(f"# {doc_id}")
    lines.append(f"{'rank':>4}  {'noun':<12}  {'SS':>12}  {'SNN':>12}  {'SNV':>12}")
    for i, s in enumerate(ranking, start=1):
        lines.append(f"{i:>4}  {s.noun:<12}  {s.ss:>12.6g}  {s.snn:>12.6g}  {s.snv:>12.6g}")
    return "\n".join(lines)


def ranking_record(ranking: SubjectRanking, doc_id: str, weights) -> dict:
    return {
        "doc_id": doc_id,
        "weights": {"pn": weights.pn, "pv": weights.pv},
        "subjects": [s.to_dict() for s in ranking],
    }
