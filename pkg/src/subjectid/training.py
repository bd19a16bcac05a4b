"""Corpus statistics: document and term frequencies, co-occurrence counts.

The model keeps raw counts only; IDF and mutual frequency are derived on
demand so that two models trained on disjoint corpora can be merged by
adding their counts.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

from .corpus import DEFAULT_TAGSET, Document, TagsetConfig, WordClass, classify

MODEL_VERSION = 1


class EmptyCorpus(ValueError):
    pass


class ModelFileError(ValueError):
    pass


class UnsupportedVersion(ModelFileError):
    pass


class CorruptModel(ModelFileError):
    pass


class IdfVariant(enum.Enum):
    PRINTED = "printed"  # log(P/O) / O
    CLASSIC = "classic"  # log(P/O)


class Window(enum.Enum):
    PARAGRAPH = "paragraph"
    DOCUMENT = "document"


def pair_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a <= b else (b, a)


def _frozen(mapping):
    return MappingProxyType(dict(sorted(mapping.items())))


@dataclass(frozen=True, eq=True)
class TrainedModel:
    doc_count: int
    doc_freq: Mapping[str, int]
    term_freq: Mapping[str, int]
    pair_count: Mapping[tuple[str, str], int]
    idf_variant: IdfVariant = IdfVariant.PRINTED
    window: Window = Window.PARAGRAPH
    tagset: TagsetConfig = DEFAULT_TAGSET

    def __post_init__(self):
        if self.doc_count < 1:
            raise ValueError("doc_count must be positive")
        for name in ("doc_freq", "term_freq", "pair_count"):
            value = getattr(self, name)
            if not isinstance(value, MappingProxyType):
                object.__setattr__(self, name, _frozen(value))

    __hash__ = None

    @property
    def tagset_digest(self) -> str:
        return self.tagset.digest()

    @property
    def vocabulary(self) -> list[str]:
        return list(self.term_freq)

    def idf(self, word: str) -> float:
        """Word importance.  Unseen words are treated as seen in one document."""
        occurrences = max(self.doc_freq.get(word, 0), 1)
        value = math.log(self.doc_count / occurrences)
        if self.idf_variant is IdfVariant.PRINTED:
            value /= occurrences
        return value

    def cooccurrence(self, a: str, b: str) -> int:
        if a == b:
            return 0
        return self.pair_count.get(pair_key(a, b), 0)

    def mf(self, a: str, b: str) -> float:
        """Mutual frequency f(a, b) / (f(a) * f(b))."""
        joint = self.cooccurrence(a, b)
        if not joint:
            return 0.0
        return joint / (self.term_freq[a] * self.term_freq[b])

    def merge(self, other: "TrainedModel") -> "TrainedModel":
        """Counts of the union of two disjoint training corpora."""
        if (self.idf_variant, self.window, self.tagset) != (
            other.idf_variant,
            other.window,
            other.tagset,
        ):
            raise ValueError("cannot merge models with different settings")
        return TrainedModel(
            doc_count=self.doc_count + other.doc_count,
            doc_freq=Counter(self.doc_freq) + Counter(other.doc_freq),
            term_freq=Counter(self.term_freq) + Counter(other.term_freq),
            pair_count=Counter(self.pair_count) + Counter(other.pair_count),
            idf_variant=self.idf_variant,
            window=self.window,
            tagset=self.tagset,
        )

    def with_variant(self, variant: IdfVariant) -> "TrainedModel":
        return TrainedModel(
            self.doc_count, self.doc_freq, self.term_freq, self.pair_count,
            variant, self.window, self.tagset,
        )


def idf(model: TrainedModel, word: str) -> float:
    return model.idf(word)


def mf(model: TrainedModel, a: str, b: str) -> float:
    return model.mf(a, b)


def _windows(doc: Document, window: Window):
    if window is Window.DOCUMENT:
        yield doc.tokens()
    else:
        for paragraph in doc.paragraphs:
            yield paragraph.tokens()


def count_document(doc: Document, config: TagsetConfig, window: Window):
    """Raw counts contributed by one document: (doc words, term counts, pair counts)."""
    terms: Counter = Counter()
    pairs: Counter = Counter()
    for tokens in _windows(doc, window):
        nouns, content = set(), set()
        for token in tokens:
            cls = classify(token, config)
            if cls is WordClass.OTHER:
                continue
            terms[token.surface] += 1
            content.add(token.surface)
            if cls is WordClass.NOUN:
                nouns.add(token.surface)
        # Noun-noun and noun-verb pairs, once per window.
        seen = set()
        for n in nouns:
            for w in content:
                if w != n:
                    seen.add(pair_key(n, w))
        pairs.update(seen)
    return set(terms), terms, pairs


def train(
    docs: Iterable[Document],
    config: TagsetConfig = DEFAULT_TAGSET,
    window: Window = Window.PARAGRAPH,
    idf_variant: IdfVariant = IdfVariant.PRINTED,
) -> TrainedModel:
    doc_count = 0
    doc_freq: Counter = Counter()
    term_freq: Counter = Counter()
    pair_count: Counter = Counter()
    for doc in docs:
        words, terms, pairs = count_document(doc, config, window)
        doc_count += 1
        doc_freq.update(words)
        term_freq.update(terms)
        pair_count.update(pairs)
    if doc_count == 0:
        raise EmptyCorpus("training corpus contains no documents")
    return TrainedModel(doc_count, doc_freq, term_freq, pair_count, idf_variant, window, config)


# -- persistence -----------------------------------------------------------


def _payload(model: TrainedModel, weights=None) -> dict:
    payload = {
        "version": MODEL_VERSION,
        "doc_count": model.doc_count,
        "idf_variant": model.idf_variant.value,
        "window": model.window.value,
        "tagset": model.tagset.to_dict(),
        "tagset_digest": model.tagset_digest,
        "doc_freq": dict(model.doc_freq),
        "term_freq": dict(model.term_freq),
        "pairs": [[a, b, n] for (a, b), n in sorted(model.pair_count.items())],
    }
    if weights is not None:
        payload["weights"] = weights.to_dict()
    return payload


def _checksum(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def dumps_model(model: TrainedModel, weights=None) -> str:
    payload = _payload(model, weights)
    payload["checksum"] = _checksum(payload)
    return json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=1) + "\n"


def save_model(model: TrainedModel, path, weights=None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_model(model, weights))


def loads_bundle(text: str):
    """Parse a model file; returns ``(model, weights_or_None)``."""
    from .interpolation import InterpolationWeights

    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptModel(f"model file is not valid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise CorruptModel("model file does not hold an object")
    version = payload.get("version")
    if version != MODEL_VERSION:
        raise UnsupportedVersion(f"model version {version!r} (supported: {MODEL_VERSION})")
    stored = payload.pop("checksum", None)
    if stored != _checksum(payload):
        raise CorruptModel("model checksum mismatch")
    try:
        tagset = TagsetConfig.from_dict(payload["tagset"])
        if tagset.digest() != payload["tagset_digest"]:
            raise CorruptModel("tagset digest mismatch")
        model = TrainedModel(
            doc_count=int(payload["doc_count"]),
            doc_freq=payload["doc_freq"],
            term_freq=payload["term_freq"],
            pair_count={pair_key(a, b): n for a, b, n in payload["pairs"]},
            idf_variant=IdfVariant(payload["idf_variant"]),
            window=Window(payload["window"]),
            tagset=tagset,
        )
        weights = None
        if "weights" in payload:
            weights = InterpolationWeights.from_dict(payload["weights"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelFileError):
            raise
        raise CorruptModel(f"malformed model payload: {exc}") from None
    return model, weights


def load_bundle(path):
    with open(path, encoding="utf-8") as fh:
        return loads_bundle(fh.read())


def load_model(path) -> TrainedModel:
    return load_bundle(path)[0]
