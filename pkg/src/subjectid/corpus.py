"""Reader for Sinica-style POS-tagged text.

A file holds ``%% key=value`` metadata lines followed by a body with one
sentence per line.  Each token is written ``surface(TAG)`` and may carry
``[feature]`` suffixes, e.g. ``冒險(VA)[+nom]``.  A blank line closes a
paragraph.
"""

from __future__ import annotations

import enum
import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping


class ParseError(ValueError):
    """Raised when tagged text cannot be read."""

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None and line is not None:
            where = f"{source}:{line}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


class MalformedToken(ParseError):
    pass


class MalformedHeader(ParseError):
    pass


class EmptyDocument(ParseError):
    pass


class WordClass(enum.Enum):
    NOUN = "noun"
    VERB = "verb"
    OTHER = "other"


_TAG_RE = re.compile(r"[^()\s\[\]]+")


def _has_space(s):
    return any(c.isspace() for c in s)


@dataclass(frozen=True)
class Token:
    surface: str
    tag: str
    features: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.surface or not self.tag:
            raise ValueError("token surface and tag must be non-empty")
        if _has_space(self.surface) or not _TAG_RE.fullmatch(self.tag):
            raise ValueError(f"unwritable token {self.surface!r}/{self.tag!r}")
        for feat in self.features:
            if "[" in feat or "]" in feat or _has_space(feat):
                raise ValueError(f"bad feature {feat!r}")

    def __str__(self):
        return f"{self.surface}({self.tag})" + "".join(f"[{f}]" for f in self.features)


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]

    def __iter__(self):
        return iter(self.tokens)

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class Paragraph:
    sentences: tuple[Sentence, ...]

    def __post_init__(self):
        if not self.sentences:
            raise ValueError("paragraph must contain at least one sentence")

    def tokens(self) -> Iterator[Token]:
        for sentence in self.sentences:
            yield from sentence.tokens


@dataclass(frozen=True)
class Document:
    metadata: Mapping[str, str]
    paragraphs: tuple[Paragraph, ...]
    source_tag: str | None = None

    @property
    def sentences(self) -> list[Sentence]:
        return [s for p in self.paragraphs for s in p.sentences]

    def tokens(self) -> Iterator[Token]:
        for paragraph in self.paragraphs:
            yield from paragraph.tokens()

    def __eq__(self, other):
        if not isinstance(other, Document):
            return NotImplemented
        return (
            dict(self.metadata) == dict(other.metadata)
            and self.paragraphs == other.paragraphs
            and self.source_tag == other.source_tag
        )

    __hash__ = None


@dataclass(frozen=True)
class TagRule:
    """Tags matching any prefix or exact name, minus the exclusions."""

    prefixes: frozenset[str] = frozenset()
    exact: frozenset[str] = frozenset()
    exclude: frozenset[str] = frozenset()

    def matches(self, tag: str) -> bool:
        if tag in self.exclude:
            return False
        return tag in self.exact or any(tag.startswith(p) for p in self.prefixes)

    def to_dict(self) -> dict:
        return {
            "prefixes": sorted(self.prefixes),
            "exact": sorted(self.exact),
            "exclude": sorted(self.exclude),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "TagRule":
        unknown = set(data) - {"prefixes", "exact", "exclude"}
        if unknown:
            raise ValueError(f"unknown tag-rule keys: {sorted(unknown)}")
        return cls(
            prefixes=frozenset(data.get("prefixes", ())),
            exact=frozenset(data.get("exact", ())),
            exclude=frozenset(data.get("exclude", ())),
        )


@dataclass(frozen=True)
class TagsetConfig:
    noun: TagRule
    verb: TagRule

    def __post_init__(self):
        _check_disjoint(self.noun, self.verb)

    def to_dict(self) -> dict:
        return {"noun": self.noun.to_dict(), "verb": self.verb.to_dict()}

    @classmethod
    def from_dict(cls, data: Mapping) -> "TagsetConfig":
        if "noun" not in data or "verb" not in data:
            raise ValueError("tagset config needs both 'noun' and 'verb' sections")
        return cls(noun=TagRule.from_dict(data["noun"]), verb=TagRule.from_dict(data["verb"]))

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, ensure_ascii=False)
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def _check_disjoint(noun: TagRule, verb: TagRule):
    # A tag matched by both rule sets would make classification order-dependent.
    clashes = []
    for a in noun.prefixes:
        for b in verb.prefixes:
            if a.startswith(b) or b.startswith(a):
                clashes.append((a, b))
    for tag in noun.exact:
        if verb.matches(tag):
            clashes.append((tag, tag))
    for tag in verb.exact:
        if noun.matches(tag):
            clashes.append((tag, tag))
    if clashes:
        raise ValueError(f"noun and verb tag rules overlap: {sorted(clashes)}")


DEFAULT_TAGSET = TagsetConfig(
    noun=TagRule(
        prefixes=frozenset({"N"}),
        exclude=frozenset({"Neu", "Nes", "Nep", "Neqa", "Nf", "Ng", "Nh"}),
    ),
    verb=TagRule(prefixes=frozenset({"V"}), exclude=frozenset({"SHI"})),
)


def load_tagset(path) -> TagsetConfig:
    with open(path, encoding="utf-8") as fh:
        return TagsetConfig.from_dict(json.load(fh))


def classify(token: Token | str, config: TagsetConfig = DEFAULT_TAGSET) -> WordClass:
    """Map a token (or a bare tag) to its word class."""
    tag = token.tag if isinstance(token, Token) else token
    if "CATEGORY" in tag:
        return WordClass.OTHER
    if config.noun.matches(tag):
        return WordClass.NOUN
    if config.verb.matches(tag):
        return WordClass.VERB
    return WordClass.OTHER


# surface is lazy so "((PARENTHESISCATEGORY)" reads as surface "(".
# Optional blanks before the tag tolerate "◦ (PERIODCATEGORY)" as seen in
# PDF-extracted samples.
_TOKEN_RE = re.compile(
    r"(?P<surface>\S+?)[ \t]*\((?P<tag>[^()\s\[\]]+)\)(?P<feats>(?:\[[^\[\]\s]*\])*)(?=[ \t]|$)"
)
_FEATURE_RE = re.compile(r"\[([^\[\]]*)\]")
_INDEX_RE = re.compile(r"^\d+\.(?=[ \t]|$)")
_BLANK_RE = re.compile(r"[ \t]+")


def parse_line(line: str, lineno: int | None = None, source=None) -> Sentence:
    body = _INDEX_RE.sub("", line.strip(), count=1).strip()
    tokens = []
    pos = 0
    while pos < len(body):
        blank = _BLANK_RE.match(body, pos)
        if blank:
            pos = blank.end()
            continue
        m = _TOKEN_RE.match(body, pos)
        if m is None:
            chunk = body[pos:].split()[0]
            raise MalformedToken(f"token without a parenthesized tag: {chunk!r}", lineno, source)
        feats = tuple(_FEATURE_RE.findall(m.group("feats")))
        tokens.append(Token(m.group("surface"), m.group("tag"), feats))
        pos = m.end()
    return Sentence(tuple(tokens))


def parse_document(text: str, source_tag: str | None = None, source=None) -> Document:
    """Parse one tagged document.

    ``source`` is only used to label error messages.
    """
    metadata: dict[str, str] = {}
    paragraphs: list[Paragraph] = []
    current: list[Sentence] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("%%"):
            key, sep, value = line[2:].partition("=")
            if not sep or not key.strip():
                raise MalformedHeader(f"expected '%% key=value', got {line!r}", lineno, source)
            metadata[key.strip()] = value.strip()
            continue
        if not line:
            if current:
                paragraphs.append(Paragraph(tuple(current)))
                current = []
            continue
        current.append(parse_line(line, lineno, source))

    if current:
        paragraphs.append(Paragraph(tuple(current)))
    if not paragraphs:
        raise EmptyDocument("document has no body lines", None, source)
    return Document(metadata, tuple(paragraphs), source_tag)


def read_document(path, source_tag: str | None = None) -> Document:
    path = Path(path)
    return parse_document(path.read_text(encoding="utf-8"), source_tag=source_tag, source=str(path))


def serialize_document(doc: Document) -> str:
    lines = [f"%% {k}={v}" for k, v in doc.metadata.items()]
    for i, paragraph in enumerate(doc.paragraphs):
        if i:
            lines.append("")
        for sentence in paragraph.sentences:
            lines.append(" ".join(str(t) for t in sentence.tokens))
    return "\n".join(lines) + "\n"


def corpus_files(directory) -> list[Path]:
    """Regular, non-hidden files of a corpus directory in sorted order."""
    directory = Path(directory)
    return sorted(p for p in directory.iterdir() if p.is_file() and not p.name.startswith("."))


def read_corpus(directory) -> Iterable[Document]:
    for path in corpus_files(directory):
        yield read_document(path, source_tag=path.name)
