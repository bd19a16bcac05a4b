"""Rank the nouns of POS-tagged documents as candidate subjects."""

from .corpus import (
    DEFAULT_TAGSET,
    Document,
    EmptyDocument,
    MalformedToken,
    Paragraph,
    ParseError,
    Sentence,
    TagRule,
    TagsetConfig,
    Token,
    WordClass,
    classify,
    load_tagset,
    parse_document,
    read_document,
    serialize_document,
)
from .evaluation import (
    ReaderAnnotations,
    count_stats,
    overlap_histogram,
    repetition_histogram,
)
from .interpolation import (
    InterpolationWeights,
    StrengthSample,
    estimate_weights,
    heldout_split,
)
from .scoring import (
    SubjectRanking,
    SubjectScore,
    assign_cardinals,
    distance,
    score_document,
    select_top,
    snn,
    snv,
    type_distance,
)
from .training import (
    IdfVariant,
    TrainedModel,
    Window,
    idf,
    load_model,
    mf,
    save_model,
    train,
)

__version__ = "0.1.0"
