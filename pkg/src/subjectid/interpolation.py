"""Mixture weights for the noun-noun and noun-verb strengths.

The weights are fitted on held-out nouns with the deleted-interpolation
update, which is EM for a two-component mixture with fixed component
values: each noun's strength is split between the two sources in
proportion to the current weights, and the weights are refitted to the
summed shares.  ``iterate`` yields the plain EM sequence;
``estimate_weights`` accelerates it.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

from .corpus import Document, TagsetConfig
from .scoring import build_index, strengths
from .training import TrainedModel

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 100


class NoUsableSamples(ValueError):
    pass


class TooFewDocuments(ValueError):
    pass


@dataclass(frozen=True)
class StrengthSample:
    noun: str
    snn: float
    snv: float

    def __post_init__(self):
        if self.snn < 0 or self.snv < 0:
            raise ValueError(f"negative strength for {self.noun!r}")

    @property
    def usable(self) -> bool:
        return self.snn > 0 or self.snv > 0


@dataclass(frozen=True)
class InterpolationWeights:
    pn: float
    pv: float
    iterations: int = 0
    converged: bool = True
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        if not (0.0 <= self.pn <= 1.0 and 0.0 <= self.pv <= 1.0):
            raise ValueError(f"weights out of range: {self.pn}, {self.pv}")
        if abs(self.pn + self.pv - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1: {self.pn} + {self.pv}")

    def to_dict(self) -> dict:
        return {
            "pn": self.pn,
            "pv": self.pv,
            "iterations": self.iterations,
            "converged": self.converged,
            "tol": self.tol,
        }

    @classmethod
    def from_dict(cls, data) -> "InterpolationWeights":
        return cls(
            pn=float(data["pn"]),
            pv=float(data["pv"]),
            iterations=int(data["iterations"]),
            converged=bool(data["converged"]),
            tol=float(data["tol"]),
        )


EQUAL_WEIGHTS = InterpolationWeights(0.5, 0.5, iterations=0, converged=False)


def _usable(samples: Sequence[StrengthSample]) -> list[StrengthSample]:
    kept = [s for s in samples if s.usable]
    if not kept:
        raise NoUsableSamples("every sample has zero noun and verb strength")
    return kept


def update(samples: Sequence[StrengthSample], pn: float, pv: float) -> tuple[float, float]:
    """One re-estimation step."""
    share_n, share_v = [], []
    for s in samples:
        # Rescale by the larger strength: the shares are unchanged, tiny
        # strengths cannot underflow, and scaling the inputs is exact.
        m = max(s.snn, s.snv)
        a, b = pn * (s.snn / m), pv * (s.snv / m)
        total = a + b
        if total == 0:
            continue
        share_n.append(a / total)
        share_v.append(b / total)
    sn, sv = math.fsum(share_n), math.fsum(share_v)
    if sn + sv == 0:
        raise NoUsableSamples("no sample has positive mixture probability")
    return sn / (sn + sv), sv / (sn + sv)


def iterate(samples, pn: float = 0.5, pv: float = 0.5) -> Iterator[tuple[float, float]]:
    """Endless sequence of re-estimated (pn, pv) pairs."""
    samples = _usable(samples)
    while True:
        pn, pv = update(samples, pn, pv)
        yield pn, pv


def _mixture_logs(samples, pn: float, pv: float) -> float:
    # Log-likelihood less the constant sum of log(max strength); free of
    # the strengths' overall scale.
    terms = []
    for s in samples:
        m = max(s.snn, s.snv)
        p = pn * (s.snn / m) + pv * (s.snv / m)
        if p <= 0:
            return -math.inf
        terms.append(math.log(p))
    return math.fsum(terms)


def log_likelihood(samples, pn: float, pv: float) -> float:
    samples = _usable(samples)
    rest = _mixture_logs(samples, pn, pv)
    if rest == -math.inf:
        return rest
    return math.fsum([rest] + [math.log(max(s.snn, s.snv)) for s in samples])


def _boundary_optimum(samples) -> tuple[float, float] | None:
    """The corner (1, 0) or (0, 1) when it maximizes the likelihood.

    The log-likelihood is concave in pn, so a corner is the maximum exactly
    when the slope there points outwards.  EM creeps towards such a corner
    ever more slowly, and a step-size test would stop well short of it.
    """
    samples = _usable(samples)
    if all(s.snn == s.snv for s in samples):
        return None  # flat likelihood: every weighting is optimal
    if all(s.snn > 0 for s in samples) and _outward([s.snv / s.snn for s in samples]):
        return 1.0, 0.0
    if all(s.snv > 0 for s in samples) and _outward([s.snn / s.snv for s in samples]):
        return 0.0, 1.0
    return None


def _outward(ratios) -> bool:
    # Slope at the corner is sum(1 - r); every term is at most 1, so a sum
    # that overflows is hugely negative.
    try:
        return math.fsum(1 - r for r in ratios) >= 0
    except OverflowError:
        return False


def estimate_weights(
    samples: Sequence[StrengthSample],
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    start: tuple[float, float] = (0.5, 0.5),
) -> InterpolationWeights:
    """Fit (pn, pv) on held-out samples.

    Pairs of EM updates are extrapolated with Aitken's delta-squared step,
    kept only when it stays in range and does not lower the likelihood.
    The fit stops once both the EM step and the extrapolation correction
    fall below ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    corner = _boundary_optimum(samples)
    if corner is not None:
        return InterpolationWeights(*corner, iterations=0, converged=True, tol=tol)
    samples = _usable(samples)
    pn, pv = start
    converged = False
    n = 0
    while n < max_iter:
        pn1, pv1 = update(samples, pn, pv)
        n += 1
        if (pn1, pv1) == (pn, pv):
            converged = True
            break
        if n >= max_iter:
            pn, pv = pn1, pv1
            break
        pn2, pv2 = update(samples, pn1, pv1)
        n += 1
        d1, d2 = pn1 - pn, pn2 - pn1
        pn, pv = pn2, pv2
        # Aitken extrapolation of the linearly converging EM sequence; the
        # correction is also the estimate of the remaining error.
        correction = d2 * d2 / (d2 - d1) if d1 != d2 else abs(d2)
        guess = pn2 - correction
        if d1 != d2 and 0 <= guess <= 1:
            base = _mixture_logs(samples, pn2, pv2)
            # near the maximum the likelihood is flat to rounding error
            if _mixture_logs(samples, guess, 1 - guess) >= base - 1e-13 * max(1.0, abs(base)):
                pn, pv = guess, 1 - guess
        if abs(d2) < tol and abs(correction) < tol:
            converged = True
            break
    return InterpolationWeights(pn, pv, iterations=n, converged=converged, tol=tol)


def heldout_split(docs: Sequence[Document], fraction: float, seed: int = 0):
    """Seeded split into (train_docs, heldout_docs); both keep input order."""
    if not 0 < fraction < 1:
        raise ValueError("held-out fraction must lie strictly between 0 and 1")
    docs = list(docs)
    if len(docs) < 2:
        raise TooFewDocuments(f"need at least 2 documents to hold some out, got {len(docs)}")
    n_held = min(len(docs) - 1, max(1, round(fraction * len(docs))))
    order = list(range(len(docs)))
    random.Random(seed).shuffle(order)
    held = set(order[:n_held])
    train_docs = [d for i, d in enumerate(docs) if i not in held]
    heldout_docs = [d for i, d in enumerate(docs) if i in held]
    return train_docs, heldout_docs


def collect_samples(
    docs: Sequence[Document], model: TrainedModel, config: TagsetConfig | None = None
) -> list[StrengthSample]:
    """One sample per noun type per document, scored against ``model``."""
    config = config or model.tagset
    samples = []
    for doc in docs:
        index = build_index(doc, config)
        for noun, (snn, snv) in strengths(index, model).items():
            samples.append(StrengthSample(noun, snn, snv))
    return samples
