import itertools
import math
import sys

import pytest
from hypothesis import assume, given, settings, strategies as st

from subjectid.corpus import parse_document
from subjectid.interpolation import (
    InterpolationWeights,
    NoUsableSamples,
    StrengthSample,
    TooFewDocuments,
    collect_samples,
    estimate_weights,
    heldout_split,
    iterate,
    log_likelihood,
)
from subjectid.training import train


def S(snn, snv, noun="n"):
    return StrengthSample(noun, snn, snv)


def _grid_argmax(samples, steps=20001):
    """Brute-force maximizer of the mixture likelihood over a pv grid."""
    best = max(
        (k / (steps - 1) for k in range(steps)),
        key=lambda pv: sum(math.log((1 - pv) * s.snn + pv * s.snv) for s in samples),
    )
    return best


def test_symmetric_samples_fixed_point():
    w = estimate_weights([S(2, 2), S(0.5, 0.5), S(3, 3)])
    assert (w.pn, w.pv) == (0.5, 0.5)
    assert w.iterations == 1 and w.converged


def test_no_verb_evidence_gives_corner():
    w = estimate_weights([S(2, 0), S(1, 0), S(0, 0)])
    assert (w.pn, w.pv) == (1.0, 0.0)
    assert w.converged


def test_closed_form_mixture():
    samples = [S(2, 1), S(1, 3)]
    # (2 - pv)(1 + 2 pv) peaks at pv = 3/4
    assert _grid_argmax(samples) == pytest.approx(0.75, abs=1e-4)
    w = estimate_weights(samples)
    assert w.converged
    assert w.pn == pytest.approx(0.25, abs=1e-6)
    assert w.pv == pytest.approx(0.75, abs=1e-6)


def test_three_sample_against_grid_search():
    samples = [S(4, 1), S(1, 2), S(0.5, 3), S(2, 2)]
    w = estimate_weights(samples)
    assert w.pv == pytest.approx(_grid_argmax(samples), abs=1e-4)


def test_no_usable_samples():
    with pytest.raises(NoUsableSamples):
        estimate_weights([S(0, 0), S(0, 0)])
    with pytest.raises(NoUsableSamples):
        estimate_weights([])


def test_negative_strength_rejected():
    with pytest.raises(ValueError):
        S(-1, 0)


def test_max_iter_reached_flag():
    w = estimate_weights([S(2, 1), S(1, 3)], max_iter=3)
    assert w.iterations == 3 and not w.converged


def test_weights_validation():
    with pytest.raises(ValueError):
        InterpolationWeights(0.7, 0.7)
    assert InterpolationWeights.from_dict(InterpolationWeights(0.3, 0.7).to_dict()) == \
        InterpolationWeights(0.3, 0.7)


strength = st.floats(0, 100, allow_nan=False, allow_infinity=False)
sample_lists = st.lists(st.builds(S, strength, strength), min_size=1, max_size=12).filter(
    lambda xs: any(s.snn > 0 and s.snv > 0 for s in xs)
)


@settings(max_examples=100, deadline=None)
@given(sample_lists)
def test_weights_sum_to_one_every_iteration(samples):
    for pn, pv in itertools.islice(iterate(samples), 50):
        assert abs(pn + pv - 1) <= 1e-12
        assert 0 <= pn <= 1 and 0 <= pv <= 1


@settings(max_examples=100, deadline=None)
@given(sample_lists)
def test_likelihood_never_decreases(samples):
    previous = log_likelihood(samples, 0.5, 0.5)
    for pn, pv in itertools.islice(iterate(samples), 40):
        current = log_likelihood(samples, pn, pv)
        assert current >= previous - 1e-9 * max(1.0, abs(previous))
        previous = current


def _bisect_pv(samples):
    """Root of the likelihood slope in pv, or the corner it points to."""

    def slope(pv):
        return sum((s.snv - s.snn) / ((1 - pv) * s.snn + pv * s.snv) for s in samples)

    lo, hi = 0.0, 1.0
    if all(s.snv > 0 for s in samples) and slope(1.0) >= 0:
        return 1.0
    if all(s.snn > 0 for s in samples) and slope(0.0) <= 0:
        return 0.0
    for _ in range(200):
        mid = (lo + hi) / 2
        lo, hi = (mid, hi) if slope(mid) > 0 else (lo, mid)
    return (lo + hi) / 2


@pytest.mark.parametrize(
    "samples",
    [
        # maximum exactly at the corner with zero slope
        [S(1, 0), S(1, 0), S(33, 99)],
        # interior maximum just inside the corner
        [S(1, 0)] * 4 + [S(26, 27), S(49, 82.5), S(78, 97), S(18.75, 75.75)],
        [S(2, 1), S(1, 3)],
    ],
)
def test_converges_to_true_maximum_near_corner(samples):
    w = estimate_weights(samples)
    assert w.converged
    assert w.pv == pytest.approx(_bisect_pv(samples), abs=1e-9)


@settings(max_examples=200, deadline=None)
@given(sample_lists)
def test_fit_matches_slope_bisection(samples):
    samples = [s for s in samples if s.usable]
    assume(not all(s.snn == s.snv for s in samples))
    assume(all(x == 0 or x >= 1e-300 for s in samples for x in (s.snn, s.snv)))
    w = estimate_weights(samples)
    assert w.converged
    assert w.pv == pytest.approx(_bisect_pv(samples), abs=1e-9)


def _faithful(samples, k):
    # Scaling must not push a strength into the subnormal range, where the
    # product loses precision and is no longer the same sample.
    return all(x == 0 or abs(x * k) >= sys.float_info.min and abs(x) >= sys.float_info.min
               for s in samples for x in (s.snn, s.snv))


@settings(max_examples=100, deadline=None)
@given(sample_lists, st.floats(1e-3, 1e3))
def test_scale_invariance(samples, k):
    assume(_faithful(samples, k))
    scaled = [S(s.snn * k, s.snv * k) for s in samples]
    for (a, b), (c, d) in itertools.islice(zip(iterate(samples), iterate(scaled)), 30):
        assert a == pytest.approx(c, abs=1e-12)
        assert b == pytest.approx(d, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(sample_lists, st.integers(-8, 8))
def test_scale_invariance_exact_for_powers_of_two(samples, e):
    k = 2.0 ** e
    assume(_faithful(samples, k))
    scaled = [S(s.snn * k, s.snv * k) for s in samples]
    assert estimate_weights(samples) == estimate_weights(scaled)


@settings(max_examples=50, deadline=None)
@given(sample_lists)
def test_idempotent_at_fixed_point(samples):
    first = estimate_weights(samples, max_iter=5000)
    again = estimate_weights(samples, max_iter=5000, start=(first.pn, first.pv))
    assert again.pn == pytest.approx(first.pn, abs=first.tol * 10)


def _docs(n):
    return [parse_document(f"w{i}(Na) v(VC)") for i in range(n)]


def test_split_sizes_and_determinism():
    docs = _docs(10)
    fit, held = heldout_split(docs, 0.1, seed=7)
    assert (len(fit), len(held)) == (9, 1)
    assert heldout_split(docs, 0.1, seed=7) == (fit, held)
    assert set(map(id, fit)) | set(map(id, held)) == set(map(id, docs))
    fit2, held2 = heldout_split(docs, 0.3, seed=1)
    assert len(held2) == 3 and len(fit2) == 7


def test_split_keeps_both_sides():
    fit, held = heldout_split(_docs(2), 0.9, seed=0)
    assert len(fit) == 1 and len(held) == 1


def test_split_too_few():
    with pytest.raises(TooFewDocuments):
        heldout_split(_docs(1), 0.5, seed=0)
    with pytest.raises(ValueError):
        heldout_split(_docs(3), 1.0, seed=0)


def test_collect_samples_one_per_noun_type():
    corpus = [parse_document(t) for t in ["a(Na) v(VC) b(Na)", "a(Na) c(Na)", "d(Na)"]]
    model = train(corpus)
    held = [parse_document("a(Na) v(VC) a(Na) b(Na)"), parse_document("a(Na)")]
    samples = collect_samples(held, model)
    assert [s.noun for s in samples] == ["a", "b", "a"]
    assert samples[2].snn == samples[2].snv == 0
