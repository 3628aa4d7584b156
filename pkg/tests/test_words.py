import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from lcsvar.words import (
    ModelParams,
    SeedSpec,
    as_word,
    sample_x_word,
    sample_y_word,
    strip_extra_letter,
    word_from_json,
    word_from_text,
    word_to_json,
    word_to_text,
)


def test_params_validation():
    with pytest.raises(ValueError, match="m >= 2"):
        ModelParams(1, 0.5)
    with pytest.raises(ValueError, match="0 < p < 1"):
        ModelParams(2, 1.2)
    with pytest.raises(ValueError, match="0 < p < 1"):
        ModelParams(2, 0.0)
    with pytest.raises(ValueError, match="integer"):
        ModelParams(2.5, 0.5)


def test_exact_thresholds():
    params = ModelParams(3, 0.25)
    assert params.x_thresholds().tolist() == [0.25, 0.5, 0.75]
    assert params.p_exact == pytest.approx(0.25)
    assert ModelParams(2, 1e-6).p_exact.denominator == 10**6


@pytest.mark.parametrize("sampler", [sample_x_word, sample_y_word])
def test_empty_words(sampler):
    w = sampler(ModelParams(2, 0.5), 0, SeedSpec(1))
    assert w.size == 0


def test_x_letter_frequencies():
    x = sample_x_word(ModelParams(2, 0.5), 10**5, SeedSpec(7))
    assert 0.49 <= np.mean(x == 2) <= 0.51
    x = sample_x_word(ModelParams(3, 0.25), 10**5, SeedSpec(8))
    for code in range(3):
        assert abs(np.mean(x == code) - 0.25) <= 0.005


def test_y_letter_frequencies():
    y = sample_y_word(ModelParams(2, 0.5), 10**5, SeedSpec(9))
    assert abs(np.mean(y == 0) - 0.5) <= 0.005
    y = sample_y_word(ModelParams(5, 0.5), 10**4, SeedSpec(9))
    assert y.max() <= 4


def test_strip_examples():
    sub, N = strip_extra_letter([0, 2, 1, 2], 2)
    assert sub.tolist() == [0, 1] and N == 2
    sub, N = strip_extra_letter([0, 1, 1], 2)
    assert sub.tolist() == [0, 1, 1] and N == 0


def test_extra_letter_count_binomial():
    params = ModelParams(2, 0.3)
    Ns = np.array([strip_extra_letter(sample_x_word(params, 100, SeedSpec(11, i)), 2)[1]
                   for i in range(20_000)])
    # 3 sigma on the mean of Binomial(100, 0.3)
    assert abs(Ns.mean() - 30) <= 3 * np.sqrt(21 / Ns.size)
    assert abs(Ns.var(ddof=1) - 21) <= 3 * 21 * np.sqrt(2 / Ns.size)


def test_stripped_word_is_uniform_given_length():
    params = ModelParams(2, 0.5)
    counts = {}
    for i in range(40_000):
        sub, _ = strip_extra_letter(sample_x_word(params, 6, SeedSpec(12, i)), 2)
        if sub.size == 3:
            key = int(sub @ np.array([4, 2, 1]))
            counts[key] = counts.get(key, 0) + 1
    observed = np.array([counts.get(k, 0) for k in range(8)])
    assert stats.chisquare(observed).pvalue > 1e-3


def test_seed_streams_reproducible_and_distinct():
    params = ModelParams(3, 0.4)
    a = sample_x_word(params, 50, SeedSpec(5, 3))
    b = sample_x_word(params, 50, SeedSpec(5, 3))
    c = sample_x_word(params, 50, SeedSpec(5, 4))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_seed_validation():
    with pytest.raises(ValueError):
        SeedSpec(-1)
    with pytest.raises(ValueError):
        SeedSpec(1, -2)


def test_as_word_checks():
    with pytest.raises(ValueError, match="Y-word"):
        as_word([0, 2], 2, y_word=True)
    assert as_word([0, 2], 2).tolist() == [0, 2]
    with pytest.raises(ValueError):
        as_word([0, 3], 2)
    with pytest.raises(ValueError):
        as_word([[0]])


@given(st.lists(st.integers(0, 35), max_size=40))
def test_serialization_roundtrip(letters):
    assert word_from_json(word_to_json(letters)).tolist() == letters
    assert word_from_text(word_to_text(letters)).tolist() == letters
