import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmcwrd.sequences import (
    PnSequence,
    canonical_code,
    cyclic_autocorrelation,
    cyclic_cross_correlation,
    generate_mls,
    pad_sequence,
)

GOLDEN_ACF = np.loadtxt("tests/goldens/padded_code_acf.csv", dtype=np.int64)

# Primitive tap sets for the property tests (standard PRBS polynomials).
PRIMITIVE_TAPS = {3: (3, 2), 4: (4, 3), 5: (5, 3), 6: (6, 5), 7: (7, 6), 8: (8, 6, 5, 4)}


def test_degree7_sign_counts():
    mls = generate_mls(7, (7, 6))
    assert mls.size == 127
    counts = sorted(((mls == 1).sum(), (mls == -1).sum()))
    assert counts == [63, 64]


def test_degree3_autocorrelation():
    mls = generate_mls(3, (3, 2))
    npt.assert_array_equal(cyclic_autocorrelation(mls), [7, -1, -1, -1, -1, -1, -1])


def test_zero_seed_rejected():
    with pytest.raises(ValueError, match="degenerate LFSR state"):
        generate_mls(7, (7, 6), seed=[0] * 7)


def test_non_primitive_taps_rejected():
    # x^4 + x^2 + 1 factors, so the register cycles early.
    with pytest.raises(ValueError, match="period below maximum"):
        generate_mls(4, (4, 2))


def test_bad_tap_range():
    with pytest.raises(ValueError, match="taps"):
        generate_mls(4, (5,))


def test_deterministic():
    a = generate_mls(7, (7, 6))
    b = generate_mls(7, (7, 6), seed=[1] * 7)
    npt.assert_array_equal(a, b)


@pytest.mark.parametrize("degree", sorted(PRIMITIVE_TAPS))
def test_full_period_all_degrees(degree):
    mls = generate_mls(degree, PRIMITIVE_TAPS[degree])
    n = 2**degree - 1
    assert mls.size == n
    acf = cyclic_autocorrelation(mls)
    assert acf[0] == n
    npt.assert_array_equal(acf[1:], -1)


def test_pad_sequence_basic():
    mls = generate_mls(7, (7, 6))
    code = pad_sequence(mls)
    assert code.n_total == 128
    assert code.mls_len == 127
    npt.assert_array_equal(code.chips[:127], mls)
    assert code.chips[127] == mls[0]
    assert np.all(np.abs(code.chips) == 1)


def test_pad_sequence_wrong_length():
    with pytest.raises(ValueError, match="wrong input length"):
        pad_sequence(np.ones(126, dtype=np.int64))


def test_pad_sequence_rejects_non_mls():
    with pytest.raises(ValueError, match="maximal-length"):
        pad_sequence(np.ones(127, dtype=np.int64))


def test_pnsequence_field_validation():
    mls = generate_mls(3, (3, 2))
    chips = np.concatenate([mls, mls[:1]])
    with pytest.raises(ValueError, match="n_total"):
        PnSequence(chips=chips, mls_len=7, n_total=9)
    with pytest.raises(ValueError, match="-1 or \\+1"):
        PnSequence(chips=np.array([1, -1, 2, 1, 1, -1, 1, 1]), mls_len=7, n_total=8)


def test_autocorrelation_zero_lag_is_length():
    code = canonical_code()
    acf = cyclic_autocorrelation(code.chips)
    assert acf[0] == 128


def test_padded_code_acf_matches_golden():
    acf = cyclic_autocorrelation(canonical_code().chips)
    npt.assert_array_equal(acf, GOLDEN_ACF)
    assert np.abs(acf[1:]).max() < 128


def test_autocorrelation_rejects_empty():
    with pytest.raises(ValueError, match="empty"):
        cyclic_autocorrelation(np.array([]))


def test_cross_correlation_shape_check():
    with pytest.raises(ValueError):
        cyclic_cross_correlation(np.ones(4), np.ones(5))


@settings(max_examples=30, deadline=None)
@given(
    degree=st.sampled_from(sorted(PRIMITIVE_TAPS)),
    shift=st.integers(min_value=0, max_value=254),
)
def test_shifted_copy_peaks_at_shift(degree, shift):
    mls = generate_mls(degree, PRIMITIVE_TAPS[degree])
    n = mls.size
    shift %= n
    shifted = np.roll(mls, shift)
    corr = cyclic_cross_correlation(mls, shifted)
    assert corr[shift] == n
    assert int(np.argmax(np.abs(corr))) == shift


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2**32 - 1))
def test_nonzero_random_seed_gives_mls(seed):
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=7)
    if not bits.any():
        bits[0] = 1
    mls = generate_mls(7, (7, 6), seed=bits)
    acf = cyclic_autocorrelation(mls)
    assert acf[0] == 127
    npt.assert_array_equal(acf[1:], -1)
