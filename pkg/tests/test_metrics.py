import numpy as np
import numpy.testing as npt
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmcwrd.metrics import isl, mse, normalize_peak, peak_doppler_bin, psl, report
from pmcwrd.rd import RdMap
from pmcwrd.sequences import cyclic_autocorrelation, generate_mls


def _column_map(values):
    return RdMap(data=np.asarray(values, dtype=complex)[:, None])


@pytest.fixture(scope="module")
def ideal_mls_map():
    acf = cyclic_autocorrelation(generate_mls(7, (7, 6))).astype(float)
    return normalize_peak(_column_map(acf))


class TestNormalize:
    def test_single_element(self):
        out = normalize_peak(_column_map([5.0]))
        assert np.abs(out.data[0, 0]) == 1.0
        assert out.normalized

    def test_unit_peak_unchanged(self):
        data = np.array([[1.0, 0.25], [0.5j, 0.1]])
        out = normalize_peak(RdMap(data=data))
        npt.assert_array_equal(out.data, data)

    def test_random_map_peak_one(self, rng):
        data = rng.standard_normal((16, 8)) + 1j * rng.standard_normal((16, 8))
        out = normalize_peak(RdMap(data=data))
        assert np.max(np.abs(out.data)) == pytest.approx(1.0, rel=1e-12)

    def test_all_zero_rejected(self):
        with pytest.raises(ValueError, match="degenerate map"):
            normalize_peak(RdMap(data=np.zeros((4, 4), dtype=complex)))


class TestMse:
    def test_identical_maps_zero(self, rng):
        data = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
        a = normalize_peak(RdMap(data=data))
        assert mse(a, a) == 0.0

    def test_single_cell_flip(self):
        n, m = 8, 4
        base = np.zeros((n, m))
        base[2, 1] = 1.0
        a = normalize_peak(RdMap(data=base.astype(complex)))
        flipped = base.copy()
        flipped[5, 3] = 1.0
        b = normalize_peak(RdMap(data=flipped.astype(complex)))
        assert mse(a, b) == pytest.approx(1.0 / (n * m))

    def test_symmetry_and_nonnegativity(self, rng):
        x = normalize_peak(RdMap(data=rng.standard_normal((6, 6)) + 0j))
        y = normalize_peak(RdMap(data=rng.standard_normal((6, 6)) + 0j))
        assert mse(x, y) == mse(y, x) >= 0.0

    def test_dimension_mismatch(self):
        a = normalize_peak(RdMap(data=np.ones((4, 4), dtype=complex)))
        b = normalize_peak(RdMap(data=np.ones((4, 5), dtype=complex)))
        with pytest.raises(ValueError, match="dimension mismatch"):
            mse(a, b)

    def test_requires_normalized(self):
        a = RdMap(data=np.ones((4, 4), dtype=complex))
        with pytest.raises(ValueError, match="normalized"):
            mse(a, a)


class TestPsl:
    def test_simple_column(self):
        col = np.zeros(16)
        col[0], col[1], col[2] = 1.0, 0.1, 0.01
        value, r_hat = psl(normalize_peak(_column_map(col)), doppler_bin=0, guard=0)
        assert value == pytest.approx(-20.0)
        assert r_hat == 0

    def test_ideal_mls(self, ideal_mls_map):
        value, r_hat = psl(ideal_mls_map, doppler_bin=0)
        assert value == pytest.approx(20 * np.log10(1 / 127), abs=1e-9)
        assert r_hat == 0

    def test_zero_column_rejected(self):
        data = np.zeros((4, 2), dtype=complex)
        data[1, 0] = 1.0
        with pytest.raises(ValueError, match="degenerate column"):
            psl(normalize_peak(RdMap(data=data)), doppler_bin=1)

    def test_guard_monotone_nonincreasing(self, rng):
        col = np.abs(rng.standard_normal(32)) + 0.01
        m = normalize_peak(_column_map(col))
        values = [psl(m, doppler_bin=0, guard=g)[0] for g in range(6)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_default_bin_is_global_peak(self, rng):
        data = 0.01 * (rng.standard_normal((16, 8)) + 1j * rng.standard_normal((16, 8)))
        data[11, 5] = 2.0
        m = normalize_peak(RdMap(data=data))
        assert peak_doppler_bin(m) == 5
        _, r_hat = psl(m)
        assert r_hat == 11


class TestIsl:
    def test_simple_column(self):
        col = np.zeros(16)
        col[0], col[1], col[2] = 1.0, 0.1, 0.1
        value = isl(normalize_peak(_column_map(col)), doppler_bin=0)
        assert value == pytest.approx(20 * np.log10(0.02), abs=1e-9)

    def test_ideal_mls(self, ideal_mls_map):
        value = isl(ideal_mls_map, doppler_bin=0)
        assert value == pytest.approx(20 * np.log10(126 / 127**2), abs=1e-9)

    def test_conventional_prefactor(self, ideal_mls_map):
        paper_form = isl(ideal_mls_map, doppler_bin=0)
        conventional = isl(ideal_mls_map, doppler_bin=0, conventional_prefactor=True)
        assert conventional == pytest.approx(paper_form / 2)

    def test_zero_sidelobes_negative_infinity(self):
        col = np.zeros(8)
        col[3] = 1.0
        value = isl(normalize_peak(_column_map(col)), doppler_bin=0)
        assert value == float("-inf")


class TestScaleInvariance:
    @settings(max_examples=20, deadline=None)
    @given(
        re=st.floats(min_value=-100, max_value=100),
        im=st.floats(min_value=-100, max_value=100),
    )
    def test_metrics_invariant_under_complex_scale(self, re, im):
        c = complex(re, im)
        if abs(c) < 1e-6:
            c = 1.0 + 1.0j
        rng = np.random.default_rng(7)
        data = rng.standard_normal((16, 4)) + 1j * rng.standard_normal((16, 4))
        a = normalize_peak(RdMap(data=data))
        b = normalize_peak(RdMap(data=c * data))
        p_a, r_a = psl(a, doppler_bin=2)
        p_b, r_b = psl(b, doppler_bin=2)
        assert r_a == r_b
        assert p_a == pytest.approx(p_b, abs=1e-9)
        assert isl(a, doppler_bin=2) == pytest.approx(isl(b, doppler_bin=2), abs=1e-9)
        assert mse(a, b) == pytest.approx(0.0, abs=1e-12)


def test_report_fields(rng):
    data = 0.02 * (rng.standard_normal((32, 8)) + 1j * rng.standard_normal((32, 8)))
    data[9, 3] = 1.5
    vmap = normalize_peak(RdMap(data=data))
    rep = report(vmap, vmap)
    assert rep.mse == 0.0
    assert rep.doppler_bin == 3
    assert rep.peak_range_bin == 9
    assert rep.psl_db <= 0.0
    text = rep.to_kv()
    assert "psl_db = " in text and "mse = 0.0" in text
