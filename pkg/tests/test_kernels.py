import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgelets.kernels import (
    FunctionBank,
    HannBank,
    KernelError,
    UncoveredEigenvalueError,
    hann,
    hann_bank,
    normalize_on_spectrum,
)


def test_hann_window():
    assert hann(0.0) == 1.0
    assert hann(0.5) == 0.0 and hann(-0.6) == 0.0
    assert np.isclose(hann(0.25), 0.5)


def test_cos4_identity():
    # three windows at thirds of a period: sum of squares is 9/8
    u = np.linspace(-0.5, 0.5, 101)
    total = sum(np.cos(np.pi * (u - k / 3)) ** 4 for k in range(3))
    assert np.allclose(total, 9 / 8)


def test_dc_plateau():
    bank = HannBank(10.0, 6, 3, 0.1)
    v = bank.evaluate(0.0)
    assert np.isclose(v[0], np.sqrt(9 / 8))
    assert not v[1:].any()
    assert np.allclose(bank.evaluate(0.05), v)  # below the floor


def test_value_one_at_centres():
    bank = HannBank(10.0, 6, 3, 0.1)
    lam = bank.lam_floor * np.exp(bank.centers)
    vals = bank.evaluate(lam)
    assert np.allclose(vals[1:][np.arange(5), np.arange(5)], 1.0)


@pytest.mark.parametrize("R", [3, 4, 5])
@pytest.mark.parametrize("M", [2, 3, 4, 16])
def test_raw_bank_is_constant(R, M):
    bank = HannBank(7.0, M, R, 0.02)
    lam = np.concatenate([[0.0], np.geomspace(1e-4, 7.0, 10_000)])
    assert np.allclose(bank.g_sum(lam), 3 * R / 8, atol=1e-9)


def test_outside_support_is_zero():
    bank = FunctionBank([lambda x: (x < 1) * 1.0, lambda x: ((x >= 1) & (x < 2)) * 1.0])
    assert not bank.evaluate(5.0).any()
    assert bank.g_sum(5.0) == 0.0


def test_manual_bank_values():
    bank = FunctionBank([lambda x: np.ones_like(x), lambda x: x])
    assert np.allclose(bank.evaluate(3.0), [1, 3])
    assert bank.g_sum(3.0) == 10.0


def test_negative_lambda_rejected():
    with pytest.raises(KernelError):
        HannBank(1.0, 3).evaluate(-1e-3)


def test_construction_errors():
    with pytest.raises(KernelError):
        HannBank(0.0, 4)
    with pytest.raises(KernelError):
        HannBank(1.0, 1)


def test_floor_from_spectrum_and_fallback():
    assert hann_bank(4.0, 4, 3, [0, 0.5, 4]).lam_floor == 0.5
    assert np.isclose(hann_bank(4.0, 4, 3, [0, 0]).lam_floor, 4e-4)
    assert np.isclose(hann_bank(4.0, 4).lam_floor, 4e-4)


def test_normalize_constant_bank_is_identity():
    bank = HannBank(5.0, 4, 3, 0.5)
    spec = [0, 0.5, 1.3, 2.2, 5.0]
    norm = normalize_on_spectrum(bank, spec)
    assert np.allclose(norm.evaluate(np.array(spec)), bank.evaluate(np.array(spec)))


def test_normalize_manual_bank():
    bank = FunctionBank([lambda x: np.ones_like(x), lambda x: x], target=9 / 8)
    norm = normalize_on_spectrum(bank, [0.0, 3.0])
    s = norm.normalization[2]
    assert np.allclose(s, [np.sqrt(9 / 8), np.sqrt(9 / 80)])
    assert np.allclose(norm.g_sum(np.array([0.0, 3.0])), 9 / 8)
    # between eigenvalues the bank is unscaled
    assert np.isclose(norm.g_sum(1.5), 1 + 1.5**2)


def test_normalize_uncovered():
    with pytest.raises(UncoveredEigenvalueError):
        normalize_on_spectrum(FunctionBank([lambda x: x]), [0.0, 1.0])


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(0.0, 50.0), min_size=1, max_size=30),
    st.integers(2, 10),
    st.integers(3, 6),
)
def test_normalized_bank_is_tight_on_spectrum(lam, M, R):
    lam = np.array(lam)
    lam_max = max(float(lam.max()), 1e-3)
    bank = normalize_on_spectrum(hann_bank(lam_max, M, R, lam), lam)
    assert np.abs(bank.g_sum(lam) - bank.target).max() <= 1e-9 * bank.target
    assert (bank.evaluate(lam) >= 0).all()


@settings(max_examples=40, deadline=None)
@given(st.floats(1e-3, 1e3), st.integers(2, 12), st.integers(2, 6), st.floats(0, 2e3))
def test_values_nonnegative_and_bounded(lam_max, M, R, x):
    bank = HannBank(lam_max, M, R)
    v = bank.evaluate(x)
    # each band-pass value is a Hann sample; the low-pass is a root-sum-of-squares of at most R - 1 of them
    assert (v >= 0).all() and (v[1:] <= 1).all() and v[0] <= np.sqrt(max(R - 1, 1)) + 1e-12


def test_json_roundtrip():
    bank = normalize_on_spectrum(HannBank(5.0, 4, 3, 0.5), [0, 0.5, 2.0, 5.0])
    again = HannBank.from_dict(json.loads(bank.to_json()))
    lam = np.array([0, 0.5, 1.0, 2.0, 5.0])
    assert np.array_equal(again.evaluate(lam), bank.evaluate(lam))
