import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hodgelets.dictionary import basis_dictionary, standard_dictionary
from hodgelets.sparse import (
    NotConvergedError,
    SparseError,
    atoms_needed,
    curve_csv,
    log_epsilons,
    omp,
    sparsity_curve,
)


def hard_threshold_count(coef, eps, slack=1e-12):
    """Fewest largest-magnitude coefficients whose discarded energy is within eps**2."""
    energy = np.sort(coef**2)[::-1]
    tail = np.concatenate([np.cumsum(energy[::-1])[::-1], [0.0]])
    eps = max(eps, 1e-12 * np.sqrt(energy.sum()))
    return int(np.argmax(tail <= eps**2 * (1 + slack)))


def hard_threshold_range(coef, eps):
    """Counts allowed when eps**2 ties a tail energy to within rounding."""
    return hard_threshold_count(coef, eps, 1e-12), hard_threshold_count(coef, eps, -1e-12)


def test_single_atom_signal(rng):
    D = basis_dictionary(rng.normal(size=(6, 10)), "random")
    res = omp(D, 5 * D.atoms[:, 7], 0.0)
    assert res.support == [7]
    assert np.isclose(res.coefficients[0], 5)
    assert res.residual_norm <= 1e-12


def test_large_epsilon_gives_empty_support(rng):
    f = rng.normal(size=5)
    res = omp(standard_dictionary(5), f, np.linalg.norm(f))
    assert res.support == [] and np.allclose(res.approximation(standard_dictionary(5)), 0)


def test_recovers_three_standard_atoms():
    f = np.zeros(12)
    f[[2, 5, 9]] = [1.0, -2.0, 0.5]
    res = omp(standard_dictionary(12), f, 1e-12)
    assert sorted(res.support) == [2, 5, 9]


def test_zero_atoms_skipped():
    atoms = np.eye(3)
    atoms = np.hstack([np.zeros((3, 1)), atoms])
    res = omp(basis_dictionary(atoms, "padded"), np.array([1.0, 1.0, 1.0]), 0.0)
    assert 0 not in res.support and len(res.support) == 3


def test_ties_go_to_lowest_index():
    res = omp(standard_dictionary(4), np.array([0.0, 1.0, 1.0, 0.0]), 1.0)
    assert res.support == [1]


def test_errors(rng):
    with pytest.raises(SparseError):
        omp(standard_dictionary(3), np.zeros(4), 0.1)
    with pytest.raises(SparseError):
        omp(basis_dictionary(np.zeros((3, 2)), "zero"), np.ones(3), 0.1)
    with pytest.raises(NotConvergedError) as info:
        omp(standard_dictionary(5), rng.normal(size=5), 1e-9, max_atoms=2)
    assert len(info.value.result.support) == 2


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 64), st.integers(0, 2**31), st.floats(0.0, 1.0))
def test_orthonormal_dictionary_equals_hard_thresholding(n, seed, rel):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    D = basis_dictionary(Q, "orthonormal")
    f = rng.normal(size=n)
    eps = rel * np.linalg.norm(f)
    res = omp(D, f, eps)
    coef = Q.T @ f
    lo, hi = hard_threshold_range(coef, eps)
    assert lo <= len(res.support) <= hi
    # the chosen atoms are the largest coefficients
    chosen = np.abs(coef[res.support])
    others = np.delete(np.abs(coef), res.support)
    if len(chosen) and len(others):
        assert chosen.min() >= others.max() - 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 20), st.integers(0, 2**31))
def test_residual_decreases_and_is_orthogonal(n, seed):
    rng = np.random.default_rng(seed)
    D = basis_dictionary(rng.normal(size=(n, 3 * n)), "random")
    f = rng.normal(size=n)
    res = omp(D, f, 1e-6 * np.linalg.norm(f))
    path = np.array(res.path)
    assert (np.diff(path) < 0).all()
    r = f - res.approximation(D)
    A = D.atoms[:, res.support]
    assert np.abs(A.T @ r).max() <= 1e-10 * np.linalg.norm(f) * np.linalg.norm(A, axis=0).max()
    assert np.isclose(np.linalg.norm(r), res.residual_norm, rtol=1e-8, atol=1e-12)


def test_sparsity_curve_standard_basis(rng):
    f = np.zeros(30)
    f[rng.choice(30, 8, replace=False)] = rng.normal(size=8)
    eps = log_epsilons(15, 1e-3)
    rows = sparsity_curve({"standard": standard_dictionary(30)}, f, eps)
    for row in rows:
        assert row["standard"] == hard_threshold_count(f, row["epsilon_rel"] * np.linalg.norm(f))
    counts = [r["standard"] for r in rows]
    assert counts == sorted(counts, reverse=True)
    assert rows[-1]["epsilon_rel"] == 1.0 and rows[-1]["standard"] == 0


def test_sparsity_curve_validation(rng):
    with pytest.raises(SparseError):
        sparsity_curve({"s": standard_dictionary(3)}, rng.normal(size=3), [0.0, 0.5])


def test_atoms_needed():
    assert atoms_needed([3.0, 2.0, 0.5], 1.0) == 2
    with pytest.raises(SparseError):
        atoms_needed([3.0, 2.0], 1.0)


def test_curve_csv_header():
    text = curve_csv([{"epsilon_rel": 1.0, "fourier": 0, "linegraph_fourier": 0, "linegraph_wavelet": 0, "joint": 0, "separate": 0}])
    assert text.splitlines() == ["epsilon_rel,fourier,linegraph_fourier,linegraph_wavelet,joint,separate", "1.0,0,0,0,0,0"]
