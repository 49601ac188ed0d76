import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from locdisc.blocks import (ParamVector, SpinLabel, assemble_block, assemble_blocks,
                            coupled_vectors, degeneracy, delta_coeff, m_values, mmap, n_params,
                            partial_transpose, permutation_orbits_check, project_block,
                            random_params, reconstruct_dense, sigma_block, sigma_blocks,
                            sigma_dense, spins, wigner_d)
from locdisc.errors import DomainError, ResourceError
from locdisc.qubit import make_pair

pairs = st.builds(make_pair, st.floats(0, 0.999), st.floats(0, 0.999), st.floats(0, math.pi))


def test_spin_label_validation():
    assert SpinLabel(3, -1).m == -0.5
    with pytest.raises(DomainError):
        SpinLabel(2, 1)
    with pytest.raises(DomainError):
        SpinLabel(2, 4)


@pytest.mark.parametrize("n", range(1, 41))
def test_completeness_exact(n):
    assert sum(degeneracy(n, tj) * (tj + 1) for tj in spins(n)) == 2 ** n


def test_degeneracy_examples():
    assert degeneracy(2, 0) == 1 and degeneracy(2, 2) == 1
    assert degeneracy(3, 1) == 2
    assert degeneracy(4, 0) == 2


@pytest.mark.parametrize("n", [1, 2, 7, 35])
def test_param_count(n):
    assert n_params(n) == (n + 1) * (n + 2) // 2
    assert mmap(n, n).shape == (n + 1, n + 1, n_params(n))


def test_param_vector_validation():
    with pytest.raises(DomainError):
        ParamVector(2, np.zeros(5))
    with pytest.raises(DomainError):
        ParamVector(1, np.array([0.0, np.nan, 1.0]))
    x = ParamVector.from_function(3, lambda q, r: 10 * q + r)
    assert x[2, 1] == 21
    with pytest.raises(IndexError):
        x[1, 2]


@pytest.mark.parametrize("n", range(1, 7))
def test_identity_params_give_identity_blocks(n):
    for tj, block in assemble_blocks(ParamVector.identity(n)).items():
        assert np.allclose(block, np.eye(tj + 1), atol=1e-12)


@pytest.mark.parametrize("n", range(1, 7))
def test_assemble_block_matches_dense_projection(n):
    rng = np.random.default_rng(n)
    for _ in range(5):
        x = random_params(n, rng)
        dense = reconstruct_dense(x)
        for tj in spins(n):
            assert np.max(np.abs(assemble_block(x, tj) - project_block(dense, n, tj))) < 1e-10


@pytest.mark.parametrize("n", range(1, 7))
def test_sigma_block_matches_dense_projection(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(5):
        p = make_pair(*rng.uniform(0, 1, 2), rng.uniform(0, math.pi))
        for which in (0, 1):
            dense = sigma_dense(p, which, n)
            for tj in spins(n):
                ref = project_block(dense, n, tj)
                assert np.max(np.abs(sigma_block(p, which, n, tj) - ref)) < 1e-10


@pytest.mark.parametrize("n", range(1, 7))
def test_coupled_vectors_orthonormal(n):
    cols = np.hstack([coupled_vectors(n, tj) for tj in spins(n)])
    gram = cols.T @ cols
    assert np.allclose(gram, np.eye(gram.shape[0]), atol=1e-12)


@pytest.mark.parametrize("n", range(1, 7))
def test_reconstruction_is_pt_and_permutation_invariant(n):
    x = random_params(n, np.random.default_rng(7))
    dense = reconstruct_dense(x)
    assert permutation_orbits_check(dense, n)
    for size in range(n + 1):
        assert np.array_equal(partial_transpose(dense, n, range(size)), dense)


@given(pairs, st.integers(1, 40))
def test_sigma_trace_is_one(pair, n):
    blocks = sigma_blocks(pair, 0, n)
    assert blocks.trace() == pytest.approx(1.0, abs=1e-12)


def test_sigma_examples():
    mixed = make_pair(0.0, 0.0, 1.0)
    assert np.allclose(sigma_block(mixed, 0, 3, 3), np.eye(4) / 8)
    assert np.allclose(sigma_dense(mixed, 1, 3), np.eye(8) / 8)
    p = make_pair(0.8, 0.6, 1.0)
    assert np.allclose(sigma_dense(p, 1, 1), p.rho1)


def test_dense_resource_guard():
    with pytest.raises(ResourceError):
        sigma_dense(make_pair(0.5, 0.5, 1.0), 0, 13)


@pytest.mark.parametrize("tj", range(0, 13))
def test_wigner_d_orthogonal_and_group_law(tj):
    b1, b2 = 0.37, 1.91
    d1, d2 = wigner_d(tj, b1), wigner_d(tj, b2)
    assert np.max(np.abs(d1 @ d1.T - np.eye(tj + 1))) < 1e-10
    assert np.max(np.abs(d1 @ d2 - wigner_d(tj, b1 + b2))) < 1e-10


def test_wigner_d_spin_half():
    b = 0.7
    ref = np.array([[math.cos(b / 2), -math.sin(b / 2)], [math.sin(b / 2), math.cos(b / 2)]])
    assert np.allclose(wigner_d(1, b), ref)


@pytest.mark.parametrize("tj", range(0, 11))
def test_delta_coeff_symmetry(tj):
    ms = m_values(tj)
    for tm, tmp in itertools.product(ms, ms):
        dm = (tm - tmp) // 2
        for k in range(-tj, tj + 1):
            a = delta_coeff(tj, tm, tmp, k)
            b = delta_coeff(tj, tmp, tm, k + dm)
            if a and b:
                assert a == pytest.approx(b, rel=1e-12)
