"""Compiled and numpy kernels against the dense oracle and each other."""

import numpy as np
import pytest

from qdm import kernels
from qdm.gates import CNOT
from oracles import dense_1q, dense_2q, random_unitary


def _batch(rng, b, n):
    psi = rng.normal(size=(b, 2**n)) + 1j * rng.normal(size=(b, 2**n))
    return psi / np.linalg.norm(psi, axis=1, keepdims=True)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_apply_1q_vs_dense(backend, rng, n):
    for t in range(n):
        psi = _batch(rng, 3, n)
        u = random_unitary(rng, 2)
        expected = psi @ dense_1q(n, u, t).T
        kernels.apply_1q(psi, u, n, t)
        assert np.max(np.abs(psi - expected)) <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_apply_2q_vs_dense(backend, rng, n):
    for q0 in range(n):
        for q1 in range(n):
            if q0 == q1:
                continue
            psi = _batch(rng, 2, n)
            u = random_unitary(rng, 4)
            expected = psi @ dense_2q(n, u, q0, q1).T
            kernels.apply_2q(psi, u, n, q0, q1)
            assert np.max(np.abs(psi - expected)) <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 4])
def test_apply_cnot_vs_dense(backend, rng, n):
    for c in range(n):
        for t in range(n):
            if c == t:
                continue
            psi = _batch(rng, 2, n)
            expected = psi @ dense_2q(n, CNOT, c, t).T
            kernels.apply_cnot(psi, n, c, t)
            assert np.array_equal(psi, expected) or np.max(np.abs(psi - expected)) <= 1e-15


def test_apply_1q_rows(backend, rng):
    n, b = 3, 5
    psi = _batch(rng, b, n)
    mats = np.stack([random_unitary(rng, 2) for _ in range(b)])
    expected = np.stack([dense_1q(n, mats[r], 2) @ psi[r] for r in range(b)])
    kernels.apply_1q_rows(psi, mats, n, 2)
    assert np.max(np.abs(psi - expected)) <= 1e-12


def test_backends_agree(rng):
    if len(kernels.available_backends()) < 2:
        pytest.skip("compiled kernels not built")
    n = 6
    base = _batch(rng, 4, n)
    u1, u2 = random_unitary(rng, 2), random_unitary(rng, 4)
    outs = []
    previous = kernels.backend_name()
    for name in ("cython", "python"):
        kernels.set_backend(name)
        psi = base.copy()
        for q in range(n):
            kernels.apply_1q(psi, u1, n, q)
            kernels.apply_2q(psi, u2, n, q, (q + 2) % n)
            kernels.apply_cnot(psi, n, (q + 1) % n, q)
        outs.append(psi)
    kernels.set_backend(previous)
    assert np.max(np.abs(outs[0] - outs[1])) <= 1e-13


def test_empty_batch(backend):
    psi = np.zeros((0, 4), dtype=complex)
    kernels.apply_1q(psi, np.eye(2, dtype=complex), 2, 0)
    kernels.apply_cnot(psi, 2, 0, 1)


def test_unknown_backend():
    with pytest.raises(ValueError):
        kernels.set_backend("fortran")
