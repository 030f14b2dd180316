import math

import numpy as np
import pytest

from qdm.channels import (
    ChannelKind,
    ChannelSpec,
    E1Axes,
    apply_channel_trajectory,
    apply_local_superop,
    channel_superoperator,
    ensemble_dist,
    exact_channel_dist,
)
from qdm.dataset import ClassKind, ClassSpec, SampleParams, class_state
from qdm.metrics import p_succ
from qdm.rng import stream
from qdm.statevector import QubitState, basis_state, fidelity, probabilities
from oracles import random_state


def _ghz(n):
    return class_state(SampleParams(ClassSpec(ClassKind.GHZ, n), [math.sqrt(0.6), -1j * math.sqrt(0.4)]))


def test_spec_validation():
    for kw in ({"eta": 0}, {"eta": 1.5}, {"eta": 0.2, "p": -0.1}, {"eta": 0.2, "p": 1.2}):
        with pytest.raises(ValueError):
            ChannelSpec(ChannelKind.E2, **kw)
    with pytest.raises(ValueError):
        ChannelSpec("e4", 0.2)
    with pytest.raises(ValueError):
        ChannelSpec(ChannelKind.E1, 0.2, qubits=(5,)).scope(3)


def test_identity_branch(rng):
    s = QubitState(3, random_state(rng, 3))
    out = apply_channel_trajectory(s, ChannelSpec(ChannelKind.E2, 0.8, p=0.0), stream(1, "c"))
    assert np.allclose(out.amplitudes, s.amplitudes, atol=1e-15)


def test_small_eta_limit(rng):
    s = QubitState(3, random_state(rng, 3))
    out = apply_channel_trajectory(s, ChannelSpec(ChannelKind.E3, 1e-6), stream(1, "c"))
    assert fidelity(s, out) > 1 - 1e-10


def test_trajectory_deterministic(rng):
    s = QubitState(2, random_state(rng, 2))
    for kind in ChannelKind:
        spec = ChannelSpec(kind, 0.4)
        a = apply_channel_trajectory(s, spec, stream(9, "c"))
        b = apply_channel_trajectory(s, spec, stream(9, "c"))
        assert np.array_equal(a.amplitudes, b.amplitudes)


def test_single_trajectory_ensemble(rng):
    s = QubitState(2, random_state(rng, 2))
    spec = ChannelSpec(ChannelKind.E1, 0.5)
    ens = ensemble_dist(s, spec, 1, seed=11)
    one = apply_channel_trajectory(s, spec, stream(11, "channel-trajectory", 0))
    assert np.allclose(ens.mean_dist, probabilities(one), atol=1e-15)


def test_ensemble_chunking_is_invisible(rng):
    s = QubitState(3, random_state(rng, 3))
    spec = ChannelSpec(ChannelKind.E3, 0.3)
    a = ensemble_dist(s, spec, 500, seed=4, chunk=64)
    b = ensemble_dist(s, spec, 500, seed=4, chunk=500)
    assert np.allclose(a.mean_dist, b.mean_dist, atol=1e-15)
    assert abs(a.mean_dist.sum() - 1) <= 1e-9


def test_ensemble_needs_randomness(rng):
    with pytest.raises(ValueError):
        ensemble_dist(basis_state(1, 0), ChannelSpec(ChannelKind.E1, 0.2), 4)
    with pytest.raises(ValueError):
        ensemble_dist(basis_state(1, 0), ChannelSpec(ChannelKind.E1, 0.2), 0, seed=1)


@pytest.mark.parametrize(
    "spec",
    [
        ChannelSpec(ChannelKind.E2, 0.25, p=0.75),
        ChannelSpec(ChannelKind.E1, 0.6),
        ChannelSpec(ChannelKind.E1, 0.6, e1_axes=E1Axes.RANDOM),
        ChannelSpec(ChannelKind.E3, 0.5),
    ],
)
def test_trajectories_match_density_oracle(spec):
    state = _ghz(2)
    ens = ensemble_dist(state, spec, 100_000, seed=2024)
    exact = exact_channel_dist(state, spec)
    z = np.abs(ens.mean_dist - exact) / np.maximum(ens.stderr, 1e-300)
    assert np.all((z <= 3) | (np.abs(ens.mean_dist - exact) < 1e-12))


def test_strong_e1_destroys_ghz():
    state = _ghz(4)
    ens = ensemble_dist(state, ChannelSpec(ChannelKind.E1, 1.0), 4000, seed=3)
    assert p_succ(ens.mean_dist, ClassSpec(ClassKind.GHZ, 4)) < 0.5


def test_oracle_examples(rng):
    s = QubitState(3, random_state(rng, 3))
    assert np.allclose(exact_channel_dist(s, ChannelSpec(ChannelKind.E2, 0.7, p=0.0)), probabilities(s), atol=1e-15)
    flip = ChannelSpec(ChannelKind.E2, 1.0, p=1.0, fixed_theta=math.pi)
    assert exact_channel_dist(basis_state(1, 0), flip)[1] == pytest.approx(2 / 3, abs=1e-14)
    for kind in ChannelKind:
        spec = ChannelSpec(kind, 0.37)
        d256 = exact_channel_dist(s, spec, 256)
        d512 = exact_channel_dist(s, spec, 512)
        assert np.max(np.abs(d256 - d512)) < 1e-10
    with pytest.raises(ValueError):
        exact_channel_dist(QubitState(4, random_state(rng, 4)), ChannelSpec(ChannelKind.E1, 0.2))


def test_channels_are_unital():
    mixed = np.eye(8) / 8
    for kind in ChannelKind:
        sop = channel_superoperator(ChannelSpec(kind, 0.8))
        rho = mixed
        for q in range(3):
            rho = apply_local_superop(rho, 3, sop, q)
        assert np.allclose(rho, mixed, atol=1e-13)


def test_random_phase_uniform_stays_uniform():
    n, m = 2, 20_000
    total = np.zeros(4)
    sq = np.zeros(4)
    for kind in ChannelKind:
        spec = ChannelSpec(kind, 0.6)
        total[:] = 0
        sq[:] = 0
        for k in range(m):
            g = stream(7, "phase", k)
            s = QubitState(n, 0.5 * np.exp(1j * g.uniform(0, 2 * math.pi, 4)))
            p = probabilities(apply_channel_trajectory(s, spec, g))
            total += p
            sq += p * p
        mean = total / m
        se = np.sqrt((sq / m - mean**2) / m)
        assert np.all(np.abs(mean - 0.25) <= 4 * se)


def test_success_decreases_with_eta():
    state = _ghz(3)
    spec = ClassSpec(ClassKind.GHZ, 3)
    etas = np.linspace(0.05, 0.5, 10)
    for kind in ChannelKind:
        vals = [p_succ(exact_channel_dist(state, ChannelSpec(kind, e)), spec) for e in etas]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
