import math

import numpy as np
import pytest

from qdm.circuit import (
    Circuit,
    CircuitBuilder,
    GateInstance,
    Slot,
    bind,
    compose,
    count_two_qubit,
    run,
    run_adjoint,
)
from qdm.gates import GateKind
from qdm.statevector import QubitState, basis_state, normalized, zero_state
from oracles import ALL_KINDS, dense_circuit, random_state


def random_circuit(rng, n, depth, bound=True):
    b = CircuitBuilder(n)
    kinds = [k for k in ALL_KINDS if k.n_qubits == 1 or n > 1]
    for _ in range(depth):
        kind = kinds[int(rng.integers(len(kinds)))]
        qubits = [int(q) for q in rng.choice(n, size=kind.n_qubits, replace=False)]
        angle = float(rng.uniform(-math.pi, math.pi)) if (kind.n_params and bound) else None
        b.add(kind, *qubits, angle=angle)
    return b.build()


def test_gate_instance_validation():
    with pytest.raises(ValueError):
        GateInstance(GateKind.RX, (0, 1), 0.1)
    with pytest.raises(ValueError):
        GateInstance(GateKind.CNOT, (1, 1))
    with pytest.raises(ValueError):
        GateInstance(GateKind.RY, (0,))
    with pytest.raises(ValueError):
        GateInstance(GateKind.H, (0,), 0.3)
    with pytest.raises(ValueError):
        Circuit(2, (GateInstance(GateKind.RX, (0,), Slot(3)),), 1)
    with pytest.raises(ValueError):
        Circuit(1, (GateInstance(GateKind.CNOT, (0, 1)),))


def test_bind_examples():
    b = CircuitBuilder(1)
    b.add(GateKind.RX, 0)
    c = b.build()
    bound = bind(c, [math.pi])
    assert bound.gates[0].param == math.pi and bound.is_bound
    assert bind(bound, [math.pi]) == bound
    assert bind(Circuit(2), []) == Circuit(2)
    with pytest.raises(ValueError):
        bind(c, [1.0, 2.0])
    with pytest.raises(ValueError):
        bind(c, [math.nan])


def test_run_requires_bound():
    b = CircuitBuilder(1)
    b.add(GateKind.RX, 0)
    with pytest.raises(ValueError):
        run(b.build(), zero_state(1))


def test_empty_circuit_is_identity(rng):
    s = QubitState(2, random_state(rng, 2))
    assert np.array_equal(run(Circuit(2), s).amplitudes, s.amplitudes)


def test_bell_circuit():
    b = CircuitBuilder(2)
    b.add(GateKind.H, 0)
    b.add(GateKind.CNOT, 0, 1)
    out = run(b.build(), zero_state(2))
    assert np.allclose(out.amplitudes, normalized(2, [1, 0, 0, 1]).amplitudes, atol=1e-15)


def test_run_matches_dense_oracle(rng):
    for n in (1, 2, 3, 4):
        for _ in range(50):
            c = random_circuit(rng, n, int(rng.integers(1, 21)))
            psi = random_state(rng, n)
            out = run(c, QubitState(n, psi))
            assert np.max(np.abs(out.amplitudes - dense_circuit(c) @ psi)) <= 1e-12
            assert abs(out.norm_squared() - 1) <= 1e-10


def test_run_adjoint_inverts(rng):
    for _ in range(100):
        n = int(rng.integers(1, 5))
        c = random_circuit(rng, n, 15)
        s = QubitState(n, random_state(rng, n))
        back = run_adjoint(c, run(c, s))
        assert np.max(np.abs(back.amplitudes - s.amplitudes)) <= 1e-10


def test_adjoint_examples(rng):
    s = QubitState(2, random_state(rng, 2))
    b = CircuitBuilder(2)
    b.add(GateKind.RX, 1, angle=0.4)
    m = CircuitBuilder(2)
    m.add(GateKind.RX, 1, angle=-0.4)
    assert np.allclose(run_adjoint(b.build(), s).amplitudes, run(m.build(), s).amplitudes, atol=1e-15)
    cx = CircuitBuilder(2)
    cx.add(GateKind.CNOT, 0, 1)
    assert np.allclose(run_adjoint(cx.build(), s).amplitudes, run(cx.build(), s).amplitudes)


def test_compose(rng):
    a = random_circuit(rng, 3, 8, bound=False)
    b = random_circuit(rng, 3, 8, bound=False)
    ab = compose(a, b)
    assert ab.param_count == a.param_count + b.param_count
    assert compose(Circuit(3), a) == a
    pa = rng.uniform(-1, 1, a.param_count)
    pb = rng.uniform(-1, 1, b.param_count)
    s = QubitState(3, random_state(rng, 3))
    direct = run(bind(ab, np.concatenate([pa, pb])), s)
    staged = run(bind(b, pb), run(bind(a, pa), s))
    assert np.max(np.abs(direct.amplitudes - staged.amplitudes)) <= 1e-12
    with pytest.raises(ValueError):
        compose(a, Circuit(2))


def test_compose_associative(rng):
    a, b, c = (random_circuit(rng, 3, 6) for _ in range(3))
    s = QubitState(3, random_state(rng, 3))
    left = run(compose(compose(a, b), c), s)
    right = run(compose(a, compose(b, c)), s)
    assert np.max(np.abs(left.amplitudes - right.amplitudes)) <= 1e-12


def test_builder_slots_are_dense():
    b = CircuitBuilder(2)
    assert b.add(GateKind.RX, 0) == 0
    assert b.add(GateKind.CNOT, 0, 1) is None
    assert b.add(GateKind.RZZ, 0, 1) == 1
    assert b.add(GateKind.RY, 1, angle=0.2) is None
    c = b.build()
    assert c.slots() == [0, 1] and c.param_count == 2
    assert count_two_qubit(c) == 2


def test_run_deterministic(rng):
    c = random_circuit(rng, 3, 10)
    s = basis_state(3, 5)
    assert np.array_equal(run(c, s).amplitudes, run(c, s).amplitudes)
