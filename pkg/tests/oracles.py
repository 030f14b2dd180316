"""Dense reference implementations used as test oracles.

Everything here builds full 2**n x 2**n matrices from Kronecker products
and never touches the in-place kernels.
"""

import numpy as np

from qdm.gates import GateKind, gate_matrix

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)


def kron_all(mats):
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def dense_1q(n, u, target):
    return kron_all([u if q == target else np.eye(2) for q in range(n)])


def _adjacent_2q(n, u, first):
    # u on qubits (first, first + 1), first = high bit
    return kron_all([np.eye(2 ** first), u, np.eye(2 ** (n - first - 2))])


def _swap_chain(n, a, b):
    """Permutation matrix moving qubit b next to qubit a by adjacent swaps (b > a)."""
    p = np.eye(2**n, dtype=complex)
    for k in range(b - 1, a, -1):
        p = _adjacent_2q(n, SWAP, k) @ p
    return p


def dense_2q(n, u, q0, q1):
    """4x4 ``u`` with q0 as its high bit, on any two distinct qubits."""
    if q0 > q1:
        # relabel so the first gate qubit is the lower index
        u = SWAP @ u @ SWAP
        q0, q1 = q1, q0
    p = _swap_chain(n, q0, q1)
    return p.conj().T @ _adjacent_2q(n, u, q0) @ p


def dense_gate(n, gate, theta):
    m = gate_matrix(gate.kind, theta)
    if len(gate.qubits) == 1:
        return dense_1q(n, m, gate.qubits[0])
    return dense_2q(n, m, *gate.qubits)


def dense_circuit(circuit, params=None):
    u = np.eye(2**circuit.n_qubits, dtype=complex)
    for g in circuit.gates:
        theta = None
        if g.kind.n_params:
            theta = params[g.param.index] if g.is_slot else g.param
        u = dense_gate(circuit.n_qubits, g, theta) @ u
    return u


def random_state(rng, n):
    a = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return a / np.linalg.norm(a)


def random_unitary(rng, dim):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


ROTATIONS = [GateKind.RX, GateKind.RY, GateKind.RZ, GateKind.RXX, GateKind.RYY, GateKind.RZZ]
ALL_KINDS = ROTATIONS + [GateKind.CNOT, GateKind.H, GateKind.X]
