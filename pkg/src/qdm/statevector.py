"""Dense state vectors with exact gate application.

Basis convention: qubit 0 is the leftmost character of a ket label, so the
index of |b_0 b_1 ... b_{n-1}> is sum_k b_k 2^(n-1-k).
"""

from dataclasses import dataclass

import numpy as np

from . import kernels

NORM_TOL = 1e-10
UNITARY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class QubitState:
    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != 1 << self.n_qubits:
            raise ValueError(
                f"expected {1 << self.n_qubits} amplitudes for {self.n_qubits} qubits, got {amps.shape[0]}"
            )
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def __repr__(self):
        return f"QubitState(n_qubits={self.n_qubits})"


def basis_index(bits: str | list[int]) -> int:
    """Index of a computational basis ket, e.g. ``basis_index("10000000") == 128``."""
    if isinstance(bits, str):
        bits = [int(c) for c in bits]
    idx = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"bad bit {b!r}")
        idx = (idx << 1) | b
    return idx


def basis_label(index: int, n_qubits: int) -> str:
    return format(index, f"0{n_qubits}b")


def basis_state(n_qubits: int, index: int = 0) -> QubitState:
    if not 0 <= index < 1 << n_qubits:
        raise ValueError(f"basis index {index} out of range for {n_qubits} qubits")
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return QubitState(n_qubits, amps)


def zero_state(n_qubits: int) -> QubitState:
    return basis_state(n_qubits, 0)


def normalized(n_qubits: int, amplitudes) -> QubitState:
    amps = np.asarray(amplitudes, dtype=np.complex128)
    return QubitState(n_qubits, amps / np.linalg.norm(amps))


def _check_unitary(gate: np.ndarray, dim: int) -> np.ndarray:
    gate = np.ascontiguousarray(gate, dtype=np.complex128)
    if gate.shape != (dim, dim):
        raise ValueError(f"gate must be {dim}x{dim}, got {gate.shape}")
    if not np.allclose(gate.conj().T @ gate, np.eye(dim), atol=UNITARY_TOL, rtol=0):
        raise ValueError("gate matrix is not unitary")
    return gate


def _check_qubit(q: int, n: int) -> None:
    if not 0 <= q < n:
        raise ValueError(f"qubit index {q} out of range for {n} qubits")


def apply_1q(state: QubitState, gate, target: int) -> QubitState:
    _check_qubit(target, state.n_qubits)
    gate = _check_unitary(gate, 2)
    buf = state.amplitudes.copy().reshape(1, -1)
    kernels.apply_1q(buf, gate, state.n_qubits, target)
    return QubitState(state.n_qubits, buf[0])


def apply_2q(state: QubitState, gate, first: int, second: int) -> QubitState:
    _check_qubit(first, state.n_qubits)
    _check_qubit(second, state.n_qubits)
    if first == second:
        raise ValueError("two-qubit gate needs distinct qubits")
    gate = _check_unitary(gate, 4)
    buf = state.amplitudes.copy().reshape(1, -1)
    kernels.apply_2q(buf, gate, state.n_qubits, first, second)
    return QubitState(state.n_qubits, buf[0])


def probabilities(state: QubitState) -> np.ndarray:
    return row_probabilities(state.amplitudes)


def row_probabilities(amplitudes: np.ndarray) -> np.ndarray:
    """|a|^2 elementwise, for a single vector or a (batch, dim) buffer."""
    return amplitudes.real**2 + amplitudes.imag**2


def overlap(a: QubitState, b: QubitState) -> complex:
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: QubitState, b: QubitState) -> float:
    """|<a|b>|^2, clipped into [0, 1]."""
    return float(min(1.0, max(0.0, abs(overlap(a, b)) ** 2)))
