"""Gate kinds and their matrices.

Conventions: R_a(t) = exp(-i t a / 2) for a in {X, Y, Z} and
R_aa(t) = exp(-i t (a (x) a) / 2). Two-qubit matrices are written in the
basis |q0 q1> with the first listed qubit as the high bit.
"""

from enum import Enum
import cmath
import math

import numpy as np

I2 = np.eye(2, dtype=np.complex128)
X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)


class GateKind(str, Enum):
    RX = "Rx"
    RY = "Ry"
    RZ = "Rz"
    RXX = "Rxx"
    RYY = "Ryy"
    RZZ = "Rzz"
    CNOT = "CNOT"
    H = "H"
    X = "X"

    @property
    def n_qubits(self) -> int:
        return 2 if self in _TWO_QUBIT else 1

    @property
    def n_params(self) -> int:
        return 1 if self in _GENERATORS else 0

    @property
    def generator(self) -> np.ndarray:
        """Pauli generator P of a rotation, U(t) = exp(-i t P / 2)."""
        return _GENERATORS[self]


_TWO_QUBIT = {GateKind.RXX, GateKind.RYY, GateKind.RZZ, GateKind.CNOT}
_GENERATORS = {
    GateKind.RX: X,
    GateKind.RY: Y,
    GateKind.RZ: Z,
    GateKind.RXX: np.kron(X, X),
    GateKind.RYY: np.kron(Y, Y),
    GateKind.RZZ: np.kron(Z, Z),
}
_FIXED = {GateKind.CNOT: CNOT, GateKind.H: H, GateKind.X: X}


_EYE = {2: I2, 4: np.eye(4, dtype=np.complex128)}


def rotation(pauli: np.ndarray, theta: float) -> np.ndarray:
    # exact for any P with P @ P = I
    return math.cos(theta / 2) * _EYE[pauli.shape[0]] - 1j * math.sin(theta / 2) * pauli


def rx(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rz(theta: float) -> np.ndarray:
    h = 0.5j * theta
    return np.array([[cmath.exp(-h), 0], [0, cmath.exp(h)]])


def gate_matrix(kind: GateKind, theta: float | None = None) -> np.ndarray:
    kind = GateKind(kind)
    if kind.n_params:
        if theta is None:
            raise ValueError(f"{kind.value} needs an angle")
        return rotation(kind.generator, theta)
    return _FIXED[kind]


def rotations_batch(pauli: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    """Stack of single-qubit rotations, shape (len(thetas), 2, 2)."""
    thetas = np.asarray(thetas, dtype=np.float64)
    c = np.cos(thetas / 2)[:, None, None]
    s = np.sin(thetas / 2)[:, None, None]
    return np.ascontiguousarray(c * I2 - 1j * s * pauli)
