"""Parameterized circuits: ordered gate lists with slot-indexed parameters."""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .gates import GateKind, gate_matrix
from .statevector import QubitState


@dataclass(frozen=True)
class Slot:
    """Reference to entry ``index`` of a parameter vector."""

    index: int


@dataclass(frozen=True)
class GateInstance:
    kind: GateKind
    qubits: tuple[int, ...]
    param: float | Slot | None = None

    def __post_init__(self):
        kind = GateKind(self.kind)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))
        if len(self.qubits) != kind.n_qubits:
            raise ValueError(f"{kind.value} acts on {kind.n_qubits} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"duplicate qubits in {kind.value}{self.qubits}")
        if kind.n_params and self.param is None:
            raise ValueError(f"{kind.value} needs an angle or a slot")
        if not kind.n_params and self.param is not None:
            raise ValueError(f"{kind.value} takes no parameter")
        if isinstance(self.param, (int, float)) and not isinstance(self.param, bool):
            object.__setattr__(self, "param", float(self.param))

    @property
    def is_slot(self) -> bool:
        return isinstance(self.param, Slot)


@dataclass(frozen=True)
class Circuit:
    n_qubits: int
    gates: tuple[GateInstance, ...] = ()
    param_count: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(not 0 <= q < self.n_qubits for q in g.qubits):
                raise ValueError(f"gate {g.kind.value}{g.qubits} outside a {self.n_qubits}-qubit register")
            if g.is_slot and not 0 <= g.param.index < self.param_count:
                raise ValueError(f"slot {g.param.index} outside [0, {self.param_count})")

    @property
    def is_bound(self) -> bool:
        return not any(g.is_slot for g in self.gates)

    def slots(self) -> list[int]:
        return [g.param.index for g in self.gates if g.is_slot]


@dataclass
class CircuitBuilder:
    """Append gates in order; parameterized gates get fresh slots unless an angle is given."""

    n_qubits: int
    gates: list[GateInstance] = field(default_factory=list)
    param_count: int = 0

    def add(self, kind, *qubits, angle: float | None = None) -> int | None:
        kind = GateKind(kind)
        if kind.n_params and angle is None:
            slot = self.param_count
            self.param_count += 1
            self.gates.append(GateInstance(kind, qubits, Slot(slot)))
            return slot
        self.gates.append(GateInstance(kind, qubits, angle))
        return None

    def build(self) -> Circuit:
        return Circuit(self.n_qubits, tuple(self.gates), self.param_count)


def _as_params(circuit: Circuit, params) -> np.ndarray:
    values = np.asarray(params, dtype=np.float64).reshape(-1)
    if values.shape[0] != circuit.param_count:
        raise ValueError(f"expected {circuit.param_count} parameters, got {values.shape[0]}")
    if not np.all(np.isfinite(values)):
        raise ValueError("parameters must be finite")
    return values


def bind(circuit: Circuit, params) -> Circuit:
    values = _as_params(circuit, params)
    gates = tuple(
        GateInstance(g.kind, g.qubits, float(values[g.param.index])) if g.is_slot else g
        for g in circuit.gates
    )
    return Circuit(circuit.n_qubits, gates, circuit.param_count)


def compose(a: Circuit, b: Circuit) -> Circuit:
    """``a`` then ``b``; slots of ``b`` are shifted past those of ``a``."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit-count mismatch: {a.n_qubits} vs {b.n_qubits}")
    shifted = tuple(
        GateInstance(g.kind, g.qubits, Slot(g.param.index + a.param_count)) if g.is_slot else g
        for g in b.gates
    )
    return Circuit(a.n_qubits, a.gates + shifted, a.param_count + b.param_count)


def apply_gate(psi: np.ndarray, n: int, gate: GateInstance, theta: float | None, adjoint: bool = False) -> None:
    """Apply one gate in place to a (batch, 2**n) buffer."""
    kind = gate.kind
    if kind is GateKind.CNOT:
        kernels.apply_cnot(psi, n, gate.qubits[0], gate.qubits[1])
        return
    if kind.n_params:
        mat = gate_matrix(kind, -theta if adjoint else theta)
    else:
        mat = gate_matrix(kind)  # H and X are Hermitian
    if kind.n_qubits == 1:
        kernels.apply_1q(psi, mat, n, gate.qubits[0])
    else:
        kernels.apply_2q(psi, mat, n, gate.qubits[0], gate.qubits[1])


def gate_angle(gate: GateInstance, params: np.ndarray | None) -> float | None:
    if gate.is_slot:
        if params is None:
            raise ValueError(f"unbound slot {gate.param.index} in {gate.kind.value}{gate.qubits}")
        return float(params[gate.param.index])
    return gate.param


def run_buffer(circuit: Circuit, psi: np.ndarray, params=None, adjoint: bool = False) -> None:
    """In-place forward (or adjoint) execution on a (batch, 2**n) buffer."""
    n = circuit.n_qubits
    if psi.shape[-1] != 1 << n:
        raise ValueError(f"buffer width {psi.shape[-1]} does not match {n} qubits")
    if params is not None:
        params = _as_params(circuit, params)
    gates = reversed(circuit.gates) if adjoint else circuit.gates
    for g in gates:
        apply_gate(psi, n, g, gate_angle(g, params), adjoint=adjoint)


def _check_state(circuit: Circuit, state: QubitState) -> None:
    if state.n_qubits != circuit.n_qubits:
        raise ValueError(f"circuit has {circuit.n_qubits} qubits, state has {state.n_qubits}")


def run(circuit: Circuit, state: QubitState) -> QubitState:
    _check_state(circuit, state)
    buf = state.amplitudes.copy().reshape(1, -1)
    run_buffer(circuit, buf)
    return QubitState(circuit.n_qubits, buf[0])


def run_adjoint(circuit: Circuit, state: QubitState) -> QubitState:
    _check_state(circuit, state)
    buf = state.amplitudes.copy().reshape(1, -1)
    run_buffer(circuit, buf, adjoint=True)
    return QubitState(circuit.n_qubits, buf[0])


def states_buffer(states) -> np.ndarray:
    return np.ascontiguousarray(np.stack([s.amplitudes for s in states]), dtype=np.complex128)


def count_two_qubit(circuit: Circuit) -> int:
    return sum(1 for g in circuit.gates if len(g.qubits) == 2)

