"""Forward noising with scheduled random rotations, and the backward generation driver."""

from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from . import kernels
from .circuit import Circuit, run_buffer
from .gates import X, Y, Z, rotations_batch, rx, ry, rz
from .statevector import QubitState

DEFAULT_SCALE = math.pi / 3


def default_n_steps(n_qubits: int) -> int:
    """16 steps for 8 qubits, 32 for 16."""
    return 2 * n_qubits


@dataclass(frozen=True)
class NoiseSchedule:
    n_steps: int
    scale: float = DEFAULT_SCALE

    def __post_init__(self):
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    def std(self, step: int) -> float:
        return step / self.n_steps * self.scale


@dataclass
class ForwardTrace:
    clean: QubitState
    states: list[QubitState] = field(default_factory=list)
    # angles[j] has shape (n_qubits, 3), columns (x, y, z), for step j + 1
    angles: list[np.ndarray] = field(default_factory=list)


class PhaseMode(str, Enum):
    RANDOM = "random_uniform"
    ZERO = "zero"


def sample_step_angles(schedule: NoiseSchedule, step: int, n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    if not 1 <= step <= schedule.n_steps:
        raise ValueError(f"step {step} outside [1, {schedule.n_steps}]")
    return schedule.std(step) * rng.standard_normal((n_qubits, 3))


def step_unitary(angles_xyz) -> np.ndarray:
    """Rx(tx) Ry(ty) Rz(tz) as an operator product, so Rz acts first."""
    tx, ty, tz = angles_xyz
    return rx(tx) @ ry(ty) @ rz(tz)


def forward_step(state: QubitState, angles) -> QubitState:
    angles = np.asarray(angles, dtype=np.float64)
    if angles.shape != (state.n_qubits, 3):
        raise ValueError(f"angles must have shape ({state.n_qubits}, 3), got {angles.shape}")
    buf = state.amplitudes.copy().reshape(1, -1)
    for q in range(state.n_qubits):
        kernels.apply_1q(buf, step_unitary(angles[q]), state.n_qubits, q)
    return QubitState(state.n_qubits, buf[0])


def forward_noise(clean: QubitState, schedule: NoiseSchedule, upto_step: int, rng: np.random.Generator) -> ForwardTrace:
    if not 0 <= upto_step <= schedule.n_steps:
        raise ValueError(f"upto_step {upto_step} outside [0, {schedule.n_steps}]")
    trace = ForwardTrace(clean, [clean], [])
    state = clean
    for step in range(1, upto_step + 1):
        angles = sample_step_angles(schedule, step, clean.n_qubits, rng)
        state = forward_step(state, angles)
        trace.states.append(state)
        trace.angles.append(angles)
    return trace


def _batched_step_unitaries(angles: np.ndarray) -> np.ndarray:
    # angles: (batch, 3) -> (batch, 2, 2) of Rx Ry Rz
    return rotations_batch(X, angles[:, 0]) @ rotations_batch(Y, angles[:, 1]) @ rotations_batch(Z, angles[:, 2])


def accumulated_unitaries(schedule: NoiseSchedule, n_qubits: int, rngs, first: int, last: int) -> np.ndarray:
    """Per-row, per-qubit product of the step unitaries first..last.

    Draws angles from each row's generator in the same order as
    :func:`forward_noise`, so the two paths see identical noise.
    Returns shape (n_qubits, batch, 2, 2).
    """
    batch = len(rngs)
    acc = np.broadcast_to(np.eye(2, dtype=np.complex128), (n_qubits, batch, 2, 2)).copy()
    for step in range(first, last + 1):
        angles = np.stack([sample_step_angles(schedule, step, n_qubits, g) for g in rngs])  # (batch, n, 3)
        for q in range(n_qubits):
            acc[q] = _batched_step_unitaries(angles[:, q, :]) @ acc[q]
    return acc


def apply_local_rows(psi: np.ndarray, n_qubits: int, mats: np.ndarray) -> None:
    """Apply per-row single-qubit matrices ``mats[q]`` (batch, 2, 2) on every qubit, in place."""
    for q in range(n_qubits):
        kernels.apply_1q_rows(psi, np.ascontiguousarray(mats[q]), n_qubits, q)


def forward_endpoint_buffer(psi: np.ndarray, n_qubits: int, schedule: NoiseSchedule, upto_step: int, rngs) -> None:
    """Noise every row of ``psi`` up to ``upto_step`` in place (batched fast path of forward_noise)."""
    if upto_step == 0:
        return
    apply_local_rows(psi, n_qubits, accumulated_unitaries(schedule, n_qubits, rngs, 1, upto_step))


def full_noise_amplitudes(n_qubits: int, rng: np.random.Generator, phase_mode=PhaseMode.RANDOM) -> np.ndarray:
    dim = 1 << n_qubits
    mag = 2.0 ** (-n_qubits / 2)
    if PhaseMode(phase_mode) is PhaseMode.ZERO:
        return np.full(dim, mag, dtype=np.complex128)
    phases = rng.uniform(0.0, 2 * math.pi, dim)
    return mag * np.exp(1j * phases)


def sample_full_noise_state(n_qubits: int, rng: np.random.Generator, phase_mode=PhaseMode.RANDOM) -> QubitState:
    """Equal-magnitude state; phases i.i.d. uniform (default) or all zero."""
    return QubitState(n_qubits, full_noise_amplitudes(n_qubits, rng, phase_mode))


def generate_buffer(checkpoint, psi: np.ndarray, keep_intermediates: bool = False):
    """Apply every stored stage, in serialized order, to the rows of ``psi`` in place."""
    if not checkpoint.stages:
        raise ValueError("checkpoint has no stages")
    if psi.shape[-1] != 1 << checkpoint.circuit.n_qubits:
        raise ValueError("input width does not match the checkpoint's qubit count")
    inter = []
    for params in checkpoint.stages:
        run_buffer(checkpoint.circuit, psi, params)
        if keep_intermediates:
            inter.append(psi.copy())
    return inter


def generate(checkpoint, initial: QubitState) -> tuple[QubitState, list[QubitState]]:
    if initial.n_qubits != checkpoint.circuit.n_qubits:
        raise ValueError(
            f"checkpoint is for {checkpoint.circuit.n_qubits} qubits, input has {initial.n_qubits}"
        )
    buf = initial.amplitudes.copy().reshape(1, -1)
    inter = generate_buffer(checkpoint, buf, keep_intermediates=True)
    n = initial.n_qubits
    return QubitState(n, buf[0]), [QubitState(n, s[0]) for s in inter]


def midpoint_state(checkpoint, initial: QubitState) -> QubitState:
    """State halfway through generation, for the middle image panel.

    With several stages this is the output of the middle stage; with one
    stage it is the state at the bottleneck of the network.
    """
    n = initial.n_qubits
    buf = initial.amplitudes.copy().reshape(1, -1)
    stages = checkpoint.stages
    if len(stages) > 1:
        for params in stages[: (len(stages) + 1) // 2]:
            run_buffer(checkpoint.circuit, buf, params)
        return QubitState(n, buf[0])
    cut = checkpoint.descriptor.down_gate_count
    c = checkpoint.circuit
    down = Circuit(c.n_qubits, c.gates[:cut], c.param_count)
    run_buffer(down, buf, stages[0])
    return QubitState(n, buf[0])
