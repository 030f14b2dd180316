"""Test-noise environments applied as random unitary trajectories.

Three single-qubit environments, each drawing its angles uniformly from
[0, eta*pi] independently per qubit:

    e1   Rx(tx) then Ry(ty), independent angles ("both"), or one random axis
    e2   identity with probability 1-p, else one of Rx/Ry/Rz(t), each p/3
    e3   U = Rx(t) Ry(t) Rz(t) with one shared angle (Rz acts first)

All channels map rho -> E[U rho U^dagger]. :func:`exact_channel_dist` is a
density-matrix oracle for at most three qubits.
"""

from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

from . import kernels
from .gates import I2, X, Y, Z, rotation, rx, ry, rz
from .rng import derive_seed, stream
from .statevector import QubitState

MAX_ORACLE_QUBITS = 3
DEFAULT_CHUNK = 2048


class ChannelKind(str, Enum):
    E1 = "e1"
    E2 = "e2"
    E3 = "e3"


class E1Axes(str, Enum):
    BOTH = "both"
    RANDOM = "random"


@dataclass(frozen=True)
class ChannelSpec:
    kind: ChannelKind
    eta: float
    p: float = 0.75
    qubits: tuple[int, ...] | None = None  # None = every qubit
    e1_axes: E1Axes = E1Axes.BOTH
    fixed_theta: float | None = None  # pins every angle (the depolarizing limit of e2)

    def __post_init__(self):
        object.__setattr__(self, "kind", ChannelKind(self.kind))
        object.__setattr__(self, "e1_axes", E1Axes(self.e1_axes))
        if not (0.0 < self.eta <= 1.0):
            raise ValueError(f"eta must lie in (0, 1], got {self.eta!r}")
        if not (0.0 <= self.p <= 1.0):
            raise ValueError(f"p must lie in [0, 1], got {self.p!r}")
        if self.qubits is not None:
            object.__setattr__(self, "qubits", tuple(sorted(set(int(q) for q in self.qubits))))

    def scope(self, n_qubits: int) -> tuple[int, ...]:
        if self.qubits is None:
            return tuple(range(n_qubits))
        bad = [q for q in self.qubits if not 0 <= q < n_qubits]
        if bad:
            raise ValueError(f"channel scope {bad} outside a {n_qubits}-qubit register")
        return self.qubits


@dataclass
class NoisyEnsemble:
    mean_dist: np.ndarray
    stderr: np.ndarray
    n_trajectories: int
    trajectories: tuple[QubitState, ...] = ()


def _angle(spec: ChannelSpec, rng: np.random.Generator) -> float:
    t = rng.uniform(0.0, spec.eta * math.pi)
    return spec.fixed_theta if spec.fixed_theta is not None else t


def sample_local_unitary(spec: ChannelSpec, rng: np.random.Generator) -> np.ndarray:
    """One random single-qubit unitary of the channel's unraveling."""
    if spec.kind is ChannelKind.E1:
        if spec.e1_axes is E1Axes.BOTH:
            tx = _angle(spec, rng)
            ty = _angle(spec, rng)
            return ry(ty) @ rx(tx)
        axis = rx if rng.random() < 0.5 else ry
        return axis(_angle(spec, rng))
    if spec.kind is ChannelKind.E2:
        t = _angle(spec, rng)
        u = rng.random()
        if u >= spec.p:
            return I2.copy()
        return (rx, ry, rz)[min(int(3 * u / spec.p), 2)](t)
    t = _angle(spec, rng)
    return rx(t) @ ry(t) @ rz(t)


def trajectory_unitaries(spec: ChannelSpec, n_qubits: int, rng: np.random.Generator) -> dict[int, np.ndarray]:
    return {q: sample_local_unitary(spec, rng) for q in spec.scope(n_qubits)}


def apply_channel_trajectory(state: QubitState, spec: ChannelSpec, rng: np.random.Generator) -> QubitState:
    buf = state.amplitudes.copy().reshape(1, -1)
    for q, u in trajectory_unitaries(spec, state.n_qubits, rng).items():
        kernels.apply_1q(buf, u, state.n_qubits, q)
    amps = buf[0] / np.linalg.norm(buf[0])
    return QubitState(state.n_qubits, amps)


def corrupt_buffer(psi: np.ndarray, n_qubits: int, spec: ChannelSpec, rngs) -> None:
    """One trajectory per row, row r drawing from ``rngs[r]``; in place."""
    scope = spec.scope(n_qubits)
    mats = np.empty((len(scope), len(rngs), 2, 2), dtype=np.complex128)
    for r, g in enumerate(rngs):
        for j, u in enumerate(trajectory_unitaries(spec, n_qubits, g).values()):
            mats[j, r] = u
    for j, q in enumerate(scope):
        kernels.apply_1q_rows(psi, mats[j], n_qubits, q)


def ensemble_dist(
    state: QubitState,
    spec: ChannelSpec,
    n_trajectories: int,
    rng: np.random.Generator | None = None,
    seed: int | None = None,
    keep_states: bool = False,
    chunk: int = DEFAULT_CHUNK,
) -> NoisyEnsemble:
    """Average distribution over i.i.d. trajectories, with per-entry standard errors.

    Trajectory k uses the stream (base seed, k); the base seed is ``seed`` or,
    if not given, drawn once from ``rng``.
    """
    if n_trajectories < 1:
        raise ValueError("n_trajectories must be >= 1")
    if seed is None:
        if rng is None:
            raise ValueError("pass rng or seed")
        seed = derive_seed(rng)
    n = state.n_qubits
    total = np.zeros(1 << n)
    total_sq = np.zeros(1 << n)
    kept = []
    for start in range(0, n_trajectories, chunk):
        ks = range(start, min(start + chunk, n_trajectories))
        psi = np.repeat(state.amplitudes.reshape(1, -1), len(ks), axis=0)
        corrupt_buffer(psi, n, spec, [stream(seed, "channel-trajectory", k) for k in ks])
        probs = psi.real**2 + psi.imag**2
        total += probs.sum(axis=0)
        total_sq += (probs**2).sum(axis=0)
        if keep_states:
            kept.extend(QubitState(n, row / np.linalg.norm(row)) for row in psi)
    m = n_trajectories
    mean = total / m
    if m > 1:
        var = np.maximum(total_sq / m - mean**2, 0.0) * m / (m - 1)
        stderr = np.sqrt(var / m)
    else:
        stderr = np.zeros_like(mean)
    return NoisyEnsemble(mean, stderr, m, tuple(kept))


def _superop(u: np.ndarray) -> np.ndarray:
    # vec(U rho U^dagger) = (U kron conj(U)) vec(rho) for row-major vec
    return np.kron(u, u.conj())


def channel_superoperator(spec: ChannelSpec, quad_points: int = 256) -> np.ndarray:
    """4x4 single-qubit superoperator of the channel, angle average by Gauss-Legendre quadrature."""
    if spec.fixed_theta is not None:
        nodes, weights = np.array([spec.fixed_theta]), np.array([1.0])
    else:
        x, w = np.polynomial.legendre.leggauss(quad_points)
        hi = spec.eta * math.pi
        nodes, weights = 0.5 * hi * (x + 1.0), 0.5 * w  # weights of the mean over [0, hi]

    def avg(f):
        return sum(wt * _superop(f(t)) for t, wt in zip(nodes, weights))

    if spec.kind is ChannelKind.E1:
        sx = avg(lambda t: rotation(X, t))
        sy = avg(lambda t: rotation(Y, t))
        if spec.e1_axes is E1Axes.BOTH:
            return sy @ sx
        return 0.5 * (sx + sy)
    if spec.kind is ChannelKind.E2:
        mix = sum(avg(lambda t, P=P: rotation(P, t)) for P in (X, Y, Z))
        return (1.0 - spec.p) * np.eye(4) + spec.p / 3.0 * mix
    return avg(lambda t: rotation(X, t) @ rotation(Y, t) @ rotation(Z, t))


def apply_local_superop(rho: np.ndarray, n_qubits: int, superop: np.ndarray, qubit: int) -> np.ndarray:
    s = superop.reshape(2, 2, 2, 2)  # [i, j, k, l]: out (i, j) <- in (k, l)
    r = rho.reshape((2,) * (2 * n_qubits))
    r = np.tensordot(s, r, axes=([2, 3], [qubit, n_qubits + qubit]))
    r = np.moveaxis(r, [0, 1], [qubit, n_qubits + qubit])
    return r.reshape(1 << n_qubits, 1 << n_qubits)


def exact_channel_density(state: QubitState, spec: ChannelSpec, quad_points: int = 256) -> np.ndarray:
    n = state.n_qubits
    if n > MAX_ORACLE_QUBITS:
        raise ValueError(f"density-matrix oracle supports at most {MAX_ORACLE_QUBITS} qubits, got {n}")
    a = state.amplitudes
    rho = np.outer(a, a.conj())
    sop = channel_superoperator(spec, quad_points)
    for q in spec.scope(n):
        rho = apply_local_superop(rho, n, sop, q)
    return rho


def exact_channel_dist(state: QubitState, spec: ChannelSpec, quad_points: int = 256) -> np.ndarray:
    return np.real(np.diag(exact_channel_density(state, spec, quad_points))).copy()
