"""Training drivers: end-to-end distribution matching and stepwise denoising.

End-to-end trains one parameter vector that maps a noisy input straight to
the sample's clean state. Stepwise trains one vector per diffusion step,
each undoing a single noising step; stages are stored in generation order
(step n first).

Inputs are redrawn every epoch from streams keyed by (seed, epoch, sample
index) and batches come from a per-epoch shuffle, so a run is a pure
function of its config and data.
"""

from dataclasses import asdict, dataclass, field
from enum import Enum
import math

import numpy as np

from .adam import AdamState, adam_step
from .channels import ChannelKind, ChannelSpec, trajectory_unitaries
from .checkpoint import Checkpoint
from .circuit import Circuit
from .dataset import Dataset, class_amplitudes
from .diffusion import (
    DEFAULT_SCALE,
    NoiseSchedule,
    PhaseMode,
    accumulated_unitaries,
    apply_local_rows,
    default_n_steps,
    forward_endpoint_buffer,
    full_noise_amplitudes,
)
from .gates import X, Y, Z, rotations_batch
from .gradients import DEFAULT_CHUNK, GradMethod, batch_loss, batch_loss_grad
from .losses import LossKind
from .qunet import QunetDescriptor
from .rng import stream

STOP_LOSS = 1e-12


class TrainMode(str, Enum):
    ENDTOEND = "endtoend"
    STEPWISE = "stepwise"


class InputSource(str, Enum):
    FORWARD = "forward"  # forward-noised sample at input_step
    FULL_NOISE = "full_noise"  # fresh equal-magnitude state
    CHANNEL = "channel"  # one trajectory of a randomly chosen test channel


class InitKind(str, Enum):
    UNIFORM = "uniform"
    ZEROS = "zeros"  # the default network is the identity at zero


@dataclass(frozen=True)
class TrainConfig:
    mode: TrainMode = TrainMode.ENDTOEND
    loss: LossKind | None = None  # None: MAE end-to-end, infidelity stepwise
    epochs: int = 200
    batch_size: int = 50
    lr: float = 0.01
    seed: int = 0
    grad: GradMethod = GradMethod.ADJOINT
    n_steps: int | None = None  # None: 2 x qubit count
    scale: float = DEFAULT_SCALE
    input_source: InputSource = InputSource.FORWARD
    input_step: int | None = None  # None: n_steps; 0 feeds the clean state
    phase_mode: PhaseMode = PhaseMode.RANDOM
    channels: tuple[ChannelKind, ...] = (ChannelKind.E1, ChannelKind.E2, ChannelKind.E3)
    eta_max: float = 0.25
    channel_p: float = 0.75
    init: InitKind = InitKind.UNIFORM
    init_scale: float = 0.1
    patience: int = 10
    min_delta: float = 1e-6
    noise_block_scale: float = 0.0
    workers: int = 1

    def __post_init__(self):
        for name, enum in (
            ("mode", TrainMode),
            ("grad", GradMethod),
            ("input_source", InputSource),
            ("phase_mode", PhaseMode),
            ("init", InitKind),
        ):
            object.__setattr__(self, name, enum(getattr(self, name)))
        object.__setattr__(self, "channels", tuple(ChannelKind(c) for c in self.channels))
        loss = self.loss
        if loss is None:
            loss = LossKind.MAE if self.mode is TrainMode.ENDTOEND else LossKind.INFIDELITY
        object.__setattr__(self, "loss", LossKind(loss))
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not self.lr > 0:
            raise ValueError("lr must be positive")
        if self.mode is TrainMode.STEPWISE and self.loss is LossKind.MAE:
            raise ValueError("stepwise training needs a state loss (infidelity or l2)")
        if self.input_source is InputSource.CHANNEL and not self.channels:
            raise ValueError("channel input needs at least one channel kind")
        if not 0 < self.eta_max <= 1:
            raise ValueError("eta_max must lie in (0, 1]")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def steps_for(self, n_qubits: int) -> int:
        return self.n_steps if self.n_steps is not None else default_n_steps(n_qubits)

    def to_dict(self) -> dict:
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, Enum):
                d[k] = v.value
        d["channels"] = [c.value for c in self.channels]
        # workers affects speed only; leaving it out keeps checkpoints identical across worker counts
        del d["workers"]
        return d


@dataclass
class StageLog:
    losses: list[float] = field(default_factory=list)
    initial_loss: float = math.nan
    final_loss: float = math.nan

    @property
    def epochs_run(self) -> int:
        return len(self.losses)


def _as_list(datasets) -> list[Dataset]:
    return [datasets] if isinstance(datasets, Dataset) else list(datasets)


def _pool(datasets) -> tuple[int, np.ndarray]:
    datasets = _as_list(datasets)
    if not datasets or not any(len(d) for d in datasets):
        raise ValueError("training needs a non-empty dataset")
    sizes = {d.spec.n_qubits for d in datasets}
    if len(sizes) != 1:
        raise ValueError(f"datasets mix qubit counts {sorted(sizes)}")
    clean = np.stack([class_amplitudes(s) for d in datasets for s in d.samples])
    return sizes.pop(), clean


def _init_params(config: TrainConfig, size: int, stage: int) -> np.ndarray:
    if config.init is InitKind.ZEROS:
        return np.zeros(size)
    return stream(config.seed, "train-init", stage).uniform(-config.init_scale, config.init_scale, size)


def _channel_rows(psi: np.ndarray, n: int, config: TrainConfig, rngs) -> None:
    mats = np.empty((n, len(rngs), 2, 2), dtype=np.complex128)
    for r, g in enumerate(rngs):
        kind = config.channels[int(g.integers(len(config.channels)))]
        eta = config.eta_max * (1.0 - g.random())  # in (0, eta_max]
        spec = ChannelSpec(kind, eta, config.channel_p)
        for q, u in trajectory_unitaries(spec, n, g).items():
            mats[q, r] = u
    apply_local_rows(psi, n, mats)


def _endtoend_inputs(config, schedule, clean, idx, epoch, n):
    rngs = [stream(config.seed, "train-input", epoch, int(i)) for i in idx]
    if config.input_source is InputSource.FULL_NOISE:
        return np.stack([full_noise_amplitudes(n, g, config.phase_mode) for g in rngs])
    psi = clean[idx].copy()
    if config.input_source is InputSource.CHANNEL:
        _channel_rows(psi, n, config, rngs)
    else:
        step = schedule.n_steps if config.input_step is None else config.input_step
        forward_endpoint_buffer(psi, n, schedule, step, rngs)
    return psi


def _stepwise_pair(config, schedule, clean, idx, epoch, step, n):
    rngs = [stream(config.seed, "train-stepwise", step, epoch, int(i)) for i in idx]
    target = clean[idx].copy()
    if step > 1:
        apply_local_rows(target, n, accumulated_unitaries(schedule, n, rngs, 1, step - 1))
    psi = target.copy()
    apply_local_rows(psi, n, accumulated_unitaries(schedule, n, rngs, step, step))
    return psi, target


def _noise_inserts(config, descriptor, idx, epoch, stage):
    """Random per-row rotations after each down level, on the qubits that level keeps."""
    if config.noise_block_scale <= 0:
        return None
    inserts = {}
    for lvl, pos in enumerate(descriptor.level_ends):
        items = []
        for q in descriptor.down[lvl].kept:
            ang = np.stack(
                [stream(config.seed, "noise-block", stage, epoch, int(i), lvl, q).normal(0.0, config.noise_block_scale, 3) for i in idx]
            )
            mats = rotations_batch(X, ang[:, 0]) @ rotations_batch(Y, ang[:, 1]) @ rotations_batch(Z, ang[:, 2])
            items.append((q, np.ascontiguousarray(mats)))
        inserts[pos] = items
    return inserts


def _loss_targets(kind: LossKind, amps: np.ndarray) -> np.ndarray:
    return amps.real**2 + amps.imag**2 if kind is LossKind.MAE else amps


def _check_finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise FloatingPointError(f"non-finite {what}: {value}")
    return value


def _fit_stage(config, circuit, descriptor, params, make_batch, n_samples, stage) -> tuple[np.ndarray, StageLog]:
    """Adam over shuffled mini-batches; ``make_batch(idx, epoch)`` returns (inputs, target amplitudes)."""
    kind = config.loss
    log = StageLog()
    all_idx = np.arange(n_samples)
    psi0, tgt0 = make_batch(all_idx, 0)
    ref_targets = _loss_targets(kind, tgt0)

    def ref_loss(p):
        total = batch_loss(kind, circuit, p, psi0, ref_targets, chunk=DEFAULT_CHUNK, workers=config.workers)
        return _check_finite(total / n_samples, "loss")

    log.initial_loss = ref_loss(params)
    adam = AdamState.zeros(params.shape[0], lr=config.lr)
    best, since_best = math.inf, 0
    for epoch in range(config.epochs):
        order = stream(config.seed, "train-shuffle", stage, epoch).permutation(n_samples)
        total = 0.0
        for lo in range(0, n_samples, config.batch_size):
            idx = order[lo : lo + config.batch_size]
            psi, tgt = make_batch(idx, epoch)
            inserts = _noise_inserts(config, descriptor, idx, epoch, stage)
            loss, grad = batch_loss_grad(
                kind, circuit, params, psi, _loss_targets(kind, tgt), config.grad, inserts, DEFAULT_CHUNK, config.workers
            )
            total += _check_finite(loss, "loss")
            adam, params = adam_step(adam, params, grad / len(idx))
        epoch_loss = total / n_samples
        log.losses.append(epoch_loss)
        if epoch_loss <= STOP_LOSS:
            break
        if epoch_loss < best - config.min_delta:
            best, since_best = epoch_loss, 0
        else:
            since_best += 1
            if since_best >= config.patience:
                break
    log.final_loss = ref_loss(params)
    return params, log


def train(config: TrainConfig, datasets, circuit: Circuit, descriptor: QunetDescriptor) -> Checkpoint:
    """Train on one dataset or several (their samples are pooled) and return a checkpoint."""
    datasets = _as_list(datasets)
    n, clean = _pool(datasets)
    if n != descriptor.n_qubits or circuit.n_qubits != n:
        raise ValueError(f"network is for {descriptor.n_qubits} qubits, data has {n}")
    if circuit.param_count != descriptor.param_count:
        raise ValueError("circuit and descriptor disagree on the parameter count")
    schedule = NoiseSchedule(config.steps_for(n), config.scale)
    if config.input_step is not None and not 0 <= config.input_step <= schedule.n_steps:
        raise ValueError(f"input_step must lie in [0, {schedule.n_steps}]")
    size = descriptor.param_count
    stages, logs = [], []
    if config.mode is TrainMode.ENDTOEND:
        params, log = _fit_stage(
            config,
            circuit,
            descriptor,
            _init_params(config, size, 0),
            lambda idx, ep: (_endtoend_inputs(config, schedule, clean, idx, ep, n), clean[idx]),
            len(clean),
            0,
        )
        stages.append(params)
        logs.append(log)
    else:
        for step in range(schedule.n_steps, 0, -1):
            params, log = _fit_stage(
                config,
                circuit,
                descriptor,
                _init_params(config, size, step),
                lambda idx, ep, step=step: _stepwise_pair(config, schedule, clean, idx, ep, step, n),
                len(clean),
                step,
            )
            stages.append(params)
            logs.append(log)
    metadata = {
        "config": config.to_dict(),
        "n_steps": schedule.n_steps,
        "seed": config.seed,
        "samples": int(len(clean)),
        "classes": [d.spec.kind.value for d in datasets],
        "loss_curves": [log.losses for log in logs],
        "epochs_run": [log.epochs_run for log in logs],
        "initial_loss": [log.initial_loss for log in logs],
        "final_loss": [log.final_loss for log in logs],
    }
    return Checkpoint(descriptor, circuit, stages, metadata)


def final_loss(ckpt: Checkpoint) -> float:
    """Mean of the stage losses recorded at the end of training."""
    return float(np.mean(ckpt.metadata["final_loss"]))

