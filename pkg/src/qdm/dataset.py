"""GHZ-like and W-like training states: sampling, preparation circuits, persistence.

Dataset file layout (text, UTF-8):

    line 1      JSON header: format, format_version, class, n_qubits, count,
                master_seed, coefficients ("complex" or "real")
    lines 2..   one record per sample:
                ``<index> <sample_seed> <re_1> <im_1> ... <re_k> <im_k>``
                with k = 2 (GHZ-like) or n_qubits (W-like); numbers use 17
                significant digits so they parse back exactly.
"""

from dataclasses import dataclass
from enum import Enum
import json
import math
from pathlib import Path

import numpy as np

from .circuit import Circuit, CircuitBuilder
from .gates import GateKind
from .rng import stream
from .statevector import QubitState

FORMAT = "qdm-dataset"
FORMAT_VERSION = 1
NORM_TOL = 1e-12


class ClassKind(str, Enum):
    GHZ = "ghz"
    W = "w"


class CoefficientMode(str, Enum):
    COMPLEX = "complex"
    REAL = "real"  # real and non-negative


@dataclass(frozen=True)
class ClassSpec:
    kind: ClassKind
    n_qubits: int

    def __post_init__(self):
        object.__setattr__(self, "kind", ClassKind(self.kind))
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be >= 1")

    def support(self) -> np.ndarray:
        n = self.n_qubits
        if self.kind is ClassKind.GHZ:
            return np.array([0, (1 << n) - 1])
        # |1 at qubit k> has index 2^(n-1-k), in the order alpha_1..alpha_n
        return np.array([1 << (n - 1 - k) for k in range(n)])

    @property
    def n_coeffs(self) -> int:
        return 2 if self.kind is ClassKind.GHZ else self.n_qubits


@dataclass(frozen=True, eq=False)
class SampleParams:
    spec: ClassSpec
    coeffs: np.ndarray  # complex, length spec.n_coeffs
    seed: int = 0

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128).reshape(-1)
        if c.shape[0] != self.spec.n_coeffs:
            raise ValueError(f"{self.spec.kind.value} needs {self.spec.n_coeffs} coefficients, got {c.shape[0]}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def norm_error(self) -> float:
        return abs(float(np.sum(np.abs(self.coeffs) ** 2)) - 1.0)

    def check(self) -> None:
        if self.norm_error() > NORM_TOL:
            raise ValueError(f"coefficients are not normalized (|sum|a|^2 - 1| = {self.norm_error():.3g})")


@dataclass(frozen=True)
class Dataset:
    spec: ClassSpec
    samples: tuple[SampleParams, ...]
    master_seed: int
    coefficients: CoefficientMode = CoefficientMode.COMPLEX
    format_version: int = FORMAT_VERSION

    def __len__(self):
        return len(self.samples)


def sample_class_params(spec: ClassSpec, rng: np.random.Generator, mode=CoefficientMode.COMPLEX, seed: int = 0) -> SampleParams:
    """Uniform draw from the unit sphere of the class subspace."""
    k = spec.n_coeffs
    if CoefficientMode(mode) is CoefficientMode.COMPLEX:
        z = rng.standard_normal(k) + 1j * rng.standard_normal(k)
    else:
        z = np.abs(rng.standard_normal(k)).astype(np.complex128)
    return SampleParams(spec, z / np.linalg.norm(z), seed)


def make_dataset(spec: ClassSpec, count: int, master_seed: int, mode=CoefficientMode.COMPLEX) -> Dataset:
    if count < 1:
        raise ValueError("count must be >= 1")
    samples = []
    for i in range(count):
        sample_seed = int(stream(master_seed, "dataset-sample-seed", i).integers(0, 2**62))
        samples.append(sample_class_params(spec, stream(sample_seed, "class-params"), mode, sample_seed))
    return Dataset(spec, tuple(samples), master_seed, CoefficientMode(mode))


def class_amplitudes(params: SampleParams) -> np.ndarray:
    amps = np.zeros(1 << params.spec.n_qubits, dtype=np.complex128)
    amps[params.spec.support()] = params.coeffs
    return amps


def class_state(params: SampleParams) -> QubitState:
    params.check()
    return QubitState(params.spec.n_qubits, class_amplitudes(params))


def target_dist(params: SampleParams) -> np.ndarray:
    params.check()
    return np.abs(class_amplitudes(params)) ** 2


def prep_circuit(params: SampleParams) -> Circuit:
    """Fully bound circuit taking |0...0> to the sample's state (up to global phase)."""
    params.check()
    n = params.spec.n_qubits
    c = params.coeffs
    b = CircuitBuilder(n)
    if params.spec.kind is ClassKind.GHZ:
        alpha, beta = c
        b.add(GateKind.RY, 0, angle=2 * math.atan2(abs(beta), abs(alpha)))
        b.add(GateKind.RZ, 0, angle=float(np.angle(beta) - np.angle(alpha)))
        for q in range(n - 1):
            b.add(GateKind.CNOT, q, q + 1)
        return b.build()

    # single-excitation staircase: move the excitation down the register,
    # leaving |alpha_k| behind on qubit k
    mags = np.abs(c)
    tails = np.sqrt(np.cumsum((mags**2)[::-1])[::-1])  # tails[k] = ||alpha_k..alpha_n||
    b.add(GateKind.X, 0)
    for k in range(n - 1):
        theta = 2 * math.atan2(float(tails[k + 1]), float(mags[k]))
        _controlled_ry(b, k, k + 1, theta)
        b.add(GateKind.CNOT, k + 1, k)
    for k in range(n):
        # Rz on every qubit: relative phase e^{i phi_k} on |e_k>, up to a global phase
        b.add(GateKind.RZ, k, angle=float(np.angle(c[k])))
    return b.build()


def _controlled_ry(b: CircuitBuilder, control: int, target: int, theta: float) -> None:
    b.add(GateKind.RY, target, angle=theta / 2)
    b.add(GateKind.CNOT, control, target)
    b.add(GateKind.RY, target, angle=-theta / 2)
    b.add(GateKind.CNOT, control, target)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_dataset(dataset: Dataset, path) -> None:
    header = {
        "format": FORMAT,
        "format_version": dataset.format_version,
        "class": dataset.spec.kind.value,
        "n_qubits": dataset.spec.n_qubits,
        "count": len(dataset.samples),
        "master_seed": dataset.master_seed,
        "coefficients": dataset.coefficients.value,
    }
    lines = [json.dumps(header, sort_keys=True)]
    for i, s in enumerate(dataset.samples):
        nums = " ".join(f"{_fmt(z.real)} {_fmt(z.imag)}" for z in s.coeffs)
        lines.append(f"{i} {s.seed} {nums}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_dataset(path) -> Dataset:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text:
        raise ValueError(f"{path}: empty dataset file")
    try:
        header = json.loads(text[0])
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: malformed header") from exc
    if header.get("format") != FORMAT:
        raise ValueError(f"{path}: not a dataset file")
    if header.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format_version {header.get('format_version')!r}")
    spec = ClassSpec(ClassKind(header["class"]), int(header["n_qubits"]))
    records = [ln for ln in text[1:] if ln.strip()]
    if len(records) != int(header["count"]):
        raise ValueError(f"{path}: header says {header['count']} samples, found {len(records)}")
    samples = []
    for line in records:
        fields = line.split()
        idx, seed = int(fields[0]), int(fields[1])
        vals = [float(v) for v in fields[2:]]
        if len(vals) != 2 * spec.n_coeffs:
            raise ValueError(f"{path}: sample {idx} has {len(vals) // 2} coefficients, expected {spec.n_coeffs}")
        coeffs = np.array(vals[0::2]) + 1j * np.array(vals[1::2])
        sample = SampleParams(spec, coeffs, seed)
        if sample.norm_error() > NORM_TOL:
            raise ValueError(f"{path}: sample {idx} is not normalized (sum |a|^2 = {float(np.sum(np.abs(coeffs) ** 2)):.12g})")
        samples.append(sample)
    return Dataset(
        spec,
        tuple(samples),
        int(header["master_seed"]),
        CoefficientMode(header.get("coefficients", "complex")),
        int(header["format_version"]),
    )
