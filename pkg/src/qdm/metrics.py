"""Class success rates and image-domain quality numbers."""

from dataclasses import dataclass
import math

import numpy as np

from .dataset import ClassSpec
from .statevector import QubitState, fidelity

PIXEL_MAX = 255.0


@dataclass(frozen=True)
class SuccessReport:
    spec: ClassSpec
    values: tuple[float, ...]
    q: float

    @property
    def count(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class ImageMetrics:
    mse: float
    psnr: float
    snr: float


def p_succ(dist, spec: ClassSpec) -> float:
    """Probability mass on the class support (|0..0>, |1..1> or the one-hot kets).

    Computed as one minus the off-support mass, so a distribution confined
    to the support scores exactly 1.
    """
    dist = np.asarray(dist, dtype=np.float64)
    if dist.shape != (1 << spec.n_qubits,):
        raise ValueError(f"distribution of length {dist.shape} does not match {spec.n_qubits} qubits")
    off = np.ones(dist.shape[0], dtype=bool)
    off[spec.support()] = False
    return float(min(1.0, max(0.0, 1.0 - dist[off].sum())))


def q_average(dists, spec: ClassSpec) -> SuccessReport:
    values = tuple(p_succ(d, spec) for d in dists)
    if not values:
        raise ValueError("need at least one distribution")
    return SuccessReport(spec, values, float(np.mean(values)))


def psnr_from_mse(mse: float) -> float:
    return math.inf if mse == 0 else 10.0 * math.log10(PIXEL_MAX**2 / mse)


def image_metrics(clean, test) -> ImageMetrics:
    """MSE, PSNR and SNR between two images whose pixels are 255 x probability."""
    a = np.asarray(getattr(clean, "pixels", clean), dtype=np.float64)
    b = np.asarray(getattr(test, "pixels", test), dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    diff = a - b
    err = float(np.sum(diff**2))
    mse = err / a.size
    snr = math.inf if err == 0 else 10.0 * math.log10(float(np.sum(a**2)) / err)
    return ImageMetrics(mse, psnr_from_mse(mse), snr)


def fidelity_report(clean: QubitState, denoised: QubitState) -> float:
    return fidelity(clean, denoised)
