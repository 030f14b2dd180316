"""Loss functions on batches of output states.

Each loss returns per-row values and the adjoint seed ``lam`` with
dL/dtheta = 2 Re <lam | d psi / d theta> for every row.
"""

from enum import Enum

import numpy as np

from .statevector import QubitState, probabilities


class LossKind(str, Enum):
    MAE = "mae"  # mean absolute error between probability vectors
    INFIDELITY = "infidelity"  # 1 - |<target|psi>|^2
    L2 = "l2"  # ||psi - target||^2, global-phase sensitive

    @property
    def wants_distribution(self) -> bool:
        return self is LossKind.MAE


def loss_rows(kind: LossKind, psi: np.ndarray, target: np.ndarray) -> np.ndarray:
    kind = LossKind(kind)
    if kind is LossKind.MAE:
        p = psi.real**2 + psi.imag**2
        return np.abs(p - target).mean(axis=1)
    if kind is LossKind.INFIDELITY:
        ov = np.einsum("bi,bi->b", target.conj(), psi)
        return 1.0 - np.abs(ov) ** 2
    d = psi - target
    return np.sum(d.real**2 + d.imag**2, axis=1)


def loss_and_seed(kind: LossKind, psi: np.ndarray, target: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    kind = LossKind(kind)
    if kind is LossKind.MAE:
        p = psi.real**2 + psi.imag**2
        d = p - target
        # sign subgradient, 0 at exact ties
        return np.abs(d).mean(axis=1), np.sign(d) * psi / psi.shape[1]
    if kind is LossKind.INFIDELITY:
        ov = np.einsum("bi,bi->b", target.conj(), psi)
        return 1.0 - np.abs(ov) ** 2, -ov[:, None] * target
    d = psi - target
    return np.sum(d.real**2 + d.imag**2, axis=1), d


def target_row(kind: LossKind, target) -> np.ndarray:
    """Target in the form the loss consumes: probabilities for MAE, amplitudes otherwise."""
    kind = LossKind(kind)
    if kind is LossKind.MAE:
        if isinstance(target, QubitState):
            return probabilities(target)
        if np.iscomplexobj(target):
            raise TypeError("MAE needs a probability vector or a state")
        return np.asarray(target, dtype=np.float64)
    if not isinstance(target, QubitState):
        raise TypeError(f"{kind.value} loss needs a target state, got {type(target).__name__}")
    return target.amplitudes
