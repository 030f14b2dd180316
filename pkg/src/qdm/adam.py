"""Bias-corrected Adam, as a pure function of (state, params, gradient)."""

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True, eq=False)
class AdamState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0
    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def zeros(cls, size: int, **hyper) -> "AdamState":
        return cls(np.zeros(size), np.zeros(size), **hyper)


def adam_step(state: AdamState, params, gradient) -> tuple[AdamState, np.ndarray]:
    params = np.asarray(params, dtype=np.float64)
    g = np.asarray(gradient, dtype=np.float64)
    if not (params.shape == g.shape == state.m.shape):
        raise ValueError(f"shape mismatch: params {params.shape}, gradient {g.shape}, moments {state.m.shape}")
    if not np.all(np.isfinite(g)):
        raise FloatingPointError("gradient has non-finite entries")
    t = state.step + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * g
    v = state.beta2 * state.v + (1.0 - state.beta2) * g * g
    m_hat = m / (1.0 - state.beta1**t)
    v_hat = v / (1.0 - state.beta2**t)
    new_params = params - state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return replace(state, m=m, v=v, step=t), new_params
