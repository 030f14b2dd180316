"""Pure numpy versions of the gate kernels in ``_ckernels.pyx``.

Same signatures and in-place semantics; used when the compiled extension
is unavailable and as the reference side of the kernel benchmark.
"""

import numpy as np


def _split(psi, n, target):
    # view as (batch, high bits, target bit, low bits)
    return psi.reshape(psi.shape[0], 1 << target, 2, 1 << (n - 1 - target))


def apply_1q(psi, u, n, target):
    v = _split(psi, n, target)
    a0 = v[:, :, 0, :].copy()
    a1 = v[:, :, 1, :]
    v[:, :, 0, :] = u[0, 0] * a0 + u[0, 1] * a1
    v[:, :, 1, :] = u[1, 0] * a0 + u[1, 1] * a1


def apply_1q_rows(psi, u, n, target):
    v = _split(psi, n, target)
    a0 = v[:, :, 0, :].copy()
    a1 = v[:, :, 1, :].copy()
    u = u[:, :, :, None, None]
    v[:, :, 0, :] = u[:, 0, 0] * a0 + u[:, 0, 1] * a1
    v[:, :, 1, :] = u[:, 1, 0] * a0 + u[:, 1, 1] * a1


def apply_2q(psi, u, n, q0, q1):
    batch = psi.shape[0]
    t = psi.reshape((batch,) + (2,) * n)
    moved = np.moveaxis(t, (q0 + 1, q1 + 1), (1, 2)).reshape(batch, 4, -1)
    out = np.einsum("ij,bjk->bik", u, moved).reshape((batch, 2, 2) + (2,) * (n - 2))
    t[...] = np.moveaxis(out, (1, 2), (q0 + 1, q1 + 1))


def apply_cnot(psi, n, control, target):
    batch = psi.shape[0]
    t = psi.reshape((batch,) + (2,) * n)
    idx1 = [slice(None)] * (n + 1)
    idx1[control + 1] = 1
    sub = t[tuple(idx1)]
    # the target axis index shifts down by one if it came after the control axis
    ax = target + 1 if target < control else target
    sub[...] = np.flip(sub, axis=ax).copy()
