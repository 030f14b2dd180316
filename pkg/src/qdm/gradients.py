"""Loss gradients of parameterized circuits: adjoint sweep, parameter shift, finite differences.

Batched entry points take a (batch, 2**n) input buffer and matching target
rows and return the *sum* over rows; callers divide by the batch size.
Rows are processed in fixed-size chunks whose partial sums are added in
chunk order, so results do not depend on the worker count.
"""

from concurrent.futures import ThreadPoolExecutor
from enum import Enum
import math

import numpy as np

from . import kernels
from .circuit import Circuit, apply_gate
from .losses import LossKind, loss_and_seed, loss_rows, target_row
from .statevector import QubitState

DEFAULT_CHUNK = 64


class GradMethod(str, Enum):
    ADJOINT = "adjoint"
    PARAM_SHIFT = "pshift"
    FINITE_DIFF = "fd"


def _gate_angles(circuit: Circuit, params: np.ndarray) -> list[float | None]:
    return [float(params[g.param.index]) if g.is_slot else g.param for g in circuit.gates]


def _forward(circuit: Circuit, angles, psi: np.ndarray, inserts=None) -> None:
    n = circuit.n_qubits
    inserts = inserts or {}
    for gi, g in enumerate(circuit.gates):
        for q, mats in inserts.get(gi, ()):
            kernels.apply_1q_rows(psi, mats, n, q)
        apply_gate(psi, n, g, angles[gi])
    for q, mats in inserts.get(len(circuit.gates), ()):
        kernels.apply_1q_rows(psi, mats, n, q)


def _undo_inserts(items, n: int, *bufs) -> None:
    for q, mats in reversed(items):
        dag = np.ascontiguousarray(np.conj(np.swapaxes(mats, 1, 2)))
        for b in bufs:
            kernels.apply_1q_rows(b, dag, n, q)


def _apply_generator(buf: np.ndarray, n: int, gate) -> None:
    p = np.ascontiguousarray(gate.kind.generator)
    if len(gate.qubits) == 1:
        kernels.apply_1q(buf, p, n, gate.qubits[0])
    else:
        kernels.apply_2q(buf, p, n, gate.qubits[0], gate.qubits[1])


def _slice_inserts(inserts, lo: int, hi: int):
    if not inserts:
        return None
    return {k: [(q, np.ascontiguousarray(m[lo:hi])) for q, m in v] for k, v in inserts.items()}


def _adjoint_chunk(kind, circuit, params, psi_in, target, inserts):
    n = circuit.n_qubits
    angles = _gate_angles(circuit, params)
    phi = np.array(psi_in, dtype=np.complex128, order="C", copy=True)
    _forward(circuit, angles, phi, inserts)
    losses, lam = loss_and_seed(kind, phi, target)
    lam = np.ascontiguousarray(lam)
    grad = np.zeros(circuit.param_count)
    inserts = inserts or {}
    _undo_inserts(inserts.get(len(circuit.gates), ()), n, phi, lam)
    for gi in range(len(circuit.gates) - 1, -1, -1):
        g = circuit.gates[gi]
        if g.is_slot:
            # d psi / d t = (-i/2) P psi just after the gate, so dL/dt = Im <lam|P|phi>
            mu = phi.copy()
            _apply_generator(mu, n, g)
            grad[g.param.index] += np.vdot(lam, mu).imag
        apply_gate(phi, n, g, angles[gi], adjoint=True)
        apply_gate(lam, n, g, angles[gi], adjoint=True)
        _undo_inserts(inserts.get(gi, ()), n, phi, lam)
    return float(losses.sum()), grad


def _loss_chunk(kind, circuit, angles, psi_in, target, inserts):
    psi = np.array(psi_in, dtype=np.complex128, order="C", copy=True)
    _forward(circuit, angles, psi, inserts)
    return loss_rows(kind, psi, target)


def _pshift_chunk(kind, circuit, params, psi_in, target, inserts):
    kind = LossKind(kind)
    angles = _gate_angles(circuit, params)
    psi = np.array(psi_in, dtype=np.complex128, order="C", copy=True)
    _forward(circuit, angles, psi, inserts)
    losses, lam = loss_and_seed(kind, psi, target)
    grad = np.zeros(circuit.param_count)

    def shifted(gi, delta):
        a = list(angles)
        a[gi] += delta
        out = np.array(psi_in, dtype=np.complex128, order="C", copy=True)
        _forward(circuit, a, out, inserts)
        return out

    for gi, g in enumerate(circuit.gates):
        if not g.is_slot:
            continue
        if kind is LossKind.L2:
            # amplitudes are trig polynomials in t/2: d psi/dt = (psi(t+pi) - psi(t-pi)) / 4
            dpsi = (shifted(gi, math.pi) - shifted(gi, -math.pi)) / 4.0
            grad[g.param.index] += 2.0 * np.vdot(lam, dpsi).real
            continue
        plus, minus = shifted(gi, math.pi / 2), shifted(gi, -math.pi / 2)
        if kind is LossKind.MAE:
            p = psi.real**2 + psi.imag**2
            dp = ((plus.real**2 + plus.imag**2) - (minus.real**2 + minus.imag**2)) / 2.0
            grad[g.param.index] += float(np.sum(np.sign(p - target) * dp)) / psi.shape[1]
        else:
            fp = np.abs(np.einsum("bi,bi->b", target.conj(), plus)) ** 2
            fm = np.abs(np.einsum("bi,bi->b", target.conj(), minus)) ** 2
            grad[g.param.index] -= float(np.sum(fp - fm)) / 2.0
    return float(losses.sum()), grad


def _fd_chunk(kind, circuit, params, psi_in, target, inserts, h=1e-5):
    base = _gate_angles(circuit, params)
    loss = float(_loss_chunk(kind, circuit, base, psi_in, target, inserts).sum())
    grad = np.zeros(circuit.param_count)
    for j in range(circuit.param_count):
        up, dn = params.copy(), params.copy()
        up[j] += h
        dn[j] -= h
        lu = _loss_chunk(kind, circuit, _gate_angles(circuit, up), psi_in, target, inserts).sum()
        ld = _loss_chunk(kind, circuit, _gate_angles(circuit, dn), psi_in, target, inserts).sum()
        grad[j] = (lu - ld) / (2 * h)
    return loss, grad


_CHUNK_FNS = {
    GradMethod.ADJOINT: _adjoint_chunk,
    GradMethod.PARAM_SHIFT: _pshift_chunk,
    GradMethod.FINITE_DIFF: _fd_chunk,
}


def _chunks(rows: int, chunk: int):
    return [(lo, min(lo + chunk, rows)) for lo in range(0, rows, chunk)]


def batch_loss_grad(
    kind,
    circuit: Circuit,
    params,
    psi_in: np.ndarray,
    targets: np.ndarray,
    method=GradMethod.ADJOINT,
    inserts=None,
    chunk: int = DEFAULT_CHUNK,
    workers: int = 1,
) -> tuple[float, np.ndarray]:
    """Summed loss and summed gradient over the rows of ``psi_in``."""
    kind, method = LossKind(kind), GradMethod(method)
    params = np.asarray(params, dtype=np.float64)
    fn = _CHUNK_FNS[method]
    spans = _chunks(psi_in.shape[0], chunk)

    def work(span):
        lo, hi = span
        return fn(kind, circuit, params, psi_in[lo:hi], targets[lo:hi], _slice_inserts(inserts, lo, hi))

    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(work, spans))
    else:
        parts = [work(s) for s in spans]
    loss = 0.0
    grad = np.zeros(circuit.param_count)
    for lv, gv in parts:
        loss += lv
        grad += gv
    return loss, grad


def batch_loss(kind, circuit, params, psi_in, targets, inserts=None, chunk=DEFAULT_CHUNK, workers=1) -> float:
    kind = LossKind(kind)
    angles = _gate_angles(circuit, np.asarray(params, dtype=np.float64))
    spans = _chunks(psi_in.shape[0], chunk)

    def work(span):
        lo, hi = span
        return float(_loss_chunk(kind, circuit, angles, psi_in[lo:hi], targets[lo:hi], _slice_inserts(inserts, lo, hi)).sum())

    if workers > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(work, spans))
    else:
        parts = [work(s) for s in spans]
    return float(sum(parts))


def _single(kind, circuit, params, state: QubitState, target):
    if state.n_qubits != circuit.n_qubits:
        raise ValueError(f"circuit has {circuit.n_qubits} qubits, input has {state.n_qubits}")
    t = target_row(kind, target)
    if t.shape != (state.dim,):
        raise ValueError(f"target has shape {t.shape}, expected ({state.dim},)")
    params = np.asarray(params, dtype=np.float64).reshape(-1)
    if params.shape[0] != circuit.param_count:
        raise ValueError(f"expected {circuit.param_count} parameters, got {params.shape[0]}")
    return params, state.amplitudes.reshape(1, -1), t.reshape(1, -1)


def loss_eval(kind, circuit: Circuit, params, input: QubitState, target) -> float:
    params, psi, t = _single(kind, circuit, params, input, target)
    return batch_loss(kind, circuit, params, psi, t)


def grad_adjoint(kind, circuit: Circuit, params, input: QubitState, target) -> np.ndarray:
    params, psi, t = _single(kind, circuit, params, input, target)
    return batch_loss_grad(kind, circuit, params, psi, t, GradMethod.ADJOINT)[1]


def grad_param_shift(kind, circuit: Circuit, params, input: QubitState, target) -> np.ndarray:
    params, psi, t = _single(kind, circuit, params, input, target)
    return batch_loss_grad(kind, circuit, params, psi, t, GradMethod.PARAM_SHIFT)[1]


def grad_finite_diff(kind, circuit: Circuit, params, input: QubitState, target) -> np.ndarray:
    params, psi, t = _single(kind, circuit, params, input, target)
    return batch_loss_grad(kind, circuit, params, psi, t, GradMethod.FINITE_DIFF)[1]
