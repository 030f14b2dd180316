"""Batches of state vectors on disk.

    line 1      JSON header: format, format_version, n_qubits, count, plus free metadata
    lines 2..   ``<index> re_0 im_0 re_1 im_1 ...`` with 17 significant digits
"""

import json
from pathlib import Path

import numpy as np

FORMAT = "qdm-states"
FORMAT_VERSION = 1


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def save_states(path, amplitudes: np.ndarray, n_qubits: int, metadata: dict | None = None) -> None:
    amplitudes = np.asarray(amplitudes, dtype=np.complex128)
    if amplitudes.ndim != 2 or amplitudes.shape[1] != 1 << n_qubits:
        raise ValueError(f"expected shape (count, {1 << n_qubits}), got {amplitudes.shape}")
    header = dict(metadata or {})
    header.update(format=FORMAT, format_version=FORMAT_VERSION, n_qubits=n_qubits, count=amplitudes.shape[0])
    lines = [json.dumps(header, sort_keys=True)]
    for i, row in enumerate(amplitudes):
        lines.append(f"{i} " + " ".join(f"{_fmt(z.real)} {_fmt(z.imag)}" for z in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_states(path) -> tuple[np.ndarray, dict]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty states file")
    header = json.loads(lines[0])
    if header.get("format") != FORMAT:
        raise ValueError(f"{path}: not a states file")
    if header.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format_version {header.get('format_version')!r}")
    dim = 1 << int(header["n_qubits"])
    rows = [ln for ln in lines[1:] if ln.strip()]
    if len(rows) != int(header["count"]):
        raise ValueError(f"{path}: header says {header['count']} states, found {len(rows)}")
    out = np.empty((len(rows), dim), dtype=np.complex128)
    for i, line in enumerate(rows):
        vals = np.array([float(v) for v in line.split()[1:]])
        if vals.shape[0] != 2 * dim:
            raise ValueError(f"{path}: state {i} has {vals.shape[0] // 2} amplitudes, expected {dim}")
        out[i] = vals[0::2] + 1j * vals[1::2]
    return out, header
