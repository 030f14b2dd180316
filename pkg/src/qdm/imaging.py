"""Probability distributions as 2D images, plus PGM and plot-data export.

Pixel (r, c) shows basis index r * cols + c: the row is the value of the
first ceil(n/2) qubits and the column the value of the rest. Pixel values
are 255 x probability and stay unquantized until PGM export.
"""

from dataclasses import dataclass
import csv
import io
from pathlib import Path

import numpy as np

PIXEL_MAX = 255.0


@dataclass(frozen=True, eq=False)
class StateImage:
    rows: int
    cols: int
    pixels: np.ndarray  # (rows, cols) float


def image_shape(n_qubits: int) -> tuple[int, int]:
    return 1 << ((n_qubits + 1) // 2), 1 << (n_qubits // 2)


def dist_to_image(dist, n_qubits: int) -> StateImage:
    dist = np.asarray(dist, dtype=np.float64)
    if dist.shape != (1 << n_qubits,):
        raise ValueError(f"distribution length {dist.shape[0]} does not match {n_qubits} qubits")
    rows, cols = image_shape(n_qubits)
    return StateImage(rows, cols, PIXEL_MAX * dist.reshape(rows, cols))


def pgm_bytes(image: StateImage) -> bytes:
    vals = np.rint(np.clip(image.pixels, 0.0, PIXEL_MAX)).astype(int)
    lines = ["P2", f"{image.cols} {image.rows}", "255"]
    lines += [" ".join(str(v) for v in row) for row in vals]
    return ("\n".join(lines) + "\n").encode("ascii")


def export_pgm(image: StateImage, path) -> None:
    Path(path).write_bytes(pgm_bytes(image))


def read_pgm(path) -> np.ndarray:
    tokens = Path(path).read_text(encoding="ascii").split()
    if tokens[0] != "P2":
        raise ValueError("not a plain PGM file")
    cols, rows = int(tokens[1]), int(tokens[2])
    return np.array([int(t) for t in tokens[4:]], dtype=int).reshape(rows, cols)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def export_plotdata(series: dict, path) -> None:
    """Write named (x, y) series as ``series,x,y`` rows, in insertion order."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["series", "x", "y"])
    for name, (xs, ys) in series.items():
        if len(xs) != len(ys):
            raise ValueError(f"series {name!r} has {len(xs)} x values but {len(ys)} y values")
        for x, y in zip(xs, ys):
            w.writerow([name, _fmt(x), _fmt(y)])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_plotdata(path) -> dict[str, tuple[list[float], list[float]]]:
    out: dict[str, tuple[list[float], list[float]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["series", "x", "y"]:
            raise ValueError("unexpected plot-data header")
        for name, x, y in reader:
            xs, ys = out.setdefault(name, ([], []))
            xs.append(float(x))
            ys.append(float(y))
    return out
