"""Trained-network checkpoints in a versioned line-oriented text format.

    line 1      JSON header: format, format_version, network descriptor, stage_count
    next lines  ``stage <k> v0 v1 ...`` with 17 significant digits
    last line   ``metadata <json>``

Stages are stored in the order generation applies them. JSON is written
with sorted keys so equal checkpoints give equal bytes.
"""

from dataclasses import dataclass, field
import json
from pathlib import Path

import numpy as np

from .circuit import Circuit
from .qunet import QunetDescriptor, descriptor_from_dict

FORMAT_NAME = "qdm-checkpoint"
FORMAT_VERSION = 1


@dataclass(eq=False)
class Checkpoint:
    descriptor: QunetDescriptor
    circuit: Circuit
    stages: list[np.ndarray]
    metadata: dict = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if not self.stages:
            raise ValueError("a checkpoint needs at least one stage")
        p = self.descriptor.param_count
        self.stages = [np.asarray(s, dtype=np.float64).reshape(-1) for s in self.stages]
        for k, s in enumerate(self.stages):
            if s.shape[0] != p:
                raise ValueError(f"stage {k} has {s.shape[0]} parameters, network has {p}")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def checkpoint_text(ckpt: Checkpoint) -> str:
    header = {"format": FORMAT_NAME, "format_version": ckpt.format_version, "stage_count": len(ckpt.stages)}
    header.update(ckpt.descriptor.to_dict())
    lines = [json.dumps(header, sort_keys=True)]
    lines += [f"stage {k} " + " ".join(_fmt(v) for v in s) for k, s in enumerate(ckpt.stages)]
    lines.append("metadata " + json.dumps(ckpt.metadata, sort_keys=True))
    return "\n".join(lines) + "\n"


def save_checkpoint(ckpt: Checkpoint, path) -> None:
    Path(path).write_text(checkpoint_text(ckpt), encoding="utf-8")


def parse_checkpoint(text: str) -> Checkpoint:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty checkpoint")
    header = json.loads(lines[0])
    if header.get("format") != FORMAT_NAME:
        raise ValueError("not a checkpoint file")
    if header.get("format_version") != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint version {header.get('format_version')!r}")
    circuit, desc = descriptor_from_dict(header)
    count = int(header["stage_count"])
    if len(lines) != count + 2:
        raise ValueError(f"expected {count} stage lines and a metadata line")
    stages = []
    for k, line in enumerate(lines[1 : count + 1]):
        tag, idx, *vals = line.split()
        if tag != "stage" or int(idx) != k:
            raise ValueError(f"malformed stage line {k}")
        stages.append(np.array([float(v) for v in vals]))
    tag, _, meta = lines[-1].partition(" ")
    if tag != "metadata":
        raise ValueError("missing metadata line")
    return Checkpoint(desc, circuit, stages, json.loads(meta), header["format_version"])


def load_checkpoint(path) -> Checkpoint:
    return parse_checkpoint(Path(path).read_text(encoding="utf-8"))
