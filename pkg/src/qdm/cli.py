"""Command-line entry point: ``qdm <command> ...``.

Exit codes: 0 success, 2 usage, 3 I/O (unreadable or malformed files),
4 numeric failure. Every command writes ``<out>.manifest.json`` next to its
primary output with the command line, configuration, seeds, output
checksums, wall-clock time and library version.
"""

import argparse
from concurrent.futures import ThreadPoolExecutor
import hashlib
import json
import logging
import math
from pathlib import Path
import sys
import time

import numpy as np

from . import __version__, kernels
from .channels import ChannelKind, ChannelSpec, E1Axes, corrupt_buffer
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .dataset import ClassKind, ClassSpec, CoefficientMode, class_amplitudes, load_dataset, make_dataset, save_dataset
from .diffusion import PhaseMode, full_noise_amplitudes, generate_buffer, midpoint_state
from .gradients import GradMethod
from .imaging import dist_to_image, export_pgm, export_plotdata
from .losses import LossKind
from .metrics import image_metrics, p_succ, q_average
from .qunet import build_qunet
from .rng import stream
from .statefile import load_states, save_states
from .statevector import QubitState, row_probabilities
from .training import InitKind, InputSource, TrainConfig, TrainMode, final_loss, train

log = logging.getLogger("qdm")

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _sibling(path: Path, suffix: str) -> Path:
    return path.with_name(path.name + suffix)


def _read(loader, path):
    try:
        return loader(path)
    except (OSError, ValueError, KeyError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n", encoding="utf-8")


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _eta_list(text: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad eta list {text!r}") from None
    if not vals or any(not 0 < v <= 1 for v in vals):
        raise argparse.ArgumentTypeError("every eta must lie in (0, 1]")
    return vals


# ---- commands -------------------------------------------------------------


def cmd_gen_data(args) -> dict:
    spec = ClassSpec(ClassKind(args.class_), args.qubits)
    ds = make_dataset(spec, args.count, args.seed, CoefficientMode(args.coefficients))
    out = Path(args.out)
    save_dataset(ds, out)
    return {"outputs": [out], "seeds": {"master": args.seed}}


def cmd_train(args) -> dict:
    datasets = [_read(load_dataset, p) for p in args.data]
    n = datasets[0].spec.n_qubits
    if any(d.spec.n_qubits != n for d in datasets):
        raise UsageError("all --data files must have the same qubit count")
    try:
        config = TrainConfig(
            mode=TrainMode(args.mode),
            loss=LossKind(args.loss) if args.loss else None,
            epochs=args.epochs,
            batch_size=args.batch_size,
            lr=args.lr,
            seed=args.seed,
            grad=GradMethod(args.grad),
            n_steps=args.steps,
            input_source=InputSource(args.input),
            input_step=args.input_step,
            eta_max=args.eta_max,
            init=InitKind(args.init),
            workers=args.workers,
        )
        circuit, desc = build_qunet(n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.epochs == 0:
        log.warning("--epochs 0: writing the initial parameters untrained")
    ckpt = train(config, datasets, circuit, desc)
    out = Path(args.out)
    save_checkpoint(ckpt, out)
    epochs = ckpt.metadata["epochs_run"]
    print(f"final loss {final_loss(ckpt):.10g} after {sum(epochs)} epochs over {len(epochs)} stage(s)")
    return {"outputs": [out], "seeds": {"train": args.seed}, "config": config.to_dict()}


def _model_class(ckpt: Checkpoint, flag: str | None, n: int) -> ClassSpec:
    if flag:
        return ClassSpec(ClassKind(flag), n)
    classes = ckpt.metadata.get("classes") or ["ghz"]
    return ClassSpec(ClassKind(classes[0]), n)


def cmd_generate(args) -> dict:
    ckpt = _read(load_checkpoint, args.model)
    n = ckpt.descriptor.n_qubits
    spec = _model_class(ckpt, args.class_, n)
    init = np.stack([full_noise_amplitudes(n, stream(args.seed, "generate-input", i), args.phase) for i in range(args.count)])
    psi = init.copy()
    inter = generate_buffer(ckpt, psi, keep_intermediates=True)
    probs = row_probabilities(psi)
    if not np.all(np.isfinite(probs)):
        raise FloatingPointError("generation produced non-finite amplitudes")
    success = q_average(probs, spec)
    values, q = list(success.values), success.q
    out = Path(args.out)
    save_states(out, psi, n, {"class": spec.kind.value, "seed": args.seed, "phase": PhaseMode(args.phase).value})
    report = _sibling(out, ".report.json")
    _dump_json(
        report,
        {"format": "qdm-generation-report", "format_version": 1, "class": spec.kind.value, "count": args.count, "p_succ": values, "q": q},
    )
    stage_q = [q_average(row_probabilities(s), spec).q for s in inter]
    plot = _sibling(out, ".plot.csv")
    export_plotdata(
        {"p_succ": (list(range(args.count)), values), "q_by_stage": (list(range(1, len(stage_q) + 1)), stage_q)}, plot
    )
    outputs = [out, report, plot]
    if args.images:
        img_dir = Path(args.images)
        img_dir.mkdir(parents=True, exist_ok=True)
        for i in range(args.count):
            mid = midpoint_state(ckpt, QubitState(n, init[i]))
            for tag, amps in (("initial", init[i]), ("mid", mid.amplitudes), ("final", psi[i])):
                path = img_dir / f"state{i:04d}_{tag}.pgm"
                export_pgm(dist_to_image(row_probabilities(amps), n), path)
                outputs.append(path)
    print(f"Q = {q:.6f} over {args.count} state(s)")
    return {"outputs": outputs, "seeds": {"generate": args.seed}}


def _denoise_sample(ckpt, clean, spec, channel, trajectories, seed, index):
    n = spec.n_qubits
    psi = np.repeat(clean.reshape(1, -1), trajectories, axis=0)
    corrupt_buffer(psi, n, channel, [stream(seed, "denoise-trajectory", index, j) for j in range(trajectories)])
    before = psi.copy()
    generate_buffer(ckpt, psi)
    rows = {}
    clean_img = dist_to_image(row_probabilities(clean), n)
    for tag, buf in (("before", before), ("after", psi)):
        dist = np.mean(row_probabilities(buf), axis=0)
        m = image_metrics(clean_img, dist_to_image(dist, n))
        fid = np.abs(buf @ clean.conj()) ** 2
        rows.update(
            {
                f"success_{tag}": p_succ(dist, spec),
                f"fidelity_{tag}": float(np.mean(fid)),
                f"mse_{tag}": m.mse,
                f"psnr_{tag}": m.psnr,
                f"snr_{tag}": m.snr,
            }
        )
    if not all(math.isfinite(rows[k]) for k in ("success_after", "fidelity_after", "mse_after")):
        raise FloatingPointError(f"non-finite metrics for sample {index}")
    rows["index"] = index
    return rows


def cmd_denoise(args) -> dict:
    ckpt = _read(load_checkpoint, args.model)
    ds = _read(load_dataset, args.data)
    n = ckpt.descriptor.n_qubits
    if ds.spec.n_qubits != n:
        raise UsageError(f"model is for {n} qubits, data has {ds.spec.n_qubits}")
    try:
        channels = [ChannelSpec(ChannelKind(args.noise), eta, args.p, e1_axes=E1Axes(args.e1_axes)) for eta in args.eta]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    clean = [class_amplitudes(s) for s in ds.samples]
    sweep = []
    with ThreadPoolExecutor(max_workers=args.workers) as ex:
        for ch in channels:
            rows = list(
                ex.map(
                    lambda i: _denoise_sample(ckpt, clean[i], ds.spec, ch, args.trajectories, args.seed, i),
                    range(len(clean)),
                )
            )
            summary = {"eta": ch.eta}
            for key in ("success_before", "success_after", "fidelity_before", "fidelity_after", "mse_before", "mse_after"):
                summary[f"mean_{key}"] = float(np.mean([r[key] for r in rows]))
            summary["samples"] = rows
            sweep.append(summary)
    out = Path(args.out)
    _dump_json(
        out,
        {
            "format": "qdm-denoise-report",
            "format_version": 1,
            "class": ds.spec.kind.value,
            "noise": args.noise,
            "p": args.p,
            "e1_axes": args.e1_axes,
            "trajectories": args.trajectories,
            "seed": args.seed,
            "sweep": sweep,
        },
    )
    etas = [s["eta"] for s in sweep]
    plot = _sibling(out, ".plot.csv")
    export_plotdata(
        {k: (etas, [s[f"mean_{k}"] for s in sweep]) for k in ("success_before", "success_after", "fidelity_before", "fidelity_after")},
        plot,
    )
    for s in sweep:
        print(f"eta {s['eta']:g}: success {s['mean_success_before']:.4f} -> {s['mean_success_after']:.4f}, fidelity {s['mean_fidelity_after']:.4f}")
    return {"outputs": [out, plot], "seeds": {"denoise": args.seed}}


def cmd_eval(args) -> dict:
    amps, header = _read(load_states, args.states)
    n = int(header["n_qubits"])
    spec = ClassSpec(ClassKind(args.class_), n)
    success = q_average(row_probabilities(amps), spec)
    out = Path(args.out)
    _dump_json(
        out,
        {
            "format": "qdm-eval-report",
            "format_version": 1,
            "class": spec.kind.value,
            "count": success.count,
            "p_succ": list(success.values),
            "q": success.q,
        },
    )
    print(f"Q = {success.q:.6f} over {success.count} state(s)")
    return {"outputs": [out], "seeds": {}}


def cmd_viz(args) -> dict:
    amps, header = _read(load_states, args.states)
    if not 0 <= args.index < amps.shape[0]:
        raise UsageError(f"--index {args.index} out of range for {amps.shape[0]} state(s)")
    out = Path(args.out)
    export_pgm(dist_to_image(row_probabilities(amps[args.index]), int(header["n_qubits"])), out)
    return {"outputs": [out], "seeds": {}}


# ---- parser and driver ----------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qdm", description="Quantum denoising diffusion toolkit.")
    p.add_argument("--version", action="version", version=f"qdm {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-data", help="sample a GHZ-like or W-like dataset")
    g.add_argument("--class", dest="class_", choices=[c.value for c in ClassKind], required=True)
    g.add_argument("--qubits", type=_positive_int, required=True)
    g.add_argument("--count", type=_positive_int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--coefficients", choices=[c.value for c in CoefficientMode], default="complex")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen_data)

    t = sub.add_parser("train", help="train a network on one or more datasets")
    t.add_argument("--data", nargs="+", required=True)
    t.add_argument("--steps", type=_positive_int, default=None, help="diffusion steps (default 2 x qubits)")
    t.add_argument("--mode", choices=[m.value for m in TrainMode], default="endtoend")
    t.add_argument("--loss", choices=[k.value for k in LossKind], default=None)
    t.add_argument("--epochs", type=int, default=200)
    t.add_argument("--batch-size", type=_positive_int, default=50)
    t.add_argument("--lr", type=float, default=0.01)
    t.add_argument("--grad", choices=[m.value for m in GradMethod], default="adjoint")
    t.add_argument("--input", choices=[s.value for s in InputSource], default="forward")
    t.add_argument("--input-step", type=int, default=None)
    t.add_argument("--eta-max", type=float, default=0.25, help="largest channel strength for --input channel")
    t.add_argument("--init", choices=[k.value for k in InitKind], default="uniform")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--workers", type=_positive_int, default=1)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("generate", help="generate states from full-noise inputs")
    e.add_argument("--model", required=True)
    e.add_argument("--count", type=_positive_int, required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--class", dest="class_", choices=[c.value for c in ClassKind], default=None)
    e.add_argument("--phase", choices=[m.value for m in PhaseMode], default=PhaseMode.RANDOM.value)
    e.add_argument("--images", default=None, help="directory for initial/mid/final PGM panels")
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_generate)

    d = sub.add_parser("denoise", help="corrupt samples with a noise channel and denoise them")
    d.add_argument("--model", required=True)
    d.add_argument("--data", required=True)
    d.add_argument("--noise", choices=[c.value for c in ChannelKind], required=True)
    d.add_argument("--eta", type=_eta_list, required=True, help="strength or comma-separated sweep")
    d.add_argument("--p", type=float, default=0.75)
    d.add_argument("--e1-axes", choices=[a.value for a in E1Axes], default="both")
    d.add_argument("--trajectories", type=_positive_int, default=16)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--workers", type=_positive_int, default=1)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_denoise)

    v = sub.add_parser("eval", help="recompute success rates from a states file")
    v.add_argument("--states", required=True)
    v.add_argument("--class", dest="class_", choices=[c.value for c in ClassKind], required=True)
    v.add_argument("--out", required=True)
    v.set_defaults(func=cmd_eval)

    z = sub.add_parser("viz", help="render one stored state as a PGM image")
    z.add_argument("--states", required=True)
    z.add_argument("--index", type=int, default=0)
    z.add_argument("--out", required=True)
    z.set_defaults(func=cmd_viz)
    return p


def _manifest(args, argv, result, elapsed) -> dict:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    config.update(result.get("config", {}))
    return {
        "command": args.command,
        "argv": list(argv),
        "config": config,
        "seeds": result.get("seeds", {}),
        "checksums": {str(p): _sha256(Path(p)) for p in result["outputs"]},
        "wall_clock_s": elapsed,
        "version": __version__,
        "kernel_backend": kernels.backend_name(),
    }


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    try:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        result = args.func(args)
        out = Path(args.out)
        _dump_json(_sibling(out, ".manifest.json"), _manifest(args, argv, result, time.perf_counter() - start))
    except UsageError as exc:
        print(f"qdm {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, OSError) as exc:
        print(f"qdm {args.command}: {exc}", file=sys.stderr)
        return EXIT_IO
    except FloatingPointError as exc:
        print(f"qdm {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
