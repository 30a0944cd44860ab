"""Command-line interface.

Every subcommand prints JSON to stdout unless ``--out`` is given. Exit codes:
0 success, 2 usage error, 3 data/format error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .binarize import alignment_loss
from .demo import DemoConfig, sweep
from .errors import DataError, NumericalError, TTSAlignError
from .features import StftConfig, extract_energy, extract_f0, mel_spectrogram
from .gan_losses import mel_l1_loss
from .io import load_wav, read_feature, write_feature
from .metrics import log_f0_rmse, mcd
from .soft_alignment import beta_binomial_prior, distance_matrix, soft_align
from .variance import UpsampleConfig, gaussian_upsample, repeat_upsample

EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4


def _add_stft_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fft", type=int, default=1024)
    p.add_argument("--hop", type=int, default=256)
    p.add_argument("--win", type=int, default=None, help="window size (default: fft)")
    p.add_argument("--mels", type=int, default=80)
    p.add_argument("--fmin", type=float, default=0.0)
    p.add_argument("--fmax", type=float, default=0.0, help="0 means sample_rate / 2")


def _stft_config(args) -> StftConfig:
    return StftConfig(
        fft_size=args.fft,
        hop_size=args.hop,
        window_size=args.win,
        n_mels=args.mels,
        fmin=args.fmin,
        fmax=args.fmax or None,
    )


def _emit(payload: dict, out) -> None:
    text = json.dumps(payload, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_extract(args) -> None:
    wave = load_wav(args.wav)
    cfg = _stft_config(args)
    mel = mel_spectrogram(wave, cfg)
    pitch, voicing = extract_f0(wave, cfg)
    energy = extract_energy(wave, cfg)
    outdir = Path(args.outdir)
    meta = dict(sample_rate=wave.sample_rate, hop_size=cfg.hop_size)
    written = []
    for kind, values in (("mel", mel.frames), ("pitch", pitch),
                         ("voicing", voicing), ("energy", energy)):
        stem = write_feature(outdir / kind, values, kind, **meta)
        written.append(str(stem.with_suffix(".bin")))
    _emit({"frames": mel.n_frames, "sample_rate": wave.sample_rate, "files": written}, None)


def cmd_align(args) -> None:
    h, _ = read_feature(args.h)
    m, _ = read_feature(args.m)
    D = distance_matrix(h, m)
    prior = beta_binomial_prior(*D.shape, omega=args.omega) if args.prior else None
    soft = soft_align(D, prior)
    res = alignment_loss(soft.log_probs, reduction=args.reduction)
    _emit(
        {
            "durations": res.hard.durations.tolist(),
            "log_likelihood": res.forward.log_likelihood,
            "forward_sum_loss": res.forward_sum_loss,
            "binarization_loss": res.binarization_loss,
            "alignment_loss": res.total,
        },
        args.out,
    )


def cmd_align_demo(args) -> None:
    cfg = DemoConfig(
        n_tokens=args.tokens,
        n_frames=args.frames,
        dim=args.dim,
        steps=args.steps,
        step_size=args.lr,
        seed=args.seed,
        omega=args.omega,
        use_prior=not args.no_prior,
        noise=args.noise,
    )
    reports = sweep(cfg, range(args.seed, args.seed + args.seeds))
    steps = [r.steps_to_converge for r in reports if r.converged]
    payload = {
        "config": asdict(cfg),
        "summary": {
            "seeds": len(reports),
            "recovered": sum(r.recovered for r in reports),
            "converged": sum(r.converged for r in reports),
            "mean_steps_to_converge": float(np.mean(steps)) if steps else None,
        },
        "reports": [r.to_dict() for r in reports],
    }
    if not args.trace:
        for r in payload["reports"]:
            trace = r.pop("loss_trace")
            r["initial_loss"], r["final_loss"] = trace[0], trace[-1]
    _emit(payload, args.out)


def cmd_upsample(args) -> None:
    h, meta = read_feature(args.h)
    try:
        durations = json.loads(Path(args.durations).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise DataError(f"cannot read durations: {exc}") from exc
    if isinstance(durations, dict):
        durations = durations.get("durations")
    if args.repeat:
        out = repeat_upsample(h, durations)
    else:
        out = gaussian_upsample(h, durations, UpsampleConfig(args.sigma))
    if args.out:
        write_feature(args.out, out, "matrix",
                      sample_rate=meta.get("sample_rate"), hop_size=meta.get("hop_size"))
    else:
        _emit({"rows": out.shape[0], "cols": out.shape[1], "values": out.tolist()}, None)


def cmd_losses(args) -> None:
    ref, syn = load_wav(args.ref), load_wav(args.syn)
    _emit({"mel_l1": mel_l1_loss(ref, syn, _stft_config(args))}, args.out)


def cmd_metrics(args) -> None:
    ref, syn = load_wav(args.ref), load_wav(args.syn)
    fn = mcd if args.metric == "mcd" else log_f0_rmse
    report = fn(ref, syn, _stft_config(args), n_coeffs=args.coeffs)
    _emit(report.to_dict(), args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ttsalign", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="write mel/pitch/voicing/energy feature files")
    p.add_argument("--wav", required=True)
    p.add_argument("--outdir", required=True)
    _add_stft_args(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("align", help="durations and alignment losses from two embedding files")
    p.add_argument("--h", required=True, help="token embeddings (N x dim feature file)")
    p.add_argument("--m", required=True, help="frame embeddings (T x dim feature file)")
    p.add_argument("--prior", action="store_true", help="fuse the beta-binomial prior")
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--reduction", choices=("sum", "mean"), default="sum")
    p.add_argument("--out")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("align-demo", help="synthetic alignment-recovery experiment")
    p.add_argument("--tokens", type=int, default=10)
    p.add_argument("--frames", type=int, default=40)
    p.add_argument("--dim", type=int, default=16)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--lr", type=float, default=0.5)
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--seed", type=int, default=0, help="first seed of the sweep")
    p.add_argument("--noise", type=float, default=0.3)
    p.add_argument("--omega", type=float, default=1.0)
    p.add_argument("--no-prior", action="store_true")
    p.add_argument("--trace", action="store_true", help="include full loss traces")
    p.add_argument("--out")
    p.set_defaults(func=cmd_align_demo)

    p = sub.add_parser("upsample", help="expand token rows to frames")
    p.add_argument("--h", required=True)
    p.add_argument("--durations", required=True, help="JSON integer array")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--sigma", type=float, default=1.0)
    group.add_argument("--repeat", action="store_true", help="hard repetition baseline")
    p.add_argument("--out", help="output feature stem")
    p.set_defaults(func=cmd_upsample)

    p = sub.add_parser("losses", help="waveform losses")
    p.add_argument("loss", choices=("mel-l1",))
    p.add_argument("--ref", required=True)
    p.add_argument("--syn", required=True)
    p.add_argument("--out")
    _add_stft_args(p)
    p.set_defaults(func=cmd_losses)

    p = sub.add_parser("metrics", help="objective evaluation metrics")
    p.add_argument("metric", choices=("mcd", "f0rmse"))
    p.add_argument("--ref", required=True)
    p.add_argument("--syn", required=True)
    p.add_argument("--coeffs", type=int, default=25)
    p.add_argument("--json", action="store_true", help="accepted for compatibility; output is JSON")
    p.add_argument("--out")
    _add_stft_args(p)
    p.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (DataError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except TTSAlignError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
