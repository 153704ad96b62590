"""Command-line entry point: ``maintlm {train,regress,predict,synth}``."""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import dataset, ingest, mlp, report, stats, synth, trainer
from .errors import CliError, MaintlmError
from .ingest import InputVariant
from .trainer import TrainConfig

MANIFEST_NAME = "manifest.txt"
MODEL_NAME = "model.txt"


@dataclass(frozen=True)
class RunConfig:
    input_path: str
    variant: InputVariant = InputVariant.SUM
    hidden: int = 10
    split_seed: int = 0
    init_seed: int = 0
    train: TrainConfig = field(default_factory=TrainConfig)
    bins: int = 20
    out_dir: Optional[str] = None


def _read_input(path: str) -> tuple[str, str]:
    raw = Path(path).read_bytes()
    return raw.decode("utf-8"), hashlib.sha256(raw).hexdigest()


def manifest_text(cfg: RunConfig, input_sha256: str) -> str:
    """key=value lines sorted by key. out_dir is omitted: it is where the manifest lives."""
    entries = {
        "bins": cfg.bins,
        "hidden": cfg.hidden,
        "init_seed": cfg.init_seed,
        "input_path": str(Path(cfg.input_path).resolve()),
        "input_sha256": input_sha256,
        "split_seed": cfg.split_seed,
        "variant": cfg.variant.value,
    }
    for k, v in asdict(cfg.train).items():
        if k != "seed":
            entries[k] = v
    return "".join(f"{k}={v!r}\n" if isinstance(v, float) else f"{k}={v}\n"
                   for k, v in sorted(entries.items()))


_TRAIN_FLOATS = {"mu0", "mu_inc", "mu_dec", "mu_max", "min_grad", "mu_min"}
_TRAIN_INTS = {"max_epochs", "max_fail"}


def parse_manifest(text: str) -> tuple[RunConfig, Optional[str]]:
    kv = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise CliError(f"manifest line {lineno}: expected key=value")
        kv[key] = value
    try:
        tc = {k: float(kv[k]) for k in _TRAIN_FLOATS if k in kv}
        tc.update({k: int(kv[k]) for k in _TRAIN_INTS if k in kv})
        init_seed = int(kv.get("init_seed", 0))
        cfg = RunConfig(
            input_path=kv["input_path"],
            variant=InputVariant(kv.get("variant", "sum")),
            hidden=int(kv.get("hidden", 10)),
            split_seed=int(kv.get("split_seed", 0)),
            init_seed=init_seed,
            train=TrainConfig(seed=init_seed, **tc),
            bins=int(kv.get("bins", 20)),
        )
    except (KeyError, ValueError) as exc:
        if isinstance(exc, MaintlmError):
            raise
        raise CliError(f"invalid manifest ({exc!s})") from None
    return cfg, kv.get("input_sha256")


def run_pipeline(cfg: RunConfig, text: str, input_sha256: str):
    """Full ingest -> split -> train -> report run. Returns ({filename: contents}, TrainResult)."""
    records = ingest.parse_change_log(text)
    samples = ingest.build_samples(records, cfg.variant)
    split = dataset.split_indices(len(samples), cfg.split_seed)
    norm = dataset.fit_normalization(dataset.take(samples, split.train_idx))
    parts = [dataset.normalize_samples(dataset.take(samples, idx), norm)
             for idx in (split.train_idx, split.val_idx, split.test_idx)]
    model = mlp.init_model(cfg.hidden, cfg.init_seed)
    result = trainer.train(model, tuple(parts), cfg.train, norm=norm)

    xs = np.array([s.x for s in samples])
    ys = np.array([s.y for s in samples])
    out_norm = mlp.predict(result.best_model, dataset.normalize(xs, norm.x_min, norm.x_max))
    outputs = dataset.denormalize(out_norm, norm.y_min, norm.y_max)

    files = {
        MODEL_NAME: mlp.dumps_model(result.best_model, norm),
        "traces.csv": trainer.traces_to_csv(result.traces),
        "performance.svg": report.to_svg(report.performance_plot(result.traces, result.best_epoch)),
    }
    split_of = {}
    for name, idx in (("train", split.train_idx), ("val", split.val_idx), ("test", split.test_idx)):
        for i in idx:
            split_of[i] = name
        files[f"regression_{name}.svg"] = report.to_svg(
            report.regression_plot(ys[list(idx)], outputs[list(idx)], name))
    files["regression_all.svg"] = report.to_svg(report.regression_plot(ys, outputs, "all"))
    hist = stats.error_histogram(ys - outputs, cfg.bins)
    files["errhist.svg"] = report.to_svg(report.histogram_plot(hist))
    files["predictions.csv"] = report.predictions_to_csv(
        [(i, split_of[i], xs[i], ys[i], outputs[i]) for i in range(len(samples))])
    files[MANIFEST_NAME] = manifest_text(cfg, input_sha256)
    return files, result


def _write_all(out_dir: Path, files: dict[str, str]) -> None:
    """Write every file or none: anything written before a failure is removed."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    try:
        for name, content in files.items():
            path = out_dir / name
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                written.append(path)
                fh.write(content)
    except BaseException:
        for path in written:
            try:
                path.unlink()
            except OSError:
                pass
        raise


def cmd_train(cfg: RunConfig) -> trainer.TrainResult:
    text, digest = _read_input(cfg.input_path)
    files, result = run_pipeline(cfg, text, digest)
    _write_all(Path(cfg.out_dir or "."), files)
    return result


def cmd_regress(input_path: str, variant: InputVariant, out_dir: str = ".", bins: int = 20):
    text, _ = _read_input(input_path)
    samples = ingest.build_samples(ingest.parse_change_log(text), variant)
    xs = [s.x for s in samples]
    ys = [s.y for s in samples]
    summary = stats.ols_fit(xs, ys)
    resid = [y - (summary.slope * x + summary.intercept) for x, y in zip(xs, ys)]
    files = {
        "summary.csv": report.export_summary(summary),
        "errhist.svg": report.to_svg(report.histogram_plot(stats.error_histogram(resid, bins))),
    }
    _write_all(Path(out_dir), files)
    return summary


def cmd_predict(model_path: str, x: float) -> float:
    model, norm = mlp.loads_model(Path(model_path).read_text(encoding="utf-8"))
    u = mlp.forward(model, float(dataset.normalize(x, norm.x_min, norm.x_max)))
    return float(dataset.denormalize(u, norm.y_min, norm.y_max))


def cmd_synth(spec: synth.SynthSpec) -> str:
    return ingest.format_change_log(synth.generate(spec))


# -- argument parsing -----------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, f"{self.prog}: error: {message.splitlines()[0] if message else 'usage'}\n")


_VARIANTS = {v.value: v for v in InputVariant}


def _u64(s: str) -> int:
    v = int(s)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"{s} is not an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="maintlm", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = TrainConfig()
    t = sub.add_parser("train", help="train the network and write model, traces and plots")
    t.add_argument("input", nargs="?", help="change-log CSV")
    t.add_argument("--manifest", help="rerun from a manifest written by an earlier run")
    t.add_argument("--variant", choices=sorted(_VARIANTS), default=None)
    t.add_argument("--hidden", type=int, default=None)
    t.add_argument("--seed-split", type=_u64, default=None)
    t.add_argument("--seed-init", type=_u64, default=None)
    t.add_argument("--bins", type=int, default=None)
    for f in fields(TrainConfig):
        if f.name == "seed":
            continue
        t.add_argument("--" + f.name.replace("_", "-"), type=type(getattr(d, f.name)), default=None)
    t.add_argument("--out", required=True, help="output directory")

    r = sub.add_parser("regress", help="OLS of days on counts; writes summary.csv and errhist.svg")
    r.add_argument("input")
    r.add_argument("--variant", choices=sorted(_VARIANTS), default="sum")
    r.add_argument("--bins", type=int, default=20)
    r.add_argument("--out", default=".")

    pr = sub.add_parser("predict", help="predict maintenance days for a count")
    pr.add_argument("model")
    pr.add_argument("x", type=float)

    s = sub.add_parser("synth", help="write a synthetic change log")
    ds = synth.SynthSpec()
    s.add_argument("--n", type=int, default=ds.n)
    s.add_argument("--e-min", type=int, default=ds.e_range[0])
    s.add_argument("--e-max", type=int, default=ds.e_range[1])
    s.add_argument("--f-min", type=int, default=ds.f_range[0])
    s.add_argument("--f-max", type=int, default=ds.f_range[1])
    s.add_argument("--days-per-unit", type=float, default=ds.days_per_unit)
    noise = s.add_mutually_exclusive_group()
    noise.add_argument("--noise-sigma", type=float, default=None)
    noise.add_argument("--rho", type=float, default=synth.DEFAULT_RHO,
                       help="target population correlation of the sum variant (default 0.65)")
    s.add_argument("--seed", type=_u64, default=0)
    s.add_argument("--out", default=None, help="output file (default: stdout)")
    return p


def _train_config_from_args(args) -> RunConfig:
    if args.manifest:
        cfg, digest = parse_manifest(Path(args.manifest).read_text(encoding="utf-8"))
        _, actual = _read_input(cfg.input_path)
        if digest is not None and digest != actual:
            raise CliError(f"input {cfg.input_path} changed since the manifest was written")
    else:
        if not args.input:
            raise CliError("train needs an input CSV or --manifest")
        cfg = RunConfig(input_path=args.input)
    tc = {f.name: getattr(args, f.name) for f in fields(TrainConfig)
          if f.name != "seed" and getattr(args, f.name) is not None}
    init_seed = args.seed_init if args.seed_init is not None else cfg.init_seed
    tc_all = {**asdict(cfg.train), **tc, "seed": init_seed}
    return RunConfig(
        input_path=args.input or cfg.input_path,
        variant=_VARIANTS[args.variant] if args.variant else cfg.variant,
        hidden=args.hidden if args.hidden is not None else cfg.hidden,
        split_seed=args.seed_split if args.seed_split is not None else cfg.split_seed,
        init_seed=init_seed,
        train=TrainConfig(**tc_all),
        bins=args.bins if args.bins is not None else cfg.bins,
        out_dir=args.out,
    )


def _run(args) -> int:
    if args.command == "train":
        cfg = _train_config_from_args(args)
        result = cmd_train(cfg)
        print(f"best_epoch={result.best_epoch} stop_reason={result.stop_reason.value} "
              f"epochs={len(result.traces) - 1}")
    elif args.command == "regress":
        s = cmd_regress(args.input, _VARIANTS[args.variant], args.out, args.bins)
        sys.stdout.write(report.export_summary(s))
    elif args.command == "predict":
        print(repr(cmd_predict(args.model, args.x)))
    elif args.command == "synth":
        e_range, f_range = (args.e_min, args.e_max), (args.f_min, args.f_max)
        sigma = args.noise_sigma
        if sigma is None:
            sigma = synth.noise_sigma_for_rho(args.rho, e_range, f_range, args.days_per_unit)
        text = cmd_synth(synth.SynthSpec(args.n, e_range, f_range, args.days_per_unit,
                                         sigma, args.seed))
        if args.out:
            _write_all(Path(args.out).parent, {Path(args.out).name: text})
        else:
            sys.stdout.write(text)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except MaintlmError as exc:
        msg = str(exc)
    except OSError as exc:
        msg = f"io: {exc.strerror or exc}" + (f": {exc.filename}" if exc.filename else "")
    except UnicodeDecodeError as exc:
        msg = f"ingest: input is not UTF-8 ({exc.reason})"
    print(f"maintlm: error: {' '.join(msg.split())}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
