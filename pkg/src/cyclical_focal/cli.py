"""Command line front end.

Subcommands:

* ``train``      run one experiment from a JSON config, with flag overrides
* ``xi-table``   print the epoch/xi table of a schedule as CSV
* ``loss-eval``  evaluate one loss value (and gradient) from the shell

Exit codes: 0 on success, 2 on bad flags or config, 3 when training diverges.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .data import (
    ImbalanceProfile,
    ProfileKind,
    apply_profile,
    gaussian_mixture,
    load_csv,
    profile_c10,
    profile_c100,
)
from .losses import LossKind, LossSpec, asl_terms, ce_term, fl_term, hc_term, multiclass_loss
from .gradients import loss_grad
from .schedule import CycleSchedule, DenominatorConvention, xi_table
from .trainer import (
    MlpModel,
    TrainConfig,
    TrainingDiverged,
    evaluate,
    seeded_streams,
    train,
)


class ConfigError(ValueError):
    """A config file or flag combination that cannot be run."""


_LOSS_CHOICES = [k.value for k in LossKind]
_DENOM_CHOICES = [c.value for c in DenominatorConvention]

_LOSS_DEFAULTS = {
    "focal_loss": "ce",
    "gamma_lc": 0.0,
    "gamma_hc": 0.0,
    "gamma_pos": 0.0,
    "gamma_neg": 0.0,
    "cyclical_factor": 1.0,
    "schedule_denominator": "en",
}

_TRAIN_DEFAULTS = {
    "epochs": 30,
    "batch_size": 32,
    "base_lr": 0.05,
    "warmup_epochs": 0,
    "momentum": 0.0,
    "weight_decay": 0.0,
    "seed": 0,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cyclical-focal",
        description="Cyclical focal loss experiments on small MLPs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="run one experiment from a JSON config")
    p_train.add_argument("--config", required=True, help="path to the experiment JSON")
    p_train.add_argument("--focal_loss", choices=_LOSS_CHOICES, default=None)
    p_train.add_argument("--gamma_lc", type=float, default=None)
    p_train.add_argument("--gamma_hc", type=float, default=None)
    p_train.add_argument("--gamma_pos", type=float, default=None)
    p_train.add_argument("--gamma_neg", type=float, default=None)
    p_train.add_argument("--cyclical_factor", type=float, default=None)
    p_train.add_argument("--epochs", type=int, default=None)
    p_train.add_argument("--seed", type=int, default=None)
    p_train.add_argument("--schedule-denominator", choices=_DENOM_CHOICES, default=None)
    p_train.add_argument("--output_dir", default=None)
    p_train.set_defaults(func=cmd_train)

    p_xi = sub.add_parser("xi-table", help="print the epoch,xi schedule table")
    p_xi.add_argument("--epochs", type=int, required=True)
    p_xi.add_argument("--cyclical_factor", type=float, default=1.0)
    p_xi.add_argument("--schedule-denominator", choices=_DENOM_CHOICES, default="en")
    p_xi.set_defaults(func=cmd_xi_table)

    p_loss = sub.add_parser("loss-eval", help="evaluate one loss value from the shell")
    p_loss.add_argument("--focal_loss", choices=_LOSS_CHOICES, default="ce")
    p_loss.add_argument("--gamma_lc", type=float, default=0.0)
    p_loss.add_argument("--gamma_hc", type=float, default=0.0)
    p_loss.add_argument("--gamma_pos", type=float, default=0.0)
    p_loss.add_argument("--gamma_neg", type=float, default=0.0)
    p_loss.add_argument("--xi", type=float, default=0.0)
    p_loss.add_argument("--p_t", type=float, default=None, help="target probability, scalar mode")
    p_loss.add_argument("--logits", default=None, help="comma separated logit vector")
    p_loss.add_argument("--target", type=int, default=None, help="target class for --logits")
    p_loss.set_defaults(func=cmd_loss_eval)

    return parser


def _require(mapping: dict, key: str, where: str):
    if key not in mapping:
        raise ConfigError(f"{where}: missing required key {key!r}")
    return mapping[key]


def _named_profile(name: str, num_classes: int) -> ImbalanceProfile:
    kind = ProfileKind(name)
    if num_classes == 10:
        return profile_c10(kind)
    if num_classes == 100:
        return profile_c100(kind)
    raise ConfigError(f"profile {name!r} is defined for 10 or 100 classes, not {num_classes}")


def _build_datasets(cfg: dict):
    """Train and test batches from the dataset section."""
    kind = _require(cfg, "type", "dataset")
    if kind == "gaussian_mixture":
        classes = int(_require(cfg, "classes", "dataset"))
        dim = int(_require(cfg, "dim", "dataset"))
        mean_scale = float(_require(cfg, "mean_scale", "dataset"))
        seed = int(_require(cfg, "seed", "dataset"))
        if "train_counts" in cfg:
            train_counts = [int(c) for c in cfg["train_counts"]]
        elif "train_profile" in cfg:
            train_counts = list(_named_profile(cfg["train_profile"], classes).counts)
        elif "train_per_class" in cfg:
            train_counts = [int(cfg["train_per_class"])] * classes
        else:
            raise ConfigError(
                "dataset: need one of train_counts, train_profile, train_per_class"
            )
        if "test_counts" in cfg:
            test_counts = [int(c) for c in cfg["test_counts"]]
        else:
            test_counts = [int(_require(cfg, "test_per_class", "dataset"))] * classes
        if len(train_counts) != classes or len(test_counts) != classes:
            raise ConfigError("dataset: count lists must have one entry per class")
        train_batch = gaussian_mixture(train_counts, dim, mean_scale, seed)
        test_batch = gaussian_mixture(test_counts, dim, mean_scale, seed + 1)
        return train_batch, test_batch
    if kind == "csv":
        num_classes = cfg.get("num_classes")
        num_classes = int(num_classes) if num_classes is not None else None
        train_batch = load_csv(_require(cfg, "train_path", "dataset"), num_classes)
        test_batch = load_csv(_require(cfg, "test_path", "dataset"), train_batch.num_classes)
        profile = cfg.get("profile")
        if profile is not None:
            if isinstance(profile, str):
                prof = _named_profile(profile, train_batch.num_classes)
            else:
                prof = ImbalanceProfile(
                    name=ProfileKind.CUSTOM, counts=tuple(int(c) for c in profile)
                )
            train_batch = apply_profile(train_batch, prof)
        return train_batch, test_batch
    raise ConfigError(f"dataset: unknown type {kind!r}")


def _resolve_config(raw: dict, args) -> dict:
    """Merge file values, defaults and flag overrides into one full config."""
    for section in raw:
        if section not in ("dataset", "model", "train", "loss", "output_dir"):
            raise ConfigError(f"config: unknown section {section!r}")
    loss = dict(_LOSS_DEFAULTS)
    loss.update(raw.get("loss", {}))
    for key in ("focal_loss", "gamma_lc", "gamma_hc", "gamma_pos", "gamma_neg", "cyclical_factor"):
        override = getattr(args, key)
        if override is not None:
            loss[key] = override
    if args.schedule_denominator is not None:
        loss["schedule_denominator"] = args.schedule_denominator
    extra = set(loss) - set(_LOSS_DEFAULTS)
    if extra:
        raise ConfigError(f"loss: unknown keys {sorted(extra)}")

    train_cfg = dict(_TRAIN_DEFAULTS)
    train_cfg.update(raw.get("train", {}))
    if args.epochs is not None:
        train_cfg["epochs"] = args.epochs
    if args.seed is not None:
        train_cfg["seed"] = args.seed
    extra = set(train_cfg) - set(_TRAIN_DEFAULTS)
    if extra:
        raise ConfigError(f"train: unknown keys {sorted(extra)}")

    model = dict(raw.get("model", {"hidden": [16]}))
    model.setdefault("hidden", [16])
    extra = set(model) - {"hidden"}
    if extra:
        raise ConfigError(f"model: unknown keys {sorted(extra)}")

    if "dataset" not in raw:
        raise ConfigError("config: missing dataset section")

    output_dir = args.output_dir if args.output_dir is not None else raw.get("output_dir")
    if not output_dir:
        raise ConfigError("config: missing output_dir (file key or --output_dir)")

    return {
        "dataset": dict(raw["dataset"]),
        "model": model,
        "train": train_cfg,
        "loss": loss,
        "output_dir": str(output_dir),
    }


def _float_cell(value: float) -> str:
    # repr round-trips float64 exactly, which keeps reruns byte-identical.
    return repr(float(value))


def cmd_train(args) -> int:
    config_path = Path(args.config)
    try:
        raw = json.loads(config_path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {config_path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{config_path}: invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{config_path}: top level must be a JSON object")

    resolved = _resolve_config(raw, args)
    loss_cfg = resolved["loss"]
    train_cfg = resolved["train"]

    spec = LossSpec(
        kind=LossKind(loss_cfg["focal_loss"]),
        gamma_lc=loss_cfg["gamma_lc"],
        gamma_hc=loss_cfg["gamma_hc"],
        gamma_pos=loss_cfg["gamma_pos"],
        gamma_neg=loss_cfg["gamma_neg"],
        cyclical_factor=loss_cfg["cyclical_factor"],
    )
    schedule = CycleSchedule(
        total_epochs=train_cfg["epochs"],
        cyclical_factor=loss_cfg["cyclical_factor"],
        convention=DenominatorConvention(loss_cfg["schedule_denominator"]),
    )
    config = TrainConfig(
        epochs=train_cfg["epochs"],
        batch_size=train_cfg["batch_size"],
        base_lr=train_cfg["base_lr"],
        warmup_epochs=train_cfg["warmup_epochs"],
        momentum=train_cfg["momentum"],
        weight_decay=train_cfg["weight_decay"],
        seed=train_cfg["seed"],
        loss=spec,
        schedule=schedule,
    )

    train_batch, test_batch = _build_datasets(resolved["dataset"])
    hidden = [int(h) for h in resolved["model"]["hidden"]]
    init_rng, _ = seeded_streams(config.seed)
    model = MlpModel.initialize(train_batch.dim, hidden, train_batch.num_classes, init_rng)

    out_dir = Path(resolved["output_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.resolved.json").write_text(
        json.dumps(resolved, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    print(f"training {spec.kind.value} for {config.epochs} epochs", file=sys.stderr)
    model, trace = train(model, train_batch, test_batch, config)
    for rec in trace:
        print(
            f"epoch {rec.epoch}: xi={rec.xi:.6f} lr={rec.lr:.6g} "
            f"loss={rec.train_loss:.6f} acc={rec.test_accuracy:.4f}",
            file=sys.stderr,
        )

    with open(out_dir / "trace.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("epoch,xi,lr,train_loss,test_accuracy\n")
        for rec in trace:
            fh.write(
                f"{rec.epoch},{_float_cell(rec.xi)},{_float_cell(rec.lr)},"
                f"{_float_cell(rec.train_loss)},{_float_cell(rec.test_accuracy)}\n"
            )

    train_counts = np.bincount(train_batch.labels, minlength=train_batch.num_classes)
    report = evaluate(model, test_batch, train_counts)
    (out_dir / "metrics.json").write_text(
        json.dumps(report.to_json_dict(), indent=2) + "\n", encoding="utf-8"
    )
    print(f"final test accuracy {report.overall_accuracy:.4f}", file=sys.stderr)
    return 0


def cmd_xi_table(args) -> int:
    schedule = CycleSchedule(
        total_epochs=args.epochs,
        cyclical_factor=args.cyclical_factor,
        convention=DenominatorConvention(args.schedule_denominator),
    )
    print("epoch,xi")
    for epoch, value in enumerate(xi_table(schedule)):
        print(f"{epoch},{value:.6f}")
    return 0


def _scalar_loss(spec: LossSpec, pt: float, xi: float) -> float:
    """Loss of one target probability; asymmetric kinds use the positive branch."""
    if spec.kind is LossKind.CE:
        return ce_term(pt)
    if spec.kind is LossKind.FL:
        return fl_term(pt, spec.gamma_lc)
    if spec.kind is LossKind.ASL:
        return asl_terms(pt, 1, spec.gamma_pos, spec.gamma_neg)
    if spec.kind is LossKind.CFL:
        low = fl_term(pt, spec.gamma_lc)
    else:
        low = asl_terms(pt, 1, spec.gamma_pos, spec.gamma_neg)
    high = hc_term(pt, spec.gamma_hc)
    return low + xi * (high - low)


def cmd_loss_eval(args) -> int:
    spec = LossSpec(
        kind=LossKind(args.focal_loss),
        gamma_lc=args.gamma_lc,
        gamma_hc=args.gamma_hc,
        gamma_pos=args.gamma_pos,
        gamma_neg=args.gamma_neg,
    )
    if (args.p_t is None) == (args.logits is None):
        raise ConfigError("loss-eval: pass exactly one of --p_t or --logits")
    if args.p_t is not None:
        value = _scalar_loss(spec, args.p_t, args.xi)
        print(f"{value:.7g}")
        return 0
    if args.target is None:
        raise ConfigError("loss-eval: --logits requires --target")
    try:
        logits = [float(v) for v in args.logits.split(",")]
    except ValueError:
        raise ConfigError(f"loss-eval: bad logits {args.logits!r}") from None
    value = multiclass_loss(logits, args.target, spec, args.xi)
    grad = loss_grad(logits, args.target, spec, args.xi)
    print(f"{value:.7g}")
    print(",".join(f"{g:.7g}" for g in grad))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TrainingDiverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
