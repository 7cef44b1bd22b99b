"""Train CE and cyclical focal loss on the same long-tail mixture.

Both runs share one seed, so initialization and batch order are identical
and the final reports differ only through the loss. The 6/2 profile keeps
every class above 100 training samples, so the report carries a single
many_shot group; per-class accuracy deltas on the smallest classes stand in
for a few-shot comparison at this scale. Directional results here are
single-seed observations, not assertions.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

import numpy as np

from cyclical_focal import (
    CycleSchedule,
    LossSpec,
    MlpModel,
    ProfileKind,
    TrainConfig,
    gaussian_mixture,
    profile_c10,
    seeded_streams,
    train,
)
from cyclical_focal.schedule import xi
from cyclical_focal.trainer import evaluate

TAIL_CLASSES = 4


def run_one(spec, train_data, test_data, args):
    config = TrainConfig(
        epochs=args.epochs,
        batch_size=args.batch_size,
        base_lr=args.base_lr,
        loss=spec,
        schedule=CycleSchedule(args.epochs, spec.cyclical_factor),
        warmup_epochs=args.warmup_epochs,
        momentum=args.momentum,
        weight_decay=args.weight_decay,
        seed=args.seed,
    )
    init_rng, _ = seeded_streams(config.seed)
    model = MlpModel.initialize(
        train_data.dim, [args.hidden], train_data.num_classes, init_rng
    )
    model, trace = train(model, train_data, test_data, config)
    report = evaluate(model, test_data, train_data.class_counts())
    xi_ok = all(rec.xi == xi(config.schedule, rec.epoch) for rec in trace)
    return report, trace, xi_ok


def summarize(name, report, trace, xi_ok):
    print(f"== {name} ==")
    print(f"overall accuracy : {report.overall_accuracy:.4f}")
    print(f"macro F1         : {report.macro_f1:.4f}")
    for group, value in report.shot_groups.items():
        print(f"{group:17s}: {value:.4f}")
    print(f"final train loss : {trace[-1].train_loss:.4f}")
    print(f"xi trace matches schedule at every epoch: {xi_ok}")
    print()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--epochs", type=int, default=60)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--dim", type=int, default=6)
    parser.add_argument("--mean-scale", type=float, default=1.5)
    parser.add_argument("--hidden", type=int, default=32)
    parser.add_argument("--batch-size", type=int, default=64)
    parser.add_argument("--base-lr", type=float, default=0.05)
    parser.add_argument("--warmup-epochs", type=int, default=5)
    parser.add_argument("--momentum", type=float, default=0.9)
    parser.add_argument("--weight-decay", type=float, default=1e-4)
    parser.add_argument("--gamma", type=float, default=2.0)
    parser.add_argument("--cyclical-factor", type=float, default=4.0)
    parser.add_argument("--test-per-class", type=int, default=100)
    parser.add_argument("--output-dir", default=None)
    args = parser.parse_args(argv)

    profile = profile_c10(ProfileKind.SIX_TWO)
    train_data = gaussian_mixture(profile.counts, args.dim, args.mean_scale, args.seed)
    test_data = gaussian_mixture(
        [args.test_per_class] * len(profile.counts), args.dim, args.mean_scale, args.seed + 1
    )
    print(
        f"train counts {list(profile.counts)} (total {profile.total}), "
        f"test {args.test_per_class}/class, dim {args.dim}, seed {args.seed}"
    )
    print()

    specs = {
        "ce": LossSpec(kind="ce"),
        "cyclical": LossSpec(
            kind="cyclical",
            gamma_lc=args.gamma,
            gamma_hc=args.gamma,
            cyclical_factor=args.cyclical_factor,
        ),
    }
    results = {}
    for name, spec in specs.items():
        report, trace, xi_ok = run_one(spec, train_data, test_data, args)
        results[name] = (report, trace, xi_ok)
        summarize(name, report, trace, xi_ok)

    ce_acc = results["ce"][0].per_class_accuracy
    cfl_acc = results["cyclical"][0].per_class_accuracy
    print("per-class accuracy (train count, ce, cyclical, delta):")
    for c, count in enumerate(profile.counts):
        delta = cfl_acc[c] - ce_acc[c]
        print(f"  class {c}: {count:4d}  {ce_acc[c]:.3f}  {cfl_acc[c]:.3f}  {delta:+.3f}")
    tail = range(len(profile.counts) - TAIL_CLASSES, len(profile.counts))
    ce_tail = float(np.mean([ce_acc[c] for c in tail]))
    cfl_tail = float(np.mean([cfl_acc[c] for c in tail]))
    print()
    print(
        f"tail ({TAIL_CLASSES} smallest classes) mean accuracy: "
        f"ce {ce_tail:.4f} vs cyclical {cfl_tail:.4f} ({cfl_tail - ce_tail:+.4f})"
    )

    if args.output_dir is not None:
        out = Path(args.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        payload = {
            name: {
                "metrics": report.to_json_dict(),
                "xi_trace_matches_schedule": xi_ok,
                "final_train_loss": trace[-1].train_loss,
            }
            for name, (report, trace, xi_ok) in results.items()
        }
        payload["tail_mean_accuracy"] = {"ce": ce_tail, "cyclical": cfl_tail}
        (out / "comparison.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        print(f"wrote {out / 'comparison.json'}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
