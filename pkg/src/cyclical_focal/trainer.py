"""Deterministic training loop for a small ReLU MLP on labeled batches.

Two independent random streams derive from the run seed, one for parameter
initialization and one for epoch shuffles, so changing the loss family never
shifts the data order. Given the same seed, config and data, every trace
value is bitwise reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import SampleBatch
from .gradients import batch_grad
from .losses import LossSpec, per_sample_losses
from .metrics import MetricsReport, score
from .schedule import CycleSchedule, xi


class TrainingDiverged(RuntimeError):
    """Raised when a loss or parameter stops being finite."""

    def __init__(self, epoch: int, batch: int, what: str):
        super().__init__(f"training diverged at epoch {epoch}, batch {batch}: {what}")
        self.epoch = epoch
        self.batch = batch


def seeded_streams(seed: int):
    """Init and shuffle generators, independently spawned from one seed."""
    init_seq, shuffle_seq = np.random.SeedSequence(int(seed)).spawn(2)
    return np.random.default_rng(init_seq), np.random.default_rng(shuffle_seq)


@dataclass
class MlpModel:
    """Fully connected ReLU net; weights[i] has shape (fan_in, fan_out)."""

    weights: list
    biases: list

    @classmethod
    def initialize(cls, input_dim: int, hidden_dims, num_classes: int, rng: np.random.Generator):
        """Uniform init on [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer."""
        dims = [int(input_dim), *[int(h) for h in hidden_dims], int(num_classes)]
        if dims[0] < 1 or any(d < 1 for d in dims[1:-1]) or dims[-1] < 2:
            raise ValueError(f"bad layer sizes {dims}")
        weights, biases = [], []
        for fan_in, fan_out in zip(dims, dims[1:]):
            bound = 1.0 / math.sqrt(fan_in)
            weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            biases.append(rng.uniform(-bound, bound, size=fan_out))
        return cls(weights=weights, biases=biases)

    @property
    def input_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def num_classes(self) -> int:
        return self.weights[-1].shape[1]

    def forward(self, features: np.ndarray) -> np.ndarray:
        """Logits for an (N, input_dim) feature matrix."""
        return self._forward_cached(features)[0]

    def _forward_cached(self, features: np.ndarray):
        x = np.asarray(features, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.input_dim:
            raise ValueError(f"features must be (N, {self.input_dim}), got shape {x.shape}")
        inputs = []
        pre_acts = []
        a = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            inputs.append(a)
            z = a @ w + b
            if i < last:
                pre_acts.append(z)
                a = np.maximum(z, 0.0)
            else:
                a = z
        return a, (inputs, pre_acts)

    def _backward(self, caches, dlogits: np.ndarray):
        """Parameter gradients from the logit gradient of one batch."""
        inputs, pre_acts = caches
        grads_w = [None] * len(self.weights)
        grads_b = [None] * len(self.biases)
        d = dlogits
        for i in range(len(self.weights) - 1, -1, -1):
            grads_w[i] = inputs[i].T @ d
            grads_b[i] = d.sum(axis=0)
            if i > 0:
                d = (d @ self.weights[i].T) * (pre_acts[i - 1] > 0.0)
        return grads_w, grads_b


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer and loop settings; schedule length must equal epochs."""

    epochs: int
    batch_size: int
    base_lr: float
    loss: LossSpec
    schedule: CycleSchedule
    warmup_epochs: int = 0
    momentum: float = 0.0
    weight_decay: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if int(self.epochs) < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs!r}")
        object.__setattr__(self, "epochs", int(self.epochs))
        if int(self.batch_size) < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size!r}")
        object.__setattr__(self, "batch_size", int(self.batch_size))
        lr = float(self.base_lr)
        if not math.isfinite(lr) or lr <= 0.0:
            raise ValueError(f"base_lr must be finite and > 0, got {lr!r}")
        object.__setattr__(self, "base_lr", lr)
        warm = int(self.warmup_epochs)
        if warm < 0 or warm >= self.epochs:
            raise ValueError(f"warmup_epochs must lie in [0, epochs), got {warm}")
        object.__setattr__(self, "warmup_epochs", warm)
        mom = float(self.momentum)
        if not math.isfinite(mom) or mom < 0.0 or mom >= 1.0:
            raise ValueError(f"momentum must lie in [0, 1), got {mom!r}")
        object.__setattr__(self, "momentum", mom)
        wd = float(self.weight_decay)
        if not math.isfinite(wd) or wd < 0.0:
            raise ValueError(f"weight_decay must be finite and >= 0, got {wd!r}")
        object.__setattr__(self, "weight_decay", wd)
        object.__setattr__(self, "seed", int(self.seed))
        if self.schedule.total_epochs != self.epochs:
            raise ValueError(
                f"schedule covers {self.schedule.total_epochs} epochs but config trains {self.epochs}"
            )


def lr_at(config: TrainConfig, epoch: int) -> float:
    """Learning rate at one epoch: linear warmup, then cosine decay.

    Warmup climbs from base_lr / 100 to base_lr over warmup_epochs; the
    cosine phase then decays toward zero without reaching it, since the final
    epoch sits strictly inside the half period.
    """
    epoch = int(epoch)
    if epoch < 0 or epoch >= config.epochs:
        raise ValueError(f"epoch must lie in [0, {config.epochs}), got {epoch}")
    if epoch < config.warmup_epochs:
        start = config.base_lr / 100.0
        return start + (config.base_lr - start) * epoch / config.warmup_epochs
    span = config.epochs - config.warmup_epochs
    t = (epoch - config.warmup_epochs) / span
    return config.base_lr * 0.5 * (1.0 + math.cos(math.pi * t))


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    xi: float
    lr: float
    train_loss: float
    test_accuracy: float


def accuracy(model: MlpModel, batch: SampleBatch) -> float:
    preds = np.argmax(model.forward(batch.features), axis=1)
    return float(np.mean(preds == batch.labels))


def train(model: MlpModel, train_data: SampleBatch, test_data: SampleBatch, config: TrainConfig):
    """SGD with momentum over shuffled minibatches; returns (model, trace).

    The model is updated in place. Every epoch contributes one EpochRecord
    with the schedule value, learning rate, mean training loss and test
    accuracy. Non-finite losses or parameters abort with TrainingDiverged.
    """
    for name, batch in (("train", train_data), ("test", test_data)):
        if batch.dim != model.input_dim:
            raise ValueError(f"{name} features have dim {batch.dim}, model expects {model.input_dim}")
        if batch.num_classes > model.num_classes:
            raise ValueError(
                f"{name} batch declares {batch.num_classes} classes, model outputs {model.num_classes}"
            )
    _, shuffle_rng = seeded_streams(config.seed)
    velocity_w = [np.zeros_like(w) for w in model.weights]
    velocity_b = [np.zeros_like(b) for b in model.biases]
    n = len(train_data)
    trace = []
    for epoch in range(config.epochs):
        xi_e = xi(config.schedule, epoch)
        lr = lr_at(config, epoch)
        perm = shuffle_rng.permutation(n)
        loss_sum = 0.0
        for batch_index, start in enumerate(range(0, n, config.batch_size)):
            idx = perm[start : start + config.batch_size]
            feats = train_data.features[idx]
            labels = train_data.labels[idx]
            logits, caches = model._forward_cached(feats)
            if not np.all(np.isfinite(logits)):
                raise TrainingDiverged(epoch, batch_index, "non-finite logits")
            losses = per_sample_losses(logits, labels, config.loss, xi_e)
            if not np.all(np.isfinite(losses)):
                raise TrainingDiverged(epoch, batch_index, "non-finite loss")
            loss_sum += float(losses.sum())
            dlogits = batch_grad(logits, labels, config.loss, xi_e) / idx.size
            grads_w, grads_b = model._backward(caches, dlogits)
            for params, grads, vel in (
                (model.weights, grads_w, velocity_w),
                (model.biases, grads_b, velocity_b),
            ):
                for i in range(len(params)):
                    g = grads[i] + config.weight_decay * params[i]
                    vel[i] = config.momentum * vel[i] + g
                    params[i] -= lr * vel[i]
                    if not np.all(np.isfinite(params[i])):
                        raise TrainingDiverged(epoch, batch_index, "non-finite parameter")
        trace.append(
            EpochRecord(
                epoch=epoch,
                xi=xi_e,
                lr=lr,
                train_loss=loss_sum / n,
                test_accuracy=accuracy(model, test_data),
            )
        )
    return model, trace


def evaluate(model: MlpModel, batch: SampleBatch, train_counts) -> MetricsReport:
    """Full metrics report of the model on one batch.

    train_counts carries the per-class training-set sizes that define the
    shot groups; it is not derived from the evaluation batch.
    """
    preds = np.argmax(model.forward(batch.features), axis=1)
    return score(preds, batch.labels, train_counts)
