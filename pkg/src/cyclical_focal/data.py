"""Datasets: labeled batches, long-tail count profiles, synthetic mixtures.

The CSV interchange format is one header line ``label,f0,...,f{D-1}`` followed
by one row per sample: an integer label and D finite floats. Floats are
written with repr, so a save/load round trip reproduces arrays exactly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class SampleBatch:
    """Immutable labeled batch: (N, D) float64 features, (N,) int64 labels."""

    features: np.ndarray
    labels: np.ndarray
    num_classes: int

    def __post_init__(self):
        feats = np.asarray(self.features, dtype=np.float64)
        labels = np.asarray(self.labels)
        if feats.ndim != 2 or feats.shape[0] < 1 or feats.shape[1] < 1:
            raise ValueError(f"features must be a non-empty (N, D) matrix, got shape {feats.shape}")
        if not np.all(np.isfinite(feats)):
            raise ValueError("features must be finite")
        if labels.ndim != 1 or labels.shape[0] != feats.shape[0]:
            raise ValueError(
                f"labels must be a length-{feats.shape[0]} vector, got shape {labels.shape}"
            )
        if not np.issubdtype(labels.dtype, np.integer):
            raise ValueError(f"labels must be integers, got dtype {labels.dtype}")
        labels = labels.astype(np.int64)
        num_classes = int(self.num_classes)
        if num_classes < 2:
            raise ValueError(f"num_classes must be >= 2, got {num_classes}")
        if labels.min() < 0 or labels.max() >= num_classes:
            raise ValueError(f"labels must lie in [0, {num_classes})")
        feats = feats.copy()
        labels = labels.copy()
        feats.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "num_classes", num_classes)

    def __len__(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.num_classes)


class ProfileKind(str, enum.Enum):
    BALANCED = "balanced"
    FIVE_THREE = "five_three"
    SIX_TWO = "six_two"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ImbalanceProfile:
    """Per-class training-set sizes, most frequent class first by convention."""

    name: ProfileKind
    counts: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "name", ProfileKind(self.name))
        counts = tuple(int(c) for c in self.counts)
        if len(counts) < 1:
            raise ValueError("counts must be non-empty")
        if any(c < 0 for c in counts):
            raise ValueError("counts must be >= 0")
        if self.name in (ProfileKind.FIVE_THREE, ProfileKind.SIX_TWO):
            if any(a < b for a, b in zip(counts, counts[1:])):
                raise ValueError(f"{self.name.value} counts must be non-increasing")
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return sum(self.counts)

    def to_json(self) -> list[int]:
        return list(self.counts)


_C10_HEAD = {ProfileKind.FIVE_THREE: 490, ProfileKind.SIX_TWO: 580}
_C10_STEP = {ProfileKind.FIVE_THREE: 20, ProfileKind.SIX_TWO: 40}
_C100_HEAD = {ProfileKind.FIVE_THREE: 50, ProfileKind.SIX_TWO: 60}
_C100_DIVISOR = {ProfileKind.FIVE_THREE: 5.0, ProfileKind.SIX_TWO: 2.5}
_PROFILE_TOTAL = 4000


def _check_imbalanced_kind(kind: ProfileKind) -> ProfileKind:
    kind = ProfileKind(kind)
    if kind not in (ProfileKind.FIVE_THREE, ProfileKind.SIX_TWO):
        raise ValueError(f"expected five_three or six_two, got {kind.value!r}")
    return kind


def profile_c10(kind: ProfileKind) -> ImbalanceProfile:
    """10-class linear ramp: 490..310 step -20, or 580..220 step -40."""
    kind = _check_imbalanced_kind(kind)
    head, step = _C10_HEAD[kind], _C10_STEP[kind]
    counts = tuple(head - step * i for i in range(10))
    return ImbalanceProfile(name=kind, counts=counts)


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def profile_c100(kind: ProfileKind) -> ImbalanceProfile:
    """100-class ramp: class i gets head - round(i / divisor) samples.

    five_three runs 50 down to 30 with divisor 5, six_two runs 60 down to 20
    with divisor 2.5, rounding half away from zero. The rounding overshoots
    the 4000-sample total slightly, so one sample is removed per class
    walking from the rarest class down until the total is exact.
    """
    kind = _check_imbalanced_kind(kind)
    head, divisor = _C100_HEAD[kind], _C100_DIVISOR[kind]
    counts = [head - _round_half_up(i / divisor) for i in range(100)]
    delta = sum(counts) - _PROFILE_TOTAL
    idx = len(counts) - 1
    while delta != 0:
        if idx < 0:
            raise RuntimeError("profile adjustment ran past class 0")
        adj = 1 if delta > 0 else -1
        counts[idx] -= adj
        delta -= adj
        idx -= 1
    return ImbalanceProfile(name=kind, counts=tuple(counts))


def apply_profile(pool: SampleBatch, profile: ImbalanceProfile) -> SampleBatch:
    """Deterministic subsample: the first counts[c] pool samples of each class.

    Selected samples keep their pool order. A class with fewer pool samples
    than requested is an error naming the class and the shortfall.
    """
    if len(profile.counts) != pool.num_classes:
        raise ValueError(
            f"profile has {len(profile.counts)} counts but pool has {pool.num_classes} classes"
        )
    keep = []
    for c, want in enumerate(profile.counts):
        idx = np.flatnonzero(pool.labels == c)
        if idx.size < want:
            raise ValueError(
                f"class {c}: profile requests {want} samples but pool has {idx.size} (short {want - idx.size})"
            )
        keep.append(idx[:want])
    order = np.sort(np.concatenate(keep))
    return SampleBatch(pool.features[order], pool.labels[order], pool.num_classes)


# class directions use their own fixed stream so that datasets drawn with
# different sample seeds still place every class at the same center
_DIRECTION_SEED = 20220816


def _class_directions(num_classes: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """Distinct per-class sign patterns (+/-1 per coordinate), one row each.

    The first two classes sit on +/- the all-ones diagonal, so two-class
    data at mean_scale m gets centers +/-(m, ..., m). Extra classes draw
    random sign patterns, rejecting duplicates; if the pattern space is
    exhausted the fallback is a random direction of the same length.
    """
    dirs = np.empty((num_classes, dim))
    dirs[0] = 1.0
    if num_classes > 1:
        dirs[1] = -1.0
    for c in range(2, num_classes):
        placed = False
        for _ in range(200):
            cand = rng.integers(0, 2, size=dim) * 2.0 - 1.0
            if not any(np.array_equal(cand, dirs[prev]) for prev in range(c)):
                dirs[c] = cand
                placed = True
                break
        if not placed:
            vec = rng.standard_normal(dim)
            norm = np.linalg.norm(vec)
            while norm == 0.0:
                vec = rng.standard_normal(dim)
                norm = np.linalg.norm(vec)
            dirs[c] = vec / norm * np.sqrt(dim)
    return dirs


def gaussian_mixture(
    counts,
    dim: int,
    mean_scale: float,
    seed: int,
) -> SampleBatch:
    """Isotropic unit-variance Gaussian blobs, one per class.

    Class c contributes counts[c] samples around mean_scale times a sign
    pattern; patterns are distinct across classes and depend only on the
    class count and dim, so train and test sets drawn with different seeds
    still share class geometry. The seed drives the noise: the same seed
    always reproduces the same batch. Samples are laid out in class blocks,
    class 0 first.
    """
    counts = [int(c) for c in counts]
    if len(counts) < 2:
        raise ValueError(f"need at least 2 classes, got {len(counts)}")
    if any(c < 1 for c in counts):
        raise ValueError("every class count must be >= 1")
    dim = int(dim)
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    mean_scale = float(mean_scale)
    if not np.isfinite(mean_scale) or mean_scale < 0.0:
        raise ValueError(f"mean_scale must be finite and >= 0, got {mean_scale!r}")
    rng = np.random.default_rng(int(seed))
    num_classes = len(counts)
    dirs = _class_directions(num_classes, dim, np.random.default_rng(_DIRECTION_SEED))
    blocks = []
    labels = []
    for c, n in enumerate(counts):
        noise = rng.standard_normal((n, dim))
        blocks.append(mean_scale * dirs[c] + noise)
        labels.append(np.full(n, c, dtype=np.int64))
    return SampleBatch(np.vstack(blocks), np.concatenate(labels), num_classes)


def save_csv(batch: SampleBatch, path) -> None:
    """Write a batch in the interchange format with exact float round trip."""
    cols = ",".join(f"f{j}" for j in range(batch.dim))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"label,{cols}\n")
        for label, row in zip(batch.labels, batch.features):
            fh.write(f"{int(label)},{','.join(repr(float(v)) for v in row)}\n")


def load_csv(path, num_classes: int | None = None) -> SampleBatch:
    """Read a batch from the interchange format.

    Errors carry 1-based line numbers. When num_classes is omitted it is
    inferred as max label + 1 (at least 2).
    """
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    header = lines[0].split(",")
    if header[0] != "label" or len(header) < 2 or header[1:] != [f"f{j}" for j in range(len(header) - 1)]:
        raise ValueError(f"{path}: line 1: header must be label,f0,...,f{{D-1}}, got {lines[0]!r}")
    dim = len(header) - 1
    labels = []
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            raise ValueError(f"{path}: line {lineno}: blank line")
        parts = line.split(",")
        if len(parts) != dim + 1:
            raise ValueError(
                f"{path}: line {lineno}: expected {dim + 1} fields, got {len(parts)}"
            )
        try:
            label = int(parts[0])
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: bad label {parts[0]!r}") from None
        try:
            values = [float(v) for v in parts[1:]]
        except ValueError:
            raise ValueError(f"{path}: line {lineno}: bad feature value") from None
        if not all(np.isfinite(values)):
            raise ValueError(f"{path}: line {lineno}: non-finite feature value")
        if label < 0:
            raise ValueError(f"{path}: line {lineno}: negative label {label}")
        if num_classes is not None and label >= num_classes:
            raise ValueError(
                f"{path}: line {lineno}: label {label} >= declared num_classes {num_classes}"
            )
        labels.append(label)
        rows.append(values)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    inferred = num_classes if num_classes is not None else max(max(labels) + 1, 2)
    return SampleBatch(np.array(rows), np.array(labels, dtype=np.int64), inferred)
