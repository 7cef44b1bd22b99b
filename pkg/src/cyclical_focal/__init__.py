"""Cyclical focal losses with analytic gradients and a deterministic harness."""

from .losses import (
    EPS_PROB,
    LossKind,
    LossSpec,
    as_logits,
    asl_terms,
    batch_loss,
    ce_term,
    fl_term,
    hc_term,
    multiclass_loss,
    p_t,
    per_sample_losses,
    softmax,
)
from .schedule import CycleSchedule, DenominatorConvention, xi, xi_table
from .gradients import batch_grad, fd_grad, loss_grad, rel_error
from .data import (
    ImbalanceProfile,
    ProfileKind,
    SampleBatch,
    apply_profile,
    gaussian_mixture,
    load_csv,
    profile_c10,
    profile_c100,
    save_csv,
)
from .metrics import MetricsReport, score, shot_group
from .trainer import (
    EpochRecord,
    MlpModel,
    TrainConfig,
    TrainingDiverged,
    accuracy,
    evaluate,
    lr_at,
    seeded_streams,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "EPS_PROB",
    "LossKind",
    "LossSpec",
    "as_logits",
    "asl_terms",
    "batch_loss",
    "ce_term",
    "fl_term",
    "hc_term",
    "multiclass_loss",
    "p_t",
    "per_sample_losses",
    "softmax",
    "CycleSchedule",
    "DenominatorConvention",
    "xi",
    "xi_table",
    "batch_grad",
    "fd_grad",
    "loss_grad",
    "rel_error",
    "ImbalanceProfile",
    "ProfileKind",
    "SampleBatch",
    "apply_profile",
    "gaussian_mixture",
    "load_csv",
    "profile_c10",
    "profile_c100",
    "save_csv",
    "MetricsReport",
    "score",
    "shot_group",
    "EpochRecord",
    "MlpModel",
    "TrainConfig",
    "TrainingDiverged",
    "accuracy",
    "evaluate",
    "lr_at",
    "seeded_streams",
    "train",
    "__version__",
]
