"""Loss families on softmax outputs.

All losses here are per-sample scalars built from the softmax probability
vector of a logit vector. Five families are supported:

* ``ce``             cross entropy, -log(p_t)
* ``focal``          low-confidence focal term, (1 - p_t)^g_lc * -log(p_t)
* ``asym``           asymmetric loss, a positive term on the target class plus
                     a negative term on every other class
* ``cyclical``       convex blend of the high-confidence term
                     (1 + p_t)^g_hc * -log(p_t) and the focal term, weighted by
                     a schedule value xi in [0, 1]
* ``asym-cyclical``  same blend with the asymmetric loss as the low branch

Probabilities that enter polynomial weight factors or log(1 - p) are clamped
to [EPS_PROB, 1 - EPS_PROB]; the -log(p_t) factor clamps from below only, so
a perfectly confident correct prediction scores exactly zero.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

EPS_PROB = 1e-12


class LossKind(str, enum.Enum):
    """Loss family selector. Values double as the CLI vocabulary."""

    CE = "ce"
    FL = "focal"
    ASL = "asym"
    CFL = "cyclical"
    CASL = "asym-cyclical"


@dataclass(frozen=True)
class LossSpec:
    """Fully resolved loss choice.

    gamma_lc / gamma_hc shape the low- and high-confidence blend branches,
    gamma_pos / gamma_neg shape the asymmetric terms, and cyclical_factor is
    carried along so a resolved experiment config is self-describing. Only
    the fields relevant to ``kind`` influence the loss value.
    """

    kind: LossKind
    gamma_lc: float = 0.0
    gamma_hc: float = 0.0
    gamma_pos: float = 0.0
    gamma_neg: float = 0.0
    cyclical_factor: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", LossKind(self.kind))
        for name in ("gamma_lc", "gamma_hc", "gamma_pos", "gamma_neg"):
            value = float(getattr(self, name))
            if not math.isfinite(value) or value < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
            object.__setattr__(self, name, value)
        factor = float(self.cyclical_factor)
        if not math.isfinite(factor) or factor < 1.0:
            raise ValueError(f"cyclical_factor must be finite and >= 1, got {factor!r}")
        object.__setattr__(self, "cyclical_factor", factor)


def _check_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0.0 or value > 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return value


def _check_gamma(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
    return value


def as_logits(values) -> np.ndarray:
    """Validate and convert one logit vector to a float64 array."""
    z = np.asarray(values, dtype=np.float64)
    if z.ndim != 1 or z.size < 2:
        raise ValueError(f"logits must be a 1-D vector with at least 2 entries, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("logits must be finite")
    return z


def softmax(logits) -> np.ndarray:
    """Stable softmax of one logit vector.

    The row maximum is subtracted before exponentiation, so arbitrarily large
    finite logits cannot overflow.
    """
    z = as_logits(logits)
    shifted = z - z.max()
    e = np.exp(shifted)
    return e / e.sum()


def p_t(prob: float, y: int) -> float:
    """Two-class target probability: prob when y == 1, else 1 - prob."""
    prob = _check_unit_interval("prob", prob)
    if y not in (0, 1):
        raise ValueError(f"y must be 0 or 1, got {y!r}")
    return prob if y == 1 else 1.0 - prob


def _nll_of(pt: float) -> float:
    # Lower clamp only: pt == 1 must give exactly 0 (positive zero, so the
    # value prints as 0 rather than -0).
    return 0.0 - math.log(max(pt, EPS_PROB))


def _clip(p):
    return np.clip(p, EPS_PROB, 1.0 - EPS_PROB)


def ce_term(pt: float) -> float:
    """Cross entropy -log(p_t), with p_t clamped to at least EPS_PROB."""
    pt = _check_unit_interval("pt", pt)
    return _nll_of(pt)


def fl_term(pt: float, gamma_lc: float) -> float:
    """Low-confidence focal term (1 - p_t)^gamma_lc * -log(p_t)."""
    pt = _check_unit_interval("pt", pt)
    gamma_lc = _check_gamma("gamma_lc", gamma_lc)
    return (1.0 - float(_clip(pt))) ** gamma_lc * _nll_of(pt)


def hc_term(pt: float, gamma_hc: float) -> float:
    """High-confidence term (1 + p_t)^gamma_hc * -log(p_t).

    The weight grows with confidence, so for gamma_hc > 0 this upper-bounds
    cross entropy on (0, 1] while focal lower-bounds it.
    """
    pt = _check_unit_interval("pt", pt)
    gamma_hc = _check_gamma("gamma_hc", gamma_hc)
    return (1.0 + float(_clip(pt))) ** gamma_hc * _nll_of(pt)


def asl_terms(prob: float, y: int, gamma_pos: float, gamma_neg: float) -> float:
    """Asymmetric loss of one two-class probability.

    Positive labels get (1 - p)^gamma_pos * -log(p); negative labels get
    p^gamma_neg * -log(1 - p). Both probabilities are clamped before the
    weight factor and before log(1 - p).
    """
    prob = _check_unit_interval("prob", prob)
    if y not in (0, 1):
        raise ValueError(f"y must be 0 or 1, got {y!r}")
    gamma_pos = _check_gamma("gamma_pos", gamma_pos)
    gamma_neg = _check_gamma("gamma_neg", gamma_neg)
    q = float(_clip(prob))
    if y == 1:
        return (1.0 - q) ** gamma_pos * _nll_of(prob)
    return q ** gamma_neg * -math.log1p(-q)


def _asl_negative_sum(p: np.ndarray, target, gamma_neg: float):
    """Sum of p_c^gamma_neg * -log(1 - p_c) over all classes c != target.

    Works on a 1-D probability vector with integer target, or on an (N, C)
    matrix with a length-N target array.
    """
    q = np.minimum(np.maximum(p, EPS_PROB), 1.0 - EPS_PROB)
    terms = q ** gamma_neg
    terms *= np.log1p(-q)
    if p.ndim == 1:
        terms[target] = 0.0
        return -float(terms.sum())
    terms[np.arange(p.shape[0]), target] = 0.0
    return -terms.sum(axis=1)


def _validate_target(target: int, num_classes: int) -> int:
    target = int(target)
    if target < 0 or target >= num_classes:
        raise ValueError(f"target must lie in [0, {num_classes}), got {target}")
    return target


def _validate_xi(xi: float) -> float:
    return _check_unit_interval("xi", xi)


def multiclass_loss(logits, target: int, spec: LossSpec, xi: float = 0.0) -> float:
    """Per-sample loss of one logit vector under ``spec``.

    The target class probability plays the p_t role for the ce, focal and
    high-confidence terms. The asymmetric families decompose one-vs-all: the
    target class contributes its positive term and every other class
    contributes its negative term on its own softmax probability. Blended
    families combine the branches as low + xi * (high - low), which makes the
    gamma = 0 collapse onto cross entropy exact.
    """
    z = as_logits(logits)
    target = _validate_target(target, z.size)
    xi = _validate_xi(xi)

    shifted = z - z.max()
    e = np.exp(shifted)
    s = float(e.sum())
    nll = math.log(s) - float(shifted[target])
    pt = float(e[target]) / s
    qt = min(max(pt, EPS_PROB), 1.0 - EPS_PROB)

    kind = spec.kind
    if kind is LossKind.CE:
        return nll
    if kind is LossKind.FL:
        return (1.0 - qt) ** spec.gamma_lc * nll
    if kind is LossKind.ASL:
        p = e / s
        return (1.0 - qt) ** spec.gamma_pos * nll + _asl_negative_sum(p, target, spec.gamma_neg)
    if kind is LossKind.CFL:
        low = (1.0 - qt) ** spec.gamma_lc * nll
        high = (1.0 + qt) ** spec.gamma_hc * nll
        return low + xi * (high - low)
    # asym-cyclical
    p = e / s
    low = (1.0 - qt) ** spec.gamma_pos * nll + _asl_negative_sum(p, target, spec.gamma_neg)
    high = (1.0 + qt) ** spec.gamma_hc * nll
    return low + xi * (high - low)


def _batch_forward(logits: np.ndarray, targets: np.ndarray):
    """Shared batch forward: probabilities, clamped target prob, target nll."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    s = e.sum(axis=1)
    p = e / s[:, None]
    rows = np.arange(logits.shape[0])
    nll = np.log(s) - shifted[rows, targets]
    qt = _clip(p[rows, targets])
    return p, qt, nll


def as_logit_matrix(values) -> np.ndarray:
    z = np.asarray(values, dtype=np.float64)
    if z.ndim != 2 or z.shape[0] < 1 or z.shape[1] < 2:
        raise ValueError(f"logits must be an (N, C) matrix with N >= 1 and C >= 2, got shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("logits must be finite")
    return z


def as_target_vector(values, num_samples: int, num_classes: int) -> np.ndarray:
    t = np.asarray(values)
    if t.ndim != 1 or t.shape[0] != num_samples:
        raise ValueError(f"targets must be a length-{num_samples} vector, got shape {t.shape}")
    if not np.issubdtype(t.dtype, np.integer):
        raise ValueError(f"targets must be integers, got dtype {t.dtype}")
    t = t.astype(np.int64)
    if t.size and (t.min() < 0 or t.max() >= num_classes):
        raise ValueError(f"targets must lie in [0, {num_classes})")
    return t


def per_sample_losses(logits, targets, spec: LossSpec, xi: float = 0.0) -> np.ndarray:
    """Vector of per-sample losses for an (N, C) logit batch."""
    z = as_logit_matrix(logits)
    t = as_target_vector(targets, z.shape[0], z.shape[1])
    xi = _validate_xi(xi)

    p, qt, nll = _batch_forward(z, t)
    kind = spec.kind
    if kind is LossKind.CE:
        return nll
    if kind is LossKind.FL:
        return (1.0 - qt) ** spec.gamma_lc * nll
    if kind is LossKind.ASL:
        return (1.0 - qt) ** spec.gamma_pos * nll + _asl_negative_sum(p, t, spec.gamma_neg)
    if kind is LossKind.CFL:
        low = (1.0 - qt) ** spec.gamma_lc * nll
        high = (1.0 + qt) ** spec.gamma_hc * nll
        return low + xi * (high - low)
    low = (1.0 - qt) ** spec.gamma_pos * nll + _asl_negative_sum(p, t, spec.gamma_neg)
    high = (1.0 + qt) ** spec.gamma_hc * nll
    return low + xi * (high - low)


def batch_loss(logits, targets, spec: LossSpec, xi: float = 0.0) -> float:
    """Mean per-sample loss over an (N, C) logit batch."""
    values = per_sample_losses(logits, targets, spec, xi)
    return float(values.mean())
