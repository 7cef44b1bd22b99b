"""Closed-form loss gradients with respect to logits.

Every family factors through the softmax Jacobian dp_c/dz_j = p_c (d_cj - p_j).
For the terms that depend only on the target probability, the chain rule
collapses to a per-sample scalar coefficient on (p_j - d_tj), the familiar
cross entropy direction. The asymmetric negative sum adds a correction that
touches every class.

Probability clamping is treated as a constant region: where the clamp is
active, the derivative of the weight factor with respect to the probability
is zero. The -log(p_t) factor keeps its exact softmax derivative, since the
log is evaluated from the shifted logits rather than from the clamped
probability.
"""

from __future__ import annotations

import math

import numpy as np

from .losses import (
    EPS_PROB,
    LossKind,
    LossSpec,
    _clip,
    _validate_xi,
    as_logit_matrix,
    as_logits,
    as_target_vector,
    multiclass_loss,
)


def _inside_clip(p: np.ndarray) -> np.ndarray:
    return ((p > EPS_PROB) & (p < 1.0 - EPS_PROB)).astype(np.float64)


def _low_coef(qt, pt, nll, gamma, active):
    """d/dnll-direction coefficient of (1 - q_t)^g * nll.

    Two pieces: the weight itself, plus the weight's own derivative routed
    through dp_t/dz. The second piece vanishes where the clamp is active.
    """
    coef = (1.0 - qt) ** gamma
    if gamma > 0.0:
        coef = coef + gamma * (1.0 - qt) ** (gamma - 1.0) * pt * nll * active
    return coef


def _high_coef(qt, pt, nll, gamma, active):
    """Same as _low_coef for the (1 + q_t)^g weight; the sign flips."""
    coef = (1.0 + qt) ** gamma
    if gamma > 0.0:
        coef = coef - gamma * (1.0 + qt) ** (gamma - 1.0) * pt * nll * active
    return coef


def _asl_negative_grad(p: np.ndarray, targets: np.ndarray, gamma_neg: float) -> np.ndarray:
    """Gradient of sum_{c != t} q_c^g * -log(1 - q_c) through the softmax.

    With g(p) = q^gamma * -log(1 - q) and s = sum_{c != t} g'(p_c) p_c, the
    logit-j component is g'(p_j) p_j [j != t] - p_j s.
    """
    q = _clip(p)
    neg_log = -np.log1p(-q)
    if gamma_neg > 0.0:
        gprime = gamma_neg * q ** (gamma_neg - 1.0) * neg_log + q ** gamma_neg / (1.0 - q)
    else:
        gprime = 1.0 / (1.0 - q)
    gprime = gprime * _inside_clip(p)
    rows = np.arange(p.shape[0])
    gprime[rows, targets] = 0.0
    weighted = gprime * p
    total = weighted.sum(axis=1)
    return weighted - p * total[:, None]


def batch_grad(logits, targets, spec: LossSpec, xi: float = 0.0) -> np.ndarray:
    """Per-sample gradients d loss_i / d logits_i, shape (N, C).

    No batch reduction is applied; divide by N for the gradient of the mean.
    """
    z = as_logit_matrix(logits)
    t = as_target_vector(targets, z.shape[0], z.shape[1])
    xi = _validate_xi(xi)

    shifted = z - z.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    s = e.sum(axis=1)
    p = e / s[:, None]
    rows = np.arange(z.shape[0])
    nll = np.log(s) - shifted[rows, t]
    pt = p[rows, t]
    qt = _clip(pt)
    active = _inside_clip(pt)

    base = p.copy()
    base[rows, t] -= 1.0

    kind = spec.kind
    if kind is LossKind.CE:
        return base
    if kind is LossKind.FL:
        coef = _low_coef(qt, pt, nll, spec.gamma_lc, active)
        return coef[:, None] * base
    if kind is LossKind.CFL:
        low = _low_coef(qt, pt, nll, spec.gamma_lc, active)
        high = _high_coef(qt, pt, nll, spec.gamma_hc, active)
        coef = low + xi * (high - low)
        return coef[:, None] * base
    if kind is LossKind.ASL:
        coef = _low_coef(qt, pt, nll, spec.gamma_pos, active)
        return coef[:, None] * base + _asl_negative_grad(p, t, spec.gamma_neg)
    # asym-cyclical
    low_grad = (
        _low_coef(qt, pt, nll, spec.gamma_pos, active)[:, None] * base
        + _asl_negative_grad(p, t, spec.gamma_neg)
    )
    high_grad = _high_coef(qt, pt, nll, spec.gamma_hc, active)[:, None] * base
    return low_grad + xi * (high_grad - low_grad)


def loss_grad(logits, target: int, spec: LossSpec, xi: float = 0.0) -> np.ndarray:
    """Gradient of multiclass_loss with respect to one logit vector."""
    z = as_logits(logits)
    grad = batch_grad(z[None, :], np.array([int(target)]), spec, xi)
    return grad[0]


def fd_grad(logits, target: int, spec: LossSpec, xi: float = 0.0, h: float = 1e-4) -> np.ndarray:
    """Central-difference gradient, the independent check on loss_grad.

    Evaluates multiclass_loss at z +/- h e_j for every coordinate j. Keep h
    well above sqrt(machine eps) scaled by the loss magnitude; the default
    balances truncation against roundoff for the families here.
    """
    h = float(h)
    if not math.isfinite(h) or h <= 0.0:
        raise ValueError(f"h must be finite and > 0, got {h!r}")
    z = as_logits(logits).copy()
    grad = np.empty_like(z)
    for j in range(z.size):
        orig = z[j]
        z[j] = orig + h
        up = multiclass_loss(z, target, spec, xi)
        z[j] = orig - h
        down = multiclass_loss(z, target, spec, xi)
        z[j] = orig
        grad[j] = (up - down) / (2.0 * h)
    return grad


def rel_error(a: np.ndarray, b: np.ndarray) -> float:
    """Gradcheck metric: max_j |a_j - b_j| / max(|a|_inf, |b|_inf, 1e-8).

    The difference is scaled by the largest coordinate magnitude of either
    vector, floored at 1e-8. Judging near-zero coordinates against the
    gradient's overall scale avoids division blow-ups where the finite
    difference oracle's own roundoff, about eps * |loss| / (2h), dwarfs a
    vanishing true coordinate.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    denom = max(float(np.abs(a).max()), float(np.abs(b).max()), 1e-8)
    return float(np.abs(a - b).max() / denom)
