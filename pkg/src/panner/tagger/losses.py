"""The three training losses over a batch of per-token predictions.

All three operate on the same batch layout: targets ``y`` and predictions
``yhat`` of shape (N, M) plus 0/1 loss weights ``w``. The softmax losses
take a per-token weight (any zero in a token's supervision mask zeroes the
whole token); the sigmoid loss keeps the full per-label weight matrix.
Every loss divides by N, the token count, not by the weight sum.
"""

import numpy as np

SOFTMAX = "softmax"
SOFTMAX_WEIGHTED = "softmax_weighted"
SIGMOID_WEIGHTED = "sigmoid_weighted"
STRATEGIES = (SOFTMAX, SOFTMAX_WEIGHTED, SIGMOID_WEIGHTED)

PROB_FLOOR = 1e-12  # clamp for log(0) in the sigmoid loss


class LossBatch:
    """Validated (y, yhat, w) triple for one loss evaluation."""

    def __init__(self, targets, predictions, weights, sigmoid=False):
        y = np.asarray(targets, dtype=float)
        yhat = np.asarray(predictions, dtype=float)
        w = np.asarray(weights, dtype=float)
        if y.shape != yhat.shape or w.shape != y.shape:
            raise ValueError(
                f"shape mismatch: y {y.shape}, yhat {yhat.shape}, w {w.shape}")
        if not np.isin(y, (0.0, 1.0)).all():
            raise ValueError("targets must be 0/1")
        if not np.isin(w, (0.0, 1.0)).all():
            raise ValueError("weights must be 0/1")
        if not sigmoid:
            if not np.all(np.abs(y.sum(axis=1) - 1.0) == 0):
                raise ValueError("softmax targets must be one-hot rows")
            if not np.all(np.abs(yhat.sum(axis=1) - 1.0) <= 1e-6):
                raise ValueError("softmax predictions must sum to 1 per row")
        self.y = y
        self.yhat = yhat
        self.w = w
        self.n, self.m = y.shape

    def token_weights(self):
        """Per-token coarsening: 0 if any label weight is 0, else 1."""
        return self.w.min(axis=1)


def loss_j1(batch):
    """Plain categorical cross-entropy; supervision weights are ignored."""
    active = batch.y > 0
    probs = batch.yhat[active]
    if np.any(probs <= 0.0):
        raise ValueError("prediction is 0 where the target is 1 (log domain)")
    return float(-np.sum(np.log(probs)) / batch.n)


def loss_j2(batch):
    """Cross-entropy with per-token weights; still divided by N."""
    wt = batch.token_weights()
    active = batch.y > 0
    probs = batch.yhat[active]
    if np.any(probs[wt > 0] <= 0.0):
        raise ValueError("prediction is 0 where the target is 1 (log domain)")
    with np.errstate(divide="ignore"):
        logs = np.where(probs > 0.0, np.log(np.maximum(probs, PROB_FLOOR)), 0.0)
    return float(-np.sum(wt * logs) / batch.n)


def loss_j3(batch):
    """Per-label binary cross-entropy with per-label weights."""
    p = np.clip(batch.yhat, PROB_FLOOR, 1.0 - PROB_FLOOR)
    terms = batch.y * np.log(p) + (1.0 - batch.y) * np.log(1.0 - p)
    return float(-np.sum(batch.w * terms) / batch.n)
