"""Scoring: relative MSE against the unthresholded GLM, FDR/FNR, ROC, partial AUC."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ScoreReport",
    "remse",
    "fdr_metric",
    "fnr_metric",
    "support_rates",
    "roc_sweep",
    "partial_auc",
]


@dataclass(frozen=True)
class ScoreReport:
    method: str
    replicate: int
    remse: float
    fdr: float
    fnr: float

    def row(self):
        return (self.method, self.replicate, self.remse, self.fdr, self.fnr)


def remse(est, glm_unthresholded, truth):
    """Squared error of an estimate relative to the unthresholded GLM estimate."""
    est, glm, truth = (np.asarray(a, dtype=float) for a in (est, glm_unthresholded, truth))
    if not (est.shape == glm.shape == truth.shape):
        raise ValueError("estimate, GLM reference, and truth must share a shape")
    denom = float(np.sum((glm - truth) ** 2))
    if denom == 0.0:
        raise ValueError("relative MSE undefined: the GLM reference matches the truth exactly")
    return float(np.sum((est - truth) ** 2)) / denom


def fdr_metric(est, truth):
    """Fraction of discoveries (nonzero estimates) that are truly zero; 0 when none."""
    est, truth = np.asarray(est), np.asarray(truth)
    disc = est != 0
    n_disc = int(disc.sum())
    if n_disc == 0:
        return 0.0
    return float(np.sum(disc & (truth == 0))) / n_disc


def fnr_metric(est, truth):
    """Fraction of true nonzeros estimated as zero; 0 when the truth is empty."""
    est, truth = np.asarray(est), np.asarray(truth)
    pos = truth != 0
    n_pos = int(pos.sum())
    if n_pos == 0:
        return 0.0
    return float(np.sum((est == 0) & pos)) / n_pos


def support_rates(mask, truth):
    """(FPR, TPR) of a selection mask against the true support."""
    mask = np.asarray(mask, dtype=bool)
    pos = np.asarray(truth) != 0
    neg = ~pos
    fp = np.sum(mask & neg)
    tp = np.sum(mask & pos)
    fpr = fp / neg.sum() if neg.sum() else 0.0
    tpr = tp / pos.sum() if pos.sum() else 0.0
    return float(fpr), float(tpr)


def roc_sweep(dataset, truth, lambda_values, fit_fn):
    """Trace an ROC curve by refitting at fixed threshold settings.

    ``fit_fn(dataset, lam)`` must return a boolean selection mask shaped like
    the true coefficient matrix. Points are sorted by FPR and augmented with
    the (0, 0) and (1, 1) endpoints.
    """
    if len(lambda_values) == 0:
        raise ValueError("the threshold sweep needs at least one value")
    points = [support_rates(fit_fn(dataset, lam), truth) for lam in lambda_values]
    points.extend([(0.0, 0.0), (1.0, 1.0)])
    points.sort()
    return np.asarray(points)


def partial_auc(curve, fpr_max=0.1):
    """Trapezoidal area under an ROC curve for FPR in [0, fpr_max].

    Returns ``(raw, normalized)`` with ``normalized = raw / fpr_max``. The
    curve is interpolated linearly at the right boundary.
    """
    curve = np.asarray(curve, dtype=float)
    order = np.lexsort((curve[:, 1], curve[:, 0]))
    fpr = curve[order, 0]
    tpr = curve[order, 1]
    if fpr[0] > 0.0:
        fpr = np.concatenate([[0.0], fpr])
        tpr = np.concatenate([[0.0], tpr])
    area = 0.0
    for i in range(1, len(fpr)):
        x0, x1 = fpr[i - 1], fpr[i]
        y0, y1 = tpr[i - 1], tpr[i]
        if x0 >= fpr_max:
            break
        if x1 > fpr_max:
            # cut the segment at the boundary
            frac = (fpr_max - x0) / (x1 - x0)
            x1 = fpr_max
            y1 = y0 + frac * (y1 - y0)
        area += 0.5 * (y0 + y1) * (x1 - x0)
    return float(area), float(area / fpr_max)
