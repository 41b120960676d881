"""Voxelwise general linear model competitors with multiple-testing thresholds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import SingularDesignError

__all__ = [
    "GlmFit",
    "glm_fit",
    "threshold_naive_t",
    "bh_fdr",
    "bonferroni",
    "thresholded_estimate",
]


@dataclass(frozen=True)
class GlmFit:
    beta_star: np.ndarray  # (p, n) unthresholded estimates
    se: np.ndarray  # (p, n)
    t: np.ndarray  # (p, n)
    pvals: np.ndarray  # (p, n) two-sided


def glm_fit(dataset):
    """Per-location least squares with t statistics and two-sided p-values."""
    X, Y = dataset.X, dataset.Y
    m, p = X.shape
    if m <= p:
        raise SingularDesignError(f"per-voxel fit needs m > p, got m={m}, p={p}")
    if np.linalg.matrix_rank(X) < p:
        raise SingularDesignError("design matrix X is rank deficient")
    xtx = X.T @ X
    xtx_inv = np.linalg.inv(xtx)
    beta_star = xtx_inv @ (X.T @ Y)  # (p, n)
    resid = Y - X @ beta_star
    dof = m - p
    sigma2_hat = np.sum(resid * resid, axis=0) / dof  # (n,)
    se = np.sqrt(np.outer(np.diag(xtx_inv), sigma2_hat))  # (p, n)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(se > 0, beta_star / np.where(se > 0, se, 1.0), np.inf * np.sign(beta_star))
    t = np.where((se == 0) & (beta_star == 0), 0.0, t)
    pvals = 2.0 * stats.t.sf(np.abs(t), dof)
    return GlmFit(beta_star=beta_star, se=se, t=t, pvals=pvals)


def threshold_naive_t(fit, alpha=0.05):
    """Selection mask from unadjusted per-test p-values."""
    return fit.pvals < alpha


def bh_fdr(pvals, level):
    """Benjamini-Hochberg step-up selection mask at the given FDR level."""
    if not (0.0 < level < 1.0):
        raise ValueError(f"FDR level must lie in (0, 1), got {level}")
    pvals = np.asarray(pvals, dtype=float)
    flat = pvals.ravel()
    n_tests = flat.size
    order = np.argsort(flat, kind="stable")
    ranked = flat[order]
    thresholds = level * np.arange(1, n_tests + 1) / n_tests
    passing = np.flatnonzero(ranked <= thresholds)
    mask = np.zeros(n_tests, dtype=bool)
    if passing.size:
        cutoff = ranked[passing[-1]]
        mask = flat <= cutoff
    return mask.reshape(pvals.shape)


def bonferroni(pvals, level):
    """Family-wise error selection mask: p <= level / number of tests."""
    pvals = np.asarray(pvals, dtype=float)
    return pvals <= level / pvals.size


def thresholded_estimate(fit, mask):
    """GLM estimate zeroed outside the selection mask, for uniform scoring."""
    return np.where(mask, fit.beta_star, 0.0)
