"""Thresholded multiscale Gaussian process priors.

A coefficient field draw combines a smooth global process (truncated
Karhunen-Loeve expansion of the kernel eigensystem) with region-blocked local
Gaussian fluctuations, then passes through a sparsifying threshold: a region
survives only if the field clears the threshold everywhere on it (regional
mode), or each location is kept on its own merits (voxel mode).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import basis_matrix, cholesky_with_jitter, gram

__all__ = [
    "TmgpParams",
    "SvcfDraw",
    "sample_global",
    "sample_local",
    "threshold_regional",
    "threshold_voxel",
    "sample_svcf",
]


@dataclass(frozen=True)
class TmgpParams:
    """Prior hyperparameters: global variance tau2, local variance theta2, threshold lam."""

    tau2: float
    lam: float
    eig: object  # EigenSystem
    theta2: float = 1.0

    def __post_init__(self):
        if self.tau2 < 0 or self.theta2 < 0 or self.lam < 0:
            raise ValueError("tau2, theta2, and lam must be nonnegative")


@dataclass(frozen=True)
class SvcfDraw:
    beta_tilde: np.ndarray  # (n,) latent field
    beta: np.ndarray  # (n,) thresholded field
    kl_coeffs: np.ndarray  # (L,) global expansion coefficients


def _rng(seed):
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def sample_global(domain, eig, tau2, seed):
    """Draw the global process at the domain locations via the truncated expansion.

    Coefficients u_l ~ N(0, tau2 * zeta_l) are drawn as a sequential stream, so
    enlarging the truncation with the same seed extends (not replaces) a draw.
    """
    rng = _rng(seed)
    coeffs = rng.standard_normal(eig.L) * np.sqrt(tau2 * eig.zeta)
    values = basis_matrix(domain.locations, eig) @ coeffs
    return values, coeffs


def sample_local(domain, params, seed):
    """Draw the region-blocked local process: independent N(0, theta2 * K_g) per region."""
    rng = _rng(seed)
    values = np.empty(domain.n)
    kp = params.eig.params
    for idx in domain.region_indices():
        K = gram(domain.locations[idx], kp)
        chol = cholesky_with_jitter(K)
        values[idx] = np.sqrt(params.theta2) * (chol @ rng.standard_normal(len(idx)))
    return values


def threshold_regional(beta_tilde, lam, domain):
    """Zero the field on every region whose minimum absolute value fails to exceed lam."""
    beta_tilde = np.asarray(beta_tilde, dtype=float)
    out = np.zeros_like(beta_tilde)
    for idx in domain.region_indices():
        if np.abs(beta_tilde[idx]).min() > lam:
            out[idx] = beta_tilde[idx]
    return out


def threshold_voxel(beta_tilde, lam):
    """Zero every entry whose absolute value fails to exceed lam."""
    beta_tilde = np.asarray(beta_tilde, dtype=float)
    return np.where(np.abs(beta_tilde) > lam, beta_tilde, 0.0)


def sample_svcf(domain, params, seed, mode="regional"):
    """Draw a sparse coefficient field: global + local process, then threshold."""
    rng = _rng(seed)
    global_vals, coeffs = sample_global(domain, params.eig, params.tau2, rng)
    local_vals = sample_local(domain, params, rng)
    beta_tilde = global_vals + local_vals
    if mode == "regional":
        beta = threshold_regional(beta_tilde, params.lam, domain)
    elif mode == "voxel":
        beta = threshold_voxel(beta_tilde, params.lam)
    else:
        raise ValueError(f"unknown threshold mode {mode!r}")
    return SvcfDraw(beta_tilde=beta_tilde, beta=beta, kl_coeffs=coeffs)
