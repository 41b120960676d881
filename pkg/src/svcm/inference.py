"""Posterior summaries: selection probabilities, sparse estimates, prediction.

Selection works at the granularity the chain was run at. In regional mode a
region is "on" in a draw when the latent field clears the sampled threshold
everywhere on it; in voxel mode each location carries its own event. Estimates
are conditional means over the draws where the event holds, zeroed wherever
the event probability does not exceed the decision threshold q.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import basis_matrix, cholesky_with_jitter, gram, kernel_eval

__all__ = [
    "SvcfEstimate",
    "selection_events",
    "selection_prob",
    "estimate",
    "estimate_voxel",
    "predict",
]


@dataclass(frozen=True)
class SvcfEstimate:
    """Selection probabilities, thresholded coefficient estimates, and the q used."""

    selection_prob: np.ndarray  # (p, G) regional or (p, n) voxel
    beta_hat: np.ndarray  # (p, n)
    q: float
    mode: str  # "regional" or "voxel"


def _check_chain(chain):
    if chain.n_draws == 0:
        raise ValueError("chain holds no draws")


def selection_events(chain, domain=None, mode="regional"):
    """Per-draw selection indicators: (T, p, G) regional or (T, p, n) voxel."""
    _check_chain(chain)
    T, p, n = chain.beta_tilde.shape
    if mode == "voxel":
        return np.abs(chain.beta_tilde) > chain.lam[:, :, None]
    if domain is None:
        raise ValueError("regional selection requires the domain")
    groups = domain.region_indices()
    events = np.empty((T, p, len(groups)), dtype=bool)
    for g, idx in enumerate(groups):
        block_min = np.abs(chain.beta_tilde[:, :, idx]).min(axis=2)  # (T, p)
        events[:, :, g] = block_min > chain.lam
    return events


def selection_prob(chain, k, g, domain):
    """Posterior probability that region ``g`` (1-based) carries covariate ``k``."""
    events = selection_events(chain, domain, mode="regional")
    return float(events[:, k, g - 1].mean())


def _conditional_mean(draws, events_per_loc):
    """Mean of draws over the selected events, per location; zero when never selected."""
    counts = events_per_loc.sum(axis=0)  # per location
    sums = np.where(events_per_loc, draws, 0.0).sum(axis=0)
    with np.errstate(invalid="ignore"):
        means = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)
    return means


def estimate(chain, domain, q=0.90):
    """Regional sparse estimate: conditional posterior mean where selection clears q."""
    _check_q(q)
    _check_chain(chain)
    T, p, n = chain.beta_tilde.shape
    events = selection_events(chain, domain, mode="regional")  # (T, p, G)
    probs = events.mean(axis=0)  # (p, G)
    groups = domain.region_indices()
    beta_hat = np.zeros((p, n))
    for k in range(p):
        for g, idx in enumerate(groups):
            if probs[k, g] > q:
                sel = events[:, k, g]
                beta_hat[k, idx] = chain.beta_tilde[sel, k][:, idx].mean(axis=0)
    return SvcfEstimate(selection_prob=probs, beta_hat=beta_hat, q=q, mode="regional")


def estimate_voxel(chain, q=0.90):
    """Voxelwise sparse estimate: per-location events |field| > threshold."""
    _check_q(q)
    _check_chain(chain)
    T, p, n = chain.beta_tilde.shape
    events = np.abs(chain.beta_tilde) > chain.lam[:, :, None]  # (T, p, n)
    probs = events.mean(axis=0)  # (p, n)
    beta_hat = np.zeros((p, n))
    for k in range(p):
        cond = _conditional_mean(chain.beta_tilde[:, k, :], events[:, k, :])
        beta_hat[k] = np.where(probs[k] > q, cond, 0.0)
    return SvcfEstimate(selection_prob=probs, beta_hat=beta_hat, q=q, mode="voxel")


def _check_q(q):
    if not (0.5 < q < 1.0):
        raise ValueError(f"decision threshold q must lie in (0.5, 1), got {q}")


def predict(chain, s0, eig, domain, q=0.90, mode="regional", indicator_weighted=False):
    """Predict each covariate effect at a new location by averaged kriging means.

    The location is assigned to the region containing it (nearest observed
    location's region otherwise). Each draw contributes the conditional mean
    of the latent field at ``s0`` given the draw's field on that region; the
    average is reported when the region's selection probability exceeds q and
    zero otherwise. With ``indicator_weighted=True`` each draw's contribution
    is additionally multiplied by that draw's selection indicator, matching a
    published variant of the estimator.
    """
    _check_q(q)
    _check_chain(chain)
    s0 = np.asarray(s0, dtype=float).reshape(-1)
    locs = domain.locations
    nearest = int(np.argmin(np.sum((locs - s0) ** 2, axis=1)))
    if mode == "voxel":
        idx = np.array([nearest])
        events = np.abs(chain.beta_tilde[:, :, nearest]) > chain.lam  # (T, p)
    else:
        g = int(domain.region_labels[nearest])
        idx = np.flatnonzero(domain.region_labels == g)
        block_min = np.abs(chain.beta_tilde[:, :, idx]).min(axis=2)
        events = block_min > chain.lam  # (T, p)
    probs = events.mean(axis=0)  # (p,)

    kp = eig.params
    K = gram(locs[idx], kp)
    chol = cholesky_with_jitter(K)
    kvec = np.asarray([kernel_eval(s0, locs[i], kp) for i in idx])
    from scipy.linalg import cho_solve

    w = cho_solve((chol, True), kvec, check_finite=False)
    phi0 = basis_matrix(s0, eig)[0]  # (L,)
    Phi_g = basis_matrix(locs[idx], eig)  # (n_g, L)

    T, p, _ = chain.beta_tilde.shape
    out = np.zeros(p)
    for k in range(p):
        trend = chain.u[:, k, :] @ phi0  # (T,)
        resid = chain.beta_tilde[:, k, :][:, idx] - chain.u[:, k, :] @ Phi_g.T  # (T, n_g)
        cond_means = trend + resid @ w
        if indicator_weighted:
            cond_means = cond_means * events[:, k]
        if probs[k] > q:
            out[k] = cond_means.mean()
    return out
