"""Block Metropolis-within-Gibbs sampler for the thresholded SVCM posterior.

One sweep updates, in fixed order: every (covariate, block) of the latent
fields by random-walk Metropolis-Hastings, the noise variance by its
inverse-gamma conditional, each threshold by Metropolis-Hastings restricted to
its uniform prior support, each vector of expansion coefficients by an exact
Gaussian conditional draw, each global variance by its inverse-gamma
conditional, and optionally the kernel range parameter by a discrete Gibbs
step over a precomputed grid.

Two modes are supported. In "regional" mode the local prior is blocked by the
domain regions, thresholding zeroes whole regions, and the M-H blocks are the
regions themselves. In "voxel" mode every location is its own region (diagonal
local prior, elementwise thresholding) and the M-H blocks come from k-means
clustering of voxelwise least-squares coefficients. Blocks must always be
unions of whole regions so the block prior conditional is exact.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .elicitation import ols_basis_fit
from .errors import NumericalError
from .kernel import basis_matrix, cholesky_with_jitter, gram, kernel_eval

__all__ = [
    "ChainState",
    "McmcConfig",
    "ChainOutput",
    "ChainWorkspace",
    "kmeans_blocks",
    "update_beta_block",
    "update_sigma2",
    "update_lambda",
    "update_u",
    "update_tau2",
    "update_b",
    "run_chain",
]

IG_SHAPE = 0.001  # inverse-gamma hyperparameters, fixed
IG_RATE = 0.001

LOG2PI = math.log(2.0 * math.pi)


@dataclass
class ChainState:
    beta_tilde: np.ndarray  # (p, n)
    u: np.ndarray  # (p, L)
    sigma2: float
    tau2: np.ndarray  # (p,)
    lam: np.ndarray  # (p,)

    def copy(self):
        return ChainState(
            beta_tilde=self.beta_tilde.copy(),
            u=self.u.copy(),
            sigma2=float(self.sigma2),
            tau2=self.tau2.copy(),
            lam=self.lam.copy(),
        )


@dataclass
class McmcConfig:
    iterations: int = 10000
    burn_in: int = 5000
    thin: int = 5
    threshold_mode: str = "voxel"  # or "regional"
    n_blocks: int = 4  # k-means block count (voxel mode)
    block_labels: np.ndarray | None = None  # explicit 0-based block labels, overrides k-means
    proposal_scale_beta: float | None = None  # initial scale; default 0.5*sigma_hat/sqrt(m*n_block)
    proposal_scale_lambda: float | None = None  # default half_range/10
    adapt: bool = True
    adapt_band: tuple = (0.2, 0.4)
    adapt_interval: int = 50
    b_grid: tuple | None = None  # optional bandwidth grid; None keeps b fixed
    q: float = 0.90  # downstream selection threshold, echoed into manifests
    seed: int = 0
    randomize_sweep: bool = False
    update_beta: bool = True
    update_sigma2: bool = True
    update_lambda: bool = True
    update_u: bool = True
    update_tau2: bool = True
    init_state: ChainState | None = None

    def __post_init__(self):
        if self.iterations < 0 or self.burn_in < 0 or self.thin < 1:
            raise ValueError("iterations and burn_in must be >= 0 and thin >= 1")
        if self.burn_in > self.iterations:
            raise ValueError("burn_in may not exceed iterations")
        if self.threshold_mode not in ("voxel", "regional"):
            raise ValueError(f"unknown threshold mode {self.threshold_mode!r}")
        if not (0.5 < self.q < 1.0):
            raise ValueError("q must lie in (0.5, 1)")


@dataclass
class ChainOutput:
    beta_tilde: np.ndarray  # (T, p, n)
    u: np.ndarray  # (T, p, L)
    lam: np.ndarray  # (T, p)
    sigma2: np.ndarray  # (T,)
    tau2: np.ndarray  # (T, p)
    accept_beta: np.ndarray  # (p, n_blocks) acceptance rates
    accept_lambda: np.ndarray  # (p,)
    mode: str
    block_labels: np.ndarray  # (n,) 0-based
    seed: int
    config: dict
    b_draws: np.ndarray | None = None  # (T,) bandwidth values when b_grid enabled

    @property
    def n_draws(self) -> int:
        return self.beta_tilde.shape[0]

    def save(self, path, extra_manifest=None):
        os.makedirs(path, exist_ok=True)
        T, p, n = self.beta_tilde.shape
        L = self.u.shape[2]
        np.savetxt(os.path.join(path, "beta_tilde.csv"), self.beta_tilde.reshape(T, p * n), fmt="%.17g", delimiter=",")
        np.savetxt(os.path.join(path, "u.csv"), self.u.reshape(T, p * L), fmt="%.17g", delimiter=",")
        np.savetxt(os.path.join(path, "lambda.csv"), self.lam, fmt="%.17g", delimiter=",")
        np.savetxt(os.path.join(path, "sigma2.csv"), self.sigma2[:, None], fmt="%.17g", delimiter=",")
        np.savetxt(os.path.join(path, "tau2.csv"), self.tau2, fmt="%.17g", delimiter=",")
        if self.b_draws is not None:
            np.savetxt(os.path.join(path, "b.csv"), self.b_draws[:, None], fmt="%.17g", delimiter=",")
        manifest = {
            "config": self.config,
            "seed": self.seed,
            "mode": self.mode,
            "draws": int(T),
            "p": int(p),
            "n": int(n),
            "L": int(L),
            "block_labels": self.block_labels.tolist(),
            "acceptance": {
                "beta": self.accept_beta.tolist(),
                "lambda": self.accept_lambda.tolist(),
            },
        }
        if extra_manifest:
            manifest.update(extra_manifest)
        with open(os.path.join(path, "manifest.json"), "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path):
        with open(os.path.join(path, "manifest.json")) as fh:
            manifest = json.load(fh)
        T, p, n, L = (manifest[k] for k in ("draws", "p", "n", "L"))
        load = lambda name: np.loadtxt(os.path.join(path, name), delimiter=",", ndmin=2)
        b_file = os.path.join(path, "b.csv")
        return cls(
            beta_tilde=load("beta_tilde.csv").reshape(T, p, n),
            u=load("u.csv").reshape(T, p, L),
            lam=load("lambda.csv").reshape(T, p),
            sigma2=load("sigma2.csv").ravel(),
            tau2=load("tau2.csv").reshape(T, p),
            accept_beta=np.asarray(manifest["acceptance"]["beta"], dtype=float),
            accept_lambda=np.asarray(manifest["acceptance"]["lambda"], dtype=float),
            mode=manifest["mode"],
            block_labels=np.asarray(manifest["block_labels"], dtype=np.int64),
            seed=manifest["seed"],
            config=manifest["config"],
            b_draws=np.loadtxt(b_file, delimiter=",", ndmin=2).ravel() if os.path.exists(b_file) else None,
        )


def kmeans_blocks(features, K, seed, max_sweeps=50):
    """Lloyd's k-means with farthest-point seeding; returns 0-based labels.

    The first centroid is a seeded random point, the remaining centroids are
    chosen by farthest-point traversal; assignment ties break to the
    lowest-index centroid; empty clusters keep their previous centroid.
    """
    features = np.asarray(features, dtype=float)
    if features.ndim == 1:
        features = features[:, None]
    n = features.shape[0]
    if K > n:
        raise ValueError(f"cannot form {K} blocks from {n} points")
    rng = np.random.default_rng(seed)
    centroids = [features[int(rng.integers(n))]]
    dist = np.sum((features - centroids[0]) ** 2, axis=1)
    for _ in range(K - 1):
        centroids.append(features[int(np.argmax(dist))])
        dist = np.minimum(dist, np.sum((features - centroids[-1]) ** 2, axis=1))
    centers = np.array(centroids)
    labels = np.full(n, -1, dtype=np.int64)
    for _ in range(max_sweeps):
        d2 = np.sum((features[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(d2, axis=1)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(K):
            members = features[labels == j]
            if len(members):
                centers[j] = members.mean(axis=0)
    return labels


class ChainWorkspace:
    """Precomputed structures plus the fitted-field and residual caches.

    Holds the basis matrix, per-region Cholesky factors (or the diagonal local
    variances in voxel mode), the assembled operator used by the coefficient
    conditional, and its spectral form enabling O(L^2) exact draws. ``F`` is
    the current thresholded field (p, n) and ``R = Y - X @ F`` the residuals;
    the update functions keep both consistent with the state.
    """

    def __init__(self, dataset, eig, mode, block_labels):
        self.dataset = dataset
        self.mode = mode
        self.eig = eig
        self.block_labels = np.asarray(block_labels, dtype=np.int64)
        self.blocks = [np.flatnonzero(self.block_labels == j) for j in range(self.block_labels.max() + 1)]
        if any(len(b) == 0 for b in self.blocks):
            raise ValueError("every block label must be used")
        self.x_sq = np.einsum("jk,jk->k", dataset.X, dataset.X)  # (p,)
        self._build_kernel_structures(eig)
        self.F = None
        self.R = None

    def _build_kernel_structures(self, eig):
        domain = self.dataset.domain
        locs = domain.locations
        self.eig = eig
        self.Phi = basis_matrix(locs, eig)
        self.zeta = eig.zeta
        self.sqz = np.sqrt(eig.zeta)
        if self.mode == "regional":
            self.region_groups = domain.region_indices()
            self.chols = []
            P = np.empty((eig.L, domain.n))
            logdet = 0.0
            for idx in self.region_groups:
                K = gram(locs[idx], eig.params)
                chol = cholesky_with_jitter(K)
                self.chols.append(chol)
                logdet += 2.0 * np.log(np.diag(chol)).sum()
                kinv_phi = _chol_solve(chol, self.Phi[idx])
                P[:, idx] = kinv_phi.T
            self.kdiag = None
            self.P = P
            self.logdet_chi = logdet
            self.region_of_block = self._match_blocks_to_regions()
        else:
            self.region_groups = [np.array([i]) for i in range(domain.n)]
            self.kdiag = np.exp(-2.0 * eig.params.a * np.sum(locs * locs, axis=1))
            self.P = (self.Phi / self.kdiag[:, None]).T
            self.logdet_chi = float(np.log(self.kdiag).sum())
            self.chols = None
            self.region_of_block = None
        M = self.P @ self.Phi  # (L, L), symmetric PSD
        W = self.sqz[:, None] * M * self.sqz[None, :]
        evals, evecs = np.linalg.eigh(0.5 * (W + W.T))
        if evals.min() < -1e-8 * max(evals.max(), 1.0):
            raise NumericalError("coefficient-conditional operator is not positive semidefinite")
        self.spec_evals = np.clip(evals, 0.0, None)
        self.spec_evecs = evecs

    def _match_blocks_to_regions(self):
        """In regional mode each M-H block must be exactly one region."""
        out = []
        for blk in self.blocks:
            for g, idx in enumerate(self.region_groups):
                if len(idx) == len(blk) and np.array_equal(np.sort(idx), np.sort(blk)):
                    out.append(g)
                    break
            else:
                raise ValueError("in regional mode every block must coincide with one region")
        return out

    def threshold(self, values, lam):
        """Thresholded field under the workspace mode."""
        if self.mode == "voxel":
            return np.where(np.abs(values) > lam, values, 0.0)
        out = np.zeros_like(values)
        for idx in self.region_groups:
            if np.abs(values[idx]).min() > lam:
                out[idx] = values[idx]
        return out

    def threshold_block(self, values, lam, block_index):
        """Thresholded values restricted to one block (regional: block == region)."""
        if self.mode == "voxel":
            return np.where(np.abs(values) > lam, values, 0.0)
        return values if np.abs(values).min() > lam else np.zeros_like(values)

    def prior_quad(self, k, state, block_index, values):
        """Quadratic form of (values - prior mean) under the block's local prior."""
        idx = self.blocks[block_index]
        mean = self.Phi[idx] @ state.u[k]
        resid = values - mean
        if self.mode == "voxel":
            return float(np.sum(resid * resid / self.kdiag[idx]))
        chol = self.chols[self.region_of_block[block_index]]
        sol = _forward_solve(chol, resid)
        return float(sol @ sol)

    def reset(self, state):
        """Recompute the fitted-field and residual caches from scratch."""
        p, n = state.beta_tilde.shape
        self.F = np.empty((p, n))
        for k in range(p):
            self.F[k] = self.threshold(state.beta_tilde[k], state.lam[k])
        self.R = self.dataset.Y - self.dataset.X @ self.F


def _forward_solve(chol, b):
    from scipy.linalg import solve_triangular

    return solve_triangular(chol, b, lower=True, check_finite=False)


def _chol_solve(chol, b):
    from scipy.linalg import cho_solve

    return cho_solve((chol, True), b, check_finite=False)


def update_beta_block(state, ws, k, block_index, scale, rng):
    """Random-walk M-H update of one (covariate, block) of the latent field.

    Voxel mode proposes an isotropic Gaussian step. Regional mode preconditions
    the step by the block prior's Cholesky factor (a symmetric proposal, so the
    acceptance ratio is unchanged); an isotropic step would be vetoed by the
    near-singular directions of a smooth within-region kernel.
    """
    idx = ws.blocks[block_index]
    xk = ws.dataset.X[:, k]
    cur = state.beta_tilde[k, idx]
    z = rng.standard_normal(len(idx))
    if ws.mode == "regional":
        step = ws.chols[ws.region_of_block[block_index]] @ z
    else:
        step = z
    prop = cur + scale * step
    v_cur = ws.F[k, idx]
    v_prop = ws.threshold_block(prop, state.lam[k], block_index)
    # likelihood: only this block's columns change; t_i = x_k . y_{j,-k} per column
    t = xk @ ws.R[:, idx] + ws.x_sq[k] * v_cur
    dv = v_prop - v_cur
    dlik = (dv @ t - 0.5 * ws.x_sq[k] * float(dv @ (v_prop + v_cur))) / state.sigma2
    dprior = -0.5 * (ws.prior_quad(k, state, block_index, prop) - ws.prior_quad(k, state, block_index, cur))
    log_alpha = dlik + dprior
    if math.log(rng.random() + 1e-300) < log_alpha:
        state.beta_tilde[k, idx] = prop
        if np.any(dv != 0.0):
            ws.F[k, idx] = v_prop
            ws.R[:, idx] -= np.outer(xk, dv)
        return True
    return False


def update_sigma2(state, ws, rng):
    """Gibbs draw of the noise variance from its inverse-gamma conditional."""
    m, n = ws.dataset.Y.shape
    shape = IG_SHAPE + 0.5 * m * n
    rate = IG_RATE + 0.5 * float(np.sum(ws.R * ws.R))
    state.sigma2 = rate / rng.gamma(shape)
    return state


def update_lambda(state, ws, k, prior, scale, rng):
    """Random-walk M-H update of one threshold within its uniform prior support."""
    cur = state.lam[k]
    prop = cur + scale * rng.standard_normal()
    if not (prior.low <= prop <= prior.high):
        return False
    v_cur = ws.F[k]
    v_prop = ws.threshold(state.beta_tilde[k], prop)
    changed = np.flatnonzero(v_prop != v_cur)
    if len(changed) == 0:
        state.lam[k] = prop
        return True
    xk = ws.dataset.X[:, k]
    t = xk @ ws.R[:, changed] + ws.x_sq[k] * v_cur[changed]
    dv = v_prop[changed] - v_cur[changed]
    dlik = (dv @ t - 0.5 * ws.x_sq[k] * float(dv @ (v_prop[changed] + v_cur[changed]))) / state.sigma2
    if math.log(rng.random() + 1e-300) < dlik:
        state.lam[k] = prop
        ws.F[k, changed] = v_prop[changed]
        ws.R[:, changed] -= np.outer(xk, dv)
        return True
    return False


def update_u(state, ws, k, rng, theta2=1.0):
    """Exact Gaussian draw of the expansion coefficients from their conditional."""
    v = ws.P @ state.beta_tilde[k] / theta2
    denom = ws.spec_evals / theta2 + 1.0 / state.tau2[k]
    Q = ws.spec_evecs
    rhs = Q.T @ (ws.sqz * v)
    mean = ws.sqz * (Q @ (rhs / denom))
    noise = ws.sqz * (Q @ (rng.standard_normal(len(denom)) / np.sqrt(denom)))
    state.u[k] = mean + noise
    return state


def update_tau2(state, ws, k, rng):
    """Gibbs draw of one global variance from its inverse-gamma conditional."""
    L = state.u.shape[1]
    shape = IG_SHAPE + 0.5 * L
    rate = IG_RATE + 0.5 * float(np.sum(state.u[k] ** 2 / ws.zeta))
    state.tau2[k] = rate / rng.gamma(shape)
    return state


def _log_prior_terms(state, ws, theta2=1.0):
    """Log density of the latent fields and coefficients under the current kernel."""
    p, n = state.beta_tilde.shape
    L = state.u.shape[1]
    total = 0.0
    for k in range(p):
        resid = state.beta_tilde[k] - ws.Phi @ state.u[k]
        if ws.mode == "voxel":
            quad = float(np.sum(resid * resid / ws.kdiag))
        else:
            quad = 0.0
            for g, idx in enumerate(ws.region_groups):
                sol = _forward_solve(ws.chols[g], resid[idx])
                quad += float(sol @ sol)
        total += -0.5 * (n * (LOG2PI + math.log(theta2)) + ws.logdet_chi + quad / theta2)
        var_u = state.tau2[k] * ws.zeta
        total += -0.5 * float(np.sum(LOG2PI + np.log(var_u) + state.u[k] ** 2 / var_u))
    return total


def update_b(state, candidates, rng, theta2=1.0):
    """Discrete Gibbs draw of the kernel range parameter over a precomputed grid.

    ``candidates`` holds one precomputed workspace per grid value; the draw
    weighs the latent-field and coefficient priors under each candidate kernel,
    in log space. Returns the index of the chosen grid value.
    """
    if not candidates:
        raise ValueError("bandwidth grid must be nonempty")
    logw = np.array([_log_prior_terms(state, cand, theta2=theta2) for cand in candidates])
    logw -= logw.max()
    probs = np.exp(logw)
    probs /= probs.sum()
    return int(rng.choice(len(candidates), p=probs))


def _init_state(dataset, eig, priors, config):
    if config.init_state is not None:
        return config.init_state.copy()
    W, beta_hat = ols_basis_fit(dataset, eig)
    resid = dataset.Y - dataset.X @ beta_hat
    sigma2 = float(np.mean(resid * resid))
    p = dataset.p
    lam0 = np.array([pr.center for pr in priors]) if priors else np.zeros(p)
    return ChainState(
        beta_tilde=beta_hat.copy(),
        u=W.copy(),
        sigma2=max(sigma2, 1e-12),
        tau2=np.ones(p),
        lam=lam0,
    )


def run_chain(dataset, eig, config, priors=None):
    """Run the full sampler and return thinned draws with acceptance diagnostics."""
    if config.update_lambda and priors is None:
        raise ValueError("threshold priors are required when thresholds are sampled")
    rng = np.random.default_rng(np.random.SeedSequence(config.seed))
    mode = config.threshold_mode

    if config.block_labels is not None:
        block_labels = np.asarray(config.block_labels, dtype=np.int64)
    elif mode == "regional":
        block_labels = dataset.domain.region_labels - 1
    else:
        feats = _glm_coefficient_features(dataset)
        block_labels = kmeans_blocks(feats, min(config.n_blocks, dataset.n), seed=config.seed)

    ws = ChainWorkspace(dataset, eig, mode, block_labels)
    state = _init_state(dataset, eig, priors, config)
    p, n = state.beta_tilde.shape
    ws.reset(state)

    n_blocks = len(ws.blocks)
    sizes = np.array([len(b) for b in ws.blocks], dtype=float)
    sig0 = math.sqrt(state.sigma2)
    if config.proposal_scale_beta is not None:
        scale_beta = np.full((p, n_blocks), float(config.proposal_scale_beta))
    else:
        scale_beta = np.tile(0.5 * sig0 / np.sqrt(dataset.m * sizes), (p, 1))
    if priors is not None:
        half = np.array([pr.half_range for pr in priors])
    else:
        half = np.ones(p)
    scale_lam = (
        np.full(p, float(config.proposal_scale_lambda))
        if config.proposal_scale_lambda is not None
        else half / 10.0
    )

    b_candidates = None
    b_values = None
    current_b_index = None
    if config.b_grid:
        b_values = [float(b) for b in config.b_grid]
        b_candidates = []
        for b in b_values:
            params_b = replace(eig.params, b=b)
            eig_b = type(eig).build(params_b, eig.m_deg)
            b_candidates.append(ChainWorkspace(dataset, eig_b, mode, block_labels))
        current_b_index = int(np.argmin([abs(b - eig.params.b) for b in b_values]))
        ws = b_candidates[current_b_index]
        ws.reset(state)

    total_draws = (config.iterations - config.burn_in) // config.thin
    out_beta = np.empty((total_draws, p, n))
    out_u = np.empty((total_draws, p, state.u.shape[1]))
    out_lam = np.empty((total_draws, p))
    out_sigma2 = np.empty(total_draws)
    out_tau2 = np.empty((total_draws, p))
    out_b = np.empty(total_draws) if b_values is not None else None

    att_beta = np.zeros((p, n_blocks))
    acc_beta = np.zeros((p, n_blocks))
    att_lam = np.zeros(p)
    acc_lam = np.zeros(p)
    batch_att = np.zeros((p, n_blocks))
    batch_acc = np.zeros((p, n_blocks))
    batch_att_lam = np.zeros(p)
    batch_acc_lam = np.zeros(p)
    batch_index = 0

    lo, hi = config.adapt_band
    target = 0.5 * (lo + hi)
    draw_index = 0
    for it in range(1, config.iterations + 1):
        pairs = [(k, g) for k in range(p) for g in range(n_blocks)]
        if config.randomize_sweep:
            rng.shuffle(pairs)
        if config.update_beta:
            for k, g in pairs:
                accepted = update_beta_block(state, ws, k, g, scale_beta[k, g], rng)
                att_beta[k, g] += 1
                batch_att[k, g] += 1
                if accepted:
                    acc_beta[k, g] += 1
                    batch_acc[k, g] += 1
        if config.update_sigma2:
            update_sigma2(state, ws, rng)
        if config.update_lambda:
            for k in range(p):
                accepted = update_lambda(state, ws, k, priors[k], scale_lam[k], rng)
                att_lam[k] += 1
                batch_att_lam[k] += 1
                if accepted:
                    acc_lam[k] += 1
                    batch_acc_lam[k] += 1
        if config.update_u:
            for k in range(p):
                update_u(state, ws, k, rng)
        if config.update_tau2:
            for k in range(p):
                update_tau2(state, ws, k, rng)
        if b_candidates is not None:
            new_index = update_b(state, b_candidates, rng)
            if new_index != current_b_index:
                current_b_index = new_index
                ws = b_candidates[current_b_index]
                ws.reset(state)

        if config.adapt and it <= config.burn_in and it % config.adapt_interval == 0:
            batch_index += 1
            gamma = 1.0 / math.sqrt(batch_index)
            with np.errstate(invalid="ignore", divide="ignore"):
                rates = np.where(batch_att > 0, batch_acc / np.maximum(batch_att, 1), target)
            scale_beta *= np.exp(gamma * (rates - target))
            rates_lam = np.where(batch_att_lam > 0, batch_acc_lam / np.maximum(batch_att_lam, 1), target)
            scale_lam *= np.exp(gamma * (rates_lam - target))
            batch_att.fill(0)
            batch_acc.fill(0)
            batch_att_lam.fill(0)
            batch_acc_lam.fill(0)

        if it > config.burn_in and (it - config.burn_in) % config.thin == 0:
            out_beta[draw_index] = state.beta_tilde
            out_u[draw_index] = state.u
            out_lam[draw_index] = state.lam
            out_sigma2[draw_index] = state.sigma2
            out_tau2[draw_index] = state.tau2
            if out_b is not None:
                out_b[draw_index] = b_values[current_b_index]
            draw_index += 1

    with np.errstate(invalid="ignore", divide="ignore"):
        rate_beta = np.where(att_beta > 0, acc_beta / np.maximum(att_beta, 1), 0.0)
        rate_lam = np.where(att_lam > 0, acc_lam / np.maximum(att_lam, 1), 0.0)

    return ChainOutput(
        beta_tilde=out_beta,
        u=out_u,
        lam=out_lam,
        sigma2=out_sigma2,
        tau2=out_tau2,
        accept_beta=rate_beta,
        accept_lambda=rate_lam,
        mode=mode,
        block_labels=ws.block_labels,
        seed=config.seed,
        config=_config_echo(config),
        b_draws=out_b,
    )


def _glm_coefficient_features(dataset):
    """Voxelwise least-squares coefficient vectors, the default clustering features."""
    coef, _, _, _ = np.linalg.lstsq(dataset.X, dataset.Y, rcond=None)  # (p, n)
    return coef.T


def _config_echo(config):
    echo = {}
    for key, value in vars(config).items():
        if key == "init_state":
            echo[key] = value is not None
        elif isinstance(value, np.ndarray):
            echo[key] = value.tolist()
        elif isinstance(value, tuple):
            echo[key] = list(value)
        else:
            echo[key] = value
    return echo
