"""Data-driven elicitation of uniform priors for the thresholding parameters.

The procedure smooths a voxelwise least-squares fit onto the kernel basis,
profiles the thresholding objective over a grid of candidate thresholds, and
scans windowed sample correlations to locate the turning point where the
profile stops being flat. The elicited uniform prior is centered there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import ElicitationError, SingularDesignError
from .kernel import basis_matrix

__all__ = [
    "LambdaProfile",
    "LambdaPrior",
    "choose_fit_eigensystem",
    "ols_basis_fit",
    "default_grid",
    "profile",
    "windowed_corr",
    "elicit",
    "elicit_priors",
]


@dataclass(frozen=True)
class LambdaProfile:
    """Profile values of the thresholding objective on an increasing grid."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape:
            raise ValueError("grid and values must be matching 1-D arrays")
        if grid.size and not np.all(np.diff(grid) > 0):
            raise ValueError("grid must be strictly increasing")
        if not np.isfinite(values).all():
            raise ValueError("profile values must be finite")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class LambdaPrior:
    """Uniform prior Unif(center - half_range, center + half_range) for a threshold."""

    center: float
    half_range: float

    def __post_init__(self):
        if self.half_range <= 0:
            raise ValueError("half_range must be positive")
        if self.center - self.half_range < -1e-12:
            raise ValueError("prior support may not extend below zero")

    @property
    def low(self) -> float:
        return max(0.0, self.center - self.half_range)

    @property
    def high(self) -> float:
        return self.center + self.half_range

    @property
    def std(self) -> float:
        return (self.high - self.low) / np.sqrt(12.0)


def choose_fit_eigensystem(domain, params, target_ratio=0.90, min_rel_sv=1e-9):
    """Truncation for fitting: the ratio target, capped so the basis stays full rank.

    Eigenfunctions restricted to a bounded grid lose numerical independence as
    the polynomial degree grows, long before the eigenvalue-mass target is
    reached. Because the basis is graded, columns of lower degree form a
    prefix: find the largest total degree whose prefix keeps the smallest
    singular value above ``min_rel_sv`` times the largest.
    """
    from math import comb

    from .kernel import EigenSystem, truncation_level

    target = truncation_level(target_ratio, params)
    Phi = basis_matrix(domain.locations, target)
    m_deg = target.m_deg
    while m_deg > 0:
        L = comb(m_deg + params.d, params.d)
        sv = np.linalg.svd(Phi[:, :L], compute_uv=False)
        if sv[-1] > min_rel_sv * sv[0] and L <= domain.n:
            break
        m_deg -= 1
    return EigenSystem.build(params, m_deg)


def ols_basis_fit(dataset, eig):
    """Least-squares fit of all coefficient fields on the truncated kernel basis.

    Exploits the separable design: first the voxelwise coefficient solve
    (X^T X)^{-1} X^T Y, then per covariate the basis projection
    (Phi^T Phi)^{-1} Phi^T. The result equals the joint least-squares fit over
    the Kronecker design of covariates and basis functions.

    Returns ``(W, beta_hat)`` with W of shape (p, L) and beta_hat of shape (p, n).
    """
    X, Y = dataset.X, dataset.Y
    n, p = dataset.n, dataset.p
    if n < eig.L:
        raise SingularDesignError(f"basis fit needs n >= L, got n={n}, L={eig.L}")
    if dataset.m < p:
        raise SingularDesignError(f"design fit needs m >= p, got m={dataset.m}, p={p}")
    if np.linalg.matrix_rank(X) < p:
        raise SingularDesignError("design matrix X is rank deficient")
    Phi = basis_matrix(dataset.domain.locations, eig)
    b_ols, _, rank, _ = np.linalg.lstsq(X, Y, rcond=None)  # (p, n)
    W, _, rank_phi, _ = np.linalg.lstsq(Phi, b_ols.T, rcond=None)  # (L, p)
    if rank_phi < eig.L:
        raise SingularDesignError(
            f"basis matrix is numerically rank deficient (rank {rank_phi} < L={eig.L});"
            " reduce the truncation level"
        )
    W = W.T
    beta_hat = W @ Phi.T
    return W, beta_hat


def default_grid(beta_hat_k, num=100, upper_quantile=99.5):
    """Equally spaced threshold grid from 0 to an upper quantile of |beta_hat|."""
    hi = np.percentile(np.abs(beta_hat_k), upper_quantile)
    if hi <= 0:
        hi = 1.0
    return np.linspace(0.0, hi, num)


def profile(dataset, beta_hat, k, grid=None):
    """Evaluate the thresholding objective for covariate k on a grid.

    The objective at threshold lam sums, over locations whose smoothed estimate
    survives |beta_hat_k| > lam, the likelihood-gain weights
    w(s) = sum_j b(s) x_jk [2 y_{j,-k}(s) - b(s) x_jk] with the smoothed
    estimates standing in for both the latent field and the other covariates.
    """
    X, Y = dataset.X, dataset.Y
    xk = X[:, k]
    bk = beta_hat[k]
    # residual outcomes with every *other* covariate's smoothed effect removed
    y_minus = Y - X @ beta_hat + np.outer(xk, bk)
    s2 = float(xk @ xk)
    omega = 2.0 * bk * (xk @ y_minus) - bk * bk * s2
    if grid is None:
        grid = default_grid(bk)
    abs_b = np.abs(bk)
    order = np.argsort(abs_b)
    sorted_abs = abs_b[order]
    suffix = np.concatenate([np.cumsum(omega[order][::-1])[::-1], [0.0]])
    # value at lam: sum of omega over |b| > lam
    pos = np.searchsorted(sorted_abs, grid, side="right")
    values = suffix[pos]
    return LambdaProfile(grid=np.asarray(grid, dtype=float), values=values)


def windowed_corr(prof, interval):
    """Pearson correlation of (grid, value) pairs strictly inside an interval.

    Returns NaN when fewer than 3 grid points fall inside or either coordinate
    has zero variance; callers treat NaN as "no significant correlation".
    """
    a, b = interval
    mask = (prof.grid > a) & (prof.grid < b)
    if mask.sum() < 3:
        return float("nan")
    x = prof.grid[mask]
    y = prof.values[mask]
    sx = x.std()
    sy = y.std()
    if sx == 0.0 or sy == 0.0:
        return float("nan")
    return float(np.mean((x - x.mean()) * (y - y.mean())) / (sx * sy))


def _pearson_critical(window_size, alpha):
    """Two-sided critical correlation at level alpha for a given window size."""
    df = window_size - 2
    if df < 1:
        return float("inf")
    t_crit = stats.t.ppf(1.0 - alpha / 2.0, df)
    return t_crit / np.sqrt(df + t_crit * t_crit)


def _window_significant(prof, center, h, alpha):
    mask = (prof.grid > center - h) & (prof.grid < center + h)
    rho = windowed_corr(prof, (center - h, center + h))
    if np.isnan(rho):
        return False
    return abs(rho) > _pearson_critical(int(mask.sum()), alpha)


def _significance_map(prof, h, alpha):
    return np.array([_window_significant(prof, c, h, alpha) for c in prof.grid])


def elicit(prof, alpha=0.05, h_ladder=None, mode="turning_point", min_run=3, h_floor=0.0):
    """Select the uniform prior (center, half range) from a threshold profile.

    For each half-width ``h`` in the ladder (smallest first), classify every
    grid point by whether its symmetric window shows a significant correlation
    at level ``alpha``, then pick a center:

    - ``"turning_point"`` (default): the start of the final contiguous run of
      at least ``min_run`` significant points. The profile's sustained decline
      runs from the turning point through the upper grid end, so the last run
      begins where flatness ends; sporadic significance from estimation noise
      at small thresholds is ignored.
    - ``"first_insignificant"``: the lowest grid point whose window shows no
      significant correlation (a literal reading of the selection rule's
      surrounding prose).
    - ``"first_significant"``: the lowest grid point whose window is
      significant (the flipped comparison).

    The first ladder entry with a qualifying point fixes both the half range
    and the center. ``h_floor`` widens the half range to at least that value;
    the onset of the profile's decline sits below the true threshold by about
    the estimation noise in the plugged-in coefficients, so callers pass a
    floor of a few standard errors to keep the true value inside the support.
    The support is clamped at zero from below, preserving the upper endpoint.
    """
    if prof.grid.size == 0:
        raise ElicitationError("empty profile")
    if mode not in ("turning_point", "first_insignificant", "first_significant"):
        raise ValueError(f"unknown elicitation mode {mode!r}")
    if h_ladder is None:
        if prof.grid.size < 2:
            raise ElicitationError("profile too short for the default ladder")
        step = prof.grid[1] - prof.grid[0]
        h_ladder = [k * step for k in range(3, 26)]
    for h in h_ladder:
        center = None
        if mode == "turning_point":
            sig = _significance_map(prof, h, alpha)
            idx = np.flatnonzero(sig)
            if idx.size:
                end = idx[-1]
                start = end
                while start - 1 in idx:
                    start -= 1
                if end - start + 1 >= min_run:
                    center = prof.grid[start]
        else:
            want = mode == "first_significant"
            for c in prof.grid:
                if _window_significant(prof, c, h, alpha) == want:
                    center = c
                    break
        if center is not None:
            h = max(h, h_floor)
            low = max(0.0, center - h)
            high = center + h
            return LambdaPrior(center=0.5 * (low + high), half_range=0.5 * (high - low))
    raise ElicitationError("no qualifying window on the profile; widen the grid or ladder")


def elicit_priors(
    dataset,
    eig,
    alpha=0.05,
    grid_size=100,
    mode="turning_point",
    se_floor_mult=3.0,
    estimates="glm",
):
    """Per-covariate profiles and elicited priors. Returns (priors, profiles).

    ``estimates`` picks the rough coefficient estimates plugged into the
    profile: "glm" (default) uses the unsmoothed voxelwise least-squares
    coefficients, whose turning-point blur is pure estimation noise; "basis"
    uses the kernel-basis smoother, which adds smoothing bias near jumps. The
    half-range floor is ``se_floor_mult`` times the median voxelwise standard
    error of each covariate's coefficient, matching that noise blur.
    """
    coef, se = _voxelwise_fit(dataset)
    if estimates == "glm":
        beta_hat = coef
    elif estimates == "basis":
        _, beta_hat = ols_basis_fit(dataset, eig)
    else:
        raise ValueError(f"unknown estimates choice {estimates!r}")
    priors, profiles = [], []
    for k in range(dataset.p):
        prof = profile(dataset, beta_hat, k, grid=default_grid(beta_hat[k], num=grid_size))
        profiles.append(prof)
        priors.append(elicit(prof, alpha=alpha, mode=mode, h_floor=se_floor_mult * se[k]))
    return priors, profiles


def _voxelwise_fit(dataset):
    """Per-voxel OLS coefficients and the median-over-locations standard errors."""
    X, Y = dataset.X, dataset.Y
    m, p = X.shape
    xtx_inv = np.linalg.inv(X.T @ X)
    coef = xtx_inv @ (X.T @ Y)
    resid = Y - X @ coef
    sigma2_hat = np.sum(resid * resid, axis=0) / max(m - p, 1)
    se = np.sqrt(np.outer(np.diag(xtx_inv), sigma2_hat))
    return coef, np.median(se, axis=1)
