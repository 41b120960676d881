"""Closed-form Mercer eigensystem of the modified squared-exponential kernel.

The kernel

    kappa(s, s') = exp(-a ||s||^2 - a ||s'||^2 - b ||s - s'||^2)

admits an analytic eigen-decomposition: eigenfunctions are Gaussian-weighted
products of normalized Hermite polynomials indexed by multi-indices in graded
order, and eigenvalues decay geometrically in the total polynomial degree.
This module provides the combinatorial rank <-> multi-index mapping, stable
Hermite evaluation, truncation-level selection by eigenvalue mass, and the
basis / Gram matrices used everywhere else in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalError

__all__ = [
    "KernelParams",
    "MultiIndex",
    "EigenSystem",
    "hermite",
    "multi_index",
    "eigenvalue",
    "eigenfunction",
    "kernel_eval",
    "recovery_ratio",
    "truncation_level",
    "basis_matrix",
    "gram",
    "cholesky_with_jitter",
]


@dataclass(frozen=True)
class KernelParams:
    """Kernel hyperparameters: envelope decay ``a``, spatial range ``b``, dimension ``d``."""

    a: float
    b: float
    d: int

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"kernel parameters must be positive, got a={self.a}, b={self.b}")
        if not (isinstance(self.d, (int, np.integer)) and self.d >= 1):
            raise ValueError(f"dimension must be a positive integer, got d={self.d}")

    @property
    def c(self) -> float:
        return math.sqrt(self.a * self.a + 2.0 * self.a * self.b)

    @property
    def A(self) -> float:
        return self.a + self.b + self.c

    @property
    def B(self) -> float:
        return self.b / self.A


@dataclass(frozen=True)
class MultiIndex:
    """Rank ``l`` (1-based, graded order) with per-coordinate degrees and total degree."""

    l: int
    degrees: tuple[int, ...]
    total: int


def hermite(k, x):
    """Normalized Hermite polynomial H_k, orthonormal under the weight exp(-x^2).

    H_0(x) = pi^(-1/4) and the sequence satisfies the stable recurrence
    H_{k+1}(x) = x sqrt(2/(k+1)) H_k(x) - sqrt(k/(k+1)) H_{k-1}(x).
    Accepts scalar or array ``x``.
    """
    if k < 0:
        raise ValueError(f"Hermite order must be nonnegative, got {k}")
    table = _hermite_table(int(k), np.asarray(x, dtype=float))
    out = table[int(k)]
    return float(out) if np.isscalar(x) or np.ndim(x) == 0 else out


def _hermite_table(kmax, x):
    """All normalized Hermite values H_0..H_kmax at ``x``; shape (kmax+1,) + x.shape."""
    x = np.asarray(x, dtype=float)
    table = np.empty((kmax + 1,) + x.shape, dtype=float)
    table[0] = math.pi ** -0.25
    if kmax >= 1:
        table[1] = math.sqrt(2.0) * x * table[0]
    for k in range(1, kmax):
        table[k + 1] = x * math.sqrt(2.0 / (k + 1)) * table[k] - math.sqrt(k / (k + 1.0)) * table[k - 1]
    return table


def _find_block(count_fn, target):
    """Smallest k with count_fn(k) <= target < count_fn(k+1), for nondecreasing count_fn."""
    k = 0
    while count_fn(k + 1) <= target:
        k += 1
    return k


def multi_index(l, d):
    """Map a 1-based rank to its multi-index in graded order.

    The recursion peels one coordinate at a time: ``k_i`` is the residual total
    degree after fixing the first ``i`` coordinates, located by bracketing the
    residual rank between cumulative multi-index counts, and the degree of
    coordinate ``i`` is the drop ``k_{i-1} - k_i``.
    """
    if l < 1:
        raise ValueError(f"rank must be >= 1, got {l}")
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    residual = l - 1
    k_prev = None
    degrees = []
    for i in range(d):
        r = d - i
        # number of multi-indices in r coords with total degree < k
        k_i = _find_block(lambda k: math.comb(k + r - 1, r), residual)
        if k_prev is not None:
            degrees.append(k_prev - k_i)
        residual -= math.comb(k_i + r - 1, r)
        k_prev = k_i
        if i == 0:
            total = k_i
    degrees.append(k_prev)  # k_d = 0 closes the telescope
    return MultiIndex(l=l, degrees=tuple(degrees), total=total)


def _index_table(L, d):
    """Degrees (L, d) and total degree (L,) for ranks 1..L."""
    degrees = np.empty((L, d), dtype=np.int64)
    totals = np.empty(L, dtype=np.int64)
    for l in range(1, L + 1):
        mi = multi_index(l, d)
        degrees[l - 1] = mi.degrees
        totals[l - 1] = mi.total
    return degrees, totals


def eigenvalue(l, params):
    """Eigenvalue of rank ``l``: (pi/A)^(d/2) * B^(total degree of l).

    The normalization pairs with L2-orthonormal eigenfunctions: the geometric
    sum of all eigenvalues then equals the kernel trace (pi/(2a))^(d/2), and
    the truncated expansion reconstructs the kernel (Mercer identity).
    """
    k0 = multi_index(l, params.d).total
    return (math.pi / params.A) ** (params.d / 2.0) * params.B ** k0


def eigenfunction(l, s, params):
    """Eigenfunction of rank ``l`` at one or more points.

    phi_l(s) = (2c)^(d/4) exp(-c ||s||^2) prod_i H_{m_i}(sqrt(2c) s_i).
    """
    pts = _as_points(s, params.d)
    mi = multi_index(l, params.d)
    c = params.c
    scaled = math.sqrt(2.0 * c) * pts
    vals = (2.0 * c) ** (params.d / 4.0) * np.exp(-c * np.sum(pts * pts, axis=1))
    for i, m in enumerate(mi.degrees):
        vals = vals * _hermite_table(m, scaled[:, i])[m]
    return float(vals[0]) if _is_single_point(s, params.d) else vals


def kernel_eval(s, sp, params):
    """Kernel value kappa(s, s') for single points or arrays of points."""
    p1 = _as_points(s, params.d)
    p2 = _as_points(sp, params.d)
    a, b = params.a, params.b
    diff = p1 - p2
    val = np.exp(
        -a * np.sum(p1 * p1, axis=1)
        - a * np.sum(p2 * p2, axis=1)
        - b * np.sum(diff * diff, axis=1)
    )
    single = _is_single_point(s, params.d) and _is_single_point(sp, params.d)
    return float(val[0]) if single else val


def recovery_ratio(m_deg, params):
    """Fraction of total eigenvalue mass retained by truncating at total degree ``m_deg``."""
    d, B = params.d, params.B
    partial = sum(math.comb(k + d - 1, d - 1) * B**k for k in range(m_deg + 1))
    return (1.0 - B) ** d * partial


def truncation_level(target_ratio, params, max_degree=2000):
    """Smallest truncation (by total degree) whose retained eigenvalue mass meets ``target_ratio``."""
    if not (0.0 < target_ratio < 1.0):
        raise ValueError(f"target ratio must lie in (0, 1), got {target_ratio}")
    m_deg = 0
    while recovery_ratio(m_deg, params) < target_ratio:
        m_deg += 1
        if m_deg > max_degree:
            raise NumericalError(
                f"no truncation up to total degree {max_degree} reaches ratio {target_ratio}"
            )
    return EigenSystem.build(params, m_deg)


@dataclass(frozen=True)
class EigenSystem:
    """Truncated analytic eigensystem: all ranks with total degree <= ``m_deg``."""

    params: KernelParams
    m_deg: int
    L: int
    degrees: np.ndarray  # (L, d) int
    totals: np.ndarray  # (L,) int
    zeta: np.ndarray  # (L,) float, eigenvalues
    ratio: float

    @classmethod
    def build(cls, params, m_deg):
        L = math.comb(m_deg + params.d, params.d)
        degrees, totals = _index_table(L, params.d)
        zeta = (math.pi / params.A) ** (params.d / 2.0) * params.B ** totals.astype(float)
        return cls(
            params=params,
            m_deg=int(m_deg),
            L=L,
            degrees=degrees,
            totals=totals,
            zeta=zeta,
            ratio=recovery_ratio(m_deg, params),
        )

    def basis_matrix(self, locations):
        return basis_matrix(locations, self)

    def manifest(self) -> dict:
        return {
            "a": self.params.a,
            "b": self.params.b,
            "d": self.params.d,
            "m_deg": self.m_deg,
            "L": self.L,
            "ratio": self.ratio,
        }

    def index_rows(self):
        """Rows (l, k_0, m_1..m_d, zeta_l) for CSV export."""
        for i in range(self.L):
            yield (i + 1, int(self.totals[i]), *map(int, self.degrees[i]), float(self.zeta[i]))


def basis_matrix(locations, eig):
    """Matrix of eigenfunction values, entry (i, l) = phi_l(s_i); shape (n, L)."""
    pts = _as_points(locations, eig.params.d)
    n, d = pts.shape
    c = eig.params.c
    scaled = math.sqrt(2.0 * c) * pts
    herm = _hermite_table(eig.m_deg, scaled)  # (m_deg+1, n, d)
    envelope = (2.0 * c) ** (d / 4.0) * np.exp(-c * np.sum(pts * pts, axis=1))
    out = np.empty((n, eig.L), dtype=float)
    for l in range(eig.L):
        prod = envelope.copy()
        for i in range(d):
            prod *= herm[eig.degrees[l, i], :, i]
        out[:, l] = prod
    return out


def gram(locations, params):
    """Symmetric PSD matrix of pairwise kernel values."""
    pts = _as_points(locations, params.d)
    sq = np.sum(pts * pts, axis=1)
    cross = pts @ pts.T
    dist2 = sq[:, None] + sq[None, :] - 2.0 * cross
    np.clip(dist2, 0.0, None, out=dist2)
    K = np.exp(-params.a * (sq[:, None] + sq[None, :]) - params.b * dist2)
    return 0.5 * (K + K.T)


def cholesky_with_jitter(K, jitter=1e-8, retry=1e-6):
    """Lower Cholesky factor of K + jitter*I, retrying once with a larger jitter."""
    eye = np.eye(K.shape[0])
    for delta in (jitter, retry):
        try:
            return np.linalg.cholesky(K + delta * eye)
        except np.linalg.LinAlgError:
            continue
    raise NumericalError(
        f"Cholesky failed for a {K.shape[0]}x{K.shape[0]} kernel matrix even with jitter {retry}"
    )


def _as_points(s, d):
    """Coerce a point or array of points to shape (n, d)."""
    arr = np.asarray(s, dtype=float)
    if arr.ndim == 0:
        if d != 1:
            raise ValueError(f"scalar location given for dimension {d}")
        return arr.reshape(1, 1)
    if arr.ndim == 1:
        if arr.shape[0] == d:
            return arr.reshape(1, d)
        if d == 1:
            return arr.reshape(-1, 1)
        raise ValueError(f"cannot interpret shape {arr.shape} as points in dimension {d}")
    if arr.ndim == 2 and arr.shape[1] == d:
        return arr
    raise ValueError(f"cannot interpret shape {arr.shape} as points in dimension {d}")


def _is_single_point(s, d):
    arr = np.asarray(s)
    return arr.ndim == 0 or (arr.ndim == 1 and (arr.shape[0] == d or d == 1 and arr.shape[0] == 1))
