"""Spatial domains, datasets, synthetic ground truth, and ingestion transforms.

A dataset couples an (m x n) outcome matrix with an (m x p) design matrix over
a spatial domain of n locations partitioned into regions. Synthetic data uses
built-in sparse truth generators (radial bumps, tilted planes clipped to
regions) with a documented lower bound on the nonzero coefficient magnitude,
so support-recovery metrics have exact ground truth.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DataFormatError

__all__ = [
    "SpatialDomain",
    "Dataset",
    "GroundTruth",
    "TruthSpec",
    "grid_domain",
    "make_truth",
    "truth_preset",
    "simulate",
    "logit_falff",
    "standardize",
    "write_dataset",
    "read_dataset",
]

PAPER_COVARIATES = (
    {"dist": "normal", "mean": 0.0, "var": 4.0},
    {"dist": "uniform", "low": -1.0, "high": 1.0},
    {"dist": "bernoulli", "p": 0.5},
)


@dataclass(frozen=True)
class SpatialDomain:
    """n locations in R^d with region labels in 1..G."""

    locations: np.ndarray  # (n, d)
    region_labels: np.ndarray  # (n,) int

    def __post_init__(self):
        locs = np.asarray(self.locations, dtype=float)
        labels = np.asarray(self.region_labels, dtype=np.int64)
        if locs.ndim != 2 or labels.ndim != 1 or locs.shape[0] != labels.shape[0]:
            raise ValueError("locations must be (n, d) with one region label per location")
        if len(np.unique(locs, axis=0)) != locs.shape[0]:
            raise ValueError("locations must be distinct")
        G = int(labels.max()) if labels.size else 0
        present = np.unique(labels)
        if labels.size and (present[0] < 1 or len(present) != G):
            raise ValueError("region labels must cover 1..G with every label present")
        object.__setattr__(self, "locations", locs)
        object.__setattr__(self, "region_labels", labels)

    @property
    def n(self) -> int:
        return self.locations.shape[0]

    @property
    def d(self) -> int:
        return self.locations.shape[1]

    @property
    def G(self) -> int:
        return int(self.region_labels.max())

    def region_indices(self):
        """List of index arrays, entry g-1 holding the locations of region g."""
        return [np.flatnonzero(self.region_labels == g) for g in range(1, self.G + 1)]


@dataclass(frozen=True)
class Dataset:
    Y: np.ndarray  # (m, n)
    X: np.ndarray  # (m, p)
    domain: SpatialDomain

    def __post_init__(self):
        Y = np.asarray(self.Y, dtype=float)
        X = np.asarray(self.X, dtype=float)
        if Y.ndim != 2 or X.ndim != 2 or Y.shape[0] != X.shape[0]:
            raise ValueError("Y must be (m, n) and X (m, p) with matching subject count")
        if Y.shape[1] != self.domain.n:
            raise ValueError(f"Y has {Y.shape[1]} columns but the domain has {self.domain.n} locations")
        if not (np.isfinite(Y).all() and np.isfinite(X).all()):
            raise ValueError("Y and X entries must be finite")
        object.__setattr__(self, "Y", Y)
        object.__setattr__(self, "X", X)

    @property
    def m(self) -> int:
        return self.Y.shape[0]

    @property
    def n(self) -> int:
        return self.Y.shape[1]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class GroundTruth:
    """True coefficient fields with their sparsity bookkeeping."""

    beta: np.ndarray  # (p, n)
    sigma2: float
    active_regions: tuple[frozenset, ...]  # per covariate, region labels carrying signal
    lambda0: float  # documented lower bound on |beta| over active regions


def grid_domain(resolution, d=2, region_split=2):
    """Regular grid of cell centers on the unit square/cube, block-partitioned into regions.

    ``resolution`` cells per axis gives n = resolution**d locations; the region
    label tiles ``region_split`` blocks per axis (G = region_split**d).
    """
    if resolution < 1 or d < 1 or region_split < 1:
        raise ValueError("resolution, dimension, and region split must be positive")
    axis = (np.arange(resolution) + 0.5) / resolution
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    locs = np.column_stack([m.ravel() for m in mesh])
    cell = np.minimum((locs * region_split).astype(int), region_split - 1)
    labels = 1 + cell @ (region_split ** np.arange(d))
    return SpatialDomain(locations=locs, region_labels=labels.astype(np.int64))


@dataclass(frozen=True)
class TruthSpec:
    """JSON-friendly recipe for sparse piecewise-smooth truth fields on a grid."""

    resolution: int
    fields: tuple  # per covariate: tuple of component dicts
    d: int = 2
    region_split: int = 2
    lambda0: float = 1.5

    @property
    def p(self) -> int:
        return len(self.fields)

    @classmethod
    def from_dict(cls, cfg: dict) -> "TruthSpec":
        if "preset" in cfg:
            extra = {k: v for k, v in cfg.items() if k != "preset"}
            return truth_preset(cfg["preset"], **extra)
        fields = tuple(tuple(comps) for comps in cfg["fields"])
        return cls(
            resolution=int(cfg["resolution"]),
            fields=fields,
            d=int(cfg.get("d", 2)),
            region_split=int(cfg.get("region_split", 2)),
            lambda0=float(cfg.get("lambda0", 1.5)),
        )


def truth_preset(name, resolution=30, lambda0=1.5):
    """Named truth recipes used by the benchmark harness.

    ``bumps3``: three covariates on a 2x2-partitioned unit square; a radial bump,
    a negative tilted plane, and a two-region mix. All nonzero values have
    magnitude >= lambda0.
    """
    if name == "bumps3":
        fields = (
            ({"kind": "bump", "region": 1, "amplitude": 1.5, "sign": 1.0},),
            ({"kind": "plane", "region": 4, "slope": (1.2, 0.8), "sign": -1.0},),
            (
                {"kind": "bump", "region": 2, "amplitude": 1.5, "sign": 1.0},
                {"kind": "plane", "region": 3, "slope": (0.9, 0.9), "sign": -1.0},
            ),
        )
        return TruthSpec(resolution=resolution, fields=fields, lambda0=lambda0)
    raise ValueError(f"unknown truth preset {name!r}")


def make_truth(spec: TruthSpec):
    """Build the domain and exact coefficient fields for a truth recipe."""
    domain = grid_domain(spec.resolution, d=spec.d, region_split=spec.region_split)
    beta = np.zeros((spec.p, domain.n))
    active = []
    region_idx = domain.region_indices()
    for k, components in enumerate(spec.fields):
        regions_seen = set()
        for comp in components:
            g = int(comp["region"])
            if g in regions_seen:
                raise ValueError(f"covariate {k}: region {g} used by two components")
            regions_seen.add(g)
            idx = region_idx[g - 1]
            pts = domain.locations[idx]
            lam0 = float(comp.get("lambda0", spec.lambda0))
            sign = float(comp.get("sign", 1.0))
            if comp["kind"] == "bump":
                center = np.asarray(comp.get("center", pts.mean(axis=0)), dtype=float)
                width = float(comp.get("width", 0.35 / spec.region_split))
                amp = float(comp.get("amplitude", 1.5))
                raw = np.exp(-np.sum((pts - center) ** 2, axis=1) / (2.0 * width**2))
                # floor-normalize so the bump vanishes at the region's farthest
                # point: the field's infimum over the region is then exactly lam0
                floor = raw.min()
                shape = amp * (raw - floor) / (1.0 - floor) if floor < 1.0 else np.zeros_like(raw)
            elif comp["kind"] == "plane":
                slope = np.asarray(comp["slope"], dtype=float)
                if (slope < 0).any():
                    raise ValueError("plane slopes must be nonnegative to keep |beta| >= lambda0")
                shape = (pts - pts.min(axis=0)) @ slope
            else:
                raise ValueError(f"unknown truth component kind {comp['kind']!r}")
            beta[k, idx] = sign * (lam0 + shape)
        active.append(frozenset(regions_seen))
    return domain, beta, tuple(active)


def _draw_covariates(m, x_spec, rng):
    cols = []
    for spec in x_spec:
        dist = spec["dist"]
        if dist == "normal":
            cols.append(rng.normal(spec.get("mean", 0.0), np.sqrt(spec["var"]), size=m))
        elif dist == "uniform":
            cols.append(rng.uniform(spec["low"], spec["high"], size=m))
        elif dist == "bernoulli":
            cols.append((rng.random(m) < spec["p"]).astype(float))
        elif dist == "constant":
            cols.append(np.full(m, float(spec.get("value", 1.0))))
        else:
            raise ValueError(f"unknown covariate distribution {dist!r}")
    return np.column_stack(cols)


def simulate(truth_spec, m, sigma2, seed, x_spec=None):
    """Generate a synthetic dataset: Y = X @ beta + noise with N(0, sigma2) errors.

    ``truth_spec`` is a TruthSpec (or its dict form). With p = 3 covariates the
    default design draws N(0, 4), Unif(-1, 1), and Bernoulli(0.5) columns;
    otherwise ``x_spec`` must list one distribution per covariate. sigma2 = 0
    produces noiseless outcomes, which is allowed for exactness tests.
    """
    if isinstance(truth_spec, dict):
        truth_spec = TruthSpec.from_dict(truth_spec)
    if m < 1:
        raise ValueError(f"subject count must be positive, got {m}")
    if sigma2 < 0:
        raise ValueError(f"noise variance must be nonnegative, got {sigma2}")
    domain, beta, active = make_truth(truth_spec)
    p = beta.shape[0]
    if x_spec is None:
        if p != len(PAPER_COVARIATES):
            raise ValueError(f"no default covariate design for p={p}; pass x_spec")
        x_spec = PAPER_COVARIATES
    if len(x_spec) != p:
        raise ValueError(f"x_spec lists {len(x_spec)} covariates but the truth has {p}")
    rng = np.random.default_rng(seed)
    X = _draw_covariates(m, x_spec, rng)
    noise = rng.normal(0.0, np.sqrt(sigma2), size=(m, domain.n)) if sigma2 > 0 else 0.0
    Y = X @ beta + noise
    dataset = Dataset(Y=Y, X=X, domain=domain)
    truth = GroundTruth(beta=beta, sigma2=float(sigma2), active_regions=active, lambda0=truth_spec.lambda0)
    return dataset, truth


def logit_falff(f):
    """Log-odds transform of a fraction in (0, 1); accepts scalars or arrays."""
    arr = np.asarray(f, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr >= 1.0):
        raise ValueError("values must lie strictly inside (0, 1)")
    out = np.log(arr / (1.0 - arr))
    return float(out) if np.ndim(f) == 0 else out


def standardize(X, spec):
    """Center and/or scale design columns.

    ``spec`` gives one of "none", "center", "scale", "center+scale" per column;
    "scale" divides by the sample standard deviation (ddof=1), "center+scale"
    does both. Intercept columns should use "none".
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or len(spec) != X.shape[1]:
        raise ValueError("spec must name one action per design column")
    out = X.copy()
    for j, action in enumerate(spec):
        if action == "none":
            continue
        if action not in ("center", "scale", "center+scale"):
            raise ValueError(f"unknown standardization action {action!r}")
        col = out[:, j]
        if "center" in action:
            col = col - col.mean()
        if "scale" in action:
            sd = col.std(ddof=1)
            if not sd > 0:
                raise ValueError(f"column {j} has zero variance and cannot be scaled")
            col = col / sd
        out[:, j] = col
    return out


_FILES = {"X": "X.csv", "Y": "Y.csv", "locations": "locations.csv", "regions": "regions.csv"}


def write_dataset(dataset, path, truth=None, extra_meta=None):
    """Write a dataset directory: X.csv, Y.csv, locations.csv, regions.csv, meta.json.

    Numeric CSVs carry no header and round-trip at 17 significant digits.
    """
    os.makedirs(path, exist_ok=True)
    np.savetxt(os.path.join(path, _FILES["X"]), dataset.X, fmt="%.17g", delimiter=",")
    np.savetxt(os.path.join(path, _FILES["Y"]), dataset.Y, fmt="%.17g", delimiter=",")
    np.savetxt(os.path.join(path, _FILES["locations"]), dataset.domain.locations, fmt="%.17g", delimiter=",")
    np.savetxt(os.path.join(path, _FILES["regions"]), dataset.domain.region_labels[:, None], fmt="%d", delimiter=",")
    meta = {
        "m": dataset.m,
        "n": dataset.n,
        "p": dataset.p,
        "d": dataset.domain.d,
        "G": dataset.domain.G,
    }
    if truth is not None:
        np.savetxt(os.path.join(path, "truth.csv"), truth.beta, fmt="%.17g", delimiter=",")
        meta["sigma2"] = truth.sigma2
        meta["lambda0"] = truth.lambda0
        meta["active_regions"] = [sorted(s) for s in truth.active_regions]
    if extra_meta:
        meta.update(extra_meta)
    with open(os.path.join(path, "meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_csv(path, name):
    fname = os.path.join(path, name)
    if not os.path.exists(fname):
        raise DataFormatError(f"missing {name} in {path}")
    try:
        return np.loadtxt(fname, delimiter=",", ndmin=2)
    except ValueError as exc:
        raise DataFormatError(f"malformed CSV {fname}: {exc}") from None


def read_dataset(path, with_truth=False):
    """Read a dataset directory written by ``write_dataset``."""
    meta_path = os.path.join(path, "meta.json")
    if not os.path.exists(meta_path):
        raise DataFormatError(f"missing meta.json in {path}")
    with open(meta_path) as fh:
        meta = json.load(fh)
    X = _load_csv(path, _FILES["X"])
    Y = _load_csv(path, _FILES["Y"])
    locs = _load_csv(path, _FILES["locations"])
    labels = _load_csv(path, _FILES["regions"]).astype(np.int64).ravel()
    m, n, p, d, G = (int(meta[k]) for k in ("m", "n", "p", "d", "G"))
    if X.shape != (m, p) or Y.shape != (m, n) or locs.shape != (n, d) or labels.shape != (n,):
        raise DataFormatError(
            f"shape mismatch in {path}: X{X.shape} Y{Y.shape} locations{locs.shape} regions{labels.shape}"
            f" vs meta (m={m}, n={n}, p={p}, d={d})"
        )
    if labels.min() < 1 or labels.max() > G:
        raise DataFormatError(f"region labels must lie in 1..{G}")
    try:
        domain = SpatialDomain(locations=locs, region_labels=labels)
        dataset = Dataset(Y=Y, X=X, domain=domain)
    except ValueError as exc:
        raise DataFormatError(str(exc)) from None
    if not with_truth:
        return dataset
    truth = None
    truth_file = os.path.join(path, "truth.csv")
    if os.path.exists(truth_file):
        beta = _load_csv(path, "truth.csv")
        if beta.shape != (p, n):
            raise DataFormatError(f"truth.csv has shape {beta.shape}, expected ({p}, {n})")
        truth = GroundTruth(
            beta=beta,
            sigma2=float(meta.get("sigma2", float("nan"))),
            active_regions=tuple(frozenset(s) for s in meta.get("active_regions", [])),
            lambda0=float(meta.get("lambda0", float("nan"))),
        )
    return dataset, truth
