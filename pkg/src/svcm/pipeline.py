"""Replicate-level benchmark harness shared by the CLI and the acceptance suite.

A benchmark cell is a JSON-friendly config: a truth recipe plus (m, sigma2),
kernel settings, sampler settings, threshold-prior policy, and the competitor
methods to score. Replicates are seeded from one base seed, so runs are
reproducible regardless of worker scheduling.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .baselines import bh_fdr, bonferroni, glm_fit, threshold_naive_t, thresholded_estimate
from .data import TruthSpec, simulate
from .elicitation import LambdaPrior, choose_fit_eigensystem, elicit_priors
from .inference import estimate, estimate_voxel
from .kernel import KernelParams
from .mcmc import ChainState, McmcConfig, run_chain
from .metrics import ScoreReport, fdr_metric, fnr_metric, partial_auc, remse, support_rates

__all__ = [
    "bench_preset",
    "replicate_seeds",
    "build_eigensystem",
    "resolve_priors",
    "svcm_estimate",
    "run_bench_replicate",
    "run_bench",
    "run_roc_replicate",
    "run_roc",
]

GLM_METHODS = ("glm-t", "glm-fdr", "glm-bonf")

BENCH_DEFAULTS = {
    "truth": {"preset": "bumps3", "resolution": 30},
    "m": 50,
    "sigma2": 4.0,
    "kernel": {"a": 0.25, "b": 30.0, "target_ratio": 0.90},
    "mcmc": {"iterations": 10000, "burn_in": 5000, "thin": 5, "threshold_mode": "voxel", "n_blocks": 4},
    "priors": {"kind": "fixed", "center": 0.775, "half_range": 0.475},
    "q": 0.90,
    "alpha": 0.05,
    "fdr_level": 0.05,
    "fwer_level": 0.05,
    "replicates": 5,
    "methods": ["svcm", "glm-t", "glm-fdr", "glm-bonf"],
}


def bench_preset(name):
    """Benchmark cell configs named bench-n{900|2500|3600}-m{50|100}-s{2|4}."""
    parts = name.split("-")
    if len(parts) != 4 or parts[0] != "bench":
        raise ValueError(f"unknown preset {name!r}")
    n = int(parts[1].lstrip("n"))
    m = int(parts[2].lstrip("m"))
    s = float(parts[3].lstrip("s"))
    res = {900: 30, 2500: 50, 3600: 60}.get(n)
    if res is None or m not in (50, 100) or s not in (2.0, 4.0):
        raise ValueError(f"preset {name!r} is outside the benchmark grid")
    cfg = _deep_copy(BENCH_DEFAULTS)
    cfg["truth"]["resolution"] = res
    cfg["m"] = m
    cfg["sigma2"] = s
    if n >= 2500:
        cfg["mcmc"]["thin"] = 10
    # keep M-H blocks near 150 locations: per-coordinate mixing inside a joint
    # random-walk block degrades with block size, inflating Monte Carlo noise
    # in the conditional-mean estimates
    cfg["mcmc"]["n_blocks"] = {900: 6, 2500: 16, 3600: 24}[n]
    return cfg


def _deep_copy(obj):
    if isinstance(obj, dict):
        return {k: _deep_copy(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_deep_copy(v) for v in obj]
    return obj


def with_defaults(cfg, defaults=BENCH_DEFAULTS):
    out = _deep_copy(defaults)
    for key, value in cfg.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key].update(value)
        else:
            out[key] = value
    return out


def replicate_seeds(base_seed, replicates):
    """Two independent integer seeds (simulation, chain) per replicate."""
    states = np.random.SeedSequence(base_seed).generate_state(2 * replicates, dtype=np.uint64)
    return [(int(states[2 * i]), int(states[2 * i + 1])) for i in range(replicates)]


def build_eigensystem(domain, kernel_cfg):
    params = KernelParams(a=float(kernel_cfg["a"]), b=float(kernel_cfg["b"]), d=domain.d)
    return choose_fit_eigensystem(domain, params, target_ratio=float(kernel_cfg.get("target_ratio", 0.90)))


def resolve_priors(dataset, eig, priors_cfg):
    kind = priors_cfg.get("kind", "fixed")
    if kind == "fixed":
        if "per_covariate" in priors_cfg:
            return [LambdaPrior(center=float(c), half_range=float(h)) for c, h in priors_cfg["per_covariate"]]
        pr = LambdaPrior(center=float(priors_cfg["center"]), half_range=float(priors_cfg["half_range"]))
        return [pr] * dataset.p
    if kind == "elicit":
        opts = {k: priors_cfg[k] for k in ("alpha", "grid_size", "mode", "se_floor_mult", "estimates") if k in priors_cfg}
        priors, _ = elicit_priors(dataset, eig, **opts)
        return priors
    raise ValueError(f"unknown priors kind {kind!r}")


def svcm_estimate(chain, dataset, q=0.90):
    if chain.mode == "regional":
        return estimate(chain, dataset.domain, q=q)
    return estimate_voxel(chain, q=q)


def _fit_chain(dataset, eig, mcmc_cfg, priors, seed, lam_fixed=None):
    kwargs = dict(mcmc_cfg)
    kwargs["seed"] = seed
    q = kwargs.pop("q", 0.90)
    if lam_fixed is not None:
        kwargs["update_lambda"] = False
    config = McmcConfig(q=q, **kwargs)
    if lam_fixed is not None:
        chain = run_chain(dataset, eig, _with_fixed_lambda(config, dataset, eig, lam_fixed), priors=None)
    else:
        chain = run_chain(dataset, eig, config, priors=priors)
    return chain, q


def _with_fixed_lambda(config, dataset, eig, lam_fixed):
    from .elicitation import ols_basis_fit

    W, beta_hat = ols_basis_fit(dataset, eig)
    resid = dataset.Y - dataset.X @ beta_hat
    state = ChainState(
        beta_tilde=beta_hat.copy(),
        u=W.copy(),
        sigma2=max(float(np.mean(resid * resid)), 1e-12),
        tau2=np.ones(dataset.p),
        lam=np.asarray(lam_fixed, dtype=float),
    )
    config.init_state = state
    return config


def run_bench_replicate(cfg, replicate_index, sim_seed, chain_seed):
    """Simulate, fit, and score one replicate; returns a list of ScoreReports."""
    truth_spec = TruthSpec.from_dict(cfg["truth"])
    dataset, truth = simulate(truth_spec, m=int(cfg["m"]), sigma2=float(cfg["sigma2"]), seed=sim_seed)
    eig = build_eigensystem(dataset.domain, cfg["kernel"])
    glm = glm_fit(dataset)
    reports = []
    for method in cfg["methods"]:
        if method == "svcm":
            priors = resolve_priors(dataset, eig, cfg["priors"])
            chain, q = _fit_chain(dataset, eig, cfg["mcmc"], priors, chain_seed)
            est = svcm_estimate(chain, dataset, q=float(cfg.get("q", q)))
            beta = est.beta_hat
        elif method == "glm-t":
            beta = thresholded_estimate(glm, threshold_naive_t(glm, float(cfg["alpha"])))
        elif method == "glm-fdr":
            beta = thresholded_estimate(glm, bh_fdr(glm.pvals, float(cfg["fdr_level"])))
        elif method == "glm-bonf":
            beta = thresholded_estimate(glm, bonferroni(glm.pvals, float(cfg["fwer_level"])))
        else:
            raise ValueError(f"unknown method {method!r}")
        reports.append(
            ScoreReport(
                method=method,
                replicate=replicate_index,
                remse=remse(beta, glm.beta_star, truth.beta),
                fdr=fdr_metric(beta, truth.beta),
                fnr=fnr_metric(beta, truth.beta),
            )
        )
    return reports


def _bench_worker(args):
    cfg, idx, sim_seed, chain_seed = args
    return run_bench_replicate(cfg, idx, sim_seed, chain_seed)


def run_bench(cfg, base_seed, workers=1):
    """All replicates of a benchmark cell; returns a flat list of ScoreReports."""
    cfg = with_defaults(cfg)
    seeds = replicate_seeds(base_seed, int(cfg["replicates"]))
    jobs = [(cfg, i, s, c) for i, (s, c) in enumerate(seeds)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_bench_worker, jobs))
    else:
        results = [_bench_worker(job) for job in jobs]
    return [report for group in results for report in group]


ROC_DEFAULTS = {
    "multipliers": [0.05, 0.15, 0.3, 0.5, 0.8, 1.0, 1.3, 1.8, 2.6],
    "glm_levels": [1e-8, 1e-6, 1e-4, 1e-3, 0.005, 0.01, 0.025, 0.05, 0.1, 0.2, 0.35, 0.5, 0.75],
    "roc_mcmc": {"iterations": 3000, "burn_in": 1500, "thin": 3, "threshold_mode": "voxel", "n_blocks": 4},
    "fpr_max": 0.1,
}


def run_roc_replicate(cfg, replicate_index, sim_seed, chain_seed):
    """ROC curves for one replicate: refit at scaled fixed thresholds, sweep GLM levels.

    Returns ``{method: (curve, raw_pauc, normalized_pauc)}``.
    """
    truth_spec = TruthSpec.from_dict(cfg["truth"])
    dataset, truth = simulate(truth_spec, m=int(cfg["m"]), sigma2=float(cfg["sigma2"]), seed=sim_seed)
    eig = build_eigensystem(dataset.domain, cfg["kernel"])
    priors = resolve_priors(dataset, eig, cfg["priors"])
    base_lam = np.array([pr.center for pr in priors])
    q = float(cfg.get("q", 0.90))
    fpr_max = float(cfg.get("fpr_max", 0.1))

    out = {}
    points = []
    for mult in cfg["multipliers"]:
        chain, _ = _fit_chain(dataset, eig, cfg["roc_mcmc"], None, chain_seed, lam_fixed=mult * base_lam)
        est = svcm_estimate(chain, dataset, q=q)
        points.append(support_rates(est.beta_hat != 0, truth.beta))
    points.extend([(0.0, 0.0), (1.0, 1.0)])
    points.sort()
    curve = np.asarray(points)
    out["svcm"] = (curve, *partial_auc(curve, fpr_max))

    glm = glm_fit(dataset)
    sweeps = {
        "glm-t": lambda lvl: threshold_naive_t(glm, lvl),
        "glm-fdr": lambda lvl: bh_fdr(glm.pvals, lvl),
        "glm-bonf": lambda lvl: bonferroni(glm.pvals, lvl),
    }
    for method, mask_fn in sweeps.items():
        pts = [support_rates(mask_fn(lvl), truth.beta) for lvl in cfg["glm_levels"]]
        pts.extend([(0.0, 0.0), (1.0, 1.0)])
        pts.sort()
        curve = np.asarray(pts)
        out[method] = (curve, *partial_auc(curve, fpr_max))
    return out


def _roc_worker(args):
    cfg, idx, sim_seed, chain_seed = args
    return idx, run_roc_replicate(cfg, idx, sim_seed, chain_seed)


def run_roc(cfg, base_seed, workers=1):
    """All ROC replicates; returns ``{replicate: {method: (curve, raw, norm)}}``."""
    cfg = with_defaults(with_defaults(cfg, ROC_DEFAULTS))
    seeds = replicate_seeds(base_seed, int(cfg["replicates"]))
    jobs = [(cfg, i, s, c) for i, (s, c) in enumerate(seeds)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = dict(pool.map(_roc_worker, jobs))
    else:
        results = dict(_roc_worker(job) for job in jobs)
    return results
