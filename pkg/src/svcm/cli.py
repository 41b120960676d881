"""Command-line interface: reproducible pipelines over JSON configs and CSV artifacts.

Every command reads a JSON config (``--config``) or a named preset
(``--preset``), validates it against the command's schema (unknown keys are
rejected), and writes its declared artifacts plus a ``manifest.json`` echoing
the config and seed so any output can be re-created exactly.

Exit codes: 0 success, 2 config/usage error, 3 numerical failure. On error a
machine-readable JSON object is printed to stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import pipeline
from .baselines import bh_fdr, bonferroni, glm_fit, threshold_naive_t, thresholded_estimate
from .data import TruthSpec, read_dataset, simulate, write_dataset
from .elicitation import elicit_priors, LambdaPrior
from .errors import DataFormatError, ElicitationError, NumericalError, SingularDesignError, SvcmError
from .inference import estimate, estimate_voxel
from .kernel import KernelParams, truncation_level
from .mcmc import ChainOutput
from .metrics import ScoreReport

ENV_PREFIX = "SVCM_"


class ConfigError(SvcmError):
    pass


def _schema_check(cfg, schema, where="config"):
    """Reject unknown keys and missing required keys; shallow type checks."""
    if not isinstance(cfg, dict):
        raise ConfigError(f"{where} must be a JSON object")
    for key in cfg:
        if key not in schema:
            raise ConfigError(f"{where}: unknown key {key!r}")
    for key, (required, kind) in schema.items():
        if key not in cfg:
            if required:
                raise ConfigError(f"{where}: missing required key {key!r}")
            continue
        if kind is not None and not isinstance(cfg[key], kind):
            raise ConfigError(f"{where}: key {key!r} must be {kind}")
    return cfg


def _write_manifest(out_dir, command, cfg, seed, extra=None):
    manifest = {"command": command, "config": cfg, "seed": seed}
    if extra:
        manifest.update(extra)
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


def _json_default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer, np.floating)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _save_csv(path, array, fmt="%.17g"):
    np.savetxt(path, np.atleast_2d(array), fmt=fmt, delimiter=",")


# ---------------------------------------------------------------------------
# commands


def cmd_kernel_info(cfg, out_dir, seed, workers):
    _schema_check(cfg, {
        "a": (True, (int, float)),
        "b": (True, (int, float)),
        "d": (True, int),
        "target_ratio": (False, (int, float)),
    })
    params = KernelParams(a=float(cfg["a"]), b=float(cfg["b"]), d=int(cfg["d"]))
    eig = truncation_level(float(cfg.get("target_ratio", 0.999)), params)
    with open(os.path.join(out_dir, "eigensystem.json"), "w") as fh:
        json.dump(eig.manifest(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(os.path.join(out_dir, "eigenvalues.csv"), "w") as fh:
        for row in eig.index_rows():
            fh.write(",".join("%.17g" % v if isinstance(v, float) else str(v) for v in row))
            fh.write("\n")
    _write_manifest(out_dir, "kernel-info", cfg, seed, {"L": eig.L, "m_deg": eig.m_deg, "ratio": eig.ratio})
    return 0


def cmd_simulate(cfg, out_dir, seed, workers):
    _schema_check(cfg, {
        "truth": (True, dict),
        "m": (True, int),
        "sigma2": (True, (int, float)),
        "x_spec": (False, list),
    })
    dataset, truth = simulate(
        TruthSpec.from_dict(cfg["truth"]), m=cfg["m"], sigma2=float(cfg["sigma2"]), seed=seed,
        x_spec=cfg.get("x_spec"),
    )
    write_dataset(dataset, out_dir, truth=truth, extra_meta={"seed": seed})
    _write_manifest(out_dir, "simulate", cfg, seed)
    return 0


_KERNEL_SCHEMA = {
    "a": (True, (int, float)),
    "b": (True, (int, float)),
    "target_ratio": (False, (int, float)),
}


def cmd_elicit(cfg, out_dir, seed, workers):
    _schema_check(cfg, {
        "dataset": (True, str),
        "kernel": (True, dict),
        "alpha": (False, (int, float)),
        "grid_size": (False, int),
        "mode": (False, str),
        "se_floor_mult": (False, (int, float)),
        "estimates": (False, str),
    })
    _schema_check(cfg["kernel"], _KERNEL_SCHEMA, "config.kernel")
    dataset = read_dataset(cfg["dataset"])
    eig = pipeline.build_eigensystem(dataset.domain, cfg["kernel"])
    opts = {k: cfg[k] for k in ("alpha", "grid_size", "mode", "se_floor_mult", "estimates") if k in cfg}
    priors, profiles = elicit_priors(dataset, eig, **opts)
    payload = [{"center": pr.center, "half_range": pr.half_range, "low": pr.low, "high": pr.high} for pr in priors]
    with open(os.path.join(out_dir, "priors.json"), "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for k, prof in enumerate(profiles):
        _save_csv(os.path.join(out_dir, f"profile_{k}.csv"), np.column_stack([prof.grid, prof.values]))
    _write_manifest(out_dir, "elicit", cfg, seed)
    return 0


_MCMC_SCHEMA = {
    "iterations": (False, int),
    "burn_in": (False, int),
    "thin": (False, int),
    "threshold_mode": (False, str),
    "n_blocks": (False, int),
    "adapt": (False, bool),
    "b_grid": (False, list),
    "q": (False, (int, float)),
    "proposal_scale_beta": (False, (int, float)),
    "proposal_scale_lambda": (False, (int, float)),
    "randomize_sweep": (False, bool),
}


def cmd_fit(cfg, out_dir, seed, workers):
    _schema_check(cfg, {
        "dataset": (True, str),
        "kernel": (True, dict),
        "mcmc": (False, dict),
        "priors": (True, (str, dict, list)),
    })
    _schema_check(cfg["kernel"], _KERNEL_SCHEMA, "config.kernel")
    mcmc_cfg = dict(cfg.get("mcmc", {}))
    _schema_check(mcmc_cfg, _MCMC_SCHEMA, "config.mcmc")
    dataset = read_dataset(cfg["dataset"])
    eig = pipeline.build_eigensystem(dataset.domain, cfg["kernel"])
    priors = _load_priors(cfg["priors"], dataset, eig)
    chain, _ = pipeline._fit_chain(dataset, eig, mcmc_cfg, priors, seed)
    chain.save(out_dir, extra_manifest={
        "command": "fit",
        "command_config": cfg,
        "priors": [{"center": pr.center, "half_range": pr.half_range} for pr in priors],
    })
    return 0


def _load_priors(spec, dataset, eig):
    if isinstance(spec, str):  # path to priors.json from cmd_elicit
        with open(spec) as fh:
            payload = json.load(fh)
        return [LambdaPrior(center=item["center"], half_range=item["half_range"]) for item in payload]
    if isinstance(spec, list):
        return [LambdaPrior(center=float(c), half_range=float(h)) for c, h in spec]
    return pipeline.resolve_priors(dataset, eig, spec)


def cmd_infer(cfg, out_dir, seed, workers):
    _schema_check(cfg, {
        "dataset": (True, str),
        "chain": (True, str),
        "q": (False, (int, float)),
        "mode": (False, str),
    })
    dataset = read_dataset(cfg["dataset"])
    chain = ChainOutput.load(cfg["chain"])
    q = float(cfg.get("q", 0.90))
    mode = cfg.get("mode", chain.mode)
    if mode == "regional":
        est = estimate(chain, dataset.domain, q=q)
        keys = np.array([[k + 1, g + 1] for k in range(est.selection_prob.shape[0]) for g in range(est.selection_prob.shape[1])])
    else:
        est = estimate_voxel(chain, q=q)
        keys = np.array([[k + 1, i + 1] for k in range(est.selection_prob.shape[0]) for i in range(est.selection_prob.shape[1])])
    _save_csv(os.path.join(out_dir, "estimates.csv"), est.beta_hat)
    sel = np.column_stack([keys, est.selection_prob.reshape(-1, 1)])
    _save_csv(os.path.join(out_dir, "selection.csv"), sel)
    summary = {
        "q": q,
        "mode": mode,
        "selected": int(np.count_nonzero(est.beta_hat)),
        "draws": chain.n_draws,
    }
    with open(os.path.join(out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(out_dir, "infer", cfg, seed)
    return 0


def cmd_baseline(cfg, out_dir, seed, workers):
    _schema_check(cfg, {
        "dataset": (True, str),
        "alpha": (False, (int, float)),
        "fdr_level": (False, (int, float)),
        "fwer_level": (False, (int, float)),
    })
    dataset = read_dataset(cfg["dataset"])
    fit = glm_fit(dataset)
    _save_csv(os.path.join(out_dir, "glm_beta.csv"), fit.beta_star)
    _save_csv(os.path.join(out_dir, "glm_se.csv"), fit.se)
    _save_csv(os.path.join(out_dir, "glm_t.csv"), fit.t)
    _save_csv(os.path.join(out_dir, "glm_pvals.csv"), fit.pvals)
    masks = {
        "glm-t": threshold_naive_t(fit, float(cfg.get("alpha", 0.05))),
        "glm-fdr": bh_fdr(fit.pvals, float(cfg.get("fdr_level", 0.05))),
        "glm-bonf": bonferroni(fit.pvals, float(cfg.get("fwer_level", 0.05))),
    }
    for name, mask in masks.items():
        _save_csv(os.path.join(out_dir, f"mask_{name}.csv"), mask.astype(int), fmt="%d")
        _save_csv(os.path.join(out_dir, f"estimate_{name}.csv"), thresholded_estimate(fit, mask))
    _write_manifest(out_dir, "baseline", cfg, seed)
    return 0


_BENCH_SCHEMA = {
    "truth": (False, dict),
    "m": (False, int),
    "sigma2": (False, (int, float)),
    "kernel": (False, dict),
    "mcmc": (False, dict),
    "priors": (False, dict),
    "q": (False, (int, float)),
    "alpha": (False, (int, float)),
    "fdr_level": (False, (int, float)),
    "fwer_level": (False, (int, float)),
    "replicates": (False, int),
    "methods": (False, list),
}


def cmd_evaluate(cfg, out_dir, seed, workers):
    _schema_check(cfg, _BENCH_SCHEMA)
    cfg = pipeline.with_defaults(cfg)
    reports = pipeline.run_bench(cfg, base_seed=seed, workers=workers)
    with open(os.path.join(out_dir, "results.csv"), "w") as fh:
        fh.write("method,replicate,remse,fdr,fnr\n")
        for r in reports:
            fh.write("%s,%d,%.17g,%.17g,%.17g\n" % r.row())
    with open(os.path.join(out_dir, "aggregate.csv"), "w") as fh:
        fh.write("method,remse_mean,remse_sd,fdr_mean,fdr_sd,fnr_mean,fnr_sd\n")
        for method in cfg["methods"]:
            rows = [r for r in reports if r.method == method]
            cols = [np.array([getattr(r, f) for r in rows]) for f in ("remse", "fdr", "fnr")]
            stats = []
            for col in cols:
                stats += [col.mean(), col.std(ddof=1) if len(col) > 1 else 0.0]
            fh.write(method + "," + ",".join("%.17g" % v for v in stats) + "\n")
    _write_manifest(out_dir, "evaluate", cfg, seed)
    return 0


_ROC_SCHEMA = dict(_BENCH_SCHEMA)
_ROC_SCHEMA.update({
    "multipliers": (False, list),
    "glm_levels": (False, list),
    "roc_mcmc": (False, dict),
    "fpr_max": (False, (int, float)),
})


def cmd_roc(cfg, out_dir, seed, workers):
    _schema_check(cfg, _ROC_SCHEMA)
    cfg = pipeline.with_defaults(pipeline.with_defaults(cfg, pipeline.ROC_DEFAULTS))
    results = pipeline.run_roc(cfg, base_seed=seed, workers=workers)
    with open(os.path.join(out_dir, "roc_points.csv"), "w") as fh:
        fh.write("method,replicate,fpr,tpr\n")
        for rep in sorted(results):
            for method, (curve, _, _) in results[rep].items():
                for fpr, tpr in curve:
                    fh.write("%s,%d,%.17g,%.17g\n" % (method, rep, fpr, tpr))
    with open(os.path.join(out_dir, "pauc.csv"), "w") as fh:
        fh.write("method,replicate,raw,normalized\n")
        for rep in sorted(results):
            for method, (_, raw, norm) in results[rep].items():
                fh.write("%s,%d,%.17g,%.17g\n" % (method, rep, raw, norm))
    _write_manifest(out_dir, "roc", cfg, seed)
    return 0


COMMANDS = {
    "kernel-info": cmd_kernel_info,
    "simulate": cmd_simulate,
    "elicit": cmd_elicit,
    "fit": cmd_fit,
    "infer": cmd_infer,
    "baseline": cmd_baseline,
    "evaluate": cmd_evaluate,
    "roc": cmd_roc,
}


def _env_default(name, cast, fallback):
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return fallback
    return cast(raw)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="svcm",
        description="Bayesian feature selection in spatially varying coefficient models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} pipeline stage")
        p.add_argument("--config", help="path to a JSON config file")
        p.add_argument("--preset", help="named benchmark preset, e.g. bench-n900-m50-s4")
        p.add_argument("--seed", type=int, default=None, help=f"RNG seed (env {ENV_PREFIX}SEED)")
        p.add_argument("--out", default=None, help=f"output directory (env {ENV_PREFIX}OUT)")
        p.add_argument("--workers", type=int, default=None, help=f"parallel replicate workers (env {ENV_PREFIX}WORKERS)")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        seed = args.seed if args.seed is not None else _env_default("SEED", int, 0)
        out_dir = args.out if args.out is not None else _env_default("OUT", str, None)
        workers = args.workers if args.workers is not None else _env_default("WORKERS", int, 1)
        if out_dir is None:
            raise ConfigError("an output directory is required (--out or SVCM_OUT)")
        if args.config is None and args.preset is None:
            raise ConfigError("a config file (--config) or preset (--preset) is required")
        if args.config is not None:
            if not os.path.exists(args.config):
                raise ConfigError(f"config file not found: {args.config}")
            with open(args.config) as fh:
                try:
                    cfg = json.load(fh)
                except json.JSONDecodeError as exc:
                    raise ConfigError(f"config is not valid JSON: {exc}") from None
        else:
            cfg = pipeline.bench_preset(args.preset)
        os.makedirs(out_dir, exist_ok=True)
        return COMMANDS[args.command](cfg, out_dir, seed, workers)
    except (ConfigError, DataFormatError, SingularDesignError, ElicitationError, ValueError) as exc:
        print(json.dumps({"error": "config", "message": str(exc)}))
        return 2
    except NumericalError as exc:
        print(json.dumps({"error": "numerical", "message": str(exc)}))
        return 3


if __name__ == "__main__":
    sys.exit(main())
