"""Config-driven experiment execution and multi-seed comparison."""

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from importlib import metadata, resources
from pathlib import Path

import numpy as np

from .chain import concatenate_traces, run_chain
from .config import ExperimentConfig
from .core import ConfigurationError, make_rng
from .data import load_landsat
from .diagnostics import cov_error, density_contour_from_samples, mode_coverage, posterior_mean
from .mlp import MLP, GaussianPrior, MixturePrior, MLPEnergy, accuracy, sparsity_ratio
from .models import CorrelatedGaussian, MixtureGaussian5, RavineRegression
from .models.ravine import TRUE_THETA, load_ravine_csv, make_ravine_dataset
from .samplers import make_sampler


def library_version():
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        from . import __version__

        return __version__


def summary_schema():
    path = resources.files("adaptive_sgld").joinpath("schemas").joinpath("run_summary.schema.json")
    return json.loads(path.read_text())


def build_prior(spec):
    spec = dict(spec or {"kind": "gaussian"})
    kind = spec.pop("kind")
    return GaussianPrior(**spec) if kind == "gaussian" else MixturePrior(**spec)


def build_model(config):
    """Instantiate the energy model; returns ``(model, extras)``.

    ``extras`` carries held-out data and reference values used by the
    diagnostics (test set for the classifier, truth for the ravine).
    """
    m = dict(config.model)
    kind = m.pop("kind")
    if kind == "gaussian":
        cov = m.get("cov")
        return CorrelatedGaussian(cov=cov if cov is not None else ((1.0, 0.9), (0.9, 1.0)),
                                  noise_scale=m.get("noise_scale", 1.0)), {}
    if kind == "mixture5":
        model = MixtureGaussian5(noise_scale=m.get("noise_scale", 1.0), **({"means": m["means"]} if "means" in m else {}))
        return model, {}
    if kind == "ravine":
        truth = tuple(m.get("theta_true", TRUE_THETA))
        if "data_path" in m:
            x, y = load_ravine_csv(m["data_path"])
        else:
            x, y = make_ravine_dataset(m.get("n_data", 10_000), truth, m.get("data_seed", 0))
        model = RavineRegression(x, y, batch_size=config.batch_size or 100, prior_var=m.get("prior_var", 1.0))
        return model, {"truth": np.array(truth)}
    if kind == "mlp":
        X_tr, y_tr, X_te, y_te = load_landsat(m.get("train_path"), m.get("test_path"))
        net = MLP(m["layers"])
        if net.layer_sizes[0] != X_tr.shape[1]:
            raise ConfigurationError(f"input layer has {net.layer_sizes[0]} units but data has {X_tr.shape[1]} features")
        if net.n_classes < int(y_tr.max()) + 1:
            raise ConfigurationError("output layer smaller than the number of classes")
        model = MLPEnergy(net, X_tr, y_tr, build_prior(m.get("prior")), batch_size=config.batch_size or 50)
        return model, {"X_test": X_te, "y_test": y_te}
    raise ConfigurationError(f"unknown model kind {kind!r}")


def total_iterations(config, model):
    if config.n_iter is not None:
        return config.n_iter
    return config.epochs * model.iterations_per_epoch


def build_sampler(config, seed):
    params = dict(config.sampler)
    kind = params.pop("kind")
    sched = config.schedule
    if sched["kind"] == "step-decay":
        params["lr_gamma"] = sched["gamma"]
        params["lr_step_epochs"] = sched["step_epochs"]
    return make_sampler(
        kind,
        **params,
        burn_in=config.burn_in,
        thinning=config.thinning,
        random_state=seed,
        check_invariants=config.check_invariants,
    )


def run_seed(config, model, seed, n_iter, record_energy=True):
    """One chain, honoring an optional prior switch."""
    sampler = build_sampler(config, seed).set_params(n_iter=n_iter)
    sampler._validate()
    rng = make_rng(seed)
    kw = dict(check_invariants=config.check_invariants, max_seconds=config.max_seconds, seed=seed,
              record_energy=record_energy)
    if config.prior_switch is None:
        return run_chain(model, sampler, n_iter, config.burn_in, config.thinning, rng, **kw)
    switch_at = config.prior_switch["epoch"] * model.iterations_per_epoch
    first = run_chain(model, sampler, n_iter, config.burn_in, config.thinning, rng, stop_at=switch_at, **kw)
    if first.diverged or first.completed_iterations < switch_at:
        return first
    second_model = model.with_prior(build_prior(config.prior_switch["prior"]))
    second = run_chain(second_model, sampler, n_iter, config.burn_in, config.thinning, rng,
                       state=first.final_state, start_iteration=switch_at, **kw)
    return concatenate_traces(first, second)


def _sparsity_prior(config):
    if config.prior_switch is not None:
        prior = build_prior(config.prior_switch["prior"])
    else:
        prior = build_prior(config.model.get("prior"))
    return prior if isinstance(prior, MixturePrior) else MixturePrior()


def seed_metrics(config, model, extras, trace):
    """Per-seed summary numbers; sample diagnostics are skipped on empty or diverged traces."""
    out = {
        "seed": trace.seed,
        "diverged": bool(trace.diverged),
        "divergence_iteration": trace.divergence_iteration,
        "completed_iterations": int(trace.completed_iterations),
        "n_samples": len(trace),
        "wall_clock_seconds": float(trace.meta["wall_clock_seconds"]),
    }
    if "max_invariant_value" in trace.meta:
        out["max_bias_value"] = trace.meta["max_invariant_value"]
        out["bias_bound"] = trace.meta["invariant_bound"]
    if len(trace) == 0 or trace.diverged:
        return out
    kind = config.model["kind"]
    if kind != "mlp":
        out["posterior_mean"] = posterior_mean(trace).tolist()
    if kind == "ravine":
        out["distance_to_truth"] = float(np.linalg.norm(posterior_mean(trace) - extras["truth"]))
    if kind == "gaussian":
        cps = config.diagnostics.get("cov_checkpoints", [len(trace)])
        curve = cov_error(trace, model.cov, cps)
        if len(curve.errors):
            out["cov_error"] = float(curve.errors[-1])
    if kind == "mixture5":
        cover = mode_coverage(trace, model.means, config.diagnostics.get("mode_radius", 1.0))
        out["mode_coverage"] = cover.tolist()
        out["min_mode_coverage"] = float(cover.min())
    if kind == "mlp":
        net = model.net
        out["train_accuracy"] = float(accuracy(net, trace.samples, model.X, model.y))
        out["test_accuracy"] = float(accuracy(net, trace.samples, extras["X_test"], extras["y_test"]))
        weights = trace.samples[-1][net.weight_mask()]
        out["sparsity_ratio"] = float(sparsity_ratio(weights, _sparsity_prior(config)))
    return out


def write_diagnostics(config, model, trace, out_dir, seed):
    kind = config.model["kind"]
    if len(trace) == 0 or trace.diverged:
        return
    if kind == "gaussian":
        cps = config.diagnostics.get("cov_checkpoints")
        if cps is None:
            cps = sorted({int(v) for v in np.unique(np.geomspace(2, len(trace), 30).astype(int))})
        cov_error(trace, model.cov, cps).to_csv(out_dir / f"cov_error_seed{seed}.csv")
    elif kind == "mixture5" and len(trace) >= 100:
        c = config.diagnostics.get("contour", {})
        grid = density_contour_from_samples(
            trace.samples, tuple(c.get("xlim", (-6, 6))), tuple(c.get("ylim", (-6, 6))),
            c.get("resolution", 121), c.get("bandwidth"),
        )
        grid.to_csv(out_dir / f"contour_seed{seed}.csv")
    elif kind == "mlp":
        np.savez_compressed(out_dir / f"samples_seed{seed}.npz", samples=trace.samples, iterations=trace.iterations)


def _seed_job(args):
    config_dict, seed, out_dir = args
    config = ExperimentConfig.from_dict(config_dict)
    model, extras = build_model(config)
    return _run_and_save(config, model, extras, seed, Path(out_dir))


def _run_and_save(config, model, extras, seed, out_dir):
    n_iter = total_iterations(config, model)
    trace = run_seed(config, model, seed, n_iter)
    trace.to_csv(out_dir / f"trace_seed{seed}.csv", include_theta=config.model["kind"] != "mlp")
    write_diagnostics(config, model, trace, out_dir, seed)
    return seed_metrics(config, model, extras, trace)


def run_experiment(config, seeds=None, out_dir=None, workers=1):
    """Run every seed of ``config`` and write artifacts under ``out_dir``.

    Files: ``trace_seed<s>.csv``, per-model diagnostics, ``summary.json``.
    The model (and any dataset) is built before the first chain starts, so
    a missing file fails fast.
    """
    if seeds is not None:
        config = config.replace(seeds=list(seeds))
    out_dir = Path(out_dir or config.output_dir or Path("runs") / config.name)
    model, extras = build_model(config)
    n_iter = total_iterations(config, model)
    if config.burn_in >= n_iter:
        raise ConfigurationError(f"burn_in ({config.burn_in}) must be smaller than the {n_iter} total iterations")
    for seed in config.seeds:
        build_sampler(config, seed).set_params(n_iter=n_iter)._validate()
    out_dir.mkdir(parents=True, exist_ok=True)

    if workers > 1 and len(config.seeds) > 1:
        jobs = [(config.to_dict(), s, str(out_dir)) for s in config.seeds]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_seed = list(pool.map(_seed_job, jobs))
    else:
        per_seed = [_run_and_save(config, model, extras, s, out_dir) for s in config.seeds]

    summary = {
        "name": config.name,
        "model_kind": config.model["kind"],
        "sampler_kind": config.sampler["kind"],
        "library_version": library_version(),
        "total_iterations": n_iter,
        "any_diverged": any(r["diverged"] for r in per_seed),
        "seeds": per_seed,
        "aggregate": aggregate(per_seed),
        "config": config.to_dict(),
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    return summary


METRICS = ("distance_to_truth", "cov_error", "min_mode_coverage", "train_accuracy", "test_accuracy", "sparsity_ratio")


def mean_stderr(values):
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        return math.nan, math.nan
    if v.size == 1:
        return float(v[0]), 0.0
    return float(v.mean()), float(v.std(ddof=1) / np.sqrt(v.size))


def aggregate(per_seed):
    out = {}
    for key in METRICS:
        vals = [r[key] for r in per_seed if key in r]
        if vals:
            mean, se = mean_stderr(vals)
            out[key] = {"mean": mean, "stderr": se, "n": len(vals)}
    return out


def compare(summaries, out_dir=None):
    """Mean ± standard error per metric, one row per summary.

    All summaries must describe the same model configuration.
    """
    if not summaries:
        raise ConfigurationError("nothing to compare")
    ref = summaries[0]["config"]["model"]
    for s in summaries[1:]:
        if s["config"]["model"] != ref:
            raise ConfigurationError(f"cannot compare runs on different models: {summaries[0]['name']} vs {s['name']}")
    rows = []
    for s in summaries:
        row = {"name": s["name"], "sampler": s["sampler_kind"], "n_seeds": len(s["seeds"]),
               "diverged_seeds": sum(r["diverged"] for r in s["seeds"])}
        for key, stats in aggregate(s["seeds"]).items():
            row[f"{key}_mean"] = stats["mean"]
            row[f"{key}_stderr"] = stats["stderr"]
        rows.append(row)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        columns = list(dict.fromkeys(k for row in rows for k in row))
        with open(out / "comparison.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=columns)
            w.writeheader()
            w.writerows(rows)
        (out / "comparison.json").write_text(json.dumps(rows, indent=2) + "\n")
    return rows
