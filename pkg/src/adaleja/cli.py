"""Batch front door for surrogate studies.

``adaleja <subcommand> --config study.json`` reads a JSON study
description, runs one pipeline, and writes plot-ready CSV artifacts plus
a ``manifest.json`` that records the resolved configuration, its hash,
the seed, and package versions.  Feeding a manifest back as the config
reproduces the run; all floats are written with 17 significant digits so
repeated runs agree byte for byte.

Exit codes: 0 on success, 1 on numerical failure (the failing parameter
point is part of the message), 2 on configuration problems, 64 for an
unknown subcommand.
"""

import argparse
import copy
import csv
import hashlib
import json
import os
import platform
import sys

import numpy as np
import scipy

from .adaptive import (ADJOINT, SURPLUS, AdaptiveConfig, AdaptiveReport,
                       run_adaptive, run_adaptive_adjoint)
from .distributions import make_distribution, sample_joint
from .errors import ConfigError, ContractError, DomainError, SerializationError, SolveError
from .gpc import SMOLYAK, TENSOR, GpcExpansion, decay_report, project
from .grid import MultiIndexSet
from .linmodel import LadderModel, ParametricLinearModel
from .maps import make_map
from .stats import (extract_resonance, failure_probability, kde_pdf,
                    mc_moments, sobol_indices)
from .surrogate import Surrogate, deserialize, serialize

SUBCOMMANDS = ("build", "converge", "stats", "sobol", "kde", "resonance", "gain")

ALGORITHMS = ("adaptive", "adaptive-adjoint", "gpc", "isotropic-smolyak")

_USAGE = """usage: adaleja <subcommand> --config PATH [--out DIR] [--seed U64] [--threads N]

subcommands:
  build      fit a surrogate, write surrogate.json and report.csv (decay.csv for gpc)
  converge   sweep the build budget, write report.csv with nodes, mean_l1, max_err
  stats      Monte-Carlo moments and failure probability, write moments.csv
  sobol      Sobol sensitivity indices, write sobol.csv
  kde        kernel density of the surrogate output modulus, write kde.csv
  resonance  per-sample resonance extraction, write resonance.csv
  gain       map gain sweep over epsilon, write gain.csv
"""


class RungeProduct:
    """Product Runge function, the standard smooth-but-stiff benchmark."""

    name = "runge"

    def __init__(self, n_params, c=10.0):
        if n_params < 1:
            raise ConfigError("runge model needs at least one parameter", field="n_params")
        if c <= 0:
            raise ConfigError("runge steepness must be positive", field="c")
        self.n_params = int(n_params)
        self.c = float(c)

    def support(self):
        return [(-1.0, 1.0)] * self.n_params

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        return complex(np.prod(1.0 / (1.0 + self.c * y * y)))


def make_model(spec):
    """Build a model instance from its config dictionary."""
    if not isinstance(spec, dict):
        raise ConfigError("model description must be an object", field="model")
    kind = spec.get("model")
    if kind == "ladder":
        try:
            return LadderModel(
                n_params=int(spec.get("n_params", 1)),
                sections=int(spec.get("sections", 40)),
                damping=float(spec.get("damping", 0.02)),
                with_frequency=bool(spec.get("with_frequency", False)),
                omega=float(spec.get("omega", 1.0)),
            )
        except (ContractError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc), field="model") from exc
    if kind == "runge":
        return RungeProduct(int(spec.get("n_params", 1)), float(spec.get("c", 10.0)))
    raise ConfigError(f"unknown model {kind!r}", field="model")


def _load_json(path):
    try:
        with open(path, "rb") as handle:
            data = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}", field="config")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}", field="config")
    if isinstance(data, dict) and "config" in data and "command" in data:
        data = data["config"]        # a manifest was fed back in
    if not isinstance(data, dict):
        raise ConfigError("study config must be a JSON object", field="config")
    return data


def _distributions(config, model=None):
    specs = config.get("distributions")
    if specs is None:
        raise ConfigError("missing", field="distributions")
    if not isinstance(specs, list) or not specs:
        raise ConfigError("must be a non-empty list", field="distributions")
    try:
        dists = [make_distribution(s) for s in specs]
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc), field="distributions") from exc
    if model is not None and len(dists) != model.n_params:
        raise ConfigError(
            f"model expects {model.n_params} parameters, got {len(dists)}",
            field="distributions")
    return dists


def _maps(config, n_dim):
    spec = config.get("maps")
    if spec is None:
        return None
    try:
        if isinstance(spec, list):
            if len(spec) != n_dim:
                raise ConfigError(
                    f"expected {n_dim} map entries, got {len(spec)}", field="maps")
            return [make_map(s) for s in spec]
        return make_map(spec)
    except ConfigError:
        raise
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(str(exc), field="maps") from exc


def _positive_int(config, field, default=None):
    value = config.get(field, default)
    if value is None:
        raise ConfigError("missing", field=field)
    try:
        value = int(value)
    except (TypeError, ValueError):
        raise ConfigError("must be an integer", field=field)
    if value < 1:
        raise ConfigError("must be positive", field=field)
    return value


def _seed(config, override):
    if override is not None:
        return int(override)
    seed = config.get("seed", 0)
    try:
        seed = int(seed)
    except (TypeError, ValueError):
        raise ConfigError("must be an integer", field="seed")
    if seed < 0:
        raise ConfigError("must be non-negative", field="seed")
    return seed


def _format(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.17g}"


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format(cell) for cell in row])


def _counted(model):
    """Wrap a model so converge can report the number of evaluations."""
    counter = {"calls": 0}

    def wrapped(y):
        counter["calls"] += 1
        return model(y)

    return wrapped, counter


class _CvTracker:
    """Cross-validation callback shared by the adaptive build pipelines."""

    def __init__(self, model, distributions, n_cv, seed, per_iteration):
        self.per_iteration = per_iteration
        self.points = sample_joint(distributions, n_cv, seed)
        self.reference = np.array([complex(model(p)) for p in self.points])

    def measure(self, surrogate):
        approx = np.asarray(surrogate.evaluate(self.points))
        err = np.abs(approx - self.reference)
        return float(err.mean()), float(err.max())

    def on_accept(self, surrogate, record):
        if self.per_iteration:
            record.cv_error = self.measure(surrogate)[0]


def _cv_tracker(config, model, distributions, require=False):
    spec = config.get("cv")
    if spec is None:
        if not require:
            return None
        spec = {}
    if not isinstance(spec, dict):
        raise ConfigError("must be an object", field="cv")
    n_cv = _positive_int(spec, "n", 1000)
    seed = spec.get("seed", 10007)
    per_iteration = bool(spec.get("per_iteration", False))
    return _CvTracker(model, distributions, n_cv, int(seed), per_iteration)


def _isotropic_build(model, distributions, maps, level, report):
    """Fit on the largest total-degree set and log one row per node."""
    indices = MultiIndexSet.total_degree(len(distributions), level)
    sur = Surrogate(distributions, maps)
    for index in indices.sorted_indices():
        value = model(sur.node_point(index))
        sur.add_point(index, value)
        report.lu_count += 1
        report.fb_count += 1
        report.record(index, abs(sur.surplus(index)))
    return sur


def _build_surrogate(config, model, distributions, maps, out_dir=None, tracker=None):
    """Run the configured algorithm; returns (target, report_or_None, extra_files)."""
    algorithm = config.get("algorithm")
    if algorithm not in ALGORITHMS:
        raise ConfigError(
            f"must be one of {', '.join(ALGORITHMS)}", field="algorithm")
    extra = {}
    if algorithm == "gpc":
        p_max = _positive_int(config, "p_max")
        quadrature = config.get("quadrature", TENSOR)
        if quadrature not in (TENSOR, SMOLYAK):
            raise ConfigError("must be 'tensor' or 'smolyak'", field="quadrature")
        expansion = project(model, distributions, p_max, quadrature=quadrature)
        return expansion, None, extra
    if algorithm == "isotropic-smolyak":
        level = _positive_int(config, "level")
        report = AdaptiveReport()
        sur = _isotropic_build(model, distributions, maps, level, report)
        if tracker is not None:
            report.records[-1].cv_error = tracker.measure(sur)[0]
        return sur, report, extra
    budget = _positive_int(config, "budget")
    tol = config.get("tol")
    if tol is not None:
        tol = float(tol)
    on_accept = tracker.on_accept if tracker is not None else None
    if algorithm == "adaptive-adjoint":
        if not isinstance(model, ParametricLinearModel):
            raise ConfigError(
                "adaptive-adjoint requires a linear-system model", field="algorithm")
        cfg = AdaptiveConfig(budget=budget, indicator=ADJOINT, tol=tol)
        qoi, primal, dual, report = run_adaptive_adjoint(
            model, cfg, distributions, maps, on_accept=on_accept)
        if out_dir is not None:
            for name, part in (("primal.json", primal), ("dual.json", dual)):
                path = os.path.join(out_dir, name)
                with open(path, "wb") as handle:
                    handle.write(serialize(part))
                extra[name] = path
        target = qoi
    else:
        cfg = AdaptiveConfig(budget=budget, indicator=SURPLUS, tol=tol)
        target, report = run_adaptive(
            model, cfg, distributions, maps, on_accept=on_accept)
    if tracker is not None and not tracker.per_iteration:
        report.records[-1].cv_error = tracker.measure(target)[0]
    return target, report, extra


def _load_artifact(path):
    """Load a serialized surrogate or gpc expansion, whichever the file holds."""
    try:
        with open(path, "rb") as handle:
            data = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror or exc}",
                          field="surrogate")
    try:
        peek = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SerializationError(f"{path} is not valid JSON", location=str(exc))
    if isinstance(peek, dict) and peek.get("kind") == "gpc":
        return GpcExpansion.from_json(data)
    return deserialize(data)


def _target(config, seed_pool, out_dir):
    """Surrogate for the stats family: loaded from disk or built fresh."""
    path = config.get("surrogate")
    if path is not None:
        target = _load_artifact(path)
        return target, list(target.distributions)
    model = make_model(config.get("model", {}))
    distributions = _distributions(config, model)
    maps = _maps(config, len(distributions))
    target, _, _ = _build_surrogate(config, model, distributions, maps, out_dir)
    return target, distributions


def _resolve_grid(spec, samples, bandwidth):
    if spec is not None:
        lo = float(spec.get("lo", samples.min() - bandwidth))
        hi = float(spec.get("hi", samples.max() + bandwidth))
        count = int(spec.get("count", 512))
    else:
        lo = float(samples.min() - bandwidth)
        hi = float(samples.max() + bandwidth)
        count = 512
    if count < 2 or not hi > lo:
        raise ConfigError("grid needs count >= 2 and hi > lo", field="kde_grid")
    return np.linspace(lo, hi, count)


def _cmd_build(config, out_dir, seed):
    model = make_model(config.get("model", {}))
    distributions = _distributions(config, model)
    maps = _maps(config, len(distributions))
    tracker = _cv_tracker(config, model, distributions)
    target, report, extra = _build_surrogate(
        config, model, distributions, maps, out_dir, tracker)
    files = dict(extra)
    sur_path = os.path.join(out_dir, "surrogate.json")
    payload = target.to_json() if isinstance(target, GpcExpansion) else serialize(target)
    with open(sur_path, "wb") as handle:
        handle.write(payload)
    files["surrogate.json"] = sur_path
    if isinstance(target, GpcExpansion):
        decay_path = os.path.join(out_dir, "decay.csv")
        _write_csv(decay_path, ["total_degree", "max_abs_coeff"], decay_report(target))
        files["decay.csv"] = decay_path
    else:
        report_path = os.path.join(out_dir, "report.csv")
        report.to_csv(report_path)
        files["report.csv"] = report_path
    return files


def _sweep_values(config):
    spec = config.get("sweep")
    if spec is None:
        raise ConfigError("missing", field="sweep")
    if isinstance(spec, list):
        values = [int(v) for v in spec]
    elif isinstance(spec, dict):
        try:
            lo, hi = int(spec["from"]), int(spec["to"])
        except KeyError as exc:
            raise ConfigError(f"missing key {exc}", field="sweep")
        step = int(spec.get("step", 1))
        if step < 1:
            raise ConfigError("step must be positive", field="sweep")
        values = list(range(lo, hi + 1, step))
    else:
        raise ConfigError("must be a list or a from/to/step object", field="sweep")
    if not values or any(v < 1 for v in values):
        raise ConfigError("values must be positive", field="sweep")
    return values


def _cmd_converge(config, out_dir, seed):
    model = make_model(config.get("model", {}))
    distributions = _distributions(config, model)
    maps = _maps(config, len(distributions))
    tracker = _cv_tracker(config, model, distributions, require=True)
    algorithm = config.get("algorithm")
    knob = {"adaptive": "budget", "adaptive-adjoint": "budget",
            "gpc": "p_max", "isotropic-smolyak": "level"}.get(algorithm)
    if knob is None:
        raise ConfigError(
            f"must be one of {', '.join(ALGORITHMS)}", field="algorithm")
    rows = []
    for value in _sweep_values(config):
        run_config = dict(config)
        run_config[knob] = value
        if algorithm == "adaptive-adjoint":
            build_model, counter = model, {"calls": 0}
        else:
            build_model, counter = _counted(model)
        target, report, _ = _build_surrogate(
            run_config, build_model, distributions, maps)
        nodes = report.lu_count if report is not None else counter["calls"]
        mean_l1, max_err = tracker.measure(target)
        rows.append((nodes, mean_l1, max_err))
    path = os.path.join(out_dir, "report.csv")
    _write_csv(path, ["nodes", "mean_l1", "max_err"], rows)
    return {"report.csv": path}


def _cmd_stats(config, out_dir, seed):
    target, distributions = _target(config, seed, out_dir)
    n_samples = _positive_int(config, "n_samples", 100_000)
    alpha = config.get("alpha")
    children = np.random.SeedSequence(seed).spawn(2)
    summary = mc_moments(target, distributions, n_samples, children[0])
    row = [summary.sample_count, summary.mean, summary.std, None, None]
    if alpha is not None:
        alpha = float(alpha)
        row[3] = alpha
        row[4] = failure_probability(target, distributions, alpha,
                                     n_samples, children[1])
    path = os.path.join(out_dir, "moments.csv")
    _write_csv(path, ["sample_count", "mean", "std", "alpha",
                      "failure_probability"], [row])
    return {"moments.csv": path}


def _cmd_sobol(config, out_dir, seed):
    target, distributions = _target(config, seed, out_dir)
    n_base = _positive_int(config, "n_base", 10_000)
    result = sobol_indices(target, distributions, n_base, seed)
    rows = [(k, result.main[k], result.total[k])
            for k in range(len(distributions))]
    path = os.path.join(out_dir, "sobol.csv")
    _write_csv(path, ["parameter", "main", "total"], rows)
    return {"sobol.csv": path}


def _cmd_kde(config, out_dir, seed):
    target, distributions = _target(config, seed, out_dir)
    n_samples = _positive_int(config, "n_samples", 100_000)
    points = sample_joint(distributions, n_samples, seed)
    samples = np.abs(np.asarray(target.evaluate(points)))
    bandwidth = config.get("bandwidth")
    if bandwidth is None:
        sigma = float(samples.std(ddof=1)) if n_samples > 1 else 1.0
        bandwidth = 1.06 * max(sigma, 1e-12) * n_samples ** (-0.2)
    bandwidth = float(bandwidth)
    if bandwidth <= 0:
        raise ConfigError("must be positive", field="bandwidth")
    grid = _resolve_grid(config.get("kde_grid"), samples, bandwidth)
    density = kde_pdf(samples, bandwidth, grid)
    path = os.path.join(out_dir, "kde.csv")
    _write_csv(path, ["T", "density"], zip(grid, density))
    return {"kde.csv": path}


def _cmd_resonance(config, out_dir, seed):
    target, distributions = _target(config, seed, out_dir)
    spec = config.get("resonance")
    if not isinstance(spec, dict):
        raise ConfigError("missing object with f_range", field="resonance")
    f_range = spec.get("f_range")
    if (not isinstance(f_range, (list, tuple)) or len(f_range) != 2
            or not float(f_range[0]) < float(f_range[1])):
        raise ConfigError("f_range must be [lo, hi] with lo < hi", field="resonance")
    f_range = (float(f_range[0]), float(f_range[1]))
    lo, hi = distributions[0].lower, distributions[0].upper
    if f_range[0] < lo or f_range[1] > hi:
        raise ConfigError(
            f"f_range must lie inside the frequency support [{lo}, {hi}]",
            field="resonance")
    n_starts = _positive_int(spec, "n_starts", 15)
    n_slices = _positive_int(spec, "n_slices", 50)
    if len(distributions) < 2:
        raise ConfigError(
            "resonance extraction needs a frequency dimension plus at least "
            "one sampled parameter", field="distributions")
    slices = sample_joint(distributions[1:], n_slices, seed)
    rows = []
    for point in slices:
        f_res, s_res = extract_resonance(target, point, f_range, n_starts)
        rows.append((f_res, s_res))
    path = os.path.join(out_dir, "resonance.csv")
    _write_csv(path, ["fRes", "sRes"], rows)
    return {"resonance.csv": path}


def _cmd_gain(config, out_dir, seed):
    spec = config.get("gain")
    if not isinstance(spec, dict):
        raise ConfigError("missing object with map and epsilons", field="gain")
    try:
        cmap = make_map(spec.get("map", {"map": "sausage"}))
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError(str(exc), field="gain") from exc
    eps_spec = spec.get("epsilons")
    if isinstance(eps_spec, list) and eps_spec:
        epsilons = [float(e) for e in eps_spec]
    elif isinstance(eps_spec, dict):
        lo = float(eps_spec.get("lo", 0.1))
        hi = float(eps_spec.get("hi", 1.0))
        count = int(eps_spec.get("count", 20))
        if count < 2 or not hi > lo:
            raise ConfigError("epsilon range needs count >= 2 and hi > lo",
                              field="gain")
        epsilons = list(np.linspace(lo, hi, count))
    else:
        raise ConfigError("epsilons must be a list or a lo/hi/count object",
                          field="gain")
    if any(e <= 0 for e in epsilons):
        raise ConfigError("epsilons must be positive", field="gain")
    n_samples = _positive_int(spec, "n_samples", 4096)
    rows = [(eps, cmap.estimate_gain(eps, n_samples=n_samples))
            for eps in epsilons]
    path = os.path.join(out_dir, "gain.csv")
    _write_csv(path, ["epsilon", "gain"], rows)
    return {"gain.csv": path}


_HANDLERS = {
    "build": _cmd_build,
    "converge": _cmd_converge,
    "stats": _cmd_stats,
    "sobol": _cmd_sobol,
    "kde": _cmd_kde,
    "resonance": _cmd_resonance,
    "gain": _cmd_gain,
}


def _versions():
    from . import __version__
    return {
        "adaleja": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
    }


def _write_manifest(out_dir, command, config, seed):
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"))
    manifest = {
        "command": command,
        "config": config,
        "config_sha256": hashlib.sha256(canonical.encode()).hexdigest(),
        "seed": seed,
        "versions": _versions(),
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return path


def run_command(argv):
    """Run one subcommand; returns the process exit code."""
    argv = list(argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(_USAGE, end="")
        return 0
    command = argv[0]
    if command not in SUBCOMMANDS:
        sys.stderr.write(f"unknown subcommand {command!r}\n{_USAGE}")
        return 64
    parser = argparse.ArgumentParser(prog=f"adaleja {command}", add_help=True)
    parser.add_argument("--config", required=True, help="study config JSON")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the seed")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap BLAS worker threads (best effort)")
    try:
        ns = parser.parse_args(argv[1:])
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    if ns.threads is not None:
        if ns.threads < 1:
            sys.stderr.write("config error: invalid field 'threads': must be positive\n")
            return 2
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(ns.threads)
    try:
        config = _load_json(ns.config)
        seed = _seed(config, ns.seed)
        out_dir = ns.out or config.get("out_dir") or "."
        resolved = copy.deepcopy(config)
        resolved["seed"] = seed
        os.makedirs(out_dir, exist_ok=True)
        files = _HANDLERS[command](resolved, out_dir, seed)
        if ns.threads is not None:
            resolved["threads"] = ns.threads
        files["manifest.json"] = _write_manifest(out_dir, command, resolved, seed)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except SerializationError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except (SolveError, DomainError, ContractError,
            np.linalg.LinAlgError, FloatingPointError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 1
    for name in sorted(files):
        print(f"wrote {files[name]}")
    return 0


def console_main():
    raise SystemExit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    console_main()
