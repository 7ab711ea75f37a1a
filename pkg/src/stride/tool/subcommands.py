"""
Subcommand implementations.
"""

import copy
import csv
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ..config import (
    default_config,
    get_config,
    get_config_section,
    get_output_dir,
    show_config,
    write_config,
)
from ..errors import CommandError, SimulationAborted
from ..gaitnet import (
    GaitDataset,
    collect_dataset,
    evaluate_noise,
    load_gaitnet,
    pca_select_features,
    train,
)
from ..mpc import MpcParams
from ..profiler import Profiler
from ..sim import SimLog, compute_metrics, load_scenario, run_scenario
from ..sim.metrics import solve_statistics
from ..sim.plots import plot_log

from .display import Printer

__all__ = [
    'function_collect',
    'function_pca',
    'function_train',
    'function_run',
    'function_bench',
    'function_eval_noise',
    'function_plot',
    'function_config_show',
    'function_config_write',
]

LOG = logging.getLogger(__name__)

BENCH_COLUMNS = ("controller", "scale", "mode", "solves", "mean_time", "p50_time", "p95_time", "mean_qp_count",
                 "converged_rate", "velocity_rmse", "falls", "fallbacks")
NOISE_COLUMNS = ("profile", "scale", "rmse", "delta")


def make_printer(display_kwargs=None):
    if display_kwargs is None:
        display_kwargs = {}
    return Printer(**display_kwargs)


def _output_path(filename, default):
    if filename is None:
        filename = os.path.join(get_output_dir(), default)
    return filename


def _write_rows(filename, rows, columns):
    dirname = os.path.dirname(os.path.abspath(filename))
    os.makedirs(dirname, exist_ok=True)
    with open(filename, "w", newline="") as fp:
        writer = csv.DictWriter(fp, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _write_json(filename, data):
    dirname = os.path.dirname(os.path.abspath(filename))
    os.makedirs(dirname, exist_ok=True)
    with open(filename, "w") as fp:
        json.dump(data, fp, indent=4)


def _selected_indices(selected, pca_filename, names):
    if selected:
        indices = []
        for token in selected.split(","):
            token = token.strip()
            if token in names:
                indices.append(names.index(token))
            else:
                try:
                    indices.append(int(token))
                except ValueError:
                    raise CommandError("unknown feature {!r}".format(token)) from None
        for index in indices:
            if not 0 <= index < len(names):
                raise CommandError("feature index {} out of range".format(index))
        return indices
    if pca_filename:
        if not os.path.exists(pca_filename):
            raise FileNotFoundError("PCA selection {!r} not found".format(pca_filename))
        with open(pca_filename, "r") as fp:
            return json.load(fp)["selected"]
    return None


def function_collect(output=None, episodes=None, duration=None, controller=None, pushes=True, log_dir=None,
                     jobs=1, display_kwargs=None):
    printer = make_printer(display_kwargs)
    config = get_config()
    dataset = collect_dataset(config, episodes=episodes, episode_duration=duration, controller=controller,
                              pushes=pushes, log_dir=log_dir, jobs=jobs)
    output = _output_path(output, "dataset.csv")
    dataset.write_csv(output)
    printer.print_mapping({
        "samples": len(dataset),
        "successful": len(dataset.successful()),
        "output": output,
    }, header="Dataset")


def function_pca(dataset, n_axes=None, standardize=True, output=None, display_kwargs=None):
    printer = make_printer(display_kwargs)
    if n_axes is None:
        n_axes = get_config_section("gaitnet")["n_axes"]
    data = GaitDataset.read_csv(dataset)
    result = pca_select_features(data, n_axes=n_axes, standardize=standardize)
    output = _output_path(output, "loadings.csv")
    result.write_loadings(output)
    selection = os.path.splitext(output)[0] + ".json"
    _write_json(selection, result.as_dict())
    rows = [{"axis": axis + 1, "eigenvalue": float(result.eigenvalues[axis]), "feature": result.names[index],
             "loading": float(result.eigenvectors[index, axis])} for axis, index in enumerate(result.selected)]
    printer.print_table(rows, ("axis", "eigenvalue", "feature", "loading"), header="Selected features")
    printer("explained variance: {}".format(printer.repr_value(result.explained_variance())))
    printer("loadings: {}, selection: {}".format(output, selection))


def function_train(dataset, all_features=False, selected=None, pca=None, output=None, display_kwargs=None):
    printer = make_printer(display_kwargs)
    config = get_config()
    data = GaitDataset.read_csv(dataset)
    indices = None if all_features else _selected_indices(selected, pca, list(data.names))
    model, metrics = train(data, selected=indices, config=config, all_features=all_features)
    output = _output_path(output, "gaitnet.json")
    model.save(output)
    summary = metrics.as_dict()
    summary["features"] = [model.names[index] for index in model.selected]
    summary["output"] = output
    printer.print_mapping(summary, header="Training")


def function_run(scenario, controller=None, gaitnet=None, duration=None, seed=None, log_dir=None, plot=False,
                 display_kwargs=None):
    printer = make_printer(display_kwargs)
    config = get_config()
    scenario = load_scenario(scenario)
    updates = {}
    if duration is not None:
        updates["duration"] = duration
    if seed is not None:
        updates["seed"] = seed
    if controller is not None:
        updates["controller"] = controller
    if updates:
        scenario = scenario.replace(**updates)
    predictor = None if gaitnet is None else load_gaitnet(gaitnet)
    if scenario.controller == "proposed" and predictor is None:
        LOG.warning("proposed controller without a step-duration network: sampling time held at nominal")
    if log_dir is None:
        log_dir = os.path.join(get_output_dir(config), "runs", "{}_{}".format(scenario.name, scenario.controller))
    profiler = Profiler()
    log = run_scenario(scenario, gaitnet=predictor, config=config, log_dir=log_dir, profiler=profiler)
    printer.print_mapping(compute_metrics(log), header="{} / {}".format(scenario.name, scenario.controller))
    printer("log: {}".format(log_dir))
    if plot:
        for filename in plot_log(log, log_dir, terrain=scenario.terrain):
            printer("figure: {}".format(filename))
    if log.termination != "completed":
        raise SimulationAborted("{}: {} at t={:.3f}".format(scenario.name, log.termination, log.t_end),
                                termination=log.termination)


def _scaled_config(config, scale):
    config = copy.deepcopy(config)
    weights = MpcParams.from_config(config).weights.scaled(scale)
    config.setdefault("mpc", {}).update(weights.as_dict())
    return config


def _bench_rows(scenario, name, scale, config, predictor):
    """Bench rows of one controller run, one row per solve mode"""
    run_config = config if scale is None else _scaled_config(config, scale)
    LOG.info("bench: %s on %s (weight scale %s)", name, scenario.name, scale)
    log = run_scenario(scenario, controller=name, gaitnet=predictor if name == "proposed" else None,
                       config=run_config)
    metrics = compute_metrics(log, timing=False)
    rows = []
    for mode, stats in sorted(solve_statistics(log).items()):
        row = {
            "controller": name,
            "scale": "" if scale is None else scale,
            "mode": mode,
            "solves": stats["count"],
            "velocity_rmse": metrics["velocity_rmse"],
            "falls": metrics["falls"],
            "fallbacks": metrics["fallbacks"],
        }
        row.update({key: stats[key] for key in ("mean_time", "p50_time", "p95_time", "mean_qp_count",
                                                "converged_rate")})
        rows.append(row)
    return rows


def function_bench(scenario, controllers=None, duration=None, sweep_weights=None, gaitnet=None, output=None,
                   jobs=1, display_kwargs=None):
    printer = make_printer(display_kwargs)
    config = get_config()
    scenario = load_scenario(scenario)
    if duration is not None:
        scenario = scenario.replace(duration=duration)
    if controllers is None:
        controllers = ["proposed"] if sweep_weights else ["proposed", "fixed_dt", "explicit_kd", "wb"]
    if jobs < 1:
        raise CommandError("--jobs must be positive, got {}".format(jobs))
    scales = sweep_weights or [None]
    predictor = None if gaitnet is None else load_gaitnet(gaitnet)
    runs = [(scenario, name, scale, config, predictor) for name in controllers for scale in scales]
    if jobs == 1 or len(runs) <= 1:
        results = [_bench_rows(*run) for run in runs]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(runs))) as executor:
            results = list(executor.map(_bench_rows, *zip(*runs)))
    rows = [row for run_rows in results for row in run_rows]
    output = _output_path(output, "bench.csv")
    _write_rows(output, rows, BENCH_COLUMNS)
    printer.print_table(rows, BENCH_COLUMNS, header="Bench {}".format(scenario.name))
    printer("output: {}".format(output))


def function_eval_noise(model, dataset, scales=None, seeds=5, output=None, display_kwargs=None):
    printer = make_printer(display_kwargs)
    config = get_config()
    network = load_gaitnet(model)
    data = GaitDataset.read_csv(dataset)
    if scales is None:
        scales = [1.0]
    rows = []
    for scale in scales:
        per_seed = [evaluate_noise(network, data, seed=seed, scale=scale, config=config) for seed in range(seeds)]
        for index, row in enumerate(per_seed[0]):
            rmse = float(np.mean([result[index]["rmse"] for result in per_seed]))
            rows.append({"profile": row["profile"], "scale": scale, "rmse": rmse,
                         "delta": rmse - per_seed[0][0]["rmse"]})
    output = _output_path(output, "noise.csv")
    _write_rows(output, rows, NOISE_COLUMNS)
    printer.print_table(rows, NOISE_COLUMNS, header="Noise robustness")
    printer("output: {}".format(output))


def function_plot(log_dir, output_dir=None, scenario=None, display_kwargs=None):
    printer = make_printer(display_kwargs)
    log = SimLog.read(log_dir)
    terrain = None
    try:
        terrain = load_scenario(scenario or log.scenario).terrain
    except FileNotFoundError:
        LOG.info("scenario %s not found: footholds plotted without terrain", scenario or log.scenario)
    for filename in plot_log(log, output_dir or log_dir, terrain=terrain):
        printer("figure: {}".format(filename))


def function_config_show(keys=None, sort_keys=False, display_kwargs=None):
    config = get_config()
    show_config(config, keys=keys, sort_keys=sort_keys, print_function=make_printer(display_kwargs))


def function_config_write(output_config_filename=None, reset=False):
    if reset:
        config = default_config()
    else:
        config = get_config()
    write_config(config, output_config_filename)
