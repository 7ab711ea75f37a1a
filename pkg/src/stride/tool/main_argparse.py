"""
Main tool.
"""

import argparse
import json
import logging
import os

from .. import VERSION
from ..config import (
    set_config,
    load_config,
    merge_weights_file,
    update_config,
    setup_config,
)

from .subcommands import (
    function_collect,
    function_pca,
    function_train,
    function_run,
    function_bench,
    function_eval_noise,
    function_plot,
    function_config_show,
    function_config_write,
)

__all__ = [
    'main_argparse',
]


class StrideArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(2, "error: usage: {}\n".format(" ".join(message.split())))


def type_config_key_value(string):
    if "=" not in string:
        raise argparse.ArgumentTypeError("expected K=V, got {!r}".format(string))
    key, value = string.split("=", 1)
    try:
        value = json.loads(value)
    except ValueError:
        pass
    return (key, value)


def type_float_list(string):
    try:
        return [float(token) for token in string.split(",") if token.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated numbers, got {!r}".format(string)) from None


def type_jobs(string):
    try:
        value = int(string)
    except ValueError:
        value = 0
    if value < 1:
        raise argparse.ArgumentTypeError("expected a positive number of jobs, got {!r}".format(string))
    return value


def type_name_list(string):
    return [token.strip() for token in string.split(",") if token.strip()]


def setup_logging(verbose, config):
    level = config["stride"].get("log_level")
    if verbose >= 2:
        level = "DEBUG"
    elif verbose == 1:
        level = "INFO"
    logging.basicConfig(level=(level or "WARNING").upper(), format="%(levelname)s %(name)s: %(message)s")


def build_parser():
    top_level_parser = StrideArgumentParser(
        prog="stride",
        description="""\
Stride v{version} - variable-frequency locomotion MPC toolkit
""".format(version=VERSION))

    top_level_parser.add_argument(
        "-v", "--verbose",
        action="count", default=0,
        help="increase verbosity (repeatable)")

    top_level_parser.add_argument(
        "-c", "--config",
        metavar="F",
        dest="config_filename", default=None, type=str,
        help="config filename")

    top_level_parser.add_argument(
        "-k", "--set-key",
        metavar="K=V",
        dest="config_keys", default=[], type=type_config_key_value,
        action="append",
        help="set config key")

    top_level_parser.add_argument(
        "--weights",
        metavar="F",
        dest="weights_filename", default=None, type=str,
        help="MPC weight file merged into the 'mpc' section")

    top_level_parser.add_argument(
        "--seed",
        metavar="N",
        default=None, type=int,
        help="random seed")

    top_level_parser.add_argument(
        "--version",
        action="version",
        version=VERSION)

    subparsers = top_level_parser.add_subparsers(dest="subcommand")
    subparsers.required = True

    collect_parser = subparsers.add_parser(
        'collect',
        description="""\
Collect a step-duration dataset from closed-loop walking with random
stride durations and pushes""")
    collect_parser.set_defaults(
        function=function_collect,
        function_args=['output', 'episodes', 'duration', 'controller', 'pushes', 'log_dir', 'jobs'])

    collect_parser.add_argument(
        "-e", "--episodes",
        metavar="N", type=int, default=None,
        help="number of episodes")

    collect_parser.add_argument(
        "-d", "--duration",
        metavar="S", type=float, default=None,
        help="episode duration [s]")

    collect_parser.add_argument(
        "--controller",
        metavar="NAME", type=str, default=None,
        help="controller driving the robot")

    collect_parser.add_argument(
        "--no-pushes",
        dest="pushes", action="store_false", default=True,
        help="disable CoM pushes")

    collect_parser.add_argument(
        "-l", "--log-dir",
        metavar="D", type=str, default=None,
        help="keep the episode logs under D")

    pca_parser = subparsers.add_parser(
        'pca',
        description="""\
Select features by PCA loadings""")
    pca_parser.set_defaults(
        function=function_pca,
        function_args=['dataset', 'n_axes', 'standardize', 'output'])

    pca_parser.add_argument(
        "-n", "--n-axes",
        metavar="N", type=int, default=None,
        help="number of principal axes")

    pca_parser.add_argument(
        "--no-standardize",
        dest="standardize", action="store_false", default=True,
        help="keep the raw feature scales")

    train_parser = subparsers.add_parser(
        'train',
        description="""\
Train the step-duration network""")
    train_parser.set_defaults(
        function=function_train,
        function_args=['dataset', 'all_features', 'selected', 'pca', 'output'])

    selection_group = train_parser.add_mutually_exclusive_group()
    selection_group.add_argument(
        "-a", "--all-features",
        action="store_true", default=False,
        help="train on every feature")

    selection_group.add_argument(
        "-s", "--selected",
        metavar="I,J", type=str, default=None,
        help="feature indices or names")

    selection_group.add_argument(
        "-p", "--pca",
        metavar="F", type=str, default=None,
        help="selection JSON written by 'pca'")

    for parser in collect_parser, pca_parser, train_parser:
        parser.add_argument(
            "-o", "--output",
            metavar="F", type=str, default=None,
            help="output filename")

    for parser in pca_parser, train_parser:
        parser.add_argument(
            "dataset",
            type=str,
            help="dataset CSV")

    run_parser = subparsers.add_parser(
        'run',
        description="""\
Run a scenario in closed loop""")
    run_parser.set_defaults(
        function=function_run,
        function_args=['scenario', 'controller', 'gaitnet', 'duration', 'seed', 'log_dir', 'plot'])

    run_parser.add_argument(
        "--controller",
        metavar="NAME", type=str, default=None,
        help="controller (default from the scenario)")

    run_parser.add_argument(
        "-l", "--log-dir",
        metavar="D", type=str, default=None,
        help="log directory")

    run_parser.add_argument(
        "--plot",
        action="store_true", default=False,
        help="write the SVG figures next to the log")

    bench_parser = subparsers.add_parser(
        'bench',
        description="""\
Compare solve times of the controllers on one scenario""")
    bench_parser.set_defaults(
        function=function_bench,
        function_args=['scenario', 'controllers', 'duration', 'sweep_weights', 'gaitnet', 'output', 'jobs'])

    bench_parser.add_argument(
        "--controllers",
        metavar="A,B", type=type_name_list, default=None,
        help="controllers to compare")

    bench_parser.add_argument(
        "--sweep-weights",
        metavar="S1,S2", type=type_float_list, default=None,
        help="scale the MPC weights by each factor")

    bench_parser.add_argument(
        "-o", "--output",
        metavar="F", type=str, default=None,
        help="output CSV")

    for parser in collect_parser, bench_parser:
        parser.add_argument(
            "-j", "--jobs",
            metavar="N", type=type_jobs, default=1,
            help="worker processes (default: 1)")

    for parser in run_parser, bench_parser:
        parser.add_argument(
            "--scenario",
            metavar="S", type=str, required=True,
            help="scenario name or JSON file")

        parser.add_argument(
            "-g", "--gaitnet",
            metavar="F", type=str, default=None,
            help="step-duration network JSON")

        parser.add_argument(
            "-d", "--duration",
            metavar="S", type=float, default=None,
            help="simulated duration [s]")

    noise_parser = subparsers.add_parser(
        'eval-noise',
        description="""\
Prediction RMSE under sensor noise""")
    noise_parser.set_defaults(
        function=function_eval_noise,
        function_args=['model', 'dataset', 'scales', 'seeds', 'output'])

    noise_parser.add_argument(
        "model",
        type=str,
        help="network JSON")

    noise_parser.add_argument(
        "dataset",
        type=str,
        help="test dataset CSV")

    noise_parser.add_argument(
        "--scales",
        metavar="S1,S2", type=type_float_list, default=None,
        help="noise scales")

    noise_parser.add_argument(
        "-n", "--seeds",
        metavar="N", type=int, default=5,
        help="number of noise seeds")

    noise_parser.add_argument(
        "-o", "--output",
        metavar="F", type=str, default=None,
        help="output CSV")

    plot_parser = subparsers.add_parser(
        'plot',
        description="""\
Plot a run log""")
    plot_parser.set_defaults(
        function=function_plot,
        function_args=['log_dir', 'output_dir', 'scenario'])

    plot_parser.add_argument(
        "log_dir",
        type=str,
        help="log directory")

    plot_parser.add_argument(
        "-o", "--output-dir",
        metavar="D", type=str, default=None,
        help="figure directory (default: the log directory)")

    plot_parser.add_argument(
        "--scenario",
        metavar="S", type=str, default=None,
        help="scenario providing the terrain")

    config_parser = subparsers.add_parser(
        'config',
        description="""\
Show config""")
    config_parser.set_defaults(
        function=function_config_show,
        function_args=[])

    config_subparsers = config_parser.add_subparsers()

    config_show_parser = config_subparsers.add_parser(
        'show',
        description="""\
Show config""")
    config_show_parser.set_defaults(
        function=function_config_show,
        function_args=['keys', 'sort_keys'])

    config_show_parser.add_argument(
        "-s", "--sort-keys",
        action="store_true",
        default=False,
        help="sort keys")

    config_show_parser.add_argument(
        "keys",
        nargs="*",
        help="config keys")

    config_write_parser = config_subparsers.add_parser(
        'write',
        description="""\
Write config file""")
    config_write_parser.set_defaults(
        function=function_config_write,
        function_args=["output_config_filename", "reset"])

    config_write_parser.add_argument(
        "-r", "--reset",
        action="store_true",
        default=False,
        help="reset to default values")

    config_write_parser.add_argument(
        "-o", "--output-config-filename",
        type=str,
        default=None,
        help="output config filename")

    return top_level_parser


def main_argparse(argv=None):
    """Parses ``argv``, sets up the config and runs the subcommand"""
    top_level_parser = build_parser()
    namespace = top_level_parser.parse_args(argv)

    if namespace.config_filename is not None and not os.path.exists(namespace.config_filename):
        raise FileNotFoundError("config file {!r} not found".format(namespace.config_filename))
    config = load_config(namespace.config_filename)

    if namespace.weights_filename is not None:
        merge_weights_file(config, namespace.weights_filename)

    for key, value in namespace.config_keys:
        update_config(config, key, value)
    if namespace.seed is not None:
        update_config(config, "stride.random_seed", namespace.seed)
    setup_config(config)
    set_config(config)
    setup_logging(namespace.verbose, config)

    kwargs = {arg: getattr(namespace, arg) for arg in namespace.function_args}
    return namespace.function(**kwargs)
