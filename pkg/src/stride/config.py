"""
Configuration

Every module registers the defaults of its section with
``register_config``; a configuration is a mapping section name -> section
mapping. The tool layers, in order, the registered defaults, the user
config file, an MPC weight file and ``-k KEY=VALUE`` overrides.
"""

import collections.abc
import copy
import functools
import json
import logging
import os

import numpy as np

from .errors import CommandError


__all__ = [
    "register_config",
    "get_config_filename",
    "default_config",
    "get_config",
    "set_config",
    "load_config",
    "merge_config",
    "merge_weights_file",
    "dump_config",
    "write_config",
    "update_config",
    "get_config_key",
    "setup_config",
    "show_config",
    "get_output_dir",
    "get_data_path",
    "get_config_section",
]

LOG = logging.getLogger(__name__)

RCDIR = os.path.normpath(os.path.abspath(os.path.join(os.path.expanduser("~"), ".stride")))
CONFIG_FILENAME = os.path.join(RCDIR, "stride.config")
DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")
OUTPUT_DIR_ENV = "STRIDE_OUTPUT_DIR"

CONFIG = None

CONFIG_REGISTRY = {}


def register_config(name, default, setup_callback=None):
    CONFIG_REGISTRY[name] = (default, setup_callback)


def get_config_filename():
    return CONFIG_FILENAME


def get_data_path(*parts):
    """Returns the path of a packaged data file"""
    return os.path.join(DATA_DIR, *parts)


def _setup_stride_config(name, config):
    stride_config = config[name]
    np.random.seed(stride_config["random_seed"])
    level = stride_config.get("log_level")
    if level:
        logging.getLogger("stride").setLevel(level.upper())


register_config(
    name="stride",
    default={
        "random_seed": 7,
        "output_dir": ".",
        "log_level": None,
    },
    setup_callback=_setup_stride_config)


def default_config():
    config = {
        "__internal__": {"filename": None, "weights": None},
    }
    for name, (sub_config, _) in CONFIG_REGISTRY.items():
        config[name] = copy.deepcopy(sub_config)
    return config


def setup_config(config=None):
    if config is None:
        config = get_config()
    for name in config:
        setup_callback = CONFIG_REGISTRY.get(name, (None, None))[1]
        if setup_callback:
            setup_callback(name, config)


def set_config(config=None):
    if config is None:
        config = load_config()
    global CONFIG
    CONFIG = config


def get_config():
    if CONFIG is None:
        set_config()
    return CONFIG


def get_config_section(name, config=None):
    """Section ``name`` of ``config`` over the registered defaults.

       Sections registered after the configuration was loaded fall back to
       their defaults.
    """
    if config is None:
        config = get_config()
    section = copy.deepcopy(CONFIG_REGISTRY[name][0]) if name in CONFIG_REGISTRY else {}
    return merge_config(section, config.get(name, {}))


def get_output_dir(config=None):
    """Output directory; the environment variable wins over the config"""
    if config is None:
        config = get_config()
    output_dir = os.environ.get(OUTPUT_DIR_ENV) or config["stride"]["output_dir"]
    return os.path.abspath(output_dir)


def merge_config(config, data):
    """Recursively merges mapping ``data`` into ``config``"""
    for key, value in data.items():
        if isinstance(value, collections.abc.Mapping) and isinstance(config.get(key), collections.abc.Mapping):
            merge_config(config[key], value)
        else:
            config[key] = copy.deepcopy(value)
    return config


def _read_mapping(filename):
    with open(filename, "r") as fp:
        try:
            data = json.load(fp)
        except ValueError as err:
            raise CommandError("{}: not a JSON file: {}".format(filename, err)) from None
    if not isinstance(data, collections.abc.Mapping):
        raise CommandError("{}: expected a JSON object".format(filename))
    return data


def load_config(filename=None):
    """Registered defaults, with ``filename`` (or the user rc file) merged over them"""
    if filename is None and os.path.exists(get_config_filename()):
        filename = get_config_filename()
    data = default_config()
    if filename:
        merge_config(data, _read_mapping(filename))
        data["__internal__"]["filename"] = os.path.abspath(filename)
        LOG.debug("config loaded from %s", filename)
    return data


def merge_weights_file(config, name_or_path):
    """Merges an MPC weight file into the ``mpc`` section.

       Bare names resolve to the packaged ``data/weights/<name>.json``.
    """
    filename = name_or_path
    if not os.path.exists(filename):
        filename = get_data_path("weights", name_or_path + ".json")
    if not os.path.exists(filename):
        raise FileNotFoundError("weight file {!r} not found".format(name_or_path))
    merge_config(config.setdefault("mpc", {}), _read_mapping(filename))
    config.setdefault("__internal__", {})["weights"] = os.path.abspath(filename)
    LOG.debug("mpc weights loaded from %s", filename)
    return config


def write_config(config, filename=None):
    if filename is None:
        filename = get_config_filename()
    dump_config(config, filename)


def dump_config(config, filename=None):
    config = config.copy()
    config.pop("__internal__", None)
    json_data = json.dumps(config, indent=4, sort_keys=True)
    if filename is None:
        print(json_data)
        return
    dirname = os.path.dirname(os.path.abspath(filename))
    os.makedirs(dirname, exist_ok=True)
    with open(filename, "w") as file:
        file.write(json_data)


def update_config(config, key, value):
    """Sets the dotted ``key``; intermediate sections are created on demand"""
    tokens = [x.strip() for x in key.split(".")]
    if not all(tokens):
        raise CommandError("invalid config key {!r}".format(key))
    cfg = config
    for token in tokens[:-1]:
        cfg = cfg.setdefault(token, {})
        if not isinstance(cfg, collections.abc.MutableMapping):
            raise CommandError("config key {!r}: {!r} is not a section".format(key, token))
    cfg[tokens[-1]] = value


def get_config_key(config, key):
    val = config
    for token in (x.strip() for x in key.split(".")):
        try:
            val = val[token]
        except (KeyError, TypeError):
            raise CommandError("unknown config key {!r}".format(key)) from None
    return val


@functools.singledispatch
def yield_config_items(value, key, prefix):
    yield (key, value)


@yield_config_items.register(collections.abc.Mapping)
def _(value, key, prefix):
    for skey, svalue in value.items():
        sk = prefix + skey
        yield from yield_config_items(svalue, sk, sk + '.')


def show_config(config=None, keys=None, print_function=print, sort_keys=False):
    if config is None:
        config = get_config()
    config = {name: section for name, section in config.items() if name != "__internal__"}
    if keys:
        items = (item for key in keys for item in yield_config_items(get_config_key(config, key), key, key + '.'))
    else:
        items = yield_config_items(config, '', '')
    if sort_keys:
        items = sorted(items, key=lambda x: x[0])
    for key, value in items:
        print_function("{} = {!r}".format(key, value))
