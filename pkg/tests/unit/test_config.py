import json

from stride.config import (
    default_config,
    dump_config,
    get_config_key,
    get_config_section,
    load_config,
    merge_config,
    merge_weights_file,
    show_config,
    update_config,
)
from stride.errors import CommandError

import pytest


def test_merge_config_nested():
    config = {"a": {"x": 1, "y": {"z": 2}}, "b": 3}
    merge_config(config, {"a": {"y": {"w": 4}}, "b": {"c": 5}})
    assert config == {"a": {"x": 1, "y": {"z": 2, "w": 4}}, "b": {"c": 5}}


def test_section_over_defaults():
    section = get_config_section("stride", {"stride": {"random_seed": 3}})
    assert section == {"random_seed": 3, "output_dir": ".", "log_level": None}
    assert get_config_section("stride", {}) == get_config_section("stride", default_config())
    assert get_config_section("no_such_section", {}) == {}


def test_section_copies_defaults():
    section = get_config_section("stride", {})
    section["random_seed"] = 99
    assert get_config_section("stride", {})["random_seed"] == 7


def test_update_config():
    config = {"mpc": {"j_max": 5}}
    update_config(config, "mpc.j_max", 2)
    update_config(config, "qp.rho", 0.5)
    assert config == {"mpc": {"j_max": 2}, "qp": {"rho": 0.5}}


@pytest.mark.parametrize("key", ["mpc..j_max", "mpc.j_max.x", ""])
def test_update_config_invalid(key):
    with pytest.raises(CommandError):
        update_config({"mpc": {"j_max": 5}}, key, 1)


def test_get_config_key():
    config = {"mpc": {"j_max": 5}}
    assert get_config_key(config, "mpc.j_max") == 5
    with pytest.raises(CommandError):
        get_config_key(config, "mpc.eta")


def test_load_config(tmp_path):
    filename = tmp_path / "user.config"
    filename.write_text(json.dumps({"mpc": {"j_max": 3}}))
    config = load_config(str(filename))
    assert config["mpc"]["j_max"] == 3
    assert config["__internal__"]["filename"] == str(filename)
    assert config["stride"]["random_seed"] == 7


@pytest.mark.parametrize("content", ["{mpc: 1", "[1, 2]"])
def test_load_config_invalid(tmp_path, content):
    filename = tmp_path / "bad.config"
    filename.write_text(content)
    with pytest.raises(CommandError):
        load_config(str(filename))


def test_merge_packaged_weights():
    config = merge_weights_file({}, "hardware")
    assert config["mpc"]["profile"] == "hardware"
    assert config["mpc"]["L1_H"][0] == 400.0
    assert config["__internal__"]["weights"].endswith("hardware.json")


def test_merge_missing_weights():
    with pytest.raises(FileNotFoundError):
        merge_weights_file({}, "no_such_weights")


def test_show_config():
    lines = []
    config = {"__internal__": {"filename": None}, "mpc": {"j_max": 5, "eta_f": 0.01}}
    show_config(config, print_function=lines.append, sort_keys=True)
    assert lines == ["mpc.eta_f = 0.01", "mpc.j_max = 5"]
    lines.clear()
    show_config(config, keys=["mpc.j_max"], print_function=lines.append)
    assert lines == ["mpc.j_max = 5"]


def test_dump_config(tmp_path):
    filename = tmp_path / "sub" / "out.config"
    dump_config({"__internal__": {}, "mpc": {"j_max": 5}}, str(filename))
    assert json.loads(filename.read_text()) == {"mpc": {"j_max": 5}}
