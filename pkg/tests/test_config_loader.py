import json
import math

import numpy as np
import pytest
import scipy.io

from comb_cluster.adapters.config_loader import (
    ExportSelector,
    load_config,
    load_splitter_matrix,
    parse_config,
)
from comb_cluster.domain import CombWindow, ConfigError, ParseError, ValidationError

MINIMAL = {"window": [-10, 10], "opos": [{"delta_m": 1}]}


def test_minimal_config_gets_defaults():
    config = parse_config(json.dumps(MINIMAL))
    assert config.alpha == 0.5
    assert config.thetas == [0.0, math.pi / 4, math.pi / 2]
    assert config.samples == 0
    assert config.seed == 0
    assert config.exports == []
    assert config.splitter == "sylvester"
    assert config.dimension == 1
    assert config.copies == 1
    assert config.comb_window == CombWindow(-10, 10)
    assert [spec.delta_m for spec in config.specs()] == [1]


def test_toml_document():
    text = "\n".join(
        [
            "window = [-4, 4]",
            "alpha = 0.25",
            'exports = ["report", "dot"]',
            "",
            "[[opos]]",
            "delta_m = 1",
            "",
            "[[opos]]",
            "delta_m = 3",
        ]
    )
    config = parse_config(text, fmt="toml")
    assert config.dimension == 2
    assert config.alpha == 0.25
    assert config.exports == [ExportSelector.REPORT, ExportSelector.DOT]


def test_even_pump_index():
    with pytest.raises(ValidationError) as info:
        parse_config(json.dumps({"window": [-10, 10], "opos": [{"delta_m": 2}]}))
    assert "even pump index" in str(info.value)
    assert info.value.fields == ["opos.0"]


def test_three_opos_need_a_user_splitter():
    payload = {"window": [-10, 10], "opos": [{"delta_m": 1}, {"delta_m": 7}, {"delta_m": 91}]}
    with pytest.raises(ValidationError) as info:
        parse_config(json.dumps(payload))
    assert "unsupported splitter order 6" in str(info.value)


def test_copies_must_agree():
    payload = {"window": [-10, 10], "opos": [{"delta_m": 1, "copies": 3}, {"delta_m": 7}]}
    with pytest.raises(ValidationError):
        parse_config(json.dumps(payload))


@pytest.mark.parametrize(
    "change, field",
    [
        ({"window": [5, 1]}, "window"),
        ({"alpha": -0.1}, "alpha"),
        ({"samples": -1}, "samples"),
        ({"seed": -3}, "seed"),
        ({"thetas": []}, "thetas"),
        ({"opos": []}, "opos"),
        ({"exports": ["pdf"]}, "exports.0"),
        ({"delta_omega": 0.0}, "delta_omega"),
        ({"bogus": 1}, "bogus"),
    ],
)
def test_invalid_fields_are_named(change, field):
    with pytest.raises(ValidationError) as info:
        parse_config(json.dumps({**MINIMAL, **change}))
    assert field in info.value.fields
    assert str(info.value).startswith("[cli-io]")


def test_non_finite_theta():
    with pytest.raises(ValidationError) as info:
        parse_config('{"window": [-2, 2], "opos": [{"delta_m": 1}], "thetas": [NaN]}')
    assert "thetas" in info.value.fields


def test_json_syntax_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_config('{\n  "window": [-2, 2],\n}')
    assert info.value.line == 3
    assert info.value.column is not None


def test_toml_syntax_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_config("window = [-2, 2]\nalpha = = 1\n", fmt="toml")
    assert info.value.line == 2
    assert str(info.value).count("line 2") == 1


def test_root_must_be_a_mapping():
    with pytest.raises(ParseError):
        parse_config("[1, 2]")


def test_unknown_format():
    with pytest.raises(ConfigError):
        parse_config("{}", fmt="yaml")


def test_load_config_picks_format_by_suffix(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text('window = [-2, 2]\nopos = [{delta_m = 1}]\n', encoding="utf-8")
    assert load_config(path).comb_window == CombWindow(-2, 2)


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.json")
    other = tmp_path / "run.yaml"
    other.write_text("window: [-2, 2]", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(other)


def test_missing_splitter_file(tmp_path):
    payload = {**MINIMAL, "splitter": "h.npy"}
    with pytest.raises(ValidationError) as info:
        parse_config(json.dumps(payload), base_dir=tmp_path)
    assert info.value.fields == ["splitter"]


@pytest.mark.parametrize("name", ["h.npy", "h.txt", "h.mtx"])
def test_user_splitter_matrix_formats(tmp_path, name):
    h1 = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)
    path = tmp_path / name
    if name.endswith(".npy"):
        np.save(path, h1)
    elif name.endswith(".txt"):
        np.savetxt(path, h1, fmt="%.17g")
    else:
        scipy.io.mmwrite(str(path), h1, precision=17)

    config = parse_config(json.dumps({**MINIMAL, "splitter": name}), base_dir=tmp_path)
    np.testing.assert_allclose(load_splitter_matrix(config, tmp_path), h1, rtol=0, atol=1e-16)


def test_sylvester_needs_no_matrix(tmp_path):
    assert load_splitter_matrix(parse_config(json.dumps(MINIMAL)), tmp_path) is None


def test_unreadable_splitter(tmp_path):
    (tmp_path / "h.txt").write_text("not a matrix", encoding="utf-8")
    config = parse_config(json.dumps({**MINIMAL, "splitter": "h.txt"}), base_dir=tmp_path)
    with pytest.raises(ConfigError):
        load_splitter_matrix(config, tmp_path)


def test_echo_reproduces_the_config():
    config = parse_config(json.dumps({**MINIMAL, "seed": 4, "exports": ["report"]}))
    assert parse_config(json.dumps(config.echo())) == config
