import json
import os
from fractions import Fraction as F
from pathlib import Path

import pytest

from hyperlip import augtree, catalog, cli
from hyperlip.config import parse_config
from hyperlip.errors import ParseError

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def _run(tmp_path, command, config, *extra):
    out = tmp_path / f"{command}.json"
    code = cli.main([command, "--config", str(config), "--out", str(out), *extra])
    return code, json.loads(out.read_text()), out.read_bytes()


def test_five_three_config_normalises_to_the_catalog_system():
    cfg = parse_config((CONFIGS / "five_three.json").read_text())
    assert cfg.kind == "ifs"
    assert cfg.source.maps == catalog.five_three().maps


def test_empty_maps_rejected():
    with pytest.raises(ParseError, match="at least 2 maps"):
        parse_config('{"source": {"type": "ifs", "ratio": "1/5", "maps": []}}')


def test_float_rotation_rejected_with_location():
    text = '{"source": {"type": "ifs", "ratio": "1/5",\n  "maps": [{"rotation": [[0.5]], "translation": ["0"]},\n' \
           '            {"rotation": [[1]], "translation": ["1/2"]}]}}'
    with pytest.raises(ParseError, match="rational orthogonal required") as info:
        parse_config(text)
    assert (info.value.line, info.value.column) == (2, 27)


def test_non_orthogonal_rejected():
    text = '{"source": {"type": "ifs", "ratio": "1/5", "maps": [' \
           '{"rotation": [["1/2"]], "translation": ["0"]}, {"rotation": [[1]], "translation": ["1/2"]}]}}'
    with pytest.raises(ParseError, match="rational orthogonal required"):
        parse_config(text)


def test_syntax_error_location():
    with pytest.raises(ParseError) as info:
        parse_config('{"source":\n  {"type": "ifs",, }}')
    assert info.value.line == 2


def test_unknown_key_and_types():
    with pytest.raises(ParseError, match="unknown key"):
        parse_config('{"source": {"type": "chain", "levels": [1]}, "colour": 1}')
    with pytest.raises(ParseError, match="unknown source type"):
        parse_config('{"source": {"type": "spiral"}}')
    with pytest.raises(ParseError, match="rational required"):
        parse_config('{"source": {"type": "cantor_union", "alpha": 0.25}}')


def test_classify_five_three(tmp_path):
    code, report, _ = _run(tmp_path, "classify", CONFIGS / "five_three.json", "--depth", "6")
    assert code == 0 and report["schema"] == "1"
    assert report["result"]["incidence"] == [[1, 1], [0, 3]]


def test_classify_chain_is_inconclusive(tmp_path):
    code, report, _ = _run(tmp_path, "classify", CONFIGS / "chain.json", "--depth", "6")
    assert code == 2 and report["result"]["verdict"] == "Inconclusive"


def test_reports_are_byte_identical(tmp_path):
    first = _run(tmp_path, "near-isometry", CONFIGS / "tree_union.json")[2]
    second = _run(tmp_path, "near-isometry", CONFIGS / "tree_union.json")[2]
    assert first == second
    assert b"time" not in first


def test_errors_exit_one(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"source": {"type": "ifs", "ratio": "1/5", "maps": []}}')
    code, report, _ = _run(tmp_path, "build", bad)
    assert code == 1 and report["error"]["code"] == "parse_error" and report["error"]["line"] == 1
    code, report, _ = _run(tmp_path, "union", CONFIGS / "five_three.json")
    assert code == 1 and report["error"]["code"] == "invalid_argument"


def test_threads_variable_validated(tmp_path, monkeypatch):
    monkeypatch.setenv("HYPERLIP_THREADS", "zero")
    code, report, _ = _run(tmp_path, "build", CONFIGS / "single_edge.json", "--depth", "3")
    assert code == 1
    monkeypatch.setenv("HYPERLIP_THREADS", "2")
    assert _run(tmp_path, "build", CONFIGS / "single_edge.json", "--depth", "3")[0] == 0


def test_cantor_union_routes(tmp_path):
    code, third, _ = _run(tmp_path, "cantor-union", CONFIGS / "cantor_third.json")
    assert code == 0 and third["result"]["regime"] == "dual"
    assert third["result"]["singletons"] == 2 and third["result"]["touching_pairs"] == 3
    code, quarter, _ = _run(tmp_path, "cantor-union", CONFIGS / "cantor_quarter.json")
    assert quarter["result"]["regime"] == "unique" and quarter["result"]["stabilized_within_bound"]
    assert _run(tmp_path, "cantor-union", CONFIGS / "cantor_one.json")[1]["result"]["regime"] == "touching"
    apart = _run(tmp_path, "cantor-union", CONFIGS / "cantor_apart.json")[1]["result"]
    assert apart["regime"] == "disjoint" and apart["classification"]["incidence"] == [[2]]


def test_export_dot_round_trip(tmp_path):
    dot = tmp_path / "g.dot"
    code, report, _ = _run(tmp_path, "export-dot", CONFIGS / "single_edge.json", "--depth", "4", "--dot", str(dot))
    assert code == 0
    assert augtree.read_dot(dot.read_text()) == catalog.single_edge_binary(4)


def test_rearrange_row_infeasible(tmp_path):
    code, report, _ = _run(tmp_path, "rearrange", CONFIGS / "row_infeasible.json")
    assert code == 2 and report["result"]["feasible"] is False


def test_rearrange_and_frobenius_from_classification(tmp_path):
    code, report, _ = _run(tmp_path, "rearrange", CONFIGS / "five_three.json")
    blocks = report["result"]["blocks"]
    assert code == 0 and [b["variant"] for b in blocks] == ["quasi", "strict"]
    code, report, _ = _run(tmp_path, "frobenius", CONFIGS / "five_three.json")
    assert report["result"]["exponent"] == 1


def test_telescope_matches_power(tmp_path):
    code, report, _ = _run(tmp_path, "telescope", CONFIGS / "five_three.json", "--depth", "8", "--budget-k", "2")
    assert code == 0 and report["result"]["matches_power"]
    assert report["result"]["telescoped"]["incidence"] == [[1, 4], [0, 9]]


def test_union_command(tmp_path):
    code, report, _ = _run(tmp_path, "union", CONFIGS / "planar_union.json", "--depth", "5")
    assert code == 0 and report["result"]["incidence"] == [[2, 2], [0, 3]]


def test_verify_reports_both_directions(tmp_path):
    code, report, _ = _run(tmp_path, "verify", CONFIGS / "single_edge.json", "--depth", "5")
    sandwich = report["result"]["sandwich"]
    assert sandwich["reverse_holds"] is True
    assert code == (0 if report["result"]["passed"] else 2)


def test_all_commands_run(tmp_path):
    for command in cli.COMMANDS:
        config = CONFIGS / ("planar_union.json" if command == "union" else
                            "cantor_quarter.json" if command == "cantor-union" else "single_edge.json")
        depth = "8" if command == "telescope" else "5"
        code, report, _ = _run(tmp_path, command, config, "--depth", depth)
        assert code in (0, 2), (command, report)
        assert report["schema"] == "1"
