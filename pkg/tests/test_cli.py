import json

import pytest

from klab.cli import main


def read(path):
    return json.loads(path.read_text())


def test_build_default(tmp_path):
    assert main(["build", "--out", str(tmp_path)]) == 0
    doc = read(tmp_path / "systems.json")
    a, b = doc["systems"]
    assert [blk["size"] for blk in a["stages"][1]["blocks"]] == [4, 4]
    assert a["steps"][0]["multiplicities"] == [[4, 4]]
    part = next(p for p in b["steps"][0]["parts"] if (p["source"], p["target"]) == (1, 1))
    assert part["pattern"][0] == {"map": "exp", "winding": 16, "mult": 1}
    assert doc["systems"][1]["stages"][5]["blocks"][5]["size"] == 2009787236572500


def test_build_single_stage(tmp_path):
    assert main(["build", "--stages", "1", "--out", str(tmp_path)]) == 0
    doc = read(tmp_path / "systems.json")
    assert doc["systems"][0]["stages"] == [{"stage": 1, "blocks": [{"size": 1, "space": "circle"}]}]


def test_bad_config_exit_2(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"k_seq": [3, 2, 4, 5, 6]}))
    assert main(["build", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "increasing" in capsys.readouterr().err
    cfg.write_text(json.dumps({"bogus": 1}))
    assert main(["verify", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    cfg.write_text("not json")
    assert main(["uvd", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_config_file_fields(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"stage_count": 3, "grid_resolution": 512, "t_seq": ["1/3", "2/3"], "seed": 4}))
    assert main(["build", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    doc = read(tmp_path / "systems.json")
    assert doc["config"]["t_seq"] == ["1/3", "2/3"]
    assert doc["config"]["seed"] == 4


def test_obstruct_default(tmp_path):
    assert main(["obstruct", "--n", "1", "--M", "0", "--out", str(tmp_path)]) == 0
    doc = read(tmp_path / "report.json")
    led = doc["ledger"]
    assert led["ratio"] == f"{4 ** (led['m'] - 1)}/1"
    assert led["lower_bound"] >= 3
    assert all({"lhs", "rhs", "margin", "anchor"} <= set(c) for c in doc["checks"])
    assert (tmp_path / "htilde.csv").read_text().startswith("x,htilde,pushed")


def test_obstruct_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    main(["obstruct", "--n", "2", "--M", "3", "--out", str(a)])
    main(["obstruct", "--n", "2", "--M", "3", "--out", str(b)])
    assert (a / "report.json").read_bytes() == (b / "report.json").read_bytes()


def test_obstruct_budget_exceeded(tmp_path):
    assert main(["obstruct", "--M", "1000", "--out", str(tmp_path)]) == 1
    doc = read(tmp_path / "report.json")
    assert doc["pass"] is False and "StageBudgetExceeded" in json.dumps(doc)


def test_uvd(tmp_path):
    assert main(["uvd", "--out", str(tmp_path)]) == 0
    doc = read(tmp_path / "report.json")
    assert all(v["pass"] for v in doc["verdicts"]["A"])
    assert sum(not v["pass"] for v in doc["verdicts"]["B"]) == 5


def test_inv0_small(tmp_path):
    assert main(["inv0", "--stages", "4", "--grid", "1024", "--out", str(tmp_path)]) == 0
    doc = read(tmp_path / "report.json")
    assert len(doc["step_defects"]) == 3


def test_verify_coarse_grid(tmp_path):
    code = main(["verify", "--stages", "4", "--grid", "16", "--out", str(tmp_path)])
    assert code == 1
    assert "GridTooCoarse" in (tmp_path / "report.json").read_text()


def test_timing_kept_out_of_report(tmp_path):
    main(["uvd", "--out", str(tmp_path)])
    assert "seconds" not in (tmp_path / "report.json").read_text()
    assert "seconds" in read(tmp_path / "timing.json")
