import csv
import json

import pytest

from mural.harness.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from mural.harness.config import ConfigError, parse_config
from mural.harness.verify import recompute_excess


def write_config(path, **over):
    cfg = {"scenario": "example1", "algorithms": ["agnostic"], "eps": [0.2], "delta": 0.1,
           "constant_scale": 0.02, "seeds": 5}
    cfg.update(over)
    path.write_text(json.dumps(cfg, indent=2))
    return path


def test_run_writes_one_report_per_seed_and_a_csv(tmp_path):
    cfg = write_config(tmp_path / "c.json")
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--no-figures"]) == EXIT_OK
    assert len(list(out.glob("*.json"))) == 5
    rows = list(csv.DictReader(open(out / "runs.csv")))
    assert len(rows) == 5
    assert list(rows[0])[:9] == ["scenario", "algorithm", "eps", "seed", "excess", "total_labels",
                                 "per_group_labels", "theta_max", "runtime_ms"]


def test_run_renders_figures(tmp_path):
    cfg = write_config(tmp_path / "c.json", algorithms=["agnostic", "passive"], seeds=2, eps=[0.2, 0.1])
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    for name in ("labels_vs_eps.png", "excess.png"):
        assert (out / "figures" / name).read_bytes()[:4] == b"\x89PNG"


@pytest.mark.parametrize("text,line", [
    ('{\n  "scenario": "example1",\n  "eps": [0.1,\n}', 4),
    ('{\n  "scenario": "example1",\n  "algorithms": ["agnostic"],\n  "eps": [-1],\n  "seeds": 2\n}', 4),
    ('{\n  "scenario": "example1",\n  "algorithms": ["cal9"],\n  "eps": 0.1,\n  "seeds": 2\n}', 3),
    ('{\n  "scenario": "example1",\n  "algorithms": ["agnostic"],\n  "eps": 0.1,\n  "sedes": 2\n}', 5),
])
def test_malformed_config_reports_the_line(text, line):
    with pytest.raises(ConfigError) as err:
        parse_config(text, "bad.json")
    assert err.value.line == line
    assert str(err.value).startswith(f"bad.json:{line}:")


def test_malformed_config_exits_nonzero_without_outputs(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"scenario": "example1", "algorithms": ["agnostic"], "eps": "tiny", "seeds": 2}')
    out = tmp_path / "out"
    assert main(["run", "--config", str(bad), "--out", str(out)]) == EXIT_USAGE
    assert not out.exists()
    assert "bad.json:1:" in capsys.readouterr().err


def test_unknown_scenario_param_exits_nonzero(tmp_path):
    cfg = write_config(tmp_path / "c.json", scenario={"name": "threshold", "params": {"points": 8}})
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_USAGE
    assert not (tmp_path / "o").exists()


def test_group_realizable_rejected_on_agnostic_scenario(tmp_path):
    cfg = write_config(tmp_path / "c.json", algorithms=["group_realizable"])
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o")]) == EXIT_USAGE


def test_compare_and_its_errors(tmp_path, capsys):
    params = {"n_points": 64, "G": 2, "noise_spec": {"kind": "group_realizable", "offsets": [-4, 4]}}
    cfg = write_config(tmp_path / "c.json", scenario={"name": "threshold", "params": params},
                       algorithms=["group_realizable", "passive"], seeds=3, eps=[0.1])
    out = tmp_path / "out"
    assert main(["run", "--config", str(cfg), "--out", str(out), "--no-figures"]) == EXIT_OK
    target = tmp_path / "cmp.csv"
    assert main(["compare", str(out), "--out", str(target)]) == EXIT_OK
    rows = list(csv.DictReader(open(target)))
    assert len(rows) == 1 and float(rows[0]["ratio_median"]) < 1
    assert target.with_suffix(".png").exists()

    # only one algorithm present
    capsys.readouterr()
    assert main(["compare", str(out / "*group_realizable*.json")]) == EXIT_USAGE
    # a second scenario without passive runs is named in the error
    other = write_config(tmp_path / "d.json", algorithms=["agnostic"], seeds=1)
    assert main(["run", "--config", str(other), "--out", str(out), "--no-figures"]) == EXIT_OK
    assert main(["compare", str(out)]) == EXIT_USAGE
    assert "example1" in capsys.readouterr().err


def test_verify_and_gen(tmp_path, capsys):
    cfg = write_config(tmp_path / "c.json", seeds=1)
    out = tmp_path / "out"
    main(["run", "--config", str(cfg), "--out", str(out), "--no-figures"])
    report_path = next(out.glob("*.json"))
    inst_path = tmp_path / "inst.json"
    assert main(["gen", "--config", str(cfg), "--out", str(inst_path)]) == EXIT_OK
    assert main(["verify", str(report_path), "--instance", str(inst_path)]) == EXIT_OK
    assert main(["verify", str(report_path)]) == EXIT_OK

    inst = json.loads(inst_path.read_text())
    assert recompute_excess(inst, 1) == (0.25, 0.25)
    tampered = json.loads(report_path.read_text())
    tampered["excess_true_loss"] += 0.01
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(tampered))
    assert main(["verify", str(bad), "--instance", str(inst_path)]) == EXIT_FAIL

    capsys.readouterr()
    assert main(["gen", "--scenario", "threshold", "--params", '{"n_points": 5}']) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["domain_size"] == 5 and len(doc["hypotheses"]) == 6


def test_seed_offset_shifts_seeds(tmp_path):
    cfg = write_config(tmp_path / "c.json", seeds=1)
    main(["run", "--config", str(cfg), "--out", str(tmp_path / "a"), "--seed-offset", "4", "--no-figures"])
    rep = json.loads(next((tmp_path / "a").glob("*.json")).read_text())
    assert rep["config"]["seed"] == 4


def test_jobs_env_default(monkeypatch):
    from mural.harness.cli import build_parser
    monkeypatch.setenv("MURAL_JOBS", "3")
    args = build_parser().parse_args(["run", "--config", "x.json"])
    assert args.jobs == 3
