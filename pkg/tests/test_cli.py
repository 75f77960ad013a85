import json
from pathlib import Path

import pytest

from fpdsynth.cli import main
from fpdsynth.config import ConfigError, RunConfig, dump_config, load_config, parse_config

PAPER_YAML = """\
divider:
  f0: 2.6e9
  fbw: 0.03
  n_way: 3
  order: 3
  z0: 50
  ripple_db: 0.04321
  g_preset: paper-3rd-order-20dB
sweep:
  start: 2.4e9
  stop: 2.8e9
  points: 2001
outputs: [touchstone, csv, svg, netlist, report]
"""


@pytest.fixture
def paper_cfg(tmp_path):
    p = tmp_path / "paper.yaml"
    p.write_text(PAPER_YAML)
    return p


class TestConfig:
    def test_defaults_are_paper(self, paper_cfg):
        cfg = load_config(paper_cfg)
        assert cfg.spec == RunConfig().spec
        assert cfg.sweep.points == 2001

    def test_round_trip(self, paper_cfg, tmp_path):
        cfg = load_config(paper_cfg)
        p = tmp_path / "again.yaml"
        p.write_text(dump_config(cfg))
        assert load_config(p) == cfg
        assert dump_config(load_config(p)) == dump_config(cfg)

    def test_json_accepted(self, tmp_path):
        p = tmp_path / "c.json"
        p.write_text(json.dumps({"divider": {"n_way": 2}, "sweep": None}))
        cfg = load_config(p)
        assert cfg.n_way == 2 and cfg.sweep is None

    @pytest.mark.parametrize(
        "data,field",
        [
            ({"divider": {"fbw": "wide"}}, "divider.fbw"),
            ({"divider": {"n_way": 2.5}}, "divider.n_way"),
            ({"sweep": {"start": 3e9, "stop": 2e9}}, "sweep"),
            ({"sweep": {"points": 1}}, "sweep.points"),
            ({"outputs": ["pdf"]}, "outputs"),
            ({"divider": {"g_preset": "nope"}}, "divider.g_preset"),
            ({"divider": {"order": 5}}, "divider.g_preset"),
            ({"bogus": 1}, "bogus"),
            ({"loss": {"qu": -3}}, "loss.qu"),
            ({"divider": {"fbw": 2.0}}, "divider"),
        ],
    )
    def test_errors_name_field(self, data, field):
        with pytest.raises(ConfigError, match=field.replace(".", r"\.")):
            parse_config(data)


def _tree(root: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(root.iterdir())}


class TestCli:
    def test_report_passes_strict(self, paper_cfg, tmp_path, capsys):
        rc = main(["report", "-c", str(paper_cfg), "-o", str(tmp_path / "r"), "--strict"])
        out = capsys.readouterr().out
        assert rc == 0
        theory = [l for l in out.splitlines() if "[theory: reproduced]" in l]
        assert len(theory) == 7 and all(l.startswith("PASS") for l in theory)
        assert out.count("[measured: reference-only]") == 3
        assert (tmp_path / "r" / "report.txt").read_text() == out

    def test_strict_failure_exit_4(self, tmp_path, capsys):
        # a 0.5 dB ripple design cannot meet the 20 dB return-loss row
        p = tmp_path / "c.yaml"
        p.write_text("divider: {ripple_db: 0.5, g_preset: null}\n")
        assert main(["report", "-c", str(p), "-o", str(tmp_path), "--strict"]) == 4
        assert main(["report", "-c", str(p), "-o", str(tmp_path)]) == 0

    def test_config_error_exit_2(self, tmp_path, capsys):
        p = tmp_path / "bad.yaml"
        p.write_text("divider: {fbw: nope}\n")
        assert main(["synth", "-c", str(p), "-o", str(tmp_path)]) == 2
        assert "divider.fbw" in capsys.readouterr().err
        assert main(["synth", "-c", str(tmp_path / "missing.yaml")]) == 2

    def test_sweep_outputs_deterministic(self, paper_cfg, tmp_path, capsys):
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["sweep", "-c", str(paper_cfg), "-o", str(a)]) == 0
        assert main(["sweep", "-c", str(paper_cfg), "-o", str(b), "--workers", "4"]) == 0
        ta, tb = _tree(a), _tree(b)
        assert {"divider.s4p", "divider.csv", "divider.svg", "divider.net", "synth.json", "config.yaml"} <= set(ta)
        assert ta == tb

    def test_synth_only_when_no_sweep(self, tmp_path, capsys):
        p = tmp_path / "c.yaml"
        p.write_text("sweep: null\n")
        out = tmp_path / "o"
        assert main(["sweep", "-c", str(p), "-o", str(out)]) == 0
        assert set(_tree(out)) == {"synth.json", "config.yaml"}
        data = json.loads((out / "synth.json").read_text())
        assert data["qe_in"] == pytest.approx(28.387, abs=0.01)
        assert data["n_resonators"] == 7

    def test_env_output_dir(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("FPDSYNTH_OUTPUT_DIR", str(tmp_path / "env"))
        assert main(["microstrip"]) == 0
        data = json.loads((tmp_path / "env" / "microstrip.json").read_text())
        assert abs(data["z0_ohm"] - 50) < 0.05
        assert data["regime"] == "w/h<1"

    def test_mna_and_export(self, paper_cfg, tmp_path, capsys):
        out = tmp_path / "m"
        assert main(["mna", "-c", str(paper_cfg), "-o", str(out)]) == 0
        check = json.loads((out / "mna_check.json").read_text())
        assert check["max_abs_dS_vs_coupling_matrix"] <= 1e-6
        # feed the written netlist back in
        out2 = tmp_path / "m2"
        assert main(["mna", "-c", str(paper_cfg), "-o", str(out2), "--netlist", str(out / "mna.net")]) == 0
        assert (out2 / "mna.s4p").read_bytes() == (out / "mna.s4p").read_bytes()
        exp = tmp_path / "e"
        assert main(["export", str(out / "mna.s4p"), "-o", str(exp), "--format", "csv"]) == 0
        assert (exp / "mna.csv").exists()

    def test_flags_override(self, tmp_path, capsys):
        out = tmp_path / "o"
        assert main(["synth", "--ports", "4", "-o", str(out)]) == 0
        data = json.loads((out / "synth.json").read_text())
        assert data["n_resonators"] == 9
        assert main(["sweep", "--points", "1", "-o", str(out)]) == 2

    def test_bad_netlist_exit_2(self, tmp_path, capsys):
        p = tmp_path / "x.net"
        p.write_text("Q 1 2 3\n")
        assert main(["mna", "--netlist", str(p), "-o", str(tmp_path)]) == 2

    def test_unwritable(self, tmp_path, capsys):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert main(["microstrip", "-o", str(blocker / "sub")]) == 1
