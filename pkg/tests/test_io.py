import numpy as np
import pytest

from fpdsynth import cmatrix
from fpdsynth.cmatrix import SweepResult
from fpdsynth.export import format_csv, render_svg
from fpdsynth.synthesis import DividerSpec
from fpdsynth.touchstone import TouchstoneParseError, format_touchstone, parse_touchstone, read_touchstone, write_touchstone


@pytest.fixture(scope="module")
def filter_sweep(paper_plan):
    folded = cmatrix.fold_equivalent_filter(paper_plan)
    return cmatrix.sweep(cmatrix.normalize(folded, DividerSpec(n_way=1)), np.linspace(2.5e9, 2.7e9, 51))


class TestTouchstone:
    def test_four_port_round_trip(self, paper_sweep, tmp_path):
        p = write_touchstone(paper_sweep, tmp_path / "fpd")
        assert p.name == "fpd.s4p"
        back = read_touchstone(p)
        assert np.abs(back.s - paper_sweep.s).max() <= 1e-8
        assert back.freqs == pytest.approx(paper_sweep.freqs, rel=1e-12)
        assert back.z0 == 50

    def test_four_port_layout(self, paper_sweep):
        text = format_touchstone(SweepResult(paper_sweep.freqs[:2], paper_sweep.s[:2]))
        lines = text.splitlines()
        assert lines[1] == "# Hz S RI R 50"
        data = lines[2:]
        assert len(data) == 8  # one row per line
        assert all(len(l.split()) == 9 for l in data[0::4])
        assert all(len(l.split()) == 8 for l in data[1:4])

    def test_two_port_single_line(self, filter_sweep, tmp_path):
        p = write_touchstone(filter_sweep, tmp_path / "f.s2p")
        lines = [l for l in p.read_text().splitlines() if not l.startswith(("!", "#"))]
        assert len(lines) == filter_sweep.freqs.size
        tok = lines[10].split()
        # S11 S21 S12 S22 order
        s = filter_sweep.s[10]
        assert complex(float(tok[3]), float(tok[4])) == pytest.approx(s[1, 0], abs=1e-8)
        back = read_touchstone(p)
        assert np.abs(back.s - filter_sweep.s).max() <= 1e-8

    def test_single_frequency(self, paper_sweep, tmp_path):
        one = SweepResult(paper_sweep.freqs[:1], paper_sweep.s[:1])
        back = read_touchstone(write_touchstone(one, tmp_path / "one.s4p"))
        assert back.freqs.size == 1
        assert np.abs(back.s - one.s).max() <= 1e-8

    def test_five_ports_row_per_line(self):
        rng = np.random.default_rng(0)
        s = rng.normal(size=(3, 5, 5)) + 1j * rng.normal(size=(3, 5, 5))
        res = SweepResult(np.array([1e9, 2e9, 3e9]), s * 0.1)
        text = format_touchstone(res)
        assert len(text.splitlines()) == 2 + 15
        assert np.abs(parse_touchstone(text, 5).s - res.s).max() <= 1e-8

    def test_ma_db_and_units(self):
        text = "# GHz S MA R 50\n1.0 0.5 90\n"
        r = parse_touchstone(text, 1)
        assert r.freqs[0] == 1e9
        assert r.s[0, 0, 0] == pytest.approx(0.5j, abs=1e-15)
        r = parse_touchstone("# MHz S DB R 75\n100 -6.0205999 180\n", 1)
        assert r.s[0, 0, 0] == pytest.approx(-0.5, abs=1e-8)
        assert r.z0 == 75

    @pytest.mark.parametrize(
        "text,line",
        [("# Hz S RI R 50\n1e9 0.1 x\n", 2), ("# Hz S RI R 50\n1e9 0.1\n", 2), ("# Hz Y RI\n", 1)],
    )
    def test_parse_errors_name_line(self, text, line):
        with pytest.raises(TouchstoneParseError, match=f"line {line}"):
            parse_touchstone(text, 1)

    def test_port_count_from_name(self, tmp_path):
        p = tmp_path / "x.txt"
        p.write_text("1 0 0\n")
        with pytest.raises(TouchstoneParseError):
            read_touchstone(p)

    def test_byte_deterministic(self, paper_ncm, paper_sweep):
        again = cmatrix.sweep(paper_ncm, paper_sweep.freqs, workers=4)
        assert format_touchstone(again) == format_touchstone(paper_sweep)


class TestCsvSvg:
    def test_csv_columns(self, filter_sweep):
        lines = format_csv(filter_sweep).splitlines()
        assert lines[0] == "f_Hz,S11_dB,S11_deg,S12_dB,S12_deg,S21_dB,S21_deg,S22_dB,S22_deg"
        row = [float(x) for x in lines[26].split(",")]
        s = filter_sweep.s[25]
        assert row[0] == pytest.approx(filter_sweep.freqs[25], rel=1e-10)
        assert row[5] == pytest.approx(20 * np.log10(abs(s[1, 0])), abs=1e-8)
        assert row[6] == pytest.approx(np.degrees(np.angle(s[1, 0])), abs=1e-7)

    def test_csv_floor_for_exact_zero(self):
        res = SweepResult(np.array([1e9]), np.zeros((1, 1, 1), dtype=complex))
        assert "-4.000000000e+02" in format_csv(res)

    def test_svg_deterministic(self, filter_sweep):
        a = render_svg(filter_sweep, title="f")
        b = render_svg(filter_sweep, title="f")
        assert a == b
        assert a.lstrip().startswith("<?xml")
        assert "S21" in a
