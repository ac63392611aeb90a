import subprocess
import sys
from pathlib import Path

import pytest

from explocoh.cli import main
from explocoh.errors import ManifestError
from explocoh.manifest import (
    parse_chart_file,
    parse_fan_file,
    parse_form_file,
    parse_manifest,
    parse_map_file,
    serialize_manifest,
)

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run_cli(*argv, capsys=None):
    code = main(list(argv))
    return code


def test_manifest_roundtrip_all_fixtures():
    for path in sorted(FIXTURES.glob("*.manifest")):
        text = path.read_text()
        manifest = parse_manifest(text)
        printed = serialize_manifest(manifest)
        again = parse_manifest(printed)
        assert serialize_manifest(again) == printed
        assert sorted(again.charts) == sorted(manifest.charts)
        assert sorted(again.overlaps) == sorted(manifest.overlaps)
        assert again.gluing_class == manifest.gluing_class


def test_manifest_parse_errors_carry_lines():
    with pytest.raises(ManifestError) as err:
        parse_manifest("[chart A]\nn = 0\nm = 1\nineq 1 2 >= 0\n")
    assert "line 4" in str(err.value)
    with pytest.raises(ManifestError):
        parse_manifest("stray line\n")
    with pytest.raises(ManifestError):
        parse_manifest("")


def test_fan_chart_form_map_files():
    fan = parse_fan_file((FIXTURES / "p2.fan").read_text())
    assert fan.ambient_dim == 2 and len(fan.max_cones) == 3
    cid, sig = parse_chart_file((FIXTURES / "halfline.chart").read_text())
    assert cid == "H" and sig.m == 1
    form = parse_form_file((FIXTURES / "gumbel_area.form").read_text(), 0, 1)
    assert form.degree == 2
    maps = parse_map_file((FIXTURES / "axes.map").read_text())
    assert maps["df"] == [[1], [0]]


def test_cli_cohomology_all_manifests(capsys):
    expected = {
        "p1_fan.manifest": {0: 1, 2: 1},
        "p2_fan.manifest": {0: 1, 2: 1, 4: 1},
        "p1xp1_fan.manifest": {0: 1, 2: 2, 4: 1},
        "hirzebruch1_fan.manifest": {0: 1, 2: 2, 4: 1},
        "single_interval.manifest": {0: 1, 1: 1},
        "single_halfline.manifest": {0: 1},
        "quadrant2.manifest": {0: 1},
        "tetrahedron_quadrant.manifest": {0: 1, 2: 1},
    }
    for name, betti in expected.items():
        code = main(["cohomology", str(FIXTURES / name)])
        out = capsys.readouterr().out
        assert code == 0, out
        got = {
            int(l.split()[1]): int(l.split()[2])
            for l in out.splitlines()
            if l.startswith("betti ")
        }
        assert got == betti, (name, got)


def test_cli_pd_check_all_manifests(capsys):
    for path in sorted(FIXTURES.glob("*.manifest")):
        code = main(["pd-check", str(path)])
        out = capsys.readouterr().out
        assert code == 0, (path.name, out)
        assert "pdcheck pass" in out


def test_cli_machine_format_deterministic(capsys):
    main(["--format", "machine", "cohomology", str(FIXTURES / "p2_fan.manifest")])
    first = capsys.readouterr().out
    main(["--format", "machine", "cohomology", str(FIXTURES / "p2_fan.manifest")])
    second = capsys.readouterr().out
    assert first == second
    assert first.splitlines() == ["betti 0 1", "betti 2 1", "betti 4 1"]


def test_cli_refine_matches_fixture(tmp_path, capsys):
    out_path = tmp_path / "p2.manifest"
    code = main(["refine", str(FIXTURES / "p2.fan"), "-o", str(out_path)])
    assert code == 0
    assert out_path.read_text() == (FIXTURES / "p2_fan.manifest").read_text()


def test_cli_stokes_counterexample(capsys):
    code = main(
        ["stokes", str(FIXTURES / "counterexample_2pi.form"), str(FIXTURES / "halfline.chart")]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "hypothesis violated" in out
    value_line = [l for l in out.splitlines() if l.startswith("value ")][0]
    assert abs(float(value_line.split()[1]) - 6.283185307) < 1e-6
    assert "violated 1" in out


def test_cli_stokes_admissible(capsys):
    code = main(
        ["stokes", str(FIXTURES / "admissible_closed.form"), str(FIXTURES / "halfline.chart")]
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "violated 0" in out


def test_cli_stokes_boundary(capsys):
    code = main(
        [
            "stokes",
            str(FIXTURES / "boundary_tube.form"),
            str(FIXTURES / "tube.chart"),
            "--boundary",
        ]
    )
    out = capsys.readouterr().out
    assert code == 0, out
    assert "violated 0" in out


def test_cli_stokes_refutation_exits_2(capsys):
    # admissible by the vanishing conditions but without complete support:
    # the check runs, reports the 2 pi residue, and exits 2 (refuted)
    code = main(
        [
            "stokes",
            str(FIXTURES / "noncompact_support.form"),
            str(FIXTURES / "interval.chart"),
        ]
    )
    out = capsys.readouterr().out
    assert code == 2
    assert "violated 0" in out
    value_line = [l for l in out.splitlines() if l.startswith("value ")][0]
    assert abs(float(value_line.split()[1]) - 6.283185307) < 1e-6


def test_cli_pair(capsys):
    code = main(["pair", str(FIXTURES / "interval.chart"), "1"])
    out = capsys.readouterr().out
    assert code == 0
    assert "pairing pass" in out


def test_cli_orient(capsys):
    code = main(["orient", str(FIXTURES / "axes.map")])
    out = capsys.readouterr().out
    assert code == 0
    assert "orientation -1" in out


def test_cli_error_exits(tmp_path, capsys):
    empty = tmp_path / "empty.manifest"
    empty.write_text("")
    code = main(["cohomology", str(empty)])
    assert code == 1
    missing = main(["cohomology", str(tmp_path / "nope.manifest")])
    assert missing == 1


def test_console_script_installed():
    proc = subprocess.run(
        [sys.executable, "-m", "explocoh.cli", "--version"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "explocoh" in proc.stdout
