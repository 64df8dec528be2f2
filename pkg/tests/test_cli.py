import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from garsia_kit.cli import dumps, main
from garsia_kit.extremal import SECTION5_COLUMNS

DATA = Path(__file__).parent / "data"
GOLDEN = Path(__file__).parent / "golden"


def cli(*argv, env=None):
    """Run the installed module as a subprocess; returns (code, stdout, stderr)."""
    proc = subprocess.run(
        [sys.executable, "-m", "garsia_kit.cli", *map(str, argv)],
        capture_output=True,
        text=True,
        env=env,
    )
    return proc.returncode, proc.stdout, proc.stderr


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def _assert_csv_close(text, golden_path, tol=1e-12):
    got, want = _rows(text), _rows(golden_path.read_text())
    assert got[0] == want[0]
    assert len(got) == len(want)
    assert np.allclose(np.array(got[1:], dtype=float), np.array(want[1:], dtype=float), atol=tol, rtol=0)


def test_norm_identity_subprocess():
    code, out, _ = cli("norm", "--spec", DATA / "identity.json")
    assert code == 0
    d = json.loads(out)
    assert d["lower_bound"] == pytest.approx(1.0, abs=1e-9)
    assert d["attained"] == "Attained"
    assert d["argmax"]["r"] == pytest.approx(0.0, abs=1e-3)


def test_norm_trend_csv(capsys):
    code, out, _ = run(capsys, "norm", "--spec", DATA / "half_arc.json", "--format", "csv", "--assert")
    assert code == 0
    rows = _rows(out)
    assert rows[0] == ["r", "max_phi"]
    assert all(float(v) == pytest.approx(0.25, abs=1e-9) for _, v in rows[1:])


def test_section5_golden_and_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert cli("section5", "--k", 12, "--out", a)[0] == 0
    assert cli("section5", "--k", 12, "--out", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    rows = _rows(a.read_text())
    assert tuple(rows[0]) == SECTION5_COLUMNS
    assert len(rows) == 13
    assert b"\r" not in a.read_bytes()


def test_section5_small_golden(capsys):
    code, out, _ = run(capsys, "section5", "--k", 4)
    assert code == 0
    _assert_csv_close(out, GOLDEN / "section5_k4.csv")


def test_section5_assert_reports_failed_trends(capsys):
    code, out, err = run(capsys, "section5", "--k", 12, "--assert")
    # the stated P_eta and P(log 1/eta) trends do not hold for the default sequences
    assert code == 3
    assert "P_eta" in err
    assert out.startswith("k,P_eta")


def test_section5_json(capsys):
    code, out, _ = run(capsys, "section5", "--k", 3, "--format", "json")
    d = json.loads(out)
    assert code == 0 and len(d["rows"]) == 3
    assert set(d["trends"]) == set(SECTION5_COLUMNS[1:])


def test_phi_grid_csv_golden(capsys):
    code, out, _ = run(capsys, "phi-grid", "--spec", DATA / "half_arc.json", "--nr", 3, "--ntheta", 4)
    assert code == 0
    _assert_csv_close(out, GOLDEN / "phi_grid_half_arc.csv")


def test_phi_grid_svg(capsys):
    code, out, _ = run(
        capsys, "phi-grid", "--spec", DATA / "half_arc.json", "--nr", 3, "--ntheta", 4, "--format", "svg", "--assert"
    )
    assert code == 0
    assert out.startswith("<svg") and out.rstrip().endswith("</svg>")
    assert out.count("<polygon") == 12
    assert "Phi min 0.016053665278536" in out and "max 0.25" in out
    golden = (GOLDEN / "phi_grid_half_arc.svg").read_text()
    assert out.splitlines()[:3] == golden.splitlines()[:3]


def test_identities_assert_passes(capsys):
    code, out, _ = run(
        capsys, "identities", "--inner", DATA / "blaschke.json", "--outer", DATA / "halfplus.json", "--assert", "--tol", "1e-8"
    )
    assert code == 0
    res = json.loads(out)["residuals"]
    assert set(res) == {"inner_identity", "product_identity", "parallelogram"}
    assert max(res.values()) <= 1e-8


def test_identities_assert_fails_on_tiny_tolerance(capsys):
    code, _, err = run(
        capsys, "identities", "--inner", DATA / "blaschke.json", "--outer", DATA / "product.json", "--assert", "--tol", "0"
    )
    assert code in (0, 3)
    if code == 3:
        assert "residuals above" in err


def test_extremal_check(capsys):
    code, out, _ = run(capsys, "extremal-check", "--outer", DATA / "halfplus.json", "--inner", DATA / "blaschke.json")
    d = json.loads(out)
    assert code == 0
    assert d["product_witness"]["verdict"] == "NoEvidence"
    assert d["disk_algebra"] is False
    code, _, err = run(
        capsys, "extremal-check", "--outer", DATA / "halfplus.json", "--inner", DATA / "blaschke.json", "--assert"
    )
    assert code == 3 and "Extremal-evidence" in err


def test_build_blaschke(capsys):
    code, out, _ = run(capsys, "build-blaschke", "--spec", DATA / "halfplus.json", "--k", 6, "--assert")
    d = json.loads(out)
    assert code == 0
    assert len(d["zeros"]) == 6
    assert d["max_residual"] <= 1e-8


def test_lipschitz(capsys):
    code, out, _ = run(capsys, "lipschitz", "--spec", DATA / "identity.json", "--alpha", 0.25, "--assert")
    d = json.loads(out)
    assert code == 0
    assert d["lower_bound"] == pytest.approx((4 / 3) ** 0.5 * (2 / 3) ** 0.25, abs=1e-6)


@pytest.mark.slow
def test_probe_extreme_csv(capsys):
    code, out, _ = run(capsys, "probe-extreme", "--spec", DATA / "minus_z.json", "--assert")
    rows = _rows(out)
    assert code == 0
    assert rows[0] == ["index", "norm_plus", "norm_minus", "margin", "oscillation", "violation"]
    assert [r[-1] for r in rows[1:]] == ["false", "false"]


@pytest.mark.slow
def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--spec", DATA / "halfplus.json", "--assert")
    assert code == 0
    assert json.loads(out)["valid"] is True


@pytest.mark.parametrize("name", ["identity.json", "product.json", "blaschke.json", "singular.json"])
def test_echo_spec_is_canonical(capsys, name):
    code, out, _ = run(capsys, "norm", "--spec", DATA / name, "--echo-spec")
    assert code == 0
    canon = out.strip()
    assert canon == json.dumps(json.loads(canon), sort_keys=True, separators=(",", ":"))
    (DATA.parent / "_echo.json").write_text(canon)
    try:
        code2, out2, _ = run(capsys, "norm", "--spec", DATA.parent / "_echo.json", "--echo-spec")
    finally:
        (DATA.parent / "_echo.json").unlink()
    assert out2.strip() == canon


@pytest.mark.parametrize(
    "argv, fragment",
    [
        (["norm", "--spec", DATA / "bad_zero.json"], "$.factors[0].zeros[0]"),
        (["norm", "--spec", DATA / "truncated.json"], "invalid JSON"),
        (["norm", "--spec", DATA / "missing.json"], "cannot read spec"),
        (["norm"], "requires --spec"),
        (["norm", "--spec", DATA / "identity.json", "--format", "svg"], "--format"),
        (["lipschitz", "--spec", DATA / "identity.json", "--alpha", 0.7], "alpha"),
        (["phi-grid", "--spec", DATA / "identity.json", "--rmax", 1.5], "--rmax"),
        (["norm", "--spec", DATA / "identity.json", "--grid", 40], "log2_n"),
    ],
)
def test_input_errors_exit_2(capsys, argv, fragment):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert fragment in err
    assert out == ""


def test_usage_errors_exit_2(capsys):
    assert run(capsys)[0] == 2
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "lipschitz", "--spec", DATA / "identity.json")[0] == 2


def test_help_exits_0(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0
    for name in ("phi-grid", "norm", "identities", "extremal-check", "section5", "lipschitz"):
        assert name in out


def test_dumps_is_deterministic_and_valid():
    obj = {"b": [1.0, 0.1, np.float64(1 / 3)], "a": {"z": True, "y": None, "x": float("inf")}, "c": np.int64(3)}
    text = dumps(obj)
    assert text == dumps(obj)
    d = json.loads(text)
    assert list(d) == ["a", "b", "c"]
    assert d["b"][2] == 1 / 3
    assert d["a"]["x"] == "inf"
    assert "0.10000000000000001" in text


def test_console_script_matches_module(tmp_path):
    import shutil

    exe = shutil.which("garsia-kit")
    if exe is None:
        pytest.skip("console script not installed")
    out = subprocess.run([exe, "section5", "--k", "4"], capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout == cli("section5", "--k", 4)[1]
