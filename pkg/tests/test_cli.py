import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest

from scswalk.cli import EXIT_EXHAUSTED, EXIT_INVALID, EXIT_MISMATCH, EXIT_OK, main, parse_angle
from scswalk.runio import OUT_ENV, fmt


def latest(root: Path) -> Path:
    return root / (root / "latest").read_text().strip()


def run(root: Path, *argv) -> tuple[int, Path | None]:
    code = main([*argv, "--out", str(root)])
    return code, (latest(root) if (root / "latest").exists() else None)


def read_csv(path: Path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[float(x) for x in r] for r in rows[1:]]


def test_parse_angle():
    assert parse_angle("0.5") == 0.5
    assert parse_angle("pi/4") == pytest.approx(math.pi / 4)
    assert parse_angle("3*pi/64") == pytest.approx(3 * math.pi / 64)
    assert parse_angle("-pi") == pytest.approx(-math.pi)
    assert parse_angle("inf") == math.inf


def test_fmt_round_trips():
    for x in (math.pi, 1 / 3, 1e-17, 0.21548348403918485):
        assert float(fmt(x)) == x


@pytest.mark.parametrize("kind,expected", [("dtqw", 1), ("scs", 0)])
def test_spectrum(tmp_path, kind, expected):
    code, run_dir = run(tmp_path, "spectrum", "--kind", kind, "--theta", "pi/4", "--d", "31")
    assert code == EXIT_OK
    summary = json.loads((run_dir / "spectrum.json").read_text())
    assert summary["winding_number"] == expected
    header, rows = read_csv(run_dir / "spectrum.csv")
    assert header == ["k", "epsilon_plus", "epsilon_minus", "dx", "dy", "dz"]
    assert len(rows) == 31 and all(r[1] == -r[2] for r in rows)
    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert manifest["subcommand"] == "spectrum" and manifest["parameters"]["kind"] == kind
    assert {o["file"] for o in manifest["outputs"]} == {"spectrum.csv", "spectrum.json"}


def test_spectrum_optimised_bands_flatter(tmp_path):
    _, nominal = run(tmp_path / "a", "spectrum", "--kind", "scs")
    _, fitted = run(tmp_path / "b", "spectrum", "--kind", "scs", "--u1", "1.3650*pi/15.5", "--u2", "15.9462*pi/4")

    def spread(run_dir):
        _, rows = read_csv(run_dir / "spectrum.csv")
        eps = [r[1] for r in rows]
        return (max(eps) - min(eps)) / max(eps)

    assert spread(fitted) < 0.25 * spread(nominal)


def test_evolve_initial_only(tmp_path):
    code, run_dir = run(tmp_path, "evolve", "--steps", "0")
    assert code == EXIT_OK
    header, rows = read_csv(run_dir / "evolution.csv")
    assert header[:3] == ["step", "std", "negativity"] and header[3:] == [f"p_{n}" for n in range(31)]
    assert len(rows) == 1 and sum(rows[0][3:]) == pytest.approx(1.0)


def test_evolve_scs_reports_distance_to_dtqw(tmp_path):
    code, run_dir = run(tmp_path, "evolve", "--kind", "scs", "--steps", "12")
    assert code == EXIT_OK
    header, rows = read_csv(run_dir / "evolution.csv")
    h12 = rows[12][header.index("hellinger_to_dtqw")]
    assert h12 == pytest.approx(0.23, abs=0.03)


def test_optimize_theta_zero_and_determinism(tmp_path):
    args = ["optimize", "--theta", "0", "--multistarts", "2", "--l0", "20", "--steps", "30", "--seed", "7"]
    code, first = run(tmp_path / "a", *args)
    assert code == EXIT_OK
    result = json.loads((first / "optimization.json").read_text())
    assert result["objective"] < 1e-6 and result["schema"].startswith("scswalk.optimization-result/")
    code, second = run(tmp_path / "b", *args)
    assert (first / "optimization.json").read_bytes() == (second / "optimization.json").read_bytes()
    assert (first / "hellinger_series.csv").read_bytes() == (second / "hellinger_series.csv").read_bytes()
    header, rows = read_csv(first / "hellinger_series.csv")
    assert header == ["step", "hellinger"] and len(rows) == 30


def test_optimize_exhaustion_exit_code(tmp_path):
    code, run_dir = run(tmp_path, "optimize", "--multistarts", "1", "--max-evals", "3", "--l0", "5", "--steps", "5")
    assert code == EXIT_EXHAUSTED
    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert manifest["exhausted"] is True
    assert (run_dir / "optimization.json").exists()


def test_decohere_infinite_time_matches_evolve(tmp_path):
    _, ev = run(tmp_path / "e", "evolve", "--kind", "dtqw", "--steps", "15")
    code, de = run(tmp_path / "d", "decohere", "--kind", "both", "--t-dephase", "inf", "--steps", "15")
    assert code == EXIT_OK
    h_ev, rows_ev = read_csv(ev / "evolution.csv")
    h_de, rows_de = read_csv(de / "distributions_dtqw_Td-inf.csv")
    p_ev = np.array([r[3:] for r in rows_ev])
    p_de = np.array([r[2:] for r in rows_de])
    assert np.max(np.abs(p_ev - p_de)) <= 1e-9
    header, _ = read_csv(de / "hellinger.csv")
    assert header == ["step", "Td-inf"]


def test_decohere_transient_bump(tmp_path):
    code, run_dir = run(tmp_path, "decohere", "--t-dephase", "10", "--steps", "30")
    assert code == EXIT_OK
    _, rows = read_csv(run_dir / "hellinger.csv")
    h = [r[1] for r in rows]
    # distance first shrinks, then grows again for a few steps before decaying
    rises = [l for l in range(2, 12) if h[l] < h[l - 1] and h[l + 1] > h[l] + 0.005]
    assert rises, h[:13]


def test_decohere_cumulative_schedule(tmp_path):
    code, run_dir = run(tmp_path, "decohere", "--kind", "dtqw", "--t-dephase", "5",
                        "--lambda-schedule", "cumulative", "--steps", "5")
    assert code == EXIT_OK
    assert json.loads((run_dir / "manifest.json").read_text())["parameters"]["lambda_schedule"] == "cumulative"


def test_sweep_theta_small_grid(tmp_path):
    code, run_dir = run(tmp_path, "sweep-theta", "--grid-first", "1", "--grid-last", "2", "--grid-denom", "16",
                        "--multistarts", "1", "--max-evals", "40", "--l0", "5")
    assert code in (EXIT_OK, EXIT_EXHAUSTED)
    header, rows = read_csv(run_dir / "sweep.csv")
    assert header == ["theta", "theta_over_pi", "mean_hellinger"]
    assert [r[1] for r in rows] == pytest.approx([1 / 16, 2 / 16])
    assert all(0 <= r[2] <= 1 for r in rows)


def test_validation_errors(tmp_path):
    assert main(["evolve", "--d", "0", "--out", str(tmp_path)]) == EXIT_INVALID
    assert main(["optimize", "--l0", "0", "--out", str(tmp_path)]) == EXIT_INVALID
    assert main(["spectrum", "--theta", "3", "--out", str(tmp_path)]) == EXIT_INVALID
    with pytest.raises(SystemExit) as exc:
        main(["decohere", "--t-dephase", "-1", "--out", str(tmp_path)])
    assert exc.value.code == 2


def test_replay_is_byte_identical(tmp_path):
    _, run_dir = run(tmp_path / "orig", "evolve", "--kind", "scs", "--steps", "5")
    assert main(["replay", str(run_dir / "manifest.json"), "--out", str(tmp_path / "again")]) == EXIT_OK
    (run_dir / "manifest.json").write_text(
        (run_dir / "manifest.json").read_text().replace('"sha256": "', '"sha256": "0', 1)
    )
    assert main(["replay", str(run_dir / "manifest.json"), "--out", str(tmp_path / "third")]) == EXIT_MISMATCH


def test_output_root_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(OUT_ENV, str(tmp_path / "env-root"))
    assert main(["spectrum"]) == EXIT_OK
    assert (tmp_path / "env-root" / "latest").exists()
