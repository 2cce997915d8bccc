import logging

from mfswipt import bundled_scenario_path
from mfswipt.cli import (
    EXIT_BAD_INPUT,
    EXIT_INFEASIBLE,
    EXIT_OK,
    main,
)

BUNDLED = str(bundled_scenario_path())


def read_table(path):
    lines = path.read_text().splitlines()
    comments = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    header = body[0].split(",")
    rows = [dict(zip(header, ln.split(","))) for ln in body[1:]]
    return comments, header, rows


class TestCheck:
    def test_bundled_scenario_validates(self, capsys):
        assert main(["check", BUNDLED]) == EXIT_OK
        out = capsys.readouterr().out
        assert "N=256" in out and "hash=" in out

    def test_missing_file(self, capsys):
        assert main(["check", "/nonexistent.scenario"]) == EXIT_BAD_INPUT

    def test_invalid_scenario(self, tmp_path, capsys):
        bad = tmp_path / "bad.scenario"
        bad.write_text("array: {n_antennas: 64, f_GHz: 30.0}\nbogus_key: 1\n")
        assert main(["check", str(bad)]) == EXIT_BAD_INPUT
        assert "bogus_key" in capsys.readouterr().err


class TestSolve:
    def test_proposed_on_bundled(self, tmp_path):
        out = tmp_path / "row.csv"
        assert main(["solve", BUNDLED, "--scheme", "proposed", "--output", str(out)]) == EXIT_OK
        comments, header, rows = read_table(out)
        assert comments and "scenario_sha256=" in comments[0]
        row = next(r for r in rows if not r["sweep_var"].startswith("#"))
        assert row["status"] == "Optimal"
        assert float(row["sum_rate_bpshz"]) >= 5.0 - 1e-5
        assert row["scheduled_mask"]
        text = out.read_text()
        assert "# allocation_W:" in text
        alloc = [float(v) for v in text.rsplit("allocation_W:", 1)[1].split()]
        assert len(alloc) == 5 and sum(alloc) <= 1.0 + 1e-7

    def test_equal_split_infeasible_floor(self, tmp_path):
        scenario = tmp_path / "hard.scenario"
        scenario.write_text(
            bundled_scenario_path().read_text().replace("R_bpshz: 5.0", "R_bpshz: 9.0")
        )
        out = tmp_path / "row.csv"
        code = main(["solve", str(scenario), "--scheme", "as_epa", "--output", str(out)])
        assert code == EXIT_INFEASIBLE
        _, _, rows = read_table(out)
        assert rows[0]["status"] == "Infeasible"
        assert rows[0]["objective_W"] == ""

    def test_exhaustive_logs_every_schedule(self, tmp_path, caplog):
        out = tmp_path / "row.csv"
        with caplog.at_level(logging.DEBUG, logger="mfswipt.solvers"):
            assert (
                main(["solve", BUNDLED, "--scheme", "exhaustive", "--output", str(out)])
                == EXIT_OK
            )
        logged = [rec for rec in caplog.records if rec.message.startswith("schedule ")]
        assert len(logged) == 32  # 2^5 schedules examined (solved or skipped)

    def test_wall_time_flag(self, tmp_path):
        out = tmp_path / "row.csv"
        assert main(["solve", BUNDLED, "--scheme", "as_epa", "--output", str(out)]) == EXIT_OK
        _, _, rows = read_table(out)
        assert rows[0]["wall_ms"] == ""
        assert (
            main(["solve", BUNDLED, "--scheme", "as_epa", "--output", str(out), "--timing"])
            == EXIT_OK
        )
        _, _, rows = read_table(out)
        assert rows[0]["wall_ms"] != ""


class TestSweep:
    def test_budget_sweep_cardinality(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(
            [
                "sweep",
                BUNDLED,
                "--variable",
                "P0_dBm",
                "--grid",
                "20,24,28",
                "--schemes",
                "proposed,as_epa",
                "--output",
                str(out),
            ]
        )
        assert code == EXIT_OK
        comments, header, rows = read_table(out)
        assert header[0] == "sweep_var" and header[-1] == "seed"
        assert len(rows) == 6

    def test_byte_identical_reruns(self, tmp_path):
        args = [
            "sweep",
            BUNDLED,
            "--variable",
            "R",
            "--grid",
            "2,4",
            "--schemes",
            "proposed,gs_opa",
            "--seed",
            "3",
        ]
        out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert main(args + ["--output", str(out1)]) == EXIT_OK
        assert main(args + ["--output", str(out2)]) == EXIT_OK
        assert out1.read_bytes() == out2.read_bytes()

    def test_all_rows_infeasible_exit(self, tmp_path):
        out = tmp_path / "sweep.csv"
        code = main(
            [
                "sweep",
                BUNDLED,
                "--variable",
                "R",
                "--grid",
                "14,15",
                "--schemes",
                "proposed",
                "--output",
                str(out),
            ]
        )
        assert code == EXIT_INFEASIBLE


class TestCorrelate:
    def test_writes_matrices_and_error_grid(self, tmp_path):
        prefix = tmp_path / "corr"
        code = main(
            ["correlate", BUNDLED, "--output-prefix", str(prefix), "--grid-points", "6"]
        )
        assert code == EXIT_OK
        matrices = (tmp_path / "corr_matrices.csv").read_text().splitlines()
        assert matrices[0] == "matrix,row,col,value"
        assert len(matrices) == 1 + 2 * 5 * 5
        grid = (tmp_path / "corr_error_grid.csv").read_text().splitlines()
        assert grid[0] == "theta,r_m,exact,approx,abs_err"
        assert len(grid) == 1 + 36
        worst = max(float(ln.split(",")[-1]) for ln in grid[1:] if ln.split(",")[-1])
        assert worst <= 0.05
