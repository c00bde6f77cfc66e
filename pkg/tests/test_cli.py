"""Command-line interface: flags, outputs, determinism, exit codes."""

import os
import subprocess
import sys

import pytest

from alpha_auctions.cli import main, _lambda_grid


def run_cli(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


class TestLambdaGrid:
    def test_basic(self):
        assert _lambda_grid("0:0.1:0.3") == [0.0, 0.1, 0.2, 0.3]

    def test_bad_grid_exits(self):
        with pytest.raises(SystemExit):
            _lambda_grid("0:0:1")
        with pytest.raises(SystemExit):
            _lambda_grid("nope")


class TestNash:
    def test_lb_small_game(self, capsys):
        code, out = run_cli(["nash", "--auction", "lb", "--vl", "4", "--vh", "8",
                             "--pmax", "8"], capsys)
        assert code == 0
        assert "pure_nash_count=3" in out
        for p in (2, 3, 4):
            assert f"pure_nash bid_l={p} bid_h={p}" in out

    def test_ab_strictness_reported(self, capsys):
        code, out = run_cli(["nash", "--auction", "ab", "--vl", "4", "--vh", "8",
                             "--pmax", "8"], capsys)
        assert code == 0
        assert "strictness=strict" in out


class TestSolveQre:
    def test_structure_flag_and_output(self, capsys, tmp_path):
        out_file = tmp_path / "profile.csv"
        code, out = run_cli(["solve-qre", "--auction", "wb", "--structure", "1A",
                             "--lam", "0.1", "--out", str(out_file)], capsys)
        assert code == 0
        assert "efficiency_pct=77." in out
        lines = out_file.read_text().splitlines()
        assert lines[0] == "bid,sigma_l,sigma_h"
        assert len(lines) == 162

    def test_unknown_flag_usage_error(self):
        proc = subprocess.run(
            [sys.executable, "-m", "alpha_auctions.cli", "solve-qre", "--bogus"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 2


class TestSweep:
    def test_csv_written_with_header(self, capsys, tmp_path):
        out_file = tmp_path / "sweep.csv"
        code, _ = run_cli(["sweep", "--auction", "ab", "--vl", "4", "--vh", "8",
                           "--pmax", "8", "--lam", "0:0.1:0.2", "--out", str(out_file)], capsys)
        assert code == 0
        lines = out_file.read_text().splitlines()
        assert lines[0].startswith("auction,alpha,gamma,v_l,v_h,p_max,lambda,efficiency_pct")
        assert len(lines) == 4

    def test_stdout_mode(self, capsys):
        code, out = run_cli(["sweep", "--auction", "wb", "--vl", "4", "--vh", "8",
                             "--pmax", "8", "--lam", "0:0.1:0.1"], capsys)
        assert code == 0
        assert out.splitlines()[1].startswith("WB,1,1,4,8,8,0,")


class TestSimulateAnalyzeReplay:
    def test_pipeline_and_byte_identity(self, capsys, tmp_path):
        sim_dir = tmp_path / "sim"
        code, out = run_cli(["simulate", "--auction", "wb", "--type", "4",
                             "--subjects", "4", "--periods", "3", "--seed", "7",
                             "--bots", "uniform", "--out-dir", str(sim_dir)], capsys)
        assert code == 0
        csv_path = next(p for p in sim_dir.iterdir() if p.suffix == ".csv")

        out_a = tmp_path / "a"
        code, _ = run_cli(["analyze", "--log", str(csv_path), "--out-dir", str(out_a)], capsys)
        assert code == 0
        assert (out_a / "summary.csv").exists()
        assert (out_a / "ventiles.csv").exists()
        assert (out_a / "clogit.txt").exists()

        code, out = run_cli(["replay", "--log", str(csv_path),
                             "--check-dir", str(out_a)], capsys)
        assert code == 0
        assert "byte-identical" in out

    def test_replay_detects_tampering(self, capsys, tmp_path):
        sim_dir = tmp_path / "sim"
        run_cli(["simulate", "--auction", "lb", "--type", "4", "--subjects", "4",
                 "--periods", "2", "--seed", "9", "--bots", "fixed:120",
                 "--out-dir", str(sim_dir)], capsys)
        csv_path = next(p for p in sim_dir.iterdir() if p.suffix == ".csv")
        out_a = tmp_path / "a"
        run_cli(["analyze", "--log", str(csv_path), "--out-dir", str(out_a)], capsys)
        (out_a / "summary.csv").write_text("tampered\n")
        code, _ = run_cli(["replay", "--log", str(csv_path),
                           "--check-dir", str(out_a)], capsys)
        assert code == 1

    def test_simulation_deterministic_across_runs(self, capsys, tmp_path):
        dirs = [tmp_path / "x", tmp_path / "y"]
        for d in dirs:
            run_cli(["simulate", "--auction", "ab", "--type", "2", "--subjects", "4",
                     "--periods", "2", "--seed", "31", "--bots", "qre:0.05",
                     "--out-dir", str(d)], capsys)
        files = sorted(p.name for p in dirs[0].iterdir())
        for name in files:
            assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()


class TestEeCheck:
    def test_small_wb_tail(self, capsys):
        code, out = run_cli(["ee-check", "--auction", "wb", "--vl", "4", "--vh", "8",
                             "--pmax", "8", "--lam", "0:0.1:0.3",
                             "--lambda-max", "200"], capsys)
        assert code == 0
        assert "tail_reached=True" in out
        assert "all_tail_statements_hold=True" in out

    def test_interior_auction_rejected(self, capsys):
        code, _ = run_cli(["ee-check", "--auction", "ab", "--vl", "4", "--vh", "8",
                           "--pmax", "8"], capsys)
        assert code == 2


class TestSolverExitCode:
    def test_non_convergence_exits_3(self, capsys):
        # an unreachable tolerance exhausts the iteration budget
        code = main(["solve-qre", "--auction", "lb", "--vl", "4", "--vh", "8",
                     "--pmax", "8", "--lam", "0.3", "--tol", "1e-18",
                     "--max-iter", "50"])
        capsys.readouterr()
        assert code == 3
