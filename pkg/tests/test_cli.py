import json

import pytest

from topoqec.cli import main


def run_cli(args, capsys):
    code = main(args)
    out, err = capsys.readouterr()
    return code, out, err


class TestCodeInfo:
    def test_twisted_13_1_5(self, capsys):
        code, out, _ = run_cli(["code", "info", "--family", "twisted-xzzx",
                                "--L", "3", "--J", "2"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert (payload["N"], payload["K"], payload["D"]) == (13, 1, 5)
        assert payload["c"] == pytest.approx(1.923077)

    def test_toric_row(self, capsys):
        code, out, _ = run_cli(["code", "info", "--family", "toric",
                                "--L", "3"], capsys)
        payload = json.loads(out)
        assert (payload["N"], payload["K"], payload["D"]) == (18, 2, 3)
        assert payload["w_avg"] == 4 and payload["w_max"] == 4
        assert payload["c"] == 1

    def test_parameter_error_exits_nonzero(self, capsys):
        code, _, err = run_cli(["code", "info", "--family", "rotated-toric",
                                "--L", "3"], capsys)
        assert code == 2
        assert "even" in err

    def test_verify_flag(self, capsys):
        code, out, _ = run_cli(["code", "info", "--family", "rotated-surface",
                                "--L", "3", "--verify"], capsys)
        payload = json.loads(out)
        assert payload["rank_ok"] and payload["distance_ok"]

    def test_color4612_formula_only(self, capsys):
        code, out, _ = run_cli(["code", "info", "--family", "color4612",
                                "--D", "3"], capsys)
        assert json.loads(out)["N"] == 7


class TestExport:
    def test_round_trip(self, tmp_path, capsys):
        out_path = tmp_path / "code.pauli"
        code, _, _ = run_cli(["code", "export", "--family", "rotated-surface",
                              "--L", "3", "--out", str(out_path)], capsys)
        assert code == 0
        from topoqec.codes import build_rotated_surface
        from topoqec.pauli import parse_pauli_text
        assert parse_pauli_text(out_path.read_text()) == \
            build_rotated_surface(3).checks
        meta = json.loads((tmp_path / "code.pauli.json").read_text())
        assert meta["N"] == 9


class TestVerifyCommand:
    def test_verify_small_code(self, capsys):
        code, out, _ = run_cli(["code", "verify", "--family", "twisted-xzzx",
                                "--L", "2", "--J", "1"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["logicals_ok"] and payload["distance_ok"]


class TestDecode:
    def test_error_success(self, capsys):
        code, out, _ = run_cli(["decode", "--family", "twisted-xzzx",
                                "--L", "2", "--J", "1",
                                "--error", "XIIII"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["adjudication"] == "success"
        assert payload["converged"]

    def test_syndrome_zero(self, capsys):
        code, out, _ = run_cli(["decode", "--family", "twisted-xzzx",
                                "--L", "2", "--J", "1",
                                "--syndrome", "00000"], capsys)
        payload = json.loads(out)
        assert payload["estimate"] == "IIIII"

    def test_wrong_length_error(self, capsys):
        code, _, err = run_cli(["decode", "--family", "twisted-xzzx",
                                "--L", "2", "--J", "1",
                                "--error", "XII"], capsys)
        assert code == 2 and "length" in err

    def test_both_inputs_rejected(self, capsys):
        code, _, err = run_cli(["decode", "--family", "twisted-xzzx",
                                "--L", "2", "--J", "1", "--error", "XIIII",
                                "--syndrome", "00000"], capsys)
        assert code == 2


class TestSweepAndThreshold:
    def test_sweep_manifest_reproducible(self, tmp_path, capsys):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        code, _, _ = run_cli(
            ["sweep", "--families", "twisted-xzzx", "--sizes", "3",
             "--eps-start", "0.16", "--eps-stop", "0.17",
             "--eps-step", "0.01", "--target-errors", "10",
             "--max-trials", "20000", "--seed", "9",
             "--out", str(out1)], capsys)
        assert code == 0
        code, _, _ = run_cli(
            ["sweep", "--manifest", str(out1) + ".manifest.json",
             "--out", str(out2), "--threads", "2"], capsys)
        assert code == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_sweep_grid_validation(self, capsys, tmp_path):
        code, _, err = run_cli(
            ["sweep", "--families", "toric", "--sizes", "3",
             "--eps-start", "0.2", "--eps-stop", "0.1",
             "--out", str(tmp_path / "x.csv")], capsys)
        assert code == 2

    def test_threshold_roundtrip(self, tmp_path, capsys):
        import csv as csvmod
        import math
        path = tmp_path / "synth.csv"
        with open(path, "w", newline="") as fh:
            w = csvmod.writer(fh)
            w.writerow(["family", "D", "eps", "p_L"])
            for d, (a, b) in {3: (-3.0, 10.0),
                              5: (-5.0, 10.0 + 2.0 / 0.175)}.items():
                for eps in (0.15, 0.16, 0.17, 0.18, 0.19, 0.20):
                    w.writerow(["twisted_xzzx", d, eps,
                                math.exp(a + b * eps)])
        code, out, _ = run_cli(["threshold", "--in", str(path)], capsys)
        assert code == 0
        assert json.loads(out)["median"] == pytest.approx(0.175, abs=1e-9)

    def test_threshold_single_size_error(self, tmp_path, capsys):
        path = tmp_path / "one.csv"
        path.write_text("family,D,eps,p_L\ntoric,3,0.1,0.05\n")
        code, _, err = run_cli(["threshold", "--in", str(path)], capsys)
        assert code == 2
