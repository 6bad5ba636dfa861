import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from multient import cli
from multient.criteria import negativity_p13
from multient.gaussian import Covariance, covariance_from_json, validate_covariance
from multient.states import FourModeLinearParams, params_for_point, params_to_spec
from multient.sweep import SweepSpec, build_report, run_sweep, run_verify, write_csv


def write_json(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def tri_spec(tmp_path, g1=1.0, g2=1.0, z=1.0):
    return write_json(tmp_path / "tri.json", {"family": "tri", "g1": {"re": g1, "im": 0}, "g2": {"re": g2, "im": 0}, "z": z})


def sweep_csv(tmp_path, spec, name="out.csv", jobs=1):
    src = write_json(tmp_path / f"{name}.json", spec)
    out = tmp_path / name
    assert cli.main(["sweep", src, "--out", str(out), "--jobs", str(jobs)]) == 0
    return out


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestState:
    def test_tripartite(self, tmp_path, capsys):
        assert cli.main(["state", tri_spec(tmp_path)]) == 0
        cov = covariance_from_json(json.loads(capsys.readouterr().out))
        assert cov.n_modes == 3 and validate_covariance(cov).physical

    def test_linear_single_process(self, tmp_path, capsys):
        src = write_json(tmp_path / "l.json", {"family": "lin4", "g1": 1, "g2": 0, "z": 1})
        assert cli.main(["state", src]) == 0
        m = covariance_from_json(json.loads(capsys.readouterr().out)).matrix
        pair, rest = [0, 1, 4, 5], [2, 3, 6, 7]
        np.testing.assert_allclose(m[np.ix_(pair, rest)], 0, atol=1e-13)
        np.testing.assert_allclose(m[np.ix_(rest, rest)], np.eye(4), atol=1e-13)

    def test_out_file(self, tmp_path):
        out = tmp_path / "v.json"
        assert cli.main(["state", tri_spec(tmp_path), "--out", str(out)]) == 0
        assert json.loads(out.read_text())["ordering"] == "xxyy"

    def test_malformed(self, tmp_path, capsys):
        src = write_json(tmp_path / "bad.json", {"family": "tri", "g1": 1})
        assert cli.main(["state", src]) == 2
        assert "missing field" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert cli.main(["state", str(tmp_path / "nope.json")]) == 4

    def test_unphysical(self, tmp_path, monkeypatch):
        monkeypatch.setattr(cli, "build_state", lambda p: (Covariance(np.eye(6) / 2), None))
        assert cli.main(["state", tri_spec(tmp_path)]) == 3

    def test_usage_error(self):
        with pytest.raises(SystemExit) as info:
            cli.main(["state"])
        assert info.value.code == 2


class TestReport:
    def test_tripartite_all_entangled(self, tmp_path, capsys):
        g = 1 / math.sqrt(2)
        assert cli.main(["report", tri_spec(tmp_path, g, g)]) == 0
        rep = json.loads(capsys.readouterr().out)
        assert len(rep["partitions"]) == 3 and rep["genuine"]
        assert all(e["verdict"] == "entangled" for e in rep["partitions"])
        assert all(e["bound_violated"] for e in rep["partitions"])

    def test_linear_genuine(self, tmp_path, capsys):
        p = FourModeLinearParams.from_ratio(1.0, 0.2)
        assert cli.main(["report", write_json(tmp_path / "l.json", params_to_spec(p))]) == 0
        assert json.loads(capsys.readouterr().out)["genuine"] is True

    def test_square_separable_cut(self, tmp_path, capsys):
        src = write_json(tmp_path / "s.json", {"family": "sq4", "g_mag": 1.0, "phi_minus": math.pi / 2, "z": 1.0})
        assert cli.main(["report", src, "--partition", "P12"]) == 0
        rep = json.loads(capsys.readouterr().out)
        (entry,) = rep["partitions"]
        assert entry["label"] == "{1,2}" and entry["verdict"] == "undecided"
        assert entry["bound_violated"] is None and "genuine" not in rep and "note" in rep

    def test_complement_label_accepted(self, tmp_path, capsys):
        assert cli.main(["report", tri_spec(tmp_path), "--partition", "{2,3}"]) == 0
        assert json.loads(capsys.readouterr().out)["partitions"][0]["label"] == "{1}"

    @pytest.mark.parametrize("label", ["5", "{1,2,3}", "x"])
    def test_unknown_partition(self, tmp_path, label):
        assert cli.main(["report", tri_spec(tmp_path), "--partition", label]) == 2

    def test_numbers_keep_full_precision(self, tmp_path, capsys):
        cli.main(["report", tri_spec(tmp_path, 0.3, 0.7)])
        text = capsys.readouterr().out
        rep = json.loads(text)
        nu = rep["partitions"][1]["spectrum_pt"][-1]
        assert len(repr(nu).replace("0.", "").lstrip("0")) >= 12


class TestSweep:
    def test_header_and_order(self, tmp_path):
        out = sweep_csv(tmp_path, {"family": "tri", "resolution": 3})
        lines = out.read_text().splitlines()
        assert lines[0] == "family,x,y,partition,nu_product,log_negativity,bound_violated"
        rows = read_rows(out)
        assert len(rows) == 3 * 3 * 3
        keys = [(float(r["y"]), float(r["x"])) for r in rows[::3]]
        assert keys == sorted(keys)
        assert [r["partition"] for r in rows[:3]] == ["{1}", "{2}", "{3}"]

    def test_deterministic_across_runs_and_threads(self, tmp_path):
        spec = {"family": "lin4", "resolution": 6}
        a = sweep_csv(tmp_path, spec, "a.csv", jobs=1).read_bytes()
        b = sweep_csv(tmp_path, spec, "b.csv", jobs=4).read_bytes()
        c = sweep_csv(tmp_path, spec, "c.csv", jobs=1).read_bytes()
        assert a == b == c

    def test_unwritable(self, tmp_path):
        src = write_json(tmp_path / "s.json", {"family": "tri", "resolution": 2})
        assert cli.main(["sweep", src, "--out", str(tmp_path / "no" / "such" / "x.csv")]) == 4

    @pytest.mark.parametrize(
        "spec",
        [{"family": "hex"}, {"family": "tri", "resolution": 1}, {"family": "tri", "x_range": [0, 1]},
         {"family": "sq4", "x_range": [0, 3]}, {"family": "tri", "partitions": ["{4}"]},
         {"family": "tri", "outputs": ["pictures"]}],
    )
    def test_bad_specs(self, tmp_path, spec):
        src = write_json(tmp_path / "s.json", spec)
        assert cli.main(["sweep", src, "--out", str(tmp_path / "x.csv")]) == 2

    def test_axes(self):
        spec = SweepSpec.default("tri", 5)
        np.testing.assert_allclose(spec.x_grid(), [0.1, 10**-0.5, 1, 10**0.5, 10])
        np.testing.assert_allclose(spec.y_grid(), [0, 0.75, 1.5, 2.25, 3])
        assert SweepSpec.default("sq4", 3).x_grid()[-1] == pytest.approx(math.pi / 2)

    def test_partner_mode_column_matches_closed_form(self, tmp_path):
        out = sweep_csv(tmp_path, {"family": "tri", "resolution": 9, "partitions": ["{2}"]})
        for r in read_rows(out):
            x, y = float(r["x"]), float(r["y"])
            b = 1 + 2 * (math.sinh(y) / math.sqrt(1 + x * x)) ** 2
            nu = b - math.sqrt(b * b - 1)
            assert float(r["nu_product"]) == pytest.approx(nu if y > 0 else 1.0, abs=1e-9)

    def test_signal_idler_negativity_slope(self, tmp_path):
        out = sweep_csv(tmp_path, {"family": "lin4", "resolution": 7, "partitions": ["{1,3}"], "x_range": [0.1, 10]})
        rows = [r for r in read_rows(out) if float(r["x"]) == pytest.approx(1.0)]
        slope = 2 / math.log(2) * math.sqrt(5) / math.sqrt(2)
        for r in rows:
            assert float(r["log_negativity"]) == pytest.approx(slope * float(r["y"]), abs=1e-9)
            p = params_for_point("lin4", 1.0, float(r["y"]))
            assert float(r["log_negativity"]) == pytest.approx(negativity_p13(p), abs=1e-9)

    def test_square_14_cut_flat_in_phase(self, tmp_path):
        out = sweep_csv(tmp_path, {"family": "sq4", "resolution": 7, "partitions": ["P14"]})
        by_y = {}
        for r in read_rows(out):
            by_y.setdefault(r["y"], []).append(float(r["nu_product"]))
            assert r["bound_violated"] == ""
        for vals in by_y.values():
            np.testing.assert_allclose(vals, vals[0], rtol=1e-9)

    def test_nu_product_and_negativity_agree(self, tmp_path):
        for fam in ("tri", "lin4", "sq4"):
            for r in read_rows(sweep_csv(tmp_path, {"family": fam, "resolution": 4}, f"{fam}.csv")):
                nu, en = float(r["nu_product"]), float(r["log_negativity"])
                assert 0 < nu <= 1
                assert (nu == 1.0) == (en == 0.0)
                assert en == pytest.approx(-math.log2(nu), abs=1e-12)

    def test_resolution_three_equals_report(self):
        for fam in ("tri", "lin4", "sq4"):
            spec = SweepSpec.default(fam, 3)
            rows = run_sweep(spec)
            it = iter(rows)
            for y in spec.y_grid():
                for x in spec.x_grid():
                    rep = build_report(params_for_point(fam, x, y))
                    for entry in rep["partitions"]:
                        row = next(it)
                        assert row.partition == entry["label"]
                        assert row.nu_product == entry["nu_product"]
                        assert row.log_negativity == entry["log_negativity"]
                        assert row.bound_violated == entry["bound_violated"]

    def test_write_csv_to_buffer(self):
        buf = io.StringIO()
        write_csv(run_sweep(SweepSpec.default("sq4", 2)), buf)
        assert buf.getvalue().count("\n") == 1 + 4 * 7


class TestVerify:
    def test_coarse_passes(self, capsys):
        assert cli.main(["verify", "--grid", "coarse"]) == 0
        out = capsys.readouterr().out
        assert "all checks passed" in out and out.count("PASS") == 4

    def test_fault_is_named(self, capsys):
        assert cli.main(["verify", "--inject-fault", "squeeze-sign"]) == 1
        out = capsys.readouterr().out
        assert "FAIL oracle_vs_factory" in out and "FAILED:" in out

    def test_tight_tolerance_fails(self):
        checks = run_verify("coarse", tol=1e-18)
        assert not next(c for c in checks if c.name == "oracle_vs_factory").passed

    def test_unknown_grid(self):
        with pytest.raises(ValueError):
            run_verify("medium")

    def test_module_entry_point(self):
        res = subprocess.run([sys.executable, "-m", "multient", "verify"], capture_output=True, text=True)
        assert res.returncode == 0, res.stderr
