"""End-to-end CLI tests: exit codes, pipeline consistency, determinism."""

import csv
import json
from pathlib import Path

import pytest

from mrio_footprint import algebra, fileio, model
from mrio_footprint.cli import main


@pytest.fixture()
def fixture_dir(tmp_path):
    out = tmp_path / "fx"
    assert main(["fixture", "--regions", "3", "--sectors", "5", "--seed", "7",
                 "--out", str(out)]) == 0
    return out


def run_footprint(fixture_dir: Path, out: Path, scenario: str = "baseline") -> int:
    return main([
        "footprint",
        "--layout", str(fixture_dir / "layout.json"),
        "--scenario", str(fixture_dir / "scenarios" / f"{scenario}.json"),
        "--params", str(fixture_dir / "params.json"),
        "--out", str(out),
    ])


def run_compare(fixture_dir: Path, out: Path, scenarios: list[str]) -> int:
    argv = ["compare", "--layout", str(fixture_dir / "layout.json"),
            "--params", str(fixture_dir / "params.json"), "--out", str(out)]
    for name in scenarios:
        argv += ["--scenario", str(fixture_dir / "scenarios" / f"{name}.json")]
    return main(argv)


def read_report(path: Path) -> list[dict]:
    with path.open(newline="") as handle:
        return list(csv.DictReader(handle))


def report_value(rows: list[dict], extension: str, dimension: str, label: str = "") -> float:
    for row in rows:
        if (row["extension"], row["dimension"], row["label"]) == (extension, dimension, label):
            return float(row["value"])
    raise KeyError((extension, dimension, label))


def tree_bytes(root: Path) -> dict:
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*")) if p.is_file()
    }


class TestValidate:
    def test_clean_fixture_exits_zero(self, fixture_dir, capsys):
        assert main(["validate", "--layout", str(fixture_dir / "layout.json")]) == 0
        out = capsys.readouterr().out
        assert "0 violation(s)" in out and "productive" in out

    def test_perturbed_fixture_exits_two_with_flagged_row(self, fixture_dir, tmp_path, capsys):
        account = fileio.ingest(fixture_dir / "layout.json").account
        Z = account.Z.copy()
        Z[2, 3] += 0.1 * account.x[2]
        broken = model.MrioAccount(index=account.index, Z=Z, Y=account.Y,
                                   y_columns=account.y_columns, x=account.x,
                                   extensions=account.extensions, year=account.year)
        layout_path = fileio.write_account(broken, tmp_path / "broken")
        assert main(["validate", "--layout", str(layout_path)]) == 2
        assert "row 2" in capsys.readouterr().out

    def test_missing_file_exits_one_with_path(self, tmp_path, capsys):
        missing = tmp_path / "nowhere" / "layout.json"
        assert main(["validate", "--layout", str(missing)]) == 1
        assert str(missing) in capsys.readouterr().err

    def test_machine_readable_output(self, fixture_dir, tmp_path):
        out = tmp_path / "report"
        assert main(["validate", "--layout", str(fixture_dir / "layout.json"),
                     "--out", str(out)]) == 0
        payload = json.loads((out / "validation.json").read_text())
        assert payload["balance"]["violations"] == []
        assert payload["productivity"]["productive"] is True


class TestFootprint:
    def test_identity_scenario_matches_library_computation(self, fixture_dir, tmp_path):
        assert run_footprint(fixture_dir, tmp_path / "out") == 0
        rows = read_report(tmp_path / "out" / "baseline" / "report.csv")

        account = fileio.ingest(fixture_dir / "layout.json").account
        op = algebra.factorize(algebra.technical_coefficients(account.Z, account.x))
        y = model.select_demand(account, model.consumption_selection("R0"))
        gfcf = model.select_demand(account, model.gfcf_selection("R0"))
        q = op.apply(y + gfcf)
        for name in ("labour", "energy", "emissions"):
            s = algebra.intensity(account.extensions[name].total_row(), account.x)
            expected = algebra.footprint_total(s, q)
            assert report_value(rows, name, "total") == expected

    def test_halved_scenario_halves_one_category(self, fixture_dir, tmp_path):
        assert run_footprint(fixture_dir, tmp_path / "base", "baseline") == 0
        assert run_footprint(fixture_dir, tmp_path / "half", "halved") == 0
        base = read_report(tmp_path / "base" / "baseline" / "report.csv")
        half = read_report(tmp_path / "half" / "halved" / "report.csv")

        halved_spec = json.loads(
            (fixture_dir / "scenarios" / "halved.json").read_text())
        halved_category = next(c for c, v in halved_spec["category_targets"].items()
                               if v is not None)
        for row in base:
            if row["extension"] != "labour" or row["dimension"] != "category":
                continue
            before = float(row["value"])
            after = report_value(half, "labour", "category", row["label"])
            if row["label"] == halved_category:
                assert after == pytest.approx(0.5 * before, rel=1e-9)
            elif row["label"] == "Gross fixed capital formation":
                assert after == pytest.approx(before, rel=1e-12)
            else:
                assert after == pytest.approx(before, rel=1e-12)

    def test_direct_use_scales_with_embedded(self, fixture_dir, tmp_path):
        assert run_footprint(fixture_dir, tmp_path / "base", "baseline") == 0
        assert run_footprint(fixture_dir, tmp_path / "half", "halved") == 0
        base = read_report(tmp_path / "base" / "baseline" / "report.csv")
        half = read_report(tmp_path / "half" / "halved" / "report.csv")
        ratio = (report_value(half, "energy", "total")
                 / report_value(base, "energy", "total"))
        assert report_value(half, "energy", "direct-use") == pytest.approx(
            ratio * report_value(base, "energy", "direct-use"), rel=1e-9)

    def test_material_variants_are_ordered(self, fixture_dir, tmp_path):
        assert run_footprint(fixture_dir, tmp_path / "out") == 0
        rows = read_report(tmp_path / "out" / "baseline" / "report.csv")
        tmc = report_value(rows, "material-tmc", "total")
        mf = report_value(rows, "material-mf", "total")
        assert 0.0 < mf < tmc

    def test_two_invocations_are_byte_identical(self, fixture_dir, tmp_path):
        assert run_footprint(fixture_dir, tmp_path / "a") == 0
        assert run_footprint(fixture_dir, tmp_path / "b") == 0
        assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")


class TestCompare:
    def test_self_comparison_has_zero_deltas(self, fixture_dir, tmp_path):
        assert run_compare(fixture_dir, tmp_path / "cmp", ["baseline", "baseline"]) == 0
        with (tmp_path / "cmp" / "comparison.csv").open(newline="") as handle:
            rows = list(csv.DictReader(handle))
        assert rows and all(float(r["delta_total"]) == 0.0 for r in rows)

    def test_deltas_match_report_subtraction(self, fixture_dir, tmp_path):
        assert run_compare(fixture_dir, tmp_path / "cmp", ["baseline", "halved"]) == 0
        base = read_report(tmp_path / "cmp" / "baseline" / "report.csv")
        half = read_report(tmp_path / "cmp" / "halved" / "report.csv")
        with (tmp_path / "cmp" / "comparison.csv").open(newline="") as handle:
            rows = [r for r in csv.DictReader(handle)
                    if r["extension"] == "labour" and r["scenario"] == "halved"]
        expected = (report_value(half, "labour", "total")
                    - report_value(base, "labour", "total"))
        assert float(rows[0]["delta_total"]) == pytest.approx(expected, rel=1e-12)

    def test_plot_segments_sum_to_report_totals(self, fixture_dir, tmp_path):
        assert run_compare(fixture_dir, tmp_path / "cmp", ["baseline", "halved"]) == 0
        reports = {
            name: read_report(tmp_path / "cmp" / name / "report.csv")
            for name in ("baseline", "halved")
        }
        params = json.loads((fixture_dir / "params.json").read_text())

        def plot_rows(figure: str) -> list[dict]:
            with (tmp_path / "cmp" / "plots" / f"{figure}.csv").open(newline="") as handle:
                return list(csv.DictReader(handle))

        for name, rows in reports.items():
            fig1 = [r for r in plot_rows("fig1") if r["scenario"] == name]
            total_week = report_value(rows, "labour", "hours-week-equivalent")
            assert sum(float(r["value"]) for r in fig1) == pytest.approx(
                total_week, rel=1e-9)

            fig3 = [r for r in plot_rows("fig3") if r["scenario"] == name]
            assert sum(float(r["value"]) for r in fig3) == pytest.approx(
                report_value(rows, "labour", "total"), rel=1e-9)
            assert sum(float(r["share"]) for r in fig3) == pytest.approx(100.0, rel=1e-9)

            fig5 = [r for r in plot_rows("fig5") if r["scenario"] == name
                    and r["extension"] == "energy"]
            expected = (report_value(rows, "energy", "total")
                        + report_value(rows, "energy", "direct-use"))
            assert sum(float(r["value"]) for r in fig5) == pytest.approx(
                expected / params["total_population"], rel=1e-9)

    def test_unknown_scenario_exits_one(self, fixture_dir, tmp_path, capsys):
        rc = main(["compare", "--layout", str(fixture_dir / "layout.json"),
                   "--params", str(fixture_dir / "params.json"),
                   "--out", str(tmp_path / "cmp"),
                   "--scenario", str(fixture_dir / "scenarios" / "absent.json")])
        assert rc == 1
        assert "absent.json" in capsys.readouterr().err

    def test_extension_selection(self, fixture_dir, tmp_path):
        rc = main(["compare", "--layout", str(fixture_dir / "layout.json"),
                   "--params", str(fixture_dir / "params.json"),
                   "--out", str(tmp_path / "cmp"),
                   "--scenario", str(fixture_dir / "scenarios" / "baseline.json"),
                   "--extensions", "labour"])
        assert rc == 0
        rows = read_report(tmp_path / "cmp" / "baseline" / "report.csv")
        assert {r["extension"] for r in rows} == {"labour"}


class TestFixtureCommand:
    def test_round_trips_through_validate(self, fixture_dir):
        assert main(["validate", "--layout", str(fixture_dir / "layout.json"),
                     "--tol", "1e-9"]) == 0

    def test_same_seed_is_byte_identical(self, tmp_path):
        for name in ("a", "b"):
            assert main(["fixture", "--regions", "2", "--sectors", "4", "--seed", "11",
                         "--out", str(tmp_path / name)]) == 0
        assert tree_bytes(tmp_path / "a") == tree_bytes(tmp_path / "b")

    def test_minimal_economy_end_to_end(self, tmp_path):
        fx = tmp_path / "fx"
        assert main(["fixture", "--regions", "1", "--sectors", "1", "--seed", "0",
                     "--out", str(fx)]) == 0
        assert main(["validate", "--layout", str(fx / "layout.json")]) == 0
        assert run_footprint(fx, tmp_path / "fp") == 0
        assert run_compare(fx, tmp_path / "cmp", ["baseline", "halved"]) == 0
