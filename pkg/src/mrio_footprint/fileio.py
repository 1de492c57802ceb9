"""Delimited-file ingest and emission for MRIO accounts.

The on-disk layout is a directory of delimited text files described by a
JSON layout descriptor: the transaction grid and final-demand block carry
two header rows (region, then sector/category) and two index columns;
extension files carry stressor-labelled rows under the same column headers.
All numbers are written with 17 significant digits so emitted files
round-trip to bit-identical doubles, and the writer is deterministic: the
same account always produces byte-identical files.

Labour conversion happens at ingest only: when a layout entry declares
``workers_per_unit``, stressor rows are multiplied by workers-per-unit times
hours-per-worker-year and the in-memory unit becomes hours. The writer
always emits post-conversion values, so written accounts re-ingest without
any further conversion.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, ParseError, UnitMismatch
from .fixtures import (
    fixture,
    fixture_category_concordance,
    fixture_conversion_params,
    fixture_sector_groups,
)
from .model import (
    ExtensionAccount,
    MrioAccount,
    RegionSectorIndex,
    consumption_selection,
    select_demand,
)
from .scenario import (
    CONSUMPTION_SPENDING_CATEGORIES,
    GFCF_CATEGORY,
    baseline_category_totals,
)

DEFAULT_HOURS_PER_WORKER_YEAR = 1840.0

_DELIMITERS = {"tab": "\t", "comma": ","}


def data_path(relative: str) -> Path:
    """Path to a packaged data file, e.g. data_path("scenarios/good-life.json")."""
    from importlib import resources

    return Path(str(resources.files("mrio_footprint"))) / "data" / relative


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


@dataclass(frozen=True)
class ExtensionEntry:
    """One extension file reference inside a layout descriptor."""

    name: str
    file: str
    unit: str
    kind: str | None = None
    direct_file: str | None = None
    workers_per_unit: float | None = None
    material_flags: dict[str, str] | None = None


@dataclass(frozen=True)
class IngestWarningSpec:
    """A known data quirk, keyed by (region, sector), surfaced at ingest."""

    region: str
    sector: str
    note: str


@dataclass(frozen=True)
class Layout:
    """Parsed layout descriptor; file paths are relative to ``base_dir``."""

    base_dir: Path
    delimiter: str
    year: int
    currency_unit: str
    transactions: str
    final_demand: str
    total_output: str
    extensions: tuple[ExtensionEntry, ...]
    hours_per_worker_year: float = DEFAULT_HOURS_PER_WORKER_YEAR
    ingest_warnings: tuple[IngestWarningSpec, ...] = ()

    def path(self, name: str) -> Path:
        return self.base_dir / name


def load_layout(path: str | Path) -> Layout:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid layout descriptor: {exc}", path=str(path)) from exc
    try:
        delimiter_name = raw.get("delimiter", "tab")
        if delimiter_name not in _DELIMITERS:
            raise ParseError(f"unknown delimiter {delimiter_name!r}", path=str(path))
        extensions = tuple(
            ExtensionEntry(
                name=str(e["name"]),
                file=str(e["file"]),
                unit=str(e.get("unit", "")),
                kind=e.get("kind"),
                direct_file=e.get("direct_file"),
                workers_per_unit=(None if e.get("workers_per_unit") is None
                                  else float(e["workers_per_unit"])),
                material_flags=e.get("material_flags"),
            )
            for e in raw.get("extensions", [])
        )
        warnings = tuple(
            IngestWarningSpec(region=str(w["region"]), sector=str(w["sector"]),
                              note=str(w.get("note", "")))
            for w in raw.get("ingest_warnings", [])
        )
        return Layout(
            base_dir=path.parent,
            delimiter=_DELIMITERS[delimiter_name],
            year=int(raw["year"]),
            currency_unit=str(raw.get("currency_unit", "")),
            transactions=str(raw["files"]["transactions"]),
            final_demand=str(raw["files"]["final_demand"]),
            total_output=str(raw["files"]["total_output"]),
            extensions=extensions,
            hours_per_worker_year=float(
                raw.get("hours_per_worker_year", DEFAULT_HOURS_PER_WORKER_YEAR)
            ),
            ingest_warnings=warnings,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"invalid layout descriptor: {exc}", path=str(path)) from exc


@dataclass(frozen=True)
class IngestWarning:
    region: str
    sector: str
    note: str


@dataclass(frozen=True)
class IngestResult:
    account: MrioAccount
    warnings: tuple[IngestWarning, ...] = ()


def _read_rows(path: Path, delimiter: str) -> list[list[str]]:
    try:
        with path.open(newline="", encoding="utf-8") as handle:
            return list(csv.reader(handle, delimiter=delimiter))
    except FileNotFoundError:
        raise
    except OSError as exc:
        raise ParseError(f"cannot read file: {exc}", path=str(path)) from exc


def _parse_values(cells: list[str], path: Path, lineno: int, first_col: int) -> np.ndarray:
    try:
        return np.array(cells, dtype=float)
    except ValueError:
        for offset, cell in enumerate(cells):
            try:
                float(cell)
            except ValueError:
                raise ParseError(f"non-numeric value {cell!r}", path=str(path),
                                 row=lineno, column=first_col + offset + 1) from None
        raise ParseError("malformed numeric row", path=str(path), row=lineno) from None


def _read_grid(path: Path, delimiter: str, index_cols: int, header_rows: int = 2):
    """Read a labelled grid: header rows, index columns, numeric body.

    Returns (headers, row_labels, matrix). Ragged rows are ParseErrors; the
    caller checks the resulting shape against the model dimension.
    """
    rows = _read_rows(path, delimiter)
    if len(rows) <= header_rows:
        raise ParseError("file has no data rows", path=str(path))
    headers = rows[:header_rows]
    width = len(headers[-1])
    labels: list[tuple[str, ...]] = []
    data: list[np.ndarray] = []
    for lineno, row in enumerate(rows[header_rows:], start=header_rows + 1):
        if not row:
            continue
        if len(row) != width:
            raise ParseError(
                f"expected {width} cells, found {len(row)}", path=str(path), row=lineno
            )
        labels.append(tuple(cell.strip() for cell in row[:index_cols]))
        data.append(_parse_values(row[index_cols:], path, lineno, index_cols))
    if not data:
        raise ParseError("file has no data rows", path=str(path))
    return headers, labels, np.vstack(data)


def _column_pairs(headers: list[list[str]], index_cols: int, path: Path):
    first, second = headers[0], headers[1]
    if len(first) != len(second):
        raise ParseError("header rows have different lengths", path=str(path), row=1)
    return [
        (first[i].strip(), second[i].strip())
        for i in range(index_cols, len(second))
    ]


def _index_from_labels(labels: list[tuple[str, ...]], path: Path) -> RegionSectorIndex:
    regions: list[str] = []
    for region, _ in labels:
        if region not in regions:
            regions.append(region)
    if not regions:
        raise ParseError("no region labels found", path=str(path))
    block = len(labels) // len(regions)
    sectors = [sector for _, sector in labels[:block]]
    expected = [(r, s) for r in regions for s in sectors]
    if expected != list(labels):
        raise ParseError(
            "row labels are not region-major blocks of a common sector list",
            path=str(path),
        )
    return RegionSectorIndex(regions=tuple(regions), sectors=tuple(sectors))


def ingest(layout: Layout | str | Path) -> IngestResult:
    """Read a full account from a layout descriptor.

    Known data quirks listed in the descriptor come back as warnings, never
    errors; structural problems raise ParseError / DimensionMismatch /
    UnitMismatch.
    """
    if not isinstance(layout, Layout):
        layout = load_layout(layout)
    delim = layout.delimiter

    z_path = layout.path(layout.transactions)
    z_headers, z_labels, Z = _read_grid(z_path, delim, index_cols=2)
    index = _index_from_labels(z_labels, z_path)
    if Z.shape != (index.n, index.n):
        raise DimensionMismatch(
            f"transaction grid is {Z.shape[0]}x{Z.shape[1]}, expected {index.n}x{index.n}"
        )
    if _column_pairs(z_headers, 2, z_path) != list(z_labels):
        raise ParseError("column labels do not match row labels", path=str(z_path))

    y_path = layout.path(layout.final_demand)
    y_headers, y_labels, Y = _read_grid(y_path, delim, index_cols=2)
    if list(y_labels) != index.labels():
        raise ParseError("final-demand rows do not match the transaction index",
                         path=str(y_path))
    y_columns = tuple(_column_pairs(y_headers, 2, y_path))

    x_path = layout.path(layout.total_output)
    _, x_labels, x_grid = _read_grid(x_path, delim, index_cols=2, header_rows=1)
    if list(x_labels) != index.labels():
        raise ParseError("total-output rows do not match the transaction index",
                         path=str(x_path))
    if x_grid.shape[1] != 1:
        raise ParseError("total-output file must have exactly one value column",
                         path=str(x_path))
    x = x_grid[:, 0]

    extensions: dict[str, ExtensionAccount] = {}
    for entry in layout.extensions:
        if not entry.unit:
            raise UnitMismatch(f"extension {entry.name!r} has no unit label in the layout")
        ext_path = layout.path(entry.file)
        ext_headers, ext_labels, rows = _read_grid(ext_path, delim, index_cols=1)
        if rows.shape[1] != index.n:
            raise DimensionMismatch(
                f"extension {entry.name!r} has {rows.shape[1]} columns, expected {index.n}"
            )
        if _column_pairs(ext_headers, 1, ext_path) != index.labels():
            raise ParseError("extension columns do not match the transaction index",
                             path=str(ext_path))
        unit = entry.unit
        if entry.workers_per_unit is not None:
            rows = rows * (entry.workers_per_unit * layout.hours_per_worker_year)
            unit = "hours"
        direct = None
        if entry.direct_file is not None:
            direct = _read_direct(layout.path(entry.direct_file), delim)
        extensions[entry.name] = ExtensionAccount(
            name=entry.name, unit=unit,
            stressors=tuple(label[0] for label in ext_labels),
            rows=rows, direct=direct, kind=entry.kind,
            material_flags=(dict(entry.material_flags)
                            if entry.material_flags is not None else None),
        )

    account = MrioAccount(index=index, Z=Z, Y=Y, y_columns=y_columns, x=x,
                          extensions=extensions, year=layout.year)
    warnings = tuple(
        IngestWarning(region=w.region, sector=w.sector, note=w.note)
        for w in layout.ingest_warnings
    )
    return IngestResult(account=account, warnings=warnings)


def _read_direct(path: Path, delimiter: str) -> dict[str, float]:
    rows = _read_rows(path, delimiter)
    direct: dict[str, float] = {}
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise ParseError(f"expected two cells, found {len(row)}",
                             path=str(path), row=lineno)
        try:
            direct[row[0].strip()] = float(row[1])
        except ValueError:
            raise ParseError(f"non-numeric value {row[1]!r}", path=str(path),
                             row=lineno, column=2) from None
    return direct


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------

def _writer(handle, delimiter: str):
    return csv.writer(handle, delimiter=delimiter, lineterminator="\n")


def _write_grid(path: Path, delimiter: str, headers: list[list[str]],
                labels: list[tuple[str, ...]], matrix: np.ndarray) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        out = _writer(handle, delimiter)
        for header in headers:
            out.writerow(header)
        for label, row in zip(labels, matrix):
            out.writerow(list(label) + [_fmt(v) for v in row])


def write_account(account: MrioAccount, out_dir: str | Path,
                  delimiter_name: str = "tab", currency_unit: str = "fixture units",
                  layout_name: str = "layout.json") -> Path:
    """Emit an account as an ingestible file set; returns the layout path.

    Values are written post-conversion (labour already in hours), so
    re-ingesting reproduces the account matrices exactly.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    delim = _DELIMITERS[delimiter_name]
    index = account.index
    pair_labels = index.labels()

    region_header = ["", ""] + [r for r, _ in pair_labels]
    sector_header = ["region", "sector"] + [s for _, s in pair_labels]
    _write_grid(out_dir / "z.tsv", delim, [region_header, sector_header],
                pair_labels, account.Z)

    y_region_header = ["", ""] + [r for r, _ in account.y_columns]
    y_category_header = ["region", "sector"] + [c for _, c in account.y_columns]
    _write_grid(out_dir / "y.tsv", delim, [y_region_header, y_category_header],
                pair_labels, account.Y)

    _write_grid(out_dir / "x.tsv", delim, [["region", "sector", "total_output"]],
                pair_labels, account.x[:, np.newaxis])

    entries = []
    for name in account.extensions:
        ext = account.extensions[name]
        filename = f"ext_{name}.tsv"
        ext_region_header = [""] + [r for r, _ in pair_labels]
        ext_sector_header = ["stressor"] + [s for _, s in pair_labels]
        _write_grid(out_dir / filename, delim, [ext_region_header, ext_sector_header],
                    [(label,) for label in ext.stressors], ext.rows)
        direct_file = None
        if ext.direct is not None:
            direct_file = f"direct_{name}.tsv"
            with (out_dir / direct_file).open("w", newline="", encoding="utf-8") as handle:
                out = _writer(handle, delim)
                out.writerow(["region", "value"])
                for region in index.regions:
                    out.writerow([region, _fmt(ext.direct.get(region, 0.0))])
        entry: dict = {"name": name, "file": filename, "unit": ext.unit}
        if ext.kind is not None:
            entry["kind"] = ext.kind
        if direct_file is not None:
            entry["direct_file"] = direct_file
        if ext.material_flags is not None:
            entry["material_flags"] = dict(ext.material_flags)
        entries.append(entry)

    descriptor = {
        "delimiter": delimiter_name,
        "year": account.year,
        "currency_unit": currency_unit,
        "hours_per_worker_year": DEFAULT_HOURS_PER_WORKER_YEAR,
        "files": {
            "transactions": "z.tsv",
            "final_demand": "y.tsv",
            "total_output": "x.tsv",
        },
        "extensions": entries,
    }
    layout_path = out_dir / layout_name
    layout_path.write_text(json.dumps(descriptor, indent=2) + "\n", encoding="utf-8")
    return layout_path


def write_fixture_set(n_regions: int, n_sectors: int, seed: int,
                      out_dir: str | Path) -> Path:
    """Write a complete runnable fixture: account files plus concordances,
    conversion params, and two scenario specs (identity and one halved
    category). Byte-identical for a given seed. Returns the layout path.
    """
    out_dir = Path(out_dir)
    account = fixture(n_regions, n_sectors, seed)
    layout_path = write_account(account, out_dir)
    index = account.index
    home_region = index.regions[0]

    concordance = fixture_category_concordance(index)
    with (out_dir / "category_concordance.tsv").open("w", newline="", encoding="utf-8") as handle:
        out = _writer(handle, "\t")
        for sector in index.sectors:
            out.writerow([sector, concordance.mapping[sector]])

    groups = fixture_sector_groups(index)
    with (out_dir / "sector_groups.tsv").open("w", newline="", encoding="utf-8") as handle:
        out = _writer(handle, "\t")
        for sector in index.sectors:
            out.writerow([sector, groups.mapping[sector]])

    params = fixture_conversion_params()
    (out_dir / "params.json").write_text(json.dumps({
        "working_age_population": params.working_age_population,
        "total_population": params.total_population,
        "weeks_worked_per_year": params.weeks_worked_per_year,
        "working_life_share": params.working_life_share,
    }, indent=2) + "\n", encoding="utf-8")

    scenario_dir = out_dir / "scenarios"
    scenario_dir.mkdir(exist_ok=True)

    baseline_spec = {
        "name": "baseline",
        "home_region": home_region,
        "category_targets": {category: None for category in CONSUMPTION_SPENDING_CATEGORIES}
        | {GFCF_CATEGORY: None},
    }
    (scenario_dir / "baseline.json").write_text(
        json.dumps(baseline_spec, indent=2) + "\n", encoding="utf-8")

    # Halve the category of the first sector, leave everything else alone.
    y_base = select_demand(account, consumption_selection(home_region))
    totals = baseline_category_totals(y_base, concordance, index)
    halved_category = concordance.mapping[index.sectors[0]]
    halved_targets: dict[str, float | None] = {
        category: None for category in CONSUMPTION_SPENDING_CATEGORIES
    }
    halved_targets[halved_category] = 0.5 * totals[halved_category]
    halved_spec = {
        "name": "halved",
        "home_region": home_region,
        "category_targets": halved_targets | {GFCF_CATEGORY: None},
    }
    (scenario_dir / "halved.json").write_text(
        json.dumps(halved_spec, indent=2) + "\n", encoding="utf-8")

    return layout_path
