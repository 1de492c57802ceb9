"""Reported indicators built on raw footprints.

Turns footprint vectors into presentable results: hours-per-week
equivalents, per-capita values, and disaggregations by origin (domestic vs
imported), sector group, skill level, and spending category, plus the
used/unused material variants and proportional direct-use scaling.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import algebra
from .algebra import IntensityVector, LeontiefOperator
from .errors import (
    MissingStressorLabel,
    ParseError,
    UnflaggedStressor,
    UnitMismatch,
    UnmappedSector,
    ZeroEmbeddedBase,
)
from .model import ExtensionAccount, MrioAccount, RegionSectorIndex
from .scenario import SPENDING_CATEGORIES

# Calendar weeks per average year, used to annualise average weekly hours.
CALENDAR_WEEKS_PER_YEAR = 365.25 / 7  # ~52.18

# Default working pattern: statutory leave leaves ~46.6 working weeks per
# year, and people are assumed to work 80% of their working-age years.
DEFAULT_WEEKS_WORKED_PER_YEAR = 46.6
DEFAULT_WORKING_LIFE_SHARE = 0.8

SKILL_LEVELS = ("low", "medium", "high")

MATERIAL_USED = "used"
MATERIAL_UNUSED = "unused"

_SKILL_PATTERN = re.compile(r"\b(low|medium|high)\b", re.IGNORECASE)


@dataclass(frozen=True)
class ConversionParams:
    """Population and working-pattern constants for labour conversions."""

    working_age_population: float
    total_population: float
    weeks_worked_per_year: float = DEFAULT_WEEKS_WORKED_PER_YEAR
    working_life_share: float = DEFAULT_WORKING_LIFE_SHARE

    def __post_init__(self):
        if not 0.0 < self.weeks_worked_per_year <= 52.2:
            raise ValueError(
                f"weeks_worked_per_year must be in (0, 52.2], got {self.weeks_worked_per_year}"
            )
        if not 0.0 < self.working_life_share <= 1.0:
            raise ValueError(
                f"working_life_share must be in (0, 1], got {self.working_life_share}"
            )
        if self.working_age_population <= 0 or self.total_population <= 0:
            raise ValueError("populations must be positive")


def load_conversion_params(path: str | Path) -> ConversionParams:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        return ConversionParams(
            working_age_population=float(raw["working_age_population"]),
            total_population=float(raw["total_population"]),
            weeks_worked_per_year=float(
                raw.get("weeks_worked_per_year", DEFAULT_WEEKS_WORKED_PER_YEAR)
            ),
            working_life_share=float(
                raw.get("working_life_share", DEFAULT_WORKING_LIFE_SHARE)
            ),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"invalid conversion params: {exc}", path=str(path)) from exc


def annual_hours_from_weekly(average_weekly_hours: float,
                             calendar_weeks: float = CALENDAR_WEEKS_PER_YEAR) -> float:
    """Annual hours per person implied by an average over calendar weeks."""
    return average_weekly_hours * calendar_weeks


def hours_per_week_equivalent(total_annual_hours: float, params: ConversionParams) -> float:
    """Spread total annual labour over the working-age population.

    H = total / (weeks worked per year x working-age population x share of
    working years actually worked). Linear in the total, so alternate
    conventions are a multiplication away.
    """
    denominator = (params.weeks_worked_per_year
                   * params.working_age_population
                   * params.working_life_share)
    return total_annual_hours / denominator


def per_capita(total: float, population: float) -> float:
    if population <= 0:
        raise ValueError(f"population must be positive, got {population}")
    return total / population


@dataclass(frozen=True)
class OriginSplit:
    domestic: float
    imported: float

    @property
    def total(self) -> float:
        return self.domestic + self.imported

    @property
    def import_share(self) -> float:
        return self.imported / self.total if self.total else 0.0


def split_origin(by_source: np.ndarray, home_region: str,
                 index: RegionSectorIndex) -> OriginSplit:
    """Split per-source contributions into home-region vs everywhere else."""
    values = np.asarray(by_source, dtype=float)
    home = index.region_slice(home_region)
    domestic = float(values[home].sum())
    return OriginSplit(domestic=domestic, imported=float(values.sum()) - domestic)


@dataclass(frozen=True)
class SectorGroupConcordance:
    """Total mapping from sector names to a small set of group labels.

    ``groups`` fixes the reporting order; every sector must be mapped.
    """

    mapping: dict[str, str]
    groups: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "mapping", dict(self.mapping))
        object.__setattr__(self, "groups", tuple(self.groups))
        known = set(self.groups)
        for sector, group in self.mapping.items():
            if group not in known:
                raise ValueError(f"sector {sector!r} mapped to unlisted group {group!r}")

    @classmethod
    def from_mapping(cls, mapping: dict[str, str]) -> "SectorGroupConcordance":
        ordered: dict[str, None] = {}
        for group in mapping.values():
            ordered.setdefault(group)
        return cls(mapping=mapping, groups=tuple(ordered))


def aggregate_by_sector_group(by_source: np.ndarray, groups: SectorGroupConcordance,
                              index: RegionSectorIndex) -> dict[str, float]:
    """Sum per-source contributions into sector groups (totals are preserved)."""
    values = np.asarray(by_source, dtype=float)
    totals = {group: 0.0 for group in groups.groups}
    for flat, (_, sector) in enumerate(index.labels()):
        group = groups.mapping.get(sector)
        if group is None:
            raise UnmappedSector(f"sector {sector!r} has no sector group")
        totals[group] += float(values[flat])
    return totals


def skill_of(stressor_label: str) -> str:
    """Extract the skill level encoded in a labour stressor label."""
    match = _SKILL_PATTERN.search(stressor_label)
    if match is None:
        raise MissingStressorLabel(
            f"labour stressor {stressor_label!r} does not name a skill level"
        )
    return match.group(1).lower()


def aggregate_by_skill(labour_by_stressor: dict[str, float]) -> dict[str, float]:
    """Sum gender x skill stressor totals into low/medium/high hours."""
    totals = {skill: 0.0 for skill in SKILL_LEVELS}
    for label, value in labour_by_stressor.items():
        totals[skill_of(label)] += value
    return totals


def attribute_by_category(s: IntensityVector | np.ndarray, operator: LeontiefOperator,
                          demand_by_category: dict[str, np.ndarray]) -> dict[str, float]:
    """Footprint carried by each spending category's share of demand.

    One solve per category against a shared factorization; by linearity the
    attributions sum to the footprint of the whole demand vector.
    """
    return {
        category: algebra.footprint_total(s, operator.apply(y_c))
        for category, y_c in demand_by_category.items()
    }


def decompose_demand_by_category(y: np.ndarray, gfcf: np.ndarray, concordance,
                                 index: RegionSectorIndex) -> dict[str, np.ndarray]:
    """Partition demand into the 13 categories (capital formation last).

    The pieces sum to y + gfcf elementwise exactly, so category attributions
    reproduce whole-vector footprints up to solver tolerance.
    """
    yv = np.asarray(y, dtype=float)
    parts = {category: np.zeros(index.n) for category in SPENDING_CATEGORIES}
    for flat, (_, sector) in enumerate(index.labels()):
        category = concordance.category_of(sector)
        if category is not None:
            parts[category][flat] = yv[flat]
    parts[SPENDING_CATEGORIES[-1]] = np.asarray(gfcf, dtype=float).copy()
    return parts


def direct_use_scaled(direct_base: float, embedded_scenario: float,
                      embedded_base: float) -> float:
    """Scale direct use proportionally with the embedded footprint change."""
    if embedded_base <= 0:
        raise ZeroEmbeddedBase(
            f"cannot scale direct use against embedded baseline {embedded_base}"
        )
    return direct_base * (embedded_scenario / embedded_base)


@dataclass(frozen=True)
class MaterialTotals:
    """Material footprint variants: with and without unused extraction."""

    tmc: float
    mf: float


def material_indicators(material_by_stressor: dict[str, float],
                        flags: dict[str, str]) -> MaterialTotals:
    """Total material consumption (used + unused) and material footprint (used)."""
    used = 0.0
    unused = 0.0
    for label, value in material_by_stressor.items():
        flag = flags.get(label)
        if flag == MATERIAL_USED:
            used += value
        elif flag == MATERIAL_UNUSED:
            unused += value
        else:
            raise UnflaggedStressor(f"material stressor {label!r} is not flagged used/unused")
    return MaterialTotals(tmc=used + unused, mf=used)


@dataclass(frozen=True)
class FootprintReport:
    """One extension's footprint for one scenario, fully disaggregated.

    ``total`` is the embedded footprint (domestic + imported); direct use is
    carried separately and never mixed into the embedded disaggregations.
    ``hours_week_equivalent`` and ``by_skill`` are labour-only;
    ``direct_use`` applies to energy and emissions only.
    """

    scenario: str
    extension_name: str
    unit: str
    home_region: str
    total: float
    per_capita: float
    by_origin: OriginSplit
    by_sector_group: dict[str, float]
    by_category: dict[str, float]
    params: ConversionParams
    hours_week_equivalent: float | None = None
    by_skill: dict[str, float] | None = None
    by_stressor: dict[str, float] | None = None
    direct_use: float | None = None

    @property
    def total_with_direct(self) -> float:
        """Embedded plus direct use, the quantity displayed for resources."""
        return self.total + (self.direct_use or 0.0)


def build_footprint_report(account: MrioAccount, operator: LeontiefOperator,
                           extension: ExtensionAccount,
                           demand_by_category: dict[str, np.ndarray],
                           home_region: str, groups: SectorGroupConcordance,
                           params: ConversionParams, scenario_name: str,
                           stressor_subset: tuple[str, ...] | None = None,
                           baseline_embedded: float | None = None,
                           report_name: str | None = None) -> FootprintReport:
    """Compute a full report for one extension and one scenario demand.

    ``stressor_subset`` restricts the extension rows (used for the
    material-footprint variant). ``baseline_embedded`` enables direct-use
    scaling: scenario direct use = base direct x embedded/baseline-embedded.
    """
    labels = extension.stressors if stressor_subset is None else tuple(stressor_subset)
    rows = np.vstack([extension.stressor_row(label) for label in labels])
    s_rows = [
        algebra.intensity(row, account.x, extension_name=extension.name, unit=extension.unit)
        for row in rows
    ]
    s_total = algebra.intensity(rows.sum(axis=0), account.x,
                                extension_name=extension.name, unit=extension.unit)

    y_full = np.zeros(account.index.n)
    for part in demand_by_category.values():
        y_full += part
    q = operator.apply(y_full)

    total = algebra.footprint_total(s_total, q)
    by_source = algebra.footprint_by_source(s_total, q)
    by_stressor = {
        label: algebra.footprint_total(s_k, q) for label, s_k in zip(labels, s_rows)
    }

    by_skill = None
    hours_week = None
    if extension.kind == "labour":
        by_skill = aggregate_by_skill(by_stressor)
        hours_week = hours_per_week_equivalent(total, params)

    direct = None
    if extension.direct is not None and extension.kind in ("energy", "emissions"):
        base_direct = float(extension.direct.get(home_region, 0.0))
        if baseline_embedded is None:
            direct = base_direct
        else:
            direct = direct_use_scaled(base_direct, total, baseline_embedded)

    return FootprintReport(
        scenario=scenario_name,
        extension_name=report_name or extension.name,
        unit=extension.unit,
        home_region=home_region,
        total=total,
        per_capita=per_capita(total, params.total_population),
        by_origin=split_origin(by_source, home_region, account.index),
        by_sector_group=aggregate_by_sector_group(by_source, groups, account.index),
        by_category=attribute_by_category(s_total, operator, demand_by_category),
        params=params,
        hours_week_equivalent=hours_week,
        by_skill=by_skill,
        by_stressor=by_stressor,
        direct_use=direct,
    )


@dataclass(frozen=True)
class ComparisonRow:
    scenario: str
    total: float
    per_capita: float
    domestic: float
    imported: float
    import_share: float
    delta_total: float
    delta_per_capita: float
    hours_week_equivalent: float | None = None
    direct_use: float | None = None


def compare_reports(reports: list[FootprintReport]) -> list[ComparisonRow]:
    """Align reports of one extension into rows with deltas vs the first.

    Report order is preserved; the first report is the comparison base.
    """
    if not reports:
        return []
    first = reports[0]
    for report in reports[1:]:
        if report.extension_name != first.extension_name or report.unit != first.unit:
            raise UnitMismatch(
                f"cannot compare {report.extension_name!r} [{report.unit}] "
                f"against {first.extension_name!r} [{first.unit}]"
            )
    rows = []
    for report in reports:
        rows.append(ComparisonRow(
            scenario=report.scenario,
            total=report.total,
            per_capita=report.per_capita,
            domestic=report.by_origin.domestic,
            imported=report.by_origin.imported,
            import_share=report.by_origin.import_share,
            delta_total=report.total - first.total,
            delta_per_capita=report.per_capita - first.per_capita,
            hours_week_equivalent=report.hours_week_equivalent,
            direct_use=report.direct_use,
        ))
    return rows
