"""Low-consumption scenario construction and final-demand scaling.

A scenario is a set of annual national spending targets over 13 fixed
categories. Applying one to a baseline rescales every sector's demand by its
category's target/baseline ratio, so the composition of spending inside a
category is preserved; capital formation is scaled separately as a single
block. Factors above 1 are legal: a scenario can reallocate spending into a
category beyond its baseline total.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    EmptyCofogTable,
    MissingHouseholdType,
    ParseError,
    UnsortedNonzeroDemand,
    ZeroBaselineNonzeroTarget,
)
from .model import RegionSectorIndex

# The 13 spending categories, in canonical order. The final one is the
# capital-formation block, which is a demand column rather than a set of
# sectors; the other 12 partition the sorted sectors.
GROCERIES = "Groceries (food and drinks)"
CLOTHING = "Clothing"
HOUSING = "Housing"
UTILITIES = "Utilities and insurance"
HEALTHCARE = "Healthcare"
APPLIANCES = "Appliances, furnishing, and maintenance"
EDUCATION = "Education"
DEVICES = "Devices (TVs, phones, computers)"
TRANSPORT = "Transport"
PUBLIC_ADMIN = "Public administration and defence"
RECREATION = "Recreation (vacations, toys, dining out)"
CARE_WORK = "Care work (babysitters, senior care)"
GFCF_CATEGORY = "Gross fixed capital formation"

SPENDING_CATEGORIES = (
    GROCERIES,
    CLOTHING,
    HOUSING,
    UTILITIES,
    HEALTHCARE,
    APPLIANCES,
    EDUCATION,
    DEVICES,
    TRANSPORT,
    PUBLIC_ADMIN,
    RECREATION,
    CARE_WORK,
    GFCF_CATEGORY,
)

CONSUMPTION_SPENDING_CATEGORIES = SPENDING_CATEGORIES[:-1]

# Calendar weeks in an average year, used to annualise weekly budgets.
WEEKS_PER_YEAR = 365.25 / 7  # ~52.18


@dataclass(frozen=True)
class CategoryConcordance:
    """Maps each sector name to one spending category.

    Sectors absent from ``mapping`` are unsorted; that is only legal while
    their final demand is zero, and violations are loud (see
    ``baseline_category_totals``). The capital-formation category may not
    appear here because it is a demand block, not a group of sectors.
    """

    mapping: dict[str, str]
    unsorted: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "mapping", dict(self.mapping))
        object.__setattr__(self, "unsorted", frozenset(self.unsorted))
        for sector, category in self.mapping.items():
            if category == GFCF_CATEGORY:
                raise ValueError(
                    f"sector {sector!r} mapped to the capital-formation block; "
                    "it is a demand column, not a sector category"
                )
            if category not in CONSUMPTION_SPENDING_CATEGORIES:
                raise ValueError(f"sector {sector!r} mapped to unknown category {category!r}")
        overlap = self.unsorted & set(self.mapping)
        if overlap:
            raise ValueError(f"sectors both sorted and unsorted: {sorted(overlap)}")

    @classmethod
    def for_sectors(cls, mapping: dict[str, str], sectors) -> "CategoryConcordance":
        """Build a concordance over a full sector list, inferring the unsorted set."""
        return cls(mapping=mapping, unsorted=frozenset(sectors) - set(mapping))

    def category_of(self, sector: str) -> str | None:
        return self.mapping.get(sector)


@dataclass(frozen=True)
class HouseholdBudgetTable:
    """Weekly per-household budgets: household type -> category -> currency/week."""

    rows: dict[str, dict[str, float]]

    def __post_init__(self):
        object.__setattr__(self, "rows", {t: dict(b) for t, b in self.rows.items()})
        for household_type, budgets in self.rows.items():
            for category, value in budgets.items():
                if category not in SPENDING_CATEGORIES:
                    raise ValueError(
                        f"household type {household_type!r} budgets unknown category {category!r}"
                    )
                if value < 0:
                    raise ValueError(
                        f"household type {household_type!r} has negative budget for {category!r}"
                    )


@dataclass(frozen=True)
class BudgetMove:
    """Move a fraction of one category's target into another (or drop it)."""

    source: str
    fraction: float
    destination: str | None = None

    def __post_init__(self):
        if self.source not in SPENDING_CATEGORIES:
            raise ValueError(f"unknown source category {self.source!r}")
        if self.destination is not None and self.destination not in SPENDING_CATEGORIES:
            raise ValueError(f"unknown destination category {self.destination!r}")
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError(f"fraction must be in [0, 1], got {self.fraction}")


@dataclass(frozen=True)
class ScenarioSpec:
    """Spending targets for one scenario.

    ``category_targets`` covers the 13 categories; a None target means "keep
    the baseline total" (factor 1). The public-administration target may
    instead be derived from ``government_factor`` times its baseline.
    ``adjustments`` are budget moves applied to the resolved targets, in
    order; shipped specs carry final totals and no adjustments.
    """

    name: str
    home_region: str
    category_targets: dict[str, float | None]
    government_factor: float | None = None
    adjustments: tuple[BudgetMove, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "category_targets", dict(self.category_targets))
        object.__setattr__(self, "adjustments", tuple(self.adjustments))
        unknown = set(self.category_targets) - set(SPENDING_CATEGORIES)
        if unknown:
            raise ValueError(f"unknown categories in spec {self.name!r}: {sorted(unknown)}")
        for category, target in self.category_targets.items():
            if target is not None and target < 0:
                raise ValueError(f"negative target for {category!r} in spec {self.name!r}")
        if self.government_factor is not None and not 0.0 <= self.government_factor <= 1.0:
            raise ValueError(f"government factor must be in [0, 1], got {self.government_factor}")

    @property
    def gfcf_target(self) -> float | None:
        return self.category_targets.get(GFCF_CATEGORY)


@dataclass(frozen=True)
class CofogEntry:
    function: str
    spending: float
    included: bool


@dataclass(frozen=True)
class CofogTable:
    """Government spending by function, with scenario inclusion flags."""

    entries: tuple[CofogEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        for entry in self.entries:
            if entry.spending < 0:
                raise ValueError(f"negative spending for function {entry.function!r}")


def aggregate_household_budgets(table: HouseholdBudgetTable, counts: dict[str, float],
                                weeks_per_year: float = WEEKS_PER_YEAR) -> dict[str, float]:
    """Annual national totals: budget x household count x weeks, per category."""
    if weeks_per_year <= 0:
        raise ValueError(f"weeks_per_year must be positive, got {weeks_per_year}")
    missing = set(table.rows) - set(counts)
    if missing:
        raise MissingHouseholdType(f"no counts for household types: {sorted(missing)}")
    totals = {category: 0.0 for category in SPENDING_CATEGORIES}
    for household_type, budgets in table.rows.items():
        count = counts[household_type]
        for category, weekly in budgets.items():
            totals[category] += weekly * count * weeks_per_year
    return totals


def baseline_category_totals(y_base: np.ndarray, concordance: CategoryConcordance,
                             index: RegionSectorIndex) -> dict[str, float]:
    """Per-category sums of a spending vector over the 12 sector categories.

    Every sector carrying demand must be sorted; an unsorted sector with
    nonzero demand voids the premise that unsorted sectors are inactive.
    """
    y = np.asarray(y_base, dtype=float)
    totals = {category: 0.0 for category in CONSUMPTION_SPENDING_CATEGORIES}
    for flat, (region, sector) in enumerate(index.labels()):
        value = float(y[flat])
        category = concordance.category_of(sector)
        if category is None:
            if value != 0.0:
                raise UnsortedNonzeroDemand(
                    f"sector {sector!r} (region {region}) has demand {value} "
                    "but no spending category"
                )
            continue
        totals[category] += value
    return totals


def category_scaling_factors(baseline: dict[str, float],
                             targets: dict[str, float]) -> dict[str, float]:
    """Per-category factors target/baseline; zero baselines demand zero targets."""
    factors: dict[str, float] = {}
    for category, target in targets.items():
        base = baseline.get(category, 0.0)
        if base > 0.0:
            factors[category] = target / base
        elif target > 0.0:
            raise ZeroBaselineNonzeroTarget(
                f"category {category!r} has target {target} but zero baseline spending"
            )
        else:
            factors[category] = 0.0
    return factors


def resolve_targets(spec: ScenarioSpec, baseline: dict[str, float]) -> dict[str, float]:
    """Turn a spec into 13 concrete targets against a baseline.

    None targets fall back to the baseline total; a government factor fills
    an absent public-administration target; budget moves are then applied in
    order (each conserves the moved amount exactly).
    """
    targets: dict[str, float] = {}
    for category in SPENDING_CATEGORIES:
        stated = spec.category_targets.get(category)
        if stated is None and category == PUBLIC_ADMIN and spec.government_factor is not None:
            stated = spec.government_factor * baseline.get(category, 0.0)
        targets[category] = baseline.get(category, 0.0) if stated is None else stated
    for move in spec.adjustments:
        reduced, moved = dining_out_adjustment(targets[move.source], move.fraction)
        targets[move.source] = reduced
        if move.destination is not None:
            targets[move.destination] += moved
    return targets


def apply_scenario(y_base: np.ndarray, gfcf_base: np.ndarray,
                   concordance: CategoryConcordance, spec: ScenarioSpec,
                   index: RegionSectorIndex) -> tuple[np.ndarray, np.ndarray]:
    """Rescale a baseline demand vector and capital-formation vector to a spec.

    Each sector's demand is multiplied by its category's factor, so
    per-category sums land on the targets while within-category composition
    is untouched. Unsorted sectors stay at zero.
    """
    y = np.asarray(y_base, dtype=float)
    gfcf = np.asarray(gfcf_base, dtype=float)
    baseline = baseline_category_totals(y, concordance, index)
    baseline[GFCF_CATEGORY] = float(gfcf.sum())
    targets = resolve_targets(spec, baseline)
    factors = category_scaling_factors(
        {c: baseline[c] for c in CONSUMPTION_SPENDING_CATEGORIES},
        {c: targets[c] for c in CONSUMPTION_SPENDING_CATEGORIES},
    )

    per_sector = np.zeros(index.n)
    for flat, (_, sector) in enumerate(index.labels()):
        category = concordance.category_of(sector)
        if category is not None:
            per_sector[flat] = factors[category]
    y_scenario = y * per_sector
    gfcf_scenario = scale_gfcf(gfcf, targets[GFCF_CATEGORY])
    return y_scenario, gfcf_scenario


def scale_gfcf(gfcf_base: np.ndarray, target_total: float) -> np.ndarray:
    """Scale every capital-formation entry proportionally to a new total."""
    gfcf = np.asarray(gfcf_base, dtype=float)
    if target_total < 0:
        raise ValueError(f"capital-formation target must be nonnegative, got {target_total}")
    if target_total == 0.0:
        return np.zeros_like(gfcf)
    base_total = float(gfcf.sum())
    if base_total <= 0.0:
        raise ZeroBaselineNonzeroTarget(
            f"capital-formation target {target_total} with zero baseline total"
        )
    return gfcf * (target_total / base_total)


def government_factor(cofog: CofogTable) -> float:
    """Share of eligible government spending retained by a scenario."""
    total = sum(entry.spending for entry in cofog.entries)
    if not cofog.entries or total <= 0.0:
        raise EmptyCofogTable("no eligible government spending to scale against")
    included = sum(entry.spending for entry in cofog.entries if entry.included)
    return included / total


def gfcf_depreciation_target(gdp: float, rate: float) -> float:
    """Capital formation needed to cover depreciation only: gdp x rate."""
    if gdp <= 0:
        raise ValueError(f"gdp must be positive, got {gdp}")
    if not 0.0 < rate < 1.0:
        raise ValueError(f"depreciation rate must be in (0, 1), got {rate}")
    return gdp * rate


def dining_out_adjustment(food_total: float, fraction: float) -> tuple[float, float]:
    """Split a food budget into (kept, moved) parts; the parts sum exactly.

    The moved share covers spending recorded under food but belonging to
    dining out; depending on the scenario it is dropped or re-attached to
    recreation.
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValueError(f"fraction must be in [0, 1], got {fraction}")
    moved = food_total * fraction
    reduced = food_total - moved
    return reduced, moved


# ---------------------------------------------------------------------------
# File formats
# ---------------------------------------------------------------------------

def load_scenario_spec(path: str | Path) -> ScenarioSpec:
    """Read a scenario spec file (JSON with a nested category-target table)."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid scenario spec: {exc}", path=str(path)) from exc
    try:
        targets = {
            str(category): (None if value is None else float(value))
            for category, value in raw["category_targets"].items()
        }
        adjustments = tuple(
            BudgetMove(source=a["source"], fraction=float(a["fraction"]),
                       destination=a.get("destination"))
            for a in raw.get("adjustments", [])
        )
        factor = raw.get("government_factor")
        return ScenarioSpec(
            name=str(raw["name"]),
            home_region=str(raw["home_region"]),
            category_targets=targets,
            government_factor=None if factor is None else float(factor),
            adjustments=adjustments,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"invalid scenario spec: {exc}", path=str(path)) from exc


def _data_rows(path: Path, delimiter: str):
    with path.open(newline="", encoding="utf-8") as handle:
        for lineno, row in enumerate(csv.reader(handle, delimiter=delimiter), start=1):
            if not row or (row[0].startswith("#")):
                continue
            yield lineno, row


def load_concordance(path: str | Path, sectors, delimiter: str = "\t") -> CategoryConcordance:
    """Read a two-column (sector, category) file; absent sectors are unsorted."""
    path = Path(path)
    mapping: dict[str, str] = {}
    for lineno, row in _data_rows(path, delimiter):
        if len(row) < 2:
            raise ParseError("expected two columns (sector, category)",
                             path=str(path), row=lineno)
        sector, category = row[0].strip(), row[1].strip()
        if sector in mapping:
            raise ParseError(f"sector {sector!r} listed twice", path=str(path), row=lineno)
        mapping[sector] = category
    # Rows for sectors the account does not carry are tolerated so one
    # concordance file can serve differently trimmed tables.
    known = set(sectors)
    mapping = {s: c for s, c in mapping.items() if s in known}
    return CategoryConcordance.for_sectors(mapping, sectors)


def load_cofog(path: str | Path, delimiter: str = "\t") -> CofogTable:
    """Read a three-column (function, spending, included) file."""
    path = Path(path)
    entries: list[CofogEntry] = []
    truthy = {"1", "true", "yes", "included"}
    falsy = {"0", "false", "no", "excluded"}
    for lineno, row in _data_rows(path, delimiter):
        if len(row) < 3:
            raise ParseError("expected three columns (function, spending, included)",
                             path=str(path), row=lineno)
        try:
            spending = float(row[1])
        except ValueError:
            raise ParseError(f"non-numeric spending {row[1]!r}",
                             path=str(path), row=lineno, column=2) from None
        flag = row[2].strip().lower()
        if flag in truthy:
            included = True
        elif flag in falsy:
            included = False
        else:
            raise ParseError(f"unrecognised inclusion flag {row[2]!r}",
                             path=str(path), row=lineno, column=3)
        entries.append(CofogEntry(function=row[0].strip(), spending=spending, included=included))
    return CofogTable(entries=tuple(entries))
