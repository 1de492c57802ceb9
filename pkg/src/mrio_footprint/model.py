"""The MRIO account model: indexing, balance validation, demand assembly.

An account holds one reference year of a multi-regional table: the
inter-industry transaction matrix Z, the final-demand block Y, total output
x, and named extension accounts (labour, energy, emissions, materials).
Everything is indexed by (region, sector) pairs flattened in row-major
region-block order. Accounts are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeEntry,
    UnknownCategory,
    UnknownRegion,
)

# The five final-demand classes recognised by demand selection. Extra columns
# in input files are preserved in storage but never selectable.
CATEGORY_HOUSEHOLDS = "households"
CATEGORY_NON_PROFIT = "non-profit"
CATEGORY_GOVERNMENT = "government"
CATEGORY_GFCF = "gfcf"
CATEGORY_INVENTORY = "inventory-change"

DEMAND_CATEGORIES = (
    CATEGORY_HOUSEHOLDS,
    CATEGORY_NON_PROFIT,
    CATEGORY_GOVERNMENT,
    CATEGORY_GFCF,
    CATEGORY_INVENTORY,
)

# Categories that may enter a consumption vector. Inventory changes do not
# involve consumption and are excluded from selection by policy.
SELECTABLE_CATEGORIES = tuple(c for c in DEMAND_CATEGORIES if c != CATEGORY_INVENTORY)

# The consolidated spending vector: household, non-profit, and government
# purchases summed into one vector; capital formation kept separate.
CONSUMPTION_CATEGORIES = (CATEGORY_HOUSEHOLDS, CATEGORY_NON_PROFIT, CATEGORY_GOVERNMENT)


@dataclass(frozen=True)
class RegionSectorIndex:
    """Bijection between (region, sector) labels and flat indices 0..n-1."""

    regions: tuple[str, ...]
    sectors: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "regions", tuple(self.regions))
        object.__setattr__(self, "sectors", tuple(self.sectors))
        if len(set(self.regions)) != len(self.regions):
            raise ValueError("region codes are not unique")
        if len(set(self.sectors)) != len(self.sectors):
            raise ValueError("sector names are not unique")
        object.__setattr__(self, "_region_pos", {r: i for i, r in enumerate(self.regions)})
        object.__setattr__(self, "_sector_pos", {s: j for j, s in enumerate(self.sectors)})

    @property
    def n_regions(self) -> int:
        return len(self.regions)

    @property
    def n_sectors(self) -> int:
        return len(self.sectors)

    @property
    def n(self) -> int:
        return len(self.regions) * len(self.sectors)

    def lookup(self, region: str, sector: str) -> int:
        """Flat index of (region, sector) in row-major region-block order."""
        try:
            r = self._region_pos[region]
        except KeyError:
            raise UnknownRegion(f"unknown region {region!r}") from None
        try:
            s = self._sector_pos[sector]
        except KeyError:
            raise ValueError(f"unknown sector {sector!r}") from None
        return r * self.n_sectors + s

    def region_slice(self, region: str) -> slice:
        """Contiguous flat-index block of one region's sectors."""
        if region not in self._region_pos:
            raise UnknownRegion(f"unknown region {region!r}")
        r = self._region_pos[region]
        return slice(r * self.n_sectors, (r + 1) * self.n_sectors)

    def labels(self) -> list[tuple[str, str]]:
        """(region, sector) pairs in flat-index order."""
        return [(r, s) for r in self.regions for s in self.sectors]

    def sector_positions(self, sector: str) -> np.ndarray:
        """Flat indices of one sector across all regions."""
        if sector not in self._sector_pos:
            raise ValueError(f"unknown sector {sector!r}")
        j = self._sector_pos[sector]
        return np.arange(self.n_regions) * self.n_sectors + j


@dataclass(frozen=True)
class ExtensionAccount:
    """One satellite account: stressor rows over all region-sectors.

    ``direct`` carries optional per-region direct-use values (household fuel
    burning, residential energy) that sit outside the inter-industry system.
    ``kind`` selects indicator behaviour downstream: "labour" reports get
    skill splits and hours-per-week conversion, "energy"/"emissions" get
    direct-use scaling, "material" gets used/unused totals via
    ``material_flags``.
    """

    name: str
    unit: str
    stressors: tuple[str, ...]
    rows: np.ndarray
    direct: dict[str, float] | None = None
    kind: str | None = None
    material_flags: dict[str, str] | None = None

    def __post_init__(self):
        object.__setattr__(self, "stressors", tuple(self.stressors))
        object.__setattr__(self, "rows", np.asarray(self.rows, dtype=float))
        if not self.unit:
            raise ValueError(f"extension {self.name!r} has no unit label")
        if len(set(self.stressors)) != len(self.stressors):
            raise ValueError(f"extension {self.name!r} has duplicate stressor labels")
        if self.rows.ndim != 2 or self.rows.shape[0] != len(self.stressors):
            raise DimensionMismatch(
                f"extension {self.name!r}: {len(self.stressors)} stressor labels "
                f"but row block of shape {self.rows.shape}"
            )
        if np.any(self.rows < 0):
            k = int(np.argwhere(self.rows < 0)[0][0])
            raise NegativeEntry(
                f"extension {self.name!r} stressor {self.stressors[k]!r} has negative entries"
            )

    def stressor_row(self, label: str) -> np.ndarray:
        try:
            k = self.stressors.index(label)
        except ValueError:
            raise ValueError(f"extension {self.name!r} has no stressor {label!r}") from None
        return self.rows[k]

    def total_row(self) -> np.ndarray:
        """All stressors summed into one row."""
        return self.rows.sum(axis=0)


@dataclass(frozen=True)
class MrioAccount:
    """One reference year of MRIO data plus extension accounts.

    ``y_columns`` labels the columns of Y as (paying region, category) pairs.
    Negative values are allowed only in inventory-change columns (real tables
    contain them); they are unreachable by demand selection.
    """

    index: RegionSectorIndex
    Z: np.ndarray
    Y: np.ndarray
    y_columns: tuple[tuple[str, str], ...]
    x: np.ndarray
    extensions: dict[str, ExtensionAccount]
    year: int

    def __post_init__(self):
        object.__setattr__(self, "Z", np.asarray(self.Z, dtype=float))
        object.__setattr__(self, "Y", np.asarray(self.Y, dtype=float))
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "y_columns", tuple((r, c) for r, c in self.y_columns))
        n = self.index.n
        if self.Z.shape != (n, n):
            raise DimensionMismatch(f"Z shape {self.Z.shape} != ({n}, {n})")
        if self.Y.ndim != 2 or self.Y.shape[0] != n:
            raise DimensionMismatch(f"Y shape {self.Y.shape} does not have {n} rows")
        if self.Y.shape[1] != len(self.y_columns):
            raise DimensionMismatch(
                f"Y has {self.Y.shape[1]} columns but {len(self.y_columns)} column labels"
            )
        if self.x.shape != (n,):
            raise DimensionMismatch(f"x shape {self.x.shape} != ({n},)")
        if np.any(self.Z < 0):
            raise NegativeEntry("transaction matrix contains negative entries")
        if np.any(self.x < 0):
            raise NegativeEntry("total output contains negative entries")
        for ext in self.extensions.values():
            if ext.rows.shape[1] != n:
                raise DimensionMismatch(
                    f"extension {ext.name!r} has {ext.rows.shape[1]} columns, expected {n}"
                )

    def y_column_indices(self, region: str, category: str) -> list[int]:
        return [i for i, (r, c) in enumerate(self.y_columns) if r == region and c == category]

    @property
    def regions_in_y(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for r, _ in self.y_columns:
            seen.setdefault(r)
        return tuple(seen)


@dataclass(frozen=True)
class DemandSelection:
    """Which final-demand columns enter a spending vector.

    Inventory changes are excluded at the type level: naming them here is an
    error, not a no-op, so scenario demand can never contain them.
    """

    paying_regions: tuple[str, ...]
    included_categories: tuple[str, ...]
    merge: bool = True

    def __post_init__(self):
        object.__setattr__(self, "paying_regions", tuple(self.paying_regions))
        object.__setattr__(self, "included_categories", tuple(self.included_categories))
        for category in self.included_categories:
            if category == CATEGORY_INVENTORY:
                raise UnknownCategory(
                    "inventory-change is excluded from demand selection by policy"
                )
            if category not in SELECTABLE_CATEGORIES:
                raise UnknownCategory(f"unknown demand category {category!r}")


def consumption_selection(region: str) -> DemandSelection:
    """Household + non-profit + government spending of one region, merged."""
    return DemandSelection((region,), CONSUMPTION_CATEGORIES, merge=True)


def gfcf_selection(region: str) -> DemandSelection:
    """Gross fixed capital formation of one region, as its own vector."""
    return DemandSelection((region,), (CATEGORY_GFCF,), merge=True)


def select_demand(account: MrioAccount, selection: DemandSelection):
    """Sum the selected Y columns into a spending vector.

    Returns one vector when ``selection.merge`` is true, otherwise a dict of
    per-category vectors (how capital formation is kept separate).
    """
    known_regions = set(account.regions_in_y)
    for region in selection.paying_regions:
        if region not in known_regions:
            raise UnknownRegion(f"region {region!r} has no final-demand columns")

    per_category: dict[str, np.ndarray] = {}
    for category in selection.included_categories:
        columns: list[int] = []
        for region in selection.paying_regions:
            columns.extend(account.y_column_indices(region, category))
        vector = account.Y[:, columns].sum(axis=1) if columns else np.zeros(account.index.n)
        if np.any(vector < 0):
            i = int(np.argmin(vector))
            region, sector = account.index.labels()[i]
            raise NegativeEntry(
                f"selected demand is negative for ({region}, {sector}) "
                f"in category {category!r}"
            )
        per_category[category] = vector

    if selection.merge:
        total = np.zeros(account.index.n)
        for vector in per_category.values():
            total += vector
        return total
    return per_category


@dataclass(frozen=True)
class BalanceViolation:
    row: int
    region: str
    sector: str
    residual: float


@dataclass(frozen=True)
class BalanceReport:
    """Per-row supply-use residuals |x - sum(Z) - sum(Y)| / max(x, 1)."""

    residuals: np.ndarray
    tol: float
    violations: tuple[BalanceViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if self.residuals.size else 0.0


def validate_balance(account: MrioAccount, tol: float = 1e-6) -> BalanceReport:
    """Check x[i] = sum_j Z[i][j] + sum_c Y[i][c] row by row.

    Reporting only: rows whose relative residual exceeds ``tol`` are listed,
    nothing is raised. ``tol=math.inf`` always yields an empty list.
    """
    supplied = account.Z.sum(axis=1) + account.Y.sum(axis=1)
    residuals = np.abs(account.x - supplied) / np.maximum(account.x, 1.0)
    labels = account.index.labels()
    violations = tuple(
        BalanceViolation(row=int(i), region=labels[i][0], sector=labels[i][1],
                         residual=float(residuals[i]))
        for i in np.nonzero(residuals > tol)[0]
    )
    return BalanceReport(residuals=residuals, tol=tol, violations=violations)
