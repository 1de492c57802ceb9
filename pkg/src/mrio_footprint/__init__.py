"""Consumption-based footprint accounting on multi-regional input-output data.

Compute labour, energy, emissions, and material footprints embodied in final
demand, and evaluate low-consumption scenarios defined by per-category
spending budgets.
"""

from . import errors
from .algebra import (
    IntensityVector,
    LeontiefOperator,
    ProductivityEstimate,
    TechnicalCoefficients,
    factorize,
    footprint_by_source,
    footprint_total,
    intensity,
    leontief_inverse,
    leontief_solve,
    productivity_check,
    technical_coefficients,
)
from .fileio import (
    IngestResult,
    Layout,
    data_path,
    ingest,
    load_layout,
    write_account,
    write_fixture_set,
)
from .fixtures import fixture, fixture_category_concordance, fixture_sector_groups
from .indicators import (
    ConversionParams,
    FootprintReport,
    MaterialTotals,
    OriginSplit,
    SectorGroupConcordance,
    aggregate_by_sector_group,
    aggregate_by_skill,
    attribute_by_category,
    build_footprint_report,
    compare_reports,
    decompose_demand_by_category,
    direct_use_scaled,
    hours_per_week_equivalent,
    material_indicators,
    per_capita,
    split_origin,
)
from .model import (
    BalanceReport,
    DemandSelection,
    ExtensionAccount,
    MrioAccount,
    RegionSectorIndex,
    consumption_selection,
    gfcf_selection,
    select_demand,
    validate_balance,
)
from .scenario import (
    CategoryConcordance,
    CofogTable,
    HouseholdBudgetTable,
    ScenarioSpec,
    aggregate_household_budgets,
    apply_scenario,
    baseline_category_totals,
    category_scaling_factors,
    dining_out_adjustment,
    gfcf_depreciation_target,
    government_factor,
    load_concordance,
    load_scenario_spec,
    scale_gfcf,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
