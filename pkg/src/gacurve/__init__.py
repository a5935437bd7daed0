"""Yield-curve calibration for Nelson-Siegel and Svensson models.

The library fits NS (4-parameter) and NSS (6-parameter) spot curves to
market term structures with a bound-constrained real-coded genetic
algorithm, and keeps the fitted parameters stable across a time series
of curves by re-injecting each day's winning genes into the next day's
initial population.
"""

from .calibration import (
    BOUNDS_PRESETS,
    CalibrationResult,
    RollingPlan,
    calibrate,
    calibrate_series,
    ois_ns_bounds,
    ois_nss_bounds,
    reuse_shape_params,
    usd_nss_bounds,
)
from .curves import (
    CurveParams,
    ModelKind,
    forward_rate,
    ns_spot_basis,
    spot_design_matrix,
    spot_rate,
    spot_rate_batch,
)
from .data_ingest import (
    BondRecord,
    OisTable,
    bonds_to_term_structure,
    format_ois_csv,
    load_bundled_bonds,
    load_bundled_ois,
    ois_to_term_structures,
    parse_bonds_csv,
    parse_ois_csv,
)
from .errors import ConfigError, InputError
from .ga import (
    Bounds,
    GaConfig,
    GaResult,
    Gene,
    adapt_mutation_rate,
    blend,
    blend_weight_interval,
    evolve,
    init_population,
    mutate,
    partition,
    tournament_select,
)
from .objectives import (
    FitErrors,
    TermStructure,
    fit_errors,
    fitness,
    make_least_squares_objective,
    residuals,
)

__version__ = "0.1.0"

__all__ = [
    "BOUNDS_PRESETS",
    "BondRecord",
    "Bounds",
    "CalibrationResult",
    "ConfigError",
    "CurveParams",
    "FitErrors",
    "GaConfig",
    "GaResult",
    "Gene",
    "InputError",
    "ModelKind",
    "OisTable",
    "RollingPlan",
    "TermStructure",
    "adapt_mutation_rate",
    "blend",
    "blend_weight_interval",
    "bonds_to_term_structure",
    "calibrate",
    "calibrate_series",
    "evolve",
    "fit_errors",
    "fitness",
    "format_ois_csv",
    "forward_rate",
    "init_population",
    "load_bundled_bonds",
    "load_bundled_ois",
    "make_least_squares_objective",
    "mutate",
    "ns_spot_basis",
    "ois_ns_bounds",
    "ois_nss_bounds",
    "ois_to_term_structures",
    "parse_bonds_csv",
    "parse_ois_csv",
    "partition",
    "residuals",
    "reuse_shape_params",
    "spot_design_matrix",
    "spot_rate",
    "spot_rate_batch",
    "tournament_select",
    "usd_nss_bounds",
]
