"""
수치 도구를 한 곳에서 import할 수 있도록 통합
"""

from tools.errors import (
    VoltailError,
    DomainError,
    DeterministicLimit,
    QuadratureError,
    SimulationError,
    FitError,
    DataFormatError
)

from tools.models import (
    ModelKind,
    DriftScheme,
    ModelParams,
    load_model_config,
    drift_a,
    diffusion_b,
    shape_constants
)

from tools.stationary import (
    StationaryDist,
    pdf_v,
    pdf_y,
    sample_v,
    balance_residual
)

from tools.special_fn import (
    ln_gamma,
    log_bessel_k,
    bessel_k
)

from tools.bo_pdf import (
    BoPdf,
    TsallisParams,
    pdf_general,
    pdf_heston,
    pdf_tsallis,
    tsallis_distribution,
    tail_exponents,
    bo_cdf
)

from tools.montecarlo import (
    SimConfig,
    PathSet,
    simulate_joint,
    simulate_bo,
    bo_discrepancy
)

from tools.detrend import (
    PriceSeries,
    lag_returns,
    linear_detrend,
    normalize,
    trend_summary
)

from tools.histogram import (
    EmpiricalHist,
    collapse_metric,
    width_vs_lag
)

from tools.fit import (
    FitReport,
    fit_tsallis,
    fit_gaussian,
    loglog_slope
)

from tools.data_tools import load_prices
