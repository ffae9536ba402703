"""Volume-implied risk premia, average risk aversion and trader-aggregation Monte Carlo."""

from importlib import resources
from pathlib import Path

from .errors import VolRiskError
from .forecast import ForecastPoint, forecast_diagnostics, one_day_ahead
from .gbm import GbmEstimate, WindowedEstimates, fit_gbm, rolling_fit
from .market_data import (
    AlignedSeries,
    CsvSchema,
    ObservationRecord,
    RiskFreeRecord,
    align,
    ingest_csv,
    ingest_risk_free,
    load_series,
    log_increments,
)
from .pipeline import analyze
from .risk_metrics import (
    ImpactedPriceParams,
    RiskMetricsPoint,
    calibrate_representative_agent,
    compute_metrics,
    decompose_volume,
    girsanov_kernels,
    impacted_drift,
    merton_ratio,
    observed_ratio,
    prices_of_risk,
    risk_aversion,
    wealth_dynamics,
)
from .stat_tests import intercept_regression, ks_normal, pearson_test, qq_table
from .trader_sim import (
    AggregationReport,
    TraderPopulationSpec,
    convergence_study,
    generator_path,
    sample_population,
    simulate_trader_paths,
    simulate_xi,
)

__version__ = "0.1.0"


def data_path(name: str) -> Path:
    """Path of a bundled fixture file (``synthetic_prices.csv``, ``synthetic_rates.csv``, ``population.txt``)."""
    return Path(str(resources.files(__package__) / "data" / name))
