"""tsecon: annual time-series econometrics engine and reproduction pipeline."""

from .cointegration import CointegrationResult, engle_granger
from .dataset import (
    AnnualSeries,
    Dataset,
    DatasetError,
    Term,
    TermError,
    apply_term,
    estimate_tax_benefit,
    load_dataset,
    parse_term,
    real_interest_rate,
)
from .dynamics import (
    ArFitResult,
    ArSpec,
    ChowResult,
    GrangerResult,
    chow_test,
    cochrane_orcutt_fit,
    compare_models,
    granger_causality,
)
from .manifest import PipelineManifest, default_manifest_text, parse_manifest
from .pipeline import run_pipeline
from .regress import EstimationError, FitResult, ModelSpec, ols_fit, vif
from .report import ReportBundle, render_irf_plot, render_table
from .scenario import CapitalScenario, ScenarioResult, simulate_exports, simulate_unemployment
from .tsls import TslsSpec, tsls_fit
from .unitroot import AdfResult, AdfSpec, adf_test, df_residual_test
from .var import VarModel, impulse_response, var_fit, variance_decomposition

__version__ = "0.1.0"
