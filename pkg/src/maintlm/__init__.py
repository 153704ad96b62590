"""Maintenance-time prediction: change-log ingestion, a Levenberg-Marquardt
trained [1, H, 1] tanh network, OLS comparison statistics and SVG diagnostics."""

from .dataset import DataSplit, NormParams, denormalize, fit_normalization, normalize, split_indices
from .errors import MaintlmError
from .ingest import InputVariant, MaintenanceRecord, SamplePair, build_samples, parse_change_log
from .mlp import MlpModel, batch_residuals, forward, init_model, jacobian
from .stats import ErrorHistogram, RegressionSummary, error_histogram, mse, ols_fit, pearson_r
from .trainer import EpochTrace, StopReason, TrainConfig, TrainResult, lm_step, train

__version__ = "0.1.0"
