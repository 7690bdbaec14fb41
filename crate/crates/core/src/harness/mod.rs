//! Calibration, risk estimation, the likelihood-ratio benchmark, regime
//! classification and grid sweeps.

pub mod calibrate;
pub mod likelihood;
pub mod regime;
pub mod risk;
pub mod sweep;

pub use calibrate::{
    bonferroni_calibrate, bonferroni_combine, bootstrap_calibrate, calibrate, calibrate_analytic, estimate_p0_hat, quantile_rank,
    simulate_statistics, BonferroniTest, BootstrapTest, CalibratedTest, CalibrationMethod,
};
pub use likelihood::{log_lr_statistic, lr_statistic, subset_edge_histogram, LR_SUBSET_BUDGET};
pub use regime::{classify_regime, classify_regime_with, Knowledge, RegimeLabel, RegimeOptions, RegimeReport, SideConditions};
pub use risk::{count_rejections, estimate_risk, estimate_risk_with, lr_oracle_risk, DecisionRule, RiskReport};
pub use sweep::{phase_sweep, rows_to_csv, SweepConfig, SweepGrid, SweepModel, SweepOptions, SweepOutcome, SweepRow, CSV_HEADER};
