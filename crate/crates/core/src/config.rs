//! Every tunable of the extraction, ranking, classification and protocol
//! stages. Defaults reproduce the documented behaviour; the CLI loads
//! overrides from a TOML file.

use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct Config {
    pub lob: LobConfig,
    pub technical: TechnicalConfig,
    pub quant: QuantConfig,
    pub selection: SelectionConfig,
    pub classify: ClassifyConfig,
    pub pipeline: PipelineConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LobConfig {
    pub depth: usize,
    /// Blocks in the long intensity window used by the comparison indicators.
    pub long_window: usize,
    /// Fallback interval (seconds) while no positive timestamp gap has been seen.
    pub min_dt_seconds: f64,
}

impl Default for LobConfig {
    fn default() -> Self {
        Self { depth: 10, long_window: 50, min_dt_seconds: 1e-3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TechnicalConfig {
    pub ao_fast: usize,
    pub ao_slow: usize,
    pub ac_window: usize,
    pub adx_window: usize,
    pub alligator: [usize; 3],
    pub apo_fast: usize,
    pub apo_slow: usize,
    pub aroon_window: usize,
    pub atr_window: usize,
    pub bollinger_window: usize,
    pub bollinger_width: f64,
    pub ichimoku: [usize; 3],
    pub cmo_window: usize,
    pub chaikin_fast: usize,
    pub chaikin_slow: usize,
    pub chandelier_window: usize,
    pub chandelier_multiplier: f64,
    pub cog_window: usize,
    pub donchian_window: usize,
    pub dema_window: usize,
    pub dpo_window: usize,
    /// Ship the displaced-close DPO instead of the highest-high form.
    pub dpo_standard: bool,
    pub hull_window: usize,
    pub keltner_window: usize,
    pub keltner_atr_window: usize,
    pub keltner_multiplier: f64,
    pub macd_fast: usize,
    pub macd_slow: usize,
    pub vma_window: usize,
    pub roc_window: usize,
    pub rsi_window: usize,
    pub psar_step: f64,
    pub psar_max: f64,
    pub psar_extreme_window: usize,
    pub stddev_window: usize,
    pub stoch_rsi_window: usize,
    pub t3_window: usize,
    pub t3_volume_factor: f64,
    pub tema_window: usize,
    pub trima_window: usize,
    pub trix_window: usize,
    pub tsi_long: usize,
    pub tsi_short: usize,
    pub uo_windows: [usize; 3],
    pub williams_window: usize,
    pub zlema_window: usize,
    /// `N` in the zero-lag error term `lag = (N - 1) / 2`.
    pub zlema_lag_n: usize,
    pub regression_window: usize,
    pub filter_numerator: Vec<f64>,
    pub filter_denominator: Vec<f64>,
    pub savgol_window: usize,
    pub savgol_degree: usize,
    pub beta_window: usize,
}

impl Default for TechnicalConfig {
    fn default() -> Self {
        Self {
            ao_fast: 5,
            ao_slow: 34,
            ac_window: 5,
            adx_window: 14,
            alligator: [13, 8, 5],
            apo_fast: 5,
            apo_slow: 13,
            aroon_window: 20,
            atr_window: 14,
            bollinger_window: 20,
            bollinger_width: 2.0,
            ichimoku: [9, 26, 52],
            cmo_window: 19,
            chaikin_fast: 3,
            chaikin_slow: 10,
            chandelier_window: 22,
            chandelier_multiplier: 3.0,
            cog_window: 10,
            donchian_window: 20,
            dema_window: 20,
            dpo_window: 10,
            dpo_standard: false,
            hull_window: 10,
            keltner_window: 20,
            keltner_atr_window: 10,
            keltner_multiplier: 2.0,
            macd_fast: 12,
            macd_slow: 26,
            vma_window: 3,
            roc_window: 12,
            rsi_window: 14,
            psar_step: 0.02,
            psar_max: 0.2,
            psar_extreme_window: 5,
            stddev_window: 10,
            stoch_rsi_window: 10,
            t3_window: 10,
            t3_volume_factor: 0.7,
            tema_window: 10,
            trima_window: 10,
            trix_window: 10,
            tsi_long: 25,
            tsi_short: 13,
            uo_windows: [7, 14, 28],
            williams_window: 14,
            zlema_window: 10,
            zlema_lag_n: 1,
            regression_window: 10,
            filter_numerator: vec![0.25, 0.25, 0.25, 0.25],
            filter_denominator: vec![1.0],
            savgol_window: 9,
            savgol_degree: 3,
            beta_window: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuantConfig {
    pub acf_lags: usize,
    pub pacf_mid_lags: usize,
    pub pacf_return_lags: usize,
    /// Rolling window (blocks) for autocorrelation and cointegration.
    pub window: usize,
    /// Windows shorter than this are treated as warm-up.
    pub min_window: usize,
    pub adf_lags: usize,
    pub logistic_levels: usize,
    /// Number of most recent (9th-event, 10th-event) pairs in the logistic batch.
    pub logistic_batch: usize,
    pub logistic_ridge: f64,
    pub logistic_max_halvings: usize,
    /// Optional replacement for the embedded Engle-Granger quantile table.
    pub critical_values: Option<Vec<CriticalValueRow>>,
}

impl Default for QuantConfig {
    fn default() -> Self {
        Self {
            acf_lags: 10,
            pacf_mid_lags: 10,
            pacf_return_lags: 5,
            window: 100,
            min_window: 30,
            adf_lags: 1,
            logistic_levels: 6,
            logistic_batch: 100,
            logistic_ridge: 1e-6,
            logistic_max_halvings: 20,
            critical_values: None,
        }
    }
}

/// Quantile `p` of the test statistic at sample size `T`:
/// `tau_inf + c1 / T + c2 / T^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValueRow {
    pub p: f64,
    pub tau_inf: f64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SelectionConfig {
    pub entropy_bins: usize,
    /// Fraction of the ranking data used to fit; the rest is scored.
    pub fit_fraction: f64,
    pub lda_ridge: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self { entropy_bins: 100, fit_fraction: 0.8, lda_ridge: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifyConfig {
    pub rbfn_prototypes: usize,
    /// Fixed spread; `None` uses the median pairwise prototype distance.
    pub rbfn_sigma: Option<f64>,
    pub rbfn_ridge: f64,
    pub kmeans_max_iter: usize,
    pub seed: u64,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { rbfn_prototypes: 60, rbfn_sigma: None, rbfn_ridge: 1e-3, kmeans_max_iter: 100, seed: 42 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoother {
    Ema,
    Centered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub threshold: f64,
    pub smoothing_span: usize,
    pub smoother: Smoother,
    pub horizons: Vec<usize>,
    /// Feature counts of the summary slice.
    pub top_k: Vec<usize>,
    /// Extra feature counts at every multiple of this stride for the
    /// F1-versus-d curves; 0 disables them.
    pub curve_stride: usize,
    pub rerank_per_fold: bool,
    pub std_floor: f64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            threshold: 0.002,
            smoothing_span: 9,
            smoother: Smoother::Ema,
            horizons: vec![1, 2, 3],
            top_k: vec![5, 50, 100, 200, 273],
            curve_stride: 25,
            rerank_per_fold: false,
            std_floor: 1e-12,
        }
    }
}
