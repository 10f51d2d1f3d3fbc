//! Valuation fitting and the statistics relating metrics to ratings.

mod anova;
mod describe;
mod fit;
mod io;
mod pearson;
mod tukey;

pub use anova::{anova_tukey, f_sf, AnovaResult, TukeyPair};
pub use describe::{
    boxplot_summary, density_scatter, distribution_report, quantile_sorted, rebin_ten_to_five,
    BoxplotSummary, DensityGrid, Distribution, DistributionReport, FINE_BIN_WIDTH, WHISKER_IQR,
};
pub use fit::{
    fit_truncated_gaussian, fit_truncated_gaussian_with, normal_cdf, summary_stats,
    truncated_bin_masses, FitObjective, LikertHistogram, ValuationFit, GRID_STEP, MU_MAX, MU_MIN,
    SIGMA_GRID_MAX, SIGMA_MIN,
};
pub use io::{read_fits_csv, read_histograms_csv, write_fits_csv, write_histograms_csv};
pub use pearson::{
    correlation_matrix, pearson, pearson_defined, pearson_p_value, Correlation, CorrelationMatrix,
    CorrelationPair, CorrelationReport, P_FLOOR, SIGNIFICANCE, VALUATION_COLUMN,
};
pub use tukey::{normal_range_cdf, ptukey};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum StatsError {
    #[error("histogram {0} has no votes")]
    EmptyHistogram(String),
    #[error("histogram {0} has a negative count")]
    NegativeCount(String),
    #[error("inputs differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 3 defined pairs, have {0}")]
    TooFewPairs(usize),
    #[error("input has zero variance")]
    ZeroVariance,
    #[error("no records share an image id with the valuations")]
    EmptyJoin,
    #[error("need at least 2 groups, have {0}")]
    TooFewGroups(usize),
    #[error("group {0} has fewer than 2 values")]
    GroupTooSmall(String),
    #[error("empty input")]
    EmptyInput,
    #[error("need at least 2 bins per axis, got {0}")]
    BadBins(usize),
    #[error("valuation csv: {0}")]
    Csv(String),
}
