//! Computational aesthetics workbench: an image uglification engine with
//! replayable scripts, low- and mid-level aesthetic image metrics,
//! truncated-Gaussian valuation fitting, and the correlation and group
//! comparison statistics used to relate metrics to ratings.

pub mod imaging;
pub mod metrics;
pub mod rating;
pub mod uglifier;
pub mod dataset;
pub mod stats;
#[cfg(feature = "server")]
pub mod cli;
pub mod demo;
pub mod report;
#[cfg(feature = "server")]
pub mod service;
