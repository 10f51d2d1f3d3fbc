//! Report artifacts: the metric-vs-valuation correlation table (all
//! images and unmodified only), valuation distributions, boxplots, group
//! comparisons and density grids.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{snapshot, snapshot_digest, Category, DatasetError, DatasetManifest};
use crate::metrics::{MetricRecord, METRIC_COLUMNS};
use crate::stats::{
    anova_tukey, boxplot_summary, correlation_matrix, density_scatter, distribution_report, AnovaResult,
    BoxplotSummary, Correlation, CorrelationMatrix, CorrelationReport, Distribution, StatsError, ValuationFit,
};

pub const DENSITY_BINS: usize = 20;
pub const GROUPING_ALL: &str = "all";
pub const GROUPING_UNMODIFIED: &str = "unmodified";

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub metric: String,
    pub all: Option<Correlation>,
    pub unmodified: Option<Correlation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSummary {
    pub all: CorrelationReport,
    pub unmodified: Option<CorrelationReport>,
    pub matrix: CorrelationMatrix,
    pub rows: Vec<CorrelationRow>,
}

fn mu_map(fits: &[ValuationFit]) -> BTreeMap<String, f64> {
    fits.iter().map(|f| (f.image_id.clone(), f.mu)).collect()
}

/// Correlations of every metric with `mu` over all images and over the
/// ORIGINAL images only.
pub fn correlate(
    manifest: &DatasetManifest,
    records: &[MetricRecord],
    fits: &[ValuationFit],
) -> Result<CorrelationSummary, ReportError> {
    let mus = mu_map(fits);
    let (all, matrix) = correlation_matrix(records, &mus, GROUPING_ALL)?;
    let originals: Vec<MetricRecord> = records
        .iter()
        .filter(|r| manifest.category_of(&r.image_id) == Some(Category::Original))
        .cloned()
        .collect();
    let unmodified = correlation_matrix(&originals, &mus, GROUPING_UNMODIFIED).ok().map(|(r, _)| r);
    let find = |rep: &CorrelationReport, m: &str| {
        rep.pairs.iter().find(|p| p.metric == m).map(|p| Correlation {
            r: p.r,
            p: p.p,
            n: p.n,
        })
    };
    let rows = matrix.names[..matrix.names.len() - 1]
        .iter()
        .map(|m| CorrelationRow {
            metric: m.clone(),
            all: find(&all, m),
            unmodified: unmodified.as_ref().and_then(|u| find(u, m)),
        })
        .collect();
    Ok(CorrelationSummary {
        all,
        unmodified,
        matrix,
        rows,
    })
}

fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:?}")).unwrap_or_else(|| "NA".into())
}

pub const CORRELATION_TABLE_HEADER: [&str; 7] = ["metric", "r_all", "p_all", "n_all", "r_unmodified", "p_unmodified", "n_unmodified"];

pub fn write_correlation_table<W: Write>(rows: &[CorrelationRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CORRELATION_TABLE_HEADER)?;
    for row in rows {
        let cells = |c: &Option<Correlation>| {
            [
                num(c.map(|c| c.r)),
                num(c.map(|c| c.p)),
                c.map(|c| c.n.to_string()).unwrap_or_else(|| "NA".into()),
            ]
        };
        let mut rec = vec![row.metric.clone()];
        rec.extend(cells(&row.all));
        rec.extend(cells(&row.unmodified));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn write_distribution<W: Write>(d: &Distribution, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["bin_low".to_string(), "bin_high".to_string()];
    header.extend(d.categories.iter().map(|c| c.name().to_string()));
    w.write_record(&header)?;
    for b in 0..d.edges.len() - 1 {
        let mut rec = vec![format!("{:?}", d.edges[b]), format!("{:?}", d.edges[b + 1])];
        rec.extend(d.counts.iter().map(|c| c[b].to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Values of `variable` (`mu` or a metric column) per category.
fn grouped(
    variable: &str,
    manifest: &DatasetManifest,
    records: &BTreeMap<&str, &MetricRecord>,
    fits: &[ValuationFit],
) -> BTreeMap<Category, Vec<f64>> {
    let mut out: BTreeMap<Category, Vec<f64>> = BTreeMap::new();
    for f in fits {
        let Some(cat) = manifest.category_of(&f.image_id) else { continue };
        let value = if variable == "mu" {
            Some(f.mu)
        } else {
            records.get(f.image_id.as_str()).and_then(|r| r.get(variable))
        };
        if let Some(v) = value.filter(|v| v.is_finite()) {
            out.entry(cat).or_default().push(v);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxplotRow {
    pub variable: String,
    pub category: Category,
    pub summary: BoxplotSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnovaRow {
    pub variable: String,
    pub result: AnovaResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub images: usize,
    pub category_counts: BTreeMap<Category, usize>,
    pub distribution_totals: BTreeMap<Category, u64>,
    pub files: Vec<String>,
    pub snapshot_sha256: String,
}

/// Writes every report artifact into `dir` and returns what was written.
pub fn write_report(
    dir: &Path,
    manifest: &DatasetManifest,
    records: &[MetricRecord],
    fits: &[ValuationFit],
) -> Result<ReportSummary, ReportError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut files = Vec::new();
    let mut put = |name: &str, bytes: Vec<u8>| -> Result<(), ReportError> {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent).map_err(io_err(parent))?;
        }
        std::fs::write(&path, bytes).map_err(io_err(&path))?;
        files.push(name.to_string());
        Ok(())
    };
    let csv_bytes = |f: &dyn Fn(&mut Vec<u8>) -> csv::Result<()>| -> Vec<u8> {
        let mut buf = Vec::new();
        f(&mut buf).expect("writing csv to memory");
        buf
    };

    let summary = correlate(manifest, records, fits)?;
    put("correlations.csv", csv_bytes(&|b| write_correlation_table(&summary.rows, b)))?;
    put("correlations.json", pretty(&summary))?;

    let labelled: Vec<(Category, f64)> = fits
        .iter()
        .filter_map(|f| manifest.category_of(&f.image_id).map(|c| (c, f.mu)))
        .collect();
    let dist = distribution_report(&labelled)?;
    put("distribution_coarse.csv", csv_bytes(&|b| write_distribution(&dist.coarse, b)))?;
    put("distribution_fine.csv", csv_bytes(&|b| write_distribution(&dist.fine, b)))?;

    let by_id: BTreeMap<&str, &MetricRecord> = records.iter().map(|r| (r.image_id.as_str(), r)).collect();
    let variables: Vec<&str> = std::iter::once("mu").chain(METRIC_COLUMNS).collect();
    let mut boxes = Vec::new();
    let mut anovas = Vec::new();
    for var in &variables {
        let groups = grouped(var, manifest, &by_id, fits);
        for (cat, values) in &groups {
            if let Ok(summary) = boxplot_summary(values) {
                boxes.push(BoxplotRow {
                    variable: var.to_string(),
                    category: *cat,
                    summary,
                });
            }
        }
        let named: Vec<(String, Vec<f64>)> = groups
            .into_iter()
            .filter(|(_, v)| v.len() >= 2)
            .map(|(c, v)| (c.name().to_string(), v))
            .collect();
        if let Ok(result) = anova_tukey(&named) {
            anovas.push(AnovaRow {
                variable: var.to_string(),
                result,
            });
        }
    }
    put(
        "boxplots.csv",
        csv_bytes(&|b| {
            let mut w = csv::Writer::from_writer(b);
            w.write_record(["variable", "category", "n", "median", "q1", "q3", "whisker_low", "whisker_high"])?;
            for r in &boxes {
                let s = &r.summary;
                w.write_record([
                    r.variable.clone(),
                    r.category.name().to_string(),
                    s.n.to_string(),
                    format!("{:?}", s.median),
                    format!("{:?}", s.q1),
                    format!("{:?}", s.q3),
                    format!("{:?}", s.whisker_low),
                    format!("{:?}", s.whisker_high),
                ])?;
            }
            w.flush()?;
            Ok(())
        }),
    )?;
    put("anova.json", pretty(&anovas))?;

    let mus = mu_map(fits);
    for metric in METRIC_COLUMNS {
        let (x, y): (Vec<f64>, Vec<f64>) = records
            .iter()
            .filter_map(|r| Some((r.get(metric)?, *mus.get(&r.image_id)?)))
            .filter(|(a, b)| a.is_finite() && b.is_finite())
            .unzip();
        if let Ok(grid) = density_scatter(&x, &y, DENSITY_BINS, DENSITY_BINS) {
            put(&format!("density/{metric}.json"), pretty(&grid))?;
        }
    }

    let archive = snapshot(manifest, fits, records)?;
    let snapshot_sha256 = snapshot_digest(&archive);
    put("snapshot.tar", archive)?;

    let distribution_totals = dist
        .coarse
        .categories
        .iter()
        .zip(&dist.coarse.counts)
        .map(|(c, v)| (*c, v.iter().sum()))
        .collect();
    Ok(ReportSummary {
        images: manifest.entries.len(),
        category_counts: manifest.category_counts(),
        distribution_totals,
        files,
        snapshot_sha256,
    })
}

fn pretty<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("report values serialize");
    s.push('\n');
    s.into_bytes()
}
