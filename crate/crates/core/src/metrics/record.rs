use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::imaging::RasterImage;

use super::{
    alpha_traditional, alpha_unbiased, complexity_ce_sc, focus_measure, gamut_colorfulness,
    global_contrast_factor, hsv_saturation, mean_lightness, multiscale_contrast,
    oneoverf_residual, perceived_colorfulness, MetricError,
};

/// Token written for an undefined value.
pub const NA: &str = "NA";
/// Column prefix for imported external metrics.
pub const EXTERNAL_PREFIX: &str = "ext:";

/// Fixed computed columns, in CSV order after `image_id`.
pub const METRIC_COLUMNS: [&str; 14] = [
    "c_lab",
    "c_l",
    "c_ab",
    "gcf",
    "gamut_colorfulness",
    "perceived_colorfulness",
    "hsv_saturation",
    "mean_lightness",
    "focus",
    "alpha_traditional",
    "alpha_unbiased",
    "oneoverf_residual",
    "ce",
    "sc",
];

/// All metrics of one image. `None` marks an undefined value.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricRecord {
    pub image_id: String,
    pub c_lab: Option<f64>,
    pub c_l: Option<f64>,
    pub c_ab: Option<f64>,
    pub gcf: Option<f64>,
    pub gamut_colorfulness: Option<f64>,
    pub perceived_colorfulness: Option<f64>,
    pub hsv_saturation: Option<f64>,
    pub mean_lightness: Option<f64>,
    pub focus: Option<f64>,
    pub alpha_traditional: Option<f64>,
    pub alpha_unbiased: Option<f64>,
    pub oneoverf_residual: Option<f64>,
    pub ce: Option<f64>,
    pub sc: Option<f64>,
    #[serde(default)]
    pub imported: BTreeMap<String, f64>,
}

fn defined(r: Result<f64, MetricError>) -> Option<f64> {
    r.ok().filter(|v| v.is_finite())
}

impl MetricRecord {
    pub fn empty(image_id: impl Into<String>) -> Self {
        MetricRecord {
            image_id: image_id.into(),
            ..Default::default()
        }
    }

    /// Value of a computed column or of `ext:<name>`.
    pub fn get(&self, column: &str) -> Option<f64> {
        if let Some(name) = column.strip_prefix(EXTERNAL_PREFIX) {
            return self.imported.get(name).copied();
        }
        match column {
            "c_lab" => self.c_lab,
            "c_l" => self.c_l,
            "c_ab" => self.c_ab,
            "gcf" => self.gcf,
            "gamut_colorfulness" => self.gamut_colorfulness,
            "perceived_colorfulness" => self.perceived_colorfulness,
            "hsv_saturation" => self.hsv_saturation,
            "mean_lightness" => self.mean_lightness,
            "focus" => self.focus,
            "alpha_traditional" => self.alpha_traditional,
            "alpha_unbiased" => self.alpha_unbiased,
            "oneoverf_residual" => self.oneoverf_residual,
            "ce" => self.ce,
            "sc" => self.sc,
            _ => None,
        }
    }

    fn set(&mut self, column: &str, value: Option<f64>) -> bool {
        let slot = match column {
            "c_lab" => &mut self.c_lab,
            "c_l" => &mut self.c_l,
            "c_ab" => &mut self.c_ab,
            "gcf" => &mut self.gcf,
            "gamut_colorfulness" => &mut self.gamut_colorfulness,
            "perceived_colorfulness" => &mut self.perceived_colorfulness,
            "hsv_saturation" => &mut self.hsv_saturation,
            "mean_lightness" => &mut self.mean_lightness,
            "focus" => &mut self.focus,
            "alpha_traditional" => &mut self.alpha_traditional,
            "alpha_unbiased" => &mut self.alpha_unbiased,
            "oneoverf_residual" => &mut self.oneoverf_residual,
            "ce" => &mut self.ce,
            "sc" => &mut self.sc,
            _ => return false,
        };
        *slot = value;
        true
    }
}

/// Computes every metric. Metrics that do not apply to the image (too
/// small, no energy) come back undefined.
pub fn compute_all(img: &RasterImage, image_id: impl Into<String>) -> MetricRecord {
    let mut rec = MetricRecord::empty(image_id);
    if let Ok(c) = multiscale_contrast(img) {
        rec.c_lab = Some(c.c_lab);
        rec.c_l = Some(c.c_l);
        rec.c_ab = Some(c.c_ab);
    }
    rec.gcf = Some(global_contrast_factor(img));
    rec.gamut_colorfulness = Some(gamut_colorfulness(img));
    rec.perceived_colorfulness = Some(perceived_colorfulness(img));
    rec.hsv_saturation = Some(hsv_saturation(img));
    rec.mean_lightness = Some(mean_lightness(img));
    rec.focus = Some(focus_measure(img));
    rec.alpha_traditional = defined(alpha_traditional(img));
    rec.alpha_unbiased = defined(alpha_unbiased(img));
    rec.oneoverf_residual = defined(oneoverf_residual(img));
    if let Ok(c) = complexity_ce_sc(img) {
        rec.ce = Some(c.ce);
        rec.sc = c.sc;
    }
    rec
}

/// Sorted union of the external metric names across records.
pub fn external_columns(records: &[MetricRecord]) -> Vec<String> {
    let mut names: Vec<String> = records
        .iter()
        .flat_map(|r| r.imported.keys().cloned())
        .collect();
    names.sort();
    names.dedup();
    names
}

pub fn csv_header(records: &[MetricRecord]) -> Vec<String> {
    let mut header = vec!["image_id".to_string()];
    header.extend(METRIC_COLUMNS.iter().map(|c| c.to_string()));
    header.extend(external_columns(records).into_iter().map(|n| format!("{EXTERNAL_PREFIX}{n}")));
    header
}

fn render(v: Option<f64>) -> String {
    match v {
        Some(v) => format!("{v:?}"),
        None => NA.to_string(),
    }
}

pub fn write_metrics_csv<W: Write>(records: &[MetricRecord], out: W) -> Result<(), MetricError> {
    let header = csv_header(records);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&header).map_err(csv_err)?;
    for r in records {
        let row: Vec<String> = std::iter::once(r.image_id.clone())
            .chain(header[1..].iter().map(|c| render(r.get(c))))
            .collect();
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| MetricError::Csv(e.to_string()))
}

pub fn read_metrics_csv<R: Read>(input: R) -> Result<Vec<MetricRecord>, MetricError> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    if header.first().map(String::as_str) != Some("image_id") {
        return Err(MetricError::Csv("first column must be image_id".into()));
    }
    let mut out = Vec::new();
    for row in rd.records() {
        let row = row.map_err(csv_err)?;
        let mut rec = MetricRecord::empty(&row[0]);
        for (col, cell) in header.iter().zip(row.iter()).skip(1) {
            let value = if cell == NA {
                None
            } else {
                Some(cell.parse::<f64>().map_err(|_| {
                    MetricError::Csv(format!("bad value {cell:?} in column {col}"))
                })?)
            };
            if let Some(name) = col.strip_prefix(EXTERNAL_PREFIX) {
                if let Some(v) = value {
                    rec.imported.insert(name.to_string(), v);
                }
            } else if !rec.set(col, value) {
                return Err(MetricError::Csv(format!("unknown column {col}")));
            }
        }
        out.push(rec);
    }
    Ok(out)
}

fn csv_err(e: csv::Error) -> MetricError {
    MetricError::Csv(e.to_string())
}
