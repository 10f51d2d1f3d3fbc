use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::metrics::MetricRecord;
use crate::stats::{LikertHistogram, ValuationFit};
use crate::uglifier::ManipulationScript;

use super::manifest::{Category, DatasetManifest};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DanglingReference {
    /// What holds the reference: `valuation`, `fit`, `metric`, `script` or `provenance`.
    pub kind: String,
    pub id: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrityReport {
    pub dangling: Vec<DanglingReference>,
}

impl IntegrityReport {
    pub fn is_clean(&self) -> bool {
        self.dangling.is_empty()
    }
}

/// Checks that every valuation, fit, metric row and script source names a
/// manifest entry, and every provenance id names a stored script.
pub fn check_integrity(
    manifest: &DatasetManifest,
    valuations: &[LikertHistogram],
    fits: &[ValuationFit],
    metrics: &[MetricRecord],
    scripts: &[ManipulationScript],
) -> IntegrityReport {
    let ids = manifest.ids();
    let mut dangling = BTreeSet::new();
    let mut check = |kind: &str, id: &str| {
        if !ids.contains(id) {
            dangling.insert(DanglingReference {
                kind: kind.into(),
                id: id.into(),
            });
        }
    };
    valuations.iter().for_each(|v| check("valuation", &v.image_id));
    fits.iter().for_each(|f| check("fit", &f.image_id));
    metrics.iter().for_each(|m| check("metric", &m.image_id));
    scripts.iter().for_each(|s| check("script", &s.source_image_id));
    let script_ids: BTreeSet<String> = scripts.iter().map(ManipulationScript::script_id).collect();
    for e in &manifest.entries {
        if e.category == Category::Original {
            continue;
        }
        match &e.provenance_script_id {
            Some(p) if script_ids.contains(p) => {}
            _ => {
                dangling.insert(DanglingReference {
                    kind: "provenance".into(),
                    id: e.image_id.clone(),
                });
            }
        }
    }
    IntegrityReport {
        dangling: dangling.into_iter().collect(),
    }
}
