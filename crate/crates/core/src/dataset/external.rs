use std::collections::BTreeMap;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::metrics::MetricRecord;

use super::DatasetError;

/// Values of one externally computed metric, keyed by image id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExternalMetricTable {
    pub name: String,
    pub rows: BTreeMap<String, f64>,
}

/// Reads `image_id,value` rows.
pub fn import_external_metrics<R: Read>(input: R, name: &str) -> Result<ExternalMetricTable, DatasetError> {
    let bad = |m: String| DatasetError::ExternalFormat(m);
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd
        .headers()
        .map_err(|e| bad(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    if header != ["image_id", "value"] {
        return Err(bad("expected header image_id,value".into()));
    }
    let mut rows = BTreeMap::new();
    for row in rd.records() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let id = row[0].trim().to_string();
        let value: f64 = row[1]
            .trim()
            .parse()
            .map_err(|_| bad(format!("non-numeric value {:?} for {id}", &row[1])))?;
        if !value.is_finite() {
            return Err(bad(format!("non-finite value for {id}")));
        }
        if rows.insert(id.clone(), value).is_some() {
            return Err(DatasetError::DuplicateId(id));
        }
    }
    Ok(ExternalMetricTable {
        name: name.to_string(),
        rows,
    })
}

/// Adds the table to `records` under `imported[name]`. Ids without a
/// record are rejected; records without a value stay undefined.
pub fn join_external(records: &mut [MetricRecord], table: &ExternalMetricTable) -> Result<(), DatasetError> {
    let unknown: Vec<String> = table
        .rows
        .keys()
        .filter(|id| !records.iter().any(|r| &r.image_id == *id))
        .cloned()
        .collect();
    if !unknown.is_empty() {
        return Err(DatasetError::UnknownIds(unknown));
    }
    for r in records.iter_mut() {
        if let Some(&v) = table.rows.get(&r.image_id) {
            r.imported.insert(table.name.clone(), v);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{csv_header, MetricRecord};

    #[test]
    fn header_only_is_empty() {
        let t = import_external_metrics("image_id,value\n".as_bytes(), "depth").unwrap();
        assert!(t.rows.is_empty());
    }

    #[test]
    fn duplicate_and_bad_rows() {
        let dup = import_external_metrics("image_id,value\na,1\na,2\n".as_bytes(), "d");
        assert_eq!(dup, Err(DatasetError::DuplicateId("a".into())));
        assert!(matches!(
            import_external_metrics("image_id,value\na,x\n".as_bytes(), "d"),
            Err(DatasetError::ExternalFormat(_))
        ));
    }

    #[test]
    fn join_names_column() {
        let t = import_external_metrics("image_id,value\na,0.5\n".as_bytes(), "symmetry").unwrap();
        let mut recs = vec![MetricRecord::empty("a"), MetricRecord::empty("b")];
        join_external(&mut recs, &t).unwrap();
        assert_eq!(recs[0].get("ext:symmetry"), Some(0.5));
        assert_eq!(recs[1].get("ext:symmetry"), None);
        assert_eq!(csv_header(&recs).last().unwrap(), "ext:symmetry");
        let stray = import_external_metrics("image_id,value\nz,1\n".as_bytes(), "s").unwrap();
        assert_eq!(join_external(&mut recs, &stray), Err(DatasetError::UnknownIds(vec!["z".into()])));
    }
}
