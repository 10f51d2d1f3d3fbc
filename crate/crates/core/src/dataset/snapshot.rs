//! Deterministic tar archive of a dataset state.

use std::collections::BTreeMap;
use std::io::Read;

use sha2::{Digest, Sha256};

use crate::metrics::{read_metrics_csv, write_metrics_csv, MetricRecord};
use crate::stats::{read_fits_csv, write_fits_csv, ValuationFit};

use super::manifest::DatasetManifest;
use super::DatasetError;

pub const SNAPSHOT_VERSION: u32 = 1;
pub const CHECKSUMS_MEMBER: &str = "CHECKSUMS";

#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotContents {
    pub manifest: DatasetManifest,
    pub fits: Vec<ValuationFit>,
    pub metrics: Vec<MetricRecord>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Ids in `fits` or `metrics` that have no manifest entry.
pub fn dangling_ids(manifest: &DatasetManifest, fits: &[ValuationFit], metrics: &[MetricRecord]) -> Vec<String> {
    let ids = manifest.ids();
    let mut bad: Vec<String> = fits
        .iter()
        .map(|f| f.image_id.as_str())
        .chain(metrics.iter().map(|m| m.image_id.as_str()))
        .filter(|id| !ids.contains(id))
        .map(String::from)
        .collect();
    bad.sort();
    bad.dedup();
    bad
}

fn members(
    manifest: &DatasetManifest,
    fits: &[ValuationFit],
    metrics: &[MetricRecord],
) -> Result<BTreeMap<&'static str, Vec<u8>>, DatasetError> {
    let mut fits = fits.to_vec();
    fits.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    let mut metrics = metrics.to_vec();
    metrics.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    let mut fit_csv = Vec::new();
    write_fits_csv(&fits, &mut fit_csv).map_err(|e| DatasetError::Archive(e.to_string()))?;
    let mut metric_csv = Vec::new();
    write_metrics_csv(&metrics, &mut metric_csv).map_err(|e| DatasetError::Archive(e.to_string()))?;
    let mut out = BTreeMap::new();
    out.insert("VERSION", format!("{SNAPSHOT_VERSION}\n").into_bytes());
    out.insert("fits.csv", fit_csv);
    out.insert("manifest.json", (manifest.sorted().to_json() + "\n").into_bytes());
    out.insert("metrics.csv", metric_csv);
    Ok(out)
}

/// Builds the archive. Members are sorted, headers carry no time or
/// owner, and a `CHECKSUMS` member lists the SHA-256 of every other one.
pub fn snapshot(
    manifest: &DatasetManifest,
    fits: &[ValuationFit],
    metrics: &[MetricRecord],
) -> Result<Vec<u8>, DatasetError> {
    let dangling = dangling_ids(manifest, fits, metrics);
    if !dangling.is_empty() {
        return Err(DatasetError::UnknownIds(dangling));
    }
    let members = members(manifest, fits, metrics)?;
    let checksums: String = members
        .iter()
        .map(|(name, data)| format!("{}  {name}\n", sha256_hex(data)))
        .collect();
    let mut builder = tar::Builder::new(Vec::new());
    let mut append = |name: &str, data: &[u8]| -> Result<(), DatasetError> {
        let mut header = tar::Header::new_ustar();
        header.set_size(data.len() as u64);
        header.set_mode(0o644);
        header.set_mtime(0);
        header.set_uid(0);
        header.set_gid(0);
        header.set_entry_type(tar::EntryType::Regular);
        header.set_cksum();
        builder
            .append_data(&mut header, name, data)
            .map_err(|e| DatasetError::Archive(e.to_string()))
    };
    append(CHECKSUMS_MEMBER, checksums.as_bytes())?;
    for (name, data) in &members {
        append(name, data)?;
    }
    builder.into_inner().map_err(|e| DatasetError::Archive(e.to_string()))
}

pub fn snapshot_digest(archive: &[u8]) -> String {
    sha256_hex(archive)
}

/// Checks every member against `CHECKSUMS` and parses the contents.
pub fn verify_snapshot(archive: &[u8]) -> Result<SnapshotContents, DatasetError> {
    let mut files: BTreeMap<String, Vec<u8>> = BTreeMap::new();
    let mut ar = tar::Archive::new(archive);
    for entry in ar.entries().map_err(|e| DatasetError::Archive(e.to_string()))? {
        let mut entry = entry.map_err(|e| DatasetError::Archive(e.to_string()))?;
        let name = entry
            .path()
            .map_err(|e| DatasetError::Archive(e.to_string()))?
            .to_string_lossy()
            .into_owned();
        let mut data = Vec::new();
        entry.read_to_end(&mut data).map_err(|e| DatasetError::Archive(e.to_string()))?;
        files.insert(name, data);
    }
    let sums = files
        .remove(CHECKSUMS_MEMBER)
        .ok_or_else(|| DatasetError::Archive("missing CHECKSUMS".into()))?;
    let sums = String::from_utf8(sums).map_err(|e| DatasetError::Archive(e.to_string()))?;
    let mut listed = 0;
    for line in sums.lines() {
        let (digest, name) = line
            .split_once("  ")
            .ok_or_else(|| DatasetError::Archive(format!("bad checksum line {line:?}")))?;
        let data = files
            .get(name)
            .ok_or_else(|| DatasetError::Archive(format!("missing member {name}")))?;
        if sha256_hex(data) != digest {
            return Err(DatasetError::ChecksumMismatch(name.to_string()));
        }
        listed += 1;
    }
    if listed != files.len() {
        return Err(DatasetError::Archive("unlisted members present".into()));
    }
    let text = |n: &str| {
        String::from_utf8(files[n].clone()).map_err(|e| DatasetError::Archive(e.to_string()))
    };
    Ok(SnapshotContents {
        manifest: DatasetManifest::from_json(&text("manifest.json")?)?,
        fits: read_fits_csv(files["fits.csv"].as_slice()).map_err(|e| DatasetError::Archive(e.to_string()))?,
        metrics: read_metrics_csv(files["metrics.csv"].as_slice())
            .map_err(|e| DatasetError::Archive(e.to_string()))?,
    })
}
