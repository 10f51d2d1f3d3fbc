mod common;

use std::path::Path;

use aesthetica::dataset::{
    check_integrity, import_external_metrics, ingest, join_external, load_scripts, snapshot, snapshot_digest,
    verify_snapshot, Category, DatasetError, DatasetManifest, MANIFEST_FILE,
};
use aesthetica::imaging::{encode_png, RasterImage, ColorSpace};
use aesthetica::metrics::MetricRecord;
use aesthetica::stats::{fit_truncated_gaussian, LikertHistogram};
use aesthetica::uglifier::{ManipulationScript, ScriptLabel, Step};

fn write_png(path: &Path, rgb: [f64; 3], side: usize) {
    let img = RasterImage::uniform(ColorSpace::SrgbUnit, side, side, &rgb).unwrap();
    std::fs::write(path, encode_png(&img).unwrap()).unwrap();
}

#[test]
fn ingesting_twice_adds_nothing_the_second_time() {
    let root = tempfile::tempdir().unwrap();
    let mut m = DatasetManifest::new();
    let first = ingest(&mut m, root.path(), &common::corpus_dir(), Category::Original, "corpus").unwrap();
    assert_eq!(first.added.len(), 20);
    let second = ingest(&mut m, root.path(), &common::corpus_dir(), Category::Original, "corpus").unwrap();
    assert!(second.added.is_empty());
    assert_eq!(second.duplicates.len(), 20);
    assert_eq!(m.entries.len(), 20);
    // copied into the dataset so the manifest is portable
    for e in &m.entries {
        assert!(e.path.starts_with("images/original/"), "{}", e.path);
        assert!(root.path().join(&e.path).exists());
    }
}

#[test]
fn corrupt_files_warn_and_are_skipped() {
    let root = tempfile::tempdir().unwrap();
    let dir = root.path().join("in");
    std::fs::create_dir(&dir).unwrap();
    write_png(&dir.join("a.png"), [0.1, 0.2, 0.3], 16);
    write_png(&dir.join("b.png"), [0.4, 0.2, 0.3], 16);
    write_png(&dir.join("c.png"), [0.9, 0.2, 0.3], 16);
    std::fs::write(dir.join("d.png"), b"definitely not a png").unwrap();
    std::fs::write(dir.join("notes.txt"), b"ignored").unwrap();
    let mut m = DatasetManifest::new();
    let r = ingest(&mut m, root.path(), &dir, Category::Original, "t").unwrap();
    assert_eq!(r.added.len(), 3);
    assert_eq!(r.warnings.len(), 1);
    assert!(r.warnings[0].path.ends_with("d.png"));
    // inside the root: paths stay relative, nothing copied
    assert_eq!(r.added[0].path, "in/a.png");
}

#[test]
fn identical_pixels_are_one_entry() {
    let root = tempfile::tempdir().unwrap();
    let dir = root.path().join("in");
    std::fs::create_dir(&dir).unwrap();
    write_png(&dir.join("a.png"), [0.5, 0.5, 0.5], 12);
    write_png(&dir.join("copy.png"), [0.5, 0.5, 0.5], 12);
    let mut m = DatasetManifest::new();
    let r = ingest(&mut m, root.path(), &dir, Category::Original, "t").unwrap();
    assert_eq!(r.added.len(), 1);
    assert_eq!(r.duplicates, vec!["in/copy.png".to_string()]);
}

#[test]
fn small_and_empty_inputs() {
    let root = tempfile::tempdir().unwrap();
    let dir = root.path().join("in");
    std::fs::create_dir(&dir).unwrap();
    let mut m = DatasetManifest::new();
    assert!(matches!(
        ingest(&mut m, root.path(), &dir, Category::Original, "t"),
        Err(DatasetError::EmptyDirectory(_))
    ));
    image::RgbImage::new(2, 2).save(dir.join("tiny.png")).unwrap();
    let r = ingest(&mut m, root.path(), &dir, Category::Original, "t").unwrap();
    assert!(r.added.is_empty());
    assert_eq!(r.warnings.len(), 1);
    assert!(matches!(
        ingest(&mut m, root.path(), &root.path().join("missing"), Category::Original, "t"),
        Err(DatasetError::Io { .. })
    ));
}

#[test]
fn modified_images_need_provenance_sidecars() {
    let root = tempfile::tempdir().unwrap();
    let dir = root.path().join("ugly");
    std::fs::create_dir(&dir).unwrap();
    write_png(&dir.join("with.png"), [0.2, 0.7, 0.3], 16);
    write_png(&dir.join("without.png"), [0.7, 0.2, 0.3], 16);
    let script = ManipulationScript::new("0123456789abcdef", ScriptLabel::Uglified, "alice")
        .with_steps(vec![Step::Contrast { t: -0.4 }]);
    std::fs::write(dir.join("with.json"), script.to_json_pretty()).unwrap();
    let mut m = DatasetManifest::new();
    let r = ingest(&mut m, root.path(), &dir, Category::Uglified, "studio").unwrap();
    assert_eq!(r.added.len(), 1);
    assert_eq!(r.added[0].provenance_script_id.as_deref(), Some(script.script_id().as_str()));
    assert_eq!(r.warnings.len(), 1);
    assert!(r.warnings[0].path.ends_with("without.png"));
    let stored = load_scripts(root.path()).unwrap();
    assert_eq!(stored, vec![script]);
}

#[test]
fn manifest_round_trips_through_disk() {
    let root = tempfile::tempdir().unwrap();
    let mut m = DatasetManifest::new();
    ingest(&mut m, root.path(), &common::corpus_dir(), Category::Original, "corpus").unwrap();
    let path = root.path().join(MANIFEST_FILE);
    m.save(&path).unwrap();
    let back = DatasetManifest::load(&path).unwrap();
    assert_eq!(back, m);
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"imageId\"") && text.contains("\"sourceTag\""));
}

#[test]
fn external_metrics_join() {
    let mut records = vec![MetricRecord::empty("a"), MetricRecord::empty("b")];
    let table = import_external_metrics("image_id,value\na,0.25\nb,-1.5\n".as_bytes(), "symmetry").unwrap();
    join_external(&mut records, &table).unwrap();
    assert_eq!(records[0].get("ext:symmetry"), Some(0.25));
    assert_eq!(records[1].get("ext:symmetry"), Some(-1.5));

    let unknown = import_external_metrics("image_id,value\nzzz,1\n".as_bytes(), "depth").unwrap();
    assert!(matches!(join_external(&mut records, &unknown), Err(DatasetError::UnknownIds(ids)) if ids == ["zzz"]));
    assert!(import_external_metrics("id,v\na,1\n".as_bytes(), "x").is_err());
    assert!(import_external_metrics("image_id,value\na,abc\n".as_bytes(), "x").is_err());
    assert!(import_external_metrics("image_id,value\na,1\na,2\n".as_bytes(), "x").is_err());
}

fn small_state() -> (DatasetManifest, Vec<aesthetica::stats::ValuationFit>, Vec<MetricRecord>) {
    let root = tempfile::tempdir().unwrap();
    let mut m = DatasetManifest::new();
    ingest(&mut m, root.path(), &common::corpus_dir(), Category::Original, "corpus").unwrap();
    let ids: Vec<String> = m.sorted().entries.iter().take(4).map(|e| e.image_id.clone()).collect();
    let fits = ids
        .iter()
        .enumerate()
        .map(|(i, id)| fit_truncated_gaussian(&LikertHistogram::new(id.clone(), [1, 2, 3 + i as u64, 2, 1]).unwrap()))
        .collect();
    let metrics = ids
        .iter()
        .map(|id| {
            let mut r = MetricRecord::empty(id.clone());
            r.gcf = Some(1.0);
            r
        })
        .collect();
    (m, fits, metrics)
}

#[test]
fn snapshots_are_byte_stable_and_verified() {
    let (m, fits, metrics) = small_state();
    let a = snapshot(&m, &fits, &metrics).unwrap();
    let b = snapshot(&m, &fits, &metrics).unwrap();
    assert_eq!(a, b);
    assert_eq!(snapshot_digest(&a), snapshot_digest(&b));
    let back = verify_snapshot(&a).unwrap();
    assert_eq!(back.manifest, m.sorted());
    assert_eq!(back.fits.len(), fits.len());
    assert_eq!(back.metrics.len(), metrics.len());

    let mut ar = tar::Archive::new(a.as_slice());
    let names: Vec<String> = ar
        .entries()
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            assert_eq!(e.header().mtime().unwrap(), 0);
            assert_eq!(e.header().uid().unwrap(), 0);
            e.path().unwrap().to_string_lossy().into_owned()
        })
        .collect();
    assert_eq!(names, ["CHECKSUMS", "VERSION", "fits.csv", "manifest.json", "metrics.csv"]);
}

#[test]
fn tampered_snapshot_is_rejected() {
    let (m, fits, metrics) = small_state();
    let good = snapshot(&m, &fits, &metrics).unwrap();
    let mut ar = tar::Archive::new(good.as_slice());
    let mut builder = tar::Builder::new(Vec::new());
    for e in ar.entries().unwrap() {
        let mut e = e.unwrap();
        let name = e.path().unwrap().to_string_lossy().into_owned();
        let mut data = Vec::new();
        std::io::Read::read_to_end(&mut e, &mut data).unwrap();
        if name == "metrics.csv" {
            data.extend_from_slice(b"\n");
        }
        let mut h = e.header().clone();
        h.set_size(data.len() as u64);
        h.set_cksum();
        builder.append_data(&mut h, &name, data.as_slice()).unwrap();
    }
    let bad = builder.into_inner().unwrap();
    assert!(matches!(verify_snapshot(&bad), Err(DatasetError::ChecksumMismatch(n)) if n == "metrics.csv"));
}

#[test]
fn dangling_references_are_reported() {
    let (m, mut fits, metrics) = small_state();
    fits.push(fit_truncated_gaussian(&LikertHistogram::new("ghost", [0, 0, 1, 0, 0]).unwrap()));
    assert!(matches!(snapshot(&m, &fits, &metrics), Err(DatasetError::UnknownIds(ids)) if ids == ["ghost"]));
    let report = check_integrity(&m, &[], &fits, &metrics, &[]);
    assert!(!report.is_clean());
    assert_eq!(report.dangling.len(), 1);
    assert_eq!(report.dangling[0].id, "ghost");
    assert!(check_integrity(&m, &[], &fits[..4], &metrics, &[]).is_clean());
}

#[test]
fn demo_dataset_is_consistent() {
    let root = tempfile::tempdir().unwrap();
    let m = common::demo_dataset(root.path());
    let counts = m.category_counts();
    assert_eq!(counts[&Category::Original], 40);
    assert_eq!(counts[&Category::Beautified], 5);
    assert_eq!(counts[&Category::Uglified], 5);
    let scripts = load_scripts(root.path()).unwrap();
    assert_eq!(scripts.len(), 10);
    assert!(check_integrity(&m, &[], &[], &[], &scripts).is_clean());
    for s in &scripts {
        assert!(m.contains(&s.source_image_id));
    }
}
