//! Manifest-driven loading of trace sets.
//!
//! ```json
//! {
//!   "wave_plates": "QWP/QWP",
//!   "referencing": "rf-referenced",
//!   "overlap_stage_mm": 10.775,
//!   "split_after": 50,
//!   "excluded": [[50, 54]],
//!   "traces": [{ "index": 0, "file": "traces/trace_000.csv", "raw_file": "traces/raw_000.csv" }]
//! }
//! ```
//!
//! Trace files are CSV with columns `stage_mm,value`; paths are relative to
//! the manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{RawTrace, RawTraceSet, Referencing, WavePlates};
use crate::error::{Error, Result};
use crate::io::{atomic_write, columns_csv, read_csv, read_json, write_json};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestTrace {
    pub index: usize,
    pub file: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_file: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub wave_plates: WavePlates,
    pub referencing: Referencing,
    /// Stage position taken as zero delay [mm].
    pub overlap_stage_mm: f64,
    /// Acquisitions from this index on form the second segment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_after: Option<usize>,
    /// Inclusive acquisition ranges left out of the analysis.
    #[serde(default)]
    pub excluded: Vec<[usize; 2]>,
    pub traces: Vec<ManifestTrace>,
}

impl Manifest {
    pub fn is_excluded(&self, index: usize) -> bool {
        self.excluded.iter().any(|[a, b]| index >= *a && index <= *b)
    }
}

fn read_stage_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut cols = read_csv(path, &["stage_mm", "value"])?;
    let v = cols.pop().expect("two columns");
    let s = cols.pop().expect("two columns");
    Ok((s, v))
}

/// Reads the manifest and the traces it lists, minus excluded acquisitions.
pub fn load_manifest(path: &Path) -> Result<(Manifest, RawTraceSet)> {
    let manifest: Manifest = read_json(path)?;
    if manifest.traces.is_empty() {
        return Err(Error::file(path, "manifest lists no traces"));
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let mut traces = Vec::new();
    for t in manifest.traces.iter().filter(|t| !manifest.is_excluded(t.index)) {
        let file = base.join(&t.file);
        let (stage_mm, values) = read_stage_csv(&file)?;
        let raw = match &t.raw_file {
            Some(r) => {
                let rf = base.join(r);
                let (rs, rv) = read_stage_csv(&rf)?;
                if rs != stage_mm {
                    return Err(Error::file(&rf, "raw channel stage grid differs from the trace"));
                }
                Some(rv)
            }
            None => None,
        };
        traces.push(RawTrace { index: t.index, stage_mm, values, raw });
    }
    if traces.is_empty() {
        return Err(Error::file(path, "every trace is excluded"));
    }
    let set = RawTraceSet {
        wave_plates: manifest.wave_plates,
        referencing: manifest.referencing,
        traces,
    };
    set.validate().map_err(|e| Error::file(path, e))?;
    Ok((manifest, set))
}

/// Writes every trace of `set` under `dir/traces/` and a manifest at
/// `dir/manifest.json`.
pub fn write_trace_set(
    dir: &Path,
    set: &RawTraceSet,
    overlap_stage_mm: f64,
    split_after: Option<usize>,
    excluded: Vec<[usize; 2]>,
) -> Result<Manifest> {
    let sub = dir.join("traces");
    fs::create_dir_all(&sub).map_err(|e| Error::file(&sub, e))?;
    let mut entries = Vec::new();
    for t in &set.traces {
        let file = PathBuf::from(format!("traces/trace_{:03}.csv", t.index));
        atomic_write(&dir.join(&file), columns_csv(["stage_mm", "value"], &t.stage_mm, &t.values).as_bytes())?;
        let raw_file = match &t.raw {
            Some(r) => {
                let f = PathBuf::from(format!("traces/raw_{:03}.csv", t.index));
                atomic_write(&dir.join(&f), columns_csv(["stage_mm", "value"], &t.stage_mm, r).as_bytes())?;
                Some(f)
            }
            None => None,
        };
        entries.push(ManifestTrace { index: t.index, file, raw_file });
    }
    let manifest = Manifest {
        wave_plates: set.wave_plates,
        referencing: set.referencing,
        overlap_stage_mm,
        split_after,
        excluded,
        traces: entries,
    };
    write_json(&dir.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set() -> RawTraceSet {
        let stage = vec![10.0, 10.005, 10.01];
        RawTraceSet {
            wave_plates: WavePlates::HwpQwp,
            referencing: Referencing::RfReferenced,
            traces: (0..4)
                .map(|i| RawTrace {
                    index: i,
                    stage_mm: stage.clone(),
                    values: vec![i as f64, 1.0, -2.5e-3],
                    raw: (i % 2 == 0).then(|| vec![0.0, 9.0, 0.0]),
                })
                .collect(),
        }
    }

    #[test]
    fn round_trip_with_exclusion() {
        let dir = tempfile::tempdir().unwrap();
        write_trace_set(dir.path(), &set(), 10.005, Some(2), vec![[1, 1]]).unwrap();
        let (m, back) = load_manifest(&dir.path().join("manifest.json")).unwrap();
        assert_eq!(m.split_after, Some(2));
        let idx: Vec<usize> = back.traces.iter().map(|t| t.index).collect();
        assert_eq!(idx, vec![0, 2, 3]);
        assert_eq!(back.traces[1], set().traces[2]);
        assert_eq!(back.wave_plates, WavePlates::HwpQwp);
    }

    #[test]
    fn empty_and_broken_manifests() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        std::fs::write(
            &p,
            r#"{"wave_plates":"QWP/QWP","referencing":"raw","overlap_stage_mm":1.0,"traces":[]}"#,
        )
        .unwrap();
        assert!(load_manifest(&p).unwrap_err().to_string().contains("no traces"));
        std::fs::write(
            &p,
            r#"{"wave_plates":"QWP/QWP","referencing":"raw","overlap_stage_mm":1.0,"traces":[{"index":0,"file":"missing.csv"}]}"#,
        )
        .unwrap();
        assert!(load_manifest(&p).unwrap_err().to_string().contains("missing.csv"));
        assert!(load_manifest(&dir.path().join("nope.json")).is_err());
    }
}
