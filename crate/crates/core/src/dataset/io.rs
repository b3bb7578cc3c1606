//! Dataset files: one instance per line, plus maps, provenance and a
//! manifest.
//!
//! ```text
//! out/
//!   manifest.json
//!   idioms.txt
//!   dt/{train,eval,test}.tsv          m_s<TAB>r_nl<TAB>m_r
//!   dp/{train,eval,test}.tsv          m_s<TAB>m_r
//!   maps/{train,eval,test}.maps       one "#<index>" header per instance
//!   provenance/{train,eval,test}.jsonl
//! ```

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AttritionStats, DatasetBundle, DatasetError, Split, SplitRatios};
use crate::abstraction::AbstractionMap;

pub const MANIFEST_FILE: &str = "manifest.json";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    pub train: usize,
    pub eval: usize,
    pub test: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub seed: u64,
    pub ratios: SplitRatios,
    pub counts: SplitCounts,
    pub idiom_count: usize,
    pub idiom_digest: String,
    pub attrition: AttritionStats,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DatasetError> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(parent).map_err(io_err(parent))?;
    let mut tmp = tempfile::NamedTempFile::new_in(parent).map_err(io_err(parent))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.as_file().sync_all().map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| io_err(path)(e.error))?;
    Ok(())
}

fn lines<I: IntoIterator<Item = String>>(items: I) -> String {
    items.into_iter().map(|l| l + "\n").collect()
}

/// Writes every file of the bundle under `dir` and returns its manifest.
pub fn write_bundle(bundle: &DatasetBundle, dir: &Path) -> Result<Manifest, DatasetError> {
    for split in Split::ALL {
        let items = bundle.split(split);
        let name = split.name();
        write_atomic(&dir.join(format!("dt/{name}.tsv")), lines(items.iter().map(|t| t.dt_line())).as_bytes())?;
        write_atomic(&dir.join(format!("dp/{name}.tsv")), lines(items.iter().map(|t| t.dp_line())).as_bytes())?;
        let maps: String = items
            .iter()
            .enumerate()
            .map(|(i, t)| format!("#{i}\n{}", t.map.to_lines()))
            .collect();
        write_atomic(&dir.join(format!("maps/{name}.maps")), maps.as_bytes())?;
        let provenance = items.iter().map(|t| {
            serde_json::json!({
                "provenance": t.provenance,
                "span": t.span,
            })
            .to_string()
        });
        write_atomic(&dir.join(format!("provenance/{name}.jsonl")), lines(provenance).as_bytes())?;
    }
    write_atomic(&dir.join("idioms.txt"), bundle.idioms.to_text().as_bytes())?;
    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        seed: bundle.seed,
        ratios: bundle.ratios,
        counts: SplitCounts {
            train: bundle.train.len(),
            eval: bundle.eval.len(),
            test: bundle.test.len(),
        },
        idiom_count: bundle.idioms.size(),
        idiom_digest: bundle.idioms.digest(),
        attrition: bundle.stats.clone(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_atomic(&dir.join(MANIFEST_FILE), (json + "\n").as_bytes())?;
    Ok(manifest)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairLine {
    pub source: Vec<String>,
    pub target: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripletLine {
    pub source: Vec<String>,
    pub comment: Vec<String>,
    pub target: Vec<String>,
}

fn tokens(field: &str) -> Vec<String> {
    field.split(' ').filter(|t| !t.is_empty()).map(str::to_string).collect()
}

fn read_fields(path: &Path, expected: usize) -> Result<Vec<Vec<Vec<String>>>, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != expected {
                return Err(DatasetError::Format {
                    path: path.display().to_string(),
                    line: i + 1,
                    reason: format!("expected {expected} tab-separated fields, found {}", fields.len()),
                });
            }
            Ok(fields.into_iter().map(tokens).collect())
        })
        .collect()
}

/// Reads a D_p file.
pub fn read_pairs(path: &Path) -> Result<Vec<PairLine>, DatasetError> {
    Ok(read_fields(path, 2)?
        .into_iter()
        .map(|mut f| {
            let target = f.pop().unwrap_or_default();
            let source = f.pop().unwrap_or_default();
            PairLine { source, target }
        })
        .collect())
}

/// Reads a D_t file.
pub fn read_triplets(path: &Path) -> Result<Vec<TripletLine>, DatasetError> {
    Ok(read_fields(path, 3)?
        .into_iter()
        .map(|mut f| {
            let target = f.pop().unwrap_or_default();
            let comment = f.pop().unwrap_or_default();
            let source = f.pop().unwrap_or_default();
            TripletLine {
                source,
                comment,
                target,
            }
        })
        .collect())
}

/// Reads a maps file back into one map per instance.
pub fn read_maps(path: &Path) -> Result<Vec<AbstractionMap>, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let bad = |line: usize, reason: String| DatasetError::Format {
        path: path.display().to_string(),
        line,
        reason,
    };
    let mut blocks: Vec<(usize, String)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(index) = line.strip_prefix('#') {
            let index: usize = index.parse().map_err(|_| bad(i + 1, format!("bad instance header {line:?}")))?;
            if index != blocks.len() {
                return Err(bad(i + 1, format!("expected instance {}, found {index}", blocks.len())));
            }
            blocks.push((i + 1, String::new()));
        } else {
            let Some((_, body)) = blocks.last_mut() else {
                return Err(bad(i + 1, "map line before the first instance header".into()));
            };
            body.push_str(line);
            body.push('\n');
        }
    }
    blocks
        .into_iter()
        .map(|(header, body)| AbstractionMap::from_lines(&body).map_err(|e| bad(header, e.to_string())))
        .collect()
}
