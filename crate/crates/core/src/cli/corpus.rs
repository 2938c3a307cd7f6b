//! The bundled example corpus: an index of rows, each running one command
//! on a data file and comparing the outcome with the expected one.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::realization::RealizeParams;
use crate::verify::{PairData, DEFAULT_SAMPLES};

use super::commands::{cmd_check_dirac, cmd_pushforward, cmd_verify_pair, realize_pair, verify_pair_data};
use super::manifest::{Manifest, PairFile};

/// Directory of the bundled corpus.
pub fn default_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

/// Command run by a corpus row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowCommand {
    CheckDirac,
    Pushforward,
    VerifyPair,
    /// `realize` followed by `verify-pair` on the built pair.
    RealizeVerify,
}

/// One corpus entry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Row {
    pub id: String,
    pub command: RowCommand,
    /// File name relative to the corpus directory.
    pub input: String,
    /// Outcome label: `pass`/`fail`, `forward`/`not forward`, or a
    /// classification.
    pub expect: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
}

/// `index.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Index {
    pub schema: u32,
    pub rows: Vec<Row>,
}

/// Result of one row.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowResult {
    pub id: String,
    pub command: RowCommand,
    pub expect: String,
    pub actual: String,
    pub matched: bool,
}

impl Index {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join("index.json");
        let text = std::fs::read_to_string(&path).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        let idx: Index = serde_json::from_str(&text).map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        if idx.schema != super::manifest::SCHEMA {
            return Err(Error::Manifest(format!("corpus index schema {}", idx.schema)));
        }
        Ok(idx)
    }

    /// The rows to run: all of them, or the one with id `only`.
    pub fn select(&self, only: Option<&str>) -> Result<Vec<&Row>> {
        match only {
            None => Ok(self.rows.iter().collect()),
            Some(id) => match self.rows.iter().find(|r| r.id == id) {
                Some(r) => Ok(vec![r]),
                None => Err(Error::Invalid(format!("unknown corpus id `{id}`"))),
            },
        }
    }
}

fn pass_label(ok: bool, yes: &str, no: &str) -> String {
    if ok { yes } else { no }.to_string()
}

/// Runs one row; input errors become the outcome `error: ...`.
pub fn run_row(dir: &Path, row: &Row) -> RowResult {
    let path = dir.join(&row.input);
    let samples = row.samples.unwrap_or(DEFAULT_SAMPLES);
    let outcome = (|| -> Result<String> {
        Ok(match row.command {
            RowCommand::CheckDirac => {
                let r = cmd_check_dirac(&Manifest::load(&path)?, row.grid.unwrap_or(5), row.tol.unwrap_or(1e-8))?;
                pass_label(r.success, "pass", "fail")
            }
            RowCommand::Pushforward => {
                let m = Manifest::load(&path)?;
                let r = cmd_pushforward(&m, row.map.as_deref(), row.grid.unwrap_or(5), row.tol.unwrap_or(1e-6))?;
                pass_label(r.success, "forward", "not forward")
            }
            RowCommand::VerifyPair => {
                let r = cmd_verify_pair(&PairFile::load(&path)?, samples, row.tol.unwrap_or(1e-6), None)?;
                r.classification.map(|c| c.to_string()).unwrap_or_default()
            }
            RowCommand::RealizeVerify => {
                let m = Manifest::load(&path)?;
                match realize_pair(&m, RealizeParams::default())? {
                    Err(_) => "chart collapse".to_string(),
                    Ok(pair) => {
                        let p = PairData::realized(pair);
                        let r = verify_pair_data(&m.name, &p, samples, row.tol.unwrap_or(1e-6), None)?;
                        r.classification.map(|c| c.to_string()).unwrap_or_default()
                    }
                }
            }
        })
    })();
    let actual = outcome.unwrap_or_else(|e| format!("error: {e}"));
    RowResult { id: row.id.clone(), command: row.command, matched: actual == row.expect, expect: row.expect.clone(), actual }
}

/// Plain-text table of results.
pub fn table(results: &[RowResult]) -> String {
    let w = results.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
    let e = results.iter().map(|r| r.expect.len()).max().unwrap_or(8).max(8);
    let mut out = format!("{:<w$}  {:<14}  {:<e$}  {}\n", "id", "command", "expected", "actual");
    for r in results {
        let cmd = serde_json::to_value(r.command).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
        let mark = if r.matched { "ok" } else { "MISMATCH" };
        out.push_str(&format!("{:<w$}  {:<14}  {:<e$}  {}  [{mark}]\n", r.id, cmd, r.expect, r.actual));
    }
    let n = results.iter().filter(|r| r.matched).count();
    out.push_str(&format!("{n}/{} rows match\n", results.len()));
    out
}
