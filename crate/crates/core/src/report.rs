//! Structured scan reports with versioned JSON and CSV serialization.
//!
//! Reports are deterministic: rows are sorted by (i, alpha, beta), the
//! summary is recomputed from rows on load, and the timing block is
//! informational only.

use crate::equivalence::GoldWitness;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, Write};
use std::path::Path;
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;
pub const INDEX_PACKING: &str = "idx(u + gamma*v) = u*2^n + v (first coordinate high)";

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("I/O error: {0}")]
    Io(String),
    #[error("schema version {found} is incompatible with {expected}")]
    SchemaVersion { expected: u32, found: u32 },
    #[error("malformed report: {0}")]
    Parse(String),
}

/// One (i, alpha, beta) cell of a sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanRow {
    pub i: u32,
    pub alpha: u32,
    pub beta: u32,
    pub in_gamma: bool,
    pub is_permutation: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub differential_uniformity: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub boomerang_uniformity: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bu_method: Option<BuMethod>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub nonlinearity: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub algebraic_degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<GoldWitness>,
    /// Whether this cell satisfies the scanned claim.
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuMethod {
    /// Exhaustive BCT.
    Direct,
    /// Image-subspace criterion for quadratic DU-4 permutations.
    Criterion,
    /// Criterion for the sweep, confirmed by direct BCT on this row.
    CriterionConfirmedDirect,
}

impl BuMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            BuMethod::Direct => "direct",
            BuMethod::Criterion => "criterion",
            BuMethod::CriterionConfirmedDirect => "criterion+direct",
        }
    }

    fn parse(s: &str) -> Result<Self, ReportError> {
        match s {
            "direct" => Ok(BuMethod::Direct),
            "criterion" => Ok(BuMethod::Criterion),
            "criterion+direct" => Ok(BuMethod::CriterionConfirmedDirect),
            other => Err(ReportError::Parse(format!("unknown bu_method `{other}`"))),
        }
    }
}

/// Claim outcome, derived from the rows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub rows_total: usize,
    pub rows_passed: usize,
    pub claim_holds: bool,
    /// Scan-specific counters, e.g. Gamma size per i.
    pub gamma_rows: usize,
}

impl ScanSummary {
    pub fn from_rows(rows: &[ScanRow]) -> Self {
        let rows_passed = rows.iter().filter(|r| r.pass).count();
        ScanSummary {
            rows_total: rows.len(),
            rows_passed,
            claim_holds: rows_passed == rows.len(),
            gamma_rows: rows.iter().filter(|r| r.in_gamma).count(),
        }
    }
}

/// Wall-clock seconds per phase; excluded from determinism comparisons.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Timing {
    pub total_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema_version: u32,
    pub scan_id: String,
    pub n: u32,
    /// Reduction polynomial, hex.
    pub modulus: String,
    pub i_list: Vec<u32>,
    pub index_packing: String,
    pub grid: String,
    pub rows: Vec<ScanRow>,
    pub summary: ScanSummary,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<Timing>,
}

impl ScanReport {
    pub fn new(
        scan_id: impl Into<String>,
        n: u32,
        modulus: u32,
        i_list: Vec<u32>,
        grid: impl Into<String>,
        mut rows: Vec<ScanRow>,
    ) -> Self {
        rows.sort_by_key(|r| (r.i, r.alpha, r.beta));
        let summary = ScanSummary::from_rows(&rows);
        ScanReport {
            schema_version: SCHEMA_VERSION,
            scan_id: scan_id.into(),
            n,
            modulus: format!("{modulus:#x}"),
            i_list,
            index_packing: INDEX_PACKING.to_string(),
            grid: grid.into(),
            rows,
            summary,
            timing: None,
        }
    }

    /// The copy compared in determinism checks.
    pub fn without_timing(&self) -> ScanReport {
        ScanReport {
            timing: None,
            ..self.clone()
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<ScanReport, ReportError> {
        // version gate before full deserialization
        #[derive(Deserialize)]
        struct VersionProbe {
            schema_version: u32,
        }
        let probe: VersionProbe =
            serde_json::from_str(s).map_err(|e| ReportError::Parse(e.to_string()))?;
        if probe.schema_version != SCHEMA_VERSION {
            return Err(ReportError::SchemaVersion {
                expected: SCHEMA_VERSION,
                found: probe.schema_version,
            });
        }
        let mut report: ScanReport =
            serde_json::from_str(s).map_err(|e| ReportError::Parse(e.to_string()))?;
        report.summary = ScanSummary::from_rows(&report.rows);
        Ok(report)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("#schema_version={}\n", self.schema_version));
        out.push_str(&format!("#scan_id={}\n", self.scan_id));
        out.push_str(&format!("#n={}\n", self.n));
        out.push_str(&format!("#modulus={}\n", self.modulus));
        out.push_str(&format!(
            "#i_list={}\n",
            self.i_list
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        ));
        out.push_str(&format!("#index_packing={}\n", self.index_packing));
        out.push_str(&format!("#grid={}\n", self.grid));
        if let Some(t) = &self.timing {
            out.push_str(&format!("#timing_total_seconds={}\n", t.total_seconds));
        }
        out.push_str(
            "i,alpha,beta,in_gamma,is_permutation,differential_uniformity,\
             boomerang_uniformity,bu_method,nonlinearity,algebraic_degree,witness,pass,note\n",
        );
        let opt = |v: Option<u32>| v.map(|x| x.to_string()).unwrap_or_default();
        for r in &self.rows {
            let witness = r
                .witness
                .as_ref()
                .map(|w| {
                    let probes = w
                        .probe_points
                        .iter()
                        .map(|p| p.to_string())
                        .collect::<Vec<_>>()
                        .join("|");
                    if probes.is_empty() {
                        format!("{}:{}:{}:{}", w.a, w.b, w.c, w.d)
                    } else {
                        format!("{}:{}:{}:{}:{probes}", w.a, w.b, w.c, w.d)
                    }
                })
                .unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.i,
                r.alpha,
                r.beta,
                r.in_gamma,
                r.is_permutation,
                opt(r.differential_uniformity),
                opt(r.boomerang_uniformity),
                r.bu_method.map(|m| m.as_str()).unwrap_or(""),
                opt(r.nonlinearity),
                opt(r.algebraic_degree),
                witness,
                r.pass,
                r.note.clone().unwrap_or_default(),
            ));
        }
        out
    }

    pub fn from_csv(reader: impl BufRead) -> Result<ScanReport, ReportError> {
        let mut meta = std::collections::BTreeMap::new();
        let mut rows = Vec::new();
        let mut saw_header = false;
        for line in reader.lines() {
            let line = line.map_err(|e| ReportError::Io(e.to_string()))?;
            let line = line.trim_end();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some((k, v)) = rest.split_once('=') {
                    meta.insert(k.to_string(), v.to_string());
                }
                continue;
            }
            if !saw_header {
                saw_header = true; // column header line
                continue;
            }
            let cols: Vec<&str> = line.splitn(13, ',').collect();
            if cols.len() != 13 {
                return Err(ReportError::Parse(format!(
                    "expected 13 columns, got: `{line}`"
                )));
            }
            let parse_u32 = |s: &str, what: &str| -> Result<u32, ReportError> {
                s.parse()
                    .map_err(|_| ReportError::Parse(format!("bad {what}: `{s}`")))
            };
            let parse_bool = |s: &str, what: &str| -> Result<bool, ReportError> {
                s.parse()
                    .map_err(|_| ReportError::Parse(format!("bad {what}: `{s}`")))
            };
            let opt_u32 = |s: &str, what: &str| -> Result<Option<u32>, ReportError> {
                if s.is_empty() {
                    Ok(None)
                } else {
                    parse_u32(s, what).map(Some)
                }
            };
            let i = parse_u32(cols[0], "i")?;
            let witness = if cols[10].is_empty() {
                None
            } else {
                let parts: Vec<&str> = cols[10].split(':').collect();
                if parts.len() != 4 && parts.len() != 5 {
                    return Err(ReportError::Parse(format!("bad witness `{}`", cols[10])));
                }
                let probe_points = if parts.len() == 5 {
                    parts[4]
                        .split('|')
                        .map(|p| parse_u32(p, "witness probe"))
                        .collect::<Result<_, _>>()?
                } else {
                    Vec::new()
                };
                Some(GoldWitness {
                    a: parse_u32(parts[0], "witness A")?,
                    b: parse_u32(parts[1], "witness B")?,
                    c: parse_u32(parts[2], "witness C")?,
                    d: parse_u32(parts[3], "witness D")?,
                    i,
                    matched_alpha: parse_u32(cols[1], "alpha")?,
                    matched_beta: parse_u32(cols[2], "beta")?,
                    probe_points,
                })
            };
            rows.push(ScanRow {
                i,
                alpha: parse_u32(cols[1], "alpha")?,
                beta: parse_u32(cols[2], "beta")?,
                in_gamma: parse_bool(cols[3], "in_gamma")?,
                is_permutation: parse_bool(cols[4], "is_permutation")?,
                differential_uniformity: opt_u32(cols[5], "differential_uniformity")?,
                boomerang_uniformity: opt_u32(cols[6], "boomerang_uniformity")?,
                bu_method: if cols[7].is_empty() {
                    None
                } else {
                    Some(BuMethod::parse(cols[7])?)
                },
                nonlinearity: opt_u32(cols[8], "nonlinearity")?,
                algebraic_degree: opt_u32(cols[9], "algebraic_degree")?,
                witness,
                pass: parse_bool(cols[11], "pass")?,
                note: if cols[12].is_empty() {
                    None
                } else {
                    Some(cols[12].to_string())
                },
            });
        }
        let get = |k: &str| -> Result<&String, ReportError> {
            meta.get(k)
                .ok_or_else(|| ReportError::Parse(format!("missing #{k}= header")))
        };
        let version: u32 = get("schema_version")?
            .parse()
            .map_err(|_| ReportError::Parse("bad schema_version".into()))?;
        if version != SCHEMA_VERSION {
            return Err(ReportError::SchemaVersion {
                expected: SCHEMA_VERSION,
                found: version,
            });
        }
        let summary = ScanSummary::from_rows(&rows);
        Ok(ScanReport {
            schema_version: version,
            scan_id: get("scan_id")?.clone(),
            n: get("n")?
                .parse()
                .map_err(|_| ReportError::Parse("bad n".into()))?,
            modulus: get("modulus")?.clone(),
            i_list: get("i_list")?
                .split_whitespace()
                .map(|t| {
                    t.parse()
                        .map_err(|_| ReportError::Parse("bad i_list".into()))
                })
                .collect::<Result<_, _>>()?,
            index_packing: get("index_packing")?.clone(),
            grid: get("grid")?.clone(),
            rows,
            summary,
            timing: meta
                .get("timing_total_seconds")
                .and_then(|s| s.parse().ok())
                .map(|total_seconds| Timing { total_seconds }),
        })
    }

    pub fn emit(&self, format: ReportFormat, path: impl AsRef<Path>) -> Result<(), ReportError> {
        let body = match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
        };
        let mut f = std::fs::File::create(path).map_err(|e| ReportError::Io(e.to_string()))?;
        f.write_all(body.as_bytes())
            .map_err(|e| ReportError::Io(e.to_string()))
    }

    /// Loads a report, sniffing the format from the first byte
    /// (`{` for JSON, `#` for CSV).
    pub fn load(path: impl AsRef<Path>) -> Result<ScanReport, ReportError> {
        let body = std::fs::read_to_string(path).map_err(|e| ReportError::Io(e.to_string()))?;
        match body.trim_start().chars().next() {
            Some('{') => ScanReport::from_json(&body),
            Some('#') => ScanReport::from_csv(body.as_bytes()),
            _ => Err(ReportError::Parse("unrecognized report format".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<ScanRow> {
        vec![
            ScanRow {
                i: 1,
                alpha: 1,
                beta: 1,
                in_gamma: true,
                is_permutation: true,
                differential_uniformity: Some(4),
                boomerang_uniformity: Some(4),
                bu_method: Some(BuMethod::Direct),
                nonlinearity: Some(24),
                algebraic_degree: Some(2),
                witness: None,
                pass: true,
                note: None,
            },
            ScanRow {
                i: 1,
                alpha: 2,
                beta: 5,
                in_gamma: true,
                is_permutation: true,
                differential_uniformity: Some(4),
                boomerang_uniformity: Some(4),
                bu_method: Some(BuMethod::Criterion),
                nonlinearity: Some(24),
                algebraic_degree: Some(2),
                witness: Some(GoldWitness {
                    a: 1,
                    b: 4,
                    c: 2,
                    d: 1,
                    i: 1,
                    matched_alpha: 2,
                    matched_beta: 5,
                    probe_points: vec![8, 1, 9, 1],
                }),
                pass: true,
                note: None,
            },
            ScanRow {
                i: 2,
                alpha: 3,
                beta: 4,
                in_gamma: false,
                is_permutation: false,
                differential_uniformity: None,
                boomerang_uniformity: None,
                bu_method: None,
                nonlinearity: None,
                algebraic_degree: None,
                witness: None,
                pass: true,
                note: Some("outside Gamma".into()),
            },
        ]
    }

    fn sample_report() -> ScanReport {
        ScanReport::new(
            "theorem1",
            3,
            0b1011,
            vec![1, 2],
            "alpha,beta in F_q*",
            sample_rows(),
        )
    }

    #[test]
    fn json_round_trip_is_field_for_field() {
        let r = sample_report();
        let back = ScanReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn csv_round_trip_is_field_for_field() {
        let mut r = sample_report();
        let back = ScanReport::from_csv(r.to_csv().as_bytes()).unwrap();
        assert_eq!(back, r);
        // row count equals the grid size
        assert_eq!(
            r.to_csv().lines().filter(|l| !l.starts_with('#')).count() - 1,
            r.rows.len()
        );
        r.timing = Some(Timing {
            total_seconds: 1.25,
        });
        let back = ScanReport::from_csv(r.to_csv().as_bytes()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn schema_version_bump_is_an_explicit_error() {
        let mut r = sample_report();
        r.schema_version = SCHEMA_VERSION + 1;
        let json = serde_json::to_string(&r).unwrap();
        assert!(matches!(
            ScanReport::from_json(&json),
            Err(ReportError::SchemaVersion { found, .. }) if found == SCHEMA_VERSION + 1
        ));
        let csv = r.to_csv();
        assert!(matches!(
            ScanReport::from_csv(csv.as_bytes()),
            Err(ReportError::SchemaVersion { .. })
        ));
    }

    #[test]
    fn summary_is_recomputed_on_load() {
        let mut r = sample_report();
        r.summary.claim_holds = false;
        r.summary.rows_passed = 0;
        let back = ScanReport::from_json(&serde_json::to_string(&r).unwrap()).unwrap();
        assert!(back.summary.claim_holds);
        assert_eq!(back.summary.rows_passed, 3);
        assert_eq!(back.summary.gamma_rows, 2);
    }

    #[test]
    fn rows_are_sorted_on_construction() {
        let mut rows = sample_rows();
        rows.reverse();
        let r = ScanReport::new("x", 3, 0b1011, vec![1], "g", rows);
        let keys: Vec<_> = r.rows.iter().map(|r| (r.i, r.alpha, r.beta)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn emit_and_load_files() {
        let dir = tempfile::tempdir().unwrap();
        let r = sample_report();
        let json_path = dir.path().join("r.json");
        let csv_path = dir.path().join("r.csv");
        r.emit(ReportFormat::Json, &json_path).unwrap();
        r.emit(ReportFormat::Csv, &csv_path).unwrap();
        assert_eq!(ScanReport::load(&json_path).unwrap(), r);
        assert_eq!(ScanReport::load(&csv_path).unwrap(), r);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}
