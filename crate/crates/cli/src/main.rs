//! Command-line driver: named scans, S-box analysis, butterfly table
//! construction, Gamma enumeration, and Gold equivalence search.
//!
//! Exit codes: 0 when every scanned claim holds, 1 when a violation or
//! counterexample is found, 2 on usage or configuration errors.

use anyhow::{anyhow, Context, Result};
use bfly_core::analysis;
use bfly_core::butterfly::{self, ButterflyParams};
use bfly_core::equivalence::{self, GoldWitness};
use bfly_core::field::{gcd, FieldSpec};
use bfly_core::report::{ReportFormat, ScanReport};
use bfly_core::sbox::Sbox;
use bfly_core::scans;
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "bfly",
    version,
    about = "Butterfly permutation scans over GF(2^n)^2"
)]
struct Cli {
    /// Base field extension degree n (odd for butterfly work)
    #[arg(long, global = true, default_value_t = 3)]
    n: u32,

    /// Reduction polynomial as hex (defaults to the lowest-weight irreducible)
    #[arg(long, global = true, value_parser = parse_hex)]
    modulus: Option<u32>,

    /// Branch indices i, comma separated (default: all i < n coprime to n)
    #[arg(long, global = true, value_delimiter = ',')]
    i: Vec<u32>,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Write a JSON report to this path
    #[arg(long, global = true)]
    json: Option<PathBuf>,

    /// Write a CSV report to this path
    #[arg(long, global = true)]
    csv: Option<PathBuf>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a named reproduction sweep
    Scan {
        #[command(subcommand)]
        which: ScanCmd,
    },
    /// Compute cryptographic profiles of an S-box file
    Analyze {
        /// S-box file (m=<int> header then 2^m hex lines)
        #[arg(long = "in")]
        input: PathBuf,
        /// Differential spectrum / uniformity
        #[arg(long)]
        ddt: bool,
        /// Boomerang spectrum / uniformity (requires a bijection)
        #[arg(long)]
        bct: bool,
        /// Walsh spectrum / nonlinearity
        #[arg(long)]
        walsh: bool,
        /// Algebraic degree
        #[arg(long)]
        degree: bool,
    },
    /// Butterfly table construction and Gamma enumeration
    Butterfly {
        #[command(subcommand)]
        which: ButterflyCmd,
    },
    /// Equivalence searches
    Equiv {
        #[command(subcommand)]
        which: EquivCmd,
    },
}

#[derive(Subcommand)]
enum ScanCmd {
    /// Permutation + BU 4 + nonlinearity + degree on every Gamma member
    Theorem1,
    /// No permutation with BU 4 outside Gamma
    Conjecture,
    /// No open butterfly attains BU 4
    Open,
    /// Gold witness exists for every Gamma member
    Gold,
}

#[derive(Subcommand)]
enum ButterflyCmd {
    /// Build a butterfly table and write it as an S-box file
    Build {
        #[arg(long, value_parser = parse_hex)]
        alpha: u32,
        #[arg(long, value_parser = parse_hex)]
        beta: u32,
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        out: PathBuf,
    },
    /// Enumerate the (alpha, beta) grid with Gamma membership and phi values
    Gamma,
}

#[derive(Subcommand)]
enum EquivCmd {
    /// Search (A, B, C, D) with G_i = f_i for one Gamma member
    Gold {
        #[arg(long, value_parser = parse_hex)]
        alpha: u32,
        #[arg(long, value_parser = parse_hex)]
        beta: u32,
        /// Report every witness instead of the lexicographic least
        #[arg(long)]
        all_witnesses: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Open,
    Closed,
}

fn parse_hex(s: &str) -> Result<u32, String> {
    let t = s.trim_start_matches("0x").trim_start_matches("0X");
    u32::from_str_radix(t, 16).map_err(|e| format!("bad hex value `{s}`: {e}"))
}

fn field_spec(cli: &Cli) -> Result<FieldSpec> {
    match cli.modulus {
        Some(m) => FieldSpec::new(cli.n, m).map_err(Into::into),
        None => FieldSpec::with_default_modulus(cli.n).map_err(Into::into),
    }
}

fn branch_indices(cli: &Cli, spec: &FieldSpec) -> Result<Vec<u32>> {
    let list: Vec<u32> = if cli.i.is_empty() {
        (1..spec.n())
            .filter(|&i| gcd(i as u64, spec.n() as u64) == 1)
            .collect()
    } else {
        cli.i.clone()
    };
    for &i in &list {
        if i == 0 || gcd(i as u64, spec.n() as u64) != 1 {
            return Err(anyhow!(
                "branch index i={i} is not coprime to n={}",
                spec.n()
            ));
        }
    }
    Ok(list)
}

fn emit_report(cli: &Cli, report: &ScanReport) -> Result<()> {
    if let Some(path) = &cli.json {
        report
            .emit(ReportFormat::Json, path)
            .context("writing JSON report")?;
    }
    if let Some(path) = &cli.csv {
        report
            .emit(ReportFormat::Csv, path)
            .context("writing CSV report")?;
    }
    Ok(())
}

fn print_scan_outcome(report: &ScanReport) {
    println!(
        "scan {} (n={}, i={:?}): {}/{} rows pass; claim {}",
        report.scan_id,
        report.n,
        report.i_list,
        report.summary.rows_passed,
        report.summary.rows_total,
        if report.summary.claim_holds {
            "HOLDS"
        } else {
            "VIOLATED"
        }
    );
    for row in report.rows.iter().filter(|r| !r.pass) {
        println!(
            "  violation: i={} alpha={:#x} beta={:#x} perm={} DU={:?} BU={:?} note={}",
            row.i,
            row.alpha,
            row.beta,
            row.is_permutation,
            row.differential_uniformity,
            row.boomerang_uniformity,
            row.note.as_deref().unwrap_or("-")
        );
    }
    if report.scan_id == "open_butterfly" {
        for &i in &report.i_list {
            let mut hist: std::collections::BTreeMap<u32, usize> = Default::default();
            for row in report.rows.iter().filter(|r| r.i == i) {
                if let Some(bu) = row.boomerang_uniformity {
                    *hist.entry(bu).or_insert(0) += 1;
                }
            }
            let cells: Vec<String> = hist.iter().map(|(bu, c)| format!("{bu}:{c}")).collect();
            println!("  BU histogram (i={i}): {}", cells.join(" "));
        }
    }
}

#[derive(Serialize)]
struct AnalyzeReport {
    m: u32,
    is_permutation: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    differential_uniformity: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    boomerang_uniformity: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nonlinearity: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    algebraic_degree: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ddt_histogram: Option<std::collections::BTreeMap<u32, u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bct_histogram: Option<std::collections::BTreeMap<u32, u64>>,
}

fn run_analyze(
    cli: &Cli,
    input: &PathBuf,
    ddt: bool,
    bct: bool,
    walsh: bool,
    degree: bool,
) -> Result<u8> {
    let s = Sbox::load(input).with_context(|| format!("loading {}", input.display()))?;
    // no flags means everything
    let all = !(ddt || bct || walsh || degree);
    let mut rep = AnalyzeReport {
        m: s.m(),
        is_permutation: s.is_permutation(),
        differential_uniformity: None,
        boomerang_uniformity: None,
        nonlinearity: None,
        algebraic_degree: None,
        ddt_histogram: None,
        bct_histogram: None,
    };
    if ddt || all {
        let summary = analysis::ddt(&s);
        rep.differential_uniformity = Some(summary.max_value);
        rep.ddt_histogram = Some(summary.histogram);
    }
    if bct || all {
        let summary = analysis::bct_via_inverse(&s)
            .map_err(|e| anyhow!("BCT on {}: {e}", input.display()))?;
        rep.boomerang_uniformity = Some(summary.max_value);
        rep.bct_histogram = Some(summary.histogram);
    }
    if walsh || all {
        rep.nonlinearity = Some(analysis::walsh_nonlinearity(&s).nonlinearity);
    }
    if degree || all {
        rep.algebraic_degree = Some(s.algebraic_degree());
    }
    let body = serde_json::to_string_pretty(&rep)?;
    match &cli.json {
        Some(path) => std::fs::write(path, &body).context("writing analyze report")?,
        None => println!("{body}"),
    }
    Ok(0)
}

fn single_index(cli: &Cli, spec: &FieldSpec) -> Result<u32> {
    let list = branch_indices(cli, spec)?;
    match list[..] {
        [i] => Ok(i),
        _ => Err(anyhow!("this command needs exactly one --i, got {list:?}")),
    }
}

fn run_gamma(cli: &Cli, spec: FieldSpec, index: u32) -> Result<u8> {
    let mut out = String::from("alpha,beta,in_gamma,phi1,phi2,phi3,phi4\n");
    for alpha in 1..spec.q() {
        for beta in 1..spec.q() {
            let p = ButterflyParams::new(spec, index, alpha, beta)?;
            let w = butterfly::gamma_membership(&p);
            let [p1, p2, p3, p4] = w.coeffs.phi;
            out.push_str(&format!(
                "{alpha:x},{beta:x},{},{p1:x},{p2:x},{p3:x},{p4:x}\n",
                w.in_gamma
            ));
        }
    }
    match cli.csv.as_ref() {
        Some(path) => std::fs::write(path, &out).context("writing gamma CSV")?,
        None => print!("{out}"),
    }
    Ok(0)
}

#[derive(Serialize)]
struct GoldSearchReport {
    n: u32,
    i: u32,
    alpha: u32,
    beta: u32,
    witness: Option<GoldWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    all_witnesses: Option<Vec<GoldWitness>>,
    witness_count: Option<usize>,
}

fn run_equiv_gold(
    cli: &Cli,
    spec: FieldSpec,
    index: u32,
    alpha: u32,
    beta: u32,
    all: bool,
) -> Result<u8> {
    let p = ButterflyParams::new(spec, index, alpha, beta)?;
    let w = butterfly::gamma_membership(&p);
    if !w.in_gamma {
        return Err(anyhow!(
            "(alpha, beta) = ({alpha:#x}, {beta:#x}) is outside Gamma (reason: {:?})",
            w.reason
        ));
    }
    let target = butterfly::univariate_sbox(&p);
    let witness = equivalence::find_gold_equivalence(&p, &target)?;
    let all_witnesses = if all {
        Some(equivalence::all_gold_witnesses(&p, &target)?)
    } else {
        None
    };
    let rep = GoldSearchReport {
        n: spec.n(),
        i: index,
        alpha,
        beta,
        witness_count: all_witnesses.as_ref().map(|v| v.len()),
        witness: witness.clone(),
        all_witnesses,
    };
    let body = serde_json::to_string_pretty(&rep)?;
    match cli.json.as_ref() {
        Some(path) => std::fs::write(path, &body).context("writing gold report")?,
        None => println!("{body}"),
    }
    Ok(if witness.is_some() { 0 } else { 1 })
}

fn run(cli: &Cli) -> Result<u8> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("configuring worker pool")?;
    }
    let spec = field_spec(cli)?;
    match &cli.cmd {
        Cmd::Scan { which } => {
            let i_list = branch_indices(cli, &spec)?;
            let report = match which {
                ScanCmd::Theorem1 => scans::scan_theorem1(spec, &i_list)?,
                ScanCmd::Conjecture => scans::scan_conjecture(spec, &i_list)?,
                ScanCmd::Open => scans::scan_open_butterfly(spec, &i_list)?,
                ScanCmd::Gold => scans::scan_gold(spec, &i_list)?,
            };
            emit_report(cli, &report)?;
            print_scan_outcome(&report);
            Ok(if report.summary.claim_holds { 0 } else { 1 })
        }
        Cmd::Analyze {
            input,
            ddt,
            bct,
            walsh,
            degree,
        } => run_analyze(cli, input, *ddt, *bct, *walsh, *degree),
        Cmd::Butterfly { which } => match which {
            ButterflyCmd::Build {
                alpha,
                beta,
                kind,
                out,
            } => {
                let index = single_index(cli, &spec)?;
                let p = ButterflyParams::new(spec, index, *alpha, *beta)?;
                let table = match kind {
                    Kind::Open => butterfly::open_butterfly(&p),
                    Kind::Closed => butterfly::closed_butterfly(&p),
                };
                table
                    .save(out)
                    .map_err(|e| anyhow!("writing {}: {e}", out.display()))?;
                println!(
                    "wrote {} ({} entries, m={})",
                    out.display(),
                    table.len(),
                    table.m()
                );
                Ok(0)
            }
            ButterflyCmd::Gamma => {
                let index = single_index(cli, &spec)?;
                run_gamma(cli, spec, index)
            }
        },
        Cmd::Equiv { which } => match which {
            EquivCmd::Gold {
                alpha,
                beta,
                all_witnesses,
            } => {
                let index = single_index(cli, &spec)?;
                run_equiv_gold(cli, spec, index, *alpha, *beta, *all_witnesses)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
