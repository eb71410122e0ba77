//! Command-line front end. Exit status: 0 on success, 1 when `verify` finds a
//! mismatch, 2 on bad input or any failure to compute.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::algorithm::{CohomologyEngine, CohomologyVector, SupportTable, DEFAULT_USR_CAP};
use crate::fan::{parse_fan, Fan};
use crate::oracle::{verify_engine, Oracle, OracleReport, ScanBox};
use crate::simplicial::indices_of;
use crate::toric::ToricContext;

#[derive(Debug, Parser)]
#[command(name = "toric-cohom", version, about = "Line bundle cohomology on simplicial complete toric varieties")]
pub struct Cli {
  #[command(subcommand)]
  pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
  /// Fan diagnostics, Stanley–Reisner generators, U_SR and the Λ_I complexes.
  Info(InfoArgs),
  /// h^0..h^d of one divisor.
  Cohom(CohomArgs),
  /// Cohomology of every divisor in a box.
  Table(TableArgs),
  /// Compare against the local-cohomology oracle on a box.
  Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct InfoArgs {
  pub fan:  PathBuf,
  #[arg(long)]
  pub json: bool,
}

#[derive(Debug, Args)]
pub struct CohomArgs {
  pub fan:     PathBuf,
  /// Coefficients a_ρ of D = Σ a_ρ D_ρ, comma separated.
  #[arg(long, allow_hyphen_values = true, value_delimiter = ',', required = true)]
  pub divisor: Vec<i64>,
  /// List the (I, i) terms that contribute.
  #[arg(long)]
  pub explain: bool,
  #[arg(long)]
  pub json:    bool,
}

#[derive(Debug, Args)]
pub struct TableArgs {
  pub fan:  PathBuf,
  /// `lo:hi` per leading coordinate, comma separated; the rest stay 0.
  #[arg(long = "box", allow_hyphen_values = true, required = true)]
  pub range: String,
  #[arg(long)]
  pub json:  bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
  pub fan:        PathBuf,
  /// `lo:hi` for every coordinate, or one `lo:hi` for all.
  #[arg(long = "box", allow_hyphen_values = true)]
  pub range:      Option<String>,
  #[arg(long)]
  pub json:       bool,
  /// Drop one Stanley–Reisner generator before comparing.
  #[arg(long, hide = true)]
  pub corrupt_sr: Option<usize>,
}

pub fn main() -> ExitCode {
  let cli = match Cli::try_parse() {
    Ok(cli) => cli,
    Err(e) => {
      let _ = e.print();
      return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
    },
  };
  match run(&cli) {
    Ok(out) => {
      print!("{}", out.text);
      ExitCode::from(out.code)
    },
    Err(e) => {
      eprintln!("error: {e:#}");
      ExitCode::from(2)
    },
  }
}

pub struct Output {
  pub text: String,
  pub code: u8,
}

impl Output {
  fn ok(text: String) -> Self { Self { text, code: 0 } }
}

pub fn run(cli: &Cli) -> Result<Output> {
  match &cli.command {
    Command::Info(a) => info(a),
    Command::Cohom(a) => cohom(a),
    Command::Table(a) => table(a),
    Command::Verify(a) => verify(a),
  }
}

fn load(path: &Path) -> Result<Fan> {
  let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
  parse_fan(&text).with_context(|| format!("parsing {}", path.display()))
}

fn fan_name(path: &Path) -> String {
  path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| path.display().to_string())
}

fn to_json(v: &impl Serialize) -> String { serde_json::to_string_pretty(v).expect("serializable") + "\n" }

fn fmt_list(xs: &[usize]) -> String {
  let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
  format!("{{{}}}", parts.join(","))
}

/// `lo:hi[,lo:hi...]`
pub fn parse_ranges(s: &str) -> Result<Vec<(i64, i64)>> {
  s.split(',')
    .map(|part| {
      let (lo, hi) = part.trim().split_once(':').with_context(|| format!("range `{part}` is not lo:hi"))?;
      Ok((
        lo.trim().parse().with_context(|| format!("bad bound `{lo}`"))?,
        hi.trim().parse().with_context(|| format!("bad bound `{hi}`"))?,
      ))
    })
    .collect()
}

fn info(a: &InfoArgs) -> Result<Output> {
  let fan = load(&a.fan)?;
  let diag = fan.validate();
  if !diag.ok() {
    let text = if a.json {
      to_json(&json!({ "fan": fan_name(&a.fan), "diagnostics": diag }))
    } else {
      let mut t = String::new();
      writeln!(t, "fan {} is not simplicial and complete:", fan_name(&a.fan))?;
      for m in &diag.messages {
        writeln!(t, "  {m}")?;
      }
      t
    };
    return Ok(Output { text, code: 2 });
  }
  let ctx = ToricContext::new(fan.clone())?;
  let table = SupportTable::new(ctx.complex(), ctx.dim())?;
  let n = ctx.n_rays();
  let dual_filtered: Vec<_> =
    table.entries().filter(|(s, e)| e.dual_in_usr && !s.complement(n).is_empty()).map(|(s, _)| s).collect();

  if a.json {
    let supports: Vec<_> = table
      .entries()
      .map(|(s, e)| {
        json!({
          "support": s,
          "generators": e.generators,
          "dual_in_usr": e.dual_in_usr,
          "lambda": e.lambda.maximal_face_lists(),
          "homology": e.homology,
        })
      })
      .collect();
    let g = ctx.class_group();
    let value = json!({
      "fan": fan_name(&a.fan),
      "dim": ctx.dim(),
      "n_rays": n,
      "n_cones": fan.max_cones.len(),
      "diagnostics": diag,
      "class_group": { "free_rank": g.free_rank(), "torsion": g.torsion_invariants(), "display": g.to_string() },
      "sr": table.sr().as_lists(),
      "usr_count": table.usr_len(),
      "dual_filtered": dual_filtered,
      "supports": supports,
    });
    return Ok(Output::ok(to_json(&value)));
  }

  let mut t = String::new();
  writeln!(t, "fan {}: dim {}, {} rays, {} maximal cones", fan_name(&a.fan), ctx.dim(), n, fan.max_cones.len())?;
  writeln!(t, "simplicial, complete, rays span")?;
  writeln!(t, "class group: {}", ctx.class_group())?;
  let sr: Vec<String> = table.sr().generators().iter().map(|&g| fmt_list(&indices_of(g))).collect();
  writeln!(t, "SR generators ({}): {}", sr.len(), sr.join(" "))?;
  writeln!(t, "|U_SR| = {}", table.usr_len())?;
  let df: Vec<String> = dual_filtered.iter().map(|s| s.to_string()).collect();
  writeln!(t, "I with Î also in U_SR ({}): {}", df.len(), df.join(" "))?;
  writeln!(t, "support sets:")?;
  for (s, e) in table.entries() {
    let lambda: Vec<String> = e.lambda.maximal_face_lists().iter().map(|f| fmt_list(f)).collect();
    let homology = if e.homology.is_zero() { "acyclic".to_string() } else { e.homology.to_string() };
    writeln!(
      t,
      "  I={s}  gens={}  Λ=[{}]  {homology}{}",
      fmt_list(&e.generators),
      lambda.join(" "),
      if e.dual_in_usr { "  Î∈U_SR" } else { "" }
    )?;
  }
  Ok(Output::ok(t))
}

fn render_vector(v: &CohomologyVector, explain: bool) -> Result<String> {
  let mut t = String::new();
  writeln!(t, "h = {:?}", v.dims)?;
  if explain {
    writeln!(t, "class: {}", v.class)?;
    for term in &v.breakdown {
      writeln!(
        t,
        "  h^{} += {} * {}  (I={})",
        term.degree, term.multiplicity, term.homology_dim, term.support
      )?;
    }
  }
  Ok(t)
}

fn cohom(a: &CohomArgs) -> Result<Output> {
  let engine = CohomologyEngine::from_fan(load(&a.fan)?)?;
  let v = engine.cohomology(&a.divisor)?;
  if a.json {
    let value = if a.explain {
      serde_json::to_value(&v)?
    } else {
      json!({ "divisor": v.divisor, "class": v.class, "dims": v.dims })
    };
    return Ok(Output::ok(to_json(&value)));
  }
  Ok(Output::ok(render_vector(&v, a.explain)?))
}

#[derive(Serialize)]
struct Row {
  divisor: Vec<i64>,
  dims:    Vec<u64>,
}

fn table(a: &TableArgs) -> Result<Output> {
  let engine = CohomologyEngine::from_fan(load(&a.fan)?)?;
  let n = engine.context().n_rays();
  let ranges = parse_ranges(&a.range)?;
  if ranges.len() > n {
    bail!("box has {} ranges but the fan has {n} rays", ranges.len());
  }
  let mut lo = vec![0; n];
  let mut hi = vec![0; n];
  for (k, &(l, h)) in ranges.iter().enumerate() {
    lo[k] = l;
    hi[k] = h;
  }
  let scan = ScanBox { lo, hi };
  let mut points = Vec::new();
  scan.for_each(|p| points.push(p.to_vec()));
  let rows: Vec<Row> = points
    .into_par_iter()
    .map(|p| Ok(Row { dims: engine.cohomology(&p)?.dims, divisor: p }))
    .collect::<Result<_>>()?;
  if a.json {
    return Ok(Output::ok(to_json(&rows)));
  }
  let mut t = String::new();
  for r in &rows {
    writeln!(t, "{:?}\t{:?}", r.divisor, r.dims)?;
  }
  Ok(Output::ok(t))
}

fn verify(a: &VerifyArgs) -> Result<Output> {
  let fan = load(&a.fan)?;
  let ctx = ToricContext::new(fan.clone())?;
  let n = ctx.n_rays();
  let scan = match &a.range {
    None => ScanBox::default_for(&fan),
    Some(s) => {
      let ranges = parse_ranges(s)?;
      match ranges.len() {
        1 => ScanBox::uniform(n, ranges[0].0, ranges[0].1),
        k if k == n => ScanBox { lo: ranges.iter().map(|r| r.0).collect(), hi: ranges.iter().map(|r| r.1).collect() },
        k => bail!("box has {k} ranges but the fan has {n} rays"),
      }
    },
  };
  let engine = match a.corrupt_sr {
    None => CohomologyEngine::new(ctx.clone())?,
    Some(k) => {
      let honest = SupportTable::new(ctx.complex(), ctx.dim())?;
      if k >= honest.sr().len() {
        bail!("SR generator {k} out of range ({} generators)", honest.sr().len());
      }
      let table = SupportTable::from_sr(honest.sr().without(k), n, ctx.dim(), DEFAULT_USR_CAP)?;
      CohomologyEngine::with_table(ctx.clone(), table)
    },
  };
  let oracle = Oracle::new(ctx)?;
  let report = verify_engine(&engine, &oracle, &fan_name(&a.fan), &scan)?;
  let code = if report.passed() { 0 } else { 1 };
  let text = if a.json { to_json(&report) } else { render_report(&report)? };
  Ok(Output { text, code })
}

fn render_report(r: &OracleReport) -> Result<String> {
  let mut t = String::new();
  let ranges: Vec<String> = r.scan_box.lo.iter().zip(&r.scan_box.hi).map(|(l, h)| format!("{l}:{h}")).collect();
  writeln!(t, "fan {}, box {}", r.fan, ranges.join(","))?;
  writeln!(
    t,
    "{} graded checks, {} bundle checks over {} classes ({} skipped: not contained in the box)",
    r.graded_checks, r.bundle_checks, r.classes_compared, r.classes_skipped
  )?;
  for m in &r.mismatches {
    writeln!(t, "  mismatch {:?} p={:?} i={}: algorithm {} oracle {}", m.kind, m.p, m.degree, m.algorithm, m.oracle)?;
  }
  writeln!(t, "{} matches, {} mismatches: {}", r.match_count, r.mismatch_count, if r.passed() { "OK" } else { "FAIL" })?;
  Ok(t)
}
