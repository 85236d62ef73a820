//! Orchestration: shell caching, census tables, Clifford orbits, entanglement
//! census, the E8 plane projection and the full reproduction run.
//!
//! Every command returns a typed report.  Rendering is separate so the CLI and the
//! tests share one code path.  Exact rationals render as `num/den`, floats with 12
//! significant digits.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde_json::json;

use crate::arith::{BigRational, EisensteinInt, GaussianInt, Ring, UnitGroup};
use crate::clifford::{
    check_group_axioms, generate_clifford_qutrit, orbit_partition, stabiliser_groups_qutrit,
    stabiliser_state, verify_e6_correspondence, CorrespondenceReport,
};
use crate::entangle::{
    concurrence_profile, pairwise_concurrence_2qubit, ConcurrenceProfile, EntanglementClass,
};
use crate::error::{Error, Result};
use crate::lattice::{
    build_lattice, enumerate_shell_with_budget, theta_check, LatticeName, LatticeSpec, Shell,
    ShellVector, ThetaCheck, DEFAULT_NODE_BUDGET,
};
use crate::magic::{
    classify_all, mub_orbit_check, wh_covariance_check, xi_alpha, MagicClass, MagicReport, WhTable,
};
use crate::state::{dedup, ShellRing, StateSet};

/// Environment variable that overrides the cache directory.
pub const CACHE_ENV: &str = "MAGICLATTICE_CACHE";

/// Shells that are only computed on request.
pub const HEAVY_SHELLS: &[(LatticeName, u64)] = &[(LatticeName::BW16, 8)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::Unsupported(format!("output format `{s}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub lattice: LatticeName,
    /// Empty means the default norms of the lattice.
    pub norms: Vec<u64>,
    pub cache_dir: Option<PathBuf>,
    pub format: OutputFormat,
    pub threads: Option<usize>,
    pub node_budget: u64,
    pub include_heavy: bool,
}

impl PipelineConfig {
    pub fn new(lattice: LatticeName) -> Self {
        Self {
            lattice,
            norms: Vec::new(),
            cache_dir: None,
            format: OutputFormat::Csv,
            threads: None,
            node_budget: DEFAULT_NODE_BUDGET,
            include_heavy: false,
        }
    }

    /// The cache directory, with the environment variable taking precedence.
    pub fn resolved_cache_dir(&self) -> Option<PathBuf> {
        match std::env::var_os(CACHE_ENV) {
            Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
            _ => self.cache_dir.clone(),
        }
    }

    /// Requested norms, or the defaults.  Heavy shells need `include_heavy`.
    pub fn resolved_norms(&self) -> Result<Vec<u64>> {
        let norms = if self.norms.is_empty() {
            default_norms(self.lattice, self.include_heavy)
        } else {
            self.norms.clone()
        };
        for &n in &norms {
            if n == 0 {
                return Err(Error::InvalidNorm {
                    lattice: self.lattice.to_string(),
                    norm: n,
                    reason: "norm must be positive".into(),
                });
            }
            if !self.include_heavy && HEAVY_SHELLS.contains(&(self.lattice, n)) {
                return Err(Error::Unsupported(format!(
                    "{} norm {n} is a heavy shell; pass --include-heavy",
                    self.lattice
                )));
            }
        }
        Ok(norms)
    }
}

pub fn default_norms(lattice: LatticeName, include_heavy: bool) -> Vec<u64> {
    match lattice {
        LatticeName::E8 => vec![2, 4, 6, 8],
        LatticeName::BW16 if include_heavy => vec![4, 6, 8],
        LatticeName::BW16 => vec![4, 6],
        LatticeName::E6 => vec![3, 6, 9, 12, 15],
    }
}

// ---------------------------------------------------------------------------
// Shell cache

pub fn cache_path(dir: &Path, lattice: LatticeName, norm: u64) -> PathBuf {
    dir.join(format!("{}-{norm}.shell", lattice.as_str()))
}

fn cache_err(path: &Path, reason: impl Into<String>) -> Error {
    Error::Cache {
        path: path.display().to_string(),
        reason: reason.into(),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Write a shell as a header line plus one scaled coordinate vector per line,
/// sorted lexicographically.
pub fn write_shell_cache(spec: &LatticeSpec, shell: &Shell, path: &Path) -> Result<()> {
    let mut coords: Vec<&Vec<i64>> = shell.vectors.iter().map(|v| &v.coords).collect();
    coords.sort();
    let mut out = format!(
        "#magiclattice-shell v1 lattice={} norm={} scale={} count={}\n",
        spec.name,
        shell.norm,
        spec.scale,
        shell.len()
    );
    for c in coords {
        let line: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let tmp = path.with_extension("shell.tmp");
    let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
    f.write_all(out.as_bytes()).map_err(|e| io_err(&tmp, e))?;
    f.sync_all().map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

fn header_field<'a>(fields: &HashMap<&str, &'a str>, key: &str, path: &Path) -> Result<&'a str> {
    fields
        .get(key)
        .copied()
        .ok_or_else(|| cache_err(path, format!("header lacks `{key}`")))
}

/// Load and verify a cached shell: header fields, line count, vector length, norm,
/// lattice membership and uniqueness.  Vectors come back in enumeration order.
pub fn read_shell_cache(spec: &LatticeSpec, norm: u64, path: &Path) -> Result<Shell> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| cache_err(path, "empty file"))?;
    let mut parts = header.split_whitespace();
    if parts.next() != Some("#magiclattice-shell") || parts.next() != Some("v1") {
        return Err(cache_err(path, "bad header magic"));
    }
    let fields: HashMap<&str, &str> = parts.filter_map(|p| p.split_once('=')).collect();
    let expect = |key: &str, want: String| -> Result<()> {
        let got = header_field(&fields, key, path)?;
        if got != want {
            return Err(cache_err(
                path,
                format!("header {key}={got}, expected {want}"),
            ));
        }
        Ok(())
    };
    expect("lattice", spec.name.to_string())?;
    expect("norm", norm.to_string())?;
    expect("scale", spec.scale.to_string())?;
    let count: usize = header_field(&fields, "count", path)?
        .parse()
        .map_err(|_| cache_err(path, "count is not an integer"))?;

    let body: Vec<&str> = lines.filter(|l| !l.trim().is_empty()).collect();
    if body.len() != count {
        return Err(cache_err(
            path,
            format!("header count {count} but {} vectors", body.len()),
        ));
    }
    let target = BigRational::from_integer(BigInt::from(norm));
    let width = match spec.field {
        crate::lattice::CoefficientField::Integers => spec.real_dim,
        crate::lattice::CoefficientField::Eisenstein => 2 * spec.complex_dim,
    };
    let mut vectors = body
        .par_iter()
        .enumerate()
        .map(|(k, line)| {
            let coords: Vec<i64> = line
                .split_whitespace()
                .map(|t| t.parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| cache_err(path, format!("line {}: not an integer list", k + 2)))?;
            if coords.len() != width {
                return Err(cache_err(
                    path,
                    format!("line {}: {} entries, expected {width}", k + 2, coords.len()),
                ));
            }
            if spec.norm_of_coords(&coords) != target {
                return Err(cache_err(path, format!("line {}: wrong norm", k + 2)));
            }
            let coeffs = spec
                .coefficients_of(&coords)
                .ok_or_else(|| cache_err(path, format!("line {}: not a lattice vector", k + 2)))?;
            Ok(ShellVector {
                coeffs,
                coords,
                norm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    vectors.sort_unstable_by(|a, b| a.coeffs.cmp(&b.coeffs));
    if vectors.windows(2).any(|w| w[0].coeffs == w[1].coeffs) {
        return Err(cache_err(path, "duplicate vectors"));
    }
    Ok(Shell {
        lattice: spec.name,
        norm,
        vectors,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShellSource {
    Enumerated,
    Cache,
}

/// Load a shell from the cache directory, or enumerate it and write the cache.
pub fn load_or_enumerate(
    spec: &LatticeSpec,
    norm: u64,
    cache_dir: Option<&Path>,
    budget: u64,
) -> Result<(Shell, ShellSource)> {
    if let Some(dir) = cache_dir {
        let path = cache_path(dir, spec.name, norm);
        if path.exists() {
            return Ok((read_shell_cache(spec, norm, &path)?, ShellSource::Cache));
        }
        let shell = enumerate_shell_with_budget(spec, norm, budget)?;
        write_shell_cache(spec, &shell, &path)?;
        return Ok((shell, ShellSource::Enumerated));
    }
    Ok((
        enumerate_shell_with_budget(spec, norm, budget)?,
        ShellSource::Enumerated,
    ))
}

/// In-memory shell store shared by the commands of one run.
pub struct ShellStore {
    cache_dir: Option<PathBuf>,
    budget: u64,
    specs: HashMap<LatticeName, LatticeSpec>,
    shells: HashMap<(LatticeName, u64), (Shell, ShellSource)>,
}

impl ShellStore {
    pub fn new(config: &PipelineConfig) -> Self {
        Self {
            cache_dir: config.resolved_cache_dir(),
            budget: config.node_budget,
            specs: HashMap::new(),
            shells: HashMap::new(),
        }
    }

    pub fn spec(&mut self, lattice: LatticeName) -> Result<&LatticeSpec> {
        match self.specs.entry(lattice) {
            Entry::Occupied(e) => Ok(e.into_mut()),
            Entry::Vacant(e) => Ok(e.insert(build_lattice(lattice)?)),
        }
    }

    pub fn shell(&mut self, lattice: LatticeName, norm: u64) -> Result<&(Shell, ShellSource)> {
        if !self.shells.contains_key(&(lattice, norm)) {
            let (dir, budget) = (self.cache_dir.clone(), self.budget);
            let spec = self.spec(lattice)?;
            let entry = load_or_enumerate(spec, norm, dir.as_deref(), budget)?;
            self.shells.insert((lattice, norm), entry);
        }
        Ok(&self.shells[&(lattice, norm)])
    }
}

// ---------------------------------------------------------------------------
// Formatting

pub fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// 12 significant digits, trailing zeros trimmed.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (11 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn is_square(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

/// Label for `√sq`: exact when `sq` is a rational square, else `1/√k`-style.
pub fn sqrt_label(sq: &BigRational) -> String {
    if let (Some(a), Some(b)) = (is_square(sq.numer()), is_square(sq.denom())) {
        return fmt_rational(&BigRational::new(a, b));
    }
    if sq.numer().is_one() {
        return format!("1/√{}", sq.denom());
    }
    format!("√({})", fmt_rational(sq))
}

// ---------------------------------------------------------------------------
// shells

#[derive(Clone, Debug)]
pub struct ShellSummary {
    pub lattice: LatticeName,
    pub norm: u64,
    pub count: usize,
    pub theta: ThetaCheck,
    pub source: ShellSource,
    pub note: Option<String>,
}

impl ShellSummary {
    pub fn render(&self) -> String {
        let verdict = match (self.theta.checked, self.theta.ok) {
            (true, true) => "OK".to_string(),
            (true, false) => format!("MISMATCH (expected {})", self.theta.expected.unwrap_or(0)),
            (false, _) => "unchecked".to_string(),
        };
        let src = match self.source {
            ShellSource::Cache => " [cache]",
            ShellSource::Enumerated => "",
        };
        let mut s = format!(
            "{} norm={} count={} {verdict}{src}",
            self.lattice, self.norm, self.count
        );
        if let Some(n) = &self.note {
            let _ = write!(s, "\n  note: {n}");
        }
        s
    }
}

fn discrepancy_note(lattice: LatticeName, norm: u64, count: usize) -> Option<String> {
    expected_table(lattice)
        .iter()
        .find(|r| r.norm == norm)
        .and_then(|r| r.listed_total)
        .map(|listed| {
            format!(
                "reference table total column lists {listed}; enumerated shell has {count} vectors"
            )
        })
}

pub fn cmd_shells(config: &PipelineConfig, store: &mut ShellStore) -> Result<Vec<ShellSummary>> {
    let mut out = Vec::new();
    for norm in config.resolved_norms()? {
        let (shell, source) = store.shell(config.lattice, norm)?.clone();
        let spec = store.spec(config.lattice)?;
        out.push(ShellSummary {
            lattice: config.lattice,
            norm,
            count: shell.len(),
            theta: theta_check(&shell, spec),
            source,
            note: discrepancy_note(config.lattice, norm, shell.len()),
        });
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// census

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableId {
    T2,
    T3,
    T4,
}

impl TableId {
    pub fn of(lattice: LatticeName) -> Self {
        match lattice {
            LatticeName::E8 => TableId::T2,
            LatticeName::BW16 => TableId::T3,
            LatticeName::E6 => TableId::T4,
        }
    }
    pub fn as_str(self) -> &'static str {
        match self {
            TableId::T2 => "T2",
            TableId::T3 => "T3",
            TableId::T4 => "T4",
        }
    }
}

/// States of one shell sharing a Ξ₂ value.
#[derive(Clone, Debug, PartialEq)]
pub struct CensusBin {
    pub xi2: BigRational,
    pub m2: f64,
    pub class: MagicClass,
    pub states: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CensusRow {
    pub norm: u64,
    /// Sorted by Ξ₂ descending (magic ascending).
    pub bins: Vec<CensusBin>,
    pub states: usize,
    pub vectors: usize,
    pub unit_order: usize,
    pub multiplicity: Option<usize>,
}

impl CensusRow {
    /// Σ states × |units| equals the shell size and every state has multiplicity |units|.
    pub fn conserved(&self) -> bool {
        self.states * self.unit_order == self.vectors && self.multiplicity == Some(self.unit_order)
    }

    pub fn count_at(&self, xi2: &BigRational) -> usize {
        self.bins
            .iter()
            .find(|b| b.xi2 == *xi2)
            .map_or(0, |b| b.states)
    }
}

#[derive(Clone, Debug)]
pub struct TableReport {
    pub table: TableId,
    pub lattice: LatticeName,
    pub rows: Vec<CensusRow>,
}

impl TableReport {
    pub fn row(&self, norm: u64) -> Option<&CensusRow> {
        self.rows.iter().find(|r| r.norm == norm)
    }

    pub fn conserved(&self) -> bool {
        self.rows.iter().all(CensusRow::conserved)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => {
                let mut s = String::from("table,lattice,norm,xi2,m2,class,states,vectors\n");
                for r in &self.rows {
                    for b in &r.bins {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{},{},{},{}",
                            self.table.as_str(),
                            self.lattice,
                            r.norm,
                            fmt_rational(&b.xi2),
                            fmt_float(b.m2),
                            b.class,
                            b.states,
                            r.vectors
                        );
                    }
                }
                s
            }
            OutputFormat::Json => {
                let rows: Vec<_> = self
                    .rows
                    .iter()
                    .map(|r| {
                        let bins: Vec<_> = r
                            .bins
                            .iter()
                            .map(|b| {
                                json!({
                                    "xi2": fmt_rational(&b.xi2),
                                    "m2": fmt_float(b.m2),
                                    "class": b.class.as_str(),
                                    "states": b.states,
                                })
                            })
                            .collect();
                        json!({
                            "norm": r.norm,
                            "bins": bins,
                            "states": r.states,
                            "vectors": r.vectors,
                            "multiplicity": r.multiplicity,
                            "conserved": r.conserved(),
                        })
                    })
                    .collect();
                let v = json!({"table": self.table.as_str(), "lattice": self.lattice.as_str(), "rows": rows});
                serde_json::to_string_pretty(&v).unwrap_or_default() + "\n"
            }
        }
    }
}

/// States of one shell with their magic reports.
pub struct ClassifiedShell<R: Ring> {
    pub set: StateSet<R>,
    pub reports: Vec<MagicReport>,
}

pub fn classify_shell<R: ShellRing>(shell: &Shell) -> Result<ClassifiedShell<R>> {
    let set = dedup::<R>(shell)?;
    let dim = set.states.first().map_or(0, |s| s.dim());
    let table = WhTable::<R>::for_dim(dim)?;
    let reports = classify_all(&table, &set.states)?;
    Ok(ClassifiedShell { set, reports })
}

fn census_row<R: ShellRing>(c: &ClassifiedShell<R>) -> CensusRow {
    let mut bins: BTreeMap<BigRational, CensusBin> = BTreeMap::new();
    for r in &c.reports {
        bins.entry(r.xi2.clone())
            .or_insert_with(|| CensusBin {
                xi2: r.xi2.clone(),
                m2: r.m2,
                class: r.class,
                states: 0,
            })
            .states += 1;
    }
    CensusRow {
        norm: c.set.norm,
        bins: bins.into_values().rev().collect(),
        states: c.set.len(),
        vectors: c.set.shell_size,
        unit_order: UnitGroup::of::<R>().order(),
        multiplicity: c.set.uniform_multiplicity(),
    }
}

pub fn cmd_census(config: &PipelineConfig, store: &mut ShellStore) -> Result<TableReport> {
    let mut rows = Vec::new();
    for norm in config.resolved_norms()? {
        let (shell, _) = store.shell(config.lattice, norm)?;
        let row = match config.lattice {
            LatticeName::E6 => census_row(&classify_shell::<EisensteinInt>(shell)?),
            _ => census_row(&classify_shell::<GaussianInt>(shell)?),
        };
        rows.push(row);
    }
    Ok(TableReport {
        table: TableId::of(config.lattice),
        lattice: config.lattice,
        rows,
    })
}

/// One row of a reference table: Ξ₂ keys with state counts, and the shell size.
#[derive(Clone, Copy, Debug)]
pub struct ExpectedRow {
    pub norm: u64,
    pub bins: &'static [(&'static str, usize)],
    pub total: usize,
    /// Total as printed in the reference table when it differs from the truth.
    pub listed_total: Option<usize>,
    /// Known disagreement between the reference row and direct evaluation.
    pub note: Option<&'static str>,
}

/// Reference row for E8 norm 6, whose Ξ₂ labels disagree with direct evaluation.
pub const E8_NORM6_NOTE: &str =
    "reference assigns 960 states to 19/27 and 720 to 5/9; direct evaluation gives 960 at 5/9 and 720 at 19/27";

const T2: &[ExpectedRow] = &[
    ExpectedRow {
        norm: 2,
        bins: &[("1", 60)],
        total: 240,
        listed_total: None,
        note: None,
    },
    ExpectedRow {
        norm: 4,
        bins: &[("1", 60), ("7/16", 480)],
        total: 2160,
        listed_total: None,
        note: None,
    },
    ExpectedRow {
        norm: 6,
        bins: &[("19/27", 960), ("5/9", 720)],
        total: 6720,
        listed_total: None,
        note: Some(E8_NORM6_NOTE),
    },
    ExpectedRow {
        norm: 8,
        bins: &[("1", 60), ("139/256", 3840), ("7/16", 480)],
        total: 17520,
        listed_total: None,
        note: None,
    },
];

const T3: &[ExpectedRow] = &[
    ExpectedRow {
        norm: 4,
        bins: &[("1", 1080)],
        total: 4320,
        listed_total: None,
        note: None,
    },
    ExpectedRow {
        norm: 6,
        bins: &[("2/9", 15360)],
        total: 61440,
        listed_total: None,
        note: None,
    },
    ExpectedRow {
        norm: 8,
        bins: &[("1", 1080), ("7/16", 60480), ("11/32", 69120)],
        total: 522720,
        listed_total: None,
        note: None,
    },
];

const T4: &[ExpectedRow] = &[
    ExpectedRow {
        norm: 3,
        bins: &[("1", 12)],
        total: 72,
        listed_total: None,
        note: None,
    },
    ExpectedRow {
        norm: 6,
        bins: &[("1/2", 45)],
        total: 270,
        listed_total: None,
        note: None,
    },
    ExpectedRow {
        norm: 9,
        bins: &[("1", 12), ("49/81", 108)],
        total: 720,
        listed_total: None,
        note: None,
    },
    ExpectedRow {
        norm: 12,
        bins: &[("1", 12), ("17/32", 144)],
        total: 936,
        listed_total: None,
        note: None,
    },
    ExpectedRow {
        norm: 15,
        bins: &[("401/625", 216), ("353/625", 144)],
        total: 2160,
        listed_total: Some(1260),
        note: None,
    },
];

pub fn expected_table(lattice: LatticeName) -> &'static [ExpectedRow] {
    match lattice {
        LatticeName::E8 => T2,
        LatticeName::BW16 => T3,
        LatticeName::E6 => T4,
    }
}

/// Differences between a census and the embedded reference table.  Rows whose norm
/// has no reference are skipped.
pub fn diff_against_expected(report: &TableReport) -> Vec<String> {
    let mut out = Vec::new();
    for row in &report.rows {
        let Some(exp) = expected_table(report.lattice)
            .iter()
            .find(|e| e.norm == row.norm)
        else {
            continue;
        };
        let got: BTreeMap<String, usize> = row
            .bins
            .iter()
            .map(|b| (fmt_rational(&b.xi2), b.states))
            .collect();
        let want: BTreeMap<String, usize> =
            exp.bins.iter().map(|&(k, n)| (k.to_string(), n)).collect();
        if got != want {
            let mut msg = format!(
                "{} norm {}: got {got:?}, expected {want:?}",
                report.lattice, row.norm
            );
            if let Some(n) = exp.note {
                let _ = write!(msg, " ({n})");
            }
            out.push(msg);
        }
        if row.vectors != exp.total {
            out.push(format!(
                "{} norm {}: {} vectors, expected {}",
                report.lattice, row.norm, row.vectors, exp.total
            ));
        }
        if !row.conserved() {
            out.push(format!(
                "{} norm {}: conservation check failed",
                report.lattice, row.norm
            ));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// orbits

#[derive(Clone, Debug)]
pub struct OrbitReport {
    pub group_size: usize,
    pub group_axioms: bool,
    pub stabiliser_orbits: Vec<usize>,
    pub magic_orbits: Vec<usize>,
    /// The states built from the 12 stabiliser groups equal the first-shell states.
    pub groups_match_shell: bool,
    pub correspondence: CorrespondenceReport,
}

impl OrbitReport {
    pub fn ok(&self) -> bool {
        self.group_axioms && self.groups_match_shell && self.correspondence.holds
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => {
                let join = |v: &[usize]| {
                    v.iter()
                        .map(|x| x.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                format!(
                    "item,value\nclifford_group_size,{}\ngroup_axioms,{}\nstabiliser_orbits,{}\nmax_magic_orbits,{}\nstabiliser_groups_match_shell,{}\ncorrespondence,{}\ncorrespondence_covered,{}/{}\n",
                    self.group_size,
                    self.group_axioms,
                    join(&self.stabiliser_orbits),
                    join(&self.magic_orbits),
                    self.groups_match_shell,
                    self.correspondence.holds,
                    self.correspondence.covered,
                    self.correspondence.shell_size
                )
            }
            OutputFormat::Json => {
                let v = json!({
                    "clifford_group_size": self.group_size,
                    "group_axioms": self.group_axioms,
                    "stabiliser_orbits": self.stabiliser_orbits,
                    "max_magic_orbits": self.magic_orbits,
                    "stabiliser_groups_match_shell": self.groups_match_shell,
                    "correspondence": self.correspondence,
                });
                serde_json::to_string_pretty(&v).unwrap_or_default() + "\n"
            }
        }
    }
}

/// Qutrit pipeline on the first two E6 shells.
pub fn cmd_orbits(store: &mut ShellStore) -> Result<OrbitReport> {
    let group = generate_clifford_qutrit()?;
    let group_axioms = check_group_axioms(&group);
    let stab_shell = store.shell(LatticeName::E6, 3)?.0.clone();
    let magic_shell = store.shell(LatticeName::E6, 6)?.0.clone();
    let stab = dedup::<EisensteinInt>(&stab_shell)?;
    let magic = dedup::<EisensteinInt>(&magic_shell)?;
    let sizes = |set| -> Result<Vec<usize>> {
        Ok(orbit_partition(set, &group)?
            .iter()
            .map(|o| o.size())
            .collect())
    };
    let stabiliser_orbits = sizes(&stab)?;
    let magic_orbits = sizes(&magic)?;

    let from_groups: HashSet<Vec<EisensteinInt>> = stabiliser_groups_qutrit()?
        .iter()
        .map(|g| Ok(stabiliser_state(g)?.components))
        .collect::<Result<_>>()?;
    let from_shell: HashSet<Vec<EisensteinInt>> =
        stab.states.iter().map(|s| s.components.clone()).collect();
    let groups: Vec<_> = stabiliser_groups_qutrit()?
        .iter()
        .map(stabiliser_state)
        .collect::<Result<_>>()?;
    let spec = store.spec(LatticeName::E6)?;
    let correspondence = verify_e6_correspondence(spec, &stab_shell, &groups);
    Ok(OrbitReport {
        group_size: group.len(),
        group_axioms,
        stabiliser_orbits,
        magic_orbits,
        groups_match_shell: from_groups.len() == 12 && from_groups == from_shell,
        correspondence,
    })
}

// ---------------------------------------------------------------------------
// entangle

#[derive(Clone, Debug)]
pub struct ThreeQubitRow {
    pub norm: u64,
    pub state_id: usize,
    pub magic: MagicClass,
    pub profile: ConcurrenceProfile,
}

#[derive(Clone, Debug)]
pub struct TwoQubitRow {
    pub norm: u64,
    pub state_id: usize,
    pub magic: MagicClass,
    pub concurrence: f64,
    pub concurrence_sq: BigRational,
}

#[derive(Clone, Debug, Default)]
pub struct EntangleReport {
    pub three_qubit: Vec<ThreeQubitRow>,
    pub two_qubit: Vec<TwoQubitRow>,
    pub class_counts: BTreeMap<EntanglementClass, usize>,
    /// Two-qubit maximal-magic states by concurrence label.
    pub pairwise_histogram: BTreeMap<String, usize>,
}

impl EntangleReport {
    pub fn class_count(&self, c: EntanglementClass) -> usize {
        self.class_counts.get(&c).copied().unwrap_or(0)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => {
                let mut s = String::new();
                if !self.three_qubit.is_empty() {
                    s.push_str("norm,state_id,C_AB,C_AC,C_BC,C_A(BC),C_B(AC),C_C(AB),F3,class\n");
                    for r in &self.three_qubit {
                        let p = &r.profile;
                        let f: Vec<String> = p
                            .pairwise
                            .iter()
                            .chain(&p.one_to_other)
                            .map(|&x| fmt_float(x))
                            .collect();
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{}",
                            r.norm,
                            r.state_id,
                            f.join(","),
                            fmt_float(p.f3),
                            p.class
                        );
                    }
                }
                if !self.two_qubit.is_empty() {
                    s.push_str("norm,state_id,magic,C_AB,C_AB_sq\n");
                    for r in &self.two_qubit {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{}",
                            r.norm,
                            r.state_id,
                            r.magic,
                            fmt_float(r.concurrence),
                            fmt_rational(&r.concurrence_sq)
                        );
                    }
                }
                s.push_str("# summary\n");
                for (c, n) in &self.class_counts {
                    let _ = writeln!(s, "# class {c}: {n}");
                }
                for (k, n) in &self.pairwise_histogram {
                    let _ = writeln!(s, "# max-magic C_AB = {k}: {n}");
                }
                s
            }
            OutputFormat::Json => {
                let three: Vec<_> = self
                    .three_qubit
                    .iter()
                    .map(|r| {
                        let p = &r.profile;
                        json!({
                            "norm": r.norm,
                            "state_id": r.state_id,
                            "magic": r.magic.as_str(),
                            "pairwise": p.pairwise.map(fmt_float),
                            "one_to_other": p.one_to_other.map(fmt_float),
                            "one_to_other_sq": p.one_to_other_sq.iter().map(fmt_rational).collect::<Vec<_>>(),
                            "f3": fmt_float(p.f3),
                            "f3_sq": fmt_rational(&p.f3_sq),
                            "class": p.class.as_str(),
                        })
                    })
                    .collect();
                let two: Vec<_> = self
                    .two_qubit
                    .iter()
                    .map(|r| {
                        json!({
                            "norm": r.norm,
                            "state_id": r.state_id,
                            "magic": r.magic.as_str(),
                            "c_ab": fmt_float(r.concurrence),
                            "c_ab_sq": fmt_rational(&r.concurrence_sq),
                        })
                    })
                    .collect();
                let classes: BTreeMap<&str, usize> = self
                    .class_counts
                    .iter()
                    .map(|(c, n)| (c.as_str(), *n))
                    .collect();
                let v = json!({
                    "three_qubit": three,
                    "two_qubit": two,
                    "class_counts": classes,
                    "pairwise_histogram": self.pairwise_histogram,
                });
                serde_json::to_string_pretty(&v).unwrap_or_default() + "\n"
            }
        }
    }
}

/// BW16: concurrence profiles of the stabiliser and maximal-magic shells.
/// E8: pure two-qubit concurrence of every state, histogram over maximal magic.
pub fn cmd_entangle(config: &PipelineConfig, store: &mut ShellStore) -> Result<EntangleReport> {
    let norms = if config.norms.is_empty() {
        match config.lattice {
            LatticeName::BW16 => vec![4, 6],
            LatticeName::E8 => vec![4],
            LatticeName::E6 => {
                return Err(Error::Unsupported(
                    "entanglement needs a qubit lattice".into(),
                ))
            }
        }
    } else {
        config.resolved_norms()?
    };
    let mut report = EntangleReport::default();
    for norm in norms {
        let (shell, _) = store.shell(config.lattice, norm)?;
        let c = classify_shell::<GaussianInt>(shell)?;
        match config.lattice {
            LatticeName::BW16 => {
                let rows = c
                    .set
                    .states
                    .par_iter()
                    .zip(&c.reports)
                    .enumerate()
                    .map(|(id, (s, r))| {
                        Ok(ThreeQubitRow {
                            norm,
                            state_id: id,
                            magic: r.class,
                            profile: concurrence_profile(s, r.class)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                for r in &rows {
                    *report.class_counts.entry(r.profile.class).or_default() += 1;
                }
                report.three_qubit.extend(rows);
            }
            LatticeName::E8 => {
                for (id, (s, r)) in c.set.states.iter().zip(&c.reports).enumerate() {
                    let (v, sq) = pairwise_concurrence_2qubit(s)?;
                    if r.class.is_max_magic() {
                        *report
                            .pairwise_histogram
                            .entry(sqrt_label(&sq))
                            .or_default() += 1;
                    }
                    report.two_qubit.push(TwoQubitRow {
                        norm,
                        state_id: id,
                        magic: r.class,
                        concurrence: v,
                        concurrence_sq: sq,
                    });
                }
            }
            LatticeName::E6 => unreachable!(),
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// project-e8

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PointTag {
    First,
    SecondStab,
    SecondMagic,
}

impl PointTag {
    pub fn as_str(self) -> &'static str {
        match self {
            PointTag::First => "first",
            PointTag::SecondStab => "second-stab",
            PointTag::SecondMagic => "second-magic",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProjectedPoint {
    pub x: f64,
    pub y: f64,
    pub tag: PointTag,
}

/// `(x, y) = (1/2) Σ_k v_k (cos kπ/8, sin kπ/8)` for a vector in ambient coordinates.
pub fn project_e8(v: &[f64]) -> (f64, f64) {
    v.iter().enumerate().fold((0.0, 0.0), |(x, y), (k, &vk)| {
        let t = k as f64 * std::f64::consts::PI / 8.0;
        (x + 0.5 * vk * t.cos(), y + 0.5 * vk * t.sin())
    })
}

pub fn cmd_project_e8(store: &mut ShellStore) -> Result<Vec<ProjectedPoint>> {
    let scale = store.spec(LatticeName::E8)?.scale as f64;
    let mut out = Vec::new();
    for (norm, tag_of) in [(2u64, None), (4, Some(()))] {
        let (shell, _) = store.shell(LatticeName::E8, norm)?;
        let mut tags = vec![PointTag::First; shell.len()];
        if tag_of.is_some() {
            let c = classify_shell::<GaussianInt>(shell)?;
            for (s, r) in c.set.states.iter().zip(&c.reports) {
                let t = if r.class == MagicClass::Stabiliser {
                    PointTag::SecondStab
                } else {
                    PointTag::SecondMagic
                };
                for &i in &s.provenance {
                    tags[i] = t;
                }
            }
        }
        for (v, tag) in shell.vectors.iter().zip(tags) {
            let amb: Vec<f64> = v.coords.iter().map(|&c| c as f64 / scale).collect();
            let (x, y) = project_e8(&amb);
            out.push(ProjectedPoint { x, y, tag });
        }
    }
    Ok(out)
}

pub fn render_points(points: &[ProjectedPoint], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut s = String::from("x,y,tag\n");
            for p in points {
                let _ = writeln!(
                    s,
                    "{},{},{}",
                    fmt_float(p.x),
                    fmt_float(p.y),
                    p.tag.as_str()
                );
            }
            s
        }
        OutputFormat::Json => {
            let v: Vec<_> = points
                .iter()
                .map(|p| json!({"x": fmt_float(p.x), "y": fmt_float(p.y), "tag": p.tag.as_str()}))
                .collect();
            serde_json::to_string_pretty(&v).unwrap_or_default() + "\n"
        }
    }
}

// ---------------------------------------------------------------------------
// reproduce

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, ok: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ok,
            detail: detail.into(),
        }
    }
}

pub fn render_checks(checks: &[Check]) -> String {
    let mut s = String::new();
    for c in checks {
        let _ = writeln!(
            s,
            "{} {}: {}",
            if c.ok { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    s
}

/// Per-state saturation checks on the maximal-magic shells.
pub fn saturation_checks(store: &mut ShellStore) -> Result<Vec<Check>> {
    let mut checks = Vec::new();

    let bw = classify_shell::<GaussianInt>(&store.shell(LatticeName::BW16, 6)?.0)?;
    let table = WhTable::<GaussianInt>::for_dim(8)?;
    let bad = bw
        .set
        .states
        .par_iter()
        .map(|s| {
            let r = wh_covariance_check(&table, s)?;
            Ok(usize::from(!(r.holds && r.values.len() == 63)))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .sum::<usize>();
    checks.push(Check::new(
        "BW16 norm 6 WH covariance 1/9",
        bad == 0 && bw.set.len() == 15360,
        format!("{} states, {bad} failing", bw.set.len()),
    ));

    let e8 = classify_shell::<GaussianInt>(&store.shell(LatticeName::E8, 4)?.0)?;
    let table = WhTable::<GaussianInt>::for_dim(4)?;
    let mut n_max = 0;
    let mut bad = 0;
    for (s, r) in e8.set.states.iter().zip(&e8.reports) {
        if r.class.is_max_magic() {
            n_max += 1;
            bad += usize::from(!mub_orbit_check(&table, s)?);
        }
    }
    checks.push(Check::new(
        "E8 norm 4 MUB signature",
        bad == 0 && n_max == 480,
        format!("{n_max} maximal states, {bad} failing"),
    ));

    let e6 = classify_shell::<EisensteinInt>(&store.shell(LatticeName::E6, 6)?.0)?;
    let table = WhTable::<EisensteinInt>::for_dim(3)?;
    let mut bad = 0;
    for s in &e6.set.states {
        let r = wh_covariance_check(&table, s)?;
        bad += usize::from(!(r.holds && r.values.len() == 8));
    }
    checks.push(Check::new(
        "E6 norm 6 WH covariance 1/4",
        bad == 0 && e6.set.len() == 45,
        format!("{} states, {bad} failing", e6.set.len()),
    ));
    Ok(checks)
}

fn stabiliser_xi_check<R: ShellRing>(shell: &Shell) -> Result<(usize, usize)> {
    let c = classify_shell::<R>(shell)?;
    let dim = c.set.states.first().map_or(0, |s| s.dim());
    let table = WhTable::<R>::for_dim(dim)?;
    let mut n = 0;
    let mut bad = 0;
    for (s, r) in c.set.states.iter().zip(&c.reports) {
        if r.class == MagicClass::Stabiliser {
            n += 1;
            let ok = xi_alpha(&table, s, 2)?.is_one() && xi_alpha(&table, s, 3)?.is_one();
            bad += usize::from(!ok);
        }
    }
    Ok((n, bad))
}

/// Ξ₂ = Ξ₃ = 1 on every stabiliser state of the given shells.
pub fn stabiliser_checks(store: &mut ShellStore, shells: &[(LatticeName, u64)]) -> Result<Check> {
    let mut n = 0;
    let mut bad = 0;
    for &(l, norm) in shells {
        let shell = &store.shell(l, norm)?.0;
        let (a, b) = match l {
            LatticeName::E6 => stabiliser_xi_check::<EisensteinInt>(shell)?,
            _ => stabiliser_xi_check::<GaussianInt>(shell)?,
        };
        n += a;
        bad += b;
    }
    Ok(Check::new(
        "stabiliser states have Xi_2 = Xi_3 = 1",
        bad == 0 && n > 0,
        format!("{n} stabiliser states, {bad} failing"),
    ))
}

/// Every shell, census, orbit and entanglement check, diffed against the embedded
/// reference values.
pub fn reproduce(config: &PipelineConfig, store: &mut ShellStore) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for lattice in LatticeName::ALL {
        let cfg = PipelineConfig {
            lattice,
            norms: Vec::new(),
            ..config.clone()
        };
        for s in cmd_shells(&cfg, store)? {
            let mut detail = format!("{} vectors", s.count);
            if let Some(n) = &s.note {
                let _ = write!(detail, " ({n})");
            }
            checks.push(Check::new(
                format!("shell {} norm {}", s.lattice, s.norm),
                s.theta.ok && s.theta.checked,
                detail,
            ));
        }
        let report = cmd_census(&cfg, store)?;
        let diff = diff_against_expected(&report);
        checks.push(Check::new(
            format!("census {} ({})", lattice, report.table.as_str()),
            diff.is_empty(),
            if diff.is_empty() {
                format!("{} rows match", report.rows.len())
            } else {
                diff.join("; ")
            },
        ));
    }

    checks.extend(saturation_checks(store)?);
    checks.push(stabiliser_checks(
        store,
        &[
            (LatticeName::E8, 4),
            (LatticeName::BW16, 4),
            (LatticeName::E6, 3),
        ],
    )?);

    let orbits = cmd_orbits(store)?;
    checks.push(Check::new(
        "qutrit Clifford group",
        orbits.group_size == 216 && orbits.group_axioms,
        format!("{} elements", orbits.group_size),
    ));
    checks.push(Check::new(
        "qutrit orbits",
        orbits.stabiliser_orbits == [12] && orbits.magic_orbits == [36, 9],
        format!(
            "stabiliser {:?}, maximal magic {:?}",
            orbits.stabiliser_orbits, orbits.magic_orbits
        ),
    ));
    checks.push(Check::new(
        "E6 stabiliser correspondence",
        orbits.groups_match_shell && orbits.correspondence.holds,
        format!(
            "{}/{} vectors",
            orbits.correspondence.covered, orbits.correspondence.shell_size
        ),
    ));

    let ent = cmd_entangle(&PipelineConfig::new(LatticeName::BW16), store)?;
    let want = [
        (EntanglementClass::I, 216),
        (EntanglementClass::II, 432),
        (EntanglementClass::III, 432),
        (EntanglementClass::A, 1536),
        (EntanglementClass::B, 13824),
    ];
    checks.push(Check::new(
        "three-qubit entanglement classes",
        want.iter().all(|&(c, n)| ent.class_count(c) == n)
            && ent.class_count(EntanglementClass::Unclassified) == 0,
        format!("{:?}", ent.class_counts),
    ));
    let e8 = cmd_entangle(&PipelineConfig::new(LatticeName::E8), store)?;
    let hist_ok = e8.pairwise_histogram.len() == 2
        && e8.pairwise_histogram.get("1/2") == Some(&192)
        && e8.pairwise_histogram.get("1/√2") == Some(&288);
    checks.push(Check::new(
        "two-qubit maximal-magic concurrences",
        hist_ok,
        format!("{:?}", e8.pairwise_histogram),
    ));

    let pts = cmd_project_e8(store)?;
    let count = |t| pts.iter().filter(|p| p.tag == t).count();
    checks.push(Check::new(
        "E8 projection",
        pts.len() == 2400
            && count(PointTag::SecondStab) == 240
            && count(PointTag::SecondMagic) == 1920,
        format!(
            "{} points ({} first, {} second-stab, {} second-magic)",
            pts.len(),
            count(PointTag::First),
            count(PointTag::SecondStab),
            count(PointTag::SecondMagic)
        ),
    ));
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    #[test]
    fn formatting() {
        assert_eq!(fmt_rational(&ratio(7, 16)), "7/16");
        assert_eq!(fmt_rational(&ratio(4, 2)), "2");
        assert_eq!(fmt_float(0.5), "0.5");
        assert_eq!(fmt_float(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_float(2.0f64.sqrt() * 100.0), "141.421356237");
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(sqrt_label(&ratio(1, 4)), "1/2");
        assert_eq!(sqrt_label(&ratio(1, 2)), "1/√2");
        assert_eq!(sqrt_label(&ratio(2, 3)), "√(2/3)");
    }

    #[test]
    fn projection_example() {
        let mut v = vec![0.0; 8];
        v[0] = 1.0;
        v[1] = -1.0;
        let (x, y) = project_e8(&v);
        let t = std::f64::consts::PI / 8.0;
        assert!((x - (1.0 - t.cos()) / 2.0).abs() < 1e-15);
        assert!((y + t.sin() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn heavy_shell_needs_flag() {
        let mut cfg = PipelineConfig::new(LatticeName::BW16);
        cfg.norms = vec![8];
        assert!(cfg.resolved_norms().is_err());
        cfg.include_heavy = true;
        assert_eq!(cfg.resolved_norms().unwrap(), vec![8]);
        cfg.norms = vec![0];
        assert!(cfg.resolved_norms().is_err());
    }

    #[test]
    fn expected_tables_conserve() {
        for l in LatticeName::ALL {
            let units = if l == LatticeName::E6 { 6 } else { 4 };
            for r in expected_table(l) {
                let states: usize = r.bins.iter().map(|b| b.1).sum();
                assert_eq!(states * units, r.total, "{l} {}", r.norm);
            }
        }
    }
}
