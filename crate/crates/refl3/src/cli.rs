//! Command-line front end: one thin binary, eight subcommands, JSON or
//! CSV payloads, a run manifest on the last line of standard output,
//! and the shared class-number cache file named by `REFL3_CACHE`.
//!
//! Exit status: 0 on success, 1 on precondition violations (inputs that
//! parse but name nothing, failed reproduction items, I/O errors), 2 on
//! argument errors.

use std::collections::{BTreeMap, HashSet};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::binquad::{self, GenusLabel};
use crate::intarith::factorize;
use crate::lattice3;
use crate::narrow::{self, NarrowType};
use crate::vinberg::{self, LatticeForm, ReflectivityVerdict, RootVec};

/// Environment variable naming the class-number cache file ("D h"
/// pairs, one per line).  Loaded at startup, appended on success.
pub const CACHE_ENV: &str = "REFL3_CACHE";

#[derive(Parser)]
#[command(
    name = "refl3",
    version,
    about = "Reflectivity invariants of rank-3 hyperbolic lattices"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Payload format; csv is available for tabular payloads only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the payload to this file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Worker threads for parallel enumerations; results do not depend
    /// on the count.
    #[arg(long, global = true, value_name = "N")]
    workers: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Class counts {hrI, hrII, hnr} of one genus of binary forms.
    Hclass {
        /// Fundamental discriminant (negative).
        #[arg(short = 'D', long = "discriminant", allow_negative_numbers = true)]
        d: i64,
        /// Genus tag: bitmask of local invariants at the odd primes.
        #[arg(long)]
        mu: u32,
    },
    /// Non-reflective central-symmetry class count of one main lattice.
    Hnr {
        /// Square-free determinant.
        #[arg(long)]
        d: u64,
        /// Genus tag of the lattice.
        #[arg(long)]
        eta: u32,
    },
    /// Main lattices with small hnr: the (d, eta, h) table.
    Refh3 {
        /// Largest determinant to scan.
        #[arg(long = "max-d")]
        max_d: u64,
        /// Keep classes with hnr <= hmax (or == hmax with --exact).
        #[arg(long)]
        hmax: u64,
        /// Match hnr exactly instead of by upper bound.
        #[arg(long)]
        exact: bool,
    },
    /// Narrow-place enumeration statistics {n, a, a1, a2}.
    Fund {
        /// Configuration type: i1, i0, ii1, ii0, or iii.
        #[arg(long = "type", value_parser = NarrowType::from_str)]
        ty: NarrowType,
        /// Also write every record as one JSON object per line.
        #[arg(long = "emit-records", value_name = "PATH")]
        emit_records: Option<PathBuf>,
    },
    /// Main classes surviving the overlattice filter on narrow places.
    FundMain {
        /// Configuration type to filter (published count exists for ii0).
        #[arg(long = "type", value_parser = NarrowType::from_str, default_value = "ii0")]
        ty: NarrowType,
    },
    /// Roots, chains, and reflectivity verdict of an explicit form.
    Vinberg {
        /// `u:<k>` for U + <-2k>, or `diag:<n1>,<n2>,<n3>[:e1,e2,e3]`.
        #[arg(long, value_parser = parse_lattice)]
        lattice: LatticeForm,
        /// Height bound for the root search.
        #[arg(long)]
        height: u64,
    },
    /// Vinberg run with the class count folded into the verdict.
    Classify {
        /// `u:<k>` for U + <-2k>, or `diag:<n1>,<n2>,<n3>[:e1,e2,e3]`.
        #[arg(long, value_parser = parse_lattice)]
        lattice: LatticeForm,
        /// Height bound for the root search.
        #[arg(long)]
        height: u64,
        /// Non-reflective overlattice count, given directly...
        #[arg(long)]
        hnr: Option<u64>,
        /// ...or looked up from main-lattice invariants (d, eta).
        #[arg(long)]
        d: Option<u64>,
        /// Genus tag accompanying --d.
        #[arg(long)]
        eta: Option<u32>,
    },
    /// Re-derive the published tables and print a pass/fail line each.
    Repro {
        /// Include the overlattice filter on the type-ii0 family.
        #[arg(long = "with-main-filter")]
        with_main_filter: bool,
        /// Include the height-500000 run on the glued reference form.
        #[arg(long = "with-deep-vinberg")]
        with_deep_vinberg: bool,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Hclass { .. } => "hclass",
            Cmd::Hnr { .. } => "hnr",
            Cmd::Refh3 { .. } => "refh3",
            Cmd::Fund { .. } => "fund",
            Cmd::FundMain { .. } => "fund-main",
            Cmd::Vinberg { .. } => "vinberg",
            Cmd::Classify { .. } => "classify",
            Cmd::Repro { .. } => "repro",
        }
    }
}

fn parse_lattice(s: &str) -> Result<LatticeForm, String> {
    if let Some(k) = s.strip_prefix("u:") {
        let k = k
            .parse::<i64>()
            .map_err(|_| format!("bad hyperbolic-plane scale `{k}`"))?;
        return Ok(LatticeForm::UPlus { k });
    }
    if let Some(rest) = s.strip_prefix("diag:") {
        let mut sections = rest.split(':');
        let diag = sections.next().unwrap_or("");
        let ns = diag
            .split(',')
            .map(|x| x.parse::<i64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| format!("bad diagonal `{diag}`"))?;
        let &[n1, n2, n3] = ns.as_slice() else {
            return Err(format!("need three diagonal entries, got {}", ns.len()));
        };
        let eps = match sections.next() {
            None => (0, 0, 0),
            Some(e) => {
                let es = e
                    .split(',')
                    .map(|x| x.parse::<u8>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| format!("bad glue entries `{e}`"))?;
                let &[e1, e2, e3] = es.as_slice() else {
                    return Err(format!("need three glue entries, got {}", es.len()));
                };
                (e1, e2, e3)
            }
        };
        if sections.next().is_some() {
            return Err(format!("too many `:` sections in `{s}`"));
        }
        return Ok(LatticeForm::Diag { n1, n2, n3, eps });
    }
    Err(format!(
        "lattice must be `u:<k>` or `diag:<n1>,<n2>,<n3>[:e1,e2,e3]`, got `{s}`"
    ))
}

enum CliError {
    Usage(String),
    Precondition(String),
}

impl CliError {
    fn pre(e: impl std::fmt::Display) -> Self {
        CliError::Precondition(e.to_string())
    }
}

/// Payload of one subcommand: a JSON document, plus the column/row form
/// when the document is a flat table.
struct Payload {
    json: Value,
    table: Option<(Vec<&'static str>, Vec<Vec<Value>>)>,
}

impl Payload {
    fn object(columns: Vec<&'static str>, values: Vec<Value>) -> Self {
        let json = Value::Object(
            columns
                .iter()
                .zip(&values)
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect(),
        );
        Payload {
            json,
            table: Some((columns, vec![values])),
        }
    }

    fn list(columns: Vec<&'static str>, rows: Vec<Vec<Value>>) -> Self {
        let json = Value::Array(
            rows.iter()
                .map(|row| {
                    Value::Object(
                        columns
                            .iter()
                            .zip(row)
                            .map(|(k, v)| (k.to_string(), v.clone()))
                            .collect(),
                    )
                })
                .collect(),
        );
        Payload {
            json,
            table: Some((columns, rows)),
        }
    }

    fn document(json: Value) -> Self {
        Payload { json, table: None }
    }

    fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&self.json).unwrap() + "\n"),
            Format::Csv => {
                let Some((columns, rows)) = &self.table else {
                    return Err(CliError::Usage(
                        "csv output is only available for tabular payloads".into(),
                    ));
                };
                let mut out = columns.join(",") + "\n";
                for row in rows {
                    let line: Vec<String> = row.iter().map(csv_cell).collect();
                    out += &line.join(",");
                    out.push('\n');
                }
                Ok(out)
            }
        }
    }
}

fn csv_cell(v: &Value) -> String {
    let s = match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

struct Outcome {
    payload: Payload,
    counts: BTreeMap<&'static str, u64>,
    outputs: Vec<PathBuf>,
    /// Print the payload to stdout when no --out is given (repro prints
    /// its own live table instead).
    stdout_payload: bool,
    exit_code: i32,
}

impl Outcome {
    fn new(payload: Payload, counts: BTreeMap<&'static str, u64>) -> Self {
        Outcome {
            payload,
            counts,
            outputs: Vec::new(),
            stdout_payload: true,
            exit_code: 0,
        }
    }
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'static str,
    parameters: &'a BTreeMap<&'static str, Value>,
    outputs: Vec<String>,
    elapsed: String,
    counts: &'a BTreeMap<&'static str, u64>,
}

/// Parse `argv`, run the subcommand, emit payload and manifest, and
/// return the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.workers {
        // First caller wins; per-run pools would change nothing since
        // every merge is order-deterministic.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    if cli.format == Format::Csv && matches!(cli.cmd, Cmd::Vinberg { .. } | Cmd::Classify { .. }) {
        eprintln!("refl3: csv output is only available for tabular payloads");
        return 2;
    }

    let cache = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    if let Some(path) = &cache {
        if let Err(e) = binquad::load_class_cache(path) {
            eprintln!("refl3: cannot read cache {}: {e}", path.display());
            return 1;
        }
    }

    let started = Instant::now();
    let mut outcome = match dispatch(&cli) {
        Ok(outcome) => outcome,
        Err(CliError::Usage(msg)) => {
            eprintln!("refl3: {msg}");
            return 2;
        }
        Err(CliError::Precondition(msg)) => {
            eprintln!("refl3: {msg}");
            return 1;
        }
    };

    let rendered = match outcome.payload.render(cli.format) {
        Ok(r) => r,
        Err(CliError::Usage(msg)) | Err(CliError::Precondition(msg)) => {
            eprintln!("refl3: {msg}");
            return 2;
        }
    };
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &rendered) {
                eprintln!("refl3: cannot write {}: {e}", path.display());
                return 1;
            }
            outcome.outputs.insert(0, path.clone());
        }
        None => {
            if outcome.stdout_payload {
                print!("{rendered}");
            }
        }
    }

    if let Some(path) = &cache {
        if let Err(e) = binquad::append_class_cache(path) {
            eprintln!("refl3: cannot append cache {}: {e}", path.display());
            return 1;
        }
    }

    let elapsed = started.elapsed();
    let manifest = RunManifest {
        command: cli.cmd.name(),
        parameters: &parameters_of(&cli),
        outputs: outcome
            .outputs
            .iter()
            .map(|p| p.display().to_string())
            .collect(),
        elapsed: format!("{}.{:03}", elapsed.as_secs(), elapsed.subsec_millis()),
        counts: &outcome.counts,
    };
    println!("{}", serde_json::to_string(&manifest).unwrap());
    outcome.exit_code
}

fn parameters_of(cli: &Cli) -> BTreeMap<&'static str, Value> {
    let mut p = BTreeMap::new();
    match &cli.cmd {
        Cmd::Hclass { d, mu } => {
            p.insert("D", json!(d));
            p.insert("mu", json!(mu));
        }
        Cmd::Hnr { d, eta } => {
            p.insert("d", json!(d));
            p.insert("eta", json!(eta));
        }
        Cmd::Refh3 { max_d, hmax, exact } => {
            p.insert("max_d", json!(max_d));
            p.insert("hmax", json!(hmax));
            p.insert("exact", json!(exact));
        }
        Cmd::Fund { ty, emit_records } => {
            p.insert("type", json!(ty.as_str().to_ascii_lowercase()));
            if let Some(path) = emit_records {
                p.insert("emit_records", json!(path.display().to_string()));
            }
        }
        Cmd::FundMain { ty } => {
            p.insert("type", json!(ty.as_str().to_ascii_lowercase()));
        }
        Cmd::Vinberg { lattice, height } => {
            p.insert("lattice", json!(lattice_spec(*lattice)));
            p.insert("height", json!(height));
        }
        Cmd::Classify {
            lattice,
            height,
            hnr,
            d,
            eta,
        } => {
            p.insert("lattice", json!(lattice_spec(*lattice)));
            p.insert("height", json!(height));
            if let Some(h) = hnr {
                p.insert("hnr", json!(h));
            }
            if let Some(d) = d {
                p.insert("d", json!(d));
            }
            if let Some(eta) = eta {
                p.insert("eta", json!(eta));
            }
        }
        Cmd::Repro {
            with_main_filter,
            with_deep_vinberg,
        } => {
            p.insert("with_main_filter", json!(with_main_filter));
            p.insert("with_deep_vinberg", json!(with_deep_vinberg));
        }
    }
    p.insert(
        "format",
        json!(match cli.format {
            Format::Json => "json",
            Format::Csv => "csv",
        }),
    );
    if let Some(n) = cli.workers {
        p.insert("workers", json!(n));
    }
    p
}

/// Canonical round-trip of a parsed form back to its `--lattice` spec.
fn lattice_spec(form: LatticeForm) -> String {
    match form {
        LatticeForm::UPlus { k } => format!("u:{k}"),
        LatticeForm::Diag { n1, n2, n3, eps } => {
            let mut s = format!("diag:{n1},{n2},{n3}");
            if eps != (0, 0, 0) {
                let _ = write!(s, ":{},{},{}", eps.0, eps.1, eps.2);
            }
            s
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.cmd {
        Cmd::Hclass { d, mu } => hclass_cmd(*d, *mu),
        Cmd::Hnr { d, eta } => hnr_cmd(*d, *eta),
        Cmd::Refh3 { max_d, hmax, exact } => refh3_cmd(*max_d, *hmax, *exact),
        Cmd::Fund { ty, emit_records } => fund_cmd(*ty, emit_records.as_deref()),
        Cmd::FundMain { ty } => fund_main_cmd(*ty),
        Cmd::Vinberg { lattice, height } => vinberg_cmd(*lattice, *height, None),
        Cmd::Classify {
            lattice,
            height,
            hnr,
            d,
            eta,
        } => classify_cmd(*lattice, *height, *hnr, *d, *eta),
        Cmd::Repro {
            with_main_filter,
            with_deep_vinberg,
        } => repro_cmd(*with_main_filter, *with_deep_vinberg),
    }
}

fn hclass_cmd(d: i64, mu: u32) -> Result<Outcome, CliError> {
    let label = GenusLabel::new(d, mu).map_err(CliError::pre)?;
    let c = binquad::genus_counts_strict(label).map_err(CliError::pre)?;
    let payload = Payload::object(
        vec!["hrI", "hrII", "hnr"],
        vec![json!(c.hr_i), json!(c.hr_ii), json!(c.hnr)],
    );
    let counts = BTreeMap::from([("hrI", c.hr_i), ("hrII", c.hr_ii), ("hnr", c.hnr)]);
    Ok(Outcome::new(payload, counts))
}

fn hnr_cmd(d: u64, eta: u32) -> Result<Outcome, CliError> {
    let h = lattice3::hnr(d, eta).map_err(CliError::pre)?;
    let payload = Payload::object(
        vec!["d", "eta", "h"],
        vec![json!(d), json!(eta), json!(h)],
    );
    Ok(Outcome::new(payload, BTreeMap::from([("hnr", h)])))
}

fn refh3_cmd(max_d: u64, hmax: u64, exact: bool) -> Result<Outcome, CliError> {
    let entries = if exact {
        lattice3::enumerate_exact_hnr(max_d, hmax)
    } else {
        lattice3::enumerate_low_hnr(max_d, hmax)
    };
    let rows = entries
        .iter()
        .map(|e| vec![json!(e.d), json!(e.eta), json!(e.h)])
        .collect();
    let counts = BTreeMap::from([
        ("table3_count", entries.len() as u64),
        ("max_d_attained", entries.iter().map(|e| e.d).max().unwrap_or(0)),
    ]);
    Ok(Outcome::new(Payload::list(vec!["d", "eta", "h"], rows), counts))
}

fn fund_cmd(ty: NarrowType, emit: Option<&std::path::Path>) -> Result<Outcome, CliError> {
    let mut outputs = Vec::new();
    let stats = match emit {
        None => narrow::narrow_stats(ty),
        Some(path) => {
            // Stream records to disk and fold the statistics on the fly;
            // the sequential pass keeps the line order canonical.
            let file = fs::File::create(path)
                .map_err(|e| CliError::Precondition(format!("cannot write {}: {e}", path.display())))?;
            let mut w = std::io::BufWriter::new(file);
            let mut io_err = None;
            let mut n = 0u64;
            let (mut a, mut a1, mut a2) = (1u64, 1u64, 1u64);
            narrow::enumerate_narrow(ty, |rec| {
                n += 1;
                a = a.max(rec.a);
                a1 = a1.max(rec.a1);
                a2 = a2.max(rec.a2);
                let line = serde_json::to_string(&rec).unwrap();
                if let Err(e) = writeln!(w, "{line}") {
                    io_err = Some(e);
                    return false;
                }
                true
            });
            w.flush()
                .map_err(|e| CliError::Precondition(format!("cannot write {}: {e}", path.display())))?;
            if let Some(e) = io_err {
                return Err(CliError::Precondition(format!(
                    "cannot write {}: {e}",
                    path.display()
                )));
            }
            outputs.push(path.to_path_buf());
            narrow::EnumStats { n, a, a1, a2 }
        }
    };
    let payload = Payload::object(
        vec!["n", "a", "a1", "a2"],
        vec![json!(stats.n), json!(stats.a), json!(stats.a1), json!(stats.a2)],
    );
    let counts = BTreeMap::from([
        ("n", stats.n),
        ("a", stats.a),
        ("a1", stats.a1),
        ("a2", stats.a2),
    ]);
    let mut outcome = Outcome::new(payload, counts);
    outcome.outputs = outputs;
    Ok(outcome)
}

fn fund_main_cmd(ty: NarrowType) -> Result<Outcome, CliError> {
    let triplets = narrow::enumerate_main_triplets_for(ty);
    let rows = triplets
        .iter()
        .map(|t| vec![json!(t.d), json!(t.eta), json!(t.h)])
        .collect();
    let counts = BTreeMap::from([("main_count", triplets.len() as u64)]);
    Ok(Outcome::new(Payload::list(vec!["d", "eta", "h"], rows), counts))
}

fn verdict_tag(v: &ReflectivityVerdict) -> &'static str {
    match v {
        ReflectivityVerdict::Elliptic { .. } => "elliptic",
        ReflectivityVerdict::Hyperbolic { .. } => "hyperbolic",
        ReflectivityVerdict::NotReflective { .. } => "not_reflective",
        ReflectivityVerdict::Inconclusive { .. } => "inconclusive",
    }
}

fn vinberg_cmd(form: LatticeForm, height: u64, hnr: Option<u64>) -> Result<Outcome, CliError> {
    form.validate().map_err(CliError::pre)?;
    let cls = vinberg::run_classification(form, height, hnr);
    let chain_roots = |c: &vinberg::Chain| serde_json::to_value(&c.roots).unwrap();
    let chain_gram = |c: &vinberg::Chain| serde_json::to_value(&c.gram).unwrap();
    let mut json = json!({
        "roots": cls.roots,
        "chains": {
            "e": chain_roots(&cls.chains.e),
            "f": cls.chains.f.as_ref().map(chain_roots),
        },
        "grams": {
            "e": chain_gram(&cls.chains.e),
            "f": cls.chains.f.as_ref().map(chain_gram),
        },
        "verdict": cls.verdict,
    });
    let mut counts = BTreeMap::from([
        ("n_roots", cls.roots.len() as u64),
        ("chain_e", cls.chains.e.roots.len() as u64),
        (
            "chain_f",
            cls.chains.f.as_ref().map_or(0, |c| c.roots.len()) as u64,
        ),
        ("orphans", cls.chains.orphans.len() as u64),
    ]);
    if let Some(h) = hnr {
        let map = json.as_object_mut().unwrap();
        map.insert("hnr".into(), json!(h));
        map.insert("tag".into(), json!(verdict_tag(&cls.verdict)));
        counts.insert("hnr", h);
    }
    Ok(Outcome::new(Payload::document(json), counts))
}

fn classify_cmd(
    form: LatticeForm,
    height: u64,
    hnr: Option<u64>,
    d: Option<u64>,
    eta: Option<u32>,
) -> Result<Outcome, CliError> {
    let h = match (hnr, d, eta) {
        (Some(h), None, None) => h,
        (None, Some(d), Some(eta)) => lattice3::hnr(d, eta).map_err(CliError::pre)?,
        _ => {
            return Err(CliError::Usage(
                "classify needs either --hnr or both --d and --eta".into(),
            ))
        }
    };
    vinberg_cmd(form, height, Some(h))
}

// ---------------------------------------------------------------------
// the reproduction suite

/// Published reference values re-derived by `repro`; the acceptance
/// suite freezes the same tables independently.
mod published {
    pub const HNR_SPOTS: [(u64, u32, u64); 3] = [(114, 2, 0), (3990, 4, 1), (57, 1, 1)];
    pub const LOW_HNR_COUNT: u64 = 206;
    pub const LOW_HNR_MAX_D: u64 = 4466;
    pub const H2_TAIL: [(u64, u32); 10] = [
        (4290, 1),
        (4326, 2),
        (4902, 4),
        (4991, 7),
        (5226, 0),
        (5334, 2),
        (6006, 2),
        (7590, 8),
        (10374, 2),
        (29526, 2),
    ];
    pub const NARROW_STATS: [(&str, (u64, u64, u64, u64)); 5] = [
        ("i1", (272, 3528, 543, 181)),
        ("i0", (2998, 69192, 10209, 89)),
        ("ii1", (9818, 47432, 10965, 487)),
        ("ii0", (376208, 995316, 238569, 283)),
        ("iii", (200539, 324900, 26565, 907)),
    ];
    pub const MAIN_COUNT: usize = 132;

    pub const U114_CHAIN_E: [[i64; 3]; 7] = [
        [321, 30, -13],
        [28, 2, -1],
        [57, 0, -1],
        [0, 0, 1],
        [-1, 1, 0],
        [9, 6, -1],
        [292, 122, -25],
    ];
    pub const U114_GRAM_E: [[i64; 7]; 7] = [
        [-6, 0, 228, 1482, 291, 714, 10872],
        [0, -2, 0, 114, 26, 72, 1150],
        [228, 0, -114, 114, 57, 228, 4104],
        [1482, 114, 114, -114, 0, 114, 2850],
        [291, 26, 57, 0, -2, 3, 170],
        [714, 72, 228, 114, 3, -6, 0],
        [10872, 1150, 4104, 2850, 170, 0, -2],
    ];
    pub const U114_CHAIN_F: [[i64; 3]; 9] = [
        [1766, 172, -73],
        [6384, 627, -265],
        [4560, 456, -191],
        [283, 29, -12],
        [18, 3, -1],
        [14, 4, -1],
        [456, 171, -37],
        [2280, 912, -191],
        [427, 173, -36],
    ];
    pub const U114_GRAM_F: [[i64; 9]; 9] = [
        [-2, 0, 114, 26, 72, 1150, 72504, 413250, 79370],
        [0, -114, 114, 57, 228, 4104, 259806, 1481658, 284601],
        [114, 114, -114, 0, 114, 2850, 182058, 1039566, 199728],
        [26, 57, 0, -2, 3, 170, 11001, 62928, 12094],
        [72, 228, 114, 3, -6, 0, 228, 1482, 291],
        [1150, 4104, 2850, 170, 0, -2, 0, 114, 26],
        [72504, 259806, 182058, 11001, 228, 0, -114, 114, 57],
        [413250, 1481658, 1039566, 62928, 1482, 114, 114, -114, 0],
        [79370, 284601, 199728, 12094, 291, 26, 57, 0, -2],
    ];
    pub const U114_PERIOD: [[i64; 3]; 3] = [
        [2209, 22800, 107160],
        [912, 9409, 44232],
        [-188, -1940, -9119],
    ];
    pub const U114_GLIDE: [[i64; 3]; 3] = [[48, 475, 2280], [19, 192, 912], [-4, -40, -191]];
    pub const U114_AXIS: [i64; 3] = [95, 19, -6];
    pub const U114_AXIS_NORM: i64 = -494;

    /// Doubled coordinates, in acceptance order.
    pub const GLUED_ROOTS: [[i64; 3]; 33] = [
        [0, 2, 0],
        [0, 0, 2],
        [1, -1, 0],
        [4, 0, -6],
        [13, -9, -12],
        [14, -6, -18],
        [57, -21, -76],
        [17, -9, -20],
        [56, -42, -44],
        [63, -35, -72],
        [114, -74, -114],
        [50, -30, -54],
        [84, -28, -114],
        [34, -8, -48],
        [152, -116, -114],
        [38, -12, -52],
        [104, -30, -144],
        [168, -42, -236],
        [1729, -1015, -1900],
        [119, -69, -132],
        [69, -43, -72],
        [146, -114, -102],
        [148, -114, -108],
        [231, -147, -236],
        [2261, -1645, -1900],
        [202, -54, -282],
        [532, -264, -646],
        [238, -174, -198],
        [256, -126, -312],
        [399, -315, -268],
        [684, -192, -950],
        [722, -154, -1026],
        [476, -238, -576],
    ];
    pub const GLUED_PERIOD: [[(i64, i64); 3]; 3] = [
        [(6863, 2), (5339, 2), (1694, 1)],
        [(-3345, 2), (-2601, 2), (-826, 1)],
        [(-4200, 1), (-3268, 1), (-2073, 1)],
    ];
}

enum ItemResult {
    Pass(String),
    Fail(String),
    Skip(&'static str),
}

fn repro_cmd(with_main_filter: bool, with_deep_vinberg: bool) -> Result<Outcome, CliError> {
    let mut rows: Vec<(&'static str, ItemResult)> = Vec::new();
    let push = |rows: &mut Vec<(&'static str, ItemResult)>, name, result| {
        let (status, detail) = match &result {
            ItemResult::Pass(d) => ("PASS", d.clone()),
            ItemResult::Fail(d) => ("FAIL", d.clone()),
            ItemResult::Skip(d) => ("SKIP", d.to_string()),
        };
        println!("{status}  {name:<18} {detail}");
        rows.push((name, result));
    };
    let check = |r: Result<String, String>| match r {
        Ok(d) => ItemResult::Pass(d),
        Err(d) => ItemResult::Fail(d),
    };

    push(&mut rows, "genus-identity", check(repro_genus_identity()));
    push(&mut rows, "hnr-spots", check(repro_hnr_spots()));
    push(&mut rows, "low-hnr-table", check(repro_low_hnr_table()));
    push(&mut rows, "h2-tail", check(repro_h2_tail()));
    for (name, want) in published::NARROW_STATS {
        let tag = NarrowType::from_str(name).unwrap();
        let item: &'static str = match tag {
            NarrowType::I1 => "narrow-i1",
            NarrowType::I0 => "narrow-i0",
            NarrowType::II1 => "narrow-ii1",
            NarrowType::II0 => "narrow-ii0",
            NarrowType::III => "narrow-iii",
        };
        push(&mut rows, item, check(repro_narrow(tag, want)));
    }
    push(
        &mut rows,
        "main-filter",
        if with_main_filter {
            check(repro_main_filter())
        } else {
            ItemResult::Skip("enable with --with-main-filter")
        },
    );
    push(&mut rows, "vinberg-u114", check(repro_vinberg_u114()));
    push(
        &mut rows,
        "vinberg-glued",
        if with_deep_vinberg {
            check(repro_vinberg_glued())
        } else {
            ItemResult::Skip("enable with --with-deep-vinberg")
        },
    );

    let table_rows = rows
        .iter()
        .map(|(name, r)| {
            let (status, detail) = match r {
                ItemResult::Pass(d) => ("pass", d.clone()),
                ItemResult::Fail(d) => ("fail", d.clone()),
                ItemResult::Skip(d) => ("skip", d.to_string()),
            };
            vec![json!(name), json!(status), json!(detail)]
        })
        .collect();
    let count = |tag: &str| {
        rows.iter()
            .filter(|(_, r)| match r {
                ItemResult::Pass(_) => tag == "pass",
                ItemResult::Fail(_) => tag == "fail",
                ItemResult::Skip(_) => tag == "skip",
            })
            .count() as u64
    };
    let counts = BTreeMap::from([
        ("pass", count("pass")),
        ("fail", count("fail")),
        ("skip", count("skip")),
    ]);
    let failed = counts["fail"] > 0;
    let mut outcome = Outcome::new(
        Payload::list(vec!["item", "status", "detail"], table_rows),
        counts,
    );
    outcome.stdout_payload = false;
    outcome.exit_code = i32::from(failed);
    Ok(outcome)
}

fn repro_genus_identity() -> Result<String, String> {
    let ds: Vec<i64> = (3..=20000)
        .map(|n| -n)
        .filter(|&d| binquad::is_fundamental(d))
        .collect();
    let mismatches: Vec<i64> = ds
        .par_iter()
        .copied()
        .filter(|&d| binquad::class_number(d) != binquad::class_number_reduced(d))
        .collect();
    if !mismatches.is_empty() {
        return Err(format!(
            "{} class-number mismatches, first at D = {}",
            mismatches.len(),
            mismatches[0]
        ));
    }
    let genera: Vec<Result<u64, String>> = ds
        .par_iter()
        .copied()
        .map(|d| {
            if d == -4 {
                return Ok(0);
            }
            let k = factorize(d.unsigned_abs())
                .iter()
                .filter(|&&(p, _)| p != 2)
                .count() as u32;
            let h = binquad::class_number(d);
            let tau = binquad::tau(d);
            if h % (1 << tau) != 0 {
                return Err(format!("2^tau does not divide h({d})"));
            }
            let target = h >> tau;
            let mut n = 0;
            for mu in 0..1u32 << k {
                let g = GenusLabel::new(d, mu).map_err(|e| e.to_string())?;
                if !binquad::is_realizable(g) {
                    continue;
                }
                let c = binquad::genus_counts(g);
                if c.hr_i + c.hr_ii + 2 * c.hnr != target {
                    return Err(format!("genus identity fails at ({d}, {mu})"));
                }
                n += 1;
            }
            Ok(n)
        })
        .collect();
    let mut total = 0;
    for g in genera {
        total += g?;
    }
    Ok(format!(
        "{} discriminants, {} realizable genera",
        ds.len(),
        total
    ))
}

fn repro_hnr_spots() -> Result<String, String> {
    for (d, eta, want) in published::HNR_SPOTS {
        match lattice3::hnr(d, eta) {
            Ok(h) if h == want => {}
            Ok(h) => return Err(format!("hnr({d}, {eta}) = {h}, want {want}")),
            Err(e) => return Err(format!("hnr({d}, {eta}): {e}")),
        }
    }
    Ok("hnr(114,2) = 0, hnr(3990,4) = 1, hnr(57,1) = 1".into())
}

fn repro_low_hnr_table() -> Result<String, String> {
    let v = lattice3::enumerate_low_hnr(5000, 1);
    let max_d = v.iter().map(|e| e.d).max().unwrap_or(0);
    if v.len() as u64 != published::LOW_HNR_COUNT || max_d != published::LOW_HNR_MAX_D {
        return Err(format!(
            "{} pairs with max d = {max_d}, want {} and {}",
            v.len(),
            published::LOW_HNR_COUNT,
            published::LOW_HNR_MAX_D
        ));
    }
    Ok(format!("{} pairs up to d = 5000, max d = {max_d}", v.len()))
}

fn repro_h2_tail() -> Result<String, String> {
    let v = lattice3::enumerate_exact_hnr(30000, 2);
    let tail: Vec<(u64, u32)> = v
        .iter()
        .skip(v.len().saturating_sub(10))
        .map(|e| (e.d, e.eta))
        .collect();
    if tail != published::H2_TAIL {
        return Err(format!("largest pairs {tail:?}"));
    }
    Ok(format!("{} pairs, tail ends at d = 29526", v.len()))
}

fn repro_narrow(tag: NarrowType, want: (u64, u64, u64, u64)) -> Result<String, String> {
    let s = narrow::narrow_stats(tag);
    let got = (s.n, s.a, s.a1, s.a2);
    if got != want {
        return Err(format!("stats {got:?}, want {want:?}"));
    }
    Ok(format!("n = {}, a = {}, a1 = {}, a2 = {}", s.n, s.a, s.a1, s.a2))
}

fn repro_main_filter() -> Result<String, String> {
    let v = narrow::enumerate_main_triplets();
    if v.len() != published::MAIN_COUNT {
        return Err(format!("{} survivors, want {}", v.len(), published::MAIN_COUNT));
    }
    let table: HashSet<(u64, u32)> = lattice3::enumerate_low_hnr(5000, 1)
        .into_iter()
        .map(|e| (e.d, e.eta))
        .collect();
    let mut formal = 0;
    for t in &v {
        if lattice3::exists_main_lattice(t.d, t.eta) == Ok(true) {
            if !table.contains(&(t.d, t.eta)) {
                return Err(format!("({}, {}) missing from the low-hnr table", t.d, t.eta));
            }
        } else {
            formal += 1;
        }
    }
    for (d, eta, _) in narrow::DIRECT_CHECK_PAIRS {
        if v.iter().any(|t| (t.d, t.eta) == (d, eta)) {
            return Err(format!("directly-checked pair ({d}, {eta}) survived"));
        }
    }
    Ok(format!("{} survivors ({formal} formal tags)", v.len()))
}

fn repro_vinberg_u114() -> Result<String, String> {
    use published::*;
    let form = LatticeForm::UPlus { k: 57 };
    let g = form.gram();
    let cls = vinberg::run_classification(form, 50000, Some(0));
    let want_e: Vec<RootVec> = U114_CHAIN_E
        .iter()
        .map(|&[x, y, z]| RootVec::integral(x, y, z))
        .collect();
    if cls.chains.e.roots != want_e {
        return Err("principal chain differs".into());
    }
    if cls.chains.e.gram != U114_GRAM_E.map(|r| r.to_vec()).to_vec() {
        return Err("principal Gram differs".into());
    }
    let Some(f) = &cls.chains.f else {
        return Err("counter-chain missing".into());
    };
    let want_f: Vec<RootVec> = U114_CHAIN_F
        .iter()
        .map(|&[x, y, z]| RootVec::integral(x, y, z))
        .collect();
    if f.roots != want_f || f.gram != U114_GRAM_F.map(|r| r.to_vec()).to_vec() {
        return Err("counter-chain differs".into());
    }
    let c = vinberg::Isometry::from_integer_rows(U114_PERIOD);
    match &cls.verdict {
        ReflectivityVerdict::Hyperbolic { weyl, period }
            if *weyl == U114_AXIS && *period == c => {}
        other => return Err(format!("verdict {other:?}")),
    }
    if vinberg::integral_eigenvectors(&g, &c) != vec![(1, U114_AXIS, U114_AXIS_NORM)] {
        return Err("axis eigenvector differs".into());
    }
    let c1 = vinberg::Isometry::from_integer_rows(U114_GLIDE);
    if c1.mul(&c1) != c {
        return Err("glide square root does not halve the period".into());
    }
    Ok("chains, period, glide root, and axis all match".into())
}

fn repro_vinberg_glued() -> Result<String, String> {
    use published::*;
    let form = LatticeForm::Diag {
        n1: 30,
        n2: 38,
        n3: 14,
        eps: (1, 1, 0),
    };
    let g = form.gram();
    let roots = vinberg::enumerate_roots(form, 500000);
    let want: Vec<RootVec> = GLUED_ROOTS.iter().map(|&t| RootVec::halves(t)).collect();
    if roots != want {
        return Err(format!("{} roots, stream differs", roots.len()));
    }
    let c = vinberg::Isometry::from_rational_rows(GLUED_PERIOD);
    let found = vinberg::find_pair_automorphism(
        &g,
        form,
        (want[10], want[23]),
        (want[26], want[32]),
    );
    if found.as_ref() != Some(&c) {
        return Err("pair map differs from the published period".into());
    }
    if c.pow(12).is_identity() {
        return Err("period has finite order".into());
    }
    match vinberg::classify_reflectivity(form, 500000, Some(1)) {
        ReflectivityVerdict::NotReflective { witness } if witness == vec![c] => {}
        other => return Err(format!("verdict {other:?}")),
    }
    Ok("33 roots, published period, verdict not reflective".into())
}
