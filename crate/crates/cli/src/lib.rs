//! Command-line front end: reads group files, runs the analyses and writes
//! JSON reports whose certificates can be re-checked on their own.

pub mod group_file;
pub mod report;

use std::ffi::OsString;
use std::time::Instant;

use affcert::affine::invariant_axis;
use affcert::certificates::{
    direction_set_estimate, eigenvalue_one_screen, margulis3d_example, nonproper_witness,
    opposite_sign_search, proper_scan, Certificate, GroupSpec, WitnessMode, Word,
};
use affcert::classification::{classification_lookup, table_report};
use affcert::dynamics::{profile, transversality};
use affcert::linalg::{spectral_split, RealMatrix, RealVector, Subspace};
use affcert::sign::{extended_alpha, margulis_alpha, SignResult};
use affcert::AffineMap;
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use group_file::{load, GroupFile};
use report::{Config, Report, Timing, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

const EIGEN_TOL: f64 = 1e-6;
const UNIT_BAND: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "affcert",
    version,
    about = "Spectral data, Margulis signs and non-properness certificates for affine groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Args)]
pub struct Options {
    /// Group file, `builtin:<name>`, or a report for `check`.
    #[arg(long, global = true)]
    pub input: Option<String>,
    /// Generator name.
    #[arg(long, global = true)]
    pub element: Option<String>,
    /// Word in the generators, e.g. "a b^-1".
    #[arg(long, global = true)]
    pub word: Option<String>,
    /// Modulus threshold for the splitting.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, global = true, default_value_t = 6)]
    pub max_word_len: usize,
    #[arg(long, global = true, default_value_t = 200)]
    pub n_max: u64,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invariant splitting, contraction data and axis of one element.
    Decompose,
    /// Margulis sign of one element.
    Sign,
    /// Eigenvalue screen, then opposite-sign search, then ball witnesses.
    Certify,
    /// Words moving the ball around the origin back onto itself.
    Scan,
    /// Directions of large displacements on the ball around the origin.
    Directions,
    /// Look up a semisimple part; without arguments, print the whole table.
    Classify {
        dim: Option<usize>,
        group: Vec<String>,
    },
    /// Build an example group; margulis3d takes boost, angle and translation scale.
    Example {
        #[arg(default_value = "margulis3d")]
        name: String,
        #[arg(allow_negative_numbers = true)]
        params: Vec<f64>,
    },
    /// Re-verify the certificates of a report.
    Check,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Decompose => "decompose",
            Command::Sign => "sign",
            Command::Certify => "certify",
            Command::Scan => "scan",
            Command::Directions => "directions",
            Command::Classify { .. } => "classify",
            Command::Example { .. } => "example",
            Command::Check => "check",
        }
    }

    fn args(&self) -> Vec<String> {
        match self {
            Command::Classify { dim, group } => dim
                .iter()
                .map(|d| d.to_string())
                .chain(group.iter().cloned())
                .collect(),
            Command::Example { name, params } => std::iter::once(name.clone())
                .chain(params.iter().map(|p| p.to_string()))
                .collect(),
            _ => Vec::new(),
        }
    }
}

/// What a command produced, before timing is attached.
pub struct Output {
    pub results: Value,
    pub certificates: Vec<Certificate>,
    pub code: i32,
}

impl Output {
    fn ok(results: Value) -> Self {
        Output {
            results,
            certificates: Vec::new(),
            code: EXIT_OK,
        }
    }
}

/// Result of a whole invocation: exit code and the text for each stream.
#[derive(Debug)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<Report>,
}

fn config(cli: &Cli) -> Config {
    let o = &cli.opts;
    Config {
        input: o.input.clone(),
        element: o.element.clone(),
        word: o.word.clone(),
        args: cli.command.args(),
        alpha: o.alpha,
        max_word_len: o.max_word_len,
        n_max: o.n_max,
        radius: o.radius,
        seed: o.seed,
        jobs: o.jobs,
        eigen_tol: EIGEN_TOL,
    }
}

fn spec(o: &Options) -> Result<GroupSpec, String> {
    load(o.input.as_deref().ok_or("--input is required")?)
}

fn element(spec: &GroupSpec, o: &Options) -> Result<(String, AffineMap), String> {
    let names = spec.names();
    let text = o
        .word
        .as_deref()
        .or(o.element.as_deref())
        .ok_or("--element or --word is required")?;
    let w = Word::parse(text, &names).map_err(|e| e.to_string())?;
    let g = w.evaluate(spec).map_err(|e| e.to_string())?;
    Ok((w.display(&names), g))
}

fn vec_of(v: &RealVector) -> Vec<f64> {
    v.iter().copied().collect()
}

fn columns(s: &Subspace) -> Vec<Vec<f64>> {
    let b: &RealMatrix = s.basis();
    b.column_iter()
        .map(|c| c.iter().copied().collect())
        .collect()
}

fn decompose(o: &Options) -> Result<Output, String> {
    let spec = spec(o)?;
    let (text, g) = element(&spec, o)?;
    let sp = spectral_split(&g.linear, o.alpha, UNIT_BAND).map_err(|e| e.to_string())?;
    let mut results = json!({
        "element": text,
        "alpha": o.alpha,
        "dims": { "a_plus": sp.a_plus.dim(), "a_minus": sp.a_minus.dim(), "a_zero": sp.a_zero.dim() },
        "bases": { "a_plus": columns(&sp.a_plus), "a_minus": columns(&sp.a_minus), "a_zero": columns(&sp.a_zero) },
    });
    match profile(&g) {
        Ok(p) => {
            let r = p.regularity(&spec.ambient);
            results["profile"] = json!({
                "s": p.s,
                "norm_plus": p.norm_plus,
                "norm_minus": p.norm_minus,
                "eps_hyperbolic": p.eps_hyperbolic,
                "degenerate": p.degenerate,
                "fixed_dim": p.fixed_dim,
                "regular": r.regular,
                "r_regular": r.r_regular,
                "hyperbolic": p.is_hyperbolic(&spec.ambient),
            });
            results["axis"] = match invariant_axis(&g, &p.split) {
                Ok(ax) => {
                    json!({ "base_point": vec_of(&ax.base_point), "translation": vec_of(&ax.direction) })
                }
                Err(e) => json!({ "error": e.to_string() }),
            };
        }
        Err(e) => results["profile"] = json!({ "error": e.to_string() }),
    }
    Ok(Output::ok(results))
}

fn sign(o: &Options) -> Result<Output, String> {
    let spec = spec(o)?;
    let (text, g) = element(&spec, o)?;
    let (setting, r): (&str, SignResult) = if let Some(ps) = &spec.product_split {
        (
            "product",
            extended_alpha(&g, ps).map_err(|e| e.to_string())?,
        )
    } else if let Some(f) = spec.form.as_ref().filter(|f| f.p == f.q + 1) {
        ("form", margulis_alpha(&g, f).map_err(|e| e.to_string())?)
    } else {
        return Err("the group needs a form of signature (k+1,k) or a product split".into());
    };
    Ok(Output::ok(json!({
        "element": text,
        "setting": setting,
        "alpha": r.alpha,
        "neutral_vector": vec_of(&r.neutral_vector),
        "axis_translation": vec_of(&r.axis.direction),
    })))
}

fn certify(o: &Options) -> Result<Output, String> {
    let spec = spec(o)?;
    let err = |e: affcert::Error| e.to_string();
    let screen = eigenvalue_one_screen(&spec, o.max_word_len, EIGEN_TOL, o.jobs).map_err(err)?;
    if let Some(first) = screen.first() {
        let words: Vec<&str> = screen
            .iter()
            .filter_map(|c| match c {
                Certificate::FixedPointViolation(f) => Some(f.word_text.as_str()),
                _ => None,
            })
            .collect();
        let results =
            json!({ "stage": "eigenvalue_one_screen", "violations": words.len(), "words": words });
        return Ok(Output {
            results,
            certificates: vec![first.clone()],
            code: EXIT_OK,
        });
    }
    let Some(pair) = opposite_sign_search(&spec, o.max_word_len, o.jobs).map_err(err)? else {
        let results =
            json!({ "stage": "exhausted", "eigenvalue_one_screen": 0, "opposite_sign_pair": null });
        return Ok(Output {
            results,
            certificates: Vec::new(),
            code: EXIT_BUDGET,
        });
    };
    let Certificate::OppositeSignPair(c) = &pair else {
        unreachable!("search returns pairs")
    };
    let mut results = json!({
        "stage": "opposite_sign_search",
        "words": c.word_texts,
        "exponents": c.exponents,
        "alphas": c.alphas,
        "transversality": c.transversality,
    });
    let mode = WitnessMode::Signed {
        alpha_g: c.alphas[0],
        alpha_h: c.alphas[1],
    };
    let mut certificates = vec![pair.clone()];
    match nonproper_witness(&c.maps[0], &c.maps[1], mode, o.n_max, o.radius) {
        Ok(Certificate::BallIntersectionWitness(mut w)) => {
            w.words = Some(c.word_texts.clone());
            let ns = w.verified_exponents();
            results["witness"] = json!({ "verified": ns.len(), "exponents": ns });
            certificates.push(Certificate::BallIntersectionWitness(w));
        }
        Ok(other) => certificates.push(other),
        Err(e) => results["witness"] = json!({ "error": e.to_string() }),
    }
    Ok(Output {
        results,
        certificates,
        code: EXIT_OK,
    })
}

fn origin(spec: &GroupSpec) -> RealVector {
    RealVector::zeros(spec.dim)
}

fn scan(o: &Options) -> Result<Output, String> {
    let spec = spec(o)?;
    let cert = proper_scan(&spec, &origin(&spec), o.radius, o.max_word_len, o.jobs)
        .map_err(|e| e.to_string())?;
    let Certificate::EvidenceScan(s) = &cert else {
        unreachable!("scan returns a scan")
    };
    let results = json!({
        "evidence_only": true,
        "return_set": s.return_set(),
        "counts_by_length": s.counts_by_length,
    });
    Ok(Output {
        results,
        certificates: vec![cert],
        code: EXIT_OK,
    })
}

fn directions(o: &Options) -> Result<Output, String> {
    let spec = spec(o)?;
    let sample = direction_set_estimate(&spec, &origin(&spec), o.radius, o.max_word_len, o.jobs)
        .map_err(|e| e.to_string())?;
    Ok(Output::ok(
        serde_json::to_value(sample).expect("samples serialize"),
    ))
}

fn classify(dim: Option<usize>, group: &[String]) -> Result<Output, String> {
    let Some(dim) = dim else {
        let lines: Vec<String> = table_report().lines().map(String::from).collect();
        return Ok(Output::ok(json!({ "table": lines })));
    };
    if group.is_empty() {
        return Err("classify needs a dimension and a group descriptor".into());
    }
    let l = classification_lookup(dim, &group.join(" ")).map_err(|e| e.to_string())?;
    Ok(Output::ok(json!({
        "dim": l.dim,
        "group": l.group,
        "verdict": l.verdict,
        "text": l.verdict.to_string(),
    })))
}

fn example(name: &str, params: &[f64]) -> Result<Output, String> {
    let spec = match name {
        "margulis3d" => {
            let defaults = [4f64.ln(), std::f64::consts::FRAC_PI_2, 10.0];
            if params.len() > 3 {
                return Err("margulis3d takes at most three parameters".into());
            }
            let p: Vec<f64> = (0..3)
                .map(|i| params.get(i).copied().unwrap_or(defaults[i]))
                .collect();
            margulis3d_example(p[0], p[1], p[2]).map_err(|e| e.to_string())?
        }
        other if params.is_empty() => group_file::builtin(other)?,
        other => return Err(format!("{other} takes no parameters")),
    };
    let mut results = json!({ "name": name, "group_file": GroupFile::from_spec(&spec).to_toml() });
    if let Some(f) = spec.form.as_ref().filter(|f| f.p == f.q + 1) {
        let alphas: Vec<Value> = spec
            .generators
            .iter()
            .map(|g| margulis_alpha(g, f).map_or(Value::Null, |r| json!(r.alpha)))
            .collect();
        results["alphas"] = json!(alphas);
    }
    if let [g, h] = spec.generators.as_slice() {
        if let Ok(t) = transversality(g, h) {
            results["transversality"] = json!(t);
        }
    }
    Ok(Output::ok(results))
}

#[derive(Deserialize)]
struct StoredReport {
    schema_version: u32,
    certificates: Vec<Certificate>,
}

fn check(o: &Options) -> Result<Output, String> {
    let path = o.input.as_deref().ok_or("--input is required")?;
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    let stored: StoredReport = serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
    if stored.schema_version != SCHEMA_VERSION {
        return Err(format!(
            "unsupported schema version {}",
            stored.schema_version
        ));
    }
    let checks: Vec<Value> = stored
        .certificates
        .iter()
        .enumerate()
        .map(|(i, c)| match c.verify() {
            Ok(()) => json!({ "index": i, "kind": c.kind(), "ok": true }),
            Err(e) => json!({ "index": i, "kind": c.kind(), "ok": false, "error": e }),
        })
        .collect();
    let all_ok = !checks.is_empty() && checks.iter().all(|c| c["ok"] == json!(true));
    let code = if all_ok { EXIT_OK } else { EXIT_INPUT };
    Ok(Output {
        results: json!({ "checked": checks.len(), "all_verified": all_ok, "checks": checks }),
        certificates: Vec::new(),
        code,
    })
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<(Report, i32), String> {
    let start = Instant::now();
    let o = &cli.opts;
    if o.jobs == 0 {
        return Err("--jobs must be at least 1".into());
    }
    let out = match &cli.command {
        Command::Decompose => decompose(o),
        Command::Sign => sign(o),
        Command::Certify => certify(o),
        Command::Scan => scan(o),
        Command::Directions => directions(o),
        Command::Classify { dim, group } => classify(*dim, group),
        Command::Example { name, params } => example(name, params),
        Command::Check => check(o),
    }?;
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: cli.command.name().to_string(),
        config: config(cli),
        results: out.results,
        certificates: out.certificates,
        timing: Timing {
            seconds: start.elapsed().as_secs_f64(),
        },
    };
    Ok((report, out.code))
}

/// Parses `args` (program name first), runs the command and writes the report
/// to `--output` if given.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            return Outcome {
                code,
                stdout,
                stderr,
                report: None,
            };
        }
    };
    match execute(&cli) {
        Err(msg) => Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
            report: None,
        },
        Ok((report, code)) => {
            let text = report.render();
            match &cli.opts.output {
                Some(path) => match std::fs::write(path, &text) {
                    Ok(()) => Outcome {
                        code,
                        stdout: String::new(),
                        stderr: String::new(),
                        report: Some(report),
                    },
                    Err(e) => Outcome {
                        code: EXIT_INPUT,
                        stdout: String::new(),
                        stderr: format!("error: {path}: {e}\n"),
                        report: Some(report),
                    },
                },
                None => Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                    report: Some(report),
                },
            }
        }
    }
}
