//! `planeaut`: command-line front end for the `planeaut` library.
//!
//! Exit codes: 0 success, 1 a domain verdict (not an automorphism, no
//! normal form found), 2 usage or parse errors, 3 internal errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use planeaut::family::ParamFamily;
use planeaut::fixed::{fixed_set, FixedSet};
use planeaut::lab::{run_experiment, ExpansionReport, ExperimentConfig};
use planeaut::nilpotent::{normalize_nilpotent_family, NormalForm, NormalizeOptions};
use planeaut::separable::{match_separable, Separability, SeparableBounds};
use planeaut::{jung, AutError, Field, LabError, MapError, NilpotentError, PlaneMap};

/// Version of the JSON envelope; bumped on any incompatible change.
const SCHEMA: &str = "planeaut/1";

#[derive(Parser, Debug)]
#[command(name = "planeaut", version, about = "Polynomial automorphisms of the affine plane")]
struct Cli {
    /// Coefficient field: `q` or `fp:<prime>`.
    #[arg(long, global = true, default_value = "q", value_parser = parse_field)]
    field: Field,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Seed for sampled checks; `expand` uses it in place of the config's.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Alternating word of an automorphism.
    Decompose {
        #[arg(long)]
        map: String,
    },
    /// Inverse of an automorphism.
    Invert {
        #[arg(long)]
        map: String,
    },
    /// Decide whether a map is an automorphism.
    CheckAut {
        #[arg(long)]
        map: String,
    },
    /// Fixed points of a map.
    Fix {
        #[arg(long)]
        map: String,
    },
    /// Conjugate a family of elementary maps into a template group.
    ClassifyNilpotent {
        #[arg(long)]
        family: String,
        #[arg(long, value_delimiter = ',', required = true)]
        params: Vec<String>,
        #[arg(long)]
        degree: u32,
        #[arg(long, default_value_t = NormalizeOptions::default().samples)]
        samples: usize,
    },
    /// Search for a co-ordinate separable normal form.
    MatchSeparable {
        #[arg(long)]
        family: String,
        #[arg(long, value_delimiter = ',', required = true)]
        params: Vec<String>,
        #[arg(long, default_value_t = SeparableBounds::default().max_word)]
        max_word: usize,
        #[arg(long, default_value_t = SeparableBounds::default().max_deg)]
        max_deg: u32,
    },
    /// Run an expansion experiment from a TOML config.
    Expand {
        #[arg(long)]
        config: PathBuf,
        /// Write the full report as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a one-row CSV table.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn parse_field(s: &str) -> Result<Field, String> {
    s.parse::<Field>().map_err(|e| e.to_string())
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Decompose { .. } => "decompose",
            Command::Invert { .. } => "invert",
            Command::CheckAut { .. } => "check-aut",
            Command::Fix { .. } => "fix",
            Command::ClassifyNilpotent { .. } => "classify-nilpotent",
            Command::MatchSeparable { .. } => "match-separable",
            Command::Expand { .. } => "expand",
        }
    }
}

struct Success {
    result: Value,
    human: String,
    /// 0, or 1 for a negative verdict.
    exit: u8,
}

#[derive(Debug)]
struct Failure {
    code: &'static str,
    message: String,
    exit: u8,
}

impl Failure {
    fn new(code: &'static str, exit: u8, message: impl ToString) -> Failure {
        Failure {
            code,
            message: message.to_string(),
            exit,
        }
    }
}

impl From<MapError> for Failure {
    fn from(e: MapError) -> Self {
        Failure::new("parse_error", 2, e)
    }
}

impl From<AutError> for Failure {
    fn from(e: AutError) -> Self {
        match e {
            AutError::NotAnAutomorphism(_) => Failure::new("not_automorphism", 1, e),
            AutError::DegenerateInput => Failure::new("degenerate_input", 1, e),
            AutError::Internal(_) => Failure::new("internal", 3, e),
        }
    }
}

impl From<NilpotentError> for Failure {
    fn from(e: NilpotentError) -> Self {
        match e {
            NilpotentError::Aut(a) => a.into(),
            NilpotentError::Poly(_) | NilpotentError::Family(_) => Failure::new("parse_error", 2, e),
            NilpotentError::SampleNotInEn { .. } => Failure::new("sample_not_in_en", 1, e),
            NilpotentError::SampleNotAutomorphism { .. } => Failure::new("not_automorphism", 1, e),
            NilpotentError::NotAffine { .. } | NilpotentError::NotNilpotentOrNotTriangularizable => {
                Failure::new("not_nilpotent", 1, e)
            }
        }
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        match e {
            LabError::Config { .. } | LabError::ConfigSyntax(_) => Failure::new("config_error", 2, e),
            LabError::Io(_) => Failure::new("io_error", 3, e),
            LabError::Nilpotent(n) => n.into(),
        }
    }
}

fn ok(result: Value, human: String) -> Result<Success, Failure> {
    Ok(Success { result, human, exit: 0 })
}

fn describe_fixed(s: &FixedSet) -> String {
    match s {
        FixedSet::WholePlane => "every point is fixed".to_string(),
        FixedSet::Finite { points, complete, certificate } => {
            let mut out = format!(
                "{} fixed point(s){} (resultant degree {}, Bezout bound {})",
                points.len(),
                if *complete { "" } else { " over the base field" },
                certificate.resultant_degree,
                certificate.bezout_bound,
            );
            for p in points {
                out.push_str(&format!("\n  ({}, {})", p[0], p[1]));
            }
            out
        }
        FixedSet::InfiniteCurve { components, isolated_points, .. } => {
            let mut out = String::from("fixed curve");
            for c in components {
                out.push_str(&format!("\n  {c} = 0"));
            }
            for p in isolated_points {
                out.push_str(&format!("\n  isolated point ({}, {})", p[0], p[1]));
            }
            out
        }
    }
}

fn run(cli: &Cli) -> Result<Success, Failure> {
    let field = cli.field;
    let seed = cli.seed.unwrap_or(0);
    match &cli.command {
        Command::Decompose { map } => {
            let f = PlaneMap::parse(map, field)?;
            let w = jung::decompose(&f)?;
            let human = if w.is_empty() {
                "identity (empty word)".to_string()
            } else {
                w.letters()
                    .iter()
                    .map(|l| format!("{} {}", l.factor(), l.map()))
                    .collect::<Vec<_>>()
                    .join("\n")
            };
            ok(json!({ "length": w.len(), "word": w }), human)
        }
        Command::Invert { map } => {
            let f = PlaneMap::parse(map, field)?;
            let g = jung::invert(&f)?;
            ok(json!({ "inverse": g }), g.to_string())
        }
        Command::CheckAut { map } => {
            let f = PlaneMap::parse(map, field)?;
            match jung::decompose(&f) {
                Ok(_) => ok(json!({ "automorphism": true }), "automorphism".to_string()),
                Err(AutError::NotAnAutomorphism(reason)) => Ok(Success {
                    result: json!({ "automorphism": false, "reason": reason.to_string() }),
                    human: format!("not an automorphism: {reason}"),
                    exit: 1,
                }),
                Err(e) => Err(e.into()),
            }
        }
        Command::Fix { map } => {
            let f = PlaneMap::parse(map, field)?;
            let s = fixed_set(&f);
            ok(serde_json::to_value(&s).expect("fixed set serializes"), describe_fixed(&s))
        }
        Command::ClassifyNilpotent { family, params, degree, samples } => {
            let fam = ParamFamily::parse(family, field, params)?;
            let opts = NormalizeOptions { samples: *samples, seed };
            match normalize_nilpotent_family(&fam, *degree, &opts)? {
                NormalForm::Found { template, pre, post } => ok(
                    json!({ "verdict": "found", "template": template, "pre": pre, "post": post }),
                    format!("template {template}\npre  {pre}\npost {post}"),
                ),
                NormalForm::Unknown => Ok(Success {
                    result: json!({ "verdict": "unknown" }),
                    human: "unknown: no template found".to_string(),
                    exit: 1,
                }),
            }
        }
        Command::MatchSeparable { family, params, max_word, max_deg } => {
            let fam = ParamFamily::parse(family, field, params)?;
            let bounds = SeparableBounds {
                max_word: *max_word,
                max_deg: *max_deg,
                seed,
                ..SeparableBounds::default()
            };
            match match_separable(&fam, &bounds)? {
                Separability::Separable { pre, post, case, template } => ok(
                    json!({ "verdict": "separable", "case": case, "template": template, "pre": pre, "post": post }),
                    format!("separable, case {case} ({template})\npre  {pre}\npost {post}"),
                ),
                Separability::Unknown => Ok(Success {
                    result: json!({ "verdict": "unknown" }),
                    human: "unknown: no separable form within the bounds".to_string(),
                    exit: 1,
                }),
            }
        }
        Command::Expand { config, out, csv, workers } => {
            let text = fs::read_to_string(config)
                .map_err(|e| Failure::new("usage", 2, format!("cannot read {}: {e}", config.display())))?;
            let mut cfg = ExperimentConfig::from_toml(&text)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(w) = workers {
                cfg.workers = *w;
            }
            let report = run_experiment(&cfg)?;
            if let Some(path) = out {
                fs::write(path, report.to_json() + "\n").map_err(|e| Failure::new("io_error", 3, e))?;
            }
            if let Some(path) = csv {
                write_csv(path, &report).map_err(|e| Failure::new("io_error", 3, e))?;
            }
            let human = format!(
                "|A| = {}, |B| = {}, |F| = {} ({} rejected)\n|F*A| = {}, exponent {:.4} (at most {:.4})\nlargest line: {}\nlargest coset fraction: {}",
                report.a_size,
                report.b_size,
                report.valid_maps,
                report.rejected.len(),
                report.image_size,
                report.exponent,
                report.exponent_bound,
                report.gp.max_line(),
                report
                    .eps
                    .as_ref()
                    .map_or("not computed".to_string(), |e| format!("{:.4} ({})", e.fraction, e.template)),
            );
            ok(serde_json::to_value(&report).expect("report serializes"), human)
        }
    }
}

fn write_csv(path: &PathBuf, report: &ExpansionReport) -> Result<(), Box<dyn std::error::Error>> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(ExpansionReport::CSV_HEADER)?;
    w.write_record(report.csv_row())?;
    w.flush()?;
    Ok(())
}

fn envelope(command: &str, field: Field, seed: u64) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    m.insert("command".into(), json!(command));
    m.insert("field".into(), json!(field.to_string()));
    m.insert("seed".into(), json!(seed));
    m
}

fn print_failure(format: Format, mut env: serde_json::Map<String, Value>, f: &Failure) {
    match format {
        Format::Json => {
            env.insert("error".into(), json!({ "code": f.code, "message": f.message }));
            println!("{}", serde_json::to_string_pretty(&Value::Object(env)).unwrap());
        }
        Format::Human => eprintln!("error [{}]: {}", f.code, f.message),
    }
}

/// Best-effort look at raw arguments so usage errors can still honor
/// `--format json`.
fn wants_json(args: &[String]) -> bool {
    args.windows(2).any(|w| w[0] == "--format" && w[1] == "json") || args.iter().any(|a| a == "--format=json")
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() || !wants_json(&args) {
                e.exit();
            }
            let f = Failure::new("usage", 2, e.to_string().trim());
            print_failure(Format::Json, envelope("", Field::Rational, 0), &f);
            return ExitCode::from(2);
        }
    };
    // `expand` echoes the seed and field the experiment actually used
    let expand_cfg = match &cli.command {
        Command::Expand { config, .. } => fs::read_to_string(config)
            .ok()
            .and_then(|t| ExperimentConfig::from_toml(&t).ok()),
        _ => None,
    };
    let seed = cli.seed.or(expand_cfg.as_ref().map(|c| c.seed)).unwrap_or(0);
    let field = expand_cfg.map_or(cli.field, |c| Field::Prime(c.prime));
    let env = envelope(cli.command.name(), field, seed);
    match run(&cli) {
        Ok(s) => {
            match cli.format {
                Format::Json => {
                    let mut env = env;
                    env.insert("result".into(), s.result);
                    println!("{}", serde_json::to_string_pretty(&Value::Object(env)).unwrap());
                }
                Format::Human => println!("{}", s.human),
            }
            ExitCode::from(s.exit)
        }
        Err(f) => {
            print_failure(cli.format, env, &f);
            ExitCode::from(f.exit)
        }
    }
}
