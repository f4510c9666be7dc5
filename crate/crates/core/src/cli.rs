//! The `stacky-fan` command line: JSON on stdout, a one-line summary on stderr.
//!
//! Exit codes: 0 success, 1 a verdict is false or a gluing is incompatible,
//! 2 usage, input or bound errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Once;

use clap::{Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::error::Error;
use crate::fan::{cone_over_triangulation, is_crepant, is_smooth, orthant_fan, StackyFan};
use crate::glue::{assemble_global, level_entries, GluingConfig};
use crate::mckay::{mckay_check, QuotientModel};
use crate::render::{render_svg, RenderSpec};
use crate::simplex::{lattice_points, DilatedSimplex};
use crate::symmetric::{symmetric_unimodular_refinement, SymmetricOptions};
use crate::tower::{build_tower, cofinality_probe, CofinalTower};
use crate::triangulation::{
    all_points_triangulation, enumerate_unimodular, is_invariant_unchecked, orbit_classes,
    validate, Triangulation, DEFAULT_MAX_POINTS,
};

#[derive(Parser, Debug)]
#[command(
    name = "stacky-fan",
    version,
    about = "Triangulations, fans and towers of dilated simplices"
)]
struct Cli {
    /// Add a "timestamp" field (seconds since the epoch) to the output.
    #[arg(long, global = true)]
    timestamp: bool,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Lattice points of n·Δ^r in canonical order.
    Points {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: u64,
    },
    /// All unimodular triangulations of n·Δ^r.
    Enumerate {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: u64,
        /// List the symmetric-group orbits.
        #[arg(long)]
        orbits: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
        max_points: usize,
    },
    /// A symmetric unimodular triangulation refining all of n·Δ^r.
    Symrefine {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 8)]
        max_retry: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
        max_points: usize,
    },
    /// The fan over a triangulation.
    Fan {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        smooth: bool,
        #[arg(long)]
        crepant: bool,
    },
    /// Validity, unimodularity and invariance of a triangulation.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Rank audit of a resolution against the group order.
    Mckay {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: u64,
        #[arg(long = "in")]
        input: Option<PathBuf>,
    },
    /// The cofinal tower of symmetric triangulations.
    Tower {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        depth: usize,
        /// A triangulation to locate in the tower.
        #[arg(long)]
        probe: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        max_retry: usize,
    },
    /// Check face gluings against the last entry of a tower.
    Glue {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        tower: PathBuf,
    },
    /// Draw a triangulation (r <= 2) as SVG.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 480)]
        width: u32,
        #[arg(long, default_value_t = 440)]
        height: u32,
        /// Comma-separated cell indices to fill.
        #[arg(long, value_delimiter = ',')]
        highlight: Vec<usize>,
    },
}

struct Outcome {
    code: i32,
    doc: Value,
    summary: String,
}

fn ok(doc: Value, summary: impl Into<String>) -> Outcome {
    Outcome {
        code: 0,
        doc,
        summary: summary.into(),
    }
}

struct Failure {
    code: i32,
    doc: Value,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Compatibility(_) | Error::TowerTooShallow { .. } => 1,
            _ => 2,
        };
        let doc = match &e {
            Error::Compatibility(c) => json!({ "error": c }),
            other => json!({ "error": other.to_string() }),
        };
        Failure {
            code,
            message: e.to_string(),
            doc,
        }
    }
}

fn input_failure(path: &Path, message: String) -> Failure {
    let message = format!("{}: {message}", path.display());
    Failure {
        code: 2,
        doc: json!({ "error": message }),
        message,
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input_failure(path, e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| input_failure(path, e.to_string()))
}

fn configure_threads() {
    static INIT: Once = Once::new();
    INIT.call_once(|| {
        if let Some(k) = std::env::var("STACKY_FAN_THREADS")
            .ok()
            .and_then(|v| v.parse::<usize>().ok())
            .filter(|&k| k > 0)
        {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build_global();
        }
    });
}

/// Parse `args` (program name first), execute, and write the output
/// document; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    2
                }
            };
        }
    };
    configure_threads();
    let verb = verb_name(&cli.verb);
    let (code, mut doc, line) = match execute(&cli.verb) {
        Ok(o) => (o.code, o.doc, o.summary),
        Err(f) => (f.code, f.doc, format!("error: {}", f.message)),
    };
    if let Value::Object(map) = &mut doc {
        map.insert("verb".into(), verb.into());
        if cli.timestamp {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            map.insert("timestamp".into(), secs.into());
        }
    }
    let text = serde_json::to_string_pretty(&doc).expect("output serializes");
    let _ = writeln!(stdout, "{text}");
    let _ = writeln!(stderr, "{verb}: {line}");
    code
}

fn verb_name(v: &Verb) -> &'static str {
    match v {
        Verb::Points { .. } => "points",
        Verb::Enumerate { .. } => "enumerate",
        Verb::Symrefine { .. } => "symrefine",
        Verb::Fan { .. } => "fan",
        Verb::Verify { .. } => "verify",
        Verb::Mckay { .. } => "mckay",
        Verb::Tower { .. } => "tower",
        Verb::Glue { .. } => "glue",
        Verb::Render { .. } => "render",
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("value serializes")
}

fn execute(verb: &Verb) -> Result<Outcome, Failure> {
    match verb {
        Verb::Points { r, n } => {
            let s = DilatedSimplex::new(*r, *n)?;
            let pts = lattice_points(&s);
            Ok(ok(
                json!({ "r": r, "n": n, "count": pts.len(), "points": pts }),
                format!("{} lattice points", pts.len()),
            ))
        }
        Verb::Enumerate {
            r,
            n,
            orbits,
            max_points,
        } => {
            let all = enumerate_unimodular(*r, *n, *max_points)?;
            let classes = orbit_classes(&all)?;
            let mut doc = json!({
                "r": r,
                "n": n,
                "max_points": max_points,
                "count": all.len(),
                "orbits": classes.len(),
                "points": all.first().map(|t| to_value(&t.points())),
                "triangulations": all.iter().map(|t| t.cells()).collect::<Vec<_>>(),
            });
            if *orbits {
                doc["orbit_classes"] = classes
                    .iter()
                    .map(|o| {
                        json!({
                            "representative": o.representative.cells(),
                            "members": o.members,
                        })
                    })
                    .collect();
            }
            Ok(ok(
                doc,
                format!("{} triangulations in {} orbits", all.len(), classes.len()),
            ))
        }
        Verb::Symrefine {
            r,
            n,
            max_retry,
            max_points,
        } => {
            let opts = SymmetricOptions {
                max_points: *max_points,
                max_retry: *max_retry,
                ..SymmetricOptions::default()
            };
            let res = symmetric_unimodular_refinement(*r, *n, &opts)?;
            let mut doc = to_value(&res);
            doc["max_retry"] = (*max_retry).into();
            doc["max_points"] = (*max_points).into();
            let code = if res.certificates.all_hold() { 0 } else { 1 };
            Ok(Outcome {
                code,
                summary: format!(
                    "m = {}, level {}, {} cells",
                    res.m,
                    res.level,
                    res.triangulation.cells().len()
                ),
                doc,
            })
        }
        Verb::Fan {
            input,
            smooth,
            crepant,
        } => {
            let t: Triangulation = read_json(input)?;
            let fan = cone_over_triangulation(&t)?;
            let stacky = StackyFan::over_congruence(fan.clone())?;
            let mut doc = json!({
                "input": input,
                "fan": to_value(&fan),
                "lattice_map": to_value(&stacky)["lattice_map"].clone(),
                "group": to_value(&stacky.group()),
            });
            let mut verdict = true;
            if *smooth {
                let rep = is_smooth(&fan)?;
                verdict &= rep.smooth;
                doc["smooth"] = to_value(&rep);
            }
            if *crepant {
                let c = is_crepant(&fan, &orthant_fan(t.r(), t.n())?)?;
                verdict &= c;
                doc["crepant"] = c.into();
            }
            Ok(Outcome {
                code: if verdict { 0 } else { 1 },
                summary: format!("{} maximal cones", fan.max_cones().len()),
                doc,
            })
        }
        Verb::Verify { input } => {
            let t: Triangulation = read_json(input)?;
            let report = validate(&t);
            let valid = report.is_valid();
            let unimodular = valid && (0..t.cells().len()).all(|c| t.cell_volume(c) == 1);
            let invariant = valid && is_invariant_unchecked(&t);
            Ok(Outcome {
                code: if valid { 0 } else { 1 },
                summary: format!("valid={valid} unimodular={unimodular} invariant={invariant}"),
                doc: json!({
                    "input": input,
                    "r": t.r(),
                    "n": t.n(),
                    "cells": t.cells().len(),
                    "volume": t.total_volume().to_string(),
                    "valid": valid,
                    "violations": report.violations,
                    "unimodular": unimodular,
                    "invariant": invariant,
                    "interior_points_are_vertices": t.interior_points_are_vertices(),
                }),
            })
        }
        Verb::Mckay { r, n, input } => {
            let t = match input {
                Some(p) => read_json(p)?,
                None => all_points_triangulation(*r, *n)?,
            };
            let rep = mckay_check(QuotientModel { r: *r, n: *n }, &t)?;
            let mut doc = to_value(&rep);
            doc["input"] = to_value(input);
            Ok(Outcome {
                code: if rep.verdict { 0 } else { 1 },
                summary: rep.to_json_line(),
                doc,
            })
        }
        Verb::Tower {
            r,
            depth,
            probe,
            max_retry,
        } => {
            let opts = SymmetricOptions {
                max_retry: *max_retry,
                ..SymmetricOptions::default()
            };
            let tower = match build_tower(*r, *depth, &opts) {
                Ok(t) => t,
                Err(f) => {
                    let mut fail = Failure::from(f.error);
                    fail.doc["partial"] = to_value(&f.partial);
                    return Err(fail);
                }
            };
            let verified = tower.verify();
            let mut doc = json!({
                "r": r,
                "depth": depth,
                "max_retry": max_retry,
                "levels": tower.levels(),
                "factors": tower.factors,
                "verified": verified.is_ok(),
                "tower": to_value(&tower),
            });
            let mut code = if verified.is_ok() { 0 } else { 1 };
            if let Some(p) = probe {
                let t: Triangulation = read_json(p)?;
                match cofinality_probe(&tower, &t) {
                    Ok(res) => doc["probe"] = to_value(&res),
                    Err(e @ Error::TowerTooShallow { .. }) => {
                        doc["probe"] = json!({ "error": e.to_string() });
                        code = 1;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            Ok(Outcome {
                code,
                summary: format!("levels {:?}", tower.levels()),
                doc,
            })
        }
        Verb::Glue { config, tower } => {
            let cfg: GluingConfig = read_json(config)?;
            let raw: Value = read_json(tower)?;
            let raw = raw.get("tower").cloned().unwrap_or(raw);
            let tw: CofinalTower =
                serde_json::from_value(raw).map_err(|e| input_failure(tower, e.to_string()))?;
            let last = tw
                .entries
                .last()
                .ok_or_else(|| input_failure(tower, "tower has no entries".into()))?;
            let report = validate(&last.triangulation);
            if !report.is_valid() {
                return Err(input_failure(
                    tower,
                    format!(
                        "last entry is not a triangulation ({} violations)",
                        report.violations.len()
                    ),
                ));
            }
            let entries = level_entries(&tw, tw.entries.len() - 1)?;
            let global = assemble_global(&cfg.charts, &cfg.gluings, &entries)?;
            Ok(ok(
                json!({
                    "config": config,
                    "tower": tower,
                    "level": global.level,
                    "charts": cfg.charts.len(),
                    "checks": global.checks,
                    "compatible": true,
                }),
                format!(
                    "{} gluings compatible at level {}",
                    global.checks.len(),
                    global.level
                ),
            ))
        }
        Verb::Render {
            input,
            out,
            width,
            height,
            highlight,
        } => {
            let t: Triangulation = read_json(input)?;
            let spec = RenderSpec {
                width: *width,
                height: *height,
                highlight: highlight.clone(),
            };
            let rendered = render_svg(&t, &spec)?;
            std::fs::write(out, &rendered.svg).map_err(|e| input_failure(out, e.to_string()))?;
            Ok(ok(
                json!({
                    "input": input,
                    "out": out,
                    "width": width,
                    "height": height,
                    "highlight": highlight,
                    "dots": rendered.dots,
                    "edges": rendered.edges,
                }),
                format!("wrote {}", out.display()),
            ))
        }
    }
}
