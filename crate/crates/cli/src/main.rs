//! `geomprob`: experiment drivers printing one JSON report line each.
//!
//! Exit status: 0 on pass, inconclusive or plain report; 1 on a failed
//! verdict; 2 on usage errors and malformed input.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use geomprob::bodies::BodySpec;
use geomprob::derivatives::SymmetricFunction;
use geomprob::experiments::{self, sig12, DerivativeTarget, DetcovCase, ExperimentReport, Verdict};
use geomprob::symmetry2d::{blaschke_shake, steiner_symmetrize};
use geomprob::{ConvexBody, Point, Polygon2D, Seed};
use serde_json::Value;

#[derive(Parser, Debug)]
#[command(
    name = "geomprob",
    version,
    about = "Monte Carlo and exact checks for random simplices in convex bodies"
)]
struct Cli {
    /// Base seed; also read from GEOMPROB_SEED, the flag wins.
    #[arg(long, env = "GEOMPROB_SEED", default_value_t = 1, global = true)]
    seed: u64,
    /// Sample count per estimate.
    #[arg(long, global = true)]
    n: Option<u64>,
    /// Write tables to this CSV file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Print table rows as JSON lines instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form moments and ratio bounds.
    ExactTable {
        /// Dimensions, e.g. `2..4` (inclusive) or `2,3`.
        #[arg(long, default_value = "2..4", value_parser = parse_range)]
        d: Values,
        #[arg(long, default_value = "1..3", value_parser = parse_range)]
        k: Values,
    },
    /// `E V^k` of a body given as JSON (or `@file`).
    Estimate {
        #[arg(long)]
        body: String,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
    /// Analytic derivative under a moving cut against finite differences.
    DerivativeCheck {
        #[arg(long)]
        body: String,
        /// Unit cut direction, comma separated.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        v: Point,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        /// `detcov`, or a symmetric function: `one`, `coordsum`, `simplexvol`.
        #[arg(long, default_value = "simplexvol")]
        f: String,
        /// Finite-difference step; defaults to 2% of the family's range.
        #[arg(long)]
        h: Option<f64>,
    },
    /// Steiner symmetrization or Blaschke shaking of a polygon; prints the
    /// polygon as JSON.
    Symmetrize {
        #[arg(long)]
        poly: String,
        #[arg(long, value_enum)]
        op: Op,
        /// Chord direction is the y axis rotated by this angle (steiner).
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        angle: f64,
        /// Line `y = line` to shake onto.
        #[arg(long, allow_hyphen_values = true)]
        line: Option<f64>,
    },
    /// Pinned-ratio pipeline at a boundary point of a polygon.
    PlaneCheck {
        #[arg(long)]
        poly: String,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        x: Point,
    },
    /// `E V_L` against the pinned moment at the apex of the half-ball with a
    /// cone of height `eps` (`eps = 0`: the plain half-ball).
    Counterexample {
        #[arg(long, default_value_t = 4)]
        d: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
    /// Reversal of `det A` under inclusion.
    DetcovCounterexample {
        #[arg(long, default_value = "simplex")]
        body: DetcovCase,
    },
    /// Nested random polygon pairs: `det A` and `E V` monotonicity.
    #[command(name = "monotonicity-2d")]
    Monotonicity2d {
        #[arg(long, default_value_t = 50)]
        pairs: usize,
    },
    /// Smallest `k` with ratio bound below 1.
    K0Scan {
        #[arg(long, default_value = "2..4", value_parser = parse_range)]
        d: Values,
        #[arg(long, default_value_t = geomprob::exact::K_MAX_DEFAULT)]
        k_max: u64,
    },
    /// The open case d = 3, k = 1; always inconclusive.
    #[command(name = "d3-probe")]
    D3Probe,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Op {
    Steiner,
    Shake,
}

/// Integers given as an inclusive range `a..b` or a comma-separated list.
#[derive(Clone, Debug)]
struct Values(Vec<u64>);

fn parse_range(s: &str) -> Result<Values, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a
            .trim()
            .parse()
            .map_err(|e| format!("bad range start: {e}"))?;
        let b: u64 = b
            .trim()
            .parse()
            .map_err(|e| format!("bad range end: {e}"))?;
        if a > b {
            return Err(format!("empty range {a}..{b}"));
        }
        return Ok(Values((a..=b).collect()));
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .map_err(|e| format!("bad value {x:?}: {e}"))
        })
        .collect::<Result<_, _>>()
        .map(Values)
}

fn parse_point(s: &str) -> Result<Point, String> {
    let coords = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| format!("bad coordinate {x:?}: {e}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Point::new(&coords).map_err(|e| e.to_string())
}

/// Literal JSON, or `@path` to read it from a file.
fn read_json_arg(arg: &str) -> Result<String, String> {
    match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| format!("cannot read {path}: {e}")),
        None => Ok(arg.to_string()),
    }
}

fn parse_body(arg: &str) -> Result<ConvexBody, String> {
    ConvexBody::from_json(&read_json_arg(arg)?).map_err(|e| e.to_string())
}

/// A polygon body spec, or a bare list of `[x, y]` vertices.
fn parse_polygon(arg: &str) -> Result<Polygon2D, String> {
    let text = read_json_arg(arg)?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| format!("malformed polygon JSON: {e}"))?;
    if value.is_array() {
        let coords: Vec<[f64; 2]> =
            serde_json::from_value(value).map_err(|e| format!("malformed polygon JSON: {e}"))?;
        return Polygon2D::from_coords(&coords).map_err(|e| e.to_string());
    }
    match ConvexBody::from_json(&text).map_err(|e| e.to_string())? {
        ConvexBody::Polygon2D(p) => Ok(p),
        _ => Err("expected a polygon".into()),
    }
}

/// Bad arguments or input; exit status 2.
struct Usage(String);

impl From<geomprob::Error> for Usage {
    fn from(e: geomprob::Error) -> Self {
        Usage(e.to_string())
    }
}

impl From<String> for Usage {
    fn from(e: String) -> Self {
        Usage(e)
    }
}

/// Integral values print as JSON integers.
fn json_number(v: f64) -> Value {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        Value::from(v as i64)
    } else {
        Value::from(sig12(v))
    }
}

fn csv_number(x: Option<f64>) -> String {
    x.map(|v| sig12(v).to_string()).unwrap_or_default()
}

/// Writes `header` and `rows` to `--out`, and to stdout as CSV or JSON lines.
fn emit_table(cli: &Cli, header: &[&str], rows: &[Vec<Option<f64>>]) -> Result<(), Usage> {
    let mut csv = header.join(",");
    csv.push('\n');
    for r in rows {
        let line: Vec<String> = r.iter().map(|x| csv_number(*x)).collect();
        let _ = writeln!(csv, "{}", line.join(","));
    }
    if let Some(path) = &cli.out {
        fs::write(path, &csv).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    if cli.json {
        for r in rows {
            let obj: serde_json::Map<String, Value> = header
                .iter()
                .zip(r)
                .map(|(h, x)| (h.to_string(), x.map(json_number).unwrap_or(Value::Null)))
                .collect();
            println!("{}", Value::Object(obj));
        }
    } else if cli.out.is_none() {
        print!("{csv}");
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<Option<ExperimentReport>, Usage> {
    let seed = Seed::new(cli.seed);
    let n = cli.n.unwrap_or(1_000_000);
    let report = match &cli.command {
        Command::ExactTable { d, k } => {
            let (rows, rep) = experiments::exact_table(&d.0, &k.0)?;
            let table: Vec<Vec<Option<f64>>> = rows
                .iter()
                .map(|r| {
                    vec![
                        Some(r.d as f64),
                        Some(r.k as f64),
                        Some(r.ball_moment),
                        Some(r.pinned_moment),
                        r.ratio_bound,
                        r.chain_bound,
                    ]
                })
                .collect();
            emit_table(
                cli,
                &[
                    "d",
                    "k",
                    "ball_moment",
                    "pinned_moment",
                    "ratio_bound",
                    "chain_bound",
                ],
                &table,
            )?;
            rep
        }
        Command::Estimate { body, k } => experiments::estimate(&parse_body(body)?, *k, n, seed)?,
        Command::DerivativeCheck { body, v, t, f, h } => {
            let body = parse_body(body)?;
            let target = if f == "detcov" {
                DerivativeTarget::DetCov
            } else {
                DerivativeTarget::Crofton(SymmetricFunction::by_name(f, body.dim())?)
            };
            experiments::derivative_check(&body, v, *t, &target, *h, n, seed)?
        }
        Command::Symmetrize {
            poly,
            op,
            angle,
            line,
        } => {
            let p = parse_polygon(poly)?;
            let out = match op {
                Op::Steiner => steiner_symmetrize(&p, *angle)?,
                Op::Shake => {
                    let line = line.ok_or_else(|| "shake needs --line".to_string())?;
                    blaschke_shake(&p, line)?
                }
            };
            let spec = BodySpec::describe(&ConvexBody::Polygon2D(out));
            println!(
                "{}",
                serde_json::to_string(&spec).expect("polygon serializes")
            );
            return Ok(None);
        }
        Command::PlaneCheck { poly, x } => {
            experiments::plane_check(&parse_polygon(poly)?, x, n, seed)?
        }
        Command::Counterexample { d, eps } => experiments::counterexample(*d, *eps, n, seed)?,
        Command::DetcovCounterexample { body } => {
            experiments::detcov_counterexample(*body, n, seed)?
        }
        Command::Monotonicity2d { pairs } => experiments::monotonicity_2d(*pairs, n, seed)?,
        Command::K0Scan { d, k_max } => {
            let rep = experiments::k0_scan(&d.0, *k_max)?;
            let table: Vec<Vec<Option<f64>>> =
                d.0.iter()
                    .map(|&dd| vec![Some(dd as f64), rep.get(&format!("k0[d={dd}]"))])
                    .collect();
            emit_table(cli, &["d", "k0"], &table)?;
            rep
        }
        Command::D3Probe => experiments::d3_probe(n, seed)?,
    };
    Ok(Some(report))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Some(rep)) => {
            println!("{}", rep.to_json());
            if rep.verdict == Verdict::Fail {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
