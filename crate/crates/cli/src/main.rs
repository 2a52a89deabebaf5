use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cuboid_core::cuboid::build_graph;
use cuboid_core::polygon::{self, SpecialPolygon};
use cuboid_core::reduce::{express, locate_point, parse_rational, ExactPoint, Method};
use cuboid_core::{CosetSystem, Error, Family, Psl2Elt};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "cuboid",
    version,
    about = "Cuboid graphs and special polygons of congruence subgroups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GroupSpec {
    /// gamma0, gamma_upper0, gamma1, gamma_upper1 or gamma
    #[arg(long, value_parser = parse_family)]
    group: Family,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    level: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolygonFormat {
    Json,
    Svg,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the pointed cuboid graph
    Graph {
        #[command(flatten)]
        spec: GroupSpec,
        #[arg(long, value_enum, default_value = "json")]
        format: GraphFormat,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Emit the special polygon with its side pairings and generators
    Polygon {
        #[command(flatten)]
        spec: GroupSpec,
        #[arg(long, value_enum, default_value = "json")]
        format: PolygonFormat,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Print index, elliptic points, cusps and genus
    Invariants {
        #[command(flatten)]
        spec: GroupSpec,
    },
    /// Write a group element as a word in the independent generators
    Express {
        #[command(flatten)]
        spec: GroupSpec,
        /// a,b,c,d
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        /// Use the geodesic tracer instead of coset rewriting
        #[arg(long)]
        trace: bool,
    },
    /// Move a point of the upper half plane into the polygon
    Locate {
        #[command(flatten)]
        spec: GroupSpec,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Time polygon construction over a range of levels
    Bench {
        #[arg(long, value_parser = parse_family)]
        group: Family,
        /// Comma-separated levels
        #[arg(long, value_delimiter = ',', num_args = 1.., value_parser = clap::value_parser!(u64).range(1..))]
        levels: Vec<u64>,
    },
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Domain(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_) => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

fn system(spec: &GroupSpec) -> Result<CosetSystem, Failure> {
    Ok(cuboid_core::build(spec.group, spec.level)?)
}

fn polygon_of(spec: &GroupSpec) -> Result<(CosetSystem, SpecialPolygon), Failure> {
    let sys = system(spec)?;
    let poly = polygon::build(&sys)?;
    Ok((sys, poly))
}

fn emit(text: String, output: &Option<PathBuf>) -> Result<(), Failure> {
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Graph {
            spec,
            format,
            output,
        } => {
            let graph = build_graph(&system(&spec)?)?;
            let text = match format {
                GraphFormat::Json => pretty(&graph.to_json()),
                GraphFormat::Dot => graph.to_dot(),
            };
            emit(text, &output)
        }
        Command::Polygon {
            spec,
            format,
            output,
        } => {
            let (_, poly) = polygon_of(&spec)?;
            let text = match format {
                PolygonFormat::Json => pretty(&poly.to_json()),
                PolygonFormat::Svg => poly.to_svg(),
            };
            emit(text, &output)
        }
        Command::Invariants { spec } => {
            let inv = build_graph(&system(&spec)?)?.invariants();
            let v = serde_json::to_value(&inv).expect("serializable");
            emit(
                pretty(
                    &json!({ "group": spec.group.name(), "level": spec.level, "invariants": v }),
                ),
                &None,
            )
        }
        Command::Express {
            spec,
            matrix,
            trace,
        } => {
            let g: Psl2Elt = matrix
                .parse()
                .map_err(|e: Error| Failure::Usage(e.to_string()))?;
            let (sys, poly) = polygon_of(&spec)?;
            let method = if trace {
                Method::Trace
            } else {
                Method::Schreier
            };
            let word = express(&sys, &poly, &g, method)?;
            let value = word.evaluate(&poly.generators);
            if value != g {
                return Err(Failure::Domain(format!(
                    "word evaluates to {value}, not {g}"
                )));
            }
            let gens: Vec<String> = poly
                .generators
                .iter()
                .map(|h| h.matrix.to_string())
                .collect();
            emit(
                pretty(&json!({
                    "matrix": g.to_string(),
                    "word": word.to_json(),
                    "generators": gens,
                    "evaluates_to": value.to_string(),
                    "verified": true,
                })),
                &None,
            )
        }
        Command::Locate { spec, x, y } => {
            let x = parse_rational(&x)?;
            let y = parse_rational(&y)?;
            let z = ExactPoint::new(x, y)?;
            let (_, poly) = polygon_of(&spec)?;
            let (w, word) = locate_point(&poly, &z)?;
            emit(
                pretty(&json!({
                    "point": [z.x.to_string(), z.y.to_string()],
                    "image": [w.x.to_string(), w.y.to_string()],
                    "word": word.to_json(),
                })),
                &None,
            )
        }
        Command::Bench { group, levels } => {
            println!("{:>10} {:>12} {:>12}", "N", "index", "seconds");
            for n in levels {
                let t = Instant::now();
                let sys = cuboid_core::build(group, n)?;
                polygon::build(&sys)?;
                println!(
                    "{n:>10} {:>12} {:>12.6}",
                    sys.n(),
                    t.elapsed().as_secs_f64()
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
