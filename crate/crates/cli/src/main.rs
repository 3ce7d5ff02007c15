//! `thetablock`: lattice data, series expansion, Hecke operators and the
//! verification campaigns on the command line.

mod campaigns;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use thetablock::blocks::parse_block;
use thetablock::hecke::apply_t_minus;
use thetablock::{rational, Error, FourierSeries, GramLattice, Rat};

use campaigns::{Campaign, Params};
use report::rat_pair;

#[derive(Parser)]
#[command(name = "thetablock", version, about = "Exact theta blocks, Jacobi forms and their lifts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Determinant, level, discriminant group and class census of a lattice.
    LatticeInfo {
        /// Built-in name, Gram matrix as JSON, or a file holding either.
        lattice: Option<String>,
        #[arg(long = "lattice", value_name = "NAME|FILE", conflicts_with = "lattice")]
        lattice_flag: Option<String>,
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
    /// Run a verification campaign.
    Verify {
        #[arg(value_enum)]
        campaign: Campaign,
        /// q-precision N or N/D (default 8, or 4 for the lift campaigns).
        #[arg(long, value_parser = parse_rat)]
        qprec: Option<Rat>,
        #[arg(long, default_value_t = 2)]
        fj_order: usize,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(i64).range(0..=6))]
        grid_bound: i64,
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
    /// Expand a theta block (`eta^k th(a)^e …` or a named constant) to JSON.
    Expand {
        spec: String,
        #[arg(long, value_parser = parse_rat, default_value = "8")]
        qprec: Rat,
        /// Output file; standard output when absent.
        #[arg(long, visible_alias = "out", value_name = "FILE")]
        json: Option<PathBuf>,
    },
    /// Apply the index-raising Hecke operator T₋(m) to a serialized series.
    Hecke {
        input: PathBuf,
        #[arg(long)]
        m: i64,
        /// Weight k; taken from the series when absent.
        #[arg(long, allow_hyphen_values = true)]
        weight: Option<i64>,
        #[arg(long, value_name = "FILE")]
        json: Option<PathBuf>,
    },
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    match rational::parse(s) {
        Some(r) if r > Rat::from_integer(0) => Ok(r),
        Some(_) => Err("precision must be positive".into()),
        None => Err(format!("`{s}` is not N or N/D")),
    }
}

/// Failures that are the caller's fault (exit 2) versus the engine's.
enum Failure {
    Usage(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::InvalidGram(_)
            | Error::UnknownLattice(_)
            | Error::Format(_)
            | Error::BadHeckeIndex(_) => Failure::Usage(e.to_string()),
            e => Failure::Engine(e),
        }
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_lattice(arg: &str) -> Result<GramLattice, Failure> {
    let p = Path::new(arg);
    let src = if p.is_file() {
        std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("{arg}: {e}")))?
    } else {
        arg.to_string()
    };
    Ok(GramLattice::parse(&src)?)
}

#[derive(Serialize)]
struct CensusRow {
    norm: [i128; 2],
    order: u64,
    count: usize,
}

#[derive(Serialize)]
struct LatticeInfo {
    name: Option<String>,
    gram: Vec<Vec<i64>>,
    rank: usize,
    determinant: i64,
    level: u64,
    invariant_factors: Vec<u64>,
    census: Vec<CensusRow>,
}

fn lattice_info(arg: &str, json: Option<&Path>) -> Result<u8, Failure> {
    let l = read_lattice(arg)?;
    let disc = l.discriminant_group();
    let info = LatticeInfo {
        name: l.name().map(str::to_string),
        gram: l.gram().to_vec(),
        rank: l.rank(),
        determinant: l.determinant(),
        level: l.level(),
        invariant_factors: disc.invariant_factors.clone(),
        census: l
            .census_table()
            .into_iter()
            .map(|(n, order, count)| CensusRow { norm: rat_pair(&n), order, count })
            .collect(),
    };
    println!("lattice       {}", info.name.as_deref().unwrap_or("(gram)"));
    println!("gram          {:?}", info.gram);
    println!("determinant   {}", info.determinant);
    println!("level         {}", info.level);
    println!("invariants    {:?}", info.invariant_factors);
    println!("classes       {}", disc.order);
    println!("census        norm mod 2   order   count");
    for r in &info.census {
        let n = rational::from_pair(r.norm).expect("reduced");
        println!("              {:<12} {:<7} {}", n.to_string(), r.order, r.count);
    }
    if let Some(p) = json {
        let mut s = serde_json::to_string_pretty(&info).expect("serializes");
        s.push('\n');
        write_out(Some(p), &s)?;
    }
    Ok(0)
}

fn verify(c: Campaign, p: Params, json: Option<&Path>) -> Result<u8, Failure> {
    let start = Instant::now();
    let report = campaigns::verify(c, &p)?;
    for chk in &report.checks {
        println!("{:<8} {}: {}", chk.status.label(), chk.description, chk.detail);
    }
    println!(
        "{}: {} pass, {} fail, {} skipped (qprec {})",
        report.campaign,
        report.count(report::Status::Pass),
        report.count(report::Status::Fail),
        report.count(report::Status::Skipped),
        p.qprec
    );
    eprintln!("wall time {:.2}s", start.elapsed().as_secs_f64());
    if let Some(path) = json {
        write_out(Some(path), &report.to_json())?;
    }
    Ok(report.exit_code())
}

fn expand(spec: &str, qprec: &Rat, json: Option<&Path>) -> Result<u8, Failure> {
    let s = parse_block(spec)?.build(qprec)?;
    write_out(json, &(s.to_json_string() + "\n"))?;
    Ok(0)
}

fn hecke(input: &Path, m: i64, weight: Option<i64>, json: Option<&Path>) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(input).map_err(|e| Failure::Usage(format!("{}: {e}", input.display())))?;
    let s = FourierSeries::from_json_str(&text)?;
    let k = match (weight, s.weight()) {
        (Some(k), _) => k,
        (None, Some(w)) if w.is_integer() => *w.numer() as i64,
        _ => return Err(Failure::Usage("series has no integral weight; pass --weight".into())),
    };
    let t = apply_t_minus(&s, m, k)?;
    write_out(json, &(t.to_json_string() + "\n"))?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match cli.command {
        Command::LatticeInfo { lattice, lattice_flag, json } => match lattice.or(lattice_flag) {
            Some(l) => lattice_info(&l, json.as_deref()),
            None => Err(Failure::Usage("name a lattice (positional or --lattice)".into())),
        },
        Command::Verify { campaign, qprec, fj_order, grid_bound, json } => {
            let p = Params { qprec: qprec.unwrap_or_else(|| campaign.default_qprec()), fj_order, grid_bound };
            verify(campaign, p, json.as_deref())
        }
        Command::Expand { spec, qprec, json } => expand(&spec, &qprec, json.as_deref()),
        Command::Hecke { input, m, weight, json } => hecke(&input, m, weight, json.as_deref()),
    };
    match out {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Engine(e @ Error::PrecisionExhausted { .. })) => {
            eprintln!("skipped: {e}");
            ExitCode::from(3)
        }
        Err(Failure::Engine(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
