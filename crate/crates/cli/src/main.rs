use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rigidpq::cover::{Power, TriangleCoverData};
use rigidpq::product::{catalog, catalog_to_csv, catalog_to_json, catalog_to_text, product_of};
use rigidpq::quotient::{check_domain, InvariantsReport, ProductQuotientInput};
use rigidpq::rigidity::{search_report, verify_rigidity, Conclusion, SearchReport, MIN_N};
use rigidpq::Error;

#[derive(Parser)]
#[command(name = "rigidpq", version, about = "Invariants and rigidity certificates for the surfaces S_n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// K², χ(O), p_g, e and h¹(Θ) of S_n, with the node list.
    Invariants {
        #[arg(long)]
        n: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Degrees of the eigensheaves of p_*ω (power 1) or p_*ω² (power 2).
    Table {
        #[arg(long)]
        n: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
        power: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Rigidity certificate for S_n.
    Certify {
        #[arg(long)]
        n: u32,
        /// Also run the exhaustive sextuple search and report agreement.
        #[arg(long)]
        search: bool,
        /// Worker threads for the search; output does not depend on it.
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Summary of a product of built-in blocks, e.g. `S8,P1,P1`.
    Product {
        #[arg(long)]
        factors: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// (dimension, Kodaira dimension) pairs with witnesses up to dmax.
    Catalog {
        #[arg(long)]
        dmax: u32,
        /// Index of the S_n block used in witnesses.
        #[arg(long, default_value_t = MIN_N)]
        n: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

struct Failed;

fn run(cmd: Command) -> Result<Result<String, Failed>, Error> {
    Ok(Ok(match cmd {
        Command::Invariants { n, format } => {
            let report = InvariantsReport::compute(&ProductQuotientInput::standard(n)?)?;
            match format {
                Format::Text => report.to_text(),
                Format::Json => report.to_json() + "\n",
                Format::Csv => report.to_csv(),
            }
        }
        Command::Table { n, power, format } => {
            let power = Power::from_int(power)?;
            let modulus = rigidpq::GroupModulus::new(n)?;
            let table = TriangleCoverData::standard(modulus).eigendegree_table(power)?;
            match format {
                Format::Text => table.to_text(),
                Format::Json => table.to_json() + "\n",
                Format::Csv => table.to_csv(),
            }
        }
        Command::Certify { n, search, jobs, format } => {
            check_domain(n, MIN_N)?;
            let cert = verify_rigidity(n)?;
            let report = if search { Some(search_report(n, jobs)?) } else { None };
            let out = match format {
                Format::Json => {
                    let mut value: serde_json::Value =
                        serde_json::from_str(&cert.to_json()).expect("certificate is valid JSON");
                    if let Some(r) = &report {
                        value["search"] = serde_json::json!({
                            "found": r.found,
                            "referenceFound": r.reference_found,
                            "allReverify": r.all_reverify,
                        });
                    }
                    value.to_string() + "\n"
                }
                Format::Text | Format::Csv => {
                    let mut s = cert.to_text();
                    if let Some(r) = &report {
                        s.push_str(&search_text(r));
                    }
                    s
                }
            };
            let agreed = report.is_none_or(|r| r.reference_found && r.all_reverify);
            if cert.conclusion != Conclusion::RigidNotInfRigid || !agreed {
                print!("{out}");
                return Ok(Err(Failed));
            }
            out
        }
        Command::Product { factors, format } => {
            let summary = product_of(&factors)?;
            match format {
                Format::Text => summary.to_text(),
                Format::Json => summary.to_json() + "\n",
                Format::Csv => summary.to_csv(),
            }
        }
        Command::Catalog { dmax, n, format } => {
            let entries = catalog(dmax, n)?;
            match format {
                Format::Text => catalog_to_text(&entries),
                Format::Json => catalog_to_json(&entries) + "\n",
                Format::Csv => catalog_to_csv(&entries),
            }
        }
    }))
}

fn search_text(r: &SearchReport) -> String {
    format!(
        "search: {} sextuples satisfy conditions (1)-(4); all re-verify with rank 6: {}\nreference sextuple found by search: {}\n",
        r.found, r.all_reverify, r.reference_found
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(Ok(out)) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Ok(Err(Failed)) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_domain() { 2 } else { 1 })
        }
    }
}
