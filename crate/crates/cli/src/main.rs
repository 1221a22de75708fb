//! `dicrit`: command-line front end to the dicritical digraph toolkit.
//!
//! Exit codes: 0 all checks pass, 1 a property is violated, 2 bad input,
//! 3 a search budget ran out.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use dicrit_core::census::{census, save_records};
use dicrit_core::constructions::{build_g3, build_gk, certify_dicritical_composition, CertifyOptions, ConstructionSpec};
use dicrit_core::dicolour::{dichromatic_number, is_k_dicritical};
use dicrit_core::ore::{generate_4ore, is_4ore, ore_compose};
use dicrit_core::potential::{
    audit_params, check_oriented_bound, max_packing, potential, surface_vertex_bound, PotentialParams,
};
use dicrit_core::rational::{format_rational, parse_rational};
use dicrit_core::structure::{
    d6_components, d6_vertices, dicritical_extension, discharge, find_chelou_arcs, neighbourhood_valency, phi_identify,
    valency8,
};
use dicrit_core::{Colouring, Digraph, Error, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(name = "dicrit", version, about = "Exact tools for dicritical digraphs")]
struct Cli {
    /// Search node budget.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Seed for randomised commands.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dichromatic number.
    Chi { file: PathBuf },
    /// Decide k-dicriticality (k defaults to the dichromatic number).
    Critical {
        file: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// 4-Ore digraphs.
    #[command(subcommand)]
    Ore(OreCommand),
    /// Maximum digon and bidirected-triangle packing T(D).
    Packing { file: PathBuf },
    /// The potential (10/3 + eps)n - m - delta T.
    Potential {
        file: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Check every parameter inequality.
    Audit {
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Arc-count bounds.
    #[command(subcommand)]
    Bound(BoundCommand),
    /// Chelou arcs, D6 components and valencies.
    Structure { file: PathBuf },
    /// Discharging ledger.
    Discharge {
        file: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Collapse the colour classes of a 3-dicolouring of D<R>.
    Identify {
        file: PathBuf,
        #[command(flatten)]
        region: RegionArgs,
    },
    /// Dicritical extension of R.
    Extend {
        file: PathBuf,
        #[command(flatten)]
        region: RegionArgs,
    },
    /// Oriented dicritical constructions.
    #[command(subcommand)]
    Construct(ConstructCommand),
    /// Exhaustive census of k-dicritical digraphs.
    Census {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        /// Write each record as .dg plus .json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OreCommand {
    /// Random 4-Ore digraph with its composition trace.
    Gen {
        #[arg(long)]
        n: usize,
        /// Keep the base K4 on the digon side of every composition.
        #[arg(long)]
        preserve_j: bool,
    },
    /// Recognise a 4-Ore digraph.
    Check { file: PathBuf },
    /// Ore-composition of two bidirected digraphs.
    Compose {
        digon_side: PathBuf,
        split_side: PathBuf,
        #[arg(long, value_parser = parse_pair)]
        digon: (usize, usize),
        #[arg(long)]
        split: usize,
        /// Z1; Z2 is the rest of N(z).
        #[arg(long, value_delimiter = ',')]
        z1: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum BoundCommand {
    /// m >= (10/3 + 1/51)n - 1 for oriented digraphs.
    Oriented { file: PathBuf },
    /// Vertex bound for a surface of Euler characteristic c.
    Surface {
        #[arg(long, allow_hyphen_values = true)]
        euler: i64,
    },
}

#[derive(Subcommand)]
enum ConstructCommand {
    /// 3-dicritical oriented graph from an odd cycle and directed triangles
    G3 {
        #[arg(long, default_value_t = 1)]
        n0: usize,
        /// Orient the cycle at random using --seed.
        #[arg(long)]
        random: bool,
    },
    /// k-dicritical oriented graph built from copies of G_{k-1}
    Gk {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        n0: usize,
        /// Top-level tournament as a DG-v1 file.
        #[arg(long)]
        tournament: Option<PathBuf>,
    },
    /// Certify that G_k is k-dicritical
    Certify {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        n0: usize,
        /// Validate only this many arc-deletion witnesses.
        #[arg(long)]
        sample: Option<usize>,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, default_value = "1/51")]
    eps: String,
    #[arg(long, default_value = "2/17")]
    delta: String,
}

#[derive(Args)]
struct RegionArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    subset: Vec<usize>,
    /// Colours 1..3 of the subset vertices in increasing vertex order.
    #[arg(long, value_delimiter = ',', required = true)]
    colours: Vec<usize>,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected x,y")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

/// What a command found: a verdict, a human line and a JSON report.
struct Report {
    pass: bool,
    text: String,
    json: Value,
}

impl Report {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Report { pass: true, text: text.into(), json }
    }

    fn verdict(pass: bool, text: impl Into<String>, json: Value) -> Self {
        Report { pass, text: text.into(), json }
    }
}

type Outcome = Result<Report, Error>;

fn read(path: &Path) -> Result<Digraph, Error> {
    Digraph::parse(&std::fs::read_to_string(path)?)
}

fn params(args: &ParamArgs) -> Result<PotentialParams, Error> {
    PotentialParams::new(parse_rational(&args.eps)?, parse_rational(&args.delta)?)
}

fn region_colouring(region: &RegionArgs) -> Result<(Vec<usize>, Colouring), Error> {
    if region.subset.len() != region.colours.len() {
        return Err(Error::Precondition("--subset and --colours differ in length".into()));
    }
    let mut pairs: Vec<(usize, usize)> = region.subset.iter().copied().zip(region.colours.iter().copied()).collect();
    pairs.sort_unstable();
    let subset = pairs.iter().map(|p| p.0).collect();
    Ok((subset, Colouring::new(3, pairs.iter().map(|p| p.1).collect())))
}

fn to_value<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("reports serialize")
}

fn run(cli: &Cli) -> Outcome {
    let budget = cli.budget;
    match &cli.command {
        Command::Chi { file } => {
            let d = read(file)?;
            let chi = dichromatic_number(&d, budget)?;
            Ok(Report::ok(chi.to_string(), json!({ "chi": chi })))
        }
        Command::Critical { file, k } => {
            let d = read(file)?;
            let k = match k {
                Some(k) => *k,
                None => dichromatic_number(&d, budget)?,
            };
            let report = is_k_dicritical(&d, k, budget)?;
            let text = if report.verdict { format!("{k}-dicritical") } else { format!("not {k}-dicritical") };
            Ok(Report::verdict(report.verdict, text, to_value(&report)))
        }
        Command::Ore(cmd) => run_ore(cmd, cli),
        Command::Packing { file } => {
            let d = read(file)?;
            let p = max_packing(&d, budget);
            if !p.optimal {
                return Err(Error::BudgetExceeded(budget));
            }
            Ok(Report::ok(p.value().to_string(), json!({ "value": p.value(), "packing": to_value(&p) })))
        }
        Command::Potential { file, params: args } => {
            let d = read(file)?;
            let rho = potential(&d, &params(args)?, budget)?;
            Ok(Report::ok(format_rational(&rho), json!({ "potential": format_rational(&rho) })))
        }
        Command::Audit { params: args } => {
            let rows = audit_params(&params(args)?);
            let pass = rows.iter().all(|r| r.satisfied);
            let text = rows
                .iter()
                .map(|r| format!("{} {}  lhs={}", if r.satisfied { "ok  " } else { "FAIL" }, r.label, format_rational(&r.lhs)))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Report::verdict(pass, text, json!({ "pass": pass, "rows": to_value(&rows) })))
        }
        Command::Bound(BoundCommand::Oriented { file }) => {
            let check = check_oriented_bound(&read(file)?)?;
            let text = format!("{} slack={}", if check.holds { "holds" } else { "violated" }, format_rational(&check.slack));
            Ok(Report::verdict(check.holds, text, to_value(&check)))
        }
        Command::Bound(BoundCommand::Surface { euler }) => {
            let b = surface_vertex_bound(*euler)?;
            let text = if b.vacuous { format!("{} (vacuous)", b.bound) } else { b.bound.to_string() };
            Ok(Report::ok(text, to_value(&b)))
        }
        Command::Structure { file } => {
            let d = read(file)?;
            let chelou = find_chelou_arcs(&d);
            let components = d6_components(&d);
            let valencies: Vec<Value> = d
                .vertices()
                .map(|v| json!({ "vertex": v, "nu": valency8(&d, v), "nu_n": neighbourhood_valency(&d, v).ok() }))
                .collect();
            let text = format!(
                "out-chelou {}, in-chelou {}, D6 vertices {}, D6 components {}",
                chelou.out_chelou.len(),
                chelou.in_chelou.len(),
                d6_vertices(&d).len(),
                components.len()
            );
            let json = json!({ "chelou": to_value(&chelou), "d6_components": to_value(&components), "valencies": valencies });
            Ok(Report::ok(text, json))
        }
        Command::Discharge { file, params: args } => {
            let d = read(file)?;
            let p = params(args)?;
            let ledger = discharge(&d, &p);
            let rho = potential(&d, &p, budget)?;
            let (initial, fin) = (ledger.total_initial(), ledger.total_final());
            let conserved = initial == fin;
            let dominates = initial >= rho;
            let text = format!(
                "sum w = {}, sum w* = {}, rho = {}, conserved: {conserved}, sum w >= rho: {dominates}",
                format_rational(&initial),
                format_rational(&fin),
                format_rational(&rho)
            );
            let json = json!({
                "ledger": to_value(&ledger),
                "total_initial": format_rational(&initial),
                "total_final": format_rational(&fin),
                "potential": format_rational(&rho),
                "conserved": conserved,
                "dominates_potential": dominates,
            });
            Ok(Report::verdict(conserved && dominates, text, json))
        }
        Command::Identify { file, region } => {
            let d = read(file)?;
            let (subset, phi) = region_colouring(region)?;
            let id = phi_identify(&d, &subset, &phi, false)?;
            Ok(Report::ok(id.digraph.to_dg().trim_end().to_string(), to_value(&id)))
        }
        Command::Extend { file, region } => {
            let d = read(file)?;
            let (subset, phi) = region_colouring(region)?;
            let ext = dicritical_extension(&d, &subset, &phi, budget)?;
            let text = format!("|X_W| = {}, R' = {:?}", ext.core.len(), ext.extension);
            Ok(Report::ok(text, to_value(&ext)))
        }
        Command::Construct(cmd) => run_construct(cmd, cli),
        Command::Census { k, n_max, out } => {
            let table = census(*k, *n_max, budget)?;
            if let Some(dir) = out {
                save_records(dir, &table.records)?;
            }
            let text = table
                .rows
                .iter()
                .map(|r| {
                    let show = |v: Option<usize>| v.map_or("-".to_string(), |m| m.to_string());
                    format!("n={} classes={} d={} o={}", r.n, r.classes, show(r.min_arcs), show(r.min_arcs_oriented))
                })
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Report::ok(text, to_value(&table.rows)))
        }
    }
}

fn run_ore(cmd: &OreCommand, cli: &Cli) -> Outcome {
    match cmd {
        OreCommand::Gen { n, preserve_j } => {
            let (d, trace) = generate_4ore(*n, cli.seed, *preserve_j)?;
            let json = json!({ "digraph": d.to_dg(), "trace": to_value(&trace) });
            Ok(Report::ok(d.to_dg().trim_end().to_string(), json))
        }
        OreCommand::Check { file } => {
            let d = read(file)?;
            match is_4ore(&d, cli.budget)? {
                Some(trace) => Ok(Report::ok("4-Ore", json!({ "four_ore": true, "trace": to_value(&trace) }))),
                None => Ok(Report::verdict(false, "not 4-Ore", json!({ "four_ore": false }))),
            }
        }
        OreCommand::Compose { digon_side, split_side, digon, split, z1 } => {
            let d1 = read(digon_side)?;
            let d2 = read(split_side)?;
            if *split >= d2.n() {
                return Err(Error::VertexOutOfRange { vertex: *split, n: d2.n() });
            }
            let z2: Vec<usize> = d2.neighbours(*split).into_iter().filter(|w| !z1.contains(w)).collect();
            let d = ore_compose(&d1, *digon, &d2, *split, z1, &z2)?;
            let json = json!({ "digraph": d.to_dg(), "n": d.n(), "m": d.m(), "z2": z2 });
            Ok(Report::ok(d.to_dg().trim_end().to_string(), json))
        }
    }
}

fn run_construct(cmd: &ConstructCommand, cli: &Cli) -> Outcome {
    match cmd {
        ConstructCommand::G3 { n0, random } => {
            let c = build_g3(*n0, random.then_some(cli.seed))?;
            let json = json!({ "digraph": c.digraph.to_dg(), "n": c.digraph.n(), "m": c.digraph.m() });
            Ok(Report::ok(c.digraph.to_dg().trim_end().to_string(), json))
        }
        ConstructCommand::Gk { k, n0, tournament } => {
            let mut spec = ConstructionSpec::new(*k, *n0)?;
            if let Some(path) = tournament {
                spec = spec.with_tournament(read(path)?.arcs().to_vec())?;
            }
            let c = build_gk(&spec)?;
            let json = json!({ "digraph": c.digraph.to_dg(), "n": c.digraph.n(), "m": c.digraph.m() });
            Ok(Report::ok(c.digraph.to_dg().trim_end().to_string(), json))
        }
        ConstructCommand::Certify { k, n0, sample } => {
            let spec = ConstructionSpec::new(*k, *n0)?;
            let options = CertifyOptions { sample: *sample, seed: cli.seed };
            let cert = certify_dicritical_composition(&spec, options, cli.budget)?;
            let text = format!(
                "G{} (n0={}): {} vertices, {} arcs, lower bound {:?}, witnesses {:?}{}: {}",
                cert.k,
                cert.n0,
                cert.n,
                cert.m,
                cert.lower_bound.method,
                cert.witness_method,
                if cert.sampled { " (sampled)" } else { "" },
                if cert.verdict { "certified" } else { "NOT certified" }
            );
            Ok(Report::verdict(cert.verdict, text, to_value(&cert)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report.json).expect("json"));
            } else {
                println!("{}", report.text);
            }
            ExitCode::from(if report.pass { 0 } else { 1 })
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(match err {
                Error::BudgetExceeded(_) => 3,
                _ => 2,
            })
        }
    }
}
