//! Command-line front end.

use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use depthgate::campaign::{
    self, generate_instances, prove_upper_bound, run_campaign, CampaignPlan, Mode, Verdict,
};
use depthgate::dimacs;
use depthgate::layers::{
    enumerate_layers, po_representatives, reflection_reduce, representatives_under_group,
    fixing_group, saturated_subset,
};
use depthgate::network::Network;
use depthgate::oracle;
use depthgate::solver::{self, SolverConfig};
use depthgate::text;

#[derive(Parser)]
#[command(
    name = "depthgate",
    about = "Prover toolkit for optimal-depth sorting networks",
    version
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: CommandKind,
}

#[derive(Args, Clone)]
struct GlobalOpts {
    /// External solver command template, e.g. "minisat-like {cnf}".
    /// Falls back to $DEPTHGATE_SOLVER, then the embedded CDCL engine.
    #[arg(long, global = true)]
    solver: Option<String>,
    /// Worker count for campaign instances.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Output directory for instances, logs and witnesses.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Seed for sampled candidate subsets.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Solver wall-clock limit per instance, in seconds.
    #[arg(long, global = true, value_name = "SECS")]
    time_limit: Option<u64>,
}

impl GlobalOpts {
    fn solver_config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::resolve(self.solver.clone());
        cfg.time_limit = self.time_limit.map(Duration::from_secs);
        cfg
    }

    fn out_dir(&self, default: &str) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(default))
    }
}

#[derive(Subcommand)]
enum CommandKind {
    /// Count or emit second-layer candidate sets.
    Layers {
        #[arg(long)]
        n: usize,
        /// Restrict to saturated layers.
        #[arg(long)]
        saturated: bool,
        /// Reduce to representatives: `r` under the first-layer group,
        /// `rpo` under permuted outputs.
        #[arg(long, value_name = "r|rpo")]
        representatives: Option<String>,
        /// Apply the reflection reduction after `rpo`.
        #[arg(long)]
        reflect: bool,
        /// Write the layers as depth-1 networks to this file.
        #[arg(long, value_name = "FILE")]
        emit: Option<PathBuf>,
    },
    /// Exhaustive search for a sorting network (ground-truth oracle).
    Oracle {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        depth: usize,
        /// Pin the first layer to the canonical maximal layer.
        #[arg(long)]
        fix_first: bool,
    },
    /// Generate DIMACS instances and a manifest without solving.
    Encode {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_name = "plain|fix1|fix2")]
        mode: Option<String>,
        /// Subnetwork size (defaults to the full width).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        reflect: bool,
    },
    /// Solve a DIMACS file and report SAT-competition style output.
    Solve {
        cnf: PathBuf,
        /// Use the internal DPLL engine instead of the default.
        #[arg(long)]
        internal: bool,
    },
    /// Check the sorting property of a network file.
    Verify { file: PathBuf },
    /// Run a bound-proving campaign at a target depth.
    Prove {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, value_name = "plain|fix1|fix2")]
        mode: Option<String>,
        /// Comma-separated subnetwork escalation schedule.
        #[arg(long, value_name = "a,b,c")]
        m_schedule: Option<String>,
        #[arg(long)]
        reflect: bool,
        /// Sample only this many candidates (verdict becomes partial).
        #[arg(long)]
        limit_candidates: Option<usize>,
        /// Search for a witness with full formulas instead of refuting.
        #[arg(long)]
        upper: bool,
    },
    /// Print candidate-count table rows against embedded expectations.
    Table {
        #[arg(long, default_value_t = 13)]
        max_n: usize,
    },
}

fn parse_mode(text: Option<&str>, n: usize) -> Result<Mode, String> {
    match text {
        None => Ok(Mode::default_for(n)),
        Some(raw) => Mode::parse(raw).ok_or_else(|| format!("unknown mode `{raw}`")),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = dispatch(cli) {
        eprintln!("error: {err}");
        std::process::exit(1);
    }
}

fn dispatch(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        CommandKind::Layers { n, saturated, representatives, reflect, emit } => {
            let all = enumerate_layers(n)?;
            println!("layers: {}", all.len());
            let mut working = if saturated {
                let sat = saturated_subset(&all);
                println!("saturated: {}", sat.len());
                sat
            } else {
                all
            };
            match representatives.as_deref() {
                Some("r") => {
                    working = representatives_under_group(&working, &fixing_group(n));
                    println!("representatives: {}", working.len());
                }
                Some("rpo") => {
                    working = representatives_under_group(&working, &fixing_group(n));
                    working = po_representatives(&working);
                    println!("po-representatives: {}", working.len());
                }
                Some(other) => return Err(format!("unknown representative kind `{other}`").into()),
                None => {}
            }
            if reflect {
                working = reflection_reduce(&working);
                println!("after reflection: {}", working.len());
            }
            if let Some(path) = emit {
                let mut body = String::new();
                for layer in working.layers() {
                    body.push_str(&text::format_network(&Network::single_layer(n, layer.clone())));
                }
                std::fs::write(&path, body)?;
                println!("wrote {} layers to {}", working.len(), path.display());
            }
        }
        CommandKind::Oracle { n, depth, fix_first } => {
            match oracle::exists_sorter(n, depth, fix_first)? {
                Some(witness) => print!("{}", text::format_network(&witness)),
                None => println!("NONE"),
            }
        }
        CommandKind::Encode { n, d, mode, m, reflect } => {
            let mode = parse_mode(mode.as_deref(), n)?;
            let m = m.unwrap_or(n);
            let out = cli.global.out_dir("instances");
            let entries = generate_instances(n, d, mode, m, reflect, &out)?;
            println!(
                "generated {} instances under {} (manifest.txt)",
                entries.len(),
                out.display()
            );
        }
        CommandKind::Solve { cnf, internal } => {
            let file = std::fs::File::open(&cnf)?;
            let formula =
                dimacs::parse_dimacs(std::io::BufReader::new(file), &cnf.display().to_string())?;
            let mut cfg = cli.global.solver_config();
            if internal {
                cfg.engine = solver::Engine::Dpll;
            }
            let outcome = solver::solve(&formula, &cfg)?;
            println!("c solver: {}", outcome.solver_id);
            println!("c elapsed_ms: {}", outcome.elapsed.as_millis());
            match outcome.status {
                solver::Status::Sat => {
                    println!("s SATISFIABLE");
                    if let Some(assignment) = &outcome.assignment {
                        print_values(assignment);
                    }
                }
                solver::Status::Unsat => println!("s UNSATISFIABLE"),
                solver::Status::Unknown(cause) => {
                    println!("c cause: {cause:?}");
                    println!("s UNKNOWN");
                }
            }
        }
        CommandKind::Verify { file } => {
            let report = campaign::verify_file(&file)?;
            if report.sorting {
                println!(
                    "verdict: sorting (n={}, depth={})",
                    report.network.channels(),
                    report.network.depth()
                );
            } else {
                println!(
                    "verdict: not-sorting counterexample={}",
                    report.counterexample.expect("non-sorting implies counterexample")
                );
                std::process::exit(2);
            }
        }
        CommandKind::Prove { n, d, mode, m_schedule, reflect, limit_candidates, upper } => {
            let mode = parse_mode(mode.as_deref(), n)?;
            let out = cli.global.out_dir("campaign");
            let solver_cfg = cli.global.solver_config();
            if upper {
                let report = prove_upper_bound(n, d, mode, &solver_cfg, &out)?;
                report_verdict(n, d, &report.verdict);
                return Ok(());
            }
            let mut plan = CampaignPlan::new(n, d, out);
            plan.mode = mode;
            plan.jobs = cli.global.jobs.max(1);
            plan.solver = solver_cfg;
            plan.reflect = reflect;
            plan.limit_candidates = limit_candidates;
            plan.seed = cli.global.seed;
            if let Some(schedule) = m_schedule {
                plan.m_schedule = schedule
                    .split(',')
                    .map(|part| part.trim().parse::<usize>())
                    .collect::<Result<Vec<_>, _>>()?;
            }
            let report = run_campaign(&plan)?;
            println!(
                "candidates: {} run of {} total; {} instances solved",
                report.candidates_run,
                report.candidates_total,
                report.records.len()
            );
            report_verdict(n, d, &report.verdict);
        }
        CommandKind::Table { max_n } => {
            print!("{}", campaign::render_table(max_n)?);
        }
    }
    Ok(())
}

fn report_verdict(n: usize, d: usize, verdict: &Verdict) {
    match verdict {
        Verdict::LowerBound { n, d_target } => {
            println!("verdict: no sorting network on {n} channels at depth {d_target}; V({n}) > {d_target}");
        }
        Verdict::NetworkFound { witness_path } => {
            println!(
                "verdict: sorting network found; V({n}) <= {d}; witness at {}",
                witness_path.display()
            );
        }
        Verdict::Inconclusive { blockers } => {
            println!("verdict: inconclusive");
            for blocker in blockers {
                println!("  blocked: {blocker}");
            }
        }
    }
}

fn print_values(assignment: &[bool]) {
    let mut line = String::from("v");
    for (idx, &value) in assignment.iter().enumerate() {
        let lit = if value { (idx + 1) as i64 } else { -((idx + 1) as i64) };
        line.push_str(&format!(" {lit}"));
        if line.len() > 70 {
            println!("{line}");
            line = String::from("v");
        }
    }
    line.push_str(" 0");
    println!("{line}");
}
