//! End-to-end proof campaigns: candidate generation, instance encoding,
//! solving with escalation, verification, and persisted run logs.

use std::collections::HashMap;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::bits::BitVector;
use crate::cnf::{encode_existence, encode_subnets, Encoding, InputSet};
use crate::dimacs;
use crate::error::{Error, Result};
use crate::layers::{
    enumerate_layers, first_layer, fixing_group, po_representatives,
    representatives_under_group, saturated_subset, second_layer_candidates,
};
use crate::network::Network;
use crate::solver::{self, SolveOutcome, SolverConfig, Status};
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Plain,
    Fix1,
    Fix2,
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Plain => "plain",
            Mode::Fix1 => "fix1",
            Mode::Fix2 => "fix2",
        }
    }

    /// Fix-2 dominates for large n; a single fixed layer is enough below
    /// that, and tiny n fall back to the unrestricted formula.
    pub fn default_for(n: usize) -> Mode {
        if n >= 9 {
            Mode::Fix2
        } else if n >= 2 {
            Mode::Fix1
        } else {
            Mode::Plain
        }
    }

    pub fn parse(text: &str) -> Option<Mode> {
        match text {
            "plain" => Some(Mode::Plain),
            "fix1" => Some(Mode::Fix1),
            "fix2" => Some(Mode::Fix2),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A full lower/upper bound campaign description.
#[derive(Debug, Clone)]
pub struct CampaignPlan {
    pub n: usize,
    pub d_target: usize,
    pub mode: Mode,
    pub m_schedule: Vec<usize>,
    pub jobs: usize,
    pub solver: SolverConfig,
    pub output_dir: PathBuf,
    pub reflect: bool,
    /// Run only this many candidates, sampled by `seed`; the verdict is then
    /// at most partial.
    pub limit_candidates: Option<usize>,
    pub seed: u64,
}

impl CampaignPlan {
    pub fn new(n: usize, d_target: usize, output_dir: PathBuf) -> Self {
        Self {
            n,
            d_target,
            mode: Mode::default_for(n),
            m_schedule: default_m_schedule(n),
            jobs: 1,
            solver: SolverConfig::default(),
            output_dir,
            reflect: false,
            limit_candidates: None,
            seed: 0,
        }
    }
}

/// The escalation schedule starts three channels below the full width and
/// grows to the full formula.
pub fn default_m_schedule(n: usize) -> Vec<usize> {
    (n.saturating_sub(3).max(1)..=n).collect()
}

fn normalize_schedule(schedule: &[usize], n: usize) -> Vec<usize> {
    let mut m: Vec<usize> = schedule.iter().copied().filter(|&m| (1..=n).contains(&m)).collect();
    m.sort_unstable();
    m.dedup();
    if m.last() != Some(&n) {
        m.push(n);
    }
    m
}

/// One solved instance, as persisted in the run log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunRecord {
    pub n: usize,
    pub d_total: usize,
    pub mode: Mode,
    pub candidate_index: usize,
    pub m: usize,
    pub status: Status,
    pub elapsed_ms: u128,
    pub vars: usize,
    pub clauses: usize,
    pub cnf_path: String,
    pub witness_path: Option<String>,
}

impl RunRecord {
    pub fn to_line(&self) -> String {
        format!(
            "n={} d={} mode={} candidate={} m={} status={} elapsed_ms={} vars={} clauses={} cnf={} witness={}",
            self.n,
            self.d_total,
            self.mode,
            self.candidate_index,
            self.m,
            self.status.label(),
            self.elapsed_ms,
            self.vars,
            self.clauses,
            self.cnf_path,
            self.witness_path.as_deref().unwrap_or("-"),
        )
    }

    pub fn parse_line(line: &str) -> Option<RunRecord> {
        let mut fields = HashMap::new();
        for token in line.split_whitespace() {
            let (key, value) = token.split_once('=')?;
            fields.insert(key, value);
        }
        let status = match *fields.get("status")? {
            "SAT" => Status::Sat,
            "UNSAT" => Status::Unsat,
            _ => Status::Unknown(crate::solver::UnknownCause::ReportedUnknown),
        };
        Some(RunRecord {
            n: fields.get("n")?.parse().ok()?,
            d_total: fields.get("d")?.parse().ok()?,
            mode: Mode::parse(fields.get("mode")?)?,
            candidate_index: fields.get("candidate")?.parse().ok()?,
            m: fields.get("m")?.parse().ok()?,
            status,
            elapsed_ms: fields.get("elapsed_ms")?.parse().ok()?,
            vars: fields.get("vars")?.parse().ok()?,
            clauses: fields.get("clauses")?.parse().ok()?,
            cnf_path: fields.get("cnf")?.to_string(),
            witness_path: match *fields.get("witness")? {
                "-" => None,
                path => Some(path.to_string()),
            },
        })
    }
}

#[derive(Debug, Clone)]
pub enum Verdict {
    /// Every candidate refuted: no sorting network of the target depth.
    LowerBound { n: usize, d_target: usize },
    /// A verified sorting network of the target depth was extracted.
    NetworkFound { witness_path: PathBuf },
    /// Unresolved instances block any claim.
    Inconclusive { blockers: Vec<String> },
}

#[derive(Debug)]
pub struct CampaignReport {
    pub verdict: Verdict,
    pub records: Vec<RunRecord>,
    pub candidates_total: usize,
    pub candidates_run: usize,
    pub witness: Option<Network>,
}

/// Candidate prefixes for a campaign mode.
fn candidate_prefixes(n: usize, mode: Mode, reflect: bool) -> Result<Vec<Option<Network>>> {
    match mode {
        Mode::Plain => Ok(vec![None]),
        Mode::Fix1 => Ok(vec![Some(Network::single_layer(n, first_layer(n)))]),
        Mode::Fix2 => {
            let candidates = second_layer_candidates(n, reflect)?;
            Ok(candidates
                .layers()
                .iter()
                .map(|layer| {
                    Some(Network::new(n, vec![first_layer(n), layer.clone()]))
                })
                .collect())
        }
    }
}

fn instance_encoding(
    n: usize,
    d_target: usize,
    prefix: Option<&Network>,
    m: usize,
) -> Result<Encoding> {
    match prefix {
        None => {
            // the unrestricted formula ignores subnetwork sizes below n
            let _ = m;
            Ok(encode_existence(n, d_target))
        }
        Some(prefix) => {
            if prefix.depth() > d_target {
                return Err(Error::PrefixTooDeep { prefix: prefix.depth(), target: d_target });
            }
            let reachable = prefix.outputs(None)?;
            let inputs = InputSet::from_outputs(&reachable, true);
            encode_subnets(n, d_target - prefix.depth(), m, &inputs)
        }
    }
}

struct CandidateOutcome {
    records: Vec<RunRecord>,
    refuted: bool,
    witness: Option<Network>,
    blockers: Vec<String>,
}

fn process_candidate(
    plan: &CampaignPlan,
    schedule: &[usize],
    idx: usize,
    prefix: Option<&Network>,
    resume: &HashMap<(usize, usize), RunRecord>,
) -> Result<CandidateOutcome> {
    let mut outcome = CandidateOutcome {
        records: Vec::new(),
        refuted: false,
        witness: None,
        blockers: Vec::new(),
    };
    let schedule: &[usize] = if prefix.is_none() { &[plan.n] } else { schedule };
    for &m in schedule {
        if let Some(existing) = resume.get(&(idx, m)) {
            match existing.status {
                Status::Unsat => {
                    outcome.records.push(existing.clone());
                    outcome.refuted = true;
                    return Ok(outcome);
                }
                Status::Sat if m < plan.n => {
                    outcome.records.push(existing.clone());
                    continue;
                }
                // resumed SAT at full size still needs decode + verify,
                // so fall through and re-solve
                _ => {}
            }
        }

        let encoding = instance_encoding(plan.n, plan.d_target, prefix, m)?;
        let cnf_name = format!("cand_{idx:04}_m{m:02}.cnf");
        let cnf_path = plan.output_dir.join(&cnf_name);
        let mut file = std::fs::File::create(&cnf_path)?;
        dimacs::write_dimacs(&encoding.formula, &mut file)?;
        drop(file);

        let solved = solve_instance(&cnf_path, &encoding, plan)?;
        let mut record = RunRecord {
            n: plan.n,
            d_total: plan.d_target,
            mode: plan.mode,
            candidate_index: idx,
            m,
            status: solved.status,
            elapsed_ms: solved.elapsed.as_millis(),
            vars: encoding.formula.num_vars,
            clauses: encoding.formula.clauses.len(),
            cnf_path: cnf_name,
            witness_path: None,
        };

        match solved.status {
            Status::Unsat => {
                outcome.records.push(record);
                outcome.refuted = true;
                return Ok(outcome);
            }
            Status::Sat => {
                let verified =
                    solver::verify_outcome(&encoding.var_map, &solved, &encoding.inputs, prefix)?;
                if !verified {
                    return Err(Error::SolverOutput(format!(
                        "candidate {idx} m={m}: SAT model failed re-verification"
                    )));
                }
                if m == plan.n {
                    let free = solver::decode_network(&encoding.var_map, &solved)?;
                    let full = match prefix {
                        Some(p) => p.compose(&free)?,
                        None => free,
                    };
                    assert!(full.is_sorting(), "verified witness must sort");
                    let witness_name = format!("witness_n{}_d{}.net", plan.n, plan.d_target);
                    let witness_path = plan.output_dir.join(&witness_name);
                    std::fs::write(&witness_path, text::format_network(&full))?;
                    record.witness_path = Some(witness_name);
                    outcome.records.push(record);
                    outcome.witness = Some(full);
                    return Ok(outcome);
                }
                // SAT below full size is inconclusive; escalate
                outcome.records.push(record);
            }
            Status::Unknown(cause) => {
                record.status = solved.status;
                outcome.records.push(record);
                outcome
                    .blockers
                    .push(format!("candidate {idx} m={m}: {cause:?}"));
                return Ok(outcome);
            }
        }
    }
    // schedule always ends at n, so we only get here via resumed partial data
    outcome.blockers.push(format!("candidate {idx}: escalation exhausted"));
    Ok(outcome)
}

fn solve_instance(cnf_path: &Path, encoding: &Encoding, plan: &CampaignPlan) -> Result<SolveOutcome> {
    match &plan.solver.engine {
        crate::solver::Engine::External(template) => solver::solve_external_file(
            cnf_path,
            encoding.formula.num_vars,
            template,
            &plan.solver,
        ),
        _ => solver::solve(&encoding.formula, &plan.solver),
    }
}

fn load_run_log(path: &Path) -> HashMap<(usize, usize), RunRecord> {
    let mut map = HashMap::new();
    if let Ok(content) = std::fs::read_to_string(path) {
        for line in content.lines() {
            if let Some(record) = RunRecord::parse_line(line) {
                map.insert((record.candidate_index, record.m), record);
            }
        }
    }
    map
}

/// Runs a full campaign: candidate generation, per-candidate escalation, and
/// verdict aggregation. A lower-bound verdict requires every candidate to be
/// refuted; any UNKNOWN or partial sampling poisons the claim.
pub fn run_campaign(plan: &CampaignPlan) -> Result<CampaignReport> {
    std::fs::create_dir_all(&plan.output_dir)?;
    let prefixes = candidate_prefixes(plan.n, plan.mode, plan.reflect)?;
    let schedule = normalize_schedule(&plan.m_schedule, plan.n);

    for (idx, prefix) in prefixes.iter().enumerate() {
        if let Some(prefix) = prefix {
            if prefix.depth() > plan.d_target {
                return Err(Error::PrefixTooDeep {
                    prefix: prefix.depth(),
                    target: plan.d_target,
                });
            }
            let path = plan.output_dir.join(format!("prefix_{idx:04}.net"));
            std::fs::write(path, text::format_network(prefix))?;
        }
    }

    let selected: Vec<usize> = match plan.limit_candidates {
        Some(limit) if limit < prefixes.len() => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(plan.seed);
            let mut indices: Vec<usize> = (0..prefixes.len()).collect();
            indices.shuffle(&mut rng);
            let mut chosen: Vec<usize> = indices.into_iter().take(limit).collect();
            chosen.sort_unstable();
            chosen
        }
        _ => (0..prefixes.len()).collect(),
    };

    let log_path = plan.output_dir.join("run.log");
    let resume = load_run_log(&log_path);

    let worker = |&idx: &usize| {
        process_candidate(plan, &schedule, idx, prefixes[idx].as_ref(), &resume)
    };

    let outcomes: Vec<Result<CandidateOutcome>> = if plan.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(plan.jobs)
            .build()
            .expect("thread pool");
        pool.install(|| {
            use rayon::prelude::*;
            selected.par_iter().map(worker).collect()
        })
    } else {
        selected.iter().map(worker).collect()
    };

    let mut log = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&log_path)?;
    let mut records = Vec::new();
    let mut blockers = Vec::new();
    let mut witness = None;
    let mut witness_path = None;
    let mut all_refuted = true;

    for outcome in outcomes {
        let outcome = outcome?;
        for record in &outcome.records {
            if !resume.contains_key(&(record.candidate_index, record.m))
                || resume[&(record.candidate_index, record.m)] != *record
            {
                writeln!(log, "{}", record.to_line())?;
                log.flush()?;
            }
            if let Some(path) = &record.witness_path {
                witness_path = Some(plan.output_dir.join(path));
            }
        }
        records.extend(outcome.records);
        blockers.extend(outcome.blockers);
        if outcome.witness.is_some() {
            witness = outcome.witness;
            all_refuted = false;
        } else if !outcome.refuted {
            all_refuted = false;
        }
    }

    let partial = selected.len() < prefixes.len();
    if partial {
        blockers.push(format!(
            "partial campaign: {} of {} candidates sampled",
            selected.len(),
            prefixes.len()
        ));
    }

    let verdict = if let Some(path) = witness_path {
        Verdict::NetworkFound { witness_path: path }
    } else if all_refuted && blockers.is_empty() && !partial {
        Verdict::LowerBound { n: plan.n, d_target: plan.d_target }
    } else {
        if blockers.is_empty() {
            blockers.push("not all candidates refuted".to_string());
        }
        Verdict::Inconclusive { blockers }
    };

    Ok(CampaignReport {
        verdict,
        records,
        candidates_total: prefixes.len(),
        candidates_run: selected.len(),
        witness,
    })
}

/// Searches for a depth-d sorting network using the full formulas (no
/// subnetwork restriction), stopping at the first verified witness.
pub fn prove_upper_bound(
    n: usize,
    d: usize,
    mode: Mode,
    solver_cfg: &SolverConfig,
    output_dir: &Path,
) -> Result<CampaignReport> {
    let plan = CampaignPlan {
        n,
        d_target: d,
        mode,
        m_schedule: vec![n],
        jobs: 1,
        solver: solver_cfg.clone(),
        output_dir: output_dir.to_path_buf(),
        reflect: false,
        limit_candidates: None,
        seed: 0,
    };
    std::fs::create_dir_all(output_dir)?;
    let prefixes = candidate_prefixes(n, mode, false)?;
    let resume = HashMap::new();
    let mut records = Vec::new();
    let mut blockers = Vec::new();

    for (idx, prefix) in prefixes.iter().enumerate() {
        let outcome = process_candidate(&plan, &[n], idx, prefix.as_ref(), &resume)?;
        records.extend(outcome.records);
        blockers.extend(outcome.blockers);
        if let Some(witness) = outcome.witness {
            let witness_path = output_dir.join(format!("witness_n{n}_d{d}.net"));
            return Ok(CampaignReport {
                verdict: Verdict::NetworkFound { witness_path },
                records,
                candidates_total: prefixes.len(),
                candidates_run: idx + 1,
                witness: Some(witness),
            });
        }
    }

    let verdict = if blockers.is_empty() {
        Verdict::LowerBound { n, d_target: d }
    } else {
        Verdict::Inconclusive { blockers }
    };
    Ok(CampaignReport {
        verdict,
        records,
        candidates_total: prefixes.len(),
        candidates_run: prefixes.len(),
        witness: None,
    })
}

/// One instance-generation manifest entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub n: usize,
    pub d_total: usize,
    pub prefix_file: Option<String>,
    pub candidate_index: usize,
    pub m: usize,
    pub cnf_path: String,
    pub vars: usize,
    pub clauses: usize,
}

impl ManifestEntry {
    pub fn to_line(&self) -> String {
        format!(
            "n={} d_total={} prefix_file={} candidate_index={} m={} cnf_path={} vars={} clauses={}",
            self.n,
            self.d_total,
            self.prefix_file.as_deref().unwrap_or("-"),
            self.candidate_index,
            self.m,
            self.cnf_path,
            self.vars,
            self.clauses,
        )
    }
}

/// Writes the DIMACS instances for a campaign at one fixed subnetwork size,
/// together with prefixes and a deterministic manifest.
pub fn generate_instances(
    n: usize,
    d_target: usize,
    mode: Mode,
    m: usize,
    reflect: bool,
    output_dir: &Path,
) -> Result<Vec<ManifestEntry>> {
    std::fs::create_dir_all(output_dir)?;
    let prefixes = candidate_prefixes(n, mode, reflect)?;
    let mut entries = Vec::with_capacity(prefixes.len());
    for (idx, prefix) in prefixes.iter().enumerate() {
        let prefix_file = match prefix {
            Some(prefix) => {
                let name = format!("prefix_{idx:04}.net");
                std::fs::write(output_dir.join(&name), text::format_network(prefix))?;
                Some(name)
            }
            None => None,
        };
        let encoding = instance_encoding(n, d_target, prefix.as_ref(), m)?;
        let cnf_name = format!("cand_{idx:04}_m{m:02}.cnf");
        let mut file = std::fs::File::create(output_dir.join(&cnf_name))?;
        dimacs::write_dimacs(&encoding.formula, &mut file)?;
        entries.push(ManifestEntry {
            n,
            d_total: d_target,
            prefix_file,
            candidate_index: idx,
            m,
            cnf_path: cnf_name,
            vars: encoding.formula.num_vars,
            clauses: encoding.formula.clauses.len(),
        });
    }
    let manifest: String =
        entries.iter().map(|e| format!("{}\n", e.to_line())).collect();
    std::fs::write(output_dir.join("manifest.txt"), manifest)?;
    Ok(entries)
}

/// Embedded expectations for the candidate-count table, n = 3..=13:
/// (layers, saturated, group representatives, saturated group
/// representatives for odd n, permuted-outputs representatives).
pub const TABLE_EXPECTED: [(usize, usize, usize, usize, Option<usize>, usize); 11] = [
    (3, 4, 2, 4, Some(2), 2),
    (4, 10, 7, 8, None, 2),
    (5, 26, 10, 18, Some(8), 6),
    (6, 76, 51, 28, None, 6),
    (7, 232, 74, 74, Some(29), 14),
    (8, 764, 513, 101, None, 15),
    (9, 2620, 700, 295, Some(100), 37),
    (10, 9496, 6345, 350, None, 27),
    (11, 35696, 8174, 1134, Some(341), 88),
    (12, 140152, 93255, 1236, None, 70),
    (13, 568504, 113008, 4288, Some(1155), 212),
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableRow {
    pub n: usize,
    pub layers: usize,
    pub saturated: usize,
    pub group_reps: usize,
    pub saturated_group_reps: Option<usize>,
    pub po_reps: usize,
}

/// Computes one row of the second-layer candidate table.
pub fn table_row(n: usize) -> Result<TableRow> {
    let all = enumerate_layers(n)?;
    let group = fixing_group(n);
    let saturated = saturated_subset(&all);
    let group_reps = representatives_under_group(&all, &group);
    let (saturated_group_reps, po_base) = if n % 2 == 1 {
        let reps = representatives_under_group(&saturated, &group);
        let count = reps.len();
        (Some(count), reps)
    } else {
        (None, group_reps.clone())
    };
    let po_reps = po_representatives(&po_base);
    Ok(TableRow {
        n,
        layers: all.len(),
        saturated: saturated.len(),
        group_reps: group_reps.len(),
        saturated_group_reps,
        po_reps: po_reps.len(),
    })
}

pub fn expected_row(n: usize) -> Option<(usize, usize, usize, Option<usize>, usize)> {
    TABLE_EXPECTED
        .iter()
        .find(|row| row.0 == n)
        .map(|&(_, g, s, rg, rs, rpo)| (g, s, rg, rs, rpo))
}

/// Renders the candidate-count table up to `max_n`, marking any deviation
/// from the embedded expectations.
pub fn render_table(max_n: usize) -> Result<String> {
    let max_n = max_n.min(13);
    let mut out = String::new();
    out.push_str("n | layers | saturated | reps | sat-reps | po-reps | check\n");
    for n in 1..=max_n {
        if n < 3 {
            let layers = enumerate_layers(n)?.len();
            out.push_str(&format!("{n} | {layers} | n/a | n/a | n/a | n/a | -\n"));
            continue;
        }
        let row = table_row(n)?;
        let verdict = match expected_row(n) {
            Some((g, s, rg, rs, rpo)) => {
                let ok = row.layers == g
                    && row.saturated == s
                    && row.group_reps == rg
                    && row.saturated_group_reps == rs
                    && row.po_reps == rpo;
                if ok { "ok" } else { "MISMATCH" }
            }
            None => "-",
        };
        out.push_str(&format!(
            "{} | {} | {} | {} | {} | {} | {}\n",
            row.n,
            row.layers,
            row.saturated,
            row.group_reps,
            row.saturated_group_reps
                .map(|v| v.to_string())
                .unwrap_or_else(|| "-".to_string()),
            row.po_reps,
            verdict,
        ));
    }
    Ok(out)
}

#[derive(Debug)]
pub struct VerifyReport {
    pub network: Network,
    pub sorting: bool,
    pub counterexample: Option<BitVector>,
}

/// Parses a network file and checks the sorting property exhaustively.
pub fn verify_file(path: &Path) -> Result<VerifyReport> {
    let network = text::read_network_file(path)?;
    if network.is_generalized() {
        return Err(Error::Unsupported(
            network.channels(),
            "verification expects a standard network",
        ));
    }
    let counterexample = network.find_unsorted_input();
    Ok(VerifyReport { sorting: counterexample.is_none(), network, counterexample })
}
