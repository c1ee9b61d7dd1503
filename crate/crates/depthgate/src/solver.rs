//! SAT solving backends and result handling.
//!
//! Three engines share one outcome type: an external solver spoken to over
//! the SAT-competition output format, the embedded CDCL engine (varisat),
//! and a small internal DPLL used as a hermetic cross-check. No SAT answer
//! is trusted upstream: models are decoded into networks and re-evaluated.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use varisat::ExtendFormula;

use crate::bits::BitVector;
use crate::cnf::{CnfFormula, InputSet, VarMap};
use crate::dimacs;
use crate::error::{Error, Result};
use crate::network::{Layer, Network};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnknownCause {
    Timeout,
    VarCapExceeded,
    BudgetExhausted,
    ReportedUnknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
    Unknown(UnknownCause),
}

impl Status {
    pub fn label(&self) -> &'static str {
        match self {
            Status::Sat => "SAT",
            Status::Unsat => "UNSAT",
            Status::Unknown(_) => "UNKNOWN",
        }
    }
}

/// Result of one solve. `assignment` is present exactly for SAT and covers
/// every variable; positions the solver left open default to false, with the
/// count recorded in `defaulted`.
#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub status: Status,
    pub assignment: Option<Vec<bool>>,
    pub defaulted: usize,
    pub elapsed: Duration,
    pub solver_id: String,
}

impl SolveOutcome {
    fn new(status: Status, assignment: Option<Vec<bool>>, defaulted: usize, elapsed: Duration, solver_id: impl Into<String>) -> Self {
        debug_assert_eq!(assignment.is_some(), status == Status::Sat);
        Self { status, assignment, defaulted, elapsed, solver_id: solver_id.into() }
    }
}

/// Which backend to use for a solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Engine {
    /// Command template containing `{cnf}` and optionally `{out}`.
    External(String),
    /// Embedded CDCL (varisat).
    Cdcl,
    /// Internal DPLL.
    Dpll,
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub engine: Engine,
    pub time_limit: Option<Duration>,
    /// On external failure, retry with the internal DPLL.
    pub internal_fallback: bool,
    pub internal_var_cap: usize,
    pub internal_node_budget: Option<u64>,
}

pub const DEFAULT_INTERNAL_VAR_CAP: usize = 4000;
pub const SOLVER_ENV_VAR: &str = "DEPTHGATE_SOLVER";

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            engine: Engine::Cdcl,
            time_limit: None,
            internal_fallback: false,
            internal_var_cap: DEFAULT_INTERNAL_VAR_CAP,
            internal_node_budget: None,
        }
    }
}

impl SolverConfig {
    /// Engine selection: an explicit command wins, then the DEPTHGATE_SOLVER
    /// environment variable, then the embedded CDCL engine.
    pub fn resolve(command: Option<String>) -> Self {
        let engine = match command.or_else(|| std::env::var(SOLVER_ENV_VAR).ok()) {
            Some(cmd) => Engine::External(cmd),
            None => Engine::Cdcl,
        };
        Self { engine, ..Self::default() }
    }
}

/// Dispatches to the configured engine.
pub fn solve(formula: &CnfFormula, cfg: &SolverConfig) -> Result<SolveOutcome> {
    match &cfg.engine {
        Engine::External(template) => {
            let path = temp_cnf_path();
            let mut file = std::fs::File::create(&path)?;
            dimacs::write_dimacs(formula, &mut file)?;
            drop(file);
            let result = solve_external_file(&path, formula.num_vars, template, cfg);
            let _ = std::fs::remove_file(&path);
            match result {
                Err(err) if cfg.internal_fallback => {
                    let _ = err;
                    Ok(solve_internal(formula, cfg))
                }
                other => other,
            }
        }
        Engine::Cdcl => Ok(solve_cdcl(formula)),
        Engine::Dpll => Ok(solve_internal(formula, cfg)),
    }
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

fn temp_cnf_path() -> PathBuf {
    let id = TEMP_COUNTER.fetch_add(1, Ordering::Relaxed);
    std::env::temp_dir().join(format!("depthgate-{}-{id}.cnf", std::process::id()))
}

/// Runs an external solver on an existing DIMACS file. The command template
/// must contain `{cnf}`; `{out}` is replaced by `<cnf>.out`, which also
/// captures the solver's stdout. The `s` line is authoritative; exit codes
/// 10/20 are accepted only as corroboration.
pub fn solve_external_file(
    cnf_path: &Path,
    num_vars: usize,
    template: &str,
    cfg: &SolverConfig,
) -> Result<SolveOutcome> {
    if !template.contains("{cnf}") {
        return Err(Error::SolverSpawn(format!(
            "command template `{template}` lacks a {{cnf}} placeholder"
        )));
    }
    let out_path = cnf_path.with_extension("cnf.out");
    let command_line = template
        .replace("{cnf}", &cnf_path.display().to_string())
        .replace("{out}", &out_path.display().to_string());
    let mut parts = command_line.split_whitespace();
    let program = parts
        .next()
        .ok_or_else(|| Error::SolverSpawn("empty solver command".into()))?;

    let stdout_file = std::fs::File::create(&out_path)?;
    let start = Instant::now();
    let mut child = Command::new(program)
        .args(parts)
        .stdout(Stdio::from(stdout_file))
        .stderr(Stdio::null())
        .stdin(Stdio::null())
        .spawn()
        .map_err(|e| Error::SolverSpawn(format!("{program}: {e}")))?;

    let deadline = cfg.time_limit.map(|limit| start + limit);
    let exit = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if let Some(deadline) = deadline {
            if Instant::now() >= deadline {
                let _ = child.kill();
                let _ = child.wait();
                return Ok(SolveOutcome::new(
                    Status::Unknown(UnknownCause::Timeout),
                    None,
                    0,
                    start.elapsed(),
                    program,
                ));
            }
        }
        std::thread::sleep(Duration::from_millis(5));
    };
    let elapsed = start.elapsed();

    let mut output = String::new();
    std::fs::File::open(&out_path)?.read_to_string(&mut output)?;
    let (status, assignment, defaulted) = parse_competition_output(&output, num_vars)?;

    // corroboration only; a mismatch means the output is not trustworthy
    if let Some(code) = exit.code() {
        let consistent = match status {
            Status::Sat => code == 10 || code == 0,
            Status::Unsat => code == 20 || code == 0,
            Status::Unknown(_) => true,
        };
        if !consistent {
            return Err(Error::SolverOutput(format!(
                "s-line says {} but exit code is {code}",
                status.label()
            )));
        }
    }
    Ok(SolveOutcome::new(status, assignment, defaulted, elapsed, program))
}

/// Parses SAT-competition style output: one `s` status line, `v` lines of
/// literals terminated by 0.
pub fn parse_competition_output(
    output: &str,
    num_vars: usize,
) -> Result<(Status, Option<Vec<bool>>, usize)> {
    let mut status: Option<Status> = None;
    let mut values: Vec<Option<bool>> = vec![None; num_vars];
    let mut saw_values = false;
    for line in output.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            let parsed = match rest.trim() {
                "SATISFIABLE" => Status::Sat,
                "UNSATISFIABLE" => Status::Unsat,
                "UNKNOWN" => Status::Unknown(UnknownCause::ReportedUnknown),
                other => {
                    return Err(Error::SolverOutput(format!("unrecognized status `{other}`")))
                }
            };
            if status.replace(parsed).is_some() {
                return Err(Error::SolverOutput("duplicate s line".into()));
            }
        } else if let Some(rest) = line.strip_prefix("v ") {
            saw_values = true;
            for token in rest.split_whitespace() {
                let lit: i64 = token
                    .parse()
                    .map_err(|_| Error::SolverOutput(format!("bad literal `{token}`")))?;
                if lit == 0 {
                    continue;
                }
                let var = lit.unsigned_abs() as usize;
                if var > num_vars {
                    return Err(Error::SolverOutput(format!(
                        "literal {lit} beyond {num_vars} variables"
                    )));
                }
                values[var - 1] = Some(lit > 0);
            }
        }
    }
    match status {
        None => Err(Error::SolverOutput("missing s line".into())),
        Some(Status::Sat) => {
            if !saw_values {
                // tolerated: verification will reject a wrong default model
                let defaulted = num_vars;
                return Ok((Status::Sat, Some(vec![false; num_vars]), defaulted));
            }
            let defaulted = values.iter().filter(|v| v.is_none()).count();
            let assignment = values.into_iter().map(|v| v.unwrap_or(false)).collect();
            Ok((Status::Sat, Some(assignment), defaulted))
        }
        Some(other) => Ok((other, None, 0)),
    }
}

/// Embedded CDCL solve via varisat.
pub fn solve_cdcl(formula: &CnfFormula) -> SolveOutcome {
    let start = Instant::now();
    let mut solver = varisat::Solver::new();
    let mut cnf = varisat::CnfFormula::new();
    cnf.set_var_count(formula.num_vars);
    for clause in &formula.clauses {
        let lits: Vec<varisat::Lit> =
            clause.iter().map(|&l| varisat::Lit::from_dimacs(l as isize)).collect();
        cnf.add_clause(&lits);
    }
    solver.add_formula(&cnf);
    let sat = solver.solve().expect("varisat solve does not fail without assumptions");
    let elapsed = start.elapsed();
    if !sat {
        return SolveOutcome::new(Status::Unsat, None, 0, elapsed, "varisat-0.2");
    }
    let mut values = vec![false; formula.num_vars];
    let mut covered = vec![false; formula.num_vars];
    if let Some(model) = solver.model() {
        for lit in model {
            let var = lit.var().to_dimacs() as usize;
            if var >= 1 && var <= formula.num_vars {
                values[var - 1] = lit.is_positive();
                covered[var - 1] = true;
            }
        }
    }
    let defaulted = covered.iter().filter(|&&c| !c).count();
    SolveOutcome::new(Status::Sat, Some(values), defaulted, elapsed, "varisat-0.2")
}

/// DPLL with unit propagation and pure-literal elimination. Deterministic:
/// branches on the literal occurring most often in the shortest active
/// clauses, ties broken by smallest variable, positive polarity first.
pub fn solve_internal(formula: &CnfFormula, cfg: &SolverConfig) -> SolveOutcome {
    let start = Instant::now();
    if formula.num_vars > cfg.internal_var_cap {
        return SolveOutcome::new(
            Status::Unknown(UnknownCause::VarCapExceeded),
            None,
            0,
            start.elapsed(),
            "dpll-internal",
        );
    }
    let mut search = DpllSearch::new(formula, cfg.internal_node_budget);
    let status = match search.run() {
        DpllResult::Sat => Status::Sat,
        DpllResult::Unsat => Status::Unsat,
        DpllResult::Budget => Status::Unknown(UnknownCause::BudgetExhausted),
    };
    let elapsed = start.elapsed();
    if status == Status::Sat {
        let defaulted = search.assign.iter().filter(|a| a.is_none()).count();
        let values = search.assign.iter().map(|a| a.unwrap_or(false)).collect();
        SolveOutcome::new(Status::Sat, Some(values), defaulted, elapsed, "dpll-internal")
    } else {
        SolveOutcome::new(status, None, 0, elapsed, "dpll-internal")
    }
}

enum DpllResult {
    Sat,
    Unsat,
    Budget,
}

struct DpllSearch {
    clauses: Vec<Vec<i32>>,
    /// clause index lists per literal; index 2v for positive, 2v+1 negative
    occurrences: Vec<Vec<usize>>,
    assign: Vec<Option<bool>>,
    true_count: Vec<u32>,
    free_count: Vec<u32>,
    unsatisfied: usize,
    trail: Vec<i32>,
    budget: Option<u64>,
    nodes: u64,
    found_empty_clause: bool,
}

impl DpllSearch {
    fn new(formula: &CnfFormula, budget: Option<u64>) -> Self {
        let num_vars = formula.num_vars;
        let mut occurrences = vec![Vec::new(); 2 * num_vars];
        let mut found_empty_clause = false;
        for (idx, clause) in formula.clauses.iter().enumerate() {
            if clause.is_empty() {
                found_empty_clause = true;
            }
            for &lit in clause {
                occurrences[slot(lit)].push(idx);
            }
        }
        let free_count = formula.clauses.iter().map(|c| c.len() as u32).collect();
        Self {
            clauses: formula.clauses.clone(),
            occurrences,
            assign: vec![None; num_vars],
            true_count: vec![0; formula.clauses.len()],
            free_count,
            unsatisfied: formula.clauses.len(),
            trail: Vec::new(),
            budget,
            nodes: 0,
            found_empty_clause,
        }
    }

    fn run(&mut self) -> DpllResult {
        if self.found_empty_clause {
            return DpllResult::Unsat;
        }
        self.search()
    }

    fn lit_is_true(&self, lit: i32) -> Option<bool> {
        self.assign[(lit.unsigned_abs() - 1) as usize].map(|v| v == (lit > 0))
    }

    /// Assigns a literal true. Returns false on conflict.
    fn assign_lit(&mut self, lit: i32) -> bool {
        debug_assert!(self.lit_is_true(lit).is_none());
        self.assign[(lit.unsigned_abs() - 1) as usize] = Some(lit > 0);
        self.trail.push(lit);
        for idx_list in [slot(lit), slot(-lit)] {
            let satisfying = idx_list == slot(lit);
            for pos in 0..self.occurrences[idx_list].len() {
                let clause_idx = self.occurrences[idx_list][pos];
                self.free_count[clause_idx] -= 1;
                if satisfying {
                    if self.true_count[clause_idx] == 0 {
                        self.unsatisfied -= 1;
                    }
                    self.true_count[clause_idx] += 1;
                } else if self.true_count[clause_idx] == 0 && self.free_count[clause_idx] == 0 {
                    return false;
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let lit = self.trail.pop().expect("trail nonempty");
            self.assign[(lit.unsigned_abs() - 1) as usize] = None;
            for idx_list in [slot(lit), slot(-lit)] {
                let satisfying = idx_list == slot(lit);
                for pos in 0..self.occurrences[idx_list].len() {
                    let clause_idx = self.occurrences[idx_list][pos];
                    self.free_count[clause_idx] += 1;
                    if satisfying {
                        self.true_count[clause_idx] -= 1;
                        if self.true_count[clause_idx] == 0 {
                            self.unsatisfied += 1;
                        }
                    }
                }
            }
        }
    }

    /// Unit propagation and pure-literal elimination to fixpoint.
    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        loop {
            let mut progressed = false;
            // units
            loop {
                let mut unit = None;
                for idx in 0..self.clauses.len() {
                    if self.true_count[idx] == 0 && self.free_count[idx] == 1 {
                        let lit = self.clauses[idx]
                            .iter()
                            .copied()
                            .find(|&l| self.lit_is_true(l).is_none())
                            .expect("free literal exists");
                        unit = Some(lit);
                        break;
                    }
                }
                match unit {
                    Some(lit) => {
                        if !self.assign_lit(lit) {
                            return false;
                        }
                        progressed = true;
                    }
                    None => break,
                }
            }
            // pure literals: a variable whose other polarity never occurs in
            // an active clause can safely take the occurring polarity
            let mut polarity = vec![0u8; self.assign.len()];
            for (idx, clause) in self.clauses.iter().enumerate() {
                if self.true_count[idx] > 0 {
                    continue;
                }
                for &lit in clause {
                    if self.lit_is_true(lit).is_none() {
                        polarity[(lit.unsigned_abs() - 1) as usize] |= if lit > 0 { 1 } else { 2 };
                    }
                }
            }
            for var in 0..polarity.len() {
                if self.assign[var].is_none() {
                    let lit = match polarity[var] {
                        1 => (var + 1) as i32,
                        2 => -((var + 1) as i32),
                        _ => continue,
                    };
                    if self.lit_is_true(lit).is_none() && !self.assign_lit(lit) {
                        return false;
                    }
                    progressed = true;
                }
            }
            if !progressed {
                return true;
            }
        }
    }

    /// Branch literal: most occurrences within the shortest active clauses.
    fn pick_branch(&self) -> Option<i32> {
        let mut shortest = u32::MAX;
        for idx in 0..self.clauses.len() {
            if self.true_count[idx] == 0 {
                shortest = shortest.min(self.free_count[idx]);
            }
        }
        if shortest == u32::MAX {
            return None;
        }
        let mut counts: std::collections::HashMap<i32, u32> = std::collections::HashMap::new();
        for idx in 0..self.clauses.len() {
            if self.true_count[idx] == 0 && self.free_count[idx] == shortest {
                for &lit in &self.clauses[idx] {
                    if self.lit_is_true(lit).is_none() {
                        *counts.entry(lit).or_default() += 1;
                    }
                }
            }
        }
        counts
            .into_iter()
            .max_by_key(|&(lit, count)| (count, std::cmp::Reverse(lit.unsigned_abs()), lit > 0))
            .map(|(lit, _)| lit)
    }

    fn search(&mut self) -> DpllResult {
        if let Some(budget) = self.budget {
            if self.nodes >= budget {
                return DpllResult::Budget;
            }
        }
        self.nodes += 1;
        let mark = self.trail.len();
        if !self.propagate() {
            self.undo_to(mark);
            return DpllResult::Unsat;
        }
        if self.unsatisfied == 0 {
            return DpllResult::Sat;
        }
        let lit = self.pick_branch().expect("active clause has a free literal");
        for attempt in [lit, -lit] {
            let branch_mark = self.trail.len();
            if self.assign_lit(attempt) {
                match self.search() {
                    DpllResult::Unsat => {}
                    decided => return decided,
                }
            }
            self.undo_to(branch_mark);
        }
        self.undo_to(mark);
        DpllResult::Unsat
    }
}

fn slot(lit: i32) -> usize {
    let var = (lit.unsigned_abs() - 1) as usize;
    2 * var + usize::from(lit < 0)
}

/// Exhaustive truth-table decision; the independent oracle the internal
/// solver is validated against. Only sensible for small variable counts.
pub fn truth_table_satisfiable(formula: &CnfFormula) -> bool {
    assert!(formula.num_vars <= 24, "truth table oracle limited to 24 vars");
    (0u64..(1u64 << formula.num_vars)).any(|bits| {
        formula.clauses.iter().all(|clause| {
            clause.iter().any(|&lit| {
                let value = bits >> (lit.unsigned_abs() - 1) & 1 == 1;
                value == (lit > 0)
            })
        })
    })
}

/// Reads the selector variables of a SAT outcome back into a network.
pub fn decode_network(vm: &VarMap, outcome: &SolveOutcome) -> Result<Network> {
    let assignment = match (&outcome.status, &outcome.assignment) {
        (Status::Sat, Some(assignment)) => assignment,
        _ => return Err(Error::NotSat(outcome.status.label().to_string())),
    };
    let n = vm.n();
    let mut layers = Vec::with_capacity(vm.depth());
    for k in 1..=vm.depth() {
        let mut used = 0u32;
        let mut comparators = Vec::new();
        for i in 1..=n {
            for j in (i + 1)..=n {
                let var = vm.selector(k, i, j) as usize;
                if assignment[var - 1] {
                    let mask = (1u32 << (i - 1)) | (1u32 << (j - 1));
                    if used & mask != 0 {
                        let channel = if used & (1 << (i - 1)) != 0 { i } else { j };
                        return Err(Error::DecodeIntegrity { layer: k, channel });
                    }
                    used |= mask;
                    comparators.push(crate::network::Comparator::new(i, j));
                }
            }
        }
        layers.push(Layer::new(comparators));
    }
    Ok(Network::new(n, layers))
}

/// Decodes a SAT outcome and re-evaluates every encoded vector through the
/// decoded free network; when the inputs are exactly the outputs of the
/// given prefix, the composed network is additionally checked to sort all
/// Boolean inputs. Returns Ok(false) when the model fails the re-check.
pub fn verify_outcome(
    vm: &VarMap,
    outcome: &SolveOutcome,
    inputs: &InputSet,
    prefix: Option<&Network>,
) -> Result<bool> {
    let free = decode_network(vm, outcome)?;
    for vector in &inputs.vectors {
        let out = free.apply_bits(vector.bits.value());
        if !BitVector::new(vm.n(), out).is_sorted() {
            return Ok(false);
        }
    }
    match prefix {
        Some(prefix) => {
            let reachable = prefix.outputs(None)?;
            let covers_all = reachable.len() == inputs.len()
                && inputs.vectors.iter().all(|v| reachable.contains(&v.bits));
            if covers_all {
                let composed = prefix.compose(&free)?;
                return Ok(composed.is_sorting());
            }
            Ok(true)
        }
        None => {
            let covers_all = inputs.len() == 1 << vm.n();
            if covers_all {
                return Ok(free.is_sorting());
            }
            Ok(true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{encode_existence, encode_with_prefix};
    use crate::layers::first_layer;
    use rand::{Rng, SeedableRng};

    fn formula(num_vars: usize, clauses: &[&[i32]]) -> CnfFormula {
        let mut f = CnfFormula::new(num_vars);
        for c in clauses {
            f.push_clause(c.to_vec());
        }
        f
    }

    #[test]
    fn unit_and_contradiction() {
        let cfg = SolverConfig::default();
        let f = formula(1, &[&[1]]);
        let outcome = solve_internal(&f, &cfg);
        assert_eq!(outcome.status, Status::Sat);
        assert_eq!(outcome.assignment.unwrap()[0], true);
        assert_eq!(solve_cdcl(&f).status, Status::Sat);

        let f = formula(1, &[&[1], &[-1]]);
        assert_eq!(solve_internal(&f, &cfg).status, Status::Unsat);
        assert_eq!(solve_cdcl(&f).status, Status::Unsat);
    }

    #[test]
    fn empty_clause_set_is_sat() {
        let f = CnfFormula::new(0);
        let outcome = solve_internal(&f, &SolverConfig::default());
        assert_eq!(outcome.status, Status::Sat);
        assert_eq!(outcome.assignment.unwrap().len(), 0);
    }

    #[test]
    fn empty_clause_is_unsat() {
        let mut f = CnfFormula::new(1);
        f.clauses.push(Vec::new());
        assert_eq!(solve_internal(&f, &SolverConfig::default()).status, Status::Unsat);
    }

    #[test]
    fn var_cap_yields_unknown() {
        let f = formula(10, &[&[1]]);
        let cfg = SolverConfig { internal_var_cap: 5, ..SolverConfig::default() };
        assert_eq!(
            solve_internal(&f, &cfg).status,
            Status::Unknown(UnknownCause::VarCapExceeded)
        );
    }

    #[test]
    fn random_formulas_match_truth_table() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xD6A1);
        let cfg = SolverConfig::default();
        for _ in 0..60 {
            let num_vars = rng.gen_range(3..=12);
            let num_clauses = rng.gen_range(1..=40);
            let mut f = CnfFormula::new(num_vars);
            for _ in 0..num_clauses {
                let width = rng.gen_range(1..=3);
                let clause: Vec<i32> = (0..width)
                    .map(|_| {
                        let var = rng.gen_range(1..=num_vars) as i32;
                        if rng.gen() { var } else { -var }
                    })
                    .collect();
                f.push_clause(clause);
            }
            let expected = truth_table_satisfiable(&f);
            let outcome = solve_internal(&f, &cfg);
            assert_eq!(outcome.status == Status::Sat, expected);
            assert_eq!(solve_cdcl(&f).status == Status::Sat, expected);
            if let Some(assignment) = outcome.assignment {
                // model must actually satisfy the formula
                for clause in &f.clauses {
                    assert!(clause.iter().any(|&l| assignment[(l.unsigned_abs() - 1) as usize] == (l > 0)));
                }
            }
        }
    }

    #[test]
    fn existence_instances_internal() {
        let cfg = SolverConfig::default();
        let enc = encode_existence(3, 2);
        assert_eq!(solve_internal(&enc.formula, &cfg).status, Status::Unsat);
        let enc = encode_existence(3, 3);
        assert_eq!(solve_internal(&enc.formula, &cfg).status, Status::Sat);
    }

    #[test]
    fn decode_single_comparator() {
        let enc = encode_existence(2, 1);
        let outcome = solve_cdcl(&enc.formula);
        assert_eq!(outcome.status, Status::Sat);
        let net = decode_network(&enc.var_map, &outcome).unwrap();
        assert_eq!(net.depth(), 1);
        assert_eq!(net.layers()[0], Layer::from_pairs(&[(1, 2)]));
        assert!(verify_outcome(&enc.var_map, &outcome, &enc.inputs, None).unwrap());
    }

    #[test]
    fn decode_depth_three_sorter() {
        let enc = encode_existence(4, 3);
        let outcome = solve_cdcl(&enc.formula);
        assert_eq!(outcome.status, Status::Sat);
        let net = decode_network(&enc.var_map, &outcome).unwrap();
        assert!(net.is_sorting());
        assert!(verify_outcome(&enc.var_map, &outcome, &enc.inputs, None).unwrap());
    }

    #[test]
    fn decode_prefixed_instance() {
        let prefix = Network::single_layer(4, first_layer(4));
        let enc = encode_with_prefix(4, 3, &prefix).unwrap();
        let outcome = solve_cdcl(&enc.formula);
        assert_eq!(outcome.status, Status::Sat);
        let free = decode_network(&enc.var_map, &outcome).unwrap();
        assert_eq!(free.depth(), 2);
        assert!(prefix.compose(&free).unwrap().is_sorting());
        assert!(verify_outcome(&enc.var_map, &outcome, &enc.inputs, Some(&prefix)).unwrap());
    }

    #[test]
    fn tampered_model_fails_verification() {
        let enc = encode_existence(2, 1);
        let mut outcome = solve_cdcl(&enc.formula);
        let selector = enc.var_map.selector(1, 1, 2) as usize;
        outcome.assignment.as_mut().unwrap()[selector - 1] = false;
        assert!(!verify_outcome(&enc.var_map, &outcome, &enc.inputs, None).unwrap());
    }

    #[test]
    fn verify_rejects_unsat_outcomes() {
        let enc = encode_existence(2, 1);
        let outcome = SolveOutcome::new(
            Status::Unsat,
            None,
            0,
            Duration::from_millis(1),
            "test",
        );
        assert!(matches!(
            verify_outcome(&enc.var_map, &outcome, &enc.inputs, None),
            Err(Error::NotSat(_))
        ));
    }

    #[test]
    fn competition_output_parsing() {
        let (status, assignment, defaulted) =
            parse_competition_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 3).unwrap();
        assert_eq!(status, Status::Sat);
        assert_eq!(assignment.unwrap(), vec![true, false, true]);
        assert_eq!(defaulted, 0);

        let (status, assignment, _) =
            parse_competition_output("s UNSATISFIABLE\n", 2).unwrap();
        assert_eq!(status, Status::Unsat);
        assert!(assignment.is_none());

        assert!(parse_competition_output("all good\n", 1).is_err());
        assert!(parse_competition_output("s MAYBE\n", 1).is_err());
        assert!(parse_competition_output("s SATISFIABLE\nv 9 0\n", 2).is_err());

        // partial model: unassigned variables default to false and are counted
        let (_, assignment, defaulted) =
            parse_competition_output("s SATISFIABLE\nv 2 0\n", 3).unwrap();
        assert_eq!(assignment.unwrap(), vec![false, true, false]);
        assert_eq!(defaulted, 2);
    }
}
