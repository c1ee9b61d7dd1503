//! Propositional encoding of comparator-network existence.
//!
//! A depth-d candidate network on n channels is a set of selector variables
//! g^k_{i,j} (comparator <i,j> present in layer k). For every encoded input
//! vector, value variables v^k_i track the channel contents layer by layer,
//! with the known zero prefix and one suffix of each vector substituted as
//! constants. The clause set is the direct expansion of the layer update
//! rules, so a satisfying assignment decodes straight back into a network.

use crate::bits::{BitVector, OutputSet};
use crate::error::{Error, Result};
use crate::network::Network;

/// CNF over integer variables 1..=num_vars; clauses hold nonzero literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnfFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize) -> Self {
        Self { num_vars, clauses: Vec::new() }
    }

    /// Adds a clause, deduplicating literals and dropping tautologies.
    pub fn push_clause(&mut self, mut lits: Vec<i32>) {
        lits.sort_unstable();
        lits.dedup();
        debug_assert!(lits.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= self.num_vars));
        if lits.windows(2).any(|w| w[0] == -w[1]) {
            return;
        }
        self.clauses.push(lits);
    }

    pub fn extend_from(&mut self, other: CnfFormula) {
        debug_assert_eq!(self.num_vars, other.num_vars);
        self.clauses.extend(other.clauses);
    }
}

/// A literal that may have been hard-wired to a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarOrConst {
    Var(i32),
    Const(bool),
}

impl VarOrConst {
    fn negated(self) -> Self {
        match self {
            VarOrConst::Var(v) => VarOrConst::Var(-v),
            VarOrConst::Const(b) => VarOrConst::Const(!b),
        }
    }
}

/// One encoded input vector with its hard-wired zero prefix and one suffix.
#[derive(Debug, Clone)]
pub struct InputVector {
    pub bits: BitVector,
    /// Channels 1..=wired_low carry constant 0 through every layer.
    pub wired_low: usize,
    /// Channels n-wired_high+1..=n carry constant 1 through every layer.
    pub wired_high: usize,
}

impl InputVector {
    fn free_channels(&self, n: usize) -> usize {
        n - self.wired_low - self.wired_high
    }
}

/// An ordered list of input vectors to be sorted by the encoded network.
#[derive(Debug, Clone)]
pub struct InputSet {
    pub n: usize,
    pub vectors: Vec<InputVector>,
}

impl InputSet {
    fn annotate(n: usize, bits: BitVector, hardwire: bool) -> InputVector {
        if hardwire {
            let p = bits.leading_zeros();
            let q = bits.trailing_ones();
            // a fully sorted vector is wired on every channel
            let q = q.min(n - p);
            InputVector { bits, wired_low: p, wired_high: q }
        } else {
            InputVector { bits, wired_low: 0, wired_high: 0 }
        }
    }

    /// All 2^n Boolean vectors in ascending packed order.
    pub fn all_boolean(n: usize, hardwire: bool) -> Self {
        let vectors = (0..(1u32 << n))
            .map(|value| Self::annotate(n, BitVector::new(n, value), hardwire))
            .collect();
        Self { n, vectors }
    }

    /// Members of an output set in ascending packed order.
    pub fn from_outputs(set: &OutputSet, hardwire: bool) -> Self {
        let n = set.width();
        let vectors = set
            .iter()
            .map(|bits| Self::annotate(n, bits, hardwire))
            .collect();
        Self { n, vectors }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Restriction of `set` to vectors with at least p leading zeros and q
/// trailing ones for some split p+q = n-m. Existing hard-wire annotations
/// are kept, so members are wired by their maximal sorted margins.
pub fn build_tm(set: &InputSet, m: usize) -> Result<InputSet> {
    if m == 0 || m > set.n {
        return Err(Error::SubnetSize { m, n: set.n });
    }
    let needed = set.n - m;
    let vectors = set
        .vectors
        .iter()
        .filter(|v| v.bits.leading_zeros() + v.bits.trailing_ones() >= needed)
        .cloned()
        .collect();
    Ok(InputSet { n: set.n, vectors })
}

/// Deterministic variable layout: comparator selectors first (layer-major,
/// pair-lexicographic), then value variables grouped by input vector, layer
/// major, channel minor. Hard-wired positions receive no variable.
#[derive(Debug, Clone)]
pub struct VarMap {
    n: usize,
    d: usize,
    pair_count: usize,
    wired: Vec<(usize, usize)>,
    v_offsets: Vec<usize>,
    num_vars: usize,
}

impl VarMap {
    pub fn new(n: usize, d: usize, inputs: &InputSet) -> Self {
        assert_eq!(n, inputs.n);
        let pair_count = n * (n - 1) / 2;
        let mut v_offsets = Vec::with_capacity(inputs.len());
        let mut running = 0usize;
        let mut wired = Vec::with_capacity(inputs.len());
        for vector in &inputs.vectors {
            v_offsets.push(running);
            running += (d + 1) * vector.free_channels(n);
            wired.push((vector.wired_low, vector.wired_high));
        }
        Self { n, d, pair_count, wired, v_offsets, num_vars: d * pair_count + running }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.d
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_selector_vars(&self) -> usize {
        self.d * self.pair_count
    }

    pub fn input_count(&self) -> usize {
        self.wired.len()
    }

    fn pair_index(&self, i: usize, j: usize) -> usize {
        debug_assert!(1 <= i && i < j && j <= self.n);
        (i - 1) * self.n - i * (i - 1) / 2 + (j - i - 1)
    }

    /// Selector variable of comparator <i,j> (i < j) in layer k (1-based).
    pub fn selector(&self, k: usize, i: usize, j: usize) -> i32 {
        debug_assert!((1..=self.d).contains(&k));
        ((k - 1) * self.pair_count + self.pair_index(i, j) + 1) as i32
    }

    /// Value of channel i after layer k (k = 0 is the input) for input t.
    pub fn value(&self, t: usize, k: usize, i: usize) -> VarOrConst {
        debug_assert!(k <= self.d && (1..=self.n).contains(&i));
        let (p, q) = self.wired[t];
        if i <= p {
            return VarOrConst::Const(false);
        }
        if i > self.n - q {
            return VarOrConst::Const(true);
        }
        let free = self.n - p - q;
        let id = self.num_selector_vars() + self.v_offsets[t] + k * free + (i - p - 1) + 1;
        VarOrConst::Var(id as i32)
    }
}

/// Builds a clause from possibly-constant literals: a true literal satisfies
/// the clause (dropped), false literals vanish.
fn emit(formula: &mut CnfFormula, lits: impl IntoIterator<Item = VarOrConst>) {
    let mut clause = Vec::new();
    for lit in lits {
        match lit {
            VarOrConst::Const(true) => return,
            VarOrConst::Const(false) => {}
            VarOrConst::Var(v) => clause.push(v),
        }
    }
    debug_assert!(!clause.is_empty(), "hard-wiring produced an empty clause");
    formula.push_clause(clause);
}

/// Pairwise exclusion clauses: each channel is used at most once per layer.
pub fn encode_once_valid(n: usize, d: usize, vm: &VarMap) -> CnfFormula {
    let mut formula = CnfFormula::new(vm.num_vars());
    for k in 1..=d {
        for c in 1..=n {
            for a in 1..=n {
                if a == c {
                    continue;
                }
                for b in (a + 1)..=n {
                    if b == c {
                        continue;
                    }
                    let first = vm.selector(k, c.min(a), c.max(a));
                    let second = vm.selector(k, c.min(b), c.max(b));
                    formula.push_clause(vec![-first, -second]);
                }
            }
        }
    }
    formula
}

/// Clauses forcing input t to be routed to its sorted rearrangement:
/// input units, the layer update expansion, and output units.
pub fn encode_sorts(vm: &VarMap, t: usize, x: &InputVector) -> CnfFormula {
    let mut formula = CnfFormula::new(vm.num_vars());
    append_sorts(&mut formula, vm, t, x);
    formula
}

fn append_sorts(formula: &mut CnfFormula, vm: &VarMap, t: usize, x: &InputVector) {
    let n = vm.n();
    let d = vm.depth();

    // input units: v^0_i <-> x_i
    for i in 1..=n {
        let v = vm.value(t, 0, i);
        let unit = if x.bits.get(i) { v } else { v.negated() };
        emit(formula, [unit]);
    }

    // update expansion, layer major
    for k in 1..=d {
        for i in 1..=n {
            let cur = vm.value(t, k, i);
            let prev = vm.value(t, k - 1, i);
            let selectors: Vec<VarOrConst> = (1..=n)
                .filter(|&j| j != i)
                .map(|j| VarOrConst::Var(vm.selector(k, i.min(j), i.max(j))))
                .collect();

            // unused channel passes its value through
            let mut pass = selectors.clone();
            pass.push(cur.negated());
            pass.push(prev);
            emit(formula, pass);
            let mut pass = selectors.clone();
            pass.push(cur);
            pass.push(prev.negated());
            emit(formula, pass);

            // max side: g_{j,i} => (v <-> v'_j \/ v'_i)
            for j in 1..i {
                let sel = VarOrConst::Var(-vm.selector(k, j, i));
                let other = vm.value(t, k - 1, j);
                emit(formula, [sel, cur.negated(), other, prev]);
                emit(formula, [sel, cur, other.negated()]);
                emit(formula, [sel, cur, prev.negated()]);
            }
            // min side: g_{i,j} => (v <-> v'_j /\ v'_i)
            for j in (i + 1)..=n {
                let sel = VarOrConst::Var(-vm.selector(k, i, j));
                let other = vm.value(t, k - 1, j);
                emit(formula, [sel, cur, other.negated(), prev.negated()]);
                emit(formula, [sel, cur.negated(), other]);
                emit(formula, [sel, cur.negated(), prev]);
            }
        }
    }

    // output units: v^d_i <-> y_i with y the sorted rearrangement of x
    let sorted = x.bits.sorted();
    for i in 1..=n {
        let v = vm.value(t, d, i);
        let unit = if sorted.get(i) { v } else { v.negated() };
        emit(formula, [unit]);
    }
}

/// A formula together with its variable layout and encoded inputs.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub var_map: VarMap,
    pub formula: CnfFormula,
    pub inputs: InputSet,
}

fn encode_for_inputs(n: usize, d: usize, inputs: InputSet) -> Encoding {
    let vm = VarMap::new(n, d, &inputs);
    let mut formula = encode_once_valid(n, d, &vm);
    for (t, x) in inputs.vectors.iter().enumerate() {
        append_sorts(&mut formula, &vm, t, x);
    }
    debug_assert_eq!(
        (vm.num_vars(), formula.clauses.len()),
        predicted_counts(n, d, &inputs),
        "encoder drifted from the analytic size model"
    );
    Encoding { var_map: vm, formula, inputs }
}

/// Satisfiable iff a sorting network with n channels and depth d exists.
pub fn encode_existence(n: usize, d: usize) -> Encoding {
    encode_existence_with_mode(n, d, true)
}

/// As [`encode_existence`], with hard-wiring switchable for the
/// equisatisfiability cross-checks.
pub fn encode_existence_with_mode(n: usize, d: usize, hardwire: bool) -> Encoding {
    encode_for_inputs(n, d, InputSet::all_boolean(n, hardwire))
}

/// Satisfiable iff a depth-d sorting network starting with `prefix` exists;
/// the encoded free part has depth d - depth(prefix) and must sort every
/// output of the prefix.
pub fn encode_with_prefix(n: usize, d: usize, prefix: &Network) -> Result<Encoding> {
    if prefix.depth() > d {
        return Err(Error::PrefixTooDeep { prefix: prefix.depth(), target: d });
    }
    if prefix.is_generalized() {
        return Err(Error::Unsupported(n, "prefix must be a standard network"));
    }
    if prefix.channels() != n {
        return Err(Error::ChannelMismatch { left: prefix.channels(), right: n });
    }
    let reachable = prefix.outputs(None)?;
    let inputs = InputSet::from_outputs(&reachable, true);
    Ok(encode_for_inputs(n, d - prefix.depth(), inputs))
}

/// Necessary-condition formula: a depth-`d_remaining` completion sorting all
/// of T must sort the restricted set T_m, so UNSAT refutes existence. SAT is
/// conclusive only at m = n, where T_m = T.
pub fn encode_subnets(n: usize, d_remaining: usize, m: usize, t: &InputSet) -> Result<Encoding> {
    let restricted = build_tm(t, m)?;
    Ok(encode_for_inputs(n, d_remaining, restricted))
}

/// Variable and clause totals as closed-form functions of the dimensions and
/// hard-wire pattern; the encoder asserts against this model.
pub fn predicted_counts(n: usize, d: usize, inputs: &InputSet) -> (usize, usize) {
    let pair_count = n * (n - 1) / 2;
    let triples = if n >= 3 { n * (n - 1) * (n - 2) / 6 } else { 0 };
    let mut vars = d * pair_count;
    let mut clauses = d * 3 * triples;
    for vector in &inputs.vectors {
        let free = vector.free_channels(n);
        vars += (d + 1) * free;
        clauses += 2 * free + d * free * (2 + 3 * (free.saturating_sub(1)) + 2 * (n - free));
    }
    (vars, clauses)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layers::first_layer;
    use crate::network::Layer;

    #[test]
    fn once_valid_n3_d1() {
        let inputs = InputSet { n: 3, vectors: Vec::new() };
        let vm = VarMap::new(3, 1, &inputs);
        let formula = encode_once_valid(3, 1, &vm);
        assert_eq!(vm.num_vars(), 3);
        assert_eq!(
            formula.clauses,
            vec![vec![-2, -1], vec![-3, -1], vec![-3, -2]]
        );
    }

    #[test]
    fn once_valid_n2_d1() {
        let inputs = InputSet { n: 2, vectors: Vec::new() };
        let vm = VarMap::new(2, 1, &inputs);
        let formula = encode_once_valid(2, 1, &vm);
        assert_eq!(vm.num_vars(), 1);
        assert!(formula.clauses.is_empty());
    }

    #[test]
    fn once_valid_clause_count_formula() {
        for n in 2..=7 {
            for d in 1..=3 {
                let inputs = InputSet { n, vectors: Vec::new() };
                let vm = VarMap::new(n, d, &inputs);
                let formula = encode_once_valid(n, d, &vm);
                let triples = if n >= 3 { n * (n - 1) * (n - 2) / 6 } else { 0 };
                assert_eq!(formula.clauses.len(), d * 3 * triples, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn selector_layout_is_layer_major() {
        let inputs = InputSet { n: 4, vectors: Vec::new() };
        let vm = VarMap::new(4, 2, &inputs);
        assert_eq!(vm.selector(1, 1, 2), 1);
        assert_eq!(vm.selector(1, 1, 4), 3);
        assert_eq!(vm.selector(1, 2, 3), 4);
        assert_eq!(vm.selector(1, 3, 4), 6);
        assert_eq!(vm.selector(2, 1, 2), 7);
    }

    #[test]
    fn value_layout_skips_wired_positions() {
        let inputs = InputSet::all_boolean(2, true);
        // vectors 00, 10 (=x1 set), 01 (=x2 set), 11
        let vm = VarMap::new(2, 1, &inputs);
        // selector takes id 1; vector 00 and 11 and 01 are fully wired
        assert_eq!(vm.value(0, 0, 1), VarOrConst::Const(false));
        assert_eq!(vm.value(2, 1, 2), VarOrConst::Const(true));
        // only vector 10 = (1,0) has free channels
        assert_eq!(vm.value(1, 0, 1), VarOrConst::Var(2));
        assert_eq!(vm.value(1, 0, 2), VarOrConst::Var(3));
        assert_eq!(vm.value(1, 1, 1), VarOrConst::Var(4));
        assert_eq!(vm.value(1, 1, 2), VarOrConst::Var(5));
        assert_eq!(vm.num_vars(), 5);
    }

    #[test]
    fn sorted_input_contributes_nothing() {
        let set = InputSet::all_boolean(3, true);
        let vm = VarMap::new(3, 2, &set);
        for (t, x) in set.vectors.iter().enumerate() {
            let formula = encode_sorts(&vm, t, x);
            if x.bits.is_sorted() {
                assert!(formula.clauses.is_empty(), "sorted {:?}", x.bits);
            } else {
                assert!(!formula.clauses.is_empty());
            }
        }
    }

    #[test]
    fn existence_counts_match_model() {
        for n in 1..=4 {
            for d in 0..=3 {
                for hardwire in [false, true] {
                    let enc = encode_existence_with_mode(n, d, hardwire);
                    let (vars, clauses) = predicted_counts(n, d, &enc.inputs);
                    assert_eq!(enc.var_map.num_vars(), vars);
                    assert_eq!(enc.formula.clauses.len(), clauses);
                }
            }
        }
    }

    #[test]
    fn prefix_of_full_depth_is_trivially_satisfiable() {
        let prefix = Network::single_layer(2, first_layer(2));
        let enc = encode_with_prefix(2, 1, &prefix).unwrap();
        // free depth zero over already-sorted outputs: no clauses at all
        assert!(enc.formula.clauses.is_empty());
    }

    #[test]
    fn prefix_deeper_than_target_is_rejected() {
        let prefix = Network::new(3, vec![Layer::empty(), Layer::empty()]);
        assert!(matches!(
            encode_with_prefix(3, 1, &prefix),
            Err(Error::PrefixTooDeep { .. })
        ));
    }

    #[test]
    fn tm_restriction() {
        let f4 = Network::single_layer(4, first_layer(4));
        let t = InputSet::from_outputs(&f4.outputs(None).unwrap(), true);
        assert_eq!(t.len(), 9);

        let tn = build_tm(&t, 4).unwrap();
        assert_eq!(tn.len(), t.len());

        let t3 = build_tm(&t, 3).unwrap();
        // members with a leading zero or trailing one
        for v in &t3.vectors {
            assert!(v.bits.leading_zeros() + v.bits.trailing_ones() >= 1);
        }
        assert!(t3.len() < t.len());

        for m in 1..=4 {
            let tm = build_tm(&t, m).unwrap();
            assert!(tm.vectors.iter().all(|v| t.vectors.iter().any(|w| w.bits == v.bits)));
        }
        assert!(build_tm(&t, 0).is_err());
        assert!(build_tm(&t, 5).is_err());
    }

    #[test]
    fn subnets_at_full_size_equals_prefix_formula() {
        let n = 4;
        let prefix = Network::single_layer(n, first_layer(n));
        let direct = encode_with_prefix(n, 3, &prefix).unwrap();
        let t = InputSet::from_outputs(&prefix.outputs(None).unwrap(), true);
        let subnet = encode_subnets(n, 2, n, &t).unwrap();
        assert_eq!(direct.formula, subnet.formula);
    }
}
