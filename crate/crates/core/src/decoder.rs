//! Partial error correction with minimum-weight perfect matching.
//!
//! Only the correction sector is measured. Defects are paired along lattice
//! shortest paths; whatever survives the correction is a product of imprinter
//! stabilizers (a loop that may flip the readout sign) or a logical operator.

use serde::Serialize;

use crate::codes::{CssCode, Family, Sector, StabilizerGroup};
use crate::error::{Error, Result};
use crate::gf2::RowBasis;
use crate::noise::ErrorPattern;
use crate::support::Support;

/// Defect count up to which matching is solved exactly.
pub const DEFAULT_EXACT_LIMIT: usize = 16;

/// All-pairs shortest paths between correction checks.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    n_checks: usize,
    dist: Vec<u32>,
    paths: Vec<Support>,
}

impl DistanceTable {
    pub fn n_checks(&self) -> usize {
        self.n_checks
    }

    /// Edge count of a shortest chain of qubits joining checks `a` and `b`;
    /// `u32::MAX` when they are disconnected.
    pub fn dist(&self, a: usize, b: usize) -> u32 {
        self.dist[a * self.n_checks + b]
    }

    /// One shortest chain realizing [`dist`](Self::dist).
    pub fn path(&self, a: usize, b: usize) -> &Support {
        &self.paths[a * self.n_checks + b]
    }

    /// Distances over unordered pairs `a < b`.
    pub fn pair_distances(&self) -> Vec<u32> {
        let n = self.n_checks;
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).map(|(a, b)| self.dist(a, b)).collect()
    }
}

/// BFS from every correction check over the check graph, in which two checks
/// are adjacent when they share a qubit. Neighbors are expanded in increasing
/// qubit index, so the stored paths are deterministic.
pub fn build_distance_table(code: &StabilizerGroup) -> Result<DistanceTable> {
    if code.family() == Family::BaconShor {
        return Err(Error::UnsupportedFamily(format!(
            "{} (rows are decoded by majority vote)",
            code.family().name()
        )));
    }
    let checks = code.correction_checks();
    let n_checks = checks.len();
    let n_qubits = code.n_qubits();

    let mut on_qubit: Vec<Vec<usize>> = vec![Vec::new(); n_qubits];
    for (c, s) in checks.iter().enumerate() {
        for q in s.indices() {
            on_qubit[q].push(c);
        }
    }
    let neighbors: Vec<Vec<(usize, usize)>> = checks
        .iter()
        .enumerate()
        .map(|(c, s)| {
            s.indices()
                .flat_map(|q| on_qubit[q].iter().filter(move |&&o| o != c).map(move |&o| (o, q)))
                .collect()
        })
        .collect();

    let mut dist = vec![u32::MAX; n_checks * n_checks];
    let mut paths = vec![Support::zeros(n_qubits); n_checks * n_checks];
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n_checks];
    let mut queue = std::collections::VecDeque::new();
    for src in 0..n_checks {
        let row = &mut dist[src * n_checks..(src + 1) * n_checks];
        parent.iter_mut().for_each(|p| *p = None);
        row[src] = 0;
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            for &(w, q) in &neighbors[v] {
                if row[w] == u32::MAX {
                    row[w] = row[v] + 1;
                    parent[w] = Some((v, q));
                    queue.push_back(w);
                }
            }
        }
        for dst in 0..n_checks {
            let mut chain = Support::zeros(n_qubits);
            let mut at = dst;
            while let Some((prev, q)) = parent[at] {
                chain.flip(q);
                at = prev;
            }
            paths[src * n_checks + dst] = chain;
        }
    }
    Ok(DistanceTable { n_checks, dist, paths })
}

/// Correction-sector checks reporting a −1 outcome, in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct DefectSet(pub Vec<usize>);

/// Checks that anticommute with the error's imprinter-type component
/// (the component the correction checks detect; Y contributes through it).
pub fn extract_syndrome(code: &StabilizerGroup, err: &ErrorPattern) -> Result<DefectSet> {
    if err.n_qubits() != code.n_qubits() {
        return Err(Error::SizeMismatch { expected: code.n_qubits(), got: err.n_qubits() });
    }
    let relevant = err.component(code.imprinter_sector());
    Ok(syndrome_of(code.correction_checks(), relevant))
}

fn syndrome_of(checks: &[Support], pattern: &Support) -> DefectSet {
    DefectSet(
        checks.iter().enumerate().filter(|(_, c)| c.parity_unchecked(pattern)).map(|(i, _)| i).collect(),
    )
}

/// A perfect pairing of defects.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
    pub weight: u64,
    /// False when the pairing came from the greedy + 2-swap fallback.
    pub exact: bool,
}

/// Minimum-weight perfect matching of `defects` (check indices) under the
/// table's distances. Exact by branch and bound up to `exact_limit` defects.
pub fn mwpm(defects: &DefectSet, table: &DistanceTable) -> Result<Matching> {
    mwpm_with_limit(defects, table, DEFAULT_EXACT_LIMIT)
}

pub fn mwpm_with_limit(defects: &DefectSet, table: &DistanceTable, exact_limit: usize) -> Result<Matching> {
    let k = defects.0.len();
    if k % 2 == 1 {
        return Err(Error::OddDefectCount(k));
    }
    let d: Vec<Vec<u64>> =
        defects.0.iter().map(|&a| defects.0.iter().map(|&b| table.dist(a, b) as u64).collect()).collect();
    let (local, exact) =
        if k <= exact_limit { (branch_and_bound(&d), true) } else { (two_swap(&d, greedy(&d)), false) };
    let weight = local.iter().map(|&(i, j)| d[i][j]).sum();
    let pairs = local.into_iter().map(|(i, j)| (defects.0[i], defects.0[j])).collect();
    Ok(Matching { pairs, weight, exact })
}

fn greedy(d: &[Vec<u64>]) -> Vec<(usize, usize)> {
    let k = d.len();
    let mut candidates: Vec<(u64, usize, usize)> =
        (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).map(|(i, j)| (d[i][j], i, j)).collect();
    candidates.sort_unstable();
    let mut used = vec![false; k];
    let mut pairs = Vec::with_capacity(k / 2);
    for (_, i, j) in candidates {
        if !used[i] && !used[j] {
            used[i] = true;
            used[j] = true;
            pairs.push((i, j));
        }
    }
    pairs
}

fn two_swap(d: &[Vec<u64>], mut pairs: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    loop {
        let mut improved = false;
        for x in 0..pairs.len() {
            for y in x + 1..pairs.len() {
                let (a, b) = pairs[x];
                let (c, e) = pairs[y];
                let now = d[a][b] + d[c][e];
                if d[a][c] + d[b][e] < now {
                    pairs[x] = (a, c);
                    pairs[y] = (b, e);
                    improved = true;
                } else if d[a][e] + d[b][c] < now {
                    pairs[x] = (a, e);
                    pairs[y] = (b, c);
                    improved = true;
                }
            }
        }
        if !improved {
            return pairs;
        }
    }
}

struct Search<'a> {
    d: &'a [Vec<u64>],
    order: Vec<Vec<usize>>,
    best: u64,
    best_pairs: Vec<(usize, usize)>,
    stack: Vec<(usize, usize)>,
}

impl Search<'_> {
    /// Half the sum over unmatched defects of their nearest unmatched partner;
    /// never exceeds the cost of completing the pairing. Returned doubled.
    fn bound_x2(&self, used: u64) -> u64 {
        let k = self.d.len();
        let mut sum = 0;
        for u in (0..k).filter(|u| used & (1 << u) == 0) {
            let nearest = self.order[u].iter().find(|&&v| used & (1 << v) == 0);
            if let Some(&v) = nearest {
                sum += self.d[u][v];
            }
        }
        sum
    }

    fn run(&mut self, used: u64, cost: u64) {
        let k = self.d.len();
        let Some(i) = (0..k).find(|i| used & (1 << i) == 0) else {
            if cost < self.best {
                self.best = cost;
                self.best_pairs = self.stack.clone();
            }
            return;
        };
        let used_i = used | (1 << i);
        for idx in 0..self.order[i].len() {
            let j = self.order[i][idx];
            if used_i & (1 << j) != 0 {
                continue;
            }
            let next = used_i | (1 << j);
            let c = cost + self.d[i][j];
            if 2 * c + self.bound_x2(next) >= 2 * self.best {
                continue;
            }
            self.stack.push((i, j));
            self.run(next, c);
            self.stack.pop();
        }
    }
}

fn branch_and_bound(d: &[Vec<u64>]) -> Vec<(usize, usize)> {
    let k = d.len();
    if k == 0 {
        return Vec::new();
    }
    assert!(k <= 64);
    let order = (0..k)
        .map(|i| {
            let mut o: Vec<usize> = (0..k).filter(|&j| j != i).collect();
            o.sort_by_key(|&j| (d[i][j], j));
            o
        })
        .collect();
    let start = two_swap(d, greedy(d));
    let start_cost: u64 = start.iter().map(|&(i, j)| d[i][j]).sum();
    let mut search = Search { d, order, best: start_cost + 1, best_pairs: start, stack: Vec::new() };
    search.run(0, 0);
    let mut pairs = search.best_pairs;
    for p in &mut pairs {
        if p.0 > p.1 {
            *p = (p.1, p.0);
        }
    }
    pairs.sort_unstable();
    pairs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualClass {
    Identity,
    StabilizerLoop,
    Logical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeResult {
    pub defects: DefectSet,
    pub pairing: Vec<(usize, usize)>,
    pub exact_matching: bool,
    pub correction: Support,
    pub residual: Support,
    pub residual_class: ResidualClass,
    /// Readout sign `(−1)^{|residual ∩ tx|}`.
    pub tx_sign: i8,
}

/// Matching decoder bound to one code, with the imprinter row space
/// precomputed for residual classification.
#[derive(Debug, Clone)]
pub struct Decoder {
    code: CssCode,
    table: DistanceTable,
    imprinter_span: RowBasis,
    exact_limit: usize,
}

impl Decoder {
    pub fn new(code: &CssCode) -> Result<Self> {
        let table = build_distance_table(code)?;
        Ok(Self::with_table(code, table))
    }

    pub fn with_table(code: &CssCode, table: DistanceTable) -> Self {
        let imprinter_span = RowBasis::from_rows(code.n_qubits(), code.imprinter_checks());
        Self { code: code.clone(), table, imprinter_span, exact_limit: DEFAULT_EXACT_LIMIT }
    }

    pub fn with_exact_limit(mut self, exact_limit: usize) -> Self {
        self.exact_limit = exact_limit;
        self
    }

    pub fn code(&self) -> &CssCode {
        &self.code
    }

    pub fn table(&self) -> &DistanceTable {
        &self.table
    }

    /// Pauli type of the errors this decoder corrects.
    pub fn corrected_type(&self) -> Sector {
        self.code.imprinter_sector()
    }

    pub fn decode(&self, err: &ErrorPattern) -> Result<DecodeResult> {
        if err.n_qubits() != self.code.n_qubits() {
            return Err(Error::SizeMismatch { expected: self.code.n_qubits(), got: err.n_qubits() });
        }
        self.decode_component(err.component(self.corrected_type()))
    }

    /// Decodes an error given directly by its imprinter-type component.
    pub fn decode_component(&self, relevant: &Support) -> Result<DecodeResult> {
        let defects = syndrome_of(self.code.correction_checks(), relevant);
        let matching = mwpm_with_limit(&defects, &self.table, self.exact_limit)?;
        let mut correction = Support::zeros(self.code.n_qubits());
        for &(a, b) in &matching.pairs {
            correction.xor_assign(self.table.path(a, b));
        }
        let residual = relevant.xor(&correction);
        let residual_class = if residual.is_zero() {
            ResidualClass::Identity
        } else if self.imprinter_span.contains(&residual) {
            ResidualClass::StabilizerLoop
        } else {
            ResidualClass::Logical
        };
        let tx_sign = if residual.parity_unchecked(self.code.tx()) { -1 } else { 1 };
        Ok(DecodeResult {
            defects,
            pairing: matching.pairs,
            exact_matching: matching.exact,
            correction,
            residual,
            residual_class,
            tx_sign,
        })
    }
}

pub fn decode(code: &CssCode, err: &ErrorPattern, table: &DistanceTable) -> Result<DecodeResult> {
    Decoder::with_table(code, table.clone()).decode(err)
}

/// One line of a decode trace dump.
#[derive(Debug, Clone, Serialize)]
pub struct DecodeTrace<'a> {
    pub error: &'a ErrorPattern,
    pub defects: &'a DefectSet,
    pub pairing: &'a [(usize, usize)],
    pub correction: &'a Support,
    pub residual_class: ResidualClass,
    pub tx_sign: i8,
}

impl<'a> DecodeTrace<'a> {
    pub fn new(error: &'a ErrorPattern, result: &'a DecodeResult) -> Self {
        Self {
            error,
            defects: &result.defects,
            pairing: &result.pairing,
            correction: &result.correction,
            residual_class: result.residual_class,
            tx_sign: result.tx_sign,
        }
    }
}

/// Row flip probability under majority voting on a Bacon-Shor row of `n`
/// qubits, estimated from `rows` sampled rows. A row counts as flipped when
/// more than `(n-1)/2` of its qubits are hit, ties included.
pub fn majority_vote_flip_rate<R: rand::Rng + ?Sized>(n: usize, p: f64, rows: usize, rng: &mut R) -> f64 {
    let threshold = (n.saturating_sub(1)) / 2;
    let flipped = (0..rows).filter(|_| (0..n).filter(|_| rng.gen::<f64>() < p).count() > threshold).count();
    flipped as f64 / rows as f64
}
