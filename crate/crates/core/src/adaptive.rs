//! Bacon-Shor shape trade-off.
//!
//! An `m x n` Bacon-Shor probe imprints with its `m` X-type row-pair
//! stabilizers. Parallel (X) noise is corrected by majority vote along each
//! row, so longer rows help; perpendicular (Z) noise sees stabilizers of
//! weight `2n`, so longer rows hurt.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `(4N, 4N^2)`: standard quantum limit and Heisenberg limit.
pub fn baselines<T: Real>(n: usize) -> (T, T) {
    let n = T::from_count(n);
    (T::lit(4.0) * n, T::lit(4.0) * n * n)
}

/// Probability that a majority vote over `n` independent flips of
/// probability `p` fails: more than `(n-1)/2` flips, ties included.
pub fn majority_failure<T: Real>(n: usize, p: T) -> T {
    let t = (n - 1) / 2;
    if p <= T::zero() {
        return T::zero();
    }
    if p >= T::one() {
        return T::one();
    }
    if n <= 50 {
        let mut term = (T::one() - p).powi(n as i32);
        let ratio = p / (T::one() - p);
        let mut lower = T::zero();
        for k in 0..=t {
            lower = lower + term;
            term = term * T::from_count(n - k) / T::from_count(k + 1) * ratio;
        }
        return (T::one() - lower).max(T::zero());
    }
    // upper tail summed in log space, largest term factored out
    let (lp, lq) = (p.ln(), (T::one() - p).ln());
    let mut log_binom = T::zero();
    for k in 0..=t {
        log_binom = log_binom + T::from_count(n - k).ln() - T::from_count(k + 1).ln();
    }
    let mut logs = Vec::with_capacity(n - t);
    for k in t + 1..=n {
        logs.push(log_binom + T::from_count(k) * lp + T::from_count(n - k) * lq);
        if k < n {
            log_binom = log_binom + T::from_count(n - k).ln() - T::from_count(k + 1).ln();
        }
    }
    let top = logs.iter().copied().fold(T::neg_infinity(), T::max);
    let sum = logs.iter().fold(T::zero(), |a, &l| a + (l - top).exp());
    (top + sum.ln()).exp().min(T::one())
}

/// `|x|^k` through logarithms so that huge exponents underflow cleanly.
fn pow_count<T: Real>(x: T, k: usize) -> T {
    if k == 0 {
        return T::one();
    }
    let a = x.abs();
    if a == T::zero() {
        return T::zero();
    }
    let mag = (T::from_count(k) * a.ln()).exp();
    if x < T::zero() && k % 2 == 1 {
        -mag
    } else {
        mag
    }
}

/// `(F_{q,X}, F_{q,Z})` of an `m x n` Bacon-Shor probe:
///
/// * `F_{q,X} = 4 (1 - 2 p_row)^{2m} m^2` with `p_row` the majority-vote
///   failure rate of one row,
/// * `F_{q,Z} = 4 q^{4n} m^2 + 4 (1 + 2 q^{2n} - 3 q^{4n}) m`, `q = 1 - 2p`.
pub fn bacon_shor_fq<T: Real>(m: usize, n: usize, p: T) -> Result<(T, T)> {
    if m < 2 || n < 1 {
        return Err(Error::InvalidShape(format!("{m} x {n}")));
    }
    if !(p >= T::zero() && p <= T::lit(0.5)) {
        return Err(Error::OutOfRange(format!("probability {p:?}")));
    }
    let four = T::lit(4.0);
    let mt = T::from_count(m);
    let row = majority_failure(n, p);
    let fqx = four * pow_count(T::one() - T::lit(2.0) * row, 2 * m) * mt * mt;
    let q = T::one() - T::lit(2.0) * p;
    let q2n = pow_count(q, 2 * n);
    let q4n = pow_count(q, 4 * n);
    let fqz = four * q4n * mt * mt + four * (T::one() + T::lit(2.0) * q2n - T::lit(3.0) * q4n) * mt;
    Ok((fqx, fqz))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeResult<T> {
    /// Qubits actually used, `m * n`.
    pub n_qubits: usize,
    pub m: usize,
    pub n: usize,
    pub p: T,
    pub fqx: T,
    pub fqz: T,
    pub sql: T,
    pub hl: T,
}

/// Column counts tried by [`optimal_shape`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum ShapePolicy {
    /// Every `n` with `m = floor(N/n) >= 2`.
    #[default]
    All,
    /// Odd `n` only.
    Odd,
    Explicit(Vec<usize>),
}

impl ShapePolicy {
    fn candidates(&self, budget: usize) -> Vec<usize> {
        let ok = |n: &usize| *n >= 1 && budget / n >= 2;
        match self {
            ShapePolicy::All => (1..=budget / 2).collect(),
            ShapePolicy::Odd => (1..=budget / 2).step_by(2).collect(),
            ShapePolicy::Explicit(v) => {
                let mut v: Vec<usize> = v.iter().copied().filter(ok).collect();
                v.sort_unstable();
                v.dedup();
                v
            }
        }
    }
}

fn shape_result<T: Real>(m: usize, n: usize, p: T) -> Result<ShapeResult<T>> {
    let (fqx, fqz) = bacon_shor_fq(m, n, p)?;
    let (sql, hl) = baselines(m * n);
    Ok(ShapeResult { n_qubits: m * n, m, n, p, fqx, fqz, sql, hl })
}

/// Shape `m = floor(N/n)` maximizing `F_{q,X}` over the policy's candidates;
/// ties go to the smaller `n`.
pub fn optimal_shape<T: Real>(budget: usize, p: T, policy: &ShapePolicy) -> Result<ShapeResult<T>> {
    if budget < 4 {
        return Err(Error::NoValidShape(budget));
    }
    let mut best: Option<(T, usize)> = None;
    for n in policy.candidates(budget) {
        let m = budget / n;
        let mt = T::from_count(m);
        // F_{q,X} <= 4 m^2 and m only shrinks from here
        if let Some((b, _)) = best {
            if T::lit(4.0) * mt * mt <= b {
                break;
            }
        }
        let (fqx, _) = bacon_shor_fq(m, n, p)?;
        if best.is_none_or(|(b, _)| fqx > b) {
            best = Some((fqx, n));
        }
    }
    let (_, n) = best.ok_or(Error::NoValidShape(budget))?;
    shape_result(budget / n, n, p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleEntry<T> {
    pub p: T,
    pub n: usize,
    pub m: usize,
    pub fqx: T,
    pub fqz: T,
    pub sql: T,
    /// True when `n` grew at this grid point.
    pub incremented: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Schedule<T> {
    pub n_qubits: usize,
    pub entries: Vec<ScheduleEntry<T>>,
    /// First grid point where `F_{q,Z} <= 4N`.
    pub threshold: Option<T>,
}

/// Walks `p_grid` with a budget of `N` qubits, starting from `n_start`
/// columns. Whenever `F_{q,X}` has fallen to `4N`, `n` grows by 2 (as long as
/// `m >= 2` remains possible).
pub fn adaptive_schedule<T: Real>(budget: usize, p_grid: &[T], n_start: usize) -> Result<Schedule<T>> {
    if p_grid.is_empty() {
        return Err(Error::InvalidGrid("empty grid".into()));
    }
    for (i, &p) in p_grid.iter().enumerate() {
        if !(p >= T::zero() && p < T::lit(0.5)) {
            return Err(Error::InvalidGrid(format!("p = {p:?} outside [0, 0.5)")));
        }
        if i > 0 && p <= p_grid[i - 1] {
            return Err(Error::InvalidGrid("grid not strictly ascending".into()));
        }
    }
    if n_start == 0 || budget / n_start < 2 {
        return Err(Error::InvalidShape(format!("{budget} qubits cannot hold n = {n_start}")));
    }
    let (sql, _) = baselines::<T>(budget);
    let mut n = n_start;
    let mut entries = Vec::with_capacity(p_grid.len());
    let mut threshold = None;
    for &p in p_grid {
        let start = n;
        let (mut fqx, mut fqz) = bacon_shor_fq(budget / n, n, p)?;
        while fqx <= sql && budget / (n + 2) >= 2 {
            n += 2;
            (fqx, fqz) = bacon_shor_fq(budget / n, n, p)?;
        }
        if threshold.is_none() && fqz <= sql {
            threshold = Some(p);
        }
        entries.push(ScheduleEntry { p, n, m: budget / n, fqx, fqz, sql, incremented: n != start });
    }
    Ok(Schedule { n_qubits: budget, entries, threshold })
}
