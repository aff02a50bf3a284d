//! Quantum Fisher information of the phase-imprinted probe.
//!
//! Perpendicular noise (the Pauli type that anticommutes with the imprinter
//! stabilizers) is handled exactly through closed forms, a pairwise counting
//! oracle and full enumeration. Parallel noise goes through the decoder:
//! after partial correction the state is a two-branch mixture whose contrast
//! `D = P(+) - P(-)` fixes the QFI `4 D^2 N_Z^2`.

use rayon::prelude::*;
use serde::Serialize;

use crate::codes::{CodeParams, StabilizerGroup};
use crate::decoder::{Decoder, ResidualClass};
use crate::error::{Error, Result};
use crate::noise::{ErrorPattern, ErrorSampler, PauliChannel, RngSeed};
use crate::scalar::{power_table, Real, Scalar};
use crate::support::Support;

/// Largest qubit count accepted by the enumeration oracles.
pub const ENUMERATION_LIMIT: usize = 20;

/// Largest qubit count for exhaustive enumeration over all `4^n` Pauli patterns.
pub const PAULI_ENUMERATION_LIMIT: usize = 12;

fn check_probability<S: Scalar>(p: &S, hi: S) -> Result<()> {
    if *p >= S::zero() && *p <= hi {
        Ok(())
    } else {
        Err(Error::OutOfRange(format!("probability {p:?}")))
    }
}

/// Closed-form value and whether the lattice is large enough for it to be exact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalyticQfi<T> {
    pub value: T,
    pub geometry_valid: bool,
}

/// `F_{q,X}` from the family's closed form, with `q = 1 - 2p`:
///
/// * GHZ: `4 q^2 N^2 + 16 p (1-p) N`
/// * square torus: `4 q^8 N^2 + 4 (1 + 4 q^6 - 5 q^8) N`
/// * honeycomb torus: `4 q^12 N^2 + 4 (1 + 6 q^10 - 7 q^12) N`
/// * Bacon-Shor: `4 q^{4n} m^2 + 4 (1 + 2 q^{2n} - 3 q^{4n}) m`
///
/// Toric forms assume neighboring plaquettes share a single edge, which fails
/// below 3 cells in either direction; `geometry_valid` is false there. The
/// Bacon-Shor form likewise needs `m >= 3`.
pub fn fqx_analytic<T: Real>(params: &CodeParams, p: T) -> Result<AnalyticQfi<T>> {
    check_probability(&p, T::one())?;
    let four = T::lit(4.0);
    let q = T::one() - T::lit(2.0) * p;
    let (value, geometry_valid) = match *params {
        CodeParams::Ghz { n } => {
            let n = T::from_count(n);
            (four * q * q * n * n + T::lit(16.0) * p * (T::one() - p) * n, true)
        }
        CodeParams::ToricSquare { lx, ly } => {
            (lattice_form(q, T::from_count(lx * ly), 4, 8), lx >= 3 && ly >= 3)
        }
        CodeParams::ToricHoneycomb { lx, ly, .. } => {
            (lattice_form(q, T::from_count(lx * ly), 6, 12), lx >= 3 && ly >= 3)
        }
        CodeParams::BaconShor { m, n } => {
            let q2n = q.powi(2 * n as i32);
            let q4n = q2n * q2n;
            let m_t = T::from_count(m);
            let value =
                four * q4n * m_t * m_t + four * (T::one() + T::lit(2.0) * q2n - T::lit(3.0) * q4n) * m_t;
            (value, m >= 3)
        }
    };
    Ok(AnalyticQfi { value, geometry_valid })
}

/// Stabilizers of weight `w` each sharing one qubit with `k` neighbors.
fn lattice_form<T: Real>(q: T, n_z: T, k: i32, w: i32) -> T {
    let four = T::lit(4.0);
    let kt = T::from(k).unwrap();
    let qw = q.powi(w);
    let qn = q.powi(w - 2);
    four * qw * n_z * n_z + four * (T::one() + kt * qn - (kt + T::one()) * qw) * n_z
}

/// Weight-two imprinter variant: `4 q^4 N^2 + 4 (1 + 2 q^2 - 3 q^4) N`.
pub fn fqx_weight_two<T: Real>(n: usize, p: T) -> Result<T> {
    check_probability(&p, T::one())?;
    let q = T::one() - T::lit(2.0) * p;
    let q2 = q * q;
    let n = T::from_count(n);
    let four = T::lit(4.0);
    Ok(four * q2 * q2 * n * n + four * (T::one() + T::lit(2.0) * q2 - T::lit(3.0) * q2 * q2) * n)
}

/// `4 [N + sum_{j != k} q^{|S_j xor S_k|}]` over the imprinter stabilizers,
/// exact for any geometry.
pub fn fqx_pair_oracle<S: Scalar>(code: &StabilizerGroup, p: &S) -> Result<S> {
    check_probability(p, S::one())?;
    let two = S::one() + S::one();
    let q = S::one() - two.clone() * p.clone();
    let checks = code.imprinter_checks();
    let mut counts = vec![0u64; code.n_qubits() + 1];
    for (j, a) in checks.iter().enumerate() {
        for b in &checks[j + 1..] {
            counts[a.weight() + b.weight() - 2 * a.overlap(b)] += 2;
        }
    }
    let powers = power_table(&q, code.n_qubits());
    let mut sum = S::from_count(checks.len());
    for (w, &c) in counts.iter().enumerate().filter(|(_, &c)| c > 0) {
        sum = sum + S::from_u64(c).unwrap() * powers[w].clone();
    }
    Ok(S::from_count(4) * sum)
}

/// `4 E[(sum_j (-1)^{|e & S_j|})^2]` over every perpendicular error `e`,
/// weighted by `p^|e| (1-p)^{n-|e|}`.
pub fn fqx_enumeration_oracle<S: Scalar>(code: &StabilizerGroup, p: &S) -> Result<S> {
    check_probability(p, S::one())?;
    let n = code.n_qubits();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { n, limit: ENUMERATION_LIMIT });
    }
    let masks: Vec<u64> = code.imprinter_checks().iter().map(|s| s.to_mask().unwrap()).collect();
    let n_z = masks.len() as i64;
    let by_weight = (0u64..1 << n)
        .into_par_iter()
        .fold(
            || vec![0u128; n + 1],
            |mut acc, e| {
                let odd = masks.iter().filter(|&&s| (s & e).count_ones() % 2 == 1).count() as i64;
                let o = n_z - 2 * odd;
                acc[e.count_ones() as usize] += (o * o) as u128;
                acc
            },
        )
        .reduce(|| vec![0u128; n + 1], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    let p_pow = power_table(p, n);
    let r_pow = power_table(&(S::one() - p.clone()), n);
    let mut sum = S::zero();
    for (w, &c) in by_weight.iter().enumerate().filter(|(_, &c)| c > 0) {
        sum = sum + S::from_u128(c).unwrap() * p_pow[w].clone() * r_pow[n - w].clone();
    }
    Ok(S::from_count(4) * sum)
}

/// Decoded sign statistics of every parallel error pattern, grouped by weight.
///
/// The contrast at any `p` is a ratio of polynomials in `p`, so one
/// enumeration serves every noise strength and any scalar type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignTally {
    pub n_qubits: usize,
    pub n_imprinters: usize,
    pub plus: Vec<u64>,
    pub minus: Vec<u64>,
    pub logical: Vec<u64>,
}

#[derive(Default, Clone, Copy)]
struct Counts {
    plus: u64,
    minus: u64,
    logical: u64,
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, o: Self) {
        self.plus += o.plus;
        self.minus += o.minus;
        self.logical += o.logical;
    }
}

fn classify(decoder: &Decoder, relevant: &Support) -> Result<Counts> {
    let r = decoder.decode_component(relevant)?;
    Ok(match (r.residual_class, r.tx_sign) {
        (ResidualClass::Logical, _) => Counts { logical: 1, ..Counts::default() },
        (_, 1) => Counts { plus: 1, ..Counts::default() },
        _ => Counts { minus: 1, ..Counts::default() },
    })
}

/// Sign class of every parallel error mask, indexed by the mask's bits.
fn classify_all(decoder: &Decoder) -> Result<Vec<Counts>> {
    let n = decoder.code().n_qubits();
    if n > ENUMERATION_LIMIT {
        return Err(Error::TooLarge { n, limit: ENUMERATION_LIMIT });
    }
    (0u64..1 << n).into_par_iter().map(|e| classify(decoder, &Support::from_mask(n, e))).collect()
}

/// Enumerates all `2^n` parallel error patterns through the decoder.
pub fn sign_tally(decoder: &Decoder) -> Result<SignTally> {
    let n = decoder.code().n_qubits();
    let classes = classify_all(decoder)?;
    let mut tally = SignTally {
        n_qubits: n,
        n_imprinters: decoder.code().n_imprinters(),
        plus: vec![0; n + 1],
        minus: vec![0; n + 1],
        logical: vec![0; n + 1],
    };
    for (e, c) in classes.iter().enumerate() {
        let w = e.count_ones() as usize;
        tally.plus[w] += c.plus;
        tally.minus[w] += c.minus;
        tally.logical[w] += c.logical;
    }
    Ok(tally)
}

impl SignTally {
    fn weigh<S: Scalar>(&self, counts: &[u64], p: &S) -> S {
        let p_pow = power_table(p, self.n_qubits);
        let r_pow = power_table(&(S::one() - p.clone()), self.n_qubits);
        counts.iter().enumerate().filter(|(_, &c)| c > 0).fold(S::zero(), |acc, (w, &c)| {
            acc + S::from_u64(c).unwrap() * p_pow[w].clone() * r_pow[self.n_qubits - w].clone()
        })
    }

    /// Probabilities `(P(+), P(-), P(logical))` at flip probability `p`.
    pub fn probabilities<S: Scalar>(&self, p: &S) -> Result<(S, S, S)> {
        check_probability(p, S::one())?;
        Ok((self.weigh(&self.plus, p), self.weigh(&self.minus, p), self.weigh(&self.logical, p)))
    }

    /// Contrast conditioned on a non-logical residual.
    pub fn contrast<S: Scalar>(&self, p: &S) -> Result<S> {
        let (plus, minus, _) = self.probabilities(p)?;
        let kept = plus.clone() + minus.clone();
        if kept == S::zero() {
            return Err(Error::NoKeptSamples(0));
        }
        Ok((plus - minus) / kept)
    }

    pub fn qfi<S: Scalar>(&self, p: &S) -> Result<S> {
        let d = self.contrast(p)?;
        let n = S::from_count(self.n_imprinters);
        Ok(S::from_count(4) * d.clone() * d * n.clone() * n)
    }
}

/// Monte Carlo QFI estimate under parallel noise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QfiEstimate<T> {
    pub value: T,
    pub contrast_d: T,
    pub stderr: T,
    pub n_samples: u64,
    pub n_kept: u64,
    pub n_logical: u64,
    pub n_plus: u64,
    pub n_minus: u64,
    /// True when the value came from exhaustive enumeration.
    pub exact: bool,
}

impl<T: Real> QfiEstimate<T> {
    fn from_counts(n_imprinters: usize, c: Counts, n_samples: u64) -> Result<Self> {
        let n_kept = c.plus + c.minus;
        if n_kept == 0 {
            return Err(Error::NoKeptSamples(n_samples));
        }
        let kept = T::from_u64(n_kept).unwrap();
        let d = (T::from_u64(c.plus).unwrap() - T::from_u64(c.minus).unwrap()) / kept;
        let nz = T::from_count(n_imprinters);
        let four = T::lit(4.0);
        let se_d = ((T::one() - d * d).max(T::zero()) / kept).sqrt();
        Ok(Self {
            value: four * d * d * nz * nz,
            contrast_d: d,
            stderr: T::lit(8.0) * d.abs() * nz * nz * se_d,
            n_samples,
            n_kept,
            n_logical: c.logical,
            n_plus: c.plus,
            n_minus: c.minus,
            exact: false,
        })
    }

    /// Standard error of the contrast, `sqrt((1 - D^2) / n_kept)`.
    pub fn contrast_stderr(&self) -> T {
        ((T::one() - self.contrast_d * self.contrast_d).max(T::zero()) / T::from_u64(self.n_kept).unwrap())
            .sqrt()
    }
}

/// Sample split across shards; the first `n % shards` shards take one extra.
fn shard_sizes(n_samples: u64, shard_count: usize) -> Vec<u64> {
    let k = shard_count as u64;
    (0..k).map(|i| n_samples / k + u64::from(i < n_samples % k)).collect()
}

fn run_shard<S: Scalar>(
    decoder: &Decoder,
    channel: &PauliChannel<S>,
    seed: RngSeed,
    n: u64,
) -> Result<Counts> {
    let sampler = ErrorSampler::new(channel);
    let mut rng = seed.rng();
    let mut err = ErrorPattern::identity(decoder.code().n_qubits());
    let mut counts = Counts::default();
    for _ in 0..n {
        sampler.sample_into(&mut rng, &mut err);
        counts += classify(decoder, err.component(decoder.corrected_type()))?;
    }
    Ok(counts)
}

/// Samples `n_samples` i.i.d. errors from `channel`, decodes them, discards
/// logical residuals and tallies the readout sign. Shards draw from
/// independent streams keyed by `(seed, shard_index)` and are merged by
/// integer addition, so the result depends only on `(seed, shard_count)`.
pub fn fqz_monte_carlo<T: Real, S: Scalar>(
    decoder: &Decoder,
    channel: &PauliChannel<S>,
    n_samples: u64,
    seed: u64,
    shard_count: usize,
) -> Result<QfiEstimate<T>> {
    let seeds = (0..shard_count).map(|i| RngSeed::new(seed, i, shard_count)).collect::<Result<Vec<_>>>()?;
    let sizes = shard_sizes(n_samples, shard_count);
    let per_shard = seeds
        .into_par_iter()
        .zip(sizes)
        .map(|(s, n)| run_shard(decoder, channel, s, n))
        .collect::<Result<Vec<_>>>()?;
    let mut total = Counts::default();
    for c in per_shard {
        total += c;
    }
    QfiEstimate::from_counts(decoder.code().n_imprinters(), total, n_samples)
}

/// `4 (1 - 2 c p^delta)^{2 n_z} n_z^2`.
pub fn fqz_model<T: Real>(c: T, delta: T, p: T, n_z: usize) -> Result<T> {
    check_probability(&p, T::one())?;
    let p_eff = c * p.powf(delta);
    if !(p_eff >= T::zero() && p_eff <= T::lit(0.5)) {
        return Err(Error::OutOfRange(format!("effective flip probability {p_eff:?}")));
    }
    let n = T::from_count(n_z);
    let d = (T::one() - T::lit(2.0) * p_eff).powi(n_z as i32);
    Ok(T::lit(4.0) * d * d * n * n)
}

/// Contrast of the model, `(1 - 2 c p^delta)^{n_z}`.
pub fn model_contrast<T: Real>(c: T, delta: T, p: T, n_z: usize) -> T {
    (T::one() - T::lit(2.0) * c * p.powf(delta)).powi(n_z as i32)
}

/// Default window of flip probabilities used by [`fit_delta`].
pub const DEFAULT_FIT_WINDOW: (f64, f64) = (0.01, 0.1);

/// One contrast measurement at flip probability `p` on a code with `n_z`
/// imprinter stabilizers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContrastPoint<T> {
    pub p: T,
    pub n_z: usize,
    pub contrast_d: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaFit<T> {
    pub c: T,
    pub delta: T,
    pub fit_window: (T, T),
    /// Euclidean norm of the residuals of the log-log line.
    pub residual_norm: T,
    pub sizes_used: Vec<usize>,
    pub n_points: usize,
}

/// Effective flip probability from `D = (1 - 2 p_eff)^{n_z}`.
pub fn effective_flip<T: Real>(contrast_d: T, n_z: usize) -> T {
    (T::one() - contrast_d.powf(T::one() / T::from_count(n_z))) / T::lit(2.0)
}

/// Least-squares fit of `ln p_eff = ln c + delta ln p` over points inside
/// `window` with `0 < D < 1`.
pub fn fit_delta<T: Real>(series: &[ContrastPoint<T>], window: (T, T)) -> Result<DeltaFit<T>> {
    let used: Vec<(T, T, usize)> = series
        .iter()
        .filter(|pt| pt.p >= window.0 && pt.p <= window.1 && pt.p > T::zero())
        .filter(|pt| pt.contrast_d > T::zero() && pt.contrast_d < T::one() && pt.n_z > 0)
        .map(|pt| (pt.p.ln(), effective_flip(pt.contrast_d, pt.n_z), pt.n_z))
        .filter(|(_, pe, _)| *pe > T::zero())
        .map(|(lp, pe, n)| (lp, pe.ln(), n))
        .collect();
    let mut distinct: Vec<T> = used.iter().map(|u| u.0).collect();
    distinct.sort_by(|a, b| a.partial_cmp(b).unwrap());
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InsufficientData(format!("{} distinct p in window, need 3", distinct.len())));
    }
    let k = T::from_count(used.len());
    let mean_x = used.iter().fold(T::zero(), |a, u| a + u.0) / k;
    let mean_y = used.iter().fold(T::zero(), |a, u| a + u.1) / k;
    let sxx = used.iter().fold(T::zero(), |a, u| a + (u.0 - mean_x) * (u.0 - mean_x));
    let sxy = used.iter().fold(T::zero(), |a, u| a + (u.0 - mean_x) * (u.1 - mean_y));
    if sxx <= T::zero() {
        return Err(Error::DegenerateFit("no spread in ln p".into()));
    }
    let delta = sxy / sxx;
    let intercept = mean_y - delta * mean_x;
    if !(delta > T::zero()) || !intercept.is_finite() {
        return Err(Error::DegenerateFit(format!("slope {delta:?}")));
    }
    let residual_norm = used
        .iter()
        .fold(T::zero(), |a, u| {
            let r = u.1 - intercept - delta * u.0;
            a + r * r
        })
        .sqrt();
    let mut sizes_used: Vec<usize> = used.iter().map(|u| u.2).collect();
    sizes_used.sort_unstable();
    sizes_used.dedup();
    Ok(DeltaFit {
        c: intercept.exp(),
        delta,
        fit_window: window,
        residual_norm,
        sizes_used,
        n_points: used.len(),
    })
}

/// Phase and imprinter count of a probe run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseParams<T> {
    pub theta: T,
    pub n_imprinters: usize,
}

impl<T: Real> PhaseParams<T> {
    pub fn for_code(code: &StabilizerGroup, theta: T) -> Self {
        Self { theta, n_imprinters: code.n_imprinters() }
    }

    pub fn expectation_tx(&self, contrast_d: T) -> T {
        expectation_tx(contrast_d, self.n_imprinters, self.theta)
    }

    pub fn propagated_error(&self, contrast_d: T) -> Result<T> {
        propagated_error(contrast_d, self.n_imprinters, self.theta)
    }
}

/// `<T_X>_theta = D cos(2 n_z theta)`.
pub fn expectation_tx<T: Real>(contrast_d: T, n_z: usize, theta: T) -> T {
    contrast_d * (T::lit(2.0) * T::from_count(n_z) * theta).cos()
}

/// `d<T_X>/dtheta = -2 n_z D sin(2 n_z theta)`.
pub fn expectation_tx_derivative<T: Real>(contrast_d: T, n_z: usize, theta: T) -> T {
    let two_n = T::lit(2.0) * T::from_count(n_z);
    -two_n * contrast_d * (two_n * theta).sin()
}

/// Error-propagation sensitivity `|d<T_X>/dtheta|^2 / (1 - <T_X>^2)`, using
/// `T_X^2 = 1`.
pub fn propagated_error<T: Real>(contrast_d: T, n_z: usize, theta: T) -> Result<T> {
    if contrast_d.abs() > T::one() {
        return Err(Error::OutOfRange(format!("contrast {contrast_d:?}")));
    }
    let slope = expectation_tx_derivative(contrast_d, n_z, theta);
    let mean = expectation_tx(contrast_d, n_z, theta);
    let variance = T::one() - mean * mean;
    if variance <= T::zero() {
        return Err(Error::SingularPoint(format!("zero variance at theta = {theta:?}")));
    }
    Ok(slope * slope / variance)
}

/// Contrasts under a full Pauli channel and under dephasing with the same
/// marginal flip probability `p_y + p_z`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem1Comparison<T> {
    pub contrast_pauli: T,
    pub contrast_dephasing: T,
    pub stderr_pauli: T,
    pub stderr_dephasing: T,
    /// `(D_pauli - D_dephasing) / sqrt(se_pauli^2 + se_dephasing^2)`; zero
    /// when both contrasts are equal and noiseless.
    pub z_score: T,
    pub exact: bool,
}

fn require_z_imprinter(code: &StabilizerGroup) -> Result<()> {
    if code.imprinter_sector() != crate::codes::Sector::Z {
        return Err(Error::UnsupportedSector(format!(
            "{:?} imprinter; comparison is for Z imprinters",
            code.imprinter_sector()
        )));
    }
    Ok(())
}

/// Paired Monte Carlo comparison: both runs share `(seed, shard_count)`.
pub fn theorem1_compare<T: Real, S: Scalar>(
    decoder: &Decoder,
    channel: &PauliChannel<S>,
    n_samples: u64,
    seed: u64,
    shard_count: usize,
) -> Result<Theorem1Comparison<T>> {
    require_z_imprinter(decoder.code())?;
    let dephasing = PauliChannel::dephasing(channel.py.clone() + channel.pz.clone())?;
    let a: QfiEstimate<T> = fqz_monte_carlo(decoder, channel, n_samples, seed, shard_count)?;
    let b: QfiEstimate<T> = fqz_monte_carlo(decoder, &dephasing, n_samples, seed, shard_count)?;
    let (se_a, se_b) = (a.contrast_stderr(), b.contrast_stderr());
    let pooled = (se_a * se_a + se_b * se_b).sqrt();
    let diff = a.contrast_d - b.contrast_d;
    let z_score = if pooled > T::zero() {
        diff / pooled
    } else if diff == T::zero() {
        T::zero()
    } else {
        diff.signum() * T::infinity()
    };
    Ok(Theorem1Comparison {
        contrast_pauli: a.contrast_d,
        contrast_dephasing: b.contrast_d,
        stderr_pauli: se_a,
        stderr_dephasing: se_b,
        z_score,
        exact: false,
    })
}

/// Exact contrasts from all `4^n` Pauli patterns and all `2^n` dephasing
/// patterns. Only the Z component reaches the decoder, so each Z mask is
/// decoded once and its class weighted by how many X/Y/Z/identity factors
/// produce it.
pub fn theorem1_exhaustive<S: Scalar>(decoder: &Decoder, channel: &PauliChannel<S>) -> Result<(S, S)> {
    require_z_imprinter(decoder.code())?;
    let n = decoder.code().n_qubits();
    if n > PAULI_ENUMERATION_LIMIT {
        return Err(Error::TooLarge { n, limit: PAULI_ENUMERATION_LIMIT });
    }
    let classes = classify_all(decoder)?;
    // tally[(nx, ny, nz)] with nx + ny + nz <= n, flattened
    let idx = |a: usize, b: usize, c: usize| (a * (n + 1) + b) * (n + 1) + c;
    let size = (n + 1) * (n + 1) * (n + 1);
    let tally = (0u64..1 << n)
        .into_par_iter()
        .fold(
            || vec![Counts::default(); size],
            |mut acc, x| {
                for (z, c) in classes.iter().enumerate() {
                    let z = z as u64;
                    let ny = (x & z).count_ones() as usize;
                    let nx = (x & !z).count_ones() as usize;
                    let nz = (z & !x).count_ones() as usize;
                    acc[idx(nx, ny, nz)] += *c;
                }
                acc
            },
        )
        .reduce(
            || vec![Counts::default(); size],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let px = power_table(&channel.px, n);
    let py = power_table(&channel.py, n);
    let pz = power_table(&channel.pz, n);
    let pi = power_table(&channel.identity_prob(), n);
    let (mut plus, mut minus) = (S::zero(), S::zero());
    for a in 0..=n {
        for b in 0..=n - a {
            for c in 0..=n - a - b {
                let t = tally[idx(a, b, c)];
                if t.plus == 0 && t.minus == 0 {
                    continue;
                }
                let w = px[a].clone() * py[b].clone() * pz[c].clone() * pi[n - a - b - c].clone();
                plus = plus + S::from_u64(t.plus).unwrap() * w.clone();
                minus = minus + S::from_u64(t.minus).unwrap() * w;
            }
        }
    }
    let kept = plus.clone() + minus.clone();
    if kept == S::zero() {
        return Err(Error::NoKeptSamples(0));
    }
    let pauli = (plus - minus) / kept;

    let mut tally = SignTally {
        n_qubits: n,
        n_imprinters: decoder.code().n_imprinters(),
        plus: vec![0; n + 1],
        minus: vec![0; n + 1],
        logical: vec![0; n + 1],
    };
    for (e, c) in classes.iter().enumerate() {
        let w = e.count_ones() as usize;
        tally.plus[w] += c.plus;
        tally.minus[w] += c.minus;
        tally.logical[w] += c.logical;
    }
    let dephasing = tally.contrast(&(channel.py.clone() + channel.pz.clone()))?;
    Ok((pauli, dephasing))
}
