//! i.i.d. single-qubit Pauli noise and reproducible shard seeding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codes::Sector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::support::Support;

/// Generator used for every Monte Carlo shard.
pub type ShardRng = ChaCha8Rng;

/// `rho -> (1-px-py-pz) rho + px X rho X + py Y rho Y + pz Z rho Z` on every qubit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliChannel<S> {
    pub px: S,
    pub py: S,
    pub pz: S,
}

impl<S: Scalar> PauliChannel<S> {
    pub fn new(px: S, py: S, pz: S) -> Result<Self> {
        let zero = S::zero();
        let one = S::one();
        for (name, p) in [("p_x", &px), ("p_y", &py), ("p_z", &pz)] {
            if !(*p >= zero && *p <= one) {
                return Err(Error::InvalidChannel(format!("{name} = {p:?} outside [0, 1]")));
            }
        }
        if px.clone() + py.clone() + pz.clone() > one {
            return Err(Error::InvalidChannel("p_x + p_y + p_z exceeds 1".into()));
        }
        Ok(Self { px, py, pz })
    }

    /// Pure noise of a single Pauli type.
    pub fn single(pauli: Sector, p: S) -> Result<Self> {
        match pauli {
            Sector::X => Self::new(p, S::zero(), S::zero()),
            Sector::Z => Self::new(S::zero(), S::zero(), p),
        }
    }

    pub fn dephasing(p: S) -> Result<Self> {
        Self::single(Sector::Z, p)
    }

    pub fn identity_prob(&self) -> S {
        S::one() - self.px.clone() - self.py.clone() - self.pz.clone()
    }

    /// Probability that a qubit carries a component anticommuting with
    /// Pauli type `pauli` (Y anticommutes with both X and Z).
    pub fn anticommuting_prob(&self, pauli: Sector) -> S {
        match pauli {
            Sector::X => self.py.clone() + self.pz.clone(),
            Sector::Z => self.px.clone() + self.py.clone(),
        }
    }

    /// The single-type channel that flips the same `pauli`-type component
    /// with the same marginal probability.
    pub fn projected(&self, pauli: Sector) -> Self {
        let p = self.anticommuting_prob(pauli.other());
        Self::single(pauli, p).expect("marginal of a valid channel is valid")
    }

    pub fn to_f64(&self) -> PauliChannel<f64> {
        PauliChannel { px: self.px.as_f64(), py: self.py.as_f64(), pz: self.pz.as_f64() }
    }
}

/// X and Z components of a Pauli error; Y sets both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ErrorPattern {
    pub x: Support,
    pub z: Support,
}

impl ErrorPattern {
    pub fn identity(n_qubits: usize) -> Self {
        Self { x: Support::zeros(n_qubits), z: Support::zeros(n_qubits) }
    }

    /// Error with only a `pauli`-type component.
    pub fn of_type(pauli: Sector, support: Support) -> Self {
        let zeros = Support::zeros(support.len());
        match pauli {
            Sector::X => Self { x: support, z: zeros },
            Sector::Z => Self { x: zeros, z: support },
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.x.len()
    }

    pub fn component(&self, pauli: Sector) -> &Support {
        match pauli {
            Sector::X => &self.x,
            Sector::Z => &self.z,
        }
    }
}

/// Inverse-CDF sampler: one uniform draw per qubit, X below `px`, Y below
/// `px + py`, Z below `px + py + pz`, identity otherwise.
#[derive(Debug, Clone, Copy)]
pub struct ErrorSampler {
    cut_x: f64,
    cut_y: f64,
    cut_z: f64,
}

impl ErrorSampler {
    pub fn new<S: Scalar>(channel: &PauliChannel<S>) -> Self {
        let c = channel.to_f64();
        Self { cut_x: c.px, cut_y: c.px + c.py, cut_z: c.px + c.py + c.pz }
    }

    /// Overwrites `out` with a fresh sample.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut ErrorPattern) {
        for q in 0..out.n_qubits() {
            let u: f64 = rng.gen();
            let (x, z) = if u < self.cut_x {
                (true, false)
            } else if u < self.cut_y {
                (true, true)
            } else if u < self.cut_z {
                (false, true)
            } else {
                (false, false)
            };
            out.x.set(q, x);
            out.z.set(q, z);
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n_qubits: usize) -> ErrorPattern {
        let mut out = ErrorPattern::identity(n_qubits);
        self.sample_into(rng, &mut out);
        out
    }
}

pub fn sample_error<S: Scalar, R: Rng + ?Sized>(
    channel: &PauliChannel<S>,
    n_qubits: usize,
    rng: &mut R,
) -> ErrorPattern {
    ErrorSampler::new(channel).sample(rng, n_qubits)
}

/// Base seed plus the shard a worker is responsible for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngSeed {
    pub seed: u64,
    pub shard_index: usize,
    pub shard_count: usize,
}

impl RngSeed {
    pub fn new(seed: u64, shard_index: usize, shard_count: usize) -> Result<Self> {
        if shard_count == 0 || shard_index >= shard_count {
            return Err(Error::OutOfRange(format!(
                "shard index {shard_index} not below shard count {shard_count}"
            )));
        }
        Ok(Self { seed, shard_index, shard_count })
    }

    pub fn rng(&self) -> ShardRng {
        ShardRng::seed_from_u64(derive_shard_seed(self))
    }
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output function (Stafford variant 13).
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-seed for a shard: the `(shard_index + 1)`-th SplitMix64 output of a
/// stream started at `seed`. Depends only on `(seed, shard_index)`, and
/// distinct shard indices map to distinct sub-seeds since `mix64` is a
/// bijection.
pub fn derive_shard_seed(seed: &RngSeed) -> u64 {
    let state = seed.seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(seed.shard_index as u64 + 1));
    mix64(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn noiseless_channel_gives_identity() {
        let ch = PauliChannel::new(0.0, 0.0, 0.0).unwrap();
        let mut rng = ShardRng::seed_from_u64(3);
        let e = sample_error(&ch, 50, &mut rng);
        assert!(e.x.is_zero() && e.z.is_zero());
    }

    #[test]
    fn certain_dephasing_flips_everything() {
        let ch = PauliChannel::dephasing(1.0).unwrap();
        let mut rng = ShardRng::seed_from_u64(3);
        let e = sample_error(&ch, 70, &mut rng);
        assert_eq!(e.z, Support::ones(70));
        assert!(e.x.is_zero());
    }

    #[test]
    fn invalid_channels() {
        assert!(matches!(PauliChannel::new(0.5, 0.4, 0.2), Err(Error::InvalidChannel(_))));
        assert!(matches!(PauliChannel::new(-0.1, 0.0, 0.0), Err(Error::InvalidChannel(_))));
        assert!(matches!(PauliChannel::new(f64::NAN, 0.0, 0.0), Err(Error::InvalidChannel(_))));
        assert!(PauliChannel::new(ratio(1, 2), ratio(1, 4), ratio(1, 4)).is_ok());
    }

    #[test]
    fn mean_dephasing_weight() {
        let ch = PauliChannel::dephasing(0.1).unwrap();
        let sampler = ErrorSampler::new(&ch);
        let mut rng = RngSeed::new(11, 0, 1).unwrap().rng();
        let samples = 100_000usize;
        let n = 1000usize;
        let mut e = ErrorPattern::identity(n);
        let mut total = 0usize;
        for _ in 0..samples {
            sampler.sample_into(&mut rng, &mut e);
            total += e.z.weight();
        }
        let mean = total as f64 / samples as f64;
        // std of the sample mean of Binomial(1000, 0.1)
        let sd = (n as f64 * 0.1 * 0.9 / samples as f64).sqrt();
        assert!((mean - 100.0).abs() < 5.0 * sd, "mean {mean}");
    }

    #[test]
    fn channel_marginals_chi_square() {
        let ch = PauliChannel::new(0.1, 0.05, 0.2).unwrap();
        let sampler = ErrorSampler::new(&ch);
        let mut rng = RngSeed::new(5, 0, 1).unwrap().rng();
        let mut counts = [0u64; 4];
        let trials = 100_000u64;
        for _ in 0..trials {
            let e = sampler.sample(&mut rng, 1);
            let idx = match (e.x.get(0), e.z.get(0)) {
                (false, false) => 0,
                (true, false) => 1,
                (true, true) => 2,
                (false, true) => 3,
            };
            counts[idx] += 1;
        }
        let probs = [0.65, 0.1, 0.05, 0.2];
        let chi2: f64 = counts
            .iter()
            .zip(probs)
            .map(|(&c, p)| {
                let expected = p * trials as f64;
                (c as f64 - expected).powi(2) / expected
            })
            .sum();
        // chi-square, 3 degrees of freedom, upper tail 1e-6
        assert!(chi2 < 30.6648, "chi2 = {chi2}");
    }

    #[test]
    fn shard_seed_ignores_shard_count() {
        let a = derive_shard_seed(&RngSeed::new(99, 0, 1).unwrap());
        let b = derive_shard_seed(&RngSeed::new(99, 0, 2).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn shard_seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> =
            (0..4).map(|i| derive_shard_seed(&RngSeed::new(7, i, 4).unwrap())).collect();
        assert_eq!(seeds.len(), 4);
    }

    #[test]
    fn shard_seed_golden_value() {
        // computed independently from the SplitMix64 definition
        assert_eq!(derive_shard_seed(&RngSeed::new(1, 1, 2).unwrap()), 0xBEEB_8DA1_658E_EC67);
    }

    #[test]
    fn invalid_shard() {
        assert!(RngSeed::new(1, 2, 2).is_err());
        assert!(RngSeed::new(1, 0, 0).is_err());
    }

    #[test]
    fn identical_seeds_give_identical_streams() {
        let ch = PauliChannel::new(0.1, 0.1, 0.1).unwrap();
        let s = RngSeed::new(42, 3, 8).unwrap();
        let a = sample_error(&ch, 64, &mut s.rng());
        let b = sample_error(&ch, 64, &mut s.rng());
        assert_eq!(a, b);
    }

    #[test]
    fn projected_channel_keeps_marginal() {
        let ch = PauliChannel::new(ratio(1, 20), ratio(1, 50), ratio(3, 100)).unwrap();
        let deph = ch.projected(Sector::Z);
        assert_eq!(deph.pz, ratio(1, 20));
        assert_eq!(deph.px, ratio(0, 1));
    }
}
