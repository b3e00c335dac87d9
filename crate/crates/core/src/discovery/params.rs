use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DiscoveryError;
use crate::node::NodeId;

/// Inputs shared by the clustering and recovery algorithms.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AlgoParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    /// Replaces the formula size of the uniform sample `S`.
    pub sample_size_override: Option<usize>,
    /// Uses exactly this node sequence as `S` (takes precedence over sampling).
    pub fixed_sample: Option<Vec<NodeId>>,
    pub rng_seed: u64,
}

impl AlgoParams {
    pub fn new(alpha: f64, beta: f64, delta: f64, rng_seed: u64) -> Self {
        AlgoParams {
            alpha,
            beta,
            delta,
            sample_size_override: None,
            fixed_sample: None,
            rng_seed,
        }
    }

    pub fn with_sample_size(mut self, size: usize) -> Self {
        self.sample_size_override = Some(size);
        self
    }

    pub fn with_fixed_sample(mut self, sample: Vec<NodeId>) -> Self {
        self.fixed_sample = Some(sample);
        self
    }

    pub(crate) fn check_alpha(&self) -> Result<(), DiscoveryError> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(DiscoveryError::InvalidParams("alpha must lie in (0, 1]"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(DiscoveryError::InvalidParams("delta must lie in (0, 1)"));
        }
        Ok(())
    }

    pub(crate) fn check_alpha_beta(&self) -> Result<(), DiscoveryError> {
        self.check_alpha()?;
        if !(self.beta >= 0.0 && self.beta < self.alpha) {
            return Err(DiscoveryError::InvalidParams("beta must satisfy 0 <= beta < alpha"));
        }
        Ok(())
    }

    /// `S` for a run: the fixed sample if given, else `size` uniform draws
    /// with replacement (or the override size).
    pub(crate) fn draw_sample(&self, n: usize, formula_size: usize) -> Vec<NodeId> {
        if let Some(s) = &self.fixed_sample {
            return s.clone();
        }
        let size = self.sample_size_override.unwrap_or(formula_size);
        let mut rng = stream_rng(self.rng_seed, STREAM_SAMPLE);
        (0..size).map(|_| NodeId::from(rng.random_range(0..n))).collect()
    }
}

pub(crate) const STREAM_SAMPLE: u64 = 1;
pub(crate) const STREAM_ASSIGN: u64 = 2;
pub(crate) const STREAM_PI: u64 = 3;

pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn ceil_usize(x: f64) -> usize {
    if x <= 0.0 {
        0
    } else {
        libm::ceil(x) as usize
    }
}

/// `⌈4 ln(M/δ) / (α − β)²⌉`
pub fn alpha_beta_sample_size(m: usize, alpha: f64, beta: f64, delta: f64) -> usize {
    let gap = alpha - beta;
    ceil_usize(4.0 * libm::log(m as f64 / delta) / (gap * gap))
}

/// `⌈2 ln(M/δ) / α⌉`
pub fn alpha_sample_size(m: usize, alpha: f64, delta: f64) -> usize {
    ceil_usize(2.0 * libm::log(m as f64 / delta) / alpha)
}

/// `⌈2 ln(2M/δ) / α⌉`
pub fn alpha_general_sample_size(m: usize, alpha: f64, delta: f64) -> usize {
    ceil_usize(2.0 * libm::log(2.0 * m as f64 / delta) / alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_sizes_round_up() {
        // 4 ln(800) / 0.16 = 167.13
        assert_eq!(alpha_beta_sample_size(40, 0.6, 0.2, 0.05), 168);
        // 2 ln(800) / 0.6 = 22.28
        assert_eq!(alpha_sample_size(40, 0.6, 0.05), 23);
        // 2 ln(1600) / 0.6 = 24.59
        assert_eq!(alpha_general_sample_size(40, 0.6, 0.05), 25);
    }

    #[test]
    fn parameter_checks() {
        assert!(AlgoParams::new(0.6, 0.2, 0.05, 0).check_alpha_beta().is_ok());
        assert!(AlgoParams::new(0.2, 0.2, 0.05, 0).check_alpha_beta().is_err());
        assert!(AlgoParams::new(0.6, 0.0, 1.0, 0).check_alpha().is_err());
        assert!(AlgoParams::new(0.0, 0.0, 0.1, 0).check_alpha().is_err());
    }

    #[test]
    fn sampling_is_seeded() {
        let p = AlgoParams::new(0.6, 0.2, 0.05, 11).with_sample_size(5);
        assert_eq!(p.draw_sample(10, 99), p.draw_sample(10, 99));
        assert_eq!(p.draw_sample(10, 99).len(), 5);
        let fixed = p.clone().with_fixed_sample(alloc::vec![NodeId(3)]);
        assert_eq!(fixed.draw_sample(10, 99), [NodeId(3)]);
    }
}
