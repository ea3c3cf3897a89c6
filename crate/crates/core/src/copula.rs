//! Correlated discipline ranks for simulated rounds.
//!
//! Every margin is a uniformly random permutation of `1..=n`. Speed is drawn
//! independently; boulder and lead come from a bivariate Gaussian copula
//! calibrated so that Kendall's tau between them hits the requested value.
//! Only the Gaussian family is provided. Another family would plug in by
//! replacing [`sample_gaussian_pairs`] with a sampler of the same shape.

use std::f64::consts::FRAC_PI_2;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Target Kendall tau between boulder and lead ranks. Speed is always
/// independent of both.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSpec {
    tau: f64,
}

impl CorrelationSpec {
    pub fn new(tau: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::Domain(format!("tau must lie in [0, 1], got {tau}")));
        }
        Ok(CorrelationSpec { tau })
    }

    pub fn independent() -> Self {
        CorrelationSpec { tau: 0.0 }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
}

/// Gaussian-copula correlation giving Kendall tau `tau`: rho = sin(pi * tau / 2).
pub fn tau_to_rho(tau: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::Domain(format!("tau must lie in [0, 1], got {tau}")));
    }
    Ok(match tau {
        // Exact endpoints rather than sin() rounding.
        0.0 => 0.0,
        1.0 => 1.0,
        t => (FRAC_PI_2 * t).sin(),
    })
}

/// Discipline ranks for one simulated round, aligned by climber index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankField {
    pub n: usize,
    pub speed: Vec<u32>,
    pub boulder: Vec<u32>,
    pub lead: Vec<u32>,
}

/// Draws `n` pairs from a standard bivariate normal with correlation `rho`.
pub fn sample_gaussian_pairs<R: Rng + ?Sized>(n: usize, rho: f64, rng: &mut R) -> Vec<(f64, f64)> {
    let resid = (1.0 - rho * rho).max(0.0).sqrt();
    (0..n)
        .map(|_| {
            let z1: f64 = rng.sample(StandardNormal);
            let e: f64 = rng.sample(StandardNormal);
            (z1, rho * z1 + resid * e)
        })
        .collect()
}

/// Rank 1 for the smallest value. Exact ties keep draw order.
pub fn rank_values(values: &[f64]) -> Vec<u32> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut ranks = vec![0u32; values.len()];
    for (pos, idx) in order.into_iter().enumerate() {
        ranks[idx] = pos as u32 + 1;
    }
    ranks
}

fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<u32> {
    let mut p: Vec<u32> = (1..=n as u32).collect();
    p.shuffle(rng);
    p
}

pub fn sample_rank_field<R: Rng + ?Sized>(n: usize, spec: CorrelationSpec, rng: &mut R) -> Result<RankField> {
    if n < 2 {
        return Err(Error::Domain(format!("field size must be at least 2, got {n}")));
    }
    let speed = random_permutation(n, rng);
    let (boulder, lead) = if spec.tau == 1.0 {
        let shared = random_permutation(n, rng);
        (shared.clone(), shared)
    } else {
        let rho = tau_to_rho(spec.tau)?;
        let pairs = sample_gaussian_pairs(n, rho, rng);
        let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        (rank_values(&xs), rank_values(&ys))
    };
    Ok(RankField {
        n,
        speed,
        boulder,
        lead,
    })
}
