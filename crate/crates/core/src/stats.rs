//! Kendall rank correlation: point estimate, exact permutation test and
//! percentile bootstrap intervals.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Below this size, tie-free data use the exact null distribution.
pub const EXACT_TEST_MAX_N: usize = 50;

pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 10_000;

/// Aligned observations (x_i, y_i).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedRanks {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl PairedRanks {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Domain(format!(
                "paired samples differ in length: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 2 {
            return Err(Error::Domain(format!("need at least 2 pairs, got {}", x.len())));
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Domain("paired samples must be finite".into()));
        }
        Ok(PairedRanks { x, y })
    }

    pub fn from_ranks(x: &[u32], y: &[u32]) -> Result<Self> {
        Self::new(
            x.iter().map(|&v| f64::from(v)).collect(),
            y.iter().map(|&v| f64::from(v)).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }
}

/// Pair classification counts over all n(n-1)/2 pairs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairCounts {
    pub concordant: u64,
    pub discordant: u64,
    /// Tied in x only.
    pub tied_x: u64,
    /// Tied in y only.
    pub tied_y: u64,
    pub tied_both: u64,
}

impl PairCounts {
    pub fn total(&self) -> u64 {
        self.concordant + self.discordant + self.tied_x + self.tied_y + self.tied_both
    }

    pub fn has_ties(&self) -> bool {
        self.tied_x + self.tied_y + self.tied_both > 0
    }
}

pub fn pair_counts(x: &[f64], y: &[f64]) -> PairCounts {
    let mut c = PairCounts::default();
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let dx = x[i] - x[j];
            let dy = y[i] - y[j];
            match (dx == 0.0, dy == 0.0) {
                (true, true) => c.tied_both += 1,
                (true, false) => c.tied_x += 1,
                (false, true) => c.tied_y += 1,
                (false, false) if (dx > 0.0) == (dy > 0.0) => c.concordant += 1,
                _ => c.discordant += 1,
            }
        }
    }
    c
}

fn tau_b(c: &PairCounts) -> Result<f64> {
    let n_x = c.concordant + c.discordant + c.tied_y;
    let n_y = c.concordant + c.discordant + c.tied_x;
    if n_x == 0 {
        return Err(Error::UndefinedCorrelation("x"));
    }
    if n_y == 0 {
        return Err(Error::UndefinedCorrelation("y"));
    }
    let s = c.concordant as f64 - c.discordant as f64;
    Ok((s / ((n_x * n_y) as f64).sqrt()).clamp(-1.0, 1.0))
}

/// Kendall's tau-b. Without ties this is (C - D) / (n(n-1)/2).
pub fn kendall_tau(data: &PairedRanks) -> Result<f64> {
    tau_b(&pair_counts(&data.x, &data.y))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KendallTestResult {
    pub tau: f64,
    /// Number of concordant pairs.
    pub statistic_t: u64,
    pub p_value: f64,
    /// False when the normal approximation was used.
    pub exact: bool,
}

/// Number of permutations of `n` items with exactly `k` inversions, for
/// k = 0..=n(n-1)/2 (the Mahonian numbers). Fails once counts overflow
/// `u128` (n > 33).
pub fn inversion_counts(n: usize) -> Result<Vec<u128>> {
    let mut dist = vec![1u128];
    for m in 2..=n {
        // Inserting item m adds between 0 and m-1 inversions.
        let mut next = vec![0u128; dist.len() + m - 1];
        let mut window: u128 = 0;
        for (k, slot) in next.iter_mut().enumerate() {
            if k < dist.len() {
                window = window
                    .checked_add(dist[k])
                    .ok_or_else(|| Error::Domain(format!("inversion counts overflow at n = {n}")))?;
            }
            if k >= m && k - m < dist.len() {
                window -= dist[k - m];
            }
            *slot = window;
        }
        dist = next;
    }
    Ok(dist)
}

/// Null distribution of the number of discordant (equivalently, concordant)
/// pairs under a uniformly random permutation, as probabilities.
pub fn inversion_distribution(n: usize) -> Vec<f64> {
    let mut dist = vec![1.0f64];
    for m in 2..=n {
        let mut next = vec![0.0f64; dist.len() + m - 1];
        let scale = 1.0 / m as f64;
        for (k, &p) in dist.iter().enumerate() {
            for slot in &mut next[k..k + m] {
                *slot += p * scale;
            }
        }
        dist = next;
    }
    dist
}

/// Two-sided exact p-value for `t` concordant pairs among `n` untied
/// observations: total null mass of all counts at least as far from the
/// null mean as `t`.
pub fn exact_p_value(n: usize, t: u64) -> f64 {
    let pairs = (n * n.saturating_sub(1) / 2) as i64;
    let observed = (2 * t as i64 - pairs).abs();
    let extreme = |k: usize| (2 * k as i64 - pairs).abs() >= observed;
    // Integer counts keep the tail mass exact while n! fits in u128.
    if let Ok(counts) = inversion_counts(n) {
        let total: u128 = counts.iter().sum();
        let tail: u128 = counts
            .iter()
            .enumerate()
            .filter(|(k, _)| extreme(*k))
            .map(|(_, &c)| c)
            .sum();
        return tail as f64 / total as f64;
    }
    let p: f64 = inversion_distribution(n)
        .iter()
        .enumerate()
        .filter(|(k, _)| extreme(*k))
        .map(|(_, &p)| p)
        .sum();
    p.min(1.0)
}

fn tie_group_sizes(v: &[f64]) -> Vec<u64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let mut out = Vec::new();
    let mut run = 1u64;
    for w in s.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            if run > 1 {
                out.push(run);
            }
            run = 1;
        }
    }
    if run > 1 {
        out.push(run);
    }
    out
}

/// Normal approximation to S = C - D with tie-corrected variance and a
/// continuity correction of 1.
fn normal_p_value(data: &PairedRanks, c: &PairCounts) -> f64 {
    let n = data.len() as f64;
    let tx = tie_group_sizes(&data.x);
    let ty = tie_group_sizes(&data.y);
    let sum = |g: &[u64], f: &dyn Fn(f64) -> f64| g.iter().map(|&t| f(t as f64)).sum::<f64>();
    let v0 = n * (n - 1.0) * (2.0 * n + 5.0);
    let vt = sum(&tx, &|t| t * (t - 1.0) * (2.0 * t + 5.0));
    let vu = sum(&ty, &|u| u * (u - 1.0) * (2.0 * u + 5.0));
    let v1 = sum(&tx, &|t| t * (t - 1.0)) * sum(&ty, &|u| u * (u - 1.0));
    let v2 = sum(&tx, &|t| t * (t - 1.0) * (t - 2.0)) * sum(&ty, &|u| u * (u - 1.0) * (u - 2.0));
    let mut var = (v0 - vt - vu) / 18.0 + v1 / (2.0 * n * (n - 1.0));
    if n > 2.0 {
        var += v2 / (9.0 * n * (n - 1.0) * (n - 2.0));
    }
    let s = c.concordant as f64 - c.discordant as f64;
    if var <= 0.0 {
        return 1.0;
    }
    let z = (s.abs() - 1.0).max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

/// Kendall test of independence. Exact for tie-free samples with
/// n < [`EXACT_TEST_MAX_N`], normal approximation otherwise.
pub fn kendall_exact_test(data: &PairedRanks) -> Result<KendallTestResult> {
    let c = pair_counts(&data.x, &data.y);
    let tau = tau_b(&c)?;
    let exact = !c.has_ties() && data.len() < EXACT_TEST_MAX_N;
    let p_value = if exact {
        exact_p_value(data.len(), c.concordant)
    } else {
        normal_p_value(data, &c)
    };
    Ok(KendallTestResult {
        tau,
        statistic_t: c.concordant,
        p_value,
        exact,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
    pub resamples: usize,
    pub seed: u64,
}

/// Linear-interpolation quantile of sorted data (type 7).
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile bootstrap interval for Kendall's tau. Resample `i` draws from
/// its own ChaCha stream `i` under `seed`, so results do not depend on
/// thread scheduling. Resamples whose tau is undefined are redrawn.
pub fn bootstrap_tau_ci(data: &PairedRanks, resamples: usize, level: f64, seed: u64) -> Result<BootstrapInterval> {
    let n = data.len();
    if n < 3 {
        return Err(Error::Domain(format!("bootstrap needs at least 3 pairs, got {n}")));
    }
    if resamples < 1000 {
        return Err(Error::Domain(format!(
            "bootstrap needs at least 1000 resamples, got {resamples}"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Domain(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    kendall_tau(data)?;

    let mut taus: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut xs = vec![0.0; n];
            let mut ys = vec![0.0; n];
            loop {
                for k in 0..n {
                    let j = rng.random_range(0..n);
                    xs[k] = data.x[j];
                    ys[k] = data.y[j];
                }
                if let Ok(t) = tau_b(&pair_counts(&xs, &ys)) {
                    return t;
                }
            }
        })
        .collect();
    taus.sort_by(|a, b| a.total_cmp(b));
    let alpha = (1.0 - level) / 2.0;
    Ok(BootstrapInterval {
        lower: quantile_sorted(&taus, alpha),
        upper: quantile_sorted(&taus, 1.0 - alpha),
        level,
        resamples,
        seed,
    })
}
