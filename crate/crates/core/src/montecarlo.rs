//! Replicated round simulation and the summaries drawn from it.
//!
//! Replicate `i` draws from ChaCha stream `i` under the master seed, so a
//! replicate set is identical however the work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::copula::{sample_rank_field, CorrelationSpec, RankField};
use crate::error::{Error, Result};
use crate::model::{aggregate_score, AggregationMethod, Climber, Entry, RankTriple, RoundKind, RoundResult};

pub const DEFAULT_REPLICATIONS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundSize {
    /// 20 climbers.
    Qualification,
    /// 8 climbers.
    Final,
    Custom(usize),
}

impl RoundSize {
    pub fn field_size(self) -> usize {
        match self {
            RoundSize::Qualification => 20,
            RoundSize::Final => 8,
            RoundSize::Custom(n) => n,
        }
    }

    pub fn kind(self) -> RoundKind {
        match self {
            RoundSize::Final => RoundKind::Final,
            _ => RoundKind::Qualification,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub round: RoundSize,
    pub spec: CorrelationSpec,
    pub replications: usize,
    pub master_seed: u64,
    pub method: AggregationMethod,
}

impl SimulationConfig {
    pub fn new(round: RoundSize, spec: CorrelationSpec, replications: usize, master_seed: u64) -> Self {
        SimulationConfig {
            round,
            spec,
            replications,
            master_seed,
            method: AggregationMethod::Product,
        }
    }

    pub fn with_method(mut self, method: AggregationMethod) -> Self {
        self.method = method;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Domain("replications must be at least 1".into()));
        }
        if self.round.field_size() < 2 {
            return Err(Error::Domain(format!(
                "field size must be at least 2, got {}",
                self.round.field_size()
            )));
        }
        Ok(())
    }
}

/// One simulated round. Climbers are identified by index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replicate {
    pub field: RankField,
    pub scores: Vec<f64>,
    pub placements: Vec<u32>,
}

impl Replicate {
    pub fn triple(&self, i: usize) -> RankTriple {
        RankTriple::new(self.field.speed[i], self.field.boulder[i], self.field.lead[i])
    }

    /// Number of climbers sharing placement `p`.
    pub fn tie_size(&self, p: u32) -> usize {
        self.placements.iter().filter(|&&q| q == p).count()
    }

    /// Full round view with synthetic climber ids `sim-<index>`.
    pub fn to_round_result(&self, kind: RoundKind, method: AggregationMethod) -> Result<RoundResult> {
        let entries = (0..self.field.n)
            .map(|i| {
                Entry::new(
                    Climber::new(format!("sim-{i}"), format!("Simulated {}", i + 1)),
                    self.triple(i),
                )
            })
            .collect();
        RoundResult::new(kind, entries, method)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicateSet {
    pub config: SimulationConfig,
    pub replicates: Vec<Replicate>,
}

impl ReplicateSet {
    pub fn n(&self) -> usize {
        self.config.round.field_size()
    }
}

fn simulate_one(config: &SimulationConfig, index: u64) -> Result<Replicate> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.master_seed);
    rng.set_stream(index);
    let field = sample_rank_field(config.round.field_size(), config.spec, &mut rng)?;
    let scores: Vec<f64> = (0..field.n)
        .map(|i| {
            aggregate_score(
                RankTriple::new(field.speed[i], field.boulder[i], field.lead[i]),
                config.method,
            )
        })
        .collect();
    // Every aggregator is computed identically for equal triples, so exact
    // float comparison is safe here.
    let placements = scores
        .iter()
        .map(|s| 1 + scores.iter().filter(|t| *t < s).count() as u32)
        .collect();
    Ok(Replicate {
        field,
        scores,
        placements,
    })
}

/// Runs `config.replications` independent replicates in parallel.
pub fn run_simulation(config: &SimulationConfig) -> Result<ReplicateSet> {
    config.validate()?;
    let replicates = (0..config.replications as u64)
        .into_par_iter()
        .map(|i| simulate_one(config, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ReplicateSet {
        config: *config,
        replicates,
    })
}

/// Which climbers in a replicate are conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    WonSpeed,
    WonBoulder,
    WonLead,
    /// First in bouldering or in lead, pooled per discipline.
    WonBoulderOrLead,
    WonAnyDiscipline,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::WonSpeed,
        Condition::WonBoulder,
        Condition::WonLead,
        Condition::WonBoulderOrLead,
        Condition::WonAnyDiscipline,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Condition::WonSpeed => "won_speed",
            Condition::WonBoulder => "won_boulder",
            Condition::WonLead => "won_lead",
            Condition::WonBoulderOrLead => "won_boulder_or_lead",
            Condition::WonAnyDiscipline => "won_any_discipline",
        }
    }

    pub fn holds(self, t: RankTriple) -> bool {
        self.weight(t) > 0
    }

    /// Number of observations a climber contributes. `WonBoulderOrLead`
    /// counts one per discipline won, so a climber first in both counts
    /// twice and the estimate is the average of the boulder-winner and
    /// lead-winner probabilities. `WonAnyDiscipline` counts each climber once.
    pub fn weight(self, t: RankTriple) -> u32 {
        match self {
            Condition::WonSpeed => u32::from(t.speed == 1),
            Condition::WonBoulder => u32::from(t.boulder == 1),
            Condition::WonLead => u32::from(t.lead == 1),
            Condition::WonBoulderOrLead => u32::from(t.boulder == 1) + u32::from(t.lead == 1),
            Condition::WonAnyDiscipline => u32::from(t.speed == 1 || t.boulder == 1 || t.lead == 1),
        }
    }
}

/// Splits one unit of mass for a climber at (shared) placement `p` evenly
/// over the positions its tie group occupies. Returns (position, weight).
fn placement_shares(rep: &Replicate, i: usize) -> impl Iterator<Item = (usize, f64)> {
    let p = rep.placements[i] as usize;
    let k = rep.tie_size(rep.placements[i]);
    let w = 1.0 / k as f64;
    (p..p + k).map(move |pos| (pos, w))
}

/// Placement mass per position and the number of observations.
/// Per-replicate work runs in parallel; the float sums are taken in
/// replicate order so the result does not depend on the thread count.
fn tally_distribution(set: &ReplicateSet, condition: Condition) -> (Vec<f64>, u64) {
    let per_replicate: Vec<(Vec<(usize, f64)>, u64)> = set
        .replicates
        .par_iter()
        .map(|rep| {
            let mut shares = Vec::new();
            let mut observations = 0u64;
            for i in 0..rep.field.n {
                let w = condition.weight(rep.triple(i));
                if w > 0 {
                    observations += u64::from(w);
                    shares.extend(placement_shares(rep, i).map(|(pos, s)| (pos - 1, s * f64::from(w))));
                }
            }
            (shares, observations)
        })
        .collect();
    let mut mass = vec![0.0f64; set.n()];
    let mut observations = 0u64;
    for (shares, obs) in per_replicate {
        observations += obs;
        for (pos, w) in shares {
            mass[pos] += w;
        }
    }
    (mass, observations)
}

/// Relative frequency, over the condition's observations, of finishing
/// first overall. A k-way tie for first counts 1/k.
pub fn conditional_win_probability(set: &ReplicateSet, condition: Condition) -> f64 {
    conditional_rank_distribution(set, condition).probabilities[0]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalTable {
    pub condition: Condition,
    /// `probabilities[k - 1]` = P(placement = k | condition).
    pub probabilities: Vec<f64>,
    /// `cumulative[k - 1]` = P(placement <= k | condition).
    pub cumulative: Vec<f64>,
    pub observations: u64,
}

impl ConditionalTable {
    pub fn at(&self, k: usize) -> f64 {
        self.probabilities[k - 1]
    }

    pub fn at_or_better(&self, k: usize) -> f64 {
        self.cumulative[k - 1]
    }
}

/// Distribution of the overall placement of climbers meeting `condition`.
/// Tied climbers spread their mass evenly over the positions they share.
pub fn conditional_rank_distribution(set: &ReplicateSet, condition: Condition) -> ConditionalTable {
    let (mass, observations) = tally_distribution(set, condition);
    let total = observations.max(1) as f64;
    let probabilities: Vec<f64> = mass.iter().map(|m| m / total).collect();
    let mut cumulative: Vec<f64> = probabilities
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(acc.min(1.0))
        })
        .collect();
    if observations > 0 {
        // Pin the last entry to exactly one rather than accumulate rounding.
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
    }
    ConditionalTable {
        condition,
        probabilities,
        cumulative,
        observations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScoreByPlacement {
    pub placement: usize,
    pub mean: f64,
    pub lower: f64,
    pub upper: f64,
    /// Number of (replicate, climber) scores averaged.
    pub count: usize,
}

/// Mean score of climbers holding each placement, with a normal-
/// approximation 95% interval (mean +/- 1.96 standard errors). Tied
/// climbers share the minimum placement, so a placement covered by a tie
/// above it gets no observation from that replicate. Placements never held
/// in any replicate are omitted.
pub fn expected_score_by_placement(set: &ReplicateSet) -> Vec<ScoreByPlacement> {
    let n = set.n();
    let mut sum = vec![0.0f64; n];
    let mut sum_sq = vec![0.0f64; n];
    let mut count = vec![0usize; n];
    for rep in &set.replicates {
        for (&p, &score) in rep.placements.iter().zip(&rep.scores) {
            let k = p as usize - 1;
            sum[k] += score;
            sum_sq[k] += score * score;
            count[k] += 1;
        }
    }
    (0..n)
        .filter(|&k| count[k] > 0)
        .map(|k| {
            let c = count[k] as f64;
            let mean = sum[k] / c;
            let half = if count[k] > 1 {
                let var = ((sum_sq[k] - c * mean * mean) / (c - 1.0)).max(0.0);
                1.96 * (var / c).sqrt()
            } else {
                0.0
            };
            ScoreByPlacement {
                placement: k + 1,
                mean,
                lower: mean - half,
                upper: mean + half,
                count: count[k],
            }
        })
        .collect()
}
