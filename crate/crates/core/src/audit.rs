//! Leave-one-climber-out re-scoring and independence-of-irrelevant-
//! alternatives (IIA) checks.
//!
//! Removing a climber compresses every discipline's ranks over the
//! survivors (order preserved, gaps closed), rescoring with the round's
//! aggregation method, and compares the survivors' new order with their
//! original relative order.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Discipline, Entry, RoundResult};
use crate::stats::{pair_counts, PairCounts};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankChange {
    pub id: String,
    /// Original placement among the survivors only.
    pub old_placement: u32,
    pub new_placement: u32,
}

impl RankChange {
    pub fn changed(&self) -> bool {
        self.old_placement != self.new_placement
    }
}

/// Where the excluded climber originally finished relative to a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExcludedPosition {
    AheadOfBoth,
    Between,
    BehindBoth,
}

/// Two survivors whose relative order differs after the exclusion. `ahead`
/// finished ahead of (or level with) `behind` originally.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairReversal {
    pub ahead: String,
    pub behind: String,
    pub excluded_position: ExcludedPosition,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExclusionResult {
    pub excluded_id: String,
    pub excluded_placement: u32,
    /// The rescored round over the survivors.
    pub new_round: RoundResult,
    /// Survivors in original order.
    pub rank_changes: Vec<RankChange>,
    pub reversals: Vec<PairReversal>,
    /// Kendall tau-b between restricted original and new placements.
    pub agreement_tau: f64,
}

impl ExclusionResult {
    pub fn is_perfect(&self) -> bool {
        self.reversals.is_empty()
    }

    pub fn new_placement_of(&self, id: &str) -> Option<u32> {
        self.rank_changes.iter().find(|c| c.id == id).map(|c| c.new_placement)
    }
}

/// Order-preserving compression of ranks to 1..=len, keeping shared ranks
/// shared.
fn compress_ranks(ranks: &[u32]) -> Vec<u32> {
    ranks
        .iter()
        .map(|r| 1 + ranks.iter().filter(|s| *s < r).count() as u32)
        .collect()
}

fn agreement(counts: &PairCounts) -> f64 {
    let n_x = counts.concordant + counts.discordant + counts.tied_y;
    let n_y = counts.concordant + counts.discordant + counts.tied_x;
    if n_x == 0 || n_y == 0 {
        // tau-b is undefined when one side is a single tie group.
        return if counts.discordant + counts.tied_x + counts.tied_y == 0 {
            1.0
        } else {
            0.0
        };
    }
    let s = counts.concordant as f64 - counts.discordant as f64;
    (s / ((n_x * n_y) as f64).sqrt()).clamp(-1.0, 1.0)
}

pub fn remove_and_rescore(round: &RoundResult, excluded: &str) -> Result<ExclusionResult> {
    let ex = round
        .index_of(excluded)
        .ok_or_else(|| Error::ClimberNotFound(excluded.to_string()))?;
    if round.len() < 2 {
        return Err(Error::Domain("cannot exclude the only climber".into()));
    }
    // Survivors in original finishing order; the rescored round keeps it.
    let survivors: Vec<usize> = round.order().into_iter().filter(|&i| i != ex).collect();

    let mut entries: Vec<Entry> = survivors.iter().map(|&i| round.entries()[i].clone()).collect();
    for d in Discipline::ALL {
        let ranks: Vec<u32> = entries.iter().map(|e| e.ranks.get(d)).collect();
        for (e, r) in entries.iter_mut().zip(compress_ranks(&ranks)) {
            e.ranks.set(d, r);
        }
    }
    for e in &mut entries {
        e.official = None;
    }
    let new_round = RoundResult::new(round.kind(), entries, round.method())?;

    let old: Vec<u32> = compress_ranks(&survivors.iter().map(|&i| round.placements()[i]).collect::<Vec<_>>());
    let new = new_round.placements().to_vec();

    let rank_changes = survivors
        .iter()
        .zip(old.iter().zip(&new))
        .map(|(&i, (&o, &n))| RankChange {
            id: round.entries()[i].climber.id.clone(),
            old_placement: o,
            new_placement: n,
        })
        .collect();

    let ex_place = round.placements()[ex];
    let mut reversals = Vec::new();
    for a in 0..survivors.len() {
        for b in a + 1..survivors.len() {
            if old[a].cmp(&old[b]) != new[a].cmp(&new[b]) {
                let (pa, pb) = (round.placements()[survivors[a]], round.placements()[survivors[b]]);
                let excluded_position = match (ex_place.cmp(&pa), ex_place.cmp(&pb)) {
                    (Ordering::Less, Ordering::Less) => ExcludedPosition::AheadOfBoth,
                    (Ordering::Greater, Ordering::Greater) => ExcludedPosition::BehindBoth,
                    _ => ExcludedPosition::Between,
                };
                reversals.push(PairReversal {
                    ahead: round.entries()[survivors[a]].climber.id.clone(),
                    behind: round.entries()[survivors[b]].climber.id.clone(),
                    excluded_position,
                });
            }
        }
    }

    let to_f = |v: &[u32]| v.iter().map(|&x| f64::from(x)).collect::<Vec<_>>();
    let counts = pair_counts(&to_f(&old), &to_f(&new));
    let agreement_tau = if reversals.is_empty() { 1.0 } else { agreement(&counts) };

    Ok(ExclusionResult {
        excluded_id: excluded.to_string(),
        excluded_placement: ex_place,
        new_round,
        rank_changes,
        reversals,
        agreement_tau,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IiaReport {
    /// One exclusion per climber, in original finishing order.
    pub exclusions: Vec<ExclusionResult>,
    pub perfect_agreements: usize,
}

impl IiaReport {
    pub fn violations(&self) -> impl Iterator<Item = &ExclusionResult> {
        self.exclusions.iter().filter(|e| !e.is_perfect())
    }

    pub fn taus(&self) -> Vec<f64> {
        self.exclusions.iter().map(|e| e.agreement_tau).collect()
    }
}

pub fn iia_audit(round: &RoundResult) -> Result<IiaReport> {
    let exclusions = round
        .order()
        .into_iter()
        .map(|i| remove_and_rescore(round, &round.entries()[i].climber.id))
        .collect::<Result<Vec<_>>>()?;
    let perfect_agreements = exclusions.iter().filter(|e| e.is_perfect()).count();
    Ok(IiaReport {
        exclusions,
        perfect_agreements,
    })
}
