//! Scoring core: per-discipline ranking with tie-breaks, rank aggregation,
//! overall standings and advancement cuts.
//!
//! Ties never produce an invented winner. Tied competitors share the
//! minimum placement (standard competition ranking, "1-1-3") and the
//! result carries a tie flag.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Discipline {
    Speed,
    Boulder,
    Lead,
}

impl Discipline {
    /// Serialization order: speed, boulder, lead.
    pub const ALL: [Discipline; 3] = [Discipline::Speed, Discipline::Boulder, Discipline::Lead];

    pub fn as_str(self) -> &'static str {
        match self {
            Discipline::Speed => "speed",
            Discipline::Boulder => "boulder",
            Discipline::Lead => "lead",
        }
    }
}

impl fmt::Display for Discipline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedPerformance {
    /// Seconds. Ignored when `dnf` is set.
    pub time: f64,
    /// False start, fall or disqualification.
    pub dnf: bool,
}

impl SpeedPerformance {
    pub fn timed(time: f64) -> Self {
        SpeedPerformance { time, dnf: false }
    }

    pub fn dnf() -> Self {
        SpeedPerformance {
            time: f64::INFINITY,
            dnf: true,
        }
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if !self.dnf && !(self.time.is_finite() && self.time > 0.0) {
            return Err(format!("time must be positive and finite, got {}", self.time));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoulderPerformance {
    pub tops: u32,
    pub zones: u32,
    pub top_attempts: u32,
    pub zone_attempts: u32,
}

impl BoulderPerformance {
    fn validate(&self) -> std::result::Result<(), String> {
        if self.tops > self.zones {
            return Err(format!("tops ({}) exceed zones ({})", self.tops, self.zones));
        }
        if self.top_attempts < self.tops {
            return Err(format!(
                "top attempts ({}) fewer than tops ({})",
                self.top_attempts, self.tops
            ));
        }
        if self.zone_attempts < self.zones {
            return Err(format!(
                "zone attempts ({}) fewer than zones ({})",
                self.zone_attempts, self.zones
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadPerformance {
    pub highest_hold: u32,
    /// Elapsed seconds, used to split equal heights.
    pub time: f64,
}

impl LeadPerformance {
    fn validate(&self) -> std::result::Result<(), String> {
        if !(self.time.is_finite() && self.time > 0.0) {
            return Err(format!("time must be positive and finite, got {}", self.time));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "discipline", rename_all = "lowercase")]
pub enum Performance {
    Speed(SpeedPerformance),
    Boulder(BoulderPerformance),
    Lead(LeadPerformance),
}

impl Performance {
    pub fn discipline(&self) -> Discipline {
        match self {
            Performance::Speed(_) => Discipline::Speed,
            Performance::Boulder(_) => Discipline::Boulder,
            Performance::Lead(_) => Discipline::Lead,
        }
    }
}

/// A single comparison step in the bouldering tie-break chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoulderCriterion {
    MoreTops,
    MoreZones,
    FewerTopAttempts,
    FewerZoneAttempts,
}

impl BoulderCriterion {
    /// Tops, then zones, then attempts to top, then attempts to zone.
    pub const DEFAULT_ORDER: [BoulderCriterion; 4] = [
        BoulderCriterion::MoreTops,
        BoulderCriterion::MoreZones,
        BoulderCriterion::FewerTopAttempts,
        BoulderCriterion::FewerZoneAttempts,
    ];

    /// `Less` means `a` is the better performance.
    fn compare(self, a: &BoulderPerformance, b: &BoulderPerformance) -> Ordering {
        match self {
            BoulderCriterion::MoreTops => b.tops.cmp(&a.tops),
            BoulderCriterion::MoreZones => b.zones.cmp(&a.zones),
            BoulderCriterion::FewerTopAttempts => a.top_attempts.cmp(&b.top_attempts),
            BoulderCriterion::FewerZoneAttempts => a.zone_attempts.cmp(&b.zone_attempts),
        }
    }
}

/// Ranks for one discipline. `tied` is set when at least two competitors
/// could not be separated and share a rank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisciplineRanking {
    pub ranks: Vec<u32>,
    pub tied: bool,
}

/// Ranks a discipline with the default bouldering tie-break chain.
pub fn rank_discipline(performances: &[Performance], discipline: Discipline) -> Result<DisciplineRanking> {
    rank_discipline_with(performances, discipline, &BoulderCriterion::DEFAULT_ORDER)
}

pub fn rank_discipline_with(
    performances: &[Performance],
    discipline: Discipline,
    boulder_order: &[BoulderCriterion],
) -> Result<DisciplineRanking> {
    if performances.is_empty() {
        return Err(Error::Domain("cannot rank an empty field".into()));
    }
    for (index, perf) in performances.iter().enumerate() {
        let found = perf.discipline();
        if found != discipline {
            return Err(Error::MixedPerformances {
                expected: discipline,
                found,
                index,
            });
        }
        let checked = match perf {
            Performance::Speed(p) => p.validate(),
            Performance::Boulder(p) => p.validate(),
            Performance::Lead(p) => p.validate(),
        };
        checked.map_err(|reason| Error::InvalidPerformance {
            discipline,
            index,
            reason,
        })?;
    }

    let cmp = |a: &Performance, b: &Performance| -> Ordering {
        match (a, b) {
            (Performance::Speed(a), Performance::Speed(b)) => match (a.dnf, b.dnf) {
                (true, true) => Ordering::Equal,
                (true, false) => Ordering::Greater,
                (false, true) => Ordering::Less,
                (false, false) => a.time.total_cmp(&b.time),
            },
            (Performance::Boulder(a), Performance::Boulder(b)) => boulder_order
                .iter()
                .map(|c| c.compare(a, b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal),
            (Performance::Lead(a), Performance::Lead(b)) => b
                .highest_hold
                .cmp(&a.highest_hold)
                .then_with(|| a.time.total_cmp(&b.time)),
            _ => unreachable!("disciplines checked above"),
        }
    };
    let (ranks, tied) = competition_ranks(performances, cmp);
    Ok(DisciplineRanking { ranks, tied })
}

/// Standard competition ranking under `cmp` (`Less` = better): each item
/// gets one plus the number of strictly better items.
pub(crate) fn competition_ranks<T, F>(items: &[T], mut cmp: F) -> (Vec<u32>, bool)
where
    F: FnMut(&T, &T) -> Ordering,
{
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| cmp(&items[a], &items[b]));
    let mut ranks = vec![0u32; items.len()];
    let mut tied = false;
    for (pos, &idx) in order.iter().enumerate() {
        if pos > 0 && cmp(&items[order[pos - 1]], &items[idx]) == Ordering::Equal {
            ranks[idx] = ranks[order[pos - 1]];
            tied = true;
        } else {
            ranks[idx] = pos as u32 + 1;
        }
    }
    (ranks, tied)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Climber {
    pub id: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nationality: Option<String>,
}

impl Climber {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        Climber {
            id: id.into(),
            name: name.into(),
            nationality: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RankTriple {
    pub speed: u32,
    pub boulder: u32,
    pub lead: u32,
}

impl RankTriple {
    pub const fn new(speed: u32, boulder: u32, lead: u32) -> Self {
        RankTriple { speed, boulder, lead }
    }

    pub fn get(&self, discipline: Discipline) -> u32 {
        match discipline {
            Discipline::Speed => self.speed,
            Discipline::Boulder => self.boulder,
            Discipline::Lead => self.lead,
        }
    }

    pub fn set(&mut self, discipline: Discipline, rank: u32) {
        match discipline {
            Discipline::Speed => self.speed = rank,
            Discipline::Boulder => self.boulder = rank,
            Discipline::Lead => self.lead = rank,
        }
    }

    pub fn product(&self) -> u64 {
        u64::from(self.speed) * u64::from(self.boulder) * u64::from(self.lead)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregationMethod {
    /// Product of the three discipline ranks.
    #[default]
    Product,
    Sum,
    SumOfSquareRoots,
}

impl AggregationMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            AggregationMethod::Product => "product",
            AggregationMethod::Sum => "sum",
            AggregationMethod::SumOfSquareRoots => "sqrt-sum",
        }
    }
}

impl fmt::Display for AggregationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Combined score of one climber; lower is better for every method.
pub fn aggregate_score(ranks: RankTriple, method: AggregationMethod) -> f64 {
    match method {
        AggregationMethod::Product => ranks.product() as f64,
        AggregationMethod::Sum => f64::from(ranks.speed + ranks.boulder + ranks.lead),
        AggregationMethod::SumOfSquareRoots => {
            // Summing in sorted order makes the result bitwise symmetric in
            // the three components.
            let mut r = [ranks.speed, ranks.boulder, ranks.lead];
            r.sort_unstable();
            r.iter().map(|&x| f64::from(x).sqrt()).sum()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Standings {
    pub placements: Vec<u32>,
    pub tied: bool,
}

/// Placement 1 goes to the lowest score; equal scores share the minimum
/// placement.
pub fn overall_standings(scores: &[f64]) -> Result<Standings> {
    if scores.is_empty() {
        return Err(Error::Domain("no scores to rank".into()));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::Domain(format!("non-finite score {bad}")));
    }
    let (placements, tied) = competition_ranks(scores, |a, b| a.total_cmp(b));
    Ok(Standings { placements, tied })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoundKind {
    Qualification,
    Final,
}

impl RoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RoundKind::Qualification => "qualification",
            RoundKind::Final => "final",
        }
    }
}

/// Raw results behind a climber's ranks, when known.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RawPerformances {
    pub speed: Option<SpeedPerformance>,
    pub boulder: Option<BoulderPerformance>,
    pub lead: Option<LeadPerformance>,
}

impl RawPerformances {
    pub fn is_empty(&self) -> bool {
        self.speed.is_none() && self.boulder.is_none() && self.lead.is_none()
    }
}

/// Published total and placement carried through from a results sheet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OfficialResult {
    pub total: Option<u64>,
    pub place: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub climber: Climber,
    pub ranks: RankTriple,
    #[serde(default)]
    pub raw: RawPerformances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub official: Option<OfficialResult>,
}

impl Entry {
    pub fn new(climber: Climber, ranks: RankTriple) -> Self {
        Entry {
            climber,
            ranks,
            raw: RawPerformances::default(),
            official: None,
        }
    }
}

/// A scored round. Construction validates the ranks and computes scores and
/// placements, so a `RoundResult` is always internally consistent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundResult {
    kind: RoundKind,
    method: AggregationMethod,
    entries: Vec<Entry>,
    scores: Vec<f64>,
    placements: Vec<u32>,
    tied: bool,
}

impl RoundResult {
    pub fn new(kind: RoundKind, entries: Vec<Entry>, method: AggregationMethod) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::InvalidRound("round has no climbers".into()));
        }
        let mut seen = HashSet::with_capacity(n);
        for e in &entries {
            if !seen.insert(e.climber.id.as_str()) {
                return Err(Error::InvalidRound(format!("duplicate climber id {:?}", e.climber.id)));
            }
        }
        for d in Discipline::ALL {
            let ranks: Vec<u32> = entries.iter().map(|e| e.ranks.get(d)).collect();
            check_competition_ranking(&ranks)
                .map_err(|why| Error::InvalidRound(format!("{d} ranks invalid: {why}")))?;
        }
        let scores: Vec<f64> = entries.iter().map(|e| aggregate_score(e.ranks, method)).collect();
        let standings = match method {
            // Exact integer comparison for products.
            AggregationMethod::Product => {
                let products: Vec<u64> = entries.iter().map(|e| e.ranks.product()).collect();
                let (placements, tied) = competition_ranks(&products, |a, b| a.cmp(b));
                Standings { placements, tied }
            }
            _ => overall_standings(&scores)?,
        };
        Ok(RoundResult {
            kind,
            method,
            entries,
            scores,
            placements: standings.placements,
            tied: standings.tied,
        })
    }

    /// Ranks each discipline from raw performances, then scores the round.
    pub fn from_performances(
        kind: RoundKind,
        climbers: Vec<Climber>,
        raw: Vec<RawPerformances>,
        method: AggregationMethod,
    ) -> Result<Self> {
        if climbers.len() != raw.len() {
            return Err(Error::InvalidRound(format!(
                "{} climbers but {} performance records",
                climbers.len(),
                raw.len()
            )));
        }
        let mut triples = vec![RankTriple::new(0, 0, 0); climbers.len()];
        for d in Discipline::ALL {
            let perfs = raw
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    let p = match d {
                        Discipline::Speed => r.speed.map(Performance::Speed),
                        Discipline::Boulder => r.boulder.map(Performance::Boulder),
                        Discipline::Lead => r.lead.map(Performance::Lead),
                    };
                    p.ok_or_else(|| Error::InvalidRound(format!("climber {i} has no {d} performance")))
                })
                .collect::<Result<Vec<_>>>()?;
            let ranking = rank_discipline(&perfs, d)?;
            for (t, r) in triples.iter_mut().zip(ranking.ranks) {
                t.set(d, r);
            }
        }
        let entries = climbers
            .into_iter()
            .zip(triples)
            .zip(raw)
            .map(|((climber, ranks), raw)| Entry {
                climber,
                ranks,
                raw,
                official: None,
            })
            .collect();
        RoundResult::new(kind, entries, method)
    }

    /// Same entries scored with another aggregation method.
    pub fn rescored(&self, method: AggregationMethod) -> Result<Self> {
        RoundResult::new(self.kind, self.entries.clone(), method)
    }

    pub fn kind(&self) -> RoundKind {
        self.kind
    }

    pub fn method(&self) -> AggregationMethod {
        self.method
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn placements(&self) -> &[u32] {
        &self.placements
    }

    /// True when at least two climbers share an overall placement.
    pub fn has_ties(&self) -> bool {
        self.tied
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.climber.id == id)
    }

    /// Entry indices sorted by placement, then by input order.
    pub fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by_key(|&i| (self.placements[i], i));
        idx
    }
}

/// Ranks must satisfy rank = 1 + (number of strictly smaller ranks).
fn check_competition_ranking(ranks: &[u32]) -> std::result::Result<(), String> {
    let n = ranks.len();
    let mut counts = vec![0usize; n + 1];
    for &r in ranks {
        if r == 0 || r as usize > n {
            return Err(format!("rank {r} outside 1..={n}"));
        }
        counts[r as usize] += 1;
    }
    let mut below = 0;
    for r in 1..=n {
        if counts[r] > 0 && below + 1 != r {
            return Err(format!("rank {r} but {below} ranks are better"));
        }
        below += counts[r];
    }
    Ok(())
}

/// Climbers whose placement is within the cut.
pub fn advance_cut(round: &RoundResult, cut: usize) -> Result<Vec<Climber>> {
    let n = round.len();
    if cut > n {
        return Err(Error::Domain(format!("cut {cut} exceeds field size {n}")));
    }
    let placements = round.placements();
    // A tie group starting at placement p with k members occupies p..p+k-1.
    for p in placements.iter().copied().collect::<HashSet<_>>() {
        let group: Vec<usize> = (0..n).filter(|&i| placements[i] == p).collect();
        let first = p as usize;
        let last = first + group.len() - 1;
        if first <= cut && last > cut {
            let mut tied: Vec<String> = group.iter().map(|&i| round.entries()[i].climber.id.clone()).collect();
            tied.sort();
            return Err(Error::AmbiguousCut {
                cut,
                placement: p,
                tied,
            });
        }
    }
    Ok(round
        .order()
        .into_iter()
        .filter(|&i| placements[i] as usize <= cut)
        .map(|i| round.entries()[i].climber.clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn speed(t: f64) -> Performance {
        Performance::Speed(SpeedPerformance::timed(t))
    }

    fn boulder(tops: u32, zones: u32, ta: u32, za: u32) -> Performance {
        Performance::Boulder(BoulderPerformance {
            tops,
            zones,
            top_attempts: ta,
            zone_attempts: za,
        })
    }

    fn lead(hold: u32, time: f64) -> Performance {
        Performance::Lead(LeadPerformance {
            highest_hold: hold,
            time,
        })
    }

    fn round_from(triples: &[(u32, u32, u32)], method: AggregationMethod) -> RoundResult {
        let entries = triples
            .iter()
            .enumerate()
            .map(|(i, &(s, b, l))| {
                Entry::new(
                    Climber::new(format!("c{i}"), format!("Climber {i}")),
                    RankTriple::new(s, b, l),
                )
            })
            .collect();
        RoundResult::new(RoundKind::Qualification, entries, method).unwrap()
    }

    #[test]
    fn product_examples() {
        let p = AggregationMethod::Product;
        assert_eq!(aggregate_score(RankTriple::new(1, 20, 20), p), 400.0);
        assert_eq!(aggregate_score(RankTriple::new(10, 10, 10), p), 1000.0);
        assert_eq!(aggregate_score(RankTriple::new(1, 1, 1), p), 1.0);
        assert_eq!(
            aggregate_score(RankTriple::new(4, 9, 16), AggregationMethod::SumOfSquareRoots),
            9.0
        );
        assert_eq!(aggregate_score(RankTriple::new(4, 9, 16), AggregationMethod::Sum), 29.0);
    }

    #[test]
    fn sqrt_sum_is_bitwise_symmetric() {
        let m = AggregationMethod::SumOfSquareRoots;
        let a = aggregate_score(RankTriple::new(2, 3, 7), m);
        let b = aggregate_score(RankTriple::new(7, 2, 3), m);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn speed_ranks_by_time_with_dnf_last() {
        let r = rank_discipline(&[speed(7.5), speed(6.9), speed(8.1)], Discipline::Speed).unwrap();
        assert_eq!(r.ranks, vec![2, 1, 3]);
        assert!(!r.tied);

        let perfs = [
            Performance::Speed(SpeedPerformance::dnf()),
            speed(9.0),
            Performance::Speed(SpeedPerformance::dnf()),
        ];
        let r = rank_discipline(&perfs, Discipline::Speed).unwrap();
        assert_eq!(r.ranks, vec![2, 1, 2]);
        assert!(r.tied);
    }

    #[test]
    fn boulder_zones_break_equal_tops() {
        let r = rank_discipline(&[boulder(2, 3, 4, 5), boulder(2, 4, 4, 5)], Discipline::Boulder).unwrap();
        assert_eq!(r.ranks, vec![2, 1]);
    }

    #[test]
    fn boulder_attempts_break_remaining_ties() {
        let perfs = [
            boulder(2, 3, 5, 3),
            boulder(2, 3, 4, 6),
            boulder(2, 3, 4, 5),
            boulder(2, 3, 4, 5),
        ];
        let r = rank_discipline(&perfs, Discipline::Boulder).unwrap();
        assert_eq!(r.ranks, vec![4, 3, 1, 1]);
        assert!(r.tied);
    }

    #[test]
    fn boulder_order_is_configurable() {
        let perfs = [boulder(3, 3, 9, 9), boulder(2, 4, 2, 4)];
        assert_eq!(rank_discipline(&perfs, Discipline::Boulder).unwrap().ranks, vec![1, 2]);
        let zones_first = [BoulderCriterion::MoreZones, BoulderCriterion::MoreTops];
        let r = rank_discipline_with(&perfs, Discipline::Boulder, &zones_first).unwrap();
        assert_eq!(r.ranks, vec![2, 1]);
    }

    #[test]
    fn lead_time_breaks_equal_height() {
        let r = rank_discipline(&[lead(40, 300.0), lead(40, 250.0)], Discipline::Lead).unwrap();
        assert_eq!(r.ranks, vec![2, 1]);
        let r = rank_discipline(&[lead(12, 100.0), lead(40, 250.0), lead(39, 90.0)], Discipline::Lead).unwrap();
        assert_eq!(r.ranks, vec![3, 1, 2]);
    }

    #[test]
    fn rank_discipline_rejects_bad_input() {
        assert!(matches!(rank_discipline(&[], Discipline::Speed), Err(Error::Domain(_))));
        let mixed = [speed(7.0), lead(3, 10.0)];
        assert!(matches!(
            rank_discipline(&mixed, Discipline::Speed),
            Err(Error::MixedPerformances { index: 1, .. })
        ));
        assert!(matches!(
            rank_discipline(&[speed(-1.0)], Discipline::Speed),
            Err(Error::InvalidPerformance { .. })
        ));
        assert!(matches!(
            rank_discipline(&[boulder(3, 2, 3, 3)], Discipline::Boulder),
            Err(Error::InvalidPerformance { .. })
        ));
        assert!(matches!(
            rank_discipline(&[boulder(1, 2, 0, 3)], Discipline::Boulder),
            Err(Error::InvalidPerformance { .. })
        ));
        assert!(matches!(
            rank_discipline(&[lead(3, 0.0)], Discipline::Lead),
            Err(Error::InvalidPerformance { .. })
        ));
    }

    #[test]
    fn standings_examples() {
        let s = overall_standings(&[400.0, 1000.0, 6.0]).unwrap();
        assert_eq!(s.placements, vec![2, 3, 1]);
        assert!(!s.tied);
        let s = overall_standings(&[8.0, 8.0, 27.0]).unwrap();
        assert_eq!(s.placements, vec![1, 1, 3]);
        assert!(s.tied);
        assert!(overall_standings(&[1.0, f64::NAN]).is_err());
        assert!(overall_standings(&[f64::INFINITY]).is_err());
        assert!(overall_standings(&[]).is_err());
    }

    #[test]
    fn round_rejects_invalid_ranks() {
        let entries = vec![
            Entry::new(Climber::new("a", "A"), RankTriple::new(1, 1, 1)),
            Entry::new(Climber::new("b", "B"), RankTriple::new(3, 2, 2)),
        ];
        assert!(RoundResult::new(RoundKind::Final, entries, AggregationMethod::Product).is_err());

        let entries = vec![
            Entry::new(Climber::new("a", "A"), RankTriple::new(1, 1, 1)),
            Entry::new(Climber::new("a", "B"), RankTriple::new(2, 2, 2)),
        ];
        assert!(RoundResult::new(RoundKind::Final, entries, AggregationMethod::Product).is_err());
    }

    #[test]
    fn round_accepts_shared_discipline_ranks() {
        let r = round_from(&[(1, 1, 2), (1, 2, 1), (3, 3, 3)], AggregationMethod::Product);
        assert_eq!(r.placements(), &[1, 1, 3]);
        assert!(r.has_ties());
    }

    #[test]
    fn from_performances_matches_manual_ranks() {
        let climbers = (0..3).map(|i| Climber::new(format!("c{i}"), "x")).collect();
        let raw = vec![
            RawPerformances {
                speed: Some(SpeedPerformance::timed(7.5)),
                boulder: Some(BoulderPerformance {
                    tops: 2,
                    zones: 3,
                    top_attempts: 2,
                    zone_attempts: 3,
                }),
                lead: Some(LeadPerformance {
                    highest_hold: 30,
                    time: 200.0,
                }),
            },
            RawPerformances {
                speed: Some(SpeedPerformance::timed(6.9)),
                boulder: Some(BoulderPerformance {
                    tops: 1,
                    zones: 3,
                    top_attempts: 1,
                    zone_attempts: 3,
                }),
                lead: Some(LeadPerformance {
                    highest_hold: 20,
                    time: 200.0,
                }),
            },
            RawPerformances {
                speed: Some(SpeedPerformance::dnf()),
                boulder: Some(BoulderPerformance {
                    tops: 4,
                    zones: 4,
                    top_attempts: 4,
                    zone_attempts: 4,
                }),
                lead: Some(LeadPerformance {
                    highest_hold: 30,
                    time: 150.0,
                }),
            },
        ];
        let r = RoundResult::from_performances(RoundKind::Final, climbers, raw, AggregationMethod::Product).unwrap();
        let triples: Vec<_> = r.entries().iter().map(|e| e.ranks).collect();
        assert_eq!(
            triples,
            vec![
                RankTriple::new(2, 2, 2),
                RankTriple::new(1, 3, 3),
                RankTriple::new(3, 1, 1)
            ]
        );
        assert_eq!(r.scores(), &[8.0, 9.0, 3.0]);
        assert_eq!(r.placements(), &[2, 3, 1]);
    }

    #[test]
    fn cut_takes_lowest_products() {
        // 20 climbers on the diagonal: products are cubes, strictly increasing.
        let triples: Vec<_> = (1..=20).map(|r| (r, r, r)).collect();
        let round = round_from(&triples, AggregationMethod::Product);
        let adv = advance_cut(&round, 8).unwrap();
        let ids: Vec<_> = adv.iter().map(|c| c.id.as_str()).collect();
        assert_eq!(ids, vec!["c0", "c1", "c2", "c3", "c4", "c5", "c6", "c7"]);
    }

    #[test]
    fn cut_of_full_field_returns_everyone() {
        let triples: Vec<_> = (1..=8).map(|r| (r, 9 - r, r)).collect();
        let round = round_from(&triples, AggregationMethod::Product);
        assert_eq!(advance_cut(&round, 8).unwrap().len(), 8);
        assert!(advance_cut(&round, 9).is_err());
    }

    #[test]
    fn cut_refuses_boundary_tie() {
        let triples: Vec<_> = (0..5).map(|_| (1, 1, 1)).collect();
        let round = round_from(&triples, AggregationMethod::Product);
        match advance_cut(&round, 3) {
            Err(Error::AmbiguousCut { placement, tied, .. }) => {
                assert_eq!(placement, 1);
                assert_eq!(tied.len(), 5);
            }
            other => panic!("expected ambiguous cut, got {other:?}"),
        }
        // A tie entirely inside or outside the cut is fine.
        let round = round_from(&[(1, 1, 2), (1, 2, 1), (3, 3, 3)], AggregationMethod::Product);
        assert_eq!(advance_cut(&round, 2).unwrap().len(), 2);
        assert!(advance_cut(&round, 1).is_err());
    }
}
