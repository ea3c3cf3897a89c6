//! Competition files: one header row, then one row per climber.
//!
//! ```text
//! id,name,nationality,speed_rank,boulder_rank,lead_rank,speed_time,boulder_tops,boulder_zones,
//! boulder_top_attempts,boulder_zone_attempts,lead_hold,lead_time,official_total,official_place
//! ```
//!
//! `id`, `name` and the three rank columns are required; every other
//! column may be absent or left empty. `speed_time` accepts `DNF`. When
//! `official_total` is given it must equal the product of the ranks.

use std::collections::HashSet;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{DataError, Result};
use crate::model::{
    AggregationMethod, BoulderPerformance, Climber, Discipline, Entry, LeadPerformance, OfficialResult, RankTriple,
    RawPerformances, RoundKind, RoundResult, SpeedPerformance,
};

pub const REQUIRED_COLUMNS: [&str; 5] = ["id", "name", "speed_rank", "boulder_rank", "lead_rank"];

pub const COLUMNS: [&str; 15] = [
    "id",
    "name",
    "nationality",
    "speed_rank",
    "boulder_rank",
    "lead_rank",
    "speed_time",
    "boulder_tops",
    "boulder_zones",
    "boulder_top_attempts",
    "boulder_zone_attempts",
    "lead_hold",
    "lead_time",
    "official_total",
    "official_place",
];

/// Field sizes up to this are read as finals when the round kind is not given.
pub const FINAL_MAX_FIELD: usize = 8;

/// One row of a competition file. JSON output uses the same field names.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CompetitionRow {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub nationality: Option<String>,
    pub speed_rank: u32,
    pub boulder_rank: u32,
    pub lead_rank: u32,
    #[serde(default)]
    pub speed_time: Option<String>,
    #[serde(default)]
    pub boulder_tops: Option<u32>,
    #[serde(default)]
    pub boulder_zones: Option<u32>,
    #[serde(default)]
    pub boulder_top_attempts: Option<u32>,
    #[serde(default)]
    pub boulder_zone_attempts: Option<u32>,
    #[serde(default)]
    pub lead_hold: Option<u32>,
    #[serde(default)]
    pub lead_time: Option<f64>,
    #[serde(default)]
    pub official_total: Option<u64>,
    #[serde(default)]
    pub official_place: Option<u32>,
}

impl CompetitionRow {
    fn into_entry(self, line: u64) -> std::result::Result<Entry, DataError> {
        let bad = |message: String| DataError::Malformed { line, message };
        if self.id.trim().is_empty() {
            return Err(bad("empty climber id".into()));
        }
        let speed = match self.speed_time.as_deref().map(str::trim) {
            None | Some("") => None,
            Some(t) if t.eq_ignore_ascii_case("dnf") => Some(SpeedPerformance::dnf()),
            Some(t) => {
                let time: f64 = t
                    .parse()
                    .map_err(|_| bad(format!("speed_time {t:?} is not a number or DNF")))?;
                if !(time.is_finite() && time > 0.0) {
                    return Err(bad(format!("speed_time must be positive, got {time}")));
                }
                Some(SpeedPerformance::timed(time))
            }
        };
        let boulder = match (
            self.boulder_tops,
            self.boulder_zones,
            self.boulder_top_attempts,
            self.boulder_zone_attempts,
        ) {
            (None, None, None, None) => None,
            (Some(tops), Some(zones), Some(top_attempts), Some(zone_attempts)) => {
                let p = BoulderPerformance {
                    tops,
                    zones,
                    top_attempts,
                    zone_attempts,
                };
                if tops > zones || top_attempts < tops || zone_attempts < zones {
                    return Err(bad(format!("inconsistent boulder result {p:?}")));
                }
                Some(p)
            }
            _ => return Err(bad("boulder columns must be all present or all empty".into())),
        };
        let lead = match (self.lead_hold, self.lead_time) {
            (None, None) => None,
            (Some(highest_hold), Some(time)) if time.is_finite() && time > 0.0 => {
                Some(LeadPerformance { highest_hold, time })
            }
            (Some(_), Some(time)) => return Err(bad(format!("lead_time must be positive, got {time}"))),
            _ => return Err(bad("lead_hold and lead_time must be given together".into())),
        };
        let ranks = RankTriple::new(self.speed_rank, self.boulder_rank, self.lead_rank);
        if let Some(official) = self.official_total {
            if official != ranks.product() {
                return Err(DataError::TotalMismatch {
                    line,
                    official,
                    computed: ranks.product(),
                });
            }
        }
        let official = match (self.official_total, self.official_place) {
            (None, None) => None,
            (total, place) => Some(OfficialResult { total, place }),
        };
        Ok(Entry {
            climber: Climber {
                id: self.id.trim().to_string(),
                name: self.name,
                nationality: self.nationality.filter(|s| !s.is_empty()),
            },
            ranks,
            raw: RawPerformances { speed, boulder, lead },
            official,
        })
    }

    pub fn from_entry(e: &Entry) -> Self {
        let speed_time = e
            .raw
            .speed
            .map(|s| if s.dnf { "DNF".to_string() } else { s.time.to_string() });
        CompetitionRow {
            id: e.climber.id.clone(),
            name: e.climber.name.clone(),
            nationality: e.climber.nationality.clone(),
            speed_rank: e.ranks.speed,
            boulder_rank: e.ranks.boulder,
            lead_rank: e.ranks.lead,
            speed_time,
            boulder_tops: e.raw.boulder.map(|b| b.tops),
            boulder_zones: e.raw.boulder.map(|b| b.zones),
            boulder_top_attempts: e.raw.boulder.map(|b| b.top_attempts),
            boulder_zone_attempts: e.raw.boulder.map(|b| b.zone_attempts),
            lead_hold: e.raw.lead.map(|l| l.highest_hold),
            lead_time: e.raw.lead.map(|l| l.time),
            official_total: e.official.and_then(|o| o.total),
            official_place: e.official.and_then(|o| o.place),
        }
    }
}

fn check_permutation(entries: &[Entry], d: Discipline) -> std::result::Result<(), DataError> {
    let n = entries.len();
    let mut seen = vec![false; n + 1];
    for e in entries {
        let r = e.ranks.get(d) as usize;
        if r == 0 || r > n {
            return Err(DataError::NonPermutation {
                discipline: d,
                n,
                detail: format!("climber {:?} has rank {r}", e.climber.id),
            });
        }
        if seen[r] {
            return Err(DataError::NonPermutation {
                discipline: d,
                n,
                detail: format!("rank {r} appears more than once"),
            });
        }
        seen[r] = true;
    }
    Ok(())
}

/// Reads and validates a competition file. `kind` defaults to a final for
/// fields of at most [`FINAL_MAX_FIELD`] climbers.
pub fn read_competition<R: Read>(reader: R, kind: Option<RoundKind>, method: AggregationMethod) -> Result<RoundResult> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| DataError::Io(e.to_string()))?.clone();
    if headers.iter().all(|h| h.is_empty()) {
        return Err(DataError::Empty.into());
    }
    for col in REQUIRED_COLUMNS {
        if !headers.iter().any(|h| h == col) {
            return Err(DataError::MissingColumn(col.to_string()).into());
        }
    }
    let mut entries = Vec::new();
    let mut ids = HashSet::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            DataError::Malformed {
                line,
                message: e.to_string(),
            }
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let row: CompetitionRow = record.deserialize(Some(&headers)).map_err(|e| DataError::Malformed {
            line,
            message: match e.kind() {
                csv::ErrorKind::Deserialize { err, .. } => {
                    let field = err.field().and_then(|i| headers.get(i as usize)).unwrap_or("?");
                    format!("column {field}: {}", err.kind())
                }
                _ => e.to_string(),
            },
        })?;
        let entry = row.into_entry(line)?;
        if !ids.insert(entry.climber.id.clone()) {
            return Err(DataError::DuplicateId {
                line,
                id: entry.climber.id,
            }
            .into());
        }
        entries.push(entry);
    }
    if entries.is_empty() {
        return Err(DataError::Empty.into());
    }
    for d in Discipline::ALL {
        check_permutation(&entries, d)?;
    }
    let kind = kind.unwrap_or(if entries.len() <= FINAL_MAX_FIELD {
        RoundKind::Final
    } else {
        RoundKind::Qualification
    });
    RoundResult::new(kind, entries, method)
}

/// Reads a competition file from disk, scoring it by rank product.
pub fn parse_competition_csv(path: impl AsRef<Path>) -> Result<RoundResult> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| DataError::Io(format!("{}: {e}", path.display())))?;
    read_competition(file, None, AggregationMethod::Product)
}

pub fn competition_rows(round: &RoundResult) -> Vec<CompetitionRow> {
    round.entries().iter().map(CompetitionRow::from_entry).collect()
}

/// Writes the round back in the input schema, all columns present.
pub fn write_competition_csv<W: Write>(round: &RoundResult, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in competition_rows(round) {
        w.serialize(row).map_err(|e| DataError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| DataError::Io(e.to_string()))?;
    Ok(())
}
