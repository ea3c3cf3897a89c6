//! Reference implementations used as oracles. Deliberately naive: they
//! enumerate or sort instead of sharing code with the library.
#![allow(dead_code)]

use std::path::PathBuf;

use climbrank::{AggregationMethod, Climber, Entry, RankTriple, RoundKind, RoundResult};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

/// All permutations of 1..=n in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<u32>> {
    fn go(prefix: &mut Vec<u32>, rest: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            prefix.push(v);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(i, v);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (1..=n as u32).collect(), &mut out);
    out
}

pub fn inversions(p: &[u32]) -> usize {
    let mut k = 0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                k += 1;
            }
        }
    }
    k
}

/// Sort-based competition ranking: walk the sorted order, and start a new
/// placement (equal to the position) whenever the score changes.
pub fn brute_placements(scores: &[u64]) -> Vec<u32> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by_key(|&i| scores[i]);
    let mut out = vec![0u32; scores.len()];
    let mut current = 0u32;
    for (pos, &i) in idx.iter().enumerate() {
        if pos == 0 || scores[i] != scores[idx[pos - 1]] {
            current = pos as u32 + 1;
        }
        out[i] = current;
    }
    out
}

pub fn products(s: &[u32], b: &[u32], l: &[u32]) -> Vec<u64> {
    (0..s.len())
        .map(|i| u64::from(s[i]) * u64::from(b[i]) * u64::from(l[i]))
        .collect()
}

pub fn round_from(s: &[u32], b: &[u32], l: &[u32]) -> RoundResult {
    let entries = (0..s.len())
        .map(|i| {
            Entry::new(
                Climber::new(format!("c{i}"), format!("C{i}")),
                RankTriple::new(s[i], b[i], l[i]),
            )
        })
        .collect();
    RoundResult::new(RoundKind::Final, entries, AggregationMethod::Product).unwrap()
}

/// Re-ranks `ranks` over everyone except `skip`, by sorting survivors.
pub fn rerank_without(ranks: &[u32], skip: usize) -> Vec<u32> {
    let mut kept: Vec<(u32, usize)> = ranks
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != skip)
        .map(|(i, &r)| (r, i))
        .collect();
    kept.sort();
    let mut out = vec![0u32; ranks.len()];
    let mut current = 0u32;
    for pos in 0..kept.len() {
        if pos == 0 || kept[pos].0 != kept[pos - 1].0 {
            current = pos as u32 + 1;
        }
        out[kept[pos].1] = current;
    }
    out
}

/// Survivor pairs (by original index) whose relative order flips when
/// `skip` is removed and the round rebuilt from scratch.
pub fn brute_reversals(s: &[u32], b: &[u32], l: &[u32], skip: usize) -> Vec<(usize, usize)> {
    let before = brute_placements(&products(s, b, l));
    let (s2, b2, l2) = (
        rerank_without(s, skip),
        rerank_without(b, skip),
        rerank_without(l, skip),
    );
    let after_scores: Vec<u64> = products(&s2, &b2, &l2);
    let survivors: Vec<usize> = (0..s.len()).filter(|&i| i != skip).collect();
    let after_sub = brute_placements(&survivors.iter().map(|&i| after_scores[i]).collect::<Vec<_>>());
    let mut out = Vec::new();
    for x in 0..survivors.len() {
        for y in x + 1..survivors.len() {
            let (i, j) = (survivors[x], survivors[y]);
            if before[i].cmp(&before[j]) != after_sub[x].cmp(&after_sub[y]) {
                out.push((i.min(j), i.max(j)));
            }
        }
    }
    out.sort();
    out
}

/// Exact P(first overall | condition) for a field of `n`, enumerating every
/// equally likely rank field. `shared` forces boulder == lead (tau = 1);
/// otherwise all three disciplines are independent (tau = 0). `weight`
/// gives the number of observations a climber contributes.
pub fn exhaustive_win_probability(n: usize, shared: bool, weight: impl Fn(u32, u32, u32) -> u32) -> f64 {
    let perms = permutations(n);
    let mut mass = 0.0;
    let mut obs = 0.0;
    for s in &perms {
        for b in &perms {
            let leads: Vec<&Vec<u32>> = if shared { vec![b] } else { perms.iter().collect() };
            for l in leads {
                let places = brute_placements(&products(s, b, l));
                let firsts = places.iter().filter(|&&p| p == 1).count() as f64;
                for i in 0..n {
                    let w = f64::from(weight(s[i], b[i], l[i]));
                    obs += w;
                    if places[i] == 1 {
                        mass += w / firsts;
                    }
                }
            }
        }
    }
    mass / obs
}
