//! Exact overlap structure of named salient-position sets.

use std::collections::HashSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_SETS: usize = 16;

/// Up to 16 named index sets over positions `0..universe`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedSetFamily {
    pub names: Vec<String>,
    /// Sorted, deduplicated.
    pub sets: Vec<Vec<usize>>,
    pub universe: usize,
}

impl NamedSetFamily {
    pub fn new(names: Vec<String>, sets: Vec<Vec<usize>>, universe: usize) -> Result<Self> {
        if names.len() != sets.len() {
            return Err(Error::param(format!("{} names for {} sets", names.len(), sets.len())));
        }
        if names.is_empty() || names.len() > MAX_SETS {
            return Err(Error::param(format!("need 1 to {MAX_SETS} sets, got {}", names.len())));
        }
        let mut seen = HashSet::new();
        if let Some(dup) = names.iter().find(|n| !seen.insert(n.as_str())) {
            return Err(Error::param(format!("duplicate set name `{dup}`")));
        }
        let sets = sets
            .into_iter()
            .zip(&names)
            .map(|(mut s, name)| {
                s.sort_unstable();
                s.dedup();
                match s.last() {
                    Some(&max) if max >= universe => {
                        Err(Error::param(format!("set `{name}` holds index {max} >= universe {universe}")))
                    }
                    _ => Ok(s),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(NamedSetFamily { names, sets, universe })
    }

    pub fn k(&self) -> usize {
        self.names.len()
    }
}

/// Positions belonging to exactly the member sets of one combination.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    /// Member set names, in family order.
    pub sets: Vec<String>,
    pub mask: u32,
    pub count: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpsetData {
    pub names: Vec<String>,
    pub universe: usize,
    /// All 2^k - 1 combinations, ordered by bitmask.
    pub regions: Vec<Region>,
    pub totals: Vec<usize>,
    pub unique_counts: Vec<usize>,
    pub shared_all_count: usize,
    pub union_count: usize,
    pub unique_fractions: Vec<f64>,
    pub shared_all_fraction: f64,
    pub union_fraction: f64,
}

impl UpsetData {
    pub fn region(&self, names: &[&str]) -> Option<&Region> {
        let mut mask = 0u32;
        for n in names {
            let i = self.names.iter().position(|x| x == n)?;
            mask |= 1 << i;
        }
        self.regions.iter().find(|r| r.mask == mask)
    }

    /// One row per region: `sets,degree,count,percent`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sets,degree,count,percent\n");
        for r in &self.regions {
            let _ = writeln!(out, "{},{},{},{:.2}", r.sets.join("&"), r.sets.len(), r.count, 100.0 * r.fraction);
        }
        out
    }

    /// Region table restricted to families of at most three sets.
    pub fn to_venn_csv(&self) -> Result<String> {
        if self.names.len() > 3 {
            return Err(Error::param(format!("venn export needs at most 3 sets, got {}", self.names.len())));
        }
        let mut out = String::from("region,count,percent\n");
        for r in &self.regions {
            let _ = writeln!(out, "{},{},{:.2}", r.sets.join("&"), r.count, 100.0 * r.fraction);
        }
        Ok(out)
    }
}

/// Exclusive region cardinalities for every non-empty combination of sets.
pub fn intersection_counts(family: &NamedSetFamily) -> UpsetData {
    let k = family.k();
    let mut membership = vec![0u32; family.universe];
    for (i, s) in family.sets.iter().enumerate() {
        for &j in s {
            membership[j] |= 1 << i;
        }
    }
    let mut counts = vec![0usize; 1 << k];
    for m in membership {
        counts[m as usize] += 1;
    }
    let frac = |c: usize| if family.universe == 0 { 0.0 } else { c as f64 / family.universe as f64 };
    let regions: Vec<Region> = (1u32..(1 << k))
        .map(|mask| Region {
            sets: (0..k).filter(|i| mask >> i & 1 == 1).map(|i| family.names[i].clone()).collect(),
            mask,
            count: counts[mask as usize],
            fraction: frac(counts[mask as usize]),
        })
        .collect();
    let unique_counts: Vec<usize> = (0..k).map(|i| counts[1 << i]).collect();
    let shared_all_count = counts[(1 << k) - 1];
    let union_count = counts[1..].iter().sum();
    UpsetData {
        names: family.names.clone(),
        universe: family.universe,
        totals: family.sets.iter().map(Vec::len).collect(),
        unique_fractions: unique_counts.iter().map(|&c| frac(c)).collect(),
        unique_counts,
        shared_all_count,
        union_count,
        shared_all_fraction: frac(shared_all_count),
        union_fraction: frac(union_count),
        regions,
    }
}

fn intersection_size(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Pairwise |A ∩ B| / |A ∪ B|. Two empty sets score 0.
pub fn jaccard_matrix(family: &NamedSetFamily) -> Vec<Vec<f64>> {
    let k = family.k();
    let mut m = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in i..k {
            let inter = intersection_size(&family.sets[i], &family.sets[j]);
            let union = family.sets[i].len() + family.sets[j].len() - inter;
            let v = if union == 0 { 0.0 } else { inter as f64 / union as f64 };
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossLevelOverlap {
    pub overlap_count: usize,
    pub level0_size: usize,
    pub level2_size: usize,
    pub fraction_of_level2: f64,
    pub fraction_of_level0: f64,
}

/// Overlap between a level-0 (topic) set and a level-2 (persona) set.
pub fn cross_level_overlap(level0_set: &[usize], level2_set: &[usize], universe: usize) -> Result<CrossLevelOverlap> {
    let norm = |s: &[usize]| -> Result<Vec<usize>> {
        let mut v = s.to_vec();
        v.sort_unstable();
        v.dedup();
        if let Some(&m) = v.last() {
            if m >= universe {
                return Err(Error::param(format!("index {m} >= universe {universe}")));
            }
        }
        Ok(v)
    };
    let a = norm(level0_set)?;
    let b = norm(level2_set)?;
    let n = intersection_size(&a, &b);
    let frac = |d: usize| if d == 0 { 0.0 } else { n as f64 / d as f64 };
    Ok(CrossLevelOverlap {
        overlap_count: n,
        level0_size: a.len(),
        level2_size: b.len(),
        fraction_of_level2: frac(b.len()),
        fraction_of_level0: frac(a.len()),
    })
}

/// One Sankey flow between a level-0 and a level-2 set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SankeyLink {
    pub source: String,
    pub target: String,
    pub value: usize,
}

pub fn sankey_csv(links: &[SankeyLink]) -> String {
    let mut out = String::from("source,target,value\n");
    for l in links {
        let _ = writeln!(out, "{},{},{}", l.source, l.target, l.value);
    }
    out
}
