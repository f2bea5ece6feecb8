//! Brute-force ground truth: the full functional graph of `a ↦ M a + t` on `(Z/N)^d`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::torus::{AffineTorusMap, TorsionCoset, TorsionVector, DEFAULT_POINT_BUDGET};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycle {
    /// Lexicographically least point on the cycle.
    pub representative: TorsionVector,
    pub length: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDynamicsSummary {
    pub level: u64,
    pub point_count: u64,
    pub periodic_points: Vec<(TorsionVector, u64)>,
    pub cycles: Vec<Cycle>,
    /// period → number of cycles
    pub cycle_count: BTreeMap<u64, u64>,
    /// distance to the periodic set → number of points
    pub tail_histogram: BTreeMap<u64, u64>,
}

struct Graph {
    d: usize,
    n: u64,
    m: Vec<Vec<u64>>,
    t: Vec<u64>,
}

impl Graph {
    fn new(phi: &AffineTorusMap, n: u64) -> Result<Self> {
        if !phi.is_torsion_translation() {
            return Err(Error::NonTorsionTranslation);
        }
        let big_n = BigInt::from(n);
        let reduce = |x: &BigInt| x.mod_floor(&big_n).to_u64().expect("below N");
        let d = phi.dim();
        let m = (0..d)
            .map(|i| phi.matrix().row(i).iter().map(reduce).collect())
            .collect();
        let torsion: Vec<_> = phi.translation().iter().map(|y| y.torsion().clone()).collect();
        let level = torsion.iter().fold(BigInt::from(1), |acc, x| acc.lcm(x.denom()));
        if !big_n.is_multiple_of(&level) {
            return Err(Error::LevelMismatch {
                translation: level.to_u64().ok_or(Error::LevelOverflow)?,
                level: n,
            });
        }
        let t = torsion
            .iter()
            .map(|x| reduce(&(x.numer() * (&big_n / x.denom()))))
            .collect();
        Ok(Graph { d, n, m, t })
    }

    fn coords(&self, mut idx: u64) -> Vec<u64> {
        let mut a = vec![0; self.d];
        for slot in a.iter_mut().rev() {
            *slot = idx % self.n;
            idx /= self.n;
        }
        a
    }

    fn step(&self, idx: u64) -> u64 {
        let a = self.coords(idx);
        let mut out = 0u64;
        for i in 0..self.d {
            let mut s = self.t[i] as u128;
            for j in 0..self.d {
                s += self.m[i][j] as u128 * a[j] as u128;
            }
            out = out * self.n + (s % self.n as u128) as u64;
        }
        out
    }

    fn point(&self, idx: u64) -> TorsionVector {
        TorsionVector::from_residues(self.coords(idx), self.n)
    }
}

const UNSET: u32 = u32::MAX;

pub fn oracle_enumerate(phi: &AffineTorusMap, n: u64) -> Result<FiniteDynamicsSummary> {
    oracle_enumerate_with_budget(phi, n, DEFAULT_POINT_BUDGET)
}

pub fn oracle_enumerate_with_budget(phi: &AffineTorusMap, n: u64, budget: u64) -> Result<FiniteDynamicsSummary> {
    if n == 0 {
        return Err(Error::Shape("level must be positive".into()));
    }
    let graph = Graph::new(phi, n)?;
    let points = (n as u128).checked_pow(graph.d as u32).unwrap_or(u128::MAX);
    if points > budget as u128 || points >= UNSET as u128 {
        return Err(Error::BudgetExceeded { points, budget });
    }
    let count = points as u64;

    let mut visited = vec![0u64; (count as usize).div_ceil(64)];
    let is_visited = |v: &[u64], i: u64| v[(i / 64) as usize] >> (i % 64) & 1 == 1;
    // period for points on a cycle, otherwise tail depth with the top bit set
    let mut info = vec![UNSET; count as usize];
    const TAIL: u32 = 1 << 31;

    let mut cycles = Vec::new();
    let mut path = Vec::new();
    for start in 0..count {
        if is_visited(&visited, start) {
            continue;
        }
        path.clear();
        let mut cur = start;
        while !is_visited(&visited, cur) {
            visited[(cur / 64) as usize] |= 1 << (cur % 64);
            path.push(cur);
            cur = graph.step(cur);
        }
        // `cur` is either on the current path (new cycle) or already classified
        let mut depth = if info[cur as usize] == UNSET {
            let pos = path.iter().position(|&x| x == cur).expect("on path");
            let cyc = &path[pos..];
            let len = cyc.len() as u32;
            for &x in cyc {
                info[x as usize] = len;
            }
            cycles.push((*cyc.iter().min().expect("nonempty"), len as u64));
            path.truncate(pos);
            0
        } else if info[cur as usize] & TAIL != 0 {
            info[cur as usize] & !TAIL
        } else {
            0
        };
        for &x in path.iter().rev() {
            depth += 1;
            info[x as usize] = TAIL | depth;
        }
    }

    let mut periodic_points = Vec::new();
    let mut tail_histogram = BTreeMap::new();
    for idx in 0..count {
        let v = info[idx as usize];
        if v & TAIL == 0 {
            periodic_points.push((graph.point(idx), v as u64));
            *tail_histogram.entry(0).or_insert(0) += 1;
        } else {
            *tail_histogram.entry((v & !TAIL) as u64).or_insert(0) += 1;
        }
    }
    cycles.sort_unstable();
    let mut cycle_count = BTreeMap::new();
    for &(_, len) in &cycles {
        *cycle_count.entry(len).or_insert(0) += 1;
    }
    Ok(FiniteDynamicsSummary {
        level: n,
        point_count: count,
        periodic_points,
        cycles: cycles
            .into_iter()
            .map(|(rep, length)| Cycle {
                representative: graph.point(rep),
                length,
            })
            .collect(),
        cycle_count,
        tail_histogram,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrappingOutcome {
    Trapped,
    Counterexample(TorsionVector),
}

/// Looks for a level-`N` periodic orbit that misses every coset in `avoid`.
pub fn oracle_check_trapping(phi: &AffineTorusMap, avoid: &[TorsionCoset], n: u64) -> Result<TrappingOutcome> {
    let summary = oracle_enumerate(phi, n)?;
    let graph = Graph::new(phi, n)?;
    for cycle in &summary.cycles {
        let start = graph_index(&graph, &cycle.representative);
        let mut cur = start;
        let mut hit = false;
        loop {
            if avoid.iter().any(|c| c.contains(&graph.point(cur))) {
                hit = true;
                break;
            }
            cur = graph.step(cur);
            if cur == start {
                break;
            }
        }
        if !hit {
            return Ok(TrappingOutcome::Counterexample(cycle.representative.clone()));
        }
    }
    Ok(TrappingOutcome::Trapped)
}

fn graph_index(graph: &Graph, x: &TorsionVector) -> u64 {
    x.numerators_at(graph.n)
        .expect("point at level N")
        .iter()
        .fold(0, |acc, &a| acc * graph.n + a)
}
