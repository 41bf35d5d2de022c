//! Hierarchical decomposition of dirty point sets into islands and
//! bi-islands, rank by rank.
//!
//! A rank-k island is a cluster of diameter at most alpha_k whose
//! beta_k-neighborhood contains no other dirty point (distances are
//! l-infinity). Cleaning removes islands rank by rank; what survives every
//! rank is the residual. A maximal component of the "distance <= beta"
//! linkage graph is beta-isolated by construction, so island candidates
//! are exactly those components.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;
use num_bigint::BigUint;

use crate::stream::{cell_hash, index_hash, unit_f64};
use crate::tile::{Frac, Region};

pub type Point = (i64, i64);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Island,
    BiIsland,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankParams {
    pub alpha: u32,
    pub beta: u32,
    /// Correction radius used by patchers; defaults to 2*alpha.
    pub gamma: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schedule {
    pub mode: Mode,
    pub levels: Vec<RankParams>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScheduleError {
    AlphaAboveBeta { rank: usize },
    GammaBelowAlpha { rank: usize },
}

impl fmt::Display for ScheduleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScheduleError::AlphaAboveBeta { rank } => write!(f, "alpha > beta at rank {rank}"),
            ScheduleError::GammaBelowAlpha { rank } => write!(f, "gamma < alpha at rank {rank}"),
        }
    }
}

impl Schedule {
    pub fn new(mode: Mode, levels: Vec<RankParams>) -> Result<Self, ScheduleError> {
        for (i, l) in levels.iter().enumerate() {
            if l.alpha > l.beta {
                return Err(ScheduleError::AlphaAboveBeta { rank: i + 1 });
            }
            if let Some(g) = l.gamma {
                if g < l.alpha {
                    return Err(ScheduleError::GammaBelowAlpha { rank: i + 1 });
                }
            }
        }
        Ok(Schedule { mode, levels })
    }

    /// The workhorse island schedule alpha = (1, 17, 289), beta = 2*alpha:
    /// each alpha_{n} is 8*(sum of earlier betas) + 1.
    pub fn geometric_island(ranks: u32) -> Self {
        let mut levels = Vec::new();
        let mut alpha = 1u64;
        let mut beta_sum = 0u64;
        for _ in 0..ranks {
            let beta = 2 * alpha;
            levels.push(RankParams { alpha: alpha as u32, beta: beta as u32, gamma: None });
            beta_sum += beta;
            alpha = 8 * beta_sum + 1;
        }
        Schedule { mode: Mode::Island, levels }
    }

    pub fn gamma(&self, rank: usize) -> u32 {
        let l = &self.levels[rank];
        l.gamma.unwrap_or(2 * l.alpha)
    }
}

/// Per-rank report of the schedule inequalities, in exact arithmetic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScheduleReport {
    /// alpha_k <= beta_k per rank.
    pub alpha_le_beta: Vec<bool>,
    /// 8 (island) or 12 (bi-island) times the sum of earlier betas is
    /// strictly below alpha_k.
    pub isolation: Vec<bool>,
    /// log beta_{k+1} / log beta_k stays strictly below 2 (island) or 3
    /// (bi-island): checked exactly as beta_{k+1} < beta_k^2 or beta_k^3.
    pub growth: Vec<bool>,
}

impl ScheduleReport {
    pub fn isolation_ok(&self) -> bool {
        self.alpha_le_beta.iter().all(|&b| b) && self.isolation.iter().all(|&b| b)
    }

    pub fn growth_ok(&self) -> bool {
        self.growth.iter().all(|&b| b)
    }
}

/// Validate a schedule given as exact (alpha_k, beta_k) pairs.
pub fn validate_schedule_big(mode: Mode, levels: &[(BigUint, BigUint)]) -> ScheduleReport {
    let factor = match mode {
        Mode::Island => 8u32,
        Mode::BiIsland => 12u32,
    };
    let growth_exp = match mode {
        Mode::Island => 2u32,
        Mode::BiIsland => 3u32,
    };
    let mut alpha_le_beta = Vec::new();
    let mut isolation = Vec::new();
    let mut beta_sum = BigUint::from(0u32);
    for (a, b) in levels {
        alpha_le_beta.push(a <= b);
        isolation.push(&beta_sum * factor < *a);
        beta_sum += b;
    }
    let growth = levels
        .windows(2)
        .map(|w| w[1].1 < w[0].1.pow(growth_exp))
        .collect();
    ScheduleReport { alpha_le_beta, isolation, growth }
}

pub fn validate_schedule(s: &Schedule) -> ScheduleReport {
    let levels: Vec<(BigUint, BigUint)> = s
        .levels
        .iter()
        .map(|l| (BigUint::from(l.alpha), BigUint::from(l.beta)))
        .collect();
    validate_schedule_big(s.mode, &levels)
}

/// How points near the window border are treated during cleaning.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryPolicy {
    /// The window is the whole universe: outside cells are clean. This is
    /// the right reading for generated sets.
    Closed,
    /// The window is a crop of an unknown larger set: components whose
    /// beta-context leaves the window are never classified.
    Windowed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirtySet {
    pub window: Region,
    pub points: BTreeSet<Point>,
    pub policy: BoundaryPolicy,
}

impl DirtySet {
    pub fn new(window: Region, points: BTreeSet<Point>, policy: BoundaryPolicy) -> Self {
        assert!(points.iter().all(|&(x, y)| window.contains(x, y)));
        DirtySet { window, points, policy }
    }

    pub fn closed(window: Region, points: impl IntoIterator<Item = Point>) -> Self {
        DirtySet::new(window, points.into_iter().collect(), BoundaryPolicy::Closed)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Bernoulli(eps) sample over a window; every cell is decided by a keyed
/// counter hash, so the set depends only on (eps, window, seed).
pub fn sample_bernoulli(eps: f64, window: Region, seed: u64) -> DirtySet {
    assert!((0.0..=1.0).contains(&eps));
    let mut pts = BTreeSet::new();
    for (x, y) in window.cells() {
        if unit_f64(cell_hash(seed, x, y)) < eps {
            pts.insert((x, y));
        }
    }
    DirtySet::new(window, pts, BoundaryPolicy::Closed)
}

fn linf(a: Point, b: Point) -> u64 {
    (a.0 - b.0).unsigned_abs().max((a.1 - b.1).unsigned_abs())
}

fn diameter(pts: &[Point]) -> u64 {
    if pts.is_empty() {
        return 0;
    }
    let (mut xmin, mut xmax, mut ymin, mut ymax) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
    for &(x, y) in pts {
        xmin = xmin.min(x);
        xmax = xmax.max(x);
        ymin = ymin.min(y);
        ymax = ymax.max(y);
    }
    ((xmax - xmin) as u64).max((ymax - ymin) as u64)
}

fn set_distance(a: &[Point], b: &[Point]) -> u64 {
    let mut best = u64::MAX;
    for &p in a {
        for &q in b {
            best = best.min(linf(p, q));
        }
    }
    best
}

/// An extracted island; bi-islands carry one witness split.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Island {
    pub points: Vec<Point>,
    /// For bi-islands: (X0, X1) with X1 possibly empty.
    pub split: Option<(Vec<Point>, Vec<Point>)>,
}

impl Island {
    pub fn anchor(&self) -> Point {
        self.points[0]
    }

    pub fn diameter(&self) -> u64 {
        diameter(&self.points)
    }
}

/// Result of one rank of cleaning.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankOutcome {
    pub islands: Vec<Island>,
    pub survivors: BTreeSet<Point>,
    /// Components whose bi-island split search exceeded the brute-force
    /// cap; they are left as survivors.
    pub oversize_components: usize,
}

/// Split a component into (X0, X1) with both diameters <= alpha and
/// distance <= beta, trying interval cuts along both axes first and exact
/// subset search for small components.
fn bi_split(pts: &[Point], alpha: u64, beta: u64) -> Option<(Vec<Point>, Vec<Point>)> {
    if diameter(pts) <= alpha {
        return Some((pts.to_vec(), Vec::new()));
    }
    for axis in 0..2 {
        let mut sorted = pts.to_vec();
        if axis == 0 {
            sorted.sort_by_key(|p| (p.0, p.1));
        } else {
            sorted.sort_by_key(|p| (p.1, p.0));
        }
        for cut in 1..sorted.len() {
            let (a, b) = sorted.split_at(cut);
            if diameter(a) <= alpha && diameter(b) <= alpha && set_distance(a, b) <= beta {
                return Some((a.to_vec(), b.to_vec()));
            }
        }
    }
    if pts.len() <= 16 {
        // Exact search; fix point 0 in X0 by symmetry.
        for mask in 0u32..(1 << (pts.len() - 1)) {
            let mut a = vec![pts[0]];
            let mut b = Vec::new();
            for (i, &p) in pts.iter().enumerate().skip(1) {
                if mask >> (i - 1) & 1 == 0 {
                    a.push(p);
                } else {
                    b.push(p);
                }
            }
            if b.is_empty() {
                continue;
            }
            if diameter(&a) <= alpha && diameter(&b) <= alpha && set_distance(&a, &b) <= beta {
                return Some((a, b));
            }
        }
    }
    None
}

/// Components of the distance-<=beta linkage graph on `points`.
fn linkage_components(points: &BTreeSet<Point>, beta: u64) -> Vec<Vec<Point>> {
    let mut rows: BTreeMap<i64, Vec<i64>> = BTreeMap::new();
    for &(x, y) in points {
        rows.entry(y).or_default().push(x);
    }
    for xs in rows.values_mut() {
        xs.sort_unstable();
    }
    let mut seen: BTreeSet<Point> = BTreeSet::new();
    let mut comps = Vec::new();
    let b = beta as i64;
    for &start in points.iter() {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = Vec::new();
        let mut stack = vec![start];
        seen.insert(start);
        while let Some((x, y)) = stack.pop() {
            comp.push((x, y));
            for (ny, xs) in rows.range(y - b..=y + b) {
                let lo = xs.partition_point(|&v| v < x - b);
                for &nx in &xs[lo..] {
                    if nx > x + b {
                        break;
                    }
                    let p = (nx, *ny);
                    if seen.insert(p) {
                        stack.push(p);
                    }
                }
            }
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps.sort();
    comps
}

fn touches_margin(pts: &[Point], beta: u64, window: Region) -> bool {
    let b = beta as i64;
    pts.iter().any(|&(x, y)| {
        x - b < window.x0
            || y - b < window.y0
            || x + b >= window.x0 + window.width as i64
            || y + b >= window.y0 + window.height as i64
    })
}

/// One rank of cleaning: extract all (alpha, beta)-islands (or bi-islands)
/// from the point set.
pub fn find_rank_islands(
    points: &BTreeSet<Point>,
    window: Region,
    policy: BoundaryPolicy,
    alpha: u32,
    beta: u32,
    mode: Mode,
) -> RankOutcome {
    assert!(alpha <= beta);
    let (alpha, beta) = (alpha as u64, beta as u64);
    let mut islands = Vec::new();
    let mut survivors = BTreeSet::new();
    let mut oversize = 0usize;
    for comp in linkage_components(points, beta) {
        if policy == BoundaryPolicy::Windowed && touches_margin(&comp, beta, window) {
            survivors.extend(comp);
            continue;
        }
        match mode {
            Mode::Island => {
                if diameter(&comp) <= alpha {
                    islands.push(Island { points: comp, split: None });
                } else {
                    survivors.extend(comp);
                }
            }
            Mode::BiIsland => {
                if diameter(&comp) > alpha && comp.len() > 16 && bi_axis_split_fails(&comp, alpha, beta)
                {
                    oversize += 1;
                    survivors.extend(comp);
                    continue;
                }
                match bi_split(&comp, alpha, beta) {
                    Some(split) => islands.push(Island { points: comp, split: Some(split) }),
                    None => survivors.extend(comp),
                }
            }
        }
    }
    RankOutcome { islands, survivors, oversize_components: oversize }
}

fn bi_axis_split_fails(pts: &[Point], alpha: u64, beta: u64) -> bool {
    // Re-runs only the cheap part of bi_split to decide whether the exact
    // subset search would be needed.
    for axis in 0..2 {
        let mut sorted = pts.to_vec();
        if axis == 0 {
            sorted.sort_by_key(|p| (p.0, p.1));
        } else {
            sorted.sort_by_key(|p| (p.1, p.0));
        }
        for cut in 1..sorted.len() {
            let (a, b) = sorted.split_at(cut);
            if diameter(a) <= alpha && diameter(b) <= alpha && set_distance(a, b) <= beta {
                return false;
            }
        }
    }
    true
}

/// Bit mask over a window's cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellMask {
    pub region: Region,
    bits: Vec<u64>,
}

impl CellMask {
    pub fn empty(region: Region) -> Self {
        let words = (region.area() as usize).div_ceil(64);
        CellMask { region, bits: vec![0; words] }
    }

    pub fn set(&mut self, x: i64, y: i64) {
        if self.region.contains(x, y) {
            let i = self.region.index(x, y);
            self.bits[i / 64] |= 1 << (i % 64);
        }
    }

    pub fn get(&self, x: i64, y: i64) -> bool {
        if !self.region.contains(x, y) {
            return false;
        }
        let i = self.region.index(x, y);
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn union_with(&mut self, other: &CellMask) {
        assert_eq!(self.region, other.region);
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn fill_square(&mut self, center: Point, radius: u64) {
        let r = radius as i64;
        for y in center.1 - r..=center.1 + r {
            for x in center.0 - r..=center.0 + r {
                self.set(x, y);
            }
        }
    }

    pub fn fraction(&self) -> Frac {
        Frac::new(self.count(), self.region.area())
    }
}

#[derive(Clone, Debug)]
pub struct RankDecomposition {
    pub params: RankParams,
    pub islands: Vec<Island>,
    /// Cells inside the beta_k-neighborhood of any removed rank-k island.
    pub affected: CellMask,
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub mode: Mode,
    pub window: Region,
    pub policy: BoundaryPolicy,
    pub ranks: Vec<RankDecomposition>,
    pub residual: BTreeSet<Point>,
    pub oversize_components: usize,
    /// |E_k| for k = 0..=ranks.
    pub survivors_per_rank: Vec<usize>,
}

impl Decomposition {
    pub fn fully_cleaned(&self) -> bool {
        self.residual.is_empty()
    }

    pub fn max_rank_used(&self) -> u32 {
        self.ranks
            .iter()
            .enumerate()
            .rev()
            .find(|(_, r)| !r.islands.is_empty())
            .map(|(i, _)| i as u32 + 1)
            .unwrap_or(0)
    }
}

/// Rank-by-rank cleaning of a dirty set.
pub fn clean(e: &DirtySet, sched: &Schedule) -> Decomposition {
    let mut current = e.points.clone();
    let mut ranks = Vec::new();
    let mut survivors_per_rank = vec![current.len()];
    let mut oversize = 0;
    for params in &sched.levels {
        let out = find_rank_islands(
            &current,
            e.window,
            e.policy,
            params.alpha,
            params.beta,
            sched.mode,
        );
        let mut affected = CellMask::empty(e.window);
        for isl in &out.islands {
            for &p in &isl.points {
                affected.fill_square(p, params.beta as u64);
            }
        }
        oversize += out.oversize_components;
        current = out.survivors.clone();
        survivors_per_rank.push(current.len());
        ranks.push(RankDecomposition { params: *params, islands: out.islands, affected });
    }
    let d = Decomposition {
        mode: sched.mode,
        window: e.window,
        policy: e.policy,
        ranks,
        residual: current,
        oversize_components: oversize,
        survivors_per_rank,
    };
    debug_assert_eq!(check_decomposition(e, sched, &d), Ok(()));
    d
}

/// Independent definitional checker for a decomposition: every extracted
/// rank-k island must have diameter <= alpha_k, its beta_k-neighborhood
/// must avoid the rest of E_{k-1}, same-rank islands must be > beta_k
/// apart, bi-island splits must satisfy their three clauses, and the
/// residual must be exactly what survives.
pub fn check_decomposition(
    e: &DirtySet,
    sched: &Schedule,
    d: &Decomposition,
) -> Result<(), String> {
    let mut current: BTreeSet<Point> = e.points.clone();
    if sched.levels.len() != d.ranks.len() {
        return Err("rank count mismatch".into());
    }
    for (k, rank) in d.ranks.iter().enumerate() {
        let params = sched.levels[k];
        let (alpha, beta) = (params.alpha as u64, params.beta as u64);
        let mut removed: BTreeSet<Point> = BTreeSet::new();
        for isl in &rank.islands {
            if isl.points.is_empty() {
                return Err(format!("rank {k}: empty island"));
            }
            for p in &isl.points {
                if !current.contains(p) {
                    return Err(format!("rank {k}: island point {p:?} not in E_k-1"));
                }
            }
            match sched.mode {
                Mode::Island => {
                    if diameter(&isl.points) > alpha {
                        return Err(format!("rank {k}: island diameter exceeds alpha"));
                    }
                }
                Mode::BiIsland => {
                    let Some((x0, x1)) = &isl.split else {
                        return Err(format!("rank {k}: bi-island without split"));
                    };
                    let mut union: Vec<Point> = x0.iter().chain(x1.iter()).copied().collect();
                    union.sort_unstable();
                    if union != isl.points {
                        return Err(format!("rank {k}: split does not partition the island"));
                    }
                    if diameter(x0) > alpha || diameter(x1) > alpha {
                        return Err(format!("rank {k}: split cluster exceeds alpha"));
                    }
                    if !x1.is_empty() && set_distance(x0, x1) > beta {
                        return Err(format!("rank {k}: split clusters more than beta apart"));
                    }
                }
            }
            // beta-isolation from the rest of E_{k-1}.
            let island_set: BTreeSet<Point> = isl.points.iter().copied().collect();
            for &q in current.iter() {
                if island_set.contains(&q) {
                    continue;
                }
                if isl.points.iter().any(|&p| linf(p, q) <= beta) {
                    return Err(format!("rank {k}: island not beta-isolated (near {q:?})"));
                }
            }
            removed.extend(isl.points.iter().copied());
        }
        // Distinct same-rank islands sit strictly more than beta apart.
        for i in 0..rank.islands.len() {
            for j in i + 1..rank.islands.len() {
                if set_distance(&rank.islands[i].points, &rank.islands[j].points) <= beta {
                    return Err(format!("rank {k}: islands within beta of each other"));
                }
            }
        }
        current = current.difference(&removed).copied().collect();
        if current.len() != d.survivors_per_rank[k + 1] {
            return Err(format!("rank {k}: survivor count mismatch"));
        }
    }
    if current != d.residual {
        return Err("residual mismatch".into());
    }
    Ok(())
}

/// Per-trial Monte Carlo statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialStat {
    pub trial: u64,
    pub seed: u64,
    pub dirty: usize,
    pub cleaned: bool,
    pub max_rank_used: u32,
    pub survivors: usize,
    /// |E_k| per rank, starting with |E_0|.
    pub survivors_per_rank: Vec<usize>,
}

/// One Monte Carlo trial (exposed so callers can parallelize trials).
pub fn mc_trial(eps: f64, sched: &Schedule, window: Region, trial: u64, base_seed: u64) -> TrialStat {
    let seed = index_hash(base_seed, trial);
    let e = sample_bernoulli(eps, window, seed);
    let d = clean(&e, sched);
    TrialStat {
        trial,
        seed,
        dirty: e.len(),
        cleaned: d.fully_cleaned(),
        max_rank_used: d.max_rank_used(),
        survivors: d.residual.len(),
        survivors_per_rank: d.survivors_per_rank,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct McStats {
    pub trials: Vec<TrialStat>,
    /// Mean fraction of window cells still dirty after each rank
    /// (estimates P(x in E_k)).
    pub survival_fraction: Vec<f64>,
}

impl McStats {
    pub fn cleaned_count(&self) -> usize {
        self.trials.iter().filter(|t| t.cleaned).count()
    }
}

pub fn monte_carlo_sparsity(
    eps: f64,
    sched: &Schedule,
    window: Region,
    trials: u64,
    seed: u64,
) -> McStats {
    assert!(trials >= 1);
    let stats: Vec<TrialStat> =
        (0..trials).map(|t| mc_trial(eps, sched, window, t, seed)).collect();
    McStats { survival_fraction: aggregate_survival(&stats, window), trials: stats }
}

/// Deterministic aggregation of per-trial survival counts (order
/// independent: a plain mean of exact per-trial fractions).
pub fn aggregate_survival(stats: &[TrialStat], window: Region) -> Vec<f64> {
    let ranks = stats.iter().map(|t| t.survivors_per_rank.len()).max().unwrap_or(0);
    let area = window.area() as f64;
    (0..ranks)
        .map(|k| {
            let sum: u64 = stats
                .iter()
                .map(|t| *t.survivors_per_rank.get(k).unwrap_or(&0) as u64)
                .sum();
            sum as f64 / (stats.len() as f64 * area)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtendedRequiresBiIslands;

impl fmt::Display for ExtendedRequiresBiIslands {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("extended neighborhoods are defined for bi-island decompositions")
    }
}

/// Exact fraction of the window covered by the union over ranks of the
/// gamma_k-neighborhoods of rank-k islands. With `extended` set, a column
/// cell between two covered cells of the same island also counts (the
/// closure used for bi-island correction zones).
pub fn neighborhoods_density(
    d: &Decomposition,
    gammas: &[u32],
    extended: bool,
) -> Result<Frac, ExtendedRequiresBiIslands> {
    if extended && d.mode != Mode::BiIsland {
        return Err(ExtendedRequiresBiIslands);
    }
    assert_eq!(gammas.len(), d.ranks.len());
    let mut mask = CellMask::empty(d.window);
    for (rank, &gamma) in d.ranks.iter().zip(gammas) {
        debug_assert!(gamma >= rank.params.alpha);
        let g = gamma as i64;
        for isl in &rank.islands {
            if extended {
                let xmin = isl.points.iter().map(|p| p.0).min().unwrap() - g;
                let xmax = isl.points.iter().map(|p| p.0).max().unwrap() + g;
                for x in xmin..=xmax {
                    let ys: Vec<i64> = isl
                        .points
                        .iter()
                        .filter(|p| (p.0 - x).abs() <= g)
                        .map(|p| p.1)
                        .collect();
                    if let (Some(&lo), Some(&hi)) = (ys.iter().min(), ys.iter().max()) {
                        for y in lo - g..=hi + g {
                            mask.set(x, y);
                        }
                    }
                }
            } else {
                for &p in &isl.points {
                    mask.fill_square(p, gamma as u64);
                }
            }
        }
    }
    Ok(mask.fraction())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[Point]) -> BTreeSet<Point> {
        v.iter().copied().collect()
    }

    fn window() -> Region {
        Region::new(0, 0, 100, 100)
    }

    #[test]
    fn schedule_construction() {
        assert!(Schedule::new(Mode::Island, vec![RankParams { alpha: 3, beta: 2, gamma: None }])
            .is_err());
        let s = Schedule::geometric_island(3);
        let a: Vec<u32> = s.levels.iter().map(|l| l.alpha).collect();
        let b: Vec<u32> = s.levels.iter().map(|l| l.beta).collect();
        assert_eq!(a, vec![1, 17, 289]);
        assert_eq!(b, vec![2, 34, 578]);
        let rep = validate_schedule(&s);
        assert!(rep.isolation_ok());
    }

    #[test]
    fn growth_check_boundary_case() {
        // beta_k = 2^(2^k): ratio exactly 2, so the strict island-mode
        // growth check fails at every rank.
        let levels: Vec<(BigUint, BigUint)> = (0..4u32)
            .map(|k| {
                let b = BigUint::from(2u32).pow(1 << k);
                (b.clone(), b)
            })
            .collect();
        let rep = validate_schedule_big(Mode::Island, &levels);
        assert!(rep.growth.iter().all(|&g| !g));
        // The same betas pass the bi-island bound (ratio 2 < 3).
        let rep = validate_schedule_big(Mode::BiIsland, &levels);
        assert!(rep.growth_ok());
    }

    #[test]
    fn single_point_is_island() {
        let out = find_rank_islands(
            &pts(&[(5, 5)]),
            window(),
            BoundaryPolicy::Closed,
            1,
            2,
            Mode::Island,
        );
        assert_eq!(out.islands.len(), 1);
        assert!(out.survivors.is_empty());
    }

    #[test]
    fn diagonal_pair_is_island() {
        let out = find_rank_islands(
            &pts(&[(5, 5), (6, 6)]),
            window(),
            BoundaryPolicy::Closed,
            1,
            2,
            Mode::Island,
        );
        assert_eq!(out.islands.len(), 1, "l-infinity diameter is 1");
    }

    #[test]
    fn spread_pair_island_vs_bi_island() {
        let e = pts(&[(10, 10), (10, 14)]);
        let out =
            find_rank_islands(&e, window(), BoundaryPolicy::Closed, 1, 4, Mode::Island);
        assert!(out.islands.is_empty());
        assert_eq!(out.survivors.len(), 2);

        let out =
            find_rank_islands(&e, window(), BoundaryPolicy::Closed, 1, 4, Mode::BiIsland);
        assert_eq!(out.islands.len(), 1);
        let (x0, x1) = out.islands[0].split.clone().unwrap();
        assert_eq!((x0.len(), x1.len()), (1, 1));
    }

    #[test]
    fn windowed_policy_suppresses_margin_components() {
        let e = pts(&[(0, 0)]);
        let out =
            find_rank_islands(&e, window(), BoundaryPolicy::Windowed, 1, 2, Mode::Island);
        assert!(out.islands.is_empty());
        assert_eq!(out.survivors.len(), 1);
        // The same point well inside the window is classified.
        let out = find_rank_islands(
            &pts(&[(50, 50)]),
            window(),
            BoundaryPolicy::Windowed,
            1,
            2,
            Mode::Island,
        );
        assert_eq!(out.islands.len(), 1);
    }

    #[test]
    fn clean_examples() {
        let sched = Schedule::geometric_island(2);
        let e = DirtySet::closed(window(), []);
        let d = clean(&e, &sched);
        assert!(d.fully_cleaned());
        assert_eq!(d.max_rank_used(), 0);

        let e = DirtySet::closed(window(), [(0, 0), (30, 30)]);
        let d = clean(&e, &sched);
        assert_eq!(d.ranks[0].islands.len(), 2);
        assert!(d.fully_cleaned());

        let e = DirtySet::closed(window(), [(0, 0), (1, 0), (40, 40)]);
        let d = clean(&e, &sched);
        assert_eq!(d.ranks[0].islands.len(), 2);
        let sizes: Vec<usize> =
            d.ranks[0].islands.iter().map(|i| i.points.len()).collect();
        assert_eq!(sizes, vec![2, 1]);
    }

    #[test]
    fn decomposition_checker_catches_tampering() {
        let sched = Schedule::geometric_island(2);
        let e = DirtySet::closed(window(), [(10, 10), (40, 40)]);
        let mut d = clean(&e, &sched);
        assert_eq!(check_decomposition(&e, &sched, &d), Ok(()));
        d.ranks[0].islands[0].points.push((11, 11));
        assert!(check_decomposition(&e, &sched, &d).is_err());
    }

    #[test]
    fn bernoulli_extremes_and_mean() {
        let w = Region::new(0, 0, 64, 64);
        assert!(sample_bernoulli(0.0, w, 42).is_empty());
        assert_eq!(sample_bernoulli(1.0, w, 42).len(), 64 * 64);

        let w = Region::new(0, 0, 512, 512);
        let e = sample_bernoulli(0.001, w, 42);
        // Binomial mean 262.1, sigma 16.2; require within 5 sigma.
        let n = e.len() as f64;
        assert!((n - 262.1).abs() < 5.0 * 16.2, "|E| = {n}");
    }

    #[test]
    fn monte_carlo_trivial_and_monotone() {
        let sched = Schedule::geometric_island(3);
        let w = Region::new(0, 0, 128, 128);
        let stats = monte_carlo_sparsity(0.0, &sched, w, 3, 1);
        assert_eq!(stats.cleaned_count(), 3);
        assert!(stats.trials.iter().all(|t| t.max_rank_used == 0));

        let stats = monte_carlo_sparsity(0.002, &sched, w, 5, 7);
        for t in &stats.trials {
            for w in t.survivors_per_rank.windows(2) {
                assert!(w[1] <= w[0], "survival must be non-increasing");
            }
        }
    }

    #[test]
    fn island_decompositions_pass_bi_island_reading() {
        let sched = Schedule::geometric_island(2);
        let w = Region::new(0, 0, 128, 128);
        let e = sample_bernoulli(0.002, w, 3);
        let d = clean(&e, &sched);
        for (k, rank) in d.ranks.iter().enumerate() {
            let alpha = sched.levels[k].alpha as u64;
            let beta = sched.levels[k].beta as u64;
            for isl in &rank.islands {
                let split = bi_split(&isl.points, alpha, beta).expect("island is a bi-island");
                assert!(split.1.is_empty() || set_distance(&split.0, &split.1) <= beta);
            }
        }
    }

    #[test]
    fn density_counts() {
        let sched = Schedule::geometric_island(1);
        let e = DirtySet::closed(window(), [(50, 50)]);
        let d = clean(&e, &sched);
        // Single island, gamma = 2: a 5x5 square.
        assert_eq!(neighborhoods_density(&d, &[2], false).unwrap(), Frac::new(25, 10000));

        let empty = clean(&DirtySet::closed(window(), []), &sched);
        assert_eq!(neighborhoods_density(&empty, &[2], false).unwrap(), Frac::new(0, 1));
        assert!(neighborhoods_density(&empty, &[2], true).is_err());
    }

    #[test]
    fn extended_neighborhood_closure() {
        let sched = Schedule::new(
            Mode::BiIsland,
            vec![RankParams { alpha: 1, beta: 10, gamma: Some(1) }],
        )
        .unwrap();
        let e = DirtySet::closed(window(), [(50, 50), (50, 60)]);
        let d = clean(&e, &sched);
        assert_eq!(d.ranks[0].islands.len(), 1);
        // Columns 49..=51, rows 49..=61: a 3 x 13 block.
        assert_eq!(neighborhoods_density(&d, &[1], true).unwrap(), Frac::new(39, 10000));
        // Plain neighborhoods: two 3x3 squares.
        assert_eq!(neighborhoods_density(&d, &[1], false).unwrap(), Frac::new(18, 10000));
    }

    #[test]
    fn density_respects_lemma_bound() {
        // Measured density of gamma_k-neighborhood unions is at most
        // 4 * sum ((alpha_k + 2 gamma_k) / beta_k)^2 plus window slack.
        let sched = Schedule::geometric_island(3);
        let w = Region::new(0, 0, 256, 256);
        for seed in [1u64, 2, 3] {
            let e = sample_bernoulli(0.002, w, seed);
            let d = clean(&e, &sched);
            let gammas: Vec<u32> = (0..3).map(|k| sched.gamma(k)).collect();
            let measured = neighborhoods_density(&d, &gammas, false).unwrap().to_f64();
            let mut bound = 0.0;
            for (k, l) in sched.levels.iter().enumerate() {
                let num = (l.alpha + 2 * gammas[k]) as f64;
                bound += (num / l.beta as f64) * (num / l.beta as f64);
            }
            assert!(measured <= 4.0 * bound + 0.02, "{measured} vs {bound} (seed {seed})");
        }
    }

    #[test]
    fn oversize_component_flagged() {
        // 17 collinear points spaced beta apart cannot split into two
        // alpha-clusters and exceed the exact-search cap.
        let e: Vec<Point> = (0..17).map(|i| (4 * i, 0)).collect();
        let w = Region::new(0, 0, 100, 10);
        let out = find_rank_islands(
            &pts(&e),
            w,
            BoundaryPolicy::Closed,
            2,
            4,
            Mode::BiIsland,
        );
        assert_eq!(out.oversize_components, 1);
        assert_eq!(out.survivors.len(), 17);
    }
}
