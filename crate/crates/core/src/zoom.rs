//! Exact arithmetic for hierarchies of macro-tiles with variable zoom
//! factors: per-level sizes, bit delegation, zones of responsibility,
//! groups of bits to check, checksum routing and per-level field budgets.
//!
//! Level-k macro-tiles have side `L_k = N_0 * ... * N_{k-1}`; a power
//! schedule `N_k = Q^floor(c^k)` makes these astronomically large, so all
//! index arithmetic here is big-integer exact.

use alloc::vec::Vec;
use alloc::{vec, format, string::String};
use core::fmt;
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Zoom factor schedule: fixed N, or N_k = Q^floor(c^k) with rational c.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZoomSchedule {
    Fixed { n: u32 },
    Powers { q: u32, c_num: u32, c_den: u32 },
}

impl ZoomSchedule {
    pub fn fixed(n: u32) -> Self {
        assert!(n >= 2);
        ZoomSchedule::Fixed { n }
    }

    /// The main variable schedule: Q = 16, c = 5/2.
    pub fn q16_c25() -> Self {
        ZoomSchedule::Powers { q: 16, c_num: 5, c_den: 2 }
    }

    pub fn powers(q: u32, c_num: u32, c_den: u32) -> Self {
        assert!(q >= 2 && c_den >= 1 && c_num > c_den);
        ZoomSchedule::Powers { q, c_num, c_den }
    }

    /// floor(c^k) for the power schedule.
    fn exponent(&self, k: u32) -> BigUint {
        match self {
            ZoomSchedule::Fixed { .. } => BigUint::one(),
            ZoomSchedule::Powers { c_num, c_den, .. } => {
                BigUint::from(*c_num).pow(k) / BigUint::from(*c_den).pow(k)
            }
        }
    }

    /// Zoom factor N_k.
    pub fn n(&self, k: u32) -> BigUint {
        match self {
            ZoomSchedule::Fixed { n } => BigUint::from(*n),
            ZoomSchedule::Powers { q, .. } => {
                let e = self.exponent(k).to_u32().expect("exponent fits u32");
                BigUint::from(*q).pow(e)
            }
        }
    }

    /// Macro-tile side L_k = N_0 * ... * N_{k-1} (L_0 = 1).
    pub fn l(&self, k: u32) -> BigUint {
        let mut acc = BigUint::one();
        for j in 0..k {
            acc *= self.n(j);
        }
        acc
    }
}

/// Exact values (N_k, L_k).
pub fn zoom_values(sched: &ZoomSchedule, k: u32) -> (BigUint, BigUint) {
    (sched.n(k), sched.l(k))
}

/// A level-k macro-tile's position inside its father plus the absolute
/// origin of its zone of responsibility (in bit-column units).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MacroCoord {
    pub level: u32,
    /// Horizontal position in the father, 0 <= x < N_level.
    pub x: u64,
    /// Vertical position in the father, 0 <= y < N_level.
    pub y: u64,
    /// Absolute index of the first bit column of this macro-tile's zone.
    pub zone_origin: BigUint,
}

impl MacroCoord {
    pub fn new(level: u32, x: u64, y: u64, zone_origin: impl Into<BigUint>) -> Self {
        MacroCoord { level, x, y, zone_origin: zone_origin.into() }
    }
}

/// The single bit column this macro-tile carries explicitly: present iff
/// the vertical coordinate is below L_k (bits are indexed within the zone
/// by the vertical position in the father); absent tiles are spares.
pub fn delegated_bit(sched: &ZoomSchedule, mc: &MacroCoord) -> Option<BigUint> {
    let lk = sched.l(mc.level);
    let y = BigUint::from(mc.y);
    if y < lk {
        Some(&mc.zone_origin + y)
    } else {
        None
    }
}

/// Zone of responsibility of the level-k macro-tile with the given
/// horizontal index: the half-open interval of bit columns it spans.
pub fn responsibility_zone(
    sched: &ZoomSchedule,
    level: u32,
    horizontal_index: impl Into<BigUint>,
) -> (BigUint, BigUint) {
    let lk = sched.l(level);
    let idx: BigUint = horizontal_index.into();
    let start = &idx * &lk;
    let end = &start + &lk;
    (start, end)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NoDelegatedBit;

impl fmt::Display for NoDelegatedBit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("macro-tile has no delegated bit")
    }
}

/// floor(log2 x) via bit length; x >= 1.
pub fn floor_log2(x: &BigUint) -> u64 {
    assert!(!x.is_zero());
    x.bits() - 1
}

/// ceil(log2 x) for x >= 1.
pub fn ceil_log2(x: &BigUint) -> u64 {
    assert!(!x.is_zero());
    if x.count_ones() == 1 {
        x.bits() - 1
    } else {
        x.bits()
    }
}

/// Default check-group length: the integer floor-log chain
/// floor(log2 floor(log2 floor(log2 max(k, 27)))), guarded to >= 1.
pub fn default_group_len(k: u32) -> u64 {
    let v = BigUint::from(k.max(27));
    let a = floor_log2(&v);
    let b = floor_log2(&BigUint::from(a));
    let c = floor_log2(&BigUint::from(b));
    c.max(1)
}

/// Group of bits to check: starts at the delegated bit, has
/// `length_fn(level)` bits, truncated to the macro-tile's zone.
pub fn check_group(
    sched: &ZoomSchedule,
    mc: &MacroCoord,
    length_fn: impl Fn(u32) -> u64,
) -> Result<(BigUint, BigUint), NoDelegatedBit> {
    let start = delegated_bit(sched, mc).ok_or(NoDelegatedBit)?;
    let zone_end = &mc.zone_origin + sched.l(mc.level);
    let len = BigUint::from(length_fn(mc.level).max(1));
    let end = (&start + len).min(zone_end);
    Ok((start, end))
}

/// Cells of row i and column i within an N x N father grid: the route a
/// row's checksums propagate along. Always 2N - 1 cells.
pub fn checksum_routes(n: u32, i: u32) -> Vec<(u32, u32)> {
    assert!(i < n);
    let mut cells = Vec::with_capacity(2 * n as usize - 1);
    for x in 0..n {
        cells.push((x, i));
    }
    for y in 0..n {
        if y != i {
            cells.push((i, y));
        }
    }
    cells.sort_unstable();
    cells
}

/// Bit budget report for the conscious data of a level-k macro-tile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldBudget {
    /// Level number plus own coordinates in the father.
    pub a_level_coords: u64,
    /// Own delegated bit.
    pub c_own_bit: u64,
    /// Father's delegated bit.
    pub d_father_bit: u64,
    /// Checksum computation and transport state.
    pub e_checksums: u64,
    /// Group of bits to check.
    pub f_check_group: u64,
    /// One tape row of the enclosing computation zone.
    pub budget: BigUint,
}

impl FieldBudget {
    pub fn total(&self) -> u64 {
        self.a_level_coords + self.c_own_bit + self.d_father_bit + self.e_checksums
            + self.f_check_group
    }

    pub fn field_fits(&self) -> [bool; 5] {
        let b = &self.budget;
        [
            BigUint::from(self.a_level_coords) <= *b,
            BigUint::from(self.c_own_bit) <= *b,
            BigUint::from(self.d_father_bit) <= *b,
            BigUint::from(self.e_checksums) <= *b,
            BigUint::from(self.f_check_group) <= *b,
        ]
    }

    pub fn fits(&self) -> bool {
        BigUint::from(self.total()) <= self.budget
    }

    pub fn describe(&self) -> String {
        format!(
            "A={} C={} D={} E={} F={} total={} budget={}",
            self.a_level_coords,
            self.c_own_bit,
            self.d_father_bit,
            self.e_checksums,
            self.f_check_group,
            self.total(),
            self.budget
        )
    }
}

/// Field sizes for the conscious data of a level-k macro-tile with D
/// checksum points. The budget is one tape row, N_{k-1} bits.
pub fn consciousness_budget(sched: &ZoomSchedule, k: u32, d_checksums: u64) -> FieldBudget {
    assert!(k >= 1);
    let nk = sched.n(k);
    let nk1 = sched.n(k - 1);
    // Checksum field elements live in a field larger than N_{k-1} + D.
    let field_size = &nk1 + BigUint::from(d_checksums) + BigUint::one();
    let a = ceil_log2(&BigUint::from(k)) + 2 * ceil_log2(&nk);
    let e = d_checksums * 2 * ceil_log2(&field_size) * 2;
    FieldBudget {
        a_level_coords: a,
        c_own_bit: 1,
        d_father_bit: 1,
        e_checksums: e,
        f_check_group: default_group_len(k),
        budget: nk1,
    }
}

/// A source of forbidden bit strings to scan for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ForbiddenFactorSource {
    /// Explicit list of forbidden factors.
    Explicit(Vec<Vec<u8>>),
    /// The family { 0^j : j >= min_run } (all-zero runs).
    ZeroRuns { min_run: usize },
    /// Descriptive placeholder for complexity-threshold families
    /// K(x) < alpha|x| - c; enumerates nothing (the threshold is not
    /// computable), retained as parameters only.
    ComplexityThreshold { alpha_num: u32, alpha_den: u32, c: u32 },
}

impl ForbiddenFactorSource {
    /// Enumerate forbidden strings, at most `budget` of them.
    pub fn enumerate(&self, budget: usize) -> Vec<Vec<u8>> {
        match self {
            ForbiddenFactorSource::Explicit(v) => v.iter().take(budget).cloned().collect(),
            ForbiddenFactorSource::ZeroRuns { min_run } => {
                let mut out = Vec::new();
                let mut j = *min_run;
                while out.len() < budget {
                    out.push(vec![0u8; j]);
                    j += 1;
                }
                out
            }
            ForbiddenFactorSource::ComplexityThreshold { .. } => Vec::new(),
        }
    }
}

/// Occurrences of forbidden factors in a bit window: (offset, factor).
pub fn scan_forbidden(
    window: &[u8],
    source: &ForbiddenFactorSource,
    budget: usize,
) -> Vec<(usize, Vec<u8>)> {
    let mut hits = Vec::new();
    for pat in source.enumerate(budget) {
        if pat.is_empty() || pat.len() > window.len() {
            continue;
        }
        for off in 0..=(window.len() - pat.len()) {
            if window[off..off + pat.len()] == pat[..] {
                hits.push((off, pat.clone()));
            }
        }
    }
    hits.sort();
    hits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::Counter;
    use crate::substitution::tm_words;

    #[test]
    fn power_schedule_values() {
        let s = ZoomSchedule::q16_c25();
        assert_eq!(zoom_values(&s, 0).0, BigUint::from(16u32));
        assert_eq!(zoom_values(&s, 1).0, BigUint::from(256u32));
        assert_eq!(zoom_values(&s, 2).0, BigUint::from(16u32).pow(6));
        assert_eq!(zoom_values(&s, 1).1, BigUint::from(16u32));
        assert_eq!(zoom_values(&s, 2).1, BigUint::from(4096u32));
        // L_k < N_k for k <= 6.
        for k in 0..=6 {
            let (n, l) = zoom_values(&s, k);
            assert!(l < n, "k={k}");
        }
    }

    #[test]
    fn fixed_schedule_values() {
        let s = ZoomSchedule::fixed(4);
        assert_eq!(s.l(3), BigUint::from(64u32));
        assert_eq!(s.n(5), BigUint::from(4u32));
    }

    #[test]
    fn delegation_examples() {
        let s = ZoomSchedule::fixed(4);
        let mc = MacroCoord::new(1, 2, 1, 8u32);
        assert_eq!(delegated_bit(&s, &mc), Some(BigUint::from(9u32)));
        let mc0 = MacroCoord::new(1, 2, 0, 8u32);
        assert_eq!(delegated_bit(&s, &mc0), Some(BigUint::from(8u32)));

        let p = ZoomSchedule::q16_c25();
        let spare = MacroCoord::new(1, 0, 200, 0u32);
        assert_eq!(delegated_bit(&p, &spare), None);
    }

    #[test]
    fn zones_nest_and_contain_delegates() {
        let s = ZoomSchedule::fixed(4);
        assert_eq!(
            responsibility_zone(&s, 2, 3u32),
            (BigUint::from(48u32), BigUint::from(64u32))
        );
        assert_eq!(
            responsibility_zone(&s, 0, 7u32),
            (BigUint::from(7u32), BigUint::from(8u32))
        );

        // Nesting plus delegate containment on random coordinates.
        let mut c = Counter::new(13);
        for sched in [ZoomSchedule::fixed(4), ZoomSchedule::q16_c25()] {
            for _ in 0..2500 {
                let level = c.next_below(3) as u32;
                let n_level = sched.n(level).to_u64().unwrap_or(u64::MAX);
                let x = c.next_below(n_level.min(1 << 20));
                let y = c.next_below(n_level.min(1 << 20));
                let (zs, ze) = responsibility_zone(&sched, level, x);
                let mc = MacroCoord::new(level, x, y, zs.clone());
                if let Some(bit) = delegated_bit(&sched, &mc) {
                    assert!(zs <= bit && bit < ze);
                }
                // Father zone contains this zone.
                let father_idx = BigUint::from(x) / sched.n(level);
                let (fs, fe) = responsibility_zone(
                    &sched,
                    level + 1,
                    father_idx,
                );
                assert!(fs <= zs && ze <= fe);
            }
        }
    }

    #[test]
    fn sibling_delegates_are_distinct() {
        let s = ZoomSchedule::fixed(4);
        let mut seen = alloc::collections::BTreeSet::new();
        for y in 0..4u64 {
            let mc = MacroCoord::new(1, 0, y, 0u32);
            let bit = delegated_bit(&s, &mc).unwrap();
            assert!(seen.insert(bit));
        }
    }

    #[test]
    fn check_groups_truncate() {
        let s = ZoomSchedule::fixed(4);
        // Zone [0,16) at level 2; delegated bit 5; length 3 -> [5,8).
        let mc = MacroCoord::new(2, 0, 5, 0u32);
        let (a, b) = check_group(&s, &mc, |_| 3).unwrap();
        assert_eq!((a, b), (BigUint::from(5u32), BigUint::from(8u32)));
        // Delegated bit at the zone end: truncated to one bit.
        let mc = MacroCoord::new(2, 0, 15, 0u32);
        let (a, b) = check_group(&s, &mc, |_| 4).unwrap();
        assert_eq!((a, b), (BigUint::from(15u32), BigUint::from(16u32)));
        // Spare tile: no group.
        let p = ZoomSchedule::q16_c25();
        let spare = MacroCoord::new(1, 0, 77, 0u32);
        assert_eq!(check_group(&p, &spare, |_| 4), Err(NoDelegatedBit));
    }

    #[test]
    fn default_group_len_is_guarded_and_monotone() {
        let mut prev = 0;
        for k in 0..=100 {
            let l = default_group_len(k);
            assert!(l >= 1);
            assert!(l >= prev);
            prev = l;
        }
        assert_eq!(default_group_len(2), 1);
    }

    #[test]
    fn checksum_route_geometry() {
        assert_eq!(checksum_routes(4, 0).len(), 7);
        assert_eq!(checksum_routes(1, 0), vec![(0, 0)]);
        for n in [2u32, 3, 8, 64] {
            for i in 0..n.min(8) {
                assert_eq!(checksum_routes(n, i).len(), 2 * n as usize - 1);
            }
        }
        // Routes of distinct rows meet in exactly the two crossing cells.
        let a: alloc::collections::BTreeSet<_> = checksum_routes(8, 2).into_iter().collect();
        let b: alloc::collections::BTreeSet<_> = checksum_routes(8, 5).into_iter().collect();
        let inter: Vec<_> = a.intersection(&b).copied().collect();
        assert_eq!(inter, vec![(2, 5), (5, 2)]);
    }

    #[test]
    fn budget_examples() {
        let s = ZoomSchedule::q16_c25();
        let b = consciousness_budget(&s, 2, 6);
        assert!(b.fits(), "{}", b.describe());

        let tiny = ZoomSchedule::fixed(4);
        let b = consciousness_budget(&tiny, 2, 6);
        assert!(!b.fits());
        assert!(!b.field_fits()[0], "field A alone exceeds the 4-bit budget");

        // E is exactly linear in D.
        let e1 = consciousness_budget(&s, 2, 3).e_checksums;
        let e2 = consciousness_budget(&s, 2, 6).e_checksums;
        assert_eq!(e2, 2 * e1);
    }

    #[test]
    fn forbidden_scans() {
        let (a10, _) = tm_words(10);
        let src = ForbiddenFactorSource::Explicit(vec![vec![0, 0, 0], vec![1, 1, 1]]);
        assert!(scan_forbidden(&a10, &src, 100).is_empty(), "Thue-Morse is cube-free");

        let zeros = vec![0u8; 8];
        let src = ForbiddenFactorSource::Explicit(vec![vec![0, 0, 0]]);
        let hits = scan_forbidden(&zeros, &src, 100);
        assert_eq!(hits.len(), 6);
        assert_eq!(hits[0].0, 0);
        assert_eq!(hits[5].0, 5);

        let runs = ForbiddenFactorSource::ZeroRuns { min_run: 3 };
        assert!(!scan_forbidden(&zeros, &runs, 4).is_empty());

        let empty = ForbiddenFactorSource::Explicit(Vec::new());
        assert!(scan_forbidden(&zeros, &empty, 100).is_empty());

        let meta = ForbiddenFactorSource::ComplexityThreshold { alpha_num: 1, alpha_den: 2, c: 4 };
        assert!(meta.enumerate(10).is_empty());
    }
}
