//! Substitution rules over letter grids, Thue-Morse words and measurement
//! of shift aperiodicity.
//!
//! Letter patterns store rows bottom-to-top: row index = y, column = x.
//! Rule tables follow the same convention, so the Thue-Morse rule maps
//! 0 to [[0,1],[1,0]] (bottom row first) and the grid it generates agrees
//! with the popcount-parity formula of [`tm_cell`].

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::tile::{Frac, PeriodVector, Region};

pub type Letter = u8;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstitutionRule {
    pub alphabet: Vec<alloc::string::String>,
    pub m: u32,
    /// `table[a][row][col]`, rows bottom-to-top.
    pub table: Vec<Vec<Vec<Letter>>>,
}

impl SubstitutionRule {
    pub fn new(
        alphabet: Vec<alloc::string::String>,
        m: u32,
        table: Vec<Vec<Vec<Letter>>>,
    ) -> Result<Self, RuleError> {
        if table.len() != alphabet.len() {
            return Err(RuleError::TableIncomplete);
        }
        for img in &table {
            if img.len() != m as usize || img.iter().any(|r| r.len() != m as usize) {
                return Err(RuleError::BadImageShape);
            }
            for row in img {
                for &l in row {
                    if l as usize >= alphabet.len() {
                        return Err(RuleError::LetterNotInAlphabet(l));
                    }
                }
            }
        }
        Ok(SubstitutionRule { alphabet, m, table })
    }

    pub fn image(&self, a: Letter) -> &Vec<Vec<Letter>> {
        &self.table[a as usize]
    }

    /// Chessboard rule: both letters map to [[0,1],[1,0]].
    pub fn example3() -> Self {
        let block = vec![vec![0, 1], vec![1, 0]];
        SubstitutionRule::new(
            vec!["0".into(), "1".into()],
            2,
            vec![block.clone(), block],
        )
        .unwrap()
    }

    /// Thue-Morse rule: 0 -> [[0,1],[1,0]], 1 -> [[1,0],[0,1]].
    pub fn thue_morse() -> Self {
        SubstitutionRule::new(
            vec!["0".into(), "1".into()],
            2,
            vec![vec![vec![0, 1], vec![1, 0]], vec![vec![1, 0], vec![0, 1]]],
        )
        .unwrap()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleError {
    TableIncomplete,
    BadImageShape,
    LetterNotInAlphabet(Letter),
}

impl fmt::Display for RuleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleError::TableIncomplete => f.write_str("table does not cover the alphabet"),
            RuleError::BadImageShape => f.write_str("rule image is not an m x m matrix"),
            RuleError::LetterNotInAlphabet(l) => write!(f, "letter {l} outside the alphabet"),
        }
    }
}

/// Rectangular array of letters with an anchor offset (bottom-left cell
/// coordinates).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterPattern {
    pub anchor: (i64, i64),
    pub width: u32,
    pub height: u32,
    /// Row-major from the bottom-left.
    pub cells: Vec<Letter>,
}

impl LetterPattern {
    pub fn new(anchor: (i64, i64), width: u32, height: u32, cells: Vec<Letter>) -> Self {
        assert!(width >= 1 && height >= 1);
        assert_eq!(cells.len(), width as usize * height as usize);
        LetterPattern { anchor, width, height, cells }
    }

    pub fn single(a: Letter) -> Self {
        LetterPattern::new((0, 0), 1, 1, vec![a])
    }

    /// Letter at local coordinates (x, y) counted from the bottom-left.
    pub fn at(&self, x: u32, y: u32) -> Letter {
        self.cells[y as usize * self.width as usize + x as usize]
    }

    pub fn region(&self) -> Region {
        Region::new(self.anchor.0, self.anchor.1, self.width, self.height)
    }

    /// Letter at absolute coordinates, if covered.
    pub fn get(&self, x: i64, y: i64) -> Option<Letter> {
        if self.region().contains(x, y) {
            Some(self.at((x - self.anchor.0) as u32, (y - self.anchor.1) as u32))
        } else {
            None
        }
    }

    /// Rows top to bottom as letter vectors (handy for displays).
    pub fn rows_top_down(&self) -> Vec<Vec<Letter>> {
        (0..self.height)
            .rev()
            .map(|y| (0..self.width).map(|x| self.at(x, y)).collect())
            .collect()
    }
}

/// Replace each letter by its m x m image; the anchor scales by m.
pub fn apply(s: &SubstitutionRule, p: &LetterPattern) -> Result<LetterPattern, RuleError> {
    let m = s.m;
    let w = p.width * m;
    let h = p.height * m;
    let mut cells = vec![0u8; w as usize * h as usize];
    for y in 0..p.height {
        for x in 0..p.width {
            let a = p.at(x, y);
            if a as usize >= s.alphabet.len() {
                return Err(RuleError::LetterNotInAlphabet(a));
            }
            let img = s.image(a);
            for dy in 0..m {
                for dx in 0..m {
                    let xx = x * m + dx;
                    let yy = y * m + dy;
                    cells[yy as usize * w as usize + xx as usize] =
                        img[dy as usize][dx as usize];
                }
            }
        }
    }
    Ok(LetterPattern::new((p.anchor.0 * m as i64, p.anchor.1 * m as i64), w, h, cells))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SizeCap;

impl fmt::Display for SizeCap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("iterated pattern exceeds the size cap")
    }
}

/// Side length cap for iterated images.
pub const MAX_ITERATE_SIDE: u64 = 1 << 12;

/// s^n(a) as an m^n x m^n pattern anchored at the origin.
pub fn iterate(s: &SubstitutionRule, a: Letter, n: u32) -> Result<LetterPattern, SizeCap> {
    let mut side = 1u64;
    for _ in 0..n {
        side = side.saturating_mul(s.m as u64);
        if side > MAX_ITERATE_SIDE {
            return Err(SizeCap);
        }
    }
    let mut p = LetterPattern::single(a);
    for _ in 0..n {
        p = apply(s, &p).expect("alphabet closed under the rule");
        p.anchor = (0, 0);
    }
    Ok(p)
}

/// One-dimensional Thue-Morse words: a_{n+1} = a_n b_n, b_{n+1} = b_n a_n,
/// with a_0 = 0, b_0 = 1. Returns bit vectors of length 2^n.
pub fn tm_words(n: u32) -> (Vec<u8>, Vec<u8>) {
    assert!(n <= 30, "word length 2^n exceeds the cap");
    let mut a = vec![0u8];
    let mut b = vec![1u8];
    for _ in 0..n {
        let mut na = a.clone();
        na.extend_from_slice(&b);
        let mut nb = b.clone();
        nb.extend_from_slice(&a);
        a = na;
        b = nb;
    }
    (a, b)
}

/// One-dimensional Thue-Morse bit: parity of popcount.
pub fn tm1(x: u64) -> u8 {
    (x.count_ones() & 1) as u8
}

/// Two-dimensional Thue-Morse cell: tm1(x) xor tm1(y). Agrees with
/// `iterate(thue_morse, 0, n)` on the square [0, 2^n)^2.
pub fn tm_cell(x: u64, y: u64) -> u8 {
    tm1(x) ^ tm1(y)
}

/// Counts of matching and differing positions between w and its right shift
/// by u: positions i in [0, |w|-u) compare w[i] against w[i+u].
pub fn shift_agreement(w: &[u8], u: usize) -> (u64, u64) {
    assert!(u >= 1 && u < w.len());
    let mut agree = 0u64;
    let mut disagree = 0u64;
    for i in 0..w.len() - u {
        if w[i] == w[i + u] {
            agree += 1;
        } else {
            disagree += 1;
        }
    }
    (agree, disagree)
}

/// What to measure aperiodicity on.
pub enum PatternSource<'a> {
    Pattern(&'a LetterPattern),
    /// The infinite Thue-Morse grid on nonnegative coordinates.
    ThueMorse,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutOfDomain;

impl fmt::Display for OutOfDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("window or its shift leaves the pattern domain")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub mismatches: u64,
    pub total: u64,
}

impl Mismatch {
    pub fn fraction(&self) -> Frac {
        Frac::new(self.mismatches, self.total)
    }
}

/// Exact fraction of positions x in the window with p(x) != p(x+T).
///
/// For the Thue-Morse source the count is computed exactly from the two
/// one-dimensional shift-difference counts: a mismatch at (x,y) happens iff
/// exactly one of tm1(x)!=tm1(x+dx), tm1(y)!=tm1(y+dy) holds, so the window
/// total is A*(H-B) + (W-A)*B.
pub fn aperiodicity_measure(
    src: &PatternSource<'_>,
    t: PeriodVector,
    window: Region,
) -> Result<Mismatch, OutOfDomain> {
    match src {
        PatternSource::Pattern(p) => {
            let mut mism = 0u64;
            for (x, y) in window.cells() {
                let a = p.get(x, y).ok_or(OutOfDomain)?;
                let b = p.get(x + t.dx, y + t.dy).ok_or(OutOfDomain)?;
                if a != b {
                    mism += 1;
                }
            }
            Ok(Mismatch { mismatches: mism, total: window.area() })
        }
        PatternSource::ThueMorse => {
            if window.x0 + t.dx.min(0) < 0 || window.y0 + t.dy.min(0) < 0 {
                return Err(OutOfDomain);
            }
            let diff_count = |o: i64, len: u32, d: i64| -> u64 {
                (0..len as i64)
                    .filter(|i| tm1((o + i) as u64) != tm1((o + i + d) as u64))
                    .count() as u64
            };
            let a = diff_count(window.x0, window.width, t.dx);
            let b = diff_count(window.y0, window.height, t.dy);
            let (w, h) = (window.width as u64, window.height as u64);
            Ok(Mismatch { mismatches: a * (h - b) + (w - a) * b, total: window.area() })
        }
    }
}

/// A compatibility certificate: per level, the grid offset of the pattern
/// inside the image of the preimage, and the preimage pattern itself
/// (shallowest preimage first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub levels: Vec<((u32, u32), LetterPattern)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Compatibility {
    Certificate(Certificate),
    Refuted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchCap;

impl fmt::Display for SearchCap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("compatibility search exceeded its node budget")
    }
}

/// Bounded-depth window compatibility: search grid offsets and preimage
/// letters for a chain of `depth` preimage patterns whose iterated images
/// contain the pattern. Finding a chain certifies window-level
/// compatibility; exhausting the search refutes it (for this window and
/// depth). Nothing is decided about the plane.
pub fn check_compatible(
    p: &LetterPattern,
    s: &SubstitutionRule,
    depth: u32,
    node_budget: u64,
) -> Result<Compatibility, SearchCap> {
    assert!(depth >= 1);
    let mut nodes = 0u64;
    match chain(p, s, depth, &mut nodes, node_budget)? {
        Some(levels) => Ok(Compatibility::Certificate(Certificate { levels })),
        None => Ok(Compatibility::Refuted),
    }
}

fn chain(
    p: &LetterPattern,
    s: &SubstitutionRule,
    depth: u32,
    nodes: &mut u64,
    budget: u64,
) -> Result<Option<Vec<((u32, u32), LetterPattern)>>, SearchCap> {
    let m = s.m;
    for oy in 0..m {
        for ox in 0..m {
            // Preimage dimensions for this offset.
            let pw = (ox + p.width).div_ceil(m);
            let ph = (oy + p.height).div_ceil(m);
            // Candidate letters per preimage cell.
            let mut cand: Vec<Vec<Letter>> = Vec::with_capacity((pw * ph) as usize);
            let mut feasible = true;
            for cy in 0..ph {
                for cx in 0..pw {
                    let mut letters = Vec::new();
                    'letter: for a in 0..s.alphabet.len() as u8 {
                        let img = s.image(a);
                        for dy in 0..m {
                            for dx in 0..m {
                                let x = (cx * m + dx) as i64 - ox as i64;
                                let y = (cy * m + dy) as i64 - oy as i64;
                                if x >= 0 && y >= 0 && (x as u32) < p.width && (y as u32) < p.height
                                {
                                    if img[dy as usize][dx as usize] != p.at(x as u32, y as u32) {
                                        continue 'letter;
                                    }
                                }
                            }
                        }
                        letters.push(a);
                    }
                    if letters.is_empty() {
                        feasible = false;
                        break;
                    }
                    cand.push(letters);
                }
                if !feasible {
                    break;
                }
            }
            if !feasible {
                continue;
            }
            let mut choice = vec![0u8; cand.len()];
            if let Some(levels) =
                assign(p, s, depth, (ox, oy), pw, ph, &cand, &mut choice, 0, nodes, budget)?
            {
                return Ok(Some(levels));
            }
        }
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn assign(
    p: &LetterPattern,
    s: &SubstitutionRule,
    depth: u32,
    offset: (u32, u32),
    pw: u32,
    ph: u32,
    cand: &[Vec<Letter>],
    choice: &mut [Letter],
    idx: usize,
    nodes: &mut u64,
    budget: u64,
) -> Result<Option<Vec<((u32, u32), LetterPattern)>>, SearchCap> {
    *nodes += 1;
    if *nodes > budget {
        return Err(SearchCap);
    }
    if idx == cand.len() {
        let pre = LetterPattern::new((0, 0), pw, ph, choice.to_vec());
        if depth == 1 {
            return Ok(Some(vec![(offset, pre)]));
        }
        if let Some(mut rest) = chain(&pre, s, depth - 1, nodes, budget)? {
            let mut levels = vec![(offset, pre)];
            levels.append(&mut rest);
            return Ok(Some(levels));
        }
        return Ok(None);
    }
    for &a in &cand[idx] {
        choice[idx] = a;
        if let Some(levels) =
            assign(p, s, depth, offset, pw, ph, cand, choice, idx + 1, nodes, budget)?
        {
            return Ok(Some(levels));
        }
    }
    Ok(None)
}
