//! Finite fields GF(2^t) and GF(p), Reed-Solomon checksums and erasure
//! decoding.
//!
//! Checksums of a value row are the evaluations, at D reserved points, of
//! the unique degree-<n polynomial interpolating the row at n fixed
//! evaluation points. Any D erasures in the row can then be recovered
//! exactly. Two evaluation routes are kept deliberately separate: a direct
//! Lagrange route and a streaming route with two field elements of state
//! per checksum point; tests hold them equal.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;

/// Field element, stored in the low bits of a u64.
pub type Elem = u64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    /// GF(2^t) as polynomials over GF(2) modulo `poly` (bit i = coeff of x^i).
    Binary { t: u32, poly: u32 },
    /// Prime field GF(p).
    Prime { p: u64 },
}

/// Multiplication in GF(2)[x] without reduction.
fn clmul(a: u32, b: u32) -> u64 {
    let mut acc = 0u64;
    let a = a as u64;
    let mut b = b;
    let mut shift = 0;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a << shift;
        }
        shift += 1;
        b >>= 1;
    }
    acc
}

fn poly_degree(p: u64) -> i32 {
    63 - p.leading_zeros() as i32
}

/// Remainder of a modulo m in GF(2)[x].
fn poly_mod(mut a: u64, m: u64) -> u64 {
    let dm = poly_degree(m);
    while a != 0 && poly_degree(a) >= dm {
        a ^= m << (poly_degree(a) - dm);
    }
    a
}

/// Irreducibility over GF(2) by trial division up to degree t/2.
fn is_irreducible(p: u32, t: u32) -> bool {
    if t == 0 {
        return false;
    }
    for d in 1..=(t / 2) {
        for q in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_mod(p as u64, q as u64) == 0 {
                return false;
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldError {
    DegreeOutOfRange(u32),
    NotPrime(u64),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::DegreeOutOfRange(t) => write!(f, "degree {t} outside 1..=16"),
            FieldError::NotPrime(p) => write!(f, "{p} is not prime"),
        }
    }
}

/// GF(2^t) with the lexicographically smallest irreducible modulus of
/// degree t (coefficient vectors read as binary numbers).
pub fn build_field(t: u32) -> Result<Field, FieldError> {
    if !(1..=16).contains(&t) {
        return Err(FieldError::DegreeOutOfRange(t));
    }
    let lo = 1u32 << t;
    let hi = 1u32 << (t + 1);
    for p in lo..hi {
        if is_irreducible(p, t) {
            return Ok(Field::Binary { t, poly: p });
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_field(p: u64) -> Result<Field, FieldError> {
    if is_prime(p) {
        Ok(Field::Prime { p })
    } else {
        Err(FieldError::NotPrime(p))
    }
}

impl Field {
    pub fn size(&self) -> u64 {
        match self {
            Field::Binary { t, .. } => 1u64 << t,
            Field::Prime { p } => *p,
        }
    }

    pub fn contains(&self, a: Elem) -> bool {
        a < self.size()
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match self {
            Field::Binary { .. } => a ^ b,
            Field::Prime { p } => (a + b) % p,
        }
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        match self {
            Field::Binary { .. } => a ^ b,
            Field::Prime { p } => (a + p - b) % p,
        }
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match self {
            Field::Binary { poly, .. } => poly_mod(clmul(a as u32, b as u32), *poly as u64),
            Field::Prime { p } => ((a as u128 * b as u128) % *p as u128) as u64,
        }
    }

    pub fn pow(&self, mut a: Elem, mut e: u64) -> Elem {
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Elem) -> Elem {
        assert!(a != 0, "zero has no inverse");
        self.pow(a, self.size() - 2)
    }

    pub fn div(&self, a: Elem, b: Elem) -> Elem {
        self.mul(a, self.inv(b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RSCode {
    pub field: Field,
    pub eval_points: Vec<Elem>,
    pub checksum_points: Vec<Elem>,
    /// Degree bound d <= n kept for documentation of the code family; the
    /// interpolation routines always use degree < n.
    pub degree_bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeError {
    PointsNotDistinct,
    TooManyPoints { needed: u64, size: u64 },
    BadDegree,
    DimensionMismatch { expected: usize, got: usize },
    DuplicatePoint(Elem),
    TooManyErasures { erased: usize, budget: usize },
    InconsistentData,
    PointOutsideField(Elem),
}

impl fmt::Display for CodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeError::PointsNotDistinct => f.write_str("evaluation/checksum points collide"),
            CodeError::TooManyPoints { needed, size } => {
                write!(f, "need {needed} distinct points but the field has {size}")
            }
            CodeError::BadDegree => f.write_str("degree bound exceeds the point count"),
            CodeError::DimensionMismatch { expected, got } => {
                write!(f, "expected {expected} values, got {got}")
            }
            CodeError::DuplicatePoint(x) => write!(f, "stream point {x} repeated or out of order"),
            CodeError::TooManyErasures { erased, budget } => {
                write!(f, "{erased} erasures exceed the checksum budget {budget}")
            }
            CodeError::InconsistentData => {
                f.write_str("known values and checksums do not lie on one low-degree polynomial")
            }
            CodeError::PointOutsideField(x) => write!(f, "point {x} outside the field"),
        }
    }
}

impl RSCode {
    pub fn new(
        field: Field,
        eval_points: Vec<Elem>,
        checksum_points: Vec<Elem>,
        degree_bound: usize,
    ) -> Result<Self, CodeError> {
        let n = eval_points.len();
        let d = checksum_points.len();
        let needed = (n + d) as u64;
        if needed > field.size() {
            return Err(CodeError::TooManyPoints { needed, size: field.size() });
        }
        if degree_bound > n {
            return Err(CodeError::BadDegree);
        }
        let mut all: Vec<Elem> = Vec::with_capacity(n + d);
        for &x in eval_points.iter().chain(checksum_points.iter()) {
            if !field.contains(x) {
                return Err(CodeError::PointOutsideField(x));
            }
            if all.contains(&x) {
                return Err(CodeError::PointsNotDistinct);
            }
            all.push(x);
        }
        Ok(RSCode { field, eval_points, checksum_points, degree_bound })
    }

    /// Canonical code over GF(2^t): evaluation points 0..n-1, checksum
    /// points n..n+D-1 (as field elements).
    pub fn canonical(t: u32, n: usize, d_checksums: usize) -> Result<Self, CodeError> {
        let field = build_field(t).map_err(|_| CodeError::BadDegree)?;
        let eval = (0..n as u64).collect();
        let chk = (n as u64..(n + d_checksums) as u64).collect();
        RSCode::new(field, eval, chk, n)
    }

    pub fn n(&self) -> usize {
        self.eval_points.len()
    }

    pub fn d(&self) -> usize {
        self.checksum_points.len()
    }
}

/// Evaluate at `x` the unique low-degree interpolant through `pairs`
/// (direct Lagrange formula).
pub fn lagrange_eval(field: &Field, pairs: &[(Elem, Elem)], x: Elem) -> Elem {
    let mut acc = 0;
    for (i, &(xi, yi)) in pairs.iter().enumerate() {
        let mut num = 1;
        let mut den = 1;
        for (j, &(xj, _)) in pairs.iter().enumerate() {
            if i != j {
                num = field.mul(num, field.sub(x, xj));
                den = field.mul(den, field.sub(xi, xj));
            }
        }
        acc = field.add(acc, field.mul(yi, field.div(num, den)));
    }
    acc
}

/// Direct checksums: `c_j = P(a_j)` for the interpolant P through
/// `(x_i, values_i)`.
pub fn rs_checksums(code: &RSCode, values: &[Elem]) -> Result<Vec<Elem>, CodeError> {
    if values.len() != code.n() {
        return Err(CodeError::DimensionMismatch { expected: code.n(), got: values.len() });
    }
    let pairs: Vec<(Elem, Elem)> =
        code.eval_points.iter().copied().zip(values.iter().copied()).collect();
    Ok(code
        .checksum_points
        .iter()
        .map(|&a| lagrange_eval(&code.field, &pairs, a))
        .collect())
}

/// Streaming checksum state: two field elements per checksum point.
///
/// For each checksum point `a` the state holds the running residues
/// `s = S_i mod (x-a)` and `q = Q_i mod (x-a)`, where
/// `Q_i = prod_{j<=i} (x - x_j)` and `S_i = sum_{j<=i} eta_j w_j / (x - x_j)`
/// with the static Lagrange weights `w_j = prod_{l != j} (x_j - x_l)^{-1}`
/// taken over the code's full point list. The final checksum is `q * s`.
/// The weights depend only on the code, not on the stream, so the mutable
/// state per point is exactly the two residues.
pub struct StreamChecksums<'a> {
    code: &'a RSCode,
    weights: Vec<Elem>,
    next: usize,
    state: Vec<(Elem, Elem)>,
}

impl<'a> StreamChecksums<'a> {
    pub fn new(code: &'a RSCode) -> Self {
        let f = &code.field;
        let weights = code
            .eval_points
            .iter()
            .map(|&xj| {
                let mut den = 1;
                for &xl in &code.eval_points {
                    if xl != xj {
                        den = f.mul(den, f.sub(xj, xl));
                    }
                }
                f.inv(den)
            })
            .collect();
        let state = vec![(0, 1); code.d()];
        StreamChecksums { code, weights, next: 0, state }
    }

    /// Feed the next `(x_i, eta_i)` pair; points must arrive in code order.
    pub fn push(&mut self, x: Elem, eta: Elem) -> Result<(), CodeError> {
        if self.next >= self.code.n() {
            return Err(CodeError::DimensionMismatch {
                expected: self.code.n(),
                got: self.next + 1,
            });
        }
        if self.code.eval_points[self.next] != x {
            return Err(CodeError::DuplicatePoint(x));
        }
        let f = &self.code.field;
        let w = self.weights[self.next];
        for (k, &a) in self.code.checksum_points.iter().enumerate() {
            let (s, q) = self.state[k];
            let term = f.div(f.mul(eta, w), f.sub(a, x));
            self.state[k] = (f.add(s, term), f.mul(q, f.sub(a, x)));
        }
        self.next += 1;
        Ok(())
    }

    /// Residue pairs per checksum point (state inspection).
    pub fn residues(&self) -> &[(Elem, Elem)] {
        &self.state
    }

    pub fn finish(self) -> Result<Vec<Elem>, CodeError> {
        if self.next != self.code.n() {
            return Err(CodeError::DimensionMismatch { expected: self.code.n(), got: self.next });
        }
        let f = &self.code.field;
        Ok(self.state.iter().map(|&(s, q)| f.mul(q, s)).collect())
    }
}

/// Streaming checksums over a complete stream; equals [`rs_checksums`].
pub fn rs_stream_checksums(
    code: &RSCode,
    stream: impl IntoIterator<Item = (Elem, Elem)>,
) -> Result<Vec<Elem>, CodeError> {
    let mut st = StreamChecksums::new(code);
    for (x, eta) in stream {
        st.push(x, eta)?;
    }
    st.finish()
}

/// Recover the full value vector from a subset of known `(position, value)`
/// pairs (positions index `eval_points`) plus the checksum vector.
pub fn rs_erasure_decode(
    code: &RSCode,
    known: &[(usize, Elem)],
    checksums: &[Elem],
) -> Result<Vec<Elem>, CodeError> {
    if checksums.len() != code.d() {
        return Err(CodeError::DimensionMismatch { expected: code.d(), got: checksums.len() });
    }
    let n = code.n();
    let mut have = vec![None; n];
    for &(pos, v) in known {
        if pos >= n {
            return Err(CodeError::PointOutsideField(pos as u64));
        }
        if have[pos].is_some() {
            return Err(CodeError::DuplicatePoint(code.eval_points[pos]));
        }
        have[pos] = Some(v);
    }
    let erased: Vec<usize> = (0..n).filter(|&i| have[i].is_none()).collect();
    if erased.len() > code.d() {
        return Err(CodeError::TooManyErasures { erased: erased.len(), budget: code.d() });
    }
    // Interpolation support: all known pairs plus as many checksum pairs as
    // needed to reach n points; the remaining pairs become consistency checks.
    let mut support: Vec<(Elem, Elem)> = (0..n)
        .filter_map(|i| have[i].map(|v| (code.eval_points[i], v)))
        .collect();
    let mut check_pairs: Vec<(Elem, Elem)> = Vec::new();
    for (k, &a) in code.checksum_points.iter().enumerate() {
        if support.len() < n {
            support.push((a, checksums[k]));
        } else {
            check_pairs.push((a, checksums[k]));
        }
    }
    for &(x, y) in &check_pairs {
        if lagrange_eval(&code.field, &support, x) != y {
            return Err(CodeError::InconsistentData);
        }
    }
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        match have[i] {
            Some(v) => out.push(v),
            None => out.push(lagrange_eval(&code.field, &support, code.eval_points[i])),
        }
    }
    Ok(out)
}

/// Per-level report for the substitution-family parameter inequality
/// `4 log2 N_{k+1} <= eps_k * N_k^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilyReport {
    pub levels: Vec<FamilyLevel>,
    pub eps_sum: f64,
    pub eps_target: f64,
    pub eps_sum_ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilyLevel {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

impl FamilyReport {
    pub fn all_ok(&self) -> bool {
        self.eps_sum_ok && self.levels.iter().all(|l| l.ok)
    }
}

fn log2_u64(n: u64) -> f64 {
    assert!(n > 0);
    if n.is_power_of_two() {
        n.trailing_zeros() as f64
    } else {
        log2_f64(n as f64)
    }
}

// f64::log2 lives in std; this suffices for the validator (relative error
// well under 1e-12 on the mantissa series).
fn log2_f64(x: f64) -> f64 {
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let mant = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | 0x3ff0_0000_0000_0000);
    // mant in [1,2): ln(mant) = 2 atanh((m-1)/(m+1)).
    let z = (mant - 1.0) / (mant + 1.0);
    let z2 = z * z;
    let mut term = z;
    let mut ln = 0.0;
    for k in 0..28 {
        ln += term / (2 * k + 1) as f64;
        term *= z2;
    }
    ln *= 2.0;
    exp as f64 + ln / core::f64::consts::LN_2
}

/// Check `4 log N_{k+1} <= eps_k N_k^2` level by level, plus the total
/// `sum eps_k < eps_target`.
pub fn validate_family_parameters(ns: &[u64], eps: &[f64], eps_target: f64) -> FamilyReport {
    let mut levels = Vec::new();
    let kmax = eps.len().min(ns.len().saturating_sub(1));
    for k in 0..kmax {
        let lhs = 4.0 * log2_u64(ns[k + 1]);
        let rhs = eps[k] * (ns[k] as f64) * (ns[k] as f64);
        levels.push(FamilyLevel { k, lhs, rhs, ok: lhs <= rhs });
    }
    let eps_sum: f64 = eps.iter().sum();
    FamilyReport { levels, eps_sum, eps_target, eps_sum_ok: eps_sum < eps_target }
}

/// Render a vector of field elements as fixed-width big-endian hex.
pub fn to_hex(field: &Field, v: &[Elem]) -> String {
    let width = (((64 - (field.size() - 1).leading_zeros()) as usize) + 3) / 4;
    let width = width.max(1);
    let mut s = String::new();
    for (i, e) in v.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        s.push_str(&format!("{e:0width$x}"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::Counter;

    #[test]
    fn canonical_polys() {
        assert_eq!(build_field(1).unwrap(), Field::Binary { t: 1, poly: 0b10 });
        // Exhaustive check that 0b10011 (x^4+x+1) is the first irreducible
        // of degree 4.
        for p in 0b10000u32..0b10011 {
            assert!(!is_irreducible(p, 4), "{p:b} unexpectedly irreducible");
        }
        assert_eq!(build_field(4).unwrap(), Field::Binary { t: 4, poly: 0b10011 });
        assert_eq!(build_field(8).unwrap(), Field::Binary { t: 8, poly: 0x11b });
    }

    #[test]
    fn field_axioms_gf16_exhaustive() {
        let f = build_field(4).unwrap();
        for a in 0..16u64 {
            for b in 0..16u64 {
                assert_eq!(f.mul(a, b), f.mul(b, a));
                assert_eq!(f.add(a, b), f.add(b, a));
                for c in 0..16u64 {
                    assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
                if b != 0 {
                    assert_eq!(f.mul(f.div(a, b), b), a);
                }
            }
        }
    }

    #[test]
    fn field_inverse_sampled_gf256() {
        let f = build_field(8).unwrap();
        let mut c = Counter::new(99);
        for _ in 0..1000 {
            let g = 1 + c.next_below(255);
            assert_eq!(f.mul(g, f.inv(g)), 1);
        }
    }

    #[test]
    fn distinct_low_degree_polys_agree_rarely() {
        // Over GF(8), two distinct polynomials of degree < d agree on at
        // most d-1 points, checked exhaustively for d <= 3.
        let f = build_field(3).unwrap();
        let evals = |coef: &[u64]| -> Vec<u64> {
            (0..8u64)
                .map(|x| {
                    let mut acc = 0;
                    for (i, &c) in coef.iter().enumerate() {
                        acc = f.add(acc, f.mul(c, f.pow(x, i as u64)));
                    }
                    acc
                })
                .collect()
        };
        for d in 1..=3usize {
            let count = 8u64.pow(d as u32);
            for pa in 0..count {
                for pb in (pa + 1)..count {
                    let dig = |mut v: u64| -> Vec<u64> {
                        (0..d)
                            .map(|_| {
                                let r = v % 8;
                                v /= 8;
                                r
                            })
                            .collect()
                    };
                    let (ca, cb) = (dig(pa), dig(pb));
                    let agree = evals(&ca)
                        .iter()
                        .zip(evals(&cb))
                        .filter(|(x, y)| **x == *y)
                        .count();
                    assert!(agree <= d - 1, "{ca:?} vs {cb:?} agree on {agree}");
                }
            }
        }
    }

    #[test]
    fn checksums_gf5_hand_example() {
        let f = prime_field(5).unwrap();
        let code = RSCode::new(f, vec![1, 2], vec![3], 2).unwrap();
        // Values (1,2) at points (1,2) come from P(x) = x, so P(3) = 3.
        assert_eq!(rs_checksums(&code, &[1, 2]).unwrap(), vec![3]);
    }

    #[test]
    fn checksums_of_constants_and_linearity() {
        let code = RSCode::canonical(8, 12, 4).unwrap();
        let f = code.field;
        let v = vec![7u64; 12];
        assert_eq!(rs_checksums(&code, &v).unwrap(), vec![7; 4]);

        let mut c = Counter::new(5);
        let a: Vec<Elem> = (0..12).map(|_| c.next_below(256)).collect();
        let b: Vec<Elem> = (0..12).map(|_| c.next_below(256)).collect();
        let sum: Vec<Elem> = a.iter().zip(&b).map(|(x, y)| f.add(*x, *y)).collect();
        let ca = rs_checksums(&code, &a).unwrap();
        let cb = rs_checksums(&code, &b).unwrap();
        let cs = rs_checksums(&code, &sum).unwrap();
        for i in 0..4 {
            assert_eq!(cs[i], f.add(ca[i], cb[i]));
        }
    }

    #[test]
    fn stream_equals_direct_on_random_corpus() {
        let code = RSCode::canonical(8, 20, 6).unwrap();
        for inst in 0..200u64 {
            let mut c = Counter::new(1000 + inst);
            let vals: Vec<Elem> = (0..20).map(|_| c.next_below(256)).collect();
            let direct = rs_checksums(&code, &vals).unwrap();
            let streamed = rs_stream_checksums(
                &code,
                code.eval_points.iter().copied().zip(vals.iter().copied()),
            )
            .unwrap();
            assert_eq!(direct, streamed, "instance {inst}");
        }
    }

    #[test]
    fn stream_state_is_two_residues_per_point() {
        let code = RSCode::canonical(8, 20, 6).unwrap();
        let mut st = StreamChecksums::new(&code);
        for i in 0..20u64 {
            st.push(i, i * 3 % 256).unwrap();
            assert_eq!(st.residues().len(), 6);
        }
    }

    #[test]
    fn stream_single_point_gives_constant() {
        let code = RSCode::canonical(4, 1, 3).unwrap();
        let out = rs_stream_checksums(&code, [(0u64, 9u64)]).unwrap();
        assert_eq!(out, vec![9, 9, 9]);
    }

    #[test]
    fn erasure_decode_roundtrip() {
        let code = RSCode::canonical(8, 20, 6).unwrap();
        let mut c = Counter::new(77);
        let truth: Vec<Elem> = (0..20).map(|_| c.next_below(256)).collect();
        let sums = rs_checksums(&code, &truth).unwrap();

        // e = 0: identity.
        let known: Vec<(usize, Elem)> = truth.iter().copied().enumerate().collect();
        assert_eq!(rs_erasure_decode(&code, &known, &sums).unwrap(), truth);

        // 100 sampled 6-erasure patterns: exact recovery.
        for pat in 0..100u64 {
            let mut c = Counter::new(4000 + pat);
            let mut erased = alloc::collections::BTreeSet::new();
            while erased.len() < 6 {
                erased.insert(c.next_below(20) as usize);
            }
            let known: Vec<(usize, Elem)> = (0..20)
                .filter(|i| !erased.contains(i))
                .map(|i| (i, truth[i]))
                .collect();
            assert_eq!(rs_erasure_decode(&code, &known, &sums).unwrap(), truth);
        }

        // e = 7: over budget.
        let known: Vec<(usize, Elem)> = (7..20).map(|i| (i, truth[i])).collect();
        assert_eq!(
            rs_erasure_decode(&code, &known, &sums).unwrap_err(),
            CodeError::TooManyErasures { erased: 7, budget: 6 }
        );
    }

    #[test]
    fn erasure_decode_detects_corruption() {
        let code = RSCode::canonical(8, 8, 4).unwrap();
        let truth: Vec<Elem> = (0..8).map(|i| (i * i + 1) % 256).collect();
        let mut sums = rs_checksums(&code, &truth).unwrap();
        sums[3] ^= 1;
        // Only 1 erasure, so 3 checksum pairs are spare and the corruption
        // of the last one is caught.
        let known: Vec<(usize, Elem)> = (1..8).map(|i| (i, truth[i])).collect();
        assert_eq!(
            rs_erasure_decode(&code, &known, &sums).unwrap_err(),
            CodeError::InconsistentData
        );
    }

    #[test]
    fn family_validator() {
        // N_k = 2^{k+c}, eps_k chosen at the equality margin.
        let c = 10u32;
        let ns: Vec<u64> = (0..8u32).map(|k| 1u64 << (k + c)).collect();
        let eps: Vec<f64> = (0..7u32)
            .map(|k| 4.0 * ((k + 1 + c) as f64) / ((ns[k as usize] * ns[k as usize]) as f64))
            .collect();
        let rep = validate_family_parameters(&ns, &eps, 0.01);
        assert!(rep.all_ok(), "{rep:?}");

        // N_k = k+2 grows too slowly.
        let ns: Vec<u64> = (0..8u64).map(|k| k + 2).collect();
        let eps = vec![0.01; 7];
        let rep = validate_family_parameters(&ns, &eps, 0.01);
        assert!(rep.levels.iter().any(|l| !l.ok));

        // Empty: vacuous pass.
        assert!(validate_family_parameters(&[], &[], 0.01).all_ok());
    }

    #[test]
    fn log2_is_accurate() {
        for x in [1u64, 2, 3, 5, 7, 100, 1023, 1024, 1 << 40] {
            let got = log2_u64(x);
            let want = (x as f64).log2();
            assert!((got - want).abs() < 1e-9, "{x}: {got} vs {want}");
        }
    }

    #[test]
    fn code_invariants_enforced() {
        let f = prime_field(5).unwrap();
        assert_eq!(
            RSCode::new(f, vec![1, 2, 3], vec![3], 2).unwrap_err(),
            CodeError::PointsNotDistinct
        );
        assert_eq!(
            RSCode::new(f, vec![0, 1, 2, 3], vec![4, 5], 2).unwrap_err(),
            CodeError::TooManyPoints { needed: 6, size: 5 }
        );
    }

    #[test]
    fn hex_rendering() {
        let f = build_field(8).unwrap();
        assert_eq!(to_hex(&f, &[0, 255, 16]), "00 ff 10");
    }
}
