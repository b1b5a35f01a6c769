//! Truncated p-adic integers `Z/p^k`, Teichmüller lifts and Morita's p-adic
//! gamma function with its standard identities.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::arith::{gcd, inv_mod, is_prime, mul_mod, reduce};
use crate::error::{Error, Result};

/// Largest admissible `p^k`.
pub const MAX_PADIC_MODULUS: u64 = 1 << 62;

fn check_prime(p: u64) -> Result<()> {
    if p < 3 || !is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(())
}

fn modulus_of(p: u64, k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidArgument("precision k must be ≥ 1".into()));
    }
    (p as u128)
        .checked_pow(k)
        .filter(|&m| m <= MAX_PADIC_MODULUS as u128)
        .map(|m| m as u64)
        .ok_or_else(|| Error::InvalidArgument(format!("{p}^{k} exceeds {MAX_PADIC_MODULUS}")))
}

/// An element of `Z/p^k`. Binary operations on mixed precisions work at
/// the smaller precision, which the result carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PadicInt {
    p: u64,
    k: u32,
    residue: u64,
    modulus: u64,
}

impl PadicInt {
    pub fn new(p: u64, k: u32, value: i128) -> Result<Self> {
        check_prime(p)?;
        let modulus = modulus_of(p, k)?;
        Ok(PadicInt { p, k, residue: reduce(value, modulus), modulus })
    }

    fn raw(p: u64, k: u32, modulus: u64, value: i128) -> Self {
        PadicInt { p, k, residue: reduce(value, modulus), modulus }
    }

    pub fn one(p: u64, k: u32) -> Result<Self> {
        Self::new(p, k, 1)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.k
    }

    pub fn residue(&self) -> u64 {
        self.residue
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Residue in `(−p^k/2, p^k/2]`.
    pub fn signed(&self) -> i128 {
        let r = self.residue as i128;
        if 2 * r > self.modulus as i128 {
            r - self.modulus as i128
        } else {
            r
        }
    }

    pub fn is_unit(&self) -> bool {
        self.residue % self.p != 0
    }

    /// `min(v_p(residue), k)`.
    pub fn valuation(&self) -> u32 {
        if self.residue == 0 {
            return self.k;
        }
        let mut r = self.residue;
        let mut v = 0;
        while r % self.p == 0 {
            r /= self.p;
            v += 1;
        }
        v
    }

    /// Reduces to precision `k ≤ self.k`.
    pub fn truncate(&self, k: u32) -> Result<Self> {
        if k > self.k || k == 0 {
            return Err(Error::InvalidArgument(format!("cannot move from precision {} to {k}", self.k)));
        }
        let modulus = modulus_of(self.p, k)?;
        Ok(Self::raw(self.p, k, modulus, self.residue as i128))
    }

    fn align(self, other: Self) -> (Self, Self) {
        assert_eq!(self.p, other.p, "mixing different primes");
        match self.k.cmp(&other.k) {
            std::cmp::Ordering::Less => (self, other.truncate(self.k).expect("smaller")),
            std::cmp::Ordering::Greater => (self.truncate(other.k).expect("smaller"), other),
            std::cmp::Ordering::Equal => (self, other),
        }
    }

    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotUnit { value: self.residue as i64, p: self.p });
        }
        let r = inv_mod(self.residue, self.modulus).expect("unit");
        Ok(Self::raw(self.p, self.k, self.modulus, r as i128))
    }

    pub fn div(&self, other: Self) -> Result<Self> {
        Ok(*self * other.inv()?)
    }

    /// Integer power; negative exponents need a unit.
    pub fn pow(&self, e: i128) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { *self };
        let mut e = e.unsigned_abs();
        let mut acc = 1u64 % self.modulus;
        let mut b = base.residue;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul_mod(acc, b, self.modulus);
            }
            b = mul_mod(b, b, self.modulus);
            e >>= 1;
        }
        Ok(Self::raw(self.p, self.k, self.modulus, acc as i128))
    }

    pub fn lift_int(&self, value: i128) -> Self {
        Self::raw(self.p, self.k, self.modulus, value)
    }
}

impl fmt::Display for PadicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mod {}^{}", self.residue, self.p, self.k)
    }
}

impl Add for PadicInt {
    type Output = PadicInt;
    fn add(self, rhs: Self) -> Self {
        let (a, b) = self.align(rhs);
        Self::raw(a.p, a.k, a.modulus, a.residue as i128 + b.residue as i128)
    }
}

impl Sub for PadicInt {
    type Output = PadicInt;
    fn sub(self, rhs: Self) -> Self {
        let (a, b) = self.align(rhs);
        Self::raw(a.p, a.k, a.modulus, a.residue as i128 - b.residue as i128)
    }
}

impl Mul for PadicInt {
    type Output = PadicInt;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = self.align(rhs);
        Self::raw(a.p, a.k, a.modulus, mul_mod(a.residue, b.residue, a.modulus) as i128)
    }
}

impl Neg for PadicInt {
    type Output = PadicInt;
    fn neg(self) -> Self {
        Self::raw(self.p, self.k, self.modulus, -(self.residue as i128))
    }
}

/// A rational number `a/b` with `b` prime to `p`, i.e. an element of `Z_(p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RationalInZp {
    num: i64,
    den: i64,
}

impl RationalInZp {
    pub fn new(num: i64, den: i64, p: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = -num;
            den = -den;
        }
        if den as u64 % p == 0 {
            return Err(Error::NotUnit { value: den, p });
        }
        Ok(RationalInZp { num, den })
    }

    pub fn integer(n: i64) -> Self {
        RationalInZp { num: n, den: 1 }
    }

    /// Parses `"a"` or `"a/b"`.
    pub fn parse(s: &str, p: u64) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse {s:?} as a rational"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?),
            None => (s.trim().parse().map_err(|_| bad())?, 1),
        };
        Self::new(n, d, p)
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn denom(&self) -> i64 {
        self.den
    }

    pub fn to_padic(&self, p: u64, k: u32) -> Result<PadicInt> {
        let one = PadicInt::one(p, k)?;
        one.lift_int(self.num as i128).div(one.lift_int(self.den as i128))
    }

    /// Representative of `x mod p` in `{1, …, p}`.
    pub fn r_value(&self, p: u64) -> Result<u64> {
        let r = self.to_padic(p, 1)?.residue();
        Ok(if r == 0 { p } else { r })
    }

    pub fn scale(&self, m: i64) -> Self {
        let (n, d) = (self.num * m, self.den);
        let g = gcd(n.unsigned_abs(), d as u64).max(1) as i64;
        RationalInZp { num: n / g, den: d / g }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.num * other.den + other.num * self.den;
        let d = self.den * other.den;
        let g = gcd(n.unsigned_abs(), d as u64).max(1) as i64;
        RationalInZp { num: n / g, den: d / g }
    }
}

impl fmt::Display for RationalInZp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// Teichmüller lift `ω(x)`: the `(p−1)`-st root of unity congruent to `x` mod `p`.
pub fn teichmuller(p: u64, k: u32, x: i64) -> Result<PadicInt> {
    let base = PadicInt::new(p, k, x as i128)?;
    if !base.is_unit() {
        return Err(Error::NotUnit { value: x, p });
    }
    let omega = base.pow((p as i128).pow(k - 1))?;
    debug_assert_eq!(omega.pow(p as i128 - 1)?.residue(), 1);
    Ok(omega)
}

/// Restricted-factorial value `f(n) = (−1)^n Π_{1≤j<n, p∤j} j` mod `p^k`.
fn restricted_factorial(p: u64, modulus: u64, n: u64) -> u64 {
    let mut acc = 1u64 % modulus;
    for j in 1..n {
        if j % p != 0 {
            acc = mul_mod(acc, j % modulus, modulus);
        }
    }
    if n % 2 == 1 {
        (modulus - acc) % modulus
    } else {
        acc
    }
}

/// The integer `n ≡ x mod p^k` with `2 ≤ n < 2 + p^k`.
fn integer_representative(p: u64, k: u32, x: RationalInZp) -> Result<u64> {
    let r = x.to_padic(p, k)?;
    let m = r.modulus();
    Ok(if r.residue() < 2 { r.residue() + m } else { r.residue() })
}

/// Morita's `Γ_p(x)` mod `p^k`.
pub fn padic_gamma(p: u64, k: u32, x: RationalInZp) -> Result<PadicInt> {
    let n = integer_representative(p, k, x)?;
    let one = PadicInt::one(p, k)?;
    Ok(one.lift_int(restricted_factorial(p, one.modulus(), n) as i128))
}

/// Prefix products `Π_{1≤j<n, p∤j} j` for every `n ∈ [0, p^k + 2)`, so each
/// `Γ_p` value mod `p^k` is a lookup.
#[derive(Debug, Clone)]
pub struct GammaTable {
    p: u64,
    k: u32,
    prefix: Vec<u64>,
}

/// Tables larger than this are refused.
pub const GAMMA_TABLE_LIMIT: u64 = 1 << 24;

impl GammaTable {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        check_prime(p)?;
        let m = modulus_of(p, k)?;
        if m > GAMMA_TABLE_LIMIT {
            return Err(Error::BudgetExceeded { needed: m as u128, limit: GAMMA_TABLE_LIMIT as u128 });
        }
        // prefix[n] = Π_{1≤j<n, p∤j} j
        let prefix = (0..m + 2)
            .scan(1 % m, |acc, n| {
                let out = *acc;
                if n >= 1 && n % p != 0 {
                    *acc = mul_mod(*acc, n % m, m);
                }
                Some(out)
            })
            .collect();
        Ok(GammaTable { p, k, prefix })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.k
    }

    pub fn gamma(&self, x: RationalInZp) -> Result<PadicInt> {
        let n = integer_representative(self.p, self.k, x)?;
        let one = PadicInt::one(self.p, self.k)?;
        let v = self.prefix[n as usize];
        Ok(one.lift_int(if n % 2 == 1 { -(v as i128) } else { v as i128 }))
    }
}

/// Both sides of an identity mod `p^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub lhs: PadicInt,
    pub rhs: PadicInt,
    pub holds: bool,
}

impl IdentityCheck {
    fn new(lhs: PadicInt, rhs: PadicInt) -> Self {
        IdentityCheck { lhs, rhs, holds: lhs == rhs }
    }
}

#[derive(Clone, Copy)]
enum GammaSource<'a> {
    Direct { p: u64, k: u32 },
    Table(&'a GammaTable),
}

impl GammaSource<'_> {
    fn p(&self) -> u64 {
        match self {
            GammaSource::Direct { p, .. } => *p,
            GammaSource::Table(t) => t.p,
        }
    }

    fn k(&self) -> u32 {
        match self {
            GammaSource::Direct { k, .. } => *k,
            GammaSource::Table(t) => t.k,
        }
    }

    fn gamma(&self, x: RationalInZp) -> Result<PadicInt> {
        match self {
            GammaSource::Direct { p, k } => padic_gamma(*p, *k, x),
            GammaSource::Table(t) => t.gamma(x),
        }
    }

    fn shift(&self, x: RationalInZp) -> Result<IdentityCheck> {
        let lhs = self.gamma(x.add(&RationalInZp::integer(1)))?;
        let g = self.gamma(x)?;
        let xp = x.to_padic(self.p(), self.k())?;
        let rhs = if xp.is_unit() { -(xp * g) } else { -g };
        Ok(IdentityCheck::new(lhs, rhs))
    }

    fn reflection(&self, x: RationalInZp) -> Result<(IdentityCheck, u64)> {
        let (p, k) = (self.p(), self.k());
        let one_minus = RationalInZp::integer(1).add(&x.scale(-1));
        let lhs = self.gamma(x)? * self.gamma(one_minus)?;
        let r = x.r_value(p)?;
        let rhs = PadicInt::new(p, k, if r % 2 == 0 { 1 } else { -1 })?;
        Ok((IdentityCheck::new(lhs, rhs), r))
    }

    fn multiplication(&self, m: i64, x: RationalInZp) -> Result<IdentityCheck> {
        let (p, k) = (self.p(), self.k());
        if m <= 0 || gcd(m as u64, p) != 1 {
            return Err(Error::InvalidArgument(format!("m = {m} must be a positive integer prime to {p}")));
        }
        let mut lhs = PadicInt::one(p, k)?;
        let mut eps = PadicInt::one(p, k)?;
        for j in 0..m {
            let jm = RationalInZp::new(j, m, p)?;
            lhs = lhs * self.gamma(x.add(&jm))?;
            eps = eps * self.gamma(jm)?;
        }
        let mx = x.scale(m);
        let r = mx.r_value(p)?;
        let mp = PadicInt::new(p, k, m as i128)?;
        // s(mx) = (R·den − num) / (p·den); the numerator is divisible by p
        let top = r as i128 * mx.denom() as i128 - mx.numer() as i128;
        debug_assert_eq!(top % p as i128, 0);
        // m^{p−1} ≡ 1 mod p, so its s-th power only needs s mod p^{k−1}
        let unit_power = if k == 1 {
            PadicInt::one(p, k)?
        } else {
            let s = PadicInt::new(p, k - 1, top / p as i128)?.div(PadicInt::new(p, k - 1, mx.denom() as i128)?)?;
            mp.pow(p as i128 - 1)?.pow(s.residue() as i128)?
        };
        let rhs = eps * mp.pow(1 - r as i128)? * unit_power * self.gamma(mx)?;
        Ok(IdentityCheck::new(lhs, rhs))
    }
}

impl GammaTable {
    pub fn shift(&self, x: RationalInZp) -> Result<IdentityCheck> {
        GammaSource::Table(self).shift(x)
    }

    pub fn reflection(&self, x: RationalInZp) -> Result<(IdentityCheck, u64)> {
        GammaSource::Table(self).reflection(x)
    }

    pub fn multiplication(&self, m: i64, x: RationalInZp) -> Result<IdentityCheck> {
        GammaSource::Table(self).multiplication(m, x)
    }
}

/// `Γ_p(x+1)` against `−x Γ_p(x)` (p ∤ x) or `−Γ_p(x)` (p | x).
pub fn gamma_shift(p: u64, k: u32, x: RationalInZp) -> Result<IdentityCheck> {
    GammaSource::Direct { p, k }.shift(x)
}

/// `Γ_p(x) Γ_p(1−x)` against `(−1)^{R(x)}`; also returns `R(x) ∈ {1..p}`.
pub fn gamma_reflection(p: u64, k: u32, x: RationalInZp) -> Result<(IdentityCheck, u64)> {
    GammaSource::Direct { p, k }.reflection(x)
}

/// Gauss multiplication:
/// `Π_{j<m} Γ_p(x + j/m) = ε_m · m^{1−R(mx)} · (m^{p−1})^{s(mx)} · Γ_p(mx)`,
/// `ε_m = Π_{j<m} Γ_p(j/m)`, `s(y) = (R(y) − y)/p`.
pub fn gauss_multiplication(p: u64, k: u32, m: i64, x: RationalInZp) -> Result<IdentityCheck> {
    GammaSource::Direct { p, k }.multiplication(m, x)
}

/// Base-`p` digit sum of `a` and its `f` cyclic digit rotations `p^j a mod (p^f − 1)`.
pub fn digit_sum_and_rotations(p: u64, f: u32, a: u64) -> Result<(u64, Vec<u64>)> {
    check_prime(p)?;
    let qm1 = (p as u128).checked_pow(f).map(|q| q - 1).filter(|&q| q <= u64::MAX as u128);
    let qm1 = qm1.ok_or_else(|| Error::InvalidArgument(format!("{p}^{f} too large")))? as u64;
    if f == 0 || a >= qm1 {
        return Err(Error::InvalidArgument(format!("need 0 ≤ a < {p}^{f} − 1, got {a}")));
    }
    let mut digits = Vec::new();
    let mut r = a;
    for _ in 0..f {
        digits.push(r % p);
        r /= p;
    }
    let rotations = (0..f)
        .map(|j| mul_mod(a, (p as u128).pow(j) as u64 % qm1, qm1))
        .collect();
    Ok((digits.iter().sum(), rotations))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> RationalInZp {
        RationalInZp::integer(n)
    }

    fn frac(a: i64, b: i64, p: u64) -> RationalInZp {
        RationalInZp::new(a, b, p).unwrap()
    }

    #[test]
    fn padic_arithmetic() {
        let a = PadicInt::new(5, 2, 7).unwrap();
        let b = PadicInt::new(5, 3, 3).unwrap();
        let c = a * b;
        assert_eq!((c.residue(), c.precision()), (21, 2));
        assert_eq!((a + b).residue(), 10);
        assert_eq!((-a).residue(), 18);
        assert_eq!(a.inv().unwrap().residue() * 7 % 25, 1);
        assert!(PadicInt::new(5, 2, 10).unwrap().inv().is_err());
        assert_eq!(PadicInt::new(5, 3, 50).unwrap().valuation(), 2);
        assert!(PadicInt::new(4, 2, 1).is_err());
        assert!(PadicInt::new(5, 0, 1).is_err());
        assert!(RationalInZp::new(1, 5, 5).is_err());
        assert_eq!(RationalInZp::parse("-2/4", 7).unwrap(), frac(-1, 2, 7));
    }

    #[test]
    fn teichmuller_examples() {
        assert_eq!(teichmuller(5, 2, 2).unwrap().residue(), 7);
        assert_eq!(teichmuller(11, 3, 1).unwrap().residue(), 1);
        assert_eq!(teichmuller(7, 3, 6).unwrap().residue(), 342);
        assert!(teichmuller(7, 2, 14).is_err());
    }

    #[test]
    fn teichmuller_exhaustive() {
        for p in [3u64, 5, 7, 11, 13] {
            for k in 1..=4 {
                for x in 1..p as i64 {
                    let w = teichmuller(p, k, x).unwrap();
                    assert_eq!(w.pow(p as i128 - 1).unwrap().residue(), 1);
                    assert_eq!(w.residue() % p, x as u64);
                }
            }
        }
    }

    #[test]
    fn gamma_examples() {
        for p in [5u64, 7, 11] {
            assert_eq!(padic_gamma(p, 3, int(0)).unwrap().signed(), 1);
            assert_eq!(padic_gamma(p, 3, int(1)).unwrap().signed(), -1);
            assert_eq!(padic_gamma(p, 3, int(2)).unwrap().signed(), 1);
        }
        assert_eq!(padic_gamma(7, 2, int(4)).unwrap().signed(), 6);
        let v = padic_gamma(5, 3, frac(1, 2, 5)).unwrap();
        let (check, r) = gamma_reflection(5, 3, frac(1, 2, 5)).unwrap();
        assert!(check.holds);
        let sign = if r % 2 == 0 { 1 } else { -1 };
        assert_eq!((v * v).signed(), sign);
        assert!(padic_gamma(5, 2, RationalInZp { num: 1, den: 5 }).is_err());
    }

    #[test]
    fn table_agrees_with_direct() {
        for p in [5u64, 7, 13] {
            for k in 1..=3 {
                let t = GammaTable::new(p, k).unwrap();
                for n in -20..200 {
                    assert_eq!(t.gamma(int(n)).unwrap(), padic_gamma(p, k, int(n)).unwrap());
                }
                for den in [2, 3, 4, 6] {
                    if den as u64 % p == 0 {
                        continue;
                    }
                    let x = frac(1, den, p);
                    assert_eq!(t.gamma(x).unwrap(), padic_gamma(p, k, x).unwrap());
                }
            }
        }
    }

    #[test]
    fn shift_examples() {
        let c = gamma_shift(5, 3, int(2)).unwrap();
        assert!(c.holds);
        assert_eq!(c.lhs.signed(), -2);
        assert!(gamma_shift(5, 3, int(5)).unwrap().holds);
        let c = gamma_shift(7, 2, int(0)).unwrap();
        assert!(c.holds);
        assert_eq!(c.lhs.signed(), -1);
    }

    #[test]
    fn reflection_examples() {
        let (c, r) = gamma_reflection(5, 3, int(2)).unwrap();
        assert!(c.holds);
        assert_eq!(r, 2);
        assert_eq!(c.lhs.signed(), 1);
        assert!(gamma_reflection(7, 3, frac(1, 2, 7)).unwrap().0.holds);
        let (c, r) = gamma_reflection(5, 3, int(0)).unwrap();
        assert_eq!(r, 5);
        assert_eq!(c.lhs.signed(), -1);
    }

    #[test]
    fn multiplication_examples() {
        assert!(gauss_multiplication(7, 3, 2, int(1)).unwrap().holds);
        assert!(gauss_multiplication(5, 3, 3, frac(1, 2, 5)).unwrap().holds);
        let c = gauss_multiplication(7, 3, 1, frac(2, 3, 7)).unwrap();
        assert!(c.holds);
        assert_eq!(c.lhs, padic_gamma(7, 3, frac(2, 3, 7)).unwrap());
        assert!(gauss_multiplication(7, 2, 7, int(1)).is_err());
    }

    #[test]
    fn precision_compatibility() {
        for p in [5u64, 7] {
            for k in 2..=4 {
                for n in 0..60 {
                    let hi = padic_gamma(p, k, int(n)).unwrap();
                    let lo = padic_gamma(p, k - 1, int(n)).unwrap();
                    assert_eq!(hi.truncate(k - 1).unwrap(), lo);
                    let pk = (p as i64).pow(k);
                    assert_eq!(padic_gamma(p, k, int(n + pk)).unwrap(), hi);
                }
            }
        }
    }

    #[test]
    fn table_identities_match_direct() {
        let t = GammaTable::new(7, 3).unwrap();
        for x in [int(0), int(5), int(7), frac(1, 2, 7), frac(-2, 3, 7)] {
            assert_eq!(t.shift(x).unwrap(), gamma_shift(7, 3, x).unwrap());
            assert_eq!(t.reflection(x).unwrap(), gamma_reflection(7, 3, x).unwrap());
            assert_eq!(t.multiplication(3, x).unwrap(), gauss_multiplication(7, 3, 3, x).unwrap());
        }
    }

    #[test]
    fn digit_examples() {
        assert_eq!(digit_sum_and_rotations(5, 1, 3).unwrap(), (3, vec![3]));
        assert_eq!(digit_sum_and_rotations(3, 2, 5).unwrap(), (3, vec![5, 7]));
        assert_eq!(digit_sum_and_rotations(7, 3, 0).unwrap(), (0, vec![0, 0, 0]));
        assert!(digit_sum_and_rotations(3, 2, 8).is_err());
    }
}
