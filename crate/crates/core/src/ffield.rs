//! Prime and extension fields `F_q`, `q = p^f`, with eager primitive-root,
//! discrete-log and trace tables.
//!
//! An element is stored as its *representation index*: the integer
//! `c_0 + c_1 p + ... + c_{f-1} p^{f-1}` of its coefficient vector modulo the
//! defining polynomial. For `f = 1` this is simply the residue. Every ordering
//! statement in this crate ("smallest generator", "smallest modulus") refers to
//! this index order.

use crate::arith::{inv_mod, is_prime, prime_factors, reduce};
use crate::error::{Error, Result};

/// Largest field order for which tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

/// An element of `F_q`, identified by its representation index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn index(self) -> u64 {
        self.0 as u64
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Immutable description of `F_q` together with its lookup tables.
#[derive(Debug, Clone)]
pub struct FieldSpec {
    p: u64,
    f: u32,
    q: u64,
    /// Monic modulus, low degree first; `None` for prime fields.
    modulus: Option<Vec<u64>>,
    generator: FieldElement,
    /// `exp[k] = g^k` for `0 <= k < q - 1`.
    exp: Vec<u32>,
    /// `log[x]` for `x != 0`; `log[0]` is unused.
    log: Vec<u32>,
    /// Absolute trace to `F_p`.
    trace: Vec<u32>,
}

impl FieldSpec {
    /// Builds `F_{p^f}`. When `f > 1` and no modulus is supplied, the smallest
    /// monic irreducible polynomial of degree `f` is used.
    pub fn new(p: u64, f: u32, modulus: Option<&[u64]>) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if f == 0 {
            return Err(Error::ZeroDegree);
        }
        let q = p
            .checked_pow(f)
            .filter(|&q| q <= MAX_FIELD_ORDER)
            .ok_or(Error::FieldTooLarge { p, f, limit: MAX_FIELD_ORDER })?;

        let modulus = if f == 1 {
            if let Some(m) = modulus {
                if m.len() > 2 || (m.len() == 2 && m[1] % p != 1) {
                    return Err(Error::InvalidModulus(
                        "prime fields take no modulus (or a monic linear one)".into(),
                    ));
                }
            }
            None
        } else {
            let m = match modulus {
                Some(m) => {
                    let m: Vec<u64> = m.to_vec();
                    if m.len() != f as usize + 1 || m[f as usize] != 1 || m.iter().any(|&c| c >= p) {
                        return Err(Error::InvalidModulus(format!(
                            "expected {} coefficients in [0, {p}) with leading coefficient 1",
                            f + 1
                        )));
                    }
                    if !poly::is_irreducible(&m, p) {
                        return Err(Error::ReducibleModulus(p));
                    }
                    m
                }
                None => poly::smallest_irreducible(p, f as usize),
            };
            Some(m)
        };

        let mut spec = FieldSpec {
            p,
            f,
            q,
            modulus,
            generator: FieldElement::ONE,
            exp: Vec::new(),
            log: Vec::new(),
            trace: Vec::new(),
        };
        spec.build_tables();
        Ok(spec)
    }

    /// `F_p` shorthand.
    pub fn prime(p: u64) -> Result<Self> {
        Self::new(p, 1, None)
    }

    fn build_tables(&mut self) {
        let order = self.q - 1;
        let factors = prime_factors(order);
        let generator = (1..self.q)
            .find(|&x| {
                factors
                    .iter()
                    .all(|&r| self.slow_pow(x, order / r) != 1)
            })
            .expect("the multiplicative group of a finite field is cyclic");
        self.generator = FieldElement(generator as u32);

        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![u32::MAX; self.q as usize];
        let mut x = 1u64;
        for k in 0..order {
            exp.push(x as u32);
            debug_assert_eq!(log[x as usize], u32::MAX, "generator has small order");
            log[x as usize] = k as u32;
            x = self.slow_mul(x, generator);
        }
        assert_eq!(x, 1, "g^(q-1) must be 1");
        self.exp = exp;
        self.log = log;

        let p = self.p;
        let f = self.f;
        let trace = (0..self.q)
            .map(|x| {
                let mut acc = FieldElement::ZERO;
                let mut y = FieldElement(x as u32);
                for _ in 0..f {
                    acc = self.add(acc, y);
                    y = self.frobenius(y);
                }
                assert!(acc.index() < p, "trace must land in the prime field");
                acc.0
            })
            .collect();
        self.trace = trace;
    }

    fn digits(&self, x: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.f as usize);
        let mut x = x;
        for _ in 0..self.f {
            out.push(x % self.p);
            x /= self.p;
        }
        out
    }

    fn undigits(&self, d: &[u64]) -> u64 {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    /// Polynomial multiplication modulo the defining polynomial; used only
    /// while the tables are being built.
    fn slow_mul(&self, a: u64, b: u64) -> u64 {
        match &self.modulus {
            None => a * b % self.p,
            Some(m) => {
                let prod = poly::mul(&self.digits(a), &self.digits(b), self.p);
                let r = poly::rem(&prod, m, self.p);
                let mut d = r;
                d.resize(self.f as usize, 0);
                self.undigits(&d)
            }
        }
    }

    fn slow_pow(&self, mut base: u64, mut e: u64) -> u64 {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.f
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// `q - 1`, the order of the multiplicative group.
    pub fn unit_order(&self) -> u64 {
        self.q - 1
    }

    pub fn modulus(&self) -> Option<&[u64]> {
        self.modulus.as_deref()
    }

    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    pub fn element(&self, index: u64) -> Result<FieldElement> {
        if index >= self.q {
            return Err(Error::InvalidArgument(format!(
                "index {index} out of range for a field of order {}",
                self.q
            )));
        }
        Ok(FieldElement(index as u32))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        FieldElement(reduce(n as i128, self.p) as u32)
    }

    /// Element with the given coefficient vector (low degree first).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() > self.f as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::InvalidArgument("bad coefficient vector".into()));
        }
        Ok(FieldElement(self.undigits(coeffs) as u32))
    }

    pub fn coeffs(&self, x: FieldElement) -> Vec<u64> {
        self.digits(x.index())
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q as u32).map(FieldElement)
    }

    pub fn units(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q as u32).map(FieldElement)
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.f == 1 {
            let s = a.index() + b.index();
            return FieldElement((if s >= self.p { s - self.p } else { s }) as u32);
        }
        let (mut x, mut y) = (a.index(), b.index());
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.f {
            let c = (x % self.p + y % self.p) % self.p;
            out += c * place;
            place *= self.p;
            x /= self.p;
            y /= self.p;
        }
        FieldElement(out as u32)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.f == 1 {
            return FieldElement(((self.p - a.index()) % self.p) as u32);
        }
        let d: Vec<u64> = self
            .digits(a.index())
            .into_iter()
            .map(|c| (self.p - c) % self.p)
            .collect();
        FieldElement(self.undigits(&d) as u32)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        let k = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % (self.q - 1);
        FieldElement(self.exp[k as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::ZeroArgument);
        }
        let order = self.q - 1;
        let k = (order - self.log[a.0 as usize] as u64) % order;
        Ok(FieldElement(self.exp[k as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^e` for any integer exponent; `0^0 = 1`, negative powers of zero fail.
    pub fn pow(&self, a: FieldElement, e: i64) -> Result<FieldElement> {
        if a.is_zero() {
            return match e {
                0 => Ok(FieldElement::ONE),
                e if e > 0 => Ok(FieldElement::ZERO),
                _ => Err(Error::ZeroArgument),
            };
        }
        let order = self.q - 1;
        let k = reduce(self.log[a.0 as usize] as i128 * e as i128, order);
        Ok(FieldElement(self.exp[k as usize]))
    }

    /// `g^k` for the fixed primitive root `g`.
    pub fn exp(&self, k: i64) -> FieldElement {
        FieldElement(self.exp[reduce(k as i128, self.q - 1) as usize])
    }

    /// Discrete logarithm to the fixed primitive root, in `[0, q - 2]`.
    pub fn dlog(&self, x: FieldElement) -> Result<u64> {
        if x.is_zero() {
            return Err(Error::LogOfZero);
        }
        Ok(self.log[x.0 as usize] as u64)
    }

    /// `x^p`.
    pub fn frobenius(&self, x: FieldElement) -> FieldElement {
        if x.is_zero() || self.f == 1 {
            return x;
        }
        if self.log.is_empty() {
            return FieldElement(self.slow_pow(x.index(), self.p) as u32);
        }
        let k = self.log[x.0 as usize] as u64 * self.p % (self.q - 1);
        FieldElement(self.exp[k as usize])
    }

    /// Absolute trace `x + x^p + ... + x^{p^{f-1}}` as an integer in `[0, p)`.
    pub fn trace(&self, x: FieldElement) -> u64 {
        self.trace[x.0 as usize] as u64
    }

    /// Multiplicative inverse of an integer in the prime subfield.
    pub fn int_inverse(&self, n: i64) -> Result<u64> {
        inv_mod(reduce(n as i128, self.p), self.p).ok_or(Error::NotUnit { value: n, p: self.p })
    }
}

/// Dense polynomials over `F_p`, low degree first, used for modulus
/// validation and search.
mod poly {
    use crate::arith::{inv_mod, mul_mod};

    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        trim(out)
    }

    pub fn rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
        let m = trim(m.to_vec());
        let mut r = trim(a.to_vec());
        let dm = m.len() - 1;
        let lead_inv = inv_mod(m[dm], p).expect("nonzero leading coefficient");
        while r.len() > dm {
            let dr = r.len() - 1;
            let c = mul_mod(r[dr], lead_inv, p);
            for (i, &mi) in m.iter().enumerate() {
                let idx = dr - dm + i;
                r[idx] = (r[idx] + p - mul_mod(c, mi, p)) % p;
            }
            r = trim(r);
        }
        r
    }

    fn sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let n = a.len().max(b.len());
        let out = (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect();
        trim(out)
    }

    pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
        while !b.is_empty() {
            let r = rem(&a, &b, p);
            a = b;
            b = r;
        }
        a
    }

    fn has_root(m: &[u64], p: u64) -> bool {
        (0..p).any(|x| m.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p) == 0)
    }

    /// Degree <= 3: irreducible iff rootless. Otherwise `gcd(x^{p^i} - x, m) = 1`
    /// for every `1 <= i <= deg/2`.
    pub fn is_irreducible(m: &[u64], p: u64) -> bool {
        let m = trim(m.to_vec());
        let deg = m.len().saturating_sub(1);
        if deg == 0 {
            return false;
        }
        if deg <= 3 {
            return !has_root(&m, p);
        }
        let x = vec![0, 1];
        let mut xp = x.clone();
        for _ in 1..=deg / 2 {
            // xp <- xp^p mod m
            let mut acc = vec![1u64];
            let mut base = xp.clone();
            let mut e = p;
            while e > 0 {
                if e & 1 == 1 {
                    acc = rem(&mul(&acc, &base, p), &m, p);
                }
                base = rem(&mul(&base, &base, p), &m, p);
                e >>= 1;
            }
            xp = acc;
            let g = gcd(&m, &sub(&xp, &x, p), p);
            if g.len() > 1 {
                return false;
            }
        }
        true
    }

    /// Smallest monic irreducible polynomial of degree `f` in index order of
    /// the lower coefficients.
    pub fn smallest_irreducible(p: u64, f: usize) -> Vec<u64> {
        let count = p.pow(f as u32);
        for idx in 0..count {
            let mut m = Vec::with_capacity(f + 1);
            let mut x = idx;
            for _ in 0..f {
                m.push(x % p);
                x /= p;
            }
            m.push(1);
            if is_irreducible(&m, p) {
                return m;
            }
        }
        unreachable!("irreducible polynomials exist in every degree")
    }
}
