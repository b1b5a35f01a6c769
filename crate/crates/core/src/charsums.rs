//! Complex-valued multiplicative and additive characters of `F_q`, Gauss sums
//! and Jacobi sums.
//!
//! Characters are indexed by `s = a/(q-1)` stored as the integer `a mod (q-1)`.
//! With `g` the field's fixed primitive root, `χ_s(g^k) = exp(2πi·a·k/(q-1))` and
//! `χ_s(0) = 0`. The additive character is `ψ(x) = exp(2πi·Tr(x)/p)`.

use std::f64::consts::PI;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::arith::reduce;
use crate::error::{Error, Result};
use crate::ffield::{FieldElement, FieldSpec};

pub type ComplexValue = Complex64;

/// Largest number of points a direct Jacobi-sum enumeration may visit.
pub const JACOBI_BUDGET: u128 = 50_000_000;

/// A character index `s = a/(q-1)` in `(1/(q-1))Z/Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CharIndex {
    a: u64,
    order: u64,
}

impl CharIndex {
    pub fn new(a: i64, order: u64) -> Self {
        CharIndex { a: reduce(a as i128, order), order }
    }

    pub fn trivial(order: u64) -> Self {
        CharIndex { a: 0, order }
    }

    /// The index of the rational `num/den`; `den` must divide `q - 1`.
    pub fn from_fraction(num: i64, den: u64, order: u64) -> Result<Self> {
        if den == 0 || order % den != 0 {
            return Err(Error::NotDivisor { d: den, order });
        }
        Ok(Self::new(num * (order / den) as i64, order))
    }

    pub fn value(self) -> u64 {
        self.a
    }

    pub fn order(self) -> u64 {
        self.order
    }

    pub fn is_trivial(self) -> bool {
        self.a == 0
    }

    /// `k·s`.
    pub fn scale(self, k: i64) -> Self {
        CharIndex::new_wide(self.a as i128 * k as i128, self.order)
    }

    fn new_wide(a: i128, order: u64) -> Self {
        CharIndex { a: reduce(a, order), order }
    }
}

impl Add for CharIndex {
    type Output = CharIndex;
    fn add(self, rhs: CharIndex) -> CharIndex {
        debug_assert_eq!(self.order, rhs.order);
        CharIndex { a: (self.a + rhs.a) % self.order, order: self.order }
    }
}

impl Sub for CharIndex {
    type Output = CharIndex;
    fn sub(self, rhs: CharIndex) -> CharIndex {
        self + (-rhs)
    }
}

impl Neg for CharIndex {
    type Output = CharIndex;
    fn neg(self) -> CharIndex {
        CharIndex { a: (self.order - self.a) % self.order, order: self.order }
    }
}

/// `exp(2πi·k/n)`, with `k` reduced first so large indices lose no precision.
pub fn unit_root(k: i128, n: u64) -> Complex64 {
    let k = reduce(k, n);
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

pub fn mult_char(spec: &FieldSpec, s: CharIndex, x: FieldElement) -> ComplexValue {
    match spec.dlog(x) {
        Ok(k) => unit_root(s.value() as i128 * k as i128, spec.unit_order()),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

pub fn add_char(spec: &FieldSpec, x: FieldElement) -> ComplexValue {
    unit_root(spec.trace(x) as i128, spec.characteristic())
}

/// `g(s) = Σ_x χ_s(x)ψ(x)` by direct summation.
pub fn gauss_sum(spec: &FieldSpec, s: CharIndex) -> ComplexValue {
    let n = spec.unit_order();
    (0..n)
        .map(|k| unit_root(s.value() as i128 * k as i128, n) * add_char(spec, spec.exp(k as i64)))
        .sum()
}

/// All Gauss sums of a field, indexed by `a`.
#[derive(Debug, Clone)]
pub struct GaussTable {
    values: Vec<Complex64>,
    /// `χ_a(-1)`, which is `±1`.
    minus_one_sign: Vec<f64>,
    order: u64,
}

impl GaussTable {
    /// `g(a) = Σ_k ψ(g^k)·exp(2πi·a·k/(q-1))` is an inverse DFT of `k ↦ ψ(g^k)`.
    pub fn new(spec: &FieldSpec) -> Self {
        let n = spec.unit_order() as usize;
        let mut buf: Vec<Complex64> = (0..n)
            .map(|k| add_char(spec, spec.exp(k as i64)))
            .collect();
        let fft = FftPlanner::new().plan_fft_inverse(n);
        fft.process(&mut buf);
        Self::from_values(spec, buf)
    }

    /// Reference table built term by term from the definition.
    pub fn by_summation(spec: &FieldSpec) -> Self {
        let n = spec.unit_order();
        let values = (0..n).map(|a| gauss_sum(spec, CharIndex::new(a as i64, n))).collect();
        Self::from_values(spec, values)
    }

    fn from_values(spec: &FieldSpec, values: Vec<Complex64>) -> Self {
        let n = spec.unit_order();
        // -1 = g^{(q-1)/2}, so χ_a(-1) = (-1)^a.
        let minus_one_sign = (0..n).map(|a| if a % 2 == 0 { 1.0 } else { -1.0 }).collect();
        GaussTable { values, minus_one_sign, order: n }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn get(&self, s: CharIndex) -> ComplexValue {
        self.values[s.value() as usize]
    }

    pub fn at(&self, a: i64) -> ComplexValue {
        self.values[reduce(a as i128, self.order) as usize]
    }

    /// `χ_s(-1)`.
    pub fn sign_of_minus_one(&self, s: CharIndex) -> f64 {
        self.minus_one_sign[s.value() as usize]
    }

    /// Gauss sum against the conjugate additive character: `Σ χ_s(x)ψ(-x) = χ_s(-1)·g(s)`.
    pub fn get_conj_additive(&self, s: CharIndex) -> ComplexValue {
        self.get(s) * self.sign_of_minus_one(s)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Both evaluations of a Jacobi sum.
#[derive(Debug, Clone, Copy)]
pub struct JacobiSum {
    /// `Σ_{x_1+...+x_r=1} Π χ_{s_i}(x_i)`.
    pub direct: ComplexValue,
    /// `g(s_1)...g(s_r)/g(s_1+...+s_r)`, present only when the index sum is nonzero.
    pub ratio: Option<ComplexValue>,
}

impl JacobiSum {
    /// True when the Gauss-ratio form was not available.
    pub fn downgraded(&self) -> bool {
        self.ratio.is_none()
    }
}

pub fn jacobi_sum(spec: &FieldSpec, s_list: &[CharIndex]) -> Result<JacobiSum> {
    let r = s_list.len();
    if r == 0 {
        return Err(Error::InvalidArgument("empty Jacobi sum".into()));
    }
    if r == 1 {
        return Ok(JacobiSum {
            direct: Complex64::new(1.0, 0.0),
            ratio: Some(Complex64::new(1.0, 0.0)),
        });
    }
    let q = spec.order();
    let needed = (q as u128).pow(r as u32 - 1);
    if needed > JACOBI_BUDGET {
        return Err(Error::BudgetExceeded { needed, limit: JACOBI_BUDGET });
    }

    let n = spec.unit_order();
    let mut direct = Complex64::new(0.0, 0.0);
    let mut xs = vec![FieldElement::ZERO; r - 1];
    loop {
        let partial = xs.iter().fold(FieldElement::ZERO, |acc, &x| spec.add(acc, x));
        let last = spec.sub(FieldElement::ONE, partial);
        let mut all: Vec<FieldElement> = xs.clone();
        all.push(last);
        if all.iter().all(|x| !x.is_zero()) {
            let k: i128 = all
                .iter()
                .zip(s_list)
                .map(|(&x, s)| s.value() as i128 * spec.dlog(x).unwrap() as i128)
                .sum();
            direct += unit_root(k, n);
        }
        // odometer over F_q^{r-1}
        let mut i = 0;
        loop {
            if i == xs.len() {
                let table = GaussTable::new(spec);
                return Ok(JacobiSum { direct, ratio: ratio_form(&table, s_list) });
            }
            let next = xs[i].index() + 1;
            if next < q {
                xs[i] = spec.element(next)?;
                break;
            }
            xs[i] = FieldElement::ZERO;
            i += 1;
        }
    }
}

fn ratio_form(table: &GaussTable, s_list: &[CharIndex]) -> Option<ComplexValue> {
    let total = s_list
        .iter()
        .skip(1)
        .fold(s_list[0], |acc, &s| acc + s);
    if total.is_trivial() {
        return None;
    }
    let num: Complex64 = s_list.iter().map(|&s| table.get(s)).product();
    Some(num / table.get(total))
}

/// Both sides of `Π_{j<d} g(s + j/d) = χ_{-ds}(d)·g(ds)·Π_{0<j<d} g(j/d)`.
pub fn hasse_davenport_product(
    spec: &FieldSpec,
    d: u64,
    s: CharIndex,
) -> Result<(ComplexValue, ComplexValue)> {
    let n = spec.unit_order();
    if d == 0 || n % d != 0 {
        return Err(Error::NotDivisor { d, order: n });
    }
    let table = GaussTable::new(spec);
    let step = (n / d) as i64;
    let lhs: Complex64 = (0..d as i64)
        .map(|j| table.get(s + CharIndex::new(j * step, n)))
        .product();
    let tail: Complex64 = (1..d as i64).map(|j| table.at(j * step)).product();
    let ds = s.scale(d as i64);
    let rhs = mult_char(spec, -ds, spec.from_int(d as i64)) * table.get(ds) * tail;
    Ok((lhs, rhs))
}
