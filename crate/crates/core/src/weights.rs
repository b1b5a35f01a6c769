//! Hypergeometric weight systems `γ = Σ γ_ν [ν]`, their factorial-ratio
//! coefficients, hypergeometric parameters and Landau function.
//!
//! Everything here is exact: big integers and big rationals only.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSystem {
    gamma: BTreeMap<u64, i64>,
}

impl WeightSystem {
    /// Builds `Σ γ_ν [ν]`; repeated `ν` are summed and zero weights dropped.
    /// Requires `Σ ν γ_ν = 0` and `d(γ) = −Σ γ_ν > 0`.
    pub fn new(pairs: impl IntoIterator<Item = (u64, i64)>) -> Result<Self> {
        let mut gamma = BTreeMap::new();
        for (nu, g) in pairs {
            if nu == 0 {
                return Err(Error::InvalidWeightSystem("ν must be ≥ 1".into()));
            }
            *gamma.entry(nu).or_insert(0i64) += g;
        }
        gamma.retain(|_, g| *g != 0);
        let moment: i128 = gamma.iter().map(|(&nu, &g)| nu as i128 * g as i128).sum();
        if moment != 0 {
            return Err(Error::InvalidWeightSystem(format!("Σ νγ_ν = {moment} ≠ 0")));
        }
        let w = WeightSystem { gamma };
        if w.d() <= 0 {
            return Err(Error::InvalidWeightSystem(format!("d(γ) = {} is not positive", w.d())));
        }
        Ok(w)
    }

    /// Parses the sparse syntax `"3:1,1:-3"`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::InvalidWeightSystem(format!("cannot parse {s:?}"));
        let pairs = s
            .split(',')
            .map(|term| {
                let (nu, g) = term.trim().split_once(':').ok_or_else(bad)?;
                Ok((nu.trim().parse().map_err(|_| bad())?, g.trim().parse().map_err(|_| bad())?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(pairs)
    }

    /// `[d] − d[1]`.
    pub fn dwork(d: u64) -> Self {
        Self::new([(d, 1), (1, -(d as i64))]).expect("valid for d ≥ 2")
    }

    /// `[d] − [1] − [d−1]`, the weights of `binom(dn, n)`.
    pub fn binomial(d: u64) -> Self {
        Self::new([(d, 1), (1, -1), (d - 1, -1)]).expect("valid for d ≥ 2")
    }

    pub fn gamma(&self) -> &BTreeMap<u64, i64> {
        &self.gamma
    }

    pub fn d(&self) -> i64 {
        -self.gamma.values().sum::<i64>()
    }

    fn lcm(&self) -> u64 {
        self.gamma.keys().fold(1u64, |acc, &nu| acc.lcm(&nu))
    }

    fn max_nu(&self) -> u64 {
        self.gamma.keys().copied().max().unwrap_or(1)
    }
}

impl fmt::Display for WeightSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.gamma.iter().rev().map(|(nu, g)| format!("{nu}:{g}")).collect();
        f.write_str(&terms.join(","))
    }
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn fract(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// `u_n = Π (νn)!^{γ_ν}`.
pub fn u_coeff(gamma: &WeightSystem, n: u64) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for (&nu, &g) in &gamma.gamma {
        let f = factorial(nu * n).pow(g.unsigned_abs() as u32);
        if g > 0 {
            num *= f;
        } else {
            den *= f;
        }
    }
    BigRational::new(num, den)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HypParams {
    /// Sorted numerator parameters in `(0, 1]`.
    pub alpha: Vec<BigRational>,
    /// Sorted denominator parameters in `(0, 1]`, keeping every entry 1.
    pub beta: Vec<BigRational>,
    /// `Π ν^{ν γ_ν}`.
    pub lambda0_inv: BigRational,
}

impl HypParams {
    /// The `rF_{r−1}` presentation: `β` with one entry 1 removed (it supplies `n!`).
    pub fn rf_presentation(&self) -> (Vec<BigRational>, Vec<BigRational>) {
        let mut beta = self.beta.clone();
        if let Some(pos) = beta.iter().position(|b| b.is_one()) {
            beta.remove(pos);
        }
        (self.alpha.clone(), beta)
    }

    /// `Π(α)_n / Π(β)_n · λ0_inv^n`.
    pub fn resynthesize(&self, n: u64) -> BigRational {
        let poch = |a: &BigRational| -> BigRational {
            (0..n).fold(BigRational::one(), |acc, k| acc * (a + BigRational::from_integer(k.into())))
        };
        let num: BigRational = self.alpha.iter().map(poch).product();
        let den: BigRational = self.beta.iter().map(poch).product();
        num / den * num_traits::pow(self.lambda0_inv.clone(), n as usize)
    }

    /// Whether `α` and `β` (taken mod 1) alternate around the circle.
    pub fn interlaces(&self) -> bool {
        if self.alpha.len() != self.beta.len() {
            return false;
        }
        let mut all: Vec<(BigRational, bool)> = self
            .alpha
            .iter()
            .map(|a| (fract(a), true))
            .chain(self.beta.iter().map(|b| (fract(b), false)))
            .collect();
        all.sort();
        all.windows(2).all(|w| w[0].0 != w[1].0 && w[0].1 != w[1].1)
    }
}

pub fn extract_params(gamma: &WeightSystem) -> HypParams {
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut lambda0_inv = BigRational::one();
    for (&nu, &g) in &gamma.gamma {
        let target = if g > 0 { &mut alpha } else { &mut beta };
        for _ in 0..g.unsigned_abs() {
            target.extend((1..=nu as i64).map(|j| rat(j, nu as i64)));
        }
        let base = BigRational::from_integer(BigInt::from(nu).pow(nu as u32));
        lambda0_inv *= if g > 0 {
            num_traits::pow(base, g as usize)
        } else {
            num_traits::pow(base.recip(), g.unsigned_abs() as usize)
        };
    }
    alpha.sort();
    beta.sort();
    let mut kept = Vec::new();
    for a in alpha {
        if let Some(pos) = beta.iter().position(|b| *b == a) {
            beta.remove(pos);
        } else {
            kept.push(a);
        }
    }
    HypParams { alpha: kept, beta, lambda0_inv }
}

/// `L(x) = −Σ γ_ν {νx}`.
pub fn landau(gamma: &WeightSystem, x: &BigRational) -> i64 {
    let total: BigRational = gamma
        .gamma
        .iter()
        .map(|(&nu, &g)| fract(&(x * BigRational::from_integer(nu.into()))) * BigRational::from_integer(g.into()))
        .sum();
    let value = -total;
    assert!(value.is_integer(), "Landau function not integral at {x}");
    value.to_integer().to_i64().expect("small")
}

/// `#{α_i ≤ {x}} − #{0 < β_j ≤ {x}}`, the jump-counting form.
pub fn landau_by_jumps(params: &HypParams, x: &BigRational) -> i64 {
    let y = fract(x);
    let a = params.alpha.iter().filter(|a| **a <= y).count() as i64;
    let b = params.beta.iter().filter(|b| b.is_positive() && **b <= y).count() as i64;
    a - b
}

/// Multiples of `1/lcm ν` in `[0, 1)`, which contain every jump point, and
/// the half-spacing `ε = 1/(2·lcm ν)`.
fn candidates(gamma: &WeightSystem) -> (Vec<BigRational>, BigRational) {
    let l = gamma.lcm() as i64;
    ((0..l).map(|k| rat(k, l)).collect(), rat(1, 2 * l))
}

/// `L(x) ≥ 0` for all `x`; when it holds, `u_n ∈ Z` is also checked for `n ≤ 200`
/// and a failure there is reported as an error.
pub fn landau_criterion(gamma: &WeightSystem) -> Result<bool> {
    let (pts, eps) = candidates(gamma);
    let nonneg = pts
        .iter()
        .all(|x| landau(gamma, x) >= 0 && landau(gamma, &(x + &eps)) >= 0);
    if nonneg {
        if let Some(n) = (0..=200).find(|&n| !u_coeff(gamma, n).is_integer()) {
            return Err(Error::Precondition(format!("L ≥ 0 but u_{n} is not an integer")));
        }
    }
    Ok(nonneg)
}

fn rational_valuation(x: &BigRational, p: u64) -> i64 {
    let v = |mut n: BigInt| {
        let p = BigInt::from(p);
        let mut k = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            k += 1;
        }
        k
    };
    v(x.numer().abs()) - v(x.denom().abs())
}

/// `(v_p(u_n), Σ_{k≥1} L(n/p^k))`.
pub fn valuation_identity(gamma: &WeightSystem, p: u64, n: u64) -> Result<(i64, i64)> {
    let u = u_coeff(gamma, n);
    if u.is_zero() {
        return Err(Error::ZeroArgument);
    }
    let lhs = rational_valuation(&u, p);
    let bound = gamma.max_nu() as u128 * n as u128;
    let mut rhs = 0;
    let mut pk: u128 = p as u128;
    while pk <= bound.max(1) {
        rhs += landau(gamma, &BigRational::new(n.into(), pk.into()));
        pk *= p as u128;
    }
    Ok((lhs, rhs))
}

#[derive(Debug, Clone, Serialize)]
pub struct LandauInterval {
    /// Left endpoint `a/b`; `L` is constant on `[a/b, next)`.
    pub start: String,
    pub value: i64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LandauReport {
    pub d: i64,
    /// Jump points in `[0, 1)`.
    pub discontinuities: Vec<String>,
    pub intervals: Vec<LandauInterval>,
    /// Jumps sit at parameters mod 1 and `L` agrees with the jump-counting form.
    pub jumps_at_parameters: bool,
    pub integer_valued: bool,
    /// `L(−x) = d − L(x)` away from jump points.
    pub reflection: bool,
    pub bounded_by_d: bool,
}

impl LandauReport {
    pub fn all_hold(&self) -> bool {
        self.jumps_at_parameters && self.integer_valued && self.reflection && self.bounded_by_d
    }
}

pub fn landau_properties(gamma: &WeightSystem) -> LandauReport {
    let params = extract_params(gamma);
    let (pts, eps) = candidates(gamma);
    let d = gamma.d();
    let param_points: Vec<BigRational> =
        params.alpha.iter().chain(&params.beta).map(fract).collect();

    let mut discontinuities = Vec::new();
    let mut intervals = Vec::new();
    let mut jumps_at_parameters = true;
    let mut integer_valued = true;
    let mut reflection = true;
    let mut bounded_by_d = true;
    for x in &pts {
        let mid = x + &eps;
        let at = landau(gamma, x);
        let left = landau(gamma, &(x - &eps));
        let inside = landau(gamma, &mid);
        // landau() asserts integrality; reaching here means both samples were integers
        integer_valued &= at == inside;
        if at != left {
            discontinuities.push(x.to_string());
            jumps_at_parameters &= param_points.contains(x);
        }
        for y in [x, &mid] {
            jumps_at_parameters &= landau(gamma, y) == landau_by_jumps(&params, y);
            bounded_by_d &= landau(gamma, y) <= d;
        }
        reflection &= landau(gamma, &-mid.clone()) == d - inside;
        if intervals.last().map(|i: &LandauInterval| i.value) != Some(at) {
            intervals.push(LandauInterval { start: x.to_string(), value: at });
        }
    }
    LandauReport {
        d,
        discontinuities,
        intervals,
        jumps_at_parameters,
        integer_valued,
        reflection,
        bounded_by_d,
    }
}
