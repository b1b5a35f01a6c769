//! Point counts on the monomial deformation
//!
//! ```text
//! X_λ : x_1^d + ... + x_n^d − dλ·x_1^{h_1}⋯x_n^{h_n} = 0   in P^{n−1}(F_q)
//! ```
//!
//! by exhaustive enumeration, by Weil's character decomposition of the
//! diagonal fibre, and by Koblitz's Gauss-sum formula, plus the per-class
//! comparison against Katz hypergeometric sums.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::charsums::{unit_root, CharIndex, ComplexValue, GaussTable};
use crate::error::{Error, Result};
use crate::ffield::{FieldElement, FieldSpec};
use crate::katz::{hyp_fourier, hyp_fourier_boundary_weighted, HypIndexParams};

/// Default cap on enumerated projective points.
pub const POINT_BUDGET: u128 = 100_000_000;

/// Values meant to be rational integers must land this close to one.
pub const ROUNDING_SLACK: f64 = 1e-4;

/// Below this modulus a Katz value is treated as zero and the class is not
/// testable by modulus.
pub const H_ZERO_THRESHOLD: f64 = 1e-6;

/// Relative tolerance of the per-class modulus comparison.
pub const MODULUS_REL_TOL: f64 = 1e-5;

/// Rounds a value that must be a rational integer, or fails loudly.
pub fn round_exact(z: ComplexValue) -> Result<i64> {
    let r = z.re.round();
    let distance = (z.re - r).abs().max(z.im.abs());
    if distance >= ROUNDING_SLACK || !r.is_finite() {
        return Err(Error::Rounding { value: z.re, distance });
    }
    Ok(r as i64)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeformationFamily {
    d: u32,
    h: Vec<u32>,
    lambda: i64,
}

impl DeformationFamily {
    pub fn new(d: u32, h: Vec<u32>, lambda: i64) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidFamily(format!("degree {d} < 2")));
        }
        if h.len() < 2 {
            return Err(Error::InvalidFamily("need at least two variables".into()));
        }
        if h.iter().sum::<u32>() != d {
            return Err(Error::InvalidFamily(format!("h = {h:?} does not sum to d = {d}")));
        }
        let g = h.iter().fold(d as u64, |g, &x| num_integer::gcd(g, x as u64));
        if g != 1 {
            return Err(Error::InvalidFamily(format!("gcd(d, h) = {g} != 1")));
        }
        Ok(DeformationFamily { d, h, lambda })
    }

    /// `x_1^d + ... + x_d^d − dλ x_1⋯x_d`.
    pub fn dwork(d: u32, lambda: i64) -> Self {
        Self::new(d, vec![1; d as usize], lambda).expect("Dwork family is always valid")
    }

    /// `x_1^d + x_2^d − dλ x_1 x_2^{d−1}`.
    pub fn zero_dimensional(d: u32, lambda: i64) -> Self {
        Self::new(d, vec![1, d - 1], lambda).expect("valid for d >= 2")
    }

    pub fn with_lambda(&self, lambda: i64) -> Self {
        DeformationFamily { lambda, ..self.clone() }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[u32] {
        &self.h
    }

    pub fn lambda(&self) -> i64 {
        self.lambda
    }

    /// `λ` as an element of `F_q`: the integer `λ mod p` over a prime field,
    /// otherwise the element with representation index `λ`.
    pub fn lambda_in(&self, spec: &FieldSpec) -> Result<FieldElement> {
        if spec.degree() == 1 {
            return Ok(spec.from_int(self.lambda));
        }
        u64::try_from(self.lambda)
            .map_err(|_| Error::InvalidArgument(format!("λ index {} is negative", self.lambda)))
            .and_then(|i| spec.element(i))
    }

    pub fn is_dwork(&self) -> bool {
        self.n() == self.d as usize && self.h.iter().all(|&x| x == 1)
    }

    pub fn is_zero_dimensional(&self) -> bool {
        self.n() == 2 && self.h == [1, self.d - 1]
    }

    /// Singularity of the fibre where it is known in closed form: `λ^d = 1`
    /// for the Dwork family, `(d−1)^{d−1} λ^d = 1` for the zero-dimensional one.
    pub fn known_singular(&self, spec: &FieldSpec) -> Option<bool> {
        let lam = self.lambda_in(spec).ok()?;
        let ld = spec.pow(lam, self.d as i64).ok()?;
        if self.is_dwork() {
            Some(ld == FieldElement::ONE)
        } else if self.is_zero_dimensional() {
            let c = spec.pow(spec.from_int(self.d as i64 - 1), self.d as i64 - 1).ok()?;
            Some(spec.mul(c, ld) == FieldElement::ONE)
        } else {
            None
        }
    }
}

fn projective_size(q: u64, n: usize) -> u128 {
    (0..n as u32).map(|i| (q as u128).pow(i)).sum()
}

/// Visits every point of `P^{n−1}(F_q)` once, normalized so the first nonzero
/// coordinate is 1. Work is split by patch and by the first free coordinate;
/// the per-task accumulators are merged in task order.
fn fold_projective<T, I, F, M>(
    spec: &FieldSpec,
    n: usize,
    budget: u128,
    init: I,
    visit: F,
    merge: M,
) -> Result<T>
where
    T: Send,
    I: Fn() -> T + Sync,
    F: Fn(&mut T, &[FieldElement]) + Sync,
    M: Fn(T, T) -> T,
{
    let q = spec.order();
    let needed = projective_size(q, n);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, limit: budget });
    }
    let mut tasks: Vec<(usize, Option<u64>)> = Vec::new();
    for lead in 0..n {
        if lead + 1 < n {
            tasks.extend((0..q).map(|v| (lead, Some(v))));
        } else {
            tasks.push((lead, None));
        }
    }
    let parts: Vec<T> = tasks
        .par_iter()
        .map(|&(lead, first)| {
            let mut acc = init();
            let mut x = vec![FieldElement::ZERO; n];
            x[lead] = FieldElement::ONE;
            let Some(first) = first else {
                visit(&mut acc, &x);
                return acc;
            };
            x[lead + 1] = spec.element(first).expect("in range");
            let rest = lead + 2;
            loop {
                visit(&mut acc, &x);
                let mut i = rest;
                loop {
                    if i == n {
                        return acc;
                    }
                    let next = x[i].index() + 1;
                    if next < q {
                        x[i] = spec.element(next).expect("in range");
                        break;
                    }
                    x[i] = FieldElement::ZERO;
                    i += 1;
                }
            }
        })
        .collect();
    let mut it = parts.into_iter();
    let first = it.next().unwrap_or_else(&init);
    Ok(it.fold(first, merge))
}

struct PowerTables {
    diag: Vec<FieldElement>,
    mono: Vec<Vec<FieldElement>>,
}

impl PowerTables {
    fn new(spec: &FieldSpec, d: u32, h: &[u32]) -> Self {
        let table = |e: u32| -> Vec<FieldElement> {
            spec.elements().map(|x| spec.pow(x, e as i64).expect("non-negative")).collect()
        };
        PowerTables { diag: table(d), mono: h.iter().map(|&e| table(e)).collect() }
    }

    fn diagonal(&self, spec: &FieldSpec, x: &[FieldElement]) -> FieldElement {
        x.iter()
            .fold(FieldElement::ZERO, |acc, xi| spec.add(acc, self.diag[xi.index() as usize]))
    }

    fn monomial(&self, spec: &FieldSpec, x: &[FieldElement]) -> FieldElement {
        x.iter()
            .zip(&self.mono)
            .fold(FieldElement::ONE, |acc, (xi, t)| spec.mul(acc, t[xi.index() as usize]))
    }
}

/// Number of points `brute_count` visits: `|P^{n−1}(F_q)|`.
pub fn projective_points(q: u64, n: usize) -> u128 {
    projective_size(q, n)
}

/// Exact projective point count of `X_λ` over `F_q`.
pub fn brute_count(family: &DeformationFamily, spec: &FieldSpec) -> Result<u64> {
    brute_count_capped(family, spec, POINT_BUDGET)
}

pub fn brute_count_capped(family: &DeformationFamily, spec: &FieldSpec, budget: u128) -> Result<u64> {
    let tables = PowerTables::new(spec, family.d, &family.h);
    let coeff = spec.mul(spec.from_int(family.d as i64), family.lambda_in(spec)?);
    fold_projective(
        spec,
        family.n(),
        budget,
        || 0u64,
        |acc, x| {
            let diag = tables.diagonal(spec, x);
            let mono = spec.mul(coeff, tables.monomial(spec, x));
            if diag == mono {
                *acc += 1;
            }
        },
        |a, b| a + b,
    )
}

/// Point counts of every fibre `λ ∈ F_q` in one enumeration, indexed by the
/// representation index of `λ`.
pub fn brute_count_all_fibres(d: u32, h: &[u32], spec: &FieldSpec) -> Result<Vec<u64>> {
    brute_count_all_fibres_capped(d, h, spec, POINT_BUDGET)
}

pub fn brute_count_all_fibres_capped(d: u32, h: &[u32], spec: &FieldSpec, budget: u128) -> Result<Vec<u64>> {
    let q = spec.order() as usize;
    let tables = PowerTables::new(spec, d, h);
    let d_elt = spec.from_int(d as i64);
    // (points on every fibre, histogram of λ = diag / (d·mono))
    let (common, hist) = fold_projective(
        spec,
        h.len(),
        budget,
        || (0u64, vec![0u64; q]),
        |(common, hist), x| {
            let diag = tables.diagonal(spec, x);
            let mono = spec.mul(d_elt, tables.monomial(spec, x));
            if mono.is_zero() {
                if diag.is_zero() {
                    *common += 1;
                }
            } else {
                let lam = spec.div(diag, mono).expect("nonzero");
                hist[lam.index() as usize] += 1;
            }
        },
        |(c1, mut h1), (c2, h2)| {
            h1.iter_mut().zip(h2).for_each(|(a, b)| *a += b);
            (c1 + c2, h1)
        },
    )?;
    Ok(hist.into_iter().map(|c| c + common).collect())
}

/// Weil's formula for the `χ_w` component of the diagonal hypersurface
/// `x_1^d + ... + x_n^d = 0`.
///
/// The all-nonzero branch is `−J/q` with `J = Π g(w_i/d) / g(Σ w_i/d)` in
/// Gauss-ratio form; here `Σ w_i/d` is an integer, so `J = −Π g(w_i/d)`.
pub fn weil_component(spec: &FieldSpec, table: &GaussTable, d: u64, w: &[u32]) -> Result<ComplexValue> {
    let order = spec.unit_order();
    if order % d != 0 {
        return Err(Error::NotDivisor { d, order });
    }
    if w.iter().map(|&x| x as u64).sum::<u64>() % d != 0 || w.iter().any(|&x| x as u64 >= d) {
        return Err(Error::InvalidArgument(format!("{w:?} is not in W for d = {d}")));
    }
    let q = spec.order() as f64;
    let n = w.len() as i32;
    if w.iter().all(|&x| x == 0) {
        return Ok(((q.powi(n - 1) - 1.0) / (q - 1.0)).into());
    }
    if w.iter().any(|&x| x == 0) {
        return Ok(0.0.into());
    }
    let step = (order / d) as i64;
    let gauss: Complex64 = w.iter().map(|&x| table.at(x as i64 * step)).product();
    let jacobi = gauss / table.at(0);
    Ok(-jacobi / q)
}

/// Point count of the diagonal hypersurface by summing Weil components over `W`.
pub fn diagonal_count(spec: &FieldSpec, d: u32, n: usize) -> Result<u64> {
    let table = GaussTable::new(spec);
    diagonal_count_with(spec, &table, d, n)
}

fn diagonal_count_with(spec: &FieldSpec, table: &GaussTable, d: u32, n: usize) -> Result<u64> {
    let total: Complex64 = w_tuples(d, n)
        .iter()
        .map(|w| weil_component(spec, table, d as u64, w))
        .sum::<Result<Complex64>>()?;
    Ok(round_exact(total)? as u64)
}

fn w_tuples(d: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut w = vec![0u32; n];
    loop {
        if w.iter().sum::<u32>() % d == 0 {
            out.push(w.clone());
        }
        // odometer, last coordinate fastest -> lexicographic order
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            w[i] += 1;
            if w[i] < d {
                break;
            }
            w[i] = 0;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WClass {
    /// Lexicographically smallest member.
    pub representative: Vec<u32>,
    /// `w + k·h mod d` for `k = 0..d`, sorted.
    pub members: Vec<Vec<u32>>,
    /// Smallest sorted member; classes that are coordinate permutations of
    /// each other share it.
    pub permutation_type: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WSet {
    pub d: u32,
    pub h: Vec<u32>,
    pub elements: Vec<Vec<u32>>,
    pub classes: Vec<WClass>,
}

impl WSet {
    /// Classes grouped by permutation type, in type order.
    pub fn types(&self) -> BTreeMap<Vec<u32>, Vec<&WClass>> {
        let mut out: BTreeMap<Vec<u32>, Vec<&WClass>> = BTreeMap::new();
        for c in &self.classes {
            out.entry(c.permutation_type.clone()).or_default().push(c);
        }
        out
    }
}

pub fn build_wset(d: u32, h: &[u32]) -> WSet {
    let elements = w_tuples(d, h.len());
    let mut seen = std::collections::BTreeSet::new();
    let mut classes = Vec::new();
    for w in &elements {
        if seen.contains(w) {
            continue;
        }
        let mut members: Vec<Vec<u32>> = (0..d)
            .map(|k| w.iter().zip(h).map(|(&wi, &hi)| (wi + k * hi) % d).collect())
            .collect();
        members.sort();
        members.dedup();
        let permutation_type = members
            .iter()
            .map(|m| {
                let mut s = m.clone();
                s.sort();
                s
            })
            .min()
            .expect("nonempty class");
        seen.extend(members.iter().cloned());
        classes.push(WClass { representative: members[0].clone(), members, permutation_type });
    }
    WSet { d, h: h.to_vec(), elements, classes }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassPartial {
    pub representative: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub p: u64,
    pub f: u32,
    pub q: u64,
    pub d: u32,
    pub n: usize,
    pub h: Vec<u32>,
    pub lambda: i64,
    pub n_brute: u64,
    pub n_koblitz_re: f64,
    pub n_koblitz_im: f64,
    pub n_koblitz_rounded: i64,
    pub n_diagonal: u64,
    pub class_partials: Vec<ClassPartial>,
}

impl CountReport {
    pub fn matches(&self) -> bool {
        self.n_koblitz_rounded >= 0 && self.n_koblitz_rounded as u64 == self.n_brute
    }
}

/// Koblitz's formula evaluated in complex doubles, without enumeration.
#[derive(Debug, Clone)]
pub struct KoblitzEvaluation {
    pub total: ComplexValue,
    pub rounded: i64,
    pub diagonal: u64,
    /// Per-class contributions to `N(λ) − N(0)`, in [`WSet`] class order.
    pub classes: Vec<(Vec<u32>, ComplexValue)>,
}

fn check_koblitz_preconditions(family: &DeformationFamily, spec: &FieldSpec) -> Result<FieldElement> {
    let order = spec.unit_order();
    let d = family.d as u64;
    if order % d != 0 {
        return Err(Error::NotDivisor { d, order });
    }
    let dl = spec.mul(spec.from_int(family.d as i64), family.lambda_in(spec)?);
    if dl.is_zero() {
        return Err(Error::Precondition(format!(
            "dλ = {}·{} vanishes in F_{}",
            family.d,
            family.lambda,
            spec.order()
        )));
    }
    Ok(dl)
}

/// Contribution of one h-equivalence class:
/// `(1/(q−1)) Σ_{s ∈ (d/(q−1))Z/Z} Σ_{w' ~ w} Π g((w'_i + s h_i)/d) / g(s) · χ_s(dλ)`.
pub fn class_partial(
    family: &DeformationFamily,
    spec: &FieldSpec,
    table: &GaussTable,
    class: &WClass,
) -> Result<ComplexValue> {
    let dl = check_koblitz_preconditions(family, spec)?;
    let order = spec.unit_order();
    let d = family.d as u64;
    let step = (order / d) as i64;
    let dl_log = spec.dlog(dl)? as i128;
    let mut total = Complex64::new(0.0, 0.0);
    // s = d·b/(q−1), b = 0 .. (q−1)/d − 1
    for b in 0..step {
        let s_idx = d as i64 * b;
        let chi = unit_root(s_idx as i128 * dl_log, order);
        let den = table.at(s_idx);
        for w in &class.members {
            let num: Complex64 = w
                .iter()
                .zip(&family.h)
                .map(|(&wi, &hi)| table.at(wi as i64 * step + b * hi as i64))
                .product();
            total += num / den * chi;
        }
    }
    Ok(total / order as f64)
}

/// The same class contribution after re-indexing over all of `(1/(q−1))Z/Z`
/// and applying Hasse–Davenport to `g(ds)`:
/// `Π_{0<j<d} g(j/d) · (1/(q−1)) Σ_s Π g(h_i s + w_i/d) / Π_{j<d} g(s + j/d) · χ_{ds}(λ)`.
pub fn barnes_partial(
    family: &DeformationFamily,
    spec: &FieldSpec,
    table: &GaussTable,
    w: &[u32],
) -> Result<ComplexValue> {
    check_koblitz_preconditions(family, spec)?;
    let order = spec.unit_order();
    let d = family.d as i64;
    let step = order as i64 / d;
    let lam_log = spec.dlog(family.lambda_in(spec)?)? as i128;
    let prefactor: Complex64 = (1..d).map(|j| table.at(j * step)).product();
    let mut total = Complex64::new(0.0, 0.0);
    for s in 0..order as i64 {
        let num: Complex64 = w
            .iter()
            .zip(&family.h)
            .map(|(&wi, &hi)| table.at(hi as i64 * s + wi as i64 * step))
            .product();
        let den: Complex64 = (0..d).map(|j| table.at(s + j * step)).product();
        total += num / den * unit_root(d as i128 * s as i128 * lam_log, order);
    }
    Ok(prefactor * total / order as f64)
}

pub fn koblitz_formula(
    family: &DeformationFamily,
    spec: &FieldSpec,
    table: &GaussTable,
) -> Result<KoblitzEvaluation> {
    check_koblitz_preconditions(family, spec)?;
    let diagonal = diagonal_count_with(spec, table, family.d, family.n())?;
    let wset = build_wset(family.d, &family.h);
    let classes = wset
        .classes
        .iter()
        .map(|c| Ok((c.representative.clone(), class_partial(family, spec, table, c)?)))
        .collect::<Result<Vec<_>>>()?;
    let total = classes.iter().map(|(_, z)| *z).sum::<Complex64>() + diagonal as f64;
    let rounded = round_exact(total)?;
    Ok(KoblitzEvaluation { total, rounded, diagonal, classes })
}

/// Koblitz's formula together with an exhaustive count of the same fibre.
pub fn koblitz_count(family: &DeformationFamily, spec: &FieldSpec) -> Result<CountReport> {
    koblitz_count_with(family, spec, &GaussTable::new(spec), POINT_BUDGET)
}

/// [`koblitz_count`] with a shared Gauss table and an explicit point budget.
pub fn koblitz_count_with(
    family: &DeformationFamily,
    spec: &FieldSpec,
    table: &GaussTable,
    budget: u128,
) -> Result<CountReport> {
    let eval = koblitz_formula(family, spec, table)?;
    let n_brute = brute_count_capped(family, spec, budget)?;
    Ok(CountReport {
        p: spec.characteristic(),
        f: spec.degree(),
        q: spec.order(),
        d: family.d,
        n: family.n(),
        h: family.h.clone(),
        lambda: family.lambda,
        n_brute,
        n_koblitz_re: eval.total.re,
        n_koblitz_im: eval.total.im,
        n_koblitz_rounded: eval.rounded,
        n_diagonal: eval.diagonal,
        class_partials: eval
            .classes
            .into_iter()
            .map(|(w, z)| ClassPartial { representative: w, re: z.re, im: z.im })
            .collect(),
    })
}

/// Outcome of comparing one class contribution against its Katz sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModulusStatus {
    Match,
    Mismatch,
    /// `|H|` below threshold.
    Untestable,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassCheck {
    pub representative: Vec<u32>,
    /// Koblitz-grouped contribution.
    pub partial: (f64, f64),
    /// Re-indexed Hasse–Davenport form of the same contribution.
    pub barnes: (f64, f64),
    /// Numerator / denominator character indices after cancellation.
    pub alpha: Vec<u64>,
    pub beta: Vec<u64>,
    pub cancelled: usize,
    /// Exponent `e` in `|partial| = q^e |H|`.
    pub exponent: f64,
    pub h_value: (f64, f64),
    /// `(q−1)·H`, the raw character sum; an integer when no parameters remain.
    pub character_sum: (f64, f64),
    pub h_boundary_weighted: (f64, f64),
    /// `|partial| / (q^e |H|)` when testable.
    pub ratio: Option<f64>,
    /// Observed `partial / (q^e H)` when testable; not asserted.
    pub xi: Option<(f64, f64)>,
    pub status: ModulusStatus,
    /// `|partial| = q^e |H̃|` for the boundary-weighted sum.
    pub boundary_weighted_holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModulusReport {
    pub q: u64,
    pub lambda: i64,
    pub argument: u64,
    pub singular: Option<bool>,
    pub classes: Vec<ClassCheck>,
}

impl ModulusReport {
    /// Every testable class satisfies the modulus relation with `H`.
    pub fn modulus_holds(&self) -> bool {
        self.classes.iter().all(|c| c.status != ModulusStatus::Mismatch)
    }

    pub fn boundary_weighted_holds(&self) -> bool {
        self.classes.iter().all(|c| c.boundary_weighted_holds)
    }

    /// Classes whose parameters cancel completely.
    pub fn empty_classes(&self) -> impl Iterator<Item = &ClassCheck> {
        self.classes.iter().filter(|c| c.alpha.is_empty() && c.beta.is_empty())
    }
}

/// Katz parameters for class representative `w`: numerators `j/d`, denominators
/// `1 − (w_i + dj)/(d h_i)`, coincident pairs cancelled.
pub fn class_hyp_parameters(
    d: u32,
    h: &[u32],
    w: &[u32],
    order: u64,
) -> Result<(Vec<CharIndex>, Vec<CharIndex>, usize)> {
    let mut alpha: Vec<CharIndex> = (0..d as i64)
        .map(|j| CharIndex::from_fraction(j, d as u64, order))
        .collect::<Result<_>>()?;
    let mut beta = Vec::new();
    for (&wi, &hi) in w.iter().zip(h) {
        for j in 0..hi as i64 {
            let b = CharIndex::from_fraction(wi as i64 + d as i64 * j, d as u64 * hi as u64, order)?;
            beta.push(-b);
        }
    }
    let mut cancelled = 0;
    alpha.retain(|a| {
        if let Some(pos) = beta.iter().position(|b| b == a) {
            beta.remove(pos);
            cancelled += 1;
            false
        } else {
            true
        }
    });
    Ok((alpha, beta, cancelled))
}

/// Per-class comparison of Koblitz contributions with Katz sums at
/// `Π h_i^{h_i} · λ^d`.
pub fn theorem41_check(family: &DeformationFamily, spec: &FieldSpec) -> Result<ModulusReport> {
    let order = spec.unit_order();
    let hprod: u64 = family.h.iter().filter(|&&x| x > 0).map(|&x| x as u64).product();
    let need = family.d as u64 * hprod;
    if order % need != 0 {
        return Err(Error::NotDivisor { d: need, order });
    }
    let lam = family.lambda_in(spec)?;
    if lam.is_zero() {
        return Err(Error::Precondition("λ must be nonzero".into()));
    }
    let table = GaussTable::new(spec);
    let q = spec.order() as f64;
    let n = family.n() as f64;
    let d = family.d as f64;

    let hh = family.h.iter().fold(FieldElement::ONE, |acc, &hi| {
        spec.mul(acc, spec.pow(spec.from_int(hi as i64), hi as i64).expect("non-negative"))
    });
    let argument = spec.mul(hh, spec.pow(lam, family.d as i64)?);

    let wset = build_wset(family.d, &family.h);
    let mut classes = Vec::new();
    for class in &wset.classes {
        let w = &class.representative;
        let partial = class_partial(family, spec, &table, class)?;
        let barnes = barnes_partial(family, spec, &table, w)?;
        let (alpha, beta, cancelled) = class_hyp_parameters(family.d, &family.h, w, order)?;
        let params = HypIndexParams { alpha: alpha.clone(), beta: beta.clone(), t: argument };
        let h_value = hyp_fourier(spec, &table, &params)?;
        let h_weighted = hyp_fourier_boundary_weighted(spec, &table, &params)?;
        let exponent = (n - 2.0 * d - 1.0) / 2.0 + cancelled as f64;
        let scale = q.powf(exponent);

        let (ratio, xi, status) = if h_value.norm() > H_ZERO_THRESHOLD {
            let ratio = partial.norm() / (scale * h_value.norm());
            let xi = partial / (h_value * scale);
            let status = if (ratio - 1.0).abs() < MODULUS_REL_TOL {
                ModulusStatus::Match
            } else {
                ModulusStatus::Mismatch
            };
            (Some(ratio), Some((xi.re, xi.im)), status)
        } else {
            (None, None, ModulusStatus::Untestable)
        };
        let weighted_gap = (partial.norm() - scale * h_weighted.norm()).abs();
        let character_sum = h_value * order as f64;
        classes.push(ClassCheck {
            representative: w.clone(),
            partial: (partial.re, partial.im),
            barnes: (barnes.re, barnes.im),
            alpha: alpha.iter().map(|a| a.value()).collect(),
            beta: beta.iter().map(|b| b.value()).collect(),
            cancelled,
            exponent,
            h_value: (h_value.re, h_value.im),
            character_sum: (character_sum.re, character_sum.im),
            h_boundary_weighted: (h_weighted.re, h_weighted.im),
            ratio,
            xi,
            status,
            boundary_weighted_holds: weighted_gap < 1e-6 * (1.0 + partial.norm()),
        });
    }
    Ok(ModulusReport {
        q: spec.order(),
        lambda: family.lambda,
        argument: argument.index(),
        singular: family.known_singular(spec),
        classes,
    })
}
