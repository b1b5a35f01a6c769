//! Katz's finite-field hypergeometric sum
//!
//! ```text
//! H(α; β | t) = Σ_{x_1⋯x_n = t·y_1⋯y_m} ψ(Σx − Σy) Π χ_{α_i}(x_i) Π χ̄_{β_j}(y_j)
//! ```
//!
//! over `x ∈ (F_q^*)^n`, `y ∈ (F_q^*)^m`, evaluated directly on the torus and
//! through its Fourier expansion in Gauss sums. The `y`-side Gauss sums in the
//! expansion are taken against `ψ̄`, i.e. `g_ψ̄(u) = χ_u(−1)·g(u)`; without that
//! twist the expansion equals `Π χ_{β_j}(−1) · H(α; β | (−1)^m t)` instead
//! (see [`literal_expansion`]).

use num_complex::Complex64;
use rayon::prelude::*;

use crate::charsums::{unit_root, CharIndex, ComplexValue, GaussTable};
use crate::error::{Error, Result};
use crate::ffield::{FieldElement, FieldSpec};

/// Torus points a direct evaluation may visit: `(q−1)^{n+m−1}`.
pub const DIRECT_BUDGET: u128 = 810_000;

/// Fixed chunk width for the parallel Fourier sum; keeps reduction order
/// independent of the thread count.
const FOURIER_CHUNK: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct HypIndexParams {
    pub alpha: Vec<CharIndex>,
    pub beta: Vec<CharIndex>,
    pub t: FieldElement,
}

impl HypIndexParams {
    pub fn new(spec: &FieldSpec, alpha: &[i64], beta: &[i64], t: FieldElement) -> Result<Self> {
        if t.is_zero() {
            return Err(Error::ZeroArgument);
        }
        let n = spec.unit_order();
        Ok(HypIndexParams {
            alpha: alpha.iter().map(|&a| CharIndex::new(a, n)).collect(),
            beta: beta.iter().map(|&b| CharIndex::new(b, n)).collect(),
            t,
        })
    }
}

/// Direct torus sum. The first `n + m − 1` coordinates are free and the last
/// one is solved from the defining relation.
pub fn hyp_direct(spec: &FieldSpec, params: &HypIndexParams) -> Result<ComplexValue> {
    let t_log = spec.dlog(params.t).map_err(|_| Error::ZeroArgument)? as i128;
    let (n, m) = (params.alpha.len(), params.beta.len());
    let order = spec.unit_order();
    if n + m == 0 {
        // V_t is a single point when t = 1 and empty otherwise.
        return Ok(if t_log == 0 { 1.0.into() } else { 0.0.into() });
    }
    let free = n + m - 1;
    let needed = (order as u128).pow(free as u32);
    if needed > DIRECT_BUDGET {
        return Err(Error::BudgetExceeded { needed, limit: DIRECT_BUDGET });
    }

    // All coordinates are handled as discrete logs.
    let psi: Vec<Complex64> = (0..order)
        .map(|k| unit_root(spec.trace(spec.exp(k as i64)) as i128, spec.characteristic()))
        .collect();
    let psi_neg: Vec<Complex64> = psi.iter().map(|z| z.conj()).collect();
    let weights: Vec<i128> = params
        .alpha
        .iter()
        .map(|a| a.value() as i128)
        .chain(params.beta.iter().map(|b| -(b.value() as i128)))
        .collect();

    let mut total = Complex64::new(0.0, 0.0);
    let mut logs = vec![0u64; free];
    loop {
        // Π x = t Π y  ⇔  Σ log x − Σ log y = log t
        let (last, last_is_x) = if n > 0 {
            let sx: i128 = logs[..n - 1].iter().map(|&e| e as i128).sum();
            let sy: i128 = logs[n - 1..].iter().map(|&e| e as i128).sum();
            (t_log + sy - sx, true)
        } else {
            let sy: i128 = logs.iter().map(|&e| e as i128).sum();
            (-t_log - sy, false)
        };
        let last = last.rem_euclid(order as i128) as u64;

        let mut phase: i128 = 0;
        let mut add = Complex64::new(1.0, 0.0);
        let mut coords = logs.iter().copied().enumerate().map(|(i, e)| {
            // position in the (x..., y...) layout
            let pos = if last_is_x && i >= n - 1 { i + 1 } else { i };
            (pos, e)
        });
        let last_pos = if last_is_x { n - 1 } else { n + m - 1 };
        for (pos, e) in coords.by_ref().chain(std::iter::once((last_pos, last))) {
            phase += weights[pos] * e as i128;
            add *= if pos < n { psi[e as usize] } else { psi_neg[e as usize] };
        }
        total += add * unit_root(phase, order);

        let mut i = 0;
        loop {
            if i == free {
                return Ok(total);
            }
            logs[i] += 1;
            if logs[i] < order {
                break;
            }
            logs[i] = 0;
            i += 1;
        }
    }
}

fn fourier_sum<F>(spec: &FieldSpec, t: FieldElement, term: F) -> Result<ComplexValue>
where
    F: Fn(CharIndex) -> Complex64 + Sync,
{
    let t_log = spec.dlog(t).map_err(|_| Error::ZeroArgument)? as i128;
    let order = spec.unit_order();
    let chunks: Vec<Complex64> = (0..order as usize)
        .collect::<Vec<_>>()
        .par_chunks(FOURIER_CHUNK)
        .map(|chunk| {
            chunk.iter().fold(Complex64::new(0.0, 0.0), |acc, &s| {
                let s = CharIndex::new(s as i64, order);
                acc + term(s) * unit_root(-(s.value() as i128) * t_log, order)
            })
        })
        .collect();
    let total = chunks.into_iter().fold(Complex64::new(0.0, 0.0), |a, b| a + b);
    Ok(total / order as f64)
}

/// Fourier expansion
/// `(1/(q−1)) Σ_s Π g(s+α_i) Π g_ψ̄(−s−β_j) χ̄_s(t)`, equal to [`hyp_direct`].
pub fn hyp_fourier(spec: &FieldSpec, table: &GaussTable, params: &HypIndexParams) -> Result<ComplexValue> {
    fourier_sum(spec, params.t, |s| {
        let num: Complex64 = params.alpha.iter().map(|&a| table.get(s + a)).product();
        let den: Complex64 = params.beta.iter().map(|&b| table.get_conj_additive(-s - b)).product();
        num * den
    })
}

/// The expansion with plain Gauss sums on both sides,
/// `(1/(q−1)) Σ_s Π g(s+α_i) Π g(−s−β_j) χ̄_s(t)`.
pub fn literal_expansion(spec: &FieldSpec, table: &GaussTable, params: &HypIndexParams) -> Result<ComplexValue> {
    fourier_sum(spec, params.t, |s| {
        let num: Complex64 = params.alpha.iter().map(|&a| table.get(s + a)).product();
        let den: Complex64 = params.beta.iter().map(|&b| table.get(-s - b)).product();
        num * den
    })
}

/// [`hyp_fourier`] with every Fourier term whose numerator Gauss sums hit
/// `g(0)` (some `s + α_i ≡ 0`) weighted by `q`.
///
/// Rewriting `1/g(x)` as `χ_x(−1)·g(−x)/q` is exact only for `x ≠ 0`
/// (`g(0)^2 = 1`, not `q`). When a Barnes-type quotient of Gauss sums is
/// converted into hypergeometric form, the converted numerator entries carry
/// this defect, and the weighted sum is the exact image.
pub fn hyp_fourier_boundary_weighted(
    spec: &FieldSpec,
    table: &GaussTable,
    params: &HypIndexParams,
) -> Result<ComplexValue> {
    let q = spec.order() as f64;
    fourier_sum(spec, params.t, |s| {
        let num: Complex64 = params.alpha.iter().map(|&a| table.get(s + a)).product();
        let den: Complex64 = params.beta.iter().map(|&b| table.get_conj_additive(-s - b)).product();
        let boundary = params.alpha.iter().any(|&a| (s + a).is_trivial());
        num * den * if boundary { q } else { 1.0 }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn singleton_torus() {
        let k = FieldSpec::prime(7).unwrap();
        let table = GaussTable::new(&k);
        for t in k.units() {
            let params = HypIndexParams::new(&k, &[0], &[], t).unwrap();
            let psi = crate::charsums::add_char(&k, t);
            assert!(close(hyp_direct(&k, &params).unwrap(), psi, 1e-12));
            assert!(close(hyp_fourier(&k, &table, &params).unwrap(), psi, 1e-9));
        }
    }

    #[test]
    fn kloosterman_oracle() {
        let k = FieldSpec::prime(7).unwrap();
        let params = HypIndexParams::new(&k, &[0, 0], &[], FieldElement::ONE).unwrap();
        let oracle: Complex64 = k
            .units()
            .map(|x| crate::charsums::add_char(&k, k.add(x, k.inv(x).unwrap())))
            .sum();
        assert!(close(hyp_direct(&k, &params).unwrap(), oracle, 1e-12));
    }

    #[test]
    fn one_by_one_f5() {
        let k = FieldSpec::prime(5).unwrap();
        let table = GaussTable::new(&k);
        let params = HypIndexParams::new(&k, &[2], &[0], k.from_int(2)).unwrap();
        let d = hyp_direct(&k, &params).unwrap();
        let f = hyp_fourier(&k, &table, &params).unwrap();
        assert!(close(d, f, 1e-6 * 5.0));
    }

    #[test]
    fn literal_expansion_is_a_sign_twist() {
        let k = FieldSpec::prime(7).unwrap();
        let table = GaussTable::new(&k);
        for t in k.units() {
            for beta in [vec![1i64], vec![1, 4], vec![3, 3]] {
                let m = beta.len() as i64;
                let direct = hyp_direct(&k, &HypIndexParams::new(&k, &[2], &beta, t).unwrap()).unwrap();
                let twisted_t = k.mul(t, k.pow(k.from_int(-1), m).unwrap());
                let lit = literal_expansion(
                    &k,
                    &table,
                    &HypIndexParams::new(&k, &[2], &beta, twisted_t).unwrap(),
                )
                .unwrap();
                let sign: f64 = beta
                    .iter()
                    .map(|&b| table.sign_of_minus_one(CharIndex::new(b, 6)))
                    .product();
                assert!(close(direct, lit * sign, 1e-9));
            }
        }
    }

    #[test]
    fn empty_parameters() {
        let k = FieldSpec::prime(7).unwrap();
        let table = GaussTable::new(&k);
        for t in k.units() {
            let params = HypIndexParams::new(&k, &[], &[], t).unwrap();
            let expect = if t == FieldElement::ONE { 1.0 } else { 0.0 };
            assert!(close(hyp_direct(&k, &params).unwrap(), expect.into(), 1e-12));
            assert!(close(hyp_fourier(&k, &table, &params).unwrap(), expect.into(), 1e-12));
        }
    }

    #[test]
    fn permutation_symmetry() {
        let k = FieldSpec::prime(7).unwrap();
        let table = GaussTable::new(&k);
        let t = k.from_int(3);
        let a = hyp_fourier(&k, &table, &HypIndexParams::new(&k, &[0, 2, 4], &[1, 3], t).unwrap()).unwrap();
        let b = hyp_fourier(&k, &table, &HypIndexParams::new(&k, &[4, 0, 2], &[3, 1], t).unwrap()).unwrap();
        assert!(close(a, b, 1e-9));
        let c = hyp_direct(&k, &HypIndexParams::new(&k, &[2, 4], &[3], t).unwrap()).unwrap();
        let d = hyp_direct(&k, &HypIndexParams::new(&k, &[4, 2], &[3], t).unwrap()).unwrap();
        assert!(close(c, d, 1e-9));
    }

    #[test]
    fn errors() {
        let k = FieldSpec::prime(31).unwrap();
        assert_eq!(
            HypIndexParams::new(&k, &[0], &[], FieldElement::ZERO).unwrap_err(),
            Error::ZeroArgument
        );
        let big = HypIndexParams::new(&k, &[0, 0, 0], &[0, 0, 0], FieldElement::ONE).unwrap();
        assert!(matches!(hyp_direct(&k, &big), Err(Error::BudgetExceeded { .. })));
    }
}
