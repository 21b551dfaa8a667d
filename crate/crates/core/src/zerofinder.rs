//! Certified zeros of `E2`.
//!
//! The zero labelled `-d/c` is `γ⁻¹τ` where `γ = (a b; c d)` and `τ` solves
//! `h(τ) = a/c` near `a/c + 6i/π`. Newton's method for `h` converges in a few
//! steps there because `h' ≈ 1`, and all the arithmetic at tiny heights is
//! reduced to a single Möbius map.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::eisenstein::{self, ComplexPoint};
use crate::equivariant;
use crate::error::{Error, Result};
use crate::modular::{self, ReducedFraction, UnimodularMatrix};

/// `6/π`, the height of the strip where `h` is real.
pub const V0: f64 = 6.0 / PI;

/// Half-width of the strip around `6/π` that contains the real locus of `h`.
pub const STRIP_EPS: f64 = 0.000283;

pub const NEWTON_MAX_ITERATIONS: usize = 50;
pub const NEWTON_STOP: f64 = 1e-13;
pub const NEWTON_ACCEPT: f64 = 1e-12;

/// Absolute floor of the residual acceptance `|E2(z0)| < floor + 10·bound`.
pub const RESIDUAL_FLOOR: f64 = 1e-9;

/// `24 (6/π) e^{-2π·6/π} = 24 v0 e^{-12}`.
pub fn lambda0() -> f64 {
    24.0 * V0 * (-12.0f64).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    pub v0: f64,
    pub lambda0: f64,
    pub strip_eps: f64,
}

impl Constants {
    pub fn get() -> Self {
        Constants {
            v0: V0,
            lambda0: lambda0(),
            strip_eps: STRIP_EPS,
        }
    }
}

/// One certified zero of `E2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroRecord {
    /// `-d/c`
    pub label: ReducedFraction,
    pub matrix: UnimodularMatrix,
    /// `-d/c + i/(c² v0)`
    pub predicted1: ComplexPoint,
    /// First-order location corrected by the `λ0` terms.
    pub predicted2: ComplexPoint,
    /// The zero itself, `matrix⁻¹ · strip_point`.
    pub refined: ComplexPoint,
    /// `τ` with `h(τ) = a/c`.
    pub strip_point: ComplexPoint,
    /// `|E2(refined)|`
    pub residual: f64,
    /// Error bound on the evaluation behind `residual`.
    pub residual_bound: f64,
    /// `|refined - predicted1| · c² v0²`
    pub theta_scaled: f64,
    pub newton_iters: usize,
}

impl ZeroRecord {
    pub fn c(&self) -> i64 {
        self.matrix.c
    }

    pub fn d(&self) -> i64 {
        self.matrix.d
    }
}

/// `-d/c + i/(c² v0)`
pub fn predicted_zero_first(label: &ReducedFraction) -> ComplexPoint {
    let c = label.c() as f64;
    ComplexPoint::new(label.value(), 1.0 / (c * c * V0))
}

/// `-d/c + λ0 sin(2πa/c)/(c² v0²) + i (1 - (λ0/v0) cos(2πa/c))/(c² v0)`,
/// with `a` taken from `g`.
pub fn predicted_zero_second(label: &ReducedFraction, g: &UnimodularMatrix) -> ComplexPoint {
    let c = label.c() as f64;
    let l0 = lambda0();
    let angle = 2.0 * PI * (g.a.rem_euclid(g.c) as f64) / c;
    let c2 = c * c;
    ComplexPoint::new(
        label.value() + l0 * angle.sin() / (c2 * V0 * V0),
        (1.0 - (l0 / V0) * angle.cos()) / (c2 * V0),
    )
}

/// Solution of `h(τ) = target` in the strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripSolution {
    pub tau: Complex64,
    pub iterations: usize,
    /// `|h(τ) - target|` at the returned point.
    pub residual: f64,
}

/// Newton's method for `h(τ) = t` with `t ∈ (-1/2, 1/2]`, from `t + i v0`.
fn newton_in_strip(target: f64) -> Result<StripSolution> {
    let mut tau = Complex64::new(target, V0);
    let mut residual = f64::INFINITY;
    for iterations in 0..=NEWTON_MAX_ITERATIONS {
        let (h, h_prime) = equivariant::eval_h_and_prime(tau)?;
        let r = h - target;
        residual = r.norm();
        if residual < NEWTON_STOP {
            return Ok(StripSolution {
                tau,
                iterations,
                residual,
            });
        }
        if iterations == NEWTON_MAX_ITERATIONS {
            break;
        }
        tau -= r / h_prime;
    }
    if residual < NEWTON_ACCEPT {
        return Ok(StripSolution {
            tau,
            iterations: NEWTON_MAX_ITERATIONS,
            residual,
        });
    }
    Err(Error::NoConvergence { target, residual })
}

/// Integer `k` with `num/den - k ∈ (-1/2, 1/2]`.
fn canonical_shift(num: i64, den: i64) -> i64 {
    // smallest k with 2(num - k den) ≤ den
    let k = -(den - 2 * num).div_euclid(2 * den);
    debug_assert!(-den < 2 * (num - k * den) && 2 * (num - k * den) <= den);
    k
}

/// Solves `h(τ) = a/c`. The target is first shifted into `(-1/2, 1/2]` and
/// the solution shifted back by the same integer, so `Re τ` lies within
/// `1/2` of `a/c`.
pub fn solve_h_equals(target: &ReducedFraction) -> Result<StripSolution> {
    let k = canonical_shift(target.num(), target.den());
    let reduced = (target.num() - k * target.den()) as f64 / target.den() as f64;
    let mut solution = newton_in_strip(reduced)?;
    solution.tau += k as f64;
    Ok(solution)
}

/// Finds, certifies and records the zero with label `-d/c ∈ [-1/2, 1/2]`.
pub fn refine_zero(label: &ReducedFraction) -> Result<ZeroRecord> {
    if !label.in_closed_half_interval() {
        return Err(Error::LabelOutOfRange {
            num: label.num(),
            den: label.den(),
        });
    }
    let g = modular::matrix_from_fraction(label);
    let (a, c) = (g.a, g.c);
    let k = canonical_shift(a, c);
    let reduced_target = (a - k * c) as f64 / c as f64;
    let solution = newton_in_strip(reduced_target)?;
    let tau_reduced = solution.tau;
    let strip_point = tau_reduced + k as f64;

    let alpha = g.inverse();
    let refined = modular::mobius(&alpha, strip_point);

    // αu - αw = (u - w) / (j(α,u) j(α,w)) with u = τ, w = a/c + i v0;
    // j(α, w) = -i c v0 exactly, j(α, τ) = -c τ + a.
    let cf = c as f64;
    let offset = tau_reduced - Complex64::new(reduced_target, V0);
    let j_tau = -cf * tau_reduced + (a - k * c) as f64;
    let j_hat = Complex64::new(0.0, -cf * V0);
    let shift_from_first = offset / (j_tau * j_hat);
    let theta_scaled = shift_from_first.norm() * cf * cf * V0 * V0;

    let e2 = eisenstein::eval_e2(refined)?;
    let residual = e2.value.norm();
    let limit = RESIDUAL_FLOOR + 10.0 * e2.error_bound;
    if !(residual < limit) {
        return Err(Error::ResidualTooLarge {
            num: label.num(),
            den: label.den(),
            residual,
            limit,
        });
    }
    if !(theta_scaled < STRIP_EPS) {
        return Err(Error::CertificationFailed {
            num: label.num(),
            den: label.den(),
            theta: theta_scaled,
            limit: STRIP_EPS,
        });
    }
    debug_assert!(refined.im > 0.0);
    debug_assert!(refined.re.abs() <= 0.5 + modular::DOMAIN_TOLERANCE);

    Ok(ZeroRecord {
        label: *label,
        matrix: g,
        predicted1: predicted_zero_first(label),
        predicted2: predicted_zero_second(label, &g),
        refined: refined.into(),
        strip_point: strip_point.into(),
        residual,
        residual_bound: e2.error_bound,
        theta_scaled,
        newton_iters: solution.iterations,
    })
}

fn bisect(what: &'static str, lo: f64, hi: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { what, lo, hi });
    }
    let lo_negative = f_lo < 0.0;
    while hi - lo > equivariant::BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if (f(mid)? < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Height of the unique zero on `Re z = 0`, by bisection of the real
/// function `E2(iy)` on `[0.3, 1]`.
pub fn zero_on_imaginary_axis() -> Result<f64> {
    bisect("E2(iy)", 0.3, 1.0, |y| {
        Ok(eisenstein::eval_e2(Complex64::new(0.0, y))?.value.re)
    })
}

/// Height of the zero on `Re z = -1/2`, by bisection of `E2(-1/2 + iy)` on
/// `[0.05, 0.3]`.
pub fn zero_on_half_line() -> Result<f64> {
    bisect("E2(-1/2 + iy)", 0.05, 0.3, |y| {
        Ok(eisenstein::eval_e2(Complex64::new(-0.5, y))?.value.re)
    })
}

/// Which zeros to put in a catalog.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogSelector {
    /// Every label with denominator up to the bound.
    MaxDenominator(u32),
    /// Every zero with `Im z ≥ min_height`.
    MinHeight(f64),
}

impl CatalogSelector {
    fn max_denominator(&self) -> u32 {
        match *self {
            CatalogSelector::MaxDenominator(q) => q,
            CatalogSelector::MinHeight(eps) => {
                let q = (1.0 / (eps * V0)).sqrt().ceil() + 1.0;
                q.min(modular::MAX_DENOMINATOR as f64) as u32
            }
        }
    }
}

/// Total order used for catalogs: height descending, then real part ascending.
pub fn catalog_order(a: &ZeroRecord, b: &ZeroRecord) -> Ordering {
    b.refined
        .im
        .total_cmp(&a.refined.im)
        .then(a.refined.re.total_cmp(&b.refined.re))
}

/// Refines every label of the selector concurrently and returns the zeros
/// ordered by [`catalog_order`].
pub fn build_catalog(selector: CatalogSelector) -> Result<Vec<ZeroRecord>> {
    if let CatalogSelector::MinHeight(eps) = selector {
        if !(eps > 0.0) {
            return Err(Error::NotInUpperHalfPlane { re: 0.0, im: eps });
        }
    }
    let labels = modular::farey_labels(selector.max_denominator());
    let mut records = labels
        .par_iter()
        .map(refine_zero)
        .collect::<Result<Vec<_>>>()?;
    if let CatalogSelector::MinHeight(eps) = selector {
        records.retain(|r| r.refined.im >= eps);
    }
    records.sort_by(catalog_order);
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z1: f64 = 0.523_521_700_017_999_2;
    const Z2: f64 = 0.130_919_030_396_762_45;

    fn label(c: i64, d: i64) -> ReducedFraction {
        ReducedFraction::from_bottom_row(c, d).unwrap()
    }

    fn close(p: ComplexPoint, re: f64, im: f64, tol: f64) -> bool {
        (p.re - re).abs() < tol && (p.im - im).abs() < tol
    }

    #[test]
    fn constants() {
        let l0 = lambda0();
        assert!(0.000281 < l0 && l0 < 0.000282);
        assert!((l0 - 0.000_281_63).abs() < 1e-8);
    }

    #[test]
    fn first_order_predictions() {
        assert!(close(predicted_zero_first(&label(1, 0)), 0.0, std::f64::consts::FRAC_PI_6, 1e-12));
        assert!(close(predicted_zero_first(&label(3, 1)), -1.0 / 3.0, 0.0581776, 5e-8));
        assert!(close(predicted_zero_first(&label(5, 2)), -0.4, 0.020944, 5e-7));
    }

    #[test]
    fn second_order_predictions() {
        let l0 = lambda0();
        let top = predicted_zero_second(&label(1, 0), &modular::matrix_from_bottom_row(1, 0).unwrap());
        assert_eq!(top.re, 0.0);
        assert!((top.im - Z1).abs() < 5e-7);
        let half = predicted_zero_second(&label(2, 1), &modular::matrix_from_bottom_row(2, 1).unwrap());
        assert!((half.re + 0.5).abs() < 1e-15);
        assert!((half.im - (1.0 + l0 / V0) / (4.0 * V0)).abs() < 1e-15);
        assert!((half.im - Z2).abs() < 5e-7);
        // a/c = 1/4: cos vanishes, sin = 1
        let g = modular::matrix_from_bottom_row(4, 1).unwrap();
        assert_eq!(g.a, 1);
        let quarter = predicted_zero_second(&label(4, 1), &g);
        assert!((quarter.im - 1.0 / (16.0 * V0)).abs() < 1e-15);
        assert!((quarter.re - (-0.25 + l0 / (16.0 * V0 * V0))).abs() < 1e-15);
    }

    #[test]
    fn canonical_shift_range() {
        for den in 1..20i64 {
            for num in -3 * den..3 * den {
                let k = canonical_shift(num, den);
                let r = num - k * den;
                assert!(-den < 2 * r && 2 * r <= den, "{num}/{den}");
            }
        }
    }

    #[test]
    fn strip_solutions() {
        let zero = solve_h_equals(&ReducedFraction::new(0, 1).unwrap()).unwrap();
        assert!(zero.tau.re.abs() < 1e-15);
        assert!((zero.tau.im - 1.0 / Z1).abs() < 1e-10, "{}", zero.tau);
        assert!(zero.iterations <= 4);
        let half = solve_h_equals(&ReducedFraction::new(1, 2).unwrap()).unwrap();
        assert!((half.tau.re - 0.5).abs() < 1e-14);
        assert!(half.iterations <= 4);
        let shifted = solve_h_equals(&ReducedFraction::new(7, 3).unwrap()).unwrap();
        let h = equivariant::eval_h_finite(shifted.tau).unwrap();
        assert!((h - 7.0 / 3.0).norm() < 1e-12);
    }

    #[test]
    fn refine_known_zeros() {
        let top = refine_zero(&label(1, 0)).unwrap();
        assert!(close(top.refined, 0.0, Z1, 1e-11), "{}", top.refined);
        let z4 = refine_zero(&label(4, 1)).unwrap();
        assert!(close(z4.refined, -0.249_995_174_367_836_8, 0.032_724_915_024_750_48, 1e-10));
        let z51 = refine_zero(&label(5, 1)).unwrap();
        assert!(close(z51.refined, -0.199_997_065_928_732_48, 0.020_942_992_286_928_155, 1e-10));
        let z2 = refine_zero(&label(2, 1)).unwrap();
        assert!(close(z2.refined, -0.5, Z2, 1e-10));
    }

    #[test]
    fn record_invariants() {
        for r in build_catalog(CatalogSelector::MaxDenominator(12)).unwrap() {
            assert!(r.theta_scaled < STRIP_EPS);
            let a_over_c = r.matrix.a as f64 / r.matrix.c as f64;
            let h = equivariant::eval_h_finite(r.strip_point.finite().unwrap()).unwrap();
            assert!((h - a_over_c).norm() < 1e-12);
            assert!((r.strip_point.im - V0).abs() < STRIP_EPS);
            let back = modular::mobius(&r.matrix.inverse(), r.strip_point.finite().unwrap());
            assert_eq!(back, r.refined.finite().unwrap());
            assert!(r.refined.im > 0.0 && r.refined.re.abs() <= 0.5 + 1e-12);
            // the direct difference agrees with the cocycle identity
            let direct = (r.refined.finite().unwrap() - r.predicted1.finite().unwrap()).norm();
            let c2v02 = (r.c() * r.c()) as f64 * V0 * V0;
            assert!((direct * c2v02 - r.theta_scaled).abs() < 1e-9, "{}", r.label);
        }
    }

    #[test]
    fn refine_rejects_out_of_range_labels() {
        assert!(matches!(
            refine_zero(&ReducedFraction::new(2, 3).unwrap()),
            Err(Error::LabelOutOfRange { .. })
        ));
    }

    #[test]
    fn axis_zeros() {
        assert!(eisenstein::eval_e2(Complex64::new(0.0, 0.3)).unwrap().value.re < 0.0);
        assert!(eisenstein::eval_e2(Complex64::new(0.0, 1.0)).unwrap().value.re > 0.0);
        let y1 = zero_on_imaginary_axis().unwrap();
        assert!((y1 - Z1).abs() < 1e-12, "{y1}");
        let top = refine_zero(&label(1, 0)).unwrap();
        assert!((top.refined.im - y1).abs() < 1e-11);

        let y2 = zero_on_half_line().unwrap();
        assert!((y2 - Z2).abs() < 1e-11, "{y2}");
        let half = refine_zero(&ReducedFraction::new(1, 2).unwrap()).unwrap();
        assert!((half.refined.im - y2).abs() < 1e-10);
    }

    #[test]
    fn half_line_relation() {
        // E2(-1/2 + i/(4y)) = -4y² E2(-1/2 + iy) + (24/π) y
        let y = 0.2;
        let lhs = eisenstein::eval_e2(Complex64::new(-0.5, 1.0 / (4.0 * y))).unwrap().value;
        let rhs = -4.0 * y * y * eisenstein::eval_e2(Complex64::new(-0.5, y)).unwrap().value + 24.0 / PI * y;
        assert!((lhs - rhs).norm() < 1e-10);
    }

    #[test]
    fn catalog_shapes() {
        let one = build_catalog(CatalogSelector::MaxDenominator(1)).unwrap();
        assert_eq!(one.len(), 1);
        let five = build_catalog(CatalogSelector::MaxDenominator(5)).unwrap();
        assert_eq!(five.len(), modular::farey_labels(5).len());
        for w in five.windows(2) {
            assert_ne!(catalog_order(&w[0], &w[1]), Ordering::Greater);
        }
        for (c, d) in [(1, 0), (2, -1), (3, 1), (3, -1), (4, 1), (4, -1), (5, 1), (5, 2), (5, -1), (5, -2)] {
            assert!(five.iter().any(|r| (r.c(), r.d()) == (c, d)), "({c}, {d})");
        }
        // conjugate pairs mirror across the imaginary axis
        for r in &five {
            if let Some(m) = five.iter().find(|m| m.label.num() == -r.label.num() && m.label.den() == r.label.den() && r.label.num() != 0 && 2 * r.label.num().abs() != r.label.den()) {
                assert!((m.refined.re + r.refined.re).abs() < 1e-11);
                assert!((m.refined.im - r.refined.im).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn catalog_by_height() {
        let band = build_catalog(CatalogSelector::MinHeight(0.002)).unwrap();
        assert!(band.iter().all(|r| r.refined.im >= 0.002));
        // height ≈ 1/(c² v0) ≥ 0.002 needs c ≤ 16
        assert!(band.iter().all(|r| r.c() <= 16));
        let want: usize = modular::farey_labels(16).len();
        assert_eq!(band.len(), want);
    }
}
