//! Evaluation of `E2(z) = 1 - 24 Σ σ1(n) qⁿ`, `q = e^{2πiz}`, its derivative,
//! and an independent evaluation through the discriminant `Δ`.
//!
//! Direct summation is only used at heights `Im z ≥ √3/2`, where every term
//! after the first few is below binary64 resolution. Lower points are moved
//! into the fundamental domain first and the transformation law
//! `E2(γz) = (cz+d)² E2(z) - (6i/π) c (cz+d)` is solved for `E2(z)`.

use std::borrow::Cow;
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modular::{self, UnimodularMatrix};

/// `√3/2`, the lowest height in the fundamental domain.
pub const SQRT3_OVER_2: f64 = 0.866_025_403_784_438_6;

/// Absolute truncation target used by [`eval_e2`].
pub const DEFAULT_TARGET: f64 = 1e-16;

/// Hard cap on the number of Fourier terms [`plan_truncation`] will return.
pub const MAX_TERMS: usize = 1_000_000;

/// Step for the central difference of `Δ` in [`eval_e2_via_delta`].
pub const DELTA_FD_STEP: f64 = 1e-6;

const SHARED_SIGMA_LEN: usize = 4096;

/// A point of the upper half-plane, its real boundary, or the cusp at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexPoint {
    pub re: f64,
    pub im: f64,
    pub at_infinity: bool,
}

impl ComplexPoint {
    pub const INFINITY: ComplexPoint = ComplexPoint {
        re: 0.0,
        im: 0.0,
        at_infinity: true,
    };

    pub const fn new(re: f64, im: f64) -> Self {
        ComplexPoint {
            re,
            im,
            at_infinity: false,
        }
    }

    /// The finite value, or `None` at the cusp.
    pub fn finite(&self) -> Option<Complex64> {
        (!self.at_infinity).then(|| Complex64::new(self.re, self.im))
    }

    pub fn is_in_upper_half_plane(&self) -> bool {
        !self.at_infinity && self.im > 0.0
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        ComplexPoint::new(z.re, z.im)
    }
}

impl fmt::Display for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.at_infinity {
            write!(f, "∞")
        } else if self.im < 0.0 {
            write!(f, "{} - {}i", self.re, -self.im)
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}

/// Divisor sums `σ1(n)` for `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SigmaTable {
    values: Vec<u64>,
}

impl SigmaTable {
    /// `σ1(n)`, 1-based. Panics if `n` is zero or past the end of the table.
    pub fn get(&self, n: usize) -> u64 {
        self.values[n - 1]
    }

    /// `σ1(1), σ1(2), ...` in order.
    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Divisor sieve, `O(n log n)`.
pub fn sigma1_table(n_max: usize) -> SigmaTable {
    let mut values = vec![0u64; n_max];
    for divisor in 1..=n_max {
        for multiple in (divisor..=n_max).step_by(divisor) {
            values[multiple - 1] += divisor as u64;
        }
    }
    SigmaTable { values }
}

fn sigma_for(n_terms: usize) -> Cow<'static, SigmaTable> {
    static SHARED: OnceLock<SigmaTable> = OnceLock::new();
    if n_terms <= SHARED_SIGMA_LEN {
        Cow::Borrowed(SHARED.get_or_init(|| sigma1_table(SHARED_SIGMA_LEN)))
    } else {
        Cow::Owned(sigma1_table(n_terms))
    }
}

/// Integral-test bound on `|E2(z) - (1 - 24 Σ_{n≤N} σ1(n) qⁿ)|` for all `z`
/// with `Im z ≥ y`:
///
/// `24 e^{-2πNy} (N²/(2πy) + 2N/(2πy)² + 2/(2πy)³)`.
pub fn tail_bound(n_terms: usize, y: f64) -> Result<f64> {
    if !(y >= SQRT3_OVER_2) {
        return Err(Error::HeightBelowDomain(y));
    }
    Ok(tail_bound_formula(n_terms.max(1), y))
}

// The integral test only needs t² e^{-2πyt} decreasing on t ≥ 1, which holds
// for y > 1/π; reduced points may sit a rounding error below √3/2.
pub(crate) fn tail_bound_formula(n_terms: usize, y: f64) -> f64 {
    let n = n_terms as f64;
    let t = 2.0 * PI * y;
    24.0 * (-t * n).exp() * (n * n / t + 2.0 * n / (t * t) + 2.0 / (t * t * t))
}

/// Bound on `|E2(z) - 1|` for `Im z ≥ y`: the `N = 1` tail plus the first term.
pub fn global_bound(y: f64) -> Result<f64> {
    Ok(24.0 * (-2.0 * PI * y).exp() + tail_bound(1, y)?)
}

/// A truncation length together with the tail bound it guarantees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPlan {
    pub terms: usize,
    pub min_height: f64,
    pub guaranteed_tail: f64,
}

/// Smallest `N` with `tail_bound(N, y_min) ≤ target_eps`.
pub fn plan_truncation(y_min: f64, target_eps: f64) -> Result<TruncationPlan> {
    if !(y_min >= SQRT3_OVER_2) {
        return Err(Error::HeightBelowDomain(y_min));
    }
    plan_unchecked(y_min, target_eps)
}

fn plan_unchecked(y_min: f64, target_eps: f64) -> Result<TruncationPlan> {
    let unattainable = || Error::UnattainableTolerance {
        target: target_eps,
        height: y_min,
        cap: MAX_TERMS,
    };
    if !(target_eps > 0.0) {
        return Err(unattainable());
    }
    let ok = |n: usize| tail_bound_formula(n, y_min) <= target_eps;

    let mut hi = 1usize;
    while !ok(hi) {
        if hi >= MAX_TERMS {
            return Err(unattainable());
        }
        hi = (hi * 2).min(MAX_TERMS);
    }
    // ok(hi) holds; lo is the largest value known to fail.
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(TruncationPlan {
        terms: hi,
        min_height: y_min,
        guaranteed_tail: tail_bound_formula(hi, y_min),
    })
}

fn nome(z: Complex64) -> Complex64 {
    // e^{2πiz}; the integer part of Re z is dropped before the exponential.
    let x = z.re - z.re.round();
    Complex64::from_polar((-2.0 * PI * z.im).exp(), 2.0 * PI * x)
}

/// `1 - 24 Σ_{n≤N} σ1(n) e^{2πinz}`, summed in ascending `n`.
pub fn eval_e2_truncated(z: Complex64, n_terms: usize) -> Complex64 {
    let sigma = sigma_for(n_terms);
    let q = nome(z);
    let mut qn = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for &s in &sigma.values()[..n_terms] {
        qn *= q;
        sum += qn * s as f64;
    }
    Complex64::new(1.0, 0.0) - 24.0 * sum
}

/// `E2'(z) = -48πi Σ_{n≤N} n σ1(n) e^{2πinz}`.
pub fn eval_e2_prime(z: Complex64, n_terms: usize) -> Complex64 {
    let sigma = sigma_for(n_terms);
    let q = nome(z);
    let mut qn = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, &s) in sigma.values()[..n_terms].iter().enumerate() {
        qn *= q;
        sum += qn * (s * (i as u64 + 1)) as f64;
    }
    Complex64::new(0.0, -48.0 * PI) * sum
}

/// A value of `E2` together with an absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct E2Value {
    pub value: Complex64,
    pub error_bound: f64,
}

/// Where a point was evaluated: the reducing matrix and its image in `D`.
#[derive(Debug, Clone, Copy)]
struct Lifted {
    matrix: UnimodularMatrix,
    reduced: Complex64,
    /// `cz + d` at the original point.
    j: Complex64,
}

fn lift(z: Complex64) -> Result<Option<Lifted>> {
    if !(z.im > 0.0) || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NotInUpperHalfPlane { re: z.re, im: z.im });
    }
    if z.im >= SQRT3_OVER_2 {
        return Ok(None);
    }
    let (matrix, reduced) = modular::reduce_to_fundamental(ComplexPoint::from(z))?;
    let reduced = reduced.finite().expect("reduction of a finite point is finite");
    let j = modular::jfactor(&matrix, z);
    Ok(Some(Lifted { matrix, reduced, j }))
}

fn high_strip_terms(y: f64) -> Result<TruncationPlan> {
    plan_unchecked(y, DEFAULT_TARGET)
}

/// `E2(z)` for any `z` in the upper half-plane, with an error bound.
pub fn eval_e2(z: Complex64) -> Result<E2Value> {
    let eps = f64::EPSILON;
    match lift(z)? {
        None => {
            let plan = high_strip_terms(z.im)?;
            let value = eval_e2_truncated(z, plan.terms);
            Ok(E2Value {
                value,
                error_bound: plan.guaranteed_tail + 8.0 * eps * value.norm().max(1.0),
            })
        }
        Some(Lifted { matrix, reduced, j }) => {
            let plan = high_strip_terms(reduced.im)?;
            let high = eval_e2_truncated(reduced, plan.terms);
            let c = matrix.c as f64;
            let correction = Complex64::new(0.0, 6.0 / PI) * c * j;
            let j2 = j * j;
            let value = (high + correction) / j2;
            let scale = j2.norm();
            // j = cz + d cancels near a cusp; its absolute error moves both
            // the correction term and the reduced point z' = a/c - 1/(c j)
            let d = matrix.d as f64;
            let j_err = 4.0 * eps * (c.abs() * z.norm() + d.abs());
            let reduced_err = j_err / (c.abs() * scale);
            let slope = eval_e2_prime(reduced, plan.terms + 2).norm();
            let rounding = 8.0 * eps * (high.norm().max(1.0) + correction.norm())
                + 6.0 / PI * c.abs() * j_err
                + 2.0 * slope * reduced_err;
            Ok(E2Value {
                value,
                error_bound: (plan.guaranteed_tail + rounding) / scale + 4.0 * eps * value.norm(),
            })
        }
    }
}

/// `E2(z)` and `E2'(z)` together, valid everywhere in the upper half-plane.
///
/// Low points use the derivative of the transformation law:
/// `E2'(z) = (E2'(γz)/j² - 2cj E2(z) + (6i/π)c²) / j²`, `j = cz + d`.
pub fn eval_e2_with_derivative(z: Complex64) -> Result<(Complex64, Complex64)> {
    match lift(z)? {
        None => {
            let plan = high_strip_terms(z.im)?;
            // the derivative series carries an extra factor n; two more terms cover it
            let n = plan.terms + 2;
            Ok((eval_e2_truncated(z, n), eval_e2_prime(z, n)))
        }
        Some(Lifted { matrix, reduced, j }) => {
            let n = high_strip_terms(reduced.im)?.terms + 2;
            let high = eval_e2_truncated(reduced, n);
            let high_prime = eval_e2_prime(reduced, n);
            let c = matrix.c as f64;
            let i6pi = Complex64::new(0.0, 6.0 / PI);
            let j2 = j * j;
            let value = (high + i6pi * c * j) / j2;
            let prime = (high_prime / j2 - 2.0 * c * j * value + i6pi * c * c) / j2;
            Ok((value, prime))
        }
    }
}

/// `Δ(z) = q Π_{n≤N} (1 - qⁿ)²⁴`, with `N` chosen so `|q|^N` is negligible.
fn delta_product(z: Complex64) -> Complex64 {
    let q = Complex64::from_polar((-2.0 * PI * z.im).exp(), 2.0 * PI * z.re);
    let r = q.norm();
    let n_terms = ((40.0 * std::f64::consts::LN_10) / (-r.ln())).ceil().max(1.0) as usize;
    let mut qn = Complex64::new(1.0, 0.0);
    let mut product = Complex64::new(1.0, 0.0);
    for _ in 0..n_terms {
        qn *= q;
        product *= Complex64::new(1.0, 0.0) - qn;
    }
    q * product.powi(24)
}

/// `E2 = (1/2πi) Δ'/Δ`, with `Δ` from the product formula and `Δ'` from a
/// central difference. Shares no code with the Fourier evaluation.
pub fn eval_e2_via_delta(z: Complex64) -> Result<Complex64> {
    if !(z.im >= SQRT3_OVER_2) {
        return Err(Error::HeightBelowDomain(z.im));
    }
    let h = DELTA_FD_STEP;
    let center = delta_product(z);
    let plus = delta_product(z + h);
    let minus = delta_product(z - h);
    let usable = |w: Complex64| w.norm() > f64::MIN_POSITIVE && w.is_finite();
    if !(usable(center) && usable(plus) && usable(minus)) {
        return Err(Error::DeltaUnderflow { re: z.re, im: z.im });
    }
    let derivative = (plus - minus) / (2.0 * h);
    Ok(derivative / center / Complex64::new(0.0, 2.0 * PI))
}
