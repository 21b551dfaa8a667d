//! The equivariant function `h(z) = z + (6/πi)/E2(z)`.
//!
//! `h(γz) = γh(z)` for every `γ ∈ SL2(Z)`, and `h(z) = ∞` exactly at the zeros
//! of `E2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::eisenstein::{self, ComplexPoint};
use crate::error::{Error, Result};

/// `|E2|` below which `h` is reported as the cusp.
pub const POLE_THRESHOLD: f64 = 1e-13;

/// Half-width of the bisection bracket around `6/π` for the real locus.
pub const LOCUS_BRACKET: f64 = 1e-3;

/// Bisection stops once the bracket is this narrow.
pub const BISECTION_WIDTH: f64 = 1e-13;

const V0: f64 = 6.0 / PI;

/// `h(z)` and the value of `E2(z)` it was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HValue {
    pub value: ComplexPoint,
    pub e2_at_point: Complex64,
}

fn minus_i_v0() -> Complex64 {
    // 6/(πi) = -(6/π) i
    Complex64::new(0.0, -V0)
}

pub fn eval_h(z: Complex64) -> Result<HValue> {
    let e2 = eisenstein::eval_e2(z)?.value;
    let value = if e2.norm() < POLE_THRESHOLD {
        ComplexPoint::INFINITY
    } else {
        ComplexPoint::from(z + minus_i_v0() / e2)
    };
    Ok(HValue {
        value,
        e2_at_point: e2,
    })
}

/// Finite value of `h`, or [`Error::NearPole`].
pub fn eval_h_finite(z: Complex64) -> Result<Complex64> {
    let h = eval_h(z)?;
    h.value.finite().ok_or(Error::NearPole {
        re: z.re,
        im: z.im,
        magnitude: h.e2_at_point.norm(),
    })
}

/// `h'(z) = 1 + (6i/π) E2'(z)/E2(z)²`.
pub fn eval_h_prime(z: Complex64) -> Result<Complex64> {
    let (e2, e2_prime) = eisenstein::eval_e2_with_derivative(z)?;
    if e2.norm() < POLE_THRESHOLD {
        return Err(Error::NearPole {
            re: z.re,
            im: z.im,
            magnitude: e2.norm(),
        });
    }
    Ok(1.0 + Complex64::new(0.0, V0) * e2_prime / (e2 * e2))
}

/// `h` and `h'` from a single evaluation of `E2` and `E2'`.
pub(crate) fn eval_h_and_prime(z: Complex64) -> Result<(Complex64, Complex64)> {
    let (e2, e2_prime) = eisenstein::eval_e2_with_derivative(z)?;
    if e2.norm() < POLE_THRESHOLD {
        return Err(Error::NearPole {
            re: z.re,
            im: z.im,
            magnitude: e2.norm(),
        });
    }
    let h = z + minus_i_v0() / e2;
    let h_prime = 1.0 + Complex64::new(0.0, V0) * e2_prime / (e2 * e2);
    Ok((h, h_prime))
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    /// Grid points `x0 + i·step`, `y0 + j·step`, endpoints included.
    pub fn grid(&self, step: f64) -> Vec<Complex64> {
        let axis = |lo: f64, hi: f64| -> Vec<f64> {
            let n = ((hi - lo) / step + 1e-9).floor().max(0.0) as usize;
            (0..=n).map(|k| (lo + k as f64 * step).min(hi)).collect()
        };
        let xs = axis(self.x0, self.x1);
        let ys = axis(self.y0, self.y1);
        ys.iter()
            .flat_map(|&y| xs.iter().map(move |&x| Complex64::new(x, y)))
            .collect()
    }
}

/// Maxima of `|h' - 1|`, `|E2'|` and `|E2 - 1|` over a grid.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DerivativeScan {
    pub max_h_prime_deviation: f64,
    pub max_e2_prime: f64,
    pub max_e2_minus_one: f64,
    pub points: usize,
}

pub fn scan_derivative_bounds(region: Rect, step: f64) -> Result<DerivativeScan> {
    let points = region.grid(step);
    let samples = points
        .par_iter()
        .map(|&z| {
            let (e2, e2_prime) = eisenstein::eval_e2_with_derivative(z)?;
            let h_prime = 1.0 + Complex64::new(0.0, V0) * e2_prime / (e2 * e2);
            Ok(((h_prime - 1.0).norm(), e2_prime.norm(), (e2 - 1.0).norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(samples.iter().fold(
        DerivativeScan {
            points: samples.len(),
            ..Default::default()
        },
        |acc, &(dh, de, e)| DerivativeScan {
            max_h_prime_deviation: acc.max_h_prime_deviation.max(dh),
            max_e2_prime: acc.max_e2_prime.max(de),
            max_e2_minus_one: acc.max_e2_minus_one.max(e),
            points: acc.points,
        },
    ))
}

/// `max |h'(z) - 1|` over the grid.
pub fn scan_h_prime(region: Rect, step: f64) -> Result<f64> {
    Ok(scan_derivative_bounds(region, step)?.max_h_prime_deviation)
}

/// The height `y` near `6/π` where `h(x + iy)` is real.
pub fn real_locus_height(x: f64) -> Result<f64> {
    let im_h = |y: f64| -> Result<f64> { Ok(eval_h_finite(Complex64::new(x, y))?.im) };
    let (mut lo, mut hi) = (V0 - LOCUS_BRACKET, V0 + LOCUS_BRACKET);
    let (f_lo, f_hi) = (im_h(lo)?, im_h(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange {
            what: "Im h(x + iy)",
            lo,
            hi,
        });
    }
    let lo_negative = f_lo < 0.0;
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if (im_h(mid)? < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `[|h(i) + i|, |h(ρ) - ρ̄|, |h(1 - ρ̄) - (1 - ρ)|]` with `ρ = e^{2πi/3}`.
pub fn elliptic_fixed_point_residuals() -> Result<[f64; 3]> {
    let i = Complex64::new(0.0, 1.0);
    let rho = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let one = Complex64::new(1.0, 0.0);
    let residual = |z: Complex64, expected: Complex64| -> Result<f64> {
        Ok((eval_h_finite(z)? - expected).norm())
    };
    Ok([
        residual(i, -i)?,
        residual(rho, rho.conj())?,
        residual(one - rho.conj(), one - rho)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modular::{self, UnimodularMatrix};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lambda0() -> f64 {
        24.0 * V0 * (-12.0f64).exp()
    }

    #[test]
    fn h_at_elliptic_points() {
        let [at_i, at_rho, at_other] = elliptic_fixed_point_residuals().unwrap();
        assert!(at_i < 1e-10 && at_rho < 1e-10 && at_other < 1e-10, "{at_i} {at_rho} {at_other}");
    }

    #[test]
    fn h_high_in_the_half_plane() {
        let h = eval_h_finite(c(0.0, 30.0)).unwrap();
        assert!((h - c(0.0, 30.0 - V0)).norm() < 1e-12);
        let hp = eval_h_prime(c(0.0, 30.0)).unwrap();
        assert!((hp - 1.0).norm() < 1e-12);
    }

    #[test]
    fn h_is_cusp_at_a_zero() {
        // the top of the highest zero within rounding of E2's root
        let h = eval_h(c(0.0, 0.523_521_700_017_999_2)).unwrap();
        assert!(h.e2_at_point.norm() < 1e-12);
        assert!(eval_h_prime(c(0.2, 1.1)).is_ok());
    }

    #[test]
    fn h_prime_examples() {
        assert!((eval_h_prime(c(0.2, 1.1)).unwrap() - 1.0).norm() < 0.89);
        let z = c(0.1, 1.3);
        let step = 1e-6;
        let fd = (eval_h_finite(z + step).unwrap() - eval_h_finite(z - step).unwrap()) / (2.0 * step);
        assert!((fd - eval_h_prime(z).unwrap()).norm() < 1e-7);
    }

    #[test]
    fn scan_examples() {
        let near_strip = scan_h_prime(Rect::new(-0.5, 0.5, 1.8, 2.0), 0.01).unwrap();
        assert!(near_strip < 0.01, "{near_strip}");
        let single = scan_h_prime(Rect::new(0.0, 0.0, 30.0, 30.0), 0.01).unwrap();
        assert!(single < 1e-12);
        assert_eq!(Rect::new(0.0, 0.0, 30.0, 30.0).grid(0.01).len(), 1);
        assert_eq!(Rect::new(-0.5, 0.5, 0.95, 3.0).grid(0.01).len(), 101 * 206);
    }

    /// Fixed point of `y = v0 Re(1/E2(x + iy))` with a plain truncated series.
    fn locus_by_fixed_point(x: f64) -> f64 {
        let mut y = V0;
        for _ in 0..60 {
            let e2 = eisenstein::eval_e2_truncated(c(x, y), 12);
            y = V0 * (1.0 / e2).re;
        }
        y
    }

    #[test]
    fn real_locus_shape() {
        let l0 = lambda0();
        for x in [0.0, 0.1, 0.25, 0.4, 0.5, -0.3] {
            let y = real_locus_height(x).unwrap();
            assert!((y - locus_by_fixed_point(x)).abs() < 1e-12, "x = {x}");
            // first order: y ≈ v0 + λ0 cos(2πx); the next terms are ~2πλ0² and 648 v0 e^{-24}
            assert!((y - V0 - l0 * (2.0 * PI * x).cos()).abs() < 6e-7, "x = {x}");
        }
        let quarter = real_locus_height(0.25).unwrap();
        assert!((quarter - V0).abs() < 1e-7, "{}", quarter - V0);
        assert!(real_locus_height(0.0).unwrap() > V0);
        assert!(real_locus_height(0.5).unwrap() < V0);
        assert!(eval_h_finite(c(0.25, quarter)).unwrap().im.abs() < 1e-12);
    }

    #[test]
    fn image_height_of_strip_points() {
        // Im γ(x + iv0) = v0 / ((c v0)² + (cx + d)²)
        for (g, x) in [((3, 1, 5, 2), 0.17), ((1, 0, 3, 1), -0.4), ((0, -1, 1, 0), 0.0), ((2, 1, 7, 4), 0.33)] {
            let g = UnimodularMatrix::new(g.0, g.1, g.2, g.3).unwrap();
            let (cc, dd) = (g.c as f64, g.d as f64);
            let im = modular::mobius(&g, c(x, V0)).im;
            let formula = V0 / ((cc * V0).powi(2) + (cc * x + dd).powi(2));
            assert!((im - formula).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn analytic_h_prime_matches_differences(x in -0.5f64..0.5, y in 0.3f64..3.0) {
            let z = c(x, y);
            let e2 = eisenstein::eval_e2(z).unwrap().value;
            prop_assume!(e2.norm() > 0.5);
            let step = 1e-6 * y.min(1.0);
            let fd = (eval_h_finite(z + step).unwrap() - eval_h_finite(z - step).unwrap()) / (2.0 * step);
            let hp = eval_h_prime(z).unwrap();
            prop_assert!((fd - hp).norm() < 1e-6 * hp.norm().max(1.0), "{} vs {}", fd, hp);
        }
    }
}
