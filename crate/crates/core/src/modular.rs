//! Integer `SL2(Z)` matrices, their Möbius action on the extended upper
//! half-plane, rational zero labels, and reduction into the fundamental
//! domain `D = {|z| ≥ 1, |Re z| ≤ 1/2}`.

use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eisenstein::ComplexPoint;
use crate::error::{Error, Result};

/// Largest denominator accepted by [`farey_labels`].
pub const MAX_DENOMINATOR: u32 = 1_000_000;

/// Iteration cap for [`reduce_to_fundamental`].
pub const REDUCTION_CAP: usize = 10_000;

/// Slack allowed on the boundary of `D`.
pub const DOMAIN_TOLERANCE: f64 = 1e-12;

/// `(a b; c d)` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnimodularMatrix {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

impl UnimodularMatrix {
    pub const IDENTITY: UnimodularMatrix = UnimodularMatrix { a: 1, b: 0, c: 0, d: 1 };
    /// `z ↦ -1/z`
    pub const S: UnimodularMatrix = UnimodularMatrix { a: 0, b: -1, c: 1, d: 0 };
    /// `z ↦ z + 1`
    pub const T: UnimodularMatrix = UnimodularMatrix { a: 1, b: 1, c: 0, d: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 {
            return Err(Error::NotUnimodular {
                a,
                b,
                c,
                d,
                det: det as i64,
            });
        }
        Ok(UnimodularMatrix { a, b, c, d })
    }

    pub const fn translation(n: i64) -> Self {
        UnimodularMatrix { a: 1, b: n, c: 0, d: 1 }
    }

    pub const fn inverse(&self) -> Self {
        UnimodularMatrix {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub const fn determinant(&self) -> i64 {
        self.a * self.d - self.b * self.c
    }
}

impl Mul for UnimodularMatrix {
    type Output = UnimodularMatrix;

    fn mul(self, rhs: UnimodularMatrix) -> UnimodularMatrix {
        UnimodularMatrix {
            a: self.a * rhs.a + self.b * rhs.c,
            b: self.a * rhs.b + self.b * rhs.d,
            c: self.c * rhs.a + self.d * rhs.c,
            d: self.c * rhs.b + self.d * rhs.d,
        }
    }
}

impl fmt::Display for UnimodularMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {}; {} {})", self.a, self.b, self.c, self.d)
    }
}

/// `num/den` in lowest terms with `den ≥ 1`.
///
/// As a zero label this is `-d/c`: `den = c` and `num = -d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedFraction {
    num: i64,
    den: i64,
}

impl ReducedFraction {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den < 1 {
            return Err(Error::NonPositiveDenominator(den));
        }
        if gcd(num, den) != 1 {
            return Err(Error::NotCoprime { num, den });
        }
        Ok(ReducedFraction { num, den })
    }

    /// The label `-d/c` of the zero attached to the bottom row `(c, d)`.
    pub fn from_bottom_row(c: i64, d: i64) -> Result<Self> {
        ReducedFraction::new(-d, c)
    }

    pub const fn num(&self) -> i64 {
        self.num
    }

    pub const fn den(&self) -> i64 {
        self.den
    }

    /// `c` of the bottom row.
    pub const fn c(&self) -> i64 {
        self.den
    }

    /// `d` of the bottom row.
    pub const fn d(&self) -> i64 {
        -self.num
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `-1/2 < num/den ≤ 1/2`.
    pub fn is_canonical(&self) -> bool {
        let twice = 2 * self.num;
        -self.den < twice && twice <= self.den
    }

    /// `-1/2 ≤ num/den ≤ 1/2`.
    pub fn in_closed_half_interval(&self) -> bool {
        (2 * self.num).abs() <= self.den
    }
}

impl fmt::Display for ReducedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `(g, x, y)` with `ax + by = g = gcd(a, b)`.
pub fn extended_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i64, 0i64);
    let (mut old_t, mut t) = (0i64, 1i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// `γz = (az + b)/(cz + d)` on `H ∪ R ∪ {∞}`.
pub fn mobius_apply(g: &UnimodularMatrix, z: ComplexPoint) -> ComplexPoint {
    let Some(w) = z.finite() else {
        return if g.c == 0 {
            ComplexPoint::INFINITY
        } else {
            ComplexPoint::new(g.a as f64 / g.c as f64, 0.0)
        };
    };
    let den = jfactor(g, w);
    if den.re == 0.0 && den.im == 0.0 {
        return ComplexPoint::INFINITY;
    }
    ComplexPoint::from((g.a as f64 * w + g.b as f64) / den)
}

/// Möbius action on a finite point known not to be the pole `-d/c`.
pub fn mobius(g: &UnimodularMatrix, z: Complex64) -> Complex64 {
    (g.a as f64 * z + g.b as f64) / jfactor(g, z)
}

/// The automorphy factor `j(γ, z) = cz + d`.
pub fn jfactor(g: &UnimodularMatrix, z: Complex64) -> Complex64 {
    g.c as f64 * z + g.d as f64
}

/// The matrix `(a b; c d)` attached to a zero label `-d/c`, with `a` the
/// inverse of `d` modulo `c` taken in `[0, c)` and `b = (ad - 1)/c`.
pub fn matrix_from_fraction(label: &ReducedFraction) -> UnimodularMatrix {
    let (c, d) = (label.c(), label.d());
    let (_, inv, _) = extended_gcd(d, c);
    let a = inv.rem_euclid(c);
    let b = (a * d - 1) / c;
    debug_assert_eq!(a * d - b * c, 1);
    UnimodularMatrix { a, b, c, d }
}

/// [`matrix_from_fraction`] from a raw bottom row; rejects non-coprime input.
pub fn matrix_from_bottom_row(c: i64, d: i64) -> Result<UnimodularMatrix> {
    Ok(matrix_from_fraction(&ReducedFraction::from_bottom_row(c, d)?))
}

/// All reduced labels `n/c` with `1 ≤ c ≤ max_den` and `-1/2 < n/c ≤ 1/2`,
/// ordered by denominator, then by value.
pub fn farey_labels(max_den: u32) -> Vec<ReducedFraction> {
    let max_den = max_den.min(MAX_DENOMINATOR) as i64;
    let mut labels = Vec::new();
    for den in 1..=max_den {
        // -den < 2 num ≤ den
        let lo = -((den - 1) / 2);
        let hi = den / 2;
        labels.extend(
            (lo..=hi)
                .filter(|&num| gcd(num, den) == 1)
                .map(|num| ReducedFraction { num, den }),
        );
    }
    labels
}

/// `(g, gz)` with `gz ∈ D`, by alternating integer translations and `z ↦ -1/z`.
pub fn reduce_to_fundamental(z: ComplexPoint) -> Result<(UnimodularMatrix, ComplexPoint)> {
    let stalled = || Error::ReductionStalled {
        re: z.re,
        im: z.im,
        cap: REDUCTION_CAP,
    };
    let mut w = match z.finite() {
        Some(w) if w.im > 0.0 && w.is_finite() => w,
        _ => return Err(Error::NotInUpperHalfPlane { re: z.re, im: z.im }),
    };
    let mut g = UnimodularMatrix::IDENTITY;
    for _ in 0..REDUCTION_CAP {
        let shift = w.re.round();
        if shift != 0.0 {
            if shift.abs() > i64::MAX as f64 / 4.0 {
                return Err(stalled());
            }
            w.re -= shift;
            g = UnimodularMatrix::translation(-(shift as i64)) * g;
        }
        if w.norm_sqr() >= 1.0 - f64::EPSILON {
            return Ok((g, ComplexPoint::from(w)));
        }
        w = -1.0 / w;
        g = UnimodularMatrix::S * g;
    }
    Err(stalled())
}

/// Membership in `D` up to [`DOMAIN_TOLERANCE`].
pub fn in_fundamental_domain(z: Complex64) -> bool {
    z.im > 0.0 && z.norm() >= 1.0 - DOMAIN_TOLERANCE && z.re.abs() <= 0.5 + DOMAIN_TOLERANCE
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> UnimodularMatrix {
        UnimodularMatrix::new(a, b, c, d).unwrap()
    }

    fn close(p: ComplexPoint, re: f64, im: f64, tol: f64) -> bool {
        !p.at_infinity && (p.re - re).abs() < tol && (p.im - im).abs() < tol
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(UnimodularMatrix::new(1, 1, 1, 1).is_err());
        assert!(UnimodularMatrix::new(2, 0, 0, 1).is_err());
    }

    #[test]
    fn mobius_examples() {
        assert!(close(mobius_apply(&UnimodularMatrix::S, ComplexPoint::new(0.0, 2.0)), 0.0, 0.5, 1e-15));
        assert!(close(mobius_apply(&UnimodularMatrix::T, ComplexPoint::new(0.0, 1.0)), 1.0, 1.0, 1e-15));
        let g = m(2, 1, 5, 3);
        assert!(close(mobius_apply(&g, ComplexPoint::INFINITY), 0.4, 0.0, 1e-15));
        assert!(mobius_apply(&UnimodularMatrix::T, ComplexPoint::INFINITY).at_infinity);
        assert!(mobius_apply(&m(1, 0, 2, 1), ComplexPoint::new(-0.5, 0.0)).at_infinity);
        assert!(mobius_apply(&UnimodularMatrix::S, ComplexPoint::new(0.0, 0.0)).at_infinity);
    }

    #[test]
    fn jfactor_examples() {
        let z = Complex64::new(0.0, 1.0);
        assert_eq!(jfactor(&m(1, 0, 2, 1), z), Complex64::new(1.0, 2.0));
        assert_eq!(jfactor(&UnimodularMatrix::IDENTITY, Complex64::new(3.0, 7.0)), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn matrix_from_fraction_examples() {
        assert_eq!(matrix_from_bottom_row(3, 1).unwrap(), m(1, 0, 3, 1));
        assert_eq!(matrix_from_bottom_row(5, 2).unwrap(), m(3, 1, 5, 2));
        assert_eq!(matrix_from_bottom_row(1, 0).unwrap(), m(0, -1, 1, 0));
        assert_eq!(matrix_from_bottom_row(2, 1).unwrap(), m(1, 0, 2, 1));
        assert_eq!(matrix_from_bottom_row(2, -1).unwrap(), m(1, -1, 2, -1));
        assert!(matches!(matrix_from_bottom_row(4, 2), Err(Error::NotCoprime { .. })));
        assert!(matrix_from_bottom_row(0, 1).is_err());
    }

    #[test]
    fn farey_small_cases() {
        let show = |q| farey_labels(q).iter().map(|f| f.to_string()).collect::<Vec<_>>();
        assert_eq!(show(1), ["0/1"]);
        assert_eq!(show(2), ["0/1", "1/2"]);
        assert_eq!(show(3), ["0/1", "1/2", "-1/3", "1/3"]);
    }

    fn brute_force_labels(q: i64) -> Vec<(i64, i64)> {
        let mut out = Vec::new();
        for den in 1..=q {
            for num in -den..=den {
                let twice = 2 * num;
                if -den < twice && twice <= den && gcd(num, den) == 1 {
                    out.push((den, num));
                }
            }
        }
        out
    }

    #[test]
    fn farey_matches_brute_force() {
        for q in 1..=30 {
            let got: Vec<(i64, i64)> = farey_labels(q as u32).iter().map(|f| (f.den(), f.num())).collect();
            let mut want = brute_force_labels(q);
            want.sort_by(|x, y| {
                x.0.cmp(&y.0)
                    .then((x.1 as f64 / x.0 as f64).total_cmp(&(y.1 as f64 / y.0 as f64)))
            });
            assert_eq!(got, want, "q = {q}");
            // one label per reduced residue: the count is the totient sum
            let totient_sum: usize = (1..=q).map(|n| (1..=n).filter(|&k| gcd(k, n) == 1).count()).sum();
            assert_eq!(got.len(), totient_sum);
        }
    }

    #[test]
    fn canonical_interval() {
        assert!(ReducedFraction::new(1, 2).unwrap().is_canonical());
        assert!(!ReducedFraction::new(-1, 2).unwrap().is_canonical());
        assert!(ReducedFraction::new(-1, 2).unwrap().in_closed_half_interval());
        assert!(!ReducedFraction::new(2, 3).unwrap().in_closed_half_interval());
        assert!(ReducedFraction::new(2, 4).is_err());
        assert!(ReducedFraction::new(1, 0).is_err());
    }

    #[test]
    fn reduction_examples() {
        let (g, w) = reduce_to_fundamental(ComplexPoint::new(5.0, 1.0)).unwrap();
        assert_eq!(g, UnimodularMatrix::translation(-5));
        assert!(close(w, 0.0, 1.0, 1e-15));

        let (g, w) = reduce_to_fundamental(ComplexPoint::new(0.0, 0.5)).unwrap();
        assert_eq!(g, UnimodularMatrix::S);
        assert!(close(w, 0.0, 2.0, 1e-15));

        // the first-order prediction for label -2/5 lands on the strip Im ≈ 6/π
        let zhat = ComplexPoint::new(-0.4, 1.0 / (25.0 * 6.0 / std::f64::consts::PI));
        let (_, w) = reduce_to_fundamental(zhat).unwrap();
        let w = w.finite().unwrap();
        assert!(in_fundamental_domain(w));
        assert!((w.im - 6.0 / std::f64::consts::PI).abs() < 1e-3, "{w}");
    }

    #[test]
    fn reduction_rejects_real_points() {
        assert!(reduce_to_fundamental(ComplexPoint::new(0.3, 0.0)).is_err());
        assert!(reduce_to_fundamental(ComplexPoint::INFINITY).is_err());
    }

    fn arb_matrix(bound: i64) -> impl Strategy<Value = UnimodularMatrix> {
        (-bound..=bound, -bound..=bound)
            .prop_filter("coprime, c ≠ 0", |&(c, d)| c != 0 && gcd(c, d) == 1)
            .prop_flat_map(move |(c, d)| {
                let (_, x, y) = extended_gcd(d, c);
                // a d - b c = 1 with a = x, b = -y, shifted along (c, d)
                (-2i64..=2).prop_map(move |k| UnimodularMatrix {
                    a: x + k * c,
                    b: -y + k * d,
                    c,
                    d,
                })
            })
    }

    proptest! {
        #[test]
        fn composition_is_matrix_product(
            g1 in arb_matrix(50), g2 in arb_matrix(50),
            x in -0.5f64..0.5, y in 0.9f64..3.0
        ) {
            prop_assert_eq!(g1.determinant(), 1);
            let z = ComplexPoint::new(x, y);
            let lhs = mobius_apply(&g1, mobius_apply(&g2, z)).finite().unwrap();
            let rhs = mobius_apply(&(g1 * g2), z).finite().unwrap();
            let scale = rhs.norm().max(1.0);
            prop_assert!((lhs - rhs).norm() < 1e-12 * scale, "{} vs {}", lhs, rhs);
        }

        #[test]
        fn jfactor_cocycle(g1 in arb_matrix(20), g2 in arb_matrix(20), x in -2.0f64..2.0, y in 0.1f64..3.0) {
            let z = Complex64::new(x, y);
            let lhs = jfactor(&(g1 * g2), z);
            let rhs = jfactor(&g1, mobius(&g2, z)) * jfactor(&g2, z);
            prop_assert!((lhs - rhs).norm() < 1e-14 * lhs.norm().max(1.0) * 100.0);
        }

        #[test]
        fn matrix_from_fraction_is_unimodular(c in 1i64..2000, d in -2000i64..2000) {
            prop_assume!(gcd(c, d) == 1);
            let g = matrix_from_bottom_row(c, d).unwrap();
            prop_assert_eq!(g.determinant(), 1);
            prop_assert_eq!((g.c, g.d), (c, d));
            prop_assert!(0 <= g.a && g.a < c.max(1));
        }

        #[test]
        fn reduction_lands_in_domain(x in -20.0f64..20.0, y in 1e-4f64..5.0) {
            let z = Complex64::new(x, y);
            let (g, w) = reduce_to_fundamental(ComplexPoint::from(z)).unwrap();
            let w = w.finite().unwrap();
            prop_assert_eq!(g.determinant(), 1);
            prop_assert!(in_fundamental_domain(w), "{}", w);
            let direct = mobius(&g, z);
            prop_assert!((direct - w).norm() < 1e-9 * direct.norm().max(1.0), "{} vs {}", direct, w);
        }
    }
}
