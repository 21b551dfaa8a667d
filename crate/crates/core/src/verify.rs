//! Numerical re-derivation of the strip bound chain and the cross-cutting
//! checks, collected into a [`Report`].
//!
//! Everything here is floating-point replication of statements that are
//! proved by hand; none of it is interval arithmetic.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::eisenstein::{self, SQRT3_OVER_2};
use crate::equivariant::{self, Rect};
use crate::error::{Error, Result};
use crate::modular::{self, UnimodularMatrix};
use crate::rng::Lcg64;
use crate::zerofinder::{self, CatalogSelector, ZeroRecord, STRIP_EPS, V0};

/// Published reference values the checks compare against.
pub mod reference {
    pub const HIGHEST_ZERO: f64 = 0.523_521_700_017_999_2;
    pub const HALF_LINE_ZERO: f64 = 0.130_919_030_396_762_45;
    /// `(c, d, x, y)`
    pub const ZERO_TABLE: [(i64, i64, f64, f64); 4] = [
        (3, 1, -0.333_325_890_744_513_63, 0.058_181_923_654_001_474),
        (4, 1, -0.249_995_174_367_836_8, 0.032_724_915_024_750_48),
        (5, 1, -0.199_997_065_928_732_48, 0.020_942_992_286_928_155),
        (5, 2, -0.400_001_820_481_927_95, 0.020_946_451_276_672_513),
    ];
    /// `Im z1 / Im z` for `(c, d)`.
    pub const HEIGHT_RATIOS: [(i64, i64, f64); 5] = [
        (2, 1, 3.99882),
        (3, 1, 8.99801),
        (4, 1, 15.9976),
        (5, 1, 24.9975),
        (5, 2, 24.9933),
    ];
    /// Successive bounds on `|y - 6/π|` along the strip argument.
    pub const STRIP_CHAIN: [f64; 4] = [0.32, 0.0024, 0.00032, 0.000283];
    pub const LAMBDA0_DIGITS: f64 = 0.000_281_63;
}

/// Bound on `|E2 - 1|` over the fundamental domain that starts the chain.
pub const GLOBAL_E2_BOUND: f64 = 0.14;

/// One refinement of the bound on `|y - 6/π|` for points of the real locus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundIteration {
    pub step: usize,
    /// Lowest height the bound on `|E2 - 1|` was evaluated at.
    pub y_min: f64,
    pub e2_minus_1_bound: f64,
    /// `v0 · e / (1 - e)` with `e = e2_minus_1_bound`.
    pub y_deviation_bound: f64,
    /// `y_deviation_bound` rounded up to two significant digits; the next
    /// step is evaluated at `v0 - rounded_deviation`.
    pub rounded_deviation: f64,
    pub n_terms_used: usize,
}

fn round_up_two_digits(x: f64) -> f64 {
    let unit = 10f64.powi(x.log10().floor() as i32 - 1);
    // guard against x already sitting on a grid value
    (x / unit * (1.0 - 1e-12)).ceil() * unit
}

fn deviation(e: f64) -> f64 {
    V0 * e / (1.0 - e)
}

/// `24 (Σ_{n≤4} σ1(n) e^{-2πny}) + tail(4, y)`.
fn four_term_bound(y: f64) -> Result<f64> {
    let sigma = eisenstein::sigma1_table(4);
    let head: f64 = (1..=4)
        .map(|n| sigma.get(n) as f64 * (-2.0 * PI * n as f64 * y).exp())
        .sum();
    Ok(24.0 * head + eisenstein::tail_bound(4, y)?)
}

/// Iterates `|y - v0| ≤ v0 e/(1-e)` starting from `|E2 - 1| < .14`.
///
/// Each `N = 1` step evaluates the global bound at `v0 - r`, where `r` is the
/// previous deviation rounded up to two digits, and the loop ends once the
/// rounded deviation improves by less than 1%. One final step uses four
/// explicit Fourier terms.
pub fn strip_bound_chain() -> Result<Vec<BoundIteration>> {
    let mut chain = Vec::new();
    let first = deviation(GLOBAL_E2_BOUND);
    chain.push(BoundIteration {
        step: 0,
        y_min: SQRT3_OVER_2,
        e2_minus_1_bound: GLOBAL_E2_BOUND,
        y_deviation_bound: first,
        rounded_deviation: round_up_two_digits(first),
        n_terms_used: 1,
    });
    loop {
        let prev = chain.last().expect("chain starts nonempty");
        let y_min = V0 - prev.rounded_deviation;
        let e = eisenstein::global_bound(y_min)?;
        if e >= 1.0 {
            return Err(Error::NoSignChange {
                what: "strip bound chain (|E2 - 1| bound reached 1)",
                lo: y_min,
                hi: V0,
            });
        }
        let dev = deviation(e);
        let rounded = round_up_two_digits(dev);
        if prev.rounded_deviation - rounded < 0.01 * prev.rounded_deviation {
            break;
        }
        chain.push(BoundIteration {
            step: chain.len(),
            y_min,
            e2_minus_1_bound: e,
            y_deviation_bound: dev,
            rounded_deviation: rounded,
            n_terms_used: 1,
        });
    }
    let prev = chain.last().expect("chain starts nonempty");
    let y_min = V0 - prev.rounded_deviation;
    let e = four_term_bound(y_min)?;
    let dev = deviation(e);
    chain.push(BoundIteration {
        step: chain.len(),
        y_min,
        e2_minus_1_bound: e,
        y_deviation_bound: dev,
        rounded_deviation: round_up_two_digits(dev),
        n_terms_used: 4,
    });
    Ok(chain)
}

/// Random `γ` with all entries in `[-bound, bound]`, by rejection.
pub fn random_matrix(rng: &mut Lcg64, bound: i64) -> UnimodularMatrix {
    loop {
        let (a, b, c, d) = (
            rng.int_in(-bound, bound),
            rng.int_in(-bound, bound),
            rng.int_in(-bound, bound),
            rng.int_in(-bound, bound),
        );
        if a * d - b * c == 1 {
            return UnimodularMatrix { a, b, c, d };
        }
    }
}

/// Random point of `D` with `Im z ≤ y_max`.
pub fn random_domain_point(rng: &mut Lcg64, y_max: f64) -> Complex64 {
    let x = rng.uniform(-0.5, 0.5);
    let y = rng.uniform((1.0 - x * x).sqrt(), y_max);
    Complex64::new(x, y)
}

/// `|E2(γz) - j² E2(z) + (6i/π) c j|`
pub fn transformation_residual(g: &UnimodularMatrix, z: Complex64) -> Result<f64> {
    let lhs = eisenstein::eval_e2(modular::mobius(g, z))?.value;
    let e2 = eisenstein::eval_e2(z)?.value;
    let j = modular::jfactor(g, z);
    let rhs = j * j * e2 - Complex64::new(0.0, 6.0 / PI) * g.c as f64 * j;
    Ok((lhs - rhs).norm())
}

/// Largest transformation-law residual over seeded samples with `z ∈ D`,
/// `Im z ≤ 4` and matrix entries in `[-10, 10]`.
pub fn verify_transformation_law(sample_count: usize, seed: u64) -> Result<f64> {
    let mut rng = Lcg64::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..sample_count {
        let g = random_matrix(&mut rng, 10);
        let z = random_domain_point(&mut rng, 4.0);
        worst = worst.max(transformation_residual(&g, z)?);
    }
    Ok(worst)
}

/// `|h(γz) - γh(z)|`, or `None` when `E2` is below `1e-6` at either point.
pub fn equivariance_residual(g: &UnimodularMatrix, z: Complex64) -> Result<Option<f64>> {
    let gz = modular::mobius(g, z);
    let at_z = equivariant::eval_h(z)?;
    let at_gz = equivariant::eval_h(gz)?;
    if at_z.e2_at_point.norm() < 1e-6 || at_gz.e2_at_point.norm() < 1e-6 {
        return Ok(None);
    }
    let (Some(hz), Some(hgz)) = (at_z.value.finite(), at_gz.value.finite()) else {
        return Ok(None);
    };
    Ok(Some((hgz - modular::mobius(g, hz)).norm()))
}

/// Largest equivariance residual over seeded samples (`Im z ≤ 5`).
pub fn verify_equivariance(sample_count: usize, seed: u64) -> Result<f64> {
    let mut rng = Lcg64::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..sample_count {
        let g = random_matrix(&mut rng, 10);
        let z = random_domain_point(&mut rng, 5.0);
        if let Some(r) = equivariance_residual(&g, z)? {
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

/// Largest `θ` (scaled deviation from the first-order location).
pub fn verify_theorem1(catalog: &[ZeroRecord]) -> Result<f64> {
    catalog
        .iter()
        .map(|r| r.theta_scaled)
        .reduce(f64::max)
        .ok_or(Error::EmptyCatalog)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecondOrderAccuracy {
    /// `max c² |refined - predicted2|`
    pub max_c2_error: f64,
    /// `max c² v0² |refined - predicted1| / max c² v0² |refined - predicted2|`
    pub improvement_factor: f64,
}

pub fn verify_theorem4(catalog: &[ZeroRecord]) -> Result<SecondOrderAccuracy> {
    if catalog.is_empty() {
        return Err(Error::EmptyCatalog);
    }
    let scaled = |r: &ZeroRecord, p: crate::ComplexPoint| {
        let c2 = (r.c() * r.c()) as f64;
        let diff = Complex64::new(r.refined.re - p.re, r.refined.im - p.im);
        c2 * diff.norm()
    };
    let first = catalog.iter().map(|r| scaled(r, r.predicted1)).fold(0.0, f64::max);
    let second = catalog.iter().map(|r| scaled(r, r.predicted2)).fold(0.0, f64::max);
    Ok(SecondOrderAccuracy {
        max_c2_error: second,
        improvement_factor: first / second,
    })
}

/// `max |E2 - E2 via Δ|` over a grid with `Im z ≥ √3/2`.
pub fn verify_oracles(region: Rect, step: f64) -> Result<f64> {
    region
        .grid(step)
        .into_iter()
        .map(|z| Ok((eisenstein::eval_e2(z)?.value - eisenstein::eval_e2_via_delta(z)?).norm()))
        .try_fold(0.0f64, |acc, r: Result<f64>| Ok(acc.max(r?)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRow {
    pub c: i64,
    pub d: i64,
    pub ratio: f64,
    pub nearest_square: i64,
    pub deviation: f64,
}

/// `Im z1 / Im z` for every record, next to the nearest integer square.
pub fn ratio_report(catalog: &[ZeroRecord]) -> Result<Vec<RatioRow>> {
    let top = catalog
        .iter()
        .find(|r| r.c() == 1)
        .ok_or(Error::EmptyCatalog)?
        .refined
        .im;
    Ok(catalog
        .iter()
        .map(|r| {
            let ratio = top / r.refined.im;
            let root = ratio.sqrt().round() as i64;
            let nearest_square = root * root;
            RatioRow {
                c: r.c(),
                d: r.d(),
                ratio,
                nearest_square,
                deviation: ratio - nearest_square as f64,
            }
        })
        .collect())
}

/// `(min, max)` of the real-locus height over `samples` equally spaced points
/// of `[-1/2, 1/2]`.
pub fn real_locus_extent(samples: usize) -> Result<(f64, f64)> {
    use rayon::prelude::*;
    let heights = (0..samples)
        .into_par_iter()
        .map(|k| {
            let x = if samples == 1 {
                0.0
            } else {
                -0.5 + k as f64 / (samples - 1) as f64
            };
            equivariant::real_locus_height(x)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(heights
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| (lo.min(y), hi.max(y))))
}

/// Largest `|truncated(z, N) - E2(z)| / tail_bound(N, Im z)` over seeded
/// samples with `Im z ≥ √3/2`. Sound bounds give a value `≤ 1`.
pub fn verify_tail_bound(sample_count: usize, seed: u64) -> Result<f64> {
    let mut rng = Lcg64::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..sample_count {
        let z = Complex64::new(rng.uniform(-0.5, 0.5), rng.uniform(SQRT3_OVER_2, 2.5));
        let n = rng.int_in(1, 6) as usize;
        let reference = eisenstein::eval_e2_truncated(z, 200);
        let diff = (eisenstein::eval_e2_truncated(z, n) - reference).norm();
        let bound = eisenstein::tail_bound(n, z.im)?;
        worst = worst.max(diff / bound);
    }
    Ok(worst)
}

/// Which side of the threshold counts as passing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `measured < threshold`
    Below,
    /// `measured ≤ threshold`
    AtMost,
    /// `measured > threshold`
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub passed: bool,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, measured: f64, comparison: Comparison, threshold: f64) -> Self {
        let passed = match comparison {
            Comparison::Below => measured < threshold,
            Comparison::AtMost => measured <= threshold,
            Comparison::Above => measured > threshold,
        };
        CheckResult {
            name: name.into(),
            measured,
            threshold,
            comparison,
            passed,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn push(&mut self, name: impl Into<String>, measured: f64, comparison: Comparison, threshold: f64) {
        self.checks.push(CheckResult::new(name, measured, comparison, threshold));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremSelection {
    One,
    Two,
    Four,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub selection: TheoremSelection,
    pub seed: u64,
    pub max_denominator: u32,
    pub sample_count: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            selection: TheoremSelection::All,
            seed: 42,
            max_denominator: 50,
            sample_count: 200,
        }
    }
}

fn strip_checks(report: &mut Report) -> Result<()> {
    let chain = strip_bound_chain()?;
    for (i, quoted) in reference::STRIP_CHAIN.iter().enumerate() {
        let name = format!("strip_chain_step_{i}");
        match chain.get(i) {
            Some(it) => {
                report.push(format!("{name}_upper"), it.y_deviation_bound, Comparison::AtMost, *quoted);
                report.push(format!("{name}_lower"), it.y_deviation_bound, Comparison::Above, 0.95 * quoted);
            }
            None => report.push(name, f64::NAN, Comparison::AtMost, *quoted),
        }
    }
    report.push("strip_chain_length", chain.len() as f64, Comparison::AtMost, reference::STRIP_CHAIN.len() as f64);
    let (lo, hi) = real_locus_extent(1000)?;
    report.push("real_locus_max_deviation", (hi - V0).max(V0 - lo), Comparison::Below, STRIP_EPS);
    Ok(())
}

/// Runs the selected checks.
pub fn run_checks(options: &VerifyOptions) -> Result<Report> {
    let mut report = Report::default();
    let sel = options.selection;
    let all = sel == TheoremSelection::All;

    let catalog = if matches!(sel, TheoremSelection::One | TheoremSelection::Four | TheoremSelection::All) {
        zerofinder::build_catalog(CatalogSelector::MaxDenominator(options.max_denominator))?
    } else {
        Vec::new()
    };

    if all {
        let y1 = zerofinder::zero_on_imaginary_axis()?;
        report.push("imaginary_axis_zero", (y1 - reference::HIGHEST_ZERO).abs(), Comparison::Below, 1e-11);
        let y2 = zerofinder::zero_on_half_line()?;
        report.push("half_line_zero", (y2 - reference::HALF_LINE_ZERO).abs(), Comparison::Below, 1e-11);
        let mut worst = 0.0f64;
        for (c, d, x, y) in reference::ZERO_TABLE {
            let r = zerofinder::refine_zero(&modular::ReducedFraction::from_bottom_row(c, d)?)?;
            worst = worst.max((r.refined.re - x).abs()).max((r.refined.im - y).abs());
        }
        report.push("zero_table", worst, Comparison::Below, 1e-9);
    }

    if matches!(sel, TheoremSelection::One | TheoremSelection::All) {
        let max_theta = verify_theorem1(&catalog)?;
        report.push("theorem1_max_theta", max_theta, Comparison::Below, STRIP_EPS);
        report.push("theorem1_sharpness", max_theta, Comparison::Above, 0.00027);
    }

    if matches!(sel, TheoremSelection::Two | TheoremSelection::All) {
        strip_checks(&mut report)?;
    }

    if matches!(sel, TheoremSelection::Four | TheoremSelection::All) {
        let l0 = zerofinder::lambda0();
        report.push("lambda0_digits", (l0 - reference::LAMBDA0_DIGITS).abs(), Comparison::Below, 1e-8);
        report.push("lambda0_lower", l0, Comparison::Above, 0.000281);
        report.push("lambda0_upper", l0, Comparison::Below, 0.000282);
        let acc = verify_theorem4(&catalog)?;
        report.push("theorem4_improvement_factor", acc.improvement_factor, Comparison::Above, 100.0);
        report.push("theorem4_max_c2_error", acc.max_c2_error, Comparison::Below, 1e-6);
    }

    if all {
        report.push(
            "transformation_law",
            verify_transformation_law(options.sample_count, options.seed)?,
            Comparison::Below,
            1e-9,
        );
        report.push(
            "equivariance",
            verify_equivariance(options.sample_count, options.seed)?,
            Comparison::Below,
            1e-8,
        );
        let scan = equivariant::scan_derivative_bounds(Rect::new(-0.5, 0.5, 0.95, 3.0), 0.01)?;
        report.push("h_prime_deviation", scan.max_h_prime_deviation, Comparison::Below, 0.89);
        report.push("e2_prime_magnitude", scan.max_e2_prime, Comparison::Below, 0.4);
        report.push("e2_minus_one", scan.max_e2_minus_one, Comparison::AtMost, 0.07);
        let [at_i, at_rho, at_other] = equivariant::elliptic_fixed_point_residuals()?;
        report.push("fixed_point_i", at_i, Comparison::Below, 1e-10);
        report.push("fixed_point_rho", at_rho, Comparison::Below, 1e-10);
        report.push("fixed_point_one_minus_rho_bar", at_other, Comparison::Below, 1e-10);
        report.push(
            "delta_oracle",
            verify_oracles(Rect::new(-0.5, 0.5, 0.9, 2.5), 0.1)?,
            Comparison::Below,
            1e-6,
        );
        let small = zerofinder::build_catalog(CatalogSelector::MaxDenominator(5))?;
        let rows = ratio_report(&small)?;
        for (c, d, quoted) in reference::HEIGHT_RATIOS {
            let measured = rows
                .iter()
                .find(|r| (r.c, r.d) == (c, d) || (r.c, r.d) == (c, -d))
                .map_or(f64::NAN, |r| (r.ratio - quoted).abs());
            report.push(format!("height_ratio_{c}_{d}"), measured, Comparison::Below, 1e-3);
        }
        report.push("global_bound", eisenstein::global_bound(SQRT3_OVER_2)?, Comparison::Below, GLOBAL_E2_BOUND);
        report.push("tail_bound_soundness", verify_tail_bound(50, options.seed)?, Comparison::AtMost, 1.0);
    }

    Ok(report)
}
