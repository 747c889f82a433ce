//! The five generative models and the densities derived from them.
//!
//! | model        | draw                                                      |
//! |--------------|-----------------------------------------------------------|
//! | right        | `a = e^{½ln2 + σN}`, `b = 2/a`, `c = √(a² + b²)`          |
//! | isosceles    | `r = e^{−½ + σN}`, image of the equilateral seed under `diag(r, 1/r)` |
//! | arbitrary    | folded normal pair `(u, v)`, `a = e^u`, `b = e^v`, fair-coin branch for `c` |
//! | stick-twice  | two uniform cuts; pieces are squared sides; rejected if not a triangle |
//! | stick-once   | one cut gives `a², b²`; `γ ~ Uniform[0, π]`              |
//!
//! Every draw consumes a fixed number of 64-bit words (1, 1, 3, 2 and 2
//! respectively), which keeps block substreams aligned.
//!
//! The analytic densities are the σ = 1 cases.

use std::f64::consts::{FRAC_PI_2, LN_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use libm::erfc;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::density::DensityFn;
use crate::error::{Error, Result};
use crate::lognormal::{general_w_density, general_w_pdf, DEFAULT_KAPPA, DEFAULT_PARAMS, INV_SQRT_2PI};
use crate::quadrature::{integrate_2d, moment_of_density, QuadratureResult, QuadratureSpec, Region2d, Transform};
use crate::rng::{coin, standard_normal, uniform_open};
use crate::triangle::{
    c_pair, heron_area, isosceles_sides, polish_isosceles, polish_unit_area, BranchChoice, Triangle, FOURTH_ROOT_3,
};

const HALF_LN_2: f64 = 0.5 * LN_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Right,
    Isosceles,
    Arbitrary,
    StickTwice,
    StickOnce,
}

impl ModelKind {
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Right,
        ModelKind::Isosceles,
        ModelKind::Arbitrary,
        ModelKind::StickTwice,
        ModelKind::StickOnce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Right => "right",
            ModelKind::Isosceles => "isosceles",
            ModelKind::Arbitrary => "arbitrary",
            ModelKind::StickTwice => "stick-twice",
            ModelKind::StickOnce => "stick-once",
        }
    }

    /// Columns of a sample row.
    pub fn columns(self) -> &'static [&'static str] {
        match self {
            ModelKind::Right => &["a", "b", "c", "alpha"],
            ModelKind::Isosceles => &["a", "b", "c", "r"],
            // branch is −1/+1; folded is 1 when (u, v) was reflected
            ModelKind::Arbitrary => &["a", "b", "c", "branch", "folded"],
            ModelKind::StickTwice | ModelKind::StickOnce => &["area"],
        }
    }

    /// Whether draws can be rejected.
    pub fn rejects(self) -> bool {
        matches!(self, ModelKind::StickTwice)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| {
            let valid: Vec<&str> = ModelKind::ALL.iter().map(|m| m.name()).collect();
            Error::InvalidArgument(format!("unknown model `{s}`; expected one of {}", valid.join(", ")))
        })
    }
}

/// One draw of the arbitrary-triangle model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArbitraryDraw {
    pub triangle: Triangle,
    pub branch: BranchChoice,
    /// The normal pair fell in `u + v < 0` and was reflected.
    pub folded: bool,
}

/// Samplers for the three lognormal models.
///
/// `σ` spreads all three; an optional `μ` replaces the log-location of the
/// right model (`½ ln 2`) and of the isosceles scale (`−½`). The arbitrary
/// model's shift is tied to the hyperbola `ab = 2` and is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sampler {
    sigma: f64,
    mu: Option<f64>,
}

impl Default for Sampler {
    fn default() -> Self {
        Self { sigma: 1.0, mu: None }
    }
}

impl Sampler {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain {
                what: "sigma must be positive",
                value: sigma,
            });
        }
        Ok(Self { sigma, mu: None })
    }

    pub fn with_mu(self, mu: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::Domain {
                what: "mu must be finite",
                value: mu,
            });
        }
        Ok(Self { mu: Some(mu), ..self })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn mu(&self) -> Option<f64> {
        self.mu
    }

    pub fn right<R: RngCore + ?Sized>(&self, rng: &mut R) -> Triangle {
        let a = (self.mu.unwrap_or(HALF_LN_2) + self.sigma * standard_normal(rng)).exp();
        let b = 2.0 / a;
        Triangle::new(a, b, a.hypot(b))
    }

    /// The triangle and its scale `r`.
    ///
    /// Very flat draws are polished to unit area; `r` is then recomputed from
    /// the polished base so that `c = 2r/3^{1/4}` still holds.
    pub fn isosceles<R: RngCore + ?Sized>(&self, rng: &mut R) -> (Triangle, f64) {
        let r = (self.mu.unwrap_or(-0.5) + self.sigma * standard_normal(rng)).exp();
        let raw = isosceles_sides(r);
        let t = polish_isosceles(&raw);
        if t == raw {
            (t, r)
        } else {
            (t, 0.5 * t.c * FOURTH_ROOT_3)
        }
    }

    pub fn arbitrary<R: RngCore + ?Sized>(&self, rng: &mut R) -> ArbitraryDraw {
        let mut u = self.sigma * standard_normal(rng);
        let mut v = self.sigma * standard_normal(rng);
        let folded = u + v < 0.0;
        if folded {
            (u, v) = (-v, -u);
        }
        let a = (u + HALF_LN_2).exp();
        let b = (v + HALF_LN_2).exp();
        let branch = if coin(rng) {
            BranchChoice::Plus
        } else {
            BranchChoice::Minus
        };
        // u + v ≥ 0 puts (a, b) on or above the hyperbola up to rounding in exp
        let (minus, plus) = c_pair(a, b).unwrap_or_else(|_| {
            let c = a.hypot(b);
            (c, c)
        });
        let c = match branch {
            BranchChoice::Minus => minus,
            BranchChoice::Plus => plus,
        };
        ArbitraryDraw {
            triangle: polish_unit_area(&Triangle::new(a, b, c)),
            branch,
            folded,
        }
    }
}

pub fn sample_right<R: RngCore + ?Sized>(rng: &mut R) -> Triangle {
    Sampler::default().right(rng)
}

pub fn sample_isosceles<R: RngCore + ?Sized>(rng: &mut R) -> (Triangle, f64) {
    Sampler::default().isosceles(rng)
}

pub fn sample_arbitrary<R: RngCore + ?Sized>(rng: &mut R) -> ArbitraryDraw {
    Sampler::default().arbitrary(rng)
}

/// Angle opposite `a` in a right triangle with legs `a`, `b`.
pub fn right_angle_of(t: &Triangle) -> f64 {
    t.a.atan2(t.b)
}

/// Area of the triangle with squared sides equal to the three pieces of a
/// unit stick cut at `x` and `y`, or `None` when those sides do not form a
/// (non-degenerate) triangle.
pub fn stick_twice_area(x: f64, y: f64) -> Option<f64> {
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    let t = Triangle::new(lo.sqrt(), (hi - lo).sqrt(), (1.0 - hi).sqrt());
    if !t.is_strict() {
        return None;
    }
    heron_area(&t).ok().filter(|&area| area > 0.0)
}

/// Area `½ab·sin γ` with `a² = cut`, `b² = 1 − cut`.
pub fn stick_once_area(cut: f64, gamma: f64) -> f64 {
    0.5 * (cut * (1.0 - cut)).sqrt() * gamma.sin()
}

pub fn sample_stick_twice<R: RngCore + ?Sized>(rng: &mut R) -> Option<f64> {
    let x = uniform_open(rng);
    let y = uniform_open(rng);
    stick_twice_area(x, y)
}

pub fn sample_stick_once<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    let cut = uniform_open(rng);
    let gamma = PI * uniform_open(rng);
    stick_once_area(cut, gamma)
}

// ---------------------------------------------------------------------------
// right triangles

/// Density of the angle `α = arctan(a/b)` in the right model:
/// `(2π)^{-1/2} exp(−⅛ ln(tan α)²) / (2 sin α cos α)` on `(0, π/2)`.
pub fn right_angle_pdf(alpha: f64) -> f64 {
    if !(alpha > 0.0 && alpha < FRAC_PI_2) {
        return 0.0;
    }
    let l = alpha.tan().ln();
    INV_SQRT_2PI * (-0.125 * l * l).exp() / (2.0 * alpha.sin() * alpha.cos())
}

pub fn right_angle_density() -> DensityFn {
    DensityFn::new("right-angle", 0.0, FRAC_PI_2, Transform::LogAxis, right_angle_pdf)
}

/// `E(α^k)` through the Gaussian form: with `x = ½ ln tan α`,
/// `E(α^k) = (2π)^{-1/2} ∫ arctan(e^{2x})^k e^{−x²/2} dx`.
pub fn right_angle_moment_gaussian(k: u32, spec: &QuadratureSpec) -> Result<f64> {
    let spec = spec.with_transform(Transform::GaussWeight {
        center: 0.0,
        scale: 1.0,
    });
    let r = crate::quadrature::integrate(
        |x| (2.0 * x).exp().atan().powi(k as i32) * INV_SQRT_2PI * (-0.5 * x * x).exp(),
        f64::NEG_INFINITY,
        f64::INFINITY,
        &spec,
    )?;
    r.require("right-angle Gaussian moment")
}

/// Location of the density maximum nearest 0.
///
/// Scans 2000 log-spaced points of `(10⁻⁸, 0.1)`, then golden-section
/// search on the bracketing pair of cells down to a width of 10⁻⁸.
pub fn right_angle_mode() -> Result<f64> {
    const LO: f64 = 1e-8;
    const HI: f64 = 0.1;
    const GRID: usize = 2000;
    let step = (HI / LO).ln() / (GRID - 1) as f64;
    let grid: Vec<f64> = (0..GRID).map(|i| LO * (step * i as f64).exp()).collect();
    let best = (0..GRID)
        .max_by(|&i, &j| right_angle_pdf(grid[i]).total_cmp(&right_angle_pdf(grid[j])))
        .expect("nonempty grid");
    if best == 0 || best == GRID - 1 {
        return Err(Error::NoConvergence(format!(
            "density maximum at the edge of the scan, alpha = {}",
            grid[best]
        )));
    }
    golden_max(right_angle_pdf, grid[best - 1], grid[best + 1], 1e-8, 200)
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..max_iter {
        if b - a < tol {
            return Ok(0.5 * (a + b));
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    Err(Error::NoConvergence(format!(
        "golden section stopped with bracket [{a}, {b}] after {max_iter} iterations"
    )))
}

// ---------------------------------------------------------------------------
// isosceles triangles

/// Density of the equal sides `a = b` of the isosceles model: the
/// `√(x²/κ + κ/x²)` law at `κ = √3`, `(μ, σ) = (−½, 1)`.
pub fn isosceles_side_pdf(a: f64) -> f64 {
    general_w_pdf(a, DEFAULT_KAPPA, &DEFAULT_PARAMS).unwrap_or(0.0)
}

pub fn isosceles_side_density() -> DensityFn {
    let d = general_w_density(DEFAULT_KAPPA, DEFAULT_PARAMS).expect("valid kappa");
    let (lo, hi) = d.support();
    DensityFn::new("isosceles-side", lo, hi, d.transform(), move |a| d.eval(a))
}

/// Least-squares fit of `ln f(a) = −½ ln(a)² − δ ln(a) + const`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailFit {
    pub delta: f64,
    pub intercept: f64,
    pub residual_rms: f64,
}

/// Fit the tail exponent of the isosceles side density on `points`
/// log-spaced abscissae of `[lo, hi]`.
pub fn fit_tail_exponent(lo: f64, hi: f64, points: usize) -> Result<TailFit> {
    if !(lo > 0.0 && hi > lo && points >= 3) {
        return Err(Error::InvalidArgument(format!(
            "tail fit needs 0 < lo < hi and at least 3 points, got [{lo}, {hi}] with {points}"
        )));
    }
    let step = (hi / lo).ln() / (points - 1) as f64;
    let mut xs = Vec::with_capacity(points);
    let mut ys = Vec::with_capacity(points);
    for i in 0..points {
        let x = lo.ln() + step * i as f64;
        let f = isosceles_side_pdf(x.exp());
        if !(f > 0.0) {
            return Err(Error::NoConvergence(format!("density underflows at a = {}", x.exp())));
        }
        xs.push(x);
        ys.push(f.ln() + 0.5 * x * x);
    }
    let n = points as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(TailFit {
        delta: -slope,
        intercept,
        residual_rms: (ss / n).sqrt(),
    })
}

/// Tail exponent fitted over `a ∈ [50, 500]`.
pub fn isosceles_tail_exponent() -> Result<TailFit> {
    fit_tail_exponent(50.0, 500.0, 200)
}

// ---------------------------------------------------------------------------
// arbitrary triangles

/// Joint density of `(a, b)`:
/// `π⁻¹ exp(−½[(ln a − ½ln2)² + (ln b − ½ln2)²]) / (ab)` on `ab ≥ 2`.
pub fn joint_ab_pdf(a: f64, b: f64) -> f64 {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) || a * b < 2.0 {
        return 0.0;
    }
    let u = a.ln() - HALF_LN_2;
    let v = b.ln() - HALF_LN_2;
    (-0.5 * (u * u + v * v)).exp() / (PI * a * b)
}

/// Marginal density of `a`:
/// `(2π)^{-1/2} exp(−½(ln a − ½ln2)²) erfc(−(ln a − ½ln2)/√2) / a`.
pub fn arbitrary_a_pdf(a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain {
            what: "side length must be positive",
            value: a,
        });
    }
    if a.is_infinite() {
        return Ok(0.0);
    }
    let u = a.ln() - HALF_LN_2;
    Ok(INV_SQRT_2PI * (-0.5 * u * u).exp() * erfc(-u / SQRT_2) / a)
}

pub fn arbitrary_a_density() -> DensityFn {
    DensityFn::new("arbitrary-a", 0.0, f64::INFINITY, Transform::LogAxis, |a| {
        arbitrary_a_pdf(a).unwrap_or(0.0)
    })
}

/// Moments of the arbitrary model by quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArbitraryMoments {
    pub mean_a: f64,
    pub mean_a2: f64,
    pub mean_ab: f64,
    /// `(E(ab) − E(a)²) / (E(a²) − E(a)²)`, using `E(a) = E(b)` and
    /// `Var(a) = Var(b)`.
    pub corr_ab: f64,
}

pub fn arbitrary_moments(spec_1d: &QuadratureSpec, spec_2d: &QuadratureSpec) -> Result<ArbitraryMoments> {
    let marginal = arbitrary_a_density();
    let mean_a = moment_of_density(&marginal, 1, spec_1d)?;
    let mean_a2 = moment_of_density(&marginal, 2, spec_1d)?;
    let mean_ab = integrate_2d(
        |a, b| match joint_ab_pdf(a, b) {
            0.0 => 0.0,
            p => a * b * p,
        },
        Region2d::AbGeq2,
        &spec_2d.with_transform(Transform::LogAxis),
    )?
    .require("E(ab)")?;
    let var = mean_a2 - mean_a * mean_a;
    Ok(ArbitraryMoments {
        mean_a,
        mean_a2,
        mean_ab,
        corr_ab: (mean_ab - mean_a * mean_a) / var,
    })
}

/// `E(c)` as the double integral of the branch average `½(c₋ + c₊)`
/// against the joint density.
pub fn arbitrary_mean_c(spec: &QuadratureSpec) -> Result<QuadratureResult> {
    integrate_2d(
        |a, b| {
            let p = joint_ab_pdf(a, b);
            if p == 0.0 {
                return 0.0;
            }
            match c_pair(a, b) {
                Ok((minus, plus)) => 0.5 * (minus + plus) * p,
                Err(_) => 0.0,
            }
        },
        Region2d::AbGeq2,
        &spec.with_transform(Transform::LogAxis),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use crate::rng::substream;
    use std::f64::consts::E;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn model_names_round_trip() {
        for m in ModelKind::ALL {
            assert_eq!(m.name().parse::<ModelKind>().unwrap(), m);
        }
        let err = "obtuse".parse::<ModelKind>().unwrap_err().to_string();
        assert!(err.contains("stick-twice"), "{err}");
    }

    #[test]
    fn right_draws_have_unit_area() {
        let mut rng = substream(3, 0);
        for _ in 0..10_000 {
            let t = sample_right(&mut rng);
            assert!((t.a * t.b - 2.0).abs() <= 1e-12);
            assert!((heron_area(&t).unwrap() - 1.0).abs() <= 1e-9);
            let alpha = right_angle_of(&t);
            assert!(rel(2.0 * alpha.tan(), t.a * t.a) < 1e-12);
        }
    }

    #[test]
    fn isosceles_draws() {
        let mut rng = substream(4, 0);
        let k = (2.0 / 3f64.powf(0.25)).ln();
        for _ in 0..10_000 {
            let (t, r) = sample_isosceles(&mut rng);
            assert_eq!(t.a, t.b);
            assert!(((t.c.ln() - r.ln()) - k).abs() < 1e-12);
        }
    }

    #[test]
    fn arbitrary_draws_sit_above_hyperbola() {
        let mut rng = substream(5, 0);
        for _ in 0..10_000 {
            let d = sample_arbitrary(&mut rng);
            assert!(d.triangle.a * d.triangle.b >= 2.0);
            assert!((heron_area(&d.triangle).unwrap() - 1.0).abs() <= 1e-9, "{d:?}");
        }
    }

    #[test]
    fn stick_examples() {
        let third = 1.0 / 3.0;
        let area = stick_twice_area(third, 2.0 * third).unwrap();
        assert!(rel(area, 3f64.sqrt() / 12.0) < 1e-12);
        assert!(stick_twice_area(0.01, 0.02).is_none());
        assert!(rel(stick_once_area(0.5, FRAC_PI_2), 0.25) < 1e-15);
        assert_eq!(stick_once_area(0.3, 0.0), 0.0);
    }

    #[test]
    fn right_angle_density_values() {
        assert!(rel(right_angle_pdf(PI / 4.0), INV_SQRT_2PI) < 1e-15);
        assert_eq!(right_angle_pdf(0.0), 0.0);
        assert_eq!(right_angle_pdf(FRAC_PI_2), 0.0);
        for a in [0.01, 0.3, 0.7] {
            assert!(rel(right_angle_pdf(a), right_angle_pdf(FRAC_PI_2 - a)) < 1e-12);
        }
    }

    #[test]
    fn right_angle_moments_both_routes() {
        let spec = QuadratureSpec::default();
        let d = right_angle_density();
        let m1 = moment_of_density(&d, 1, &spec).unwrap();
        let m2 = moment_of_density(&d, 2, &spec).unwrap();
        assert!(rel(m1, PI / 4.0) < 1e-10, "{m1}");
        assert!(rel(m2, 0.901_215_620_964_781_426_8) < 1e-10, "{m2}");
        assert!(rel(right_angle_moment_gaussian(1, &spec).unwrap(), PI / 4.0) < 1e-12);
        assert!(
            rel(
                right_angle_moment_gaussian(2, &spec).unwrap(),
                0.901_215_620_964_781_426_8
            ) < 1e-12
        );
    }

    #[test]
    fn mode_near_the_edge() {
        let eps = right_angle_mode().unwrap();
        assert!((eps - 0.018_363).abs() < 1e-5, "{eps}");
        assert!(rel(right_angle_pdf(eps), right_angle_pdf(FRAC_PI_2 - eps)) < 1e-9);
        assert!(right_angle_pdf(eps) > right_angle_pdf(eps + 1e-3));
        assert!(right_angle_pdf(eps) > right_angle_pdf(eps - 1e-3));
    }

    #[test]
    fn isosceles_side_moments() {
        let spec = QuadratureSpec::default();
        let d = isosceles_side_density();
        let m1 = moment_of_density(&d, 1, &spec).unwrap();
        let m2 = moment_of_density(&d, 2, &spec).unwrap();
        assert!(rel(m1, 3.975_363_409_680_180_903_998) < 1e-10, "{m1}");
        let closed = 3f64.sqrt() * (1.0 / 3.0 + E * E) * E;
        assert!(rel(closed, 36.358_571_193_655_800_699_02) < 1e-14);
        assert!(rel(m2, closed) < 1e-10, "{m2}");
    }

    #[test]
    fn tail_exponent() {
        let target = 0.5 - 3f64.ln() / 4.0;
        let fit = isosceles_tail_exponent().unwrap();
        assert!(rel(fit.delta, target) < 0.05, "{fit:?}");
        assert!(fit.residual_rms < 1e-3, "{fit:?}");
        let wide = fit_tail_exponent(50.0, 1000.0, 200).unwrap();
        assert!(rel(wide.delta, fit.delta) < 0.02, "{wide:?}");
    }

    #[test]
    fn arbitrary_marginal_matches_joint() {
        let spec = QuadratureSpec::default().with_transform(Transform::LogAxis);
        for a in [1.0, 2.0, 5.0] {
            let m = integrate(|b| joint_ab_pdf(a, b), 2.0 / a, f64::INFINITY, &spec)
                .unwrap()
                .value;
            assert!((m - arbitrary_a_pdf(a).unwrap()).abs() < 1e-8, "a={a}");
        }
        assert!(rel(arbitrary_a_pdf(SQRT_2).unwrap(), 0.282_094_791_8) < 1e-9);
        assert!(arbitrary_a_pdf(0.0).is_err());
        assert_eq!(joint_ab_pdf(1.0, 1.0), 0.0);
        assert!(rel(joint_ab_pdf(1.3, 4.2), joint_ab_pdf(4.2, 1.3)) < 1e-15);
    }

    #[test]
    fn arbitrary_constants() {
        let m = arbitrary_moments(&QuadratureSpec::default(), &QuadratureSpec::two_dimensional()).unwrap();
        assert!(rel(m.mean_a, 3.545_264_389_121_952_681) < 1e-10, "{m:?}");
        assert!(rel(m.mean_a2, 27.231_639_065_298_871_948) < 1e-10, "{m:?}");
        assert!(rel(m.mean_ab, 10.017_960_161_524_566_932) < 1e-8, "{m:?}");
        assert!((m.corr_ab + 0.174).abs() < 1e-3, "{m:?}");
        let c = arbitrary_mean_c(&QuadratureSpec::two_dimensional()).unwrap();
        assert!(c.converged);
        assert!((c.value - 5.483).abs() < 1e-2, "{c:?}");
        assert!(c.value > m.mean_a);
    }
}
