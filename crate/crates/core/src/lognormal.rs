//! The lognormal family and the densities it generates under reciprocal,
//! sum-with-reciprocal and square root.
//!
//! If `x ~ Lognormal(μ, σ²)` then `1/x ~ Lognormal(−μ, σ²)` and
//! `x² ~ Lognormal(2μ, 4σ²)`. The sum `y = x + 1/x` lives on `(2, ∞)`; its two
//! preimages are `x₊ = ½(y + √(y²−4))` and `x₋ = 1/x₊`, which is what every
//! density below is built from. All of them diverge like `(y−2)^{-1/2}` at the
//! support edge, so the [`DensityFn`] wrappers ask for
//! [`Transform::CoshEdge`].

use std::f64::consts::{LN_2, PI, SQRT_2};

use crate::density::DensityFn;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec, Transform};

pub const SQRT_3: f64 = 1.732_050_807_568_877_2;
pub(crate) const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// `κ` for the isosceles side density.
pub const DEFAULT_KAPPA: f64 = SQRT_3;

/// `(μ, σ) = (−½, 1)`: the scale law of the isosceles model, and the worked
/// case for the `z` and `w` densities.
pub const DEFAULT_PARAMS: LognormalParams = LognormalParams { mu: -0.5, sigma: 1.0 };

/// `(μ, σ) = (½ ln 2, 1)`: legs of the right-triangle model, centred so that
/// `ln a + ln b = ln 2`.
pub const RIGHT_SIDE_PARAMS: LognormalParams = LognormalParams {
    mu: 0.5 * LN_2,
    sigma: 1.0,
};

/// Parameters of `Lognormal(μ, σ²)`: `ln X ~ Normal(μ, σ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LognormalParams {
    mu: f64,
    sigma: f64,
}

impl LognormalParams {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::Domain {
                what: "mu must be finite",
                value: mu,
            });
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain {
                what: "sigma must be positive",
                value: sigma,
            });
        }
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Law of `1/X`.
    pub fn reciprocal(&self) -> Self {
        Self { mu: -self.mu, ..*self }
    }

    /// Law of `X^k` for `k > 0`.
    pub fn power(&self, k: f64) -> Self {
        Self {
            mu: k * self.mu,
            sigma: k * self.sigma,
        }
    }

    /// Law of `s·X` for `s > 0`.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            mu: self.mu + s.ln(),
            ..*self
        }
    }

    fn kernel(&self, d: f64) -> f64 {
        let t = d / self.sigma;
        (-0.5 * t * t).exp()
    }
}

pub fn lognormal_pdf(x: f64, p: &LognormalParams) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain {
            what: "lognormal density needs x > 0",
            value: x,
        });
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    Ok(INV_SQRT_2PI / p.sigma * p.kernel(x.ln() - p.mu) / x)
}

/// `E[X^k] = exp(kμ + k²σ²/2)`.
pub fn lognormal_moment(k: u32, p: &LognormalParams) -> f64 {
    let k = k as f64;
    (k * p.mu + 0.5 * k * k * p.sigma * p.sigma).exp()
}

/// `(√(y²−4), ln x₊)` for `y > 2`.
fn roots(y: f64) -> (f64, f64) {
    let disc = ((y - 2.0) * (y + 2.0)).sqrt();
    (disc, (0.5 * (y + disc)).ln())
}

/// Density of `y = x + 1/x`. Zero for `y ≤ 2`.
pub fn sum_reciprocal_pdf(y: f64, p: &LognormalParams) -> f64 {
    if !(y > 2.0 && y.is_finite()) {
        return 0.0;
    }
    let (disc, l) = roots(y);
    INV_SQRT_2PI / p.sigma * (p.kernel(-l - p.mu) + p.kernel(l - p.mu)) / disc
}

/// Density of `z = √(x + 1/x)`. Zero for `z ≤ √2`.
pub fn sqrt_sum_pdf(z: f64, p: &LognormalParams) -> f64 {
    let zz = z * z;
    if !(z > SQRT_2 && zz > 2.0 && zz.is_finite()) {
        return 0.0;
    }
    let disc = ((zz - 2.0) * (zz + 2.0)).sqrt();
    let plus = (0.5 * (zz + disc)).ln();
    let minus = -plus;
    (2.0 / PI).sqrt() * (z / p.sigma) * (p.kernel(minus - p.mu) + p.kernel(plus - p.mu)) / disc
}

/// Density of `w = √(x²/κ + κ/x²)`. Zero for `w ≤ √2`.
pub fn general_w_pdf(w: f64, kappa: f64, p: &LognormalParams) -> Result<f64> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Domain {
            what: "kappa must be positive",
            value: kappa,
        });
    }
    let ww = w * w;
    if !(w > SQRT_2 && ww > 2.0 && ww.is_finite()) {
        return Ok(0.0);
    }
    let (disc, l) = roots(ww);
    let lk = kappa.ln();
    // x² ~ Lognormal(2μ, 4σ²), hence the 8σ² and 2μ
    let two_mu = 2.0 * p.mu;
    let s2 = 8.0 * p.sigma * p.sigma;
    let lo = lk - l - two_mu;
    let hi = lk + l - two_mu;
    Ok(w * INV_SQRT_2PI / p.sigma * ((-lo * lo / s2).exp() + (-hi * hi / s2).exp()) / disc)
}

pub fn lognormal_density(p: LognormalParams) -> DensityFn {
    DensityFn::new("lognormal", 0.0, f64::INFINITY, Transform::LogAxis, move |x| {
        lognormal_pdf(x, &p).unwrap_or(0.0)
    })
}

pub fn sum_reciprocal_density(p: LognormalParams) -> DensityFn {
    DensityFn::new("sum-reciprocal", 2.0, f64::INFINITY, Transform::CoshEdge, move |y| {
        sum_reciprocal_pdf(y, &p)
    })
}

pub fn sqrt_sum_density(p: LognormalParams) -> DensityFn {
    DensityFn::new("sqrt-sum", SQRT_2, f64::INFINITY, Transform::CoshEdge, move |z| {
        sqrt_sum_pdf(z, &p)
    })
}

pub fn general_w_density(kappa: f64, p: LognormalParams) -> Result<DensityFn> {
    general_w_pdf(2.0, kappa, &p)?;
    Ok(DensityFn::new(
        "general-w",
        SQRT_2,
        f64::INFINITY,
        Transform::CoshEdge,
        move |w| general_w_pdf(w, kappa, &p).unwrap_or(0.0),
    ))
}

/// Which mean [`cosh_representation_mean`] computes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoshForm {
    /// `z = √(x + 1/x)`.
    Z,
    /// `w = √(x²/κ + κ/x²)`.
    W { kappa: f64 },
}

/// Mean of `z` or `w` through a Gaussian-weighted `√cosh` integral.
///
/// With `x = e^{μ+σt}`, `x + 1/x = 2cosh(μ + σt)` and
/// `x²/κ + κ/x² = 2cosh(2μ − ln κ + 2σt)`, so
/// `E(z) = π^{-1/2} ∫ √cosh(μ + σt) e^{−t²/2} dt` and likewise for `w`.
/// This route never touches the edge singularity of the densities, which
/// makes it an independent check on their moments.
pub fn cosh_representation_mean(form: CoshForm, p: &LognormalParams) -> Result<f64> {
    let (shift, slope) = match form {
        CoshForm::Z => (p.mu, p.sigma),
        CoshForm::W { kappa } => {
            if !(kappa > 0.0 && kappa.is_finite()) {
                return Err(Error::Domain {
                    what: "kappa must be positive",
                    value: kappa,
                });
            }
            (2.0 * p.mu - kappa.ln(), 2.0 * p.sigma)
        }
    };
    // √cosh(slope·t) tilts the weight by about slope/2 standard deviations
    let spec = QuadratureSpec::default().with_transform(Transform::GaussWeight {
        center: 0.0,
        scale: 1.0 + 0.5 * slope,
    });
    let r = integrate(
        |t| (shift + slope * t).cosh().sqrt() * (-0.5 * t * t).exp(),
        f64::NEG_INFINITY,
        f64::INFINITY,
        &spec,
    )?;
    Ok(r.require("cosh representation")? / PI.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::moment_of_density;
    use std::f64::consts::E;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn pdf_at_the_median() {
        let v = lognormal_pdf(SQRT_2, &RIGHT_SIDE_PARAMS).unwrap();
        assert!(close(v, 0.282_094_791_8, 1e-9), "{v}");
        let v = lognormal_pdf((-0.5f64).exp(), &DEFAULT_PARAMS).unwrap();
        assert!(close(v, 0.5f64.exp() / (2.0 * PI).sqrt(), 1e-14), "{v}");
        assert!(close(v, 0.657_744_6, 1e-7));
    }

    #[test]
    fn pdf_rejects_nonpositive() {
        assert!(lognormal_pdf(0.0, &DEFAULT_PARAMS).is_err());
        assert!(lognormal_pdf(-1.0, &DEFAULT_PARAMS).is_err());
        assert!(LognormalParams::new(0.0, 0.0).is_err());
        assert!(LognormalParams::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn closed_form_moments() {
        assert!(close(lognormal_moment(1, &RIGHT_SIDE_PARAMS), (2.0 * E).sqrt(), 1e-15));
        assert!(close(lognormal_moment(2, &RIGHT_SIDE_PARAMS), 2.0 * E * E, 1e-15));
        let tight = LognormalParams::new(0.0, f64::MIN_POSITIVE).unwrap();
        assert_eq!(lognormal_moment(1, &tight), 1.0);
    }

    #[test]
    fn moments_match_quadrature() {
        let spec = QuadratureSpec::default();
        for p in [
            RIGHT_SIDE_PARAMS,
            DEFAULT_PARAMS,
            LognormalParams::new(0.3, 0.6).unwrap(),
        ] {
            let d = lognormal_density(p);
            for k in 1..=3 {
                let q = moment_of_density(&d, k, &spec).unwrap();
                assert!(close(q, lognormal_moment(k, &p), 1e-9), "{p:?} k={k}: {q}");
            }
        }
    }

    #[test]
    fn symmetric_terms_when_mu_is_zero() {
        let p = LognormalParams::new(0.0, 1.0).unwrap();
        let y: f64 = 2.2;
        let xp = 0.5 * (y + (y * y - 4.0).sqrt());
        let expected = 2.0 * (-0.5 * xp.ln().powi(2)).exp() / ((2.0 * PI).sqrt() * (y * y - 4.0).sqrt());
        assert!(close(sum_reciprocal_pdf(y, &p), expected, 1e-13));
    }

    #[test]
    fn zero_below_support() {
        let p = DEFAULT_PARAMS;
        assert_eq!(sum_reciprocal_pdf(2.0, &p), 0.0);
        assert_eq!(sum_reciprocal_pdf(1.0, &p), 0.0);
        assert_eq!(sqrt_sum_pdf(SQRT_2, &p), 0.0);
        assert_eq!(sqrt_sum_pdf(1.0, &p), 0.0);
        assert_eq!(general_w_pdf(1.2, 3.0, &p).unwrap(), 0.0);
        assert!(general_w_pdf(2.0, 0.0, &p).is_err());
        assert!(general_w_pdf(2.0, -1.0, &p).is_err());
        assert!(sum_reciprocal_pdf(2.0 + 1e-12, &p).is_finite());
    }

    #[test]
    fn change_of_variables_example() {
        let p = DEFAULT_PARAMS;
        assert!(close(
            sqrt_sum_pdf(1.9, &p),
            2.0 * 1.9 * sum_reciprocal_pdf(3.61, &p),
            1e-14
        ));
    }

    #[test]
    fn densities_normalize() {
        let spec = QuadratureSpec::default();
        for p in [
            DEFAULT_PARAMS,
            RIGHT_SIDE_PARAMS,
            LognormalParams::new(0.0, 0.4).unwrap(),
        ] {
            for d in [
                sum_reciprocal_density(p),
                sqrt_sum_density(p),
                general_w_density(DEFAULT_KAPPA, p).unwrap(),
                general_w_density(0.2, p).unwrap(),
            ] {
                let m = moment_of_density(&d, 0, &spec).unwrap();
                assert!((m - 1.0).abs() < 1e-8, "{} {p:?}: {m}", d.name());
            }
        }
    }

    #[test]
    fn z_moments() {
        let spec = QuadratureSpec::default();
        let d = sqrt_sum_density(DEFAULT_PARAMS);
        let m1 = moment_of_density(&d, 1, &spec).unwrap();
        let m2 = moment_of_density(&d, 2, &spec).unwrap();
        assert!(close(m1, 1.836_625_237_293_030_085, 1e-10), "{m1}");
        assert!(close(m2, 1.0 + E, 1e-10), "{m2}");
        let c = cosh_representation_mean(CoshForm::Z, &DEFAULT_PARAMS).unwrap();
        assert!((c - m1).abs() < 1e-9, "{c} vs {m1}");
    }

    #[test]
    fn w_moments() {
        let spec = QuadratureSpec::default();
        let d = general_w_density(1.0, DEFAULT_PARAMS).unwrap();
        let m1 = moment_of_density(&d, 1, &spec).unwrap();
        let m2 = moment_of_density(&d, 2, &spec).unwrap();
        assert!(close(m1, 3.327_822_124_416_426_818, 1e-10), "{m1}");
        assert!(close(m2, (1.0 + E * E) * E, 1e-10), "{m2}");
        let c = cosh_representation_mean(CoshForm::W { kappa: 1.0 }, &DEFAULT_PARAMS).unwrap();
        assert!((c - m1).abs() < 1e-9, "{c} vs {m1}");
    }

    #[test]
    fn cosh_form_for_general_parameters() {
        let spec = QuadratureSpec::default();
        let p = LognormalParams::new(0.4, 0.7).unwrap();
        let z = moment_of_density(&sqrt_sum_density(p), 1, &spec).unwrap();
        assert!((cosh_representation_mean(CoshForm::Z, &p).unwrap() - z).abs() < 1e-9);
        let w = moment_of_density(&general_w_density(2.5, p).unwrap(), 1, &spec).unwrap();
        assert!((cosh_representation_mean(CoshForm::W { kappa: 2.5 }, &p).unwrap() - w).abs() < 1e-9);
    }

    #[test]
    fn param_algebra() {
        let p = LognormalParams::new(0.3, 0.5).unwrap();
        assert_eq!(p.reciprocal().mu(), -0.3);
        assert_eq!(p.power(2.0).sigma(), 1.0);
        assert!(close(p.scaled(E).mu(), 1.3, 1e-15));
    }
}
