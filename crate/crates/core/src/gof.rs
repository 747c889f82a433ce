//! Goodness-of-fit tests against analytic laws.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::density::DensityFn;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    Ks,
    ChiSquare,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitReport {
    pub test: TestKind,
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
    /// Bins actually used, after merging.
    pub bins: Option<usize>,
}

impl FitReport {
    pub fn passes(&self, alpha: f64) -> bool {
        self.p_value > alpha
    }
}

/// Slack allowed for a reference CDF to step backwards between sorted
/// sample points.
const CDF_SLACK: f64 = 1e-12;

/// `P(K > λ)` for the Kolmogorov distribution.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return 1.0;
    }
    if lambda < 1.0 {
        // √(2π)/λ · Σ exp(−(2k−1)²π²/(8λ²)) is the CDF
        let c = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let cdf: f64 = (1..=20).map(|k| (c * f64::from(2 * k - 1).powi(2)).exp()).sum::<f64>()
            * (2.0 * std::f64::consts::PI).sqrt()
            / lambda;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let sum: f64 = (1..=100)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * (-2.0 * f64::from(k * k) * lambda * lambda).exp()
        })
        .sum();
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov–Smirnov test with the asymptotic p-value of
/// `√n·D`.
pub fn ks_test(sample: &[f64], cdf: impl Fn(f64) -> f64) -> Result<FitReport> {
    if sample.is_empty() {
        return Err(Error::InsufficientSamples("KS test on an empty sample".into()));
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    let mut prev = f64::NEG_INFINITY;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        if !(-CDF_SLACK..=1.0 + CDF_SLACK).contains(&f) || f < prev - CDF_SLACK {
            return Err(Error::NonMonotoneCdf { x });
        }
        prev = f;
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    Ok(FitReport {
        test: TestKind::Ks,
        statistic: d,
        p_value: kolmogorov_sf(n.sqrt() * d),
        n: xs.len(),
        bins: None,
    })
}

/// Smallest expected count per bin.
const MIN_EXPECTED: f64 = 5.0;

/// Pearson chi-square test of a sample against a density.
///
/// Bin edges are the `j/bins` quantiles of the density, found by bisection
/// on its running integral; bins whose expected count falls below 5 are
/// merged with their neighbour.
pub fn chi_square_density_test(sample: &[f64], pdf: &DensityFn, bins: usize) -> Result<FitReport> {
    if bins < 5 {
        return Err(Error::InvalidArgument(format!(
            "chi-square needs at least 5 bins, got {bins}"
        )));
    }
    let n = sample.len();
    if (n as f64) < MIN_EXPECTED * 5.0 {
        return Err(Error::InsufficientSamples(format!("{n} values cannot fill 5 bins")));
    }
    let spec = QuadratureSpec::default()
        .with_tolerance(1e-10, 1e-13)
        .with_transform(pdf.transform());
    let (edges, probs) = equiprobable_bins(pdf, bins, &spec)?;

    let mut counts = vec![0usize; probs.len()];
    for &x in sample {
        counts[edges.partition_point(|&e| e <= x)] += 1;
    }

    let mut observed = Vec::new();
    let mut expected = Vec::new();
    let (mut o, mut e) = (0usize, 0.0);
    for (c, p) in counts.iter().zip(&probs) {
        o += c;
        e += p * n as f64;
        if e >= MIN_EXPECTED {
            observed.push(o);
            expected.push(e);
            (o, e) = (0, 0.0);
        }
    }
    if e > 0.0 || o > 0 {
        match (observed.last_mut(), expected.last_mut()) {
            (Some(lo), Some(le)) => {
                *lo += o;
                *le += e;
            }
            _ => {
                observed.push(o);
                expected.push(e);
            }
        }
    }
    let k = observed.len();
    if k < 5 {
        return Err(Error::InsufficientSamples(format!(
            "only {k} bins reach an expected count of {MIN_EXPECTED}"
        )));
    }
    let stat: f64 = observed
        .iter()
        .zip(&expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let law = ChiSquared::new((k - 1) as f64).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(FitReport {
        test: TestKind::ChiSquare,
        statistic: stat,
        p_value: law.sf(stat).clamp(0.0, 1.0),
        n,
        bins: Some(k),
    })
}

/// Interior edges `e₁ < … < e_{bins−1}` and the probability of each of the
/// `bins` cells.
fn equiprobable_bins(pdf: &DensityFn, bins: usize, spec: &QuadratureSpec) -> Result<(Vec<f64>, Vec<f64>)> {
    let (lo, hi) = pdf.support();
    let direct = |a: f64, b: f64| integrate(|x| pdf.eval(x), a, b, spec);
    let total = direct(lo, hi)?.require(&format!("mass of {}", pdf.name()))?;
    // Near a singular lower edge the rounding of x stalls refinement on
    // [lo, b]; the complement [b, hi] stays clear of it.
    let mass = |a: f64, b: f64| -> Result<f64> {
        let r = direct(a, b)?;
        if r.converged {
            return Ok(r.value);
        }
        if a == lo {
            let rest = direct(b, hi)?;
            if rest.converged {
                return Ok(total - rest.value);
            }
        }
        r.require(&format!("mass of {} on [{a}, {b}]", pdf.name()))
    };
    let mut edges = Vec::with_capacity(bins - 1);
    let mut probs = Vec::with_capacity(bins);
    let mut left = lo;
    let step = 1.0 / bins as f64;
    for _ in 1..bins {
        let target = step;
        // bracket [a, b] with mass(left, a) < target ≤ mass(left, b)
        let a = left;
        let mut b = if hi.is_finite() {
            hi
        } else {
            let mut b = if left > 0.0 { 2.0 * left } else { left.abs() + 1.0 };
            while mass(left, b)? < target {
                b = if b > 0.0 { 2.0 * b } else { b / 2.0 + 1.0 };
                if !b.is_finite() {
                    return Err(Error::NoConvergence(format!("no quantile bracket for {}", pdf.name())));
                }
            }
            b
        };
        let mut a = a;
        let geometric = a > 0.0;
        for _ in 0..200 {
            let m = if geometric { (a * b).sqrt() } else { 0.5 * (a + b) };
            if !(m > a && m < b) || (b - a) <= 1e-13 * b.abs() {
                break;
            }
            if mass(left, m)? < target {
                a = m;
            } else {
                b = m;
            }
        }
        let edge = 0.5 * (a + b);
        probs.push(mass(left, edge)?);
        edges.push(edge);
        left = edge;
    }
    probs.push(mass(left, hi)?);
    Ok((edges, probs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::Transform;
    use crate::rng::{substream, uniform_open};

    #[test]
    fn kolmogorov_known_values() {
        // 5% and 1% critical values
        assert!((kolmogorov_sf(1.358_099) - 0.05).abs() < 1e-5);
        assert!((kolmogorov_sf(1.627_624) - 0.01).abs() < 1e-5);
        assert!((kolmogorov_sf(0.5) - 0.963_945_243_664_875_5).abs() < 1e-9);
        let left = kolmogorov_sf(1.0 - 1e-12);
        let right = kolmogorov_sf(1.0 + 1e-12);
        assert!((left - right).abs() < 1e-10);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
        assert!(kolmogorov_sf(10.0) < 1e-80);
    }

    #[test]
    fn ks_accepts_and_rejects() {
        let mut rng = substream(8, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| uniform_open(&mut rng)).collect();
        let ok = ks_test(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(ok.p_value > 0.001, "{ok:?}");
        let squared: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let bad = ks_test(&squared, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(bad.p_value < 1e-6, "{bad:?}");
    }

    #[test]
    fn ks_detects_broken_cdf() {
        let xs = [0.1, 0.2, 0.3];
        assert!(matches!(ks_test(&xs, |x| 1.0 - x), Err(Error::NonMonotoneCdf { .. })));
        assert!(matches!(
            ks_test(&xs, |x| 2.0 * x + 0.5),
            Err(Error::NonMonotoneCdf { .. })
        ));
        assert!(ks_test(&[], |x| x).is_err());
    }

    #[test]
    fn chi_square_uniform() {
        let pdf = DensityFn::new("unit", 0.0, 1.0, Transform::None, |_| 1.0);
        let mut rng = substream(9, 0);
        let xs: Vec<f64> = (0..50_000).map(|_| uniform_open(&mut rng)).collect();
        let r = chi_square_density_test(&xs, &pdf, 50).unwrap();
        assert_eq!(r.bins, Some(50));
        assert!(r.p_value > 0.001, "{r:?}");
        let skew: Vec<f64> = xs.iter().map(|x| x.powf(1.1)).collect();
        assert!(chi_square_density_test(&skew, &pdf, 50).unwrap().p_value < 1e-6);
    }

    #[test]
    fn chi_square_merges_and_refuses() {
        let pdf = DensityFn::new("unit", 0.0, 1.0, Transform::None, |_| 1.0);
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 + 0.5) / 100.0).collect();
        let r = chi_square_density_test(&xs, &pdf, 50).unwrap();
        assert!(r.bins.unwrap() >= 5 && r.bins.unwrap() <= 20, "{r:?}");
        assert!(chi_square_density_test(&xs[..10], &pdf, 5).is_err());
        assert!(chi_square_density_test(&xs, &pdf, 4).is_err());
    }

    #[test]
    fn chi_square_unbounded_support() {
        let pdf = DensityFn::new("exp", 0.0, f64::INFINITY, Transform::None, |x| (-x).exp());
        let mut rng = substream(10, 0);
        let xs: Vec<f64> = (0..50_000).map(|_| -uniform_open(&mut rng).ln()).collect();
        let r = chi_square_density_test(&xs, &pdf, 40).unwrap();
        assert!(r.p_value > 0.001, "{r:?}");
    }
}
