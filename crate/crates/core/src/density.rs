//! A probability density on an interval of the real line.

use std::fmt;
use std::sync::Arc;

use crate::quadrature::Transform;

type EvalFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A nonnegative function with declared support that integrates to one.
///
/// `eval` is total on the reals: it returns 0 outside `(support_lo, support_hi)`.
/// Each density also carries the quadrature transform that removes its edge
/// behaviour, so callers can integrate it without knowing its shape.
#[derive(Clone)]
pub struct DensityFn {
    name: String,
    support_lo: f64,
    support_hi: f64,
    transform: Transform,
    eval: EvalFn,
}

impl DensityFn {
    pub fn new<F>(name: impl Into<String>, support_lo: f64, support_hi: f64, transform: Transform, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        debug_assert!(support_lo < support_hi);
        Self {
            name: name.into(),
            support_lo,
            support_hi,
            transform,
            eval: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn support(&self) -> (f64, f64) {
        (self.support_lo, self.support_hi)
    }

    pub fn transform(&self) -> Transform {
        self.transform
    }

    pub fn eval(&self, x: f64) -> f64 {
        if !(x > self.support_lo && x < self.support_hi) {
            return 0.0;
        }
        (self.eval)(x)
    }
}

impl fmt::Debug for DensityFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityFn")
            .field("name", &self.name)
            .field("support", &(self.support_lo, self.support_hi))
            .field("transform", &self.transform)
            .finish()
    }
}
