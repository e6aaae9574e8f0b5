use std::fmt;
use std::sync::Arc;

/// A time-dependent rate in Hz, evaluable as a closure.
///
/// The solvers and the oracles evaluate the same closure, so they all see
/// identical values. `breakpoints` lists times where the function may fail to
/// be smooth; quadrature splits there.
#[derive(Clone)]
pub struct RateFn {
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    breakpoints: Arc<[f64]>,
}

impl RateFn {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { f: Arc::new(f), breakpoints: Arc::from(Vec::new()) }
    }

    pub fn with_breakpoints(mut self, breakpoints: impl Into<Vec<f64>>) -> Self {
        let mut b = breakpoints.into();
        b.sort_by(f64::total_cmp);
        b.dedup();
        self.breakpoints = Arc::from(b);
        self
    }

    pub fn constant(rate: f64) -> Self {
        Self::new(move |_| rate)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Pointwise power `self(t)^exponent`, keeping breakpoints.
    pub fn powf(&self, exponent: f64) -> Self {
        let inner = self.clone();
        Self { f: Arc::new(move |t| inner.eval(t).powf(exponent)), breakpoints: self.breakpoints.clone() }
    }

    /// Pointwise sum, with the union of both breakpoint sets.
    pub fn sum(&self, other: &RateFn) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let mut bp: Vec<f64> = self.breakpoints.to_vec();
        bp.extend_from_slice(&other.breakpoints);
        Self::new(move |t| a.eval(t) + b.eval(t)).with_breakpoints(bp)
    }
}

impl fmt::Debug for RateFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RateFn").field("breakpoints", &self.breakpoints).finish_non_exhaustive()
    }
}

/// Collects the breakpoints of several rate functions into one sorted list.
pub fn merged_breakpoints<'a>(rates: impl IntoIterator<Item = &'a RateFn>) -> Vec<f64> {
    let mut out: Vec<f64> = rates.into_iter().flat_map(|r| r.breakpoints().iter().copied()).collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}
