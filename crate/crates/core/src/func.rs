//! Evaluation handles `GroupPoint → f64`.

use std::fmt;
use std::sync::Arc;

use crate::error::Result;
use crate::group::GroupPoint;

type EvalFn = dyn Fn(&GroupPoint) -> Result<f64> + Send + Sync;

/// A real function on `H_n` with a flag recording whether it is circular,
/// i.e. invariant under `[z, t] → [e^{iθ} z, t]`.
///
/// Handles are cheap to clone and immutable. `depth` counts how many Kelvin
/// transforms were composed to build the handle.
#[derive(Clone)]
pub struct CircularFunction {
    eval: Arc<EvalFn>,
    circular: bool,
    depth: usize,
}

impl CircularFunction {
    pub fn new<F>(circular: bool, f: F) -> Self
    where
        F: Fn(&GroupPoint) -> Result<f64> + Send + Sync + 'static,
    {
        CircularFunction {
            eval: Arc::new(f),
            circular,
            depth: 0,
        }
    }

    /// A circular function given through `(|z|², t)`.
    pub fn radial<F>(f: F) -> Self
    where
        F: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
    {
        CircularFunction::new(true, move |p| f(p.abs_z_sq(), p.t()))
    }

    pub fn constant(c: f64) -> Self {
        CircularFunction::new(true, move |_| Ok(c))
    }

    pub(crate) fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth;
        self
    }

    pub fn eval(&self, p: &GroupPoint) -> Result<f64> {
        (self.eval)(p)
    }

    pub fn is_circular(&self) -> bool {
        self.circular
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// `f ∘ i`, composition with the group inverse `[z,t] → [-z,-t]`.
    pub fn compose_group_inverse(&self) -> CircularFunction {
        let inner = self.clone();
        CircularFunction::new(self.circular, move |p| inner.eval(&p.invert()))
            .with_depth(self.depth)
    }

    /// Pointwise linear combination `a·self + b·other`.
    pub fn linear_combination(&self, a: f64, other: &CircularFunction, b: f64) -> CircularFunction {
        let (f, g) = (self.clone(), other.clone());
        CircularFunction::new(self.circular && other.circular, move |p| {
            Ok(a * f.eval(p)? + b * g.eval(p)?)
        })
        .with_depth(self.depth.max(other.depth))
    }
}

impl fmt::Debug for CircularFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CircularFunction")
            .field("circular", &self.circular)
            .field("depth", &self.depth)
            .finish_non_exhaustive()
    }
}
