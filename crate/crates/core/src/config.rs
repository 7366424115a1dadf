//! Numerical knobs shared by quadrature, finite differences and series.

use crate::error::{Error, Result};
use crate::hyp2f1::HypConfig;

/// Node counts, step sizes and tolerances for every numerical integration and
/// differentiation in the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    /// Trapezoid nodes for the circular (θ) average.
    pub theta_nodes: usize,
    /// Trapezoid nodes per torus angle in the unitary-orbit average.
    pub torus_nodes: usize,
    /// Gauss–Legendre nodes per simplex coordinate in the unitary-orbit average.
    pub simplex_nodes: usize,
    /// Gauss–Legendre nodes per direction for volume integrals in the `(|z|², t)` half-plane.
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    /// Gauss–Legendre nodes per panel on each boundary curve.
    pub boundary_nodes: usize,
    pub boundary_panels: usize,
    /// Finite-difference step for normal derivatives.
    pub fd_step: f64,
    /// `|z|` below this is treated as the characteristic axis.
    pub axis_tol: f64,
    /// Truncation target for Green's-function series inside quadratures.
    pub series_eps: f64,
    pub hyp: HypConfig,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            theta_nodes: 256,
            torus_nodes: 48,
            simplex_nodes: 32,
            radial_nodes: 32,
            angular_nodes: 32,
            boundary_nodes: 16,
            boundary_panels: 8,
            fd_step: 1e-4,
            axis_tol: 1e-9,
            series_eps: 1e-10,
            hyp: HypConfig::default(),
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            self.theta_nodes,
            self.torus_nodes,
            self.simplex_nodes,
            self.radial_nodes,
            self.angular_nodes,
            self.boundary_nodes,
            self.boundary_panels,
        ];
        if counts.contains(&0) {
            return Err(Error::InvalidArgument(
                "node counts must be positive".into(),
            ));
        }
        for (name, v) in [
            ("fd_step", self.fd_step),
            ("axis_tol", self.axis_tol),
            ("series_eps", self.series_eps),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// A copy with every node count doubled (for convergence checks).
    pub fn refined(&self) -> Self {
        QuadratureConfig {
            theta_nodes: 2 * self.theta_nodes,
            torus_nodes: 2 * self.torus_nodes,
            simplex_nodes: 2 * self.simplex_nodes,
            radial_nodes: 2 * self.radial_nodes,
            angular_nodes: 2 * self.angular_nodes,
            boundary_nodes: 2 * self.boundary_nodes,
            boundary_panels: self.boundary_panels,
            ..self.clone()
        }
    }
}
