//! Finite-difference `L_0 = -¼ Σ_j (X_j² + Y_j²)` with
//! `X_j = ∂_{x_j} + 2y_j ∂_t`, `Y_j = ∂_{y_j} - 2x_j ∂_t`, and the checks built
//! on it.
//!
//! The coefficient of `X_j` does not involve `x_j` or `t`, so the integral
//! curve of `X_j` through `p` is the straight line `p + s X_j(p)` and
//! `X_j² f(p)` is the second derivative of `f` along that line. The same
//! holds for `Y_j`. Each square is therefore a centred second difference.
//!
//! On functions of `(ρ, t) = (|z|², t)` this gives
//! `L_0 F = -(n F_ρ + ρ (F_ρρ + F_tt))`.

use crate::annulus::AnnulusDomain;
use crate::bvp::disc_integral_reduced;
use crate::config::QuadratureConfig;
use crate::error::{Error, Result};
use crate::func::CircularFunction;
use crate::group::GroupPoint;

/// Finite-difference settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    /// Step relative to the gauge of the evaluation point (absolute when the gauge is below one).
    pub h: f64,
    /// Minimum gauge distance from the pole for residual checks.
    pub pole_exclusion: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            h: 1e-3,
            pole_exclusion: 0.1,
        }
    }
}

impl FdConfig {
    pub fn with_h(h: f64) -> Self {
        FdConfig {
            h,
            ..Default::default()
        }
    }

    fn step(&self, p: &GroupPoint) -> Result<f64> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "step must be positive, got {}",
                self.h
            )));
        }
        Ok(self.h * p.gauge().max(1.0))
    }
}

/// Centred second difference of `f` along the straight line `p + s·d`.
fn second_difference(
    f: &CircularFunction,
    base: &[f64],
    d: &[f64],
    h: f64,
    f0: f64,
) -> Result<f64> {
    let at = |s: f64| -> Result<f64> {
        let c: Vec<f64> = base.iter().zip(d).map(|(x, v)| x + s * v).collect();
        let v = f.eval(&GroupPoint::from_flat(&c)?)?;
        if !v.is_finite() {
            return Err(Error::NonFinite("stencil value".into()));
        }
        Ok(v)
    };
    Ok((at(h)? - 2.0 * f0 + at(-h)?) / (h * h))
}

/// Second-order finite-difference approximation of `L_0 f(p)`.
pub fn apply_l0_fd(f: &CircularFunction, p: &GroupPoint, cfg: &FdConfig) -> Result<f64> {
    let h = cfg.step(p)?;
    let base = p.to_flat();
    let dim = base.len();
    let f0 = f.eval(p)?;
    if !f0.is_finite() {
        return Err(Error::NonFinite("centre value".into()));
    }
    let mut total = 0.0;
    for (j, &(x, y)) in p.z().iter().enumerate() {
        let mut dx = vec![0.0; dim];
        dx[2 * j] = 1.0;
        dx[dim - 1] = 2.0 * y;
        let mut dy = vec![0.0; dim];
        dy[2 * j + 1] = 1.0;
        dy[dim - 1] = -2.0 * x;
        total += second_difference(f, &base, &dx, h, f0)?;
        total += second_difference(f, &base, &dy, h, f0)?;
    }
    Ok(-0.25 * total)
}

/// What the step-halving test concluded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Convergence {
    /// Both residuals are at rounding level.
    Converged,
    /// `log₂` of the residual ratio.
    Order(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RichardsonReport {
    pub residual_h: f64,
    pub residual_half: f64,
    pub outcome: Convergence,
}

impl RichardsonReport {
    /// Consistent with an `L_0`-harmonic function: converged, or order in `[1.7, 2.3]`.
    pub fn looks_harmonic(&self) -> bool {
        match self.outcome {
            Convergence::Converged => true,
            Convergence::Order(p) => (1.7..=2.3).contains(&p),
        }
    }
}

/// Residuals `|L_0 f(p)|` at steps `h` and `h/2` and the observed order.
///
/// For a harmonic `f` the residual is pure truncation error and halves
/// quarterly; for a non-harmonic `f` it tends to `|L_0 f| ≠ 0` and the order
/// collapses towards zero.
pub fn richardson_order(
    f: &CircularFunction,
    p: &GroupPoint,
    cfg: &FdConfig,
) -> Result<RichardsonReport> {
    let r1 = apply_l0_fd(f, p, cfg)?.abs();
    let half = FdConfig {
        h: cfg.h / 2.0,
        ..*cfg
    };
    let r2 = apply_l0_fd(f, p, &half)?.abs();
    // rounding floor of the second differences at the smaller step
    let h2 = half.step(p)?;
    let floor = 64.0 * f64::EPSILON * f.eval(p)?.abs().max(f64::MIN_POSITIVE) * p.z().len() as f64
        / (h2 * h2);
    let outcome = if r1 <= floor && r2 <= floor {
        Convergence::Converged
    } else {
        Convergence::Order((r1 / r2).log2())
    };
    Ok(RichardsonReport {
        residual_h: r1,
        residual_half: r2,
        outcome,
    })
}

/// Smooth bump `ψ(|Z - W|²/δ²)` in the `(ρ, t)` half-plane with
/// `ψ(s) = exp(-1/(1-s))` for `s < 1`, zero otherwise; `ψ(0) = e^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub centre: (f64, f64),
    pub radius: f64,
}

impl Bump {
    pub fn new(centre: (f64, f64), radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < centre.0) {
            return Err(Error::InvalidArgument(format!(
                "bump radius {radius} must be positive and below ρ = {}",
                centre.0
            )));
        }
        Ok(Bump { centre, radius })
    }

    pub fn value(&self, rho: f64, t: f64) -> f64 {
        let s = ((rho - self.centre.0).powi(2) + (t - self.centre.1).powi(2))
            / (self.radius * self.radius);
        if s < 1.0 {
            (-1.0 / (1.0 - s)).exp()
        } else {
            0.0
        }
    }

    pub fn handle(&self) -> CircularFunction {
        let b = *self;
        CircularFunction::radial(move |rho, t| Ok(b.value(rho, t)))
    }

    /// Whether the support lies inside the open annulus.
    pub fn inside(&self, dom: &AnnulusDomain) -> bool {
        let c = self.centre.0.hypot(self.centre.1);
        c - self.radius > dom.r() * dom.r() && c + self.radius < 1.0
    }
}

/// `∫_D G(η, ξ) (L_0 ψ)(ξ) dv(ξ)`, which should reproduce `ψ(η)`.
///
/// `green` is `G(η, ·)`; `L_0 ψ` is taken by [`apply_l0_fd`] at every node.
/// The integral runs over the support of the bump in polar coordinates about
/// its centre, which handles the logarithmic singularity of `G` when the bump
/// is centred at the pole.
pub fn delta_test(
    green: &CircularFunction,
    bump: &Bump,
    dom: &AnnulusDomain,
    q: &QuadratureConfig,
    fd: &FdConfig,
) -> Result<f64> {
    if !bump.inside(dom) {
        return Err(Error::InvalidArgument(
            "bump support must lie inside the annulus".into(),
        ));
    }
    let n = dom.n();
    let psi = bump.handle();
    disc_integral_reduced(
        |rho, t| {
            let p = GroupPoint::from_rho_t(n, rho, t)?;
            let l0 = apply_l0_fd(&psi, &p, fd)?;
            if l0 == 0.0 {
                return Ok(0.0);
            }
            Ok(green.eval(&p)? * l0)
        },
        bump.centre,
        bump.radius,
        n,
        q,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundamental::{g_bar_handle, g_e};
    use crate::group::Dimension;

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn annihilates_constants_and_height() {
        let p = GroupPoint::new(vec![(0.3, -0.2), (0.1, 0.5)], 0.4).unwrap();
        let cfg = FdConfig::default();
        assert_eq!(
            apply_l0_fd(&CircularFunction::constant(3.0), &p, &cfg).unwrap(),
            0.0
        );
        let t = CircularFunction::new(false, |p| Ok(p.t()));
        assert!(apply_l0_fd(&t, &p, &cfg).unwrap().abs() < 1e-9);
        let r = richardson_order(&t, &p, &cfg).unwrap();
        assert_eq!(r.outcome, Convergence::Converged);
    }

    #[test]
    fn matches_reduced_formula_on_quartic_gauge() {
        // L_0 (ρ² + t²) = -(2nρ + 4ρ)
        for n in 1..=3 {
            let z: Vec<(f64, f64)> = (0..n).map(|j| (0.2 + 0.1 * j as f64, -0.3)).collect();
            let p = GroupPoint::new(z, 0.7).unwrap();
            let f = CircularFunction::radial(|rho, t| Ok(rho * rho + t * t));
            let rho = p.abs_z_sq();
            let exact = -(2.0 * n as f64 + 4.0) * rho;
            let v = apply_l0_fd(&f, &p, &FdConfig::default()).unwrap();
            assert!((v - exact).abs() < 1e-5, "n={n}: {v} vs {exact}");
            let r = richardson_order(&f, &p, &FdConfig::default()).unwrap();
            assert!(!r.looks_harmonic());
        }
    }

    #[test]
    fn mixed_terms_are_included() {
        // f = x t: X f = t + 2y x, X² f = 2y + 2y = 4y; Y f = -2x², Y² f = 0
        let f = CircularFunction::new(false, |p| Ok(p.z()[0].0 * p.t()));
        let p = GroupPoint::new(vec![(0.3, 0.5)], 0.2).unwrap();
        let v = apply_l0_fd(&f, &p, &FdConfig::default()).unwrap();
        assert!((v + 0.25 * 4.0 * 0.5).abs() < 1e-8);
    }

    #[test]
    fn fundamental_solution_is_harmonic() {
        let n = dim(2);
        let g = CircularFunction::new(false, move |p| g_e(p, n));
        let p = GroupPoint::new(vec![(0.5, 0.1), (-0.2, 0.3)], 0.6).unwrap();
        let p = p.dilate(1.0 / p.gauge()).unwrap();
        let r = richardson_order(&g, &p, &FdConfig::with_h(1e-2)).unwrap();
        assert!(r.looks_harmonic(), "{r:?}");
    }

    #[test]
    fn averaged_kernel_is_harmonic() {
        let n = dim(1);
        let eta = GroupPoint::new(vec![(0.3, 0.2)], 0.1).unwrap();
        let g = g_bar_handle(&eta, n);
        let p = GroupPoint::new(vec![(-0.6, 0.2)], 0.5).unwrap();
        let r = richardson_order(&g, &p, &FdConfig::default()).unwrap();
        assert!(r.looks_harmonic(), "{r:?}");
    }

    #[test]
    fn linear_in_the_function() {
        let p = GroupPoint::new(vec![(0.3, 0.5)], 0.2).unwrap();
        let f = CircularFunction::radial(|rho, t| Ok(rho.powi(3) + t));
        let g = CircularFunction::radial(|rho, t| Ok((rho * t).sin()));
        let h = f.linear_combination(2.0, &g, -3.0);
        let cfg = FdConfig::default();
        let lhs = apply_l0_fd(&h, &p, &cfg).unwrap();
        let rhs =
            2.0 * apply_l0_fd(&f, &p, &cfg).unwrap() - 3.0 * apply_l0_fd(&g, &p, &cfg).unwrap();
        assert!((lhs - rhs).abs() < 1e-6);
    }

    #[test]
    fn bump_geometry() {
        let b = Bump::new((0.4, 0.2), 0.1).unwrap();
        assert!((b.value(0.4, 0.2) - (-1.0f64).exp()).abs() < 1e-16);
        assert_eq!(b.value(0.55, 0.2), 0.0);
        assert!(Bump::new((0.05, 0.0), 0.1).is_err());
        let dom = AnnulusDomain::new(0.5, dim(1)).unwrap();
        assert!(b.inside(&dom));
        let zero = CircularFunction::constant(0.0);
        let v = delta_test(
            &zero,
            &b,
            &dom,
            &QuadratureConfig::default(),
            &FdConfig::default(),
        )
        .unwrap();
        assert_eq!(v, 0.0);
    }
}
