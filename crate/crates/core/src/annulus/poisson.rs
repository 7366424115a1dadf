//! Normal derivatives on the boundary spheres and the Poisson kernels
//! `P = -¼ ∂G/∂n₀`.
//!
//! With `A = |z|² - it` and `E = Σ z_j Z_j`, the real vector field
//! `V = A E + Ā Ē` is
//!
//! ```text
//! V = Σ_j [(ρ x_j + t y_j) ∂_{x_j} + (ρ y_j - t x_j) ∂_{y_j}] + 2ρt ∂_t,
//! ```
//!
//! and on functions of `(ρ, t) = (|z|², t)` it acts as `2ρ(ρ∂_ρ + t∂_t)`, the
//! gauge-radial direction. The normal operator is `V/|z|` on `N = 1` and
//! `-V/(R²|z|)` on `N = R`, so it points out of the annulus on both spheres.

use super::{pairs_for, partial_sum_layout, term_parts_reduced, AnnulusDomain, BoundaryId};
use crate::config::QuadratureConfig;
use crate::error::{Error, Result};
use crate::func::CircularFunction;
use crate::fundamental::a0;
use crate::group::{Dimension, GroupPoint};
use crate::hyp2f1::{hyp2f1, HypParams, POLE_CUTOFF};
use crate::sum::KahanSum;

/// Relative distance from the boundary sphere tolerated by the normal operators.
const SPHERE_TOL: f64 = 1e-8;

/// Mismatch threshold between the closed form and the numeric kernel.
const CLOSED_FORM_TOL: f64 = 1e-6;

/// The vector field `V` at `xi`, in the flat layout `(x_1, y_1, …, x_n, y_n, t)`.
pub fn normal_field(xi: &GroupPoint) -> Vec<f64> {
    let rho = xi.abs_z_sq();
    let t = xi.t();
    let mut v = Vec::with_capacity(2 * xi.z().len() + 1);
    for &(x, y) in xi.z() {
        v.push(rho * x + t * y);
        v.push(rho * y - t * x);
    }
    v.push(2.0 * rho * t);
    v
}

fn boundary_factor(
    xi: &GroupPoint,
    b: BoundaryId,
    dom: &AnnulusDomain,
    q: &QuadratureConfig,
) -> Result<f64> {
    let level = dom.level(b);
    let g = xi.gauge();
    if (g - level).abs() > SPHERE_TOL * level {
        return Err(Error::InvalidArgument(format!(
            "point with gauge {g} is not on the boundary sphere N = {level}"
        )));
    }
    let abs_z = xi.abs_z_sq().sqrt();
    if abs_z < q.axis_tol {
        return Err(Error::CharacteristicPoint { abs_z });
    }
    Ok(match b {
        BoundaryId::Outer => 1.0 / abs_z,
        BoundaryId::Inner => -1.0 / (dom.r() * dom.r() * abs_z),
    })
}

/// `∂f/∂n₀` at a boundary point by a central difference along `V` with step
/// `q.fd_step`.
pub fn normal_derivative(
    f: &CircularFunction,
    xi: &GroupPoint,
    b: BoundaryId,
    dom: &AnnulusDomain,
    q: &QuadratureConfig,
) -> Result<f64> {
    let factor = boundary_factor(xi, b, dom, q)?;
    let h = q.fd_step;
    let base = xi.to_flat();
    let v = normal_field(xi);
    let shifted = |s: f64| -> Result<f64> {
        let c: Vec<f64> = base.iter().zip(&v).map(|(x, d)| x + s * d).collect();
        f.eval(&GroupPoint::from_flat(&c)?)
    };
    let d = (shifted(h)? - shifted(-h)?) / (2.0 * h);
    Ok(factor * d)
}

/// `(ρ∂_ρ + t∂_t) ḡ` for the averaged kernel with pole class `(σ, τ)`:
/// `a_0 S^{-n/2} (n/2) [(1 - S'/S) F(n/2+1, n/2; n; x) - F(n/2, n/2; n; x)]`
/// with `S = (ρ+σ)² + (t-τ)²`, `S' = 2ρ(ρ+σ) + 2t(t-τ)`, `x = 4ρσ/S`.
fn radial_derivative(rho: f64, t: f64, sigma: f64, tau: f64, n: Dimension) -> Result<f64> {
    let re = rho + sigma;
    let im = t - tau;
    let s = re * re + im * im;
    let ds = 2.0 * rho * re + 2.0 * t * im;
    let x = 4.0 * rho * sigma / s;
    if !(x < 1.0 - POLE_CUTOFF) {
        return Err(Error::PoleOrbit { arg: x });
    }
    let f = hyp2f1(HypParams::averaged(n.get()), x)?;
    let fp = hyp2f1(HypParams::raised(n.get()), x)?;
    Ok(a0(n) * s.powf(-n.half()) * n.half() * ((1.0 - ds / s) * fp - f))
}

/// Poisson kernel from the analytic radial derivative of every term of the
/// series truncated at `pairs`, in reduced coordinates.
pub fn poisson_reduced(
    z: (f64, f64),
    w: (f64, f64),
    b: BoundaryId,
    dom: &AnnulusDomain,
    pairs: usize,
) -> Result<f64> {
    let (r, n) = (dom.r(), dom.n());
    let mut acc = KahanSum::new();
    for chunk in partial_sum_layout(pairs).chunks(2) {
        let mut pair = 0.0;
        for &(sign, fam, k) in chunk {
            let parts = term_parts_reduced(fam, k, z, w, r, n)?;
            let (s, tau) = parts.image_pole;
            pair += sign * parts.image_weight * radial_derivative(z.0, z.1, s, tau, n)?;
        }
        acc.add(pair);
    }
    // ∂/∂n₀ = ±2√ρ (ρ∂_ρ + t∂_t) / level²
    let scale = match b {
        BoundaryId::Outer => 2.0 * z.0.sqrt(),
        BoundaryId::Inner => -2.0 * z.0.sqrt() / (r * r),
    };
    Ok(-0.25 * scale * acc.value())
}

/// How [`poisson_annulus`] evaluates the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoissonMode {
    /// Central difference of the truncated Green's function along `V`.
    Numeric,
    /// Term-by-term analytic derivative of the truncated series.
    Derived,
    /// The closed double-sum expression over the image families, checked
    /// against `Numeric`.
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonEval {
    pub value: f64,
    pub mode: PoissonMode,
    /// Numeric reference value, filled for [`PoissonMode::ClosedForm`].
    pub reference: Option<f64>,
    /// `true` when the closed form deviates from the reference beyond tolerance.
    pub mismatch: bool,
}

/// The Poisson kernel `P(η, ξ) = -¼ ∂G(η, ξ)/∂n₀` at a boundary point `ξ`.
pub fn poisson_annulus(
    eta: &GroupPoint,
    xi: &GroupPoint,
    b: BoundaryId,
    dom: &AnnulusDomain,
    mode: PoissonMode,
    q: &QuadratureConfig,
) -> Result<PoissonEval> {
    dom.check_dim(eta)?;
    dom.check_dim(xi)?;
    if !dom.contains(eta) {
        return Err(Error::Domain(format!(
            "pole gauge {} outside ({}, 1)",
            eta.gauge(),
            dom.r()
        )));
    }
    boundary_factor(xi, b, dom, q)?;
    let z = (xi.abs_z_sq(), xi.t());
    let w = (eta.abs_z_sq(), eta.t());
    let (pairs, _) = pairs_for(z, w, dom.r(), dom.n(), q.series_eps)?;
    let numeric = || -> Result<f64> {
        let g = super::green_annulus_handle(eta, dom, pairs)?;
        Ok(-0.25 * normal_derivative(&g, xi, b, dom, q)?)
    };
    Ok(match mode {
        PoissonMode::Numeric => PoissonEval {
            value: numeric()?,
            mode,
            reference: None,
            mismatch: false,
        },
        PoissonMode::Derived => PoissonEval {
            value: poisson_reduced(z, w, b, dom, pairs)?,
            mode,
            reference: None,
            mismatch: false,
        },
        PoissonMode::ClosedForm => {
            let reference = numeric()?;
            let value = closed_form_poisson(z, w, b, dom, pairs + 1)?;
            let mismatch = !((value - reference).abs() <= CLOSED_FORM_TOL * reference.abs());
            PoissonEval {
                value,
                mode,
                reference: Some(reference),
                mismatch,
            }
        }
    })
}

/// The closed double-sum Poisson expression, term for term and multiplied
/// by `a_0`, summed over `k = 1..=k_max`.
///
/// Kept verbatim, suspected typos included, so its disagreement with the
/// numeric kernel can be measured. No solver uses it.
pub fn closed_form_poisson(
    z: (f64, f64),
    w: (f64, f64),
    b: BoundaryId,
    dom: &AnnulusDomain,
    k_max: usize,
) -> Result<f64> {
    let (r, n) = (dom.r(), dom.n());
    let nf = n.as_f64();
    let (rho, t) = z;
    let (sigma, tau) = w;
    let g4 = rho * rho + t * t;
    let w4 = sigma * sigma + tau * tau;
    let cross = rho * sigma - t * tau;
    let wterm = 2.0 * sigma - t * tau;
    let n_pow = g4.powf(-nf / 2.0);
    let abs_z = rho.sqrt();
    let raised = HypParams::raised(n.get());
    let mut acc = KahanSum::new();
    for k in 1..=k_max {
        let kf = k as f64;
        let q = r.powf(2.0 * (2.0 * kf - 2.0));
        let p = r.powf(4.0 * kf);
        let pp = r.powf(2.0 * 4.0 * kf);
        let v = [
            1.0 + q * q * w4 * g4 + 2.0 * q * cross,
            g4 + q * q * w4 + 2.0 * q * cross,
            pp + w4 * g4 + 2.0 * pp * cross,
            pp * g4 + w4 + 2.0 * pp * cross,
        ];
        let u = [
            4.0 * q * rho * sigma,
            4.0 * q * rho * sigma,
            4.0 * p * rho * sigma,
            4.0 * p * rho * sigma,
        ];
        let bracket = [
            r.powf(-2.0 * nf)
                * n_pow
                * ((2.0 * rho + t * t) / (g4 * g4) * (1.0 + 2.0 * q * cross) - q / g4 * wterm),
            r.powf(-2.0 * nf) * ((rho + t * t) + q * wterm),
            p * n_pow * ((2.0 * rho + t * t) / (g4 * g4) * (p + 2.0 * cross) - wterm / g4),
            p * (p * (rho + t * t) + wterm),
        ];
        let lead = match b {
            BoundaryId::Outer => r.powf(2.0 * kf * nf),
            BoundaryId::Inner => -r.powf(2.0 * kf * nf - 2.0),
        };
        for i in 0..4 {
            let x = u[i] / v[i];
            let f = hyp2f1(raised, x)?;
            acc.add(lead * abs_z * (nf / 2.0) * v[i].powf(-nf / 2.0 - 1.0) * f * bracket[i]);
        }
    }
    Ok(a0(n) * acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annulus::green_annulus_handle;

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn sphere_point(n: usize, alpha: f64, level: f64) -> GroupPoint {
        // (ρ, t) = level² (cos α, sin α), z spread over the coordinates
        let rho = level * level * alpha.cos();
        let t = level * level * alpha.sin();
        let s = (rho / n as f64).sqrt();
        let z = (0..n)
            .map(|j| if j % 2 == 0 { (s, 0.0) } else { (0.0, s) })
            .collect();
        GroupPoint::new(z, t).unwrap()
    }

    #[test]
    fn field_acts_radially_on_reduced_functions() {
        // f = ρ² t: V f = 2ρ(ρ ∂_ρ + t ∂_t) f = 2ρ (2ρ² t + ρ² t) = 6 ρ³ t
        let f = CircularFunction::radial(|rho, t| Ok(rho * rho * t));
        let xi = GroupPoint::new(vec![(0.3, 0.4), (-0.2, 0.1)], 0.5).unwrap();
        let rho = xi.abs_z_sq();
        let base = xi.to_flat();
        let v = normal_field(&xi);
        let h = 1e-5;
        let at = |s: f64| {
            let c: Vec<f64> = base.iter().zip(&v).map(|(x, d)| x + s * d).collect();
            f.eval(&GroupPoint::from_flat(&c).unwrap()).unwrap()
        };
        let d = (at(h) - at(-h)) / (2.0 * h);
        assert!((d - 6.0 * rho.powi(3) * 0.5).abs() < 1e-8);
    }

    #[test]
    fn normal_derivative_of_quartic_gauge() {
        // N⁴ = ρ² + t²: V N⁴ = 4ρ(ρ² + t²) = 4ρ on N = 1, so ∂N⁴/∂n₀ = 4|z|
        let d = AnnulusDomain::new(0.5, dim(1)).unwrap();
        let f = CircularFunction::radial(|rho, t| Ok(rho * rho + t * t));
        let xi = sphere_point(1, 0.4, 1.0);
        let q = QuadratureConfig::default();
        let nd = normal_derivative(&f, &xi, BoundaryId::Outer, &d, &q).unwrap();
        let exact = 4.0 * xi.abs_z_sq().sqrt();
        assert!((nd - exact).abs() < 1e-6);
        let c = CircularFunction::constant(2.0);
        assert_eq!(
            normal_derivative(&c, &xi, BoundaryId::Outer, &d, &q).unwrap(),
            0.0
        );
        let axis = GroupPoint::new(vec![(0.0, 0.0)], 1.0).unwrap();
        assert!(matches!(
            normal_derivative(&f, &axis, BoundaryId::Outer, &d, &q),
            Err(Error::CharacteristicPoint { .. })
        ));
    }

    #[test]
    fn derived_matches_numeric_on_both_spheres() {
        let q = QuadratureConfig::default();
        for n in [1, 2] {
            let d = AnnulusDomain::new(0.5, dim(n)).unwrap();
            let eta = sphere_point(n, 0.3, 0.75);
            for (b, level) in [(BoundaryId::Outer, 1.0), (BoundaryId::Inner, 0.5)] {
                let xi = sphere_point(n, -0.5, level);
                let num = poisson_annulus(&eta, &xi, b, &d, PoissonMode::Numeric, &q)
                    .unwrap()
                    .value;
                let der = poisson_annulus(&eta, &xi, b, &d, PoissonMode::Derived, &q)
                    .unwrap()
                    .value;
                assert!(num > 0.0 && der > 0.0);
                assert!(
                    ((num - der) / der).abs() < 1e-6,
                    "n={n} {b:?}: {num} vs {der}"
                );
            }
        }
    }

    #[test]
    fn numeric_kernel_has_second_order_steps() {
        let d = AnnulusDomain::new(0.5, dim(1)).unwrap();
        let eta = sphere_point(1, 0.2, 0.7);
        let xi = sphere_point(1, 0.9, 1.0);
        let z = (xi.abs_z_sq(), xi.t());
        let w = (eta.abs_z_sq(), eta.t());
        let exact = poisson_reduced(z, w, BoundaryId::Outer, &d, 12).unwrap();
        let g = green_annulus_handle(&eta, &d, 12).unwrap();
        let err = |h: f64| {
            let q = QuadratureConfig {
                fd_step: h,
                ..Default::default()
            };
            (-0.25 * normal_derivative(&g, &xi, BoundaryId::Outer, &d, &q).unwrap() - exact).abs()
        };
        let order = (err(0.02) / err(0.01)).log2();
        assert!((order - 2.0).abs() < 0.3, "order {order}");
    }

    #[test]
    fn closed_form_is_flagged() {
        let q = QuadratureConfig::default();
        let d = AnnulusDomain::new(0.5, dim(1)).unwrap();
        let eta = sphere_point(1, 0.3, 0.75);
        let xi = sphere_point(1, -0.5, 1.0);
        let p = poisson_annulus(
            &eta,
            &xi,
            BoundaryId::Outer,
            &d,
            PoissonMode::ClosedForm,
            &q,
        )
        .unwrap();
        assert!(p.reference.is_some());
        assert!(p.mismatch);
    }
}
