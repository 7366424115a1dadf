//! Kelvin transforms `K f = N^{-2n} f∘h` and `K_R f = R^{2n} N^{-2n} f∘h_R`
//! as lazy operators on [`CircularFunction`] handles.

use crate::error::{Error, Result};
use crate::func::CircularFunction;
use crate::group::{Dimension, GroupPoint};

/// Maximum number of Kelvin transforms composed into one handle.
pub const DEPTH_CAP: usize = 16;

fn next_depth(f: &CircularFunction) -> Result<usize> {
    let depth = f.depth() + 1;
    if depth > DEPTH_CAP {
        return Err(Error::DepthExceeded {
            depth,
            cap: DEPTH_CAP,
        });
    }
    Ok(depth)
}

/// `N(ξ)^{-2n} = (|z|⁴+t²)^{-n/2}`.
fn gauge_weight(p: &GroupPoint, n: Dimension) -> f64 {
    p.gauge4().powf(-n.half())
}

/// The Kelvin transform `(K f)(ξ) = N(ξ)^{-2n} f(h(ξ))`.
pub fn apply_k(f: &CircularFunction, n: Dimension) -> Result<CircularFunction> {
    let depth = next_depth(f)?;
    let inner = f.clone();
    Ok(CircularFunction::new(f.is_circular(), move |p| {
        let hp = p.inversion_h()?;
        Ok(gauge_weight(p, n) * inner.eval(&hp)?)
    })
    .with_depth(depth))
}

/// The Kelvin R-transform `(K_R f)(ξ) = R^{2n} N(ξ)^{-2n} f(h_R(ξ))`.
pub fn apply_kr(f: &CircularFunction, r: f64, n: Dimension) -> Result<CircularFunction> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "radius must be > 0, got {r}"
        )));
    }
    let depth = next_depth(f)?;
    let inner = f.clone();
    let scale = r.powf(2.0 * n.as_f64());
    Ok(CircularFunction::new(f.is_circular(), move |p| {
        let hp = p.inversion_hr(r)?;
        Ok(scale * gauge_weight(p, n) * inner.eval(&hp)?)
    })
    .with_depth(depth))
}

/// `η* = h(η)`, the pole of `K g_η`.
pub fn pole_image_star(eta: &GroupPoint) -> Result<GroupPoint> {
    eta.inversion_h()
}

/// `η⁺ = h_R(η)`, the pole of `K_R g_η`.
pub fn pole_image_plus(eta: &GroupPoint, r: f64) -> Result<GroupPoint> {
    eta.inversion_hr(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundamental::{g_bar, g_bar_handle, g_pole, g_pole_handle};

    fn pt(z: &[(f64, f64)], t: f64) -> GroupPoint {
        GroupPoint::new(z.to_vec(), t).unwrap()
    }

    #[test]
    fn k_is_an_involution() {
        let n = Dimension::new(2).unwrap();
        let f = CircularFunction::new(false, |p| Ok(p.z()[0].0 + 3.0 * p.t() + p.abs_z_sq()));
        let kk = apply_k(&apply_k(&f, n).unwrap(), n).unwrap();
        let p = pt(&[(0.3, -0.4), (0.1, 0.7)], 0.2);
        assert!((kk.eval(&p).unwrap() - f.eval(&p).unwrap()).abs() < 1e-13);
        let krkr = apply_kr(&apply_kr(&f, 0.4, n).unwrap(), 0.4, n).unwrap();
        assert!((krkr.eval(&p).unwrap() - f.eval(&p).unwrap()).abs() < 1e-12);
        assert_eq!(krkr.depth(), 2);
    }

    #[test]
    fn kr_at_unit_radius_is_k() {
        let n = Dimension::new(1).unwrap();
        let f = g_bar_handle(&pt(&[(0.2, 0.1)], 0.3), n);
        let p = pt(&[(0.5, 0.6)], -0.4);
        let a = apply_k(&f, n).unwrap().eval(&p).unwrap();
        let b = apply_kr(&f, 1.0, n).unwrap().eval(&p).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn kelvin_of_translated_fundamental_solution() {
        let n = Dimension::new(1).unwrap();
        let eta = pt(&[(0.3, 0.2)], 0.1);
        let xi = pt(&[(-0.7, 0.4)], 0.5);
        let lhs = apply_k(&g_pole_handle(&eta, n), n)
            .unwrap()
            .eval(&xi)
            .unwrap();
        let rhs = eta.gauge().powi(-2) * g_pole(&pole_image_star(&eta).unwrap(), &xi, n).unwrap();
        assert!(((lhs - rhs) / rhs).abs() < 1e-12);
    }

    #[test]
    fn kelvin_of_averaged_kernel() {
        let n = Dimension::new(3).unwrap();
        let r = 0.5;
        let eta = pt(&[(0.3, 0.2), (0.0, -0.1), (0.2, 0.2)], 0.1);
        let xi = pt(&[(-0.7, 0.4), (0.1, 0.1), (0.0, 0.3)], 0.5);
        let f = g_bar_handle(&eta, n);
        let lhs = apply_kr(&f, r, n).unwrap().eval(&xi).unwrap();
        let plus = pole_image_plus(&eta, r).unwrap();
        let rhs = r.powi(6) * eta.gauge().powi(-6) * g_bar(&plus, &xi, n).unwrap();
        assert!(((lhs - rhs) / rhs).abs() < 1e-12);
    }

    #[test]
    fn boundary_fixed_point() {
        let n = Dimension::new(2).unwrap();
        let f = g_bar_handle(&pt(&[(0.2, 0.1), (0.0, 0.3)], 0.3), n);
        let raw = pt(&[(0.3, 0.5), (0.2, -0.1)], 0.4);
        let xi = raw.dilate(1.0 / raw.gauge()).unwrap();
        let k = apply_k(&f, n).unwrap();
        let a = k.eval(&xi.invert()).unwrap();
        assert!(((a - f.eval(&xi).unwrap()) / a).abs() < 1e-12);
    }

    #[test]
    fn depth_cap_is_enforced() {
        let n = Dimension::new(1).unwrap();
        let mut f = CircularFunction::constant(1.0);
        for _ in 0..DEPTH_CAP {
            f = apply_k(&f, n).unwrap();
        }
        assert!(matches!(apply_k(&f, n), Err(Error::DepthExceeded { .. })));
    }
}
