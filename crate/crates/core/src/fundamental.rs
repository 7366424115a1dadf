//! The fundamental solution of `L_0`, its translates, orbit averages and the
//! closed hypergeometric form of the averaged kernel.
//!
//! Every averaged kernel used by the series depends on the field point only
//! through `(ρ, t) = (|z|², t)` and on the pole through `(σ, τ) = (|ς|², τ)`:
//!
//! ```text
//! ḡ = a_0 |C|^{-n} F(n/2, n/2; n; 4ρσ/|C|²),   C = ρ + σ + i(t - τ).
//! ```
//!
//! This is the average of `g_η` over the unitary orbit `{[uz, t] : u ∈ U(n)}`.
//! For `n = 1` the unitary orbit is the circle `{[e^{iθ}z, t]}` and the two
//! averages coincide.

use statrs::function::gamma::gamma;

use crate::config::QuadratureConfig;
use crate::error::{Error, Result};
use crate::func::CircularFunction;
use crate::group::{Dimension, GroupPoint};
use crate::hyp2f1::{hyp2f1_with, HypConfig, HypParams, POLE_CUTOFF};
use crate::quadrature::{periodic_mean, GaussLegendre};
use crate::sum::KahanSum;

/// The normalising constant `a_0 = 2^{n-2} Γ(n/2)² / π^{n+1}`.
pub fn a0(n: Dimension) -> f64 {
    let nf = n.as_f64();
    let g = gamma(nf / 2.0);
    2f64.powf(nf - 2.0) * g * g / std::f64::consts::PI.powf(nf + 1.0)
}

/// `g_e([z,t]) = a_0 (|z|⁴ + t²)^{-n/2}`.
pub fn g_e(p: &GroupPoint, n: Dimension) -> Result<f64> {
    check_dim(p, n)?;
    let g4 = p.gauge4();
    if g4 == 0.0 {
        return Err(Error::Pole { gauge: 0.0 });
    }
    Ok(a0(n) * g4.powf(-n.half()))
}

/// `g_η(ξ) = g_e(ξ^{-1} η)`.
pub fn g_pole(eta: &GroupPoint, xi: &GroupPoint, n: Dimension) -> Result<f64> {
    check_dim(eta, n)?;
    let q = xi.invert().multiply(eta)?;
    g_e(&q, n)
}

pub(crate) fn check_dim(p: &GroupPoint, n: Dimension) -> Result<()> {
    if p.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n.get(),
            got: p.dim().get(),
        });
    }
    Ok(())
}

/// `C(η,ξ) = |z|² + |ς|² + i(t - τ)` and `P(η,ξ) = 2 z·ς̄`, stored as `(re, im)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParts {
    pub c: (f64, f64),
    pub p: (f64, f64),
}

impl KernelParts {
    /// `|P|² / |C|²`.
    pub fn ratio(&self) -> f64 {
        let c2 = self.c.0 * self.c.0 + self.c.1 * self.c.1;
        (self.p.0 * self.p.0 + self.p.1 * self.p.1) / c2
    }
}

pub fn kernel_parts(eta: &GroupPoint, xi: &GroupPoint) -> Result<KernelParts> {
    if eta.dim() != xi.dim() {
        return Err(Error::DimensionMismatch {
            expected: eta.dim().get(),
            got: xi.dim().get(),
        });
    }
    let (mut pr, mut pi) = (0.0, 0.0);
    for (&(x, y), &(s, u)) in xi.z().iter().zip(eta.z()) {
        // (x + iy)(s - iu)
        pr += x * s + y * u;
        pi += y * s - x * u;
    }
    Ok(KernelParts {
        c: (xi.abs_z_sq() + eta.abs_z_sq(), xi.t() - eta.t()),
        p: (2.0 * pr, 2.0 * pi),
    })
}

/// `g_η(ξ)` through the kernel parts: `a_0 |C - P̄|^{-n}`.
///
/// With the product `[z,t]·[z',t'] = [z+z', t+t'+2 Im(z·z̄')]` the imaginary
/// part of `ξ^{-1}η` carries `-(t - τ + 2 Im(z·ς̄))`, so the modulus is taken
/// of `C - P̄`; `|C - P|` differs whenever `Im(z·ς̄) ≠ 0`.
pub fn g_pole_via_parts(eta: &GroupPoint, xi: &GroupPoint, n: Dimension) -> Result<f64> {
    check_dim(eta, n)?;
    let k = kernel_parts(eta, xi)?;
    let re = k.c.0 - k.p.0;
    let im = k.c.1 + k.p.1;
    let m2 = re * re + im * im;
    if m2 == 0.0 {
        return Err(Error::Pole { gauge: 0.0 });
    }
    Ok(a0(n) * m2.powf(-n.half()))
}

/// Mean of `f` over the circle `{[e^{iθ}z, t] : θ ∈ [0, 2π)}` by the periodic
/// trapezoid rule with `q.theta_nodes` nodes.
pub fn circular_average(f: &CircularFunction, p: &GroupPoint, q: &QuadratureConfig) -> Result<f64> {
    periodic_mean(q.theta_nodes, |theta| f.eval(&p.rotate(theta)))
}

/// Node counts for [`unitary_average_with`]: one Gauss–Legendre count per
/// stick-breaking simplex coordinate (`n - 1` of them) and one trapezoid count
/// per torus angle (`n` of them).
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitNodes {
    pub simplex: Vec<usize>,
    pub torus: Vec<usize>,
}

impl OrbitNodes {
    pub fn uniform(n: Dimension, simplex: usize, torus: usize) -> Self {
        OrbitNodes {
            simplex: vec![simplex; n.get() - 1],
            torus: vec![torus; n.get()],
        }
    }
}

/// Mean of `f` over the unitary orbit `{[uz, t] : u ∈ U(n)}` using the default
/// node counts of `q`.
pub fn unitary_average(f: &CircularFunction, p: &GroupPoint, q: &QuadratureConfig) -> Result<f64> {
    if p.dim().get() == 1 {
        return circular_average(f, p, q);
    }
    unitary_average_with(
        f,
        p,
        &OrbitNodes::uniform(p.dim(), q.simplex_nodes, q.torus_nodes),
    )
}

/// Mean of `f` over the unitary orbit of `p`.
///
/// The orbit is the sphere `|w| = |z|` in `C^n`. A uniform point on it is
/// `w_j = |z| √u_j e^{iα_j}` with `u` uniform on the simplex (stick-breaking
/// `u_1 = s_1, u_2 = (1-s_1) s_2, …`, `s_j` with density `(n-j)(1-s_j)^{n-j-1}`)
/// and independent uniform angles `α_j`.
pub fn unitary_average_with(
    f: &CircularFunction,
    p: &GroupPoint,
    nodes: &OrbitNodes,
) -> Result<f64> {
    let n = p.dim().get();
    if nodes.simplex.len() != n - 1 || nodes.torus.len() != n {
        return Err(Error::InvalidArgument(format!(
            "orbit node layout does not match n = {n}"
        )));
    }
    if nodes.simplex.iter().chain(&nodes.torus).any(|&c| c == 0) {
        return Err(Error::InvalidArgument(
            "orbit node counts must be positive".into(),
        ));
    }
    let r = p.abs_z_sq().sqrt();

    // simplex points (u_1..u_n) with weights
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
    for (j, &m) in nodes.simplex.iter().enumerate() {
        let rule = GaussLegendre::new(m);
        let power = (n - 1 - j) as f64; // density (n-j)(1-s)^{n-j-1} with 1-based j
        let mut next = Vec::with_capacity(simplex.len() * m);
        for (u, w) in &simplex {
            let used: f64 = u.iter().sum();
            let rest = (1.0 - used).max(0.0);
            for (s, ws) in rule.mapped(0.0, 1.0) {
                let dens = power * (1.0 - s).powf(power - 1.0);
                let mut v = u.clone();
                v.push(rest * s);
                next.push((v, w * ws * dens));
            }
        }
        simplex = next;
    }

    let mut acc = KahanSum::new();
    let mut angles = vec![0usize; n];
    for (u, w) in &simplex {
        let used: f64 = u.iter().sum();
        let last = (1.0 - used).max(0.0);
        let moduli: Vec<f64> = u
            .iter()
            .chain(std::iter::once(&last))
            .map(|x| r * x.sqrt())
            .collect();
        angles.iter_mut().for_each(|a| *a = 0);
        let total: usize = nodes.torus.iter().product();
        let mut torus_sum = KahanSum::new();
        for _ in 0..total {
            let z: Vec<(f64, f64)> = moduli
                .iter()
                .zip(&angles)
                .zip(&nodes.torus)
                .map(|((&m, &k), &cnt)| {
                    let (s, c) = (std::f64::consts::TAU * k as f64 / cnt as f64).sin_cos();
                    (m * c, m * s)
                })
                .collect();
            let v = f.eval(&GroupPoint::new(z, p.t())?)?;
            if !v.is_finite() {
                return Err(Error::NonFinite("orbit integrand".into()));
            }
            torus_sum.add(v);
            // odometer increment
            for (a, &cnt) in angles.iter_mut().zip(&nodes.torus) {
                *a += 1;
                if *a < cnt {
                    break;
                }
                *a = 0;
            }
        }
        acc.add(w * torus_sum.value() / total as f64);
    }
    Ok(acc.value())
}

/// Hypergeometric argument `4ρσ/|C|²` of the averaged kernel in `(ρ, t)`
/// coordinates, together with `|C|²`.
#[inline]
pub(crate) fn averaged_arg(rho: f64, t: f64, sigma: f64, tau: f64) -> (f64, f64) {
    let re = rho + sigma;
    let im = t - tau;
    let c2 = re * re + im * im;
    (4.0 * rho * sigma / c2, c2)
}

/// The averaged kernel with pole class `(σ, τ)` at the field class `(ρ, t)`:
/// `a_0 |C|^{-n} F(n/2, n/2; n; 4ρσ/|C|²)`.
pub fn averaged_kernel(rho: f64, t: f64, sigma: f64, tau: f64, n: Dimension) -> Result<f64> {
    averaged_kernel_with(rho, t, sigma, tau, n, &HypConfig::default())
}

pub fn averaged_kernel_with(
    rho: f64,
    t: f64,
    sigma: f64,
    tau: f64,
    n: Dimension,
    cfg: &HypConfig,
) -> Result<f64> {
    let (x, c2) = averaged_arg(rho, t, sigma, tau);
    if c2 == 0.0 || x >= 1.0 - POLE_CUTOFF {
        return Err(Error::PoleOrbit {
            arg: if c2 == 0.0 { 1.0 } else { x },
        });
    }
    let f = hyp2f1_with(HypParams::averaged(n.get()), x, cfg)?;
    Ok(a0(n) * c2.powf(-n.half()) * f)
}

/// `ḡ_η(ξ)`, the orbit average of `g_η` at `ξ`, in closed form.
pub fn g_bar(eta: &GroupPoint, xi: &GroupPoint, n: Dimension) -> Result<f64> {
    check_dim(eta, n)?;
    check_dim(xi, n)?;
    averaged_kernel(xi.abs_z_sq(), xi.t(), eta.abs_z_sq(), eta.t(), n)
}

/// `ḡ_η` as a circular handle in `ξ`.
pub fn g_bar_handle(eta: &GroupPoint, n: Dimension) -> CircularFunction {
    let (sigma, tau) = (eta.abs_z_sq(), eta.t());
    CircularFunction::radial(move |rho, t| averaged_kernel(rho, t, sigma, tau, n))
}

/// `g_η` as a (non-circular) handle in `ξ`.
pub fn g_pole_handle(eta: &GroupPoint, n: Dimension) -> CircularFunction {
    let eta = eta.clone();
    CircularFunction::new(false, move |xi| g_pole(&eta, xi, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    #[test]
    fn normalising_constants() {
        let pi = std::f64::consts::PI;
        assert!((a0(dim(1)) - 1.0 / (2.0 * pi)).abs() < 1e-15);
        assert!((a0(dim(2)) - 1.0 / pi.powi(3)).abs() < 1e-15);
        assert!((a0(dim(4)) - 4.0 / pi.powi(5)).abs() < 1e-15);
    }

    #[test]
    fn fundamental_solution_values() {
        let n = dim(1);
        let p = GroupPoint::new(vec![(1.0, 0.0)], 0.0).unwrap();
        assert!((g_e(&p, n).unwrap() - a0(n)).abs() < 1e-16);
        assert!(matches!(
            g_e(&GroupPoint::identity(n), n),
            Err(Error::Pole { .. })
        ));
        let q = GroupPoint::new(vec![(0.3, -0.2)], 0.7).unwrap();
        let r = 1.7;
        let lhs = g_e(&q.dilate(r).unwrap(), n).unwrap();
        assert!((lhs - r.powi(-2) * g_e(&q, n).unwrap()).abs() < 1e-14);
        assert!((g_e(&q.invert(), n).unwrap() - g_e(&q, n).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn pole_translate() {
        let n = dim(1);
        let e = GroupPoint::identity(n);
        let p = GroupPoint::new(vec![(0.4, 0.1)], -0.3).unwrap();
        assert_eq!(g_pole(&e, &p, n).unwrap(), g_e(&p.invert(), n).unwrap());
        let a = GroupPoint::new(vec![(1.0, 0.0)], 0.0).unwrap();
        let b = GroupPoint::new(vec![(-1.0, 0.0)], 0.0).unwrap();
        let direct = g_e(&b.invert().multiply(&a).unwrap(), n).unwrap();
        assert_eq!(g_pole(&a, &b, n).unwrap(), direct);
        assert!(matches!(g_pole(&p, &p, n), Err(Error::Pole { .. })));
    }

    #[test]
    fn kernel_parts_at_zero_pole_height() {
        let eta = GroupPoint::new(vec![(0.0, 0.0)], 0.4).unwrap();
        let xi = GroupPoint::new(vec![(0.5, 0.5)], 1.0).unwrap();
        let k = kernel_parts(&eta, &xi).unwrap();
        assert_eq!(k.p, (0.0, 0.0));
        assert!((k.c.0 - 0.5).abs() < 1e-15 && (k.c.1 - 0.6).abs() < 1e-15);
    }

    #[test]
    fn g_bar_with_pole_on_axis() {
        let n = dim(2);
        let eta = GroupPoint::new(vec![(0.0, 0.0), (0.0, 0.0)], 0.3).unwrap();
        let xi = GroupPoint::new(vec![(0.2, 0.1), (-0.4, 0.3)], -0.5).unwrap();
        let rho = xi.abs_z_sq();
        let exact = a0(n) * (rho * rho + 0.64f64).powf(-1.0);
        assert!((g_bar(&eta, &xi, n).unwrap() - exact).abs() < 1e-15);
    }

    #[test]
    fn g_bar_pole_orbit_error() {
        let n = dim(1);
        let eta = GroupPoint::new(vec![(0.5, 0.0)], 0.2).unwrap();
        let xi = eta.rotate(1.1);
        assert!(matches!(g_bar(&eta, &xi, n), Err(Error::PoleOrbit { .. })));
        let near = GroupPoint::new(vec![(0.5 + 1e-9, 0.0)], 0.2).unwrap();
        assert!(g_bar(&eta, &near, n).is_err());
    }

    #[test]
    fn circular_average_matches_closed_form_n1() {
        let n = dim(1);
        let q = QuadratureConfig::default();
        let eta = GroupPoint::new(vec![(0.3, 0.4)], 0.1).unwrap();
        let xi = GroupPoint::new(vec![(-0.6, 0.2)], 0.5).unwrap();
        let avg = circular_average(&g_pole_handle(&eta, n), &xi, &q).unwrap();
        let closed = g_bar(&eta, &xi, n).unwrap();
        assert!(((avg - closed) / closed).abs() < 1e-12, "{avg} vs {closed}");
    }

    #[test]
    fn unitary_average_matches_closed_form_n2() {
        let n = dim(2);
        let q = QuadratureConfig::default();
        // pole along the first axis so that the orbit integrand is smooth in the simplex variable
        let eta = GroupPoint::new(vec![(0.5, 0.0), (0.0, 0.0)], 0.1).unwrap();
        let xi = GroupPoint::new(vec![(0.2, 0.3), (-0.1, 0.4)], 0.6).unwrap();
        let closed = g_bar(&eta, &xi, n).unwrap();
        let coarse = unitary_average(&g_pole_handle(&eta, n), &xi, &q).unwrap();
        assert!(
            ((coarse - closed) / closed).abs() < 1e-6,
            "{coarse} vs {closed}"
        );
        // only the first torus angle sees the pole
        let nodes = OrbitNodes {
            simplex: vec![32],
            torus: vec![192, 1],
        };
        let fine = unitary_average_with(&g_pole_handle(&eta, n), &xi, &nodes).unwrap();
        assert!(
            ((fine - closed) / closed).abs() < 1e-12,
            "{fine} vs {closed}"
        );
    }

    #[test]
    fn via_parts_agrees_with_group_product() {
        let n = dim(2);
        let eta = GroupPoint::new(vec![(0.5, -0.2), (0.1, 0.3)], 0.1).unwrap();
        let xi = GroupPoint::new(vec![(0.2, 0.3), (-0.1, 0.4)], 0.6).unwrap();
        let a = g_pole(&eta, &xi, n).unwrap();
        let b = g_pole_via_parts(&eta, &xi, n).unwrap();
        assert!(((a - b) / a).abs() < 1e-13);
    }
}
