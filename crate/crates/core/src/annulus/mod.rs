//! Green's function of the gauge annulus `D = {R < N(ξ) < 1}` built from
//! four families of reflected averaged kernels.
//!
//! All four families are averaged kernels with reflected poles. Writing
//! `Z = |z|² + it` for the field point and `W = |ς|² + iτ` for the pole, with
//! `q = R^{4(k-1)}` and `p = R^{4k}`:
//!
//! ```text
//! M_k = R^{2n(k-1)} a_0 |Z + q W̄|^{-n}  F(4qρσ / |Z + q W̄|²)
//! H_k = R^{2n(k-1)} a_0 |1 + q Z W|^{-n} F(4qρσ / |1 + q Z W|²)
//! U_k = R^{2nk}     a_0 |Z W + p|^{-n}   F(4pρσ / |Z W + p|²)
//! V_k = R^{2nk}     a_0 |p Z + W̄|^{-n}  F(4pρσ / |p Z + W̄|²)
//! ```
//!
//! where `F = F(n/2, n/2; n; ·)`. On `N = 1` one has `M_k = H_k` and
//! `V_k = U_k`; on `N = R` one has `M_1 = U_1`, `M_{k+1} = H_k` and
//! `V_k = U_{k+1}`. The series is summed in the second pairing.

mod poisson;

pub use poisson::{
    closed_form_poisson, normal_derivative, normal_field, poisson_annulus, poisson_reduced,
    PoissonEval, PoissonMode,
};

use crate::error::{Error, Result};
use crate::func::CircularFunction;
use crate::fundamental::{a0, g_bar_handle};
use crate::group::{Dimension, GroupPoint};
use crate::hyp2f1::{hyp2f1, HypParams, POLE_CUTOFF};
use crate::kelvin::{apply_k, apply_kr};
use crate::sum::KahanSum;

/// Largest `k` accepted by [`series_term_recursive`] unless overridden.
pub const RECURSION_CAP: usize = 6;

/// Hard cap on the number of index pairs summed by [`green_annulus`].
pub const MAX_PAIRS: usize = 100_000;

/// Relative slack used when deciding whether a point lies on a boundary sphere.
const BOUNDARY_TOL: f64 = 1e-9;

/// The annulus `{R < N(ξ) < 1}` in `H_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnulusDomain {
    r: f64,
    n: Dimension,
}

impl AnnulusDomain {
    pub fn new(r: f64, n: Dimension) -> Result<Self> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "inner radius must lie in (0, 1), got {r}"
            )));
        }
        Ok(AnnulusDomain { r, n })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn n(&self) -> Dimension {
        self.n
    }

    /// `N(ξ)` strictly between `R` and `1`.
    pub fn contains(&self, p: &GroupPoint) -> bool {
        let g = p.gauge();
        g > self.r && g < 1.0
    }

    /// `N(ξ)` in `[R, 1]` up to a relative slack.
    pub fn contains_closure(&self, p: &GroupPoint) -> bool {
        let g = p.gauge();
        g >= self.r * (1.0 - BOUNDARY_TOL) && g <= 1.0 + BOUNDARY_TOL
    }

    /// Gauge radius of boundary `b`.
    pub fn level(&self, b: BoundaryId) -> f64 {
        match b {
            BoundaryId::Outer => 1.0,
            BoundaryId::Inner => self.r,
        }
    }

    fn check_dim(&self, p: &GroupPoint) -> Result<()> {
        if p.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n.get(),
                got: p.dim().get(),
            });
        }
        Ok(())
    }
}

/// The two boundary spheres of the annulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryId {
    /// `N(ξ) = 1`.
    Outer,
    /// `N(ξ) = R`.
    Inner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    H,
    M,
    U,
    V,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::H, Family::M, Family::U, Family::V];
}

/// The pieces of one closed-form term
/// `a_0 · prefactor · modulus_term^{-n} · F(n/2, n/2; n; hyp_arg)`.
///
/// Every term is also a multiple of a single averaged kernel:
/// `term = image_weight · ḡ` with pole class `image_pole = (σ', τ')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTermParts {
    pub family: Family,
    pub k: usize,
    pub prefactor: f64,
    pub modulus_term: f64,
    pub hyp_arg: f64,
    pub image_weight: f64,
    pub image_pole: (f64, f64),
}

/// A truncated series value with a certified bound on the omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesEval {
    pub value: f64,
    pub terms_used: usize,
    pub tail_bound: f64,
}

#[inline]
fn cmul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

#[inline]
fn cabs2(a: (f64, f64)) -> f64 {
    a.0 * a.0 + a.1 * a.1
}

/// Closed-form parts of a term in reduced coordinates `z = (ρ, t)`, `w = (σ, τ)`.
pub fn term_parts_reduced(
    family: Family,
    k: usize,
    z: (f64, f64),
    w: (f64, f64),
    r: f64,
    n: Dimension,
) -> Result<SeriesTermParts> {
    if k == 0 {
        return Err(Error::InvalidArgument("series index k must be >= 1".into()));
    }
    let nf = n.as_f64();
    let km1 = (k - 1) as f64;
    let kf = k as f64;
    let q = r.powf(4.0 * km1);
    let p = r.powf(4.0 * kf);
    let w_bar = (w.0, -w.1);
    let w2 = cabs2(w);
    let (prefactor, a, scale) = match family {
        Family::M => (
            r.powf(2.0 * nf * km1),
            (z.0 + q * w_bar.0, z.1 + q * w_bar.1),
            q,
        ),
        Family::H => {
            let zw = cmul(z, w);
            (r.powf(2.0 * nf * km1), (1.0 + q * zw.0, q * zw.1), q)
        }
        Family::U => {
            let zw = cmul(z, w);
            (r.powf(2.0 * nf * kf), (zw.0 + p, zw.1), p)
        }
        Family::V => (
            r.powf(2.0 * nf * kf),
            (p * z.0 + w_bar.0, p * z.1 + w_bar.1),
            p,
        ),
    };
    let a2 = cabs2(a);
    let hyp_arg = if a2 > 0.0 {
        4.0 * scale * z.0 * w.0 / a2
    } else {
        f64::INFINITY
    };
    // image pole W' and weight c with term = c · ḡ_{W'}
    let (image_weight, image_pole) = match family {
        Family::M => (prefactor, (q * w.0, q * w.1)),
        Family::H => {
            let m = q * w2;
            (prefactor * (q * w2.sqrt()).powf(-nf), (w.0 / m, w.1 / m))
        }
        Family::U => (
            prefactor * w2.sqrt().powf(-nf),
            (p * w.0 / w2, p * w.1 / w2),
        ),
        Family::V => (prefactor * p.powf(-nf), (w.0 / p, w.1 / p)),
    };
    Ok(SeriesTermParts {
        family,
        k,
        prefactor,
        modulus_term: a2.sqrt(),
        hyp_arg,
        image_weight,
        image_pole,
    })
}

impl SeriesTermParts {
    pub fn value(&self, n: Dimension) -> Result<f64> {
        if !(self.hyp_arg < 1.0 - POLE_CUTOFF) {
            return Err(Error::PoleOrbit { arg: self.hyp_arg });
        }
        let f = hyp2f1(HypParams::averaged(n.get()), self.hyp_arg)?;
        Ok(a0(n) * self.prefactor * self.modulus_term.powf(-n.as_f64()) * f)
    }
}

/// Term value in reduced coordinates.
pub fn term_reduced(
    family: Family,
    k: usize,
    z: (f64, f64),
    w: (f64, f64),
    r: f64,
    n: Dimension,
) -> Result<f64> {
    term_parts_reduced(family, k, z, w, r, n)?.value(n)
}

fn reduced(p: &GroupPoint) -> (f64, f64) {
    (p.abs_z_sq(), p.t())
}

/// Closed-form parts of the `k`-th term of `family`.
pub fn series_term_parts(
    family: Family,
    k: usize,
    eta: &GroupPoint,
    xi: &GroupPoint,
    dom: &AnnulusDomain,
) -> Result<SeriesTermParts> {
    dom.check_dim(eta)?;
    dom.check_dim(xi)?;
    term_parts_reduced(family, k, reduced(xi), reduced(eta), dom.r, dom.n)
}

/// The `k`-th term of `family` in closed form.
pub fn series_term(
    family: Family,
    k: usize,
    eta: &GroupPoint,
    xi: &GroupPoint,
    dom: &AnnulusDomain,
) -> Result<f64> {
    series_term_parts(family, k, eta, xi, dom)?.value(dom.n)
}

/// The `k`-th term of `family` as a nested composition of Kelvin transforms,
/// group inversions and the averaged kernel.
pub fn series_term_handle(
    family: Family,
    k: usize,
    eta: &GroupPoint,
    dom: &AnnulusDomain,
    cap: usize,
) -> Result<CircularFunction> {
    if k == 0 {
        return Err(Error::InvalidArgument("series index k must be >= 1".into()));
    }
    if k > cap {
        return Err(Error::DepthExceeded { depth: k, cap });
    }
    dom.check_dim(eta)?;
    let (r, n) = (dom.r, dom.n);
    let a = |f: &CircularFunction| apply_k(f, n).map(|g| g.compose_group_inverse());
    let b = |f: &CircularFunction| apply_kr(f, r, n).map(|g| g.compose_group_inverse());
    let g = g_bar_handle(eta, n);
    let mut f = match family {
        Family::H => a(&g)?,
        Family::M => g,
        Family::U => b(&g)?,
        Family::V => a(&b(&g)?)?,
    };
    for _ in 1..k {
        f = match family {
            Family::H | Family::V => a(&b(&f)?)?,
            Family::M | Family::U => b(&a(&f)?)?,
        };
    }
    Ok(f)
}

/// [`series_term`] evaluated through the literal recursive definition.
pub fn series_term_recursive(
    family: Family,
    k: usize,
    eta: &GroupPoint,
    xi: &GroupPoint,
    dom: &AnnulusDomain,
) -> Result<f64> {
    dom.check_dim(xi)?;
    series_term_handle(family, k, eta, dom, RECURSION_CAP)?.eval(xi)
}

/// Upper bound on `Σ_{k ≥ k0} (|H_k| + |M_k| + |U_k| + |V_k|)` in reduced coordinates.
///
/// Each family is dominated termwise by `a_0 · prefactor_k · L^{-n} · F(x̂)`
/// where `L` is a lower bound on the modulus and `x̂` an upper bound on the
/// hypergeometric argument, uniform in `k ≥ k0`; the prefactors are geometric
/// in `R^{2n}`.
pub fn tail_bound_reduced(
    k0: usize,
    z: (f64, f64),
    w: (f64, f64),
    r: f64,
    n: Dimension,
) -> Result<f64> {
    if k0 < 1 {
        return Err(Error::InvalidArgument("k0 must be >= 1".into()));
    }
    let nf = n.as_f64();
    let q0 = r.powf(4.0 * (k0 - 1) as f64);
    if !(q0 < 0.125) {
        return Err(Error::InvalidArgument(format!(
            "tail bound needs R^(4(k0-1)) < 1/8; got {q0:.3e} at k0 = {k0}, increase k0"
        )));
    }
    let p0 = r.powf(4.0 * k0 as f64);
    let az = cabs2(z).sqrt();
    let aw = cabs2(w).sqrt();
    let rs = z.0 * w.0;
    let geo = 1.0 / (1.0 - r.powf(2.0 * nf));
    let lead_hm = r.powf(2.0 * nf * (k0 - 1) as f64) * geo;
    let lead_uv = r.powf(2.0 * nf * k0 as f64) * geo;
    let pieces = [
        (lead_hm, 1.0 - q0 * az * aw, q0),
        (lead_hm, az - q0 * aw, q0),
        (lead_uv, az * aw - p0, p0),
        (lead_uv, aw - p0 * az, p0),
    ];
    let params = HypParams::averaged(n.get());
    let mut total = 0.0;
    for (lead, low, s) in pieces {
        if !(low > 0.0) {
            return Err(Error::Domain(format!(
                "tail bound unavailable: modulus bound {low:.3e} not positive"
            )));
        }
        let x = 4.0 * s * rs / (low * low);
        if !(x < 1.0 - POLE_CUTOFF) {
            return Err(Error::Domain(format!(
                "tail bound unavailable: argument bound {x:.6} not below 1"
            )));
        }
        total += lead * low.powf(-nf) * hyp2f1(params, x)?;
    }
    Ok(a0(n) * total)
}

/// Upper bound on the absolute sum of all four families' terms with `k ≥ k0`.
pub fn tail_bound(
    k0: usize,
    eta: &GroupPoint,
    xi: &GroupPoint,
    dom: &AnnulusDomain,
) -> Result<f64> {
    dom.check_dim(eta)?;
    dom.check_dim(xi)?;
    tail_bound_reduced(k0, reduced(xi), reduced(eta), dom.r, dom.n)
}

/// Signed terms of the partial sum with `pairs` index pairs, in summation order:
/// `(M_1 - U_1) + Σ_{k=1}^{pairs} (M_{k+1} - H_k) + Σ_{k=1}^{pairs} (V_k - U_{k+1})`.
pub fn partial_sum_layout(pairs: usize) -> Vec<(f64, Family, usize)> {
    let mut out = Vec::with_capacity(4 * pairs + 2);
    out.push((1.0, Family::M, 1));
    out.push((-1.0, Family::U, 1));
    for k in 1..=pairs {
        out.push((1.0, Family::M, k + 1));
        out.push((-1.0, Family::H, k));
    }
    for k in 1..=pairs {
        out.push((1.0, Family::V, k));
        out.push((-1.0, Family::U, k + 1));
    }
    out
}

/// The truncated series with a fixed number of index pairs, no domain checks.
pub fn partial_sum_reduced(
    z: (f64, f64),
    w: (f64, f64),
    r: f64,
    n: Dimension,
    pairs: usize,
) -> Result<f64> {
    let mut acc = KahanSum::new();
    for chunk in partial_sum_layout(pairs).chunks(2) {
        let mut pair = 0.0;
        for &(sign, fam, k) in chunk {
            pair += sign * term_reduced(fam, k, z, w, r, n)?;
        }
        acc.add(pair);
    }
    Ok(acc.value())
}

/// The smallest number of pairs whose tail bound is below `eps`, with that bound.
pub fn pairs_for(
    z: (f64, f64),
    w: (f64, f64),
    r: f64,
    n: Dimension,
    eps: f64,
) -> Result<(usize, f64)> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {eps}"
        )));
    }
    // the omitted terms have k >= pairs + 1, so the bound is taken at k0 = pairs + 1
    let mut pairs = 1;
    while r.powf(4.0 * pairs as f64) >= 0.125 {
        pairs += 1;
    }
    loop {
        // the uniform modulus and argument bounds may only become available
        // a few indices past the geometric precondition
        match tail_bound_reduced(pairs + 1, z, w, r, n) {
            Ok(bound) if bound < eps => return Ok((pairs, bound)),
            Ok(_) | Err(Error::Domain(_)) => {}
            Err(e) => return Err(e),
        }
        pairs += 1;
        if pairs > MAX_PAIRS {
            return Err(Error::NonConvergence { terms: pairs });
        }
    }
}

/// Green's function `G(η, ξ)` of the annulus, truncated so that the certified
/// tail bound is below `eps`.
pub fn green_annulus(
    eta: &GroupPoint,
    xi: &GroupPoint,
    dom: &AnnulusDomain,
    eps: f64,
) -> Result<SeriesEval> {
    dom.check_dim(eta)?;
    dom.check_dim(xi)?;
    if !dom.contains(eta) {
        return Err(Error::Domain(format!(
            "pole gauge {} outside ({}, 1)",
            eta.gauge(),
            dom.r
        )));
    }
    if !dom.contains_closure(xi) {
        return Err(Error::Domain(format!(
            "field point gauge {} outside [{}, 1]",
            xi.gauge(),
            dom.r
        )));
    }
    let (z, w) = (reduced(xi), reduced(eta));
    let (pairs, tail) = pairs_for(z, w, dom.r, dom.n, eps)?;
    let value = partial_sum_reduced(z, w, dom.r, dom.n, pairs)?;
    Ok(SeriesEval {
        value,
        terms_used: pairs + 1,
        tail_bound: tail,
    })
}

/// `G(η, ·)` truncated at a fixed number of pairs, suitable for finite
/// differences (no truncation jumps between stencil points).
pub fn green_annulus_handle(
    eta: &GroupPoint,
    dom: &AnnulusDomain,
    pairs: usize,
) -> Result<CircularFunction> {
    dom.check_dim(eta)?;
    let w = reduced(eta);
    let (r, n) = (dom.r, dom.n);
    Ok(CircularFunction::radial(move |rho, t| {
        partial_sum_reduced((rho, t), w, r, n, pairs)
    }))
}

/// `(G(η, ξ), G(ξ, η))` for two interior points; symmetry is not assumed.
pub fn symmetry_pair(
    eta: &GroupPoint,
    xi: &GroupPoint,
    dom: &AnnulusDomain,
    eps: f64,
) -> Result<(f64, f64)> {
    if !dom.contains(xi) {
        return Err(Error::Domain(
            "both points must lie in the open annulus".into(),
        ));
    }
    Ok((
        green_annulus(eta, xi, dom, eps)?.value,
        green_annulus(xi, eta, dom, eps)?.value,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fundamental::g_bar;

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn on_sphere(z: &[(f64, f64)], t: f64, level: f64) -> GroupPoint {
        let p = GroupPoint::new(z.to_vec(), t).unwrap();
        p.dilate(level / p.gauge()).unwrap()
    }

    #[test]
    fn domain_validation() {
        assert!(AnnulusDomain::new(0.0, dim(1)).is_err());
        assert!(AnnulusDomain::new(1.0, dim(1)).is_err());
        let d = AnnulusDomain::new(0.5, dim(1)).unwrap();
        assert!(d.contains(&GroupPoint::from_rho_t(dim(1), 0.5, 0.2).unwrap()));
    }

    #[test]
    fn first_m_term_is_the_averaged_kernel() {
        let d = AnnulusDomain::new(0.5, dim(2)).unwrap();
        let eta = GroupPoint::new(vec![(0.4, 0.2), (0.1, -0.3)], 0.2).unwrap();
        let xi = GroupPoint::new(vec![(-0.3, 0.5), (0.2, 0.2)], -0.3).unwrap();
        let a = series_term(Family::M, 1, &eta, &xi, &d).unwrap();
        assert!((a - g_bar(&eta, &xi, d.n()).unwrap()).abs() < 1e-15 * a);
    }

    #[test]
    fn closed_form_matches_recursion() {
        for (n, r) in [(1, 0.5), (2, 0.3), (3, 0.7)] {
            let d = AnnulusDomain::new(r, dim(n)).unwrap();
            let z: Vec<(f64, f64)> = (0..n)
                .map(|j| (0.3 - 0.1 * j as f64, 0.2 + 0.05 * j as f64))
                .collect();
            let eta = on_sphere(&z, 0.3, (1.0 + r) / 2.0);
            let xi = on_sphere(&[(0.5, -0.1)].repeat(n), -0.4, 0.8 * r + 0.2);
            for fam in Family::ALL {
                for k in 1..=4 {
                    let a = series_term(fam, k, &eta, &xi, &d).unwrap();
                    let b = series_term_recursive(fam, k, &eta, &xi, &d).unwrap();
                    assert!(
                        ((a - b) / a).abs() < 1e-10,
                        "{fam:?} k={k} n={n}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn image_representation_agrees() {
        let d = AnnulusDomain::new(0.6, dim(2)).unwrap();
        let z = (0.3, 0.4);
        let w = (0.5, -0.2);
        for fam in Family::ALL {
            for k in 1..=3 {
                let parts = term_parts_reduced(fam, k, z, w, d.r(), d.n()).unwrap();
                let (s, tau) = parts.image_pole;
                let via_image = parts.image_weight
                    * crate::fundamental::averaged_kernel(z.0, z.1, s, tau, d.n()).unwrap();
                let v = parts.value(d.n()).unwrap();
                assert!(((v - via_image) / v).abs() < 1e-12, "{fam:?} {k}");
            }
        }
    }

    #[test]
    fn boundary_identities_per_term() {
        let r = 0.5;
        let n = dim(1);
        let w = (0.4, 0.3);
        // N = 1: |Z| = 1
        let z1 = (0.6, 0.8);
        for k in 1..5 {
            let m = term_reduced(Family::M, k, z1, w, r, n).unwrap();
            let h = term_reduced(Family::H, k, z1, w, r, n).unwrap();
            assert!(((m - h) / m).abs() < 1e-12);
            let v = term_reduced(Family::V, k, z1, w, r, n).unwrap();
            let u = term_reduced(Family::U, k, z1, w, r, n).unwrap();
            assert!(((v - u) / v).abs() < 1e-12);
        }
        // N = R: |Z| = R²
        let zr = (0.6 * r * r, 0.8 * r * r);
        let m1 = term_reduced(Family::M, 1, zr, w, r, n).unwrap();
        let u1 = term_reduced(Family::U, 1, zr, w, r, n).unwrap();
        assert!(((m1 - u1) / m1).abs() < 1e-12);
        for k in 1..5 {
            let m = term_reduced(Family::M, k + 1, zr, w, r, n).unwrap();
            let h = term_reduced(Family::H, k, zr, w, r, n).unwrap();
            assert!(((m - h) / m).abs() < 1e-12);
            let v = term_reduced(Family::V, k, zr, w, r, n).unwrap();
            let u = term_reduced(Family::U, k + 1, zr, w, r, n).unwrap();
            assert!(((v - u) / v).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_bound_is_geometric_and_dominates() {
        let r = 0.5;
        let n = dim(1);
        let (z, w) = ((0.5, 0.3), (0.2, -0.6));
        let b3 = tail_bound_reduced(3, z, w, r, n).unwrap();
        let b4 = tail_bound_reduced(4, z, w, r, n).unwrap();
        assert!(b4 <= r * r * b3 * (1.0 + 1e-9));
        assert!(tail_bound_reduced(1, z, w, r, n).is_err());
        let mut brute = KahanSum::new();
        for k in 3..200 {
            for fam in Family::ALL {
                brute.add(term_reduced(fam, k, z, w, r, n).unwrap());
            }
        }
        assert!(brute.value() <= b3);
    }

    #[test]
    fn green_vanishes_on_both_spheres() {
        let d = AnnulusDomain::new(0.5, dim(1)).unwrap();
        let eta = GroupPoint::from_rho_t(dim(1), 0.3, 0.4).unwrap();
        for level in [1.0, 0.5] {
            let xi = on_sphere(&[(0.2, 0.7)], -0.3, level);
            let g = green_annulus(&eta, &xi, &d, 1e-10).unwrap();
            assert!(g.value.abs() <= g.tail_bound, "{g:?}");
            assert!(g.tail_bound < 1e-10);
        }
        let inside = on_sphere(&[(0.2, 0.7)], -0.3, 0.75);
        let g = green_annulus(&eta, &inside, &d, 1e-10).unwrap();
        assert!(g.value > 0.0);
    }

    #[test]
    fn green_rejects_points_outside() {
        let d = AnnulusDomain::new(0.5, dim(1)).unwrap();
        let eta = GroupPoint::from_rho_t(dim(1), 0.3, 0.4).unwrap();
        let far = GroupPoint::from_rho_t(dim(1), 2.0, 0.0).unwrap();
        assert!(matches!(
            green_annulus(&eta, &far, &d, 1e-8),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            green_annulus(&far, &eta, &d, 1e-8),
            Err(Error::Domain(_))
        ));
    }
}
