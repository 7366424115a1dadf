//! Green's function of the strip `I = {0 < t' < 1}` by reflecting the pole
//! height across `t' = 0` and `t' = 1`.
//!
//! `H(s)` is the averaged kernel whose pole sits at height `s`. Positive
//! images are at `s = 2m + t`, negative ones at `s = 2m - t`, `m ∈ Z`. The sum
//! is taken as
//!
//! ```text
//! [H(t) - H(-t)] + Σ_{m≥1} { [H(2m+t) - H(-2m-t)] + [H(-2m+t) - H(2m-t)] }
//! ```
//!
//! Each bracket alone decays like `m^{-(n+1)}`; the two brackets of one `m`
//! together form a second difference of `φ(d) = H` as a function of the
//! height offset `d`, which decays like `m^{-(n+2)}`. For `n = 1` the four
//! one-sided series diverge individually.

use crate::annulus::SeriesEval;
use crate::error::{Error, Result};
use crate::func::CircularFunction;
use crate::fundamental::{a0, check_dim};
use crate::group::{Dimension, GroupPoint};
use crate::hyp2f1::{hyp2f1, HypParams, POLE_CUTOFF};
use crate::sum::KahanSum;

/// Hard cap on the number of `m`-groups summed by [`green_strip`].
pub const MAX_GROUPS: usize = 50_000_000;

/// Slack on the strip boundaries when validating field points.
const EDGE_TOL: f64 = 1e-12;

/// The strip `{0 < t' < 1}` in `H_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StripDomain {
    n: Dimension,
}

impl StripDomain {
    pub fn new(n: Dimension) -> Self {
        StripDomain { n }
    }

    pub fn n(&self) -> Dimension {
        self.n
    }

    pub fn contains(&self, p: &GroupPoint) -> bool {
        p.t() > 0.0 && p.t() < 1.0
    }

    pub fn contains_closure(&self, p: &GroupPoint) -> bool {
        p.t() >= -EDGE_TOL && p.t() <= 1.0 + EDGE_TOL
    }
}

/// `C = |z|² + |z'|² + i(t' - s)` and `P = 2 z·z̄'` for pole `[z, t]` moved
/// to height `s` and field point `[z', t']`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripKernelParts {
    pub c_shift: (f64, f64),
    pub p: (f64, f64),
}

pub fn strip_kernel_parts(s: f64, eta: &GroupPoint, xi: &GroupPoint) -> Result<StripKernelParts> {
    check_dim(xi, eta.dim())?;
    let (mut pr, mut pi) = (0.0, 0.0);
    for (&(x, y), &(u, v)) in eta.z().iter().zip(xi.z()) {
        pr += x * u + y * v;
        pi += y * u - x * v;
    }
    Ok(StripKernelParts {
        c_shift: (eta.abs_z_sq() + xi.abs_z_sq(), xi.t() - s),
        p: (2.0 * pr, 2.0 * pi),
    })
}

/// `φ(d) = a_0 S^{-n/2} F(n/2, n/2; n; 4ρρ'/S)` with `S = (ρ+ρ')² + d²`.
#[derive(Debug, Clone, Copy)]
struct Profile {
    sum: f64,
    prod4: f64,
    n: Dimension,
    a0: f64,
    params: HypParams,
}

impl Profile {
    fn new(rho: f64, rho_field: f64, n: Dimension) -> Self {
        Profile {
            sum: rho + rho_field,
            prod4: 4.0 * rho * rho_field,
            n,
            a0: a0(n),
            params: HypParams::averaged(n.get()),
        }
    }

    fn eval(&self, d: f64) -> Result<f64> {
        let s = self.sum * self.sum + d * d;
        if s == 0.0 {
            return Err(Error::Pole { gauge: 0.0 });
        }
        let x = self.prod4 / s;
        if !(x < 1.0 - POLE_CUTOFF) {
            return Err(Error::PoleOrbit { arg: x });
        }
        Ok(self.a0 * s.powf(-self.n.half()) * hyp2f1(self.params, x)?)
    }
}

/// `H(s)`: the averaged kernel with pole `[z, s]` evaluated at `ξ = [z', t']`.
pub fn strip_kernel(s: f64, eta: &GroupPoint, xi: &GroupPoint, n: Dimension) -> Result<f64> {
    check_dim(eta, n)?;
    check_dim(xi, n)?;
    Profile::new(eta.abs_z_sq(), xi.abs_z_sq(), n).eval(xi.t() - s)
}

/// Reduced-coordinate pieces of one evaluation.
#[derive(Debug, Clone, Copy)]
struct StripPoint {
    profile: Profile,
    t: f64,
    tf: f64,
}

impl StripPoint {
    fn new(eta: &GroupPoint, xi: &GroupPoint, n: Dimension) -> Result<Self> {
        check_dim(eta, n)?;
        check_dim(xi, n)?;
        Ok(StripPoint {
            profile: Profile::new(eta.abs_z_sq(), xi.abs_z_sq(), n),
            t: eta.t(),
            tf: xi.t(),
        })
    }

    fn h(&self, s: f64) -> Result<f64> {
        self.profile.eval(self.tf - s)
    }

    fn centre(&self) -> Result<f64> {
        Ok(self.h(self.t)? - self.h(-self.t)?)
    }

    /// `[H(2m+t) - H(-2m-t)]`
    fn bracket_plus(&self, m: f64) -> Result<f64> {
        Ok(self.h(2.0 * m + self.t)? - self.h(-2.0 * m - self.t)?)
    }

    /// `[H(-2m+t) - H(2m-t)]`
    fn bracket_minus(&self, m: f64) -> Result<f64> {
        Ok(self.h(-2.0 * m + self.t)? - self.h(2.0 * m - self.t)?)
    }

    fn group(&self, m: usize) -> Result<f64> {
        let mf = m as f64;
        Ok(self.bracket_plus(mf)? + self.bracket_minus(mf)?)
    }

    fn partial_sum(&self, groups: usize) -> Result<f64> {
        let mut acc = KahanSum::new();
        acc.add(self.centre()?);
        for m in 1..=groups {
            acc.add(self.group(m)?);
        }
        Ok(acc.value())
    }

    fn tail_bound(&self, m0: usize) -> Result<f64> {
        if m0 < 2 {
            return Err(Error::InvalidArgument(
                "strip tail bound needs m0 >= 2".into(),
            ));
        }
        let n = self.profile.n;
        let nf = n.as_f64();
        let c = self.t.abs() + self.tf.abs();
        let v0 = 2.0 * m0 as f64 - c;
        if !(v0 > 0.0) {
            return Err(Error::Domain(format!(
                "strip tail bound needs 2·m0 > |t| + |t'|, got m0 = {m0}"
            )));
        }
        let weight = 4.0 * self.t.abs() * self.tf.abs();
        if weight == 0.0 {
            return Ok(0.0);
        }
        let s0 = self.profile.sum * self.profile.sum + v0 * v0;
        let x0 = self.profile.prod4 / s0;
        if !(x0 < 1.0 - POLE_CUTOFF) {
            return Err(Error::PoleOrbit { arg: x0 });
        }
        // |φ''(v)| ≤ a_0 v^{-n-2} [n F(n/2+1, n/2; n; x) + n(n+2) F(n/2+2, n/2; n; x)]
        let k = nf * hyp2f1(HypParams::raised(n.get()), x0)?
            + nf * (nf + 2.0) * hyp2f1(HypParams::raised2(n.get()), x0)?;
        let sum = v0.powf(-nf - 2.0) + v0.powf(-nf - 1.0) / (2.0 * (nf + 1.0));
        Ok(weight * self.profile.a0 * k * sum)
    }
}

/// Centre term plus the first `groups` paired groups, without domain checks.
pub fn strip_partial_sum(
    eta: &GroupPoint,
    xi: &GroupPoint,
    n: Dimension,
    groups: usize,
) -> Result<f64> {
    StripPoint::new(eta, xi, n)?.partial_sum(groups)
}

/// Upper bound on `|Σ_{m ≥ m0} group_m|`.
///
/// Group `m` is `∫∫ φ''` over a `2|t| × 2|t'|` box whose nearest point is at
/// height offset `2m - |t| - |t'|`; `|φ''|` is bounded by termwise
/// differentiation of the hypergeometric series and decreases in the offset.
pub fn strip_tail_bound(
    m0: usize,
    eta: &GroupPoint,
    xi: &GroupPoint,
    dom: &StripDomain,
) -> Result<f64> {
    StripPoint::new(eta, xi, dom.n)?.tail_bound(m0)
}

fn groups_for(sp: &StripPoint, eps: f64) -> Result<(usize, f64)> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eps must be positive, got {eps}"
        )));
    }
    // omitted groups start at m0 = groups + 1 >= 2; the bound is monotone in m0
    let ok = |g: usize| -> Result<Option<f64>> {
        let b = sp.tail_bound(g + 1)?;
        Ok((b < eps).then_some(b))
    };
    if let Some(b) = ok(1)? {
        return Ok((1, b));
    }
    let mut hi = 2;
    while ok(hi)?.is_none() {
        hi *= 2;
        if hi > MAX_GROUPS {
            return Err(Error::NonConvergence { terms: hi });
        }
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid)?.is_some() {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((hi, sp.tail_bound(hi + 1)?))
}

/// Green's function `G'(η, ξ)` of the strip, truncated when the certified
/// tail bound drops below `eps`.
pub fn green_strip(
    eta: &GroupPoint,
    xi: &GroupPoint,
    dom: &StripDomain,
    eps: f64,
) -> Result<SeriesEval> {
    if !dom.contains(eta) {
        return Err(Error::Domain(format!(
            "pole height {} outside (0, 1)",
            eta.t()
        )));
    }
    if !dom.contains_closure(xi) {
        return Err(Error::Domain(format!(
            "field height {} outside [0, 1]",
            xi.t()
        )));
    }
    let sp = StripPoint::new(eta, xi, dom.n)?;
    let (groups, tail) = groups_for(&sp, eps)?;
    Ok(SeriesEval {
        value: sp.partial_sum(groups)?,
        terms_used: groups + 1,
        tail_bound: tail,
    })
}

/// `G'(η, ·)` with a fixed number of groups, for finite differences.
pub fn green_strip_handle(
    eta: &GroupPoint,
    dom: &StripDomain,
    groups: usize,
) -> Result<CircularFunction> {
    check_dim(eta, dom.n)?;
    let n = dom.n;
    let (rho, t) = (eta.abs_z_sq(), eta.t());
    Ok(CircularFunction::radial(move |rho_f, tf| {
        StripPoint {
            profile: Profile::new(rho, rho_f, n),
            t,
            tf,
        }
        .partial_sum(groups)
    }))
}

/// The bracket `[H(2m+t) - H(-2m-t)]`, the paired term whose size decays like `m^{-(n+1)}`.
pub fn paired_term(m: usize, eta: &GroupPoint, xi: &GroupPoint, n: Dimension) -> Result<f64> {
    StripPoint::new(eta, xi, n)?.bracket_plus(m as f64)
}

/// Cumulative sums `Σ_{m=0}^{M} H(2m+t)` for `M = 0..m_max`: one of the four
/// one-sided series, summed without pairing.
pub fn unpaired_partial_sums(
    eta: &GroupPoint,
    xi: &GroupPoint,
    n: Dimension,
    m_max: usize,
) -> Result<Vec<f64>> {
    let sp = StripPoint::new(eta, xi, n)?;
    let mut acc = KahanSum::new();
    let mut out = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        acc.add(sp.h(2.0 * m as f64 + sp.t)?);
        out.push(acc.value());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::QuadratureConfig;
    use crate::fundamental::{circular_average, g_pole_handle};

    fn dim(n: usize) -> Dimension {
        Dimension::new(n).unwrap()
    }

    fn pt(z: (f64, f64), t: f64) -> GroupPoint {
        GroupPoint::new(vec![z], t).unwrap()
    }

    #[test]
    fn kernel_with_field_on_axis() {
        let n = dim(1);
        let eta = pt((0.3, 0.4), 0.5);
        let xi = pt((0.0, 0.0), 0.2);
        let s = 0.9;
        let exact = a0(n) * (0.0625 + (0.2f64 - s).powi(2)).powf(-0.5);
        assert!((strip_kernel(s, &eta, &xi, n).unwrap() - exact).abs() < 1e-15);
        assert!(strip_kernel(0.5, &eta, &eta, n).is_err());
    }

    #[test]
    fn kernel_is_shifted_circular_average() {
        let n = dim(1);
        let eta = pt((0.3, 0.4), 0.5);
        let xi = pt((-0.2, 0.6), 0.3);
        let s = 2.5;
        let shifted = pt((0.3, 0.4), s);
        let avg = circular_average(
            &g_pole_handle(&shifted, n),
            &xi,
            &QuadratureConfig::default(),
        )
        .unwrap();
        let h = strip_kernel(s, &eta, &xi, n).unwrap();
        assert!(((avg - h) / h).abs() < 1e-12);
        let parts = strip_kernel_parts(s, &eta, &xi).unwrap();
        let ratio = (parts.p.0.powi(2) + parts.p.1.powi(2))
            / (parts.c_shift.0.powi(2) + parts.c_shift.1.powi(2));
        assert!(ratio <= 1.0);
    }

    #[test]
    fn vanishes_on_both_edges() {
        let dom = StripDomain::new(dim(1));
        let eta = pt((0.3, 0.1), 0.35);
        for tf in [0.0, 1.0] {
            let xi = pt((0.5, -0.2), tf);
            let g = green_strip(&eta, &xi, &dom, 1e-8).unwrap();
            assert!(g.value.abs() <= g.tail_bound + 1e-15, "{g:?}");
        }
        let g = green_strip(&eta, &pt((0.5, -0.2), 0.6), &dom, 1e-8).unwrap();
        assert!(g.value > 0.0);
    }

    #[test]
    fn tail_bound_dominates_long_sum() {
        let n = dim(1);
        let dom = StripDomain::new(n);
        let eta = pt((0.3, 0.1), 0.35);
        let xi = pt((0.5, -0.2), 0.7);
        let short = strip_partial_sum(&eta, &xi, n, 9).unwrap();
        let long = strip_partial_sum(&eta, &xi, n, 10_000).unwrap();
        let b = strip_tail_bound(10, &eta, &xi, &dom).unwrap();
        assert!((long - short).abs() <= b);
        assert!(strip_tail_bound(20, &eta, &xi, &dom).unwrap() < b);
        let dom2 = StripDomain::new(dim(2));
        let eta2 = GroupPoint::new(vec![(0.3, 0.1), (0.0, 0.0)], 0.35).unwrap();
        let xi2 = GroupPoint::new(vec![(0.5, -0.2), (0.0, 0.0)], 0.7).unwrap();
        assert!(strip_tail_bound(10, &eta2, &xi2, &dom2).unwrap() < b);
    }

    #[test]
    fn reflection_is_an_identity_on_truncations() {
        let n = dim(2);
        let eta = GroupPoint::new(vec![(0.3, 0.1), (0.2, 0.0)], 0.35).unwrap();
        let xi = GroupPoint::new(vec![(0.5, -0.2), (0.1, 0.1)], 0.7).unwrap();
        let eta_r = GroupPoint::new(eta.z().to_vec(), -eta.t()).unwrap();
        let xi_r = GroupPoint::new(xi.z().to_vec(), -xi.t()).unwrap();
        for groups in [1, 7, 50] {
            let a = strip_partial_sum(&eta, &xi, n, groups).unwrap();
            let b = strip_partial_sum(&eta_r, &xi_r, n, groups).unwrap();
            assert!((a - b).abs() <= 1e-14 * a.abs());
        }
    }

    #[test]
    fn rejects_pole_outside() {
        let dom = StripDomain::new(dim(1));
        let eta = pt((0.3, 0.1), 1.35);
        assert!(matches!(
            green_strip(&eta, &pt((0.0, 0.1), 0.5), &dom, 1e-8),
            Err(Error::Domain(_))
        ));
    }
}
