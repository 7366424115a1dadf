//! Gauss hypergeometric function `F(a, b; c; x)` on `[0, 1)`.
//!
//! The power series is used for `x <= 0.75`. Above that, when `c = a + b - m`
//! for a non-negative integer `m` (the logarithmic cases, which include both
//! families used by the kernels), the series in `1 - x` from the `z → 1 - z`
//! connection formula is used. Other parameter sets fall back to the power
//! series with a certified geometric tail bound.

use statrs::function::gamma::{digamma, gamma};

use crate::error::{Error, Result};
use crate::sum::KahanSum;

/// Arguments at or above `1 - POLE_CUTOFF` are rejected.
pub const POLE_CUTOFF: f64 = 1e-12;

/// Switch point between the power series and the connection formula.
pub const SERIES_SWITCH: f64 = 0.75;

/// Parameters `(a, b, c)` of `F(a, b; c; x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HypParams {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && c > 0.0) || !(a + b + c).is_finite() {
            return Err(Error::InvalidArgument(format!(
                "hypergeometric parameters must be positive, got ({a}, {b}, {c})"
            )));
        }
        Ok(HypParams { a, b, c })
    }

    /// `(n/2, n/2; n)`, the family of the averaged fundamental solution.
    pub fn averaged(n: usize) -> Self {
        let h = n as f64 / 2.0;
        HypParams {
            a: h,
            b: h,
            c: n as f64,
        }
    }

    /// `(n/2 + 1, n/2; n)`, the family appearing in radial derivatives.
    pub fn raised(n: usize) -> Self {
        let h = n as f64 / 2.0;
        HypParams {
            a: h + 1.0,
            b: h,
            c: n as f64,
        }
    }

    /// `(n/2 + 2, n/2; n)`, used in second-derivative bounds.
    pub fn raised2(n: usize) -> Self {
        let h = n as f64 / 2.0;
        HypParams {
            a: h + 2.0,
            b: h,
            c: n as f64,
        }
    }

    /// `m` when `c = a + b - m` for a non-negative integer `m`.
    fn log_case_order(&self) -> Option<usize> {
        let m = self.a + self.b - self.c;
        let r = m.round();
        if r >= 0.0 && (m - r).abs() < 1e-12 && r <= 16.0 {
            Some(r as usize)
        } else {
            None
        }
    }
}

/// Tolerance and iteration cap for series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypConfig {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for HypConfig {
    fn default() -> Self {
        HypConfig {
            rel_tol: 1e-15,
            max_terms: 100_000,
        }
    }
}

fn check_argument(x: f64) -> Result<()> {
    if !(x >= 0.0) {
        return Err(Error::Domain(format!(
            "hypergeometric argument {x} outside [0, 1)"
        )));
    }
    if x >= 1.0 - POLE_CUTOFF {
        return Err(Error::Domain(format!(
            "hypergeometric argument {x} at or beyond the singular point 1"
        )));
    }
    Ok(())
}

/// `F(a, b; c; x)` with the default configuration.
pub fn hyp2f1(p: HypParams, x: f64) -> Result<f64> {
    hyp2f1_with(p, x, &HypConfig::default())
}

pub fn hyp2f1_with(p: HypParams, x: f64, cfg: &HypConfig) -> Result<f64> {
    check_argument(x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    match p.log_case_order() {
        Some(m) if x > SERIES_SWITCH => connection_log_case(p, m, x, cfg),
        _ => power_series(p, x, cfg),
    }
}

/// Upper bound `q*` on the term ratio `t_{k+1}/t_k` for all `k >= k0`.
fn ratio_bound(p: HypParams, x: f64, k0: usize) -> f64 {
    let k = k0.max(1) as f64;
    let excess =
        (p.a + p.b - p.c - 1.0).abs() / (k + 1.0) + (p.a * p.b - p.c).abs() / (k * (k + 1.0));
    x * (1.0 + excess)
}

fn power_series(p: HypParams, x: f64, cfg: &HypConfig) -> Result<f64> {
    let mut sum = KahanSum::new();
    let mut term = 1.0;
    sum.add(term);
    for k in 0..cfg.max_terms {
        let kf = k as f64;
        term *= (p.a + kf) * (p.b + kf) / ((p.c + kf) * (kf + 1.0)) * x;
        sum.add(term);
        let q = ratio_bound(p, x, k + 1);
        if q < 1.0 {
            let tail = term * q / (1.0 - q);
            if tail <= cfg.rel_tol * sum.value() {
                return Ok(sum.value());
            }
        }
    }
    Err(Error::NonConvergence {
        terms: cfg.max_terms,
    })
}

/// `1/Γ(x)`, zero at the poles of Γ.
fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.round() {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// Connection formula for `F(a, b; a+b-m; x)` in powers of `w = 1 - x`.
fn connection_log_case(p: HypParams, m: usize, x: f64, cfg: &HypConfig) -> Result<f64> {
    let (a, b) = (p.a, p.b);
    let w = 1.0 - x;
    let lw = w.ln();
    let mf = m as f64;
    let g_c = gamma(a + b - mf);

    // finite part: Γ(m)Γ(c)/(Γ(a)Γ(b)) w^{-m} Σ_{k<m} (a-m)_k (b-m)_k / (k! (1-m)_k) w^k
    let mut finite = KahanSum::new();
    if m > 0 {
        let pre = gamma(mf) * g_c / (gamma(a) * gamma(b)) * w.powi(-(m as i32));
        let mut t = 1.0;
        for k in 0..m {
            finite.add(pre * t);
            let kf = k as f64;
            t *= (a - mf + kf) * (b - mf + kf) / ((kf + 1.0) * (1.0 - mf + kf)) * w;
        }
    }

    // logarithmic part
    let sign = if m.is_multiple_of(2) { -1.0 } else { 1.0 };
    let pre = sign * g_c * recip_gamma(a - mf) * recip_gamma(b - mf);
    let mut log_sum = KahanSum::new();
    if pre != 0.0 {
        let euler = 0.577_215_664_901_532_9;
        let mut psi_k1 = -euler; // ψ(k+1)
        let mut psi_km1 = -euler + (1..=m).map(|j| 1.0 / j as f64).sum::<f64>(); // ψ(k+m+1)
        let mut psi_a = digamma(a);
        let mut psi_b = digamma(b);
        let mut coef = 1.0 / (1..=m).map(|j| j as f64).product::<f64>(); // (a)_k(b)_k/(k!(k+m)!) w^k
        let mut converged = false;
        for k in 0..cfg.max_terms {
            let bracket = lw - psi_k1 - psi_km1 + psi_a + psi_b;
            let term = coef * bracket;
            log_sum.add(term);
            let kf = k as f64;
            if k > 2
                && coef * (bracket.abs() + 1.0)
                    < 1e-3 * cfg.rel_tol * log_sum.value().abs().max(1e-300)
            {
                converged = true;
                break;
            }
            psi_k1 += 1.0 / (kf + 1.0);
            psi_km1 += 1.0 / (kf + mf + 1.0);
            psi_a += 1.0 / (a + kf);
            psi_b += 1.0 / (b + kf);
            coef *= (a + kf) * (b + kf) / ((kf + 1.0) * (kf + mf + 1.0)) * w;
        }
        if !converged {
            return Err(Error::NonConvergence {
                terms: cfg.max_terms,
            });
        }
    }
    Ok(finite.value() + pre * log_sum.value())
}

/// Upper bound on `Σ_{k >= k0} |t_k|` for the power series of `F(a, b; c; x)`.
pub fn hyp2f1_tail_bound(p: HypParams, x: f64, k0: usize) -> Result<f64> {
    check_argument(x)?;
    if k0 == 0 {
        return Err(Error::InvalidArgument("k0 must be >= 1".into()));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    // t_{k0}
    let mut term = 1.0;
    for k in 0..k0 {
        let kf = k as f64;
        term *= (p.a + kf) * (p.b + kf) / ((p.c + kf) * (kf + 1.0)) * x;
    }
    // Walk forward until the ratio majorant drops below one.
    let mut head = KahanSum::new();
    let mut k = k0;
    loop {
        let q = ratio_bound(p, x, k);
        if q < 1.0 {
            return Ok(head.value() + term / (1.0 - q));
        }
        head.add(term);
        let kf = k as f64;
        term *= (p.a + kf) * (p.b + kf) / ((p.c + kf) * (kf + 1.0)) * x;
        k += 1;
        if k > k0 + 10_000_000 {
            return Err(Error::NonConvergence { terms: k - k0 });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn zero_argument() {
        for n in 1..5 {
            assert_eq!(hyp2f1(HypParams::averaged(n), 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn log_identity() {
        let p = HypParams::new(1.0, 1.0, 2.0).unwrap();
        for &x in &[0.1f64, 0.5, 0.74, 0.76, 0.9, 0.99, 1.0 - 1e-9] {
            let exact = -(1.0 - x).ln() / x;
            assert!(rel(hyp2f1(p, x).unwrap(), exact) < 1e-13, "x = {x}");
        }
        assert!(rel(hyp2f1(p, 0.5).unwrap(), 2.0 * 2f64.ln()) < 1e-14);
    }

    #[test]
    fn elliptic_value() {
        let v = hyp2f1(HypParams::averaged(1), 0.5).unwrap();
        assert!((v - 1.180_340_599_016_096_2).abs() < 1e-13, "{v}");
    }

    #[test]
    fn closed_forms_across_switch() {
        // F(1,1;1;x) is not a log case (c - a - b = -1 → m = 1): 1/(1-x)
        let p = HypParams::new(1.0, 1.0, 1.0).unwrap();
        // F(2,1;2;x) = 1/(1-x), m = 1
        let q = HypParams::new(2.0, 1.0, 2.0).unwrap();
        // F(3,1;2;x) = (1 - x/2)/(1-x)^2, m = 2
        let r = HypParams::new(3.0, 1.0, 2.0).unwrap();
        for &x in &[0.3, 0.74, 0.8, 0.95, 0.999] {
            assert!(rel(hyp2f1(p, x).unwrap(), 1.0 / (1.0 - x)) < 1e-12);
            assert!(rel(hyp2f1(q, x).unwrap(), 1.0 / (1.0 - x)) < 1e-12);
            let e = (1.0 - 0.5 * x) / (1.0 - x).powi(2);
            assert!(rel(hyp2f1(r, x).unwrap(), e) < 1e-12, "x={x}");
        }
    }

    #[test]
    fn continuity_at_switch() {
        for n in 1..=4 {
            for p in [
                HypParams::averaged(n),
                HypParams::raised(n),
                HypParams::raised2(n),
            ] {
                let lo = hyp2f1(p, SERIES_SWITCH).unwrap();
                let hi = hyp2f1(p, SERIES_SWITCH + 1e-15).unwrap();
                assert!(rel(hi, lo) < 1e-13, "n = {n}, {p:?}: {lo} vs {hi}");
            }
        }
    }

    #[test]
    fn domain_errors() {
        let p = HypParams::averaged(2);
        assert!(matches!(hyp2f1(p, 1.0), Err(Error::Domain(_))));
        assert!(matches!(hyp2f1(p, 1.0 - 1e-13), Err(Error::Domain(_))));
        assert!(matches!(hyp2f1(p, -0.1), Err(Error::Domain(_))));
        assert!(hyp2f1(p, f64::NAN).is_err());
        assert!(HypParams::new(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn iteration_cap() {
        let p = HypParams::new(0.5, 0.7, 0.3).unwrap();
        let cfg = HypConfig {
            rel_tol: 1e-12,
            max_terms: 5,
        };
        assert!(matches!(
            hyp2f1_with(p, 0.7, &cfg),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn tail_bound_properties() {
        let p = HypParams::averaged(3);
        assert_eq!(hyp2f1_tail_bound(p, 0.0, 4).unwrap(), 0.0);
        // true tail at x = 0.5 from index 10
        let mut t = 1.0;
        let mut terms = vec![1.0];
        for k in 0..400 {
            let kf = k as f64;
            t *= (p.a + kf) * (p.b + kf) / ((p.c + kf) * (kf + 1.0)) * 0.5;
            terms.push(t);
        }
        let tail: KahanSum = terms[10..].iter().rev().copied().collect();
        let bound = hyp2f1_tail_bound(p, 0.5, 10).unwrap();
        assert!(bound >= tail.value());
        assert!(bound < 2.0 * tail.value());
        let mut prev = f64::INFINITY;
        for k0 in 1..60 {
            let b = hyp2f1_tail_bound(p, 0.9, k0).unwrap();
            assert!(b < prev);
            prev = b;
        }
        assert!(hyp2f1_tail_bound(p, 0.5, 0).is_err());
        assert!(hyp2f1_tail_bound(p, 1.0, 3).is_err());
    }
}
