//! Heisenberg group algebra.
//!
//! A point `[z, t]` of `H_n` has `z ∈ C^n` (stored as pairs of reals) and
//! `t ∈ R`. The product is `[z,t]·[z',t'] = [z+z', t+t'+2 Im(z·z̄')]`, the
//! gauge is `N(z,t) = (|z|⁴+t²)^{1/4}`.

use std::fmt;

use crate::error::{Error, Result};

/// Points with gauge below this are treated as the identity by the inversions.
pub const POLE_GUARD: f64 = 1e-300;

/// The dimension `n` of `H_n` (complex dimension of the horizontal layer).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dimension(usize);

impl Dimension {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dimension n must be >= 1".into()));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// `n` as a float.
    pub fn as_f64(self) -> f64 {
        self.0 as f64
    }

    /// Half-dimension `n/2`, the hypergeometric parameter of the averaged kernel.
    pub fn half(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A point `[z, t]` of the Heisenberg group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupPoint {
    z: Vec<(f64, f64)>,
    t: f64,
}

impl GroupPoint {
    pub fn new(z: Vec<(f64, f64)>, t: f64) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::InvalidArgument("point must have n >= 1".into()));
        }
        if !t.is_finite() || z.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::NonFinite("group point component".into()));
        }
        Ok(GroupPoint { z, t })
    }

    /// The identity `e = [0, 0]` of `H_n`.
    pub fn identity(n: Dimension) -> Self {
        GroupPoint {
            z: vec![(0.0, 0.0); n.get()],
            t: 0.0,
        }
    }

    /// Builds a point from a flat list `x1, y1, ..., xn, yn, t` (length `2n+1`).
    pub fn from_flat(coords: &[f64]) -> Result<Self> {
        if coords.len() < 3 || coords.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "expected 2n+1 coordinates, got {}",
                coords.len()
            )));
        }
        let (zs, t) = coords.split_at(coords.len() - 1);
        let z = zs.chunks_exact(2).map(|c| (c[0], c[1])).collect();
        GroupPoint::new(z, t[0])
    }

    /// Flat coordinates `x1, y1, ..., xn, yn, t`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.z.len() + 1);
        for &(x, y) in &self.z {
            out.push(x);
            out.push(y);
        }
        out.push(self.t);
        out
    }

    /// A representative of the circular class with `|z|² = rho` and height `t`:
    /// `z = (√rho, 0, ..., 0)`.
    pub fn from_rho_t(n: Dimension, rho: f64, t: f64) -> Result<Self> {
        if !(rho >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "|z|^2 must be >= 0, got {rho}"
            )));
        }
        let mut z = vec![(0.0, 0.0); n.get()];
        z[0].0 = rho.sqrt();
        GroupPoint::new(z, t)
    }

    pub fn dim(&self) -> Dimension {
        Dimension(self.z.len())
    }

    pub fn z(&self) -> &[(f64, f64)] {
        &self.z
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// `|z|²`.
    pub fn abs_z_sq(&self) -> f64 {
        self.z.iter().map(|&(x, y)| x * x + y * y).sum()
    }

    /// `|z|⁴ + t²`, the fourth power of the gauge.
    pub fn gauge4(&self) -> f64 {
        let r2 = self.abs_z_sq();
        r2 * r2 + self.t * self.t
    }

    pub fn is_identity(&self) -> bool {
        self.t == 0.0 && self.z.iter().all(|&(x, y)| x == 0.0 && y == 0.0)
    }

    fn check_same_dim(&self, other: &GroupPoint) -> Result<()> {
        if self.z.len() != other.z.len() {
            return Err(Error::DimensionMismatch {
                expected: self.z.len(),
                got: other.z.len(),
            });
        }
        Ok(())
    }

    /// Group product `self · other`.
    pub fn multiply(&self, other: &GroupPoint) -> Result<GroupPoint> {
        self.check_same_dim(other)?;
        let mut im_dot = 0.0;
        let z = self
            .z
            .iter()
            .zip(&other.z)
            .map(|(&(a, b), &(c, d))| {
                // Im((a+ib)(c-id)) = bc - ad
                im_dot += b * c - a * d;
                (a + c, b + d)
            })
            .collect();
        Ok(GroupPoint {
            z,
            t: self.t + other.t + 2.0 * im_dot,
        })
    }

    /// Group inverse `[-z, -t]`.
    pub fn invert(&self) -> GroupPoint {
        GroupPoint {
            z: self.z.iter().map(|&(x, y)| (-x, -y)).collect(),
            t: -self.t,
        }
    }

    /// The gauge `N(z,t) = (|z|⁴+t²)^{1/4}`.
    pub fn gauge(&self) -> f64 {
        let r2 = self.abs_z_sq();
        r2.hypot(self.t).sqrt()
    }

    /// Anisotropic dilation `[rz, r²t]`.
    pub fn dilate(&self, r: f64) -> Result<GroupPoint> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "dilation factor must be > 0, got {r}"
            )));
        }
        Ok(GroupPoint {
            z: self.z.iter().map(|&(x, y)| (r * x, r * y)).collect(),
            t: r * r * self.t,
        })
    }

    /// Rotation `[e^{iθ} z, t]` of the horizontal component.
    pub fn rotate(&self, theta: f64) -> GroupPoint {
        let (s, c) = theta.sin_cos();
        GroupPoint {
            z: self
                .z
                .iter()
                .map(|&(x, y)| (c * x - s * y, s * x + c * y))
                .collect(),
            t: self.t,
        }
    }

    /// Sphere inversion `h[z,t] = [-z/(|z|²-it), -t/(|z|⁴+t²)]`.
    pub fn inversion_h(&self) -> Result<GroupPoint> {
        self.scaled_inversion(1.0)
    }

    /// Inversion in the gauge sphere of radius `r`:
    /// `h_R[z,t] = [-R²z/(|z|²-it), -R⁴t/(|z|⁴+t²)]`.
    pub fn inversion_hr(&self, r: f64) -> Result<GroupPoint> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "radius must be > 0, got {r}"
            )));
        }
        self.scaled_inversion(r * r)
    }

    fn scaled_inversion(&self, r2: f64) -> Result<GroupPoint> {
        let gauge = self.gauge();
        if gauge < POLE_GUARD {
            return Err(Error::Pole { gauge });
        }
        let rho = self.abs_z_sq();
        let g4 = rho * rho + self.t * self.t;
        // 1/(rho - i t) = (rho + i t)/g4
        let (wr, wi) = (rho / g4, self.t / g4);
        let z = self
            .z
            .iter()
            .map(|&(x, y)| (-r2 * (x * wr - y * wi), -r2 * (x * wi + y * wr)))
            .collect();
        Ok(GroupPoint {
            z,
            t: -r2 * r2 * self.t / g4,
        })
    }
}

impl fmt::Display for GroupPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (j, &(x, y)) in self.z.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}{y:+}i")?;
        }
        write!(f, "; {}]", self.t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p1(x: f64, y: f64, t: f64) -> GroupPoint {
        GroupPoint::new(vec![(x, y)], t).unwrap()
    }

    #[test]
    fn product_example() {
        let p = p1(1.0, 0.0, 0.0).multiply(&p1(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(p, p1(1.0, 1.0, -2.0));
    }

    #[test]
    fn identity_and_inverse() {
        let p = GroupPoint::new(vec![(0.3, -1.2), (2.0, 0.5)], 0.7).unwrap();
        let e = GroupPoint::identity(p.dim());
        assert_eq!(e.multiply(&p).unwrap(), p);
        assert!(p.multiply(&p.invert()).unwrap().is_identity());
        assert!(p.invert().multiply(&p).unwrap().is_identity());
        assert_eq!(p.invert().invert(), p);
        assert!(e.invert().is_identity());
    }

    #[test]
    fn dimension_mismatch() {
        let p = p1(1.0, 0.0, 0.0);
        let q = GroupPoint::new(vec![(1.0, 0.0), (0.0, 0.0)], 0.0).unwrap();
        assert!(matches!(
            p.multiply(&q),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(Dimension::new(0).is_err());
    }

    #[test]
    fn gauge_values() {
        assert_eq!(
            GroupPoint::identity(Dimension::new(2).unwrap()).gauge(),
            0.0
        );
        assert!((p1(0.6, 0.8, 0.0).gauge() - 1.0).abs() < 1e-15);
        assert!((p1(1.0, 0.0, 1.0).gauge() - 2f64.powf(0.25)).abs() < 1e-15);
        let g = p1(1.0, 0.0, 1.0).dilate(2.0).unwrap().gauge();
        assert!((g - 2.0 * 2f64.powf(0.25)).abs() < 1e-14);
    }

    #[test]
    fn dilation() {
        let p = p1(0.4, -0.3, 1.1);
        assert_eq!(p.dilate(1.0).unwrap(), p);
        let back = p.dilate(3.0).unwrap().dilate(1.0 / 3.0).unwrap();
        for (a, b) in back.to_flat().iter().zip(p.to_flat()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!(p.dilate(0.0).is_err());
        assert!(p.dilate(-1.0).is_err());
    }

    #[test]
    fn inversion_examples() {
        let q = p1(1.0, 0.0, 0.0).inversion_h().unwrap();
        assert_eq!(q, p1(-1.0, 0.0, 0.0));
        let g = p1(1.0, 0.0, 1.0).inversion_h().unwrap().gauge();
        assert!((g - 2f64.powf(-0.25)).abs() < 1e-15);
        let g = p1(1.0, 0.0, 1.0).inversion_hr(0.5).unwrap().gauge();
        assert!((g - 0.25 * 2f64.powf(-0.25)).abs() < 1e-15);
        let p = p1(0.2, 0.9, -0.4);
        assert_eq!(p.inversion_hr(1.0).unwrap(), p.inversion_h().unwrap());
    }

    #[test]
    fn inversion_rejects_identity() {
        let e = GroupPoint::identity(Dimension::new(1).unwrap());
        assert!(matches!(e.inversion_h(), Err(Error::Pole { .. })));
        assert!(matches!(e.inversion_hr(0.5), Err(Error::Pole { .. })));
    }

    #[test]
    fn h_r_is_dilated_h() {
        let p = GroupPoint::new(vec![(0.3, 0.1), (-0.5, 0.2)], 0.35).unwrap();
        let r = 0.7;
        let a = p.inversion_hr(r).unwrap();
        let b = p.inversion_h().unwrap().dilate(r * r).unwrap();
        for (x, y) in a.to_flat().iter().zip(b.to_flat()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn flat_round_trip_and_errors() {
        let p = GroupPoint::from_flat(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(p.dim().get(), 2);
        assert_eq!(p.t(), 5.0);
        assert_eq!(p.to_flat(), vec![1.0, 2.0, 3.0, 4.0, 5.0]);
        assert!(GroupPoint::from_flat(&[1.0, 2.0]).is_err());
        assert!(GroupPoint::from_flat(&[f64::NAN, 0.0, 0.0]).is_err());
    }
}
