//! Parsers for the textual point, grid and boundary-data arguments.
//!
//! These are the fuzzed entry points: they must reject malformed input with a
//! [`ParseError`] and never panic or allocate in proportion to a number read
//! from the input.

use heisenberg_green::GroupPoint;
use thiserror::Error;

/// Largest number of nodes a grid may describe.
pub const MAX_GRID_POINTS: usize = 4_000_000;

/// Largest `n` accepted in a point literal.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("`{0}` is not a number")]
    BadNumber(String),
    #[error("`{0}` is not finite")]
    NonFinite(String),
    #[error("a point needs 2n+1 >= 3 comma-separated coordinates `zx,zy,...,t`, got {0}")]
    Arity(usize),
    #[error("point dimension n = {0} exceeds the limit {MAX_DIM}")]
    TooLarge(usize),
    #[error("bad grid: {0}")]
    Grid(String),
    #[error("bad data spec `{0}`: expected a number, `gauge4`, `l0-gauge4` or `gbar:<point>`")]
    Data(String),
}

fn number(token: &str) -> Result<f64, ParseError> {
    let token = token.trim();
    let v: f64 = token
        .parse()
        .map_err(|_| ParseError::BadNumber(token.to_owned()))?;
    if !v.is_finite() {
        return Err(ParseError::NonFinite(token.to_owned()));
    }
    Ok(v)
}

/// `zx_1,zy_1,...,zx_n,zy_n,t` → a point of `H_n`.
pub fn parse_point(s: &str) -> Result<GroupPoint, ParseError> {
    if s.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let count = s.split(',').count();
    if count < 3 || count.is_multiple_of(2) {
        return Err(ParseError::Arity(count));
    }
    if (count - 1) / 2 > MAX_DIM {
        return Err(ParseError::TooLarge((count - 1) / 2));
    }
    let coords = s.split(',').map(number).collect::<Result<Vec<_>, _>>()?;
    GroupPoint::from_flat(&coords).map_err(|_| ParseError::Arity(count))
}

/// One grid axis `min:max:steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    fn parse(s: &str) -> Result<Self, ParseError> {
        let parts: Vec<&str> = s.split(':').collect();
        let [min, max, steps] = parts[..] else {
            return Err(ParseError::Grid(format!("axis `{s}` is not min:max:steps")));
        };
        let (min, max) = (number(min)?, number(max)?);
        let steps: usize = steps.trim().parse().map_err(|_| {
            ParseError::Grid(format!(
                "step count `{}` is not a positive integer",
                steps.trim()
            ))
        })?;
        if steps == 0 {
            return Err(ParseError::Grid("step count must be at least 1".into()));
        }
        if max < min {
            return Err(ParseError::Grid(format!(
                "axis maximum {max} below minimum {min}"
            )));
        }
        if steps == 1 && max != min {
            return Err(ParseError::Grid(
                "a single-step axis needs min = max".into(),
            ));
        }
        Ok(Axis { min, max, steps })
    }

    /// The `steps` equally spaced values from `min` to `max`.
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        let span = self.max - self.min;
        let last = self.steps.saturating_sub(1).max(1) as f64;
        (0..self.steps).map(move |i| {
            if i + 1 == self.steps {
                self.max
            } else {
                self.min + span * i as f64 / last
            }
        })
    }
}

/// `rmin:rmax:steps,tmin:tmax:steps`: a tensor grid in `(|z|, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub r: Axis,
    pub t: Axis,
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.r.steps * self.t.steps
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid nodes in row-major order (`r` outer, `t` inner).
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        self.r
            .values()
            .flat_map(|r| self.t.values().map(move |t| (r, t)))
            .collect()
    }
}

pub fn parse_grid(s: &str) -> Result<GridSpec, ParseError> {
    if s.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut axes = s.split(',');
    let (Some(r), Some(t), None) = (axes.next(), axes.next(), axes.next()) else {
        return Err(ParseError::Grid(
            "expected two axes `rmin:rmax:steps,tmin:tmax:steps`".into(),
        ));
    };
    let (r, t) = (Axis::parse(r)?, Axis::parse(t)?);
    if r.min < 0.0 {
        return Err(ParseError::Grid("|z| axis must be non-negative".into()));
    }
    match r.steps.checked_mul(t.steps) {
        Some(total) if total <= MAX_GRID_POINTS => Ok(GridSpec { r, t }),
        _ => Err(ParseError::Grid(format!(
            "more than {MAX_GRID_POINTS} grid points"
        ))),
    }
}

/// Built-in circular data families for boundary values and source terms.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSpec {
    Constant(f64),
    /// `N⁴ = |z|⁴ + t²`.
    Gauge4,
    /// `L_0 N⁴ = -(2n + 4)|z|²`.
    L0Gauge4,
    /// `ḡ` with pole at the given point.
    GBar(GroupPoint),
}

pub fn parse_data(s: &str) -> Result<DataSpec, ParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseError::Empty);
    }
    match s {
        "gauge4" => return Ok(DataSpec::Gauge4),
        "l0-gauge4" => return Ok(DataSpec::L0Gauge4),
        _ => {}
    }
    if let Some(p) = s.strip_prefix("gbar:") {
        return Ok(DataSpec::GBar(parse_point(p)?));
    }
    match number(s) {
        Ok(c) => Ok(DataSpec::Constant(c)),
        Err(ParseError::NonFinite(t)) => Err(ParseError::NonFinite(t)),
        Err(_) => Err(ParseError::Data(s.to_owned())),
    }
}
