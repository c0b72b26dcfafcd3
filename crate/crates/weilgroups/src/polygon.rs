//! Newton polygons of polynomials and Hodge polygons of finite abelian
//! `l`-groups, with exact comparison.
//!
//! Both polygons are stored as vertex chains with integer abscissae and
//! exact rational ordinates. The classification criterion reduces to "does
//! one polygon lie on or above the other", so that comparison is the heart
//! of this module; everything is piecewise linear between integer abscissae,
//! which makes the integer sample points a complete check.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::json;

use crate::arith::{is_prime_u64, ord_prime};
use crate::error::{Error, Result};
use crate::intpoly::IntPoly;

/// Convex vertex chain: abscissae strictly increase starting from 0, slopes
/// strictly increase left to right, ordinates are exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvexPolygon {
    vertices: Vec<(i64, BigRational)>,
}

impl ConvexPolygon {
    /// Validate and normalize a vertex chain; collinear interior vertices are
    /// merged away.
    pub fn new(vertices: Vec<(i64, BigRational)>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::PolyParse("polygon needs at least one vertex".into()));
        }
        if vertices[0].0 != 0 {
            return Err(Error::PolyParse("polygon must start at abscissa 0".into()));
        }
        for w in vertices.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::PolyParse("abscissae must strictly increase".into()));
            }
        }
        let merged = merge_collinear(vertices);
        for w in merged.windows(3) {
            let s1 = slope(&w[0], &w[1]);
            let s2 = slope(&w[1], &w[2]);
            if s1 >= s2 {
                return Err(Error::PolyParse("slopes must strictly increase".into()));
            }
        }
        Ok(ConvexPolygon { vertices: merged })
    }

    pub fn vertices(&self) -> &[(i64, BigRational)] {
        &self.vertices
    }

    /// Rightmost abscissa.
    pub fn span(&self) -> i64 {
        self.vertices.last().unwrap().0
    }

    pub fn left_endpoint(&self) -> &(i64, BigRational) {
        &self.vertices[0]
    }

    pub fn right_endpoint(&self) -> &(i64, BigRational) {
        self.vertices.last().unwrap()
    }

    /// Height at `x`, `None` outside `[0, span]`.
    pub fn eval(&self, x: &BigRational) -> Option<BigRational> {
        let first = &self.vertices[0];
        let last = self.vertices.last().unwrap();
        if *x < BigRational::from_integer(BigInt::from(first.0))
            || *x > BigRational::from_integer(BigInt::from(last.0))
        {
            return None;
        }
        for w in self.vertices.windows(2) {
            let (x0, y0) = (&w[0].0, &w[0].1);
            let (x1, y1) = (&w[1].0, &w[1].1);
            let x1r = BigRational::from_integer(BigInt::from(*x1));
            if *x <= x1r {
                let x0r = BigRational::from_integer(BigInt::from(*x0));
                let t = (x - &x0r) / (&x1r - &x0r);
                return Some(y0 + (y1 - y0) * t);
            }
        }
        Some(last.1.clone())
    }

    pub fn eval_int(&self, x: i64) -> Option<BigRational> {
        self.eval(&BigRational::from_integer(BigInt::from(x)))
    }

    /// Slope/width runs, left to right. Widths are positive, slopes strictly
    /// increase.
    pub fn segments(&self) -> Vec<(BigRational, i64)> {
        self.vertices
            .windows(2)
            .map(|w| (slope(&w[0], &w[1]), w[1].0 - w[0].0))
            .collect()
    }

    /// Rebuild a polygon from its left endpoint and slope/width runs sorted
    /// ascending by slope.
    pub fn from_segments(
        start: (i64, BigRational),
        segments: &[(BigRational, i64)],
    ) -> Result<Self> {
        let mut vertices = vec![start];
        for (s, w) in segments {
            let (x, y) = vertices.last().unwrap().clone();
            let dx = BigRational::from_integer(BigInt::from(*w));
            vertices.push((x + w, y + s * dx));
        }
        ConvexPolygon::new(vertices)
    }

    /// `{"vertices": [[x, "num/den"], ...]}` with integral ordinates printed
    /// without the denominator.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "vertices": self
                .vertices
                .iter()
                .map(|(x, y)| json!([x, rational_to_string(y)]))
                .collect::<Vec<_>>(),
        })
    }
}

fn slope(a: &(i64, BigRational), b: &(i64, BigRational)) -> BigRational {
    (&b.1 - &a.1) / BigRational::from_integer(BigInt::from(b.0 - a.0))
}

fn merge_collinear(vertices: Vec<(i64, BigRational)>) -> Vec<(i64, BigRational)> {
    let mut out: Vec<(i64, BigRational)> = Vec::with_capacity(vertices.len());
    for v in vertices {
        while out.len() >= 2 {
            let a = &out[out.len() - 2];
            let b = &out[out.len() - 1];
            if slope(a, b) == slope(a, &v) {
                out.pop();
            } else {
                break;
            }
        }
        out.push(v);
    }
    out
}

/// Canonical string for an exact rational: `3`, `-2`, `3/2`.
pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rational_from_str(s: &str) -> Result<BigRational> {
    let parse_int =
        |t: &str| BigInt::parse_bytes(t.trim().as_bytes(), 10).ok_or_else(|| Error::RationalParse(s.into()));
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((n, d)) => {
            let den = parse_int(d)?;
            if den.is_zero() {
                return Err(Error::RationalParse(s.into()));
            }
            Ok(BigRational::new(parse_int(n)?, den))
        }
    }
}

/// Newton polygon of `q` at the prime `ell`: the lower convex hull of the
/// points `(i, ord_ell(q_i))` over the nonzero coefficients.
///
/// Zero coefficients contribute no point. The constant term must be nonzero
/// so the hull starts at abscissa 0.
///
/// ```
/// use weilgroups::{newton_polygon, IntPoly};
/// let q: IntPoly = "t^3 - 4*t^2 + 8*t - 32".parse().unwrap();
/// let np = newton_polygon(&q, 2).unwrap();
/// let xs: Vec<i64> = np.vertices().iter().map(|v| v.0).collect();
/// assert_eq!(xs, vec![0, 1, 3]);
/// ```
pub fn newton_polygon(q: &IntPoly, ell: u64) -> Result<ConvexPolygon> {
    if !is_prime_u64(ell) {
        return Err(Error::NotPrime(ell));
    }
    if q.coeff(0).is_zero() {
        return Err(Error::ConstantTermVanishes);
    }
    let degree = q.degree().expect("nonzero constant term");
    let mut points: Vec<(i64, BigRational)> = Vec::new();
    for i in 0..=degree {
        let c = q.coeff(i);
        if !c.is_zero() {
            let v = ord_prime(&c, ell);
            points.push((i as i64, BigRational::from_integer(BigInt::from(v))));
        }
    }
    let hull = lower_hull(points);
    ConvexPolygon::new(hull)
}

fn lower_hull(points: Vec<(i64, BigRational)>) -> Vec<(i64, BigRational)> {
    let mut hull: Vec<(i64, BigRational)> = Vec::with_capacity(points.len());
    for p in points {
        while hull.len() >= 2 {
            let a = &hull[hull.len() - 2];
            let b = &hull[hull.len() - 1];
            // pop b when it lies on or above the segment a -> p
            let lhs = (&b.1 - &a.1) * BigRational::from_integer(BigInt::from(p.0 - a.0));
            let rhs = (&p.1 - &a.1) * BigRational::from_integer(BigInt::from(b.0 - a.0));
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// Hodge polygon of the abelian `ell`-group with cyclic exponents `parts`
/// (ascending), padded with zeros to exactly `r` summands.
///
/// Vertices are `(i, m_1 + ... + m_(r-i))`: the left endpoint is the total
/// exponent, the right endpoint is `(r, 0)`, and the slopes read
/// `-m_r, ..., -m_1`.
pub fn hodge_polygon(parts: &[u32], r: usize) -> Result<ConvexPolygon> {
    let nonzero = parts.iter().filter(|&&m| m > 0).count();
    if nonzero > r {
        return Err(Error::TooManyParts { r, parts: nonzero });
    }
    let mut padded: Vec<u32> = parts.iter().copied().filter(|&m| m > 0).collect();
    padded.sort_unstable();
    let mut m = vec![0u32; r - padded.len()];
    m.extend(padded);

    let mut prefix: Vec<u64> = vec![0];
    for &part in &m {
        prefix.push(prefix.last().unwrap() + part as u64);
    }
    let vertices = (0..=r)
        .map(|i| {
            (
                i as i64,
                BigRational::from_integer(BigInt::from(prefix[r - i])),
            )
        })
        .collect();
    ConvexPolygon::new(vertices)
}

/// Does `upper` lie on or above `lower` at every abscissa of their common
/// span? Errors when the spans differ.
pub fn lies_on_or_above(upper: &ConvexPolygon, lower: &ConvexPolygon) -> Result<bool> {
    Ok(first_violation(upper, lower)?.is_none())
}

/// First integer abscissa where `upper` dips strictly below `lower`, with
/// both heights; `None` when `upper` lies on or above everywhere.
///
/// Vertices sit at integer abscissae, so both chains are linear between
/// consecutive integers and integer sample points decide the comparison.
pub fn first_violation(
    upper: &ConvexPolygon,
    lower: &ConvexPolygon,
) -> Result<Option<(i64, BigRational, BigRational)>> {
    if upper.span() != lower.span() {
        return Err(Error::SpanMismatch {
            left: upper.span(),
            right: lower.span(),
        });
    }
    for x in 0..=upper.span() {
        let u = upper.eval_int(x).expect("x within span");
        let l = lower.eval_int(x).expect("x within span");
        if u < l {
            return Ok(Some((x, u, l)));
        }
    }
    Ok(None)
}

/// Equal left and right endpoints.
pub fn endpoints_match(a: &ConvexPolygon, b: &ConvexPolygon) -> bool {
    a.left_endpoint() == b.left_endpoint() && a.right_endpoint() == b.right_endpoint()
}
