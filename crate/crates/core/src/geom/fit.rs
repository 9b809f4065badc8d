use super::{Point2, Segment2, EPS};
use crate::error::{Error, Result};

/// Principal-axis line fit.
///
/// The direction is the leading eigenvector of the point covariance; the
/// endpoints are the extreme projections of the points onto that axis through
/// the centroid. An isotropic covariance resolves to the horizontal axis.
pub fn fit_line_segment(points: &[Point2]) -> Result<Segment2> {
    if points.len() < 2 {
        return Err(Error::DegeneratePoints("need at least two points"));
    }
    let n = points.len() as f64;
    let c = points.iter().fold(Point2::default(), |acc, p| acc + *p) * (1.0 / n);
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in points {
        let d = *p - c;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    if sxx + syy <= EPS {
        return Err(Error::DegeneratePoints("all points coincide"));
    }
    let theta = 0.5 * (2.0 * sxy).atan2(sxx - syy);
    let dir = Point2::new(theta.cos(), theta.sin());
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        let t = (*p - c).dot(dir);
        lo = lo.min(t);
        hi = hi.max(t);
    }
    Ok(Segment2::new(c + dir * lo, c + dir * hi))
}
