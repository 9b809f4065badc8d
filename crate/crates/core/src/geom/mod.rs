//! Planar geometry kernel.
//!
//! Points live in image coordinates: `x` grows to the right and `y` grows
//! downwards, and integer coordinates coincide with pixel centres. Angles are
//! reported in degrees as seen on screen: 0° points along +x and angles grow
//! counter-clockwise, which means the `y` component is negated when an angle
//! is computed from a displacement.

mod fit;
mod mask;
mod raster;

pub use fit::fit_line_segment;
pub use mask::{outward_normal, trace_boundary, BitMask};
pub use raster::{fill_polygon, rasterize_segment, Pixel};

use std::ops::{Add, Mul, Sub};

/// Comparisons at the 256-px working scale use this absolute tolerance.
pub const EPS: f64 = 1e-9;

/// Number of angular bins around a corner.
pub const NUM_BINS: usize = 15;
/// Width of one angular bin in degrees.
pub const BIN_WIDTH_DEG: f64 = 360.0 / NUM_BINS as f64;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn approx_eq(self, o: Point2) -> bool {
        (self.x - o.x).abs() <= EPS && (self.y - o.y).abs() <= EPS
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

/// Pixel dimensions of the working image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Canvas {
    pub width: usize,
    pub height: usize,
}

impl Canvas {
    pub const fn new(width: usize, height: usize) -> Self {
        Self { width, height }
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= 0.0 && p.y >= 0.0 && p.x < self.width as f64 && p.y < self.height as f64
    }
}

impl Default for Canvas {
    fn default() -> Self {
        Canvas::new(256, 256)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment2 {
    pub a: Point2,
    pub b: Point2,
}

impl Segment2 {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn midpoint(&self) -> Point2 {
        (self.a + self.b) * 0.5
    }

    pub fn reversed(&self) -> Segment2 {
        Segment2::new(self.b, self.a)
    }

    /// Euclidean distance from `p` to the closest point of the segment.
    pub fn distance_to(&self, p: Point2) -> f64 {
        let d = self.b - self.a;
        let len2 = d.dot(d);
        if len2 <= 0.0 {
            return p.dist(self.a);
        }
        let t = ((p - self.a).dot(d) / len2).clamp(0.0, 1.0);
        p.dist(self.a + d * t)
    }
}

/// A thick probe cast from `origin`: the closed rectangle of the given
/// `length` along `direction` and `width` across it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Point2,
    pub direction: Point2,
    pub length: f64,
    pub width: f64,
}

impl Ray {
    /// Builds a ray, normalising `direction`.
    pub fn new(origin: Point2, direction: Point2, length: f64, width: f64) -> Self {
        let n = direction.norm();
        debug_assert!(n > 0.0 && length > 0.0 && width > 0.0);
        Self { origin, direction: direction * (1.0 / n), length, width }
    }

    /// The ray's centre line as a segment.
    pub fn axis(&self) -> Segment2 {
        Segment2::new(self.origin, self.origin + self.direction * self.length)
    }
}

/// Sign of the orientation of `c` relative to the directed line `a -> b`,
/// with a tolerance relative to the lengths involved.
fn orient(a: Point2, b: Point2, c: Point2) -> i8 {
    let u = b - a;
    let v = c - a;
    let cr = u.cross(v);
    let scale = (u.norm() * v.norm()).max(1.0);
    if cr.abs() <= EPS * scale {
        0
    } else if cr > 0.0 {
        1
    } else {
        -1
    }
}

/// Whether `p`, known to be collinear with `s`, lies within its extent.
fn within_extent(s: &Segment2, p: Point2) -> bool {
    let d = s.b - s.a;
    let t = (p - s.a).dot(d);
    t >= -EPS && t <= d.dot(d) + EPS
}

/// True when the two segments share any point other than a common endpoint.
///
/// Collinear segments overlapping along more than one point intersect; two
/// segments meeting only at a shared endpoint do not.
pub fn segments_properly_intersect(s1: &Segment2, s2: &Segment2) -> bool {
    let o1 = orient(s1.a, s1.b, s2.a);
    let o2 = orient(s1.a, s1.b, s2.b);
    let o3 = orient(s2.a, s2.b, s1.a);
    let o4 = orient(s2.a, s2.b, s1.b);

    if o1 == 0 && o2 == 0 {
        // Collinear: compare the projected extents along s1.
        let d = s1.b - s1.a;
        let len = d.norm();
        if len <= EPS {
            return false;
        }
        let dir = d * (1.0 / len);
        let p = |q: Point2| (q - s1.a).dot(dir);
        let (lo2, hi2) = {
            let (u, v) = (p(s2.a), p(s2.b));
            (u.min(v), u.max(v))
        };
        let overlap = len.min(hi2) - 0f64.max(lo2);
        return overlap > EPS;
    }

    let shared = s1.a.approx_eq(s2.a) || s1.a.approx_eq(s2.b) || s1.b.approx_eq(s2.a) || s1.b.approx_eq(s2.b);
    if shared {
        // Non-collinear segments with a common endpoint meet only there.
        return false;
    }

    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && within_extent(s1, s2.a))
        || (o2 == 0 && within_extent(s1, s2.b))
        || (o3 == 0 && within_extent(s2, s1.a))
        || (o4 == 0 && within_extent(s2, s1.b))
}

/// Closed-segment intersection test (touching counts).
pub fn segments_touch(s1: &Segment2, s2: &Segment2) -> bool {
    let o1 = orient(s1.a, s1.b, s2.a);
    let o2 = orient(s1.a, s1.b, s2.b);
    let o3 = orient(s2.a, s2.b, s1.a);
    let o4 = orient(s2.a, s2.b, s1.b);
    if o1 * o2 < 0 && o3 * o4 < 0 {
        return true;
    }
    (o1 == 0 && within_extent(s1, s2.a))
        || (o2 == 0 && within_extent(s1, s2.b))
        || (o3 == 0 && within_extent(s2, s1.a))
        || (o4 == 0 && within_extent(s2, s1.b))
}

/// True when `s` meets the closed rectangle swept by the ray.
pub fn segment_hits_ray(s: &Segment2, r: &Ray) -> bool {
    // Express the segment in the ray frame: u along the axis, v across it.
    let d = r.direction;
    let to_frame = |p: Point2| {
        let q = p - r.origin;
        (q.dot(d), d.cross(q))
    };
    let (u0, v0) = to_frame(s.a);
    let (u1, v1) = to_frame(s.b);
    let half = r.width * 0.5;

    // Liang-Barsky clipping against u in [0, length], v in [-half, half].
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    let du = u1 - u0;
    let dv = v1 - v0;
    let checks = [(-du, u0), (du, r.length - u0), (-dv, v0 + half), (dv, half - v0)];
    for (p, q) in checks {
        if p.abs() <= 1e-15 {
            if q < -EPS {
                return false;
            }
            continue;
        }
        let t = q / p;
        if p < 0.0 {
            t0 = t0.max(t);
        } else {
            t1 = t1.min(t);
        }
        if t0 > t1 + EPS {
            return false;
        }
    }
    true
}

/// Minimal circular distance between two angles, in `[0, 180]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(360.0);
    d.min(360.0 - d)
}

/// Normalises an angle to `[0, 360)`.
pub fn normalize_deg(theta: f64) -> f64 {
    let t = theta.rem_euclid(360.0);
    if t >= 360.0 {
        0.0
    } else {
        t
    }
}

/// Index of the half-open 24° cell containing `theta`.
pub fn bin_direction(theta: f64) -> usize {
    let t = normalize_deg(theta);
    ((t / BIN_WIDTH_DEG).floor() as usize).min(NUM_BINS - 1)
}

/// Centre angle of a direction bin.
pub fn bin_center(bin: usize) -> f64 {
    (bin as f64 + 0.5) * BIN_WIDTH_DEG
}

/// On-screen angle in degrees of the displacement `from -> to`.
pub fn direction_deg(from: Point2, to: Point2) -> f64 {
    let d = to - from;
    normalize_deg((-d.y).atan2(d.x).to_degrees())
}

/// Shoelace area, positive for polygons that run counter-clockwise on screen.
pub fn screen_ccw_area(points: &[Point2]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        let p = points[i];
        let q = points[(i + 1) % n];
        s += p.x * q.y - q.x * p.y;
    }
    -0.5 * s
}
