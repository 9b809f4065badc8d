use super::{screen_ccw_area, Point2};
use crate::error::{Error, Result};

/// Dense binary image. Serialised as run-length encoded rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl std::fmt::Debug for BitMask {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitMask({}x{}, {} set)", self.width, self.height, self.count())
    }
}

// 8-neighbourhood in clockwise order on screen, starting west.
const MOORE: [(i64, i64); 8] = [(-1, 0), (-1, -1), (0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1)];

impl BitMask {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, bits: vec![false; width * height] }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: &[(usize, usize)]) -> Self {
        let mut m = Self::new(width, height);
        for &(x, y) in pixels {
            m.set(x, y, true);
        }
        m
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        x < self.width && y < self.height && self.bits[y * self.width + x]
    }

    /// Lookup that treats out-of-range coordinates as background.
    pub fn get_i(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && self.get(x as usize, y as usize)
    }

    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        if x < self.width && y < self.height {
            self.bits[y * self.width + x] = v;
        }
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|b| *b)
    }

    /// Foreground pixels in row-major order.
    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits.iter().enumerate().filter(|(_, b)| **b).map(move |(i, _)| (i % self.width, i / self.width))
    }

    pub fn intersection_count(&self, o: &BitMask) -> usize {
        self.bits.iter().zip(&o.bits).filter(|(a, b)| **a && **b).count()
    }

    pub fn union_count(&self, o: &BitMask) -> usize {
        self.bits.iter().zip(&o.bits).filter(|(a, b)| **a || **b).count()
    }

    pub fn iou(&self, o: &BitMask) -> f64 {
        let u = self.union_count(o);
        if u == 0 {
            0.0
        } else {
            self.intersection_count(o) as f64 / u as f64
        }
    }

    pub fn or_assign(&mut self, o: &BitMask) {
        for (a, b) in self.bits.iter_mut().zip(&o.bits) {
            *a |= *b;
        }
    }

    /// Erosion by a `(2r+1)²` square structuring element; pixels outside the
    /// image count as background.
    pub fn erode(&self, r: usize) -> BitMask {
        if r == 0 {
            return self.clone();
        }
        let r = r as i64;
        let mut out = BitMask::new(self.width, self.height);
        for (x, y) in self.ones() {
            let (xi, yi) = (x as i64, y as i64);
            let keep = (-r..=r).all(|dy| (-r..=r).all(|dx| self.get_i(xi + dx, yi + dy)));
            if keep {
                out.set(x, y, true);
            }
        }
        out
    }

    /// Largest 8-connected foreground component. Ties go to the component
    /// reached first in raster order.
    pub fn largest_component(&self) -> BitMask {
        let mut label = vec![usize::MAX; self.bits.len()];
        let mut best: Option<(usize, Vec<usize>)> = None;
        let mut stack = Vec::new();
        for start in 0..self.bits.len() {
            if !self.bits[start] || label[start] != usize::MAX {
                continue;
            }
            let mut members = Vec::new();
            label[start] = start;
            stack.push(start);
            while let Some(i) = stack.pop() {
                members.push(i);
                let (x, y) = ((i % self.width) as i64, (i / self.width) as i64);
                for (dx, dy) in MOORE {
                    let (nx, ny) = (x + dx, y + dy);
                    if self.get_i(nx, ny) {
                        let j = ny as usize * self.width + nx as usize;
                        if label[j] == usize::MAX {
                            label[j] = start;
                            stack.push(j);
                        }
                    }
                }
            }
            if best.as_ref().is_none_or(|(n, _)| members.len() > *n) {
                best = Some((members.len(), members));
            }
        }
        let mut out = BitMask::new(self.width, self.height);
        if let Some((_, members)) = best {
            for i in members {
                out.bits[i] = true;
            }
        }
        out
    }

    /// Row runs alternating background / foreground, starting with a
    /// (possibly zero-length) background run; runs in a row sum to the width.
    pub fn to_rle(&self) -> Vec<Vec<u32>> {
        (0..self.height)
            .map(|y| {
                let row = &self.bits[y * self.width..(y + 1) * self.width];
                let mut runs = Vec::new();
                let mut cur = false;
                let mut len = 0u32;
                for &b in row {
                    if b == cur {
                        len += 1;
                    } else {
                        runs.push(len);
                        cur = b;
                        len = 1;
                    }
                }
                runs.push(len);
                runs
            })
            .collect()
    }

    pub fn from_rle(width: usize, height: usize, rows: &[Vec<u32>]) -> Result<BitMask> {
        if rows.len() != height {
            return Err(Error::Parse(format!("mask has {} rows, expected {height}", rows.len())));
        }
        let mut m = BitMask::new(width, height);
        for (y, runs) in rows.iter().enumerate() {
            let mut x = 0usize;
            for (k, &run) in runs.iter().enumerate() {
                let fg = k % 2 == 1;
                let end = x + run as usize;
                if end > width {
                    return Err(Error::Parse(format!("row {y} runs exceed width {width}")));
                }
                if fg {
                    for xx in x..end {
                        m.bits[y * width + xx] = true;
                    }
                }
                x = end;
            }
            if x != width {
                return Err(Error::Parse(format!("row {y} decodes to {x} pixels, expected {width}")));
            }
        }
        Ok(m)
    }
}

/// Moore-neighbour boundary of the largest 8-connected component, ordered
/// counter-clockwise on screen and starting at its first pixel in raster
/// order. The last pixel is 8-adjacent to the first.
pub fn trace_boundary(m: &BitMask) -> Result<Vec<Point2>> {
    if m.is_empty() {
        return Err(Error::EmptyMask);
    }
    let comp = m.largest_component();
    let start = comp.ones().next().ok_or(Error::EmptyMask)?;
    let start = (start.0 as i64, start.1 as i64);
    let at = |p: (i64, i64)| comp.get_i(p.0, p.1);

    // The west neighbour of the first raster pixel is background.
    let first_back = (start.0 - 1, start.1);
    let mut cur = start;
    let mut back = first_back;
    let mut path = vec![start];
    let limit = 4 * comp.count() + 8;
    loop {
        let k = MOORE
            .iter()
            .position(|&(dx, dy)| (cur.0 + dx, cur.1 + dy) == back)
            .expect("backtrack pixel is a neighbour");
        let mut next = None;
        for i in 1..=8 {
            let idx = (k + i) % 8;
            let q = (cur.0 + MOORE[idx].0, cur.1 + MOORE[idx].1);
            if at(q) {
                let prev = (k + i - 1) % 8;
                next = Some((q, (cur.0 + MOORE[prev].0, cur.1 + MOORE[prev].1)));
                break;
            }
        }
        let Some((q, b)) = next else {
            // Isolated pixel.
            break;
        };
        // Jacob's criterion: re-entering the start the way we first left it.
        if q == start && b == first_back {
            break;
        }
        // Thin strands re-enter the start from another side; stop once the
        // first step would repeat.
        if cur == start && path.len() > 2 && q == path[1] {
            break;
        }
        cur = q;
        back = b;
        path.push(cur);
        if path.len() > limit {
            break;
        }
    }
    // Drop a trailing duplicate of the start, if any.
    while path.len() > 1 && path.last() == Some(&start) {
        path.pop();
    }
    let mut pts: Vec<Point2> = path.iter().map(|p| Point2::new(p.0 as f64, p.1 as f64)).collect();
    // Moore tracing with a clockwise neighbour scan runs clockwise on screen.
    if pts.len() >= 3 && screen_ccw_area(&pts) < 0.0 {
        pts[1..].reverse();
    }
    Ok(pts)
}

/// Unit normal to the boundary at `index`, pointing away from the region.
///
/// The tangent is the central difference over ±2 samples; the orientation
/// defaults to the right-hand side of a counter-clockwise traversal and is
/// flipped if sampling the mask 2 px along it lands inside the region.
pub fn outward_normal(boundary: &[Point2], index: usize, mask: &BitMask) -> Result<Point2> {
    let n = boundary.len();
    if n < 3 {
        return Err(Error::DegeneratePoints("boundary needs at least 3 points"));
    }
    let next = boundary[(index + 2) % n];
    let prev = boundary[(index % n + n - 2) % n];
    let t = next - prev;
    let len = t.norm();
    if len < 1e-9 {
        return Err(Error::DegenerateTangent(index));
    }
    let mut normal = Point2::new(-t.y / len, t.x / len);
    let p = boundary[index];
    let probe = |d: Point2| {
        let q = p + d * 2.0;
        mask.get_i(q.x.round() as i64, q.y.round() as i64)
    };
    if probe(normal) && !probe(normal * -1.0) {
        normal = normal * -1.0;
    }
    Ok(normal)
}
