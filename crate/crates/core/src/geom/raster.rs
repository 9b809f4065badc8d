use super::{BitMask, Canvas, Point2, Segment2, EPS};

/// Pixel coordinates `(x, y)`.
pub type Pixel = (usize, usize);

/// All pixels whose centre lies within `width / 2` of `s`, clipped to the
/// canvas, in row-major order.
pub fn rasterize_segment(s: &Segment2, width: f64, canvas: Canvas) -> Vec<Pixel> {
    let half = width * 0.5;
    let lo_x = (s.a.x.min(s.b.x) - half).floor().max(0.0);
    let hi_x = (s.a.x.max(s.b.x) + half).ceil().min(canvas.width as f64 - 1.0);
    let lo_y = (s.a.y.min(s.b.y) - half).floor().max(0.0);
    let hi_y = (s.a.y.max(s.b.y) + half).ceil().min(canvas.height as f64 - 1.0);
    if hi_x < lo_x || hi_y < lo_y {
        return Vec::new();
    }
    let mut out = Vec::new();
    for y in lo_y as usize..=hi_y as usize {
        for x in lo_x as usize..=hi_x as usize {
            if s.distance_to(Point2::new(x as f64, y as f64)) <= half + EPS {
                out.push((x, y));
            }
        }
    }
    out
}

/// Even-odd scanline fill sampled at pixel centres with the half-open
/// crossing rule, so polygons sharing an edge never share a pixel.
pub fn fill_polygon(poly: &[Point2], canvas: Canvas) -> BitMask {
    let mut mask = BitMask::new(canvas.width, canvas.height);
    if poly.len() < 3 {
        return mask;
    }
    let n = poly.len();
    let mut xs = Vec::new();
    for y in 0..canvas.height {
        let yc = y as f64;
        xs.clear();
        for i in 0..n {
            let p = poly[i];
            let q = poly[(i + 1) % n];
            if (p.y <= yc) != (q.y <= yc) {
                let t = (yc - p.y) / (q.y - p.y);
                xs.push(p.x + t * (q.x - p.x));
            }
        }
        if xs.is_empty() {
            continue;
        }
        xs.sort_by(|a, b| a.total_cmp(b));
        // A centre is inside when the number of crossings strictly to its
        // right is odd, i.e. it lies in [xs[2k], xs[2k+1]).
        for pair in xs.chunks(2) {
            if pair.len() < 2 {
                break;
            }
            let start = pair[0].ceil().max(0.0);
            let end = pair[1];
            let mut x = start;
            while x < end && x < canvas.width as f64 {
                mask.set(x as usize, y, true);
                x += 1.0;
            }
        }
    }
    mask
}
