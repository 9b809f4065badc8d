//! SVG drawings of graphs and detection sets at canvas scale.

use std::fmt::Write as _;

use crate::geom::{BitMask, Canvas, Point2};
use crate::ipbuild::{beta_probe, enclosure_rays, BuildParams};
use crate::model::{DetectionSet, PlanarGraph};

const REGION_COLORS: [&str; 6] = ["#e6194b", "#3cb44b", "#4363d8", "#f58231", "#911eb4", "#42d4f4"];

fn header(canvas: Canvas) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = canvas.width,
        h = canvas.height
    )
}

fn circle(out: &mut String, p: Point2, fill: &str) {
    let _ = writeln!(out, "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{fill}\"/>", p.x, p.y);
}

fn line(out: &mut String, a: Point2, b: Point2, stroke: &str, width: f64) {
    let _ = writeln!(
        out,
        "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{stroke}\" stroke-width=\"{width}\"/>",
        a.x, a.y, b.x, b.y
    );
}

/// One rectangle subpath per foreground run.
fn mask_path(m: &BitMask) -> String {
    let mut d = String::new();
    for (y, runs) in m.to_rle().iter().enumerate() {
        let mut x = 0u32;
        for (k, &run) in runs.iter().enumerate() {
            if k % 2 == 1 && run > 0 {
                let _ = write!(d, "M{x} {y}h{run}v1h-{run}z");
            }
            x += run;
        }
    }
    d
}

fn region_group(out: &mut String, k: usize, m: &BitMask) {
    let color = REGION_COLORS[k % REGION_COLORS.len()];
    let _ = writeln!(out, "<g class=\"region\" fill=\"{color}\" fill-opacity=\"0.35\">");
    let _ = writeln!(out, "<path d=\"{}\"/>", mask_path(m));
    out.push_str("</g>\n");
}

pub fn render_graph(g: &PlanarGraph, canvas: Canvas) -> String {
    let mut out = header(canvas);
    for &e in &g.edges {
        if let Some(s) = g.segment(e) {
            line(&mut out, s.a, s.b, "#222222", 2.0);
        }
    }
    for v in &g.vertices {
        circle(&mut out, v.pos, "#d62728");
    }
    out.push_str("</svg>\n");
    out
}

/// Regions, boundary masks and corners. With `debug`, also the enclosure
/// rays of every region and the probe segment of every boundary.
pub fn render_detections(d: &DetectionSet, debug: bool, params: &BuildParams) -> String {
    let mut out = header(d.canvas);
    for (k, r) in d.regions.iter().enumerate() {
        region_group(&mut out, k, &r.mask);
    }
    for b in &d.region_pair_boundaries {
        for m in &b.segments {
            let _ = writeln!(
                out,
                "<path class=\"boundary\" fill=\"#000000\" fill-opacity=\"0.6\" d=\"{}\"/>",
                mask_path(m)
            );
        }
    }
    if debug {
        for r in &d.regions {
            for ray in enclosure_rays(&r.mask, params) {
                let s = ray.axis();
                line(&mut out, s.a, s.b, "#bbbbbb", 0.5);
            }
        }
        for b in &d.region_pair_boundaries {
            for m in &b.segments {
                if let Ok(s) = beta_probe(m, params.beta_length) {
                    line(&mut out, s.a, s.b, "#ff00ff", 1.0);
                }
            }
        }
    }
    for c in &d.corners {
        circle(&mut out, c.position, "#1f77b4");
    }
    out.push_str("</svg>\n");
    out
}
