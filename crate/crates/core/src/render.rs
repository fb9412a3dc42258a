//! Deterministic SVG rendering of samples and graphs.

use std::fmt::Write;

use crate::geom::{TangentSample, Vec2};
use crate::graph::PolyGraph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    /// Image width in pixels; height follows the aspect ratio.
    pub width: f64,
    pub tangent_ticks: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            width: 800.0,
            tangent_ticks: true,
        }
    }
}

/// What to draw besides the samples.
#[derive(Debug, Clone, Copy, Default)]
pub struct Layers<'a> {
    pub graph: Option<&'a PolyGraph>,
    /// Edges not in `truth` are drawn as incorrect.
    pub truth: Option<&'a PolyGraph>,
    /// Samples drawn as spurious; edges touching them are styled apart.
    pub spurious: &'a [usize],
}

const STYLE: &str = "\
.sample{fill:#1f4e9c}
.spurious{fill:#9a9a9a}
.tick{stroke:#1f4e9c;stroke-width:1}
.edge{stroke:#111;stroke-width:1.5}
.incorrect{stroke:#d1281f;stroke-width:2}
.spurious-edge{stroke:#e08a00;stroke-width:1.5;stroke-dasharray:4 3}";

/// Renders to an SVG document. Output depends only on the inputs.
pub fn render_svg(samples: &[TangentSample], layers: Layers<'_>, opts: RenderOptions) -> String {
    let (lo, hi) = bounds(samples);
    let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-12);
    let pad = 0.05 * span;
    let (x0, y1) = (lo.x - pad, hi.y + pad);
    let scale = opts.width / (hi.x - lo.x + 2.0 * pad).max(1e-12);
    let height = ((hi.y - lo.y + 2.0 * pad) * scale).max(1.0);
    let map = |p: Vec2| ((p.x - x0) * scale, (y1 - p.y) * scale);

    let mut spurious = vec![false; samples.len()];
    for &k in layers.spurious {
        if k < spurious.len() {
            spurious[k] = true;
        }
    }

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.0}" height="{:.0}" viewBox="0 0 {:.3} {:.3}">"#,
        opts.width, height, opts.width, height
    );
    let _ = writeln!(out, "<style>\n{STYLE}\n</style>");
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#fff"/>"##);

    if let Some(g) = layers.graph {
        let _ = writeln!(out, "<g id=\"edges\">");
        for (i, j) in g.edges() {
            let class = if spurious[i] || spurious[j] {
                "spurious-edge"
            } else if layers.truth.is_some_and(|t| !t.contains_edge(i, j)) {
                "incorrect"
            } else {
                "edge"
            };
            let (a, b) = (map(samples[i].pos), map(samples[j].pos));
            let _ = writeln!(
                out,
                r#"<line class="{class}" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
                a.0, a.1, b.0, b.1
            );
        }
        let _ = writeln!(out, "</g>");
    }

    let tick = 0.01 * opts.width;
    let _ = writeln!(out, "<g id=\"samples\">");
    for (k, s) in samples.iter().enumerate() {
        let (cx, cy) = map(s.pos);
        let class = if spurious[k] { "spurious" } else { "sample" };
        if opts.tangent_ticks {
            let d = s.tangent.dir();
            let _ = writeln!(
                out,
                r#"<line class="tick" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
                cx - d.x * tick,
                cy + d.y * tick,
                cx + d.x * tick,
                cy - d.y * tick
            );
        }
        let _ = writeln!(out, r#"<circle class="{class}" cx="{cx:.3}" cy="{cy:.3}" r="2.5"/>"#);
    }
    let _ = writeln!(out, "</g>\n</svg>");
    out
}

fn bounds(samples: &[TangentSample]) -> (Vec2, Vec2) {
    if samples.is_empty() {
        return (Vec2::ZERO, Vec2::new(1.0, 1.0));
    }
    let mut lo = samples[0].pos;
    let mut hi = lo;
    for s in samples {
        lo = Vec2::new(lo.x.min(s.pos.x), lo.y.min(s.pos.y));
        hi = Vec2::new(hi.x.max(s.pos.x), hi.y.max(s.pos.y));
    }
    (lo, hi)
}
