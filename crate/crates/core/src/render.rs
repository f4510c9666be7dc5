//! Static SVG drawings of triangulations of `n·Δ^r` for `r <= 2`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::triangulation::Triangulation;

#[derive(Clone, Debug)]
pub struct RenderSpec {
    pub width: u32,
    pub height: u32,
    /// Cells to fill.
    pub highlight: Vec<usize>,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            width: 480,
            height: 440,
            highlight: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rendered {
    pub svg: String,
    pub dots: usize,
    pub edges: usize,
}

const MARGIN: f64 = 20.0;

/// Equilateral embedding with vertex 0 on top, 1 bottom left, 2 bottom right.
fn corners(r: usize, w: f64, h: f64) -> Vec<(f64, f64)> {
    match r {
        0 => vec![(w / 2.0, h / 2.0)],
        1 => vec![(MARGIN, h / 2.0), (w - MARGIN, h / 2.0)],
        _ => {
            let side = (w - 2.0 * MARGIN).min((h - 2.0 * MARGIN) * 2.0 / 3f64.sqrt());
            let tri_h = side * 3f64.sqrt() / 2.0;
            let x0 = (w - side) / 2.0;
            let y0 = (h - tri_h) / 2.0;
            vec![(w / 2.0, y0), (x0, y0 + tri_h), (x0 + side, y0 + tri_h)]
        }
    }
}

pub fn render_svg(t: &Triangulation, spec: &RenderSpec) -> Result<Rendered> {
    let r = t.r();
    if r > 2 {
        return Err(Error::Unsupported(r));
    }
    if let Some(&bad) = spec.highlight.iter().find(|&&c| c >= t.cells().len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: t.cells().len(),
        });
    }
    let (w, h) = (spec.width as f64, spec.height as f64);
    let cs = corners(r, w, h);
    let n = t.n() as f64;
    let pos: Vec<(f64, f64)> = t
        .points()
        .iter()
        .map(|p| {
            p.coords()
                .iter()
                .zip(&cs)
                .fold((0.0, 0.0), |(x, y), (&c, &(cx, cy))| {
                    (x + c as f64 / n * cx, y + c as f64 / n * cy)
                })
        })
        .collect();
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for cell in t.cells() {
        for (i, &a) in cell.iter().enumerate() {
            for &b in &cell[i + 1..] {
                edges.insert((a.min(b), a.max(b)));
            }
        }
    }
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        spec.width, spec.height, spec.width, spec.height
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if !spec.highlight.is_empty() {
        let _ = writeln!(
            svg,
            r##"<g class="cells" fill="#f4c542" fill-opacity="0.5" stroke="none">"##
        );
        for &c in &spec.highlight {
            let pts: Vec<String> = t.cells()[c]
                .iter()
                .map(|&i| format!("{:.3},{:.3}", pos[i].0, pos[i].1))
                .collect();
            let _ = writeln!(svg, r#"<polygon points="{}"/>"#, pts.join(" "));
        }
        let _ = writeln!(svg, "</g>");
    }
    let _ = writeln!(
        svg,
        r#"<g class="edges" stroke="black" stroke-width="1.2">"#
    );
    for &(a, b) in &edges {
        let _ = writeln!(
            svg,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
            pos[a].0, pos[a].1, pos[b].0, pos[b].1
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, r#"<g class="points" fill="black">"#);
    for p in &pos {
        let _ = writeln!(svg, r#"<circle cx="{:.3}" cy="{:.3}" r="3"/>"#, p.0, p.1);
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    Ok(Rendered {
        svg,
        dots: pos.len(),
        edges: edges.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::triangulation::{enumerate_unimodular, is_invariant};

    #[test]
    fn medial_picture() {
        let m = enumerate_unimodular(2, 2, 35)
            .unwrap()
            .into_iter()
            .find(|t| is_invariant(t).unwrap())
            .unwrap();
        let out = render_svg(&m, &RenderSpec::default()).unwrap();
        assert_eq!((out.dots, out.edges), (6, 9));
        assert_eq!(out.svg.matches("<circle").count(), 6);
        assert_eq!(out.svg.matches("<line").count(), 9);
        assert_eq!(out, render_svg(&m, &RenderSpec::default()).unwrap());
    }

    #[test]
    fn trivial_and_refused() {
        let t = Triangulation::single_cell(2, 1).unwrap();
        let out = render_svg(&t, &RenderSpec::default()).unwrap();
        assert_eq!((out.dots, out.edges), (3, 3));
        let spec = RenderSpec {
            highlight: vec![0],
            ..RenderSpec::default()
        };
        assert!(render_svg(&t, &spec).unwrap().svg.contains("<polygon"));
        let t3 = Triangulation::single_cell(3, 1).unwrap();
        assert!(matches!(
            render_svg(&t3, &RenderSpec::default()),
            Err(Error::Unsupported(3))
        ));
    }
}
