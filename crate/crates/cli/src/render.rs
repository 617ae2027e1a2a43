use std::fmt::Write as _;

use rising_sun::decompose::Decomposition;
use rising_sun::{Exact, ParseError, Rect, Scalar};

use crate::args::ColorBy;
use crate::commands::decomposition_domain;
use crate::error::CliError;

const MARGIN: u32 = 10;
const SELECTED_FILL: &str = "#f4a261";
const DEPTH_PALETTE: [&str; 8] = ["#264653", "#2a9d8f", "#8ab17d", "#e9c46a", "#f4a261", "#e76f51", "#9b5de5", "#00bbf9"];

#[derive(Debug, Clone)]
pub struct RenderOptions {
    pub width: u32,
    pub height: u32,
    pub color_by: ColorBy,
}

/// Affine map from the domain onto the drawable area, flipping the y axis.
struct Viewport {
    domain: Rect<Exact>,
    width: Exact,
    height: Exact,
}

impl Viewport {
    fn x(&self, x: &Exact) -> f64 {
        let side = self.domain.side(0);
        px(Exact::from_usize(MARGIN as usize) + (x.clone() - side.lo().clone()) / side.length() * self.width.clone())
    }

    fn y(&self, y: &Exact) -> f64 {
        let side = self.domain.side(1);
        px(Exact::from_usize(MARGIN as usize) + (side.hi().clone() - y.clone()) / side.length() * self.height.clone())
    }
}

fn px(v: Exact) -> f64 {
    Scalar::to_f64(&v)
}

fn fill(options: &RenderOptions, depth: usize) -> &'static str {
    match options.color_by {
        ColorBy::Kind => SELECTED_FILL,
        ColorBy::Depth => DEPTH_PALETTE[depth % DEPTH_PALETTE.len()],
    }
}

fn rect_element(out: &mut String, class: &str, data: &str, (x, y, w, h): (f64, f64, f64, f64), paint: &str) {
    let _ = writeln!(
        out,
        r##"  <rect class="{class}" {data} x="{x:.3}" y="{y:.3}" width="{w:.3}" height="{h:.3}" fill="{paint}" stroke="#000000" stroke-width="0.5"/>"##
    );
}

/// Draw a decomposition. 2-D results are drawn in place; 1-D results become
/// a horizontal bar chart with one row per interval, ordered left to right.
pub fn render_svg(dec: &Decomposition<Exact>, options: &RenderOptions) -> Result<String, CliError> {
    let domain = decomposition_domain(dec)
        .ok_or_else(|| CliError::parse("render", ParseError::Missing("select or residual records")))?;
    let dim = domain.dim();
    if dim > 2 {
        return Err(CliError::UnsupportedDimension(dim));
    }
    let inner = |total: u32| Exact::from_usize(total.saturating_sub(2 * MARGIN).max(1) as usize);
    let view = Viewport { domain: domain.clone(), width: inner(options.width), height: inner(options.height) };

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
        w = options.width,
        h = options.height
    );
    let _ = writeln!(out, "  <title>level {} on {}</title>", dec.level, domain);
    out.push_str(concat!(
        "  <defs>\n",
        "    <pattern id=\"hatch\" patternUnits=\"userSpaceOnUse\" width=\"6\" height=\"6\" patternTransform=\"rotate(45)\">\n",
        "      <line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#555555\" stroke-width=\"1.5\"/>\n",
        "    </pattern>\n",
        "  </defs>\n",
        "  <rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n",
    ));

    // (rect, class, data attributes, paint)
    let mut items: Vec<(&Rect<Exact>, &str, String, String)> = Vec::new();
    for s in &dec.selected {
        let data = format!(r#"data-rect="{}" data-mean="{}" data-depth="{}""#, s.rect, s.mean, s.depth);
        items.push((&s.rect, "selected", data, fill(options, s.depth).to_string()));
    }
    for r in &dec.residual {
        let data = format!(r#"data-rect="{}" data-reason="{}""#, r.rect, r.reason);
        items.push((&r.rect, "residual", data, "url(#hatch)".to_string()));
    }

    if dim == 2 {
        for (rect, class, data, paint) in &items {
            let (x0, x1) = (view.x(rect.side(0).lo()), view.x(rect.side(0).hi()));
            let (y0, y1) = (view.y(rect.side(1).hi()), view.y(rect.side(1).lo()));
            rect_element(&mut out, class, data, (x0, y0, x1 - x0, y1 - y0), paint);
        }
    } else {
        items.sort_by(|a, b| a.0.side(0).lo().cmp(b.0.side(0).lo()));
        let rows = items.len().max(1) as f64;
        let row = Scalar::to_f64(&view.height) / rows;
        for (i, (rect, class, data, paint)) in items.iter().enumerate() {
            let (x0, x1) = (view.x(rect.side(0).lo()), view.x(rect.side(0).hi()));
            let y = MARGIN as f64 + row * i as f64;
            rect_element(&mut out, class, data, (x0, y + row * 0.1, x1 - x0, row * 0.8), paint);
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}
