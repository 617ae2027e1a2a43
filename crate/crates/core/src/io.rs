//! Plain-text interchange formats.
//!
//! Density files (`RSD 1`):
//!
//! ```text
//! RSD 1
//! dim 2
//! rect 0 1 0 1
//! cells 2 2
//! edges 0 0 1/2 1      # optional, per axis; default uniform
//! f 1 1 1 0            # row-major, last axis fastest
//! w 1 1 1 1            # optional; default all 1
//! ```
//!
//! Decomposition files (`RSDEC 1`) list the selected rectangles and residual
//! leaves, optionally followed by a pre-order dump of the division tree.

use std::fmt::{self, Write as _};

use crate::decompose::{Decomposition, DivisionNode, LeafReason, Outcome, Residual, Selected};
use crate::density::GridDensity;
use crate::error::ParseError;
use crate::geometry::{Interval, Rect, Side};
use crate::scalar::{parse_exact, Exact, Scalar};

/// Strip a `#` comment and surrounding blanks.
fn content(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

const RSD_KEYWORDS: [&str; 7] = ["RSD", "dim", "rect", "cells", "edges", "f", "w"];

/// Render a density in the `RSD 1` format.
pub fn write_density<S: Scalar>(density: &GridDensity<S>) -> String {
    let mut out = String::from("RSD 1\n");
    let n = density.dim();
    let _ = writeln!(out, "dim {n}");
    let bounds: Vec<String> = density.domain().sides().iter().flat_map(|s| [s.lo().to_string(), s.hi().to_string()]).collect();
    let _ = writeln!(out, "rect {}", bounds.join(" "));
    let cells = density.cells_per_axis();
    let _ = writeln!(out, "cells {}", cells.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));
    let uniform = GridDensity::uniform(density.domain().clone(), &cells, density.f_values().to_vec(), None)
        .expect("same shape as an existing density");
    for axis in 0..n {
        if uniform.edges(axis) != density.edges(axis) {
            let _ = writeln!(out, "edges {axis} {}", join(density.edges(axis)));
        }
    }
    let _ = writeln!(out, "f {}", join(density.f_values()));
    if !density.is_lebesgue() {
        let _ = writeln!(out, "w {}", join(density.w_values()));
    }
    out
}

fn join<S: fmt::Display>(values: &[S]) -> String {
    values.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

/// Parse an `RSD 1` density.
pub fn read_density(text: &str) -> Result<GridDensity<Exact>, ParseError> {
    let mut entries: Vec<(usize, String, Vec<String>)> = Vec::new();
    for (number, raw) in text.lines().enumerate() {
        let line = content(raw);
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let first = tokens.next().unwrap();
        if RSD_KEYWORDS.contains(&first) {
            entries.push((number + 1, first.to_string(), tokens.map(str::to_string).collect()));
        } else if let Some(last) = entries.last_mut().filter(|e| e.1 == "f" || e.1 == "w" || e.1 == "edges") {
            last.2.extend(line.split_whitespace().map(str::to_string));
        } else {
            return Err(ParseError::at(number + 1, format!("unexpected {first:?}")));
        }
    }
    let mut iter = entries.into_iter();
    match iter.next() {
        Some((_, key, args)) if key == "RSD" && args == ["1"] => {}
        Some((line, _, _)) => return Err(ParseError::at(line, "expected header \"RSD 1\"")),
        None => return Err(ParseError::Missing("header \"RSD 1\"")),
    }
    let mut dim: Option<usize> = None;
    let mut bounds: Option<Vec<Exact>> = None;
    let mut cells: Option<Vec<usize>> = None;
    let mut edges: Vec<(usize, usize, Vec<Exact>)> = Vec::new();
    let mut f: Option<Vec<Exact>> = None;
    let mut w: Option<Vec<Exact>> = None;
    let numbers = |line: usize, args: &[String]| -> Result<Vec<Exact>, ParseError> {
        args.iter().map(|a| parse_exact(a).map_err(|_| ParseError::at(line, format!("not a number: {a:?}")))).collect()
    };
    let count = |line: usize, args: &[String]| -> Result<Vec<usize>, ParseError> {
        args.iter().map(|a| a.parse::<usize>().map_err(|_| ParseError::at(line, format!("not a count: {a:?}")))).collect()
    };
    for (line, key, args) in iter {
        match key.as_str() {
            "dim" => {
                let v = count(line, &args)?;
                if v.len() != 1 || v[0] == 0 {
                    return Err(ParseError::at(line, "dim takes one positive integer"));
                }
                dim = Some(v[0]);
            }
            "rect" => bounds = Some(numbers(line, &args)?),
            "cells" => cells = Some(count(line, &args)?),
            "edges" => {
                let (axis, rest) = args.split_first().ok_or_else(|| ParseError::at(line, "edges needs an axis"))?;
                let axis = axis.parse::<usize>().map_err(|_| ParseError::at(line, "bad axis"))?;
                edges.push((line, axis, numbers(line, rest)?));
            }
            "f" => f = Some(numbers(line, &args)?),
            "w" => w = Some(numbers(line, &args)?),
            _ => return Err(ParseError::at(line, format!("duplicate header {key:?}"))),
        }
    }
    let dim = dim.ok_or(ParseError::Missing("dim line"))?;
    let bounds = bounds.ok_or(ParseError::Missing("rect line"))?;
    let cells = cells.ok_or(ParseError::Missing("cells line"))?;
    let f = f.ok_or(ParseError::Missing("f line"))?;
    if bounds.len() != 2 * dim {
        return Err(ParseError::at(0, format!("rect needs {} numbers, got {}", 2 * dim, bounds.len())));
    }
    if cells.len() != dim {
        return Err(ParseError::at(0, format!("cells needs {dim} counts, got {}", cells.len())));
    }
    let pairs: Vec<(Exact, Exact)> = bounds.chunks(2).map(|p| (p[0].clone(), p[1].clone())).collect();
    let domain = Rect::from_bounds(pairs).map_err(|e| ParseError::at(0, e.to_string()))?;
    let count: usize = cells.iter().product();
    let w = w.unwrap_or_else(|| vec![crate::scalar::int(1); count]);
    let mut density = GridDensity::uniform(domain.clone(), &cells, f.clone(), Some(w.clone()))?;
    if !edges.is_empty() {
        let mut all: Vec<Vec<Exact>> = (0..dim).map(|a| density.edges(a).to_vec()).collect();
        for (line, axis, values) in edges {
            if axis >= dim {
                return Err(ParseError::at(line, format!("axis {axis} out of range")));
            }
            if values.len() != cells[axis] + 1 {
                return Err(ParseError::at(line, format!("axis {axis} needs {} edges", cells[axis] + 1)));
            }
            all[axis] = values;
        }
        density = GridDensity::new(domain, all, f, w)?;
    }
    Ok(density)
}

/// Parse `[a1,b1)x[a2,b2)x...`.
pub fn parse_rect(text: &str) -> Result<Rect<Exact>, ParseError> {
    let bad = || ParseError::BadNumber(text.to_string());
    let inner = text.trim().strip_prefix('[').and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
    let sides = inner
        .split(")x[")
        .map(|part| {
            let (lo, hi) = part.split_once(',').ok_or_else(bad)?;
            Interval::new(parse_exact(lo)?, parse_exact(hi)?).map_err(|_| bad())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Rect::new(sides).map_err(|_| bad())
}

fn mean_text<S: fmt::Display>(mean: &Option<S>) -> String {
    mean.as_ref().map_or_else(|| "undefined".to_string(), ToString::to_string)
}

fn write_node<S: Scalar>(node: &DivisionNode<S>, out: &mut String) {
    let _ = write!(out, "node depth={} {} mean={} outcome=", node.depth, node.rect, mean_text(&node.mean));
    let _ = match &node.outcome {
        Outcome::SelectedWhole => writeln!(out, "selected"),
        Outcome::SplitBoth { axis, midpoint, .. } => writeln!(out, "split-both axis={axis} at={midpoint}"),
        Outcome::CutSelected { axis, cut, selected_side, .. } => {
            writeln!(out, "cut-selected axis={axis} at={cut} side={}", selected_side.name())
        }
        Outcome::ResidualLeaf(reason) => writeln!(out, "residual reason={reason}"),
    };
    for child in node.children() {
        write_node(child, out);
    }
}

/// Render a decomposition in the `RSDEC 1` format. The tree is appended only
/// when `dump_tree` is set and the decomposition has one.
pub fn write_decomposition<S: Scalar>(dec: &Decomposition<S>, dump_tree: bool) -> String {
    let mut out = String::from("RSDEC 1\n");
    let _ = writeln!(out, "level {}", dec.level);
    let _ = writeln!(out, "complete {}", dec.complete);
    for s in &dec.selected {
        let _ = writeln!(out, "select {} mean={} depth={}", s.rect, s.mean, s.depth);
    }
    for r in &dec.residual {
        let _ = writeln!(out, "residual {} reason={}", r.rect, r.reason);
    }
    if dump_tree {
        if let Some(root) = &dec.root {
            write_node(root, &mut out);
        }
    }
    out
}

/// `key=value` fields after the rectangle of a record line.
fn fields<'s>(line: usize, tokens: &[&'s str]) -> Result<Vec<(&'s str, &'s str)>, ParseError> {
    tokens
        .iter()
        .map(|t| t.split_once('=').ok_or_else(|| ParseError::at(line, format!("expected key=value, got {t:?}"))))
        .collect()
}

fn field<'s>(line: usize, fields: &[(&str, &'s str)], key: &str) -> Result<&'s str, ParseError> {
    fields
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| ParseError::at(line, format!("missing {key}=")))
}

fn parse_usize(line: usize, text: &str) -> Result<usize, ParseError> {
    text.parse().map_err(|_| ParseError::at(line, format!("not a count: {text:?}")))
}

fn parse_mean(line: usize, text: &str) -> Result<Option<Exact>, ParseError> {
    if text == "undefined" {
        return Ok(None);
    }
    parse_exact(text).map(Some).map_err(|_| ParseError::at(line, format!("bad mean {text:?}")))
}

struct NodeLine {
    line: usize,
    depth: usize,
    rect: Rect<Exact>,
    mean: Option<Exact>,
    kind: String,
    axis: Option<usize>,
    at: Option<Exact>,
    side: Option<Side>,
    reason: Option<LeafReason>,
}

fn parse_node_line(line: usize, tokens: &[&str]) -> Result<NodeLine, ParseError> {
    if tokens.len() < 3 {
        return Err(ParseError::at(line, "short node line"));
    }
    let depth_field = fields(line, &tokens[..1])?;
    let depth = parse_usize(line, field(line, &depth_field, "depth")?)?;
    let rect = parse_rect(tokens[1]).map_err(|e| ParseError::at(line, e.to_string()))?;
    let rest = fields(line, &tokens[2..])?;
    let mean = parse_mean(line, field(line, &rest, "mean")?)?;
    let kind = field(line, &rest, "outcome")?.to_string();
    let lookup = |key: &str| rest.iter().find(|(k, _)| *k == key).map(|(_, v)| *v);
    let axis = lookup("axis").map(|a| parse_usize(line, a)).transpose()?;
    let at = lookup("at").map(|a| parse_exact(a).map_err(|_| ParseError::at(line, "bad cut"))).transpose()?;
    let side = match lookup("side") {
        Some("lower") => Some(Side::Lower),
        Some("upper") => Some(Side::Upper),
        Some(other) => return Err(ParseError::at(line, format!("bad side {other:?}"))),
        None => None,
    };
    let reason = lookup("reason")
        .map(|r| LeafReason::from_name(r).ok_or_else(|| ParseError::at(line, format!("bad reason {r:?}"))))
        .transpose()?;
    Ok(NodeLine { line, depth, rect, mean, kind, axis, at, side, reason })
}

fn build_node(lines: &[NodeLine], next: &mut usize, depth: usize) -> Result<DivisionNode<Exact>, ParseError> {
    let Some(entry) = lines.get(*next) else {
        return Err(ParseError::Missing("child node line"));
    };
    *next += 1;
    if entry.depth != depth {
        return Err(ParseError::at(entry.line, format!("expected depth {depth}, found {}", entry.depth)));
    }
    let need = |v: Option<usize>, what: &str| v.ok_or_else(|| ParseError::at(entry.line, format!("missing {what}")));
    let outcome = match entry.kind.as_str() {
        "selected" => Outcome::SelectedWhole,
        "residual" => Outcome::ResidualLeaf(entry.reason.ok_or_else(|| ParseError::at(entry.line, "missing reason"))?),
        "split-both" => {
            let axis = need(entry.axis, "axis")?;
            let midpoint = entry.at.clone().ok_or_else(|| ParseError::at(entry.line, "missing at"))?;
            let lower = Box::new(build_node(lines, next, depth + 1)?);
            let upper = Box::new(build_node(lines, next, depth + 1)?);
            Outcome::SplitBoth { axis, midpoint, lower, upper }
        }
        "cut-selected" => {
            let axis = need(entry.axis, "axis")?;
            let cut = entry.at.clone().ok_or_else(|| ParseError::at(entry.line, "missing at"))?;
            let selected_side = entry.side.ok_or_else(|| ParseError::at(entry.line, "missing side"))?;
            let selected = Box::new(build_node(lines, next, depth + 1)?);
            let continuing = Box::new(build_node(lines, next, depth + 1)?);
            Outcome::CutSelected { axis, cut, selected_side, selected, continuing }
        }
        other => return Err(ParseError::at(entry.line, format!("unknown outcome {other:?}"))),
    };
    Ok(DivisionNode { rect: entry.rect.clone(), mean: entry.mean.clone(), depth, outcome })
}

/// Parse an `RSDEC 1` decomposition. Float-mode files carry decimal numbers,
/// which are read at face value.
pub fn read_decomposition(text: &str) -> Result<Decomposition<Exact>, ParseError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, content(l))).filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, "RSDEC 1")) => {}
        Some((line, _)) => return Err(ParseError::at(line, "expected header \"RSDEC 1\"")),
        None => return Err(ParseError::Missing("header \"RSDEC 1\"")),
    }
    let mut level = None;
    let mut complete = None;
    let mut selected = Vec::new();
    let mut residual = Vec::new();
    let mut nodes = Vec::new();
    for (line, text) in lines {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        match tokens[0] {
            "level" if tokens.len() == 2 => {
                level = Some(parse_exact(tokens[1]).map_err(|_| ParseError::at(line, "bad level"))?);
            }
            "complete" if tokens.len() == 2 => {
                complete = Some(match tokens[1] {
                    "true" => true,
                    "false" => false,
                    other => return Err(ParseError::at(line, format!("bad flag {other:?}"))),
                });
            }
            "select" if tokens.len() >= 3 => {
                let rect = parse_rect(tokens[1]).map_err(|e| ParseError::at(line, e.to_string()))?;
                let kv = fields(line, &tokens[2..])?;
                let mean = parse_mean(line, field(line, &kv, "mean")?)?
                    .ok_or_else(|| ParseError::at(line, "selected rectangle without a mean"))?;
                let depth = match kv.iter().find(|(k, _)| *k == "depth") {
                    Some((_, d)) => parse_usize(line, d)?,
                    None => 0,
                };
                selected.push(Selected { rect, mean, depth });
            }
            "residual" if tokens.len() >= 3 => {
                let rect = parse_rect(tokens[1]).map_err(|e| ParseError::at(line, e.to_string()))?;
                let kv = fields(line, &tokens[2..])?;
                let name = field(line, &kv, "reason")?;
                let reason = LeafReason::from_name(name).ok_or_else(|| ParseError::at(line, format!("bad reason {name:?}")))?;
                residual.push(Residual { rect, reason, depth: 0 });
            }
            "node" => nodes.push(parse_node_line(line, &tokens[1..])?),
            other => return Err(ParseError::at(line, format!("unexpected record {other:?}"))),
        }
    }
    let root = if nodes.is_empty() {
        None
    } else {
        let mut next = 0;
        let root = build_node(&nodes, &mut next, 0)?;
        if next != nodes.len() {
            return Err(ParseError::at(nodes[next].line, "node line outside the tree"));
        }
        Some(root)
    };
    if let Some(root) = &root {
        // residual depths come from the tree
        let mut depths = Vec::new();
        root.walk(&mut |n| {
            if matches!(n.outcome, Outcome::ResidualLeaf(_)) {
                depths.push(n.depth);
            }
        });
        if depths.len() == residual.len() {
            for (r, d) in residual.iter_mut().zip(depths) {
                r.depth = d;
            }
        }
    }
    Ok(Decomposition {
        level: level.ok_or(ParseError::Missing("level line"))?,
        selected,
        residual,
        root,
        complete: complete.ok_or(ParseError::Missing("complete line"))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{rising_sun_decompose, Level, StoppingPolicy};
    use crate::fixtures;
    use crate::scalar::{int, ratio};
    use proptest::prelude::*;

    #[test]
    fn counterexample_density_text() {
        let text = write_density(&fixtures::counterexample());
        assert_eq!(text, "RSD 1\ndim 2\nrect 0 1 0 1\ncells 2 2\nf 1 1 1 0\n");
        assert_eq!(read_density(&text).unwrap(), fixtures::counterexample());
    }

    #[test]
    fn reads_comments_edges_and_weights() {
        let text = "# step\nRSD 1\ndim 1\nrect 0 1\ncells 2\nedges 0 0 1/3 1  # skewed\nf 2\n 0\nw 1/2 3\n";
        let d = read_density(text).unwrap();
        assert_eq!(d.edges(0), &[int(0), ratio(1, 3), int(1)]);
        assert_eq!(d.f_values(), &[int(2), int(0)]);
        assert_eq!(d.w_values(), &[ratio(1, 2), int(3)]);
        assert_eq!(read_density(&write_density(&d)).unwrap(), d);
    }

    #[test]
    fn density_errors() {
        assert!(matches!(read_density(""), Err(ParseError::Missing(_))));
        assert!(read_density("RSD 2\n").is_err());
        assert!(read_density("RSD 1\ndim 1\nrect 0 1\ncells 2\n").is_err());
        assert!(read_density("RSD 1\ndim 1\nrect 0 1\ncells 2\nf 1\n").is_err());
        assert!(read_density("RSD 1\ndim 1\nrect 0 1\ncells 1\nf x\n").is_err());
        assert!(read_density("RSD 1\ndim 1\nrect 0 1\ncells 1\nf 1\nw -1\n").is_err());
        assert!(read_density("RSD 1\ndim 2\nrect 0 1\ncells 1\nf 1\n").is_err());
        assert!(read_density("RSD 1\ndim 1\nrect 0 1\ncells 2\nedges 0 0 2 1\nf 1 1\n").is_err());
        assert!(read_density("RSD 1\nbogus 3\n").is_err());
    }

    #[test]
    fn parses_rectangles() {
        let r = parse_rect("[2/3,1)x[0,4/7)").unwrap();
        assert_eq!(r.to_string(), "[2/3,1)x[0,4/7)");
        assert_eq!(parse_rect("[0.5,1)").unwrap().to_string(), "[1/2,1)");
        for junk in ["", "[0,1]", "(0,1)", "[1,0)", "[0,1)x", "[a,b)"] {
            assert!(parse_rect(junk).is_err(), "{junk:?}");
        }
    }

    #[test]
    fn decomposition_round_trip_with_tree() {
        let d = fixtures::counterexample();
        let dec = rising_sun_decompose(&d, &Level::new(ratio(7, 8)), &StoppingPolicy::max_depth(8)).unwrap();
        let text = write_decomposition(&dec, true);
        assert!(text.starts_with("RSDEC 1\nlevel 7/8\ncomplete true\n"));
        assert!(text.contains("select [0,2/3)x[0,1) mean=7/8 depth=1\n"));
        assert!(text.contains("select [2/3,1)x[0,4/7) mean=7/8 depth=2\n"));
        assert!(text.contains("residual [2/3,1)x[4/7,1) reason=below-level\n"));
        assert!(text.contains("node depth=0 [0,1)x[0,1) mean=3/4 outcome=cut-selected axis=0 at=2/3 side=lower\n"));
        let back = read_decomposition(&text).unwrap();
        assert_eq!(back, dec);
        let bare = read_decomposition(&write_decomposition(&dec, false)).unwrap();
        assert_eq!(bare.root, None);
        assert_eq!(bare.selected, dec.selected);
    }

    #[test]
    fn decomposition_errors() {
        assert!(read_decomposition("RSDEC 2\n").is_err());
        assert!(read_decomposition("RSDEC 1\ncomplete true\n").is_err());
        assert!(read_decomposition("RSDEC 1\nlevel 1\ncomplete maybe\n").is_err());
        assert!(read_decomposition("RSDEC 1\nlevel 1\ncomplete true\nselect [0,1) mean=x\n").is_err());
        let dangling = "RSDEC 1\nlevel 1\ncomplete true\nnode depth=0 [0,1) mean=0 outcome=split-both axis=0 at=1/2\n";
        assert!(read_decomposition(dangling).is_err());
    }

    proptest! {
        #[test]
        fn random_densities_round_trip(seed in 0u64..10_000) {
            let mut rng = fixtures::seeded(seed);
            let d = fixtures::random_density(&mut rng, &fixtures::RandomSpec::default());
            prop_assert_eq!(read_density(&write_density(&d)).unwrap(), d);
        }
    }
}
