use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rising_sun::decompose::{cz_decompose, rising_sun_decompose, CubeDecomposition, MeanClass};
use rising_sun::fixtures::{counterexample, random_density, riesz_step, seeded, RandomSpec};
use rising_sun::io::{read_decomposition, read_density, write_decomposition, write_density};
use rising_sun::scalar::{parse_exact, DEFAULT_FLOAT_TOLERANCE};
use rising_sun::verify::{verify_decomposition, VerificationReport};
use rising_sun::{Decomposition, Exact, GridDensity, Level, Rect, Scalar, StoppingPolicy};

use crate::args::{DecomposeArgs, GenArgs, Mode, PolicyArgs, RenderArgs, VerifyArgs};
use crate::error::CliError;
use crate::render::{render_svg, RenderOptions};

/// Depth bound used when neither `--min-side` nor `--max-depth` is given.
pub const DEFAULT_MAX_DEPTH: usize = 40;

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Write to `path`, or to standard output when absent.
pub fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.clone(), source }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source }),
    }
}

pub fn load_density(path: &Path) -> Result<GridDensity<Exact>, CliError> {
    read_density(&read_file(path)?).map_err(|e| CliError::parse(path.display().to_string(), e))
}

pub fn load_decomposition(path: &Path) -> Result<Decomposition<Exact>, CliError> {
    read_decomposition(&read_file(path)?).map_err(|e| CliError::parse(path.display().to_string(), e))
}

fn parse_level(text: &str) -> Result<Exact, CliError> {
    parse_exact(text).map_err(|e| CliError::parse("--level", e))
}

fn float_tolerance(given: Option<f64>) -> f64 {
    given.unwrap_or(DEFAULT_FLOAT_TOLERANCE)
}

pub fn build_policy(args: &PolicyArgs) -> Result<StoppingPolicy<Exact>, CliError> {
    let min_side = match &args.min_side {
        Some(s) => parse_exact(s).map_err(|e| CliError::parse("--min-side", e))?,
        None => Exact::from_usize(0),
    };
    let max_depth = match (args.max_depth, args.min_side.is_some()) {
        (Some(d), _) => Some(d),
        (None, true) => None,
        (None, false) => Some(DEFAULT_MAX_DEPTH),
    };
    let policy = StoppingPolicy { min_side, max_depth, max_selected: args.max_select };
    policy.validate()?;
    Ok(policy)
}

/// The decomposition file text for `decompose`.
pub fn decompose_text(args: &DecomposeArgs) -> Result<String, CliError> {
    let density = load_density(&args.input)?;
    let level = parse_level(&args.level)?;
    let policy = build_policy(&args.policy)?;
    Ok(match args.mode {
        Mode::Exact => {
            let dec = rising_sun_decompose(&density, &Level::new(level), &policy)?;
            write_decomposition(&dec, args.dump_tree)
        }
        Mode::Float => {
            let level = Level::with_tolerance(f64::from_exact(&level), float_tolerance(args.tolerance));
            let dec = rising_sun_decompose(&density.convert::<f64>(), &level, &policy.convert())?;
            write_decomposition(&dec, args.dump_tree)
        }
    })
}

/// Smallest rectangle containing every record of the decomposition; the
/// selected and residual records tile the domain.
pub fn decomposition_domain(dec: &Decomposition<Exact>) -> Option<Rect<Exact>> {
    if let Some(root) = &dec.root {
        return Some(root.rect.clone());
    }
    let mut rects = dec.selected.iter().map(|s| &s.rect).chain(dec.residual.iter().map(|r| &r.rect));
    let first = rects.next()?.clone();
    rects.try_fold(first, |acc, r| {
        if r.dim() != acc.dim() {
            return None;
        }
        let bounds = (0..acc.dim()).map(|a| {
            let (s, t) = (acc.side(a), r.side(a));
            let lo = if s.lo() <= t.lo() { s.lo() } else { t.lo() };
            let hi = if s.hi() >= t.hi() { s.hi() } else { t.hi() };
            (lo.clone(), hi.clone())
        });
        Rect::from_bounds(bounds).ok()
    })
}

/// The report text and verdict for `verify`.
pub fn verify_report(args: &VerifyArgs) -> Result<VerificationReport, CliError> {
    let density = load_density(&args.density)?;
    let dec = load_decomposition(&args.input)?;
    match decomposition_domain(&dec) {
        Some(domain) if domain == *density.domain() => {}
        Some(domain) => {
            return Err(CliError::DomainMismatch(format!("decomposition covers {domain}, density domain is {}", density.domain())))
        }
        None => return Err(CliError::DomainMismatch("decomposition has no rectangles".into())),
    }
    let tolerance = match (args.mode, args.tolerance) {
        (_, Some(t)) => t,
        (Mode::Exact, None) => 0.0,
        (Mode::Float, None) => DEFAULT_FLOAT_TOLERANCE,
    };
    if !(tolerance >= 0.0 && tolerance.is_finite()) {
        return Err(CliError::parse("--tolerance", rising_sun::ParseError::BadNumber(tolerance.to_string())));
    }
    Ok(verify_decomposition(&density, &dec, &tolerance.to_exact()))
}

fn cube_lines<S: Scalar>(cz: &CubeDecomposition<S>, dim: usize) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "level {}", cz.level);
    let _ = writeln!(out, "bound {}", cz.upper_bound(dim));
    let _ = writeln!(out, "complete {}", cz.complete);
    for c in &cz.cubes {
        let _ = writeln!(out, "cube {} mean={} depth={}", c.cube, c.mean, c.depth);
    }
    out
}

fn mark<S: Scalar>(level: &Level<S>, mean: &S) -> &'static str {
    match level.classify(mean, &S::one(), &S::one()) {
        MeanClass::Equal => "= A",
        MeanClass::Above => "> A",
        _ => "< A",
    }
}

fn comparison<S: Scalar>(cz: &CubeDecomposition<S>, rs: &Decomposition<S>, level: &Level<S>, dim: usize) -> String {
    let left: Vec<String> = cz.cubes.iter().map(|c| format!("{} mean={} ({})", c.cube, c.mean, mark(level, &c.mean))).collect();
    let right: Vec<String> =
        rs.selected.iter().map(|s| format!("{} mean={} ({})", s.rect, s.mean, mark(level, &s.mean))).collect();
    let width = left.iter().map(String::len).chain(["dyadic cubes".len()]).max().unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "comparison at A = {}: dyadic means lie in (A, {}], rising-sun means equal A", cz.level, cz.upper_bound(dim));
    let _ = writeln!(out, "{:width$} | rising-sun rectangles", "dyadic cubes");
    for i in 0..left.len().max(right.len()) {
        let l = left.get(i).map_or("", String::as_str);
        let r = right.get(i).map_or("", String::as_str);
        let _ = writeln!(out, "{l:width$} | {r}");
    }
    let equal = |means: &mut dyn Iterator<Item = &S>| means.filter(|m| mark(level, m) == "= A").count();
    let _ = writeln!(out, "dyadic means equal to A: {} of {}", equal(&mut cz.cubes.iter().map(|c| &c.mean)), cz.cubes.len());
    let _ = writeln!(out, "rising-sun means equal to A: {} of {}", equal(&mut rs.selected.iter().map(|s| &s.mean)), rs.selected.len());
    out
}

fn cz_run<S: Scalar>(density: &GridDensity<S>, level: &Level<S>, policy: &StoppingPolicy<S>) -> Result<(String, String), CliError> {
    let cz = cz_decompose(density, level, policy)?;
    let rs = rising_sun_decompose(density, level, policy)?;
    Ok((cube_lines(&cz, density.dim()), comparison(&cz, &rs, level, density.dim())))
}

/// The cube list and the side-by-side comparison for `cz`.
pub fn cz_text(args: &DecomposeArgs) -> Result<(String, String), CliError> {
    let density = load_density(&args.input)?;
    let level = parse_level(&args.level)?;
    let policy = build_policy(&args.policy)?;
    match args.mode {
        Mode::Exact => cz_run(&density, &Level::new(level), &policy),
        Mode::Float => {
            let level = Level::with_tolerance(f64::from_exact(&level), float_tolerance(args.tolerance));
            cz_run(&density.convert::<f64>(), &level, &policy.convert())
        }
    }
}

/// The density file text for `gen`.
pub fn gen_text(args: &GenArgs) -> Result<String, CliError> {
    let density = match args.preset.as_str() {
        "paper-counterexample" => counterexample(),
        "riesz-1d-step" => riesz_step(),
        "random" => random_density(&mut seeded(args.seed), &RandomSpec::default()),
        other => return Err(CliError::UnknownPreset(other.to_string())),
    };
    Ok(write_density(&density))
}

pub fn render_text(args: &RenderArgs) -> Result<String, CliError> {
    let dec = load_decomposition(&args.input)?;
    let options = RenderOptions { width: args.svg_width, height: args.svg_height, color_by: args.color_by };
    render_svg(&dec, &options)
}
