//! Command execution and CSV output.
//!
//! Rows are computed in parallel where independent and written in input
//! order; floats use the shortest round-trip decimal form.

use std::fs::File;
use std::io::{self, Write};

use rayon::prelude::*;

use morrey_core::certify::{run_certification, sample_pairs};
use morrey_core::modulus::{hyperbolic_distance, hyperbolic_modulus, theta_for};
use morrey_core::omega_star::{distance_axiom_audit, oned_exact, solve};
use morrey_core::{BoxRegion, GridSpec, HalfSpacePoint, NamedField, Variant};

use crate::config::{Command, Pair, PairSource, RunConfig};
use crate::error::CliError;

pub const THETA_HEADER: [&str; 9] = ["n", "gamma", "p", "alpha", "beta", "kappa", "x", "y", "theta"];
pub const CERTIFY_HEADER: [&str; 8] = ["variant", "field_id", "x", "y", "difference", "energy", "modulus", "ratio"];
pub const OMEGA_HEADER: [&str; 12] =
    ["n", "gamma", "p", "x", "y", "omega_hat", "min_energy", "iterations", "converged", "oracle", "theta", "ratio_to_theta"];
pub const HYPERBOLIC_HEADER: [&str; 5] = ["x", "y", "d_hyp", "modulus", "variant"];
pub const AUDIT_HEADER: [&str; 3] = ["check", "defect", "location"];

fn num(v: f64) -> String {
    v.to_string()
}

/// The configured pairs, sampling them if requested.
pub fn resolve_pairs(config: &RunConfig) -> Result<Vec<Pair>, CliError> {
    Ok(match &config.pairs {
        PairSource::Inline(pairs) => pairs.clone(),
        PairSource::Sample { region, count } => sample_pairs(region, *count, config.seed.unwrap_or(0))?,
    })
}

/// Field identifiers are `<kind>_<position>`, counting from 1.
pub fn build_fields(config: &RunConfig) -> Result<Vec<(NamedField, bool)>, CliError> {
    config
        .fields
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let f = spec.build(&format!("{}_{}", spec.kind(), i + 1), &config.params)?;
            let compact = f.field.support_box().is_some_and(|b| b.floor() > 0.0);
            Ok((f, compact))
        })
        .collect()
}

fn grid_on(config: &RunConfig, region: BoxRegion) -> Result<GridSpec, CliError> {
    Ok(GridSpec::uniform(region, config.resolution.cells, config.resolution.grading_for(config.params.gamma))?)
}

/// Cube centred on the points' bounding box with side `8·max(diameter, highest point)`, clipped to the half-space.
fn box_around(points: &[HalfSpacePoint]) -> BoxRegion {
    let n = points[0].dim();
    let lo: Vec<f64> = (0..n).map(|k| points.iter().map(|p| p.coords()[k]).fold(f64::INFINITY, f64::min)).collect();
    let hi: Vec<f64> = (0..n).map(|k| points.iter().map(|p| p.coords()[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
    let diameter = lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt();
    let centre: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
    BoxRegion::cube(&centre, 4.0 * diameter.max(hi[n - 1])).clipped_to_half_space().expect("points lie in the half-space")
}

fn theta_rows(config: &RunConfig, pairs: &[Pair]) -> Vec<Vec<String>> {
    let params = &config.params;
    let tp = params.theta_params();
    pairs
        .iter()
        .map(|(x, y)| {
            vec![
                params.n.to_string(),
                num(params.gamma),
                num(params.p),
                num(tp.alpha),
                num(tp.beta),
                num(tp.kappa),
                x.to_string(),
                y.to_string(),
                num(theta_for(params, x, y)),
            ]
        })
        .collect()
}

fn certify_rows(config: &RunConfig, pairs: &[Pair]) -> Result<Vec<Vec<String>>, CliError> {
    let fields = build_fields(config)?;
    if fields.is_empty() || pairs.is_empty() {
        return Ok(Vec::new());
    }
    let region = match &config.region {
        Some(r) => r.clone(),
        None => {
            // Every field must then carry its own bounded energy box.
            let boxes: Option<Vec<BoxRegion>> =
                fields.iter().map(|(f, _)| f.field.energy_box().and_then(|b| b.clipped_to_half_space())).collect();
            let boxes = boxes.ok_or_else(|| {
                CliError::config(crate::error::Origin::Default, "box_lower", "a field without bounded energy box needs box_lower/box_upper")
            })?;
            let n = config.params.n;
            let lower = (0..n).map(|k| boxes.iter().map(|b| b.lower[k]).fold(f64::INFINITY, f64::min)).collect();
            let upper = (0..n).map(|k| boxes.iter().map(|b| b.upper[k]).fold(f64::NEG_INFINITY, f64::max)).collect();
            BoxRegion::new(lower, upper)?
        }
    };
    let grid = grid_on(config, region)?;
    let variants: Vec<Variant> = match config.variant {
        Some(v) => vec![v],
        None => Variant::ALL.to_vec(),
    };
    let mut rows = Vec::new();
    for variant in variants {
        let corpus: Vec<NamedField> = fields
            .iter()
            .filter(|(_, compact)| config.variant.is_some() || !variant.is_compact() || *compact)
            .map(|(f, _)| f.clone())
            .collect();
        if corpus.is_empty() {
            continue;
        }
        let report = run_certification(&corpus, pairs, &config.params, variant, &grid)?;
        for r in report.records {
            rows.push(vec![
                variant.as_str().to_string(),
                r.field_id,
                r.pair.0.to_string(),
                r.pair.1.to_string(),
                num(r.difference),
                num(r.energy),
                num(r.modulus),
                num(r.ratio),
            ]);
        }
    }
    Ok(rows)
}

fn omega_rows(config: &RunConfig, pairs: &[Pair]) -> Result<Vec<Vec<String>>, CliError> {
    let params = config.params;
    let results: Vec<Result<Vec<String>, CliError>> = pairs
        .par_iter()
        .map(|(x, y)| {
            let grid = match &config.region {
                Some(r) => grid_on(config, r.clone())?,
                None => config.resolution.grid_around_pair(x, y, params.gamma)?,
            };
            let est = solve(x, y, &params, &grid, &config.solver)?;
            let oracle = if params.n == 1 { num(oned_exact(&params, x.height(), y.height())?) } else { String::new() };
            let theta = theta_for(&params, x, y);
            Ok(vec![
                params.n.to_string(),
                num(params.gamma),
                num(params.p),
                x.to_string(),
                y.to_string(),
                num(est.value),
                num(est.min_energy),
                est.iterations.to_string(),
                est.converged.to_string(),
                oracle,
                num(theta),
                num(est.value / theta),
            ])
        })
        .collect();
    results.into_iter().collect()
}

fn hyperbolic_rows(config: &RunConfig, pairs: &[Pair]) -> Vec<Vec<String>> {
    let variants: Vec<Variant> = match config.variant {
        Some(v) => vec![v],
        None => vec![Variant::Hyperbolic, Variant::HyperbolicCompact],
    };
    let mut rows = Vec::new();
    for (x, y) in pairs {
        let d = hyperbolic_distance(x, y);
        for v in &variants {
            rows.push(vec![
                x.to_string(),
                y.to_string(),
                num(d),
                num(hyperbolic_modulus(&config.params, d, v.is_compact())),
                v.as_str().to_string(),
            ]);
        }
    }
    rows
}

fn audit_rows(config: &RunConfig, pairs: &[Pair]) -> Result<Vec<Vec<String>>, CliError> {
    // Distinct pair endpoints, in order of first appearance.
    let mut points: Vec<HalfSpacePoint> = Vec::new();
    for (x, y) in pairs {
        for p in [x, y] {
            if !points.contains(p) {
                points.push(p.clone());
            }
        }
    }
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let region = config.region.clone().unwrap_or_else(|| box_around(&points));
    let grid = grid_on(config, region)?;
    let report = distance_axiom_audit(&points, &config.params, &grid, &config.solver)?;
    let mut rows = Vec::new();
    for (check, d) in [
        ("symmetry", &report.symmetry),
        ("triangle", &report.triangle),
        ("homogeneity", &report.homogeneity),
        ("translation", &report.translation),
    ] {
        rows.push(vec![check.to_string(), num(d.value), d.location.clone()]);
    }
    // 1 when some solve stopped at the iteration limit.
    rows.push(vec!["unconverged".into(), if report.all_converged { "0".into() } else { "1".into() }, String::new()]);
    Ok(rows)
}

/// Header and rows for `config`, without writing anything.
pub fn table(config: &RunConfig) -> Result<(&'static [&'static str], Vec<Vec<String>>), CliError> {
    let pairs = resolve_pairs(config)?;
    Ok(match config.command {
        Command::Theta => (&THETA_HEADER, theta_rows(config, &pairs)),
        Command::Certify => (&CERTIFY_HEADER, certify_rows(config, &pairs)?),
        Command::Omega => (&OMEGA_HEADER, omega_rows(config, &pairs)?),
        Command::Hyperbolic => (&HYPERBOLIC_HEADER, hyperbolic_rows(config, &pairs)),
        Command::Audit => (&AUDIT_HEADER, audit_rows(config, &pairs)?),
    })
}

/// Runs `config` and writes the CSV to `out`.
pub fn run_to_writer(config: &RunConfig, out: impl Write) -> Result<(), CliError> {
    let (header, rows) = table(config)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs `config`, writing to its output path or to standard output.
pub fn run(config: &RunConfig) -> Result<(), CliError> {
    // Open the output first so an unwritable path fails before any work is done.
    match &config.output {
        Some(path) => run_to_writer(config, io::BufWriter::new(File::create(path)?)),
        None => run_to_writer(config, io::stdout().lock()),
    }
}
