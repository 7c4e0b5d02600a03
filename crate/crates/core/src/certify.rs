//! Measured inequality constants over corpora of fields and point pairs, and
//! lower bounds on any admissible modulus from the extremal constructions.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extremals::{bump, log_bump, oned_log_bump, oned_sharp_profile};
use crate::field::{NamedField, ScalarField};
use crate::grid::GridSpec;
use crate::modulus::{
    hyperbolic_distance, hyperbolic_modulus, pow, theta0_for, theta_branch, theta_for, Params, ThetaCase, ThetaParams, KAPPA_TIE,
};
use crate::point::{BoxRegion, HalfSpacePoint};
use crate::quadrature::{relative_gap, weighted_energy, EnergyReport};

/// Which inequality a certification run measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Θ, any field of finite energy.
    Full,
    /// Θ⁰, fields compactly supported in the open half-space.
    Compact,
    /// `max(d^{1−n/p}, d^{1−1/p})` in the hyperbolic distance, `γ = p − n`.
    Hyperbolic,
    /// `min(d^{1−n/p}, 1)`, compactly supported fields, `γ = p − n`.
    HyperbolicCompact,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Full, Variant::Compact, Variant::Hyperbolic, Variant::HyperbolicCompact];

    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Full => "full",
            Variant::Compact => "compact",
            Variant::Hyperbolic => "hyperbolic",
            Variant::HyperbolicCompact => "hyperbolic_compact",
        }
    }

    pub fn is_compact(&self) -> bool {
        matches!(self, Variant::Compact | Variant::HyperbolicCompact)
    }

    pub fn is_hyperbolic(&self) -> bool {
        matches!(self, Variant::Hyperbolic | Variant::HyperbolicCompact)
    }

    /// Parameters actually in force: hyperbolic variants use `γ = p − n`.
    pub fn effective_params(&self, params: &Params) -> Params {
        if self.is_hyperbolic() {
            params.hyperbolic()
        } else {
            *params
        }
    }

    pub fn modulus(&self, params: &Params, x: &HalfSpacePoint, y: &HalfSpacePoint) -> f64 {
        match self {
            Variant::Full => theta_for(params, x, y),
            Variant::Compact => theta0_for(params, x, y),
            Variant::Hyperbolic => hyperbolic_modulus(params, hyperbolic_distance(x, y), false),
            Variant::HyperbolicCompact => hyperbolic_modulus(params, hyperbolic_distance(x, y), true),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL.into_iter().find(|v| v.as_str() == s).ok_or_else(|| Error::Precondition(format!("unknown variant '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertRecord {
    pub pair: (HalfSpacePoint, HalfSpacePoint),
    pub field_id: String,
    pub modulus: f64,
    pub energy: f64,
    /// `|u(x) − u(y)|`
    pub difference: f64,
    /// `difference / (modulus · energy^{1/p})`, 0 when the difference vanishes.
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertReport {
    pub variant: Variant,
    /// Field-major: all pairs for the first field, then the next field.
    pub records: Vec<CertRecord>,
    pub sup_ratio: f64,
    /// Index of the first record attaining `sup_ratio`.
    pub argmax: usize,
    /// `sup_ratio` with every energy taken at half the resolution.
    pub coarse_sup_ratio: f64,
    /// Relative change of `sup_ratio` between the two resolutions.
    pub grid_stability: f64,
}

/// Integration grid for one field: the field's energy box (clipped to the
/// half-space) at the resolution of `grid`, or `grid` itself when the field
/// has no bounded energy box.
pub fn field_grid(field: &dyn ScalarField, grid: &GridSpec) -> Result<GridSpec> {
    match field.energy_box() {
        Some(b) => {
            let region =
                b.clipped_to_half_space().ok_or_else(|| Error::Precondition("field energy box lies outside the half-space".into()))?;
            GridSpec::new(region, grid.cells_per_axis.clone(), grid.grading_exponent)
        }
        None => Ok(grid.clone()),
    }
}

fn require_compact_support(field: &NamedField) -> Result<()> {
    match field.field.support_box() {
        Some(b) if b.floor() > 0.0 => Ok(()),
        _ => Err(Error::Precondition(format!("field '{}' is not compactly supported in the open half-space", field.id))),
    }
}

/// Index of the first maximum.
fn first_max(values: impl Iterator<Item = f64>) -> (f64, usize) {
    values.enumerate().fold((0.0, 0), |(best, at), (i, v)| if v > best { (v, i) } else { (best, at) })
}

/// Measures `|u(x) − u(y)| / (modulus · energy^{1/p})` for every field and
/// pair. Energies come from [`weighted_energy`] on [`field_grid`].
///
/// Fails with [`Error::StructuralViolation`] if some record has a positive
/// difference while its modulus or energy vanishes.
pub fn run_certification(
    corpus: &[NamedField],
    pairs: &[(HalfSpacePoint, HalfSpacePoint)],
    params: &Params,
    variant: Variant,
    grid: &GridSpec,
) -> Result<CertReport> {
    let params = variant.effective_params(params);
    params.validate()?;
    for (x, y) in pairs {
        if x.dim() != params.n || y.dim() != params.n {
            return Err(Error::Precondition("pair dimension differs from n".into()));
        }
    }
    let mut energies: Vec<EnergyReport> = Vec::with_capacity(corpus.len());
    for f in corpus {
        if variant.is_compact() {
            require_compact_support(f)?;
        }
        energies.push(weighted_energy(&*f.field, &params, &field_grid(&*f.field, grid)?)?);
    }

    let jobs: Vec<(usize, usize)> = (0..corpus.len()).flat_map(|f| (0..pairs.len()).map(move |k| (f, k))).collect();
    let rows: Vec<Result<(CertRecord, f64)>> = jobs
        .par_iter()
        .map(|&(fi, k)| {
            let (x, y) = &pairs[k];
            let f = &corpus[fi];
            let e = &energies[fi];
            let difference = (f.field.value(x.coords()) - f.field.value(y.coords())).abs();
            let modulus = variant.modulus(&params, x, y);
            let ratio_at = |energy: f64| -> Result<f64> {
                if difference == 0.0 {
                    return Ok(0.0);
                }
                if modulus == 0.0 || energy == 0.0 {
                    return Err(Error::StructuralViolation(format!(
                        "field '{}' at ({x}) / ({y}): difference {difference} with modulus {modulus} and energy {energy}",
                        f.id
                    )));
                }
                Ok(difference / (modulus * pow(energy, 1.0 / params.p)))
            };
            let ratio = ratio_at(e.value)?;
            let coarse = ratio_at(e.coarse_value)?;
            let record = CertRecord { pair: (x.clone(), y.clone()), field_id: f.id.clone(), modulus, energy: e.value, difference, ratio };
            Ok((record, coarse))
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let (sup_ratio, argmax) = first_max(rows.iter().map(|(r, _)| r.ratio));
    let (coarse_sup_ratio, _) = first_max(rows.iter().map(|(_, c)| *c));
    Ok(CertReport {
        variant,
        records: rows.into_iter().map(|(r, _)| r).collect(),
        sup_ratio,
        argmax,
        coarse_sup_ratio,
        grid_stability: relative_gap(sup_ratio, coarse_sup_ratio),
    })
}

/// `|u(x) − u(y)| / E(u)^{1/p}` for one construction, `None` when the
/// construction's energy cannot be integrated on this configuration.
fn construction_ratio(
    field: &dyn ScalarField,
    x: &HalfSpacePoint,
    y: &HalfSpacePoint,
    params: &Params,
    grid: &GridSpec,
) -> Result<Option<f64>> {
    let difference = (field.value(x.coords()) - field.value(y.coords())).abs();
    let energy = match weighted_energy(field, params, &field_grid(field, grid)?) {
        Ok(e) => e.value,
        Err(Error::NonIntegrable(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    Ok((energy > 0.0).then(|| difference / pow(energy, 1.0 / params.p)))
}

/// Largest ratio `|u(x) − u(y)| / E(u)^{1/p}` over the extremal
/// constructions, symmetrised in `x ↔ y`. Any admissible modulus — in
/// particular the optimal one — is at least this value (up to quadrature error).
///
/// Constructions: a bump at `y` of radius `min(y_n, |x−y|)/2`; unless
/// `compact`, a bump of radius `|x−y|` and, for `γ = p − n` and
/// `|x−y| > y_n`, the logarithmic bump of radius `|x−y|`; for `n = 1` the
/// logarithmic bump between the points and (unless `compact`) the sharp profile.
/// `grid` supplies the resolution; each construction is integrated over its own box.
pub fn lower_bound_omega(x: &HalfSpacePoint, y: &HalfSpacePoint, params: &Params, compact: bool, grid: &GridSpec) -> Result<f64> {
    params.validate()?;
    if x == y {
        return Err(Error::Precondition("lower bound needs two distinct points".into()));
    }
    if x.dim() != params.n || y.dim() != params.n {
        return Err(Error::Precondition("pair dimension differs from n".into()));
    }
    let d = x.distance(y);
    let mut best: f64 = 0.0;
    for (a, b) in [(x, y), (y, x)] {
        let mut fields: Vec<Box<dyn ScalarField>> = vec![Box::new(bump(b, 0.5 * b.height().min(d))?)];
        if !compact {
            fields.push(Box::new(bump(b, d)?));
            if params.theta_params().kappa.abs() <= KAPPA_TIE && d > b.height() {
                fields.push(Box::new(log_bump(b, d)?));
            }
        }
        if params.n == 1 {
            fields.push(Box::new(oned_log_bump(a.height(), b.height())?));
            if !compact {
                fields.push(Box::new(oned_sharp_profile(params, a.height(), b.height())?));
            }
        }
        for f in &fields {
            if let Some(r) = construction_ratio(f.as_ref(), a, b, params, grid)? {
                best = best.max(r);
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseBound {
    /// `max |u(x)| / (x_n^{1−(n+γ)/p} · E^{1/p})` with the fine energy.
    pub value: f64,
    /// The same with the energy at half the resolution.
    pub coarse_value: f64,
}

impl PointwiseBound {
    pub fn refinement_delta(&self) -> f64 {
        relative_gap(self.value, self.coarse_value)
    }
}

/// Scaled values `|u(x)| / (x_n^{1−(n+γ)/p} · E(u)^{1/p})` of a field compactly
/// supported in the open half-space; requires `γ < p − 1`.
pub fn check_pointwise_bound(
    field: &dyn ScalarField,
    params: &Params,
    samples: &[HalfSpacePoint],
    grid: &GridSpec,
) -> Result<PointwiseBound> {
    params.validate()?;
    if params.gamma >= params.p - 1.0 {
        return Err(Error::Precondition(format!("pointwise decay bound needs gamma < p - 1, got gamma = {}", params.gamma)));
    }
    match field.support_box() {
        Some(b) if b.floor() > 0.0 => {}
        _ => return Err(Error::Precondition("field is not compactly supported in the open half-space".into())),
    }
    let energy = weighted_energy(field, params, &field_grid(field, grid)?)?;
    let exponent = params.homogeneity_exponent();
    let scaled = |e: f64| -> f64 {
        samples
            .iter()
            .map(|x| {
                let v = field.value(x.coords()).abs();
                if v == 0.0 {
                    0.0
                } else {
                    v / (pow(x.height(), exponent) * pow(e, 1.0 / params.p))
                }
            })
            .fold(0.0, f64::max)
    };
    Ok(PointwiseBound { value: scaled(energy.value), coarse_value: scaled(energy.coarse_value) })
}

/// Largest ratio of the saturated Θ branch to the intermediate one over
/// `pairs` (coincident pairs skipped). Never exceeds 1 in exact arithmetic.
pub fn case_ordering_audit(tp: &ThetaParams, pairs: &[(HalfSpacePoint, HalfSpacePoint)]) -> Result<f64> {
    if !(tp.kappa > 0.0 && tp.beta > 0.0) {
        return Err(Error::Precondition(format!("case ordering needs kappa > 0 and beta > 0, got {tp:?}")));
    }
    Ok(pairs
        .iter()
        .filter(|(x, y)| x != y)
        .map(|(x, y)| theta_branch(ThetaCase::Saturated, tp, x, y) / theta_branch(ThetaCase::Intermediate, tp, x, y))
        .fold(0.0, f64::max))
}

const PRIMES: [u32; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % b) as f64 * inv;
        i /= b;
        inv /= base as f64;
    }
    out
}

/// `count` pairs from a Halton sequence in `region × region` with a seeded
/// Cranley–Patterson shift. `region` must lie in the closed half-space; a
/// sampled height of exactly 0 is nudged into the open half-space.
pub fn sample_pairs(region: &BoxRegion, count: usize, seed: u64) -> Result<Vec<(HalfSpacePoint, HalfSpacePoint)>> {
    let region = BoxRegion::new(region.lower.clone(), region.upper.clone())?;
    if region.floor() < 0.0 {
        return Err(Error::InvalidGrid("sampling box must lie in the closed half-space".into()));
    }
    let n = region.dim();
    if 2 * n > PRIMES.len() {
        return Err(Error::Precondition(format!("pair sampling supports n <= {}", PRIMES.len() / 2)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..2 * n).map(|_| rng.gen::<f64>()).collect();
    let point = |i: u64, offset: usize| -> Result<HalfSpacePoint> {
        let coords = (0..n)
            .map(|k| {
                let u = (radical_inverse(i, PRIMES[offset + k]) + shift[offset + k]).fract();
                let c = region.lower[k] + (region.upper[k] - region.lower[k]) * u;
                if k + 1 == n && c <= 0.0 {
                    region.upper[k] * f64::EPSILON
                } else {
                    c
                }
            })
            .collect();
        HalfSpacePoint::from_coords(coords)
    };
    (1..=count as u64).map(|i| Ok((point(i, 0)?, point(i, n)?))).collect()
}
