//! Line-based `key = value` run configuration.
//!
//! ```text
//! command = omega        # theta | certify | omega | hyperbolic | audit
//! n = 1
//! gamma = 0
//! p = 2
//! pair = 1;2             # x;y, last coordinate is the height
//! ```
//!
//! `pair` and `field` may repeat; every other key appears at most once.
//! `x` and `y` together are shorthand for one extra `pair`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use morrey_core::extremals::{bump, log_bump, oned_sharp_profile, poly_bump};
use morrey_core::field::Lifted;
use morrey_core::{BoxRegion, HalfSpacePoint, NamedField, Params, Resolution, SolverConfig, Variant};

use crate::error::{CliError, Origin};

/// Every recognised key, in rendering order.
pub const KEYS: &[&str] = &[
    "command",
    "n",
    "gamma",
    "p",
    "box_lower",
    "box_upper",
    "cells",
    "grading",
    "max_iterations",
    "stop_rel_energy",
    "smoothing_epsilon",
    "line_search_shrink",
    "warm_start",
    "seed",
    "pairs",
    "pair",
    "x",
    "y",
    "sample_lower",
    "sample_upper",
    "sample_count",
    "field",
    "variant",
    "out",
];

/// Keys that may appear more than once.
pub const LIST_KEYS: &[&str] = &["pair", "field"];

pub const DEFAULT_CELLS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Theta,
    Certify,
    Omega,
    Hyperbolic,
    Audit,
}

impl Command {
    pub const ALL: [Command; 5] = [Command::Theta, Command::Certify, Command::Omega, Command::Hyperbolic, Command::Audit];

    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Theta => "theta",
            Command::Certify => "certify",
            Command::Omega => "omega",
            Command::Hyperbolic => "hyperbolic",
            Command::Audit => "audit",
        }
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| format!("unknown command '{s}' (expected theta, certify, omega, hyperbolic or audit)"))
    }
}

pub type Pair = (HalfSpacePoint, HalfSpacePoint);

#[derive(Debug, Clone, PartialEq)]
pub enum PairSource {
    Inline(Vec<Pair>),
    /// Seeded low-discrepancy pairs in `region`; the seed is [`RunConfig::seed`].
    Sample {
        region: BoxRegion,
        count: usize,
    },
}

/// One certification field, written as `kind arg arg …`.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldSpec {
    /// `bump <centre> <radius>`
    Bump { center: HalfSpacePoint, radius: f64 },
    /// `log_bump <centre> <radius>`
    LogBump { center: HalfSpacePoint, radius: f64 },
    /// `poly_bump <centre> <radius> <linear coefficients> <quadratic coefficient>`
    PolyBump { center: HalfSpacePoint, radius: f64, linear: Vec<f64>, quadratic: f64 },
    /// `sharp_profile <a> <b>`: the one-dimensional sharp profile lifted to depend on the height only.
    SharpProfile { lo: f64, hi: f64 },
}

impl FieldSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            FieldSpec::Bump { .. } => "bump",
            FieldSpec::LogBump { .. } => "log_bump",
            FieldSpec::PolyBump { .. } => "poly_bump",
            FieldSpec::SharpProfile { .. } => "sharp_profile",
        }
    }

    /// Builds the field under the identifier `id`.
    pub fn build(&self, id: &str, params: &Params) -> morrey_core::Result<NamedField> {
        Ok(match self {
            FieldSpec::Bump { center, radius } => NamedField::new(id, bump(center, *radius)?),
            FieldSpec::LogBump { center, radius } => NamedField::new(id, log_bump(center, *radius)?),
            FieldSpec::PolyBump { center, radius, linear, quadratic } => {
                NamedField::new(id, poly_bump(center, *radius, linear, *quadratic)?)
            }
            FieldSpec::SharpProfile { lo, hi } => {
                let profile = oned_sharp_profile(&Params::new(1, params.gamma, params.p)?, *lo, *hi)?;
                NamedField::new(id, Lifted::vertical(Arc::new(profile), params.n))
            }
        })
    }

    fn render(&self) -> String {
        match self {
            FieldSpec::Bump { center, radius } | FieldSpec::LogBump { center, radius } => format!("{} {center} {radius}", self.kind()),
            FieldSpec::PolyBump { center, radius, linear, quadratic } => {
                format!("{} {center} {radius} {} {quadratic}", self.kind(), join(linear))
            }
            FieldSpec::SharpProfile { lo, hi } => format!("{} {lo} {hi}", self.kind()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub params: Params,
    /// Integration / solver box. Optional for commands that can pick one per pair or per field.
    pub region: Option<BoxRegion>,
    pub resolution: Resolution,
    /// `solver.seed` mirrors `seed` (0 when unset).
    pub solver: SolverConfig,
    pub seed: Option<u64>,
    pub pairs: PairSource,
    pub fields: Vec<FieldSpec>,
    /// `None` runs every variant that applies to the command.
    pub variant: Option<Variant>,
    /// `None` writes to standard output.
    pub output: Option<PathBuf>,
}

/// One `key = value` assignment with its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub origin: Origin,
}

impl Entry {
    pub fn flag(key: &str, value: impl Into<String>) -> Self {
        Self { key: key.to_string(), value: value.into(), origin: Origin::Flag }
    }

    fn err(&self, message: impl Into<String>) -> CliError {
        CliError::config(self.origin, &self.key, message)
    }
}

/// Splits a document into entries; rejects unknown keys, malformed lines and repeated scalar keys.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>, CliError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let origin = Origin::Line(i + 1);
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| CliError::config(origin, line, "expected 'key = value'"))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::config(origin, key, "unknown key"));
        }
        if !LIST_KEYS.contains(&key) {
            if let Some(prev) = entries.iter().find(|e| e.key == key) {
                let first = match prev.origin {
                    Origin::Line(n) => format!(" (first set on line {n})"),
                    _ => String::new(),
                };
                return Err(CliError::config(origin, key, format!("key repeated{first}")));
            }
        }
        entries.push(Entry { key: key.to_string(), value: value.trim().to_string(), origin });
    }
    Ok(entries)
}

/// Applies `overrides` on top of `base`: a scalar key replaces the base
/// value; a list key given in `overrides` replaces the whole base list.
pub fn merge(base: Vec<Entry>, overrides: Vec<Entry>) -> Vec<Entry> {
    let mut out: Vec<Entry> = base.into_iter().filter(|b| !overrides.iter().any(|o| o.key == b.key)).collect();
    out.extend(overrides);
    out
}

pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    from_entries(&parse_entries(text)?)
}

/// Decimal notation only: optional sign, digits, optional fraction.
pub fn parse_real(s: &str) -> Option<f64> {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    let digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if body.is_empty() || (int.is_empty() && frac.is_empty()) || !digits(int) || !digits(frac) {
        return None;
    }
    s.parse().ok()
}

fn real(e: &Entry, text: &str) -> Result<f64, CliError> {
    parse_real(text.trim()).ok_or_else(|| e.err(format!("malformed number '{}'", text.trim())))
}

fn count<T: FromStr>(e: &Entry) -> Result<T, CliError> {
    if e.value.is_empty() || !e.value.bytes().all(|b| b.is_ascii_digit()) {
        return Err(e.err(format!("malformed integer '{}'", e.value)));
    }
    e.value.parse().map_err(|_| e.err(format!("integer '{}' out of range", e.value)))
}

fn vector(e: &Entry, text: &str, len: usize) -> Result<Vec<f64>, CliError> {
    let v = text.split(',').map(|c| real(e, c)).collect::<Result<Vec<_>, _>>()?;
    if v.len() != len {
        return Err(e.err(format!("expected {len} comma-separated values, got {}", v.len())));
    }
    Ok(v)
}

fn point(e: &Entry, text: &str, n: usize) -> Result<HalfSpacePoint, CliError> {
    let coords = vector(e, text, n)?;
    if !(coords[n - 1] > 0.0) {
        return Err(e.err(format!("height {} must be > 0", coords[n - 1])));
    }
    HalfSpacePoint::from_coords(coords).map_err(|err| e.err(err.to_string()))
}

fn pair(e: &Entry, n: usize) -> Result<Pair, CliError> {
    let (x, y) = e.value.split_once(';').ok_or_else(|| e.err("expected '<x>;<y>'"))?;
    Ok((point(e, x, n)?, point(e, y, n)?))
}

fn field(e: &Entry, n: usize) -> Result<FieldSpec, CliError> {
    let parts: Vec<&str> = e.value.split_whitespace().collect();
    let want = |k: usize| -> Result<(), CliError> {
        if parts.len() == k + 1 {
            Ok(())
        } else {
            Err(e.err(format!("field '{}' takes {k} arguments, got {}", parts[0], parts.len() - 1)))
        }
    };
    let radius = |t: &str| -> Result<f64, CliError> {
        let r = real(e, t)?;
        if r > 0.0 {
            Ok(r)
        } else {
            Err(e.err(format!("radius {r} must be > 0")))
        }
    };
    match parts.first().copied() {
        Some("bump") => {
            want(2)?;
            Ok(FieldSpec::Bump { center: point(e, parts[1], n)?, radius: radius(parts[2])? })
        }
        Some("log_bump") => {
            want(2)?;
            Ok(FieldSpec::LogBump { center: point(e, parts[1], n)?, radius: radius(parts[2])? })
        }
        Some("poly_bump") => {
            want(4)?;
            Ok(FieldSpec::PolyBump {
                center: point(e, parts[1], n)?,
                radius: radius(parts[2])?,
                linear: vector(e, parts[3], n)?,
                quadratic: real(e, parts[4])?,
            })
        }
        Some("sharp_profile") => {
            want(2)?;
            let (lo, hi) = (real(e, parts[1])?, real(e, parts[2])?);
            if !(lo > 0.0 && hi > 0.0) {
                return Err(e.err("sharp_profile endpoints must be > 0"));
            }
            Ok(FieldSpec::SharpProfile { lo, hi })
        }
        Some(other) => Err(e.err(format!("unknown field kind '{other}' (expected bump, log_bump, poly_bump or sharp_profile)"))),
        None => Err(e.err("empty field specification")),
    }
}

fn parse_region(lower: &Entry, upper: &Entry, n: usize) -> Result<BoxRegion, CliError> {
    let lo = vector(lower, &lower.value, n)?;
    let hi = vector(upper, &upper.value, n)?;
    if lo[n - 1] < 0.0 {
        return Err(lower.err("box must lie in the closed half-space (last coordinate >= 0)"));
    }
    BoxRegion::new(lo, hi).map_err(|err| upper.err(err.to_string()))
}

/// Validates `entries` into a [`RunConfig`]. The last entry for a scalar key wins.
pub fn from_entries(entries: &[Entry]) -> Result<RunConfig, CliError> {
    let mut scalar: BTreeMap<&str, &Entry> = BTreeMap::new();
    for e in entries {
        if !KEYS.contains(&e.key.as_str()) {
            return Err(e.err("unknown key"));
        }
        if !LIST_KEYS.contains(&e.key.as_str()) {
            scalar.insert(e.key.as_str(), e);
        }
    }
    let list = |key: &'static str| entries.iter().filter(move |e| e.key == key);
    let required = |key: &str| scalar.get(key).copied().ok_or_else(|| CliError::config(Origin::Default, key, "missing required key"));

    let command_entry = required("command")?;
    let command: Command = command_entry.value.parse().map_err(|m: String| command_entry.err(m))?;

    let n_entry = required("n")?;
    let n: usize = count(n_entry)?;
    if n == 0 {
        return Err(n_entry.err("dimension must be >= 1"));
    }
    let gamma_entry = required("gamma")?;
    let gamma = real(gamma_entry, &gamma_entry.value)?;
    let p_entry = required("p")?;
    let p = real(p_entry, &p_entry.value)?;
    let params = Params::new(n, gamma, p).map_err(|err| p_entry.err(err.to_string()))?;

    let region = match (scalar.get("box_lower"), scalar.get("box_upper")) {
        (Some(lo), Some(hi)) => Some(parse_region(lo, hi, n)?),
        (None, None) => None,
        (Some(e), None) | (None, Some(e)) => return Err(e.err("box_lower and box_upper must be given together")),
    };

    let cells = match scalar.get("cells") {
        Some(e) => {
            let c: usize = count(e)?;
            if c < 2 {
                return Err(e.err("need at least 2 cells per axis"));
            }
            c
        }
        None => DEFAULT_CELLS,
    };
    let grading = match scalar.get("grading") {
        Some(e) => {
            let q = real(e, &e.value)?;
            if !(q >= 1.0) {
                return Err(e.err(format!("grading exponent {q} must be >= 1")));
            }
            Some(q)
        }
        None => None,
    };
    let resolution = Resolution { cells, grading };

    let seed = scalar.get("seed").map(|e| count::<u64>(e)).transpose()?;
    let mut solver = SolverConfig { seed: seed.unwrap_or(0), ..SolverConfig::default_for(&params) };
    if let Some(e) = scalar.get("max_iterations") {
        solver.max_iterations = count(e)?;
        if solver.max_iterations == 0 {
            return Err(e.err("max_iterations must be positive"));
        }
    }
    for (key, slot) in [
        ("stop_rel_energy", &mut solver.stop_rel_energy),
        ("smoothing_epsilon", &mut solver.smoothing_epsilon),
        ("line_search_shrink", &mut solver.line_search_shrink),
    ] {
        if let Some(e) = scalar.get(key) {
            *slot = real(e, &e.value)?;
        }
    }
    if let Some(e) = scalar.get("warm_start") {
        solver.warm_start = match e.value.as_str() {
            "true" => true,
            "false" => false,
            other => return Err(e.err(format!("expected true or false, got '{other}'"))),
        };
    }
    if let Err(err) = solver.validate() {
        let e = ["stop_rel_energy", "smoothing_epsilon", "line_search_shrink"].iter().find_map(|k| scalar.get(k));
        return Err(match e {
            Some(e) => e.err(err.to_string()),
            None => CliError::config(Origin::Default, "solver", err.to_string()),
        });
    }

    let mut inline = list("pair").map(|e| pair(e, n)).collect::<Result<Vec<_>, _>>()?;
    match (scalar.get("x"), scalar.get("y")) {
        (Some(x), Some(y)) => inline.push((point(x, &x.value, n)?, point(y, &y.value, n)?)),
        (None, None) => {}
        (Some(e), None) | (None, Some(e)) => return Err(e.err("x and y must be given together")),
    }
    let sample_keys = ["sample_lower", "sample_upper", "sample_count"];
    let pairs = match scalar.get("pairs").map(|e| (e, e.value.as_str())) {
        None | Some((_, "inline")) => {
            if let Some(e) = sample_keys.iter().find_map(|k| scalar.get(k)) {
                return Err(e.err("sampler keys need 'pairs = sample'"));
            }
            PairSource::Inline(inline)
        }
        Some((e, "sample")) => {
            if seed.is_none() {
                return Err(e.err("'pairs = sample' requires a seed"));
            }
            if let Some(first) = list("pair").next().or_else(|| scalar.get("x").copied()) {
                return Err(first.err("inline pairs conflict with 'pairs = sample'"));
            }
            let lo = scalar.get("sample_lower").copied().ok_or_else(|| e.err("missing sample_lower"))?;
            let hi = scalar.get("sample_upper").copied().ok_or_else(|| e.err("missing sample_upper"))?;
            let count_entry = scalar.get("sample_count").copied().ok_or_else(|| e.err("missing sample_count"))?;
            let sample_region = parse_region(lo, hi, n)?;
            if !(sample_region.floor() > 0.0) {
                return Err(lo.err("sampling box must lie strictly above the boundary"));
            }
            PairSource::Sample { region: sample_region, count: count(count_entry)? }
        }
        Some((e, other)) => return Err(e.err(format!("expected inline or sample, got '{other}'"))),
    };

    let fields = list("field").map(|e| field(e, n)).collect::<Result<Vec<_>, _>>()?;

    let variant = match scalar.get("variant") {
        Some(e) => Some(e.value.parse::<Variant>().map_err(|err| e.err(err.to_string()))?),
        None => None,
    };
    if let (Command::Hyperbolic, Some(v), Some(e)) = (command, variant, scalar.get("variant")) {
        if !v.is_hyperbolic() {
            return Err(e.err("the hyperbolic command takes variant hyperbolic or hyperbolic_compact"));
        }
    }

    let output = match scalar.get("out") {
        Some(e) if e.value.is_empty() => return Err(e.err("empty output path")),
        Some(e) => Some(PathBuf::from(&e.value)),
        None => None,
    };

    Ok(RunConfig { command, params, region, resolution, solver, seed, pairs, fields, variant, output })
}

fn join(v: &[f64]) -> String {
    v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
}

/// Writes `config` as a document that [`parse_config`] maps back to it.
pub fn render(config: &RunConfig) -> String {
    let mut s = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(s, "{k} = {v}");
    };
    put("command", config.command.as_str().to_string());
    put("n", config.params.n.to_string());
    put("gamma", config.params.gamma.to_string());
    put("p", config.params.p.to_string());
    if let Some(r) = &config.region {
        put("box_lower", join(&r.lower));
        put("box_upper", join(&r.upper));
    }
    put("cells", config.resolution.cells.to_string());
    if let Some(q) = config.resolution.grading {
        put("grading", q.to_string());
    }
    let cfg = &config.solver;
    put("max_iterations", cfg.max_iterations.to_string());
    put("stop_rel_energy", cfg.stop_rel_energy.to_string());
    put("smoothing_epsilon", cfg.smoothing_epsilon.to_string());
    put("line_search_shrink", cfg.line_search_shrink.to_string());
    put("warm_start", cfg.warm_start.to_string());
    if let Some(seed) = config.seed {
        put("seed", seed.to_string());
    }
    match &config.pairs {
        PairSource::Inline(pairs) => {
            put("pairs", "inline".into());
            for (x, y) in pairs {
                put("pair", format!("{x};{y}"));
            }
        }
        PairSource::Sample { region, count } => {
            put("pairs", "sample".into());
            put("sample_lower", join(&region.lower));
            put("sample_upper", join(&region.upper));
            put("sample_count", count.to_string());
        }
    }
    for f in &config.fields {
        put("field", f.render());
    }
    if let Some(v) = config.variant {
        put("variant", v.as_str().to_string());
    }
    if let Some(out) = &config.output {
        put("out", out.display().to_string());
    }
    s
}
