//! Test-function families that realise the lower bounds: radial bumps,
//! logarithmic bumps for the scale-invariant weight, and the one-dimensional
//! profiles. All gradients are exact.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::modulus::{pow, Params};
use crate::point::{euclid, BoxRegion, HalfSpacePoint};

/// Cutoff profile: 1 on `[0, 1/2]`, 0 on `[1, ∞)`, quintic smoothstep in between.
#[derive(Debug, Clone, Copy, Default)]
pub struct BumpProfile;

impl BumpProfile {
    /// Largest `|transition′|`, attained at `s = 3/4`.
    pub const MAX_SLOPE: f64 = 3.75;

    pub fn transition(s: f64) -> f64 {
        if s <= 0.5 {
            1.0
        } else if s >= 1.0 {
            0.0
        } else {
            let t = 2.0 * s - 1.0;
            1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
        }
    }

    pub fn transition_derivative(s: f64) -> f64 {
        if s <= 0.5 || s >= 1.0 {
            0.0
        } else {
            let t = 2.0 * s - 1.0;
            let u = t * (1.0 - t);
            -60.0 * u * u
        }
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Precondition(format!("radius {r} must be positive and finite")))
    }
}

/// `ψ_{y,R}(z) = transition(|z − y| / R)`.
#[derive(Debug, Clone)]
pub struct Bump {
    center: Vec<f64>,
    radius: f64,
}

impl Bump {
    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

pub fn bump(y: &HalfSpacePoint, r: f64) -> Result<Bump> {
    check_radius(r)?;
    Ok(Bump { center: y.coords().to_vec(), radius: r })
}

impl ScalarField for Bump {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn value(&self, z: &[f64]) -> f64 {
        BumpProfile::transition(euclid(z, &self.center) / self.radius)
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        let r = euclid(z, &self.center);
        let d = BumpProfile::transition_derivative(r / self.radius);
        if d == 0.0 {
            out.fill(0.0);
            return;
        }
        let scale = d / (self.radius * r);
        for ((o, zi), ci) in out.iter_mut().zip(z).zip(&self.center) {
            *o = scale * (zi - ci);
        }
    }
    fn support_box(&self) -> Option<BoxRegion> {
        Some(BoxRegion::cube(&self.center, self.radius))
    }
}

/// Scaling envelope `R^{n−p}·max(y_n, R)^γ` of the bump energy, without its constant.
pub fn bump_energy_envelope(params: &Params, y: &HalfSpacePoint, r: f64) -> f64 {
    pow(r, params.n as f64 - params.p) * pow(y.height().max(r), params.gamma)
}

/// `θ_{y,R}(z) = θ(ln(|z − y| / y_n) / ln(R / y_n))` with `θ(t) = transition((t + 1)/2)`.
///
/// Equals 1 on the ball of radius `y_n` and 0 outside radius `R`.
#[derive(Debug, Clone)]
pub struct LogBump {
    center: Vec<f64>,
    inner: f64,
    radius: f64,
    log_ratio: f64,
}

pub fn log_bump(y: &HalfSpacePoint, r: f64) -> Result<LogBump> {
    check_radius(r)?;
    let inner = y.height();
    if r <= inner {
        return Err(Error::Precondition(format!("log bump needs R > y_n, got R = {r}, y_n = {inner}")));
    }
    Ok(LogBump { center: y.coords().to_vec(), inner, radius: r, log_ratio: (r / inner).ln() })
}

impl LogBump {
    fn profile_arg(&self, r: f64) -> f64 {
        // (t + 1)/2 with t = ln(r / y_n)/ln(R / y_n); r = 0 maps below 1/2.
        if r <= self.inner {
            0.0
        } else {
            0.5 * ((r / self.inner).ln() / self.log_ratio + 1.0)
        }
    }

    pub fn log_ratio(&self) -> f64 {
        self.log_ratio
    }
}

impl ScalarField for LogBump {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn value(&self, z: &[f64]) -> f64 {
        BumpProfile::transition(self.profile_arg(euclid(z, &self.center)))
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        let r = euclid(z, &self.center);
        let d = BumpProfile::transition_derivative(self.profile_arg(r));
        if d == 0.0 {
            out.fill(0.0);
            return;
        }
        // dθ/dr = transition′·(1/2)·1/(r·L), then times (z − y)/r.
        let scale = 0.5 * d / (self.log_ratio * r * r);
        for ((o, zi), ci) in out.iter_mut().zip(z).zip(&self.center) {
            *o = scale * (zi - ci);
        }
    }
    fn support_box(&self) -> Option<BoxRegion> {
        Some(BoxRegion::cube(&self.center, self.radius))
    }
}

/// One-dimensional `ψ_{x,y}(z) = ψ(ln(z/y) / ln(x/y))` with `ψ(t) = transition(|t|)`.
///
/// Value 1 at `y`, 0 at `x`, supported between `y²/x` and `x`.
#[derive(Debug, Clone)]
pub struct OneDLogBump {
    y: f64,
    log_ratio: f64,
    support: (f64, f64),
}

pub fn oned_log_bump(x: f64, y: f64) -> Result<OneDLogBump> {
    if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::OutsideHalfSpace(format!("points {x}, {y} must be positive")));
    }
    if x == y {
        return Err(Error::Precondition("one-dimensional log bump needs x != y".into()));
    }
    let mirror = y * y / x;
    Ok(OneDLogBump { y, log_ratio: (x / y).ln(), support: (x.min(mirror), x.max(mirror)) })
}

impl OneDLogBump {
    fn arg(&self, z: f64) -> Option<f64> {
        (z > 0.0).then(|| (z / self.y).ln() / self.log_ratio)
    }

    pub fn log_ratio(&self) -> f64 {
        self.log_ratio
    }
}

impl ScalarField for OneDLogBump {
    fn dim(&self) -> usize {
        1
    }
    fn value(&self, z: &[f64]) -> f64 {
        self.arg(z[0]).map_or(0.0, |t| BumpProfile::transition(t.abs()))
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        out[0] = match self.arg(z[0]) {
            Some(t) => t.signum() * BumpProfile::transition_derivative(t.abs()) / (z[0] * self.log_ratio),
            None => 0.0,
        };
    }
    fn support_box(&self) -> Option<BoxRegion> {
        Some(BoxRegion { lower: vec![self.support.0], upper: vec![self.support.1] })
    }
}

/// Hölder-extremal profile `u(z) = ∫_a^{clamp(z)} t^{−γ/(p−1)} dt` on `[a, b] = [min, max]`.
#[derive(Debug, Clone)]
pub struct OneDSharpProfile {
    lo: f64,
    hi: f64,
    exponent: f64,
}

pub fn oned_sharp_profile(params: &Params, x: f64, y: f64) -> Result<OneDSharpProfile> {
    params.validate()?;
    if params.n != 1 {
        return Err(Error::Precondition(format!("sharp profile is one-dimensional, got n = {}", params.n)));
    }
    if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::OutsideHalfSpace(format!("points {x}, {y} must be positive")));
    }
    Ok(OneDSharpProfile { lo: x.min(y), hi: x.max(y), exponent: -params.gamma / (params.p - 1.0) })
}

impl OneDSharpProfile {
    /// `∫_a^c t^e dt` for `c ∈ [a, b]`.
    fn primitive(&self, c: f64) -> f64 {
        let e1 = self.exponent + 1.0;
        if e1.abs() < 1e-14 {
            (c / self.lo).ln()
        } else {
            (pow(c, e1) - pow(self.lo, e1)) / e1
        }
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
}

impl ScalarField for OneDSharpProfile {
    fn dim(&self) -> usize {
        1
    }
    fn value(&self, z: &[f64]) -> f64 {
        if self.lo == self.hi {
            return 0.0;
        }
        self.primitive(z[0].clamp(self.lo, self.hi))
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        out[0] = if self.lo < z[0] && z[0] < self.hi { pow(z[0], self.exponent) } else { 0.0 };
    }
    fn energy_box(&self) -> Option<BoxRegion> {
        (self.lo < self.hi).then(|| BoxRegion { lower: vec![self.lo], upper: vec![self.hi] })
    }
}

/// `P((z − y)/R)·ψ_{y,R}(z)` with `P(w) = 1 + ⟨a, w⟩ + b·|w|²`.
#[derive(Debug, Clone)]
pub struct PolyBump {
    bump: Bump,
    linear: Vec<f64>,
    quadratic: f64,
}

pub fn poly_bump(y: &HalfSpacePoint, r: f64, linear: &[f64], quadratic: f64) -> Result<PolyBump> {
    if linear.len() != y.dim() {
        return Err(Error::Precondition("one linear coefficient per coordinate required".into()));
    }
    Ok(PolyBump { bump: bump(y, r)?, linear: linear.to_vec(), quadratic })
}

impl PolyBump {
    fn poly(&self, z: &[f64]) -> f64 {
        let mut acc = 1.0;
        let mut w2 = 0.0;
        for ((zi, ci), a) in z.iter().zip(self.bump.center()).zip(&self.linear) {
            let w = (zi - ci) / self.bump.radius();
            acc += a * w;
            w2 += w * w;
        }
        acc + self.quadratic * w2
    }
}

impl ScalarField for PolyBump {
    fn dim(&self) -> usize {
        self.bump.dim()
    }
    fn value(&self, z: &[f64]) -> f64 {
        let b = self.bump.value(z);
        if b == 0.0 {
            0.0
        } else {
            self.poly(z) * b
        }
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        let b = self.bump.value(z);
        if b == 0.0 {
            out.fill(0.0);
            return;
        }
        self.bump.gradient(z, out);
        let p = self.poly(z);
        let r = self.bump.radius();
        for (k, o) in out.iter_mut().enumerate() {
            let w = (z[k] - self.bump.center()[k]) / r;
            *o = p * *o + b * (self.linear[k] + 2.0 * self.quadratic * w) / r;
        }
    }
    fn support_box(&self) -> Option<BoxRegion> {
        self.bump.support_box()
    }
}
