//! Closed-form moduli of continuity on the half-space.
//!
//! [`theta`] is the four-branch modulus governing the weighted embedding for
//! general fields, [`theta0`] its two-branch variant for fields compactly
//! supported in the open half-space. The hyperbolic helpers cover the
//! Poincaré half-space model, where the weighted energy with `γ = p − n`
//! is the hyperbolic Dirichlet energy.

use crate::error::{Error, Result};
use crate::point::HalfSpacePoint;

/// Branch selection tolerance for `κ = 0` and `κ = 1 + β − α`.
///
/// Exponents come out of floating point arithmetic, so exact ties are
/// detected up to this absolute slack.
pub const KAPPA_TIE: f64 = 1e-12;

/// Dimension `n`, weight exponent `γ` and integrability exponent `p > n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    pub n: usize,
    pub gamma: f64,
    pub p: f64,
}

impl Params {
    pub fn new(n: usize, gamma: f64, p: f64) -> Result<Self> {
        let params = Self { n, gamma, p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("dimension n must be >= 1".into()));
        }
        if !self.gamma.is_finite() {
            return Err(Error::InvalidParams(format!("gamma = {} is not finite", self.gamma)));
        }
        if !self.p.is_finite() {
            return Err(Error::InvalidParams(format!("p = {} is not finite", self.p)));
        }
        if self.p <= self.n as f64 {
            return Err(Error::InvalidParams(format!("need p > n, got p = {} and n = {}", self.p, self.n)));
        }
        Ok(())
    }

    /// Exponents `(α, β, κ) = (1 − 1/p, 1 − n/p, 1 − (n+γ)/p)`.
    pub fn theta_params(&self) -> ThetaParams {
        let n = self.n as f64;
        // Written as differences over p so that γ = p − n gives κ = 0 exactly.
        ThetaParams { alpha: (self.p - 1.0) / self.p, beta: (self.p - n) / self.p, kappa: ((self.p - n) - self.gamma) / self.p }
    }

    /// Exponent of the optimal modulus under dilation, `1 − (n+γ)/p`.
    pub fn homogeneity_exponent(&self) -> f64 {
        self.theta_params().kappa
    }

    /// Same `n` and `p` with `γ = p − n` (the hyperbolic weight).
    pub fn hyperbolic(&self) -> Params {
        Params { gamma: self.p - self.n as f64, ..*self }
    }

    /// Smoothness of the boundary trace space, `s = 1 − (γ+1)/p`.
    pub fn trace_smoothness(&self) -> f64 {
        1.0 - (self.gamma + 1.0) / self.p
    }
}

/// Fails with [`Error::InvalidParams`] for invalid params.
pub fn theta_params(params: &Params) -> Result<ThetaParams> {
    params.validate()?;
    Ok(params.theta_params())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaParams {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
}

/// The four branches of [`theta`], in definition order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaCase {
    /// `κ < 0`
    Negative,
    /// `κ = 0`
    Logarithmic,
    /// `0 < κ < 1 + β − α`
    Intermediate,
    /// `κ ≥ 1 + β − α`
    Saturated,
}

impl ThetaParams {
    pub fn new(alpha: f64, beta: f64, kappa: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParams(format!("alpha = {alpha} must be > 0")));
        }
        if !beta.is_finite() || !kappa.is_finite() {
            return Err(Error::InvalidParams("beta and kappa must be finite".into()));
        }
        Ok(Self { alpha, beta, kappa })
    }

    /// Threshold `1 + β − α` separating the last two branches.
    pub fn saturation(&self) -> f64 {
        1.0 + self.beta - self.alpha
    }

    pub fn case(&self) -> ThetaCase {
        if self.kappa.abs() <= KAPPA_TIE {
            ThetaCase::Logarithmic
        } else if self.kappa < 0.0 {
            ThetaCase::Negative
        } else if self.kappa >= self.saturation() - KAPPA_TIE {
            ThetaCase::Saturated
        } else {
            ThetaCase::Intermediate
        }
    }
}

/// `b^e`, via `powi` when the exponent is integral.
pub(crate) fn pow(b: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e.fract() == 0.0 && e.abs() <= 64.0 {
        b.powi(e as i32)
    } else {
        b.powf(e)
    }
}

/// Pair quantities shared by every branch.
#[derive(Debug, Clone, Copy)]
struct PairScales {
    dist: f64,
    low: f64,
    high: f64,
    /// `max(x_n, y_n, |x − y|)`
    top: f64,
}

impl PairScales {
    fn new(x: &HalfSpacePoint, y: &HalfSpacePoint) -> Self {
        let dist = x.distance(y);
        let (low, high) = if x.height() <= y.height() { (x.height(), y.height()) } else { (y.height(), x.height()) };
        Self { dist, low, high, top: high.max(dist) }
    }
}

/// Evaluates one specific branch formula regardless of where `κ` lies.
///
/// Used by the case-ordering audit; [`theta`] picks the branch from `κ`.
pub fn theta_branch(case: ThetaCase, tp: &ThetaParams, x: &HalfSpacePoint, y: &HalfSpacePoint) -> f64 {
    let s = PairScales::new(x, y);
    if s.dist == 0.0 {
        return 0.0;
    }
    branch(case, tp, s)
}

fn branch(case: ThetaCase, tp: &ThetaParams, s: PairScales) -> f64 {
    let shape = pow(s.dist / s.top, tp.beta);
    match case {
        // |x−y|^β / (min^{−κ} · top^β)
        ThetaCase::Negative => pow(s.low, tp.kappa) * shape,
        ThetaCase::Logarithmic => pow((pow(s.dist / s.low, tp.beta / tp.alpha)).ln_1p(), tp.alpha),
        // |x−y|^β / top^{β−κ}
        ThetaCase::Intermediate => shape * pow(s.top, tp.kappa),
        ThetaCase::Saturated => pow(s.high, tp.kappa) * shape,
    }
}

/// The four-branch modulus `Θ_{α,β,κ}(x, y)`.
///
/// Returns 0 for `x = y` without evaluating any power of zero.
pub fn theta(tp: &ThetaParams, x: &HalfSpacePoint, y: &HalfSpacePoint) -> f64 {
    let s = PairScales::new(x, y);
    if s.dist == 0.0 {
        return 0.0;
    }
    branch(tp.case(), tp, s)
}

/// The two-branch modulus `Θ⁰_{β,κ}(x, y)` for compactly supported fields.
pub fn theta0(beta: f64, kappa: f64, x: &HalfSpacePoint, y: &HalfSpacePoint) -> f64 {
    let s = PairScales::new(x, y);
    if s.dist == 0.0 {
        return 0.0;
    }
    let shape = pow(s.dist / s.top, beta);
    if kappa < 0.0 {
        pow(s.low, kappa) * shape
    } else {
        pow(s.high, kappa) * shape
    }
}

/// `Θ` with the exponents of the weighted embedding for `params`.
pub fn theta_for(params: &Params, x: &HalfSpacePoint, y: &HalfSpacePoint) -> f64 {
    theta(&params.theta_params(), x, y)
}

/// `Θ⁰` with the exponents of the compact-support embedding for `params`.
pub fn theta0_for(params: &Params, x: &HalfSpacePoint, y: &HalfSpacePoint) -> f64 {
    let tp = params.theta_params();
    theta0(tp.beta, tp.kappa, x, y)
}

/// Distance in the Poincaré half-space model.
pub fn hyperbolic_distance(x: &HalfSpacePoint, y: &HalfSpacePoint) -> f64 {
    let d = x.distance(y);
    2.0 * (d / (2.0 * (x.height() * y.height()).sqrt())).asinh()
}

/// The chain `|x−y|/√(x_n y_n) ≤ |x−y|/min(x_n,y_n) ≤ max(√2·lhs, 2·lhs²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConfSquare {
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
}

impl ConfSquare {
    pub fn holds(&self) -> bool {
        self.lhs <= self.mid && self.mid <= self.rhs
    }
}

pub fn conf_square_bounds(x: &HalfSpacePoint, y: &HalfSpacePoint) -> ConfSquare {
    let d = x.distance(y);
    let lhs = d / (x.height() * y.height()).sqrt();
    let mid = d / x.height().min(y.height());
    let rhs = (std::f64::consts::SQRT_2 * lhs).max(2.0 * lhs * lhs);
    ConfSquare { lhs, mid, rhs }
}

/// `max(d^{1−n/p}, d^{1−1/p})`, or `min(d^{1−n/p}, 1)` when `compact` is set.
pub fn hyperbolic_modulus(params: &Params, d: f64, compact: bool) -> f64 {
    let tp = params.theta_params();
    let near = pow(d, tp.beta);
    if compact {
        near.min(1.0)
    } else {
        near.max(pow(d, tp.alpha))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(c: &[f64]) -> HalfSpacePoint {
        HalfSpacePoint::from_coords(c.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn theta_params_examples() {
        let tp = theta_params(&Params { n: 2, gamma: 1.0, p: 3.0 }).unwrap();
        assert!(close(tp.alpha, 2.0 / 3.0, 1e-15) && close(tp.beta, 1.0 / 3.0, 1e-15));
        assert_eq!(tp.kappa, 0.0);
        let tp = theta_params(&Params { n: 1, gamma: 0.0, p: 2.0 }).unwrap();
        assert_eq!((tp.alpha, tp.beta, tp.kappa), (0.5, 0.5, 0.5));
        let tp = theta_params(&Params { n: 2, gamma: 4.0, p: 3.0 }).unwrap();
        assert!(close(tp.kappa, -1.0, 1e-15));
        assert!(matches!(theta_params(&Params { n: 2, gamma: 0.0, p: 2.0 }), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn theta_worked_examples() {
        let (x, y) = (pt(&[0.0, 1.0]), pt(&[0.0, 2.0]));
        let neg = ThetaParams::new(2.0 / 3.0, 1.0 / 3.0, -1.0).unwrap();
        assert_eq!(neg.case(), ThetaCase::Negative);
        assert!(close(theta(&neg, &x, &y), 2f64.powf(-1.0 / 3.0), 1e-14));

        let log = ThetaParams::new(2.0 / 3.0, 1.0 / 3.0, 0.0).unwrap();
        assert_eq!(log.case(), ThetaCase::Logarithmic);
        assert!(close(theta(&log, &x, &y), 2f64.ln().powf(2.0 / 3.0), 1e-14));

        let mid = ThetaParams::new(0.75, 0.5, 0.5).unwrap();
        assert_eq!(mid.case(), ThetaCase::Intermediate);
        assert!(close(theta(&mid, &x, &y), 1.0, 1e-14));

        assert_eq!(theta(&mid, &x, &x), 0.0);
        assert_eq!(theta(&neg, &y, &y), 0.0);
    }

    #[test]
    fn saturation_tie_uses_last_branch() {
        // γ = −1 puts κ exactly on 1 + β − α.
        let tp = Params { n: 2, gamma: -1.0, p: 3.0 }.theta_params();
        assert_eq!(tp.case(), ThetaCase::Saturated);
        let tp = Params { n: 2, gamma: -0.999, p: 3.0 }.theta_params();
        assert_eq!(tp.case(), ThetaCase::Intermediate);
    }

    #[test]
    fn theta0_examples() {
        let (x, y) = (pt(&[0.0, 1.0]), pt(&[0.0, 2.0]));
        assert!(close(theta0(1.0 / 3.0, -1.0, &x, &y), 2f64.powf(-1.0 / 3.0), 1e-14));
        assert!(close(theta0(1.0 / 3.0, 1.0 / 3.0, &x, &y), 1.0, 1e-14));
        assert_eq!(theta0(1.0 / 3.0, 0.5, &x, &x), 0.0);
    }

    #[test]
    fn hyperbolic_examples() {
        let (x, y) = (pt(&[0.0, 1.0]), pt(&[0.0, std::f64::consts::E]));
        assert!(close(hyperbolic_distance(&x, &y), 1.0, 1e-14));
        assert_eq!(hyperbolic_distance(&x, &x), 0.0);

        let c = conf_square_bounds(&pt(&[0.0, 1.0]), &pt(&[0.0, 1.0]));
        assert_eq!((c.lhs, c.mid, c.rhs), (0.0, 0.0, 0.0));
        let c = conf_square_bounds(&pt(&[0.0, 1.0]), &pt(&[0.0, 4.0]));
        assert!(close(c.lhs, 1.5, 1e-15) && close(c.mid, 3.0, 1e-15) && close(c.rhs, 4.5, 1e-15));

        let params = Params { n: 2, gamma: 0.0, p: 4.0 };
        assert!(close(hyperbolic_modulus(&params, 1.0, false), 1.0, 1e-15));
        assert!(close(hyperbolic_modulus(&params, 1.0, true), 1.0, 1e-15));
        assert!(close(hyperbolic_modulus(&params, 16.0, false), 8.0, 1e-14));
        assert!(close(hyperbolic_modulus(&params, 16.0, true), 1.0, 1e-15));
    }
}
