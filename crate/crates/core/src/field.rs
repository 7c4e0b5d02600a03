//! Differentiable test fields on the half-space.
//!
//! Points are passed as coordinate slices whose last entry is the height.
//! Every implementation must be safe to evaluate from many threads at once.

use std::fmt;
use std::sync::Arc;

use crate::point::BoxRegion;

pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, z: &[f64]) -> f64;

    /// Writes `Du(z)` into `out` (length `dim`).
    fn gradient(&self, z: &[f64], out: &mut [f64]);

    /// Box outside which value and gradient vanish identically.
    fn support_box(&self) -> Option<BoxRegion> {
        None
    }

    /// Box outside which the gradient vanishes. Defaults to the support box.
    fn energy_box(&self) -> Option<BoxRegion> {
        self.support_box()
    }
}

/// A field with an identifier, as it appears in certification reports.
#[derive(Clone)]
pub struct NamedField {
    pub id: String,
    pub field: Arc<dyn ScalarField>,
}

impl NamedField {
    pub fn new(id: impl Into<String>, field: impl ScalarField + 'static) -> Self {
        Self { id: id.into(), field: Arc::new(field) }
    }
}

impl fmt::Debug for NamedField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NamedField").field("id", &self.id).field("dim", &self.field.dim()).finish()
    }
}

impl<F: ScalarField + ?Sized> ScalarField for Arc<F> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, z: &[f64]) -> f64 {
        (**self).value(z)
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        (**self).gradient(z, out)
    }
    fn support_box(&self) -> Option<BoxRegion> {
        (**self).support_box()
    }
    fn energy_box(&self) -> Option<BoxRegion> {
        (**self).energy_box()
    }
}

/// Field assembled from a value closure and a gradient closure.
pub struct FnField<V, G> {
    dim: usize,
    value: V,
    gradient: G,
    support: Option<BoxRegion>,
}

impl<V, G> FnField<V, G>
where
    V: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    pub fn new(dim: usize, value: V, gradient: G) -> Self {
        Self { dim, value, gradient, support: None }
    }

    pub fn with_support(mut self, support: BoxRegion) -> Self {
        self.support = Some(support);
        self
    }
}

impl<V, G> ScalarField for FnField<V, G>
where
    V: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, z: &[f64]) -> f64 {
        (self.value)(z)
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        (self.gradient)(z, out)
    }
    fn support_box(&self) -> Option<BoxRegion> {
        self.support.clone()
    }
}

/// The identically zero field.
#[derive(Debug, Clone, Copy)]
pub struct ZeroField(pub usize);

impl ScalarField for ZeroField {
    fn dim(&self) -> usize {
        self.0
    }
    fn value(&self, _: &[f64]) -> f64 {
        0.0
    }
    fn gradient(&self, _: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
}

/// A constant field `u ≡ c`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantField {
    pub dim: usize,
    pub value: f64,
}

impl ScalarField for ConstantField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, _: &[f64]) -> f64 {
        self.value
    }
    fn gradient(&self, _: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }
}

/// The coordinate field `u(z) = z_axis`.
#[derive(Debug, Clone, Copy)]
pub struct CoordinateField {
    pub dim: usize,
    pub axis: usize,
}

impl ScalarField for CoordinateField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, z: &[f64]) -> f64 {
        z[self.axis]
    }
    fn gradient(&self, _: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        out[self.axis] = 1.0;
    }
}

/// A one-dimensional field lifted to `dim` dimensions, constant in every
/// coordinate except `axis`.
pub struct Lifted {
    profile: Arc<dyn ScalarField>,
    dim: usize,
    axis: usize,
}

impl Lifted {
    pub fn new(profile: Arc<dyn ScalarField>, dim: usize, axis: usize) -> Self {
        assert_eq!(profile.dim(), 1, "lifted profile must be one-dimensional");
        assert!(axis < dim, "lift axis out of range");
        Self { profile, dim, axis }
    }

    /// Lift that varies with the height only.
    pub fn vertical(profile: Arc<dyn ScalarField>, dim: usize) -> Self {
        Self::new(profile, dim, dim - 1)
    }
}

impl ScalarField for Lifted {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, z: &[f64]) -> f64 {
        self.profile.value(&[z[self.axis]])
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        let mut g = [0.0];
        self.profile.gradient(&[z[self.axis]], &mut g);
        out.fill(0.0);
        out[self.axis] = g[0];
    }
    // Unbounded in the constant directions unless dim == 1.
    fn support_box(&self) -> Option<BoxRegion> {
        if self.dim == 1 {
            self.profile.support_box()
        } else {
            None
        }
    }
    fn energy_box(&self) -> Option<BoxRegion> {
        if self.dim == 1 {
            self.profile.energy_box()
        } else {
            None
        }
    }
}

/// `λ·u`.
pub struct Scaled<F> {
    pub inner: F,
    pub factor: f64,
}

impl<F: ScalarField> ScalarField for Scaled<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, z: &[f64]) -> f64 {
        self.factor * self.inner.value(z)
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        self.inner.gradient(z, out);
        out.iter_mut().for_each(|g| *g *= self.factor);
    }
    fn support_box(&self) -> Option<BoxRegion> {
        self.inner.support_box()
    }
    fn energy_box(&self) -> Option<BoxRegion> {
        self.inner.energy_box()
    }
}

/// Push-forward under dilation: `u_t(z) = u(z / t)`.
pub struct Dilated<F> {
    pub inner: F,
    pub t: f64,
}

impl<F: ScalarField> ScalarField for Dilated<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, z: &[f64]) -> f64 {
        let w: Vec<f64> = z.iter().map(|c| c / self.t).collect();
        self.inner.value(&w)
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        let w: Vec<f64> = z.iter().map(|c| c / self.t).collect();
        self.inner.gradient(&w, out);
        out.iter_mut().for_each(|g| *g /= self.t);
    }
    fn support_box(&self) -> Option<BoxRegion> {
        self.inner.support_box().map(|b| b.scaled(self.t))
    }
    fn energy_box(&self) -> Option<BoxRegion> {
        self.inner.energy_box().map(|b| b.scaled(self.t))
    }
}

/// Horizontal translate: `u_h(z) = u(z − h)`.
pub struct Translated<F> {
    pub inner: F,
    pub shift: Vec<f64>,
}

impl<F: ScalarField> Translated<F> {
    fn back(&self, z: &[f64]) -> Vec<f64> {
        let mut w = z.to_vec();
        for (c, s) in w.iter_mut().zip(&self.shift) {
            *c -= s;
        }
        w
    }
}

impl<F: ScalarField> ScalarField for Translated<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn value(&self, z: &[f64]) -> f64 {
        self.inner.value(&self.back(z))
    }
    fn gradient(&self, z: &[f64], out: &mut [f64]) {
        self.inner.gradient(&self.back(z), out)
    }
    fn support_box(&self) -> Option<BoxRegion> {
        self.inner.support_box().map(|b| b.translated(&self.shift))
    }
    fn energy_box(&self) -> Option<BoxRegion> {
        self.inner.energy_box().map(|b| b.translated(&self.shift))
    }
}
