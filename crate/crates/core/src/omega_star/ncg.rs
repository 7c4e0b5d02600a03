//! Nonlinear conjugate gradients (Polak–Ribière+) preconditioned by the
//! vertical-line blocks of a Hessian estimate.
//!
//! Graded meshes and the `z_n^γ` weight make the couplings along the height
//! axis dominate near the boundary; solving the tridiagonal system on every
//! vertical node line removes that anisotropy from the iteration.
//!
//! Every step starts from the Newton estimate along the search direction and
//! backtracks until the Armijo condition holds, so accepted iterates never
//! increase the energy.

use super::discrete::DiscreteProblem;

/// Iterations over which the relative energy decrease is measured.
pub const STOP_WINDOW: usize = 10;

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-30;

#[derive(Debug, Clone)]
pub(crate) struct NcgOutcome {
    pub u: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    /// Relative energy decrease over the last [`STOP_WINDOW`] iterations.
    pub residual: f64,
    pub converged: bool,
    pub history: Vec<f64>,
}

pub(crate) struct NcgSettings {
    pub max_iterations: usize,
    pub stop_rel_energy: f64,
    pub shrink: f64,
    /// Gradient-magnitude floor inside the Hessian estimate.
    pub precond_floor: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Hessian estimate: diagonal plus couplings to the node one row up.
struct LineBlocks {
    diag: Vec<f64>,
    vert: Vec<f64>,
    stride: usize,
    // Thomas-algorithm scratch, one column long.
    c: Vec<f64>,
    d: Vec<f64>,
}

impl LineBlocks {
    fn new(m: usize, stride: usize) -> Self {
        let rows = m / stride;
        Self { diag: vec![0.0; m], vert: vec![0.0; m], stride, c: vec![0.0; rows], d: vec![0.0; rows] }
    }

    /// `z = −M⁻¹ grad` with pinned nodes treated as Dirichlet rows.
    fn solve(&mut self, grad: &[f64], fixed: &[bool], z: &mut [f64]) {
        let rows = self.c.len();
        let s = self.stride;
        for col in 0..s {
            // Forward sweep on  −a_j x_{j−1} + b_j x_j − a_{j+1} x_{j+1} = r_j.
            for j in 0..rows {
                let i = col + j * s;
                let free = !fixed[i] && self.diag[i] > 0.0;
                let (b, r) = if free { (self.diag[i], -grad[i]) } else { (1.0, 0.0) };
                let below = if j > 0 && free && !fixed[i - s] { self.vert[i - s] } else { 0.0 };
                let above = if j + 1 < rows && free && !fixed[i + s] { self.vert[i] } else { 0.0 };
                let (cp, dp) = if j > 0 { (self.c[j - 1], self.d[j - 1]) } else { (0.0, 0.0) };
                let denom = b - below * cp;
                self.c[j] = above / denom;
                self.d[j] = (r + below * dp) / denom;
            }
            let mut next = 0.0;
            for j in (0..rows).rev() {
                let x = self.d[j] + self.c[j] * next;
                z[col + j * s] = x;
                next = x;
            }
        }
    }
}

/// Minimises the discrete energy over the nodes not marked `fixed`.
pub(crate) fn minimize(prob: &DiscreteProblem, u0: Vec<f64>, fixed: &[bool], s: &NcgSettings) -> NcgOutcome {
    let m = u0.len();
    let mut u = u0;
    let mut grad = vec![0.0; m];
    let mut blocks = LineBlocks::new(m, prob.vertical_stride());
    let mut trial = vec![0.0; m];
    let mut trial_grad = vec![0.0; m];
    let mut trial_blocks = LineBlocks::new(m, prob.vertical_stride());
    let mut z = vec![0.0; m];
    let mut energy = prob.energy_gradient(&u, &mut grad, &mut blocks.diag, &mut blocks.vert, s.precond_floor);
    for (g, &f) in grad.iter_mut().zip(fixed) {
        if f {
            *g = 0.0;
        }
    }
    blocks.solve(&grad, fixed, &mut z);
    let mut dir = z.clone();
    // -grad·z, the preconditioned residual norm.
    let mut rz = -dot(&grad, &z);
    let mut history = vec![energy];
    let mut last_step = 1.0;
    let mut residual = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < s.max_iterations {
        if rz <= 0.0 {
            converged = true;
            residual = 0.0;
            break;
        }
        let (mut f1, mut f2) = prob.directional(&u, &dir);
        let mut steepest = false;
        if f1 >= 0.0 {
            dir.copy_from_slice(&z);
            (f1, f2) = prob.directional(&u, &dir);
            steepest = true;
        }
        let mut t = if f2 > 0.0 { -f1 / f2 } else { last_step };
        let accepted = loop {
            for i in 0..m {
                trial[i] = u[i] + t * dir[i];
            }
            let e = prob.energy_gradient(&trial, &mut trial_grad, &mut trial_blocks.diag, &mut trial_blocks.vert, s.precond_floor);
            if e <= energy + ARMIJO * t * f1 {
                break Some(e);
            }
            t *= s.shrink;
            if t < MIN_STEP {
                break None;
            }
        };
        iterations += 1;
        let Some(new_energy) = accepted else {
            if steepest {
                // Not even a preconditioned gradient step helps: floating-point floor.
                converged = true;
                residual = 0.0;
                break;
            }
            dir.copy_from_slice(&z);
            continue;
        };
        last_step = t;
        std::mem::swap(&mut u, &mut trial);
        std::mem::swap(&mut grad, &mut trial_grad);
        std::mem::swap(&mut blocks, &mut trial_blocks);
        energy = new_energy;
        history.push(energy);
        for (g, &f) in grad.iter_mut().zip(fixed) {
            if f {
                *g = 0.0;
            }
        }

        let old_z = z.clone();
        blocks.solve(&grad, fixed, &mut z);
        let rz_new = -dot(&grad, &z);
        // Polak–Ribière+: β = r_new·(z_new − z_old) / (r_old·z_old), r = −grad.
        let cross = -dot(&grad, &old_z);
        let beta = ((rz_new - cross) / rz).max(0.0);
        rz = rz_new;
        for i in 0..m {
            dir[i] = z[i] + beta * dir[i];
        }

        if history.len() > STOP_WINDOW {
            let past = history[history.len() - 1 - STOP_WINDOW];
            residual = if energy > 0.0 { (past - energy) / energy } else { 0.0 };
            if residual < s.stop_rel_energy {
                converged = true;
                break;
            }
        }
    }

    NcgOutcome { u, energy, iterations, residual, converged, history }
}
