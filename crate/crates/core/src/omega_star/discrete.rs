//! Discrete two-point p-energy on a tensor grid.
//!
//! Each cell is split into `n!` Kuhn simplices, one per ordering of the axes;
//! the nodal values are interpolated linearly on every simplex. Along the
//! path `v_0 → v_1 → … → v_n` that steps once in each axis, the gradient
//! component for the `k`-th axis is a forward difference. Splitting the cell
//! this way keeps the energy convex and leaves no checkerboard null modes.

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::modulus::pow;

/// Largest dimension the solver supports (`n!` simplices per cell).
pub const MAX_SOLVER_DIM: usize = 3;

#[derive(Debug, Clone, Copy)]
struct Cell {
    base: usize,
    /// `(cell-centre height)^γ · cell volume / n!`
    weight: f64,
    inv_h: [f64; MAX_SOLVER_DIM],
}

#[derive(Debug, Clone)]
pub(crate) struct DiscreteProblem {
    n: usize,
    p: f64,
    eps2: f64,
    strides: [usize; MAX_SOLVER_DIM],
    perms: Vec<[usize; MAX_SOLVER_DIM]>,
    cells: Vec<Cell>,
    node_count: usize,
}

fn permutations(n: usize) -> Vec<[usize; MAX_SOLVER_DIM]> {
    match n {
        1 => vec![[0, 0, 0]],
        2 => vec![[0, 1, 0], [1, 0, 0]],
        _ => vec![[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]],
    }
}

impl DiscreteProblem {
    pub fn new(grid: &GridSpec, p: f64, gamma: f64, epsilon: f64) -> Result<Self> {
        let n = grid.dim();
        if n > MAX_SOLVER_DIM {
            return Err(Error::Precondition(format!("solver supports n <= {MAX_SOLVER_DIM}, got {n}")));
        }
        let edges: Vec<Vec<f64>> = (0..n).map(|k| grid.edges(k)).collect();
        let mut strides = [0; MAX_SOLVER_DIM];
        let mut s = 1;
        for (stride, cells) in strides.iter_mut().zip(&grid.cells_per_axis) {
            *stride = s;
            s *= cells + 1;
        }
        let simplices = (1..=n).product::<usize>() as f64;
        let total = grid.cell_count();
        let mut cells = Vec::with_capacity(total);
        for flat in 0..total {
            let mut rest = flat;
            let mut base = 0;
            let mut volume = 1.0;
            let mut inv_h = [0.0; MAX_SOLVER_DIM];
            let mut centre_height = 0.0;
            for k in 0..n {
                let i = rest % grid.cells_per_axis[k];
                rest /= grid.cells_per_axis[k];
                let h = edges[k][i + 1] - edges[k][i];
                base += i * strides[k];
                volume *= h;
                inv_h[k] = 1.0 / h;
                if k + 1 == n {
                    centre_height = 0.5 * (edges[k][i] + edges[k][i + 1]);
                }
            }
            let weight = pow(centre_height, gamma) * volume / simplices;
            cells.push(Cell { base, weight, inv_h });
        }
        Ok(Self { n, p, eps2: epsilon * epsilon, strides, perms: permutations(n), cells, node_count: s })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Walks the simplex path, filling node indices and scaled differences.
    #[inline]
    fn simplex(&self, cell: &Cell, perm: &[usize; MAX_SOLVER_DIM], u: &[f64], nodes: &mut [usize; 4], g: &mut [f64; MAX_SOLVER_DIM]) {
        nodes[0] = cell.base;
        for k in 0..self.n {
            let a = perm[k];
            nodes[k + 1] = nodes[k] + self.strides[a];
            g[k] = (u[nodes[k + 1]] - u[nodes[k]]) * cell.inv_h[a];
        }
    }

    /// `(|g|² + ε²)^{p/2}` and `(|g|² + ε²)^{(p−2)/2}`.
    #[inline]
    fn powers(&self, s2: f64) -> (f64, f64) {
        if s2 == 0.0 {
            return (0.0, if self.p == 2.0 { 1.0 } else { 0.0 });
        }
        let s = s2.sqrt();
        let sp2 = pow(s, self.p - 2.0);
        (sp2 * s2, sp2)
    }

    #[cfg(test)]
    pub fn energy(&self, u: &[f64]) -> f64 {
        let mut nodes = [0; 4];
        let mut g = [0.0; MAX_SOLVER_DIM];
        let mut total = 0.0;
        for cell in &self.cells {
            for perm in &self.perms {
                self.simplex(cell, perm, u, &mut nodes, &mut g);
                let s2 = g[..self.n].iter().map(|c| c * c).sum::<f64>() + self.eps2;
                total += cell.weight * self.powers(s2).0;
            }
        }
        total
    }

    /// Stride between vertically adjacent nodes.
    pub fn vertical_stride(&self) -> usize {
        self.strides[self.n - 1]
    }

    /// Energy, its gradient, and a Hessian estimate keeping the diagonal and
    /// the couplings along the last axis. In the estimate the local gradient
    /// magnitude is floored at `floor` so that degenerate `p > 2` regions do
    /// not produce vanishing curvature.
    ///
    /// `vert[i]` receives the (positive) coupling between node `i` and the
    /// node above it; the Hessian entry is `−vert[i]`.
    pub fn energy_gradient(&self, u: &[f64], grad: &mut [f64], diag: &mut [f64], vert: &mut [f64], floor: f64) -> f64 {
        grad.fill(0.0);
        diag.fill(0.0);
        vert.fill(0.0);
        let top = self.n - 1;
        let p = self.p;
        let floor2 = floor * floor;
        let mut nodes = [0; 4];
        let mut g = [0.0; MAX_SOLVER_DIM];
        let mut total = 0.0;
        for cell in &self.cells {
            for perm in &self.perms {
                self.simplex(cell, perm, u, &mut nodes, &mut g);
                let s2 = g[..self.n].iter().map(|c| c * c).sum::<f64>() + self.eps2;
                let (sp, sp2) = self.powers(s2);
                total += cell.weight * sp;
                let coef = cell.weight * p * sp2;
                let curv = cell.weight * p * (p - 1.0) * self.powers(s2 + floor2).1;
                for k in 0..self.n {
                    let ih = cell.inv_h[perm[k]];
                    let f = coef * g[k] * ih;
                    grad[nodes[k + 1]] += f;
                    grad[nodes[k]] -= f;
                    let c = curv * ih * ih;
                    diag[nodes[k + 1]] += c;
                    diag[nodes[k]] += c;
                    if perm[k] == top {
                        vert[nodes[k]] += c;
                    }
                }
            }
        }
        total
    }

    /// First and second derivative of `t ↦ E(u + t·d)` at `t = 0`.
    pub fn directional(&self, u: &[f64], d: &[f64]) -> (f64, f64) {
        let p = self.p;
        let mut nodes = [0; 4];
        let mut g = [0.0; MAX_SOLVER_DIM];
        let mut dg = [0.0; MAX_SOLVER_DIM];
        let (mut first, mut second) = (0.0, 0.0);
        for cell in &self.cells {
            for perm in &self.perms {
                self.simplex(cell, perm, u, &mut nodes, &mut g);
                let mut dot = 0.0;
                let mut dd = 0.0;
                for k in 0..self.n {
                    dg[k] = (d[nodes[k + 1]] - d[nodes[k]]) * cell.inv_h[perm[k]];
                    dot += g[k] * dg[k];
                    dd += dg[k] * dg[k];
                }
                if dd == 0.0 {
                    continue;
                }
                let s2 = g[..self.n].iter().map(|c| c * c).sum::<f64>() + self.eps2;
                let (_, sp2) = self.powers(s2);
                first += cell.weight * p * sp2 * dot;
                let mut curv = sp2 * dd;
                if s2 > 0.0 && p != 2.0 {
                    curv += (p - 2.0) * sp2 / s2 * dot * dot;
                }
                second += cell.weight * p * curv;
            }
        }
        (first, second)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::BoxRegion;

    fn grid2(cells: usize) -> GridSpec {
        GridSpec::uniform(BoxRegion::new(vec![0.0, 0.5], vec![1.0, 2.0]).unwrap(), cells, 1.0).unwrap()
    }

    #[test]
    fn linear_nodal_field_matches_continuum() {
        let grid = grid2(8);
        let prob = DiscreteProblem::new(&grid, 3.0, 0.0, 0.0).unwrap();
        // u = z_1 at nodes; |Du| = 1 everywhere.
        let ex = grid.edges(0);
        let u: Vec<f64> = (0..prob.node_count()).map(|i| ex[i % 9]).collect();
        assert!((prob.energy(&u) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn gradient_and_curvature_match_differences() {
        let grid = grid2(6);
        let prob = DiscreteProblem::new(&grid, 3.0, 1.5, 0.0).unwrap();
        let m = prob.node_count();
        let u: Vec<f64> = (0..m).map(|i| ((i * 37 % 11) as f64 * 0.13).sin()).collect();
        let d: Vec<f64> = (0..m).map(|i| ((i * 17 % 7) as f64 * 0.31).cos()).collect();
        let mut grad = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut vert = vec![0.0; m];
        let e = prob.energy_gradient(&u, &mut grad, &mut diag, &mut vert, 0.0);
        assert!((e - prob.energy(&u)).abs() < 1e-12 * e);

        let h = 1e-6;
        let shifted = |t: f64| -> Vec<f64> { u.iter().zip(&d).map(|(a, b)| a + t * b).collect() };
        let fd1 = (prob.energy(&shifted(h)) - prob.energy(&shifted(-h))) / (2.0 * h);
        let fd2 = (prob.energy(&shifted(1e-4)) - 2.0 * e + prob.energy(&shifted(-1e-4))) / 1e-8;
        let (first, second) = prob.directional(&u, &d);
        let along: f64 = grad.iter().zip(&d).map(|(a, b)| a * b).sum();
        assert!((first - along).abs() < 1e-9 * first.abs().max(1.0));
        assert!((first - fd1).abs() < 1e-6 * first.abs().max(1.0));
        assert!((second - fd2).abs() < 1e-4 * second.abs().max(1.0));
    }

    #[test]
    fn constants_have_zero_energy() {
        let prob = DiscreteProblem::new(&grid2(4), 2.5, 0.0, 0.0).unwrap();
        assert_eq!(prob.energy(&vec![0.7; prob.node_count()]), 0.0);
    }
}
