use nalgebra::DMatrix;
use rayon::prelude::*;

use super::grid::{Chart, Grid, GridSpec};
use super::{build_coupling_ops, hermitize, superselection_valid, AffineModel, ModelKind, Potential, Superselection};
use crate::error::{Error, Result};
use crate::liegen::{casimir_eigenvalue, RepLabel, RotRep};
use crate::sparse::{CsrMatrix, C64};

/// Assembled `H^{sj}` together with everything needed to interpret it.
#[derive(Debug, Clone)]
pub struct ReducedHamiltonian {
    pub matrix: CsrMatrix<C64>,
    pub model: AffineModel<f64>,
    pub grid_spec: GridSpec,
    pub grid: Grid,
    pub potential: Potential,
    pub rep_s: RepLabel,
    pub rep_j: RepLabel,
    pub sector: Superselection,
    /// `(2s+1)(2j+1)`; unknowns are ordered node-major, fiber-minor.
    pub fiber_dim: usize,
    /// `sqrt(P)` per active node: `H = S L S^{-1}` for the weighted operator `L`.
    pub sqrt_weights: Vec<f64>,
}

impl ReducedHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Constant coefficient matrix `K` of `-(1/P) d_i (P K^{ij} d_j)` in the
/// grid chart, including `hbar^2`.
pub fn kinetic_coefficients(model: &AffineModel<f64>, chart: Chart) -> DMatrix<f64> {
    let h2 = model.hbar * model.hbar;
    let (n, has_trace) = match chart {
        Chart::Log { n, trace } => (n, trace),
        Chart::Linear { n } => (n, true),
    };
    let off = usize::from(has_trace);
    let d = n - 1 + off;
    let mut g = DMatrix::zeros(d, d);
    for b in 0..n - 1 {
        g[(off + b, off + b)] = 2.0;
        if b + 1 < n - 1 {
            g[(off + b, off + b + 1)] = -1.0;
            g[(off + b + 1, off + b)] = -1.0;
        }
    }
    match chart {
        Chart::Linear { .. } => {
            g[(0, 0)] = 1.0;
            if n > 1 {
                g[(0, n - 1)] = -1.0;
                g[(n - 1, 0)] = -1.0;
            }
            g * (h2 / (2.0 * model.i))
        }
        Chart::Log { .. } => {
            let a = model.effective_a();
            let nf = n as f64;
            if has_trace {
                g[(0, 0)] = 1.0 / nf;
            }
            let mut k = g * (h2 / (2.0 * a));
            if has_trace {
                k[(0, 0)] -= h2 * model.b / (2.0 * a * (a + nf * model.b));
            }
            k
        }
    }
}

struct PairTerm {
    a: usize,
    b: usize,
    minus_sq: DMatrix<C64>,
    plus_sq: DMatrix<C64>,
}

pub fn build_reduced_hamiltonian(
    model: &AffineModel<f64>,
    rep_s: &RotRep<f64>,
    rep_j: &RotRep<f64>,
    spec: &GridSpec,
    pot: &Potential,
) -> Result<ReducedHamiltonian> {
    model.validate()?;
    pot.validate()?;
    if spec.n != model.n {
        return Err(Error::InvalidGrid(format!("grid n = {} but model n = {}", spec.n, model.n)));
    }
    let sector = superselection_valid(rep_s, rep_j);
    if sector == Superselection::Invalid {
        return Err(Error::Superselection {
            s: rep_s.label().to_string(),
            j: rep_j.label().to_string(),
        });
    }
    for rep in [rep_s, rep_j] {
        if (rep.hbar() - model.hbar).abs() > 1e-12 * model.hbar {
            return Err(Error::InvalidArgument(format!(
                "representation built with hbar = {} but model uses {}",
                rep.hbar(),
                model.hbar
            )));
        }
        if model.n > 1 && rep.n() < model.n {
            return Err(Error::InvalidArgument(format!(
                "n = {} representation cannot act on an n = {} grid",
                rep.n(),
                model.n
            )));
        }
    }

    let linear = model.kind == ModelKind::DAlembert;
    let grid = Grid::new(spec, linear, pot)?;
    let k = kinetic_coefficients(model, grid.chart());
    let fd = rep_s.dim() * rep_j.dim();

    let mut pairs = Vec::new();
    for a in 0..model.n {
        for b in a + 1..model.n {
            let (m, p) = build_coupling_ops(rep_s, rep_j, a, b)?;
            pairs.push(PairTerm {
                a,
                b,
                minus_sq: hermitize(&(&m * &m)),
                plus_sq: hermitize(&(&p * &p)),
            });
        }
    }

    let shift = model.casimir_shift_coefficient()
        * model.hbar
        * model.hbar
        * match model.kind {
            ModelKind::MetAff => casimir_eigenvalue(rep_s),
            ModelKind::AffMet => casimir_eigenvalue(rep_j),
            _ => 0.0,
        };

    let dims = grid.axes().len();
    let sqrt_weights: Vec<f64> = grid
        .active()
        .iter()
        .map(|&lin| {
            let mut idx = vec![0; dims];
            grid.unravel(lin, &mut idx);
            grid.measure(&grid.node(&idx)).sqrt()
        })
        .collect();
    if let Some(pos) = sqrt_weights.iter().position(|w| !(*w > 0.0 && w.is_finite())) {
        return Err(Error::InvalidGrid(format!(
            "radial density vanishes at node {}; the grid touches a coincidence set",
            grid.active()[pos]
        )));
    }

    let ctx = RowContext {
        model,
        grid: &grid,
        k: &k,
        pot,
        pairs: &pairs,
        shift,
        fd,
        sqrt_weights: &sqrt_weights,
    };
    let blocks: Vec<Vec<Vec<(usize, C64)>>> = (0..grid.active().len())
        .into_par_iter()
        .map(|slot| ctx.rows(slot))
        .collect();
    let rows: Vec<Vec<(usize, C64)>> = blocks.into_iter().flatten().collect();
    let matrix = CsrMatrix::from_rows(rows.len(), rows)?;

    Ok(ReducedHamiltonian {
        matrix,
        model: *model,
        grid_spec: spec.clone(),
        grid,
        potential: *pot,
        rep_s: rep_s.label(),
        rep_j: rep_j.label(),
        sector,
        fiber_dim: fd,
        sqrt_weights,
    })
}

struct RowContext<'a> {
    model: &'a AffineModel<f64>,
    grid: &'a Grid,
    k: &'a DMatrix<f64>,
    pot: &'a Potential,
    pairs: &'a [PairTerm],
    shift: f64,
    fd: usize,
    sqrt_weights: &'a [f64],
}

impl RowContext<'_> {
    fn measure_at(&self, idx: &[usize], axis: usize, t: f64) -> f64 {
        let mut y = self.grid.node(idx);
        y[axis] = self.grid.axes()[axis].at(t);
        self.grid.measure(&y)
    }

    fn neighbor(&self, idx: &[usize], moves: &[(usize, isize)]) -> Option<usize> {
        let mut nb = idx.to_vec();
        for &(axis, s) in moves {
            let v = nb[axis] as isize + s;
            if v < 0 || v >= self.grid.axes()[axis].points as isize {
                return None;
            }
            nb[axis] = v as usize;
        }
        self.grid.active_slot(self.grid.ravel(&nb))
    }

    fn shifted_node_measure(&self, idx: &[usize], axis: usize, s: isize) -> f64 {
        self.measure_at(idx, axis, idx[axis] as f64 + s as f64)
    }

    /// Scalar stencil (slot, coefficient) pairs and the kinetic diagonal.
    fn stencil(&self, slot: usize, idx: &[usize]) -> (Vec<(usize, f64)>, f64) {
        let axes = self.grid.axes();
        let sp = self.sqrt_weights[slot];
        let p = sp * sp;
        let mut out = Vec::new();
        let mut diag = 0.0;
        for i in 0..axes.len() {
            let kii = self.k[(i, i)];
            if kii == 0.0 {
                continue;
            }
            let h2 = axes[i].h * axes[i].h;
            for s in [-1isize, 1] {
                let a_mid = self.measure_at(idx, i, idx[i] as f64 + 0.5 * s as f64);
                diag += kii * a_mid / h2;
                if let Some(nb) = self.neighbor(idx, &[(i, s)]) {
                    out.push((nb, -kii * a_mid / h2 / (sp * self.sqrt_weights[nb])));
                }
            }
        }
        for i in 0..axes.len() {
            for j in i + 1..axes.len() {
                let kij = self.k[(i, j)];
                if kij == 0.0 {
                    continue;
                }
                let hh = 4.0 * axes[i].h * axes[j].h;
                for si in [-1isize, 1] {
                    for sj in [-1isize, 1] {
                        let Some(nb) = self.neighbor(idx, &[(i, si), (j, sj)]) else {
                            continue;
                        };
                        let a = self.shifted_node_measure(idx, i, si) + self.shifted_node_measure(idx, j, sj);
                        let c = -kij * (si * sj) as f64 * a / hh;
                        out.push((nb, c / (sp * self.sqrt_weights[nb])));
                    }
                }
            }
        }
        (out, diag / p)
    }

    fn diagonal_block(&self, y: &[f64], kinetic: f64) -> DMatrix<C64> {
        let scalar = kinetic + self.pot.value(self.grid.qbar(y)) + self.shift;
        let mut block = DMatrix::from_diagonal_element(self.fd, self.fd, C64::new(scalar, 0.0));
        if self.pairs.is_empty() {
            return block;
        }
        let v = self.grid.physical(y);
        for t in self.pairs {
            let (cm, cp) = match self.grid.chart() {
                Chart::Log { .. } => {
                    let half = 0.5 * (v[t.a] - v[t.b]);
                    let pre = 1.0 / (16.0 * self.model.effective_a());
                    (pre / half.sinh().powi(2), -pre / half.cosh().powi(2))
                }
                Chart::Linear { .. } => {
                    let pre = 1.0 / (4.0 * self.model.i);
                    (pre / (v[t.a] - v[t.b]).powi(2), pre / (v[t.a] + v[t.b]).powi(2))
                }
            };
            block += t.minus_sq.map(|z| z * cm) + t.plus_sq.map(|z| z * cp);
        }
        block
    }

    fn rows(&self, slot: usize) -> Vec<Vec<(usize, C64)>> {
        let lin = self.grid.active()[slot];
        let mut idx = vec![0; self.grid.axes().len()];
        self.grid.unravel(lin, &mut idx);
        let y = self.grid.node(&idx);
        let (stencil, kinetic) = self.stencil(slot, &idx);
        let block = self.diagonal_block(&y, kinetic);
        let fd = self.fd;
        (0..fd)
            .map(|f| {
                let mut row: Vec<(usize, C64)> = Vec::with_capacity(stencil.len() + fd);
                for &(nb, c) in &stencil {
                    row.push((nb * fd + f, C64::new(c, 0.0)));
                }
                for g in 0..fd {
                    let v = block[(f, g)];
                    if f == g || v != C64::new(0.0, 0.0) {
                        row.push((slot * fd + g, v));
                    }
                }
                row
            })
            .collect()
    }
}
