//! A small dense semidefinite-programming solver with a block-LMI modeling
//! layer.
//!
//! Problems are stated over named real scalar unknowns `y` as
//!
//! ```text
//! minimize    c·y + c₀
//! subject to  F₀ᵇ + Σ_i y_i Aᵢᵇ ⪰ 0   for every LMI block b
//!             G y = h
//! ```
//!
//! Coefficient matrices may be complex Hermitian or real symmetric; complex
//! blocks are embedded internally as real symmetric blocks of twice the size.

mod solver;

use serde::{Deserialize, Serialize};

pub use solver::solve;

/// One (row, col, value) coefficient of a Hermitian matrix expression.
/// Entries are given for `row ≤ col` only; the `(col, row)` entry is the
/// implied complex conjugate. Diagonal entries must be real.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Entry {
    pub row: usize,
    pub col: usize,
    pub re: f64,
    pub im: f64,
}

impl Entry {
    pub fn real(row: usize, col: usize, re: f64) -> Self {
        Self {
            row,
            col,
            re,
            im: 0.0,
        }
    }
}

/// An affine-in-variables Hermitian matrix expression required PSD.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LmiBlock {
    /// Side length over the complex (or real) field.
    pub dim: usize,
    /// Whether entries are complex Hermitian (embedded on solve) or real
    /// symmetric.
    pub complex: bool,
    /// Entries of the constant matrix F₀.
    pub constant: Vec<Entry>,
    /// Per-variable coefficient entries: `(variable index, entry)`.
    pub terms: Vec<(usize, Entry)>,
}

/// An affine real equality `Σ terms·y = rhs`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearEquality {
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SdpProblem {
    pub num_vars: usize,
    /// Linear objective coefficients (minimization).
    pub objective: Vec<f64>,
    pub objective_constant: f64,
    pub blocks: Vec<LmiBlock>,
    pub equalities: Vec<LinearEquality>,
}

impl SdpProblem {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            objective_constant: 0.0,
            blocks: Vec::new(),
            equalities: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.objective.len() != self.num_vars {
            return Err(format!(
                "objective has {} coefficients for {} variables",
                self.objective.len(),
                self.num_vars
            ));
        }
        for (b, blk) in self.blocks.iter().enumerate() {
            if blk.dim == 0 {
                return Err(format!("block {b} has dimension 0"));
            }
            let check = |e: &Entry| -> Result<(), String> {
                if e.row > e.col || e.col >= blk.dim {
                    return Err(format!(
                        "block {b}: entry ({},{}) outside the upper triangle of dim {}",
                        e.row, e.col, blk.dim
                    ));
                }
                if e.row == e.col && e.im != 0.0 {
                    return Err(format!(
                        "block {b}: diagonal entry ({},{}) has imaginary part (coefficients must be Hermitian)",
                        e.row, e.col
                    ));
                }
                if !blk.complex && e.im != 0.0 {
                    return Err(format!("block {b}: imaginary entry in a real block"));
                }
                Ok(())
            };
            for e in &blk.constant {
                check(e)?;
            }
            for (v, e) in &blk.terms {
                if *v >= self.num_vars {
                    return Err(format!("block {b}: variable index {v} out of range"));
                }
                check(e)?;
            }
        }
        for (i, eq) in self.equalities.iter().enumerate() {
            for (v, _) in &eq.terms {
                if *v >= self.num_vars {
                    return Err(format!("equality {i}: variable index {v} out of range"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SdpSettings {
    pub tol_feas: f64,
    pub tol_gap: f64,
    pub max_iters: usize,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self {
            tol_feas: 1e-8,
            tol_gap: 1e-7,
            max_iters: 200,
        }
    }
}

impl SdpSettings {
    /// Tightened tolerances for small problems where near-exact answers are
    /// expected.
    pub fn tight() -> Self {
        Self {
            tol_feas: 1e-10,
            tol_gap: 1e-10,
            max_iters: 300,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    NumericalFailure,
}

/// Residuals of a candidate solution, all recomputable from problem data.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Residuals {
    /// Worst LMI violation (most negative eigenvalue, clamped at 0) plus the
    /// largest equality violation, each relative to the data scale.
    pub primal: f64,
    /// Stationarity violation ‖c − A*(Z) − Gᵀν‖_∞ relative to ‖c‖.
    pub dual: f64,
    /// Relative complementarity gap ⟨S, Z⟩ / (1 + |pobj| + |dobj|).
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub objective_value: f64,
    pub variable_values: Vec<f64>,
    /// Dual matrix per LMI block, in the solver's real symmetric
    /// representation (complex blocks appear in embedded 2d×2d form).
    pub block_duals: Vec<nalgebra::DMatrix<f64>>,
    /// Multiplier per equality constraint.
    pub equality_duals: Vec<f64>,
    pub residuals: Residuals,
    pub iterations: usize,
}

impl SdpSolution {
    pub fn dual_objective(&self, problem: &SdpProblem) -> f64 {
        let mut v = problem.objective_constant;
        for (blk, z) in problem.blocks.iter().zip(&self.block_duals) {
            v -= inner_with_entries(blk, &blk.constant, z);
        }
        for (eq, nu) in problem.equalities.iter().zip(&self.equality_duals) {
            v += eq.rhs * nu;
        }
        v
    }
}

/// The real symmetric embedding of a block's Hermitian entry list evaluated
/// against a dense symmetric matrix: `Σ entries ⟨E(entry), M⟩`.
pub(crate) fn inner_with_entries(
    blk: &LmiBlock,
    entries: &[Entry],
    m: &nalgebra::DMatrix<f64>,
) -> f64 {
    let mut acc = 0.0;
    for e in entries {
        for (r, c, v) in embed_entry(blk, e) {
            acc += if r == c { v * m[(r, c)] } else { 2.0 * v * m[(r, c)] };
        }
    }
    acc
}

/// Embedded dimension of a block.
pub(crate) fn embedded_dim(blk: &LmiBlock) -> usize {
    if blk.complex {
        2 * blk.dim
    } else {
        blk.dim
    }
}

/// Real symmetric positions of one Hermitian entry under the
/// `[[Re, −Im], [Im, Re]]` embedding. Each returned `(r, c, v)` with `r ≤ c`
/// stands for the symmetric pair of positions.
pub(crate) fn embed_entry(blk: &LmiBlock, e: &Entry) -> Vec<(usize, usize, f64)> {
    let d = blk.dim;
    if !blk.complex {
        return vec![(e.row, e.col, e.re)];
    }
    let (r, c, a, b) = (e.row, e.col, e.re, e.im);
    if r == c {
        vec![(r, r, a), (d + r, d + r, a)]
    } else {
        let mut out = vec![(r, c, a), (d + r, d + c, a)];
        if b != 0.0 {
            out.push((r, d + c, -b));
            out.push((c, d + r, b));
        }
        out
    }
}

/// Assembles the dense embedded matrix of a block at variable values `y`.
pub fn assemble_block(blk: &LmiBlock, y: &[f64]) -> nalgebra::DMatrix<f64> {
    let k = embedded_dim(blk);
    let mut m = nalgebra::DMatrix::zeros(k, k);
    let mut add = |entries: &[(usize, usize, f64)], scale: f64| {
        for &(r, c, v) in entries {
            m[(r, c)] += scale * v;
            if r != c {
                m[(c, r)] += scale * v;
            }
        }
    };
    for e in &blk.constant {
        add(&embed_entry(blk, e), 1.0);
    }
    for (var, e) in &blk.terms {
        add(&embed_entry(blk, e), y[*var]);
    }
    m
}

/// Recomputes all residuals of a candidate solution from scratch,
/// independent of the solver's internal state.
pub fn verify(problem: &SdpProblem, solution: &SdpSolution) -> Residuals {
    use crate::linalg::{eig_hermitian, real_matrix_to_complex, HermitianMatrix};
    let y = &solution.variable_values;

    let mut primal: f64 = 0.0;
    for blk in &problem.blocks {
        let m = assemble_block(blk, y);
        let scale = 1.0 + m.iter().map(|x| x * x).sum::<f64>().sqrt();
        let h = HermitianMatrix::new(real_matrix_to_complex(&m)).expect("assembled block is symmetric");
        let (vals, _) = eig_hermitian(&h);
        primal = primal.max((-vals[0]).max(0.0) / scale);
    }
    let mut h_scale: f64 = 1.0;
    for eq in &problem.equalities {
        h_scale = h_scale.max(eq.rhs.abs());
    }
    for eq in &problem.equalities {
        let lhs: f64 = eq.terms.iter().map(|&(v, a)| a * y[v]).sum();
        primal = primal.max((lhs - eq.rhs).abs() / h_scale);
    }

    let c_scale = 1.0
        + problem
            .objective
            .iter()
            .fold(0.0_f64, |acc, &x| acc.max(x.abs()));
    let mut stat = vec![0.0_f64; problem.num_vars];
    for (i, &ci) in problem.objective.iter().enumerate() {
        stat[i] = ci;
    }
    for (blk, z) in problem.blocks.iter().zip(&solution.block_duals) {
        for (var, e) in &blk.terms {
            let mut acc = 0.0;
            for (r, c, v) in embed_entry(blk, e) {
                acc += if r == c { v * z[(r, c)] } else { 2.0 * v * z[(r, c)] };
            }
            stat[*var] -= acc;
        }
    }
    for (eq, nu) in problem.equalities.iter().zip(&solution.equality_duals) {
        for &(v, a) in &eq.terms {
            stat[v] -= a * nu;
        }
    }
    let dual = stat.iter().fold(0.0_f64, |acc, &x| acc.max(x.abs())) / c_scale;

    let mut gap_abs = 0.0;
    for (blk, z) in problem.blocks.iter().zip(&solution.block_duals) {
        let m = assemble_block(blk, y);
        gap_abs += (&m * z).trace();
    }
    let pobj = solution
        .variable_values
        .iter()
        .zip(&problem.objective)
        .map(|(yi, ci)| yi * ci)
        .sum::<f64>()
        + problem.objective_constant;
    let dobj = solution.dual_objective(problem);
    let gap = gap_abs.abs() / (1.0 + pobj.abs() + dobj.abs());

    Residuals { primal, dual, gap }
}
