//! The SDP lower bound `E_0` on the weighted approximation error, the
//! construction of bound-saturating measurements on pure states, and a
//! derivative-free brute-force oracle over POVMs.
//!
//! The bound minimizes
//! `Tr[(W⊗ρ)(𝕊 − ℝ𝕏† − 𝕏ℝ† + 𝕏𝕏†)]` over Hermitian blocks subject to
//! `S_jk = S_kj = S_jk†`, `R_j = R_j†`, and `[[I, ℝ†], [ℝ, 𝕊]] ⪰ 0`. The
//! symmetry constraints are absorbed into the parameterization: one Hermitian
//! block of variables per `R_j` and per unordered pair `(j,k)`.

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{
    anticommutator, cplx, eig_hermitian, hermitian_function, identity, trace, CMat, CVec,
    HermitianMatrix,
};
use crate::neldermead::{self, NmOptions};
use crate::quantum::{
    approx_error_matrix, optimal_values_for_povm, weighted_error, ApproxMeasurement,
    ObservableSet, Povm, State, ValueAssignment, WeightMatrix,
};
use crate::sdp::{self, Entry, LmiBlock, SdpProblem, SdpSettings, SdpStatus};
use crate::{Error, Result};

/// Indexing of the Hermitian variable blocks inside the flat variable vector:
/// `R_1 … R_n` first, then `S_jk` for `j ≤ k` in row-major pair order.
#[derive(Debug, Clone, Copy)]
pub struct E0Layout {
    pub n: usize,
    pub d: usize,
}

impl E0Layout {
    pub fn new(n: usize, d: usize) -> Self {
        Self { n, d }
    }

    /// Real parameters per Hermitian d×d block.
    fn block_size(&self) -> usize {
        self.d * self.d
    }

    pub fn num_vars(&self) -> usize {
        (self.n + self.n * (self.n + 1) / 2) * self.block_size()
    }

    fn r_base(&self, j: usize) -> usize {
        j * self.block_size()
    }

    fn s_base(&self, j: usize, k: usize) -> usize {
        debug_assert!(j <= k && k < self.n);
        // pairs (0,0),(0,1),…,(0,n−1),(1,1),… in row-major order
        let pair = j * self.n - j * (j + 1) / 2 + k;
        (self.n + pair) * self.block_size()
    }

    /// Extracts a Hermitian block from the flat variable vector given the
    /// block's base offset. Parameter order inside a block: d diagonal
    /// entries, then (re, im) for each off-diagonal pair (a,b), a < b,
    /// row-major.
    fn extract(&self, y: &[f64], base: usize) -> HermitianMatrix {
        let d = self.d;
        let mut m = CMat::zeros(d, d);
        let mut idx = base;
        for a in 0..d {
            m[(a, a)] = cplx(y[idx], 0.0);
            idx += 1;
        }
        for a in 0..d {
            for b in (a + 1)..d {
                let re = y[idx];
                let im = y[idx + 1];
                idx += 2;
                m[(a, b)] = cplx(re, im);
                m[(b, a)] = cplx(re, -im);
            }
        }
        HermitianMatrix::new(m).expect("exact Hermitian construction")
    }

    /// Visits every parameter of a Hermitian block as
    /// `(var index, a, b, coeff_re, coeff_im)` where the parameter scales a
    /// matrix with entry `(a,b)` equal to `coeff` (and the conjugate at
    /// `(b,a)` implied).
    pub fn for_each_param_pub(
        &self,
        base: usize,
        visit: impl FnMut(usize, usize, usize, f64, f64),
    ) {
        self.for_each_param(base, visit)
    }

    fn for_each_param(&self, base: usize, mut visit: impl FnMut(usize, usize, usize, f64, f64)) {
        let d = self.d;
        let mut idx = base;
        for a in 0..d {
            visit(idx, a, a, 1.0, 0.0);
            idx += 1;
        }
        for a in 0..d {
            for b in (a + 1)..d {
                visit(idx, a, b, 1.0, 0.0);
                visit(idx + 1, a, b, 0.0, 1.0);
                idx += 2;
            }
        }
    }
}

/// Builds the `E_0` semidefinite program for a state, observable set, and
/// weight matrix. The single LMI block has side `d(n+1)` over the complex
/// field.
pub fn build_e0(rho: &State, x: &ObservableSet, w: &WeightMatrix) -> Result<SdpProblem> {
    let n = x.len();
    let d = x.dim();
    if rho.dim() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: rho.dim(),
        });
    }
    if w.n() != n {
        return Err(Error::DimMismatch {
            expected: n,
            got: w.n(),
        });
    }
    let layout = E0Layout::new(n, d);
    let mut problem = SdpProblem::new(layout.num_vars());

    // objective constant: Σ_jk W_jk Tr(ρ X_k X_j)
    let mut constant = 0.0;
    for j in 0..n {
        for k in 0..n {
            constant += w.matrix()[(j, k)] * trace(&(rho.rho() * x.get(k) * x.get(j))).re;
        }
    }
    problem.objective_constant = constant;

    // linear coefficients: Tr(R_l C_l) with C_l = −Σ_j W_lj {X_j, ρ}
    for l in 0..n {
        let mut c_l = CMat::zeros(d, d);
        for j in 0..n {
            let wlj = w.matrix()[(l, j)];
            if wlj != 0.0 {
                c_l -= anticommutator(x.get(j), rho.rho()).scale(wlj);
            }
        }
        layout.for_each_param(layout.r_base(l), |var, a, b, re, im| {
            problem.objective[var] += if a == b {
                c_l[(a, a)].re
            } else if im == 0.0 {
                2.0 * c_l[(a, b)].re * re
            } else {
                2.0 * c_l[(a, b)].im * im
            };
        });
    }
    // Tr(S_jk D_jk) with D_jk = (2 − δ_jk) W_jk ρ
    for j in 0..n {
        for k in j..n {
            let scale = if j == k { 1.0 } else { 2.0 } * w.matrix()[(j, k)];
            if scale == 0.0 {
                continue;
            }
            layout.for_each_param(layout.s_base(j, k), |var, a, b, re, im| {
                problem.objective[var] += if a == b {
                    scale * rho.rho()[(a, a)].re
                } else if im == 0.0 {
                    2.0 * scale * rho.rho()[(a, b)].re * re
                } else {
                    2.0 * scale * rho.rho()[(a, b)].im * im
                };
            });
        }
    }

    // the LMI block [[I, ℝ†], [ℝ, 𝕊]]: block row/col 0 holds the identity,
    // block (0, j+1) holds R_j, block (j+1, k+1) holds S_jk
    let dim = d * (n + 1);
    let mut constant_entries = Vec::with_capacity(d);
    for i in 0..d {
        constant_entries.push(Entry::real(i, i, 1.0));
    }
    let mut terms = Vec::new();
    for j in 0..n {
        let col0 = (j + 1) * d;
        layout.for_each_param(layout.r_base(j), |var, a, b, re, im| {
            if a == b {
                terms.push((var, Entry { row: a, col: col0 + a, re, im }));
            } else {
                terms.push((var, Entry { row: a, col: col0 + b, re, im }));
                terms.push((var, Entry { row: b, col: col0 + a, re, im: -im }));
            }
        });
    }
    for j in 0..n {
        for k in j..n {
            let row0 = (j + 1) * d;
            let col0 = (k + 1) * d;
            layout.for_each_param(layout.s_base(j, k), |var, a, b, re, im| {
                if j == k {
                    // Hermitian placement inside a diagonal block
                    terms.push((var, Entry { row: row0 + a, col: col0 + b, re, im }));
                } else if a == b {
                    terms.push((var, Entry { row: row0 + a, col: col0 + a, re, im }));
                } else {
                    terms.push((var, Entry { row: row0 + a, col: col0 + b, re, im }));
                    terms.push((var, Entry { row: row0 + b, col: col0 + a, re, im: -im }));
                }
            });
        }
    }
    problem.blocks.push(LmiBlock {
        dim,
        complex: true,
        constant: constant_entries,
        terms,
    });
    Ok(problem)
}

/// The optimal value of the `E_0` program with its primal witness.
#[derive(Debug, Clone)]
pub struct E0Witness {
    pub value: f64,
    pub r_ops: Vec<HermitianMatrix>,
    /// `S_jk` for `j ≤ k` in the same pair order as the layout.
    pub s_blocks: Vec<HermitianMatrix>,
    pub layout: E0Layout,
    pub residuals: sdp::Residuals,
}

impl E0Witness {
    pub fn s_block(&self, j: usize, k: usize) -> &HermitianMatrix {
        let (j, k) = if j <= k { (j, k) } else { (k, j) };
        let pair = j * self.layout.n - j * (j + 1) / 2 + k;
        &self.s_blocks[pair]
    }

    /// Smallest eigenvalue of 𝕊 − ℝℝ† (should be ≥ −1e-7 at an optimum).
    pub fn gram_slack_min_eig(&self) -> f64 {
        let (n, d) = (self.layout.n, self.layout.d);
        let mut s_big = CMat::zeros(n * d, n * d);
        let mut r_big = CMat::zeros(n * d, d);
        for j in 0..n {
            for k in 0..n {
                let blk = self.s_block(j, k).matrix();
                for a in 0..d {
                    for b in 0..d {
                        s_big[(j * d + a, k * d + b)] = blk[(a, b)];
                    }
                }
            }
            for a in 0..d {
                for b in 0..d {
                    r_big[(j * d + a, b)] = self.r_ops[j].matrix()[(a, b)];
                }
            }
        }
        let slack = &s_big - &r_big * r_big.adjoint();
        HermitianMatrix::new(slack)
            .map(|h| h.min_eigenvalue())
            .unwrap_or(f64::NEG_INFINITY)
    }
}

pub fn bound_e0(
    rho: &State,
    x: &ObservableSet,
    w: &WeightMatrix,
    settings: &SdpSettings,
) -> Result<E0Witness> {
    let problem = build_e0(rho, x, w)?;
    let solution = sdp::solve(&problem, settings)?;
    if solution.status != SdpStatus::Optimal {
        return Err(Error::Invalid(format!(
            "E_0 solve ended with status {:?} (best objective {:.6e}, residuals {:?})",
            solution.status, solution.objective_value, solution.residuals
        )));
    }
    let layout = E0Layout::new(x.len(), x.dim());
    let y = &solution.variable_values;
    let r_ops = (0..layout.n)
        .map(|j| layout.extract(y, layout.r_base(j)))
        .collect();
    let mut s_blocks = Vec::new();
    for j in 0..layout.n {
        for k in j..layout.n {
            s_blocks.push(layout.extract(y, layout.s_base(j, k)));
        }
    }
    Ok(E0Witness {
        value: solution.objective_value,
        r_ops,
        s_blocks,
        layout,
        residuals: solution.residuals,
    })
}

/// Builds the bound-saturating measurement for a pure state from the target
/// vectors `|r_j⟩`: Gram-Schmidt on `{|ψ⟩, |r_j⟩}`, a rotation by a real
/// orthogonal matrix with nonvanishing first column, rank-one outcomes on the
/// rotated basis plus a completion outcome with zero values.
fn povm_from_r_vectors(psi: &CVec, r_vecs: &[CVec]) -> Result<ApproxMeasurement> {
    let d = psi.len();
    let n = r_vecs.len();
    let scale: f64 = 1.0 + r_vecs.iter().map(|r| r.norm_squared()).sum::<f64>();

    // Gram-Schmidt over {ψ, r_1, …, r_n}; coefficients are real up to the
    // witness tolerance because ⟨ψ|r_j⟩ ∈ ℝ and Im⟨r_j|r_k⟩ = 0
    let mut basis: Vec<CVec> = vec![psi.clone()];
    for r in r_vecs {
        let mut v = r.clone();
        for u in &basis {
            let c = (u.adjoint() * &v)[(0, 0)];
            v -= u.scale_complex(c);
        }
        if v.norm() > 1e-9 * scale.sqrt() {
            let nv = v.norm();
            basis.push(v.scale(1.0 / nv));
        }
    }
    let nd = basis.len();
    // real expansion coefficients λ_jk = ⟨u_k|r_j⟩
    let lambda = DMatrix::<f64>::from_fn(n, nd, |j, k| {
        (basis[k].adjoint() * &r_vecs[j])[(0, 0)].re
    });

    // orthogonal rotation with strictly positive first column (transposed
    // type-II DCT matrix)
    let p = dct_orthogonal_transposed(nd);

    let rotated: Vec<CVec> = (0..nd)
        .map(|m| {
            let mut v = CVec::zeros(d);
            for k in 0..nd {
                v += basis[k].scale(p[(m, k)]);
            }
            v
        })
        .collect();

    let mut outcomes: Vec<CMat> = rotated
        .iter()
        .map(|u| CMat::from_fn(d, d, |r, c| u[r] * u[c].conj()))
        .collect();
    let mut completion = identity(d);
    for m in &outcomes {
        completion -= m;
    }
    let has_completion = completion.iter().map(|z| z.norm()).fold(0.0_f64, f64::max) > 1e-12;
    let mut values = DMatrix::zeros(n, nd + usize::from(has_completion));
    for m in 0..nd {
        let overlap = p[(m, 0)]; // ⟨u'_m|ψ⟩ is real and equals P_{m,0}
        for j in 0..n {
            let coeff: f64 = (0..nd).map(|k| lambda[(j, k)] * p[(m, k)]).sum();
            values[(j, m)] = coeff / overlap;
        }
    }
    if has_completion {
        outcomes.push(completion);
    }
    let povm = Povm::from_matrices(outcomes)?;
    ApproxMeasurement::new(povm, ValueAssignment::new(values)?)
}

/// Transposed type-II DCT orthogonal matrix: column 0 is constant `1/√n`.
fn dct_orthogonal_transposed(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |j, k| {
        if k == 0 {
            1.0 / (n as f64).sqrt()
        } else {
            (2.0 / n as f64).sqrt()
                * (std::f64::consts::PI * k as f64 * (2.0 * j as f64 + 1.0) / (2.0 * n as f64))
                    .cos()
        }
    })
}

trait ScaleComplex {
    fn scale_complex(&self, c: crate::linalg::C64) -> Self;
}

impl ScaleComplex for CVec {
    fn scale_complex(&self, c: crate::linalg::C64) -> Self {
        self.map(|z| z * c)
    }
}

/// Bound-saturating measurement for a pure state from an `E_0` witness.
/// Refuses construction when the witness violates `Im(R†R) = 0` beyond
/// `1e-7·‖R‖²`, which signals a degenerate optimum.
pub fn optimal_povm_pure(
    rho: &State,
    x: &ObservableSet,
    _w: &WeightMatrix,
    witness: &E0Witness,
) -> Result<ApproxMeasurement> {
    let psi = rho.pure_vector()?;
    let n = x.len();
    let r_vecs: Vec<CVec> = (0..n).map(|j| witness.r_ops[j].matrix() * &psi).collect();
    let scale: f64 = r_vecs.iter().map(|r| r.norm_squared()).sum::<f64>().max(1.0);
    let mut im_defect = 0.0_f64;
    for j in 0..n {
        for k in 0..n {
            im_defect = im_defect.max((r_vecs[j].adjoint() * &r_vecs[k])[(0, 0)].im.abs());
        }
        im_defect = im_defect.max((psi.adjoint() * &r_vecs[j])[(0, 0)].im.abs());
    }
    if im_defect > 1e-7 * scale {
        return Err(Error::Invalid(format!(
            "E_0 witness violates Im(R†R)=0 by {im_defect:.3e} (scale {scale:.3e}); \
             construction refused"
        )));
    }
    povm_from_r_vectors(&psi, &r_vecs)
}

/// Closed-form optimal measurement for two observables on a pure state,
/// without invoking the SDP.
///
/// With the mean-shifted `𝐗 = √w₁X₁ + i√w₂X₂` the stationary targets are
/// `𝐑|ψ⟩ = 𝐗|ψ⟩/(2(1−μ))` and `𝐑†|ψ⟩ = 𝐗†|ψ⟩/(2μ)` at
/// `μ = √(α−β)/(√(α−β)+√(α+β))`; substituting `‖𝐗†ψ‖² = α−β` and
/// `‖𝐗ψ‖² = α+β` turns both into unit directions scaled by
/// `(√(α−β)+√(α+β))/2`, which stays finite for minimal-uncertainty states
/// where `α = |β|`.
pub fn optimal_povm_pure_two(
    rho: &State,
    x1: &CMat,
    x2: &CMat,
    w1: f64,
    w2: f64,
) -> Result<ApproxMeasurement> {
    let psi = rho.pure_vector()?;
    let d = psi.len();
    let mean1 = rho.expectation(x1);
    let mean2 = rho.expectation(x2);
    let x1s = x1 - identity(d).scale(mean1);
    let x2s = x2 - identity(d).scale(mean2);
    let a1 = w1.sqrt();
    let a2 = w2.sqrt();

    // 𝐗ψ and 𝐗†ψ
    let xpsi: CVec = (&x1s * &psi).scale(a1) + (&x2s * &psi).map(|z| z * cplx(0.0, a2));
    let xdpsi: CVec = (&x1s * &psi).scale(a1) - (&x2s * &psi).map(|z| z * cplx(0.0, a2));
    let v = xpsi.norm_squared(); // α + β
    let u = xdpsi.norm_squared(); // α − β
    let s = 0.5 * (u.sqrt() + v.sqrt());
    let floor = 1e-20 * (u + v).max(1.0);

    let (p_hat, q_hat): (CVec, CVec) = if v <= floor && u <= floor {
        // both ladder vectors vanish: the exact joint measurement is the
        // eigenbasis of either observable
        (CVec::zeros(d), CVec::zeros(d))
    } else if v <= floor {
        let q_hat = xdpsi.scale(1.0 / u.sqrt());
        let p_hat = q_hat.map(|z| z * cplx(0.0, 1.0));
        (p_hat, q_hat)
    } else if u <= floor {
        let p_hat = xpsi.scale(1.0 / v.sqrt());
        let q_hat = p_hat.map(|z| z * cplx(0.0, -1.0));
        (p_hat, q_hat)
    } else {
        (xpsi.scale(1.0 / v.sqrt()), xdpsi.scale(1.0 / u.sqrt()))
    };
    let p_vec = p_hat.scale(s);
    let q_vec = q_hat.scale(s);
    // a₁r₁ = (p+q)/2, i a₂r₂ = (p−q)/2
    let r1 = (&p_vec + &q_vec).scale(0.5 / a1);
    let r2 = (&p_vec - &q_vec).map(|z| z * cplx(0.0, -0.5 / a2));

    let shifted = povm_from_r_vectors(&psi, &[r1, r2])?;
    // shift the outcome values back to approximate the original observables
    let mut values = shifted.assignment.values().clone();
    for m in 0..values.ncols() {
        values[(0, m)] += mean1;
        values[(1, m)] += mean2;
    }
    ApproxMeasurement::new(shifted.povm, ValueAssignment::new(values)?)
}

/// Best-effort upper bound on the minimal weighted error: Nelder-Mead over
/// K-outcome POVMs with random restarts. Outcomes are parameterized as
/// `M_m = N^{-1/2}(A_m² + εI/K)N^{-1/2}` with `N = Σ_m (A_m² + εI/K)` for
/// Hermitian `A_m`, and the value map is the per-POVM optimum.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub best_error: f64,
    pub best_povm: Povm,
    pub best_assignment: ValueAssignment,
    pub restarts_used: usize,
}

pub struct OracleOptions {
    pub num_outcomes: usize,
    pub restarts: usize,
    pub seed: u64,
    pub max_evals: usize,
}

impl OracleOptions {
    pub fn new(n_observables: usize) -> Self {
        Self {
            num_outcomes: n_observables + 2,
            restarts: 32,
            seed: 0,
            max_evals: 0, // 0: scaled to the parameter count
        }
    }
}

pub fn brute_force_min_error(
    rho: &State,
    x: &ObservableSet,
    w: &WeightMatrix,
    opts: &OracleOptions,
) -> Result<OracleResult> {
    let d = rho.dim();
    let k = opts.num_outcomes.max(2);
    let dim_params = k * d * d;
    let layout = E0Layout::new(1, d); // reuse the Hermitian packing of one block
    let mut master = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best: Option<(f64, Povm, ValueAssignment)> = None;
    let max_evals = if opts.max_evals == 0 {
        400 * dim_params
    } else {
        opts.max_evals
    };

    for _restart in 0..opts.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(master.random());
        let mut x0 = vec![0.0; dim_params];
        for v in x0.iter_mut() {
            *v = rng.random::<f64>() * 2.0 - 1.0;
        }
        let objective = |params: &[f64]| -> f64 {
            match povm_from_params(params, d, k, &layout) {
                Some(povm) => evaluate_povm(rho, x, w, &povm),
                None => f64::INFINITY,
            }
        };
        let stage1 = neldermead::minimize(
            objective,
            &x0,
            &NmOptions {
                max_evals,
                init_step: 0.4,
                ..Default::default()
            },
        );
        // polish from the stage-1 point with a smaller initial simplex
        let stage2 = neldermead::minimize(
            objective,
            &stage1.x,
            &NmOptions {
                max_evals: max_evals / 2,
                init_step: 0.03,
                ..Default::default()
            },
        );
        let final_x = if stage2.value < stage1.value {
            stage2.x
        } else {
            stage1.x
        };
        if let Some(povm) = povm_from_params(&final_x, d, k, &layout) {
            let assignment = optimal_values_for_povm(rho, x, &povm)?;
            let am = ApproxMeasurement::new(povm, assignment)?;
            let err = weighted_error(&approx_error_matrix(rho, x, &am)?, w);
            if best.as_ref().map_or(true, |(b, _, _)| err < *b) {
                best = Some((err, am.povm, am.assignment));
            }
        }
    }
    let (best_error, best_povm, best_assignment) =
        best.ok_or_else(|| Error::Invalid("oracle failed to produce any POVM".into()))?;
    Ok(OracleResult {
        best_error,
        best_povm,
        best_assignment,
        restarts_used: opts.restarts,
    })
}

fn povm_from_params(params: &[f64], d: usize, k: usize, layout: &E0Layout) -> Option<Povm> {
    let block = d * d;
    let mut squares: Vec<CMat> = Vec::with_capacity(k);
    let mut total = CMat::zeros(d, d);
    for m in 0..k {
        let a = layout.extract(params, m * block);
        let sq = a.matrix() * a.matrix();
        total += &sq;
        squares.push(sq);
    }
    let eps = 1e-12 * (trace(&total).re.abs() + 1.0);
    for sq in squares.iter_mut() {
        *sq += identity(d).scale(eps / k as f64);
    }
    total += identity(d).scale(eps);
    let h = HermitianMatrix::new(total).ok()?;
    let (vals, _) = eig_hermitian(&h);
    if vals[0] <= 1e-14 {
        return None;
    }
    let n_inv_sqrt = hermitian_function(&h, |x| 1.0 / x.max(1e-300).sqrt());
    let outcomes: Vec<CMat> = squares
        .into_iter()
        .map(|sq| &n_inv_sqrt * sq * &n_inv_sqrt)
        .collect();
    Povm::from_matrices(outcomes).ok()
}

fn evaluate_povm(rho: &State, x: &ObservableSet, w: &WeightMatrix, povm: &Povm) -> f64 {
    match optimal_values_for_povm(rho, x, povm)
        .and_then(|f| ApproxMeasurement::new(povm.clone(), f))
        .and_then(|am| approx_error_matrix(rho, x, &am))
    {
        Ok(q) => weighted_error(&q, w),
        Err(_) => f64::INFINITY,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn paulis() -> [CMat; 3] {
        [
            CMat::from_row_slice(2, 2, &[cplx(0., 0.), cplx(1., 0.), cplx(1., 0.), cplx(0., 0.)]),
            CMat::from_row_slice(2, 2, &[cplx(0., 0.), cplx(0., -1.), cplx(0., 1.), cplx(0., 0.)]),
            CMat::from_row_slice(2, 2, &[cplx(1., 0.), cplx(0., 0.), cplx(0., 0.), cplx(-1., 0.)]),
        ]
    }

    fn ket0() -> CVec {
        CVec::from_vec(vec![cplx(1., 0.), cplx(0., 0.)])
    }

    #[test]
    fn e0_single_observable_is_zero() {
        let [sx, _, _] = paulis();
        let rho = State::from_matrix((identity(2) + sx.scale(0.3)).scale(0.5)).unwrap();
        let x = ObservableSet::from_matrices(vec![sx]).unwrap();
        let w = WeightMatrix::identity(1);
        let witness = bound_e0(&rho, &x, &w, &SdpSettings::default()).unwrap();
        assert!(witness.value.abs() < 1e-7, "value {}", witness.value);
    }

    #[test]
    fn e0_lmi_sizes() {
        let [sx, sy, sz] = paulis();
        let rho = State::pure(&ket0()).unwrap();
        let x = ObservableSet::from_matrices(vec![sx.scale(0.5), sy.scale(0.5), sz.scale(0.5)])
            .unwrap();
        let p = build_e0(&rho, &x, &WeightMatrix::identity(3)).unwrap();
        assert_eq!(p.blocks[0].dim, 8);
        assert_eq!(p.num_vars, (3 + 6) * 4);
    }

    #[test]
    fn e0_pure_qubit_pair_matches_closed_form() {
        let [sx, sy, _] = paulis();
        let rho = State::pure(&ket0()).unwrap();
        let x = ObservableSet::from_matrices(vec![sx.scale(0.5), sy.scale(0.5)]).unwrap();
        let w = WeightMatrix::identity(2);
        let witness = bound_e0(&rho, &x, &w, &SdpSettings::default()).unwrap();
        assert_relative_eq!(witness.value, 0.25, epsilon = 1e-6);
        assert!(witness.gram_slack_min_eig() > -1e-7);
    }

    #[test]
    fn e0_commuting_is_zero() {
        let d1 = CMat::from_diagonal(&CVec::from_vec(vec![cplx(1., 0.), cplx(-1., 0.)]));
        let d2 = CMat::from_diagonal(&CVec::from_vec(vec![cplx(2., 0.), cplx(1., 0.)]));
        let rho = State::from_matrix(identity(2).scale(0.5)).unwrap();
        let x = ObservableSet::from_matrices(vec![d1, d2]).unwrap();
        let witness = bound_e0(&rho, &x, &WeightMatrix::identity(2), &SdpSettings::default())
            .unwrap();
        assert!(witness.value.abs() < 1e-7, "value {}", witness.value);
    }

    #[test]
    fn povm_two_closed_form_qubit() {
        // |0⟩ with (σx/2, σy/2): achieved total error 1/4, the degenerate
        // minimal-uncertainty branch
        let [sx, sy, _] = paulis();
        let rho = State::pure(&ket0()).unwrap();
        let x1 = sx.scale(0.5);
        let x2 = sy.scale(0.5);
        let am = optimal_povm_pure_two(&rho, &x1, &x2, 1.0, 1.0).unwrap();
        let x = ObservableSet::from_matrices(vec![x1, x2]).unwrap();
        let q = approx_error_matrix(&rho, &x, &am).unwrap();
        let err = weighted_error(&q, &WeightMatrix::identity(2));
        assert_relative_eq!(err, 0.25, epsilon = 1e-9);
    }

    #[test]
    fn povm_two_eigenstate_exact() {
        // eigenstate of X₁ with vanishing commutator expectation: zero error
        let [sx, sy, _] = paulis();
        let plus = CVec::from_vec(vec![cplx(1., 0.), cplx(1., 0.)]);
        let rho = State::pure(&plus).unwrap();
        let am = optimal_povm_pure_two(&rho, &sx, &sy, 1.0, 1.0).unwrap();
        let x = ObservableSet::from_matrices(vec![sx.clone(), sy.clone()]).unwrap();
        let q = approx_error_matrix(&rho, &x, &am).unwrap();
        let err = weighted_error(&q, &WeightMatrix::identity(2));
        assert!(err.abs() < 1e-10, "err {err}");
    }

    #[test]
    fn povm_from_witness_reproduces_r_action() {
        use rand::prelude::*;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let d = 3;
        let psi = CVec::from_fn(d, |_, _| {
            cplx(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let rho = State::pure(&psi).unwrap();
        let mats: Vec<CMat> = (0..2)
            .map(|_| {
                let m = CMat::from_fn(d, d, |_, _| {
                    cplx(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
                });
                (&m + m.adjoint()).scale(0.5)
            })
            .collect();
        let x = ObservableSet::from_matrices(mats).unwrap();
        let w = WeightMatrix::identity(2);
        let witness = bound_e0(&rho, &x, &w, &SdpSettings::default()).unwrap();
        let am = optimal_povm_pure(&rho, &x, &w, &witness).unwrap();
        let psi_n = rho.pure_vector().unwrap();
        for j in 0..2 {
            let target = witness.r_ops[j].matrix() * &psi_n;
            let got = am.r_op(j) * &psi_n;
            assert!((got - target).norm() < 1e-6, "r action mismatch");
        }
        // achieved error matches the bound
        let q = approx_error_matrix(&rho, &x, &am).unwrap();
        let err = weighted_error(&q, &w);
        assert_relative_eq!(err, witness.value, epsilon = 1e-5);
    }

    #[test]
    fn oracle_commuting_reaches_zero() {
        let d1 = CMat::from_diagonal(&CVec::from_vec(vec![cplx(1., 0.), cplx(-1., 0.)]));
        let d2 = CMat::from_diagonal(&CVec::from_vec(vec![cplx(2., 0.), cplx(1., 0.)]));
        let rho = State::from_matrix((identity(2) + paulis()[2].scale(0.3)).scale(0.5)).unwrap();
        let x = ObservableSet::from_matrices(vec![d1, d2]).unwrap();
        let res = brute_force_min_error(
            &rho,
            &x,
            &WeightMatrix::identity(2),
            &OracleOptions {
                restarts: 4,
                seed: 5,
                ..OracleOptions::new(2)
            },
        )
        .unwrap();
        assert!(res.best_error < 1e-6, "best {}", res.best_error);
    }

    #[test]
    fn oracle_deterministic_under_seed() {
        let [sx, sy, _] = paulis();
        let rho = State::pure(&ket0()).unwrap();
        let x = ObservableSet::from_matrices(vec![sx.scale(0.5), sy.scale(0.5)]).unwrap();
        let opts = OracleOptions {
            restarts: 2,
            seed: 9,
            max_evals: 3000,
            ..OracleOptions::new(2)
        };
        let a = brute_force_min_error(&rho, &x, &WeightMatrix::identity(2), &opts).unwrap();
        let b = brute_force_min_error(&rho, &x, &WeightMatrix::identity(2), &opts).unwrap();
        assert_eq!(a.best_error, b.best_error);
    }
}
