//! Multiparameter quantum estimation: symmetric logarithmic derivatives,
//! Fisher information matrices, and the precision-tradeoff bounds obtained by
//! taking the SLDs as the observable set.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::bounds;
use crate::e0;
use crate::linalg::{
    cplx, eig_hermitian, fnorm_real, kron, real_sym_inv_sqrt, trace, CMat, CVec, HermitianMatrix,
};
use crate::quantum::{BasisChoice, ObservableSet, Povm, State, WeightMatrix};
use crate::sdp::SdpSettings;
use crate::{Error, Result};

/// Eigenvalue-pair cutoff for the SLD eigenbasis formula.
pub const SLD_SUPPORT_TOL: f64 = 1e-12;
/// Default central-difference step for families without analytic derivatives.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

type EvalFn = dyn Fn(&[f64]) -> Result<State> + Send + Sync;
type DerivFn = dyn Fn(&[f64]) -> Result<Vec<CMat>> + Send + Sync;

/// A parameterized state family with optional analytic derivatives; central
/// finite differences with step [`DEFAULT_FD_STEP`] otherwise.
#[derive(Clone)]
pub struct ParamFamily {
    pub name: String,
    pub n_params: usize,
    pub dim: usize,
    pub param_names: Vec<String>,
    eval: Arc<EvalFn>,
    deriv: Option<Arc<DerivFn>>,
}

impl ParamFamily {
    pub fn new(
        name: impl Into<String>,
        n_params: usize,
        dim: usize,
        param_names: Vec<String>,
        eval: Arc<EvalFn>,
        deriv: Option<Arc<DerivFn>>,
    ) -> Self {
        Self {
            name: name.into(),
            n_params,
            dim,
            param_names,
            eval,
            deriv,
        }
    }

    pub fn state(&self, x: &[f64]) -> Result<State> {
        if x.len() != self.n_params {
            return Err(Error::DimMismatch {
                expected: self.n_params,
                got: x.len(),
            });
        }
        (self.eval)(x)
    }

    /// Analytic derivatives when available, otherwise central differences.
    /// Every derivative is validated Hermitian and traceless.
    pub fn derivatives(&self, x: &[f64]) -> Result<Vec<CMat>> {
        let derivs = match &self.deriv {
            Some(f) => f(x)?,
            None => self.derivatives_fd(x, DEFAULT_FD_STEP)?,
        };
        for d in &derivs {
            let t = trace(d);
            if t.norm() > 1e-8 {
                return Err(Error::Invalid(format!(
                    "state derivative has trace {:.3e}",
                    t.norm()
                )));
            }
            let defect = crate::linalg::hermiticity_defect(d);
            if defect > 1e-9 {
                return Err(Error::NotHermitian(defect));
            }
        }
        Ok(derivs)
    }

    /// Central finite differences, independent of any analytic evaluator.
    pub fn derivatives_fd(&self, x: &[f64], h: f64) -> Result<Vec<CMat>> {
        let mut out = Vec::with_capacity(self.n_params);
        for j in 0..self.n_params {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[j] += h;
            xm[j] -= h;
            let sp = self.state(&xp)?;
            let sm = self.state(&xm)?;
            out.push((sp.rho() - sm.rho()).scale(1.0 / (2.0 * h)));
        }
        Ok(out)
    }

    /// Restriction to a subset of parameters, the others held at `base`.
    pub fn restrict(&self, indices: &[usize], base: Vec<f64>) -> Result<ParamFamily> {
        if base.len() != self.n_params {
            return Err(Error::DimMismatch {
                expected: self.n_params,
                got: base.len(),
            });
        }
        for &i in indices {
            if i >= self.n_params {
                return Err(Error::Invalid(format!("parameter index {i} out of range")));
            }
        }
        let idx: Vec<usize> = indices.to_vec();
        let parent_eval = Arc::clone(&self.eval);
        let parent_deriv = self.deriv.clone();
        let base_eval = base.clone();
        let idx_eval = idx.clone();
        let eval = Arc::new(move |x: &[f64]| -> Result<State> {
            let mut full = base_eval.clone();
            for (slot, &i) in idx_eval.iter().enumerate() {
                full[i] = x[slot];
            }
            parent_eval(&full)
        });
        let deriv = parent_deriv.map(|pd| {
            let base_d = base.clone();
            let idx_d = idx.clone();
            Arc::new(move |x: &[f64]| -> Result<Vec<CMat>> {
                let mut full = base_d.clone();
                for (slot, &i) in idx_d.iter().enumerate() {
                    full[i] = x[slot];
                }
                let all = pd(&full)?;
                Ok(idx_d.iter().map(|&i| all[i].clone()).collect())
            }) as Arc<DerivFn>
        });
        Ok(ParamFamily {
            name: format!("{}[{:?}]", self.name, indices),
            n_params: idx.len(),
            dim: self.dim,
            param_names: idx.iter().map(|&i| self.param_names[i].clone()).collect(),
            eval,
            deriv,
        })
    }
}

/// The SLD solving `∂ρ = (ρL + Lρ)/2` on the support of ρ, with
/// kernel-kernel entries set to zero.
pub fn sld(rho: &State, drho: &CMat) -> Result<HermitianMatrix> {
    let d = rho.dim();
    if drho.nrows() != d || drho.ncols() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: drho.nrows(),
        });
    }
    let (vals, vecs) = eig_hermitian(rho.hermitian());
    let in_basis = vecs.adjoint() * drho * &vecs;
    let mut l = CMat::zeros(d, d);
    for a in 0..d {
        for b in 0..d {
            let denom = vals[a] + vals[b];
            if denom > SLD_SUPPORT_TOL {
                l[(a, b)] = 2.0 * in_basis[(a, b)] / denom;
            }
        }
    }
    let l = &vecs * l * vecs.adjoint();
    let lh = HermitianMatrix::new(l)?;
    // residual check: the reconstruction must match ∂ρ except on the
    // kernel-kernel block, where the SLD equation has no solution
    let recon = (rho.rho() * lh.matrix() + lh.matrix() * rho.rho()).scale(0.5);
    let resid = &recon - drho;
    let resid_basis = vecs.adjoint() * resid * &vecs;
    let mut worst = 0.0_f64;
    for a in 0..d {
        for b in 0..d {
            if vals[a] + vals[b] > SLD_SUPPORT_TOL {
                worst = worst.max(resid_basis[(a, b)].norm());
            }
        }
    }
    let scale = 1.0 + drho.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    if worst / scale > 1e-8 {
        return Err(Error::Invalid(format!(
            "derivative is incompatible with the state support (residual {worst:.3e})"
        )));
    }
    Ok(lh)
}

/// SLDs of a family at a point.
pub fn slds_at(family: &ParamFamily, x: &[f64]) -> Result<Vec<HermitianMatrix>> {
    let rho = family.state(x)?;
    family
        .derivatives(x)?
        .iter()
        .map(|d| sld(&rho, d))
        .collect()
}

/// Quantum Fisher information matrix `(F_Q)_jk = Tr(ρ{L_j,L_k})/2`.
pub fn qfi_matrix(rho: &State, slds: &[HermitianMatrix]) -> DMatrix<f64> {
    let n = slds.len();
    DMatrix::from_fn(n, n, |j, k| {
        trace(&(rho.rho() * slds[j].matrix() * slds[k].matrix())).re
    })
}

/// Classical Fisher information matrix of one measurement:
/// `(F_C)_jk = Σ_m ∂_j p_m ∂_k p_m / p_m`. Outcomes with `p_m < 1e-12` are
/// skipped when their derivative also vanishes and rejected otherwise.
pub fn cfi_matrix(family: &ParamFamily, povm: &Povm, x: &[f64]) -> Result<DMatrix<f64>> {
    let rho = family.state(x)?;
    if povm.dim() != rho.dim() {
        return Err(Error::DimMismatch {
            expected: rho.dim(),
            got: povm.dim(),
        });
    }
    let derivs = family.derivatives(x)?;
    let n = derivs.len();
    let mut f = DMatrix::zeros(n, n);
    for m in 0..povm.len() {
        let p = trace(&(rho.rho() * povm.outcome(m))).re;
        let dp: Vec<f64> = derivs
            .iter()
            .map(|d| trace(&(d * povm.outcome(m))).re)
            .collect();
        if p < 1e-12 {
            let dmax = dp.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
            if dmax > 1e-8 {
                return Err(Error::Invalid(format!(
                    "outcome {m} has probability {p:.3e} but derivative {dmax:.3e}: \
                     singular Fisher information"
                )));
            }
            continue;
        }
        for j in 0..n {
            for k in 0..n {
                f[(j, k)] += dp[j] * dp[k] / p;
            }
        }
    }
    Ok(f)
}

/// `L̃_j = Σ_k (F_Q^{-1/2})_{jk} L_k`, the SLD set normalized to unit QFI.
pub fn normalized_slds(
    f_q: &DMatrix<f64>,
    slds: &[HermitianMatrix],
) -> Result<Vec<HermitianMatrix>> {
    let inv_sqrt = real_sym_inv_sqrt(f_q, "F_Q")?;
    let n = slds.len();
    let d = slds[0].dim();
    (0..n)
        .map(|j| {
            let mut acc = CMat::zeros(d, d);
            for (k, l) in slds.iter().enumerate() {
                acc += l.matrix().scale(inv_sqrt[(j, k)]);
            }
            HermitianMatrix::new(acc)
        })
        .collect()
}

/// `Tr(F_Q⁻¹ F_C) ≤ n − (√(‖F_Q^{-1/2} S̃_Im F_Q^{-1/2}‖_F + 1) − 1)²`.
pub fn metrology_bound_analytic(f_q: &DMatrix<f64>, s_im_tilde: &DMatrix<f64>) -> Result<f64> {
    let n = f_q.nrows() as f64;
    let inv_sqrt = real_sym_inv_sqrt(f_q, "F_Q")?;
    let hat = &inv_sqrt * s_im_tilde * &inv_sqrt;
    let t = fnorm_real(&hat);
    Ok(n - ((t + 1.0).sqrt() - 1.0).powi(2))
}

/// The comparison value of summing pair bounds on pure states:
/// `n − ‖F_Q^{-1/2} S_Im F_Q^{-1/2}‖_F² / (2(n−1))`.
pub fn pairwise_comparison_value(f_q: &DMatrix<f64>, s_im: &DMatrix<f64>) -> Result<f64> {
    let n = f_q.nrows() as f64;
    let inv_sqrt = real_sym_inv_sqrt(f_q, "F_Q")?;
    let hat = &inv_sqrt * s_im * &inv_sqrt;
    let t = fnorm_real(&hat);
    Ok(n - t * t / (2.0 * (n - 1.0)))
}

/// SDP upper bound `Tr(F_Q⁻¹ F_C) ≤ n − E_0(ρ, L̃, I)` after normalizing the
/// SLDs to unit QFI.
pub fn metrology_bound_sdp(
    rho: &State,
    slds: &[HermitianMatrix],
    settings: &SdpSettings,
) -> Result<f64> {
    let f_q = qfi_matrix(rho, slds);
    let tilde = normalized_slds(&f_q, slds)?;
    let x = ObservableSet::new(tilde)?;
    let n = slds.len();
    let witness = e0::bound_e0(rho, &x, &WeightMatrix::identity(n), settings)?;
    Ok(n as f64 - witness.value)
}

/// Two-parameter bound:
/// `w₁(F_Q−F_C)₁₁ + w₂(F_Q−F_C)₂₂ ≥ Σ_q (λ_q/2)(α_q − √(α_q²−β_q²))`
/// for the SLD pair and a complete basis choice.
pub fn metrology_bound_two_param(
    rho: &State,
    l1: &HermitianMatrix,
    l2: &HermitianMatrix,
    w1: f64,
    w2: f64,
    basis: &BasisChoice,
) -> Result<f64> {
    Ok(bounds::bound_mixed_pair_ea(rho, l1.matrix(), l2.matrix(), w1, w2, basis)?.value)
}

/// The family of `p` independent copies: `ρ → ρ^⊗p` with
/// `∂_j(ρ^⊗p) = Σ_pos ρ⊗…⊗∂_jρ⊗…⊗ρ`. Guarded to total dimension ≤ 256.
pub fn collectivize(family: &ParamFamily, copies: usize) -> Result<ParamFamily> {
    if copies == 0 {
        return Err(Error::Invalid("copies must be ≥ 1".into()));
    }
    let total_dim = family.dim.checked_pow(copies as u32).unwrap_or(usize::MAX);
    if total_dim > 256 {
        return Err(Error::Invalid(format!(
            "collective dimension {total_dim} exceeds the 256 guard"
        )));
    }
    if copies == 1 {
        return Ok(family.clone());
    }
    let inner_eval = Arc::clone(&family.eval);
    let inner = family.clone();
    let eval = Arc::new(move |x: &[f64]| -> Result<State> {
        let rho = inner_eval(x)?;
        let mut acc = rho.rho().clone();
        for _ in 1..copies {
            acc = kron(&acc, rho.rho());
        }
        State::from_matrix(acc)
    });
    let deriv = Arc::new(move |x: &[f64]| -> Result<Vec<CMat>> {
        let rho = inner.state(x)?;
        let derivs = inner.derivatives(x)?;
        let d1 = rho.dim();
        let mut out = Vec::with_capacity(derivs.len());
        for dj in &derivs {
            let mut total = CMat::zeros(d1.pow(copies as u32), d1.pow(copies as u32));
            for pos in 0..copies {
                let mut acc = if pos == 0 { dj.clone() } else { rho.rho().clone() };
                for q in 1..copies {
                    let factor = if q == pos { dj } else { rho.rho() };
                    acc = kron(&acc, factor);
                }
                total += acc;
            }
            out.push(total);
        }
        Ok(out)
    });
    Ok(ParamFamily {
        name: format!("{}^(x{})", family.name, copies),
        n_params: family.n_params,
        dim: total_dim,
        param_names: family.param_names.clone(),
        eval,
        deriv: Some(deriv),
    })
}

fn paulis() -> [CMat; 3] {
    [
        CMat::from_row_slice(2, 2, &[cplx(0., 0.), cplx(1., 0.), cplx(1., 0.), cplx(0., 0.)]),
        CMat::from_row_slice(2, 2, &[cplx(0., 0.), cplx(0., -1.), cplx(0., 1.), cplx(0., 0.)]),
        CMat::from_row_slice(2, 2, &[cplx(1., 0.), cplx(0., 0.), cplx(0., 0.), cplx(-1., 0.)]),
    ]
}

/// Qubit Bloch family `ρ = (I + λ n̂(θ,φ)·σ)/2` with parameters `(λ, θ, φ)`.
pub fn qubit_bloch_family() -> ParamFamily {
    let eval = Arc::new(|x: &[f64]| -> Result<State> {
        let (lam, theta, phi) = (x[0], x[1], x[2]);
        if lam.abs() > 1.0 {
            return Err(Error::Invalid(format!("|λ| = {} exceeds 1", lam.abs())));
        }
        let [sx, sy, sz] = paulis();
        let n = bloch_dir(theta, phi);
        let rho = (crate::linalg::identity(2)
            + sx.scale(lam * n[0])
            + sy.scale(lam * n[1])
            + sz.scale(lam * n[2]))
        .scale(0.5);
        State::from_matrix(rho)
    });
    let deriv = Arc::new(|x: &[f64]| -> Result<Vec<CMat>> {
        let (lam, theta, phi) = (x[0], x[1], x[2]);
        let [sx, sy, sz] = paulis();
        let dot = |v: [f64; 3]| (sx.scale(v[0]) + sy.scale(v[1]) + sz.scale(v[2])).scale(0.5);
        let n = bloch_dir(theta, phi);
        let dn_dtheta = [
            theta.cos() * phi.cos(),
            theta.cos() * phi.sin(),
            -theta.sin(),
        ];
        let dn_dphi = [-theta.sin() * phi.sin(), theta.sin() * phi.cos(), 0.0];
        Ok(vec![
            dot(n),
            dot(dn_dtheta).scale(lam),
            dot(dn_dphi).scale(lam),
        ])
    });
    ParamFamily::new(
        "qubit_bloch",
        3,
        2,
        vec!["lambda".into(), "theta".into(), "phi".into()],
        eval,
        Some(deriv),
    )
}

fn bloch_dir(theta: f64, phi: f64) -> [f64; 3] {
    [
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    ]
}

/// The diagonal spin-1 example family `ρ(p) = diag(p/2, 1−p, p/2)`.
pub fn spin1_family() -> ParamFamily {
    let eval = Arc::new(|x: &[f64]| -> Result<State> {
        let p = x[0];
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Invalid(format!("p = {p} outside [0, 1]")));
        }
        let rho = CMat::from_diagonal(&CVec::from_vec(vec![
            cplx(p / 2.0, 0.0),
            cplx(1.0 - p, 0.0),
            cplx(p / 2.0, 0.0),
        ]));
        State::from_matrix(rho)
    });
    let deriv = Arc::new(|_x: &[f64]| -> Result<Vec<CMat>> {
        Ok(vec![CMat::from_diagonal(&CVec::from_vec(vec![
            cplx(0.5, 0.0),
            cplx(-1.0, 0.0),
            cplx(0.5, 0.0),
        ]))])
    });
    ParamFamily::new("spin1_p", 1, 3, vec!["p".into()], eval, Some(deriv))
}

/// The three spin-1 operators paired with [`spin1_family`].
pub fn spin1_observables() -> ObservableSet {
    let x1 = CMat::from_row_slice(
        3,
        3,
        &[
            cplx(0., 0.),
            cplx(1., 0.),
            cplx(0., 0.),
            cplx(1., 0.),
            cplx(0., 0.),
            cplx(1., 0.),
            cplx(0., 0.),
            cplx(1., 0.),
            cplx(0., 0.),
        ],
    );
    let x2 = CMat::from_row_slice(
        3,
        3,
        &[
            cplx(0., 0.),
            cplx(0., -1.),
            cplx(0., 0.),
            cplx(0., 1.),
            cplx(0., 0.),
            cplx(0., -1.),
            cplx(0., 0.),
            cplx(0., 1.),
            cplx(0., 0.),
        ],
    );
    let x3 = CMat::from_diagonal(&CVec::from_vec(vec![
        cplx(1., 0.),
        cplx(0., 0.),
        cplx(-1., 0.),
    ]));
    ObservableSet::from_matrices(vec![x1, x2, x3]).expect("spin-1 operators are independent")
}

/// The half-Pauli triple `(σx/2, σy/2, σz/2)`.
pub fn pauli_half_observables() -> ObservableSet {
    let [sx, sy, sz] = paulis();
    ObservableSet::from_matrices(vec![sx.scale(0.5), sy.scale(0.5), sz.scale(0.5)])
        .expect("Pauli operators are independent")
}

/// Three-qubit pure family
/// `|ψ⟩ = sinθ₀|ψ₁⟩ + cosθ₀ e^{iφ₀}|ψ₂⟩` over the weight-1 and weight-2
/// computational subspaces, parameterized by `(θ₀..θ₄, φ₀..φ₄)`.
pub fn three_qubit_family() -> ParamFamily {
    let eval = Arc::new(|x: &[f64]| -> Result<State> {
        State::pure(&three_qubit_psi(x))
    });
    let deriv = Arc::new(|x: &[f64]| -> Result<Vec<CMat>> {
        let psi = three_qubit_psi(x);
        Ok(three_qubit_dpsi(x)
            .into_iter()
            .map(|dpsi| {
                CMat::from_fn(8, 8, |r, c| dpsi[r] * psi[c].conj() + psi[r] * dpsi[c].conj())
            })
            .collect())
    });
    ParamFamily::new(
        "three_qubit",
        10,
        8,
        (0..5)
            .map(|i| format!("theta{i}"))
            .chain((0..5).map(|i| format!("phi{i}")))
            .collect(),
        eval,
        Some(deriv),
    )
}

fn basis8(label: u8) -> CVec {
    CVec::from_fn(8, |r, _| if r == label as usize { cplx(1., 0.) } else { cplx(0., 0.) })
}

fn three_qubit_psi(x: &[f64]) -> CVec {
    let (t, p) = (&x[..5], &x[5..]);
    let e = |phi: f64| cplx(phi.cos(), phi.sin());
    let psi1 = basis8(0b001).scale(t[1].sin() * t[2].sin())
        + basis8(0b010).map(|z| z * e(p[1]) * (t[1].sin() * t[2].cos()))
        + basis8(0b100).map(|z| z * e(p[2]) * t[1].cos());
    let psi2 = basis8(0b110).scale(t[3].sin() * t[4].sin())
        + basis8(0b101).map(|z| z * e(p[3]) * (t[3].sin() * t[4].cos()))
        + basis8(0b011).map(|z| z * e(p[4]) * t[3].cos());
    psi1.scale(t[0].sin()) + psi2.map(|z| z * e(p[0]) * t[0].cos())
}

fn three_qubit_dpsi(x: &[f64]) -> Vec<CVec> {
    let (t, p) = (&x[..5], &x[5..]);
    let e = |phi: f64| cplx(phi.cos(), phi.sin());
    let i = cplx(0.0, 1.0);
    let psi1 = basis8(0b001).scale(t[1].sin() * t[2].sin())
        + basis8(0b010).map(|z| z * e(p[1]) * (t[1].sin() * t[2].cos()))
        + basis8(0b100).map(|z| z * e(p[2]) * t[1].cos());
    let psi2 = basis8(0b110).scale(t[3].sin() * t[4].sin())
        + basis8(0b101).map(|z| z * e(p[3]) * (t[3].sin() * t[4].cos()))
        + basis8(0b011).map(|z| z * e(p[4]) * t[3].cos());
    let dpsi1_dt1 = basis8(0b001).scale(t[1].cos() * t[2].sin())
        + basis8(0b010).map(|z| z * e(p[1]) * (t[1].cos() * t[2].cos()))
        - basis8(0b100).map(|z| z * e(p[2]) * t[1].sin());
    let dpsi1_dt2 = basis8(0b001).scale(t[1].sin() * t[2].cos())
        - basis8(0b010).map(|z| z * e(p[1]) * (t[1].sin() * t[2].sin()));
    let dpsi2_dt3 = basis8(0b110).scale(t[3].cos() * t[4].sin())
        + basis8(0b101).map(|z| z * e(p[3]) * (t[3].cos() * t[4].cos()))
        - basis8(0b011).map(|z| z * e(p[4]) * t[3].sin());
    let dpsi2_dt4 = basis8(0b110).scale(t[3].sin() * t[4].cos())
        - basis8(0b101).map(|z| z * e(p[3]) * (t[3].sin() * t[4].sin()));
    vec![
        // θ0
        psi1.scale(t[0].cos()) - psi2.map(|z| z * e(p[0]) * t[0].sin()),
        // θ1, θ2
        dpsi1_dt1.scale(t[0].sin()),
        dpsi1_dt2.scale(t[0].sin()),
        // θ3, θ4
        dpsi2_dt3.map(|z| z * e(p[0]) * t[0].cos()),
        dpsi2_dt4.map(|z| z * e(p[0]) * t[0].cos()),
        // φ0
        psi2.map(|z| z * e(p[0]) * i * t[0].cos()),
        // φ1..φ4
        basis8(0b010).map(|z| z * e(p[1]) * i * (t[0].sin() * t[1].sin() * t[2].cos())),
        basis8(0b100).map(|z| z * e(p[2]) * i * (t[0].sin() * t[1].cos())),
        basis8(0b101).map(|z| z * e(p[0]) * e(p[3]) * i * (t[0].cos() * t[3].sin() * t[4].cos())),
        basis8(0b011).map(|z| z * e(p[0]) * e(p[4]) * i * (t[0].cos() * t[3].cos())),
    ]
}

/// Parameter indices of the 5-parameter estimation case
/// `{θ₀, θ₁, θ₂, φ₁, φ₂}` inside the 10-parameter three-qubit family.
pub const THREE_QUBIT_FIVE_PARAMS: [usize; 5] = [0, 1, 2, 6, 7];

/// Registry of built-in families by name.
pub fn family_by_name(name: &str) -> Result<ParamFamily> {
    match name {
        "qubit_bloch" => Ok(qubit_bloch_family()),
        "three_qubit" => Ok(three_qubit_family()),
        "spin1_p" => Ok(spin1_family()),
        other => Err(Error::Invalid(format!(
            "unknown family '{other}' (available: qubit_bloch, three_qubit, spin1_p)"
        ))),
    }
}

pub fn builtin_family_names() -> &'static [&'static str] {
    &["qubit_bloch", "three_qubit", "spin1_p"]
}
