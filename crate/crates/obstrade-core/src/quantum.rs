//! The quantum data model: states, observables, POVMs, outcome value maps,
//! and direct evaluation of approximation errors.
//!
//! All types validate their invariants at construction and are immutable
//! afterwards; every operation here is a pure function.

use nalgebra::DMatrix;

use crate::linalg::{
    self, anticommutator, commutator, cplx, eig_hermitian, psd_sqrt, trace, CMat, CVec,
    HermitianMatrix, PSD_TOL,
};
use crate::{Error, Result};

/// Entrywise tolerance for a POVM resolving the identity.
pub const POVM_SUM_TOL: f64 = 1e-9;
/// Tolerance for a basis choice resolving the identity.
pub const BASIS_SUM_TOL: f64 = 1e-9;
/// Outcome probabilities below this are treated as zero.
pub const ZERO_PROB: f64 = 1e-14;
/// Relative singular-value threshold for the observable independence check.
pub const LINDEP_REL_TOL: f64 = 1e-8;
/// A state is treated as pure when its second-largest eigenvalue is below this.
pub const PURE_TOL: f64 = 1e-10;

/// A density matrix: unit trace, PSD within tolerance.
#[derive(Debug, Clone)]
pub struct State {
    rho: HermitianMatrix,
}

impl State {
    pub fn new(rho: HermitianMatrix) -> Result<Self> {
        let t = trace(rho.matrix());
        if (t.re - 1.0).abs() > 1e-10 || t.im.abs() > 1e-10 {
            return Err(Error::BadTrace(t.re));
        }
        let min = rho.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { rho })
    }

    pub fn from_matrix(m: CMat) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?)
    }

    /// Pure state |ψ⟩⟨ψ| from a (not necessarily normalized) vector.
    pub fn pure(psi: &CVec) -> Result<Self> {
        let n = psi.norm();
        if n < 1e-12 {
            return Err(Error::Invalid("zero state vector".into()));
        }
        let v = psi.scale(1.0 / n);
        let rho = CMat::from_fn(v.len(), v.len(), |r, c| v[r] * v[c].conj());
        Self::from_matrix(rho)
    }

    pub fn dim(&self) -> usize {
        self.rho.dim()
    }

    pub fn rho(&self) -> &CMat {
        self.rho.matrix()
    }

    pub fn hermitian(&self) -> &HermitianMatrix {
        &self.rho
    }

    pub fn sqrt(&self) -> CMat {
        psd_sqrt(&self.rho).into_matrix()
    }

    /// Returns the state vector if the state is pure within [`PURE_TOL`].
    pub fn pure_vector(&self) -> Result<CVec> {
        let (vals, vecs) = eig_hermitian(&self.rho);
        let d = self.dim();
        let second = if d >= 2 { vals[d - 2] } else { 0.0 };
        if second.abs() > PURE_TOL {
            return Err(Error::NotPure(second));
        }
        Ok(vecs.column(d - 1).into_owned())
    }

    pub fn is_pure(&self) -> bool {
        self.pure_vector().is_ok()
    }

    pub fn expectation(&self, x: &CMat) -> f64 {
        trace(&(self.rho() * x)).re
    }

    pub fn variance(&self, x: &CMat) -> f64 {
        let mean = self.expectation(x);
        self.expectation(&(x * x)) - mean * mean
    }
}

/// An ordered set of n linearly independent Hermitian observables on a
/// common d-dimensional space.
#[derive(Debug, Clone)]
pub struct ObservableSet {
    obs: Vec<HermitianMatrix>,
}

impl ObservableSet {
    pub fn new(obs: Vec<HermitianMatrix>) -> Result<Self> {
        if obs.is_empty() {
            return Err(Error::Invalid("empty observable set".into()));
        }
        let dim = obs[0].dim();
        for o in &obs {
            if o.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    got: o.dim(),
                });
            }
        }
        // independence as vectors in the d²-dimensional real space of
        // Hermitian matrices: check via the Gram matrix of Tr(X_j X_k)
        let n = obs.len();
        let gram = DMatrix::from_fn(n, n, |j, k| {
            trace(&(obs[j].matrix() * obs[k].matrix())).re
        });
        let gram_h = HermitianMatrix::new(linalg::real_matrix_to_complex(&gram))?;
        let (vals, vecs) = eig_hermitian(&gram_h);
        let top = vals[n - 1].max(0.0);
        if n > dim * dim || vals[0] <= LINDEP_REL_TOL * LINDEP_REL_TOL * top {
            let null = vecs.column(0);
            let mut idx: Vec<usize> =
                (0..n).filter(|&j| null[j].norm() > 0.3 / (n as f64).sqrt()).collect();
            if idx.is_empty() {
                idx = (0..n).collect();
            }
            return Err(Error::DependentObservables(idx));
        }
        Ok(Self { obs })
    }

    pub fn from_matrices(mats: Vec<CMat>) -> Result<Self> {
        Self::new(
            mats.into_iter()
                .map(HermitianMatrix::new)
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn len(&self) -> usize {
        self.obs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.obs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.obs[0].dim()
    }

    pub fn get(&self, j: usize) -> &CMat {
        self.obs[j].matrix()
    }

    pub fn iter(&self) -> impl Iterator<Item = &CMat> {
        self.obs.iter().map(|h| h.matrix())
    }

    pub fn hermitians(&self) -> &[HermitianMatrix] {
        &self.obs
    }
}

/// A positive operator-valued measure: PSD outcomes that sum to identity.
#[derive(Debug, Clone)]
pub struct Povm {
    outcomes: Vec<HermitianMatrix>,
    labels: Vec<String>,
}

impl Povm {
    pub fn new(outcomes: Vec<HermitianMatrix>, labels: Option<Vec<String>>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::Invalid("empty POVM".into()));
        }
        let dim = outcomes[0].dim();
        let mut sum = CMat::zeros(dim, dim);
        for m in &outcomes {
            if m.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    got: m.dim(),
                });
            }
            let min = m.min_eigenvalue();
            if min < -PSD_TOL {
                return Err(Error::NotPsd(min));
            }
            sum += m.matrix();
        }
        let defect = (&sum - linalg::identity(dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max);
        if defect > POVM_SUM_TOL {
            return Err(Error::PovmIncomplete(defect));
        }
        let labels = labels.unwrap_or_else(|| (0..outcomes.len()).map(|m| m.to_string()).collect());
        if labels.len() != outcomes.len() {
            return Err(Error::Invalid("label count differs from outcome count".into()));
        }
        Ok(Self { outcomes, labels })
    }

    pub fn from_matrices(mats: Vec<CMat>) -> Result<Self> {
        Self::new(
            mats.into_iter()
                .map(HermitianMatrix::new)
                .collect::<Result<Vec<_>>>()?,
            None,
        )
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.outcomes[0].dim()
    }

    pub fn outcome(&self, m: usize) -> &CMat {
        self.outcomes[m].matrix()
    }

    pub fn outcomes(&self) -> &[HermitianMatrix] {
        &self.outcomes
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Outcome probabilities on a state.
    pub fn probabilities(&self, rho: &State) -> Vec<f64> {
        self.outcomes
            .iter()
            .map(|m| trace(&(rho.rho() * m.matrix())).re.max(0.0))
            .collect()
    }
}

/// The per-observable outcome value maps f_j(m), one row per observable.
#[derive(Debug, Clone)]
pub struct ValueAssignment {
    values: DMatrix<f64>,
}

impl ValueAssignment {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("non-finite value assignment entry".into()));
        }
        Ok(Self { values })
    }

    pub fn n_observables(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_outcomes(&self) -> usize {
        self.values.ncols()
    }

    pub fn get(&self, j: usize, m: usize) -> f64 {
        self.values[(j, m)]
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }
}

/// A POVM together with a value map: the computational stand-in for a family
/// of commuting approximators.
#[derive(Debug, Clone)]
pub struct ApproxMeasurement {
    pub povm: Povm,
    pub assignment: ValueAssignment,
}

impl ApproxMeasurement {
    pub fn new(povm: Povm, assignment: ValueAssignment) -> Result<Self> {
        if assignment.n_outcomes() != povm.len() {
            return Err(Error::AssignmentShape {
                expected: povm.len(),
                got: assignment.n_outcomes(),
            });
        }
        Ok(Self { povm, assignment })
    }

    /// R_j = Σ_m f_j(m) M_m.
    pub fn r_op(&self, j: usize) -> CMat {
        let d = self.povm.dim();
        let mut r = CMat::zeros(d, d);
        for m in 0..self.povm.len() {
            r += self.povm.outcome(m).scale(self.assignment.get(j, m));
        }
        r
    }

    /// Σ_m f_j(m) f_k(m) M_m.
    pub fn s_op(&self, j: usize, k: usize) -> CMat {
        let d = self.povm.dim();
        let mut s = CMat::zeros(d, d);
        for m in 0..self.povm.len() {
            s += self
                .povm
                .outcome(m)
                .scale(self.assignment.get(j, m) * self.assignment.get(k, m));
        }
        s
    }
}

/// Real symmetric PSD weight matrix for the weighted error.
#[derive(Debug, Clone)]
pub struct WeightMatrix {
    w: DMatrix<f64>,
}

impl WeightMatrix {
    pub fn new(w: DMatrix<f64>) -> Result<Self> {
        let n = w.nrows();
        if w.ncols() != n {
            return Err(Error::DimMismatch {
                expected: n,
                got: w.ncols(),
            });
        }
        let mut scale = 0.0_f64;
        let mut defect = 0.0_f64;
        for j in 0..n {
            for k in 0..n {
                scale = scale.max(w[(j, k)].abs());
                defect = defect.max((w[(j, k)] - w[(k, j)]).abs());
            }
        }
        if scale > 0.0 && defect / scale > 1e-12 {
            return Err(Error::NotHermitian(defect / scale));
        }
        let h = HermitianMatrix::new(linalg::real_matrix_to_complex(&w))?;
        let min = h.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { w })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            w: DMatrix::identity(n, n),
        }
    }

    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        Self::new(DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(
            weights,
        )))
    }

    pub fn n(&self) -> usize {
        self.w.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.w
    }
}

/// A resolution of the identity by vectors |u_q⟩ plus per-q transpose flags.
#[derive(Debug, Clone)]
pub struct BasisChoice {
    vectors: Vec<CVec>,
    transpose_flags: Vec<bool>,
}

impl BasisChoice {
    pub fn new(vectors: Vec<CVec>, transpose_flags: Vec<bool>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Invalid("empty basis".into()));
        }
        let dim = vectors[0].len();
        let mut sum = CMat::zeros(dim, dim);
        for v in &vectors {
            if v.len() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            sum += CMat::from_fn(dim, dim, |r, c| v[r] * v[c].conj());
        }
        let defect = (&sum - linalg::identity(dim))
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max);
        if defect > BASIS_SUM_TOL {
            return Err(Error::BasisIncomplete(defect));
        }
        if transpose_flags.len() != vectors.len() {
            return Err(Error::Invalid("flag count differs from vector count".into()));
        }
        Ok(Self {
            vectors,
            transpose_flags,
        })
    }

    pub fn computational(dim: usize) -> Self {
        let vectors = (0..dim)
            .map(|q| CVec::from_fn(dim, |r, _| if r == q { cplx(1.0, 0.0) } else { cplx(0.0, 0.0) }))
            .collect();
        Self {
            vectors,
            transpose_flags: vec![false; dim],
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn vector(&self, q: usize) -> &CVec {
        &self.vectors[q]
    }

    pub fn vectors(&self) -> &[CVec] {
        &self.vectors
    }

    pub fn flags(&self) -> &[bool] {
        &self.transpose_flags
    }

    pub fn with_flags(&self, flags: Vec<bool>) -> Result<Self> {
        Self::new(self.vectors.clone(), flags)
    }
}

/// Second moments of an observable set on a state for a chosen basis:
/// the symmetric part S_Re, the flag-dependent antisymmetric part S̃_Im, and
/// the decomposition weights λ_q with normalized vectors |φ_q⟩ = √ρ|u_q⟩/√λ_q.
#[derive(Debug, Clone)]
pub struct MomentData {
    pub s_re: DMatrix<f64>,
    pub s_im_tilde: DMatrix<f64>,
    pub lambdas: Vec<f64>,
    /// `None` where λ_q is below [`ZERO_PROB`].
    pub phis: Vec<Option<CVec>>,
}

/// Anticommutator and commutator second moments:
/// `anticomm[(j,k)] = Tr(ρ{X_j,X_k})/2` and `comm[(j,k)] = Tr(ρ[X_j,X_k])/(2i)`.
pub struct CommutatorMoments {
    pub anticomm: DMatrix<f64>,
    pub comm: DMatrix<f64>,
}

pub fn commutator_moments(rho: &State, x: &ObservableSet) -> Result<CommutatorMoments> {
    if rho.dim() != x.dim() {
        return Err(Error::DimMismatch {
            expected: rho.dim(),
            got: x.dim(),
        });
    }
    let n = x.len();
    let mut anticomm = DMatrix::zeros(n, n);
    let mut comm = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let ac = trace(&(rho.rho() * anticommutator(x.get(j), x.get(k))));
            let c = trace(&(rho.rho() * commutator(x.get(j), x.get(k))));
            anticomm[(j, k)] = 0.5 * ac.re;
            comm[(j, k)] = 0.5 * c.im; // Tr(ρ[X,Y]) is purely imaginary
        }
    }
    Ok(CommutatorMoments { anticomm, comm })
}

/// The full complex error matrix Q with
/// `Q_jk = Tr(ρ Σ_m f_j f_k M_m) − Tr(ρ R_j X_k) − Tr(ρ X_j R_k) + Tr(ρ X_j X_k)`.
pub fn approx_error_matrix(rho: &State, x: &ObservableSet, am: &ApproxMeasurement) -> Result<CMat> {
    if rho.dim() != x.dim() || rho.dim() != am.povm.dim() {
        return Err(Error::DimMismatch {
            expected: rho.dim(),
            got: am.povm.dim(),
        });
    }
    if am.assignment.n_observables() != x.len() {
        return Err(Error::AssignmentShape {
            expected: x.len(),
            got: am.assignment.n_observables(),
        });
    }
    let n = x.len();
    let r_ops: Vec<CMat> = (0..n).map(|j| am.r_op(j)).collect();
    let mut q = CMat::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let s = trace(&(rho.rho() * am.s_op(j, k)));
            let rx = trace(&(rho.rho() * &r_ops[j] * x.get(k)));
            let xr = trace(&(rho.rho() * x.get(j) * &r_ops[k]));
            let xx = trace(&(rho.rho() * x.get(j) * x.get(k)));
            q[(j, k)] = s - rx - xr + xx;
        }
    }
    Ok(q)
}

/// Real part of a complex matrix.
pub fn q_re(q: &CMat) -> DMatrix<f64> {
    DMatrix::from_fn(q.nrows(), q.ncols(), |r, c| {
        0.5 * (q[(r, c)].re + q[(c, r)].re)
    })
}

/// ℰ = Tr(W Q_Re); the antisymmetric imaginary part of Q never contributes.
pub fn weighted_error(q: &CMat, w: &WeightMatrix) -> f64 {
    let qr = q_re(q);
    let mut e = 0.0;
    for j in 0..qr.nrows() {
        for k in 0..qr.ncols() {
            e += w.matrix()[(j, k)] * qr[(k, j)];
        }
    }
    e
}

/// The error-minimizing value map for a fixed POVM:
/// `f_j(m) = Re Tr(ρ M_m X_j) / Tr(ρ M_m)`, zero on zero-probability outcomes.
pub fn optimal_values_for_povm(rho: &State, x: &ObservableSet, povm: &Povm) -> Result<ValueAssignment> {
    if rho.dim() != x.dim() || rho.dim() != povm.dim() {
        return Err(Error::DimMismatch {
            expected: rho.dim(),
            got: povm.dim(),
        });
    }
    let n = x.len();
    let nm = povm.len();
    let mut values = DMatrix::zeros(n, nm);
    for m in 0..nm {
        let p = trace(&(rho.rho() * povm.outcome(m))).re;
        if p < ZERO_PROB {
            continue;
        }
        for j in 0..n {
            let num = trace(&(rho.rho() * povm.outcome(m) * x.get(j))).re;
            values[(j, m)] = num / p;
        }
    }
    ValueAssignment::new(values)
}

/// Moment blocks (Q_u, R_u, S_u) for one vector |u⟩, reduced to the system
/// level: each n×n entry is `⟨u|√ρ A_j B_k √ρ|u⟩` for the corresponding
/// operator pair, with products of the commuting approximators collapsing to
/// `Σ_m f_j f_k M_m`.
pub fn joint_moment_blocks(
    rho: &State,
    x: &ObservableSet,
    am: &ApproxMeasurement,
    u: &CVec,
) -> Result<(CMat, CMat, CMat)> {
    let n = x.len();
    let sq = rho.sqrt();
    let su = &sq * u;
    let r_ops: Vec<CMat> = (0..n).map(|j| am.r_op(j)).collect();
    let xu: Vec<CVec> = (0..n).map(|j| x.get(j) * &su).collect();
    let ru: Vec<CVec> = (0..n).map(|j| &r_ops[j] * &su).collect();
    // E_j E_k sandwich: ⟨u|√ρ (Σ f_j f_k M_m − R_j X_k − X_j R_k + X_j X_k) √ρ|u⟩
    let mut q_u = CMat::zeros(n, n);
    let mut r_u = CMat::zeros(n, n);
    let mut s_u = CMat::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            let sjk = (su.adjoint() * am.s_op(j, k) * &su)[(0, 0)];
            let rjxk = (ru[j].adjoint() * &xu[k])[(0, 0)];
            let xjrk = (xu[j].adjoint() * &ru[k])[(0, 0)];
            let xjxk = (xu[j].adjoint() * &xu[k])[(0, 0)];
            q_u[(j, k)] = sjk - rjxk - xjrk + xjxk;
            // R_u entry: ⟨u|√ρ E_j (X_k ⊗ I) √ρ|u⟩ = ⟨u|√ρ (R_j − X_j) X_k √ρ|u⟩
            r_u[(j, k)] = rjxk - xjxk;
            s_u[(j, k)] = xjxk;
        }
    }
    Ok((q_u, r_u, s_u))
}

/// Moments of the observable set on the state for a basis choice. `s_re` is
/// flag-independent; `s_im_tilde` flips the sign of the q-th contribution
/// where the transpose flag is set.
pub fn moment_data(rho: &State, x: &ObservableSet, basis: &BasisChoice) -> Result<MomentData> {
    if rho.dim() != x.dim() || rho.dim() != basis.dim() {
        return Err(Error::DimMismatch {
            expected: rho.dim(),
            got: basis.dim(),
        });
    }
    let n = x.len();
    let sq = rho.sqrt();
    let cm = commutator_moments(rho, x)?;
    let mut s_im = DMatrix::zeros(n, n);
    let mut lambdas = Vec::with_capacity(basis.len());
    let mut phis = Vec::with_capacity(basis.len());
    for q in 0..basis.len() {
        let su = &sq * basis.vector(q);
        let lam = su.norm_squared();
        lambdas.push(lam);
        if lam < ZERO_PROB {
            phis.push(None);
            continue;
        }
        let phi = su.scale(1.0 / lam.sqrt());
        let sign = if basis.flags()[q] { -1.0 } else { 1.0 };
        let xphi: Vec<CVec> = (0..n).map(|j| x.get(j) * &phi).collect();
        for j in 0..n {
            for k in 0..n {
                let v = (xphi[j].adjoint() * &xphi[k])[(0, 0)];
                s_im[(j, k)] += sign * lam * v.im;
            }
        }
        phis.push(Some(phi));
    }
    Ok(MomentData {
        s_re: cm.anticomm,
        s_im_tilde: s_im,
        lambdas,
        phis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;
    use approx::assert_relative_eq;

    pub fn paulis() -> [CMat; 3] {
        let x = CMat::from_row_slice(2, 2, &[cplx(0., 0.), cplx(1., 0.), cplx(1., 0.), cplx(0., 0.)]);
        let y = CMat::from_row_slice(2, 2, &[cplx(0., 0.), cplx(0., -1.), cplx(0., 1.), cplx(0., 0.)]);
        let z = CMat::from_row_slice(2, 2, &[cplx(1., 0.), cplx(0., 0.), cplx(0., 0.), cplx(-1., 0.)]);
        [x, y, z]
    }

    fn ket(dim: usize, i: usize) -> CVec {
        CVec::from_fn(dim, |r, _| if r == i { cplx(1., 0.) } else { cplx(0., 0.) })
    }

    #[test]
    fn state_invariants() {
        assert!(State::from_matrix(identity(2)).is_err()); // trace 2
        let m = CMat::from_row_slice(
            2,
            2,
            &[cplx(1.5, 0.), cplx(0., 0.), cplx(0., 0.), cplx(-0.5, 0.)],
        );
        assert!(matches!(State::from_matrix(m), Err(Error::NotPsd(_))));
        assert!(State::from_matrix(identity(2).scale(0.5)).is_ok());
    }

    #[test]
    fn dependent_observables_rejected() {
        let [x, _, _] = paulis();
        let double = x.scale(2.0);
        assert!(matches!(
            ObservableSet::from_matrices(vec![x, double]),
            Err(Error::DependentObservables(_))
        ));
    }

    #[test]
    fn commutator_moments_cases() {
        // commuting diagonal observables: zero commutator part
        let d1 = CMat::from_diagonal(&CVec::from_vec(vec![cplx(1., 0.), cplx(2., 0.)]));
        let d2 = CMat::from_diagonal(&CVec::from_vec(vec![cplx(3., 0.), cplx(-1., 0.)]));
        let rho = State::from_matrix(identity(2).scale(0.5)).unwrap();
        let x = ObservableSet::from_matrices(vec![d1, d2]).unwrap();
        let cm = commutator_moments(&rho, &x).unwrap();
        assert!(cm.comm.iter().all(|v| v.abs() < 1e-14));

        // |0⟩ with (σx/2, σy/2): commutator entry 1/4
        let [sx, sy, _] = paulis();
        let rho0 = State::pure(&ket(2, 0)).unwrap();
        let x2 = ObservableSet::from_matrices(vec![sx.scale(0.5), sy.scale(0.5)]).unwrap();
        let cm2 = commutator_moments(&rho0, &x2).unwrap();
        assert_relative_eq!(cm2.comm[(0, 1)], 0.25, epsilon = 1e-14);
        assert_relative_eq!(cm2.comm[(1, 0)], -0.25, epsilon = 1e-14);
    }

    #[test]
    fn exact_joint_measurement_zero_error() {
        // commuting diagonal observables measured in the shared eigenbasis
        let d1 = CMat::from_diagonal(&CVec::from_vec(vec![cplx(1., 0.), cplx(2., 0.), cplx(0., 0.)]));
        let d2 = CMat::from_diagonal(&CVec::from_vec(vec![cplx(3., 0.), cplx(-1., 0.), cplx(1., 0.)]));
        let rho = State::from_matrix(identity(3).scale(1.0 / 3.0)).unwrap();
        let x = ObservableSet::from_matrices(vec![d1.clone(), d2.clone()]).unwrap();
        let povm = Povm::from_matrices(
            (0..3)
                .map(|i| {
                    CMat::from_fn(3, 3, |r, c| {
                        if r == i && c == i {
                            cplx(1., 0.)
                        } else {
                            cplx(0., 0.)
                        }
                    })
                })
                .collect(),
        )
        .unwrap();
        let values = DMatrix::from_row_slice(2, 3, &[1., 2., 0., 3., -1., 1.]);
        let am = ApproxMeasurement::new(povm, ValueAssignment::new(values).unwrap()).unwrap();
        let q = approx_error_matrix(&rho, &x, &am).unwrap();
        assert!(q.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn trivial_estimator_error_is_second_moment() {
        let [sx, _, _] = paulis();
        let rho = State::pure(&ket(2, 0)).unwrap();
        let x = ObservableSet::from_matrices(vec![sx.clone()]).unwrap();
        let povm = Povm::from_matrices(vec![identity(2)]).unwrap();
        let values = DMatrix::zeros(1, 1);
        let am = ApproxMeasurement::new(povm, ValueAssignment::new(values).unwrap()).unwrap();
        let q = approx_error_matrix(&rho, &x, &am).unwrap();
        let expect = rho.expectation(&(&sx * &sx));
        assert_relative_eq!(q[(0, 0)].re, expect, epsilon = 1e-13);
    }

    #[test]
    fn weighted_error_basics() {
        let w = WeightMatrix::identity(2);
        let q = CMat::from_diagonal(&CVec::from_vec(vec![cplx(0.3, 0.), cplx(0.4, 0.)]));
        assert_relative_eq!(weighted_error(&q, &w), 0.7, epsilon = 1e-14);
        assert_relative_eq!(weighted_error(&CMat::zeros(2, 2), &w), 0.0);
    }

    #[test]
    fn optimal_values_single_outcome_gives_mean() {
        let [sx, _, _] = paulis();
        let rho = State::from_matrix((identity(2) + sx.scale(0.4)).scale(0.5)).unwrap();
        let x = ObservableSet::from_matrices(vec![sx.clone()]).unwrap();
        let povm = Povm::from_matrices(vec![identity(2)]).unwrap();
        let f = optimal_values_for_povm(&rho, &x, &povm).unwrap();
        assert_relative_eq!(f.get(0, 0), rho.expectation(&sx), epsilon = 1e-13);
        // the resulting squared error is the variance
        let am = ApproxMeasurement::new(povm, f).unwrap();
        let q = approx_error_matrix(&rho, &x, &am).unwrap();
        assert_relative_eq!(q[(0, 0)].re, rho.variance(&sx), epsilon = 1e-13);
    }

    #[test]
    fn optimal_values_eigenbasis_exact() {
        let d = CMat::from_diagonal(&CVec::from_vec(vec![cplx(2., 0.), cplx(-1., 0.)]));
        let rho = State::from_matrix(identity(2).scale(0.5)).unwrap();
        let x = ObservableSet::from_matrices(vec![d]).unwrap();
        let povm = Povm::from_matrices(vec![
            CMat::from_row_slice(2, 2, &[cplx(1., 0.), cplx(0., 0.), cplx(0., 0.), cplx(0., 0.)]),
            CMat::from_row_slice(2, 2, &[cplx(0., 0.), cplx(0., 0.), cplx(0., 0.), cplx(1., 0.)]),
        ])
        .unwrap();
        let f = optimal_values_for_povm(&rho, &x, &povm).unwrap();
        assert_relative_eq!(f.get(0, 0), 2.0, epsilon = 1e-13);
        assert_relative_eq!(f.get(0, 1), -1.0, epsilon = 1e-13);
    }

    #[test]
    fn moment_data_telescopes_and_flags() {
        let [sx, sy, sz] = paulis();
        let rho = State::from_matrix(
            (identity(2) + sx.scale(0.2) + sy.scale(0.3) + sz.scale(0.1)).scale(0.5),
        )
        .unwrap();
        let x = ObservableSet::from_matrices(vec![sx.scale(0.5), sy.scale(0.5)]).unwrap();
        let basis = BasisChoice::computational(2);
        let md = moment_data(&rho, &x, &basis).unwrap();
        let cm = commutator_moments(&rho, &x).unwrap();
        // no transposes: the per-q terms telescope to the full trace
        assert!((&md.s_im_tilde - &cm.comm).iter().all(|v| v.abs() < 1e-12));
        assert_relative_eq!(md.lambdas.iter().sum::<f64>(), 1.0, epsilon = 1e-9);

        // flipping every flag negates the antisymmetric part
        let flipped = basis.with_flags(vec![true, true]).unwrap();
        let md2 = moment_data(&rho, &x, &flipped).unwrap();
        assert!((&md2.s_im_tilde + &md.s_im_tilde).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn moment_data_qubit_pauli_quarter_identity() {
        // (S_Re)_{jk} = δ_{jk}/4 for the half-Pauli triple on any qubit state
        let [sx, sy, sz] = paulis();
        let rho = State::from_matrix(
            (identity(2) + sx.scale(0.5) + sy.scale(-0.2) + sz.scale(0.6)).scale(0.5),
        )
        .unwrap();
        let x = ObservableSet::from_matrices(vec![sx.scale(0.5), sy.scale(0.5), sz.scale(0.5)])
            .unwrap();
        let md = moment_data(&rho, &x, &BasisChoice::computational(2)).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                let expect = if j == k { 0.25 } else { 0.0 };
                assert_relative_eq!(md.s_re[(j, k)], expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn error_diag_invariant_under_relabeling() {
        let [sx, sy, _] = paulis();
        let rho = State::from_matrix((identity(2) + sx.scale(0.3)).scale(0.5)).unwrap();
        let x = ObservableSet::from_matrices(vec![sx.scale(0.5), sy.scale(0.5)]).unwrap();
        let plus = CMat::from_row_slice(
            2,
            2,
            &[cplx(0.5, 0.), cplx(0.5, 0.), cplx(0.5, 0.), cplx(0.5, 0.)],
        );
        let minus = identity(2) - &plus;
        let povm = Povm::from_matrices(vec![plus.clone(), minus.clone()]).unwrap();
        let f = optimal_values_for_povm(&rho, &x, &povm).unwrap();
        let am = ApproxMeasurement::new(povm, f).unwrap();
        let q1 = approx_error_matrix(&rho, &x, &am).unwrap();

        let povm_swapped = Povm::from_matrices(vec![minus, plus]).unwrap();
        let f2 = optimal_values_for_povm(&rho, &x, &povm_swapped).unwrap();
        let am2 = ApproxMeasurement::new(povm_swapped, f2).unwrap();
        let q2 = approx_error_matrix(&rho, &x, &am2).unwrap();
        for j in 0..2 {
            assert_relative_eq!(q1[(j, j)].re, q2[(j, j)].re, epsilon = 1e-12);
        }
    }
}
