//! JSON schemas: matrices as `{"dim": d, "re": [[…]], "im": [[…]]}` with
//! row-major 17-significant-digit decimal floats, plus the problem and report
//! objects built from them.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg::{cplx, CMat, CVec, HermitianMatrix};
use crate::quantum::{ApproxMeasurement, ObservableSet, Povm, State, ValueAssignment};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_cmat(m: &CMat) -> Self {
        let d = m.nrows();
        Self {
            dim: d,
            re: (0..d).map(|r| (0..d).map(|c| m[(r, c)].re).collect()).collect(),
            im: (0..d).map(|r| (0..d).map(|c| m[(r, c)].im).collect()).collect(),
        }
    }

    pub fn to_cmat(&self) -> Result<CMat> {
        let d = self.dim;
        if self.re.len() != d || self.im.len() != d {
            return Err(Error::Invalid("matrix row count differs from dim".into()));
        }
        for row in self.re.iter().chain(self.im.iter()) {
            if row.len() != d {
                return Err(Error::Invalid("matrix column count differs from dim".into()));
            }
        }
        Ok(CMat::from_fn(d, d, |r, c| cplx(self.re[r][c], self.im[r][c])))
    }

    /// Serializes with every float printed at 17 significant digits, which
    /// round-trips `f64` exactly.
    pub fn to_json_string(&self) -> String {
        let rows = |mat: &Vec<Vec<f64>>| {
            mat.iter()
                .map(|row| {
                    let cells: Vec<String> = row.iter().map(|v| format_f64(*v)).collect();
                    format!("[{}]", cells.join(","))
                })
                .collect::<Vec<_>>()
                .join(",")
        };
        format!(
            "{{\"dim\":{},\"re\":[{}],\"im\":[{}]}}",
            self.dim,
            rows(&self.re),
            rows(&self.im)
        )
    }
}

pub fn format_f64(v: f64) -> String {
    if v == 0.0 {
        return "0.0".into();
    }
    format!("{v:.16e}")
}

/// A state, observable set, optional weights and optional POVM, all as
/// embedded matrix objects; alternatively a named built-in family with
/// parameters.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct ProblemSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub observables: Option<Vec<MatrixJson>>,
    /// Named built-in observable set, e.g. "spin1" or "pauli_half".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub builtin_observables: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub povm: Option<Vec<MatrixJson>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySpec {
    pub name: String,
    pub params: Vec<f64>,
    /// Restrict to a parameter subset (indices into the family's parameters).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restrict: Option<Vec<usize>>,
    /// Collective copies of the base state (default 1).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub copies: Option<usize>,
}

impl ProblemSpec {
    pub fn resolve_state(&self) -> Result<State> {
        if let Some(m) = &self.state {
            return State::from_matrix(m.to_cmat()?);
        }
        if let Some(f) = &self.family {
            let (family, params) = f.resolve()?;
            return family.state(&params);
        }
        Err(Error::Invalid("problem file has neither state nor family".into()))
    }

    pub fn resolve_observables(&self) -> Result<ObservableSet> {
        if let Some(obs) = &self.observables {
            let mats: Result<Vec<CMat>> = obs.iter().map(|m| m.to_cmat()).collect();
            return ObservableSet::from_matrices(mats?);
        }
        if let Some(name) = &self.builtin_observables {
            return match name.as_str() {
                "spin1" => Ok(crate::metrology::spin1_observables()),
                "pauli_half" => Ok(crate::metrology::pauli_half_observables()),
                other => Err(Error::Invalid(format!(
                    "unknown builtin observable set '{other}' (available: spin1, pauli_half)"
                ))),
            };
        }
        Err(Error::Invalid("problem file names no observables".into()))
    }

    pub fn resolve_weights(&self, n: usize) -> Result<Vec<f64>> {
        match &self.weights {
            Some(w) if w.len() == n => Ok(w.clone()),
            Some(w) => Err(Error::DimMismatch {
                expected: n,
                got: w.len(),
            }),
            None => Ok(vec![1.0; n]),
        }
    }

    pub fn resolve_povm(&self) -> Result<Option<Povm>> {
        match &self.povm {
            Some(mats) => {
                let m: Result<Vec<CMat>> = mats.iter().map(|x| x.to_cmat()).collect();
                Ok(Some(Povm::from_matrices(m?)?))
            }
            None => Ok(None),
        }
    }
}

impl FamilySpec {
    pub fn resolve(&self) -> Result<(crate::metrology::ParamFamily, Vec<f64>)> {
        let mut family = crate::metrology::family_by_name(&self.name)?;
        let mut params = self.params.clone();
        if let Some(indices) = &self.restrict {
            if params.len() != family.n_params {
                return Err(Error::DimMismatch {
                    expected: family.n_params,
                    got: params.len(),
                });
            }
            family = family.restrict(indices, params.clone())?;
            params = indices.iter().map(|&i| self.params[i]).collect();
        }
        if let Some(copies) = self.copies {
            family = crate::metrology::collectivize(&family, copies)?;
        }
        Ok((family, params))
    }
}

/// POVM plus value assignment as one JSON object.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementJson {
    pub outcomes: Vec<MatrixJson>,
    pub labels: Vec<String>,
    /// values[j][m] = f_j(m)
    pub values: Vec<Vec<f64>>,
}

impl MeasurementJson {
    pub fn from_measurement(am: &ApproxMeasurement) -> Self {
        Self {
            outcomes: am
                .povm
                .outcomes()
                .iter()
                .map(|h| MatrixJson::from_cmat(h.matrix()))
                .collect(),
            labels: am.povm.labels().to_vec(),
            values: (0..am.assignment.n_observables())
                .map(|j| {
                    (0..am.assignment.n_outcomes())
                        .map(|m| am.assignment.get(j, m))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn to_measurement(&self) -> Result<ApproxMeasurement> {
        let mats: Result<Vec<CMat>> = self.outcomes.iter().map(|m| m.to_cmat()).collect();
        let hs: Result<Vec<HermitianMatrix>> =
            mats?.into_iter().map(HermitianMatrix::new).collect();
        let povm = Povm::new(hs?, Some(self.labels.clone()))?;
        let n = self.values.len();
        let k = povm.len();
        let mut values = DMatrix::zeros(n, k);
        for (j, row) in self.values.iter().enumerate() {
            if row.len() != k {
                return Err(Error::AssignmentShape {
                    expected: k,
                    got: row.len(),
                });
            }
            for (m, v) in row.iter().enumerate() {
                values[(j, m)] = *v;
            }
        }
        ApproxMeasurement::new(povm, ValueAssignment::new(values)?)
    }
}

/// `E_0` witness serialized with embedded matrices.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct E0WitnessJson {
    pub value: f64,
    pub r_ops: Vec<MatrixJson>,
    pub s_blocks: Vec<MatrixJson>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
}

impl E0WitnessJson {
    pub fn from_witness(w: &crate::e0::E0Witness) -> Self {
        Self {
            value: w.value,
            r_ops: w
                .r_ops
                .iter()
                .map(|h| MatrixJson::from_cmat(h.matrix()))
                .collect(),
            s_blocks: w
                .s_blocks
                .iter()
                .map(|h| MatrixJson::from_cmat(h.matrix()))
                .collect(),
            primal_residual: w.residuals.primal,
            dual_residual: w.residuals.dual,
            gap: w.residuals.gap,
        }
    }
}

pub fn state_to_json(state: &State) -> MatrixJson {
    MatrixJson::from_cmat(state.rho())
}

pub fn pure_state_json(psi: &CVec) -> MatrixJson {
    let d = psi.len();
    let rho = CMat::from_fn(d, d, |r, c| psi[r] * psi[c].conj());
    MatrixJson::from_cmat(&rho)
}
