//! Shot-based measurement sampling and the 3-state method for reconstructing
//! approximation errors from counts.
//!
//! For each observable the protocol measures the POVM on three prepared
//! states — ρ itself, `XρX` normalized, and `(I+X)ρ(I+X)` normalized — whose
//! statistics pin down `Re Tr(ρ M_m X)` and hence the per-observable errors.

use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::{identity, trace, CMat};
use crate::quantum::{ObservableSet, Povm, State};
use crate::sdp::{self, Entry, LinearEquality, LmiBlock, SdpProblem, SdpSettings, SdpStatus};
use crate::{Error, Result};

/// Counts for the full 3-state protocol: `counts[j][l][m]` is the count of
/// outcome `m` when measuring state `l ∈ {0,1,2}` (ρ, ρ₂, ρ₃) prepared for
/// observable `j`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountTable {
    pub counts: Vec<[Vec<u64>; 3]>,
    pub shots: u64,
    pub seed: u64,
}

impl CountTable {
    pub fn validate(&self) -> Result<()> {
        for per_obs in &self.counts {
            for per_state in per_obs {
                let total: u64 = per_state.iter().sum();
                if total != self.shots {
                    return Err(Error::Invalid(format!(
                        "counts sum to {total}, expected {} shots",
                        self.shots
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn frequencies(&self, j: usize, l: usize) -> Vec<f64> {
        self.counts[j][l]
            .iter()
            .map(|&c| c as f64 / self.shots as f64)
            .collect()
    }
}

/// Per-observable error interval `[ε_min, ε_max]`, with a flag when noise
/// forced a negative squared error to zero.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorInterval {
    pub lo: f64,
    pub hi: f64,
    pub clipped: bool,
    /// Magnitude of the least-squares relaxation applied to inconsistent
    /// probability constraints, when any.
    pub relaxation: f64,
}

/// Multinomial sampling of POVM outcomes, reproducible under a fixed seed.
pub fn sample_counts(state: &State, povm: &Povm, shots: u64, seed: u64) -> Vec<u64> {
    let mut probs = povm.probabilities(state);
    let total: f64 = probs.iter().sum();
    for p in probs.iter_mut() {
        *p /= total;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = shots;
    let mut rest: f64 = 1.0;
    for m in 0..probs.len() {
        if remaining == 0 {
            break;
        }
        if m == probs.len() - 1 {
            counts[m] = remaining;
            break;
        }
        let p = (probs[m] / rest).clamp(0.0, 1.0);
        let draw = rand_distr::Binomial::new(remaining, p)
            .map(|b| b.sample(&mut rng))
            .unwrap_or(0);
        counts[m] = draw;
        remaining -= draw;
        rest -= probs[m];
        if rest <= 0.0 {
            counts[m] += remaining;
            break;
        }
    }
    counts
}

/// The three protocol states for one observable:
/// `ρ₁ = ρ`, `ρ₂ = XρX / Tr(XρX)`, `ρ₃ = (I+X)ρ(I+X) / Tr[(I+X)ρ(I+X)]`.
pub fn three_state_states(rho: &State, x: &CMat) -> Result<(State, State, State)> {
    let d = rho.dim();
    if x.nrows() != d {
        return Err(Error::DimMismatch {
            expected: d,
            got: x.nrows(),
        });
    }
    let xrx = x * rho.rho() * x;
    let n2 = trace(&xrx).re;
    let ipx = identity(d) + x;
    let ixr = &ipx * rho.rho() * &ipx;
    let n3 = trace(&ixr).re;
    if n2 <= 1e-12 || n3 <= 1e-12 {
        return Err(Error::Invalid(format!(
            "degenerate 3-state normalization (Tr(XρX) = {n2:.3e}, Tr[(I+X)ρ(I+X)] = {n3:.3e}); \
             shift the observable by a constant"
        )));
    }
    Ok((
        rho.clone(),
        State::from_matrix(xrx.scale(1.0 / n2))?,
        State::from_matrix(ixr.scale(1.0 / n3))?,
    ))
}

/// Runs the full sampled protocol for every observable in the set.
pub fn run_three_state(
    rho: &State,
    x: &ObservableSet,
    povm: &Povm,
    shots: u64,
    seed: u64,
) -> Result<CountTable> {
    let mut counts = Vec::with_capacity(x.len());
    let mut stream = ChaCha8Rng::seed_from_u64(seed);
    for j in 0..x.len() {
        let (r1, r2, r3) = three_state_states(rho, x.get(j))?;
        let c = [
            sample_counts(&r1, povm, shots, stream.random()),
            sample_counts(&r2, povm, shots, stream.random()),
            sample_counts(&r3, povm, shots, stream.random()),
        ];
        counts.push(c);
    }
    Ok(CountTable {
        counts,
        shots,
        seed,
    })
}

/// Interval for one `Re Tr(ρ M_m X_j)` given observed probabilities.
#[derive(Debug, Clone, Copy)]
pub struct AlphaInterval {
    pub lo: f64,
    pub hi: f64,
    pub relaxation: f64,
}

/// Min/max of `Re Tr(ρ M_m X_j)` over every POVM consistent with the
/// observed outcome probabilities of the three protocol states.
///
/// The constraint set `Tr(ρ_l M_m) = p_l(m)` is reduced to an independent
/// subset by rank-revealing elimination; when the observed probabilities are
/// inconsistent with PSD-ness (finite-shot noise), each probability
/// constraint is relaxed to an interval of half-width `t*`, the smallest
/// feasible relaxation found by a preliminary SDP, and `t*` is reported.
pub fn bound_retrace_sdp(
    states: &[State; 3],
    probs: &DMatrix<f64>, // 3 × K observed probabilities
    x_j: &CMat,
    target_outcome: usize,
    settings: &SdpSettings,
) -> Result<AlphaInterval> {
    let d = states[0].dim();
    let k = probs.ncols();
    if target_outcome >= k {
        return Err(Error::Invalid("target outcome out of range".into()));
    }
    // variables: the Hermitian entries of M_0 … M_{K−1}, d² each
    let block = d * d;
    let num_vars = k * block;
    let layout = crate::e0::E0Layout::new(1, d);

    let mut problem = SdpProblem::new(num_vars);
    // PSD blocks: each M_m itself
    for m in 0..k {
        let mut terms = Vec::new();
        layout.for_each_param_pub(m * block, |var, a, b, re, im| {
            terms.push((var, Entry { row: a, col: b, re, im }));
        });
        problem.blocks.push(LmiBlock {
            dim: d,
            complex: true,
            constant: vec![],
            terms,
        });
    }
    // completeness: Σ_m M_m = I, one equality per Hermitian parameter slot
    let mut completeness = Vec::new();
    for slot in 0..block {
        let mut terms = Vec::new();
        for m in 0..k {
            terms.push((m * block + slot, 1.0));
        }
        let rhs = if slot < d { 1.0 } else { 0.0 }; // diagonal slots come first
        completeness.push(LinearEquality { terms, rhs });
    }

    // probability constraints Tr(ρ_l M_m) = p_l(m), reduced to an
    // independent subset by rank-revealing Gram-Schmidt at threshold 1e-10
    let mut prob_rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for l in 0..3 {
        for m in 0..k {
            let mut row = vec![0.0; num_vars];
            layout.for_each_param_pub(m * block, |var, a, b, _re, im| {
                row[var] = if a == b {
                    states[l].rho()[(a, a)].re
                } else if im == 0.0 {
                    2.0 * states[l].rho()[(a, b)].re
                } else {
                    2.0 * states[l].rho()[(a, b)].im
                };
            });
            prob_rows.push((row, probs[(l, m)]));
        }
    }
    let selected = independent_rows(&completeness, &prob_rows, num_vars, 1e-10);

    // objective: Re Tr(ρ M_target X_j) = Tr(M_target · {ρ, X_j}/2)
    let half_anti = (states[0].rho() * x_j + x_j * states[0].rho()).scale(0.5);
    let mut objective = vec![0.0; num_vars];
    layout.for_each_param_pub(target_outcome * block, |var, a, b, _re, im| {
        objective[var] = if a == b {
            half_anti[(a, a)].re
        } else if im == 0.0 {
            2.0 * half_anti[(a, b)].re
        } else {
            2.0 * half_anti[(a, b)].im
        };
    });

    let run = |relax: f64| -> Result<(Option<f64>, Option<f64>)> {
        let mut p = problem.clone();
        p.equalities = completeness.clone();
        if relax == 0.0 {
            for &idx in &selected {
                let (row, rhs) = &prob_rows[idx];
                p.equalities.push(LinearEquality {
                    terms: row
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| **v != 0.0)
                        .map(|(i, v)| (i, *v))
                        .collect(),
                    rhs: *rhs,
                });
            }
        } else {
            // |row·y − rhs| ≤ relax as a pair of 1×1 PSD blocks
            for &idx in &selected {
                let (row, rhs) = &prob_rows[idx];
                for sign in [1.0, -1.0] {
                    let mut terms = Vec::new();
                    for (i, v) in row.iter().enumerate() {
                        if *v != 0.0 {
                            terms.push((i, Entry::real(0, 0, sign * *v)));
                        }
                    }
                    p.blocks.push(LmiBlock {
                        dim: 1,
                        complex: false,
                        constant: vec![Entry::real(0, 0, relax - sign * rhs)],
                        terms,
                    });
                }
            }
        }
        let mut lo = None;
        let mut hi = None;
        for minimize in [true, false] {
            p.objective = if minimize {
                objective.clone()
            } else {
                objective.iter().map(|v| -v).collect()
            };
            let sol = sdp::solve(&p, settings)?;
            if sol.status == SdpStatus::Optimal {
                let v = if minimize {
                    sol.objective_value
                } else {
                    -sol.objective_value
                };
                if minimize {
                    lo = Some(v);
                } else {
                    hi = Some(v);
                }
            }
        }
        Ok((lo, hi))
    };

    if let (Some(lo), Some(hi)) = run(0.0)? {
        return Ok(AlphaInterval {
            lo,
            hi,
            relaxation: 0.0,
        });
    }
    // infeasible with exact equalities: relax with growing half-width
    let mut relax = 1e-6;
    for _ in 0..8 {
        if let (Some(lo), Some(hi)) = run(relax)? {
            return Ok(AlphaInterval {
                lo,
                hi,
                relaxation: relax,
            });
        }
        relax *= 10.0;
    }
    Err(Error::Invalid(
        "probability constraints remained infeasible after relaxation".into(),
    ))
}

/// Maximal independent subset of the probability rows, given that the
/// completeness rows are always kept.
fn independent_rows(
    completeness: &[LinearEquality],
    prob_rows: &[(Vec<f64>, f64)],
    num_vars: usize,
    tol: f64,
) -> Vec<usize> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let push_if_independent = |row: &[f64], basis: &mut Vec<Vec<f64>>| -> bool {
        let mut v = row.to_vec();
        for b in basis.iter() {
            let dot: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= dot * bi;
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
        if norm > tol * scale {
            for vi in v.iter_mut() {
                *vi /= norm;
            }
            basis.push(v);
            true
        } else {
            false
        }
    };
    for eq in completeness {
        let mut row = vec![0.0; num_vars];
        for &(i, v) in &eq.terms {
            row[i] += v;
        }
        push_if_independent(&row, &mut basis);
    }
    let mut selected = Vec::new();
    for (idx, (row, _)) in prob_rows.iter().enumerate() {
        if push_if_independent(row, &mut basis) {
            selected.push(idx);
        }
    }
    selected
}

/// Error intervals for every observable from a count table:
/// `(ε_j^{A/B})² = Tr(ρX_j²) − Σ_m (α_jm^{min/max})² / p₁(m)`.
pub fn estimate_errors(
    counts: &CountTable,
    rho: &State,
    x: &ObservableSet,
    settings: &SdpSettings,
) -> Result<Vec<ErrorInterval>> {
    counts.validate()?;
    if counts.counts.len() != x.len() {
        return Err(Error::DimMismatch {
            expected: x.len(),
            got: counts.counts.len(),
        });
    }
    let mut out = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        let (r1, r2, r3) = three_state_states(rho, x.get(j))?;
        let states = [r1, r2, r3];
        let k = counts.counts[j][0].len();
        let probs = DMatrix::from_fn(3, k, |l, m| {
            counts.counts[j][l][m] as f64 / counts.shots as f64
        });
        let second_moment = rho.expectation(&(x.get(j) * x.get(j)));
        let mut sq_min = second_moment;
        let mut sq_max = second_moment;
        let mut relaxation: f64 = 0.0;
        for m in 0..k {
            let p1 = probs[(0, m)];
            if p1 <= 0.0 {
                continue;
            }
            let interval = bound_retrace_sdp(&states, &probs, x.get(j), m, settings)?;
            relaxation = relaxation.max(interval.relaxation);
            // (ε²)^{A/B} subtract α²/p₁; the interval endpoints give the
            // extremes of the subtracted term
            let a2_min = interval.lo * interval.lo;
            let a2_max = interval.hi * interval.hi;
            let (sub_min, sub_max) = if interval.lo <= 0.0 && interval.hi >= 0.0 {
                (0.0, a2_min.max(a2_max))
            } else {
                (a2_min.min(a2_max), a2_min.max(a2_max))
            };
            sq_min -= sub_max / p1;
            sq_max -= sub_min / p1;
        }
        let clipped = sq_min < 0.0 || sq_max < 0.0;
        out.push(ErrorInterval {
            lo: sq_min.max(0.0).sqrt(),
            hi: sq_max.max(0.0).sqrt(),
            clipped,
            relaxation,
        });
    }
    Ok(out)
}

/// Direct (noise-free) per-observable errors of a measurement, for
/// comparison with the estimated intervals.
pub fn direct_errors(
    rho: &State,
    x: &ObservableSet,
    am: &crate::quantum::ApproxMeasurement,
) -> Result<Vec<f64>> {
    let q = crate::quantum::approx_error_matrix(rho, x, am)?;
    Ok((0..x.len()).map(|j| q[(j, j)].re.max(0.0).sqrt()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cplx;
    use crate::linalg::CVec;
    use approx::assert_relative_eq;

    fn ket(i: usize) -> CVec {
        CVec::from_fn(2, |r, _| if r == i { cplx(1., 0.) } else { cplx(0., 0.) })
    }

    fn pauli_x() -> CMat {
        CMat::from_row_slice(2, 2, &[cplx(0., 0.), cplx(1., 0.), cplx(1., 0.), cplx(0., 0.)])
    }

    #[test]
    fn deterministic_sampling() {
        let rho = State::pure(&ket(0)).unwrap();
        let povm = Povm::from_matrices(vec![identity(2)]).unwrap();
        let counts = sample_counts(&rho, &povm, 1000, 7);
        assert_eq!(counts, vec![1000]);

        let plus = CMat::from_row_slice(
            2,
            2,
            &[cplx(0.5, 0.), cplx(0.5, 0.), cplx(0.5, 0.), cplx(0.5, 0.)],
        );
        let minus = identity(2) - &plus;
        let povm2 = Povm::from_matrices(vec![plus, minus]).unwrap();
        let a = sample_counts(&rho, &povm2, 2000, 3);
        let b = sample_counts(&rho, &povm2, 2000, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn binomial_concentration() {
        let rho = State::pure(&ket(0)).unwrap();
        let plus = CMat::from_row_slice(
            2,
            2,
            &[cplx(0.5, 0.), cplx(0.5, 0.), cplx(0.5, 0.), cplx(0.5, 0.)],
        );
        let minus = identity(2) - &plus;
        let povm = Povm::from_matrices(vec![plus, minus]).unwrap();
        let counts = sample_counts(&rho, &povm, 1_000_000, 11);
        let freq = counts[0] as f64 / 1e6;
        assert!((freq - 0.5).abs() < 3e-3, "freq {freq}");
    }

    #[test]
    fn three_states_identity_and_flip() {
        let rho = State::pure(&ket(0)).unwrap();
        // X = I leaves the state unchanged
        let (r1, r2, r3) = three_state_states(&rho, &identity(2)).unwrap();
        assert!((r1.rho() - r2.rho()).norm() < 1e-12);
        assert!((r1.rho() - r3.rho()).norm() < 1e-12);

        // X = σx maps |0⟩ to |1⟩ and (I+σx)|0⟩ ∝ |+⟩
        let (_, r2, r3) = three_state_states(&rho, &pauli_x()).unwrap();
        let one = State::pure(&ket(1)).unwrap();
        assert!((r2.rho() - one.rho()).norm() < 1e-12);
        let plus = State::pure(&CVec::from_vec(vec![cplx(1., 0.), cplx(1., 0.)])).unwrap();
        assert!((r3.rho() - plus.rho()).norm() < 1e-12);
    }

    #[test]
    fn three_state_degenerate_normalization_rejected() {
        // X|0⟩ = 0 for the lowering-type observable (I−σz)/…: use projector
        let proj1 = CMat::from_row_slice(
            2,
            2,
            &[cplx(0., 0.), cplx(0., 0.), cplx(0., 0.), cplx(1., 0.)],
        );
        let rho = State::pure(&ket(0)).unwrap();
        assert!(three_state_states(&rho, &proj1).is_err());
    }

    #[test]
    fn single_outcome_interval_is_exact_mean() {
        // POVM {I}: Re Tr(ρ M X) = Tr(ρX) exactly
        let rho = State::pure(&ket(0)).unwrap();
        let x = pauli_x() + identity(2).scale(2.0); // keep normalizations nonzero
        let (r1, r2, r3) = three_state_states(&rho, &x).unwrap();
        let probs = DMatrix::from_element(3, 1, 1.0);
        let interval = bound_retrace_sdp(
            &[r1, r2, r3],
            &probs,
            &x,
            0,
            &SdpSettings::default(),
        )
        .unwrap();
        let expect = rho.expectation(&x);
        assert_relative_eq!(interval.lo, expect, epsilon = 1e-6);
        assert_relative_eq!(interval.hi, expect, epsilon = 1e-6);
    }

    #[test]
    fn exact_probabilities_recover_direct_errors() {
        // informationally complete qubit measurement with exact probabilities
        use crate::e0::optimal_povm_pure_two;
        let [sx, sy] = [pauli_x(), CMat::from_row_slice(
            2,
            2,
            &[cplx(0., 0.), cplx(0., -1.), cplx(0., 1.), cplx(0., 0.)],
        )];
        let psi = CVec::from_vec(vec![cplx(0.8, 0.0), cplx(0.36, 0.48)]);
        let rho = State::pure(&psi).unwrap();
        let x1 = sx.scale(0.5);
        let x2 = sy.scale(0.5);
        let am = optimal_povm_pure_two(&rho, &x1, &x2, 1.0, 1.0).unwrap();
        let x = ObservableSet::from_matrices(vec![x1, x2]).unwrap();

        // exact count table: probabilities × shots with a huge shot count
        let shots = 1u64 << 40;
        let mut counts = Vec::new();
        for j in 0..2 {
            let (r1, r2, r3) = three_state_states(&rho, x.get(j)).unwrap();
            let per = [&r1, &r2, &r3].map(|s| {
                let p = am.povm.probabilities(s);
                let mut c: Vec<u64> = p.iter().map(|&v| (v * shots as f64).round() as u64).collect();
                let total: u64 = c.iter().sum();
                let last = c.len() - 1;
                c[last] = c[last] + shots - total;
                c
            });
            counts.push(per);
        }
        let table = CountTable {
            counts,
            shots,
            seed: 0,
        };
        let intervals = estimate_errors(&table, &rho, &x, &SdpSettings::default()).unwrap();
        let direct = direct_errors(&rho, &x, &am).unwrap();
        for (iv, d) in intervals.iter().zip(&direct) {
            let mid = 0.5 * (iv.lo + iv.hi);
            assert_relative_eq!(mid, *d, epsilon = 1e-5);
            assert!(iv.hi - iv.lo < 1e-5, "interval width {}", iv.hi - iv.lo);
        }
    }

    #[test]
    fn estimate_invariant_under_outcome_relabeling() {
        use crate::e0::optimal_povm_pure_two;
        let psi = CVec::from_vec(vec![cplx(0.6, 0.0), cplx(0.8, 0.0)]);
        let rho = State::pure(&psi).unwrap();
        let x1 = pauli_x().scale(0.5);
        let x2 = CMat::from_row_slice(
            2,
            2,
            &[cplx(0.5, 0.), cplx(0., 0.), cplx(0., 0.), cplx(-0.5, 0.)],
        );
        let am = optimal_povm_pure_two(&rho, &x1, &x2, 1.0, 1.0).unwrap();
        let x = ObservableSet::from_matrices(vec![x1, x2]).unwrap();
        let table = run_three_state(&rho, &x, &am.povm, 2000, 99).unwrap();
        let base = estimate_errors(&table, &rho, &x, &SdpSettings::default()).unwrap();

        // reverse the outcome order everywhere
        let k = am.povm.len();
        let rev_povm = Povm::from_matrices(
            (0..k).rev().map(|m| am.povm.outcome(m).clone()).collect(),
        )
        .unwrap();
        let rev_table = CountTable {
            counts: table
                .counts
                .iter()
                .map(|per| {
                    [
                        per[0].iter().rev().copied().collect(),
                        per[1].iter().rev().copied().collect(),
                        per[2].iter().rev().copied().collect(),
                    ]
                })
                .collect(),
            shots: table.shots,
            seed: table.seed,
        };
        let _ = rev_povm;
        let rev = estimate_errors(&rev_table, &rho, &x, &SdpSettings::default()).unwrap();
        for (a, b) in base.iter().zip(&rev) {
            assert_relative_eq!(a.lo, b.lo, epsilon = 1e-7);
            assert_relative_eq!(a.hi, b.hi, epsilon = 1e-7);
        }
    }
}
