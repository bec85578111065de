//! Infeasible primal-dual interior-point method with Nesterov–Todd scaling
//! and a Mehrotra predictor-corrector, over dense real symmetric blocks
//! (complex Hermitian blocks arrive already embedded).
//!
//! The KKT system is reduced to a dense Schur complement over the scalar
//! variables, factored once per iteration with a Cholesky decomposition and
//! reused for the predictor and corrector solves.

use faer::linalg::solvers::{Llt, Solve};
use faer::{Mat, Side};

use super::{embed_entry, embedded_dim, Residuals, SdpProblem, SdpSettings, SdpSolution, SdpStatus};

type Entries = Vec<(usize, usize, f64)>;

struct BlockData {
    k: usize,
    f0: Mat<f64>,
    f0_scale: f64,
    /// variables touching this block with their embedded symmetric entries
    vars: Vec<(usize, Entries)>,
}

struct Iterate {
    y: Vec<f64>,
    nu: Vec<f64>,
    s: Vec<Mat<f64>>,
    z: Vec<Mat<f64>>,
}

struct Scaling {
    /// NT scaling factor R with W = R Rᵀ and R⁻¹ S R⁻ᵀ = Rᵀ Z R = Λ.
    r: Mat<f64>,
    r_inv: Mat<f64>,
    w_inv: Mat<f64>,
    lambda: Vec<f64>,
}

pub fn solve(problem: &SdpProblem, settings: &SdpSettings) -> crate::Result<SdpSolution> {
    problem
        .validate()
        .map_err(crate::Error::Invalid)?;
    let m = problem.num_vars;
    let blocks: Vec<BlockData> = problem
        .blocks
        .iter()
        .map(|blk| {
            let k = embedded_dim(blk);
            let mut f0 = Mat::zeros(k, k);
            for e in &blk.constant {
                for (r, c, v) in embed_entry(blk, e) {
                    f0[(r, c)] += v;
                    if r != c {
                        f0[(c, r)] += v;
                    }
                }
            }
            let mut by_var: std::collections::BTreeMap<usize, Entries> = Default::default();
            for (var, e) in &blk.terms {
                let dst = by_var.entry(*var).or_default();
                for (r, c, v) in embed_entry(blk, e) {
                    dst.push((r, c, v));
                }
            }
            let f0_scale = 1.0 + frob(&f0);
            BlockData {
                k,
                f0,
                f0_scale,
                vars: by_var.into_iter().collect(),
            }
        })
        .collect();

    let n_eq = problem.equalities.len();
    let mut g_mat = Mat::<f64>::zeros(n_eq, m);
    let mut h_vec = vec![0.0; n_eq];
    for (i, eq) in problem.equalities.iter().enumerate() {
        for &(v, a) in &eq.terms {
            g_mat[(i, v)] += a;
        }
        h_vec[i] = eq.rhs;
    }
    let h_scale = 1.0 + h_vec.iter().fold(0.0_f64, |a, &b| a.max(b.abs()));
    let c_scale = 1.0
        + problem
            .objective
            .iter()
            .fold(0.0_f64, |a, &b| a.max(b.abs()));

    // identity-scaled central starting point
    let mut it = Iterate {
        y: vec![0.0; m],
        nu: vec![0.0; n_eq],
        s: blocks
            .iter()
            .map(|b| {
                let scale = (b.f0_scale / (b.k as f64).sqrt()).max(1.0);
                Mat::from_fn(b.k, b.k, |r, c| if r == c { scale } else { 0.0 })
            })
            .collect(),
        z: blocks
            .iter()
            .map(|b| Mat::from_fn(b.k, b.k, |r, c| if r == c { 1.0 } else { 0.0 }))
            .collect(),
    };
    let k_total: usize = blocks.iter().map(|b| b.k).sum();

    let mut best: Option<(f64, SdpSolution)> = None;
    let mut status = SdpStatus::NumericalFailure;
    let mut iterations = settings.max_iters;

    for iter in 0..settings.max_iters {
        // residuals
        let r_p: Vec<Mat<f64>> = blocks
            .iter()
            .zip(&it.s)
            .map(|(b, s)| {
                let mut r = assemble(b, &it.y);
                r -= s;
                r
            })
            .collect();
        let mut r_d = vec![0.0; m];
        for (i, &ci) in problem.objective.iter().enumerate() {
            r_d[i] = ci;
        }
        for (b, z) in blocks.iter().zip(&it.z) {
            for (var, entries) in &b.vars {
                r_d[*var] -= inner(entries, z);
            }
        }
        for i in 0..n_eq {
            for v in 0..m {
                r_d[v] -= g_mat[(i, v)] * it.nu[i];
            }
        }
        let mut r_e = vec![0.0; n_eq];
        for i in 0..n_eq {
            r_e[i] = h_vec[i]
                - (0..m).map(|v| g_mat[(i, v)] * it.y[v]).sum::<f64>();
        }

        let gap_abs: f64 = it.s.iter().zip(&it.z).map(|(s, z)| inner_dense(s, z)).sum();
        let mu = gap_abs / k_total as f64;
        let pobj: f64 = it
            .y
            .iter()
            .zip(&problem.objective)
            .map(|(y, c)| y * c)
            .sum::<f64>()
            + problem.objective_constant;
        let dobj: f64 = {
            let mut v = problem.objective_constant;
            for (b, z) in blocks.iter().zip(&it.z) {
                v -= inner_dense(&b.f0, z);
            }
            for i in 0..n_eq {
                v += h_vec[i] * it.nu[i];
            }
            v
        };

        let rp_rel = blocks
            .iter()
            .zip(&r_p)
            .map(|(b, r)| frob(r) / b.f0_scale)
            .fold(0.0_f64, f64::max);
        let re_rel = r_e.iter().fold(0.0_f64, |a, &b| a.max(b.abs())) / h_scale;
        let rd_rel = r_d.iter().fold(0.0_f64, |a, &b| a.max(b.abs())) / c_scale;
        let gap_rel = gap_abs.abs() / (1.0 + pobj.abs() + dobj.abs());

        let score = rp_rel.max(re_rel).max(rd_rel).max(gap_rel);
        if best.as_ref().map_or(true, |(s, _)| score < *s) {
            best = Some((score, snapshot(problem, &it, rp_rel.max(re_rel), rd_rel, gap_rel, iter)));
        }

        if rp_rel < settings.tol_feas
            && re_rel < settings.tol_feas
            && rd_rel < settings.tol_feas
            && gap_rel < settings.tol_gap
        {
            status = SdpStatus::Optimal;
            iterations = iter;
            break;
        }
        // divergence heuristic: dual variables exploding while the gap stalls
        // indicates an infeasible primal (no self-dual embedding here)
        let z_norm: f64 = it.z.iter().map(frob).sum();
        let y_norm: f64 = it.y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if z_norm > 1e12 || y_norm > 1e12 || !mu.is_finite() {
            status = SdpStatus::Infeasible;
            iterations = iter;
            break;
        }

        // NT scaling per block
        let scalings: Vec<Scaling> = match blocks
            .iter()
            .zip(it.s.iter().zip(&it.z))
            .map(|(b, (s, z))| nt_scaling(b.k, s, z))
            .collect::<Option<Vec<_>>>()
        {
            Some(s) => s,
            None => {
                iterations = iter;
                break;
            }
        };

        // Schur complement over the scalar variables
        let mut h_schur = Mat::<f64>::zeros(m, m);
        for (b, sc) in blocks.iter().zip(&scalings) {
            let nlocal = b.vars.len();
            for a in 0..nlocal {
                let bmat = sandwich_sparse(&sc.w_inv, &b.vars[a].1, b.k);
                let ia = b.vars[a].0;
                for bv in a..nlocal {
                    let ib = b.vars[bv].0;
                    let val = inner(&b.vars[bv].1, &bmat);
                    h_schur[(ia, ib)] += val;
                    if ia != ib {
                        h_schur[(ib, ia)] += val;
                    }
                }
            }
        }
        let h_saved = h_schur.clone();
        let h_factor = match factor_with_ridge(&mut h_schur, m) {
            Some(f) => f,
            None => {
                iterations = iter;
                break;
            }
        };

        // W⁻¹ r_p W⁻¹ per block, reused by both solves
        let wrw: Vec<Mat<f64>> = scalings
            .iter()
            .zip(&r_p)
            .map(|(sc, rp)| &sc.w_inv * rp * &sc.w_inv)
            .collect();

        // predictor: complementarity target D = −Z
        let d_aff: Vec<Mat<f64>> = it.z.iter().map(|z| -z).collect();
        let (dy_aff, dnu_aff) = solve_kkt(
            &blocks, &h_saved, &h_factor, &g_mat, &r_d, &r_e, &wrw, &d_aff, m, n_eq,
        );
        let ds_aff: Vec<Mat<f64>> = blocks
            .iter()
            .zip(&r_p)
            .map(|(b, rp)| assemble_delta(b, &dy_aff) + rp)
            .collect();
        let dz_aff: Vec<Mat<f64>> = scalings
            .iter()
            .zip(d_aff.iter().zip(&ds_aff))
            .map(|(sc, (d, ds))| d - &sc.w_inv * ds * &sc.w_inv)
            .collect();

        let alpha_p_aff = step_length(&it.s, &ds_aff, 1.0);
        let alpha_d_aff = step_length(&it.z, &dz_aff, 1.0);
        let mut mu_aff = 0.0;
        for ((s, ds), (z, dz)) in it.s.iter().zip(&ds_aff).zip(it.z.iter().zip(&dz_aff)) {
            let s_new = s + ds * faer::Scale(alpha_p_aff);
            let z_new = z + dz * faer::Scale(alpha_d_aff);
            mu_aff += inner_dense(&s_new, &z_new);
        }
        mu_aff /= k_total as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3).max(1e-12);

        // corrector target in scaled space
        let d_corr: Vec<Mat<f64>> = scalings
            .iter()
            .zip(ds_aff.iter().zip(&dz_aff))
            .map(|(sc, (ds, dz))| {
                let k = sc.r.nrows();
                let ds_t = &sc.r_inv * ds * sc.r_inv.transpose();
                let dz_t = sc.r.transpose() * dz * &sc.r;
                let prod = &ds_t * &dz_t;
                let mut rhs = Mat::<f64>::zeros(k, k);
                for p in 0..k {
                    for q in 0..k {
                        let sym = 0.5 * (prod[(p, q)] + prod[(q, p)]);
                        let mut v = -sym;
                        if p == q {
                            v += sigma * mu - sc.lambda[p] * sc.lambda[p];
                        }
                        rhs[(p, q)] = v * 2.0 / (sc.lambda[p] + sc.lambda[q]);
                    }
                }
                sc.r_inv.transpose() * rhs * &sc.r_inv
            })
            .collect();

        let (dy, dnu) = solve_kkt(
            &blocks, &h_saved, &h_factor, &g_mat, &r_d, &r_e, &wrw, &d_corr, m, n_eq,
        );
        let ds: Vec<Mat<f64>> = blocks
            .iter()
            .zip(&r_p)
            .map(|(b, rp)| assemble_delta(b, &dy) + rp)
            .collect();
        let dz: Vec<Mat<f64>> = scalings
            .iter()
            .zip(d_corr.iter().zip(&ds))
            .map(|(sc, (d, dsb))| d - &sc.w_inv * dsb * &sc.w_inv)
            .collect();

        let tau = 0.99;
        let alpha_p = step_length(&it.s, &ds, tau);
        let alpha_d = step_length(&it.z, &dz, tau);
        let _ = (dnu_aff, alpha_p_aff, alpha_d_aff);

        for i in 0..m {
            it.y[i] += alpha_p * dy[i];
        }
        for i in 0..n_eq {
            it.nu[i] += alpha_d * dnu[i];
        }
        for (s, d) in it.s.iter_mut().zip(&ds) {
            *s += d * faer::Scale(alpha_p);
            symmetrize(s);
        }
        for (z, d) in it.z.iter_mut().zip(&dz) {
            *z += d * faer::Scale(alpha_d);
            symmetrize(z);
        }
    }

    let (_, mut sol) = best.expect("at least one iterate recorded");
    sol.status = if status == SdpStatus::Optimal {
        SdpStatus::Optimal
    } else {
        sol.iterations = iterations;
        status
    };
    if status == SdpStatus::Optimal {
        sol.iterations = iterations;
    }
    Ok(sol)
}

fn snapshot(
    problem: &SdpProblem,
    it: &Iterate,
    primal: f64,
    dual: f64,
    gap: f64,
    iter: usize,
) -> SdpSolution {
    let pobj: f64 = it
        .y
        .iter()
        .zip(&problem.objective)
        .map(|(y, c)| y * c)
        .sum::<f64>()
        + problem.objective_constant;
    SdpSolution {
        status: SdpStatus::NumericalFailure,
        objective_value: pobj,
        variable_values: it.y.clone(),
        block_duals: it
            .z
            .iter()
            .map(|z| nalgebra::DMatrix::from_fn(z.nrows(), z.ncols(), |r, c| z[(r, c)]))
            .collect(),
        equality_duals: it.nu.clone(),
        residuals: Residuals { primal, dual, gap },
        iterations: iter,
    }
}

fn assemble(b: &BlockData, y: &[f64]) -> Mat<f64> {
    let mut m = b.f0.clone();
    for (var, entries) in &b.vars {
        let yv = y[*var];
        if yv == 0.0 {
            continue;
        }
        for &(r, c, v) in entries {
            m[(r, c)] += yv * v;
            if r != c {
                m[(c, r)] += yv * v;
            }
        }
    }
    m
}

fn assemble_delta(b: &BlockData, dy: &[f64]) -> Mat<f64> {
    let mut m = Mat::zeros(b.k, b.k);
    for (var, entries) in &b.vars {
        let yv = dy[*var];
        for &(r, c, v) in entries {
            m[(r, c)] += yv * v;
            if r != c {
                m[(c, r)] += yv * v;
            }
        }
    }
    m
}

/// ⟨A, M⟩ for a sparse symmetric A given by its upper entries.
fn inner(entries: &Entries, m: &Mat<f64>) -> f64 {
    let mut acc = 0.0;
    for &(r, c, v) in entries {
        acc += if r == c { v * m[(r, c)] } else { 2.0 * v * m[(r, c)] };
    }
    acc
}

fn inner_dense(a: &Mat<f64>, b: &Mat<f64>) -> f64 {
    let mut acc = 0.0;
    for c in 0..a.ncols() {
        for r in 0..a.nrows() {
            acc += a[(r, c)] * b[(r, c)];
        }
    }
    acc
}

fn frob(m: &Mat<f64>) -> f64 {
    inner_dense(m, m).sqrt()
}

fn symmetrize(m: &mut Mat<f64>) {
    let n = m.nrows();
    for r in 0..n {
        for c in (r + 1)..n {
            let v = 0.5 * (m[(r, c)] + m[(c, r)]);
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
    }
}

/// W⁻¹ A W⁻¹ for sparse symmetric A: a sum of symmetric outer products of
/// columns of W⁻¹.
fn sandwich_sparse(w_inv: &Mat<f64>, entries: &Entries, k: usize) -> Mat<f64> {
    let mut b = Mat::<f64>::zeros(k, k);
    for &(p, q, v) in entries {
        for s in 0..k {
            let coef1 = v * w_inv[(q, s)];
            if coef1 != 0.0 {
                for r in 0..k {
                    b[(r, s)] += coef1 * w_inv[(r, p)];
                }
            }
            if p != q {
                let coef2 = v * w_inv[(p, s)];
                if coef2 != 0.0 {
                    for r in 0..k {
                        b[(r, s)] += coef2 * w_inv[(r, q)];
                    }
                }
            }
        }
    }
    b
}

/// NT scaling from Cholesky factors and an SVD:
/// `L_zᵀ L_s = U Σ Vᵀ`, `R = L_s V Σ^{-1/2}`, `R⁻¹ = Σ^{-1/2} Uᵀ L_zᵀ`.
fn nt_scaling(k: usize, s: &Mat<f64>, z: &Mat<f64>) -> Option<Scaling> {
    let l_s = chol_psd(s)?;
    let l_z = chol_psd(z)?;
    let m = l_z.transpose() * &l_s;
    let svd = m.svd().ok()?;
    let lambda: Vec<f64> = (0..k).map(|i| svd.S()[i]).collect();
    if lambda.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
        return None;
    }
    let mut r = &l_s * svd.V();
    let mut r_inv = svd.U().transpose() * l_z.transpose();
    for j in 0..k {
        let inv_sqrt = 1.0 / lambda[j].sqrt();
        for i in 0..k {
            r[(i, j)] *= inv_sqrt;
            r_inv[(j, i)] *= inv_sqrt;
        }
    }
    let w_inv = r_inv.transpose() * &r_inv;
    Some(Scaling {
        r,
        r_inv,
        w_inv,
        lambda,
    })
}

fn chol_psd(m: &Mat<f64>) -> Option<Mat<f64>> {
    let n = m.nrows();
    let mut attempt = m.clone();
    let mut ridge = 0.0;
    for _ in 0..4 {
        if ridge > 0.0 {
            for i in 0..n {
                attempt[(i, i)] = m[(i, i)] + ridge;
            }
        }
        if let Ok(f) = attempt.llt(Side::Lower) {
            return Some(f.L().to_owned());
        }
        let diag_max = (0..n).map(|i| m[(i, i)].abs()).fold(0.0_f64, f64::max);
        ridge = if ridge == 0.0 { 1e-14 * (1.0 + diag_max) } else { ridge * 100.0 };
    }
    None
}

fn factor_with_ridge(h: &mut Mat<f64>, m: usize) -> Option<Llt<f64>> {
    for attempt in 0..4 {
        match h.llt(Side::Lower) {
            Ok(f) => return Some(f),
            Err(_) => {
                let bump = 1e-12
                    * 10f64.powi(2 * attempt)
                    * (1.0 + (0..m).map(|i| h[(i, i)]).fold(0.0_f64, f64::max));
                for i in 0..m {
                    h[(i, i)] += bump;
                }
            }
        }
    }
    None
}

/// Solve with one step of iterative refinement against the unfactored matrix.
fn refined_solve(h: &Mat<f64>, h_factor: &Llt<f64>, rhs: &Mat<f64>) -> Mat<f64> {
    let mut x = h_factor.solve(rhs);
    let residual = rhs - h * &x;
    x += h_factor.solve(&residual);
    x
}

#[allow(clippy::too_many_arguments)]
fn solve_kkt(
    blocks: &[BlockData],
    h_saved: &Mat<f64>,
    h_factor: &Llt<f64>,
    g_mat: &Mat<f64>,
    r_d: &[f64],
    r_e: &[f64],
    wrw: &[Mat<f64>],
    d_target: &[Mat<f64>],
    m: usize,
    n_eq: usize,
) -> (Vec<f64>, Vec<f64>) {
    // g_i = −r_d_i + ⟨A_i, D − W⁻¹ r_p W⁻¹⟩
    let mut g = vec![0.0; m];
    for (i, rd) in r_d.iter().enumerate() {
        g[i] = -rd;
    }
    for ((b, d), w) in blocks.iter().zip(d_target).zip(wrw) {
        let diff = d - w;
        for (var, entries) in &b.vars {
            g[*var] += inner(entries, &diff);
        }
    }
    let mut rhs = Mat::<f64>::zeros(m, 1);
    for i in 0..m {
        rhs[(i, 0)] = g[i];
    }
    let u0 = refined_solve(h_saved, h_factor, &rhs);
    if n_eq == 0 {
        return ((0..m).map(|i| u0[(i, 0)]).collect(), Vec::new());
    }
    let gt = g_mat.transpose().to_owned();
    let v = refined_solve(h_saved, h_factor, &gt);
    let gv = g_mat * &v;
    let mut rhs_nu = Mat::<f64>::zeros(n_eq, 1);
    for i in 0..n_eq {
        rhs_nu[(i, 0)] =
            r_e[i] - (0..m).map(|j| g_mat[(i, j)] * u0[(j, 0)]).sum::<f64>();
    }
    let dnu = match gv.llt(Side::Lower) {
        Ok(f) => f.solve(&rhs_nu),
        Err(_) => {
            // nearly dependent equalities: fall back to a ridge
            let mut gv2 = gv.clone();
            let bump =
                1e-12 * (1.0 + (0..n_eq).map(|i| gv2[(i, i)]).fold(0.0_f64, f64::max));
            for i in 0..n_eq {
                gv2[(i, i)] += bump;
            }
            gv2.llt(Side::Lower)
                .expect("ridged equality system factors")
                .solve(&rhs_nu)
        }
    };
    let mut dy = vec![0.0; m];
    for i in 0..m {
        dy[i] = u0[(i, 0)] + (0..n_eq).map(|j| v[(i, j)] * dnu[(j, 0)]).sum::<f64>();
    }
    (dy, (0..n_eq).map(|i| dnu[(i, 0)]).collect())
}

/// Largest τ-damped step keeping every block PD:
/// `min(1, τ·(−1/λ_min(L⁻¹ ΔM L⁻ᵀ)))` over blocks.
fn step_length(mats: &[Mat<f64>], deltas: &[Mat<f64>], tau: f64) -> f64 {
    let mut alpha: f64 = 1.0;
    for (mat, delta) in mats.iter().zip(deltas) {
        let l = match chol_psd(mat) {
            Some(l) => l,
            None => return 0.0,
        };
        // T = L⁻¹ Δ L⁻ᵀ
        let mut t = delta.clone();
        l.solve_lower_triangular_in_place(&mut t);
        let mut tt = t.transpose().to_owned();
        l.solve_lower_triangular_in_place(&mut tt);
        let mut sym = tt.transpose().to_owned();
        symmetrize(&mut sym);
        let eigmin = match sym.self_adjoint_eigenvalues(Side::Lower) {
            Ok(v) => v[0],
            Err(_) => return 0.0,
        };
        if eigmin < 0.0 {
            alpha = alpha.min(tau * (-1.0 / eigmin));
        }
    }
    alpha.min(1.0)
}
