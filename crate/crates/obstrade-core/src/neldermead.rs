//! Nelder-Mead simplex minimization with the adaptive parameters of
//! Gao & Han, used by the brute-force measurement oracle.

pub struct NmOptions {
    pub max_evals: usize,
    pub ftol: f64,
    pub xtol: f64,
    pub init_step: f64,
}

impl Default for NmOptions {
    fn default() -> Self {
        Self {
            max_evals: 20_000,
            ftol: 1e-12,
            xtol: 1e-10,
            init_step: 0.5,
        }
    }
}

pub struct NmResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

pub fn minimize(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], opts: &NmOptions) -> NmResult {
    let n = x0.len();
    let nf = n as f64;
    // adaptive coefficients
    let alpha = 1.0;
    let beta = 1.0 + 2.0 / nf;
    let gamma = 0.75 - 1.0 / (2.0 * nf);
    let delta = 1.0 - 1.0 / nf;

    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        f(x)
    };

    let mut simplex: Vec<(f64, Vec<f64>)> = Vec::with_capacity(n + 1);
    simplex.push((eval(x0, &mut evals), x0.to_vec()));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.init_step;
        simplex.push((eval(&x, &mut evals), x));
    }

    while evals < opts.max_evals {
        simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
        let spread = simplex[n].0 - simplex[0].0;
        let xspread = (0..n)
            .map(|i| (simplex[n].1[i] - simplex[0].1[i]).abs())
            .fold(0.0_f64, f64::max);
        if spread.abs() < opts.ftol && xspread < opts.xtol {
            break;
        }

        let centroid: Vec<f64> = (0..n)
            .map(|i| simplex[..n].iter().map(|(_, x)| x[i]).sum::<f64>() / nf)
            .collect();
        let worst = simplex[n].clone();
        let reflect: Vec<f64> = (0..n)
            .map(|i| centroid[i] + alpha * (centroid[i] - worst.1[i]))
            .collect();
        let fr = eval(&reflect, &mut evals);

        if fr < simplex[0].0 {
            let expand: Vec<f64> = (0..n)
                .map(|i| centroid[i] + beta * (reflect[i] - centroid[i]))
                .collect();
            let fe = eval(&expand, &mut evals);
            simplex[n] = if fe < fr { (fe, expand) } else { (fr, reflect) };
        } else if fr < simplex[n - 1].0 {
            simplex[n] = (fr, reflect);
        } else {
            let (fc, contract) = if fr < worst.0 {
                let c: Vec<f64> = (0..n)
                    .map(|i| centroid[i] + gamma * (reflect[i] - centroid[i]))
                    .collect();
                (eval(&c, &mut evals), c)
            } else {
                let c: Vec<f64> = (0..n)
                    .map(|i| centroid[i] - gamma * (reflect[i] - centroid[i]))
                    .collect();
                (eval(&c, &mut evals), c)
            };
            if fc < worst.0.min(fr) {
                simplex[n] = (fc, contract);
            } else {
                // shrink toward the best vertex
                let best = simplex[0].1.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    for i in 0..n {
                        vertex.1[i] = best[i] + delta * (vertex.1[i] - best[i]);
                    }
                    vertex.0 = eval(&vertex.1, &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.0.total_cmp(&b.0));
    NmResult {
        x: simplex[0].1.clone(),
        value: simplex[0].0,
        evals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = minimize(f, &[-1.2, 1.0], &NmOptions::default());
        assert!(r.value < 1e-8, "value {}", r.value);
        assert!((r.x[0] - 1.0).abs() < 1e-3 && (r.x[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn quadratic_bowl_high_dim() {
        let f = |x: &[f64]| {
            x.iter()
                .enumerate()
                .map(|(i, v)| (i as f64 + 1.0) * v * v)
                .sum()
        };
        let r = minimize(
            f,
            &vec![1.0; 12],
            &NmOptions {
                max_evals: 60_000,
                ..Default::default()
            },
        );
        assert!(r.value < 1e-9, "value {}", r.value);
    }
}
