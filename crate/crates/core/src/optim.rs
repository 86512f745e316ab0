//! Small derivative-free and least-squares minimizers over `f64` vectors.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub initial_step: f64,
    pub max_evals: usize,
    /// Stop when the simplex's function values span less than this.
    pub f_tol: f64,
    /// ... and its vertices lie within this distance of the best one.
    pub x_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            initial_step: 0.1,
            max_evals: 20_000,
            f_tol: 1e-15,
            x_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

pub fn nelder_mead(f: impl Fn(&[f64]) -> f64, x0: &[f64], opts: NelderMeadOptions) -> Minimum {
    let n = x0.len();
    let evals = std::cell::Cell::new(0usize);
    let eval = |x: &[f64]| {
        evals.set(evals.get() + 1);
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let v = eval(&x);
        simplex.push((x, v));
    }
    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect() };

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if (spread <= opts.f_tol && size <= opts.x_tol) || evals.get() >= opts.max_evals {
            break;
        }
        let mut centroid = vec![0.0; n];
        for (x, _) in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(x) {
                *c += v / n as f64;
            }
        }
        let worst = simplex[n].clone();
        let reflected = combine(&centroid, &worst.0, -1.0);
        let fr = eval(&reflected);
        if fr < simplex[0].1 {
            let expanded = combine(&centroid, &worst.0, -2.0);
            let fe = eval(&expanded);
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let (target, ft) = if fr < worst.1 { (&reflected, fr) } else { (&worst.0, worst.1) };
            let contracted = combine(&centroid, target, 0.5);
            let fc = eval(&contracted);
            if fc < ft {
                simplex[n] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    let x = combine(&best, &vertex.0, 0.5);
                    let v = eval(&x);
                    *vertex = (x, v);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum {
        x,
        value,
        evals: evals.get(),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LevenbergMarquardtOptions {
    pub max_iter: usize,
    /// Stop once `‖r‖²` falls below this.
    pub cost_tol: f64,
    /// Stop when a successful step improves the cost by less than this fraction.
    pub rel_tol: f64,
    pub initial_damping: f64,
}

impl Default for LevenbergMarquardtOptions {
    fn default() -> Self {
        LevenbergMarquardtOptions {
            max_iter: 500,
            cost_tol: 1e-26,
            rel_tol: 1e-14,
            initial_damping: 1e-3,
        }
    }
}

/// Central-difference Jacobian of a vector function.
pub fn numeric_jacobian(f: &impl Fn(&[f64]) -> Vec<f64>, x: &[f64], step: f64) -> DMatrix<f64> {
    let m = f(x).len();
    let mut jac = DMatrix::zeros(m, x.len());
    let mut xp = x.to_vec();
    for j in 0..x.len() {
        let h = step * (1.0 + x[j].abs());
        xp[j] = x[j] + h;
        let fp = f(&xp);
        xp[j] = x[j] - h;
        let fm = f(&xp);
        xp[j] = x[j];
        for i in 0..m {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

/// Minimizes `‖r(x)‖²`; the returned value is that sum of squares.
pub fn levenberg_marquardt(r: impl Fn(&[f64]) -> Vec<f64>, x0: &[f64], opts: LevenbergMarquardtOptions) -> Minimum {
    let cost = |v: &[f64]| v.iter().map(|e| e * e).sum::<f64>();
    let mut x = x0.to_vec();
    let mut res = r(&x);
    let mut c = cost(&res);
    let mut evals = 1;
    let mut mu = opts.initial_damping;
    let mut nu = 2.0;
    for _ in 0..opts.max_iter {
        if c <= opts.cost_tol {
            break;
        }
        let jac = numeric_jacobian(&r, &x, 1e-7);
        evals += 2 * x.len();
        let rv = DVector::from_column_slice(&res);
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * rv;
        if g.amax() < 1e-300 {
            break;
        }
        let scale = jtj.diagonal().amax().max(1e-300);
        let mut accepted = false;
        for _ in 0..40 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += mu * scale.max(jtj[(i, i)]);
            }
            let Some(delta) = a.cholesky().map(|ch| ch.solve(&(-&g))) else {
                mu *= nu;
                nu *= 2.0;
                continue;
            };
            let trial: Vec<f64> = x.iter().zip(delta.iter()).map(|(a, d)| a + d).collect();
            let trial_res = r(&trial);
            evals += 1;
            let tc = cost(&trial_res);
            if tc < c {
                let improvement = (c - tc) / c.max(1e-300);
                x = trial;
                res = trial_res;
                c = tc;
                mu = (mu / 3.0).max(1e-15);
                nu = 2.0;
                accepted = improvement > opts.rel_tol;
                break;
            }
            mu *= nu;
            nu *= 2.0;
        }
        if !accepted {
            break;
        }
    }
    Minimum { x, value: c, evals }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_on_rosenbrock() {
        let rosen = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = nelder_mead(rosen, &[-1.2, 1.0], NelderMeadOptions::default());
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5, "{:?}", m.x);
    }

    #[test]
    fn lm_fits_exponential() {
        let ts: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let data: Vec<f64> = ts.iter().map(|t| 2.5 * (-1.3 * t).exp()).collect();
        let r = |p: &[f64]| -> Vec<f64> { ts.iter().zip(&data).map(|(t, d)| p[0] * (p[1] * t).exp() - d).collect() };
        let m = levenberg_marquardt(r, &[1.0, 0.0], LevenbergMarquardtOptions::default());
        assert!(m.value < 1e-20);
        assert!((m.x[0] - 2.5).abs() < 1e-8 && (m.x[1] + 1.3).abs() < 1e-8);
    }

    #[test]
    fn jacobian_of_linear_map() {
        let f = |x: &[f64]| vec![2.0 * x[0] - x[1], 3.0 * x[1]];
        let j = numeric_jacobian(&f, &[0.3, -0.7], 1e-6);
        assert!((j - DMatrix::from_row_slice(2, 2, &[2.0, -1.0, 0.0, 3.0])).amax() < 1e-8);
    }
}
