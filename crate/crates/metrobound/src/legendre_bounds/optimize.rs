//! Maximisation routines for the outer search over r.

use nalgebra::{DMatrix, DVector};

/// Result of one pattern search.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Pattern search with per-coordinate adaptive steps. Polls ±e_i, falls
/// back to pairwise diagonals before shrinking, and tries a pattern move
/// after every improving sweep.
pub fn pattern_search<F>(f: &mut F, x0: Vec<f64>, step: f64, min_step: f64, max_evals: usize) -> SearchOutcome
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    let mut x = x0;
    let mut fx = f(&x);
    let mut evals = 1;
    let mut steps = vec![step; dim];
    let max_step = step * 1e6;
    let mut converged = false;
    if dim == 0 {
        return SearchOutcome { x, value: fx, evals, converged: true };
    }
    loop {
        if steps.iter().all(|&s| s < min_step) {
            converged = true;
            break;
        }
        if evals >= max_evals {
            break;
        }
        let prev = x.clone();
        let mut improved = false;
        for i in 0..dim {
            let mut hit = false;
            for dir in [1.0, -1.0] {
                let mut t = x.clone();
                t[i] += dir * steps[i];
                let ft = f(&t);
                evals += 1;
                if ft > fx {
                    x = t;
                    fx = ft;
                    hit = true;
                    break;
                }
            }
            if hit {
                steps[i] = (steps[i] * 2.0).min(max_step);
                improved = true;
            }
        }
        if !improved && dim > 1 {
            'pairs: for i in 0..dim {
                for j in (i + 1)..dim {
                    for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                        let mut t = x.clone();
                        t[i] += si * steps[i];
                        t[j] += sj * steps[j];
                        let ft = f(&t);
                        evals += 1;
                        if ft > fx {
                            x = t;
                            fx = ft;
                            improved = true;
                            break 'pairs;
                        }
                    }
                }
            }
        }
        if improved {
            let t: Vec<f64> = x.iter().zip(&prev).map(|(a, b)| 2.0 * a - b).collect();
            let ft = f(&t);
            evals += 1;
            if ft > fx {
                x = t;
                fx = ft;
            }
        } else {
            steps.iter_mut().for_each(|s| *s *= 0.5);
        }
    }
    SearchOutcome { x, value: fx, evals, converged }
}

/// Result of an ellipsoid run. `upper` bounds the maximum over the initial
/// ball.
#[derive(Clone, Debug)]
pub struct EllipsoidOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub upper: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Central-cut ellipsoid method for a concave function given with a
/// supergradient. Starts from the ball of `radius` about `x0` and stops
/// once the certified gap drops below `gap_tol`. Works with nonsmooth
/// objectives, where coordinate polls can stall at a kink.
pub fn ellipsoid_max<F>(f: &mut F, x0: Vec<f64>, radius: f64, gap_tol: f64, max_evals: usize) -> EllipsoidOutcome
where
    F: FnMut(&[f64]) -> (f64, Vec<f64>),
{
    let dim = x0.len();
    let mut x = DVector::from_vec(x0);
    let mut p = DMatrix::<f64>::identity(dim, dim) * (radius * radius);
    let mut best_x = x.as_slice().to_vec();
    let mut best = f64::NEG_INFINITY;
    let mut upper = f64::INFINITY;
    let mut evals = 0;
    let mut converged = false;
    let d = dim as f64;
    while evals < max_evals {
        let (fx, g) = f(x.as_slice());
        evals += 1;
        if fx > best {
            best = fx;
            best_x = x.as_slice().to_vec();
        }
        let g = DVector::from_vec(g);
        let pg = &p * &g;
        let width = g.dot(&pg).max(0.0).sqrt();
        upper = upper.min(fx + width);
        if width == 0.0 || upper - best <= gap_tol {
            converged = true;
            break;
        }
        let step = pg / width;
        if dim == 1 {
            x += &step * 0.5;
            p *= 0.25;
        } else {
            x += &step / (d + 1.0);
            p = (&p - &step * step.transpose() * (2.0 / (d + 1.0))) * (d * d / (d * d - 1.0));
            p = (&p + p.transpose()) * 0.5;
        }
    }
    EllipsoidOutcome { x: best_x, value: best, upper, evals, converged }
}

/// Maximiser of a concave function on [a, b] by golden-section search.
pub fn golden_max<F>(mut f: F, mut a: f64, mut b: f64, x_tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..500 {
        if (b - a).abs() <= x_tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    [(c, fc), (d, fd), (x, fx)].into_iter().fold((x, fx), |best, p| if p.1 > best.1 { p } else { best })
}
