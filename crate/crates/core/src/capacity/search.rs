//! Derivative-free local search and a chart of the pure-state manifold.

use num_complex::Complex;

use crate::operator::StateVector;
use crate::scalar::Real;

/// Number of real chart parameters for a pure state in `C^d`.
pub fn chart_len(dim: usize) -> usize {
    2 * (dim - 1)
}

/// Hyperspherical chart: `params = [θ_1..θ_{d-1}, φ_1..φ_{d-1}]`,
/// amplitudes `cos θ_1, sin θ_1 cos θ_2, …, sin θ_1⋯sin θ_{d-1}` and a phase
/// `e^{iφ_k}` on every component but the first. Every real input gives a
/// unit vector.
pub fn chart_state<T: Real>(params: &[T], dim: usize) -> StateVector<T> {
    let (theta, phi) = params.split_at(dim - 1);
    let mut out = Vec::with_capacity(dim);
    let mut tail = T::one();
    for k in 0..dim {
        let amp = if k + 1 < dim { tail * theta[k].cos() } else { tail };
        if k + 1 < dim {
            tail = tail * theta[k].sin();
        }
        let z = if k == 0 {
            Complex::new(amp, T::zero())
        } else {
            Complex::from_polar(amp, phi[k - 1])
        };
        out.push(z);
    }
    out
}

/// Grid over the chart with `per_axis[i]` points on axis `i`; polar angles
/// use cell midpoints of `[0, π/2]`, phases cover `[0, 2π)`.
pub fn chart_grid<T: Real>(dim: usize, theta_points: usize, phi_points: usize) -> Vec<Vec<T>> {
    let n = dim - 1;
    let half_pi = T::FRAC_PI_2();
    let two_pi = T::PI() + T::PI();
    let thetas: Vec<T> = (0..theta_points)
        .map(|i| half_pi * (T::from_usize(i).expect("index") + T::lit(0.5)) / T::from_usize(theta_points).expect("count"))
        .collect();
    let phis: Vec<T> = (0..phi_points)
        .map(|i| two_pi * T::from_usize(i).expect("index") / T::from_usize(phi_points).expect("count"))
        .collect();
    let mut points = vec![Vec::new()];
    for axis in 0..2 * n {
        let values = if axis < n { &thetas } else { &phis };
        points = points
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    points
}

#[derive(Clone, Debug)]
pub struct SearchResult<T> {
    pub x: Vec<T>,
    pub value: T,
    pub evaluations: usize,
}

/// Nelder–Mead minimization with restarts from the incumbent until a restart
/// no longer improves by more than `ftol`.
pub fn nelder_mead<T: Real>(
    mut f: impl FnMut(&[T]) -> T,
    x0: &[T],
    step: T,
    ftol: T,
    max_evals: usize,
) -> SearchResult<T> {
    let mut best = SearchResult {
        x: x0.to_vec(),
        value: f(x0),
        evaluations: 1,
    };
    let mut step = step;
    for _ in 0..4 {
        let run = simplex(&mut f, &best.x, step, ftol, max_evals.saturating_sub(best.evaluations));
        let gained = best.value - run.value;
        let evals = best.evaluations + run.evaluations;
        if run.value < best.value {
            best = SearchResult {
                x: run.x,
                value: run.value,
                evaluations: evals,
            };
        } else {
            best.evaluations = evals;
        }
        if gained <= ftol || best.evaluations >= max_evals {
            break;
        }
        step = step * T::lit(0.5);
    }
    best
}

fn simplex<T: Real>(f: &mut impl FnMut(&[T]) -> T, x0: &[T], step: T, ftol: T, max_evals: usize) -> SearchResult<T> {
    let n = x0.len();
    let (alpha, gamma, rho, sigma) = (T::one(), T::lit(2.0), T::lit(0.5), T::lit(0.5));
    let mut pts: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    pts.push(x0.to_vec());
    for i in 0..n {
        let mut p = x0.to_vec();
        p[i] = p[i] + step;
        pts.push(p);
    }
    let mut vals: Vec<T> = pts.iter().map(|p| f(p)).collect();
    let mut evals = n + 1;
    let xtol = T::tol(1e-10);

    while evals < max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal));
        pts = order.iter().map(|&i| pts[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();

        let spread = vals[n] - vals[0];
        let diameter = pts[1..]
            .iter()
            .flat_map(|p| p.iter().zip(&pts[0]).map(|(a, b)| (*a - *b).abs()))
            .fold(T::zero(), T::max);
        if spread <= ftol && diameter <= xtol.max(ftol.sqrt()) {
            break;
        }

        let centroid: Vec<T> = (0..n)
            .map(|k| pts[..n].iter().map(|p| p[k]).sum::<T>() / T::from_usize(n).expect("dim"))
            .collect();
        let along = |t: T| -> Vec<T> { centroid.iter().zip(&pts[n]).map(|(c, w)| *c + t * (*c - *w)).collect() };

        let xr = along(alpha);
        let fr = f(&xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(alpha * gamma);
            let fe = f(&xe);
            evals += 1;
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            let (xc, fc) = if fr < vals[n] {
                let xc = along(alpha * rho);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(-rho);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    let p: Vec<T> = pts[0].iter().zip(&pts[i]).map(|(b, x)| *b + sigma * (*x - *b)).collect();
                    vals[i] = f(&p);
                    pts[i] = p;
                }
                evals += n;
            }
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal))
        .expect("nonempty simplex");
    SearchResult {
        x: pts[best].clone(),
        value: vals[best],
        evaluations: evals,
    }
}
