//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Every expected value is computed here from closed forms or from an
//! oracle written independently of the solver under test.

use std::collections::HashMap;
use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qdet_core::bayes::{map_regions, min_error, solve_bayes, CostMatrix};
use qdet_core::capacity::{
    binary_capacity, blahut_arimoto, capacity, capacity_covariant, capacity_general, CapacityOptions,
};
use qdet_core::operator::{ComplexMatrix, HermitianOperator};
use qdet_core::povm::group_povm;
use qdet_core::random::{density_operator, diagonal_povm, pure_state, random_povm};
use qdet_core::sic::{analytic_capacity, sic_qubit, tetrahedral_group, verify_capacity_inequality};
use qdet_core::unambiguous::solve_unambiguous;
use qdet_core::{Error, Grouping, Povm};

const SQRT3: f64 = 1.7320508075688772;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// `1 + ((1-ε)/4) log2((1-ε)/2) + 3 ((1+ε/3)/4) log2((1+ε/3)/2)`
fn noisy_sic_capacity(eps: f64) -> f64 {
    1.0 + 0.5 * xlog2x((1.0 - eps) / 2.0) + 1.5 * xlog2x((1.0 + eps / 3.0) / 2.0)
}

fn min_error_uniform(n: usize, eps: f64) -> f64 {
    match n {
        2 => 0.5 + eps / (2.0 * SQRT3),
        3 => 1.0 / 3.0 + eps * (1.0 + 1.0 / SQRT3) / 6.0,
        _ => (1.0 + eps) / n as f64,
    }
}

fn criterion_1() -> Outcome {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for eps in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let povm = sic_qubit(eps).unwrap().povm;
        for n in 2..=6 {
            let s = min_error(&povm, &vec![1.0 / n as f64; n]).unwrap();
            worst = worst.max((s.gain - min_error_uniform(n, eps)).abs());
            checked += 1;
        }
    }
    let ideal = sic_qubit(1.0).unwrap().povm;
    let pinned = [
        (2, 0.5 + 1.0 / (2.0 * SQRT3)),
        (3, 0.5 + 1.0 / (6.0 * SQRT3)),
        (4, 0.5),
        (5, 0.4),
        (6, 1.0 / 3.0),
    ];
    for (n, want) in pinned {
        let s = min_error(&ideal, &vec![1.0 / n as f64; n]).unwrap();
        worst = worst.max((s.gain - want).abs());
        checked += 1;
    }
    outcome(worst <= 1e-9, format!("{checked} cases, max deviation {worst:.2e} (tol 1e-9)"))
}

fn criterion_2() -> Outcome {
    let cases = [(1.0, (2.0 * SQRT3 - 3.0, 9.0 - 5.0 * SQRT3), 0.004), (0.01, (1.0 / 3.0, 1.0 / 3.0), 0.01)];
    let mut passed = true;
    let mut parts = Vec::new();
    for (eps, target, tol) in cases {
        let povm = sic_qubit(eps).unwrap().povm;
        let map = map_regions(&povm, &CostMatrix::min_error(3), 0.002, false).unwrap();
        let Some(j) = map.nearest_junction(target.0, target.1) else {
            passed = false;
            parts.push(format!("eps={eps}: no junction found"));
            continue;
        };
        let grid = ((j.grid_estimate[0] - target.0).powi(2) + (j.grid_estimate[1] - target.1).powi(2)).sqrt();
        let refined = ((j.priors[0] - target.0).powi(2) + (j.priors[1] - target.1).powi(2)).sqrt();
        let sigs: Vec<&str> = j.classes.iter().map(|&c| map.classes[c].signature.as_str()).collect();
        passed &= grid <= tol && refined <= tol;
        parts.push(format!(
            "eps={eps}: classes {} grid dist {grid:.2e}, refined dist {refined:.2e} (tol {tol})",
            sigs.join("|")
        ));
    }
    outcome(passed, parts.join("; "))
}

fn criterion_3() -> Outcome {
    let povm = sic_qubit(1.0).unwrap().povm;
    let mut worst = 0.0f64;
    let mut points: Vec<f64> = (1..200).map(|k| k as f64 / 200.0).collect();
    points.extend([2.0 / 3.0, 2.0 / 3.0 - 1e-7, 2.0 / 3.0 + 1e-7, 1.0 / 3.0, 1.0 / 3.0 + 1e-7]);
    for &p in &points {
        let s = solve_unambiguous(&povm, &[p, 1.0 - p]).unwrap();
        let want = (1.0f64 / 3.0).max(p.max(1.0 - p) / 2.0);
        worst = worst.max((s.p_success - want).abs());
    }
    let crossover = {
        let below = solve_unambiguous(&povm, &[2.0 / 3.0 - 1e-6, 1.0 / 3.0 + 1e-6]).unwrap().p_success;
        let above = solve_unambiguous(&povm, &[2.0 / 3.0 + 1e-6, 1.0 / 3.0 - 1e-6]).unwrap().p_success;
        (below - 1.0 / 3.0).abs() <= 1e-9 && (above - (2.0 / 3.0 + 1e-6) / 2.0).abs() <= 1e-9
    };
    let noisy: Vec<f64> = vec![0.999, 0.99, 0.9, 0.5, 0.1];
    let infeasible = noisy
        .iter()
        .all(|&e| matches!(solve_unambiguous(&sic_qubit(e).unwrap().povm, &[0.5, 0.5]), Err(Error::Infeasible)));
    outcome(
        worst <= 1e-9 && crossover && infeasible,
        format!(
            "{} priors, max deviation {worst:.2e} (tol 1e-9); crossover at 2/3 {}; eps<1 infeasible {}",
            points.len(),
            if crossover { "ok" } else { "wrong" },
            if infeasible { "ok" } else { "NO" }
        ),
    )
}

fn criterion_4() -> Outcome {
    let group = tetrahedral_group::<f64>();
    let mut worst_cov = 0.0f64;
    for k in 1..=10 {
        let eps = k as f64 / 10.0;
        let r = capacity_covariant(&sic_qubit(eps).unwrap().povm, &group).unwrap();
        worst_cov = worst_cov.max((r.bits - noisy_sic_capacity(eps)).abs());
    }
    let c1 = (analytic_capacity(1.0).unwrap() - (4.0f64 / 3.0).log2()).abs();
    let mut worst_gen = 0.0f64;
    for eps in [0.5, 1.0] {
        let r = capacity_general(&sic_qubit(eps).unwrap().povm, 32, 0).unwrap();
        worst_gen = worst_gen.max((r.bits - noisy_sic_capacity(eps)).abs());
    }
    outcome(
        worst_cov <= 1e-6 && c1 <= 1e-9 && worst_gen <= 1e-5,
        format!(
            "covariant max dev {worst_cov:.2e} (tol 1e-6); C1 dev {c1:.2e} (tol 1e-9); general max dev {worst_gen:.2e} (tol 1e-5)"
        ),
    )
}

/// Plain Blahut–Arimoto in nats, iterated until the upper and lower
/// capacity estimates agree.
fn oracle_ba(w: &[Vec<f64>]) -> (f64, Vec<f64>) {
    let n = w.len();
    let mut p = vec![1.0 / n as f64; n];
    for _ in 0..2_000_000 {
        let q: Vec<f64> = (0..w[0].len()).map(|j| (0..n).map(|i| p[i] * w[i][j]).sum()).collect();
        let d: Vec<f64> = w
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&q)
                    .filter(|(&x, _)| x > 0.0)
                    .map(|(&x, &qj)| x * (x / qj).ln())
                    .sum()
            })
            .collect();
        let lower: f64 = p.iter().zip(&d).map(|(a, b)| a * b).sum();
        let upper = d.iter().cloned().fold(f64::MIN, f64::max);
        if upper - lower < 1e-14 {
            return (lower / std::f64::consts::LN_2, p);
        }
        let z: f64 = p.iter().zip(&d).map(|(a, b)| a * b.exp()).sum();
        p = p.iter().zip(&d).map(|(a, b)| a * b.exp() / z).collect();
    }
    panic!("oracle did not converge");
}

fn divergence_bits(row: &[f64], q: &[f64]) -> f64 {
    row.iter()
        .zip(q)
        .filter(|(&x, _)| x > 0.0)
        .map(|(&x, &qj)| x * (x / qj).log2())
        .sum()
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_value = 0.0f64;
    let mut worst_fixed = 0.0f64;
    let mut worst_lib = 0.0f64;
    for _ in 0..100 {
        let (a, b): (f64, f64) = (rng.random(), rng.random());
        let (c, p) = binary_capacity(a, b).unwrap();
        let w = vec![vec![a, 1.0 - a], vec![b, 1.0 - b]];
        let (c_ba, _) = oracle_ba(&w);
        worst_value = worst_value.max((c - c_ba).abs());
        worst_lib = worst_lib.max((blahut_arimoto(&w, 1e-13).unwrap().capacity - c).abs());
        // at the optimum both inputs have relative entropy C to the output
        let q = [p * a + (1.0 - p) * b, p * (1.0 - a) + (1.0 - p) * (1.0 - b)];
        let d0 = divergence_bits(&w[0], &q);
        let d1 = divergence_bits(&w[1], &q);
        worst_fixed = worst_fixed.max((d0 - c).abs()).max((d1 - c).abs());
    }
    outcome(
        worst_value <= 1e-8 && worst_lib <= 1e-8 && worst_fixed <= 1e-6,
        format!(
            "100 pairs: closed form vs oracle BA {worst_value:.2e}, vs library BA {worst_lib:.2e} (tol 1e-8); fixed-point residual {worst_fixed:.2e} (tol 1e-6)"
        ),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0;
    let (mut above, mut below) = (0, 0);
    let mut min_margin = f64::INFINITY;
    for k in 0..100 {
        let d = rng.random_range(2..=3);
        let m = rng.random_range(2..=5);
        let povm: Povm<f64> = if k % 4 == 3 {
            diagonal_povm(&mut rng, d, m)
        } else {
            random_povm(&mut rng, d, m)
        };
        let options = CapacityOptions {
            restarts: 8,
            seed: k,
            ..CapacityOptions::default()
        };
        let r = capacity(&povm, &options).unwrap();
        let cap = (d as f64).log2();
        if !(r.lower_bound <= r.bits + 1e-9 && r.bits <= cap + 1e-9) {
            violations += 1;
        }
        min_margin = min_margin.min(r.bits - r.lower_bound);
        match r.holevo {
            Some(h) if h > r.bits + 1e-9 => above += 1,
            Some(h) if h < r.bits - 1e-9 => below += 1,
            _ => {}
        }
    }
    outcome(
        violations == 0 && above > 0 && below > 0,
        format!(
            "100 POVMs: {violations} sandwich violations (smallest C - lower bound {min_margin:.2e}); Holevo above C in {above}, below C in {below}"
        ),
    )
}

/// Rank-one POVM `E_k = w_k S^{-1/2} |v_k><v_k| S^{-1/2}` with
/// `S = Σ w_k |v_k><v_k|` for random unit vectors and weights.
fn rank_one_povm(rng: &mut ChaCha8Rng, d: usize, m: usize) -> Povm<f64> {
    loop {
        let vs: Vec<_> = (0..m).map(|_| pure_state::<f64, _>(rng, d)).collect();
        let ws: Vec<f64> = (0..m).map(|_| rng.random_range(0.2..1.0)).collect();
        let mut s = ComplexMatrix::zeros(d);
        for (v, &w) in vs.iter().zip(&ws) {
            s = &s + &ComplexMatrix::outer(v).scale(w);
        }
        let eig = HermitianOperator::new(s).unwrap().eig().unwrap();
        if eig.min().0 < 1e-3 {
            continue;
        }
        let inv_sqrt = ComplexMatrix::from_fn(d, |i, j| {
            eig.values
                .iter()
                .zip(&eig.vectors)
                .map(|(&l, v)| v[i] * v[j].conj() / l.sqrt())
                .sum()
        });
        let elements = vs
            .iter()
            .zip(&ws)
            .map(|(v, &w)| {
                let u = inv_sqrt.apply(v);
                HermitianOperator::new(ComplexMatrix::outer(&u).scale(w)).unwrap()
            })
            .collect();
        if let Ok(p) = Povm::new(elements) {
            return p;
        }
    }
}

/// `Tr(ρ E)` for each pair, as a message × outcome matrix.
fn born(states: &[HermitianOperator<f64>], povm: &Povm<f64>) -> Vec<Vec<f64>> {
    states
        .iter()
        .map(|r| povm.elements().iter().map(|e| r.trace_product(e)).collect())
        .collect()
}

/// Random row-stochastic decoding `q(k | j)`, sometimes deterministic.
fn random_decoder(rng: &mut ChaCha8Rng, outcomes: usize, labels: usize) -> Vec<Vec<f64>> {
    let deterministic = rng.random_bool(0.5);
    (0..outcomes)
        .map(|_| {
            if deterministic {
                let mut row = vec![0.0; labels];
                row[rng.random_range(0..labels)] = 1.0;
                row
            } else {
                let raw: Vec<f64> = (0..labels)
                    .map(|_| if rng.random_bool(0.6) { rng.random::<f64>() } else { 0.0 })
                    .collect();
                let s: f64 = raw.iter().sum();
                if s == 0.0 {
                    let mut row = vec![0.0; labels];
                    row[rng.random_range(0..labels)] = 1.0;
                    row
                } else {
                    raw.into_iter().map(|x| x / s).collect()
                }
            }
        })
        .collect()
}

fn criterion_7() -> Outcome {
    const INSTANCES: usize = 200;
    const STRATEGIES: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_bayes = f64::NEG_INFINITY;
    let mut worst_ua = f64::NEG_INFINITY;
    let mut zero_error_strategies = 0usize;
    for k in 0..INSTANCES {
        let d = rng.random_range(2..=3);
        let m = rng.random_range(2..=4);
        let n = rng.random_range(2..=3);
        let povm = if k % 2 == 0 {
            random_povm(&mut rng, d, m)
        } else {
            rank_one_povm(&mut rng, d, m.max(d + 1))
        };
        let m = povm.len();
        let priors = qdet_core::random::priors::<f64, _>(&mut rng, n);

        // Bayes: random cost, compare expected cost on the caller's scale
        let cost: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.random_range(0.0..3.0)).collect()).collect();
        let cost_matrix = CostMatrix::new(cost.clone()).unwrap();
        let best = solve_bayes(&povm, &priors, &cost_matrix).unwrap().original_cost;
        for _ in 0..STRATEGIES {
            let states: Vec<_> = (0..n)
                .map(|_| {
                    let rank = rng.random_range(1..=d);
                    density_operator::<f64, _>(&mut rng, d, rank)
                })
                .collect();
            let q = random_decoder(&mut rng, m, n);
            let p = born(&states, &povm);
            let mut expected = 0.0;
            for i in 0..n {
                for (j, qj) in q.iter().enumerate() {
                    for (kk, &w) in qj.iter().enumerate() {
                        expected += priors[i] * cost[i][kk] * w * p[i][j];
                    }
                }
            }
            worst_bayes = worst_bayes.max(best - expected);
        }

        // unambiguous: zero-error strategies only; labels 0..n are
        // conclusive, label n is inconclusive
        let ua_best = match solve_unambiguous(&povm, &priors) {
            Ok(s) => s.p_success,
            Err(Error::Infeasible) => 0.0,
            Err(e) => panic!("{e}"),
        };
        let mut kernels: HashMap<u32, Vec<Vec<Complex<f64>>>> = HashMap::new();
        for _ in 0..STRATEGIES {
            let q = random_decoder(&mut rng, m, n + 1);
            let mut states = Vec::with_capacity(n);
            for i in 0..n {
                // outcomes that can be read as another conclusive message
                let mask = (0..m)
                    .filter(|&j| (0..n).any(|kk| kk != i && q[j][kk] > 0.0))
                    .fold(0u32, |acc, j| acc | (1 << j));
                let basis = kernels.entry(mask).or_insert_with(|| {
                    let mut sum = HermitianOperator::zero(d);
                    for j in 0..m {
                        if mask & (1 << j) != 0 {
                            sum = &sum + povm.element(j);
                        }
                    }
                    sum.kernel_basis(sum.default_kernel_tol()).unwrap()
                });
                if basis.is_empty() {
                    break;
                }
                // random mixture of random vectors inside the kernel
                let rank = rng.random_range(1..=basis.len());
                let mut rho = HermitianOperator::zero(d);
                for _ in 0..rank {
                    let c = pure_state::<f64, _>(&mut rng, basis.len());
                    let v: Vec<Complex<f64>> = (0..d)
                        .map(|x| basis.iter().zip(&c).map(|(b, ci)| b[x] * ci).sum())
                        .collect();
                    rho = &rho + &HermitianOperator::projector(&v).scale(1.0 / rank as f64);
                }
                states.push(rho);
            }
            if states.len() < n {
                continue;
            }
            zero_error_strategies += 1;
            let p = born(&states, &povm);
            let success: f64 = (0..n)
                .map(|i| priors[i] * (0..m).map(|j| q[j][i] * p[i][j]).sum::<f64>())
                .sum();
            worst_ua = worst_ua.max(success - ua_best);
        }
    }
    outcome(
        worst_bayes <= 1e-9 && worst_ua <= 1e-9,
        format!(
            "{INSTANCES} instances x {STRATEGIES} strategies: max Bayes gap {worst_bayes:.2e}, max unambiguous gap {worst_ua:.2e} over {zero_error_strategies} zero-error strategies (tol 1e-9)"
        ),
    )
}

/// `h(t) = η((1+t)/2)` in bits and its derivative.
fn h(t: f64) -> f64 {
    -xlog2x((1.0 + t) / 2.0)
}

fn h_prime(t: f64) -> f64 {
    -0.5 * (((1.0 + t) / 2.0).log2() + 1.0 / std::f64::consts::LN_2)
}

fn criterion_8() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_gap = f64::INFINITY;
    let mut worst_anchor = 0.0f64;
    let mut max_gamma = f64::NEG_INFINITY;
    for k in 1..=100 {
        let eps = k as f64 / 100.0;
        let report = verify_capacity_inequality(eps, 10_000).unwrap();
        // the quadratic through the anchors, rebuilt here
        let (hm, h3, d3) = (h(-eps), h(eps / 3.0), eps * h_prime(eps / 3.0));
        let a = (hm + 15.0 * h3 - 4.0 * d3) / 16.0;
        let b = (-3.0 * hm + 3.0 * h3 + 4.0 * d3) / 8.0;
        let c = 3.0 * (3.0 * hm - 3.0 * h3 + 4.0 * d3) / 16.0;
        let wp = |t: f64| a + b * t + c * t * t;
        let gap = (0..10_000)
            .map(|i| {
                let t = -1.0 + 2.0 * i as f64 / 9_999.0;
                h(eps * t) - wp(t)
            })
            .fold(f64::INFINITY, f64::min);
        let at_third = (h(eps / 3.0) - wp(1.0 / 3.0)).abs();
        let slope_at_third = (eps * h_prime(eps / 3.0) - (b + 2.0 * c / 3.0)).abs();
        let at_minus_one = (h(-eps) - wp(-1.0)).abs();
        let gamma = c + eps * eps / (4.0 * std::f64::consts::LN_2);
        worst_gap = worst_gap.min(gap);
        worst_anchor = worst_anchor.max(at_third).max(slope_at_third).max(at_minus_one);
        max_gamma = max_gamma.max(gamma);
        if !report.passed || gap < -1e-12 || gamma > 1e-12 || (report.gamma - gamma).abs() > 1e-12 {
            failures.push(eps);
        }
    }
    outcome(
        failures.is_empty() && worst_anchor <= 1e-10,
        format!(
            "100 eps x 1e4 t: min gap {worst_gap:.2e}, anchor residual {worst_anchor:.2e}, max gamma {max_gamma:.2e}; failing eps {failures:?}"
        ),
    )
}

fn random_coarse_graining(rng: &mut ChaCha8Rng, m: usize) -> Grouping {
    loop {
        let labels = rng.random_range(2..m);
        let assignment: Vec<usize> = (0..m).map(|_| rng.random_range(0..labels)).collect();
        let used = (0..labels).filter(|l| assignment.contains(l)).count();
        if used >= 2 {
            return Grouping::new(assignment, labels).unwrap();
        }
    }
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..50u64 {
        let m = rng.random_range(3..=5);
        let povm: Povm<f64> = random_povm(&mut rng, 2, m);
        let grouping = random_coarse_graining(&mut rng, m);
        let coarse = group_povm(&povm, &grouping).unwrap();
        let fine = capacity_general(&povm, 8, k).unwrap().bits;
        let grouped = capacity_general(&coarse, 8, k).unwrap().bits;
        worst = worst.max(grouped - fine);
    }
    outcome(worst <= 1e-6, format!("50 qubit cases: max C(grouped) - C(original) = {worst:.2e} (slack 1e-6)"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 min-error SIC values", criterion_1),
        ("2 region triple point", criterion_2),
        ("3 unambiguous SIC", criterion_3),
        ("4 capacity closed forms", criterion_4),
        ("5 binary capacity consistency", criterion_5),
        ("6 bounds sandwich", criterion_6),
        ("7 oracle dominance", criterion_7),
        ("8 capacity inequality", criterion_8),
        ("9 data processing", criterion_9),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let r = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !r.passed {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {} [{:.1}s]",
            if r.passed { "PASS" } else { "FAIL" },
            r.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of 9 passed in {:.1}s", 9 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
