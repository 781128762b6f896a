//! The qubit SIC-POVM with white noise, `E_i(ε) = (I + ε n_i·σ)/4`, and its
//! closed-form results for all three readout tasks.

use num_complex::Complex;

use crate::capacity::{GroupAction, GroupElement};
use crate::error::{Error, Result};
use crate::operator::{bloch_operator, pauli, BlochVector, ComplexMatrix};
use crate::povm::Povm;
use crate::scalar::Real;

/// The tetrahedron `n_1..n_4`, pairwise `n_i·n_j = −1/3`.
pub fn sic_directions<T: Real>() -> [BlochVector<T>; 4] {
    let s = T::one() / T::lit(3.0).sqrt();
    let (p, m) = (s, -s);
    [
        BlochVector::new(p, p, p),
        BlochVector::new(m, m, p),
        BlochVector::new(m, p, m),
        BlochVector::new(p, m, m),
    ]
}

#[derive(Clone, Debug)]
pub struct NoisySicQubit<T> {
    pub epsilon: T,
    pub povm: Povm<T>,
    pub bloch_vectors: [BlochVector<T>; 4],
}

pub fn sic_qubit<T: Real>(epsilon: T) -> Result<NoisySicQubit<T>> {
    if !(epsilon >= T::zero() && epsilon <= T::one()) {
        return Err(Error::OutOfRange(format!("epsilon = {epsilon} not in [0, 1]")));
    }
    let dirs = sic_directions::<T>();
    let quarter = T::lit(0.25);
    let elements = dirs.iter().map(|n| bloch_operator(quarter, &n.scale(epsilon))).collect();
    Ok(NoisySicQubit {
        epsilon,
        povm: Povm::new(elements)?,
        bloch_vectors: dirs,
    })
}

/// `cos(θ/2) I − i sin(θ/2) n·σ`
fn rotation<T: Real>(axis: &BlochVector<T>, angle: T) -> ComplexMatrix<T> {
    let n = axis.scale(T::one() / axis.norm());
    let [sx, sy, sz] = pauli::<T>();
    let gen = &(&sx.scale(n.x) + &sy.scale(n.y)) + &sz.scale(n.z);
    let half = angle / T::lit(2.0);
    let c = ComplexMatrix::identity(2).scale(half.cos());
    &c + &gen.scale_complex(Complex::new(T::zero(), -half.sin()))
}

/// The twelve rotations of the tetrahedron as a group action on the SIC
/// outcomes, closed from a 3-fold rotation about `n_1` and a 2-fold rotation
/// about `z`. Outcome permutations are read off numerically.
pub fn tetrahedral_group<T: Real>() -> GroupAction<T> {
    let dirs = sic_directions::<T>();
    let third = T::lit(2.0) * T::PI() / T::lit(3.0);
    let generators = [
        rotation(&dirs[0], third),
        rotation(&BlochVector::new(T::zero(), T::zero(), T::one()), T::PI()),
    ];
    let same_up_to_phase = |a: &ComplexMatrix<T>, b: &ComplexMatrix<T>| {
        let overlap = (&a.adjoint() * b).trace().norm();
        (overlap - T::lit(2.0)).abs() < T::tol(1e-9)
    };
    let mut unitaries = vec![ComplexMatrix::identity(2)];
    let mut frontier = 0;
    while frontier < unitaries.len() {
        let u = unitaries[frontier].clone();
        for g in &generators {
            let next = g * &u;
            if !unitaries.iter().any(|v| same_up_to_phase(v, &next)) {
                unitaries.push(next);
            }
        }
        frontier += 1;
    }
    let ideal = sic_qubit(T::one()).expect("valid epsilon").povm;
    let elements = unitaries
        .into_iter()
        .map(|u| {
            let permutation = ideal
                .elements()
                .iter()
                .map(|e| {
                    let image = e.conjugate_by(&u);
                    ideal
                        .elements()
                        .iter()
                        .position(|f| f.max_abs_diff(&image) < T::tol(1e-9))
                        .expect("rotation permutes the tetrahedron")
                })
                .collect();
            GroupElement {
                unitary: u,
                conjugate: false,
                permutation,
            }
        })
        .collect();
    GroupAction::new(elements, 0).expect("tetrahedral group is closed")
}

/// Minimum-error success probability at uniform priors.
pub fn analytic_min_error<T: Real>(n: usize, epsilon: T) -> Result<T> {
    let r3 = T::lit(3.0).sqrt();
    let nn = T::from_usize(n).expect("count");
    match n {
        0 | 1 => Err(Error::OutOfRange(format!("need at least two messages, got {n}"))),
        2 => Ok(T::lit(0.5) + epsilon / (T::lit(2.0) * r3)),
        3 => Ok(T::one() / T::lit(3.0) + epsilon * (T::one() + T::one() / r3) / T::lit(6.0)),
        _ => Ok((T::one() + epsilon) / nn),
    }
}

/// Gains of the three-message groupings `B = {12}{3}{4}`, `C = {12}{34}{}`
/// and `D = {123}{4}{}` (the most likely message first) for the noisy SIC.
pub fn analytic_region_values_noisy<T: Real>(priors: [T; 3], epsilon: T) -> (T, T, T) {
    let [p1, p2, p3] = priors;
    let r3 = T::lit(3.0).sqrt();
    let pair = T::lit(0.5) + epsilon / (T::lit(2.0) * r3);
    let single = (T::one() + epsilon) / T::lit(4.0);
    let triple = (T::lit(3.0) + epsilon) / T::lit(4.0);
    (
        pair * p1 + single * (p2 + p3),
        pair * (p1 + p2),
        triple * p1 + single * p2,
    )
}

/// [`analytic_region_values_noisy`] at `ε = 1`.
pub fn analytic_region_values<T: Real>(priors: [T; 3]) -> (T, T, T) {
    analytic_region_values_noisy(priors, T::one())
}

/// `(π₁, π₂)` where the `B`, `C` and `D` gains coincide.
pub fn triple_point<T: Real>(epsilon: T) -> (T, T) {
    let r3 = T::lit(3.0).sqrt();
    let a = T::lit(0.5) + epsilon / (T::lit(2.0) * r3);
    let b = (T::one() + epsilon) / T::lit(4.0);
    let c = (T::lit(3.0) + epsilon) / T::lit(4.0);
    // with π₃ = 1 − π₁ − π₂:  B − C = b − b π₁ − a π₂,  C − D = (a − c) π₁ + (a − b) π₂
    // rows: [coefficient of π₁, coefficient of π₂, constant]
    let r1 = [-b, -a, b];
    let r2 = [a - c, a - b, T::zero()];
    let det = r1[0] * r2[1] - r1[1] * r2[0];
    let p1 = (-r1[2] * r2[1] + r1[1] * r2[2]) / det;
    let p2 = (-r1[0] * r2[2] + r1[2] * r2[0]) / det;
    (p1, p2)
}

/// Capacity of the noisy SIC:
/// `1 + ((1−ε)/4) log₂((1−ε)/2) + 3((1+ε/3)/4) log₂((1+ε/3)/2)`.
pub fn analytic_capacity<T: Real>(epsilon: T) -> Result<T> {
    if !(epsilon >= T::zero() && epsilon <= T::one()) {
        return Err(Error::OutOfRange(format!("epsilon = {epsilon} not in [0, 1]")));
    }
    let lo = (T::one() - epsilon) / T::lit(2.0);
    let hi = (T::one() + epsilon / T::lit(3.0)) / T::lit(2.0);
    // x log2 x = −η(x)
    Ok(T::one() - (lo.eta() + T::lit(3.0) * hi.eta()) / T::lit(2.0))
}

/// `h(t) = η((1 + t)/2)` in bits.
pub fn h<T: Real>(t: T) -> T {
    ((T::one() + t) / T::lit(2.0)).eta()
}

/// `h'(t) = −(log₂((1 + t)/2) + 1/ln 2)/2`
pub fn h_prime<T: Real>(t: T) -> T {
    -(((T::one() + t) / T::lit(2.0)).log2() + T::one() / T::LN_2()) / T::lit(2.0)
}

/// Coefficients `(a, b, c)` of the quadratic minorant `℘_ε(t)`.
pub fn minorant_coefficients<T: Real>(epsilon: T) -> (T, T, T) {
    let hm = h(-epsilon);
    let h3 = h(epsilon / T::lit(3.0));
    let d3 = epsilon * h_prime(epsilon / T::lit(3.0));
    let (three, four) = (T::lit(3.0), T::lit(4.0));
    let a = (hm + T::lit(15.0) * h3 - four * d3) / T::lit(16.0);
    let b = (-three * hm + three * h3 + four * d3) / T::lit(8.0);
    let c = three * (three * hm - three * h3 + four * d3) / T::lit(16.0);
    (a, b, c)
}

/// Outcome of checking `h(εt) ≥ ℘_ε(t)` on a grid.
#[derive(Clone, Debug)]
pub struct InequalityReport<T> {
    pub epsilon: T,
    pub grid_points: usize,
    /// Smallest `h(εt) − ℘_ε(t)` on the grid and where it occurs.
    pub min_gap: T,
    pub worst_t: T,
    /// Largest deviation among the three anchor identities.
    pub anchor_error: T,
    pub gamma: T,
    pub passed: bool,
}

/// Checks the quadratic minorant on `grid_points` equally spaced
/// `t ∈ [−1, 1]`, its anchors `℘(−1) = h(−ε)`, `℘(1/3) = h(ε/3)`,
/// `℘'(1/3) = ε h'(ε/3)`, and `γ(ε) = c(ε) + ε²/(4 ln 2) ≤ 0`.
pub fn verify_capacity_inequality<T: Real>(epsilon: T, grid_points: usize) -> Result<InequalityReport<T>> {
    if !(epsilon > T::zero() && epsilon <= T::one()) {
        return Err(Error::OutOfRange(format!("epsilon = {epsilon} not in (0, 1]")));
    }
    if grid_points < 2 {
        return Err(Error::OutOfRange("need at least two grid points".into()));
    }
    let (a, b, c) = minorant_coefficients(epsilon);
    let wp = |t: T| a + b * t + c * t * t;
    let mut min_gap = T::infinity();
    let mut worst_t = T::zero();
    let last = T::from_usize(grid_points - 1).expect("count");
    for k in 0..grid_points {
        let t = -T::one() + T::lit(2.0) * T::from_usize(k).expect("index") / last;
        let gap = h(epsilon * t) - wp(t);
        if gap < min_gap {
            min_gap = gap;
            worst_t = t;
        }
    }
    let third = T::one() / T::lit(3.0);
    let anchors = [
        wp(-T::one()) - h(-epsilon),
        wp(third) - h(epsilon * third),
        (b + T::lit(2.0) * c * third) - epsilon * h_prime(epsilon * third),
    ];
    let anchor_error = anchors.iter().map(|x| x.abs()).fold(T::zero(), T::max);
    let gamma = c + epsilon * epsilon / (T::lit(4.0) * T::LN_2());
    let passed = min_gap >= -T::tol(1e-12) && anchor_error <= T::tol(1e-10) && gamma <= T::tol(1e-12);
    Ok(InequalityReport {
        epsilon,
        grid_points,
        min_gap,
        worst_t,
        anchor_error,
        gamma,
        passed,
    })
}

/// Letter of a three-message SIC grouping class from its group sizes.
pub fn class_letter(signature: &str) -> Option<char> {
    match signature {
        "1+1+1+1" => Some('A'),
        "2+1+1" => Some('B'),
        "2+2" => Some('C'),
        "3+1" => Some('D'),
        "4" => Some('T'),
        _ => None,
    }
}
