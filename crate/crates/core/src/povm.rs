//! Detector, ensemble and grouping data model plus Born-rule statistics.

use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::operator::HermitianOperator;
use crate::scalar::Real;

/// Eigenvalues of POVM elements may dip this far below zero.
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Max-entry deviation of `Σ E_j` from the identity.
pub const COMPLETENESS_TOL: f64 = 1e-8;
/// Born probabilities in `[-CLAMP_TOL, 0)` are clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;
/// Default bound on the number of enumerated groupings.
pub const ENUMERATION_CAP: u64 = 10_000_000;

/// A validated POVM `{E_1, …, E_M}` on `C^d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm<T> {
    dim: usize,
    elements: Vec<HermitianOperator<T>>,
}

impl<T: Real> Povm<T> {
    /// Checks positivity of each element and completeness `Σ E_j = I`.
    ///
    /// Element indices in errors are 1-based.
    pub fn new(elements: Vec<HermitianOperator<T>>) -> Result<Self> {
        let dim = elements.first().ok_or(Error::Empty("POVM"))?.dim();
        for e in &elements {
            if e.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: e.dim(),
                });
            }
        }
        for (j, e) in elements.iter().enumerate() {
            let (min, _) = e.lambda_min()?;
            if min < -T::tol(POSITIVITY_TOL) {
                return Err(Error::NotPositive {
                    element: j + 1,
                    min_eigenvalue: min.to_f64_lossy(),
                });
            }
        }
        let total = HermitianOperator::sum_of(dim, &elements);
        let residual = total.max_abs_diff(&HermitianOperator::identity(dim));
        if residual > T::tol(COMPLETENESS_TOL) {
            return Err(Error::NotComplete {
                residual: residual.to_f64_lossy(),
            });
        }
        Ok(Self { dim, elements })
    }

    pub(crate) fn new_unchecked(dim: usize, elements: Vec<HermitianOperator<T>>) -> Self {
        Self { dim, elements }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of outcomes `M`.
    #[inline]
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HermitianOperator<T>] {
        &self.elements
    }

    pub fn element(&self, j: usize) -> &HermitianOperator<T> {
        &self.elements[j]
    }

    /// Largest `‖[E_i, E_j]‖_max` together with the offending pair.
    pub fn max_commutator(&self) -> (usize, usize, T) {
        let mut worst = (0, 0, T::zero());
        for i in 0..self.len() {
            for j in (i + 1)..self.len() {
                let a = self.elements[i].matrix();
                let b = self.elements[j].matrix();
                let c = &(a * b) - &(b * a);
                let n = c.max_abs();
                if n > worst.2 {
                    worst = (i, j, n);
                }
            }
        }
        worst
    }
}

pub fn validate_povm<T: Real>(elements: Vec<HermitianOperator<T>>) -> Result<Povm<T>> {
    Povm::new(elements)
}

/// Checks a prior vector: strictly positive entries summing to one within
/// `1e-9`; the result is renormalized.
pub fn normalize_priors<T: Real>(priors: &[T]) -> Result<Vec<T>> {
    if priors.is_empty() {
        return Err(Error::Empty("prior vector"));
    }
    if let Some(p) = priors.iter().find(|p| !(**p > T::zero()) || !p.is_finite()) {
        return Err(Error::InvalidPriors(format!(
            "entries must be strictly positive, got {p}"
        )));
    }
    let total: T = priors.iter().copied().sum();
    if (total - T::one()).abs() > T::tol(1e-9) {
        return Err(Error::InvalidPriors(format!("entries sum to {total}, not 1")));
    }
    Ok(priors.iter().map(|&p| p / total).collect())
}

/// Weighted signal states `{π_i, ρ_i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble<T> {
    states: Vec<HermitianOperator<T>>,
    priors: Vec<T>,
}

impl<T: Real> Ensemble<T> {
    pub fn new(states: Vec<HermitianOperator<T>>, priors: Vec<T>) -> Result<Self> {
        if states.len() != priors.len() {
            return Err(Error::DimMismatch {
                expected: states.len(),
                found: priors.len(),
            });
        }
        let priors = normalize_priors(&priors)?;
        let dim = states[0].dim();
        for (i, rho) in states.iter().enumerate() {
            if rho.dim() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: rho.dim(),
                });
            }
            if (rho.trace() - T::one()).abs() > T::tol(1e-10) {
                return Err(Error::InvalidState {
                    index: i + 1,
                    reason: format!("trace {} is not 1", rho.trace()),
                });
            }
            if !rho.is_psd(T::tol(POSITIVITY_TOL))? {
                return Err(Error::InvalidState {
                    index: i + 1,
                    reason: "not positive semidefinite".into(),
                });
            }
        }
        Ok(Self { states, priors })
    }

    /// Ensemble of pure states `|ψ_i><ψ_i|` (vectors are normalized here).
    pub fn pure(vectors: &[Vec<Complex<T>>], priors: Vec<T>) -> Result<Self> {
        let states = vectors
            .iter()
            .map(|v| HermitianOperator::projector(v))
            .collect();
        Self::new(states, priors)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn states(&self) -> &[HermitianOperator<T>] {
        &self.states
    }

    pub fn priors(&self) -> &[T] {
        &self.priors
    }

    /// `Σ π_i ρ_i`
    pub fn average(&self) -> HermitianOperator<T> {
        self.states
            .iter()
            .zip(&self.priors)
            .fold(HermitianOperator::zero(self.dim()), |acc, (rho, &p)| {
                &acc + &rho.scale(p)
            })
    }
}

/// Assignment of each of the `M` outcomes to one of `labels` groups.
///
/// Label values are 0-based; for unambiguous discrimination the last label
/// (`labels - 1`) denotes the inconclusive group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Grouping {
    assignment: Vec<usize>,
    labels: usize,
}

impl Grouping {
    pub fn new(assignment: Vec<usize>, labels: usize) -> Result<Self> {
        if let Some(&label) = assignment.iter().find(|&&l| l >= labels) {
            return Err(Error::LabelOutOfRange { label, labels });
        }
        Ok(Self { assignment, labels })
    }

    /// Outcome `k` goes to label `k`.
    pub fn identity(outcomes: usize) -> Self {
        Self {
            assignment: (0..outcomes).collect(),
            labels: outcomes,
        }
    }

    /// Every outcome goes to label 0.
    pub fn trivial(outcomes: usize, labels: usize) -> Self {
        Self {
            assignment: vec![0; outcomes],
            labels,
        }
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    pub fn outcomes(&self) -> usize {
        self.assignment.len()
    }

    pub fn label_of(&self, outcome: usize) -> usize {
        self.assignment[outcome]
    }

    /// Outcome indices per label (empty groups included).
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut g = vec![Vec::new(); self.labels];
        for (k, &l) in self.assignment.iter().enumerate() {
            g[l].push(k);
        }
        g
    }

    /// Applies a label permutation: new label of old label `l` is `perm[l]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        Self {
            assignment: self.assignment.iter().map(|&l| perm[l]).collect(),
            labels: self.labels,
        }
    }
}

impl fmt::Display for Grouping {
    /// 1-based outcome lists per label, e.g. `{1,2} {3} {4} {}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let groups = self.groups();
        for (i, g) in groups.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            let items: Vec<String> = g.iter().map(|k| (k + 1).to_string()).collect();
            write!(f, "{{{}}}", items.join(","))?;
        }
        Ok(())
    }
}

/// Joint distribution `P_ij` of message `i` and outcome `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct JointDistribution<T> {
    rows: usize,
    cols: usize,
    p: Vec<T>,
}

impl<T: Real> JointDistribution<T> {
    /// Clamps entries in `[-1e-12, 0)` to zero and requires total mass one.
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Empty("joint distribution"));
        }
        let m = rows[0].len();
        let mut p = Vec::with_capacity(n * m);
        for row in rows {
            if row.len() != m {
                return Err(Error::DimMismatch {
                    expected: m,
                    found: row.len(),
                });
            }
            for x in row {
                p.push(clamp_probability(x)?);
            }
        }
        let total: T = p.iter().copied().sum();
        if (total - T::one()).abs() > T::tol(1e-10) {
            return Err(Error::OutOfRange(format!(
                "joint distribution has total mass {total}"
            )));
        }
        Ok(Self { rows: n, cols: m, p })
    }

    /// `P_ij = π_i p(j|i)`
    pub fn from_channel(priors: &[T], channel: &[Vec<T>]) -> Result<Self> {
        let rows = priors
            .iter()
            .zip(channel)
            .map(|(&pi, row)| row.iter().map(|&c| pi * c).collect())
            .collect();
        Self::new(rows)
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, p: Vec<T>) -> Self {
        Self { rows, cols, p }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.p[i * self.cols + j]
    }

    pub fn row_sums(&self) -> Vec<T> {
        self.p.chunks(self.cols).map(|r| r.iter().copied().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<T> {
        let mut c = vec![T::zero(); self.cols];
        for row in self.p.chunks(self.cols) {
            for (acc, &x) in c.iter_mut().zip(row) {
                *acc = *acc + x;
            }
        }
        c
    }

    pub fn entries(&self) -> &[T] {
        &self.p
    }
}

fn clamp_probability<T: Real>(x: T) -> Result<T> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    if x >= T::zero() {
        Ok(x)
    } else if x >= -T::tol(CLAMP_TOL) {
        Ok(T::zero())
    } else {
        Err(Error::OutOfRange(format!("negative probability {x}")))
    }
}

/// `P_ij = π_i Tr(ρ_i E_j)`
pub fn born_matrix<T: Real>(ensemble: &Ensemble<T>, povm: &Povm<T>) -> Result<JointDistribution<T>> {
    if ensemble.dim() != povm.dim() {
        return Err(Error::DimMismatch {
            expected: povm.dim(),
            found: ensemble.dim(),
        });
    }
    let mut p = Vec::with_capacity(ensemble.len() * povm.len());
    for (rho, &pi) in ensemble.states().iter().zip(ensemble.priors()) {
        for e in povm.elements() {
            p.push(clamp_probability(pi * rho.trace_product(e))?);
        }
    }
    Ok(JointDistribution::from_raw(ensemble.len(), povm.len(), p))
}

/// Coarse-grained POVM `Ẽ_l = Σ_{k: label(k) = l} E_k`, one element per label.
pub fn group_povm<T: Real>(povm: &Povm<T>, grouping: &Grouping) -> Result<Povm<T>> {
    if grouping.outcomes() != povm.len() {
        return Err(Error::DimMismatch {
            expected: povm.len(),
            found: grouping.outcomes(),
        });
    }
    let mut out = vec![HermitianOperator::zero(povm.dim()); grouping.labels()];
    for (k, &l) in grouping.assignment().iter().enumerate() {
        out[l] = &out[l] + povm.element(k);
    }
    Ok(Povm::new_unchecked(povm.dim(), out))
}

/// Lexicographic enumeration of all `labels^outcomes` assignments.
#[derive(Clone, Debug)]
pub struct GroupingEnumeration {
    outcomes: usize,
    labels: usize,
    next: u64,
    end: u64,
}

/// Number of assignments, or `CapExceeded` when above `cap`.
pub fn grouping_count(outcomes: usize, labels: usize, cap: u64) -> Result<u64> {
    let exceeded = || Error::CapExceeded {
        base: labels,
        exponent: outcomes,
        count: (labels as f64).powi(outcomes as i32),
        cap,
    };
    let exp = u32::try_from(outcomes).map_err(|_| exceeded())?;
    match (labels as u64).checked_pow(exp) {
        Some(n) if n <= cap => Ok(n),
        _ => Err(exceeded()),
    }
}

pub fn enumerate_groupings(outcomes: usize, labels: usize) -> Result<GroupingEnumeration> {
    enumerate_groupings_capped(outcomes, labels, ENUMERATION_CAP)
}

pub fn enumerate_groupings_capped(
    outcomes: usize,
    labels: usize,
    cap: u64,
) -> Result<GroupingEnumeration> {
    if labels == 0 {
        return Err(Error::OutOfRange("at least one label is required".into()));
    }
    let end = grouping_count(outcomes, labels, cap)?;
    Ok(GroupingEnumeration {
        outcomes,
        labels,
        next: 0,
        end,
    })
}

impl GroupingEnumeration {
    pub fn total(&self) -> u64 {
        self.end
    }

    /// The `index`-th assignment in lexicographic order (last outcome fastest).
    pub fn at(&self, index: u64) -> Grouping {
        grouping_at(self.outcomes, self.labels, index)
    }

    /// Restricts the iterator to `[start, end)`.
    pub fn range(mut self, start: u64, end: u64) -> Self {
        self.next = start.min(self.end);
        self.end = end.min(self.end);
        self
    }
}

pub(crate) fn grouping_at(outcomes: usize, labels: usize, mut index: u64) -> Grouping {
    let mut assignment = vec![0; outcomes];
    for slot in assignment.iter_mut().rev() {
        *slot = (index % labels as u64) as usize;
        index /= labels as u64;
    }
    Grouping { assignment, labels }
}

impl Iterator for GroupingEnumeration {
    type Item = Grouping;

    fn next(&mut self) -> Option<Grouping> {
        if self.next >= self.end {
            return None;
        }
        let g = self.at(self.next);
        self.next += 1;
        Some(g)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for GroupingEnumeration {}
