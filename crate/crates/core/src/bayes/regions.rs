//! Optimal-grouping regions over the three-message prior simplex.
//!
//! Since `B(P) = max_α π·s_α`, each grouping wins on a convex polytope of
//! priors. The map evaluates every grid point of step `1/n`, merges
//! groupings that are relabelings of each other into classes, and locates the
//! points where three or more classes meet.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;

use super::{effective_elements, CostMatrix, TIE_TOL};
use crate::error::{Error, Result};
use crate::povm::{enumerate_groupings_capped, Grouping, Povm, ENUMERATION_CAP};
use crate::scalar::Real;

pub const REGION_CELL_CAP: u64 = 1_000_000;

/// Classes are identified when scores and element spectra agree to this.
const CLASS_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct RegionCell<T> {
    pub priors: [T; 3],
    /// Index of the winning grouping in enumeration order.
    pub grouping_index: usize,
    pub class_id: usize,
    pub gain: T,
}

#[derive(Clone, Debug)]
pub struct RegionClass<T> {
    pub id: usize,
    /// Sizes of the nonempty groups, e.g. `2+1+1`.
    pub signature: String,
    pub representative: Grouping,
    /// Scores sorted in descending order.
    pub sorted_scores: Vec<T>,
}

#[derive(Clone, Debug)]
pub struct Junction<T> {
    /// Centroid of the flagged grid points.
    pub grid_estimate: [T; 3],
    /// Exact intersection of the three winning planes when it could be
    /// solved for, otherwise the grid estimate.
    pub priors: [T; 3],
    pub refined: bool,
    pub classes: Vec<usize>,
    pub gain: T,
}

#[derive(Clone, Debug)]
pub struct RegionMap<T> {
    pub steps: usize,
    pub ordered: bool,
    pub cells: Vec<RegionCell<T>>,
    pub classes: Vec<RegionClass<T>>,
    pub junctions: Vec<Junction<T>>,
    groupings: Vec<Grouping>,
    scores: Vec<[T; 3]>,
    class_of: Vec<usize>,
}

/// Builds the region map of a three-message problem on a grid of step at
/// most `resolution`, optionally restricted to `π₁ ≥ π₂ ≥ π₃`.
pub fn map_regions<T: Real>(
    povm: &Povm<T>,
    cost: &CostMatrix<T>,
    resolution: T,
    ordered: bool,
) -> Result<RegionMap<T>> {
    if cost.messages() != 3 {
        return Err(Error::DimMismatch {
            expected: 3,
            found: cost.messages(),
        });
    }
    if !(resolution > T::zero() && resolution <= T::one()) {
        return Err(Error::OutOfRange(format!(
            "resolution {resolution} must lie in (0, 1]"
        )));
    }
    let inv = (T::one() / resolution - T::tol(1e-9)).ceil();
    let cells_f = (inv + T::one()) * (inv + T::lit(2.0)) / T::lit(2.0);
    if cells_f.to_f64_lossy() > REGION_CELL_CAP as f64 {
        return Err(Error::GridTooFine {
            cells: cells_f.to_f64_lossy().min(u64::MAX as f64) as u64,
            cap: REGION_CELL_CAP,
        });
    }
    let n = inv.to_usize().unwrap_or(1).max(1);

    let groupings: Vec<Grouping> =
        enumerate_groupings_capped(povm.len(), cost.hypotheses(), ENUMERATION_CAP)?.collect();
    let mut scores = Vec::with_capacity(groupings.len());
    let mut keys = Vec::with_capacity(groupings.len());
    for g in &groupings {
        let effective = effective_elements(povm, g);
        let ops = cost.gain_operators(&effective);
        let mut s = [T::zero(); 3];
        for (slot, op) in s.iter_mut().zip(&ops) {
            *slot = op.lambda_max()?.0;
        }
        let mut spectra = effective
            .iter()
            .map(|e| e.eig().map(|d| d.values))
            .collect::<Result<Vec<_>>>()?;
        spectra.sort_by(|a, b| lex_cmp(b, a));
        let mut sorted = s.to_vec();
        sorted.sort_by(|a, b| b.partial_cmp(a).expect("finite scores"));
        scores.push(s);
        keys.push((sorted, spectra));
    }

    let mut classes: Vec<RegionClass<T>> = Vec::new();
    let mut class_keys: Vec<&(Vec<T>, Vec<Vec<T>>)> = Vec::new();
    let mut class_of = Vec::with_capacity(groupings.len());
    let tol = T::tol(CLASS_TOL);
    for (g, key) in groupings.iter().zip(&keys) {
        let found = class_keys.iter().position(|k| key_eq(k, key, tol));
        let id = found.unwrap_or_else(|| {
            classes.push(RegionClass {
                id: classes.len(),
                signature: signature(g),
                representative: g.clone(),
                sorted_scores: key.0.clone(),
            });
            class_keys.push(key);
            classes.len() - 1
        });
        class_of.push(id);
    }

    let mut map = RegionMap {
        steps: n,
        ordered,
        cells: Vec::new(),
        classes,
        junctions: Vec::new(),
        groupings,
        scores,
        class_of,
    };
    map.fill_cells();
    map.find_junctions();
    Ok(map)
}

fn lex_cmp<T: Real>(a: &[T], b: &[T]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y) {
            Some(std::cmp::Ordering::Equal) | None => continue,
            Some(o) => return o,
        }
    }
    a.len().cmp(&b.len())
}

fn key_eq<T: Real>(a: &(Vec<T>, Vec<Vec<T>>), b: &(Vec<T>, Vec<Vec<T>>), tol: T) -> bool {
    let close = |x: &[T], y: &[T]| x.len() == y.len() && x.iter().zip(y).all(|(p, q)| (*p - *q).abs() <= tol);
    close(&a.0, &b.0) && a.1.len() == b.1.len() && a.1.iter().zip(&b.1).all(|(x, y)| close(x, y))
}

fn signature(g: &Grouping) -> String {
    let mut sizes: Vec<usize> = g.groups().iter().map(Vec::len).filter(|&s| s > 0).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    if sizes.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (k, s) in sizes.iter().enumerate() {
        if k > 0 {
            out.push('+');
        }
        let _ = write!(out, "{s}");
    }
    out
}

fn dot<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl<T: Real> RegionMap<T> {
    fn included(&self, i: usize, j: usize) -> bool {
        let n = self.steps;
        if i + j > n {
            return false;
        }
        !self.ordered || (i >= j && j >= n - i - j)
    }

    fn point(&self, i: usize, j: usize) -> [T; 3] {
        let n = T::from_usize(self.steps).expect("grid size");
        let a = T::from_usize(i).expect("grid index") / n;
        let b = T::from_usize(j).expect("grid index") / n;
        let c = T::from_usize(self.steps - i - j).expect("grid index") / n;
        [a, b, c]
    }

    /// Best grouping at `pi`, first in enumeration order among ties.
    fn winner(&self, pi: &[T; 3]) -> (usize, T) {
        let values: Vec<T> = self.scores.iter().map(|s| dot(pi, s)).collect();
        let max = values.iter().copied().fold(T::neg_infinity(), T::max);
        let idx = values
            .iter()
            .position(|&v| v >= max - T::tol(TIE_TOL))
            .expect("nonempty enumeration");
        (idx, values[idx])
    }

    fn fill_cells(&mut self) {
        let n = self.steps;
        let points: Vec<(usize, usize)> = (0..=n)
            .flat_map(|i| (0..=n - i).map(move |j| (i, j)))
            .filter(|&(i, j)| self.included(i, j))
            .collect();
        let cells: Vec<RegionCell<T>> = points
            .par_iter()
            .map(|&(i, j)| {
                let priors = self.point(i, j);
                let (g, gain) = self.winner(&priors);
                RegionCell {
                    priors,
                    grouping_index: g,
                    class_id: self.class_of[g],
                    gain,
                }
            })
            .collect();
        self.cells = cells;
    }

    fn cell_grid(&self) -> Vec<Option<usize>> {
        let n = self.steps;
        let mut grid = vec![None; (n + 1) * (n + 1)];
        for (idx, c) in self.cells.iter().enumerate() {
            let (i, j) = self.indices(&c.priors);
            grid[i * (n + 1) + j] = Some(idx);
        }
        grid
    }

    fn indices(&self, p: &[T; 3]) -> (usize, usize) {
        let n = T::from_usize(self.steps).expect("grid size");
        let i = (p[0] * n).round().to_usize().expect("grid index");
        let j = (p[1] * n).round().to_usize().expect("grid index");
        (i, j)
    }

    fn neighbours(&self, i: usize, j: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        const OFFSETS: [(isize, isize); 7] = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)];
        OFFSETS.iter().filter_map(move |&(di, dj)| {
            let a = i.checked_add_signed(di)?;
            let b = j.checked_add_signed(dj)?;
            self.included(a, b).then_some((a, b))
        })
    }

    fn find_junctions(&mut self) {
        let n = self.steps;
        let grid = self.cell_grid();
        let at = |i: usize, j: usize| grid[i * (n + 1) + j].expect("included cell");

        // grid points whose closed neighbourhood sees three or more classes
        let mut flagged: Vec<(usize, usize, BTreeSet<usize>)> = Vec::new();
        for c in &self.cells {
            let (i, j) = self.indices(&c.priors);
            let seen: BTreeSet<usize> = self
                .neighbours(i, j)
                .map(|(a, b)| self.cells[at(a, b)].class_id)
                .collect();
            if seen.len() >= 3 {
                flagged.push((i, j, seen));
            }
        }

        // connected components of flagged points
        let mut parent: Vec<usize> = (0..flagged.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        let mut slot = vec![usize::MAX; (n + 1) * (n + 1)];
        for (k, (i, j, _)) in flagged.iter().enumerate() {
            slot[i * (n + 1) + j] = k;
        }
        for (k, (i, j, _)) in flagged.iter().enumerate() {
            for (a, b) in self.neighbours(*i, *j) {
                let other = slot[a * (n + 1) + b];
                if other != usize::MAX {
                    let (ra, rb) = (find(&mut parent, k), find(&mut parent, other));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
            }
        }

        let mut clusters: Vec<(usize, Vec<usize>)> = Vec::new();
        for k in 0..flagged.len() {
            let r = find(&mut parent, k);
            match clusters.iter_mut().find(|(root, _)| *root == r) {
                Some((_, members)) => members.push(k),
                None => clusters.push((r, vec![k])),
            }
        }

        let junctions = clusters
            .into_iter()
            .map(|(_, members)| {
                let mut centroid = [T::zero(); 3];
                let mut classes = BTreeSet::new();
                for &k in &members {
                    let (i, j, seen) = &flagged[k];
                    let p = self.point(*i, *j);
                    for (c, x) in centroid.iter_mut().zip(p) {
                        *c = *c + x;
                    }
                    classes.extend(seen.iter().copied());
                }
                let m = T::from_usize(members.len()).expect("cluster size");
                let estimate = centroid.map(|c| c / m);
                let classes: Vec<usize> = classes.into_iter().collect();
                let refined = if classes.len() == 3 {
                    self.intersection([classes[0], classes[1], classes[2]], &estimate)
                } else {
                    None
                };
                let priors = refined.unwrap_or(estimate);
                Junction {
                    grid_estimate: estimate,
                    priors,
                    refined: refined.is_some(),
                    classes,
                    gain: self.winner(&priors).1,
                }
            })
            .collect();
        self.junctions = junctions;
    }

    /// Best score vector of `class` near `pi`.
    fn class_scores(&self, class: usize, pi: &[T; 3]) -> Option<[T; 3]> {
        self.scores
            .iter()
            .zip(&self.class_of)
            .filter(|(_, &c)| c == class)
            .map(|(s, _)| *s)
            .reduce(|a, b| if dot(pi, &b) > dot(pi, &a) { b } else { a })
    }

    /// Point where the three classes tie, solved from their winning planes
    /// near `near`. `None` when the planes are degenerate, the point leaves
    /// the simplex or lies more than three grid steps away, or another class
    /// beats the three there.
    pub fn intersection(&self, classes: [usize; 3], near: &[T; 3]) -> Option<[T; 3]> {
        let [a, b, c] = classes.map(|k| self.class_scores(k, near));
        let (a, b, c) = (a?, b?, c?);
        let r1 = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
        let r2 = [a[0] - c[0], a[1] - c[1], a[2] - c[2]];
        let r3 = [T::one(); 3];
        let det3 = |x: [T; 3], y: [T; 3], z: [T; 3]| {
            x[0] * (y[1] * z[2] - y[2] * z[1]) - x[1] * (y[0] * z[2] - y[2] * z[0])
                + x[2] * (y[0] * z[1] - y[1] * z[0])
        };
        let det = det3(r1, r2, r3);
        if det.abs() <= T::tol(1e-12) {
            return None;
        }
        let rhs = [T::zero(), T::zero(), T::one()];
        let col = |k: usize| {
            let swap = |r: [T; 3], v: T| {
                let mut r = r;
                r[k] = v;
                r
            };
            det3(swap(r1, rhs[0]), swap(r2, rhs[1]), swap(r3, rhs[2])) / det
        };
        let pi = [col(0), col(1), col(2)];
        let step = T::one() / T::from_usize(self.steps).expect("grid size");
        let dist = ((pi[0] - near[0]).powi(2) + (pi[1] - near[1]).powi(2)).sqrt();
        if pi.iter().any(|&p| p < -T::tol(1e-12)) || dist > T::lit(3.0) * step {
            return None;
        }
        let value = dot(&pi, &a);
        let best = self.winner(&pi).1;
        if best > value + T::tol(1e-9) {
            return None;
        }
        Some(pi)
    }

    /// Gain of the best grouping at an arbitrary prior triple.
    pub fn gain_at(&self, pi: &[T; 3]) -> T {
        self.winner(pi).1
    }

    /// Best gain of `class` at `pi`.
    pub fn class_gain_at(&self, class: usize, pi: &[T; 3]) -> Option<T> {
        self.class_scores(class, pi).map(|s| dot(pi, &s))
    }

    pub fn grouping(&self, index: usize) -> &Grouping {
        &self.groupings[index]
    }

    pub fn score_vector(&self, index: usize) -> [T; 3] {
        self.scores[index]
    }

    pub fn class_by_signature(&self, signature: &str) -> Option<&RegionClass<T>> {
        self.classes.iter().find(|c| c.signature == signature)
    }

    /// The junction whose classes carry exactly these signatures.
    pub fn junction_of(&self, signatures: &[&str]) -> Option<&Junction<T>> {
        let mut want: Vec<&str> = signatures.to_vec();
        want.sort_unstable();
        self.junctions.iter().find(|j| {
            let mut have: Vec<&str> = j.classes.iter().map(|&c| self.classes[c].signature.as_str()).collect();
            have.sort_unstable();
            have == want
        })
    }

    /// The junction closest to `(π₁, π₂)`.
    pub fn nearest_junction(&self, pi1: T, pi2: T) -> Option<&Junction<T>> {
        let d = |j: &Junction<T>| (j.priors[0] - pi1).powi(2) + (j.priors[1] - pi2).powi(2);
        self.junctions
            .iter()
            .min_by(|a, b| d(a).partial_cmp(&d(b)).expect("finite distances"))
    }

    /// CSV with header `pi1,pi2,pi3,grouping_id,gain`; `grouping_id` is the
    /// class id. Junctions follow as rows whose id is `junction`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pi1,pi2,pi3,grouping_id,gain\n");
        for c in &self.cells {
            let _ = writeln!(
                out,
                "{:?},{:?},{:?},{},{:?}",
                c.priors[0].to_f64_lossy(),
                c.priors[1].to_f64_lossy(),
                c.priors[2].to_f64_lossy(),
                c.class_id,
                c.gain.to_f64_lossy()
            );
        }
        for j in &self.junctions {
            let _ = writeln!(
                out,
                "{:?},{:?},{:?},junction,{:?}",
                j.priors[0].to_f64_lossy(),
                j.priors[1].to_f64_lossy(),
                j.priors[2].to_f64_lossy(),
                j.gain.to_f64_lossy()
            );
        }
        out
    }
}
