//! Exact small-`n` skeleton laws.
//!
//! Two independent routes produce the law of the regeneration skeleton of a
//! bridge `0 -> (n, 0, ..., 0)` weighted by `e^{-beta |omega|}`, `|omega| <= L`:
//! enumerating every such bridge and classifying it, or composing irreducible
//! bridges from an irreducible [`CountTable`]. Both keep per-length integer
//! counts, so they can be compared exactly before `beta` is applied.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::anatomy::break_times;
use super::engine::{search, Geometry, SearchSpec, Visitor, Walker};
use super::{check_beta, check_cutoff, length_sum, CountTable, EnumerationOptions, WalkClass};
use crate::lattice::{check_dim, split_frame, FrameSplit, LatticeSite};
use crate::sampler::Skeleton;
use crate::{Error, Result};

/// Per-length counts of bridges to `(n, 0, ..., 0)` grouped by skeleton.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkeletonCounts {
    pub dim: usize,
    pub n: i64,
    pub cutoff: usize,
    pub counts: BTreeMap<Skeleton, Vec<u128>>,
}

/// A probability law on skeletons.
#[derive(Clone, Debug, PartialEq)]
pub struct SkeletonLaw {
    pub n: i64,
    pub probabilities: BTreeMap<Skeleton, f64>,
}

impl SkeletonCounts {
    pub fn total_per_length(&self) -> Vec<u128> {
        let mut out = vec![0; self.cutoff + 1];
        for row in self.counts.values() {
            for (o, c) in out.iter_mut().zip(row) {
                *o += c;
            }
        }
        out
    }

    /// Normalizes `sum_N count[N] e^{-beta N}` over skeletons.
    pub fn law(&self, beta: f64) -> Result<SkeletonLaw> {
        check_beta(beta)?;
        let weights: Vec<(Skeleton, f64)> = self
            .counts
            .iter()
            .map(|(s, row)| (s.clone(), length_sum(row, beta)))
            .collect();
        let total: f64 = weights.iter().map(|(_, w)| w).sum();
        if !(total > 0.0) {
            return Err(Error::NoBridges {
                n: self.n,
                cutoff: self.cutoff,
            });
        }
        Ok(SkeletonLaw {
            n: self.n,
            probabilities: weights.into_iter().map(|(s, w)| (s, w / total)).collect(),
        })
    }
}

impl SkeletonLaw {
    pub fn probability(&self, skeleton: &Skeleton) -> f64 {
        self.probabilities.get(skeleton).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// `max_s |p(s) - q(s)|` over the union of both supports.
    pub fn max_abs_difference(&self, other: &SkeletonLaw) -> f64 {
        self.probabilities
            .keys()
            .chain(other.probabilities.keys())
            .map(|s| libm::fabs(self.probability(s) - other.probability(s)))
            .fold(0.0, f64::max)
    }

    /// Total-variation distance `1/2 sum_s |p(s) - q(s)|`.
    pub fn total_variation(&self, other: &SkeletonLaw) -> f64 {
        let mut keys: Vec<&Skeleton> = self.probabilities.keys().collect();
        keys.extend(other.probabilities.keys().filter(|s| !self.probabilities.contains_key(*s)));
        0.5 * keys
            .into_iter()
            .map(|s| libm::fabs(self.probability(s) - other.probability(s)))
            .sum::<f64>()
    }
}

struct SkeletonSink {
    n: i64,
    cutoff: usize,
    target: LatticeSite,
    target_index: usize,
    counts: BTreeMap<Skeleton, Vec<u128>>,
}

impl Visitor for SkeletonSink {
    fn visit(&mut self, w: &Walker<'_>) -> bool {
        if w.t() > self.n {
            return false;
        }
        let g = w.geometry();
        let head = w.head();
        if head == self.target_index && w.len() > 0 {
            // t == n is the running maximum, so this is a bridge; it cannot
            // come back to the target, so the subtree is dead either way
            let increments = skeleton_increments(g, w.path(), w.levels());
            let skeleton = Skeleton::new(increments).expect("bridge to the axis");
            self.counts
                .entry(skeleton)
                .or_insert_with(|| vec![0; self.cutoff + 1])[w.len()] += 1;
            return false;
        }
        let remaining = (self.cutoff - w.len()) as i64;
        (self.target - g.site(head)).l1_norm() <= remaining
    }

    fn merge(&mut self, other: Self) {
        for (s, row) in other.counts {
            let dst = self.counts.entry(s).or_insert_with(|| vec![0; row.len()]);
            for (a, b) in dst.iter_mut().zip(row) {
                *a += b;
            }
        }
    }
}

fn skeleton_increments(g: &Geometry, path: &[usize], levels: &[i64]) -> Vec<FrameSplit> {
    let mut knots: Vec<LatticeSite> = vec![g.site(path[0])];
    knots.extend(break_times(levels).into_iter().map(|(_, r)| g.site(path[r])));
    knots.push(g.site(path[path.len() - 1]));
    knots
        .windows(2)
        .map(|w| split_frame(&(w[1] - w[0])))
        .collect()
}

/// Enumerates every bridge `0 -> (n, 0, ..., 0)` with at most `cutoff` steps
/// and counts them per length, keyed by regeneration skeleton.
pub fn skeleton_counts_exhaustive(dim: usize, n: i64, cutoff: usize) -> Result<SkeletonCounts> {
    check_dim(dim)?;
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if (cutoff as i64) < n {
        return Err(Error::NoBridges { n, cutoff });
    }
    check_cutoff(dim, cutoff, &EnumerationOptions::default())?;
    let target = LatticeSite::on_axis(dim, n)?;
    let geom = Geometry::new(dim, cutoff.max(1));
    let target_index = geom.index(&target).expect("target within the box");
    let spec = SearchSpec {
        dim,
        max_len: cutoff,
        half_space: true,
        split_depth: EnumerationOptions::default().split_depth,
    };
    let sink = search(spec, || SkeletonSink {
        n,
        cutoff,
        target,
        target_index,
        counts: BTreeMap::new(),
    });
    if sink.counts.is_empty() {
        return Err(Error::NoBridges { n, cutoff });
    }
    Ok(SkeletonCounts {
        dim,
        n,
        cutoff,
        counts: sink.counts,
    })
}

/// Exhaustive law of the skeleton under the length-truncated bridge measure.
pub fn exact_conditioned_skeleton_law(
    dim: usize,
    n: i64,
    beta: f64,
    cutoff: usize,
) -> Result<SkeletonLaw> {
    check_beta(beta)?;
    skeleton_counts_exhaustive(dim, n, cutoff)?.law(beta)
}

struct Composer<'a> {
    steps: Vec<(FrameSplit, &'a [u128], usize)>,
    cutoff: usize,
    out: BTreeMap<Skeleton, Vec<u128>>,
}

impl Composer<'_> {
    fn run(&mut self, remaining: FrameSplit, poly: &[u128], prefix: &mut Vec<FrameSplit>) {
        if remaining.t() == 0 {
            if remaining.y_is_zero() {
                let s = Skeleton::new(prefix.clone()).expect("composition of irreducible steps");
                self.out.insert(s, poly.to_vec());
            }
            return;
        }
        let shortest = poly.iter().position(|&c| c != 0).expect("nonzero polynomial");
        for i in 0..self.steps.len() {
            let (step, row, step_min) = self.steps[i];
            if step.t() > remaining.t() {
                break;
            }
            let rest = remaining - step;
            if rest.t() == 0 && !rest.y_is_zero() {
                continue;
            }
            let rest_l1 = (rest.t() + rest.y().iter().map(|c| c.abs()).sum::<i64>()) as usize;
            if shortest + step_min + rest_l1 > self.cutoff {
                continue;
            }
            let mut next = vec![0u128; self.cutoff + 1];
            for (a, &pa) in poly.iter().enumerate().filter(|(_, &c)| c != 0) {
                for (b, &rb) in row.iter().enumerate().take(self.cutoff + 1 - a) {
                    next[a + b] += pa * rb;
                }
            }
            if next.iter().all(|&c| c == 0) {
                continue;
            }
            prefix.push(step);
            self.run(rest, &next, prefix);
            prefix.pop();
        }
    }
}

/// Skeleton counts assembled from irreducible pieces: the count of a skeleton
/// `(x_1, ..., x_k)` at total length `N` is the length-convolution of the
/// irreducible counts of its increments, truncated at the table's cutoff.
pub fn skeleton_counts_product(irreducible: &CountTable, n: i64) -> Result<SkeletonCounts> {
    if irreducible.class() != WalkClass::IrreducibleBridge {
        return Err(Error::WrongClass {
            expected: WalkClass::IrreducibleBridge,
            found: irreducible.class(),
        });
    }
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let cutoff = irreducible.cutoff();
    let steps: Vec<(FrameSplit, &[u128], usize)> = irreducible
        .iter()
        .filter(|(x, _)| x.first() >= 1)
        .map(|(x, row)| {
            let min = row.iter().position(|&c| c != 0).expect("stored rows are nonzero");
            (split_frame(x), row, min)
        })
        .collect();
    let mut composer = Composer {
        steps,
        cutoff,
        out: BTreeMap::new(),
    };
    let mut unit = vec![0u128; cutoff + 1];
    unit[0] = 1;
    let target = split_frame(&LatticeSite::on_axis(irreducible.dim(), n)?);
    composer.run(target, &unit, &mut Vec::new());
    if composer.out.is_empty() {
        return Err(Error::NoBridges { n, cutoff });
    }
    Ok(SkeletonCounts {
        dim: irreducible.dim(),
        n,
        cutoff,
        counts: composer.out,
    })
}

/// The normalized product law `prod f(x_i)`, truncated jointly on total length.
pub fn product_skeleton_law(irreducible: &CountTable, n: i64, beta: f64) -> Result<SkeletonLaw> {
    check_beta(beta)?;
    skeleton_counts_product(irreducible, n)?.law(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_counts;

    #[test]
    fn n_one_is_a_point_mass() {
        let law = exact_conditioned_skeleton_law(2, 1, 1.2, 1).unwrap();
        assert_eq!(law.len(), 1);
        let (s, p) = law.probabilities.iter().next().unwrap();
        assert_eq!(s.increments(), &[FrameSplit::new(1, &[0]).unwrap()]);
        assert_eq!(*p, 1.0);
    }

    #[test]
    fn cutoff_below_distance_has_no_bridges() {
        assert_eq!(
            skeleton_counts_exhaustive(2, 4, 3),
            Err(Error::NoBridges { n: 4, cutoff: 3 })
        );
    }

    #[test]
    fn law_sums_to_one() {
        let law = exact_conditioned_skeleton_law(2, 3, 1.2, 9).unwrap();
        assert!((law.total() - 1.0).abs() < 1e-12);
        assert!(law.len() > 10);
        // symmetric under reflection of the transverse block
        for (s, &p) in &law.probabilities {
            let r = s.reflected();
            assert!((law.probability(&r) - p).abs() < 1e-15);
        }
    }

    #[test]
    fn exhaustive_counts_total_equals_bridge_count() {
        let bridges = enumerate_counts(2, 9, WalkClass::Bridge).unwrap();
        let sk = skeleton_counts_exhaustive(2, 3, 9).unwrap();
        let target = LatticeSite::on_axis(2, 3).unwrap();
        assert_eq!(sk.total_per_length().as_slice(), bridges.counts(&target).unwrap());
    }

    #[test]
    fn both_routes_agree_exactly() {
        for (n, cutoff) in [(1, 5), (2, 8), (3, 9), (4, 10)] {
            let irr = enumerate_counts(2, cutoff, WalkClass::IrreducibleBridge).unwrap();
            let a = skeleton_counts_exhaustive(2, n, cutoff).unwrap();
            let b = skeleton_counts_product(&irr, n).unwrap();
            assert_eq!(a, b, "n = {n}, L = {cutoff}");
        }
        let irr = enumerate_counts(3, 6, WalkClass::IrreducibleBridge).unwrap();
        assert_eq!(
            skeleton_counts_exhaustive(3, 2, 6).unwrap(),
            skeleton_counts_product(&irr, 2).unwrap()
        );
    }

    #[test]
    fn distances() {
        let law = exact_conditioned_skeleton_law(2, 2, 1.2, 6).unwrap();
        assert_eq!(law.max_abs_difference(&law), 0.0);
        assert_eq!(law.total_variation(&law), 0.0);
        let point = exact_conditioned_skeleton_law(2, 2, 1.2, 2).unwrap();
        let tv = law.total_variation(&point);
        assert!((tv - (1.0 - law.probability(point.probabilities.keys().next().unwrap()))).abs() < 1e-12);
    }
}
