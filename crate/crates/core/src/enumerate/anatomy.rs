use alloc::vec::Vec;

use crate::lattice::{split_frame, FrameSplit, LatticeSite, SawPath};
use crate::sampler::Skeleton;
use crate::{Error, Result};

/// Bridge structure of a walk along the first axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BridgeAnatomy {
    pub is_bridge: bool,
    /// Break-point levels in increasing order.
    pub break_points: Vec<i64>,
    /// `omega(T_b)` for each break point `b`, where `T_b` is the last time the
    /// first coordinate equals `b`.
    pub regeneration_sites: Vec<LatticeSite>,
}

impl BridgeAnatomy {
    /// Increments between consecutive regeneration points, from the start of the
    /// walk to its end. `None` unless the walk is a bridge.
    pub fn increments(&self, path: &SawPath) -> Option<Vec<FrameSplit>> {
        if !self.is_bridge {
            return None;
        }
        let mut knots = Vec::with_capacity(self.regeneration_sites.len() + 2);
        knots.push(path.start());
        knots.extend_from_slice(&self.regeneration_sites);
        knots.push(path.end());
        if path.is_empty() {
            return Some(Vec::new());
        }
        Some(
            knots
                .windows(2)
                .map(|w| split_frame(&(w[1] - w[0])))
                .collect(),
        )
    }
}

/// `0 < x_1(j) - x_1(0) <= x_1(N) - x_1(0)` for every `j >= 1`.
pub(crate) fn is_bridge_levels(levels: &[i64]) -> bool {
    let start = levels[0];
    let end = levels[levels.len() - 1];
    levels[1..].iter().all(|&t| start < t && t <= end)
}

/// `(level, time)` of every break point, where `time` is the last visit to the
/// level. Requires a bridge.
///
/// A level `k` strictly between the endpoints is a break point iff the walk is
/// at or below `k` up to some time `r` and strictly above afterwards; with unit
/// steps this forces `x_1(r) = k`, and `r` is then the last visit to `k`.
pub(crate) fn break_times(levels: &[i64]) -> Vec<(i64, usize)> {
    let n = levels.len();
    let (start, end) = (levels[0], levels[n - 1]);
    let mut suffix_min = alloc::vec![i64::MAX; n + 1];
    for j in (0..n).rev() {
        suffix_min[j] = suffix_min[j + 1].min(levels[j]);
    }
    let mut out = Vec::new();
    let mut prefix_max = i64::MIN;
    for r in 0..n.saturating_sub(1) {
        prefix_max = prefix_max.max(levels[r]);
        let k = levels[r];
        if prefix_max == k && suffix_min[r + 1] > k && start < k && k < end {
            out.push((k, r));
        }
    }
    out
}

pub fn classify_bridge(path: &SawPath) -> BridgeAnatomy {
    let levels: Vec<i64> = path.sites().iter().map(LatticeSite::first).collect();
    if !is_bridge_levels(&levels) {
        return BridgeAnatomy {
            is_bridge: false,
            break_points: Vec::new(),
            regeneration_sites: Vec::new(),
        };
    }
    let breaks = break_times(&levels);
    BridgeAnatomy {
        is_bridge: true,
        break_points: breaks.iter().map(|&(k, _)| k).collect(),
        regeneration_sites: breaks.iter().map(|&(_, r)| path.sites()[r]).collect(),
    }
}

/// Break points straight from the definition: every level `k` strictly between
/// the endpoints and every split time `r`. Quadratic; for cross-checking.
pub fn break_points_brute_force(path: &SawPath) -> Vec<i64> {
    let levels: Vec<i64> = path.sites().iter().map(LatticeSite::first).collect();
    let (start, end) = (levels[0], levels[levels.len() - 1]);
    let mut out = Vec::new();
    for k in (start + 1)..end {
        let splits = (0..levels.len()).any(|r| {
            levels.iter().enumerate().all(|(j, &t)| if j <= r { t <= k } else { t > k })
        });
        if splits {
            out.push(k);
        }
    }
    out
}

impl Skeleton {
    /// The regeneration skeleton of a bridge ending on the first axis.
    pub fn of_walk(path: &SawPath) -> Result<Self> {
        let anatomy = classify_bridge(path);
        let increments = anatomy
            .increments(path)
            .ok_or_else(|| Error::InvalidArgument("walk is not a bridge".into()))?;
        if !path.start().is_origin() || !split_frame(&path.end()).y_is_zero() {
            return Err(Error::InvalidArgument(
                "walk must run from the origin to a point of the first axis".into(),
            ));
        }
        Skeleton::new(increments)
    }
}
