//! Conditioned renewal sampling of regeneration skeletons.
//!
//! With i.i.d. steps `X_i ~ Q`, the skeleton conditioned on some partial sum
//! hitting `(n, 0)` exactly is sampled backwards through the renewal partition
//! function `G(t, y) = sum_s Q(s) G((t, y) - s)`, `G(0, 0) = 1`: from `(n, 0)`
//! the last increment is `s` with probability `Q(s) G((n, 0) - s) / G(n, 0)`,
//! and so on down to the origin. Transverse coordinates are kept in a box
//! `|y_i| <= R`; the conditioned mass lost to the box is measured against a
//! box of radius `2R`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::enumerate::engine::{search, Geometry, SearchSpec, Visitor, Walker};
use crate::enumerate::{check_beta, EnumerationOptions, SkeletonLaw};
use crate::lattice::{check_dim, FrameSplit, LatticeSite, SawPath, MAX_DIM};
use crate::renewal::StepLaw;
use crate::rng::ReplicaRng;
use crate::stats::Ensemble;
use crate::{Error, Result};

/// Largest acceptable box leakage for production sampling runs.
pub const MAX_LEAKAGE: f64 = 1e-6;

/// Regeneration increments `x_1, ..., x_k` of a bridge to `(n, 0, ..., 0)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Skeleton {
    increments: Vec<FrameSplit>,
    n: i64,
}

impl Skeleton {
    /// Every increment must advance (`t >= 1`) and the transverse parts must
    /// cancel.
    pub fn new(increments: Vec<FrameSplit>) -> Result<Self> {
        let Some(first) = increments.first() else {
            return Err(Error::InvalidArgument("skeleton needs at least one increment".into()));
        };
        let dim = first.dim();
        let mut total = FrameSplit::new(0, &vec![0; dim - 1])?;
        for x in &increments {
            if x.dim() != dim {
                return Err(Error::DimensionMismatch);
            }
            if x.t() < 1 {
                return Err(Error::InvalidArgument("increments must advance".into()));
            }
            total = total + *x;
        }
        if !total.y_is_zero() {
            return Err(Error::InvalidArgument("skeleton does not end on the axis".into()));
        }
        Ok(Self {
            n: total.t(),
            increments,
        })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.increments[0].dim()
    }

    pub fn increments(&self) -> &[FrameSplit] {
        &self.increments
    }

    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    /// Regeneration points `s_1, ..., s_k = (n, 0)`.
    pub fn partial_sums(&self) -> Vec<FrameSplit> {
        let mut acc = FrameSplit::new(0, &vec![0; self.dim() - 1]).expect("valid dim");
        self.increments
            .iter()
            .map(|x| {
                acc = acc + *x;
                acc
            })
            .collect()
    }

    /// Increments in reverse order.
    pub fn reversed(&self) -> Self {
        let mut increments = self.increments.clone();
        increments.reverse();
        Self {
            increments,
            n: self.n,
        }
    }

    /// Transverse block negated.
    pub fn reflected(&self) -> Self {
        Self {
            increments: self.increments.iter().map(|x| x.reflect_transverse()).collect(),
            n: self.n,
        }
    }

    pub fn max_increment_norm_sq(&self) -> i64 {
        self.increments.iter().map(FrameSplit::norm_sq).max().unwrap_or(0)
    }
}

/// `G(t, y)` on `0 <= t <= n`, `|y_i| <= R`, stored per slab as values scaled
/// to a maximum of one together with the natural log of the scale.
#[derive(Clone, Debug)]
pub struct PartitionTable {
    n: i64,
    radius: i64,
    ydim: usize,
    width: usize,
    slab_size: usize,
    scaled: Vec<f64>,
    log_scale: Vec<f64>,
    steps: Vec<(FrameSplit, f64)>,
    max_advance: i64,
    // exp(log_scale[t - a] - log_scale[t]) at index t * (max_advance + 1) + a
    slab_ratio: Vec<f64>,
    leakage: f64,
}

impl PartitionTable {
    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    /// Conditioned probability that a renewal path to `(n, 0)` leaves the box.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn steps(&self) -> &[(FrameSplit, f64)] {
        &self.steps
    }

    fn index(&self, y: &[i64]) -> Option<usize> {
        let mut idx = 0;
        for &c in y {
            if c.abs() > self.radius {
                return None;
            }
            idx = idx * self.width + (c + self.radius) as usize;
        }
        Some(idx)
    }

    /// `ln G(t, y)`; `-inf` outside the box or where `G` vanishes.
    pub fn log_value(&self, t: i64, y: &[i64]) -> f64 {
        if t < 0 || t > self.n || y.len() != self.ydim {
            return f64::NEG_INFINITY;
        }
        match self.index(y) {
            Some(i) => {
                let v = self.scaled[t as usize * self.slab_size + i];
                if v > 0.0 {
                    libm::log(v) + self.log_scale[t as usize]
                } else {
                    f64::NEG_INFINITY
                }
            }
            None => f64::NEG_INFINITY,
        }
    }

    pub fn value(&self, t: i64, y: &[i64]) -> f64 {
        libm::exp(self.log_value(t, y))
    }
}

struct Slabs {
    scaled: Vec<f64>,
    log_scale: Vec<f64>,
}

fn decode(mut idx: usize, width: usize, radius: i64, ydim: usize, out: &mut [i64; MAX_DIM - 1]) {
    for k in (0..ydim).rev() {
        out[k] = (idx % width) as i64 - radius;
        idx /= width;
    }
}

fn run_dp(steps: &[(FrameSplit, f64)], n: i64, radius: i64, ydim: usize) -> Slabs {
    let width = (2 * radius + 1) as usize;
    let slab_size = width.pow(ydim as u32);
    let slabs = n as usize + 1;
    let mut scaled = vec![0.0; slabs * slab_size];
    let mut log_scale = vec![f64::NEG_INFINITY; slabs];
    let origin = (0..ydim).fold(0, |acc, _| acc * width + radius as usize);
    scaled[origin] = 1.0;
    log_scale[0] = 0.0;

    let index = |y: &[i64]| -> Option<usize> {
        let mut idx = 0;
        for &c in y {
            if c.abs() > radius {
                return None;
            }
            idx = idx * width + (c + radius) as usize;
        }
        Some(idx)
    };

    for t in 1..=n {
        let reference = steps
            .iter()
            .filter(|(s, _)| s.t() <= t)
            .map(|(s, _)| log_scale[(t - s.t()) as usize])
            .fold(f64::NEG_INFINITY, f64::max);
        if reference == f64::NEG_INFINITY {
            continue;
        }
        let (done, rest) = scaled.split_at_mut(t as usize * slab_size);
        let slab = &mut rest[..slab_size];
        let cell = |i: usize, out: &mut f64| {
            let mut y = [0i64; MAX_DIM - 1];
            decode(i, width, radius, ydim, &mut y);
            let mut acc = 0.0;
            for (s, q) in steps {
                if s.t() > t {
                    break;
                }
                let prev = (t - s.t()) as usize;
                let ls = log_scale[prev];
                if ls == f64::NEG_INFINITY {
                    continue;
                }
                let mut yp = [0i64; MAX_DIM - 1];
                for k in 0..ydim {
                    yp[k] = y[k] - s.y()[k];
                }
                if let Some(j) = index(&yp[..ydim]) {
                    let g = done[prev * slab_size + j];
                    if g != 0.0 {
                        acc += q * g * libm::exp(ls - reference);
                    }
                }
            }
            *out = acc;
        };
        #[cfg(feature = "std")]
        {
            use rayon::prelude::*;
            slab.par_iter_mut().enumerate().for_each(|(i, out)| cell(i, out));
        }
        #[cfg(not(feature = "std"))]
        for (i, out) in slab.iter_mut().enumerate() {
            cell(i, out);
        }
        let peak = slab.iter().copied().fold(0.0, f64::max);
        if peak > 0.0 {
            for v in slab.iter_mut() {
                *v /= peak;
            }
            log_scale[t as usize] = reference + libm::log(peak);
        }
    }
    Slabs { scaled, log_scale }
}

/// Default transverse radius `ceil(4 sqrt(n v))`, `v` the per-coordinate step
/// variance, and never less than the step reach.
pub fn default_box_radius(law: &StepLaw, n: i64) -> i64 {
    let sigma = libm::sqrt(n as f64 * law.transverse_variance());
    (libm::ceil(4.0 * sigma) as i64).max(law.transverse_reach()).max(1)
}

/// Forward dynamic programming for `G` on slabs `0..=n` inside the box of
/// radius `radius`, plus the leakage estimate.
pub fn dp_partition(law: &StepLaw, n: i64, radius: i64) -> Result<PartitionTable> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let reach = law.transverse_reach();
    if radius < reach {
        return Err(Error::BoxTooSmall { radius, reach });
    }
    let ydim = law.dim() - 1;
    let steps = law.steps().to_vec();
    let inner = run_dp(&steps, n, radius, ydim);
    let outer = run_dp(&steps, n, 2 * radius, ydim);

    let width = (2 * radius + 1) as usize;
    let slab_size = width.pow(ydim as u32);
    let max_advance = law.max_advance();
    let stride = max_advance as usize + 1;
    let mut slab_ratio = vec![0.0; (n as usize + 1) * stride];
    for t in 0..=n {
        for a in 1..=max_advance.min(t) {
            let (from, to) = (inner.log_scale[(t - a) as usize], inner.log_scale[t as usize]);
            if from > f64::NEG_INFINITY && to > f64::NEG_INFINITY {
                slab_ratio[t as usize * stride + a as usize] = libm::exp(from - to);
            }
        }
    }

    let mut table = PartitionTable {
        n,
        radius,
        ydim,
        width,
        slab_size,
        scaled: inner.scaled,
        log_scale: inner.log_scale,
        steps,
        max_advance,
        slab_ratio,
        leakage: 0.0,
    };
    let zero = vec![0i64; ydim];
    let inside = table.log_value(n, &zero);
    let outer_width = (4 * radius + 1) as usize;
    let outer_origin = (0..ydim).fold(0, |acc, _| acc * outer_width + 2 * radius as usize);
    let outer_slab = outer_width.pow(ydim as u32);
    let outer_v = outer.scaled[n as usize * outer_slab + outer_origin];
    if outer_v > 0.0 && inside > f64::NEG_INFINITY {
        let wide = libm::log(outer_v) + outer.log_scale[n as usize];
        table.leakage = (1.0 - libm::exp(inside - wide)).max(0.0);
    } else if outer_v > 0.0 {
        table.leakage = 1.0;
    }
    Ok(table)
}

/// Draws one skeleton from the renewal law conditioned on hitting `(n, 0)`,
/// by exact backward sampling. Depends only on `(seed, replicate)`.
pub fn sample_skeleton(partition: &PartitionTable, seed: u64, replicate: u64) -> Result<Skeleton> {
    let mut rng = ReplicaRng::new(seed, replicate);
    let mut weights = Vec::with_capacity(partition.steps.len());
    sample_with(partition, &mut rng, &mut weights)
}

fn sample_with(
    p: &PartitionTable,
    rng: &mut ReplicaRng,
    weights: &mut Vec<f64>,
) -> Result<Skeleton> {
    let ydim = p.ydim;
    let stride = p.max_advance as usize + 1;
    let mut t = p.n;
    let mut y = [0i64; MAX_DIM - 1];
    let mut reversed = Vec::new();
    if p.scaled[t as usize * p.slab_size + p.index(&y[..ydim]).expect("origin")] <= 0.0 {
        return Err(Error::UnreachableState(t));
    }
    while t > 0 {
        weights.clear();
        let mut total = 0.0;
        for (s, q) in &p.steps {
            if s.t() > t {
                break;
            }
            let prev = t - s.t();
            let mut yp = [0i64; MAX_DIM - 1];
            for k in 0..ydim {
                yp[k] = y[k] - s.y()[k];
            }
            let w = match p.index(&yp[..ydim]) {
                Some(j) => {
                    q * p.scaled[prev as usize * p.slab_size + j]
                        * p.slab_ratio[t as usize * stride + s.t() as usize]
                }
                None => 0.0,
            };
            total += w;
            weights.push(w);
        }
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::UnreachableState(t));
        }
        let target = rng.next_f64() * total;
        let mut acc = 0.0;
        let mut chosen = None;
        for (i, &w) in weights.iter().enumerate() {
            acc += w;
            if w > 0.0 {
                chosen = Some(i);
                if target < acc {
                    break;
                }
            }
        }
        let s = p.steps[chosen.ok_or(Error::UnreachableState(t))?].0;
        t -= s.t();
        for k in 0..ydim {
            y[k] -= s.y()[k];
        }
        reversed.push(s);
    }
    if y[..ydim].iter().any(|&c| c != 0) {
        return Err(Error::UnreachableState(0));
    }
    reversed.reverse();
    Skeleton::new(reversed)
}

/// Piecewise-linear path on `[0, 1]` through `(s_t / n, s_y / sqrt(n))`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledBridgeProcess {
    ydim: usize,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl ScaledBridgeProcess {
    pub fn knots(&self) -> impl Iterator<Item = (f64, &[f64])> {
        self.times
            .iter()
            .copied()
            .zip(self.values.chunks_exact(self.ydim))
    }

    pub fn num_knots(&self) -> usize {
        self.times.len()
    }

    pub fn transverse_dim(&self) -> usize {
        self.ydim
    }

    /// Linear interpolation between the knots around `t`; exact at knots.
    pub fn evaluate(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.ydim];
        self.evaluate_into(t, &mut out)?;
        Ok(out)
    }

    pub fn evaluate_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::TimeOutOfRange(t));
        }
        let d = self.ydim;
        // first knot with time >= t
        let hi = self.times.partition_point(|&x| x < t).min(self.times.len() - 1);
        if self.times[hi] == t || hi == 0 {
            out.copy_from_slice(&self.values[hi * d..(hi + 1) * d]);
            return Ok(());
        }
        let lo = hi - 1;
        let (t0, t1) = (self.times[lo], self.times[hi]);
        let w = (t - t0) / (t1 - t0);
        for k in 0..d {
            let (a, b) = (self.values[lo * d + k], self.values[hi * d + k]);
            out[k] = a + w * (b - a);
        }
        Ok(())
    }
}

pub fn scale_skeleton(skeleton: &Skeleton) -> ScaledBridgeProcess {
    let ydim = skeleton.dim() - 1;
    let n = skeleton.n() as f64;
    let root = libm::sqrt(n);
    let mut times = Vec::with_capacity(skeleton.len() + 1);
    let mut values = Vec::with_capacity((skeleton.len() + 1) * ydim);
    times.push(0.0);
    values.extend(core::iter::repeat_n(0.0, ydim));
    for s in skeleton.partial_sums() {
        times.push(s.t() as f64 / n);
        values.extend(s.y().iter().map(|&c| c as f64 / root));
    }
    ScaledBridgeProcess {
        ydim,
        times,
        values,
    }
}

/// Samples replicates `0..replicas` and evaluates each scaled skeleton on
/// `grid`. The output is in replicate order whatever the thread count.
pub fn sample_ensemble(
    partition: &PartitionTable,
    seed: u64,
    replicas: usize,
    grid: &[f64],
    law_id: &str,
) -> Result<(Vec<Skeleton>, Ensemble)> {
    let one = |r: usize| -> Result<(Skeleton, Vec<f64>)> {
        let sk = sample_skeleton(partition, seed, r as u64)?;
        let process = scale_skeleton(&sk);
        let ydim = process.transverse_dim();
        let mut row = vec![0.0; grid.len() * ydim];
        for (g, &t) in grid.iter().enumerate() {
            process.evaluate_into(t, &mut row[g * ydim..(g + 1) * ydim])?;
        }
        Ok((sk, row))
    };
    #[cfg(feature = "std")]
    let draws: Vec<Result<(Skeleton, Vec<f64>)>> = {
        use rayon::prelude::*;
        (0..replicas).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "std"))]
    let draws: Vec<Result<(Skeleton, Vec<f64>)>> = (0..replicas).map(one).collect();

    let mut skeletons = Vec::with_capacity(replicas);
    let mut values = Vec::with_capacity(replicas * grid.len() * partition.ydim);
    for d in draws {
        let (sk, row) = d?;
        skeletons.push(sk);
        values.extend(row);
    }
    let ensemble = Ensemble::new(
        partition.n,
        grid.to_vec(),
        partition.ydim,
        values,
        seed,
        law_id.into(),
    )?;
    Ok((skeletons, ensemble))
}

/// Law of the renewal skeleton conditioned on hitting `(n, 0)`, computed by
/// summing over compositions directly (no box, no slab scaling). Skeletons
/// whose probability is certainly below `min_probability` are pruned; the
/// returned law then carries less than unit mass.
pub fn renewal_skeleton_law(law: &StepLaw, n: i64, min_probability: f64) -> Result<SkeletonLaw> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    struct Ctx<'a> {
        steps: &'a [(FrameSplit, f64)],
        completion: BTreeMap<FrameSplit, f64>,
    }
    impl Ctx<'_> {
        fn completion(&mut self, rem: FrameSplit) -> f64 {
            if rem.t() == 0 {
                return if rem.y_is_zero() { 1.0 } else { 0.0 };
            }
            if let Some(&v) = self.completion.get(&rem) {
                return v;
            }
            let mut acc = 0.0;
            for i in 0..self.steps.len() {
                let (s, q) = self.steps[i];
                if s.t() > rem.t() {
                    break;
                }
                acc += q * self.completion(rem - s);
            }
            self.completion.insert(rem, acc);
            acc
        }

        fn enumerate(
            &mut self,
            rem: FrameSplit,
            weight: f64,
            floor: f64,
            prefix: &mut Vec<FrameSplit>,
            out: &mut Vec<(Vec<FrameSplit>, f64)>,
        ) {
            if rem.t() == 0 {
                out.push((prefix.clone(), weight));
                return;
            }
            for i in 0..self.steps.len() {
                let (s, q) = self.steps[i];
                if s.t() > rem.t() {
                    break;
                }
                let next = rem - s;
                let w = weight * q;
                let c = self.completion(next);
                if c <= 0.0 || w * c < floor {
                    continue;
                }
                prefix.push(s);
                self.enumerate(next, w, floor, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut ctx = Ctx {
        steps: law.steps(),
        completion: BTreeMap::new(),
    };
    let target = FrameSplit::new(n, &vec![0; law.dim() - 1])?;
    let total = ctx.completion(target);
    if !(total > 0.0) {
        return Err(Error::UnreachableState(n));
    }
    let mut raw = Vec::new();
    ctx.enumerate(target, 1.0, min_probability * total, &mut Vec::new(), &mut raw);
    let probabilities = raw
        .into_iter()
        .map(|(inc, w)| Ok((Skeleton::new(inc)?, w / total)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(SkeletonLaw { n, probabilities })
}

/// Exact sampler for the length-truncated bridge measure on walks
/// `0 -> (n, 0, ..., 0)`: every bridge with at most `cutoff` steps is
/// enumerated once, and draws pick a length by weight `count_N e^{-beta N}`,
/// then a walk of that length uniformly.
#[derive(Clone, Debug)]
pub struct ExhaustiveWalkSampler {
    dim: usize,
    walks_by_length: Vec<Vec<Vec<u8>>>,
    cumulative: Vec<f64>,
}

struct BridgeCollector {
    n: i64,
    cutoff: usize,
    target: LatticeSite,
    target_index: usize,
    walks: Vec<Vec<Vec<u8>>>,
}

impl Visitor for BridgeCollector {
    fn visit(&mut self, w: &Walker<'_>) -> bool {
        if w.t() > self.n {
            return false;
        }
        if w.head() == self.target_index && w.len() > 0 {
            self.walks[w.len()].push(w.moves().to_vec());
            return false;
        }
        let remaining = (self.cutoff - w.len()) as i64;
        (self.target - w.geometry().site(w.head())).l1_norm() <= remaining
    }

    fn merge(&mut self, other: Self) {
        for (a, b) in self.walks.iter_mut().zip(other.walks) {
            a.extend(b);
        }
    }
}

impl ExhaustiveWalkSampler {
    pub fn new(dim: usize, n: i64, beta: f64, cutoff: usize) -> Result<Self> {
        check_dim(dim)?;
        check_beta(beta)?;
        if n < 1 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if (cutoff as i64) < n {
            return Err(Error::NoBridges { n, cutoff });
        }
        crate::enumerate::check_cutoff(dim, cutoff, &EnumerationOptions::default())?;
        let target = LatticeSite::on_axis(dim, n)?;
        let geom = Geometry::new(dim, cutoff.max(1));
        let target_index = geom.index(&target).expect("target inside the box");
        let spec = SearchSpec {
            dim,
            max_len: cutoff,
            half_space: true,
            split_depth: EnumerationOptions::default().split_depth,
        };
        let mut collected = search(spec, || BridgeCollector {
            n,
            cutoff,
            target,
            target_index,
            walks: vec![Vec::new(); cutoff + 1],
        });
        for group in collected.walks.iter_mut() {
            group.sort_unstable();
        }
        let weights: Vec<f64> = collected
            .walks
            .iter()
            .enumerate()
            .map(|(len, g)| g.len() as f64 * libm::exp(-beta * len as f64))
            .collect();
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::NoBridges { n, cutoff });
        }
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Ok(Self {
            dim,
            walks_by_length: collected.walks,
            cumulative,
        })
    }

    /// Number of bridges of each length.
    pub fn counts_per_length(&self) -> Vec<usize> {
        self.walks_by_length.iter().map(Vec::len).collect()
    }

    /// Probability of each length under the truncated measure.
    pub fn length_probabilities(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.cumulative
            .iter()
            .map(|&c| {
                let p = c - prev;
                prev = c;
                p
            })
            .collect()
    }

    pub fn sample(&self, seed: u64, replicate: u64) -> SawPath {
        let mut rng = ReplicaRng::new(seed, replicate);
        let u = rng.next_f64();
        let mut len = self.cumulative.partition_point(|&c| c <= u);
        // guard the top end against rounding in the cumulative sum
        while len >= self.walks_by_length.len() || self.walks_by_length[len].is_empty() {
            len = if len >= self.walks_by_length.len() {
                self.walks_by_length.len() - 1
            } else {
                len - 1
            };
        }
        let group = &self.walks_by_length[len];
        let k = ((rng.next_f64() * group.len() as f64) as usize).min(group.len() - 1);
        self.decode(&group[k])
    }

    fn decode(&self, moves: &[u8]) -> SawPath {
        let mut site = LatticeSite::origin(self.dim).expect("validated dim");
        let mut sites = Vec::with_capacity(moves.len() + 1);
        sites.push(site);
        for &code in moves {
            let mut c = [0i64; MAX_DIM];
            c[..self.dim].copy_from_slice(site.coords());
            c[(code / 2) as usize] += if code % 2 == 0 { 1 } else { -1 };
            site = LatticeSite::new(&c[..self.dim]).expect("validated dim");
            sites.push(site);
        }
        SawPath::from_sites_unchecked(sites)
    }
}

/// One exact draw from the truncated bridge measure; see [`ExhaustiveWalkSampler`].
pub fn sample_conditioned_walk_exhaustive(
    dim: usize,
    n: i64,
    beta: f64,
    cutoff: usize,
    seed: u64,
) -> Result<SawPath> {
    Ok(ExhaustiveWalkSampler::new(dim, n, beta, cutoff)?.sample(seed, 0))
}
