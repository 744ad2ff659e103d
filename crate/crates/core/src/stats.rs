//! Statistics on sampled ensembles: bridge covariance fit, Gaussian marginals,
//! the largest-increment fraction and walk-to-skeleton distances.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::lattice::{split_frame, SawPath};
use crate::sampler::{scale_skeleton, ScaledBridgeProcess, Skeleton};
use crate::{Error, Result};

/// Scaled processes evaluated on a common time grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    n: i64,
    grid: Vec<f64>,
    ydim: usize,
    // replicate-major: values[(r * G + g) * ydim + c]
    values: Vec<f64>,
    seed: u64,
    law_id: String,
}

impl Ensemble {
    pub fn new(
        n: i64,
        grid: Vec<f64>,
        ydim: usize,
        values: Vec<f64>,
        seed: u64,
        law_id: String,
    ) -> Result<Self> {
        if grid.is_empty() {
            return Err(Error::InvalidArgument("time grid is empty".into()));
        }
        if grid.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
            return Err(Error::InvalidArgument("grid times must lie strictly inside (0, 1)".into()));
        }
        if grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
        }
        if ydim == 0 || ydim >= crate::MAX_DIM {
            return Err(Error::UnsupportedDimension(ydim + 1));
        }
        let row = grid.len() * ydim;
        if !values.len().is_multiple_of(row) {
            return Err(Error::InvalidArgument(alloc::format!(
                "{} values do not fill rows of {row}",
                values.len()
            )));
        }
        Ok(Self {
            n,
            grid,
            ydim,
            values,
            seed,
            law_id,
        })
    }

    /// Evaluates each process on `grid`.
    pub fn from_processes(
        n: i64,
        grid: Vec<f64>,
        processes: &[ScaledBridgeProcess],
        seed: u64,
        law_id: String,
    ) -> Result<Self> {
        let ydim = processes.first().map_or(1, ScaledBridgeProcess::transverse_dim);
        let mut values = vec![0.0; processes.len() * grid.len() * ydim];
        let row = grid.len() * ydim;
        for (r, p) in processes.iter().enumerate() {
            if p.transverse_dim() != ydim {
                return Err(Error::DimensionMismatch);
            }
            for (g, &t) in grid.iter().enumerate() {
                let at = r * row + g * ydim;
                p.evaluate_into(t, &mut values[at..at + ydim])?;
            }
        }
        Self::new(n, grid, ydim, values, seed, law_id)
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn replicas(&self) -> usize {
        self.values.len() / (self.grid.len() * self.ydim)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn transverse_dim(&self) -> usize {
        self.ydim
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn law_id(&self) -> &str {
        &self.law_id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, replicate: usize, grid_index: usize, coord: usize) -> f64 {
        self.values[(replicate * self.grid.len() + grid_index) * self.ydim + coord]
    }

    fn grid_index(&self, t: f64) -> Result<usize> {
        self.grid
            .iter()
            .position(|&g| (g - t).abs() <= 1e-12)
            .ok_or(Error::TimeNotOnGrid(t))
    }
}

/// Square matrix in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    size: usize,
    entries: Vec<f64>,
}

impl CovarianceMatrix {
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                entries.push(f(i, j));
            }
        }
        Self { size, entries }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.size + j]
    }
}

/// Unbiased covariance of `Y(t_i)`, `Y(t_j)` across replicas, averaged over
/// the transverse coordinates.
pub fn empirical_covariance(ensemble: &Ensemble) -> Result<CovarianceMatrix> {
    let r = ensemble.replicas();
    if r < 2 {
        return Err(Error::InvalidArgument("covariance needs at least two replicas".into()));
    }
    let g = ensemble.grid.len();
    let d = ensemble.ydim;
    let mut mean = vec![0.0; g * d];
    for row in ensemble.values.chunks_exact(g * d) {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= r as f64;
    }
    let mut acc = vec![0.0; g * g];
    let mut centered = vec![0.0; g * d];
    for row in ensemble.values.chunks_exact(g * d) {
        for ((c, v), m) in centered.iter_mut().zip(row).zip(&mean) {
            *c = v - m;
        }
        for i in 0..g {
            for j in i..g {
                let mut s = 0.0;
                for c in 0..d {
                    s += centered[i * d + c] * centered[j * d + c];
                }
                acc[i * g + j] += s;
            }
        }
    }
    let scale = 1.0 / ((r - 1) as f64 * d as f64);
    Ok(CovarianceMatrix::from_fn(g, |i, j| {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        acc[a * g + b] * scale
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BridgeFit {
    pub sigma2_hat: f64,
    pub rel_rms: f64,
    /// `(i, j, cov_ij - sigma2_hat * K_ij)` over `i <= j`.
    pub residuals: Vec<(usize, usize, f64)>,
}

/// `min(s, t) (1 - max(s, t))`.
pub fn bridge_kernel(s: f64, t: f64) -> f64 {
    s.min(t) * (1.0 - s.max(t))
}

/// Least-squares `sigma^2` for `cov_ij ~ sigma^2 K(t_i, t_j)` over the upper
/// triangle including the diagonal.
pub fn fit_bridge_covariance(cov: &CovarianceMatrix, grid: &[f64]) -> Result<BridgeFit> {
    if cov.size() != grid.len() {
        return Err(Error::DimensionMismatch);
    }
    if grid.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
        return Err(Error::InvalidArgument("grid times must lie strictly inside (0, 1)".into()));
    }
    let g = grid.len();
    let (mut ck, mut kk) = (0.0, 0.0);
    for i in 0..g {
        for j in i..g {
            let k = bridge_kernel(grid[i], grid[j]);
            ck += cov.get(i, j) * k;
            kk += k * k;
        }
    }
    let sigma2_hat = ck / kk;
    if !(sigma2_hat > 0.0 && sigma2_hat.is_finite()) {
        return Err(Error::DegenerateFit);
    }
    let (mut rr, mut ff) = (0.0, 0.0);
    let mut residuals = Vec::with_capacity(g * (g + 1) / 2);
    for i in 0..g {
        for j in i..g {
            let fit = sigma2_hat * bridge_kernel(grid[i], grid[j]);
            let res = cov.get(i, j) - fit;
            residuals.push((i, j, res));
            rr += res * res;
            ff += fit * fit;
        }
    }
    Ok(BridgeFit {
        sigma2_hat,
        rel_rms: libm::sqrt(rr / ff),
        residuals,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// `P(K > lambda)` for the Kolmogorov distribution, 100 terms of the series.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.0 {
        // the alternating series converges slowly here; use the theta-dual form
        // P(K <= l) = sqrt(2 pi)/l sum_k exp(-(2k-1)^2 pi^2 / (8 l^2))
        let pi2 = core::f64::consts::PI * core::f64::consts::PI;
        let mut cdf = 0.0;
        for k in 1..=100 {
            let m = (2 * k - 1) as f64;
            cdf += libm::exp(-m * m * pi2 / (8.0 * lambda * lambda));
        }
        cdf *= libm::sqrt(2.0 * core::f64::consts::PI) / lambda;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = libm::exp(-2.0 * kf * kf * lambda * lambda);
        s += if k % 2 == 1 { term } else { -term };
    }
    (2.0 * s).clamp(0.0, 1.0)
}

/// One-sample KS test of `sample` against the standard normal, with the
/// asymptotic p-value `P(K > sqrt(m) D)`.
pub fn ks_normal(sample: &[f64]) -> Result<KsResult> {
    if sample.is_empty() {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let m = x.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in x.iter().enumerate() {
        let f = normal_cdf(v);
        d = d.max((i + 1) as f64 / m - f).max(f - i as f64 / m);
    }
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_survival(libm::sqrt(m) * d),
    })
}

/// KS test of the first transverse coordinate of `Y(t) / sqrt(sigma2 t (1-t))`
/// against the standard normal; `t` must be a grid time.
pub fn ks_marginal(ensemble: &Ensemble, t: f64, sigma2: f64) -> Result<KsResult> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidVariance(sigma2));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::TimeOutOfRange(t));
    }
    let g = ensemble.grid_index(t)?;
    let sd = libm::sqrt(sigma2 * t * (1.0 - t));
    let sample: Vec<f64> = (0..ensemble.replicas())
        .map(|r| ensemble.value(r, g, 0) / sd)
        .collect();
    ks_normal(&sample)
}

/// Fraction of skeletons with an increment of Euclidean norm above `n^{1/3}`,
/// decided exactly as `|x|^6 > n^2`.
pub fn gap_statistic(skeletons: &[Skeleton], n: i64) -> f64 {
    if skeletons.is_empty() {
        return 0.0;
    }
    let n2 = (n as i128) * (n as i128);
    let big = skeletons
        .iter()
        .filter(|s| {
            let q = s.max_increment_norm_sq() as i128;
            q * q * q > n2
        })
        .count();
    big as f64 / skeletons.len() as f64
}

fn point_segment_distance(p: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let (mut ab2, mut ap_ab) = (0.0, 0.0);
    for k in 0..p.len() {
        let ab = b[k] - a[k];
        ab2 += ab * ab;
        ap_ab += (p[k] - a[k]) * ab;
    }
    let u = if ab2 > 0.0 { (ap_ab / ab2).clamp(0.0, 1.0) } else { 0.0 };
    let mut d2 = 0.0;
    for k in 0..p.len() {
        let c = a[k] + u * (b[k] - a[k]) - p[k];
        d2 += c * c;
    }
    libm::sqrt(d2)
}

/// Largest distance from a scaled walk vertex `(w_1 / n, w_perp / sqrt(n))`
/// to the scaled interpolation of `skeleton`, which must be the walk's own.
pub fn shrinking_statistic(walk: &SawPath, skeleton: &Skeleton, n: i64) -> Result<f64> {
    let own = Skeleton::of_walk(walk).map_err(|_| Error::SkeletonMismatch)?;
    if &own != skeleton || skeleton.n() != n {
        return Err(Error::SkeletonMismatch);
    }
    let process = scale_skeleton(skeleton);
    let dim = walk.dim();
    let knots: Vec<Vec<f64>> = process
        .knots()
        .map(|(t, y)| {
            let mut v = Vec::with_capacity(dim);
            v.push(t);
            v.extend_from_slice(y);
            v
        })
        .collect();
    let (nf, root) = (n as f64, libm::sqrt(n as f64));
    let mut worst: f64 = 0.0;
    let mut p = vec![0.0; dim];
    for site in walk.sites() {
        let s = split_frame(site);
        p[0] = s.t() as f64 / nf;
        for (k, &c) in s.y().iter().enumerate() {
            p[k + 1] = c as f64 / root;
        }
        let d = knots
            .windows(2)
            .map(|w| point_segment_distance(&p, &w[0], &w[1]))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanPath {
    /// Mean over replicas and transverse coordinates at each grid time.
    pub mean: Vec<f64>,
    pub standard_error: Vec<f64>,
}

pub fn mean_path(ensemble: &Ensemble) -> Result<MeanPath> {
    let r = ensemble.replicas();
    if r < 2 {
        return Err(Error::InvalidArgument("mean path needs at least two replicas".into()));
    }
    let g = ensemble.grid.len();
    let d = ensemble.ydim;
    let m = (r * d) as f64;
    let mut mean = vec![0.0; g];
    let mut sq = vec![0.0; g];
    for row in ensemble.values.chunks_exact(g * d) {
        for i in 0..g {
            for c in 0..d {
                let v = row[i * d + c];
                mean[i] += v;
                sq[i] += v * v;
            }
        }
    }
    let mut standard_error = vec![0.0; g];
    for i in 0..g {
        mean[i] /= m;
        let var = ((sq[i] - m * mean[i] * mean[i]) / (m - 1.0)).max(0.0);
        standard_error[i] = libm::sqrt(var / m);
    }
    Ok(MeanPath {
        mean,
        standard_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FrameSplit;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    fn grid9() -> Vec<f64> {
        (1..=9).map(|i| i as f64 / 10.0).collect()
    }

    fn brownian_bridge_ensemble(replicas: usize, sigma2: f64, seed: u64) -> Ensemble {
        let grid = grid9();
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        let mut values = Vec::with_capacity(replicas * grid.len());
        for _ in 0..replicas {
            // Brownian motion on the grid and at t = 1, then B_t - t B_1
            let mut w = 0.0;
            let mut prev = 0.0;
            let mut path = Vec::with_capacity(grid.len());
            for &t in &grid {
                let z: f64 = StandardNormal.sample(&mut rng);
                w += z * (sigma2 * (t - prev)).sqrt();
                prev = t;
                path.push(w);
            }
            let z: f64 = StandardNormal.sample(&mut rng);
            let w1 = w + z * (sigma2 * (1.0 - prev)).sqrt();
            values.extend(path.iter().zip(&grid).map(|(b, t)| b - t * w1));
        }
        Ensemble::new(64, grid, 1, values, seed, "bb".into()).unwrap()
    }

    #[test]
    fn ensemble_validation() {
        assert!(Ensemble::new(4, vec![0.5, 0.5], 1, vec![], 0, String::new()).is_err());
        assert!(Ensemble::new(4, vec![0.0, 0.5], 1, vec![], 0, String::new()).is_err());
        assert!(Ensemble::new(4, vec![0.5], 1, vec![1.0, 2.0, 3.0], 0, String::new()).is_ok());
        assert!(Ensemble::new(4, vec![0.5, 0.6], 1, vec![1.0, 2.0, 3.0], 0, String::new()).is_err());
    }

    #[test]
    fn zero_paths_give_zero_covariance_and_degenerate_fit() {
        let e = Ensemble::new(4, grid9(), 1, vec![0.0; 90], 0, String::new()).unwrap();
        let c = empirical_covariance(&e).unwrap();
        for i in 0..9 {
            for j in 0..9 {
                assert_eq!(c.get(i, j), 0.0);
            }
        }
        assert_eq!(fit_bridge_covariance(&c, &grid9()), Err(Error::DegenerateFit));
    }

    #[test]
    fn exact_kernel_fit() {
        let grid = grid9();
        let c = CovarianceMatrix::from_fn(9, |i, j| 2.0 * bridge_kernel(grid[i], grid[j]));
        let fit = fit_bridge_covariance(&c, &grid).unwrap();
        assert!((fit.sigma2_hat - 2.0).abs() < 1e-14);
        assert!(fit.rel_rms < 1e-14);
        assert_eq!(fit.residuals.len(), 45);
    }

    #[test]
    fn synthetic_brownian_bridge_covariance() {
        let e = brownian_bridge_ensemble(20_000, 1.0, 11);
        let c = empirical_covariance(&e).unwrap();
        // Cov(1/4, 1/2) is not on the grid; Cov(0.2, 0.5) = 0.1, Var(0.5) = 0.25.
        // sd of a sample covariance ~ sqrt((s11 s22 + s12^2) / R) < 3e-3
        assert!((c.get(1, 4) - 0.1).abs() < 0.01);
        assert!((c.get(4, 4) - 0.25).abs() < 0.015);
        for i in 0..9 {
            assert!(c.get(i, i) >= 0.0);
            for j in 0..9 {
                assert_eq!(c.get(i, j), c.get(j, i));
            }
        }
        let fit = fit_bridge_covariance(&c, e.grid()).unwrap();
        assert!((fit.sigma2_hat - 1.0).abs() < 0.03);
        assert!(fit.rel_rms < 0.05);
        let mp = mean_path(&e).unwrap();
        for (m, se) in mp.mean.iter().zip(&mp.standard_error) {
            assert!(m.abs() < 4.0 * se);
        }
    }

    #[test]
    fn quarter_half_covariance() {
        let grid = vec![0.25, 0.5];
        let mut rng = rand::rngs::StdRng::seed_from_u64(5);
        let r = 40_000;
        let mut values = Vec::with_capacity(2 * r);
        for _ in 0..r {
            let z: [f64; 3] = [
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
                StandardNormal.sample(&mut rng),
            ];
            let b1 = z[0] * 0.5;
            let b2 = b1 + z[1] * 0.5;
            let b3 = b2 + z[2] * 0.5f64.sqrt();
            values.push(b1 - 0.25 * b3);
            values.push(b2 - 0.5 * b3);
        }
        let e = Ensemble::new(1, grid, 1, values, 5, String::new()).unwrap();
        let c = empirical_covariance(&e).unwrap();
        assert!((c.get(0, 1) - 0.125).abs() < 0.006);
    }

    #[test]
    fn kolmogorov_series_values() {
        // tabulated: P(K > 1.36) ~ 0.0494, P(K > 1.63) ~ 0.0098, P(K > 0.5) ~ 0.9639
        assert!((kolmogorov_survival(1.36) - 0.0494).abs() < 5e-4);
        assert!((kolmogorov_survival(1.63) - 0.0098).abs() < 2e-4);
        assert!((kolmogorov_survival(0.5) - 0.9639).abs() < 5e-4);
        // the two branches meet continuously
        assert!((kolmogorov_survival(1.0 - 1e-9) - kolmogorov_survival(1.0)).abs() < 1e-8);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
        assert!(kolmogorov_survival(10.0) < 1e-80);
    }

    #[test]
    fn ks_constant_zero_sample() {
        let r = ks_normal(&[0.0; 1000]).unwrap();
        assert!((r.statistic - 0.5).abs() < 1e-15);
        assert!(r.p_value < 1e-100);
    }

    #[test]
    fn ks_p_values_look_uniform() {
        let mut ps = Vec::new();
        let mut rng = rand::rngs::StdRng::seed_from_u64(2024);
        for _ in 0..100 {
            let x: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
            ps.push(ks_normal(&x).unwrap().p_value);
        }
        ps.sort_by(f64::total_cmp);
        let median = 0.5 * (ps[49] + ps[50]);
        // median of 100 uniforms has sd ~ 0.05
        assert!((median - 0.5).abs() < 0.15, "median p = {median}");
    }

    #[test]
    fn ks_marginal_checks() {
        let e = brownian_bridge_ensemble(2_000, 1.0, 3);
        assert_eq!(ks_marginal(&e, 0.5, 0.0), Err(Error::InvalidVariance(0.0)));
        assert_eq!(ks_marginal(&e, 0.55, 1.0), Err(Error::TimeNotOnGrid(0.55)));
        let r = ks_marginal(&e, 0.5, 1.0).unwrap();
        assert!(r.p_value > 1e-3);
        // a wrong variance is detected
        assert!(ks_marginal(&e, 0.5, 4.0).unwrap().p_value < 1e-6);
    }

    fn unit_skeleton(n: i64) -> Skeleton {
        Skeleton::new(vec![FrameSplit::new(1, &[0]).unwrap(); n as usize]).unwrap()
    }

    #[test]
    fn gap_statistic_examples() {
        assert_eq!(gap_statistic(&[unit_skeleton(1)], 1), 0.0);
        assert_eq!(gap_statistic(&[unit_skeleton(8), unit_skeleton(8)], 8), 0.0);
        // (2, 1) has norm sqrt 5 > 8^{1/3} = 2; (2, 0) has norm 2, not above
        let a = Skeleton::new(vec![
            FrameSplit::new(2, &[1]).unwrap(),
            FrameSplit::new(6, &[-1]).unwrap(),
        ])
        .unwrap();
        let b = Skeleton::new(vec![
            FrameSplit::new(2, &[0]).unwrap(),
            FrameSplit::new(2, &[0]).unwrap(),
            FrameSplit::new(2, &[0]).unwrap(),
            FrameSplit::new(2, &[0]).unwrap(),
        ])
        .unwrap();
        assert_eq!(gap_statistic(&[a, b], 8), 0.5);
    }

    #[test]
    fn shrinking_examples() {
        let straight = SawPath::from_coords(&[[0, 0], [1, 0], [2, 0], [3, 0]]).unwrap();
        let sk = Skeleton::of_walk(&straight).unwrap();
        assert_eq!(shrinking_statistic(&straight, &sk, 3).unwrap(), 0.0);

        // regeneration sites (1,1) and (2,0); the off-knot vertices (1,0) and
        // (2,1) sit at distance 1/sqrt(12) from the scaled polyline
        let w = SawPath::from_coords(&[[0, 0], [1, 0], [1, 1], [2, 1], [2, 0], [3, 0]]).unwrap();
        let sk = Skeleton::of_walk(&w).unwrap();
        assert_eq!(sk.len(), 3);
        let s = shrinking_statistic(&w, &sk, 3).unwrap();
        assert!((s - 1.0 / 12f64.sqrt()).abs() < 1e-12);

        assert_eq!(
            shrinking_statistic(&straight, &unit_skeleton(2), 3),
            Err(Error::SkeletonMismatch)
        );
        assert_eq!(
            shrinking_statistic(&straight, &unit_skeleton(3), 4),
            Err(Error::SkeletonMismatch)
        );
    }

    #[test]
    fn from_processes_is_pinned() {
        let sk = Skeleton::new(vec![
            FrameSplit::new(2, &[2]).unwrap(),
            FrameSplit::new(2, &[-2]).unwrap(),
        ])
        .unwrap();
        let p = scale_skeleton(&sk);
        let e = Ensemble::from_processes(4, vec![0.25, 0.5, 0.75], &[p], 1, String::new()).unwrap();
        assert_eq!(e.replicas(), 1);
        assert!((e.value(0, 0, 0) - 0.5).abs() < 1e-15);
        assert!((e.value(0, 1, 0) - 1.0).abs() < 1e-15);
        assert!((e.value(0, 2, 0) - 0.5).abs() < 1e-15);
    }
}
