//! The regeneration step law.
//!
//! The truncated irreducible two-point function `f_L` is tilted along the first
//! axis, `Q(x) = f_L(x) e^{-m x_1}`, with `m` chosen so `Q` has total mass one.
//! `Phi(m) = sum_x f_L(x) e^{-m x_1}` is a finite sum of decreasing
//! exponentials (every step has `x_1 >= 1`), so the root is unique.

use alloc::vec::Vec;

use crate::enumerate::{check_beta, length_sum, CountTable, WalkClass};
use crate::lattice::{split_frame, FrameSplit, LatticeSite};
use crate::{Error, Result};

/// Target accuracy of `|Phi(m_hat) - 1|`.
pub const PHI_TOLERANCE: f64 = 1e-12;
/// Allowed deviation of a step law's total mass from one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-10;

/// `f_L(x)` for every `x` with `x_1 >= 1`, in `(t, y)` order.
pub fn irreducible_weights(irreducible: &CountTable, beta: f64) -> Result<Vec<(FrameSplit, f64)>> {
    require_class(irreducible, WalkClass::IrreducibleBridge)?;
    check_beta(beta)?;
    let mut out: Vec<(FrameSplit, f64)> = irreducible
        .iter()
        .filter(|(x, _)| x.first() >= 1)
        .map(|(x, row)| (split_frame(x), length_sum(row, beta)))
        .filter(|(_, w)| *w > 0.0)
        .collect();
    out.sort_by_key(|a| a.0);
    Ok(out)
}

fn require_class(table: &CountTable, class: WalkClass) -> Result<()> {
    if table.class() == class {
        Ok(())
    } else {
        Err(Error::WrongClass {
            expected: class,
            found: table.class(),
        })
    }
}

/// `Phi(m) = sum_x w(x) e^{-m x_1}`.
pub fn tilted_mass(weights: &[(FrameSplit, f64)], m: f64) -> f64 {
    weights
        .iter()
        .map(|(x, w)| w * libm::exp(-m * x.t() as f64))
        .sum()
}

/// Solves `Phi(m) = 1` by bisection.
pub fn calibrate_mass(irreducible: &CountTable, beta: f64) -> Result<f64> {
    let weights = irreducible_weights(irreducible, beta)?;
    solve_unit_mass(&weights, irreducible.dim(), beta)
}

fn solve_unit_mass(weights: &[(FrameSplit, f64)], dim: usize, beta: f64) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::EmptyTable);
    }
    let phi = |m: f64| tilted_mass(weights, m);

    // e^{-beta} e^{beta + log 2d} = 2d > 1 whenever the unit step is present
    let mut lo = -beta - libm::log(2.0 * dim as f64);
    let mut step = 1.0;
    while phi(lo) <= 1.0 {
        lo -= step;
        step *= 2.0;
        if !lo.is_finite() {
            return Err(Error::EmptyTable);
        }
    }
    // x_1 >= 1 gives Phi(m) <= e^{-m} sum w for m >= 0
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    let mut hi = libm::log(total).max(0.0) + 1.0;
    step = 1.0;
    while phi(hi) >= 1.0 {
        hi += step;
        step *= 2.0;
    }

    let mut best = (f64::INFINITY, lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let value = phi(mid);
        let err = libm::fabs(value - 1.0);
        if err < best.0 {
            best = (err, mid);
        }
        if err <= PHI_TOLERANCE || mid == lo || mid == hi {
            break;
        }
        if value > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best.1)
}

/// The calibrated step law `Q(x) = f_L(x) e^{-m_hat x_1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepLaw {
    dim: usize,
    beta: f64,
    cutoff: usize,
    m_hat: f64,
    tail_mass: f64,
    steps: Vec<(FrameSplit, f64)>,
}

impl StepLaw {
    /// Reassembles a law from stored parts, checking its invariants.
    pub fn from_parts(
        dim: usize,
        beta: f64,
        cutoff: usize,
        m_hat: f64,
        tail_mass: f64,
        mut steps: Vec<(FrameSplit, f64)>,
    ) -> Result<Self> {
        check_beta(beta)?;
        crate::lattice::check_dim(dim)?;
        steps.sort_by_key(|a| a.0);
        for pair in steps.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::InvalidArgument("duplicate step".into()));
            }
        }
        for (x, p) in &steps {
            if x.dim() != dim {
                return Err(Error::DimensionMismatch);
            }
            if x.t() < 1 {
                return Err(Error::InvalidArgument("steps must advance along the first axis".into()));
            }
            if !(p.is_finite() && *p > 0.0) {
                return Err(Error::InvalidArgument("step probabilities must be positive".into()));
            }
        }
        let total: f64 = steps.iter().map(|(_, p)| p).sum();
        if !(libm::fabs(total - 1.0) <= NORMALIZATION_TOLERANCE) {
            return Err(Error::NormalizationFailure(total));
        }
        Ok(Self {
            dim,
            beta,
            cutoff,
            m_hat,
            tail_mass,
            steps,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Length cutoff of the irreducible table the law was built from.
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn m_hat(&self) -> f64 {
        self.m_hat
    }

    /// `Phi_L(m_hat) - Phi_{L-1}(m_hat)`: mass carried by irreducible bridges of
    /// exactly the cutoff length, a proxy for what truncation leaves out.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Support and probabilities in `(t, y)` order.
    pub fn steps(&self) -> &[(FrameSplit, f64)] {
        &self.steps
    }

    pub fn probability(&self, x: &FrameSplit) -> f64 {
        self.steps
            .binary_search_by(|(s, _)| s.cmp(x))
            .map_or(0.0, |i| self.steps[i].1)
    }

    pub fn total_mass(&self) -> f64 {
        self.steps.iter().map(|(_, p)| p).sum()
    }

    /// `E[x_1]`.
    pub fn mean_advance(&self) -> f64 {
        self.steps.iter().map(|(x, p)| p * x.t() as f64).sum()
    }

    /// Variance of one transverse coordinate, averaged over coordinates.
    pub fn transverse_variance(&self) -> f64 {
        let ydim = (self.dim - 1) as f64;
        self.steps
            .iter()
            .map(|(x, p)| p * x.y().iter().map(|&c| (c * c) as f64).sum::<f64>())
            .sum::<f64>()
            / ydim
    }

    /// Largest transverse coordinate of any step.
    pub fn transverse_reach(&self) -> i64 {
        self.steps
            .iter()
            .flat_map(|(x, _)| x.y().iter().map(|c| c.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn max_advance(&self) -> i64 {
        self.steps.iter().map(|(x, _)| x.t()).max().unwrap_or(0)
    }

    /// `Q(|x| > radius)` with the Euclidean norm.
    pub fn tail_beyond(&self, radius: f64) -> f64 {
        let r2 = radius * radius;
        self.steps
            .iter()
            .filter(|(x, _)| x.norm_sq() as f64 > r2)
            .map(|(_, p)| p)
            .sum()
    }

    /// Limiting bridge variance per transverse coordinate predicted by the
    /// renewal CLT, `Var(y) / E[x_1]`. Reported next to the fitted value; not
    /// used by any estimator.
    pub fn renewal_variance(&self) -> f64 {
        self.transverse_variance() / self.mean_advance()
    }

    /// The same law restricted to steps with `x_1 <= max_t`, renormalized.
    pub fn restricted(&self, max_t: i64) -> Result<Self> {
        let kept: Vec<_> = self.steps.iter().copied().filter(|(x, _)| x.t() <= max_t).collect();
        let total: f64 = kept.iter().map(|(_, p)| p).sum();
        if !(total > 0.0) {
            return Err(Error::EmptyTable);
        }
        let steps = kept.into_iter().map(|(x, p)| (x, p / total)).collect();
        Self::from_parts(self.dim, self.beta, self.cutoff, self.m_hat, self.tail_mass, steps)
    }
}

pub fn build_step_law(irreducible: &CountTable, beta: f64, m_hat: f64) -> Result<StepLaw> {
    let weights = irreducible_weights(irreducible, beta)?;
    if weights.is_empty() {
        return Err(Error::EmptyTable);
    }
    let steps: Vec<(FrameSplit, f64)> = weights
        .iter()
        .map(|&(x, w)| (x, w * libm::exp(-m_hat * x.t() as f64)))
        .collect();
    let cutoff = irreducible.cutoff();
    let tail_mass = irreducible
        .iter()
        .filter(|(x, _)| x.first() >= 1)
        .map(|(x, row)| {
            row[cutoff] as f64 * libm::exp(-beta * cutoff as f64 - m_hat * x.first() as f64)
        })
        .sum();
    StepLaw::from_parts(irreducible.dim(), beta, cutoff, m_hat, tail_mass, steps)
}

/// Calibrates and builds in one go.
pub fn step_law_from_table(irreducible: &CountTable, beta: f64) -> Result<StepLaw> {
    let m_hat = calibrate_mass(irreducible, beta)?;
    build_step_law(irreducible, beta, m_hat)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MassGapReport {
    /// `(1/n) log H_n(0)` for `n = 1..=n_max`.
    pub bridge_rates: Vec<f64>,
    /// `(1/n) log F_n(0)` for `n = 1..=n_max`.
    pub irreducible_rates: Vec<f64>,
    /// Last bridge rate minus last irreducible rate.
    pub gap: f64,
}

/// Slab sums of the truncated `h` and `f` and their finite-`n` decay rates.
pub fn mass_gap_diagnostic(
    bridges: &CountTable,
    irreducible: &CountTable,
    beta: f64,
    n_max: usize,
) -> Result<MassGapReport> {
    require_class(bridges, WalkClass::Bridge)?;
    require_class(irreducible, WalkClass::IrreducibleBridge)?;
    check_beta(beta)?;
    if bridges.dim() != irreducible.dim() || bridges.cutoff() != irreducible.cutoff() {
        return Err(Error::IncompatibleTables);
    }
    if n_max == 0 || n_max > bridges.cutoff() {
        return Err(Error::InvalidArgument("need 1 <= n_max <= L".into()));
    }
    let slab = |table: &CountTable, n: i64| -> f64 {
        table
            .iter()
            .filter(|(x, _)| x.first() == n)
            .map(|(_, row)| length_sum(row, beta))
            .sum()
    };
    let mut bridge_rates = Vec::with_capacity(n_max);
    let mut irreducible_rates = Vec::with_capacity(n_max);
    for n in 1..=n_max as i64 {
        let (h, f) = (slab(bridges, n), slab(irreducible, n));
        if !(h > 0.0 && f > 0.0) {
            return Err(Error::ZeroSlab(n));
        }
        bridge_rates.push(libm::log(h) / n as f64);
        irreducible_rates.push(libm::log(f) / n as f64);
    }
    let gap = bridge_rates[n_max - 1] - irreducible_rates[n_max - 1];
    Ok(MassGapReport {
        bridge_rates,
        irreducible_rates,
        gap,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct OzPrefactor {
    pub tau_hat: f64,
    /// `g_L(n e_1) n^{(d-1)/2} e^{n tau_hat}` for `n = 1..=n_max`.
    pub values: Vec<f64>,
    /// `values[n] / values[n - 1]`.
    pub ratios: Vec<f64>,
}

/// Finite-size check of the Ornstein-Zernike prefactor along the first axis,
/// with the decay rate taken from the mass estimate at `n_max`.
pub fn oz_prefactor_diagnostic(all: &CountTable, beta: f64, n_max: usize) -> Result<OzPrefactor> {
    let tau_hat = all.mass_estimate(beta, n_max)?.estimate;
    oz_prefactor_with_rate(all, beta, n_max, tau_hat)
}

pub fn oz_prefactor_with_rate(
    all: &CountTable,
    beta: f64,
    n_max: usize,
    tau: f64,
) -> Result<OzPrefactor> {
    require_class(all, WalkClass::All)?;
    let exponent = (all.dim() as f64 - 1.0) / 2.0;
    let mut values = Vec::with_capacity(n_max);
    for n in 1..=n_max as i64 {
        let g = all.evaluate_weight(beta, &LatticeSite::on_axis(all.dim(), n)?);
        if g <= 0.0 {
            return Err(Error::ZeroWeight {
                n,
                cutoff: all.cutoff(),
            });
        }
        values.push(g * libm::pow(n as f64, exponent) * libm::exp(n as f64 * tau));
    }
    let ratios = values.windows(2).map(|w| w[1] / w[0]).collect();
    Ok(OzPrefactor {
        tau_hat: tau,
        values,
        ratios,
    })
}
