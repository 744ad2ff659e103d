//! Exact enumeration of self-avoiding walks, bridges and irreducible bridges.
//!
//! Counts are kept per length as exact integers; the fugacity `e^{-beta N}`
//! only enters when a [`CountTable`] is evaluated. All weighted quantities
//! derived from a table are lower bounds truncated at the table's cutoff.

mod anatomy;
pub(crate) mod engine;
mod oracle;

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

pub use anatomy::{break_points_brute_force, classify_bridge, BridgeAnatomy};
pub use oracle::{
    exact_conditioned_skeleton_law, product_skeleton_law, skeleton_counts_exhaustive,
    skeleton_counts_product, SkeletonCounts, SkeletonLaw,
};

use engine::{search, SearchSpec, Visitor, Walker};

use crate::lattice::{check_dim, LatticeSite};
use crate::{Error, Result};

/// Hard ceiling on the cutoff; the break-point mask holds one bit per level.
pub const MAX_CUTOFF: usize = 62;

/// Which walks a [`CountTable`] counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WalkClass {
    All,
    Bridge,
    IrreducibleBridge,
}

impl WalkClass {
    pub fn tag(self) -> u8 {
        match self {
            WalkClass::All => 0,
            WalkClass::Bridge => 1,
            WalkClass::IrreducibleBridge => 2,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(WalkClass::All),
            1 => Some(WalkClass::Bridge),
            2 => Some(WalkClass::IrreducibleBridge),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            WalkClass::All => "all",
            WalkClass::Bridge => "bridge",
            WalkClass::IrreducibleBridge => "irreducible",
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerationOptions {
    /// Prefix length at which the search tree is cut into independent tasks.
    pub split_depth: usize,
    /// Refuse runs whose estimated node count exceeds this.
    pub node_budget: f64,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        // admits d = 2, L = 24 for all walks and nothing larger
        Self {
            split_depth: 6,
            node_budget: 3.0e10,
        }
    }
}

/// Rough upper estimate of the search-tree size for walks of length `<= cutoff`,
/// from the connective constants of `Z^2`, `Z^3`, `Z^4`.
pub fn estimated_nodes(dim: usize, cutoff: usize) -> f64 {
    let mu: f64 = match dim {
        2 => 2.638,
        3 => 4.684,
        _ => 6.774,
    };
    1.2 * libm::pow(mu, cutoff as f64 + 1.0) / (mu - 1.0)
}

/// Exact per-length counts of walks `0 -> x` of one class, for every endpoint
/// `x` with at least one such walk of length `<= cutoff`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    dim: usize,
    cutoff: usize,
    class: WalkClass,
    counts: BTreeMap<LatticeSite, Vec<u128>>,
}

impl CountTable {
    /// Assembles a table from stored counts. Endpoints with all-zero arrays are dropped.
    pub fn from_parts(
        dim: usize,
        cutoff: usize,
        class: WalkClass,
        counts: BTreeMap<LatticeSite, Vec<u128>>,
    ) -> Result<Self> {
        check_dim(dim)?;
        let mut kept = BTreeMap::new();
        for (site, row) in counts {
            if site.dim() != dim {
                return Err(Error::DimensionMismatch);
            }
            if row.len() != cutoff + 1 {
                return Err(Error::InvalidArgument(alloc::format!(
                    "count array for {site:?} has {} entries, expected {}",
                    row.len(),
                    cutoff + 1
                )));
            }
            if row.iter().any(|&c| c != 0) {
                kept.insert(site, row);
            }
        }
        Ok(Self {
            dim,
            cutoff,
            class,
            counts: kept,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn class(&self) -> WalkClass {
        self.class
    }

    /// Per-length counts for walks ending at `site`, if any exist.
    pub fn counts(&self, site: &LatticeSite) -> Option<&[u128]> {
        self.counts.get(site).map(Vec::as_slice)
    }

    pub fn count(&self, site: &LatticeSite, length: usize) -> u128 {
        self.counts(site)
            .and_then(|row| row.get(length).copied())
            .unwrap_or(0)
    }

    /// Endpoints in increasing order with their count arrays.
    pub fn iter(&self) -> impl Iterator<Item = (&LatticeSite, &[u128])> {
        self.counts.iter().map(|(s, row)| (s, row.as_slice()))
    }

    pub fn num_endpoints(&self) -> usize {
        self.counts.len()
    }

    fn require(&self, class: WalkClass) -> Result<()> {
        if self.class == class {
            Ok(())
        } else {
            Err(Error::WrongClass {
                expected: class,
                found: self.class,
            })
        }
    }

    /// `c_N` for `N = 0..=cutoff` and the sequence `c_N^{1/N}`.
    pub fn total_counts(&self) -> Result<Totals> {
        self.require(WalkClass::All)?;
        let mut counts = vec![0u128; self.cutoff + 1];
        for row in self.counts.values() {
            for (c, r) in counts.iter_mut().zip(row) {
                *c += r;
            }
        }
        let roots = counts
            .iter()
            .enumerate()
            .map(|(n, &c)| {
                if n == 0 {
                    None
                } else {
                    Some(libm::pow(c as f64, 1.0 / n as f64))
                }
            })
            .collect();
        Ok(Totals { counts, roots })
    }

    /// `sum_{N <= L} counts(x)[N] e^{-beta N}`: the truncated two-point function
    /// of this class (`g`, `h` or `f`) at `x`.
    pub fn evaluate_weight(&self, beta: f64, site: &LatticeSite) -> f64 {
        self.counts(site).map_or(0.0, |row| length_sum(row, beta))
    }

    /// Truncated bubble diagram `sum_x g(x)^2`.
    pub fn bubble_diagram(&self, beta: f64) -> Result<f64> {
        self.require(WalkClass::All)?;
        check_beta(beta)?;
        Ok(self
            .counts
            .values()
            .map(|row| {
                let w = length_sum(row, beta);
                w * w
            })
            .sum())
    }

    /// Finite-distance mass proxies `-log g(n e_1) / n` for `n = 1..=n_max`.
    pub fn mass_estimate(&self, beta: f64, n_max: usize) -> Result<MassEstimate> {
        self.require(WalkClass::All)?;
        check_beta(beta)?;
        if n_max == 0 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        let mut sequence = Vec::with_capacity(n_max);
        for n in 1..=n_max as i64 {
            let w = self.evaluate_weight(beta, &LatticeSite::on_axis(self.dim, n)?);
            if w <= 0.0 {
                return Err(Error::ZeroWeight {
                    n,
                    cutoff: self.cutoff,
                });
            }
            sequence.push(-libm::log(w) / n as f64);
        }
        let estimate = sequence[sequence.len() - 1];
        Ok(MassEstimate { sequence, estimate })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Totals {
    /// `c_N` indexed by `N`.
    pub counts: Vec<u128>,
    /// `c_N^{1/N}`; undefined for `N = 0`.
    pub roots: Vec<Option<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MassEstimate {
    pub sequence: Vec<f64>,
    pub estimate: f64,
}

pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta.is_finite() && beta > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidBeta(beta))
    }
}

/// `sum_N row[N] e^{-beta N}`, summed from the longest length down.
pub(crate) fn length_sum(row: &[u128], beta: f64) -> f64 {
    row.iter()
        .enumerate()
        .rev()
        .filter(|(_, &c)| c != 0)
        .map(|(n, &c)| c as f64 * libm::exp(-beta * n as f64))
        .sum()
}

enum Store {
    Dense(Vec<u128>),
    Sparse(BTreeMap<usize, Vec<u128>>),
}

struct CountSink {
    class: WalkClass,
    width: usize,
    store: Store,
}

impl CountSink {
    fn new(class: WalkClass, dim: usize, volume: usize, width: usize) -> Self {
        let store = if dim == 2 {
            Store::Dense(vec![0; volume * width])
        } else {
            Store::Sparse(BTreeMap::new())
        };
        Self {
            class,
            width,
            store,
        }
    }
}

impl Visitor for CountSink {
    fn visit(&mut self, w: &Walker<'_>) -> bool {
        let record = match self.class {
            WalkClass::All => true,
            WalkClass::Bridge => w.len() == 0 || w.is_bridge(),
            WalkClass::IrreducibleBridge => w.len() == 0 || w.is_irreducible(),
        };
        if record {
            let (head, len) = (w.head(), w.len());
            match &mut self.store {
                Store::Dense(v) => v[head * self.width + len] += 1,
                Store::Sparse(m) => {
                    m.entry(head).or_insert_with(|| vec![0; self.width])[len] += 1;
                }
            }
        }
        true
    }

    fn merge(&mut self, other: Self) {
        match (&mut self.store, other.store) {
            (Store::Dense(a), Store::Dense(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
            }
            (Store::Sparse(a), Store::Sparse(b)) => {
                for (k, row) in b {
                    let dst = a.entry(k).or_insert_with(|| vec![0; row.len()]);
                    for (x, y) in dst.iter_mut().zip(row) {
                        *x += y;
                    }
                }
            }
            _ => unreachable!("sinks of one search share a layout"),
        }
    }
}

/// Enumerates every walk of the class with at most `cutoff` steps.
pub fn enumerate_counts(dim: usize, cutoff: usize, class: WalkClass) -> Result<CountTable> {
    enumerate_counts_with(dim, cutoff, class, &EnumerationOptions::default())
}

pub fn enumerate_counts_with(
    dim: usize,
    cutoff: usize,
    class: WalkClass,
    options: &EnumerationOptions,
) -> Result<CountTable> {
    check_dim(dim)?;
    check_cutoff(dim, cutoff, options)?;
    let spec = SearchSpec {
        dim,
        max_len: cutoff,
        half_space: class != WalkClass::All,
        split_depth: options.split_depth,
    };
    let geom = engine::Geometry::new(dim, cutoff.max(1));
    let width = cutoff + 1;
    let sink = search(spec, || CountSink::new(class, dim, geom.volume(), width));

    let mut counts = BTreeMap::new();
    match sink.store {
        Store::Dense(v) => {
            for (idx, row) in v.chunks_exact(width).enumerate() {
                if row.iter().any(|&c| c != 0) {
                    counts.insert(geom.site(idx), row.to_vec());
                }
            }
        }
        Store::Sparse(m) => {
            for (idx, row) in m {
                counts.insert(geom.site(idx), row);
            }
        }
    }
    CountTable::from_parts(dim, cutoff, class, counts)
}

pub(crate) fn check_cutoff(dim: usize, cutoff: usize, options: &EnumerationOptions) -> Result<()> {
    if cutoff > MAX_CUTOFF {
        return Err(Error::CutoffUnsupported {
            cutoff,
            limit: MAX_CUTOFF,
        });
    }
    let estimated = estimated_nodes(dim, cutoff);
    if estimated > options.node_budget {
        return Err(Error::CutoffTooLarge {
            estimated,
            budget: options.node_budget,
        });
    }
    Ok(())
}

/// Right-hand side of the count-level Ornstein-Zernike equation at `v`:
/// `sum_u sum_M irr(u)[M] bridge(v - u)[N - M]` over `1 <= u_1 <= v_1`, for
/// every `N <= cutoff`. Equals `bridge(v)` whenever `v_1 >= 1`.
pub fn first_break_convolution(
    irreducible: &CountTable,
    bridges: &CountTable,
    v: &LatticeSite,
) -> Result<Vec<u128>> {
    irreducible.require(WalkClass::IrreducibleBridge)?;
    bridges.require(WalkClass::Bridge)?;
    if irreducible.dim != bridges.dim
        || irreducible.cutoff != bridges.cutoff
        || v.dim() != bridges.dim
    {
        return Err(Error::IncompatibleTables);
    }
    let width = bridges.cutoff + 1;
    let mut out = vec![0u128; width];
    for (u, irr_row) in irreducible.iter() {
        if u.first() < 1 || u.first() > v.first() {
            continue;
        }
        let Some(rest) = bridges.counts(&(*v - *u)) else {
            continue;
        };
        for (m, &a) in irr_row.iter().enumerate().filter(|(_, &a)| a != 0) {
            for (k, &b) in rest.iter().enumerate().take(width - m) {
                out[m + k] += a * b;
            }
        }
    }
    Ok(out)
}
