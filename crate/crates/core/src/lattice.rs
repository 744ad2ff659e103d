//! Sites of `Z^d`, nearest-neighbour walks and the `[t, y]` coordinate frame
//! that separates the first axis from the transverse block.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Neg, Sub};

use crate::{Error, Result};

/// Largest supported lattice dimension.
pub const MAX_DIM: usize = 4;

pub(crate) fn check_dim(dim: usize) -> Result<()> {
    if (2..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(dim))
    }
}

/// A point of `Z^d`, `2 <= d <= 4`. Unused coordinate slots are always zero so
/// the derived ordering is lexicographic on the live coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeSite {
    dim: u8,
    coords: [i64; MAX_DIM],
}

impl LatticeSite {
    pub fn new(coords: &[i64]) -> Result<Self> {
        check_dim(coords.len())?;
        let mut c = [0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Self {
            dim: coords.len() as u8,
            coords: c,
        })
    }

    pub fn origin(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim: dim as u8,
            coords: [0; MAX_DIM],
        })
    }

    /// The point `(n, 0, ..., 0)`.
    pub fn on_axis(dim: usize, n: i64) -> Result<Self> {
        let mut site = Self::origin(dim)?;
        site.coords[0] = n;
        Ok(site)
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords[..self.dim()]
    }

    /// First coordinate.
    pub fn first(&self) -> i64 {
        self.coords[0]
    }

    pub fn l1_norm(&self) -> i64 {
        self.coords().iter().map(|c| c.abs()).sum()
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// True when `other` differs from `self` by one unit in exactly one coordinate.
    pub fn is_neighbor(&self, other: &Self) -> bool {
        self.dim == other.dim && (*self - *other).l1_norm() == 1
    }
}

impl fmt::Debug for LatticeSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for LatticeSite {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.coords.iter_mut().zip(rhs.coords) {
            *a += b;
        }
        self
    }
}

impl Sub for LatticeSite {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        for (a, b) in self.coords.iter_mut().zip(rhs.coords) {
            *a -= b;
        }
        self
    }
}

/// A site written as `[t, y]`: `t` is the first coordinate, `y` the remaining
/// `d - 1` transverse coordinates. Ordered lexicographically by `(t, y)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FrameSplit {
    t: i64,
    y: [i64; MAX_DIM - 1],
    ydim: u8,
}

impl FrameSplit {
    pub fn new(t: i64, y: &[i64]) -> Result<Self> {
        check_dim(y.len() + 1)?;
        let mut yy = [0; MAX_DIM - 1];
        yy[..y.len()].copy_from_slice(y);
        Ok(Self {
            t,
            y: yy,
            ydim: y.len() as u8,
        })
    }

    pub fn t(&self) -> i64 {
        self.t
    }

    pub fn y(&self) -> &[i64] {
        &self.y[..self.ydim as usize]
    }

    /// Lattice dimension `d` (one more than the transverse dimension).
    pub fn dim(&self) -> usize {
        self.ydim as usize + 1
    }

    pub fn y_is_zero(&self) -> bool {
        self.y.iter().all(|&c| c == 0)
    }

    pub fn norm_sq(&self) -> i64 {
        self.t * self.t + self.y().iter().map(|c| c * c).sum::<i64>()
    }

    /// Reflects the transverse block, leaving `t` alone.
    pub fn reflect_transverse(mut self) -> Self {
        for c in self.y.iter_mut() {
            *c = -*c;
        }
        self
    }
}

impl fmt::Debug for FrameSplit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}; {:?}]", self.t, self.y())
    }
}

impl Add for FrameSplit {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        debug_assert_eq!(self.ydim, rhs.ydim);
        self.t += rhs.t;
        for (a, b) in self.y.iter_mut().zip(rhs.y) {
            *a += b;
        }
        self
    }
}

impl Sub for FrameSplit {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for FrameSplit {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.t = -self.t;
        self.reflect_transverse()
    }
}

pub fn split_frame(site: &LatticeSite) -> FrameSplit {
    let mut y = [0; MAX_DIM - 1];
    y.copy_from_slice(&site.coords[1..]);
    FrameSplit {
        t: site.coords[0],
        y,
        ydim: site.dim - 1,
    }
}

pub fn join_frame(split: &FrameSplit) -> LatticeSite {
    let mut coords = [0; MAX_DIM];
    coords[0] = split.t;
    coords[1..].copy_from_slice(&split.y);
    LatticeSite {
        dim: split.ydim + 1,
        coords,
    }
}

impl From<LatticeSite> for FrameSplit {
    fn from(site: LatticeSite) -> Self {
        split_frame(&site)
    }
}

impl From<FrameSplit> for LatticeSite {
    fn from(split: FrameSplit) -> Self {
        join_frame(&split)
    }
}

/// True iff consecutive sites are nearest neighbours and no site repeats.
/// An empty list is rejected.
pub fn is_self_avoiding(sites: &[LatticeSite]) -> bool {
    let Some(first) = sites.first() else {
        return false;
    };
    if sites.iter().any(|s| s.dim != first.dim) {
        return false;
    }
    if !sites.windows(2).all(|w| w[0].is_neighbor(&w[1])) {
        return false;
    }
    let mut seen = BTreeSet::new();
    sites.iter().all(|s| seen.insert(*s))
}

/// A self-avoiding nearest-neighbour walk. Construction validates both invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SawPath {
    sites: Vec<LatticeSite>,
}

impl SawPath {
    pub fn new(sites: Vec<LatticeSite>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::EmptyPath);
        }
        if !is_self_avoiding(&sites) {
            return Err(Error::NotSelfAvoiding);
        }
        Ok(Self { sites })
    }

    /// Builds a path from integer coordinate tuples.
    pub fn from_coords<C: AsRef<[i64]>>(coords: &[C]) -> Result<Self> {
        let sites = coords
            .iter()
            .map(|c| LatticeSite::new(c.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sites)
    }

    pub(crate) fn from_sites_unchecked(sites: Vec<LatticeSite>) -> Self {
        debug_assert!(is_self_avoiding(&sites));
        Self { sites }
    }

    pub fn sites(&self) -> &[LatticeSite] {
        &self.sites
    }

    /// Number of steps.
    pub fn len(&self) -> usize {
        self.sites.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.sites[0].dim()
    }

    pub fn start(&self) -> LatticeSite {
        self.sites[0]
    }

    pub fn end(&self) -> LatticeSite {
        self.sites[self.sites.len() - 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn site(c: &[i64]) -> LatticeSite {
        LatticeSite::new(c).unwrap()
    }

    #[test]
    fn self_avoidance_examples() {
        assert!(is_self_avoiding(&[site(&[0, 0])]));
        let loop_back = [[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]].map(|c| site(&c));
        assert!(!is_self_avoiding(&loop_back));
        let staircase = [[0, 0], [1, 0], [2, 0], [2, 1]].map(|c| site(&c));
        assert!(is_self_avoiding(&staircase));
        assert!(!is_self_avoiding(&[]));
        // diagonal jump
        assert!(!is_self_avoiding(&[site(&[0, 0]), site(&[1, 1])]));
    }

    #[test]
    fn saw_path_rejects_invalid() {
        assert_eq!(SawPath::new(vec![]), Err(Error::EmptyPath));
        assert_eq!(
            SawPath::from_coords(&[[0, 0], [1, 0], [0, 0]]),
            Err(Error::NotSelfAvoiding)
        );
        let p = SawPath::from_coords(&[[0, 0, 0], [0, 0, 1]]).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.dim(), 3);
    }

    #[test]
    fn frame_split_examples() {
        let s = split_frame(&site(&[5, -2]));
        assert_eq!(s.t(), 5);
        assert_eq!(s.y(), &[-2]);
        let o = split_frame(&LatticeSite::origin(3).unwrap());
        assert_eq!(o.t(), 0);
        assert!(o.y_is_zero());
        assert_eq!(o.y().len(), 2);
    }

    #[test]
    fn dimension_range() {
        assert_eq!(LatticeSite::new(&[1]), Err(Error::UnsupportedDimension(1)));
        assert!(LatticeSite::new(&[1, 2, 3, 4, 5]).is_err());
    }

    fn arb_site() -> impl Strategy<Value = LatticeSite> {
        (2usize..=4).prop_flat_map(|d| {
            proptest::collection::vec(-1_000_000i64..1_000_000, d)
                .prop_map(|c| LatticeSite::new(&c).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn split_join_round_trip(s in arb_site()) {
            prop_assert_eq!(join_frame(&split_frame(&s)), s);
            let f = split_frame(&s);
            prop_assert_eq!(split_frame(&join_frame(&f)), f);
        }

        #[test]
        fn monotone_paths_are_self_avoiding(moves in proptest::collection::vec(0usize..2, 0..40)) {
            // steps along +e1 or +e2 only: strictly increasing coordinate sum
            let mut sites = vec![site(&[0, 0])];
            for m in moves {
                let mut c = [sites.last().unwrap().coords()[0], sites.last().unwrap().coords()[1]];
                c[m] += 1;
                sites.push(site(&c));
            }
            prop_assert!(is_self_avoiding(&sites));
        }

        #[test]
        fn duplicates_are_rejected(moves in proptest::collection::vec(0usize..4, 1..30), at in 0usize..30) {
            let mut sites = vec![site(&[0, 0])];
            for m in moves {
                let last = *sites.last().unwrap();
                let step = match m { 0 => [1, 0], 1 => [-1, 0], 2 => [0, 1], _ => [0, -1] };
                sites.push(last + site(&step));
            }
            let dup = sites[at % sites.len()];
            sites.push(dup);
            prop_assert!(!is_self_avoiding(&sites));
        }
    }
}
