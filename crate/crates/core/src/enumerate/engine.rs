//! Depth-first walk enumeration with prefix splitting.
//!
//! Sites are encoded as linear indices into the box `[-L, L]^d`, which every
//! walk of at most `L` steps stays inside, so no bounds checks are needed on
//! the hot path. Bridge enumerations restrict the search to the half-space
//! `x_1 >= 1` after the first step and track the break-point candidates of the
//! current prefix in a bitmask.

use alloc::vec;
use alloc::vec::Vec;

use crate::lattice::{LatticeSite, MAX_DIM};

#[derive(Clone, Debug)]
pub(crate) struct Geometry {
    dim: usize,
    radius: i64,
    #[cfg_attr(not(test), allow(dead_code))]
    side: usize,
    strides: [usize; MAX_DIM],
    origin: usize,
    volume: usize,
}

impl Geometry {
    pub(crate) fn new(dim: usize, radius: usize) -> Self {
        let side = 2 * radius + 1;
        let mut strides = [0; MAX_DIM];
        let mut stride = 1;
        // axis 0 varies slowest so index order matches site order
        for axis in (0..dim).rev() {
            strides[axis] = stride;
            stride *= side;
        }
        let origin = (0..dim).map(|a| radius * strides[a]).sum();
        Self {
            dim,
            radius: radius as i64,
            side,
            strides,
            origin,
            volume: stride,
        }
    }

    pub(crate) fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn volume(&self) -> usize {
        self.volume
    }

    pub(crate) fn origin(&self) -> usize {
        self.origin
    }

    pub(crate) fn site(&self, mut index: usize) -> LatticeSite {
        let mut coords = [0i64; MAX_DIM];
        for (axis, c) in coords.iter_mut().enumerate().take(self.dim) {
            let q = index / self.strides[axis];
            index -= q * self.strides[axis];
            *c = q as i64 - self.radius;
        }
        LatticeSite::new(&coords[..self.dim]).expect("geometry dimension is validated")
    }

    pub(crate) fn index(&self, site: &LatticeSite) -> Option<usize> {
        let mut index = 0;
        for (axis, &c) in site.coords().iter().enumerate() {
            if c.abs() > self.radius {
                return None;
            }
            index += (c + self.radius) as usize * self.strides[axis];
        }
        Some(index)
    }

    #[cfg(test)]
    fn side(&self) -> usize {
        self.side
    }
}

/// Saved state for undoing one step.
#[derive(Clone, Copy)]
struct Undo {
    t: i64,
    max_t: i64,
    alive: u64,
}

/// The current prefix of a depth-first search.
pub(crate) struct Walker<'g> {
    geom: &'g Geometry,
    visited: Vec<bool>,
    path: Vec<usize>,
    levels: Vec<i64>,
    moves: Vec<u8>,
    t: i64,
    max_t: i64,
    // bit k set: level k is a break point of the prefix so far and the walk has
    // not come back to x_1 <= k since first reaching k + 1
    alive: u64,
    half_space: bool,
}

impl<'g> Walker<'g> {
    pub(crate) fn new(geom: &'g Geometry, half_space: bool) -> Self {
        let mut visited = vec![false; geom.volume()];
        visited[geom.origin()] = true;
        Self {
            geom,
            visited,
            path: vec![geom.origin()],
            levels: vec![0],
            moves: Vec::new(),
            t: 0,
            max_t: 0,
            alive: 0,
            half_space,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.moves.len()
    }

    pub(crate) fn head(&self) -> usize {
        self.path[self.path.len() - 1]
    }

    /// First coordinate of the head.
    pub(crate) fn t(&self) -> i64 {
        self.t
    }

    pub(crate) fn path(&self) -> &[usize] {
        &self.path
    }

    /// First coordinates of every site in the prefix.
    pub(crate) fn levels(&self) -> &[i64] {
        &self.levels
    }

    pub(crate) fn moves(&self) -> &[u8] {
        &self.moves
    }

    pub(crate) fn geometry(&self) -> &Geometry {
        self.geom
    }

    /// The prefix is a bridge. Only meaningful in half-space mode.
    pub(crate) fn is_bridge(&self) -> bool {
        self.half_space && self.t == self.max_t
    }

    /// The prefix is a bridge without break points.
    pub(crate) fn is_irreducible(&self) -> bool {
        self.is_bridge() && self.alive == 0
    }

    fn offset(&self, code: u8) -> (usize, bool) {
        let axis = (code / 2) as usize;
        (self.geom.strides[axis], code.is_multiple_of(2))
    }

    /// Extends the walk by one step if the target is free. Codes `2a` and
    /// `2a + 1` move along `+e_a` and `-e_a`.
    fn push(&mut self, code: u8) -> Option<Undo> {
        let (stride, forward) = self.offset(code);
        let head = self.head();
        let next = if forward { head + stride } else { head - stride };
        let dt = match code {
            0 => 1,
            1 => -1,
            _ => 0,
        };
        let t = self.t + dt;
        if self.half_space && t < 1 {
            return None;
        }
        if self.visited[next] {
            return None;
        }
        let undo = Undo {
            t: self.t,
            max_t: self.max_t,
            alive: self.alive,
        };
        self.visited[next] = true;
        self.path.push(next);
        self.levels.push(t);
        self.moves.push(code);
        self.t = t;
        if self.half_space {
            // levels >= t are no longer separated from the future
            self.alive &= (1u64 << t) - 1;
            if t > self.max_t {
                if self.max_t >= 1 {
                    self.alive |= 1u64 << self.max_t;
                }
                self.max_t = t;
            }
        }
        Some(undo)
    }

    fn pop(&mut self, undo: Undo) {
        let last = self.path.pop().expect("pop on empty walk");
        self.visited[last] = false;
        self.levels.pop();
        self.moves.pop();
        self.t = undo.t;
        self.max_t = undo.max_t;
        self.alive = undo.alive;
    }

    fn replay(&mut self, moves: &[u8]) {
        for &code in moves {
            self.push(code).expect("replayed prefix must be valid");
        }
    }

    fn explore<V: Visitor>(&mut self, visitor: &mut V, max_len: usize) {
        if !visitor.visit(self) || self.len() == max_len {
            return;
        }
        for code in 0..(2 * self.geom.dim() as u8) {
            if let Some(undo) = self.push(code) {
                self.explore(visitor, max_len);
                self.pop(undo);
            }
        }
    }

    fn collect_frontier<V: Visitor>(
        &mut self,
        visitor: &mut V,
        depth: usize,
        frontier: &mut Vec<Vec<u8>>,
    ) {
        if self.len() == depth {
            frontier.push(self.moves.clone());
            return;
        }
        if !visitor.visit(self) {
            return;
        }
        for code in 0..(2 * self.geom.dim() as u8) {
            if let Some(undo) = self.push(code) {
                self.collect_frontier(visitor, depth, frontier);
                self.pop(undo);
            }
        }
    }
}

/// Per-node callback of the search. Results from disjoint subtrees are combined
/// with `merge`, which must not depend on the order of merging for the output
/// to be independent of the thread count.
pub(crate) trait Visitor: Send {
    /// Records the current node; returning `false` prunes its subtree.
    fn visit(&mut self, walker: &Walker<'_>) -> bool;
    #[cfg_attr(not(feature = "std"), allow(dead_code))]
    fn merge(&mut self, other: Self);
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct SearchSpec {
    pub(crate) dim: usize,
    pub(crate) max_len: usize,
    pub(crate) half_space: bool,
    pub(crate) split_depth: usize,
}

/// Runs the search over all walks of length `<= max_len`. Nodes shallower than
/// the split depth are visited serially; each subtree rooted at the split depth
/// is an independent task.
pub(crate) fn search<V, F>(spec: SearchSpec, make: F) -> V
where
    V: Visitor,
    F: Fn() -> V + Sync,
{
    let geom = Geometry::new(spec.dim, spec.max_len.max(1));
    let mut root = make();
    let mut walker = Walker::new(&geom, spec.half_space);
    let depth = spec.split_depth.min(spec.max_len);
    let mut frontier = Vec::new();
    walker.collect_frontier(&mut root, depth, &mut frontier);
    drop(walker);

    let run = |visitor: &mut V, prefix: &[u8]| {
        let mut w = Walker::new(&geom, spec.half_space);
        w.replay(prefix);
        w.explore(visitor, spec.max_len);
    };

    #[cfg(feature = "std")]
    {
        use rayon::prelude::*;
        let merged = frontier
            .par_iter()
            .fold(&make, |mut acc, prefix| {
                run(&mut acc, prefix);
                acc
            })
            .reduce(&make, |mut a, b| {
                a.merge(b);
                a
            });
        root.merge(merged);
    }
    #[cfg(not(feature = "std"))]
    {
        for prefix in &frontier {
            run(&mut root, prefix);
        }
    }
    root
}
