//! Lowest closed contour on the quasi-momentum cylinder.
//!
//! For a ray velocity `v` let `h(q) = max(Im E₊(q), Im E₋(q)) − v Im q`.
//! Shifting the Bloch integral onto any closed path that winds once around
//! `Re q ∈ [0, 2π)` leaves it unchanged, so `max_path h` bounds the growth
//! along the ray. The smallest such bound over all paths is a mountain-pass
//! level and coincides with the pinching saddle.
//!
//! On a periodic grid the level is found Kruskal-style: cells are switched on
//! in increasing `h`, joined to switched-on neighbours in a union–find that
//! also tracks how many times a path wraps around the cylinder. The first
//! union closing a loop with nonzero winding fixes the level.

use rayon::prelude::*;
use serde::Serialize;

use crate::lattice::LatticeParams;
use crate::scalar::{cplx, Cplx, Real};

/// Minimax level and the grid point where the winding loop closed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PinchLevel<T> {
    pub level: T,
    pub location: Cplx<T>,
}

struct WindingSets {
    parent: Vec<u32>,
    // Winding offset relative to the parent.
    offset: Vec<i32>,
    rank: Vec<u8>,
}

impl WindingSets {
    fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), offset: vec![0; n], rank: vec![0; n] }
    }

    fn find(&mut self, x: usize) -> (usize, i32) {
        let mut path = Vec::new();
        let mut cur = x;
        while self.parent[cur] as usize != cur {
            path.push(cur);
            cur = self.parent[cur] as usize;
        }
        let root = cur;
        // Compress from the node nearest the root outwards.
        for &node in path.iter().rev() {
            let p = self.parent[node] as usize;
            if p != root {
                self.offset[node] += self.offset[p];
            }
            self.parent[node] = root as u32;
        }
        (root, if x == root { 0 } else { self.offset[x] })
    }

    /// Records `pot(b) = pot(a) + shift`. Returns true when `a` and `b` were
    /// already connected with a different winding, i.e. a loop wrapping the
    /// cylinder has just closed.
    fn join(&mut self, a: usize, b: usize, shift: i32) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa + shift != pb;
        }
        // Attach rb below ra: pot(rb) = pa + shift − pb.
        let (child, parent, off) = if self.rank[ra] >= self.rank[rb] {
            (rb, ra, pa + shift - pb)
        } else {
            (ra, rb, pb - shift - pa)
        };
        self.parent[child] = parent as u32;
        self.offset[child] = off;
        if self.rank[child] == self.rank[parent] {
            self.rank[parent] += 1;
        }
        false
    }
}

/// The contour-minimax level for ray velocity `v` on an `n_re × n_im` grid
/// covering `Re q ∈ [0, 2π)`, `|Im q| ≤ q_im_max`.
pub fn pinch_level<T: Real>(params: &LatticeParams<T>, v: T, q_im_max: T, n_re: usize, n_im: usize) -> PinchLevel<T> {
    let n_re = n_re.max(4);
    let n_im = n_im.max(1);
    let point = |j: usize, k: usize| {
        let re = T::TAU() * T::from_count(j) / T::from_count(n_re);
        let im = if n_im == 1 {
            T::zero()
        } else {
            -q_im_max + T::lit(2.0) * q_im_max * T::from_count(k) / T::from_count(n_im - 1)
        };
        cplx(re, im)
    };
    let heights: Vec<T> = (0..n_re * n_im)
        .into_par_iter()
        .map(|idx| {
            let (k, j) = (idx / n_re, idx % n_re);
            let q = point(j, k);
            let centre = params.advective_energy(q);
            let root = params.radicand_complex(q).sqrt();
            let top = (centre + root).im.max((centre - root).im);
            top - v * q.im
        })
        .collect();

    let mut order: Vec<u32> = (0..heights.len() as u32).collect();
    order.par_sort_unstable_by(|&a, &b| {
        heights[a as usize]
            .partial_cmp(&heights[b as usize])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let mut active = vec![false; heights.len()];
    let mut sets = WindingSets::new(heights.len());
    for &cell in &order {
        let cell = cell as usize;
        active[cell] = true;
        let (k, j) = (cell / n_re, cell % n_re);
        // (neighbour, winding shift from cell to neighbour)
        let right = (k * n_re + (j + 1) % n_re, if j + 1 == n_re { 1 } else { 0 });
        let left = (k * n_re + (j + n_re - 1) % n_re, if j == 0 { -1 } else { 0 });
        let mut neighbours = vec![right, left];
        if k + 1 < n_im {
            neighbours.push(((k + 1) * n_re + j, 0));
        }
        if k > 0 {
            neighbours.push(((k - 1) * n_re + j, 0));
        }
        for (nb, shift) in neighbours {
            if active[nb] && sets.join(cell, nb, shift) {
                return PinchLevel { level: heights[cell], location: point(j, k) };
            }
        }
    }
    // Unreachable for n_re ≥ 2: a full row always wraps.
    let last = *order.last().expect("nonempty grid") as usize;
    PinchLevel { level: heights[last], location: point(last % n_re, last / n_re) }
}
