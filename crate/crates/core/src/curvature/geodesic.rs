//! Shortest paths in the graph metric on the 26-neighbour periodic grid.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::field::{Derivatives, ScalarField};
use crate::math::{self, dot, norm, Vec3};

/// Worst-case ratio of 26-neighbour path length to straight-line length
/// in flat space.
pub const STENCIL_FACTOR: f64 = 1.09;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphDiameter {
    /// Largest shortest-path distance found from the source set.
    pub value: f64,
    pub sources: usize,
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Offsets and physical displacements of the 26 neighbours.
fn stencil(field: &ScalarField) -> Vec<([isize; 3], Vec3)> {
    let n = field.n() as f64;
    let torus = field.torus();
    let mut out = Vec::with_capacity(26);
    for di in -1isize..=1 {
        for dj in -1isize..=1 {
            for dk in -1isize..=1 {
                if di == 0 && dj == 0 && dk == 0 {
                    continue;
                }
                let d = torus.to_physical([di as f64 / n, dj as f64 / n, dk as f64 / n]);
                out.push(([di, dj, dk], d));
            }
        }
    }
    out
}

/// Single-source distances. An edge costs the larger of the graph chord
/// `√(|Δx|² + Δf²)` and the midpoint-rule length
/// `|Δx| √(1 + (Df_mid·u)²)`.
pub fn distances_from(field: &ScalarField, derivatives: &Derivatives, source: usize) -> Vec<f64> {
    let grid = field.grid();
    let s = field.samples();
    let st = stencil(field);
    let mut dist = alloc::vec![f64::INFINITY; grid.len()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry { dist: 0.0, node: source });
    while let Some(Entry { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        let [i, j, k] = grid.coords(node);
        for (off, dx) in &st {
            let nb = grid.wrapped_index(i as isize + off[0], j as isize + off[1], k as isize + off[2]);
            let df = s[nb] - s[node];
            let chord = math::sqrt(dot(*dx, *dx) + df * df);
            let g0 = derivatives.gradient[node];
            let g1 = derivatives.gradient[nb];
            let mid = [0.5 * (g0[0] + g1[0]), 0.5 * (g0[1] + g1[1]), 0.5 * (g0[2] + g1[2])];
            let len = norm(*dx);
            let slope = dot(mid, *dx) / len;
            let w = chord.max(len * math::sqrt(1.0 + slope * slope));
            let cand = d + w;
            if cand < dist[nb] {
                dist[nb] = cand;
                heap.push(Entry { dist: cand, node: nb });
            }
        }
    }
    dist
}

/// Diameter estimate from the argmin of `f` and the eight nodes of the
/// half-period sublattice.
pub fn graph_diameter(field: &ScalarField, derivatives: &Derivatives) -> GraphDiameter {
    let grid = field.grid();
    let h = grid.n() / 2;
    let mut sources = alloc::vec![field.argmin()];
    for i in [0, h] {
        for j in [0, h] {
            for k in [0, h] {
                let idx = grid.index(i, j, k);
                if !sources.contains(&idx) {
                    sources.push(idx);
                }
            }
        }
    }
    let value = sources
        .iter()
        .map(|&src| distances_from(field, derivatives, src).into_iter().fold(0.0, f64::max))
        .fold(0.0, f64::max);
    GraphDiameter { value, sources: sources.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{FieldFamily, Grid};
    use crate::lattice::FlatTorus;

    #[test]
    fn flat_cube_diameter_within_stencil_factor() {
        let g = Grid::new(FlatTorus::unit_cube(), 16).unwrap();
        let f = FieldFamily::Zero.sample(g).unwrap();
        let d = graph_diameter(&f, &f.derivatives()).value;
        let exact = 3f64.sqrt() / 2.0;
        assert!(d >= exact - 1e-12 && d <= STENCIL_FACTOR * exact, "{d}");
    }

    #[test]
    fn deeper_well_is_wider() {
        let t = FlatTorus::unit_cube();
        let g = Grid::new(t.clone(), 16).unwrap();
        let mut last = 0.0;
        for depth in [0.05, 0.2, 0.4] {
            let f = FieldFamily::centered_well(&t, depth, 0.3).sample(g.clone()).unwrap();
            let d = graph_diameter(&f, &f.derivatives()).value;
            assert!(d > last && d >= depth);
            last = d;
        }
    }
}
