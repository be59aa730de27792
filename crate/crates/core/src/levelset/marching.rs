//! Level-surface extraction on the periodic grid.
//!
//! Each grid cell is split into the six Kuhn tetrahedra sharing the diagonal
//! from corner `000` to corner `111`; the split is the same in every cell,
//! so neighbouring cells agree on their shared faces and the surface is
//! watertight without ambiguous-face handling. Inside a tetrahedron the
//! field is linearly interpolated, so the extracted triangles are exactly
//! the level set of the piecewise-linear interpolant and the sublevel volume
//! is the exact volume that surface encloses.

use alloc::vec::Vec;

use crate::field::ScalarField;
use crate::math::{self, cross, norm, sub, Vec3};

/// Corner offsets of the cube, indexed by `4·dx + 2·dy + dz`.
const CORNERS: [[usize; 3]; 8] =
    [[0, 0, 0], [0, 0, 1], [0, 1, 0], [0, 1, 1], [1, 0, 0], [1, 0, 1], [1, 1, 0], [1, 1, 1]];

/// The six Kuhn tetrahedra: one per axis ordering of the path 000 → 111.
const TETS: [[usize; 4]; 6] = [
    [0, 4, 6, 7], // x, y, z
    [0, 4, 5, 7], // x, z, y
    [0, 2, 6, 7], // y, x, z
    [0, 2, 3, 7], // y, z, x
    [0, 1, 5, 7], // z, x, y
    [0, 1, 3, 7], // z, y, x
];

/// One surface triangle together with where it lives on the grid.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshTriangle {
    /// Vertices in physical coordinates (unwrapped, contiguous).
    pub vertices: [Vec3; 3],
    pub area: f64,
    /// Grid cell containing the triangle.
    pub cell: [usize; 3],
    /// Centroid in the cell's local lattice coordinates, in `[0,1]³`.
    pub local_centroid: Vec3,
}

/// Triangulated level surface `{f = h}` and the enclosed sublevel volume.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelMesh {
    pub height: f64,
    pub triangles: Vec<MeshTriangle>,
    pub area: f64,
    /// Physical volume of `{f < h}` for the piecewise-linear interpolant.
    pub sublevel_volume: f64,
}

impl LevelMesh {
    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }
}

/// Extracts `{f = h}`. Nodes with `f < h` count as inside.
pub fn extract(field: &ScalarField, h: f64) -> LevelMesh {
    let grid = field.grid();
    let torus = grid.torus();
    let n = grid.n();
    let s = field.samples();
    let nf = n as f64;
    // Each Kuhn tetrahedron holds 1/6 of the cell.
    let tet_volume = grid.cell_volume() / 6.0;

    let mut triangles = Vec::new();
    let mut area = 0.0;
    let mut volume_in_tets = 0.0;

    let mut values = [0.0f64; 8];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut below = 0;
                for (c, off) in CORNERS.iter().enumerate() {
                    let v = s[grid.index((i + off[0]) % n, (j + off[1]) % n, (k + off[2]) % n)];
                    values[c] = v;
                    if v < h {
                        below += 1;
                    }
                }
                if below == 0 {
                    continue;
                }
                if below == 8 {
                    volume_in_tets += 6.0;
                    continue;
                }
                let origin = [i as f64, j as f64, k as f64];
                for tet in TETS.iter() {
                    let p = tet.map(|c| {
                        let o = CORNERS[c];
                        [o[0] as f64, o[1] as f64, o[2] as f64]
                    });
                    let v = tet.map(|c| values[c]);
                    let (fraction, tris, count) = clip_tetrahedron(&p, &v, h);
                    volume_in_tets += fraction;
                    for tri in tris.iter().take(count) {
                        let vertices = tri.map(|local| {
                            let lam =
                                [(origin[0] + local[0]) / nf, (origin[1] + local[1]) / nf, (origin[2] + local[2]) / nf];
                            torus.to_physical(lam)
                        });
                        let a = 0.5 * norm(cross(sub(vertices[1], vertices[0]), sub(vertices[2], vertices[0])));
                        let centroid = [
                            (tri[0][0] + tri[1][0] + tri[2][0]) / 3.0,
                            (tri[0][1] + tri[1][1] + tri[2][1]) / 3.0,
                            (tri[0][2] + tri[1][2] + tri[2][2]) / 3.0,
                        ];
                        area += a;
                        triangles.push(MeshTriangle { vertices, area: a, cell: [i, j, k], local_centroid: centroid });
                    }
                }
            }
        }
    }
    LevelMesh { height: h, triangles, area, sublevel_volume: volume_in_tets * tet_volume }
}

/// `∫_{f<h} w` for node weights `w`, with `w` averaged over each
/// tetrahedron. Constant weights reproduce the sublevel volume exactly.
pub fn sublevel_integral(field: &ScalarField, h: f64, weights: &[f64]) -> f64 {
    let grid = field.grid();
    let n = grid.n();
    let s = field.samples();
    let tet_volume = grid.cell_volume() / 6.0;
    let mut acc = 0.0;
    let mut values = [0.0f64; 8];
    let mut w = [0.0f64; 8];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut below = 0;
                for (c, off) in CORNERS.iter().enumerate() {
                    let idx = grid.index((i + off[0]) % n, (j + off[1]) % n, (k + off[2]) % n);
                    values[c] = s[idx];
                    w[c] = weights[idx];
                    if s[idx] < h {
                        below += 1;
                    }
                }
                if below == 0 {
                    continue;
                }
                for tet in TETS.iter() {
                    let mean = tet.iter().map(|&c| w[c]).sum::<f64>() / 4.0;
                    let fraction = if below == 8 {
                        1.0
                    } else {
                        let p = tet.map(|c| CORNERS[c].map(|x| x as f64));
                        clip_tetrahedron(&p, &tet.map(|c| values[c]), h).0
                    };
                    acc += fraction * mean;
                }
            }
        }
    }
    acc * tet_volume
}

/// Point where the edge `a → b` crosses level `h`.
#[inline]
fn crossing(pa: Vec3, pb: Vec3, va: f64, vb: f64, h: f64) -> Vec3 {
    let t = (h - va) / (vb - va);
    [pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1]), pa[2] + t * (pb[2] - pa[2])]
}

#[inline]
fn tet_det(a: Vec3, b: Vec3, c: Vec3, d: Vec3) -> f64 {
    math::dot(sub(b, a), cross(sub(c, a), sub(d, a))).abs()
}

/// Clips one tetrahedron at level `h`. Returns the fraction of its volume
/// below `h` and up to two level triangles in the same local coordinates,
/// with their count.
fn clip_tetrahedron(p: &[Vec3; 4], v: &[f64; 4], h: f64) -> (f64, [[Vec3; 3]; 2], usize) {
    let mut lo = [0usize; 4];
    let mut hi = [0usize; 4];
    let (mut nl, mut nh) = (0, 0);
    for c in 0..4 {
        if v[c] < h {
            lo[nl] = c;
            nl += 1;
        } else {
            hi[nh] = c;
            nh += 1;
        }
    }
    let x = |a: usize, b: usize| crossing(p[a], p[b], v[a], v[b], h);
    let empty = [[[0.0; 3]; 3]; 2];
    match nl {
        0 => (0.0, empty, 0),
        4 => (1.0, empty, 0),
        1 => {
            let a = lo[0];
            let [b, c, d] = [hi[0], hi[1], hi[2]];
            let t = |o: usize| (h - v[a]) / (v[o] - v[a]);
            let fraction = t(b) * t(c) * t(d);
            (fraction, [[x(a, b), x(a, c), x(a, d)], empty[1]], 1)
        }
        3 => {
            let a = hi[0];
            let [b, c, d] = [lo[0], lo[1], lo[2]];
            let t = |o: usize| (v[a] - h) / (v[a] - v[o]);
            let fraction = 1.0 - t(b) * t(c) * t(d);
            (fraction, [[x(b, a), x(c, a), x(d, a)], empty[1]], 1)
        }
        _ => {
            let [a, b] = [lo[0], lo[1]];
            let [c, d] = [hi[0], hi[1]];
            let (qac, qad, qbc, qbd) = (x(a, c), x(a, d), x(b, c), x(b, d));
            // {u < h} is a prism with end triangles (a, qac, qad) and
            // (b, qbc, qbd); its quadrilateral sides are planar.
            let prism = tet_det(p[a], qac, qad, p[b]) + tet_det(qac, qad, p[b], qbc) + tet_det(qad, p[b], qbc, qbd);
            let whole = tet_det(p[0], p[1], p[2], p[3]);
            (prism / whole, [[qac, qad, qbd], [qac, qbd, qbc]], 2)
        }
    }
}
