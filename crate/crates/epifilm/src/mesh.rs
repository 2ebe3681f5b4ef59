//! Structured, boundary-fitted, periodic triangulations of the film domain.
//!
//! The subgraph of a continuous profile over one period is meshed by a
//! tensor grid: `nx` uniformly spaced columns, each scaled vertically to
//! the local film height, `ny` rows, two triangles per cell. Columns `0`
//! and `nx` are the same nodes (strong periodic identification); elements
//! crossing the seam use coordinates shifted by one period so geometry
//! stays consistent. Row `0` is the substrate; row `ny` is the free graph.

use crate::error::{Error, Result};
use crate::geometry::Profile;

/// One triangle with precomputed P1 geometry.
#[derive(Debug, Clone)]
pub struct Element {
    /// Global node ids, counterclockwise.
    pub nodes: [usize; 3],
    /// Vertex coordinates with the periodic shift already applied.
    pub coords: [[f64; 2]; 3],
    /// Triangle area.
    pub area: f64,
    /// Gradients of the three barycentric basis functions.
    pub grads: [[f64; 2]; 3],
}

impl Element {
    /// Edge midpoints: the degree-2 quadrature points (weights `area / 3`).
    pub fn quad_points(&self) -> [[f64; 2]; 3] {
        let [a, b, c] = self.coords;
        [mid(a, b), mid(b, c), mid(c, a)]
    }

    /// Triangle centroid.
    pub fn centroid(&self) -> [f64; 2] {
        let [a, b, c] = self.coords;
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    /// Longest edge length.
    pub fn diameter(&self) -> f64 {
        let [a, b, c] = self.coords;
        dist(a, b).max(dist(b, c)).max(dist(c, a))
    }
}

/// Oriented free-surface edge (top of the film).
#[derive(Debug, Clone, Copy)]
pub struct SurfaceEdge {
    /// Element owning the edge.
    pub element: usize,
    /// Edge endpoints (left, right), shifted coordinates.
    pub a: [f64; 2],
    pub b: [f64; 2],
    /// Outward unit normal.
    pub normal: [f64; 2],
    /// Edge length.
    pub length: f64,
}

/// Structured periodic triangulation of a film subgraph.
#[derive(Debug, Clone)]
pub struct Mesh {
    nx: usize,
    ny: usize,
    period: f64,
    heights: Vec<f64>,
    nodes: Vec<[f64; 2]>,
    elements: Vec<Element>,
    surface: Vec<SurfaceEdge>,
}

impl Mesh {
    /// Meshes the subgraph of a continuous profile with `nx` columns per
    /// period. Rows are chosen so cells stay near unit aspect ratio.
    pub fn build(profile: &Profile, nx: usize) -> Result<Mesh> {
        if !profile.is_continuous() {
            return Err(Error::Mesh("profiles with cuts or walls cannot be meshed".into()));
        }
        if nx < 4 {
            return Err(Error::Mesh(format!("need at least 4 columns, got {nx}")));
        }
        let period = profile.period();
        let heights = profile.heights_on_grid(nx);
        let h_max = heights.iter().fold(0.0f64, |a, &h| a.max(h));
        let h_min = heights.iter().fold(f64::INFINITY, |m, &h| m.min(h));
        if !(h_min > 0.0) {
            return Err(Error::Mesh(format!("film height must stay positive, min is {h_min}")));
        }
        let ny = ((nx as f64 * h_max / period).round() as usize).max(2);

        let n_nodes = nx * (ny + 1);
        let mut nodes = Vec::with_capacity(n_nodes);
        for (i, &h) in heights.iter().enumerate() {
            let x = i as f64 * period / nx as f64;
            for j in 0..=ny {
                nodes.push([x, j as f64 * h / ny as f64]);
            }
        }
        let node_id = |i: usize, j: usize| (i % nx) * (ny + 1) + j;

        let mut elements = Vec::with_capacity(2 * nx * ny);
        let mut surface = Vec::with_capacity(nx);
        for i in 0..nx {
            let shift = if i + 1 == nx { period } else { 0.0 };
            for j in 0..ny {
                let ids = [node_id(i, j), node_id(i + 1, j), node_id(i + 1, j + 1), node_id(i, j + 1)];
                let pa = nodes[ids[0]];
                let pb = add_x(nodes[ids[1]], shift);
                let pc = add_x(nodes[ids[2]], shift);
                let pd = nodes[ids[3]];
                elements.push(make_element([ids[0], ids[1], ids[2]], [pa, pb, pc])?);
                let top = make_element([ids[0], ids[2], ids[3]], [pa, pc, pd])?;
                if j + 1 == ny {
                    // Free-surface edge runs from (i, ny) to (i+1, ny).
                    let (a, b) = (pd, pc);
                    let len = dist(a, b);
                    let normal = [(b[1] - a[1]) / len, -(b[0] - a[0]) / len];
                    // The domain is below the graph: flip if pointing down.
                    let normal = if normal[1] >= 0.0 { normal } else { [-normal[0], -normal[1]] };
                    surface.push(SurfaceEdge {
                        element: elements.len(),
                        a,
                        b,
                        normal,
                        length: len,
                    });
                }
                elements.push(top);
            }
        }
        Ok(Mesh { nx, ny, period, heights, nodes, elements, surface })
    }

    /// Columns per period.
    pub fn nx(&self) -> usize {
        self.nx
    }

    /// Rows of cells per column.
    pub fn ny(&self) -> usize {
        self.ny
    }

    /// Horizontal period.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Column heights the mesh was fitted to.
    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    /// Node coordinates (column-major: node `(i, j)` at `i*(ny+1) + j`).
    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    /// All elements, fixed construction order.
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Free-surface edges, left to right.
    pub fn surface_edges(&self) -> &[SurfaceEdge] {
        &self.surface
    }

    /// Total node count.
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Node id for grid position `(i, j)`; `i` wraps periodically.
    pub fn node_id(&self, i: usize, j: usize) -> usize {
        (i % self.nx) * (self.ny + 1) + j
    }

    /// True when the node lies on the substrate `y = 0`.
    pub fn is_substrate(&self, node: usize) -> bool {
        node % (self.ny + 1) == 0
    }

    /// Surface node id of column `i`.
    pub fn surface_node(&self, i: usize) -> usize {
        self.node_id(i, self.ny)
    }

    /// Largest element diameter.
    pub fn max_diameter(&self) -> f64 {
        self.elements.iter().map(Element::diameter).fold(0.0, f64::max)
    }

    /// Sum of element areas (equals the profile volume up to rounding).
    pub fn total_area(&self) -> f64 {
        self.elements.iter().map(|e| e.area).sum()
    }
}

fn make_element(nodes: [usize; 3], coords: [[f64; 2]; 3]) -> Result<Element> {
    let [a, b, c] = coords;
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    if !(det > 0.0) {
        return Err(Error::Mesh(format!("degenerate element with doubled area {det}")));
    }
    let grads = [
        [(b[1] - c[1]) / det, (c[0] - b[0]) / det],
        [(c[1] - a[1]) / det, (a[0] - c[0]) / det],
        [(a[1] - b[1]) / det, (b[0] - a[0]) / det],
    ];
    Ok(Element { nodes, coords, area: 0.5 * det, grads })
}

fn mid(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [(a[0] + b[0]) * 0.5, (a[1] + b[1]) * 0.5]
}

fn add_x(p: [f64; 2], dx: f64) -> [f64; 2] {
    [p[0] + dx, p[1]]
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_mesh_dimensions_and_area() {
        let p = Profile::flat(1.0, 1.0, 16).unwrap();
        let m = Mesh::build(&p, 16).unwrap();
        assert_eq!(m.nx(), 16);
        assert_eq!(m.ny(), 16);
        assert_eq!(m.n_nodes(), 16 * 17);
        assert_eq!(m.elements().len(), 2 * 16 * 16);
        assert!((m.total_area() - p.volume()).abs() < 1e-12);
        assert_eq!(m.surface_edges().len(), 16);
    }

    #[test]
    fn wavy_mesh_matches_volume_and_resolution() {
        let p = Profile::cosine(1.0, 1.0, 0.2, 32).unwrap();
        let m = Mesh::build(&p, 32).unwrap();
        assert!((m.total_area() - p.volume()).abs() < 1e-12);
        // Edge lengths bounded by a constant over the refinement.
        assert!(m.max_diameter() <= 2.0_f64.sqrt() * 1.2 / 32.0 * 1.5);
        for e in m.elements() {
            assert!(e.area > 0.0);
        }
    }

    #[test]
    fn periodic_identification_shares_nodes() {
        let p = Profile::flat(1.0, 1.0, 8).unwrap();
        let m = Mesh::build(&p, 8).unwrap();
        // Elements in the last column reference column-0 nodes.
        let last_col_elem = &m.elements()[2 * 7 * m.ny()];
        assert!(last_col_elem.nodes.iter().any(|&n| n < m.ny() + 1));
        // Shifted coordinates keep positive area across the seam.
        assert!(last_col_elem.coords[1][0] > 0.9);
    }

    #[test]
    fn basis_gradients_partition_unity() {
        let p = Profile::cosine(1.0, 0.8, 0.1, 12).unwrap();
        let m = Mesh::build(&p, 12).unwrap();
        for e in m.elements() {
            let gx: f64 = e.grads.iter().map(|g| g[0]).sum();
            let gy: f64 = e.grads.iter().map(|g| g[1]).sum();
            assert!(gx.abs() < 1e-12 && gy.abs() < 1e-12);
        }
    }

    #[test]
    fn surface_normals_point_up_and_out() {
        let p = Profile::cosine(1.0, 1.0, 0.15, 24).unwrap();
        let m = Mesh::build(&p, 24).unwrap();
        for s in m.surface_edges() {
            assert!(s.normal[1] > 0.0);
            let n = (s.normal[0].powi(2) + s.normal[1].powi(2)).sqrt();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_cut_profiles_and_zero_height() {
        let p = crate::geometry::Profile::new(
            1.0,
            vec![[0.0, 1.0], [0.5, 0.2]],
            vec![crate::geometry::Jump { x: 0.5, left: 1.0, right: 1.0, value: 0.2 }],
        )
        .unwrap();
        assert!(Mesh::build(&p, 8).is_err());
        let z = Profile::new(1.0, vec![[0.0, 0.0], [0.5, 1.0]], Vec::new()).unwrap();
        assert!(Mesh::build(&z, 8).is_err());
    }
}
