//! Periodic film profiles and the reference subgraph domain.
//!
//! A [`Profile`] is a lower-semicontinuous, piecewise-linear, periodic
//! height function over one period `[0, l)`, stored as graph nodes plus
//! explicit jump records. Each jump record carries the left limit, right
//! limit, and the pointwise value at the discontinuity; a pointwise value
//! strictly below both limits encodes a vertical cut (a zero-width crack
//! hanging below the graph). The module computes:
//!
//! - the film volume (area of the subgraph over one period),
//! - the surface measure: graph length including vertical walls, plus the
//!   total cut length (cuts are counted twice in the relaxed energy),
//! - hard disk-containment tests against the periodically extended
//!   subgraph (admissibility of dislocation cores),
//! - a sampled interior-ball diagnostic that flags boundary points with no
//!   inward tangent disk of a given radius.
//!
//! Profiles are immutable after construction; construction validates lower
//! semicontinuity, ordering, and nonnegativity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack for geometric comparisons (distances, semicontinuity checks).
/// Sits just above f64 rounding for coordinates of order one.
pub const GEOM_EPS: f64 = 1e-12;

/// Default number of profile nodes per period.
pub const DEFAULT_NODES: usize = 128;

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

/// Discontinuity record at a single abscissa.
///
/// `value` is the pointwise height of the profile at `x`; lower
/// semicontinuity requires `value <= min(left, right)`. A strict
/// inequality encodes a vertical cut from `value` up to `min(left, right)`;
/// `left != right` encodes a vertical wall joining the two graph limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Jump {
    /// Abscissa of the discontinuity; must coincide with a profile node.
    pub x: f64,
    /// Left limit of the height at `x`.
    pub left: f64,
    /// Right limit of the height at `x`.
    pub right: f64,
    /// Pointwise (lower-semicontinuous) height at `x`.
    pub value: f64,
}

impl From<[f64; 4]> for Jump {
    fn from(a: [f64; 4]) -> Self {
        Jump { x: a[0], left: a[1], right: a[2], value: a[3] }
    }
}

impl From<Jump> for [f64; 4] {
    fn from(j: Jump) -> Self {
        [j.x, j.left, j.right, j.value]
    }
}

/// Surface measure of a profile over one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceMeasure {
    /// Length of the extended graph: linear pieces plus vertical walls.
    pub graph_length: f64,
    /// Total length of vertical cuts below the graph.
    pub cut_length: f64,
    /// `graph_length + 2 * cut_length`: cuts count twice (two crack faces).
    pub relaxed_total: f64,
}

impl SurfaceMeasure {
    fn new(graph_length: f64, cut_length: f64) -> Self {
        SurfaceMeasure { graph_length, cut_length, relaxed_total: graph_length + 2.0 * cut_length }
    }
}

/// Kind of boundary piece a diagnostic sample lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PieceKind {
    /// Linear graph piece.
    Graph,
    /// Vertical wall between two graph limits at a jump.
    Wall,
    /// Vertical cut hanging below the graph.
    Cut,
}

/// One sampled boundary point of the interior-ball diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct BallSample {
    /// Sampled boundary point.
    pub point: [f64; 2],
    /// Boundary piece the sample belongs to.
    pub kind: PieceKind,
    /// Whether some inward tangent disk of the requested radius avoids all
    /// other sampled boundary points.
    pub ok: bool,
}

/// Result of [`Profile::interior_ball_diagnostic`].
#[derive(Debug, Clone)]
pub struct InteriorBallReport {
    /// Disk radius tested.
    pub radius: f64,
    /// All sampled boundary points with their verdicts.
    pub samples: Vec<BallSample>,
    /// Number of failing samples.
    pub n_fail: usize,
}

impl InteriorBallReport {
    /// True when every sampled boundary point admits an inward tangent disk.
    pub fn all_pass(&self) -> bool {
        self.n_fail == 0
    }
}

/// Oriented linear boundary piece with its inward candidate directions.
#[derive(Debug, Clone, Copy)]
struct BoundaryPiece {
    a: [f64; 2],
    b: [f64; 2],
    kind: PieceKind,
    /// Unit candidate directions pointing into the domain (one for graph
    /// and wall pieces, two opposite horizontal ones for cuts).
    inward: [[f64; 2]; 2],
    n_inward: usize,
}

/// Periodic lower-semicontinuous piecewise-linear film profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct Profile {
    period: f64,
    nodes: Vec<[f64; 2]>,
    jumps: Vec<Jump>,
    /// Cached linear graph pieces; `segments[i]` runs from `nodes[i]` to the
    /// next node (the last wraps by one period), endpoints replaced by jump
    /// limits where a jump record sits on a node.
    #[serde(skip)]
    segments: Vec<[[f64; 2]; 2]>,
}

/// Serialization shadow of [`Profile`]; validation re-runs on load.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawProfile {
    period: f64,
    nodes: Vec<[f64; 2]>,
    #[serde(default)]
    jumps: Vec<Jump>,
}

impl TryFrom<RawProfile> for Profile {
    type Error = Error;
    fn try_from(raw: RawProfile) -> Result<Profile> {
        Profile::new(raw.period, raw.nodes, raw.jumps)
    }
}

impl From<Profile> for RawProfile {
    fn from(p: Profile) -> RawProfile {
        RawProfile { period: p.period, nodes: p.nodes, jumps: p.jumps }
    }
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

impl Profile {
    /// Builds a profile from explicit nodes and jump records.
    ///
    /// Requirements: `period > 0`; node abscissas strictly increasing in
    /// `[0, period)`; all heights finite and nonnegative; every jump sits
    /// exactly on a node whose height equals the jump value; lower
    /// semicontinuity `value <= min(left, right)` at every jump.
    pub fn new(period: f64, nodes: Vec<[f64; 2]>, jumps: Vec<Jump>) -> Result<Profile> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::Geometry(format!("period must be positive, got {period}")));
        }
        if nodes.is_empty() {
            return Err(Error::Geometry("profile needs at least one node".into()));
        }
        for (i, n) in nodes.iter().enumerate() {
            if !n[0].is_finite() || !n[1].is_finite() {
                return Err(Error::Geometry(format!("node {i} has non-finite coordinates")));
            }
            if n[1] < 0.0 {
                return Err(Error::Geometry(format!("node {i} height {} is negative", n[1])));
            }
            if n[0] < 0.0 || n[0] >= period {
                return Err(Error::Geometry(format!(
                    "node {i} abscissa {} outside [0, {period})",
                    n[0]
                )));
            }
            if i > 0 && n[0] <= nodes[i - 1][0] {
                return Err(Error::Geometry(format!(
                    "node abscissas must be strictly increasing (node {i})"
                )));
            }
        }
        let mut nodes = nodes;
        let mut jumps = jumps;
        jumps.sort_by(|a, b| a.x.total_cmp(&b.x));
        for (k, j) in jumps.iter().enumerate() {
            if k > 0 && j.x == jumps[k - 1].x {
                return Err(Error::Geometry(format!("duplicate jump records at x = {}", j.x)));
            }
            if ![j.x, j.left, j.right, j.value].iter().all(|v| v.is_finite()) {
                return Err(Error::Geometry(format!("jump at x = {} has non-finite data", j.x)));
            }
            if j.left < 0.0 || j.right < 0.0 || j.value < 0.0 {
                return Err(Error::Geometry(format!("jump at x = {} has negative heights", j.x)));
            }
            if j.value > j.left.min(j.right) + GEOM_EPS {
                return Err(Error::Geometry(format!(
                    "jump at x = {} breaks lower semicontinuity: value {} > min(left, right) {}",
                    j.x,
                    j.value,
                    j.left.min(j.right)
                )));
            }
            let ni = nodes
                .iter()
                .position(|n| n[0] == j.x)
                .ok_or_else(|| Error::Geometry(format!("jump at x = {} is not on a node", j.x)))?;
            if (nodes[ni][1] - j.value).abs() > GEOM_EPS {
                return Err(Error::Geometry(format!(
                    "node height {} at x = {} disagrees with jump value {}",
                    nodes[ni][1], j.x, j.value
                )));
            }
            // Canonicalize so pointwise evaluation and the jump agree exactly.
            nodes[ni][1] = j.value;
        }
        let segments = build_segments(period, &nodes, &jumps);
        Ok(Profile { period, nodes, jumps, segments })
    }

    /// Flat profile of constant height with `n` equally spaced nodes.
    pub fn flat(period: f64, height: f64, n: usize) -> Result<Profile> {
        Profile::from_heights(period, &vec![height; n.max(1)])
    }

    /// Profile `mean + amplitude * cos(2 pi x / period)` sampled on `n`
    /// equally spaced nodes. The sampled volume equals `mean * period`
    /// exactly (the cosine sums to zero over a full uniform grid).
    pub fn cosine(period: f64, mean: f64, amplitude: f64, n: usize) -> Result<Profile> {
        let n = n.max(2);
        let heights: Vec<f64> = (0..n)
            .map(|i| mean + amplitude * (2.0 * std::f64::consts::PI * i as f64 / n as f64).cos())
            .collect();
        Profile::from_heights(period, &heights)
    }

    /// Continuous profile from heights on the uniform grid `x_i = i*period/n`.
    pub fn from_heights(period: f64, heights: &[f64]) -> Result<Profile> {
        let n = heights.len();
        let nodes = (0..n).map(|i| [i as f64 * period / n as f64, heights[i]]).collect();
        Profile::new(period, nodes, Vec::new())
    }

    // -----------------------------------------------------------------------
    // Accessors
    // -----------------------------------------------------------------------

    /// Horizontal period of the profile.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Graph nodes `(x, height)` in increasing-`x` order.
    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    /// Jump records in increasing-`x` order.
    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    /// True when the profile has no jump records (graph is continuous).
    pub fn is_continuous(&self) -> bool {
        self.jumps.is_empty()
    }

    // -----------------------------------------------------------------------
    // Pointwise evaluation
    // -----------------------------------------------------------------------

    /// Pointwise (lower-semicontinuous) height at `x`, periodically wrapped.
    pub fn eval(&self, x: f64) -> f64 {
        let xw = wrap(x, self.period);
        if let Some(j) = self.jumps.iter().find(|j| j.x == xw) {
            return j.value;
        }
        let (y, _) = self.interp(xw);
        y
    }

    /// Left and right limits `(h-, h+)` of the height at `x`.
    pub fn limits(&self, x: f64) -> (f64, f64) {
        let xw = wrap(x, self.period);
        if let Some(j) = self.jumps.iter().find(|j| j.x == xw) {
            return (j.left, j.right);
        }
        if let Some(i) = self.nodes.iter().position(|n| n[0] == xw) {
            let prev = self.segments[(i + self.nodes.len() - 1) % self.nodes.len()];
            let next = self.segments[i];
            return (prev[1][1], next[0][1]);
        }
        let (y, _) = self.interp(xw);
        (y, y)
    }

    fn interp(&self, xw: f64) -> (f64, usize) {
        let mut x = xw;
        if x < self.segments[0][0][0] {
            x += self.period;
        }
        // Last segment whose start abscissa is <= x.
        let i = match self
            .segments
            .binary_search_by(|s| s[0][0].partial_cmp(&x).expect("finite abscissa"))
        {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) => i - 1,
        };
        let [[x0, y0], [x1, y1]] = self.segments[i];
        (y0 + (y1 - y0) * (x - x0) / (x1 - x0), i)
    }

    // -----------------------------------------------------------------------
    // Integral quantities
    // -----------------------------------------------------------------------

    /// Area of the subgraph over one period (exact trapezoid rule on the
    /// linear pieces; jumps and cuts have zero area).
    pub fn volume(&self) -> f64 {
        self.segments
            .iter()
            .map(|[[x0, y0], [x1, y1]]| (x1 - x0) * (y0 + y1) * 0.5)
            .sum()
    }

    /// Surface measure over one period: graph pieces plus vertical walls,
    /// and the total vertical cut length.
    pub fn surface_measure(&self) -> SurfaceMeasure {
        let mut graph: f64 = self
            .segments
            .iter()
            .map(|[[x0, y0], [x1, y1]]| (x1 - x0).hypot(y1 - y0))
            .sum();
        let mut cut = 0.0;
        for j in &self.jumps {
            graph += (j.left - j.right).abs();
            cut += j.left.min(j.right) - j.value;
        }
        SurfaceMeasure::new(graph, cut)
    }

    /// Largest height attained by the extended graph.
    pub fn sup_height(&self) -> f64 {
        self.segments
            .iter()
            .flat_map(|s| [s[0][1], s[1][1]])
            .fold(0.0, f64::max)
    }

    /// Smallest height attained, including cut bottoms.
    pub fn min_height(&self) -> f64 {
        let seg_min = self
            .segments
            .iter()
            .flat_map(|s| [s[0][1], s[1][1]])
            .fold(f64::INFINITY, f64::min);
        self.jumps.iter().map(|j| j.value).fold(seg_min, f64::min)
    }

    /// Heights sampled on the uniform grid `x_i = i*period/n`.
    pub fn heights_on_grid(&self, n: usize) -> Vec<f64> {
        (0..n).map(|i| self.eval(i as f64 * self.period / n as f64)).collect()
    }

    /// Profile shifted horizontally by `dx` (periodic translation).
    pub fn translate(&self, dx: f64) -> Result<Profile> {
        let mut nodes: Vec<[f64; 2]> =
            self.nodes.iter().map(|n| [wrap(n[0] + dx, self.period), n[1]]).collect();
        nodes.sort_by(|a, b| a[0].total_cmp(&b[0]));
        let jumps = self
            .jumps
            .iter()
            .map(|j| Jump { x: wrap(j.x + dx, self.period), ..*j })
            .collect();
        Profile::new(self.period, nodes, jumps)
    }

    // -----------------------------------------------------------------------
    // Disk predicates
    // -----------------------------------------------------------------------

    /// True when the closed disk of radius `r` about `center` lies inside
    /// the periodically extended subgraph. Centers closer than `r` to the
    /// substrate (including `y < r`) are rejected.
    pub fn ball_fits(&self, center: [f64; 2], r: f64) -> bool {
        if !(r > 0.0) || center.iter().any(|c| !c.is_finite()) {
            return false;
        }
        if center[1] < r - GEOM_EPS {
            return false;
        }
        let xw = wrap(center[0], self.period);
        if center[1] >= self.eval(xw) {
            return false;
        }
        let c = [xw, center[1]];
        for piece in self.boundary_pieces() {
            for shift in [-self.period, 0.0, self.period] {
                let a = [piece.a[0] + shift, piece.a[1]];
                let b = [piece.b[0] + shift, piece.b[1]];
                if dist_point_segment(c, a, b) < r - GEOM_EPS {
                    return false;
                }
            }
        }
        true
    }

    /// Samples the boundary (graph, walls, cuts) at roughly `samples`
    /// points and tests each for an inward tangent disk of radius `rho`
    /// containing no other sampled boundary point. Convex and flat
    /// boundary regions pass; reflex corners (such as the junction of a
    /// cut with the graph) fail for every radius.
    pub fn interior_ball_diagnostic(&self, rho: f64, samples: usize) -> InteriorBallReport {
        let pieces = self.boundary_pieces();
        let total_len: f64 = pieces.iter().map(|p| seg_len(p.a, p.b)).sum();
        let spacing = total_len / samples.max(8) as f64;

        let mut pts: Vec<([f64; 2], PieceKind, [[f64; 2]; 2], usize)> = Vec::new();
        for p in &pieces {
            let len = seg_len(p.a, p.b);
            let k = ((len / spacing).round() as usize).max(1);
            for i in 0..=k {
                let t = i as f64 / k as f64;
                let pt = [p.a[0] + t * (p.b[0] - p.a[0]), p.a[1] + t * (p.b[1] - p.a[1])];
                pts.push((pt, p.kind, p.inward, p.n_inward));
            }
        }

        let mut out = Vec::with_capacity(pts.len());
        let mut n_fail = 0;
        for (pt, kind, inward, n_inward) in &pts {
            let mut ok = false;
            'candidates: for dir in inward.iter().take(*n_inward) {
                let ctr = [pt[0] + rho * dir[0], pt[1] + rho * dir[1]];
                // The disk must also clear the substrate.
                if ctr[1] < rho - 1e-9 * rho {
                    continue;
                }
                for (q, _, _, _) in &pts {
                    for shift in [-self.period, 0.0, self.period] {
                        let dx = q[0] + shift - ctr[0];
                        let dy = q[1] - ctr[1];
                        if (dx * dx + dy * dy).sqrt() < rho * (1.0 - 1e-9) {
                            continue 'candidates;
                        }
                    }
                }
                ok = true;
                break;
            }
            if !ok {
                n_fail += 1;
            }
            out.push(BallSample { point: *pt, kind: *kind, ok });
        }
        InteriorBallReport { radius: rho, samples: out, n_fail }
    }

    /// Linear boundary pieces over one period: graph segments, jump walls,
    /// and cuts, each with its inward candidate directions.
    fn boundary_pieces(&self) -> Vec<BoundaryPiece> {
        let mut out = Vec::with_capacity(self.segments.len() + 2 * self.jumps.len());
        for s in &self.segments {
            let (a, b) = (s[0], s[1]);
            let len = seg_len(a, b);
            // Domain lies below the graph: inward is the downward normal.
            let inward = [[(b[1] - a[1]) / len, -(b[0] - a[0]) / len], [0.0, 0.0]];
            out.push(BoundaryPiece { a, b, kind: PieceKind::Graph, inward, n_inward: 1 });
        }
        for j in &self.jumps {
            let lo = j.left.min(j.right);
            let hi = j.left.max(j.right);
            if hi - lo > GEOM_EPS {
                // Wall: the domain side is under the higher plateau.
                let dir = if j.left > j.right { [-1.0, 0.0] } else { [1.0, 0.0] };
                out.push(BoundaryPiece {
                    a: [j.x, lo],
                    b: [j.x, hi],
                    kind: PieceKind::Wall,
                    inward: [dir, [0.0, 0.0]],
                    n_inward: 1,
                });
            }
            if lo - j.value > GEOM_EPS {
                // Cut: zero-width crack, domain on both sides.
                out.push(BoundaryPiece {
                    a: [j.x, j.value],
                    b: [j.x, lo],
                    kind: PieceKind::Cut,
                    inward: [[1.0, 0.0], [-1.0, 0.0]],
                    n_inward: 2,
                });
            }
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Helpers
// ---------------------------------------------------------------------------

fn build_segments(period: f64, nodes: &[[f64; 2]], jumps: &[Jump]) -> Vec<[[f64; 2]; 2]> {
    let n = nodes.len();
    let right_of = |x: f64, h: f64| jumps.iter().find(|j| j.x == x).map_or(h, |j| j.right);
    let left_of = |x: f64, h: f64| jumps.iter().find(|j| j.x == x).map_or(h, |j| j.left);
    (0..n)
        .map(|i| {
            let [x0, h0] = nodes[i];
            let [mut x1, h1] = nodes[(i + 1) % n];
            if i + 1 == n {
                x1 += period;
            }
            [[x0, right_of(x0, h0)], [x1, left_of(wrap(x1, period), h1)]]
        })
        .collect()
}

fn wrap(x: f64, period: f64) -> f64 {
    let w = x - period * (x / period).floor();
    // floor() rounding can land exactly on the period for tiny negatives.
    if w >= period {
        w - period
    } else {
        w
    }
}

fn seg_len(a: [f64; 2], b: [f64; 2]) -> f64 {
    (b[0] - a[0]).hypot(b[1] - a[1])
}

/// Euclidean distance from `p` to the closed segment `ab`.
fn dist_point_segment(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 > 0.0 { ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let d = [ap[0] - t * ab[0], ap[1] - t * ab[1]];
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
