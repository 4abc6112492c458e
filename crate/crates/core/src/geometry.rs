//! Projective geometry kernel: homography estimation, refinement,
//! application, composition, and inversion.
//!
//! Homographies are estimated from four corner correspondences with a
//! Hartley-normalized direct linear transform (the eight-unknown inhomogeneous
//! form solved by Gaussian elimination with partial pivoting), and optionally
//! refined over larger correspondence sets with a Levenberg-Marquardt loop
//! minimizing the symmetric transfer error. All geometry runs in `f64`;
//! only pixel buffers elsewhere in the crate use narrower types.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Determinant threshold below which a normalized matrix is rejected as
/// singular, and projective depth threshold for point mapping.
const SINGULAR_EPS: f64 = 1e-12;

/// A 2D point in pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

impl From<(f64, f64)> for Point2 {
    fn from((x, y): (f64, f64)) -> Self {
        Point2::new(x, y)
    }
}

/// A 3×3 projective transform relating pixel coordinates of two planes.
///
/// Stored scale-normalized: `m[2][2] == 1` whenever that entry is
/// representable (relative magnitude ≥ 1e-9), otherwise at unit Frobenius
/// norm with a deterministic sign. Construction rejects matrices whose
/// normalized determinant magnitude is below 1e-12.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Homography {
    m: [[f64; 3]; 3],
}

impl Homography {
    /// Builds a homography from a row-major 3×3 matrix, normalizing scale
    /// and checking invertibility.
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Result<Self> {
        for row in &m {
            for v in row {
                if !v.is_finite() {
                    return Err(Error::SingularSystem {
                        detail: "non-finite matrix entry".into(),
                    });
                }
            }
        }
        let normalized = normalize_scale(m);
        let det = det3(&normalized);
        if det.abs() <= SINGULAR_EPS {
            return Err(Error::SingularSystem {
                detail: format!("determinant {det:.3e} after normalization"),
            });
        }
        Ok(Homography { m: normalized })
    }

    pub fn identity() -> Self {
        Homography {
            m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Anisotropic scaling about the origin.
    pub fn scaling(sx: f64, sy: f64) -> Result<Self> {
        Homography::from_matrix([[sx, 0.0, 0.0], [0.0, sy, 0.0], [0.0, 0.0, 1.0]])
    }

    pub fn translation(tx: f64, ty: f64) -> Self {
        Homography {
            m: [[1.0, 0.0, tx], [0.0, 1.0, ty], [0.0, 0.0, 1.0]],
        }
    }

    /// Row-major matrix entries.
    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    /// Row-major 9-element view, the serialization order.
    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.m;
        [
            m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2],
        ]
    }

    pub fn from_row_major(v: &[f64; 9]) -> Result<Self> {
        Homography::from_matrix([[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]])
    }

    /// Frobenius distance between normalized forms.
    pub fn frobenius_distance(&self, other: &Homography) -> f64 {
        let mut s = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                let d = self.m[r][c] - other.m[r][c];
                s += d * d;
            }
        }
        s.sqrt()
    }
}

impl serde::Serialize for Homography {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_row_major().serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for Homography {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = <[f64; 9]>::deserialize(deserializer)?;
        Homography::from_row_major(&v).map_err(serde::de::Error::custom)
    }
}

/// Four corners in fixed semantic order: anchor corner first, then
/// counter-clockwise in image coordinates (positive shoelace sum with the
/// y axis pointing down).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrilateral {
    corners: [Point2; 4],
}

impl serde::Serialize for Quadrilateral {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let wire: [[f64; 2]; 4] = [
            [self.corners[0].x, self.corners[0].y],
            [self.corners[1].x, self.corners[1].y],
            [self.corners[2].x, self.corners[2].y],
            [self.corners[3].x, self.corners[3].y],
        ];
        wire.serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for Quadrilateral {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let wire = <[[f64; 2]; 4]>::deserialize(deserializer)?;
        Quadrilateral::new(wire.map(|[x, y]| Point2::new(x, y))).map_err(serde::de::Error::custom)
    }
}

impl Quadrilateral {
    /// Validates simplicity, orientation, area, and collinearity.
    pub fn new(corners: [Point2; 4]) -> Result<Self> {
        for (i, c) in corners.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::DegenerateQuad {
                    detail: format!("corner {i} is not finite"),
                });
            }
        }
        let area = signed_area(&corners);
        if !(area >= 1.0) {
            return Err(Error::DegenerateQuad {
                detail: format!("signed area {area:.4} px^2 (need >= 1 in anchor-first order)"),
            });
        }
        // No three corners collinear: all four corner triangles must have
        // area above threshold.
        for skip in 0..4 {
            let tri: Vec<&Point2> = (0..4).filter(|&i| i != skip).map(|i| &corners[i]).collect();
            let t = triangle_area(tri[0], tri[1], tri[2]).abs();
            if t <= 1e-6 {
                return Err(Error::DegenerateQuad {
                    detail: format!("three corners nearly collinear (triangle area {t:.3e})"),
                });
            }
        }
        // Simple: opposite edges must not properly intersect.
        if segments_intersect(&corners[0], &corners[1], &corners[2], &corners[3])
            || segments_intersect(&corners[1], &corners[2], &corners[3], &corners[0])
        {
            return Err(Error::DegenerateQuad {
                detail: "self-intersecting corner order".into(),
            });
        }
        Ok(Quadrilateral { corners })
    }

    pub fn corners(&self) -> &[Point2; 4] {
        &self.corners
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.corners)
    }

    /// Axis-aligned bounding box as (min, max).
    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut min = self.corners[0];
        let mut max = self.corners[0];
        for c in &self.corners[1..] {
            min.x = min.x.min(c.x);
            min.y = min.y.min(c.y);
            max.x = max.x.max(c.x);
            max.y = max.y.max(c.y);
        }
        (min, max)
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Quadrilateral {
        let mut corners = self.corners;
        for c in &mut corners {
            c.x += dx;
            c.y += dy;
        }
        Quadrilateral { corners }
    }

    /// Even-odd test; points exactly on an edge count as inside.
    pub fn contains(&self, p: Point2) -> bool {
        let c = &self.corners;
        let mut inside = false;
        let mut j = 3;
        for i in 0..4 {
            // On-edge check first so boundary points are deterministic.
            if point_on_segment(&p, &c[j], &c[i]) {
                return true;
            }
            if (c[i].y > p.y) != (c[j].y > p.y) {
                let t = (p.y - c[j].y) / (c[i].y - c[j].y);
                let x = c[j].x + t * (c[i].x - c[j].x);
                if p.x < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }
}

fn signed_area(c: &[Point2; 4]) -> f64 {
    let mut s = 0.0;
    for i in 0..4 {
        let j = (i + 1) % 4;
        s += c[i].x * c[j].y - c[j].x * c[i].y;
    }
    s / 2.0
}

fn triangle_area(a: &Point2, b: &Point2, c: &Point2) -> f64 {
    ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y)) / 2.0
}

fn point_on_segment(p: &Point2, a: &Point2, b: &Point2) -> bool {
    let cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    if cross.abs() > 1e-9 {
        return false;
    }
    let dot = (p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y);
    let len2 = (b.x - a.x).powi(2) + (b.y - a.y).powi(2);
    dot >= 0.0 && dot <= len2
}

/// Proper intersection of open segments (shared endpoints do not count).
fn segments_intersect(a: &Point2, b: &Point2, c: &Point2, d: &Point2) -> bool {
    let d1 = triangle_area(c, d, a);
    let d2 = triangle_area(c, d, b);
    let d3 = triangle_area(a, b, c);
    let d4 = triangle_area(a, b, d);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Scale-normalizes a matrix: `m[2][2] = 1` when its relative magnitude
/// allows, else unit Frobenius norm with the largest-magnitude entry
/// positive.
fn normalize_scale(m: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut frob = 0.0;
    for row in &m {
        for v in row {
            frob += v * v;
        }
    }
    let frob = frob.sqrt();
    let mut out = m;
    if frob == 0.0 {
        return out;
    }
    if m[2][2].abs() / frob >= 1e-9 {
        let s = m[2][2];
        for row in &mut out {
            for v in row.iter_mut() {
                *v /= s;
            }
        }
    } else {
        let mut largest = 0.0f64;
        for row in &m {
            for v in row {
                if v.abs() > largest.abs() {
                    largest = *v;
                }
            }
        }
        let s = if largest < 0.0 { -frob } else { frob };
        for row in &mut out {
            for v in row.iter_mut() {
                *v /= s;
            }
        }
    }
    out
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Applies a homography to a point: `(x', y') = (H [x y 1]^T).xy / w'`.
pub fn apply_homography(h: &Homography, p: Point2) -> Result<Point2> {
    let m = &h.m;
    let w = m[2][0] * p.x + m[2][1] * p.y + m[2][2];
    if w.abs() <= SINGULAR_EPS {
        return Err(Error::PointAtInfinity {
            x: p.x,
            y: p.y,
            w_abs: w.abs(),
        });
    }
    Ok(Point2::new(
        (m[0][0] * p.x + m[0][1] * p.y + m[0][2]) / w,
        (m[1][0] * p.x + m[1][1] * p.y + m[1][2]) / w,
    ))
}

/// Matrix product `a · b` (apply `b` first), re-normalized.
pub fn compose(a: &Homography, b: &Homography) -> Result<Homography> {
    let (x, y) = (&a.m, &b.m);
    let mut out = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = x[r][0] * y[0][c] + x[r][1] * y[1][c] + x[r][2] * y[2][c];
        }
    }
    Homography::from_matrix(out)
}

/// Inverse homography via the adjugate, re-normalized.
pub fn invert(h: &Homography) -> Result<Homography> {
    let m = &h.m;
    let det = det3(m);
    if det.abs() <= SINGULAR_EPS {
        return Err(Error::SingularSystem {
            detail: format!("determinant {det:.3e} in invert"),
        });
    }
    let adj = [
        [
            m[1][1] * m[2][2] - m[1][2] * m[2][1],
            m[0][2] * m[2][1] - m[0][1] * m[2][2],
            m[0][1] * m[1][2] - m[0][2] * m[1][1],
        ],
        [
            m[1][2] * m[2][0] - m[1][0] * m[2][2],
            m[0][0] * m[2][2] - m[0][2] * m[2][0],
            m[0][2] * m[1][0] - m[0][0] * m[1][2],
        ],
        [
            m[1][0] * m[2][1] - m[1][1] * m[2][0],
            m[0][1] * m[2][0] - m[0][0] * m[2][1],
            m[0][0] * m[1][1] - m[0][1] * m[1][0],
        ],
    ];
    let mut out = adj;
    for row in &mut out {
        for v in row.iter_mut() {
            *v /= det;
        }
    }
    Homography::from_matrix(out)
}

/// Hartley isotropic normalization: translate the centroid to the origin and
/// scale the mean distance to sqrt(2). Returns the transform and the
/// normalized points.
fn hartley_normalize(pts: &[Point2]) -> ([[f64; 3]; 3], Vec<Point2>) {
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p.y).sum::<f64>() / n;
    let mean_dist = pts
        .iter()
        .map(|p| (p.x - cx).hypot(p.y - cy))
        .sum::<f64>()
        / n;
    let s = if mean_dist > 1e-15 {
        std::f64::consts::SQRT_2 / mean_dist
    } else {
        1.0
    };
    let t = [[s, 0.0, -s * cx], [0.0, s, -s * cy], [0.0, 0.0, 1.0]];
    let normalized = pts
        .iter()
        .map(|p| Point2::new(s * (p.x - cx), s * (p.y - cy)))
        .collect();
    (t, normalized)
}

/// Solves `A x = b` in place by Gaussian elimination with partial pivoting.
/// Fails when the pivot magnitude drops below `pivot_eps`.
fn solve_linear(a: &mut [Vec<f64>], b: &mut [f64], pivot_eps: f64) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_val = a[col][col].abs();
        for row in (col + 1)..n {
            if a[row][col].abs() > pivot_val {
                pivot_val = a[row][col].abs();
                pivot_row = row;
            }
        }
        if pivot_val <= pivot_eps {
            return Err(Error::SingularSystem {
                detail: format!("pivot {pivot_val:.3e} at column {col}"),
            });
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            b.swap(pivot_row, col);
        }
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in (col + 1)..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Ok(x)
}

fn mat_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for r in 0..3 {
        for c in 0..3 {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c] + a[r][2] * b[2][c];
        }
    }
    out
}

fn invert3(m: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = det3(m);
    if det.abs() <= SINGULAR_EPS {
        return None;
    }
    Some([
        [
            (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det,
        ],
        [
            (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det,
        ],
        [
            (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det,
        ],
    ])
}

/// Estimates the homography mapping each `src` corner onto the matching
/// `dst` corner.
///
/// Both quadruples must satisfy the [`Quadrilateral`] invariants. The solve
/// runs on Hartley-normalized coordinates, fixing the bottom-right entry of
/// the normalized matrix to one and eliminating the remaining 8 unknowns.
pub fn estimate_homography_dlt(src: &[Point2; 4], dst: &[Point2; 4]) -> Result<Homography> {
    Quadrilateral::new(*src)?;
    Quadrilateral::new(*dst)?;

    let (t_src, src_n) = hartley_normalize(src);
    let (t_dst, dst_n) = hartley_normalize(dst);

    // Rows per correspondence (x, y) -> (u, v), unknowns h11..h32 with
    // h33 fixed to 1:
    //   x h11 + y h12 + h13 - u x h31 - u y h32 = u
    //   x h21 + y h22 + h23 - v x h31 - v y h32 = v
    let mut a = vec![vec![0.0f64; 8]; 8];
    let mut b = vec![0.0f64; 8];
    for i in 0..4 {
        let (x, y) = (src_n[i].x, src_n[i].y);
        let (u, v) = (dst_n[i].x, dst_n[i].y);
        a[2 * i] = vec![x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y];
        b[2 * i] = u;
        a[2 * i + 1] = vec![0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y];
        b[2 * i + 1] = v;
    }
    let h = solve_linear(&mut a, &mut b, 1e-12)?;
    let h_norm = [
        [h[0], h[1], h[2]],
        [h[3], h[4], h[5]],
        [h[6], h[7], 1.0],
    ];

    let t_dst_inv = invert3(&t_dst).ok_or_else(|| Error::SingularSystem {
        detail: "destination normalization not invertible".into(),
    })?;
    let denorm = mat_mul(&mat_mul(&t_dst_inv, &h_norm), &t_src);
    Homography::from_matrix(denorm)
}

/// Options for [`refine_homography_lm`].
#[derive(Debug, Clone, Copy)]
pub struct LmOptions {
    pub max_iters: usize,
    /// Relative cost-decrease tolerance for termination.
    pub tol: f64,
    pub initial_damping: f64,
    /// Multiplier applied to the damping on a rejected step.
    pub damping_increase: f64,
    /// Divisor applied to the damping on an accepted step.
    pub damping_decrease: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iters: 50,
            tol: 1e-10,
            initial_damping: 1e-3,
            damping_increase: 10.0,
            damping_decrease: 10.0,
        }
    }
}

/// Per-iteration record of an LM run; `costs[0]` is the initial cost and
/// each subsequent entry is the cost after an accepted step.
#[derive(Debug, Clone, Default)]
pub struct LmTrace {
    pub costs: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

const MAX_DAMPING: f64 = 1e12;

/// Symmetric transfer cost: forward plus backward squared reprojection error
/// summed over all correspondences. Infinite when either direction maps a
/// point to infinity or the matrix is not invertible.
pub fn symmetric_transfer_cost(h: &Homography, correspondences: &[(Point2, Point2)]) -> f64 {
    let inv = match invert(h) {
        Ok(inv) => inv,
        Err(_) => return f64::INFINITY,
    };
    let mut cost = 0.0;
    for (p, q) in correspondences {
        match (apply_homography(h, *p), apply_homography(&inv, *q)) {
            (Ok(fp), Ok(bp)) => {
                cost += (fp.x - q.x).powi(2) + (fp.y - q.y).powi(2);
                cost += (bp.x - p.x).powi(2) + (bp.y - p.y).powi(2);
            }
            _ => return f64::INFINITY,
        }
    }
    cost
}

fn residual_vector(params: &[f64; 8], correspondences: &[(Point2, Point2)]) -> Option<Vec<f64>> {
    let h = params_to_homography(params).ok()?;
    let inv = invert(&h).ok()?;
    let mut r = Vec::with_capacity(correspondences.len() * 4);
    for (p, q) in correspondences {
        let fp = apply_homography(&h, *p).ok()?;
        let bp = apply_homography(&inv, *q).ok()?;
        r.push(fp.x - q.x);
        r.push(fp.y - q.y);
        r.push(bp.x - p.x);
        r.push(bp.y - p.y);
    }
    Some(r)
}

fn params_to_homography(p: &[f64; 8]) -> Result<Homography> {
    Homography::from_matrix([[p[0], p[1], p[2]], [p[3], p[4], p[5]], [p[6], p[7], 1.0]])
}

/// Refines a homography over N ≥ 4 correspondences by Levenberg-Marquardt on
/// the symmetric transfer error. The result never has a higher cost than
/// `h0`; rejected steps raise the damping, accepted steps lower it.
pub fn refine_homography_lm(
    h0: &Homography,
    correspondences: &[(Point2, Point2)],
    opts: &LmOptions,
) -> Result<Homography> {
    refine_homography_lm_traced(h0, correspondences, opts).map(|(h, _)| h)
}

/// As [`refine_homography_lm`], also returning the accepted-cost trace.
pub fn refine_homography_lm_traced(
    h0: &Homography,
    correspondences: &[(Point2, Point2)],
    opts: &LmOptions,
) -> Result<(Homography, LmTrace)> {
    if correspondences.len() < 4 {
        return Err(Error::SingularSystem {
            detail: format!("need at least 4 correspondences, got {}", correspondences.len()),
        });
    }
    let m = h0.matrix();
    if m[2][2].abs() < 1e-9 {
        return Err(Error::SingularSystem {
            detail: "initial homography cannot be scale-fixed (m[2][2] ~ 0)".into(),
        });
    }
    let mut params = [
        m[0][0] / m[2][2],
        m[0][1] / m[2][2],
        m[0][2] / m[2][2],
        m[1][0] / m[2][2],
        m[1][1] / m[2][2],
        m[1][2] / m[2][2],
        m[2][0] / m[2][2],
        m[2][1] / m[2][2],
    ];

    let mut cost = match residual_vector(&params, correspondences) {
        Some(r) => r.iter().map(|v| v * v).sum::<f64>(),
        None => f64::INFINITY,
    };
    let mut trace = LmTrace {
        costs: vec![cost],
        iterations: 0,
        converged: false,
    };
    if cost == 0.0 {
        trace.converged = true;
        return Ok((params_to_homography(&params)?, trace));
    }
    let mut damping = opts.initial_damping;

    for _ in 0..opts.max_iters {
        trace.iterations += 1;
        let residuals = match residual_vector(&params, correspondences) {
            Some(r) => r,
            None => break,
        };
        let n_res = residuals.len();

        // Central-difference Jacobian; parameters are O(1)..O(100) so a
        // relative step keeps the quotients well scaled.
        let mut jac = vec![vec![0.0f64; 8]; n_res];
        let mut ok = true;
        for j in 0..8 {
            let step = 1e-7 * (1.0 + params[j].abs());
            let mut plus = params;
            plus[j] += step;
            let mut minus = params;
            minus[j] -= step;
            match (
                residual_vector(&plus, correspondences),
                residual_vector(&minus, correspondences),
            ) {
                (Some(rp), Some(rm)) => {
                    for i in 0..n_res {
                        jac[i][j] = (rp[i] - rm[i]) / (2.0 * step);
                    }
                }
                _ => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            break;
        }

        // Normal equations J^T J and gradient J^T r.
        let mut jtj = [[0.0f64; 8]; 8];
        let mut jtr = [0.0f64; 8];
        for i in 0..n_res {
            for a in 0..8 {
                jtr[a] += jac[i][a] * residuals[i];
                for b in a..8 {
                    jtj[a][b] += jac[i][a] * jac[i][b];
                }
            }
        }
        for a in 0..8 {
            for b in 0..a {
                jtj[a][b] = jtj[b][a];
            }
        }

        let mut accepted = false;
        let mut solved_once = false;
        while damping <= MAX_DAMPING {
            let mut a = vec![vec![0.0f64; 8]; 8];
            let mut b = vec![0.0f64; 8];
            for r in 0..8 {
                for c in 0..8 {
                    a[r][c] = jtj[r][c];
                }
                a[r][r] += damping;
                b[r] = -jtr[r];
            }
            let delta = match solve_linear(&mut a, &mut b, 1e-15) {
                Ok(d) => d,
                Err(_) => {
                    damping *= opts.damping_increase;
                    continue;
                }
            };
            solved_once = true;
            let mut trial = params;
            for j in 0..8 {
                trial[j] += delta[j];
            }
            let trial_cost = match residual_vector(&trial, correspondences) {
                Some(r) => r.iter().map(|v| v * v).sum::<f64>(),
                None => f64::INFINITY,
            };
            if trial_cost < cost {
                let rel_decrease = (cost - trial_cost) / cost.max(f64::MIN_POSITIVE);
                params = trial;
                cost = trial_cost;
                trace.costs.push(cost);
                damping /= opts.damping_decrease;
                accepted = true;
                if rel_decrease < opts.tol {
                    trace.converged = true;
                }
                break;
            }
            damping *= opts.damping_increase;
        }
        if !solved_once && damping > MAX_DAMPING {
            return Err(Error::SingularSystem {
                detail: "normal equations unsolvable at maximum damping".into(),
            });
        }
        if !accepted {
            // No improving step exists at any damping: a (local) optimum.
            trace.converged = true;
            break;
        }
        if trace.converged || cost == 0.0 {
            trace.converged = true;
            break;
        }
    }

    Ok((params_to_homography(&params)?, trace))
}
