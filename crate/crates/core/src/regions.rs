//! Exact-rational DoF regions in the plane and the region / outer-bound
//! constructors for the two-user IC and BC with receiver cooperation.
//!
//! A [`Region2D`] is the set `{(d1, d2) ≥ 0 : a·d1 + b·d2 ≤ c for every constraint}`.
//! Nonnegativity is always implicit.

use std::fmt;
use std::io::Write;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{rational, Rational};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("region is unbounded")]
    Unbounded,
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("invalid half-plane: both coefficients are zero")]
    DegenerateHalfPlane,
    #[error("csv export failed: {0}")]
    Export(String),
}

/// `a·d1 + b·d2 ≤ c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HalfPlane {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
}

impl HalfPlane {
    pub fn new(a: Rational, b: Rational, c: Rational) -> Result<Self, RegionError> {
        if a.is_zero() && b.is_zero() {
            return Err(RegionError::DegenerateHalfPlane);
        }
        Ok(Self { a, b, c })
    }

    /// `d1/p + d2/q ≤ rhs`.
    fn reciprocal(p: i64, q: i64, rhs: Rational) -> Self {
        Self {
            a: rational(1, p),
            b: rational(1, q),
            c: rhs,
        }
    }

    pub fn lhs(&self, p: &DofPoint) -> Rational {
        self.a * p.d1 + self.b * p.d2
    }

    pub fn satisfied_by(&self, p: &DofPoint) -> bool {
        self.lhs(p) <= self.c
    }

    pub fn tight_at(&self, p: &DofPoint) -> bool {
        self.lhs(p) == self.c
    }
}

impl fmt::Display for HalfPlane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*d1 + {}*d2 <= {}", self.a, self.b, self.c)
    }
}

/// A pair of per-user DoF values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DofPoint {
    pub d1: Rational,
    pub d2: Rational,
}

impl DofPoint {
    pub fn new(d1: Rational, d2: Rational) -> Self {
        Self { d1, d2 }
    }

    pub fn origin() -> Self {
        Self::new(Rational::zero(), Rational::zero())
    }

    pub fn sum(&self) -> Rational {
        self.d1 + self.d2
    }

    pub fn is_nonnegative(&self) -> bool {
        !self.d1.is_negative() && !self.d2.is_negative()
    }
}

impl fmt::Display for DofPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.d1, self.d2)
    }
}

/// Polygon of DoF pairs in H-representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Region2D {
    pub label: String,
    pub constraints: Vec<HalfPlane>,
    /// Free-form provenance note, e.g. that the inequalities are a derived form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Region2D {
    pub fn new(label: impl Into<String>, constraints: Vec<HalfPlane>) -> Self {
        Self {
            label: label.into(),
            constraints,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn is_bounded(&self) -> bool {
        // The recession cone within the quadrant is generated by the axis
        // directions and by the rays on which some constraint is tight.
        let mut rays = vec![
            (Rational::from_integer(1), Rational::zero()),
            (Rational::zero(), Rational::from_integer(1)),
        ];
        for h in &self.constraints {
            if h.a.is_positive() && h.b.is_negative() || h.a.is_negative() && h.b.is_positive() {
                rays.push((h.b.abs(), h.a.abs()));
            }
        }
        !rays.iter().any(|&(x, y)| {
            self.constraints
                .iter()
                .all(|h| h.a * x + h.b * y <= Rational::zero())
        })
    }

    pub fn contains(&self, p: &DofPoint) -> bool {
        p.is_nonnegative() && self.constraints.iter().all(|h| h.satisfied_by(p))
    }

    /// Feasible and tight on at least one explicit constraint.
    pub fn on_boundary(&self, p: &DofPoint) -> bool {
        self.contains(p) && self.constraints.iter().any(|h| h.tight_at(p))
    }

    /// Extreme points, counterclockwise starting from the lexicographically
    /// smallest (the origin whenever the region contains it).
    pub fn vertices(&self) -> Result<Vec<DofPoint>, RegionError> {
        if !self.is_bounded() {
            return Err(RegionError::Unbounded);
        }
        let mut lines: Vec<HalfPlane> = self.constraints.clone();
        lines.push(HalfPlane {
            a: Rational::from_integer(1),
            b: Rational::zero(),
            c: Rational::zero(),
        });
        lines.push(HalfPlane {
            a: Rational::zero(),
            b: Rational::from_integer(1),
            c: Rational::zero(),
        });
        let mut candidates = Vec::new();
        for (i, l1) in lines.iter().enumerate() {
            for l2 in &lines[i + 1..] {
                let det = l1.a * l2.b - l1.b * l2.a;
                if det.is_zero() {
                    continue;
                }
                let p = DofPoint::new(
                    (l1.c * l2.b - l1.b * l2.c) / det,
                    (l1.a * l2.c - l1.c * l2.a) / det,
                );
                if self.contains(&p) {
                    candidates.push(p);
                }
            }
        }
        Ok(convex_hull(candidates))
    }

    /// Largest `d1` with `d2 = 0` and largest `d2` with `d1 = 0`.
    pub fn axis_intercepts(&self) -> Result<(DofPoint, DofPoint), RegionError> {
        let v = self.vertices()?;
        let x = v
            .iter()
            .filter(|p| p.d2.is_zero())
            .map(|p| p.d1)
            .max()
            .unwrap_or_else(Rational::zero);
        let y = v
            .iter()
            .filter(|p| p.d1.is_zero())
            .map(|p| p.d2)
            .max()
            .unwrap_or_else(Rational::zero);
        Ok((
            DofPoint::new(x, Rational::zero()),
            DofPoint::new(Rational::zero(), y),
        ))
    }

    /// Largest `d1 + d2` over the region.
    pub fn max_sum(&self) -> Result<Rational, RegionError> {
        Ok(self
            .vertices()?
            .iter()
            .map(DofPoint::sum)
            .max()
            .unwrap_or_else(Rational::zero))
    }

    /// Scales every coordinate by `k`.
    pub fn scaled(&self, k: Rational) -> Region2D {
        Region2D {
            label: format!("{}*{}", k, self.label),
            constraints: self
                .constraints
                .iter()
                .map(|h| HalfPlane { a: h.a, b: h.b, c: h.c * k })
                .collect(),
            note: self.note.clone(),
        }
    }

    /// Builds the H-representation of the convex hull of `points`, which must
    /// include the origin and each point's axis projections when a down-closed
    /// region is wanted.
    pub fn from_points(label: impl Into<String>, points: &[DofPoint]) -> Region2D {
        let hull = convex_hull(points.to_vec());
        let one = Rational::from_integer(1);
        let zero = Rational::zero();
        let constraints = match hull.len() {
            0 => vec![
                HalfPlane { a: one, b: zero, c: zero },
                HalfPlane { a: zero, b: one, c: zero },
            ],
            1 | 2 => {
                // Degenerate hull: a point or a segment; bound it by its box.
                let max1 = hull.iter().map(|p| p.d1).max().unwrap();
                let max2 = hull.iter().map(|p| p.d2).max().unwrap();
                let mut c = vec![
                    HalfPlane { a: one, b: zero, c: max1 },
                    HalfPlane { a: zero, b: one, c: max2 },
                ];
                if hull.len() == 2 && !max1.is_zero() && !max2.is_zero() {
                    // Segment through the interior of the quadrant.
                    let (p, q) = (hull[0], hull[1]);
                    let h = edge_halfplane(&p, &q);
                    c.push(h);
                    c.push(HalfPlane { a: -h.a, b: -h.b, c: -h.c });
                }
                c
            }
            n => (0..n)
                .map(|i| edge_halfplane(&hull[i], &hull[(i + 1) % n]))
                .filter(|h| !(h.c.is_zero() && (h.a.is_zero() || h.b.is_zero()) && !h.a.is_positive() && !h.b.is_positive()))
                .collect(),
        };
        Region2D::new(label, constraints)
    }

    /// Multi-line plain-text record: constraints then vertices.
    pub fn to_text(&self) -> Result<String, RegionError> {
        let mut s = format!("region {}\n", self.label);
        if let Some(note) = &self.note {
            s.push_str(&format!("note: {note}\n"));
        }
        s.push_str("constraints:\n");
        for (i, h) in self.constraints.iter().enumerate() {
            s.push_str(&format!("  [{i}] {h}\n"));
        }
        s.push_str("vertices:\n");
        for (i, v) in self.vertices()?.iter().enumerate() {
            s.push_str(&format!("  [{i}] {v}\n"));
        }
        Ok(s)
    }
}

impl fmt::Display for Region2D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {{", self.label)?;
        for (i, h) in self.constraints.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{h}")?;
        }
        write!(f, "}}")
    }
}

/// Half-plane whose boundary runs through `p → q` with the interior on the
/// left (counterclockwise traversal).
fn edge_halfplane(p: &DofPoint, q: &DofPoint) -> HalfPlane {
    let dx = q.d1 - p.d1;
    let dy = q.d2 - p.d2;
    // cross((dx,dy), (x - p)) >= 0  <=>  dy*x - dx*y <= dy*p.x - dx*p.y
    HalfPlane {
        a: dy,
        b: -dx,
        c: dy * p.d1 - dx * p.d2,
    }
}

fn cross(o: &DofPoint, a: &DofPoint, b: &DofPoint) -> Rational {
    (a.d1 - o.d1) * (b.d2 - o.d2) - (a.d2 - o.d2) * (b.d1 - o.d1)
}

/// Exact convex hull (monotone chain), counterclockwise from the
/// lexicographically smallest point, collinear points dropped.
pub fn convex_hull(mut points: Vec<DofPoint>) -> Vec<DofPoint> {
    points.sort();
    points.dedup();
    if points.len() <= 2 {
        return points;
    }
    let mut lower: Vec<DofPoint> = Vec::new();
    for p in &points {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= Rational::zero() {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<DofPoint> = Vec::new();
    for p in points.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= Rational::zero() {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

pub fn contains(r: &Region2D, p: &DofPoint) -> bool {
    r.contains(p)
}

/// `r1 ⊆ r2`, decided on the vertices of `r1`.
pub fn is_subset(r1: &Region2D, r2: &Region2D) -> Result<bool, RegionError> {
    Ok(r1.vertices()?.iter().all(|v| r2.contains(v)))
}

pub fn equals(r1: &Region2D, r2: &Region2D) -> Result<bool, RegionError> {
    Ok(is_subset(r1, r2)? && is_subset(r2, r1)?)
}

fn i(n: usize) -> i64 {
    n as i64
}

fn require_positive(what: &str, counts: &[usize]) -> Result<(), RegionError> {
    if counts.contains(&0) {
        return Err(RegionError::Unsupported(format!("{what}: antenna counts must be >= 1, got {counts:?}")));
    }
    Ok(())
}

/// BC-type outer bound for the `(M1, M2, N1, N2)` IC.
pub fn outer_bc_type_ic(n1: usize, n2: usize) -> Result<Region2D, RegionError> {
    require_positive("thm1", &[n1, n2])?;
    let (n1, n2) = (i(n1), i(n2));
    let one = Rational::from_integer(1);
    Ok(Region2D::new(
        format!("thm1(N1={n1},N2={n2})"),
        vec![
            HalfPlane::reciprocal(n1 + n2, n2, one),
            HalfPlane::reciprocal(n1, n1 + n2, one),
        ],
    ))
}

/// IC-type outer bound for the IC: the `k = 0` and `k = N1 + N2` instances.
pub fn outer_ic_type_ic(m1: usize, m2: usize, n1: usize, n2: usize) -> Result<Region2D, RegionError> {
    require_positive("thm2", &[m1, m2, n1, n2])?;
    let (m1, m2, n1, n2) = (i(m1), i(m2), i(n1), i(n2));
    Ok(Region2D::new(
        format!("thm2({m1},{m2},{n1},{n2})"),
        vec![
            HalfPlane::reciprocal((n1 + n2).min(m1), n2.min(m1), rational(n2, n2.min(m1))),
            HalfPlane::reciprocal(n1.min(m2), (n1 + n2).min(m2), rational(n1, n1.min(m2))),
        ],
    ))
}

/// BC-type outer bound for the `(M, N1, N2)` BC, in the same two-inequality
/// form as [`outer_bc_type_ic`]; the bound does not depend on `M`.
pub fn outer_bc_type_bc(m: usize, n1: usize, n2: usize) -> Result<Region2D, RegionError> {
    require_positive("thm3", &[m, n1, n2])?;
    let mut r = outer_bc_type_ic(n1, n2)?;
    r.label = format!("thm3({m},{n1},{n2})");
    Ok(r.with_note("derived form: enhanced BC with N1+N2+M >= N1+N2 transmit antennas"))
}

/// CRC-type outer bound for the BC.
pub fn outer_crc_type_bc(m: usize, n1: usize, n2: usize) -> Result<Region2D, RegionError> {
    require_positive("thm4", &[m, n1, n2])?;
    let (m, n1, n2) = (i(m), i(n1), i(n2));
    Ok(Region2D::new(
        format!("thm4({m},{n1},{n2})"),
        vec![
            HalfPlane::reciprocal(m.min(n1 + n2), m.min(n2), rational(n2, n2.min(m))),
            HalfPlane::reciprocal(m.min(n1), m.min(n1 + n2), rational(n1, n1.min(m))),
        ],
    ))
}

/// DoF region of the IC with perfect CSIT (equal to the region with CSI and
/// full cooperation).
pub fn region_ic_perfect_csit(m1: usize, m2: usize, n1: usize, n2: usize) -> Result<Region2D, RegionError> {
    require_positive("perfect-csit", &[m1, m2, n1, n2])?;
    let sum = (m1 + m2).min(n1 + n2).min(m1.max(n2)).min(m2.max(n1));
    let (one, zero) = (Rational::from_integer(1), Rational::zero());
    Ok(Region2D::new(
        format!("perfect-csit({m1},{m2},{n1},{n2})"),
        vec![
            HalfPlane { a: one, b: zero, c: Rational::from_integer(i(m1.min(n1))) },
            HalfPlane { a: zero, b: one, c: Rational::from_integer(i(m2.min(n2))) },
            HalfPlane { a: one, b: one, c: Rational::from_integer(i(sum)) },
        ],
    ))
}

/// DoF region of the `(M1, M2, N, N)` IC with receiver cooperation.
pub fn region_ic_rx_coop_equal_n(m1: usize, m2: usize, n: usize) -> Result<Region2D, RegionError> {
    require_positive("thm5", &[m1, m2, n])?;
    if m1 <= n || m2 <= n {
        let mut r = region_ic_perfect_csit(m1, m2, n, n)?;
        r.label = format!("thm5({m1},{m2},{n})");
        return Ok(r.with_note("M1 <= N or M2 <= N: equals the perfect-CSIT region"));
    }
    let (m1p, m2p, n) = (i(m1.min(2 * n)), i(m2.min(2 * n)), i(n));
    let one = Rational::from_integer(1);
    Ok(Region2D::new(
        format!("thm5({m1},{m2},{n})"),
        vec![HalfPlane::reciprocal(m1p, n, one), HalfPlane::reciprocal(n, m2p, one)],
    ))
}

/// Whether `(M1, M2, N1, N2)` belongs to the unequal-antenna class
/// `M1 > N1 > N2 > N2/2 >= M2`, `M1 + M2 = N1 + N2`.
pub fn unequal_class_violation(m1: usize, m2: usize, n1: usize, n2: usize) -> Option<String> {
    if !(m1 > n1) {
        return Some(format!("requires M1 > N1 (M1={m1}, N1={n1})"));
    }
    if !(n1 > n2) {
        return Some(format!("requires N1 > N2 (N1={n1}, N2={n2})"));
    }
    if !(n2 >= 2 * m2) {
        return Some(format!("requires N2/2 >= M2 (N2={n2}, M2={m2})"));
    }
    if m1 + m2 != n1 + n2 {
        return Some(format!("requires M1+M2 = N1+N2 ({} != {})", m1 + m2, n1 + n2));
    }
    None
}

/// DoF region of the unequal-antenna IC class with receiver cooperation.
pub fn region_ic_rx_coop_unequal(m1: usize, m2: usize, n1: usize, n2: usize) -> Result<Region2D, RegionError> {
    require_positive("thm6", &[m1, m2, n1, n2])?;
    if let Some(why) = unequal_class_violation(m1, m2, n1, n2) {
        return Err(RegionError::Unsupported(format!("thm6 for ({m1},{m2},{n1},{n2}): {why}")));
    }
    let (one, zero) = (Rational::from_integer(1), Rational::zero());
    Ok(Region2D::new(
        format!("thm6({m1},{m2},{n1},{n2})"),
        vec![
            HalfPlane { a: zero, b: one, c: Rational::from_integer(i(m2)) },
            HalfPlane { a: one, b: one, c: Rational::from_integer(i(n1)) },
        ],
    ))
}

/// DoF region of the `(M, N, N)` BC with receiver cooperation.
pub fn region_bc_rx_coop_equal_n(m: usize, n: usize) -> Result<Region2D, RegionError> {
    require_positive("thm7", &[m, n])?;
    let (cap2, cap1, n) = (i(m.min(2 * n)), i(m.min(n)), i(n));
    let rhs = rational(n, cap1);
    Ok(Region2D::new(
        format!("thm7({m},{n})"),
        vec![HalfPlane::reciprocal(cap2, cap1, rhs), HalfPlane::reciprocal(cap1, cap2, rhs)],
    ))
}

/// Intersection of the two boundary lines of the `(M1, M2, N, N)` region.
pub fn corner_equal_n(m1: usize, m2: usize, n: usize) -> Result<DofPoint, RegionError> {
    if m1 <= n || m2 <= n || n == 0 {
        return Err(RegionError::Unsupported(format!(
            "corner needs M1, M2 > N, got ({m1},{m2},{n})"
        )));
    }
    let (m1p, m2p, n) = (i(m1.min(2 * n)), i(m2.min(2 * n)), i(n));
    let den = m1p * m2p - n * n;
    Ok(DofPoint::new(
        rational(n * m1p * (m2p - n), den),
        rational(n * m2p * (m1p - n), den),
    ))
}

/// The symmetric pair as it is printed for the equal-N scheme; it agrees with
/// [`corner_equal_n`] only when `min(M1, 2N) = min(M2, 2N)`.
pub fn printed_pair_equal_n(m1: usize, m2: usize, n: usize) -> Result<DofPoint, RegionError> {
    if m1 <= n || m2 <= n || n == 0 {
        return Err(RegionError::Unsupported(format!(
            "pair needs M1, M2 > N, got ({m1},{m2},{n})"
        )));
    }
    let (m1p, m2p, n) = (i(m1.min(2 * n)), i(m2.min(2 * n)), i(n));
    let v = rational(n * m1p * (m2p - n), n * (m2p - n) + m2p * (m1p - n));
    Ok(DofPoint::new(v, v))
}

/// Writes `(region, constraint_index, a_num, a_den, b_num, b_den, c_num, c_den)` rows.
pub fn write_constraints_csv<W: Write>(regions: &[&Region2D], w: W) -> Result<(), RegionError> {
    let mut out = csv::Writer::from_writer(w);
    let err = |e: csv::Error| RegionError::Export(e.to_string());
    out.write_record(["region", "constraint_index", "a_num", "a_den", "b_num", "b_den", "c_num", "c_den"])
        .map_err(err)?;
    for r in regions {
        for (k, h) in r.constraints.iter().enumerate() {
            out.write_record([
                r.label.clone(),
                k.to_string(),
                h.a.numer().to_string(),
                h.a.denom().to_string(),
                h.b.numer().to_string(),
                h.b.denom().to_string(),
                h.c.numer().to_string(),
                h.c.denom().to_string(),
            ])
            .map_err(err)?;
        }
    }
    out.flush().map_err(|e| RegionError::Export(e.to_string()))
}

/// Writes `(region, vertex_index, d1_num, d1_den, d2_num, d2_den)` rows.
pub fn write_vertices_csv<W: Write>(regions: &[&Region2D], w: W) -> Result<(), RegionError> {
    let mut out = csv::Writer::from_writer(w);
    let err = |e: csv::Error| RegionError::Export(e.to_string());
    out.write_record(["region", "vertex_index", "d1_num", "d1_den", "d2_num", "d2_den"])
        .map_err(err)?;
    for r in regions {
        for (k, v) in r.vertices()?.iter().enumerate() {
            out.write_record([
                r.label.clone(),
                k.to_string(),
                v.d1.numer().to_string(),
                v.d1.denom().to_string(),
                v.d2.numer().to_string(),
                v.d2.denom().to_string(),
            ])
            .map_err(err)?;
        }
    }
    out.flush().map_err(|e| RegionError::Export(e.to_string()))
}
