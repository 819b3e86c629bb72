//! Householder QR with column pivoting, and the rank / least-squares /
//! subspace routines built on top of it.

use super::matrix::{CMatrix, C64};
use super::NumericsError;

/// Relative rank tolerance used unless a caller supplies its own.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// `A·P = Q·R` with `P` a column permutation.
///
/// `|R_kk|` is non-increasing because every step pivots on the remaining
/// column of largest norm.
#[derive(Clone, Debug)]
pub struct ColPivQr {
    rows: usize,
    cols: usize,
    r: CMatrix,
    reflectors: Vec<Vec<C64>>,
    perm: Vec<usize>,
}

impl ColPivQr {
    pub fn new(a: &CMatrix) -> Self {
        let (m, n) = a.shape();
        let mut r = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::new();
        for k in 0..m.min(n) {
            let (pivot, pivot_norm) = (k..n)
                .map(|j| (j, (k..m).map(|i| r[(i, j)].norm_sqr()).sum::<f64>()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_norm <= 0.0 {
                break;
            }
            if pivot != k {
                for i in 0..m {
                    let tmp = r[(i, k)];
                    r[(i, k)] = r[(i, pivot)];
                    r[(i, pivot)] = tmp;
                }
                perm.swap(k, pivot);
            }

            let norm = pivot_norm.sqrt();
            let x0 = r[(k, k)];
            let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
            let alpha = -phase * norm;
            let mut v: Vec<C64> = (k..m).map(|i| r[(i, k)]).collect();
            v[0] -= alpha;
            let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for z in v.iter_mut() {
                *z /= vnorm;
            }
            for j in k + 1..n {
                let w: C64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * r[(k + i, j)]).sum();
                for (i, vi) in v.iter().enumerate() {
                    r[(k + i, j)] -= vi * w * 2.0;
                }
            }
            r[(k, k)] = alpha;
            for i in k + 1..m {
                r[(i, k)] = C64::new(0.0, 0.0);
            }
            reflectors.push(v);
        }
        Self {
            rows: m,
            cols: n,
            r,
            reflectors,
            perm,
        }
    }

    /// Magnitudes of the diagonal of `R`.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.reflectors.len()).map(|k| self.r[(k, k)].norm()).collect()
    }

    pub fn rank(&self, rel_tol: f64) -> usize {
        let diag = self.diagonal();
        match diag.first() {
            None => 0,
            Some(&0.0) => 0,
            Some(&top) => diag.iter().take_while(|&&d| d > rel_tol * top).count(),
        }
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Overwrites `b` (rows × p) with `Qᴴ·b`.
    pub fn apply_qh(&self, b: &mut CMatrix) {
        for (k, v) in self.reflectors.iter().enumerate() {
            reflect(b, k, v);
        }
    }

    /// Overwrites `b` with `Q·b`.
    pub fn apply_q(&self, b: &mut CMatrix) {
        for (k, v) in self.reflectors.iter().enumerate().rev() {
            reflect(b, k, v);
        }
    }

    /// The full unitary factor (rows × rows).
    pub fn q_full(&self) -> CMatrix {
        let mut q = CMatrix::identity(self.rows);
        self.apply_q(&mut q);
        q
    }

    /// Solves the upper-triangular system on the leading `rank` pivots and
    /// scatters the result back through the permutation; non-pivot unknowns are 0.
    fn basic_solution(&self, qhb: &CMatrix, rank: usize) -> CMatrix {
        let p = qhb.cols();
        let mut x = CMatrix::zeros(self.cols, p);
        for c in 0..p {
            let mut z = vec![C64::new(0.0, 0.0); rank];
            for i in (0..rank).rev() {
                let mut acc = qhb[(i, c)];
                for (j, zj) in z.iter().enumerate().skip(i + 1) {
                    acc -= self.r[(i, j)] * zj;
                }
                z[i] = acc / self.r[(i, i)];
            }
            for (j, zj) in z.into_iter().enumerate() {
                x[(self.perm[j], c)] = zj;
            }
        }
        x
    }
}

fn reflect(b: &mut CMatrix, k: usize, v: &[C64]) {
    for j in 0..b.cols() {
        let w: C64 = v.iter().enumerate().map(|(i, vi)| vi.conj() * b[(k + i, j)]).sum();
        for (i, vi) in v.iter().enumerate() {
            b[(k + i, j)] -= vi * w * 2.0;
        }
    }
}

/// Numerical rank: the number of pivoted-QR diagonal entries above
/// `rel_tol` times the largest one. Empty matrices have rank 0.
pub fn rank(m: &CMatrix, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    ColPivQr::new(m).rank(rel_tol)
}

/// Outcome of [`solve_least_squares`].
#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub solution: CMatrix,
    pub residual_norm: f64,
    /// `true` iff `a` has full column rank.
    pub well_posed: bool,
    pub rank: usize,
}

/// Minimizes `‖a·x − b‖` column by column.
///
/// Rank-deficient systems get the basic solution (free unknowns set to zero)
/// and `well_posed = false`.
pub fn solve_least_squares(a: &CMatrix, b: &CMatrix) -> Result<LeastSquares, NumericsError> {
    solve_least_squares_tol(a, b, DEFAULT_REL_TOL)
}

pub fn solve_least_squares_tol(
    a: &CMatrix,
    b: &CMatrix,
    rel_tol: f64,
) -> Result<LeastSquares, NumericsError> {
    if a.rows() != b.rows() {
        return Err(NumericsError::Dimension(format!(
            "least squares with {} equations but {} right-hand-side rows",
            a.rows(),
            b.rows()
        )));
    }
    let qr = ColPivQr::new(a);
    let rank = if a.is_empty() { 0 } else { qr.rank(rel_tol) };
    let mut qhb = b.clone();
    qr.apply_qh(&mut qhb);
    let solution = qr.basic_solution(&qhb, rank);
    let residual_norm = a.mul(&solution)?.sub(b)?.frobenius_norm();
    Ok(LeastSquares {
        solution,
        residual_norm,
        well_posed: rank == a.cols(),
        rank,
    })
}

/// Orthonormal basis (as columns) of the orthogonal complement of the column
/// space of `a`. With zero columns the complement is the whole space.
pub fn orthogonal_complement(a: &CMatrix, rel_tol: f64) -> CMatrix {
    let m = a.rows();
    if a.cols() == 0 {
        return CMatrix::identity(m);
    }
    let qr = ColPivQr::new(a);
    let r = qr.rank(rel_tol);
    qr.q_full().columns_range(r, m)
}

/// Diagonal of the orthogonal projector onto the row space of `a`.
///
/// Entry `j` equals 1 exactly when the unit vector `e_j` lies in the row
/// space, i.e. when unknown `j` of `a·x = y` is uniquely determined.
pub fn row_space_leverage(a: &CMatrix, rel_tol: f64) -> Vec<f64> {
    let n = a.cols();
    if a.rows() == 0 {
        return vec![0.0; n];
    }
    let ah = a.adjoint();
    let qr = ColPivQr::new(&ah);
    let r = qr.rank(rel_tol);
    let q = qr.q_full();
    (0..n)
        .map(|j| (0..r).map(|k| q[(j, k)].norm_sqr()).sum())
        .collect()
}

/// Lower-triangular `L` with `L·Lᴴ = a` for Hermitian positive-definite `a`.
pub fn cholesky(a: &CMatrix) -> Result<CMatrix, NumericsError> {
    let n = a.rows();
    if a.cols() != n {
        return Err(NumericsError::Dimension("cholesky of a non-square matrix".into()));
    }
    let mut l = CMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(NumericsError::NotPositiveDefinite);
        }
        let djj = d.sqrt();
        l[(j, j)] = C64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Ok(l)
}

/// Solves `l·x = b` for lower-triangular `l`.
pub fn solve_lower_triangular(l: &CMatrix, b: &CMatrix) -> Result<CMatrix, NumericsError> {
    let n = l.rows();
    if l.cols() != n || b.rows() != n {
        return Err(NumericsError::Dimension("triangular solve shape mismatch".into()));
    }
    let mut x = b.clone();
    for c in 0..b.cols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= l[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / l[(i, i)];
        }
    }
    Ok(x)
}

/// `log2 det(I + gᴴ·g)`, computed stably from the QR factor of `[g; I]`.
pub fn log2_det_identity_plus_gram(g: &CMatrix) -> f64 {
    let n = g.cols();
    if n == 0 {
        return 0.0;
    }
    let stacked = CMatrix::from_fn(g.rows() + n, n, |i, j| {
        if i < g.rows() {
            g[(i, j)]
        } else if i - g.rows() == j {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    // det(I + GᴴG) = det(RᴴR) = Π |R_kk|²
    ColPivQr::new(&stacked)
        .diagonal()
        .iter()
        .map(|d| 2.0 * d.log2())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_has_full_rank() {
        assert_eq!(rank(&CMatrix::identity(3), DEFAULT_REL_TOL), 3);
    }

    #[test]
    fn proportional_rows_have_rank_one() {
        let m = CMatrix::from_vec(2, 2, vec![c(1.0, 1.0), c(2.0, -1.0), c(2.0, 2.0), c(4.0, -2.0)]).unwrap();
        assert_eq!(rank(&m, DEFAULT_REL_TOL), 1);
    }

    #[test]
    fn empty_matrix_rank_zero() {
        assert_eq!(rank(&CMatrix::zeros(0, 3), DEFAULT_REL_TOL), 0);
        assert_eq!(rank(&CMatrix::zeros(3, 0), DEFAULT_REL_TOL), 0);
        assert_eq!(rank(&CMatrix::zeros(2, 2), DEFAULT_REL_TOL), 0);
    }

    #[test]
    fn identity_least_squares() {
        let b = CMatrix::column_vector(&[c(1.0, 0.0), c(0.0, 1.0)]);
        let ls = solve_least_squares(&CMatrix::identity(2), &b).unwrap();
        assert!(ls.well_posed);
        assert_eq!(ls.residual_norm, 0.0);
        assert!((ls.solution[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((ls.solution[(1, 0)] - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn underdetermined_is_not_well_posed() {
        let a = CMatrix::from_vec(2, 3, vec![c(1.0, 0.0), c(2.0, 0.0), c(0.5, 1.0), c(0.0, 1.0), c(1.0, 1.0), c(3.0, 0.0)]).unwrap();
        let b = CMatrix::column_vector(&[c(1.0, 0.0), c(1.0, 0.0)]);
        let ls = solve_least_squares(&a, &b).unwrap();
        assert!(!ls.well_posed);
        assert!(ls.residual_norm < 1e-12);
    }

    #[test]
    fn mismatched_rows_rejected() {
        let err = solve_least_squares(&CMatrix::identity(2), &CMatrix::zeros(3, 1)).unwrap_err();
        assert!(matches!(err, NumericsError::Dimension(_)));
    }

    #[test]
    fn complement_is_orthogonal_to_columns() {
        let a = CMatrix::from_vec(3, 1, vec![c(1.0, 0.0), c(0.0, 1.0), c(1.0, -1.0)]).unwrap();
        let q = orthogonal_complement(&a, DEFAULT_REL_TOL);
        assert_eq!(q.shape(), (3, 2));
        let proj = q.adjoint().mul(&a).unwrap();
        assert!(proj.max_abs() < 1e-14);
        let gram = q.adjoint().mul(&q).unwrap();
        assert!(gram.sub(&CMatrix::identity(2)).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn leverage_detects_identifiable_unknowns() {
        // x0 is pinned by row 0; x1 and x2 only appear as a sum.
        let a = CMatrix::from_vec(2, 3, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let lev = row_space_leverage(&a, DEFAULT_REL_TOL);
        assert!((lev[0] - 1.0).abs() < 1e-14);
        assert!((lev[1] - 0.5).abs() < 1e-14);
        assert!((lev[2] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn cholesky_reconstructs() {
        let a = CMatrix::from_vec(2, 2, vec![c(4.0, 0.0), c(1.0, 1.0), c(1.0, -1.0), c(3.0, 0.0)]).unwrap();
        let l = cholesky(&a).unwrap();
        let back = l.mul(&l.adjoint()).unwrap();
        assert!(back.sub(&a).unwrap().max_abs() < 1e-14);
        assert!(cholesky(&CMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn log_det_of_scaled_identity() {
        let g = CMatrix::identity(2).scale(c(3.0, 0.0));
        // det(I + 9 I) = 100
        assert!((log2_det_identity_plus_gram(&g) - 100f64.log2()).abs() < 1e-12);
    }
}
