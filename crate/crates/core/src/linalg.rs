//! Dense floating-point helpers shared by the geometric modules.

use nalgebra::{DMatrix, DVector};

use crate::expr::Scalar;

/// Relative singular-value cutoff used for every rank decision by default.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Thin singular value decomposition `m = U diag(s) Vᵀ`, singular values in
/// decreasing order.
pub fn svd(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let (r, c) = m.shape();
    let k = r.min(c);
    if k == 0 {
        return (DMatrix::zeros(r, 0), Vec::new(), DMatrix::zeros(c, 0));
    }
    let fm = faer::Mat::<f64>::from_fn(r, c, |i, j| m[(i, j)]);
    let dec = fm.thin_svd().expect("svd converges");
    let (u, s, v) = (dec.U(), dec.S().column_vector(), dec.V());
    let uu = DMatrix::from_fn(r, k, |i, j| u[(i, j)]);
    let vv = DMatrix::from_fn(c, k, |i, j| v[(i, j)]);
    let ss = (0..k).map(|i| s[i]).collect();
    (uu, ss, vv)
}

/// Singular values at or below this count as zero. Relative to the largest
/// one, with unit scale as the floor so that matrices made only of rounding
/// noise have rank zero.
fn cutoff(s: &[f64], tol: f64) -> f64 {
    tol * s.iter().cloned().fold(1.0, f64::max)
}

/// Orthonormal basis (as columns) of the column space of `m`.
///
/// A singular value counts when it exceeds `tol` times the larger of the
/// largest singular value and 1.
pub fn orth(m: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let rows = m.nrows();
    if rows == 0 || m.ncols() == 0 {
        return DMatrix::zeros(rows, 0);
    }
    let (u, s, _) = svd(m);
    let cut = cutoff(&s, tol);
    let cols: Vec<DVector<f64>> =
        (0..s.len()).filter(|&i| s[i] > cut).map(|i| u.column(i).into_owned()).collect();
    if cols.is_empty() {
        DMatrix::zeros(rows, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of the Euclidean orthogonal complement of the span of
/// the orthonormal columns `q` inside ℝ^`ambient`.
pub fn complement(q: &DMatrix<f64>, ambient: usize) -> DMatrix<f64> {
    if q.ncols() == 0 {
        return DMatrix::identity(ambient, ambient);
    }
    if q.ncols() >= ambient {
        return DMatrix::zeros(ambient, 0);
    }
    let p = DMatrix::identity(ambient, ambient) - q * q.transpose();
    let (u, s, _) = svd(&p);
    let cols: Vec<DVector<f64>> =
        (0..s.len()).filter(|&i| s[i] > 0.5).map(|i| u.column(i).into_owned()).collect();
    if cols.is_empty() {
        DMatrix::zeros(ambient, 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis of the null space of `a` (columns live in ℝ^ncols).
pub fn null(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let m = a.ncols();
    if a.nrows() == 0 {
        return DMatrix::identity(m, m);
    }
    complement(&orth(&a.transpose(), tol), m)
}

/// Numerical rank under the relative cutoff.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    orth(m, tol).ncols()
}

/// Horizontal concatenation `[a | b]` of matrices with equal row counts.
pub fn hcat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.nrows(), b.nrows(), "hcat row mismatch");
    let mut m = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m.view_mut((0, a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    m
}

/// Vertical concatenation of matrices with equal column counts.
pub fn vcat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.ncols(), b.ncols(), "vcat column mismatch");
    let mut m = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    m.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    m.view_mut((a.nrows(), 0), (b.nrows(), b.ncols())).copy_from(b);
    m
}

/// Least-squares solution of `a x = b` through the pseudo-inverse.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, tol: f64) -> DVector<f64> {
    if a.ncols() == 0 {
        return DVector::zeros(0);
    }
    if a.nrows() == 0 {
        return DVector::zeros(a.ncols());
    }
    let (u, s, v) = svd(a);
    let cut = cutoff(&s, tol);
    let mut x = DVector::zeros(a.ncols());
    for i in (0..s.len()).filter(|&i| s[i] > cut) {
        let coef = u.column(i).dot(b) / s[i];
        x += v.column(i) * coef;
    }
    x
}

/// Largest absolute entry, zero for empty matrices.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Column indices of a maximal well-conditioned square minor of a full row
/// rank matrix, chosen by Gaussian elimination with complete pivoting.
/// Returns `None` when the rank is below the row count.
pub fn pivot_columns(m: &DMatrix<f64>, tol: f64) -> Option<Vec<usize>> {
    let (r, c) = m.shape();
    let mut a = m.clone();
    let scale = max_abs(m).max(1.0);
    let mut rows: Vec<usize> = (0..r).collect();
    let mut cols: Vec<usize> = (0..c).collect();
    let mut chosen = Vec::with_capacity(r);
    for _ in 0..r {
        let mut best = (0.0, 0, 0);
        for (ri, &i) in rows.iter().enumerate() {
            for (ci, &j) in cols.iter().enumerate() {
                if a[(i, j)].abs() > best.0 {
                    best = (a[(i, j)].abs(), ri, ci);
                }
            }
        }
        if best.0 <= tol * scale {
            return None;
        }
        let (pi, pj) = (rows.swap_remove(best.1), cols.swap_remove(best.2));
        for &i in &rows {
            let f = a[(i, pj)] / a[(pi, pj)];
            for j in 0..c {
                a[(i, j)] -= f * a[(pi, j)];
            }
        }
        chosen.push(pj);
    }
    chosen.sort_unstable();
    Some(chosen)
}

/// Solves `a x = b` for square `a` over any scalar, with partial pivoting on
/// the real parts. Returns `None` when a pivot falls below `1e-12` relative
/// to the largest entry of `a`.
pub fn solve_scalar<S: Scalar>(a: &[Vec<S>], b: &[Vec<S>]) -> Option<Vec<Vec<S>>> {
    let k = a.len();
    let mut a: Vec<Vec<S>> = a.to_vec();
    let mut b: Vec<Vec<S>> = b.to_vec();
    let scale = a.iter().flatten().fold(0.0f64, |m, x| m.max(x.re().abs())).max(f64::MIN_POSITIVE);
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].re().abs().total_cmp(&a[j][col].re().abs()))?;
        if a[piv][col].re().abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for i in col + 1..k {
            let f = a[i][col].clone() / a[col][col].clone();
            for j in col..k {
                let t = f.clone() * a[col][j].clone();
                a[i][j] = a[i][j].clone() - t;
            }
            for j in 0..b[i].len() {
                let t = f.clone() * b[col][j].clone();
                b[i][j] = b[i][j].clone() - t;
            }
        }
    }
    for col in (0..k).rev() {
        for j in 0..b[col].len() {
            let mut acc = b[col][j].clone();
            for i in col + 1..k {
                acc = acc - a[col][i].clone() * b[i][j].clone();
            }
            b[col][j] = acc / a[col][col].clone();
        }
    }
    Some(b)
}

/// Kernel frame and right inverse of a `k × n` matrix `m` of full row rank,
/// built on the pivot columns `piv`: kernel vector `j` has a one in the
/// `j`-th free column, and the right inverse is zero off the pivot rows.
/// Both are returned as lists of columns.
#[allow(clippy::type_complexity)]
pub fn kernel_and_section<S: Scalar>(m: &[Vec<S>], n: usize, piv: &[usize]) -> Option<(Vec<Vec<S>>, Vec<Vec<S>>)> {
    let k = m.len();
    let a: Vec<Vec<S>> = (0..k).map(|i| piv.iter().map(|&j| m[i][j].clone()).collect()).collect();
    let free: Vec<usize> = (0..n).filter(|j| !piv.contains(j)).collect();
    // right-hand sides: the free columns of m, then the identity
    let rhs: Vec<Vec<S>> = (0..k)
        .map(|i| {
            let mut row: Vec<S> = free.iter().map(|&j| m[i][j].clone()).collect();
            row.extend((0..k).map(|c| if c == i { S::one() } else { S::zero() }));
            row
        })
        .collect();
    let x = solve_scalar(&a, &rhs)?;
    let kernel = free
        .iter()
        .enumerate()
        .map(|(f, &j)| {
            let mut v = vec![S::zero(); n];
            v[j] = S::one();
            for (pi, &p) in piv.iter().enumerate() {
                v[p] = -x[pi][f].clone();
            }
            v
        })
        .collect();
    let nf = free.len();
    let section = (0..k)
        .map(|c| {
            let mut v = vec![S::zero(); n];
            for (pi, &p) in piv.iter().enumerate() {
                v[p] = x[pi][nf + c].clone();
            }
            v
        })
        .collect();
    Some((kernel, section))
}
