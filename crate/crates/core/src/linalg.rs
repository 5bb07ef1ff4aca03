//! Exact rational linear algebra.
//!
//! All numbers are arbitrary-precision rationals kept in lowest terms with a
//! positive denominator ([`Rat`] is backed by `num_rational::BigRational`,
//! which maintains exactly that normal form). Vectors and matrices are thin
//! wrappers that add the handful of exact operations the rest of the crate
//! needs: Gaussian solving, determinants (fraction-free Bareiss elimination
//! on integral input), Sylvester negative-definiteness tests, and integer
//! Gram-matrix helpers for the chamber search.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Arbitrary-precision rational, always in lowest terms, denominator > 0.
pub type Rat = BigRational;

/// Rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

/// Rational `p/q`. Panics if `q == 0`.
pub fn ratio(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

/// Parse `"p"` or `"p/q"`.
pub fn parse_rat(s: &str) -> Result<Rat> {
    s.trim()
        .parse::<Rat>()
        .map_err(|e| Error::OutOfRange(format!("cannot parse rational {s:?}: {e}")))
}

/// A dense rational vector.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QVector(pub Vec<Rat>);

impl QVector {
    pub fn zero(n: usize) -> Self {
        QVector(vec![Rat::zero(); n])
    }

    pub fn from_i64(v: &[i64]) -> Self {
        QVector(v.iter().map(|&x| rat(x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Rat::is_zero)
    }

    pub fn add(&self, other: &QVector) -> QVector {
        assert_eq!(self.len(), other.len());
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &QVector) -> QVector {
        assert_eq!(self.len(), other.len());
        QVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &Rat) -> QVector {
        QVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> QVector {
        QVector(self.0.iter().map(|a| -a).collect())
    }

    /// Plain (Euclidean) dot product; the intersection pairing lives on
    /// [`crate::lattice::SurfaceDatum`].
    pub fn dot(&self, other: &QVector) -> Rat {
        assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// True when every entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.0.iter().all(Rat::is_integer)
    }

    /// The primitive integral vector spanning the same ray, together with
    /// the positive scale `s` such that `self = s * primitive`. The sign is
    /// not changed: the primitive vector points the same way as `self`.
    /// Returns `None` for the zero vector.
    pub fn primitive_with_scale(&self) -> Option<(QVector, Rat)> {
        if self.is_zero() {
            return None;
        }
        let mut denom_lcm = BigInt::one();
        for x in &self.0 {
            denom_lcm = denom_lcm.lcm(x.denom());
        }
        let ints: Vec<BigInt> = self
            .0
            .iter()
            .map(|x| x.numer() * (&denom_lcm / x.denom()))
            .collect();
        let mut g = BigInt::zero();
        for n in &ints {
            g = g.gcd(n);
        }
        let prim = QVector(ints.iter().map(|n| Rat::from(n / &g)).collect());
        // self = (g / denom_lcm) * prim
        let scale = Rat::new(g, denom_lcm);
        Some((prim, scale))
    }

    /// Primitive integral vector on the same ray (same direction).
    pub fn primitive(&self) -> Option<QVector> {
        self.primitive_with_scale().map(|(p, _)| p)
    }
}

impl fmt::Debug for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

/// A dense rational matrix in row-major order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rat>,
}

impl QMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rat::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|row| row.iter().map(|&x| rat(x)).collect())
                .collect(),
        )
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows)
                .all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(Rat::is_integer)
    }

    pub fn mul_vec(&self, v: &QVector) -> Result<QVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, vector has length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok(QVector(
            (0..self.rows)
                .map(|i| (0..self.cols).map(|j| &self[(i, j)] * &v.0[j]).sum())
                .collect(),
        ))
    }

    /// Principal submatrix on the given (distinct) index set.
    pub fn principal_submatrix(&self, idx: &[usize]) -> QMatrix {
        let n = idx.len();
        let mut m = QMatrix::zero(n, n);
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m[(a, b)] = self[(i, j)].clone();
            }
        }
        m
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Rat;
    fn index(&self, (i, j): (usize, usize)) -> &Rat {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rat {
        let c = self.cols;
        &mut self.data[i * c + j]
    }
}

/// Solve `M x = b` for square `M` by exact Gaussian elimination.
pub fn solve_linear(m: &QMatrix, b: &QVector) -> Result<QVector> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("solve requires a square matrix".into()));
    }
    if b.len() != m.rows {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, rhs has length {}",
            m.rows,
            m.cols,
            b.len()
        )));
    }
    let n = m.rows;
    // Augmented rows.
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = (0..n).map(|j| m[(i, j)].clone()).collect();
            row.push(b.0[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularMatrix)?;
        a.swap(col, pivot);
        let inv = a[col][col].clone();
        for j in col..=n {
            a[col][j] = &a[col][j] / &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in col..=n {
                    a[r][j] = &a[r][j] - &f * &a[col][j];
                }
            }
        }
    }
    Ok(QVector(a.into_iter().map(|row| row[row.len() - 1].clone()).collect()))
}

/// Exact determinant. Integral matrices go through fraction-free Bareiss
/// elimination over `BigInt`; general rational matrices are scaled row-wise
/// to integers first.
pub fn determinant(m: &QMatrix) -> Result<Rat> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("determinant requires a square matrix".into()));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(Rat::one());
    }
    // Clear denominators row by row so Bareiss runs over integers.
    let mut scale = Rat::one();
    let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut l = BigInt::one();
        for j in 0..n {
            l = l.lcm(m[(i, j)].denom());
        }
        scale *= Rat::new(BigInt::one(), l.clone());
        a.push((0..n).map(|j| m[(i, j)].numer() * (&l / m[(i, j)].denom())).collect());
    }
    let det = bareiss_det(&mut a);
    Ok(Rat::from(det) * scale)
}

/// Fraction-free Bareiss determinant of an integer matrix (consumed).
fn bareiss_det(a: &mut [Vec<BigInt>]) -> BigInt {
    let n = a.len();
    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev; // exact division (Bareiss)
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    if sign < 0 {
        -prev
    } else {
        prev
    }
}

/// Leading principal minors `det(M[0..k, 0..k])` for `k = 1..=n`.
pub fn leading_principal_minors(m: &QMatrix) -> Result<Vec<Rat>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("minors require a square matrix".into()));
    }
    (1..=m.rows)
        .map(|k| determinant(&m.principal_submatrix(&(0..k).collect::<Vec<_>>())))
        .collect()
}

/// Sylvester test: a symmetric matrix is negative definite iff its leading
/// principal minors alternate in sign starting negative, i.e.
/// `(-1)^k det_k > 0` for all `k`. The empty matrix is negative definite.
pub fn is_negative_definite(m: &QMatrix) -> Result<bool> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    for (k, d) in leading_principal_minors(m)?.into_iter().enumerate() {
        let want_positive = (k + 1) % 2 == 0;
        let ok = if want_positive { d.is_positive() } else { d.is_negative() };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Signature `(n_+, n_-, n_0)` of a symmetric matrix, by exact congruence
/// diagonalization (robust even when leading minors vanish).
pub fn signature(m: &QMatrix) -> Result<(usize, usize, usize)> {
    if !m.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = m.rows;
    let mut a: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)].clone()).collect())
        .collect();
    let (mut pos, mut neg, mut zero) = (0usize, 0usize, 0usize);
    let mut k = 0usize;
    while k < n {
        if a[k][k].is_zero() {
            // Try to bring a nonzero entry to the pivot: first a later
            // diagonal entry, else create one from an off-diagonal pair.
            if let Some(r) = (k + 1..n).find(|&r| !a[r][r].is_zero()) {
                swap_sym(&mut a, k, r);
            } else if let Some((r, c)) = find_offdiag(&a, k) {
                // Row/col addition makes the diagonal nonzero:
                // a[r][r] += 2 a[r][c] (with a[r][r] = a[c][c] = 0).
                add_sym(&mut a, r, c);
                if r != k {
                    swap_sym(&mut a, k, r);
                }
            } else {
                zero += n - k; // remaining block is identically zero
                break;
            }
        }
        let piv = a[k][k].clone();
        if piv.is_positive() {
            pos += 1;
        } else {
            neg += 1;
        }
        for i in k + 1..n {
            if !a[i][k].is_zero() {
                let f = &a[i][k] / &piv;
                for j in k..n {
                    a[i][j] = &a[i][j] - &f * &a[k][j];
                }
                for j in k..n {
                    a[j][i] = &a[j][i] - &f * &a[j][k];
                }
            }
        }
        k += 1;
    }
    Ok((pos, neg, zero))
}

fn swap_sym(a: &mut [Vec<Rat>], i: usize, j: usize) {
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// Congruence `row_r += row_c`, `col_r += col_c`.
fn add_sym(a: &mut Vec<Vec<Rat>>, r: usize, c: usize) {
    let n = a.len();
    for j in 0..n {
        let v = a[c][j].clone();
        a[r][j] = &a[r][j] + &v;
    }
    for i in 0..n {
        let v = a[i][c].clone();
        a[i][r] = &a[i][r] + &v;
    }
}

fn find_offdiag(a: &[Vec<Rat>], from: usize) -> Option<(usize, usize)> {
    let n = a.len();
    for r in from..n {
        for c in from..n {
            if r != c && !a[r][c].is_zero() {
                return Some((r, c));
            }
        }
    }
    None
}

/// Determinant of a small integer matrix by fraction-free Bareiss
/// elimination over checked `i128`. `None` on overflow.
pub fn bareiss_det_i128(a: &mut [Vec<i128>]) -> Option<i128> {
    let n = a.len();
    let mut sign = 1i128;
    let mut prev: i128 = 1;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return Some(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[k][k]
                    .checked_mul(a[i][j])?
                    .checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = num / prev; // exact division (Bareiss)
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    Some(sign * prev)
}

/// Solve `A·x = b` for small integer systems by Cramer's rule: returns
/// `(numerators, det)` with `x_i = numerators[i] / det`. `None` when `A` is
/// singular or an intermediate product overflows `i128`.
pub fn cramer_i128(a: &[Vec<i128>], b: &[i128]) -> Option<(Vec<i128>, i128)> {
    let n = a.len();
    let det = bareiss_det_i128(&mut a.to_vec())?;
    if det == 0 {
        return None;
    }
    let mut nums = Vec::with_capacity(n);
    for col in 0..n {
        let mut m = a.to_vec();
        for row in 0..n {
            m[row][col] = b[row];
        }
        nums.push(bareiss_det_i128(&mut m)?);
    }
    Some((nums, det))
}

/// Rank of a set of rational row vectors (consumes the rows).
pub fn rank_of_rows(rows: &mut [Vec<Rat>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].clone();
        for j in col..cols {
            rows[rank][j] = &rows[rank][j] / &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for j in col..cols {
                    rows[r][j] = &rows[r][j] - &f * &rows[rank][j];
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Basis of the null space `{x ∈ ℚⁿ : r·x = 0 for every row r}`, one vector
/// per free column of the reduced row echelon form.  An empty row list (or
/// all-zero rows) yields the standard basis of ℚⁿ.
pub fn kernel_basis(rows: &[Vec<Rat>], n: usize) -> Vec<Vec<Rat>> {
    let mut m: Vec<Vec<Rat>> = rows.iter().filter(|r| !r.iter().all(Rat::is_zero)).cloned().collect();
    for r in &m {
        assert_eq!(r.len(), n, "kernel_basis row length");
    }
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0usize;
    for col in 0..n {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].clone();
        for j in 0..n {
            m[rank][j] = &m[rank][j] / &inv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in 0..n {
                    m[r][j] = &m[r][j] - &f * &m[rank][j];
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    let mut basis = Vec::with_capacity(n - rank);
    for free in 0..n {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); n];
        v[free] = Rat::one();
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = -m[i][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// Integer symmetric Gram matrix with exact negative-definiteness tests,
/// used by the Zariski-chamber search. All arithmetic is overflow-checked.
#[derive(Clone, Debug)]
pub struct IntGram {
    n: usize,
    data: Vec<i64>,
}

impl IntGram {
    pub fn new(n: usize, data: Vec<i64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch("IntGram data length".into()));
        }
        for i in 0..n {
            for j in 0..i {
                if data[i * n + j] != data[j * n + i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(IntGram { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.n + j]
    }

    /// Is the 2x2 principal submatrix on `{i, j}` negative definite?
    /// (A cheap necessary condition used to prune the chamber search.)
    pub fn pair_neg_def(&self, i: usize, j: usize) -> bool {
        let (aii, ajj, aij) = (self.at(i, i), self.at(j, j), self.at(i, j));
        aii < 0 && (aii as i128) * (ajj as i128) - (aij as i128) * (aij as i128) > 0
    }

    /// Exact negative-definiteness of the principal submatrix on `idx`,
    /// by fraction-free Bareiss elimination over checked i128.
    pub fn subset_neg_def(&self, idx: &[usize]) -> Result<bool> {
        let k = idx.len();
        let mut a = [[0i128; 16]; 16];
        if k > 16 {
            return Err(Error::BudgetExceeded(
                "negative-definite subsets larger than 16 are unsupported".into(),
            ));
        }
        for (r, &i) in idx.iter().enumerate() {
            for (c, &j) in idx.iter().enumerate() {
                a[r][c] = self.at(i, j) as i128;
            }
        }
        let mut prev: i128 = 1;
        for s in 0..k {
            // Leading minor d_{s+1} will land in a[s][s]; a zero pivot means
            // the minor vanishes, which already refutes definiteness.
            let piv = a[s][s];
            let want_positive = (s + 1) % 2 == 0;
            if piv == 0 || (piv > 0) != want_positive {
                return Ok(false);
            }
            for i in s + 1..k {
                for j in s + 1..k {
                    let num = piv
                        .checked_mul(a[i][j])
                        .and_then(|x| a[i][s].checked_mul(a[s][j]).and_then(|y| x.checked_sub(y)))
                        .ok_or_else(|| Error::Overflow("Gram minor computation".into()))?;
                    a[i][j] = num / prev; // exact (Bareiss)
                }
            }
            prev = piv;
        }
        Ok(true)
    }
}
