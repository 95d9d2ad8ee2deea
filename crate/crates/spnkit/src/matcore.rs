//! Dense symmetric-matrix linear algebra for small orders.
//!
//! Everything in this crate works on matrices of order at most ~14, so the
//! eigensolver is a plain cyclic Jacobi iteration and pseudo-inverses go
//! through the eigendecomposition. No external numeric dependency.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpnError};

/// Default eigen-residual tolerance.
pub const EPS_EIG: f64 = 1e-10;
/// Default positive-semidefiniteness tolerance.
pub const EPS_PSD: f64 = 1e-9;
/// Default rank-decision tolerance for pseudo-inverses.
pub const RANK_TOL: f64 = 1e-9;

/// Dense real symmetric matrix, packed upper-triangle storage.
///
/// Symmetry holds by construction: `get(i, j)` and `get(j, i)` read the same
/// slot, so the type cannot represent an asymmetric matrix.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl std::fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "SymMatrix {}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                write!(f, "{:>10.4} ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "matrix order must be at least 1");
        SymMatrix {
            n,
            data: vec![0.0; n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    /// Builds from full rows; requires an exactly symmetric, finite square array.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(SpnError::BadParams("matrix rows must form a square array".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if !rows[i][j].is_finite() {
                    return Err(SpnError::BadParams(format!("non-finite entry at ({i},{j})")));
                }
                let delta = (rows[i][j] - rows[j][i]).abs();
                if delta > 0.0 {
                    return Err(SpnError::AsymmetricInput { i, j, delta });
                }
            }
        }
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, rows[i][j]);
            }
        }
        Ok(m)
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Diagonal matrix from a vector.
    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Rank-one outer product `v vᵀ`.
    pub fn outer(v: &[f64]) -> Self {
        Self::from_fn(v.len(), |i, j| v[i] * v[j])
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        let (a, b) = if i <= j { (i, j) } else { (j, i) };
        a * self.n - a * (a + 1) / 2 + b
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// Max-norm over all entries.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }

    pub fn frob_norm(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.get(i, j) * self.get(i, j);
            }
        }
        s.sqrt()
    }

    pub fn min_entry(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..self.n {
            for j in i..self.n {
                m = m.min(self.get(i, j));
            }
        }
        m
    }

    pub fn min_offdiag(&self) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                m = m.min(self.get(i, j));
            }
        }
        m
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        SymMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        assert_eq!(self.n, other.n);
        SymMatrix {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> SymMatrix {
        SymMatrix {
            n: self.n,
            data: self.data.iter().map(|a| c * a).collect(),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// The quadratic form `xᵀ A x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        x.iter().zip(self.matvec(x)).map(|(xi, yi)| xi * yi).sum()
    }

    /// Trace inner product `⟨A, B⟩ = tr(AB)`.
    pub fn trace_inner(&self, other: &SymMatrix) -> f64 {
        assert_eq!(self.n, other.n);
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += self.get(i, j) * other.get(i, j);
            }
        }
        s
    }

    /// Principal submatrix indexed by `alpha` (strictly increasing indices).
    pub fn principal(&self, alpha: &[usize]) -> SymMatrix {
        SymMatrix::from_fn(alpha.len(), |i, j| self.get(alpha[i], alpha[j]))
    }

    /// Principal submatrix on the complement of `alpha`.
    pub fn principal_complement(&self, alpha: &[usize]) -> SymMatrix {
        let comp = complement(alpha, self.n);
        self.principal(&comp)
    }

    /// Embeds this matrix into order `n`, placing entries at `support` indices.
    pub fn embed(&self, support: &[usize], n: usize) -> SymMatrix {
        assert_eq!(support.len(), self.n);
        let mut m = SymMatrix::zeros(n);
        for i in 0..self.n {
            for j in i..self.n {
                m.set(support[i], support[j], self.get(i, j));
            }
        }
        m
    }

    /// Congruence `D A D` with a positive diagonal scaling `D = diag(d)`.
    pub fn diag_congruence(&self, d: &[f64]) -> SymMatrix {
        SymMatrix::from_fn(self.n, |i, j| d[i] * self.get(i, j) * d[j])
    }

    /// Simultaneous row/column permutation: entry `(i,j)` of the result is
    /// `A[perm[i], perm[j]]`.
    pub fn permute(&self, perm: &[usize]) -> SymMatrix {
        assert_eq!(perm.len(), self.n);
        SymMatrix::from_fn(self.n, |i, j| self.get(perm[i], perm[j]))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Keeps the diagonal and the negative off-diagonal entries, zeroes the rest.
    /// `G(N(A)) = G_-(A)`.
    pub fn negative_part_matrix(&self, tol: f64) -> SymMatrix {
        SymMatrix::from_fn(self.n, |i, j| {
            if i == j || self.get(i, j) < -tol {
                self.get(i, j)
            } else {
                0.0
            }
        })
    }
}

pub fn complement(alpha: &[usize], n: usize) -> Vec<usize> {
    let mut inside = vec![false; n];
    for &a in alpha {
        inside[a] = true;
    }
    (0..n).filter(|&i| !inside[i]).collect()
}

// ---------------------------------------------------------------------------
// Vector helpers
// ---------------------------------------------------------------------------

pub fn vec_norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn vec_scale(x: &[f64], c: f64) -> Vec<f64> {
    x.iter().map(|v| c * v).collect()
}

/// Entrywise positive part `max(x, 0)`.
pub fn vec_pos(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.max(0.0)).collect()
}

/// Entrywise negative part `max(-x, 0)`, so `x = x₊ - x₋`.
pub fn vec_neg(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| (-v).max(0.0)).collect()
}

pub fn support(x: &[f64], tol: f64) -> Vec<usize> {
    x.iter()
        .enumerate()
        .filter(|(_, &v)| v.abs() > tol)
        .map(|(i, _)| i)
        .collect()
}

/// Embeds `x` (indexed by `idx`) into a zero vector of length `n`.
pub fn vec_embed(x: &[f64], idx: &[usize], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (k, &i) in idx.iter().enumerate() {
        out[i] = x[k];
    }
    out
}

// ---------------------------------------------------------------------------
// Eigendecomposition (cyclic Jacobi)
// ---------------------------------------------------------------------------

/// Full eigendecomposition `A = Q Λ Qᵀ` with eigenvalues sorted ascending and
/// orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    /// `vectors[k]` is the eigenvector for `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    pub fn min_value(&self) -> f64 {
        self.values[0]
    }

    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.values.len();
        SymMatrix::from_fn(n, |i, j| {
            self.values
                .iter()
                .zip(&self.vectors)
                .map(|(l, q)| l * q[i] * q[j])
                .sum()
        })
    }
}

/// Cyclic Jacobi eigensolver. Always converges for symmetric input; the sweep
/// cap is an internal defect guard, not a user-facing error.
pub fn eig_sym(a: &SymMatrix) -> EigenDecomposition {
    let n = a.n();
    let mut m = a.to_rows();
    let mut q = vec![vec![0.0; n]; n];
    for (i, row) in q.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    if n > 1 {
        let scale = a.max_abs().max(1.0);
        let stop = 1e-15 * scale;
        const MAX_SWEEPS: usize = 100;
        for sweep in 0..MAX_SWEEPS {
            let mut off = 0.0f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    off = off.max(m[i][j].abs());
                }
            }
            if off <= stop {
                break;
            }
            debug_assert!(sweep + 1 < MAX_SWEEPS, "Jacobi sweep cap reached");
            for p in 0..n - 1 {
                for r in (p + 1)..n {
                    let apq = m[p][r];
                    if apq.abs() <= stop * 1e-2 {
                        continue;
                    }
                    let theta = (m[r][r] - m[p][p]) / (2.0 * apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (1.0 + theta * theta).sqrt())
                    } else {
                        -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let mkp = m[k][p];
                        let mkr = m[k][r];
                        m[k][p] = c * mkp - s * mkr;
                        m[k][r] = s * mkp + c * mkr;
                    }
                    for k in 0..n {
                        let mpk = m[p][k];
                        let mrk = m[r][k];
                        m[p][k] = c * mpk - s * mrk;
                        m[r][k] = s * mpk + c * mrk;
                    }
                    for qrow in q.iter_mut() {
                        let qkp = qrow[p];
                        let qkr = qrow[r];
                        qrow[p] = c * qkp - s * qkr;
                        qrow[r] = s * qkp + c * qkr;
                    }
                }
            }
        }
    }
    let mut pairs: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| (m[k][k], (0..n).map(|i| q[i][k]).collect::<Vec<f64>>()))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // Deterministic sign: largest-magnitude component positive.
    for (_, v) in pairs.iter_mut() {
        let mut best = 0usize;
        for (i, &x) in v.iter().enumerate() {
            if x.abs() > v[best].abs() {
                best = i;
            }
        }
        if v[best] < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
    EigenDecomposition {
        values: pairs.iter().map(|p| p.0).collect(),
        vectors: pairs.into_iter().map(|p| p.1).collect(),
    }
}

/// PSD test: true iff the minimum eigenvalue is at least `-tol·(1+‖A‖_max)`.
/// On false, the certificate is an eigenvector `w` with `wᵀAw < 0`.
pub fn is_psd(a: &SymMatrix, tol: f64) -> crate::verdict::ConeVerdict {
    use crate::verdict::{Certificate, ConeVerdict, Method, TriState};
    let eig = eig_sym(a);
    let threshold = -tol * (1.0 + a.max_abs());
    let lam = eig.min_value();
    if lam >= threshold {
        ConeVerdict {
            member: TriState::True,
            certificate: None,
            method: Method::Eigenvalue,
            margin: lam,
        }
    } else {
        ConeVerdict {
            member: TriState::False,
            certificate: Some(Certificate::Vector(eig.vectors[0].clone())),
            method: Method::Eigenvalue,
            margin: lam,
        }
    }
}

/// Convenience boolean PSD check at the default tolerance.
pub fn is_psd_bool(a: &SymMatrix, tol: f64) -> bool {
    eig_sym(a).min_value() >= -tol * (1.0 + a.max_abs())
}

// ---------------------------------------------------------------------------
// Pseudo-inverse and Schur complements
// ---------------------------------------------------------------------------

/// Moore–Penrose pseudo-inverse through the eigendecomposition. Eigenvalues of
/// magnitude at most `rank_tol·max(1, ‖A‖_max)` are treated as zero.
pub fn pseudo_inverse(a: &SymMatrix, rank_tol: f64) -> SymMatrix {
    let eig = eig_sym(a);
    let cutoff = rank_tol * a.max_abs().max(1.0);
    let n = a.n();
    SymMatrix::from_fn(n, |i, j| {
        eig.values
            .iter()
            .zip(&eig.vectors)
            .map(|(&l, q)| if l.abs() > cutoff { q[i] * q[j] / l } else { 0.0 })
            .sum()
    })
}

/// Solves `A x = b` in the least-squares sense via the pseudo-inverse.
pub fn pinv_solve(a: &SymMatrix, b: &[f64], rank_tol: f64) -> Vec<f64> {
    pseudo_inverse(a, rank_tol).matvec(b)
}

/// Generalized Schur complement `A/A[alpha] = B - Eᵀ M† E`, where `M = A[alpha]`,
/// `B = A[alpha^c]` and `E = A[alpha, alpha^c]`. Uses the pseudo-inverse, so it
/// is defined also for singular corners.
pub fn schur_complement(a: &SymMatrix, alpha: &[usize]) -> Result<SymMatrix> {
    let n = a.n();
    if alpha.is_empty() || alpha.len() >= n {
        return Err(SpnError::BadParams(
            "alpha must be a nonempty proper index subset".into(),
        ));
    }
    let comp = complement(alpha, n);
    let m = a.principal(alpha);
    let m_dag = pseudo_inverse(&m, RANK_TOL);
    let r = alpha.len();
    let c = comp.len();
    // E is r x c with E[k][l] = A[alpha[k], comp[l]].
    let e: Vec<Vec<f64>> = (0..r)
        .map(|k| (0..c).map(|l| a.get(alpha[k], comp[l])).collect())
        .collect();
    Ok(SymMatrix::from_fn(c, |i, j| {
        let mut s = a.get(comp[i], comp[j]);
        for k in 0..r {
            for l in 0..r {
                s -= e[k][i] * m_dag.get(k, l) * e[l][j];
            }
        }
        s
    }))
}

/// Gaussian elimination with partial pivoting on a small dense system.
/// Returns None when the matrix is numerically singular.
pub(crate) fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut rhs = b.to_vec();
    for col in 0..n {
        let mut piv = col;
        for r in (col + 1)..n {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
            rhs[r] -= f * rhs[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = rhs[col];
        for c in (col + 1)..n {
            s -= m[col][c] * x[c];
        }
        x[col] = s / m[col][col];
    }
    Some(x)
}

// ---------------------------------------------------------------------------
// Z- and M-matrix predicates
// ---------------------------------------------------------------------------

/// All off-diagonal entries nonpositive.
pub fn is_z_matrix(a: &SymMatrix) -> bool {
    let n = a.n();
    for i in 0..n {
        for j in (i + 1)..n {
            if a.get(i, j) > 0.0 {
                return false;
            }
        }
    }
    true
}

/// Symmetric M-matrix: a Z-matrix that is positive semidefinite.
pub fn is_m_matrix(a: &SymMatrix, tol: f64) -> bool {
    is_z_matrix(a) && is_psd_bool(a, tol)
}
