//! Exact desk-scale copositivity decision, zero sets and irreducibility.
//!
//! The decision runs a fixed ladder of structural fast paths and falls back
//! to the exhaustive eigenvector criterion: a symmetric matrix is copositive
//! iff no principal submatrix has a positive eigenvector for a negative
//! eigenvalue. An independent oracle minimizes the quadratic form over the
//! standard simplex by support enumeration; it shares no code path with the
//! eigenvector criterion and is used to cross-check it.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SpnError};
use crate::graphs::derive_graphs;
use crate::matcore::{
    self, eig_sym, is_psd_bool, is_z_matrix, pseudo_inverse, support, vec_embed, vec_neg,
    vec_norm, vec_pos, vec_scale, SymMatrix,
};
use crate::verdict::{Certificate, ConeVerdict, Method, TriState};

/// Hard cap on the exhaustive criterion (2^n principal submatrices).
pub const KAPLAN_MAX_N: usize = 14;
/// Hard cap on the simplex oracle.
pub const ORACLE_MAX_N: usize = 10;
/// Components of an eigenvector count as positive above this threshold after
/// normalizing the largest-magnitude component to +1.
const POS_COMPONENT_TOL: f64 = 1e-9;

/// A zero of a copositive matrix: u >= 0, u != 0, u^T A u = 0, normalized to
/// unit length, together with its support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroVector {
    pub u: Vec<f64>,
    pub support: Vec<usize>,
}

fn scale_of(a: &SymMatrix) -> f64 {
    1.0 + a.max_abs()
}

// ---------------------------------------------------------------------------
// Dispatcher
// ---------------------------------------------------------------------------

/// Decides copositivity for n <= 14. Never inconclusive within the cap; the
/// method tag records the first applicable fast path in this fixed order:
/// Diananda bound, nonnegative entries, Z-matrix, Hoffman-Pereira {0,1,-1},
/// acyclic N(A), rank-one perturbation of the identity, exhaustive criterion.
pub fn test_copositive(a: &SymMatrix, tol: f64) -> Result<ConeVerdict> {
    let n = a.n();
    if n > KAPLAN_MAX_N {
        return Err(SpnError::OrderTooLarge { n, max: KAPLAN_MAX_N });
    }
    let scale = scale_of(a);
    let thr = tol * scale;

    // (1) negative diagonal or Diananda lower bound violated
    for i in 0..n {
        if a.get(i, i) < -thr {
            let mut x = vec![0.0; n];
            x[i] = 1.0;
            return Ok(ConeVerdict::member_false(
                Method::Diananda,
                Certificate::Vector(x.clone()),
                a.quad_form(&x),
            ));
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let bound = (a.get(i, i).max(0.0) * a.get(j, j).max(0.0)).sqrt();
            if a.get(i, j) < -bound - thr {
                let sub = a.principal(&[i, j]);
                let eig = eig_sym(&sub);
                let w = &eig.vectors[0];
                let w = if w[0] + w[1] < 0.0 { vec![-w[0], -w[1]] } else { w.clone() };
                debug_assert!(w[0] > 0.0 && w[1] > 0.0);
                let x = vec_embed(&w, &[i, j], n);
                return Ok(ConeVerdict::member_false(
                    Method::Diananda,
                    Certificate::Vector(x.clone()),
                    a.quad_form(&x),
                ));
            }
        }
    }

    // (2) all entries nonnegative
    if a.min_entry() >= -thr {
        return Ok(ConeVerdict::member_true(Method::NonnegativeEntries, a.min_entry()));
    }

    // (3) Z-matrix: copositive iff positive semidefinite
    if is_z_matrix_tol(a, thr) {
        let eig = eig_sym(a);
        let lam = eig.min_value();
        if lam >= -thr {
            return Ok(ConeVerdict::member_true(Method::ZMatrix, lam));
        }
        // A Z-matrix certificate can be made nonnegative entrywise.
        let x: Vec<f64> = eig.vectors[0].iter().map(|v| v.abs()).collect();
        let val = a.quad_form(&x);
        debug_assert!(val < 0.0);
        return Ok(ConeVerdict::member_false(Method::ZMatrix, Certificate::Vector(x), val));
    }

    // (4) unit diagonal with entries in {0, 1, -1}: Hoffman-Pereira
    if let Some(v) = hoffman_pereira(a, thr) {
        return Ok(v);
    }

    // (5) acyclic graph: copositive iff N(A) is positive semidefinite
    let (g, _, gminus, _, _) = derive_graphs(a, thr);
    if g.is_acyclic() {
        if let Some(v) = acyclic_verdict(a, &gminus, thr) {
            return Ok(v);
        }
    }

    // (6) c(I - vv^T), c > 0: rank test on cI - A, then norm conditions
    if let Some(v) = rank1_identity_perturbation(a, tol) {
        return Ok(v);
    }

    // (7) exhaustive eigenvector criterion
    test_copositive_kaplan(a, tol)
}

fn is_z_matrix_tol(a: &SymMatrix, thr: f64) -> bool {
    let n = a.n();
    for i in 0..n {
        for j in (i + 1)..n {
            if a.get(i, j) > thr {
                return false;
            }
        }
    }
    true
}

/// Unit diagonal, entries in {0, 1, -1}: copositive iff G_{-1}(A) is triangle
/// free and every pair at G_{-1}-distance 2 has entry 1.
fn hoffman_pereira(a: &SymMatrix, thr: f64) -> Option<ConeVerdict> {
    let n = a.n();
    for i in 0..n {
        if (a.get(i, i) - 1.0).abs() > thr {
            return None;
        }
        for j in (i + 1)..n {
            let v = a.get(i, j);
            if v.abs() > thr && (v - 1.0).abs() > thr && (v + 1.0).abs() > thr {
                return None;
            }
        }
    }
    let (_, _, _, _, gm1) = derive_graphs(a, thr);
    // triangle in G_{-1}
    for i in 0..n {
        for j in (i + 1)..n {
            if !gm1.has_edge(i, j) {
                continue;
            }
            for k in (j + 1)..n {
                if gm1.has_edge(i, k) && gm1.has_edge(j, k) {
                    let x = vec_embed(&[1.0, 1.0, 1.0], &[i, j, k], n);
                    let x = vec_scale(&x, 1.0 / vec_norm(&x));
                    let val = a.quad_form(&x);
                    return Some(ConeVerdict::member_false(
                        Method::HoffmanPereira,
                        Certificate::Vector(x),
                        val,
                    ));
                }
            }
        }
    }
    // distance-2 pairs must have entry 1
    for i in 0..n {
        let dist = gm1.distances(i);
        for j in (i + 1)..n {
            if dist[j] == 2 && (a.get(i, j) - 1.0).abs() > thr {
                let k = gm1
                    .neighbors(i)
                    .into_iter()
                    .find(|&k| gm1.has_edge(k, j))
                    .expect("distance-2 pair has a common neighbor");
                let x = vec_embed(&[1.0, 1.0, 2.0], &[i, j, k], n);
                let x = vec_scale(&x, 1.0 / vec_norm(&x));
                let val = a.quad_form(&x);
                return Some(ConeVerdict::member_false(
                    Method::HoffmanPereira,
                    Certificate::Vector(x),
                    val,
                ));
            }
        }
    }
    Some(ConeVerdict::member_true(Method::HoffmanPereira, 0.0))
}

/// Acyclic graph: decide through N(A). On failure the certificate comes from
/// the non-PSD block of N(A) on a component of G_-(A), whose entries within
/// that component agree with A.
fn acyclic_verdict(a: &SymMatrix, gminus: &crate::graphs::Graph, thr: f64) -> Option<ConeVerdict> {
    let na = a.negative_part_matrix(thr);
    let eig = eig_sym(&na);
    if eig.min_value() >= -thr {
        return Some(ConeVerdict::member_true(Method::AcyclicN, eig.min_value()));
    }
    for comp in gminus.components() {
        let block = a.principal(&comp);
        let beig = eig_sym(&block);
        if beig.min_value() < -thr {
            // copositive Z-block certificate, nonnegative by construction
            let w: Vec<f64> = beig.vectors[0].iter().map(|v| v.abs()).collect();
            let x = vec_embed(&w, &comp, a.n());
            let val = a.quad_form(&x);
            if val < 0.0 {
                return Some(ConeVerdict::member_false(
                    Method::AcyclicN,
                    Certificate::Vector(x),
                    val,
                ));
            }
        }
    }
    // Numerical disagreement between N(A) spectrum and per-component blocks;
    // fall through to the exhaustive test.
    None
}

/// Detects A = c(I - vv^T) with c > 0 by its eigenstructure (eigenvalue c of
/// multiplicity n-1), then applies the norm conditions on v_+ and v_-.
fn rank1_identity_perturbation(a: &SymMatrix, tol: f64) -> Option<ConeVerdict> {
    let n = a.n();
    if n < 2 {
        return None;
    }
    let scale = scale_of(a);
    let eig = eig_sym(a);
    let c = eig.values[n - 1];
    if c <= tol * scale {
        return None;
    }
    if eig.values[1..].iter().any(|&l| (l - c).abs() > 1e-8 * scale) {
        return None;
    }
    let lam0 = eig.values[0];
    let vv = ((c - lam0) / c).max(0.0);
    let v = vec_scale(&eig.vectors[0], vv.sqrt());
    // rank test: cI - A must be (numerically) c vv^T
    let recon = SymMatrix::identity(n).scale(c).sub(&SymMatrix::outer(&v).scale(c));
    if recon.sub(a).max_abs() > 1e-8 * scale {
        return None;
    }
    let np = vec_norm(&vec_pos(&v));
    let nm = vec_norm(&vec_neg(&v));
    if np <= 1.0 + tol && nm <= 1.0 + tol {
        return Some(ConeVerdict::member_true(
            Method::Rank1Perturbation,
            (1.0 - np).min(1.0 - nm),
        ));
    }
    let w = if np > 1.0 + tol { vec_pos(&v) } else { vec_neg(&v) };
    let x = vec_scale(&w, 1.0 / vec_norm(&w));
    let val = a.quad_form(&x);
    Some(ConeVerdict::member_false(
        Method::Rank1Perturbation,
        Certificate::Vector(x),
        val,
    ))
}

// ---------------------------------------------------------------------------
// Exhaustive criterion
// ---------------------------------------------------------------------------

/// Exhaustive test over all 2^n - 1 principal submatrices: not copositive iff
/// some A[alpha] has an eigenpair (lambda, w) with lambda negative and w
/// strictly positive. The certificate is w embedded into R^n.
pub fn test_copositive_kaplan(a: &SymMatrix, tol: f64) -> Result<ConeVerdict> {
    let n = a.n();
    if n > KAPLAN_MAX_N {
        return Err(SpnError::OrderTooLarge { n, max: KAPLAN_MAX_N });
    }
    let scale = scale_of(a);
    let neg_thr = -tol.max(1e-9) * scale;
    for mask in 1u32..(1u32 << n) {
        let alpha: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let sub = a.principal(&alpha);
        if let Some(w) = negative_positive_eigenvector(&sub, neg_thr) {
            let x = vec_embed(&w, &alpha, n);
            let x = vec_scale(&x, 1.0 / vec_norm(&x));
            let val = a.quad_form(&x);
            return Ok(ConeVerdict::member_false(
                Method::Kaplan,
                Certificate::Vector(x),
                val,
            ));
        }
    }
    Ok(ConeVerdict::member_true(Method::Kaplan, 0.0))
}

/// Looks for a strictly positive eigenvector with eigenvalue below `neg_thr`.
/// Repeated negative eigenvalues are handled by searching the eigenspace for
/// a positive vector over sampled directions.
fn negative_positive_eigenvector(a: &SymMatrix, neg_thr: f64) -> Option<Vec<f64>> {
    let m = a.n();
    let eig = eig_sym(a);
    let cluster_tol = 1e-8 * scale_of(a);
    let mut k = 0;
    while k < m && eig.values[k] < neg_thr {
        // cluster of (numerically) equal negative eigenvalues
        let mut end = k + 1;
        while end < m && (eig.values[end] - eig.values[k]).abs() <= cluster_tol {
            end += 1;
        }
        if end <= m && eig.values[end - 1] < neg_thr {
            let basis: Vec<&Vec<f64>> = eig.vectors[k..end].iter().collect();
            if basis.len() == 1 {
                if let Some(w) = positive_normalization(basis[0]) {
                    return Some(w);
                }
            } else if let Some(w) = positive_in_span(&basis) {
                return Some(w);
            }
        }
        k = end;
    }
    None
}

/// Normalizes so the largest-magnitude component is +1; Some iff all
/// components exceed the positivity threshold.
fn positive_normalization(w: &[f64]) -> Option<Vec<f64>> {
    let mut best = 0usize;
    for (i, &x) in w.iter().enumerate() {
        if x.abs() > w[best].abs() {
            best = i;
        }
    }
    if w[best] == 0.0 {
        return None;
    }
    let scaled: Vec<f64> = w.iter().map(|&x| x / w[best]).collect();
    if scaled.iter().all(|&x| x > POS_COMPONENT_TOL) {
        Some(scaled)
    } else {
        None
    }
}

/// Sampled search of a k-dimensional eigenspace for a positive vector:
/// maximize the minimum component over the unit sphere by deterministic
/// random sampling (1000 samples) plus the basis directions.
fn positive_in_span(basis: &[&Vec<f64>]) -> Option<Vec<f64>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_cafe);
    let k = basis.len();
    let m = basis[0].len();
    let combine = |c: &[f64]| -> Vec<f64> {
        (0..m)
            .map(|i| basis.iter().zip(c).map(|(b, &ci)| b[i] * ci).sum())
            .collect()
    };
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for s in 0..k {
        let mut c = vec![0.0; k];
        c[s] = 1.0;
        candidates.push(c.clone());
        c[s] = -1.0;
        candidates.push(c);
    }
    for _ in 0..1000 {
        let c: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = vec_norm(&c);
        if norm > 1e-9 {
            candidates.push(vec_scale(&c, 1.0 / norm));
        }
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for c in &candidates {
        let w = combine(c);
        if let Some(scaled) = positive_normalization(&w) {
            let minc = scaled.iter().cloned().fold(f64::INFINITY, f64::min);
            if best.as_ref().map(|(b, _)| minc > *b).unwrap_or(true) {
                best = Some((minc, scaled));
            }
        }
    }
    best.map(|(_, w)| w)
}

// ---------------------------------------------------------------------------
// Simplex oracle
// ---------------------------------------------------------------------------

/// Global minimum of x^T A x over the standard simplex, by enumerating every
/// support set and solving the stationarity system A[alpha] z = lambda 1,
/// 1^T z = 1 with a pseudo-inverse. All vertices e_i are included. A matrix is
/// copositive iff this minimum is nonnegative.
pub fn simplex_min_oracle(a: &SymMatrix) -> Result<(f64, Vec<f64>)> {
    let n = a.n();
    if n > ORACLE_MAX_N {
        return Err(SpnError::OrderTooLarge { n, max: ORACLE_MAX_N });
    }
    let scale = scale_of(a);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |x: Vec<f64>| {
        // clip stray negatives, renormalize to the simplex
        let clipped: Vec<f64> = x.iter().map(|&v| v.max(0.0)).collect();
        let s: f64 = clipped.iter().sum();
        if s <= 1e-12 {
            return;
        }
        let x = vec_scale(&clipped, 1.0 / s);
        let val = a.quad_form(&x);
        if best.as_ref().map(|(b, _)| val < *b).unwrap_or(true) {
            best = Some((val, x));
        }
    };
    for mask in 1u32..(1u32 << n) {
        let alpha: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let m = alpha.len();
        if m == 1 {
            consider(vec_embed(&[1.0], &alpha, n));
            continue;
        }
        // K [z; t] = [0; 1] with K = [[A[alpha], 1], [1^T, 0]] encodes
        // A[alpha] z = -t 1, 1^T z = 1.
        let k_mat = SymMatrix::from_fn(m + 1, |i, j| {
            if i < m && j < m {
                a.get(alpha[i], alpha[j])
            } else if i == m && j == m {
                0.0
            } else {
                1.0
            }
        });
        let mut b = vec![0.0; m + 1];
        b[m] = 1.0;
        let k_dag = pseudo_inverse(&k_mat, 1e-10);
        let y = k_dag.matvec(&b);
        let resid: f64 = k_mat
            .matvec(&y)
            .iter()
            .zip(&b)
            .map(|(u, v)| (u - v).abs())
            .fold(0.0, f64::max);
        if resid > 1e-8 * scale {
            continue; // inconsistent stationarity system on this face
        }
        let z = &y[..m];
        if z.iter().any(|&v| v <= -1e-12) {
            continue;
        }
        consider(vec_embed(z, &alpha, n));
        // Underdetermined systems: walk kernel directions to the face edges.
        let keig = eig_sym(&k_mat);
        for (l, q) in keig.values.iter().zip(&keig.vectors) {
            if l.abs() > 1e-10 * scale {
                continue;
            }
            let d = &q[..m];
            if vec_norm(d) < 1e-12 {
                continue;
            }
            for dir in [1.0, -1.0] {
                let mut smax = f64::INFINITY;
                for (zi, di) in z.iter().zip(d) {
                    let step = dir * di;
                    if step < -1e-14 {
                        smax = smax.min(zi / -step);
                    }
                }
                if smax.is_finite() {
                    let pt: Vec<f64> = z.iter().zip(d).map(|(zi, di)| zi + smax * dir * di).collect();
                    consider(vec_embed(&pt, &alpha, n));
                }
            }
        }
    }
    let (val, x) = best.expect("at least the vertices are candidates");
    Ok((val, x))
}

// ---------------------------------------------------------------------------
// Zero set
// ---------------------------------------------------------------------------

/// One representative zero per support set: supports alpha for which A[alpha]
/// is PSD and its kernel contains a vector strictly positive on alpha. The
/// list is complete at the level of supports.
pub fn zero_set(a: &SymMatrix, tol: f64) -> Result<Vec<ZeroVector>> {
    let n = a.n();
    if n > KAPLAN_MAX_N {
        return Err(SpnError::OrderTooLarge { n, max: KAPLAN_MAX_N });
    }
    if !test_copositive(a, tol)?.member.is_true() {
        return Err(SpnError::NotCopositive);
    }
    Ok(zero_set_unchecked(a, tol))
}

/// Zero-set scan without the copositivity precondition check. Used internally
/// on matrices already known (or numerically forced) to be copositive.
pub(crate) fn zero_set_unchecked(a: &SymMatrix, tol: f64) -> Vec<ZeroVector> {
    let n = a.n();
    let scale = scale_of(a);
    let thr = tol.max(1e-12) * scale;
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << n) {
        let alpha: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let sub = a.principal(&alpha);
        let eig = eig_sym(&sub);
        if eig.min_value() < -thr {
            continue; // not PSD
        }
        let kernel: Vec<&Vec<f64>> = eig
            .values
            .iter()
            .zip(&eig.vectors)
            .filter(|(l, _)| l.abs() <= thr)
            .map(|(_, v)| v)
            .collect();
        if kernel.is_empty() {
            continue;
        }
        if let Some(u_local) = strictly_positive_kernel_vector(&sub, &kernel) {
            let u = vec_embed(&u_local, &alpha, n);
            let u = vec_scale(&u, 1.0 / vec_norm(&u));
            out.push(ZeroVector { u, support: alpha });
        }
    }
    out
}

/// Searches span(kernel) for a strictly positive vector. Dimension one is a
/// sign flip; a Z-matrix block takes its Perron eigenvector; otherwise the
/// positive cone section of the kernel is explored by vertex enumeration.
fn strictly_positive_kernel_vector(sub: &SymMatrix, kernel: &[&Vec<f64>]) -> Option<Vec<f64>> {
    let m = sub.n();
    if kernel.len() == 1 {
        return positive_normalization(kernel[0]);
    }
    if is_z_matrix(sub) {
        // Perron eigenvector of the smallest eigenvalue; for an irreducible
        // block it is positive, otherwise fall through to the general search.
        if let Some(w) = positive_normalization(kernel[0]) {
            return Some(w);
        }
    }
    // Vertices of {c : (Kc)_i >= 0, sum_i (Kc)_i = 1} in kernel coordinates.
    let k = kernel.len();
    let row = |i: usize| -> Vec<f64> { kernel.iter().map(|b| b[i]).collect() };
    let sum_row: Vec<f64> = (0..k)
        .map(|c| (0..m).map(|i| kernel[c][i]).sum())
        .collect();
    let mut vertices: Vec<Vec<f64>> = Vec::new();
    let idx: Vec<usize> = (0..m).collect();
    for comb in combinations(&idx, k - 1) {
        let mut mat: Vec<Vec<f64>> = comb.iter().map(|&i| row(i)).collect();
        mat.push(sum_row.clone());
        let mut rhs = vec![0.0; k];
        rhs[k - 1] = 1.0;
        if let Some(c) = matcore::solve_dense(&mat, &rhs) {
            let w: Vec<f64> = (0..m)
                .map(|i| kernel.iter().zip(&c).map(|(b, &ci)| b[i] * ci).sum())
                .collect();
            if w.iter().all(|&x| x >= -1e-9) {
                vertices.push(w);
            }
        }
    }
    if vertices.is_empty() {
        return None;
    }
    // Relative-interior point: average of the vertices.
    let avg: Vec<f64> = (0..m)
        .map(|i| vertices.iter().map(|v| v[i]).sum::<f64>() / vertices.len() as f64)
        .collect();
    if avg.iter().all(|&x| x > POS_COMPONENT_TOL) {
        Some(avg)
    } else {
        None
    }
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Irreducibility
// ---------------------------------------------------------------------------

/// {i,j}-irreducibility via zeros: true iff some support-representative zero u
/// has u_i + u_j > tol and (Au)_i, (Au)_j both vanish.
pub fn is_ij_irreducible(
    a: &SymMatrix,
    i: usize,
    j: usize,
    tol: f64,
) -> Result<(bool, Option<ZeroVector>)> {
    let scale = scale_of(a);
    let thr = tol.max(1e-9);
    for z in zero_set(a, tol)? {
        let au = a.matvec(&z.u);
        if z.u[i] + z.u[j] > thr && au[i].abs() <= thr * scale && au[j].abs() <= thr * scale {
            return Ok((true, Some(z)));
        }
    }
    Ok((false, None))
}

/// The largest delta keeping A - delta E_ij copositive, found by bisection.
/// Returns the reduced matrix (still copositive) and delta.
pub fn reduce_to_irreducible(a: &SymMatrix, i: usize, j: usize) -> Result<(SymMatrix, f64)> {
    let tol = matcore::EPS_PSD;
    if !test_copositive(a, tol)?.member.is_true() {
        return Err(SpnError::NotCopositive);
    }
    let n = a.n();
    let perturb = |delta: f64| -> SymMatrix {
        let mut b = a.clone();
        if i == j {
            b.set(i, i, a.get(i, i) - delta);
        } else {
            b.set(i, j, a.get(i, j) - delta);
        }
        b
    };
    let _ = n;
    let mut hi = if i == j {
        a.get(i, i) + 1.0
    } else {
        a.get(i, j) + (a.get(i, i).max(0.0) * a.get(j, j).max(0.0)).sqrt() + 1.0
    };
    if !test_copositive(&perturb(hi), tol)?.member.is_false() {
        // Beyond the Diananda bound the matrix cannot be copositive, so this
        // branch only guards numerical edge cases.
        hi += 1.0;
    }
    let mut lo = 0.0f64;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if test_copositive(&perturb(mid), tol)?.member.is_true() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((perturb(lo), lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(rows: &[&[f64]]) -> SymMatrix {
        SymMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    const TOL: f64 = 1e-9;

    #[test]
    fn dispatcher_examples() {
        let f5 = crate::classifier::f5_witness_matrix();
        let v = test_copositive(&f5, TOL).unwrap();
        assert_eq!(v.member, TriState::True);
        assert_eq!(v.method, Method::HoffmanPereira);

        let v = test_copositive(&SymMatrix::identity(3).scale(-1.0), TOL).unwrap();
        assert_eq!(v.member, TriState::False);
        assert_eq!(v.method, Method::Diananda);

        let b = sym(&[&[1.0, -2.0], &[-2.0, 1.0]]);
        let v = test_copositive(&b, TOL).unwrap();
        assert_eq!(v.member, TriState::False);
        match v.certificate.unwrap() {
            Certificate::Vector(x) => {
                assert!(x.iter().all(|&c| c >= 0.0));
                assert!((b.quad_form(&x) + 1.0).abs() < 1e-9, "expected value -1 at (1,1)/sqrt 2");
            }
            _ => panic!("vector certificate expected"),
        }
    }

    #[test]
    fn kaplan_examples() {
        let cd6 = crate::classifier::cd6_witness_matrix();
        let v = test_copositive_kaplan(&cd6, TOL).unwrap();
        assert_eq!(v.member, TriState::True);
        // dispatcher reaches it through the exhaustive path
        let v = test_copositive(&cd6, TOL).unwrap();
        assert_eq!(v.method, Method::Kaplan);

        let j3 = SymMatrix::from_fn(3, |_, _| 1.0);
        assert_eq!(test_copositive_kaplan(&j3, TOL).unwrap().member, TriState::True);
    }

    #[test]
    fn oracle_examples() {
        let (val, x) = simplex_min_oracle(&SymMatrix::identity(2)).unwrap();
        assert!((val - 0.5).abs() < 1e-10);
        assert!((x[0] - 0.5).abs() < 1e-8 && (x[1] - 0.5).abs() < 1e-8);

        let b = sym(&[&[1.0, -2.0], &[-2.0, 1.0]]);
        let (val, _) = simplex_min_oracle(&b).unwrap();
        assert!((val + 0.5).abs() < 1e-10);

        let f5 = crate::classifier::f5_witness_matrix();
        let (val, _) = simplex_min_oracle(&f5).unwrap();
        assert!(val.abs() < 1e-9, "F5 witness has simplex minimum 0, got {val}");
    }

    #[test]
    fn kaplan_agrees_with_oracle_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(101);
        for _ in 0..300 {
            let a = SymMatrix::from_fn(5, |_, _| rng.gen_range(-1.0..1.0));
            let kap = test_copositive_kaplan(&a, 1e-8).unwrap().member.is_true();
            let (val, _) = simplex_min_oracle(&a).unwrap();
            assert_eq!(kap, val >= -1e-8, "disagreement: oracle min {val}");
        }
    }

    #[test]
    fn false_certificates_are_sound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(55);
        let mut seen_false = 0;
        for _ in 0..200 {
            let n = rng.gen_range(2..6);
            let a = SymMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            let v = test_copositive(&a, TOL).unwrap();
            if v.member.is_false() {
                seen_false += 1;
                match v.certificate.expect("false verdicts carry certificates") {
                    Certificate::Vector(x) => {
                        assert!(x.iter().all(|&c| c >= -1e-12), "certificate must be nonnegative");
                        let val = a.quad_form(&x);
                        assert!(val < -1e-10, "certificate value {val}");
                        assert!((val - v.margin).abs() <= 1e-9 * (1.0 + val.abs()));
                    }
                    _ => panic!("vector certificate expected"),
                }
            }
        }
        assert!(seen_false > 50, "suite should exercise the false path");
    }

    #[test]
    fn zero_set_examples() {
        assert!(zero_set(&SymMatrix::identity(3), TOL).unwrap().is_empty());

        let a = sym(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        let zs = zero_set(&a, TOL).unwrap();
        assert_eq!(zs.len(), 1);
        assert_eq!(zs[0].support, vec![0, 1]);
        let r = 1.0 / 2.0f64.sqrt();
        assert!((zs[0].u[0] - r).abs() < 1e-9 && (zs[0].u[1] - r).abs() < 1e-9);

        let f5 = crate::classifier::f5_witness_matrix();
        let zs = zero_set(&f5, TOL).unwrap();
        let supports: Vec<Vec<usize>> = zs.iter().map(|z| z.support.clone()).collect();
        for pair in [vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 4]] {
            assert!(supports.contains(&pair), "missing support {pair:?}");
        }
    }

    #[test]
    fn zero_set_laws() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        let mut checked = 0;
        for _ in 0..400 {
            let n = rng.gen_range(2..6);
            let a = SymMatrix::from_fn(n, |i, j| if i == j { 1.0 } else { rng.gen_range(-1.0..1.0) });
            if !test_copositive(&a, TOL).unwrap().member.is_true() {
                continue;
            }
            let scale = 1e-8 * a.max_abs().max(1.0);
            for z in zero_set(&a, TOL).unwrap() {
                checked += 1;
                assert!((a.quad_form(&z.u)).abs() <= scale * 10.0);
                assert!(crate::matcore::is_psd_bool(&a.principal(&z.support), 1e-8));
                let au = a.matvec(&z.u);
                assert!(au.iter().cloned().fold(f64::INFINITY, f64::min) >= -scale);
                for &i in &z.support {
                    assert!(au[i].abs() <= scale);
                }
                assert_eq!(support(&z.u, 1e-9), z.support);
            }
        }
        assert!(checked > 30, "zero-set law test found too few zeros ({checked})");
    }

    #[test]
    fn irreducibility_examples() {
        let a = sym(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        let (ok, w) = is_ij_irreducible(&a, 0, 1, TOL).unwrap();
        assert!(ok);
        assert!(w.is_some());

        let j2 = SymMatrix::from_fn(2, |_, _| 1.0);
        let (ok, _) = is_ij_irreducible(&j2, 0, 1, TOL).unwrap();
        assert!(!ok);

        // F5 witness, pair (1,3) by brute force over the zero set
        let f5 = crate::classifier::f5_witness_matrix();
        let brute = zero_set(&f5, TOL).unwrap().into_iter().any(|z| {
            let au = f5.matvec(&z.u);
            z.u[0] + z.u[2] > 1e-9 && au[0].abs() <= 1e-8 && au[2].abs() <= 1e-8
        });
        let (ok, _) = is_ij_irreducible(&f5, 0, 2, TOL).unwrap();
        assert_eq!(ok, brute);
    }

    #[test]
    fn reduction_examples() {
        let j2 = SymMatrix::from_fn(2, |_, _| 1.0);
        let (b, delta) = reduce_to_irreducible(&j2, 0, 1).unwrap();
        assert!((delta - 2.0).abs() < 1e-9);
        assert!((b.get(0, 1) + 1.0).abs() < 1e-9);

        let i2 = SymMatrix::identity(2);
        let (b, delta) = reduce_to_irreducible(&i2, 0, 0).unwrap();
        assert!((delta - 1.0).abs() < 1e-9);
        assert!(b.get(0, 0).abs() < 1e-9);
        assert!((b.get(1, 1) - 1.0).abs() < 1e-12);

        // F5 witness is already {1,2}-irreducible: the zero (1,1,0,0,0) has
        // (Au)_1 = (Au)_2 = 0.
        let f5 = crate::classifier::f5_witness_matrix();
        let (_, delta) = reduce_to_irreducible(&f5, 0, 1).unwrap();
        assert!(delta.abs() < 1e-8, "delta should be 0, got {delta}");
    }

    #[test]
    fn hoffman_pereira_consistency_small_sweep() {
        // All 3^10 unit-diagonal 5x5 sign matrices: the fast path must agree
        // with the exhaustive criterion.
        let n = 5usize;
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        let m = pairs.len();
        let vals = [0.0f64, 1.0, -1.0];
        let mut count = 0usize;
        let mut code = vec![0usize; m];
        loop {
            let mut a = SymMatrix::identity(n);
            for (k, &(i, j)) in pairs.iter().enumerate() {
                a.set(i, j, vals[code[k]]);
            }
            let hp = hoffman_pereira(&a, 1e-9).expect("fast path applies").member;
            let kap = test_copositive_kaplan(&a, 1e-9).unwrap().member;
            assert_eq!(hp, kap, "disagreement on {a:?}");
            count += 1;
            // odometer
            let mut k = 0;
            loop {
                if k == m {
                    assert_eq!(count, 59049);
                    return;
                }
                code[k] += 1;
                if code[k] < 3 {
                    break;
                }
                code[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn monotonicity_spot_check() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(303);
        let mut hits = 0;
        for _ in 0..200 {
            let n = rng.gen_range(2..6);
            let b = SymMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            if !test_copositive(&b, TOL).unwrap().member.is_true() {
                continue;
            }
            hits += 1;
            let a = SymMatrix::from_fn(n, |i, j| b.get(i, j) + rng.gen_range(0.0..0.5));
            assert!(test_copositive(&a, TOL).unwrap().member.is_true());
        }
        assert!(hits > 20);
    }

    #[test]
    fn order_caps() {
        let big = SymMatrix::identity(15);
        assert!(matches!(
            test_copositive(&big, TOL),
            Err(SpnError::OrderTooLarge { .. })
        ));
        let a = SymMatrix::identity(11);
        assert!(matches!(simplex_min_oracle(&a), Err(SpnError::OrderTooLarge { .. })));
    }

    #[test]
    fn zero_set_requires_copositive() {
        let b = sym(&[&[1.0, -2.0], &[-2.0, 1.0]]);
        assert!(matches!(zero_set(&b, TOL), Err(SpnError::NotCopositive)));
    }

    #[test]
    fn rank1_step_fires() {
        // A = 2(I - vv^T) with ||v+|| > 1: false through the rank-one path.
        let v = [0.9, 0.9, -0.3];
        let a = SymMatrix::identity(3).sub(&SymMatrix::outer(&v)).scale(2.0);
        let verdict = test_copositive(&a, TOL).unwrap();
        assert_eq!(verdict.method, Method::Rank1Perturbation);
        assert_eq!(verdict.member, TriState::False);
        // and with small norms: true
        let v = [0.5, -0.5, 0.3];
        let a = SymMatrix::identity(3).sub(&SymMatrix::outer(&v)).scale(2.0);
        let verdict = test_copositive(&a, TOL).unwrap();
        assert_eq!(verdict.method, Method::Rank1Perturbation);
        assert_eq!(verdict.member, TriState::True);
    }

    #[test]
    fn acyclic_step_fires() {
        // tree graph: path 0-1-2 with a negative edge needing the N(A) route
        let a = sym(&[&[1.0, -0.9, 0.0], &[-0.9, 1.0, 0.8], &[0.0, 0.8, 1.0]]);
        let v = test_copositive(&a, TOL).unwrap();
        assert_eq!(v.method, Method::AcyclicN);
        assert_eq!(v.member, TriState::True);

        let b = sym(&[&[1.0, -1.5, 0.0], &[-1.5, 1.0, 0.8], &[0.0, 0.8, 1.0]]);
        let v = test_copositive(&b, TOL).unwrap();
        assert_eq!(v.member, TriState::False);
    }

    #[test]
    fn is_psd_bool_guard() {
        assert!(is_psd_bool(&SymMatrix::identity(4), 1e-9));
    }
}
