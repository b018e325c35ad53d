//! Dense complex linear algebra used throughout the crate.
//!
//! Everything is `DMatrix<Complex<f64>>`; the spaces handled here are at most a
//! few hundred dimensions so dense eigendecompositions are instant. Spectral
//! decompositions are delegated to `faer`, whose Hermitian solver stays
//! accurate on the sparse, badly scaled partial transposes met here.

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

pub use nalgebra::Complex;

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn zeros(n: usize) -> CMat {
    CMat::zeros(n, n)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

/// `|i><j|` in dimension `n`.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> CMat {
    let mut m = zeros(n);
    m[(i, j)] = real(1.0);
    m
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().fold(C64::zero(), |acc, z| acc + z)
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `(m + m†)/2`, discarding anti-Hermitian float noise.
pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn to_faer(m: &CMat) -> faer::Mat<faer::c64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |r, c| {
        let z = m[(r, c)];
        faer::c64::new(z.re, z.im)
    })
}

/// Largest singular value.
pub fn op_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let sv = to_faer(m)
        .singular_values()
        .expect("singular value iteration converges");
    sv.into_iter().fold(0.0, f64::max)
}

/// `‖X Y†‖` for tall, thin `X`, `Y`, via thin QR factors so the work scales
/// with the number of columns rather than the ambient dimension.
pub fn low_rank_op_norm(x: &CMat, y: &CMat) -> f64 {
    if x.ncols() == 0 {
        return 0.0;
    }
    if x.ncols() >= x.nrows() {
        return op_norm(&(x * y.adjoint()));
    }
    let (rx, ry) = (x.clone().qr().r(), y.clone().qr().r());
    op_norm(&(rx * ry.adjoint()))
}

pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_abs_diff(m, &m.adjoint())
}

/// Index sets of the connected components of the nonzero pattern of `m`.
///
/// A Hermitian matrix is block diagonal up to a permutation along these sets,
/// so its spectrum is the union of the blocks' spectra. Partial transposes of
/// embedded states split into many tiny blocks, and solving them separately
/// avoids the convergence failures dense solvers show on such inputs.
fn components(m: &CMat) -> Vec<Vec<usize>> {
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    for c in 0..n {
        for r in 0..n {
            if !m[(r, c)].is_zero() {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                parent[a] = b;
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[root]].push(i);
    }
    groups
}

fn block(m: &CMat, idx: &[usize]) -> faer::Mat<faer::c64> {
    faer::Mat::from_fn(idx.len(), idx.len(), |r, c| {
        let z = m[(idx[r], idx[c])];
        faer::c64::new(z.re, z.im)
    })
}

/// Eigenvalues of a Hermitian block; falls back to the real symmetric form
/// `[[A, -B], [B, A]]` of `A + iB`, whose spectrum is each eigenvalue twice.
fn block_eigenvalues(m: &CMat, idx: &[usize]) -> Vec<f64> {
    if let Ok(v) = block(m, idx).self_adjoint_eigenvalues(faer::Side::Lower) {
        return v;
    }
    let k = idx.len();
    let real_form = faer::Mat::from_fn(2 * k, 2 * k, |r, c| {
        let z = m[(idx[r % k], idx[c % k])];
        match (r < k, c < k) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let mut v = real_form
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("real symmetric eigensolver converges");
    v.sort_by(f64::total_cmp);
    v.into_iter().step_by(2).collect()
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a Hermitian matrix.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let h = hermitian_part(m);
    let n = h.nrows();
    let mut pairs: Vec<(f64, CVec)> = Vec::with_capacity(n);
    for idx in components(&h) {
        let eig = block(&h, &idx)
            .self_adjoint_eigen(faer::Side::Lower)
            .expect("Hermitian eigensolver converges");
        let (s, u) = (eig.S().column_vector(), eig.U());
        for k in 0..idx.len() {
            let mut v = CVec::zeros(n);
            for (r, &i) in idx.iter().enumerate() {
                let z = u[(r, k)];
                v[i] = c64(z.re, z.im);
            }
            pairs.push((s[k].re, v));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let values = pairs.iter().map(|p| p.0).collect();
    let vectors = CMat::from_fn(n, n, |r, c| pairs[c].1[r]);
    (values, vectors)
}

pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    let h = hermitian_part(m);
    let mut v: Vec<f64> = components(&h).iter().flat_map(|idx| block_eigenvalues(&h, idx)).collect();
    v.sort_by(f64::total_cmp);
    v
}

pub fn min_eigenvalue(m: &CMat) -> f64 {
    eigvalsh(m).first().copied().unwrap_or(0.0)
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMat) -> f64 {
    eigvalsh(m).iter().map(|x| x.abs()).sum()
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (values, vectors) = eigh(m);
    let n = values.len();
    let mut scaled = vectors.clone();
    for (c, &v) in values.iter().enumerate() {
        let fv = f(v);
        for r in 0..n {
            scaled[(r, c)] *= fv;
        }
    }
    scaled * vectors.adjoint()
}

/// `U X U†`
pub fn conjugate(u: &CMat, x: &CMat) -> CMat {
    u * x * u.adjoint()
}

pub fn outer(v: &CVec) -> CMat {
    v * v.adjoint()
}

pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    u.is_square() && max_abs_diff(&(u.adjoint() * u), &identity(u.nrows())) <= tol
}

/// Row-major `[re, im]` pairs, the exchange format for matrices.
pub fn to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Option<CMat> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return None;
    }
    Some(CMat::from_fn(nrows, ncols, |r, c| {
        let [re, im] = rows[r][c];
        c64(re, im)
    }))
}

/// Serde adapter storing a matrix as row-major `[re, im]` pairs.
pub mod serde_rows {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&to_rows(m), s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_rows(&rows).ok_or_else(|| D::Error::custom("ragged matrix rows"))
    }
}

/// Serde adapter for a single complex number as `[re, im]`.
pub mod serde_c64 {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&[z.re, z.im], s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(c64(re, im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_reconstructs() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[real(2.0), c64(0.0, 1.0), c64(0.0, -1.0), real(2.0)],
        );
        let (vals, vecs) = eigh(&m);
        assert!((vals[0] - 1.0).abs() < 1e-12 && (vals[1] - 3.0).abs() < 1e-12);
        let diag = CMat::from_diagonal(&CVec::from_iterator(2, vals.iter().map(|&v| real(v))));
        let back = &vecs * diag * vecs.adjoint();
        assert!(max_abs_diff(&back, &m) < 1e-12);
    }

    #[test]
    fn op_norm_of_rank_one() {
        let v = CVec::from_vec(vec![real(3.0), c64(0.0, 4.0)]);
        assert!((op_norm(&outer(&v)) - 25.0).abs() < 1e-10);
    }

    #[test]
    fn low_rank_norm_matches_dense() {
        let x = CMat::from_fn(7, 2, |r, c| c64(r as f64 - c as f64, 0.5 * c as f64));
        let y = CMat::from_fn(7, 2, |r, c| c64(1.0 / (1.0 + r as f64), c as f64 - 0.25));
        let dense = op_norm(&(&x * y.adjoint()));
        assert!((low_rank_op_norm(&x, &y) - dense).abs() < 1e-12 * dense);
    }

    #[test]
    fn rows_round_trip() {
        let m = CMat::from_fn(2, 3, |r, c| c64(r as f64, c as f64 - 0.5));
        assert_eq!(from_rows(&to_rows(&m)).unwrap(), m);
        assert!(from_rows(&[vec![[0.0, 0.0]], vec![]]).is_none());
    }
}
