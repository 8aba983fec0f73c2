//! Dense complex linear-algebra helpers shared across the crate.

use nalgebra::{DMatrix, DVector, RowDVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type CRowVector = RowDVector<C64>;

pub const C_ZERO: C64 = Complex64::new(0.0, 0.0);
pub const C_ONE: C64 = Complex64::new(1.0, 0.0);

/// Tolerance used when comparing elements for identity.
pub const EQ_TOL: f64 = 1e-12;

pub fn cx(re: f64, im: f64) -> C64 {
    Complex64::new(re, im)
}

pub fn cr(re: f64) -> C64 {
    Complex64::new(re, 0.0)
}

pub fn ceye(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Largest absolute entry; zero for empty matrices.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a - b))
}

/// Hermitian part (m + m†)/2.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * cr(0.5)
}

/// Largest absolute entry of m − m†.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Smallest eigenvalue of the Hermitian part, together with a unit
/// eigenvector attaining it.
pub fn min_eig_hermitian(m: &CMatrix) -> (f64, CVector) {
    let n = m.nrows();
    if n == 0 {
        return (0.0, CVector::zeros(0));
    }
    let se = hermitize(m).symmetric_eigen();
    let mut idx = 0;
    for (i, ev) in se.eigenvalues.iter().enumerate() {
        if *ev < se.eigenvalues[idx] {
            idx = i;
        }
    }
    (se.eigenvalues[idx], se.eigenvectors.column(idx).into_owned())
}

/// Eigenvalues of the Hermitian part, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let se = hermitize(m).symmetric_eigen();
    let mut evs: Vec<f64> = se.eigenvalues.iter().cloned().collect();
    evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    evs
}

/// Operator (spectral) norm via the Gram matrix.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    let top = hermitize(&gram)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(0.0, f64::max);
    top.max(0.0).sqrt()
}

/// Moore-Penrose pseudo-inverse with a cutoff relative to the top
/// singular value.
pub fn pseudo_inverse(a: &CMatrix, rel_eps: f64) -> CMatrix {
    if a.nrows() == 0 || a.ncols() == 0 {
        return CMatrix::zeros(a.ncols(), a.nrows());
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = if smax > 0.0 { rel_eps * smax } else { rel_eps };
    svd.pseudo_inverse(eps).expect("svd with u and v_t")
}

/// Minimum-norm least-squares solution of A·X = B.
pub fn lstsq(a: &CMatrix, b: &CMatrix, rel_eps: f64) -> CMatrix {
    if a.ncols() == 0 {
        return CMatrix::zeros(0, b.ncols());
    }
    if a.nrows() == 0 {
        return CMatrix::zeros(a.ncols(), b.ncols());
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = if smax > 0.0 { rel_eps * smax } else { rel_eps };
    svd.solve(b, eps).expect("svd with u and v_t")
}

/// Modified Gram-Schmidt (two passes); vectors below `drop_tol` after
/// projection are discarded.
pub fn orthonormalize(vectors: &[CVector], drop_tol: f64) -> Vec<CVector> {
    let mut basis: Vec<CVector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let coeff = b.dotc(&w);
                w -= b * coeff;
            }
        }
        let n = w.norm();
        if n > drop_tol {
            basis.push(w / cr(n));
        }
    }
    basis
}

/// Standard complex Gaussian with unit total variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn random_cmatrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn random_cvector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    CVector::from_fn(dim, |_, _| complex_gaussian(rng))
}

/// Random unitary from the QR factor of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    if dim == 0 {
        return CMatrix::zeros(0, 0);
    }
    random_cmatrix(rng, dim, dim).qr().q()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn min_eig_of_known_hermitian() {
        let i = cx(0.0, 1.0);
        let m = CMatrix::from_row_slice(2, 2, &[cr(2.0), i, -i, cr(2.0)]);
        let (ev, v) = min_eig_hermitian(&m);
        assert!((ev - 1.0).abs() < 1e-12);
        let q = v.dotc(&(&m * &v));
        assert!((q.re - 1.0).abs() < 1e-10 && q.im.abs() < 1e-10);
    }

    #[test]
    fn operator_norm_matches_singular_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_cmatrix(&mut rng, 4, 3);
        let svd = m.clone().svd(false, false);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        assert!((operator_norm(&m) - smax).abs() < 1e-10);
    }

    #[test]
    fn orthonormalize_spans_and_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vs: Vec<CVector> = (0..5).map(|_| random_cvector(&mut rng, 3)).collect();
        let basis = orthonormalize(&vs, 1e-10);
        assert_eq!(basis.len(), 3);
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let dot = a.dotc(b);
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - cr(expect)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let u = random_unitary(&mut rng, 4);
        assert!(max_abs_diff(&(u.adjoint() * &u), &ceye(4)) < 1e-12);
    }

    #[test]
    fn pseudo_inverse_projects() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = random_cmatrix(&mut rng, 2, 4);
        let p = &a * pseudo_inverse(&a, 1e-12);
        assert!(max_abs_diff(&(&p * &p), &p) < 1e-10);
    }
}
