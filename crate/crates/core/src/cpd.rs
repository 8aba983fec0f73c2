//! Positivity verdicts: conditional positive definiteness of germ kernels
//! over the scalar-sum-zero subspace, and plain positive definiteness of
//! dissipator kernels.

use crate::germ::{dissipator_of, germ_of, GeneratorModel};
use crate::linalg::{
    cr, hermiticity_residual, hermitize, max_abs, min_eig_hermitian, orthonormalize, CMatrix,
    CVector,
};
use crate::semigroup::Element;
use crate::{Error, Result};

/// Default acceptance tolerance for eigenvalue verdicts.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Outcome of a positivity test.
///
/// The verdict holds iff min_eigenvalue ≥ −tolerance × max(scale, 1);
/// the witness is a coefficient vector in the tested space attaining the
/// minimal eigenvalue as a Rayleigh quotient.
#[derive(Debug, Clone)]
pub struct CpdReport {
    pub verdict: bool,
    pub min_eigenvalue: f64,
    /// Largest absolute entry of the tested matrix.
    pub scale: f64,
    pub tolerance: f64,
    /// ‖M − M†‖ of the assembled matrix, reported separately; verdicts
    /// are taken on the Hermitian part.
    pub hermiticity_residual: f64,
    pub witness: CVector,
    pub sample: Vec<Element>,
}

/// Unconstrained positive-semidefiniteness report for a Hermitian-part
/// eigenvalue test.
pub(crate) fn psd_report(m: &CMatrix, tol: f64, sample: Vec<Element>) -> CpdReport {
    let scale = max_abs(m);
    let herm_res = hermiticity_residual(m);
    let (min_eig, witness) = min_eig_hermitian(m);
    CpdReport {
        verdict: min_eig >= -tol * scale.max(1.0),
        min_eigenvalue: min_eig,
        scale,
        tolerance: tol,
        hermiticity_residual: herm_res,
        witness,
        sample,
    }
}

/// Block matrix [λ(y_i★y_k)] over the sample, blocks of size (1+n).
pub fn germ_block_matrix(model: &GeneratorModel, elements: &[Element]) -> Result<CMatrix> {
    if elements.is_empty() {
        return Err(Error::EmptySample);
    }
    let sg = &model.semigroup;
    let block = 1 + model.n_modes;
    let count = elements.len();
    let mut out = CMatrix::zeros(count * block, count * block);
    for (i, x) in elements.iter().enumerate() {
        for (k, z) in elements.iter().enumerate() {
            let germ = germ_of(model, &sg.star_compose(x, z)?)?;
            for a in 0..block {
                for b in 0..block {
                    out[(i * block + a, k * block + b)] = germ.matrix()[(a, b)];
                }
            }
        }
    }
    Ok(out)
}

/// Block matrix [Δ(y_i, y_k)] over the sample.
pub fn dissipator_block_matrix(model: &GeneratorModel, elements: &[Element]) -> Result<CMatrix> {
    if elements.is_empty() {
        return Err(Error::EmptySample);
    }
    let block = 1 + model.n_modes;
    let count = elements.len();
    let mut out = CMatrix::zeros(count * block, count * block);
    for (i, x) in elements.iter().enumerate() {
        for (k, z) in elements.iter().enumerate() {
            let delta = dissipator_of(model, x, z)?;
            for a in 0..block {
                for b in 0..block {
                    out[(i * block + a, k * block + b)] = delta[(a, b)];
                }
            }
        }
    }
    Ok(out)
}

/// Orthonormal basis of the subspace where the scalar components sum to
/// zero and the mode components are unconstrained; returned as the
/// columns of an N(1+n) × (N(1+n)−1) matrix.
///
/// The scalar part is spanned by consecutive differences (δ_j − δ_{j+1})/√2
/// run through Gram-Schmidt; the mode part keeps the standard basis.
pub fn constraint_basis(n_elements: usize, n_modes: usize) -> CMatrix {
    let block = 1 + n_modes;
    let dim = n_elements * block;
    let scalar_slot = |j: usize| j * block;
    let mut raw: Vec<CVector> = Vec::new();
    for j in 0..n_elements.saturating_sub(1) {
        let mut v = CVector::zeros(dim);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        v[scalar_slot(j)] = cr(s);
        v[scalar_slot(j + 1)] = cr(-s);
        raw.push(v);
    }
    let mut cols = orthonormalize(&raw, 1e-12);
    for j in 0..n_elements {
        for mode in 0..n_modes {
            let mut v = CVector::zeros(dim);
            v[j * block + 1 + mode] = cr(1.0);
            cols.push(v);
        }
    }
    let mut basis = CMatrix::zeros(dim, cols.len());
    for (c, v) in cols.iter().enumerate() {
        for r in 0..dim {
            basis[(r, c)] = v[r];
        }
    }
    basis
}

/// Compression of the Hermitized germ block matrix onto the constrained
/// subspace; exposed for worked-example inspection.
pub fn compressed_germ_matrix(model: &GeneratorModel, elements: &[Element]) -> Result<CMatrix> {
    let full = germ_block_matrix(model, elements)?;
    let basis = constraint_basis(elements.len(), model.n_modes);
    Ok(basis.adjoint() * hermitize(&full) * &basis)
}

/// Conditional positivity test of the germ kernel: the block matrix
/// [λ(y_i★y_k)] is compressed onto the scalar-sum-zero subspace and the
/// verdict is taken from the compressed minimal eigenvalue.  The witness
/// is lifted back to the full coefficient space.
pub fn cpd_check(model: &GeneratorModel, elements: &[Element], tol: f64) -> Result<CpdReport> {
    if elements.is_empty() {
        return Err(Error::EmptySample);
    }
    if tol <= 0.0 {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let full = germ_block_matrix(model, elements)?;
    let scale = max_abs(&full);
    let herm_res = hermiticity_residual(&full);
    let basis = constraint_basis(elements.len(), model.n_modes);
    if basis.ncols() == 0 {
        return Ok(CpdReport {
            verdict: true,
            min_eigenvalue: 0.0,
            scale,
            tolerance: tol,
            hermiticity_residual: herm_res,
            witness: CVector::zeros(full.nrows()),
            sample: elements.to_vec(),
        });
    }
    let compressed = basis.adjoint() * hermitize(&full) * &basis;
    let (min_eig, small_witness) = min_eig_hermitian(&compressed);
    let witness = &basis * small_witness;
    Ok(CpdReport {
        verdict: min_eig >= -tol * scale.max(1.0),
        min_eigenvalue: min_eig,
        scale,
        tolerance: tol,
        hermiticity_residual: herm_res,
        witness,
        sample: elements.to_vec(),
    })
}

/// Unconstrained positivity test of the dissipator kernel over a sample.
pub fn dissipator_pd_check(
    model: &GeneratorModel,
    elements: &[Element],
    tol: f64,
) -> Result<CpdReport> {
    if elements.is_empty() {
        return Err(Error::EmptySample);
    }
    if tol <= 0.0 {
        return Err(Error::Invalid(format!("tolerance must be positive, got {tol}")));
    }
    let full = dissipator_block_matrix(model, elements)?;
    Ok(psd_report(&full, tol, elements.to_vec()))
}

/// Rayleigh quotient of a report's witness against a matrix; reports are
/// built so this reproduces the minimal eigenvalue.
pub fn witness_rayleigh(m: &CMatrix, witness: &CVector) -> f64 {
    let norm_sq = witness.norm_squared();
    if norm_sq == 0.0 {
        return 0.0;
    }
    (witness.dotc(&(hermitize(m) * witness)) / cr(norm_sq)).re
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ito::ItoQuadruple;
    use crate::semigroup::cyclic_group;

    fn z2_model(at_s: f64) -> GeneratorModel {
        GeneratorModel::table(
            cyclic_group(2),
            0,
            vec![
                (Element::Index(0), ItoQuadruple::from_scalar(cr(0.0))),
                (Element::Index(1), ItoQuadruple::from_scalar(cr(at_s))),
            ],
        )
        .unwrap()
    }

    #[test]
    fn z2_negative_scalar_is_cpd() {
        let model = z2_model(-1.0);
        let sample = model.semigroup.all_elements().unwrap();
        let compressed = compressed_germ_matrix(&model, &sample).unwrap();
        assert_eq!(compressed.nrows(), 1);
        assert!((compressed[(0, 0)] - cr(1.0)).norm() < 1e-12);
        let report = cpd_check(&model, &sample, DEFAULT_TOL).unwrap();
        assert!(report.verdict);
        assert!((report.min_eigenvalue - 1.0).abs() < 1e-12);
    }

    #[test]
    fn z2_positive_scalar_fails_with_witness() {
        let model = z2_model(1.0);
        let sample = model.semigroup.all_elements().unwrap();
        let report = cpd_check(&model, &sample, DEFAULT_TOL).unwrap();
        assert!(!report.verdict);
        assert!((report.min_eigenvalue + 1.0).abs() < 1e-12);
        // witness proportional to (1, −1)/√2
        let w = &report.witness;
        assert!((w[0] + w[1]).norm() < 1e-10);
        assert!((w[0].norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10);
        let full = germ_block_matrix(&model, &sample).unwrap();
        let rq = witness_rayleigh(&full, w);
        assert!((rq - report.min_eigenvalue).abs() < 1e-8);
    }

    #[test]
    fn zero_map_is_cpd_with_nonnegative_min_eig() {
        let sg = cyclic_group(4);
        let entries = (0..4)
            .map(|i| (Element::Index(i), ItoQuadruple::zero(2)))
            .collect();
        let model = GeneratorModel::table(sg.clone(), 2, entries).unwrap();
        let report = cpd_check(&model, &sg.all_elements().unwrap(), DEFAULT_TOL).unwrap();
        assert!(report.verdict);
        assert!(report.min_eigenvalue >= -1e-14);
    }

    #[test]
    fn dissipator_check_on_z2() {
        let model = z2_model(-1.0);
        let sample = model.semigroup.all_elements().unwrap();
        let matrix = dissipator_block_matrix(&model, &sample).unwrap();
        let expect = CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(0.0), cr(0.0), cr(2.0)]);
        assert!(crate::linalg::max_abs_diff(&matrix, &expect) < 1e-14);
        assert!(dissipator_pd_check(&model, &sample, DEFAULT_TOL).unwrap().verdict);

        let bad = z2_model(1.0);
        let report = dissipator_pd_check(&bad, &sample, DEFAULT_TOL).unwrap();
        assert!(!report.verdict);
        assert!((report.min_eigenvalue + 2.0).abs() < 1e-12);
    }

    #[test]
    fn dissipator_of_zero_map_is_psd() {
        let sg = cyclic_group(3);
        let entries = (0..3)
            .map(|i| (Element::Index(i), ItoQuadruple::zero(1)))
            .collect();
        let model = GeneratorModel::table(sg.clone(), 1, entries).unwrap();
        let report =
            dissipator_pd_check(&model, &sg.all_elements().unwrap(), DEFAULT_TOL).unwrap();
        assert!(report.verdict);
        assert!(report.min_eigenvalue >= -1e-14);
    }

    #[test]
    fn constraint_basis_is_orthonormal_and_constrained() {
        for (n_el, n_modes) in [(2usize, 0usize), (3, 1), (5, 2), (1, 2)] {
            let basis = constraint_basis(n_el, n_modes);
            let expected_cols = n_el * (1 + n_modes) - 1;
            if n_el == 1 && n_modes == 2 {
                assert_eq!(basis.ncols(), 2);
            } else {
                assert_eq!(basis.ncols(), expected_cols);
            }
            let gram = basis.adjoint() * &basis;
            assert!(
                crate::linalg::max_abs_diff(&gram, &crate::linalg::ceye(basis.ncols())) < 1e-12
            );
            // every column's scalar components sum to zero
            for c in 0..basis.ncols() {
                let mut sum = cr(0.0);
                for j in 0..n_el {
                    sum += basis[(j * (1 + n_modes), c)];
                }
                assert!(sum.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn empty_sample_is_an_error() {
        let model = z2_model(-1.0);
        assert!(matches!(
            cpd_check(&model, &[], DEFAULT_TOL),
            Err(Error::EmptySample)
        ));
        assert!(cpd_check(&model, &model.semigroup.all_elements().unwrap(), 0.0).is_err());
    }

    #[test]
    fn permutation_invariance_of_verdicts() {
        let model = z2_model(-1.0);
        let fwd = vec![Element::Index(0), Element::Index(1)];
        let rev = vec![Element::Index(1), Element::Index(0)];
        let a = cpd_check(&model, &fwd, DEFAULT_TOL).unwrap();
        let b = cpd_check(&model, &rev, DEFAULT_TOL).unwrap();
        assert_eq!(a.verdict, b.verdict);
        assert!((a.min_eigenvalue - b.min_eigenvalue).abs() < 1e-10);
        let da = dissipator_pd_check(&model, &fwd, DEFAULT_TOL).unwrap();
        let db = dissipator_pd_check(&model, &rev, DEFAULT_TOL).unwrap();
        assert_eq!(da.verdict, db.verdict);
        assert!((da.min_eigenvalue - db.min_eigenvalue).abs() < 1e-10);
    }
}
