//! Linear birth generators over operator balls: tensor-power birth maps,
//! their germ λ = φ − κ, the closed-form coherent matrix element of the
//! exponent they generate, and the associated normalization and norm
//! bounds.

use crate::germ::GermMatrix;
use crate::linalg::{
    ceye, cr, operator_norm, random_cvector, CMatrix, CVector, C64,
};
use crate::semigroup::{matrix_ball, random_contraction, Element};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Tensor data of a birth generator.
///
/// The scalar family ς^k (k = 1..k_max) and per-mode families ς_n^k
/// (k = 0..k_max) live in the k-fold tensor powers of the base space
/// ℂ^base_dim; κ and κ_• shift the birth map into a germ.
#[derive(Debug, Clone, PartialEq)]
pub struct BirthSpec {
    pub base_dim: usize,
    pub k_max: usize,
    pub n_modes: usize,
    /// ς^k for k = 1..=k_max; entry k-1 lives in dimension base_dim^k.
    pub scalar_tensors: Vec<CVector>,
    /// mode_tensors[n][k] = ς_n^k for k = 0..=k_max.
    pub mode_tensors: Vec<Vec<CVector>>,
    pub kappa: f64,
    /// Row κ_• with one entry per mode.
    pub kappa_modes: Vec<C64>,
}

impl BirthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k_max == 0 {
            return Err(Error::Invalid("k_max must be at least 1".into()));
        }
        if self.scalar_tensors.len() != self.k_max {
            return Err(Error::Invalid(format!(
                "expected {} scalar tensors, got {}",
                self.k_max,
                self.scalar_tensors.len()
            )));
        }
        for (k, t) in self.scalar_tensors.iter().enumerate() {
            let want = self.base_dim.pow(k as u32 + 1);
            if t.len() != want {
                return Err(Error::Invalid(format!(
                    "scalar tensor of order {} must have length {}, got {}",
                    k + 1,
                    want,
                    t.len()
                )));
            }
        }
        if self.mode_tensors.len() != self.n_modes || self.kappa_modes.len() != self.n_modes {
            return Err(Error::ModeMismatch(self.mode_tensors.len(), self.n_modes));
        }
        for family in &self.mode_tensors {
            if family.len() != self.k_max + 1 {
                return Err(Error::Invalid(format!(
                    "each mode family must have {} tensors, got {}",
                    self.k_max + 1,
                    family.len()
                )));
            }
            for (k, t) in family.iter().enumerate() {
                let want = self.base_dim.pow(k as u32);
                if t.len() != want {
                    return Err(Error::Invalid(format!(
                        "mode tensor of order {} must have length {}, got {}",
                        k, want, t.len()
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sum of squared norms of the scalar tensor family.
    pub fn scalar_norm_sq(&self) -> f64 {
        self.scalar_tensors.iter().map(|t| t.norm_squared()).sum()
    }

    /// Unit-rate scalar generator over the one-dimensional ball:
    /// one first-order tensor ς¹ = 1 and κ = 1, so λ(y) = y − 1.
    pub fn scalar_unit() -> Self {
        BirthSpec {
            base_dim: 1,
            k_max: 1,
            n_modes: 0,
            scalar_tensors: vec![CVector::from_column_slice(&[cr(1.0)])],
            mode_tensors: vec![],
            kappa: 1.0,
            kappa_modes: vec![],
        }
    }
}

fn check_contraction(spec: &BirthSpec, y: &CMatrix) -> Result<()> {
    if y.nrows() != spec.base_dim || y.ncols() != spec.base_dim {
        return Err(Error::ElementMismatch(format!(
            "expected a {0}x{0} contraction, got {1}x{2}",
            spec.base_dim,
            y.nrows(),
            y.ncols()
        )));
    }
    let norm = operator_norm(y);
    if norm > 1.0 + crate::semigroup::BALL_NORM_SLACK {
        return Err(Error::NormExceeded(norm));
    }
    Ok(())
}

/// Kronecker powers y^{⊗k} for k = 0..=k_max; order zero is the 1×1
/// identity.
pub fn tensor_powers(y: &CMatrix, k_max: usize) -> Vec<CMatrix> {
    let mut powers = Vec::with_capacity(k_max + 1);
    powers.push(ceye(1));
    for k in 1..=k_max {
        let next = powers[k - 1].kronecker(y);
        powers.push(next);
    }
    powers
}

fn sandwich(a: &CVector, p: &CMatrix, b: &CVector) -> C64 {
    a.dotc(&(p * b))
}

/// The (1+n)×(1+n) birth-map value at a contraction: scalar and
/// off-diagonal blocks sum tensor orders from one, the mode block from
/// zero.
pub fn birth_phi(spec: &BirthSpec, y: &CMatrix) -> Result<CMatrix> {
    spec.validate()?;
    check_contraction(spec, y)?;
    let powers = tensor_powers(y, spec.k_max);
    let n = spec.n_modes;
    let mut phi = CMatrix::zeros(1 + n, 1 + n);
    for k in 1..=spec.k_max {
        let s = &spec.scalar_tensors[k - 1];
        phi[(0, 0)] += sandwich(s, &powers[k], s);
        for a in 0..n {
            let sa = &spec.mode_tensors[a][k];
            phi[(0, 1 + a)] += sandwich(s, &powers[k], sa);
            phi[(1 + a, 0)] += sandwich(sa, &powers[k], s);
        }
    }
    for k in 0..=spec.k_max {
        for a in 0..n {
            for b in 0..n {
                phi[(1 + a, 1 + b)] +=
                    sandwich(&spec.mode_tensors[a][k], &powers[k], &spec.mode_tensors[b][k]);
            }
        }
    }
    Ok(phi)
}

/// The κ block matrix [[κ, κ_•],[κ_•†, 0]].
pub fn kappa_matrix(spec: &BirthSpec) -> CMatrix {
    let n = spec.n_modes;
    let mut m = CMatrix::zeros(1 + n, 1 + n);
    m[(0, 0)] = cr(spec.kappa);
    for a in 0..n {
        m[(0, 1 + a)] = spec.kappa_modes[a];
        m[(1 + a, 0)] = spec.kappa_modes[a].conj();
    }
    m
}

/// Germ λ(y) = φ(y) − κ of a birth generator.
pub fn germ_from_birth(spec: &BirthSpec, y: &CMatrix) -> Result<GermMatrix> {
    let phi = birth_phi(spec, y)?;
    GermMatrix::from_matrix(phi - kappa_matrix(spec))
}

/// Log of the normalized coherent matrix element of the explicit
/// exponent solution, for constant test functions.
///
/// Each factor of the solution contributes a linear-in-t term: the right
/// exponential gives φ_•(y)h, the differential second quantization gives
/// f†φ_•^•(y)h − f†h plus the tail cancellation f†h, the left
/// exponential f†φ^•(y), the vector cocycle pair −(κ_•h + f†κ_•† + κ),
/// and the scalar factor φ(y).
pub fn eval_solution_37(
    spec: &BirthSpec,
    f: &CVector,
    h: &CVector,
    y: &CMatrix,
    t: f64,
) -> Result<C64> {
    if f.len() != spec.n_modes || h.len() != spec.n_modes {
        return Err(Error::ModeMismatch(f.len(), spec.n_modes));
    }
    if t <= 0.0 {
        return Err(Error::Invalid(format!("t must be positive, got {t}")));
    }
    let phi = birth_phi(spec, y)?;
    let n = spec.n_modes;
    let mut right = C64::new(0.0, 0.0);
    let mut left = C64::new(0.0, 0.0);
    let mut middle = C64::new(0.0, 0.0);
    for a in 0..n {
        right += phi[(0, 1 + a)] * h[a];
        left += f[a].conj() * phi[(1 + a, 0)];
        for b in 0..n {
            middle += f[a].conj() * phi[(1 + a, 1 + b)] * h[b];
        }
    }
    let fh = f.dotc(h);
    middle -= fh;
    let mut cocycle = cr(spec.kappa);
    for a in 0..n {
        cocycle += spec.kappa_modes[a] * h[a] + f[a].conj() * spec.kappa_modes[a].conj();
    }
    Ok(cr(t) * (phi[(0, 0)] + right + middle + fh + left - cocycle))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizationMode {
    Martingale,
    Submartingale,
    Unnormalized,
}

#[derive(Debug, Clone)]
pub struct MartingaleCondition {
    /// Σ_k ‖ς^k‖².
    pub lhs: f64,
    /// κ.
    pub rhs: f64,
    pub mode: NormalizationMode,
}

/// Compares Σ_k ‖ς^k‖² with κ: equality (to 1e−12) is the martingale
/// normalization, lhs ≤ κ the submartingale one.
pub fn martingale_condition_check(spec: &BirthSpec) -> MartingaleCondition {
    let lhs = spec.scalar_norm_sq();
    let rhs = spec.kappa;
    let mode = if (lhs - rhs).abs() <= 1e-12 {
        NormalizationMode::Martingale
    } else if lhs <= rhs {
        NormalizationMode::Submartingale
    } else {
        NormalizationMode::Unnormalized
    };
    MartingaleCondition { lhs, rhs, mode }
}

#[derive(Debug, Clone)]
pub struct NormBoundsReport {
    pub samples: usize,
    /// Operator norm of the mode block at the unit.
    pub exchange_norm_at_unit: f64,
    /// Largest sampled operator norm of the mode block.
    pub sup_exchange_norm: f64,
    /// Largest sampled |λ(y)| scalar value.
    pub sup_scalar_abs: f64,
    /// Sampled contractions violating the unit-point bound.
    pub violations: usize,
}

/// Samples contractions and verifies the mode-block bound
/// ‖λ_•^•(y)‖ ≤ ‖λ_•^•(1)‖ + 1e−9, reporting empirical suprema.
pub fn norm_bounds_check(spec: &BirthSpec, sample_count: usize, seed: u64) -> Result<NormBoundsReport> {
    if sample_count == 0 {
        return Err(Error::EmptySample);
    }
    spec.validate()?;
    let unit = ceye(spec.base_dim);
    let at_unit = operator_norm(&germ_from_birth(spec, &unit)?.mode_block());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sup_exchange = 0.0f64;
    let mut sup_scalar = 0.0f64;
    let mut violations = 0usize;
    for _ in 0..sample_count {
        let y = random_contraction(&mut rng, spec.base_dim);
        let germ = germ_from_birth(spec, &y)?;
        let ex = operator_norm(&germ.mode_block());
        sup_exchange = sup_exchange.max(ex);
        sup_scalar = sup_scalar.max(germ.scalar().norm());
        if ex > at_unit + 1e-9 {
            violations += 1;
        }
    }
    Ok(NormBoundsReport {
        samples: sample_count,
        exchange_norm_at_unit: at_unit,
        sup_exchange_norm: sup_exchange,
        sup_scalar_abs: sup_scalar,
        violations,
    })
}

/// Random birth spec with Gaussian tensors scaled per order; when
/// `martingale` is set, κ is pinned to Σ‖ς^k‖².
pub fn random_birth_spec<R: Rng + ?Sized>(
    rng: &mut R,
    base_dim: usize,
    k_max: usize,
    n_modes: usize,
    martingale: bool,
) -> BirthSpec {
    let scale = |k: usize, d: usize| 0.7 / (d as f64).powf(k as f64 / 2.0);
    let scalar_tensors: Vec<CVector> = (1..=k_max)
        .map(|k| random_cvector(rng, base_dim.pow(k as u32)) * cr(scale(k, base_dim)))
        .collect();
    let mode_tensors: Vec<Vec<CVector>> = (0..n_modes)
        .map(|_| {
            (0..=k_max)
                .map(|k| random_cvector(rng, base_dim.pow(k as u32)) * cr(scale(k, base_dim)))
                .collect()
        })
        .collect();
    let norm_sq: f64 = scalar_tensors.iter().map(|t| t.norm_squared()).sum();
    let kappa = if martingale {
        norm_sq
    } else {
        norm_sq + rng.random::<f64>()
    };
    let kappa_modes = (0..n_modes)
        .map(|_| crate::linalg::complex_gaussian(rng) * cr(0.5))
        .collect();
    BirthSpec {
        base_dim,
        k_max,
        n_modes,
        scalar_tensors,
        mode_tensors,
        kappa,
        kappa_modes,
    }
}

/// Block matrix [φ(y_i★y_k)] over a sample; positive semidefinite for
/// any birth map since every block is a tensor-power Gram value.
pub fn birth_phi_block_matrix(spec: &BirthSpec, sample: &[Element]) -> Result<CMatrix> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let sg = matrix_ball(spec.base_dim);
    let n = spec.n_modes;
    let block = 1 + n;
    let count = sample.len();
    let mut out = CMatrix::zeros(count * block, count * block);
    for (i, x) in sample.iter().enumerate() {
        for (k, z) in sample.iter().enumerate() {
            let xz = sg.star_compose(x, z)?;
            let m = match &xz {
                Element::Matrix(m) => birth_phi(spec, m)?,
                _ => unreachable!(),
            };
            for a in 0..block {
                for b in 0..block {
                    out[(i * block + a, k * block + b)] = m[(a, b)];
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs_diff;

    fn scalar_matrix(v: f64) -> CMatrix {
        CMatrix::from_row_slice(1, 1, &[cr(v)])
    }

    #[test]
    fn phi_of_scalar_powers() {
        let spec = BirthSpec {
            base_dim: 1,
            k_max: 2,
            n_modes: 0,
            scalar_tensors: vec![
                CVector::from_column_slice(&[cr(1.0)]),
                CVector::from_column_slice(&[cr(1.0)]),
            ],
            kappa: 2.0,
            kappa_modes: vec![],
            mode_tensors: vec![],
        };
        let phi = birth_phi(&spec, &scalar_matrix(0.5)).unwrap();
        assert!((phi[(0, 0)] - cr(0.75)).norm() < 1e-15);
        // at the unit the scalar is the norm sum, at zero it vanishes
        let phi1 = birth_phi(&spec, &scalar_matrix(1.0)).unwrap();
        assert!((phi1[(0, 0)] - cr(2.0)).norm() < 1e-15);
        let phi0 = birth_phi(&spec, &scalar_matrix(0.0)).unwrap();
        assert!(phi0[(0, 0)].norm() < 1e-15);
    }

    #[test]
    fn phi_mode_block_keeps_order_zero_at_zero() {
        let mut rng = <ChaCha8Rng as SeedableRng>::seed_from_u64(4);
        let spec = random_birth_spec(&mut rng, 2, 2, 2, true);
        let zero = CMatrix::zeros(2, 2);
        let phi0 = birth_phi(&spec, &zero).unwrap();
        for a in 0..2 {
            assert!(phi0[(0, 1 + a)].norm() < 1e-15);
            assert!(phi0[(1 + a, 0)].norm() < 1e-15);
            for b in 0..2 {
                let expect = spec.mode_tensors[a][0].dotc(&spec.mode_tensors[b][0]);
                assert!((phi0[(1 + a, 1 + b)] - expect).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn germ_of_scalar_unit_spec() {
        let spec = BirthSpec::scalar_unit();
        for y in [-0.3, 0.0, 0.5, 1.0] {
            let germ = germ_from_birth(&spec, &scalar_matrix(y)).unwrap();
            assert!((germ.scalar() - cr(y - 1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn germ_exchange_block_equals_phi_block() {
        let mut rng = <ChaCha8Rng as SeedableRng>::seed_from_u64(5);
        let spec = random_birth_spec(&mut rng, 2, 2, 2, false);
        let y = random_contraction(&mut rng, 2);
        let phi = birth_phi(&spec, &y).unwrap();
        let germ = germ_from_birth(&spec, &y).unwrap();
        let n = spec.n_modes;
        assert!(max_abs_diff(
            &germ.mode_block(),
            &phi.view((1, 1), (n, n)).into_owned()
        ) < 1e-15);
    }

    #[test]
    fn martingale_normalization_cancels_at_unit_in_vacuum() {
        let mut rng = <ChaCha8Rng as SeedableRng>::seed_from_u64(6);
        let spec = random_birth_spec(&mut rng, 2, 3, 1, true);
        let cond = martingale_condition_check(&spec);
        assert_eq!(cond.mode, NormalizationMode::Martingale);
        let f = CVector::zeros(1);
        let v = eval_solution_37(&spec, &f, &f, &ceye(2), 1.3).unwrap();
        assert!(v.norm() < 1e-12, "vacuum log at unit should vanish, got {v}");
    }

    #[test]
    fn martingale_modes() {
        let mut spec = BirthSpec::scalar_unit();
        assert_eq!(
            martingale_condition_check(&spec).mode,
            NormalizationMode::Martingale
        );
        spec.kappa = 2.0;
        assert_eq!(
            martingale_condition_check(&spec).mode,
            NormalizationMode::Submartingale
        );
        spec.kappa = 0.5;
        assert_eq!(
            martingale_condition_check(&spec).mode,
            NormalizationMode::Unnormalized
        );
    }

    #[test]
    fn vacuum_solution_is_scalar_germ() {
        let spec = BirthSpec::scalar_unit();
        let f = CVector::zeros(0);
        let y = scalar_matrix(0.25);
        let v = eval_solution_37(&spec, &f, &f, &y, 2.0).unwrap();
        // t (φ(y) − κ) = 2 (0.25 − 1)
        assert!((v - cr(-1.5)).norm() < 1e-15);
    }

    #[test]
    fn norm_bound_holds_on_samples() {
        let mut rng = <ChaCha8Rng as SeedableRng>::seed_from_u64(7);
        let spec = random_birth_spec(&mut rng, 2, 2, 1, false);
        let report = norm_bounds_check(&spec, 200, 11).unwrap();
        assert_eq!(report.violations, 0);
        assert!(report.sup_exchange_norm <= report.exchange_norm_at_unit + 1e-9);
        assert!(report.sup_scalar_abs.is_finite());
    }

    #[test]
    fn zero_tensor_data_gives_zero_suprema() {
        let spec = BirthSpec {
            base_dim: 1,
            k_max: 1,
            n_modes: 0,
            scalar_tensors: vec![CVector::zeros(1)],
            mode_tensors: vec![],
            kappa: 0.0,
            kappa_modes: vec![],
        };
        let report = norm_bounds_check(&spec, 50, 3).unwrap();
        assert_eq!(report.sup_exchange_norm, 0.0);
        assert_eq!(report.sup_scalar_abs, 0.0);
    }

    #[test]
    fn phi_block_matrix_is_psd() {
        let mut rng = <ChaCha8Rng as SeedableRng>::seed_from_u64(8);
        let spec = random_birth_spec(&mut rng, 2, 2, 1, true);
        let sg = matrix_ball(2);
        let sample = sg.sample_elements(4, 21);
        let block = birth_phi_block_matrix(&spec, &sample).unwrap();
        let (min_eig, _) = crate::linalg::min_eig_hermitian(&block);
        let scale = crate::linalg::max_abs(&block).max(1.0);
        assert!(min_eig >= -1e-10 * scale, "min eig {min_eig}");
    }

    #[test]
    fn rejects_expansive_argument() {
        let spec = BirthSpec::scalar_unit();
        assert!(matches!(
            birth_phi(&spec, &scalar_matrix(1.5)),
            Err(Error::NormExceeded(_))
        ));
    }

    #[test]
    fn dim_checks() {
        let spec = BirthSpec::scalar_unit();
        let f = CVector::zeros(1);
        assert!(matches!(
            eval_solution_37(&spec, &f, &f, &scalar_matrix(0.2), 1.0),
            Err(Error::ModeMismatch(1, 0))
        ));
        let bad = BirthSpec {
            scalar_tensors: vec![CVector::zeros(2)],
            ..BirthSpec::scalar_unit()
        };
        assert!(bad.validate().is_err());
    }

}
