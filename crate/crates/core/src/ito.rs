//! Finite-mode Ito quadruple arithmetic: the associative product of
//! stochastic differentials, the flat involution, the extended-matrix
//! embedding, and the antidiagonal metric tying the two together.

use crate::linalg::{cx, CMatrix, CRowVector, CVector, C64};
use crate::{Error, Result};
use rand::Rng;

/// One algebra element: the four coefficient blocks of a quantum
/// stochastic differential with `n_modes` noise channels.
///
/// Index convention everywhere in this crate: the time slot comes first,
/// then the modes, so composite objects are laid out over (−, 1..n, +).
#[derive(Debug, Clone, PartialEq)]
pub struct ItoQuadruple {
    pub n_modes: usize,
    /// Mode-to-mode block, n × n.
    pub exchange: CMatrix,
    /// Creation column, n entries.
    pub creation: CVector,
    /// Annihilation row, n entries.
    pub annihilation: CRowVector,
    /// Time-time coefficient.
    pub scalar: C64,
}

impl ItoQuadruple {
    pub fn new(
        exchange: CMatrix,
        creation: CVector,
        annihilation: CRowVector,
        scalar: C64,
    ) -> Result<Self> {
        let n = exchange.nrows();
        if exchange.ncols() != n {
            return Err(Error::Invalid(format!(
                "exchange block must be square, got {}x{}",
                exchange.nrows(),
                exchange.ncols()
            )));
        }
        if creation.len() != n || annihilation.len() != n {
            return Err(Error::ModeMismatch(creation.len(), n));
        }
        let q = ItoQuadruple {
            n_modes: n,
            exchange,
            creation,
            annihilation,
            scalar,
        };
        if !q.is_finite() {
            return Err(Error::Invalid("non-finite entry in quadruple".into()));
        }
        Ok(q)
    }

    pub fn zero(n_modes: usize) -> Self {
        ItoQuadruple {
            n_modes,
            exchange: CMatrix::zeros(n_modes, n_modes),
            creation: CVector::zeros(n_modes),
            annihilation: CRowVector::zeros(n_modes),
            scalar: C64::new(0.0, 0.0),
        }
    }

    /// Mode-free element carrying only the time-time coefficient.
    pub fn from_scalar(scalar: C64) -> Self {
        let mut q = ItoQuadruple::zero(0);
        q.scalar = scalar;
        q
    }

    pub fn is_finite(&self) -> bool {
        self.exchange.iter().all(|z| z.re.is_finite() && z.im.is_finite())
            && self.creation.iter().all(|z| z.re.is_finite() && z.im.is_finite())
            && self
                .annihilation
                .iter()
                .all(|z| z.re.is_finite() && z.im.is_finite())
            && self.scalar.re.is_finite()
            && self.scalar.im.is_finite()
    }

    /// Largest absolute entry across all four blocks.
    pub fn max_abs(&self) -> f64 {
        let mut m = self.scalar.norm();
        m = self.exchange.iter().map(|z| z.norm()).fold(m, f64::max);
        m = self.creation.iter().map(|z| z.norm()).fold(m, f64::max);
        self.annihilation.iter().map(|z| z.norm()).fold(m, f64::max)
    }

    /// Entrywise distance between two quadruples via their embeddings.
    pub fn distance(&self, other: &ItoQuadruple) -> f64 {
        crate::linalg::max_abs_diff(
            embed_extended(self).matrix(),
            embed_extended(other).matrix(),
        )
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, n_modes: usize) -> Self {
        use crate::linalg::{complex_gaussian, random_cmatrix, random_cvector};
        ItoQuadruple {
            n_modes,
            exchange: random_cmatrix(rng, n_modes, n_modes),
            creation: random_cvector(rng, n_modes),
            annihilation: random_cvector(rng, n_modes).transpose(),
            scalar: complex_gaussian(rng),
        }
    }
}

/// Square (n+2)×(n+2) matrix form over the index order (−, 1..n, +);
/// the first column and last row vanish identically.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedMatrix {
    matrix: CMatrix,
}

impl ExtendedMatrix {
    /// Wraps a raw matrix, checking the vanishing first column and last row.
    pub fn try_new(matrix: CMatrix) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim || dim < 2 {
            return Err(Error::Invalid(format!(
                "extended matrix must be square of size >= 2, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        for i in 0..dim {
            if matrix[(i, 0)].norm() != 0.0 || matrix[(dim - 1, i)].norm() != 0.0 {
                return Err(Error::Invalid(
                    "extended matrix must have zero first column and last row".into(),
                ));
            }
        }
        Ok(ExtendedMatrix { matrix })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() - 2
    }

    /// Reads the four blocks back; exact inverse of [`embed_extended`].
    pub fn to_quadruple(&self) -> ItoQuadruple {
        let n = self.n_modes();
        let m = &self.matrix;
        ItoQuadruple {
            n_modes: n,
            exchange: m.view((1, 1), (n, n)).into_owned(),
            creation: m.view((1, n + 1), (n, 1)).into_owned().column(0).into_owned(),
            annihilation: m.view((0, 1), (1, n)).into_owned().row(0).into_owned(),
            scalar: m[(0, n + 1)],
        }
    }
}

/// The 0/1 symmetric involution metric on the (−, 1..n, +) index set:
/// antidiagonal coupling of − and +, identity on the mode block.
#[derive(Debug, Clone, PartialEq)]
pub struct MinkowskiMetric {
    matrix: CMatrix,
}

impl MinkowskiMetric {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() - 2
    }
}

/// Product of quadruples: (b a)_ν^μ = b_•^μ a_ν^•.  The scalar blocks of
/// both factors never enter the result.
pub fn ito_mul(b: &ItoQuadruple, a: &ItoQuadruple) -> Result<ItoQuadruple> {
    if b.n_modes != a.n_modes {
        return Err(Error::ModeMismatch(b.n_modes, a.n_modes));
    }
    let scalar = if b.n_modes == 0 {
        C64::new(0.0, 0.0)
    } else {
        (&b.annihilation * &a.creation)[(0, 0)]
    };
    Ok(ItoQuadruple {
        n_modes: b.n_modes,
        exchange: &b.exchange * &a.exchange,
        creation: &b.exchange * &a.creation,
        annihilation: &b.annihilation * &a.exchange,
        scalar,
    })
}

/// Flat involution: exchange ↦ exchange†, creation ↦ annihilation†,
/// annihilation ↦ creation†, scalar ↦ conjugate.  Coincides with
/// g·(extended)†·g for the metric of [`minkowski_metric`].
pub fn ito_flat(a: &ItoQuadruple) -> ItoQuadruple {
    ItoQuadruple {
        n_modes: a.n_modes,
        exchange: a.exchange.adjoint(),
        creation: a.annihilation.adjoint(),
        annihilation: a.creation.adjoint(),
        scalar: a.scalar.conj(),
    }
}

/// Embeds a quadruple as rows (−, •, +) × cols (−, •, +):
/// `[[0, an, sc], [0, ex, cr], [0, 0, 0]]`.
pub fn embed_extended(a: &ItoQuadruple) -> ExtendedMatrix {
    let n = a.n_modes;
    let mut m = CMatrix::zeros(n + 2, n + 2);
    for j in 0..n {
        m[(0, 1 + j)] = a.annihilation[j];
    }
    m[(0, n + 1)] = a.scalar;
    for i in 0..n {
        for j in 0..n {
            m[(1 + i, 1 + j)] = a.exchange[(i, j)];
        }
        m[(1 + i, n + 1)] = a.creation[i];
    }
    ExtendedMatrix { matrix: m }
}

/// Metric g with g_{μν} = 1 iff μ = −ν under the reflection that swaps
/// − and + and fixes the modes; g² = identity.
pub fn minkowski_metric(n_modes: usize) -> MinkowskiMetric {
    let dim = n_modes + 2;
    let mut m = CMatrix::zeros(dim, dim);
    m[(0, dim - 1)] = cx(1.0, 0.0);
    m[(dim - 1, 0)] = cx(1.0, 0.0);
    for i in 1..=n_modes {
        m[(i, i)] = cx(1.0, 0.0);
    }
    MinkowskiMetric { matrix: m }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ceye, cr, max_abs_diff};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quad1(ex: f64, cr_: f64, an: f64, sc: f64) -> ItoQuadruple {
        ItoQuadruple::new(
            CMatrix::from_row_slice(1, 1, &[cr(ex)]),
            CVector::from_column_slice(&[cr(cr_)]),
            CRowVector::from_row_slice(&[cr(an)]),
            cr(sc),
        )
        .unwrap()
    }

    #[test]
    fn product_matches_extended_embedding() {
        let b = quad1(1.0, 0.0, 2.0, 4.0);
        let a = quad1(2.0, 1.0, 3.0, 5.0);
        let p = ito_mul(&b, &a).unwrap();
        assert_eq!(p.exchange[(0, 0)], cr(2.0));
        assert_eq!(p.creation[0], cr(1.0));
        assert_eq!(p.annihilation[0], cr(4.0));
        assert_eq!(p.scalar, cr(2.0));
        let lhs = embed_extended(&p);
        let rhs = embed_extended(&b).matrix() * embed_extended(&a).matrix();
        assert_eq!(lhs.matrix(), &rhs);
    }

    #[test]
    fn pure_creation_squares_to_zero() {
        let a = quad1(0.0, 1.0, 0.0, 0.0);
        let sq = ito_mul(&a, &a).unwrap();
        assert_eq!(sq, ItoQuadruple::zero(1));
    }

    #[test]
    fn zero_annihilates() {
        let b = quad1(1.0, 0.0, 2.0, 4.0);
        let z = ItoQuadruple::zero(1);
        assert_eq!(ito_mul(&b, &z).unwrap(), z);
        assert_eq!(ito_mul(&z, &b).unwrap(), z);
    }

    #[test]
    fn mode_mismatch_is_rejected() {
        let b = quad1(1.0, 0.0, 2.0, 4.0);
        let z = ItoQuadruple::zero(2);
        assert!(matches!(ito_mul(&b, &z), Err(Error::ModeMismatch(1, 2))));
    }

    #[test]
    fn flat_swaps_creation_and_annihilation() {
        let a = ItoQuadruple::new(
            CMatrix::from_row_slice(1, 1, &[cr(2.0)]),
            CVector::from_column_slice(&[cr(1.0)]),
            CRowVector::from_row_slice(&[cr(3.0)]),
            cx(0.0, 5.0),
        )
        .unwrap();
        let f = ito_flat(&a);
        assert_eq!(f.exchange[(0, 0)], cr(2.0));
        assert_eq!(f.creation[0], cr(3.0));
        assert_eq!(f.annihilation[0], cr(1.0));
        assert_eq!(f.scalar, cx(0.0, -5.0));
    }

    #[test]
    fn flat_is_involutive_and_metric_conjugation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 0..4 {
            let a = ItoQuadruple::random(&mut rng, n);
            assert!(ito_flat(&ito_flat(&a)).distance(&a) < 1e-15);
            let g = minkowski_metric(n).matrix().clone();
            let via_metric = &g * embed_extended(&a).matrix().adjoint() * &g;
            assert!(max_abs_diff(embed_extended(&ito_flat(&a)).matrix(), &via_metric) < 1e-15);
        }
    }

    #[test]
    fn self_adjoint_elements_are_flat_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 2;
        let x = crate::linalg::random_cmatrix(&mut rng, n, n);
        let herm = (&x + x.adjoint()) * cr(0.5);
        let creation = crate::linalg::random_cvector(&mut rng, n);
        let a = ItoQuadruple::new(herm, creation.clone(), creation.adjoint(), cr(1.5)).unwrap();
        assert!(ito_flat(&a).distance(&a) < 1e-15);
    }

    #[test]
    fn embedding_round_trips_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 0..4 {
            let a = ItoQuadruple::random(&mut rng, n);
            assert_eq!(embed_extended(&a).to_quadruple(), a);
        }
        let z = ItoQuadruple::zero(2);
        assert!(embed_extended(&z).matrix().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn metric_shape_and_square() {
        let g1 = minkowski_metric(1);
        let expect = CMatrix::from_row_slice(
            3,
            3,
            &[
                cr(0.0),
                cr(0.0),
                cr(1.0),
                cr(0.0),
                cr(1.0),
                cr(0.0),
                cr(1.0),
                cr(0.0),
                cr(0.0),
            ],
        );
        assert_eq!(g1.matrix(), &expect);
        for n in [0usize, 1, 3] {
            let g = minkowski_metric(n).matrix().clone();
            assert_eq!(&g * &g, ceye(n + 2));
        }
        let g2 = minkowski_metric(2).matrix().clone();
        assert_eq!(g2.transpose(), g2);
    }

    #[test]
    fn scalar_blocks_never_influence_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let mut b = ItoQuadruple::random(&mut rng, 3);
            let mut a = ItoQuadruple::random(&mut rng, 3);
            let p = ito_mul(&b, &a).unwrap();
            b.scalar = cr(999.0);
            a.scalar = cx(-7.0, 3.0);
            assert_eq!(ito_mul(&b, &a).unwrap(), p);
        }
    }

    #[test]
    fn anti_homomorphism_under_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let b = ItoQuadruple::random(&mut rng, 3);
            let a = ItoQuadruple::random(&mut rng, 3);
            let lhs = ito_flat(&ito_mul(&b, &a).unwrap());
            let rhs = ito_mul(&ito_flat(&a), &ito_flat(&b)).unwrap();
            assert!(lhs.distance(&rhs) < 1e-12);
        }
    }
}
