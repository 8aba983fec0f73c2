//! Star-semigroups that exponents are defined over: finite groups given by
//! Cayley tables, the contraction ball of a matrix algebra, and unital
//! extensions 1 ⊕ b of nilpotent star-algebras.

use crate::linalg::{
    complex_gaussian, max_abs_diff, operator_norm, random_cmatrix, random_cvector, ceye, cr,
    CMatrix, CVector, C64, EQ_TOL,
};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Slack allowed on the contraction constraint of ball elements.
pub const BALL_NORM_SLACK: f64 = 1e-12;

/// An element of one of the shipped semigroup kinds.
#[derive(Debug, Clone, PartialEq)]
pub enum Element {
    /// Index into a finite group's element list.
    Index(usize),
    /// Contraction in the operator ball.
    Matrix(CMatrix),
    /// Coefficients of the nilpotent part b of 1 ⊕ b.
    Nilpotent(CVector),
}

impl Element {
    fn kind(&self) -> &'static str {
        match self {
            Element::Index(_) => "index",
            Element::Matrix(_) => "matrix",
            Element::Nilpotent(_) => "nilpotent",
        }
    }
}

/// Finite group data: product and inversion tables plus the unit index.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGroup {
    /// cayley[i][j] = index of the product e_i · e_j.
    pub cayley: Vec<Vec<usize>>,
    /// star[i] = index of the inverse of e_i.
    pub star: Vec<usize>,
    pub unit: usize,
}

/// Nilpotent star-algebra given by structure constants.
#[derive(Debug, Clone, PartialEq)]
pub struct NilpotentAlgebra {
    pub dim: usize,
    /// mul[i][j] = coefficient vector of e_i · e_j.
    pub mul: Vec<Vec<CVector>>,
    /// star(v) = star_matrix · conj(v).
    pub star_matrix: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StarSemigroup {
    FiniteGroup(FiniteGroup),
    MatrixBall { dim: usize },
    UnitalNilpotent(NilpotentAlgebra),
}

/// Cyclic group of order m with star = inversion.
pub fn cyclic_group(m: usize) -> StarSemigroup {
    assert!(m >= 1);
    let cayley = (0..m)
        .map(|i| (0..m).map(|j| (i + j) % m).collect())
        .collect();
    let star = (0..m).map(|i| (m - i) % m).collect();
    StarSemigroup::FiniteGroup(FiniteGroup {
        cayley,
        star,
        unit: 0,
    })
}

/// Quaternion group of order eight, elements ordered
/// (1, −1, i, −i, j, −j, k, −k).
pub fn quaternion_group() -> StarSemigroup {
    // element index = 2*axis + sign_bit, axis 0 is the unit axis
    fn axis_mul(a: usize, b: usize) -> (bool, usize) {
        match (a, b) {
            (0, x) => (false, x),
            (x, 0) => (false, x),
            (x, y) if x == y => (true, 0),
            (1, 2) => (false, 3),
            (2, 3) => (false, 1),
            (3, 1) => (false, 2),
            (2, 1) => (true, 3),
            (3, 2) => (true, 1),
            (1, 3) => (true, 2),
            _ => unreachable!(),
        }
    }
    let decode = |idx: usize| (idx % 2 == 1, idx / 2);
    let encode = |neg: bool, axis: usize| 2 * axis + usize::from(neg);
    let mut cayley = vec![vec![0usize; 8]; 8];
    let mut star = vec![0usize; 8];
    for i in 0..8 {
        let (si, ai) = decode(i);
        for j in 0..8 {
            let (sj, aj) = decode(j);
            let (sp, ap) = axis_mul(ai, aj);
            cayley[i][j] = encode(si ^ sj ^ sp, ap);
        }
        // inverse: unit axis is self-inverse, imaginary axes flip sign
        star[i] = if ai == 0 { i } else { encode(!si, ai) };
    }
    StarSemigroup::FiniteGroup(FiniteGroup {
        cayley,
        star,
        unit: 0,
    })
}

/// Unit ball of the d×d matrix algebra under operator norm.
pub fn matrix_ball(dim: usize) -> StarSemigroup {
    StarSemigroup::MatrixBall { dim }
}

/// One-dimensional nilpotent star-algebra: e² = 0, e★ = e.
pub fn nilpotent_line() -> StarSemigroup {
    StarSemigroup::UnitalNilpotent(NilpotentAlgebra {
        dim: 1,
        mul: vec![vec![CVector::zeros(1)]],
        star_matrix: ceye(1),
    })
}

impl StarSemigroup {
    pub fn kind(&self) -> &'static str {
        match self {
            StarSemigroup::FiniteGroup(_) => "finite_group",
            StarSemigroup::MatrixBall { .. } => "matrix_ball",
            StarSemigroup::UnitalNilpotent(_) => "unital_nilpotent",
        }
    }

    pub fn unit(&self) -> Element {
        match self {
            StarSemigroup::FiniteGroup(g) => Element::Index(g.unit),
            StarSemigroup::MatrixBall { dim } => Element::Matrix(ceye(*dim)),
            StarSemigroup::UnitalNilpotent(a) => Element::Nilpotent(CVector::zeros(a.dim)),
        }
    }

    /// The zero element, where the ambient algebra provides one.
    pub fn zero(&self) -> Option<Element> {
        match self {
            StarSemigroup::MatrixBall { dim } => Some(Element::Matrix(CMatrix::zeros(*dim, *dim))),
            _ => None,
        }
    }

    /// Number of elements for finite instances.
    pub fn order(&self) -> Option<usize> {
        match self {
            StarSemigroup::FiniteGroup(g) => Some(g.star.len()),
            _ => None,
        }
    }

    pub fn all_elements(&self) -> Option<Vec<Element>> {
        self.order()
            .map(|m| (0..m).map(Element::Index).collect())
    }

    /// Checks that an element belongs to this semigroup.
    pub fn validate(&self, x: &Element) -> Result<()> {
        match (self, x) {
            (StarSemigroup::FiniteGroup(g), Element::Index(i)) => {
                if *i < g.star.len() {
                    Ok(())
                } else {
                    Err(Error::ElementMismatch(format!(
                        "index {} out of range for group of order {}",
                        i,
                        g.star.len()
                    )))
                }
            }
            (StarSemigroup::MatrixBall { dim }, Element::Matrix(m)) => {
                if m.nrows() != *dim || m.ncols() != *dim {
                    return Err(Error::ElementMismatch(format!(
                        "ball element must be {dim}x{dim}, got {}x{}",
                        m.nrows(),
                        m.ncols()
                    )));
                }
                let norm = operator_norm(m);
                if norm > 1.0 + BALL_NORM_SLACK {
                    return Err(Error::NormExceeded(norm));
                }
                Ok(())
            }
            (StarSemigroup::UnitalNilpotent(a), Element::Nilpotent(v)) => {
                if v.len() == a.dim {
                    Ok(())
                } else {
                    Err(Error::ElementMismatch(format!(
                        "nilpotent coefficient vector must have length {}, got {}",
                        a.dim,
                        v.len()
                    )))
                }
            }
            (sg, x) => Err(Error::ElementMismatch(format!(
                "{} element passed to a {} semigroup",
                x.kind(),
                sg.kind()
            ))),
        }
    }

    /// Associative product; for unital nilpotent instances
    /// (1⊕a)(1⊕c) = 1⊕(a + c + ac).
    pub fn compose(&self, x: &Element, z: &Element) -> Result<Element> {
        self.validate(x)?;
        self.validate(z)?;
        match (self, x, z) {
            (StarSemigroup::FiniteGroup(g), Element::Index(i), Element::Index(j)) => {
                Ok(Element::Index(g.cayley[*i][*j]))
            }
            (StarSemigroup::MatrixBall { .. }, Element::Matrix(a), Element::Matrix(b)) => {
                Ok(Element::Matrix(a * b))
            }
            (StarSemigroup::UnitalNilpotent(alg), Element::Nilpotent(a), Element::Nilpotent(c)) => {
                let mut out = a + c;
                for i in 0..alg.dim {
                    for j in 0..alg.dim {
                        let coeff = a[i] * c[j];
                        out += &alg.mul[i][j] * coeff;
                    }
                }
                Ok(Element::Nilpotent(out))
            }
            _ => unreachable!("validate filters mismatches"),
        }
    }

    /// Involution; the adjoint on the ball, the inverse on groups.
    pub fn star(&self, x: &Element) -> Result<Element> {
        self.validate(x)?;
        match (self, x) {
            (StarSemigroup::FiniteGroup(g), Element::Index(i)) => Ok(Element::Index(g.star[*i])),
            (StarSemigroup::MatrixBall { .. }, Element::Matrix(m)) => {
                Ok(Element::Matrix(m.adjoint()))
            }
            (StarSemigroup::UnitalNilpotent(a), Element::Nilpotent(v)) => {
                Ok(Element::Nilpotent(&a.star_matrix * v.conjugate()))
            }
            _ => unreachable!("validate filters mismatches"),
        }
    }

    /// Convenience x★z = compose(star(x), z).
    pub fn star_compose(&self, x: &Element, z: &Element) -> Result<Element> {
        self.compose(&self.star(x)?, z)
    }

    pub fn elements_equal(&self, a: &Element, b: &Element) -> bool {
        match (a, b) {
            (Element::Index(i), Element::Index(j)) => i == j,
            (Element::Matrix(m), Element::Matrix(n)) => {
                m.shape() == n.shape() && max_abs_diff(m, n) <= EQ_TOL
            }
            (Element::Nilpotent(v), Element::Nilpotent(w)) => {
                v.len() == w.len() && (v - w).iter().all(|z| z.norm() <= EQ_TOL)
            }
            _ => false,
        }
    }

    /// Deterministic element sample; the unit always comes first.
    ///
    /// Finite groups enumerate (truncated at the group order); the ball
    /// draws Gaussian matrices scaled inside the unit sphere by a random
    /// factor in (1, 2); nilpotent instances draw Gaussian coefficients.
    pub fn sample_elements(&self, count: usize, seed: u64) -> Vec<Element> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = vec![self.unit()];
        match self {
            StarSemigroup::FiniteGroup(g) => {
                for i in 0..g.star.len() {
                    if out.len() >= count {
                        break;
                    }
                    if i != g.unit {
                        out.push(Element::Index(i));
                    }
                }
            }
            StarSemigroup::MatrixBall { dim } => {
                while out.len() < count {
                    let g = random_cmatrix(&mut rng, *dim, *dim);
                    let norm = operator_norm(&g);
                    if norm == 0.0 {
                        continue;
                    }
                    let slack: f64 = 1.0 + rng.random::<f64>();
                    out.push(Element::Matrix(g / cr(norm * slack)));
                }
            }
            StarSemigroup::UnitalNilpotent(a) => {
                while out.len() < count {
                    out.push(Element::Nilpotent(random_cvector(&mut rng, a.dim)));
                }
            }
        }
        out.truncate(count.max(1));
        out
    }
}

/// Random contraction of the given dimension (same law as
/// `sample_elements` on the ball, without the leading unit).
pub fn random_contraction<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    loop {
        let g = random_cmatrix(rng, dim, dim);
        let norm = operator_norm(&g);
        if norm > 0.0 {
            let slack: f64 = 1.0 + rng.random::<f64>();
            return g / cr(norm * slack);
        }
    }
}

/// Random scalar for a nilpotent coefficient, kept small so iterated
/// products stay tame in tests.
pub fn random_nilpotent_coefficient<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    complex_gaussian(rng) * cr(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_star_laws(sg: &StarSemigroup, elems: &[Element]) {
        for x in elems {
            let sx = sg.star(x).unwrap();
            let ssx = sg.star(&sx).unwrap();
            assert!(sg.elements_equal(&ssx, x), "star not involutive");
            for z in elems {
                // (x★z)★ = z★x
                let lhs = sg.star(&sg.star_compose(x, z).unwrap()).unwrap();
                let rhs = sg.star_compose(z, x).unwrap();
                assert!(sg.elements_equal(&lhs, &rhs), "star anti-multiplicativity");
            }
        }
        let unit = sg.unit();
        assert!(sg.elements_equal(&sg.star(&unit).unwrap(), &unit));
        for x in elems {
            assert!(sg.elements_equal(&sg.compose(&unit, x).unwrap(), x));
            assert!(sg.elements_equal(&sg.compose(x, &unit).unwrap(), x));
        }
    }

    #[test]
    fn cyclic_group_laws() {
        let sg = cyclic_group(2);
        let s = Element::Index(1);
        assert_eq!(sg.compose(&s, &s).unwrap(), Element::Index(0));
        check_star_laws(&sg, &sg.all_elements().unwrap());
        check_star_laws(&cyclic_group(5), &cyclic_group(5).all_elements().unwrap());
    }

    #[test]
    fn quaternion_group_laws() {
        let sg = quaternion_group();
        let elems = sg.all_elements().unwrap();
        check_star_laws(&sg, &elems);
        // i*j = k, j*i = -k: noncommutative
        let (i, j, k, nk) = (Element::Index(2), Element::Index(4), 6usize, 7usize);
        assert_eq!(sg.compose(&i, &j).unwrap(), Element::Index(k));
        assert_eq!(sg.compose(&j, &i).unwrap(), Element::Index(nk));
        // associativity over the whole table
        for a in &elems {
            for b in &elems {
                for c in &elems {
                    let lhs = sg.compose(&sg.compose(a, b).unwrap(), c).unwrap();
                    let rhs = sg.compose(a, &sg.compose(b, c).unwrap()).unwrap();
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn matrix_ball_compose_and_star() {
        let sg = matrix_ball(1);
        let x = Element::Matrix(CMatrix::from_row_slice(1, 1, &[cr(0.5)]));
        let z = Element::Matrix(CMatrix::from_row_slice(1, 1, &[C64::new(0.0, 0.4)]));
        match sg.compose(&x, &z).unwrap() {
            Element::Matrix(m) => assert!((m[(0, 0)] - C64::new(0.0, 0.2)).norm() < 1e-15),
            _ => panic!(),
        }
        let sg2 = matrix_ball(2);
        let nil = Element::Matrix(CMatrix::from_row_slice(
            2,
            2,
            &[cr(0.0), cr(1.0), cr(0.0), cr(0.0)],
        ));
        match sg2.star(&nil).unwrap() {
            Element::Matrix(m) => {
                assert_eq!(m[(1, 0)], cr(1.0));
                assert_eq!(m[(0, 1)], cr(0.0));
            }
            _ => panic!(),
        }
        let sampled = sg2.sample_elements(201, 9);
        check_star_laws(&sg2, &sampled[..20.min(sampled.len())]);
        for e in &sampled {
            if let Element::Matrix(m) = e {
                assert!(operator_norm(m) <= 1.0 + BALL_NORM_SLACK);
            }
        }
    }

    #[test]
    fn ball_rejects_expansions() {
        let sg = matrix_ball(1);
        let big = Element::Matrix(CMatrix::from_row_slice(1, 1, &[cr(1.5)]));
        assert!(matches!(sg.validate(&big), Err(Error::NormExceeded(_))));
    }

    #[test]
    fn nilpotent_line_product() {
        let sg = nilpotent_line();
        let a = Element::Nilpotent(CVector::from_column_slice(&[cr(1.0)]));
        // a + c + ac with ac = 0
        match sg.compose(&a, &a).unwrap() {
            Element::Nilpotent(v) => assert_eq!(v[0], cr(2.0)),
            _ => panic!(),
        }
        // star(1⊕a)·(1⊕c) = 1⊕(c + a★c + a★)
        let c = Element::Nilpotent(CVector::from_column_slice(&[C64::new(0.0, 2.0)]));
        let sa = sg.star(&a).unwrap();
        let lhs = sg.compose(&sa, &c).unwrap();
        match (lhs, &sa) {
            (Element::Nilpotent(v), Element::Nilpotent(astar)) => {
                // the algebra product a★c vanishes since e² = 0
                let expect = C64::new(0.0, 2.0) + astar[0];
                assert!((v[0] - expect).norm() < 1e-15);
            }
            _ => panic!(),
        }
        check_star_laws(&sg, &sg.sample_elements(10, 3));
    }

    #[test]
    fn sampling_is_deterministic_and_unit_first() {
        for sg in [matrix_ball(2), nilpotent_line(), cyclic_group(4)] {
            let a = sg.sample_elements(5, 42);
            let b = sg.sample_elements(5, 42);
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert_eq!(x, y, "sampling must be reproducible");
            }
            assert!(sg.elements_equal(&a[0], &sg.unit()));
        }
        let z2 = cyclic_group(2);
        assert_eq!(
            z2.sample_elements(2, 0),
            vec![Element::Index(0), Element::Index(1)]
        );
    }

    #[test]
    fn kind_mismatch_is_rejected() {
        let sg = cyclic_group(3);
        let m = Element::Matrix(ceye(2));
        assert!(matches!(
            sg.compose(&m, &m),
            Err(Error::ElementMismatch(_))
        ));
    }
}
