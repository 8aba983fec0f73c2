//! Generator models, their germ matrices, and the two-point dissipator
//! kernel derived from them.
//!
//! The germ of a structure map α is the (1+n)×(1+n) matrix λ = p + α over
//! the slot order (time, modes): entry (0,0) is the scalar coefficient,
//! row 0 carries the annihilation couplings, column 0 the creation
//! couplings, and the mode block is δ + exchange.

use crate::birth::{germ_from_birth, BirthSpec};
use crate::dilation::DilationData;
use crate::ito::{ItoQuadruple, MinkowskiMetric};
use crate::linalg::{cr, CMatrix, CRowVector, CVector, C64};
use crate::semigroup::{Element, StarSemigroup};
use crate::{Error, Result};

/// Residual below which a model counts as flat-symmetric.
pub const FLAT_SYMMETRY_TOL: f64 = 1e-10;

/// The (1+n)×(1+n) germ matrix of a structure map.
#[derive(Debug, Clone, PartialEq)]
pub struct GermMatrix {
    matrix: CMatrix,
}

impl GermMatrix {
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::Invalid(format!(
                "germ matrix must be square and nonempty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(GermMatrix { matrix })
    }

    /// λ = p + α for the structure-map quadruple α.
    pub fn from_structure_map(a: &ItoQuadruple) -> Self {
        let n = a.n_modes;
        let mut m = CMatrix::zeros(1 + n, 1 + n);
        m[(0, 0)] = a.scalar;
        for k in 0..n {
            m[(0, 1 + k)] = a.annihilation[k];
            m[(1 + k, 0)] = a.creation[k];
            for l in 0..n {
                m[(1 + k, 1 + l)] = a.exchange[(k, l)] + if k == l { cr(1.0) } else { cr(0.0) };
            }
        }
        GermMatrix { matrix: m }
    }

    /// Recovers α = λ − p.
    pub fn structure_map(&self) -> ItoQuadruple {
        let n = self.n_modes();
        let m = &self.matrix;
        let mut exchange = CMatrix::zeros(n, n);
        let mut creation = CVector::zeros(n);
        let mut annihilation = CRowVector::zeros(n);
        for k in 0..n {
            creation[k] = m[(1 + k, 0)];
            annihilation[k] = m[(0, 1 + k)];
            for l in 0..n {
                exchange[(k, l)] = m[(1 + k, 1 + l)] - if k == l { cr(1.0) } else { cr(0.0) };
            }
        }
        ItoQuadruple {
            n_modes: n,
            exchange,
            creation,
            annihilation,
            scalar: m[(0, 0)],
        }
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Scalar entry λ = α_+^- at slot (0,0).
    pub fn scalar(&self) -> C64 {
        self.matrix[(0, 0)]
    }

    /// Mode block λ_•^• = δ + α_•^•.
    pub fn mode_block(&self) -> CMatrix {
        let n = self.n_modes();
        self.matrix.view((1, 1), (n, n)).into_owned()
    }

    /// Annihilation couplings (λ_n) along row 0.
    pub fn annihilation_row(&self) -> CRowVector {
        let n = self.n_modes();
        CRowVector::from_fn(n, |_, j| self.matrix[(0, 1 + j)])
    }

    /// Creation couplings (λ^m) along column 0.
    pub fn creation_col(&self) -> CVector {
        let n = self.n_modes();
        CVector::from_fn(n, |i, _| self.matrix[(1 + i, 0)])
    }

    pub fn adjoint(&self) -> GermMatrix {
        GermMatrix {
            matrix: self.matrix.adjoint(),
        }
    }
}

/// Rank-one projector onto the time slot of the (1+n)-dimensional germ
/// space.
pub fn e_projector(n_modes: usize) -> CMatrix {
    let mut e = CMatrix::zeros(1 + n_modes, 1 + n_modes);
    e[(0, 0)] = cr(1.0);
    e
}

/// Scalar generator tables of the classical Poisson exponent
/// (1+α(y))^{p(t)} exp[t λ(y)].
#[derive(Debug, Clone)]
pub struct ScalarPoissonTables {
    pub alpha: Vec<(Element, C64)>,
    pub lambda: Vec<(Element, C64)>,
}

#[derive(Debug, Clone)]
pub enum GeneratorForm {
    /// Explicit per-element structure maps.  Total on finite groups,
    /// partial elsewhere; evaluation outside the table is an error.
    Table(Vec<(Element, ItoQuadruple)>),
    /// Germ produced by a pseudo-Hilbert representation together with
    /// mode coupling data.
    Dilated(DilationData),
    /// Tensor-power birth generator over an operator ball.
    Birth(BirthSpec),
    /// Classical scalar Poisson data; intended for the Monte-Carlo
    /// checks only (mode-free).
    ScalarPoisson(ScalarPoissonTables),
}

/// A structure map α over a star-semigroup, in one of four forms.
#[derive(Debug, Clone)]
pub struct GeneratorModel {
    pub semigroup: StarSemigroup,
    pub n_modes: usize,
    pub form: GeneratorForm,
}

impl GeneratorModel {
    pub fn table(
        semigroup: StarSemigroup,
        n_modes: usize,
        entries: Vec<(Element, ItoQuadruple)>,
    ) -> Result<Self> {
        for (el, quad) in &entries {
            semigroup.validate(el)?;
            if quad.n_modes != n_modes {
                return Err(Error::ModeMismatch(quad.n_modes, n_modes));
            }
        }
        Ok(GeneratorModel {
            semigroup,
            n_modes,
            form: GeneratorForm::Table(entries),
        })
    }

    pub fn dilated(semigroup: StarSemigroup, n_modes: usize, data: DilationData) -> Result<Self> {
        if data.modes.l_circ.len() != n_modes || data.modes.l_minus.len() != n_modes {
            return Err(Error::ModeMismatch(data.modes.l_circ.len(), n_modes));
        }
        Ok(GeneratorModel {
            semigroup,
            n_modes,
            form: GeneratorForm::Dilated(data),
        })
    }

    /// Birth model over the ball of the spec's base dimension.
    pub fn birth(spec: BirthSpec) -> Result<Self> {
        spec.validate()?;
        Ok(GeneratorModel {
            semigroup: crate::semigroup::matrix_ball(spec.base_dim),
            n_modes: spec.n_modes,
            form: GeneratorForm::Birth(spec),
        })
    }

    pub fn scalar_poisson(
        semigroup: StarSemigroup,
        alpha: Vec<(Element, C64)>,
        lambda: Vec<(Element, C64)>,
    ) -> Result<Self> {
        for (el, _) in alpha.iter().chain(lambda.iter()) {
            semigroup.validate(el)?;
        }
        Ok(GeneratorModel {
            semigroup,
            n_modes: 0,
            form: GeneratorForm::ScalarPoisson(ScalarPoissonTables { alpha, lambda }),
        })
    }

    /// Looks up the scalar Poisson tables; errors on other forms.
    pub fn poisson_values(&self, y: &Element) -> Result<(C64, C64)> {
        match &self.form {
            GeneratorForm::ScalarPoisson(t) => {
                let a = lookup(&self.semigroup, &t.alpha, y)?;
                let l = lookup(&self.semigroup, &t.lambda, y)?;
                Ok((a, l))
            }
            _ => Err(Error::UnsupportedForm("expected a scalar Poisson model")),
        }
    }
}

fn lookup<T: Clone>(sg: &StarSemigroup, table: &[(Element, T)], y: &Element) -> Result<T> {
    table
        .iter()
        .find(|(el, _)| sg.elements_equal(el, y))
        .map(|(_, v)| v.clone())
        .ok_or(Error::OutsideTable)
}

/// Evaluates the germ λ(y) of a model.
///
/// Dilated models produce the germ of their representation data; birth
/// models produce φ(y) − κ; scalar Poisson models expose the 1×1 germ
/// α(y) + λ(y) of their mean exponent.
pub fn germ_of(model: &GeneratorModel, y: &Element) -> Result<GermMatrix> {
    model.semigroup.validate(y)?;
    match &model.form {
        GeneratorForm::Table(entries) => {
            let quad = lookup(&model.semigroup, entries, y)?;
            Ok(GermMatrix::from_structure_map(&quad))
        }
        GeneratorForm::Dilated(data) => dilated_germ(model, data, y),
        GeneratorForm::Birth(spec) => match y {
            Element::Matrix(m) => germ_from_birth(spec, m),
            _ => Err(Error::ElementMismatch(
                "birth models take operator-ball elements".into(),
            )),
        },
        GeneratorForm::ScalarPoisson(_) => {
            let (a, l) = model.poisson_values(y)?;
            GermMatrix::from_matrix(CMatrix::from_row_slice(1, 1, &[a + l]))
        }
    }
}

fn dilated_germ(model: &GeneratorModel, data: &DilationData, y: &Element) -> Result<GermMatrix> {
    let sg = &model.semigroup;
    let y_star = sg.star(y)?;
    let idx = data.index_of(sg, y)?;
    let idx_star = data.index_of(sg, &y_star)?;
    let n = model.n_modes;
    let j_y = &data.j[idx];
    let k_y = &data.k[idx];
    let k_star = &data.k[idx_star];
    let mut m = CMatrix::zeros(1 + n, 1 + n);
    m[(0, 0)] = data.l[idx] + data.d;
    for a in 0..n {
        let lc = &data.modes.l_circ[a];
        let lm = data.modes.l_minus[a];
        m[(0, 1 + a)] = k_star.dotc(lc) + lm;
        m[(1 + a, 0)] = lc.dotc(k_y) + lm.conj();
        for b in 0..n {
            m[(1 + a, 1 + b)] = lc.dotc(&(j_y * &data.modes.l_circ[b]));
        }
    }
    GermMatrix::from_matrix(m)
}

/// Warns when the scalar germ value at the unit has a positive real part
/// or a non-negligible imaginary part; martingale-type models have d ≤ 0.
pub fn check_d_sign(d: C64) {
    if d.re > 0.0 {
        log::warn!("generator has d = {} > 0 at the unit", d.re);
    }
    if d.im.abs() > 1e-10 {
        log::warn!("generator has non-real d = {} at the unit", d);
    }
}

/// The two-point dissipator kernel of a model with the scalar d split out.
#[derive(Debug, Clone)]
pub struct DissipatorKernel<'a> {
    pub model: &'a GeneratorModel,
    pub d: C64,
}

impl<'a> DissipatorKernel<'a> {
    pub fn new(model: &'a GeneratorModel) -> Result<Self> {
        let d = germ_of(model, &model.semigroup.unit())?.scalar();
        check_d_sign(d);
        Ok(DissipatorKernel { model, d })
    }

    pub fn eval(&self, x: &Element, z: &Element) -> Result<CMatrix> {
        dissipator_of(self.model, x, z)
    }
}

/// Dissipator Δ(x,z) = λ(x★z) − eλ(z) − λ(x★)e + eλ(1)e, evaluated
/// entrywise: the mode block is λ(x★z)'s, row 0 is recentred by λ(z),
/// column 0 by λ(x★), and the scalar corner picks up d.
pub fn dissipator_of(model: &GeneratorModel, x: &Element, z: &Element) -> Result<CMatrix> {
    let sg = &model.semigroup;
    let g_xsz = germ_of(model, &sg.star_compose(x, z)?)?;
    let g_z = germ_of(model, z)?;
    let g_xs = germ_of(model, &sg.star(x)?)?;
    let d = germ_of(model, &sg.unit())?.scalar();
    let n = model.n_modes;
    let mut m = g_xsz.matrix().clone();
    m[(0, 0)] = g_xsz.scalar() - g_z.scalar() - g_xs.scalar() + d;
    for k in 0..n {
        m[(0, 1 + k)] -= g_z.matrix()[(0, 1 + k)];
        m[(1 + k, 0)] -= g_xs.matrix()[(1 + k, 0)];
    }
    Ok(m)
}

/// Max over the sample of ‖λ(y★) − λ(y)†‖; a model is accepted as
/// flat-symmetric when this stays below [`FLAT_SYMMETRY_TOL`].
pub fn flat_symmetry_residual(model: &GeneratorModel, sample: &[Element]) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut worst = 0.0f64;
    for y in sample {
        let g_star = germ_of(model, &model.semigroup.star(y)?)?;
        let g_adj = germ_of(model, y)?.adjoint();
        worst = worst.max(crate::linalg::max_abs_diff(g_star.matrix(), g_adj.matrix()));
    }
    Ok(worst)
}

/// Rebuilds a model as a germ table with `epsilon` added to the scalar
/// slot at every non-unit element of the sample.  For epsilon above the
/// test tolerance this breaks conditional positivity along any scalar
/// coefficient vector that annihilates the original kernel.
pub fn perturb_off_unit_scalar(
    model: &GeneratorModel,
    sample: &[Element],
    epsilon: f64,
) -> Result<GeneratorModel> {
    let sg = &model.semigroup;
    let unit = sg.unit();
    let mut entries = Vec::with_capacity(sample.len());
    for y in sample {
        let mut m = germ_of(model, y)?.matrix().clone();
        if !sg.elements_equal(y, &unit) {
            m[(0, 0)] += cr(epsilon);
        }
        entries.push((y.clone(), GermMatrix::from_matrix(m)?.structure_map()));
    }
    GeneratorModel::table(sg.clone(), model.n_modes, entries)
}

/// Metric consistency: the germ-space reflection matches the ambient
/// metric on the (−, 1..n, +) extension.
pub fn metric_for(model: &GeneratorModel) -> MinkowskiMetric {
    crate::ito::minkowski_metric(model.n_modes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ito::ito_flat;
    use crate::linalg::max_abs_diff;
    use crate::semigroup::cyclic_group;

    /// Mode-free table model on Z2 with the given scalar values.
    pub(crate) fn z2_scalar_model(at_unit: f64, at_s: f64) -> GeneratorModel {
        let sg = cyclic_group(2);
        GeneratorModel::table(
            sg,
            0,
            vec![
                (Element::Index(0), ItoQuadruple::from_scalar(cr(at_unit))),
                (Element::Index(1), ItoQuadruple::from_scalar(cr(at_s))),
            ],
        )
        .unwrap()
    }

    #[test]
    fn germ_of_scalar_table() {
        let model = z2_scalar_model(0.0, -1.0);
        let g1 = germ_of(&model, &Element::Index(0)).unwrap();
        let gs = germ_of(&model, &Element::Index(1)).unwrap();
        assert_eq!(g1.scalar(), cr(0.0));
        assert_eq!(gs.scalar(), cr(-1.0));
        assert_eq!(gs.matrix().nrows(), 1);
    }

    #[test]
    fn zero_structure_map_has_unit_mode_block() {
        let sg = cyclic_group(3);
        let entries = (0..3)
            .map(|i| (Element::Index(i), ItoQuadruple::zero(2)))
            .collect();
        let model = GeneratorModel::table(sg, 2, entries).unwrap();
        for i in 0..3 {
            let g = germ_of(&model, &Element::Index(i)).unwrap();
            let mut expect = CMatrix::zeros(3, 3);
            expect[(1, 1)] = cr(1.0);
            expect[(2, 2)] = cr(1.0);
            assert_eq!(g.matrix(), &expect);
        }
    }

    #[test]
    fn germ_round_trips_structure_map() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(2);
        for n in 0..4 {
            let a = ItoQuadruple::random(&mut rng, n);
            let g = GermMatrix::from_structure_map(&a);
            assert!(g.structure_map().distance(&a) < 1e-15);
            // germ adjoint corresponds to the flat of the structure map
            let ga = g.adjoint().structure_map();
            assert!(ga.distance(&ito_flat(&a)) < 1e-15);
        }
    }

    #[test]
    fn dissipator_values_on_z2() {
        let model = z2_scalar_model(0.0, -1.0);
        let s = Element::Index(1);
        let unit = Element::Index(0);
        let d_ss = dissipator_of(&model, &s, &s).unwrap();
        assert_eq!(d_ss[(0, 0)], cr(2.0));
        let d_11 = dissipator_of(&model, &unit, &unit).unwrap();
        assert_eq!(d_11[(0, 0)], cr(0.0));
        let kernel = DissipatorKernel::new(&model).unwrap();
        assert_eq!(kernel.d, cr(0.0));
        // Hermitian two-point symmetry
        let d_1s = kernel.eval(&unit, &s).unwrap();
        let d_s1 = kernel.eval(&s, &unit).unwrap();
        assert!(max_abs_diff(&d_1s.adjoint(), &d_s1) < 1e-15);
    }

    #[test]
    fn dissipator_of_zero_map_is_mode_identity() {
        let sg = cyclic_group(3);
        let entries = (0..3)
            .map(|i| (Element::Index(i), ItoQuadruple::zero(1)))
            .collect();
        let model = GeneratorModel::table(sg, 1, entries).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let d = dissipator_of(&model, &Element::Index(i), &Element::Index(j)).unwrap();
                let expect =
                    CMatrix::from_row_slice(2, 2, &[cr(0.0), cr(0.0), cr(0.0), cr(1.0)]);
                assert_eq!(d, expect);
            }
        }
    }

    #[test]
    fn flat_symmetry_residual_detects_broken_tables() {
        let model = z2_scalar_model(0.0, -1.0);
        let sample = model.semigroup.all_elements().unwrap();
        assert!(flat_symmetry_residual(&model, &sample).unwrap() < 1e-15);

        // table on Z3 with mismatched scalars at mutually inverse elements
        let sg = cyclic_group(3);
        let broken = GeneratorModel::table(
            sg.clone(),
            0,
            vec![
                (Element::Index(0), ItoQuadruple::from_scalar(cr(0.0))),
                (Element::Index(1), ItoQuadruple::from_scalar(cr(1.0))),
                (Element::Index(2), ItoQuadruple::from_scalar(cr(2.0))),
            ],
        )
        .unwrap();
        let sample = sg.all_elements().unwrap();
        assert!(flat_symmetry_residual(&broken, &sample).unwrap() >= 1.0);
    }

    #[test]
    fn table_lookup_outside_table_errors() {
        let model = z2_scalar_model(0.0, -1.0);
        // valid element but only for a bigger group; rejected by validate
        assert!(germ_of(&model, &Element::Index(5)).is_err());
        let sparse = GeneratorModel::table(
            cyclic_group(3),
            0,
            vec![(Element::Index(0), ItoQuadruple::from_scalar(cr(0.0)))],
        )
        .unwrap();
        assert!(matches!(
            germ_of(&sparse, &Element::Index(1)),
            Err(Error::OutsideTable)
        ));
    }

    #[test]
    fn dissipator_identity_against_projector_form() {
        // Δ must agree with λ(x★z) − eλ(z) − λ(x★)e + eλ(1)e
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(17);
        let sg = cyclic_group(4);
        let n = 2;
        // random flat-symmetric table: α(y★) = flat(α(y))
        let a1 = ItoQuadruple::random(&mut rng, n);
        let mut a0 = ItoQuadruple::random(&mut rng, n);
        a0 = {
            // symmetrize the self-inverse elements 0 and 2
            let f = ito_flat(&a0);
            let h = crate::ito::embed_extended(&a0).matrix() * cr(0.5)
                + crate::ito::embed_extended(&f).matrix() * cr(0.5);
            crate::ito::ExtendedMatrix::try_new(h).unwrap().to_quadruple()
        };
        let mut a_self = ItoQuadruple::random(&mut rng, n);
        a_self = {
            let f = ito_flat(&a_self);
            let h = crate::ito::embed_extended(&a_self).matrix() * cr(0.5)
                + crate::ito::embed_extended(&f).matrix() * cr(0.5);
            crate::ito::ExtendedMatrix::try_new(h).unwrap().to_quadruple()
        };
        let model = GeneratorModel::table(
            sg.clone(),
            n,
            vec![
                (Element::Index(0), a0),
                (Element::Index(1), a1.clone()),
                (Element::Index(2), a_self),
                (Element::Index(3), ito_flat(&a1)),
            ],
        )
        .unwrap();
        let sample = sg.all_elements().unwrap();
        assert!(flat_symmetry_residual(&model, &sample).unwrap() < 1e-12);

        let e = e_projector(n);
        let d_unit = germ_of(&model, &sg.unit()).unwrap().matrix().clone();
        for x in &sample {
            for z in &sample {
                let direct = dissipator_of(&model, x, z).unwrap();
                let lam_xsz = germ_of(&model, &sg.star_compose(x, z).unwrap())
                    .unwrap()
                    .matrix()
                    .clone();
                let lam_z = germ_of(&model, z).unwrap().matrix().clone();
                let lam_xs = germ_of(&model, &sg.star(x).unwrap()).unwrap().matrix().clone();
                let via_projector = &lam_xsz - &e * &lam_z - &lam_xs * &e + &e * &d_unit * &e;
                assert!(max_abs_diff(&direct, &via_projector) < 1e-12);
            }
        }
    }
}
