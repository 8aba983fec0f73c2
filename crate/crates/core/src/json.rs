//! JSON wire formats.
//!
//! Complex numbers are encoded as [re, im] pairs, matrices as row-major
//! nested arrays, tensors as flat arrays with shape metadata.  Reports
//! are rendered with every float at 17 significant digits so that
//! identical runs produce byte-identical payloads.

use crate::birth::BirthSpec;
use crate::coherent::{CoherentFunction, KernelSpec};
use crate::cpd::CpdReport;
use crate::dilation::{DilationData, DilationResiduals, ModeData, PseudoHilbert};
use crate::germ::{GeneratorForm, GeneratorModel};
use crate::ito::ItoQuadruple;
use crate::linalg::{CMatrix, CRowVector, CVector, C64};
use crate::semigroup::{Element, FiniteGroup, NilpotentAlgebra, StarSemigroup};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;

pub type CxJson = [f64; 2];

pub fn cx_to_json(z: C64) -> CxJson {
    [z.re, z.im]
}

pub fn cx_from_json(v: CxJson) -> C64 {
    C64::new(v[0], v[1])
}

pub fn matrix_to_json(m: &CMatrix) -> Vec<Vec<CxJson>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| cx_to_json(m[(i, j)])).collect())
        .collect()
}

pub fn matrix_from_json(rows: &[Vec<CxJson>]) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Invalid("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| cx_from_json(rows[i][j])))
}

pub fn vector_to_json(v: &CVector) -> Vec<CxJson> {
    v.iter().map(|z| cx_to_json(*z)).collect()
}

pub fn vector_from_json(v: &[CxJson]) -> CVector {
    CVector::from_fn(v.len(), |i, _| cx_from_json(v[i]))
}

fn row_to_json(v: &CRowVector) -> Vec<CxJson> {
    v.iter().map(|z| cx_to_json(*z)).collect()
}

fn row_from_json(v: &[CxJson]) -> CRowVector {
    CRowVector::from_fn(v.len(), |_, j| cx_from_json(v[j]))
}

// ---------------------------------------------------------------- quadruple

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadrupleJson {
    pub n: usize,
    pub exchange: Vec<Vec<CxJson>>,
    pub creation: Vec<CxJson>,
    pub annihilation: Vec<CxJson>,
    pub scalar: CxJson,
}

pub fn quadruple_to_json(q: &ItoQuadruple) -> QuadrupleJson {
    QuadrupleJson {
        n: q.n_modes,
        exchange: matrix_to_json(&q.exchange),
        creation: vector_to_json(&q.creation),
        annihilation: row_to_json(&q.annihilation),
        scalar: cx_to_json(q.scalar),
    }
}

pub fn quadruple_from_json(j: &QuadrupleJson) -> Result<ItoQuadruple> {
    let mut exchange = matrix_from_json(&j.exchange)?;
    if j.n == 0 && exchange.nrows() == 0 {
        exchange = CMatrix::zeros(0, 0);
    }
    if exchange.nrows() != j.n {
        return Err(Error::ModeMismatch(exchange.nrows(), j.n));
    }
    ItoQuadruple::new(
        exchange,
        vector_from_json(&j.creation),
        row_from_json(&j.annihilation),
        cx_from_json(j.scalar),
    )
}

// ---------------------------------------------------------------- semigroup

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SemigroupJson {
    FiniteGroup {
        cayley: Vec<Vec<usize>>,
        star: Vec<usize>,
        unit: usize,
    },
    MatrixBall {
        dim: usize,
    },
    UnitalNilpotent {
        dim: usize,
        /// mul[i][j] = coefficient vector of e_i · e_j.
        mul: Vec<Vec<Vec<CxJson>>>,
        star_matrix: Vec<Vec<CxJson>>,
    },
}

pub fn semigroup_to_json(sg: &StarSemigroup) -> SemigroupJson {
    match sg {
        StarSemigroup::FiniteGroup(g) => SemigroupJson::FiniteGroup {
            cayley: g.cayley.clone(),
            star: g.star.clone(),
            unit: g.unit,
        },
        StarSemigroup::MatrixBall { dim } => SemigroupJson::MatrixBall { dim: *dim },
        StarSemigroup::UnitalNilpotent(a) => SemigroupJson::UnitalNilpotent {
            dim: a.dim,
            mul: a
                .mul
                .iter()
                .map(|row| row.iter().map(vector_to_json).collect())
                .collect(),
            star_matrix: matrix_to_json(&a.star_matrix),
        },
    }
}

pub fn semigroup_from_json(j: &SemigroupJson) -> Result<StarSemigroup> {
    match j {
        SemigroupJson::FiniteGroup { cayley, star, unit } => {
            let order = star.len();
            if order == 0 || *unit >= order || cayley.len() != order {
                return Err(Error::Invalid("inconsistent finite group tables".into()));
            }
            for row in cayley {
                if row.len() != order || row.iter().any(|&i| i >= order) {
                    return Err(Error::Invalid("cayley table out of range".into()));
                }
            }
            if star.iter().any(|&i| i >= order) {
                return Err(Error::Invalid("star table out of range".into()));
            }
            Ok(StarSemigroup::FiniteGroup(FiniteGroup {
                cayley: cayley.clone(),
                star: star.clone(),
                unit: *unit,
            }))
        }
        SemigroupJson::MatrixBall { dim } => {
            if *dim == 0 {
                return Err(Error::Invalid("ball dimension must be positive".into()));
            }
            Ok(StarSemigroup::MatrixBall { dim: *dim })
        }
        SemigroupJson::UnitalNilpotent {
            dim,
            mul,
            star_matrix,
        } => {
            if mul.len() != *dim || mul.iter().any(|r| r.len() != *dim) {
                return Err(Error::Invalid("structure constants shape mismatch".into()));
            }
            let mul: Vec<Vec<CVector>> = mul
                .iter()
                .map(|row| row.iter().map(|v| vector_from_json(v)).collect())
                .collect();
            for row in &mul {
                for v in row {
                    if v.len() != *dim {
                        return Err(Error::Invalid("structure constants shape mismatch".into()));
                    }
                }
            }
            let star_matrix = matrix_from_json(star_matrix)?;
            if star_matrix.nrows() != *dim || star_matrix.ncols() != *dim {
                return Err(Error::Invalid("star matrix shape mismatch".into()));
            }
            Ok(StarSemigroup::UnitalNilpotent(NilpotentAlgebra {
                dim: *dim,
                mul,
                star_matrix,
            }))
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ElementJson {
    Index { value: usize },
    Matrix { value: Vec<Vec<CxJson>> },
    Nilpotent { value: Vec<CxJson> },
}

pub fn element_to_json(e: &Element) -> ElementJson {
    match e {
        Element::Index(i) => ElementJson::Index { value: *i },
        Element::Matrix(m) => ElementJson::Matrix {
            value: matrix_to_json(m),
        },
        Element::Nilpotent(v) => ElementJson::Nilpotent {
            value: vector_to_json(v),
        },
    }
}

pub fn element_from_json(j: &ElementJson) -> Result<Element> {
    Ok(match j {
        ElementJson::Index { value } => Element::Index(*value),
        ElementJson::Matrix { value } => Element::Matrix(matrix_from_json(value)?),
        ElementJson::Nilpotent { value } => Element::Nilpotent(vector_from_json(value)),
    })
}

// ---------------------------------------------------------------- tensors

/// Flat tensor payload: `data` has length dim^order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TensorJson {
    pub order: usize,
    pub dim: usize,
    pub data: Vec<CxJson>,
}

fn tensor_to_json(v: &CVector, order: usize, dim: usize) -> TensorJson {
    TensorJson {
        order,
        dim,
        data: vector_to_json(v),
    }
}

fn tensor_from_json(t: &TensorJson) -> Result<CVector> {
    if t.data.len() != t.dim.pow(t.order as u32) {
        return Err(Error::Invalid(format!(
            "tensor of order {} over dimension {} must have {} entries, got {}",
            t.order,
            t.dim,
            t.dim.pow(t.order as u32),
            t.data.len()
        )));
    }
    Ok(vector_from_json(&t.data))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BirthSpecJson {
    pub base_dim: usize,
    pub k_max: usize,
    pub n_modes: usize,
    pub scalar_tensors: Vec<TensorJson>,
    pub mode_tensors: Vec<Vec<TensorJson>>,
    pub kappa: f64,
    pub kappa_modes: Vec<CxJson>,
}

pub fn birth_spec_to_json(s: &BirthSpec) -> BirthSpecJson {
    BirthSpecJson {
        base_dim: s.base_dim,
        k_max: s.k_max,
        n_modes: s.n_modes,
        scalar_tensors: s
            .scalar_tensors
            .iter()
            .enumerate()
            .map(|(k, t)| tensor_to_json(t, k + 1, s.base_dim))
            .collect(),
        mode_tensors: s
            .mode_tensors
            .iter()
            .map(|family| {
                family
                    .iter()
                    .enumerate()
                    .map(|(k, t)| tensor_to_json(t, k, s.base_dim))
                    .collect()
            })
            .collect(),
        kappa: s.kappa,
        kappa_modes: s.kappa_modes.iter().map(|z| cx_to_json(*z)).collect(),
    }
}

pub fn birth_spec_from_json(j: &BirthSpecJson) -> Result<BirthSpec> {
    let spec = BirthSpec {
        base_dim: j.base_dim,
        k_max: j.k_max,
        n_modes: j.n_modes,
        scalar_tensors: j
            .scalar_tensors
            .iter()
            .map(tensor_from_json)
            .collect::<Result<_>>()?,
        mode_tensors: j
            .mode_tensors
            .iter()
            .map(|family| family.iter().map(tensor_from_json).collect::<Result<_>>())
            .collect::<Result<_>>()?,
        kappa: j.kappa,
        kappa_modes: j.kappa_modes.iter().map(|v| cx_from_json(*v)).collect(),
    };
    spec.validate()?;
    Ok(spec)
}

// ---------------------------------------------------------------- dilation

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResidualsJson {
    pub representation: f64,
    pub cocycle: f64,
    pub coboundary: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModeDataJson {
    pub l_circ: Vec<Vec<CxJson>>,
    pub l_minus: Vec<CxJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DilationDataJson {
    pub k_dim: usize,
    pub d: CxJson,
    pub elements: Vec<ElementJson>,
    pub j: Vec<Vec<Vec<CxJson>>>,
    pub k: Vec<Vec<CxJson>>,
    pub l: Vec<CxJson>,
    pub modes: ModeDataJson,
    pub residuals: ResidualsJson,
}

pub fn dilation_to_json(d: &DilationData) -> DilationDataJson {
    DilationDataJson {
        k_dim: d.k_dim,
        d: cx_to_json(d.d),
        elements: d.elements.iter().map(element_to_json).collect(),
        j: d.j.iter().map(matrix_to_json).collect(),
        k: d.k.iter().map(vector_to_json).collect(),
        l: d.l.iter().map(|z| cx_to_json(*z)).collect(),
        modes: ModeDataJson {
            l_circ: d.modes.l_circ.iter().map(vector_to_json).collect(),
            l_minus: d.modes.l_minus.iter().map(|z| cx_to_json(*z)).collect(),
        },
        residuals: ResidualsJson {
            representation: d.residuals.representation,
            cocycle: d.residuals.cocycle,
            coboundary: d.residuals.coboundary,
        },
    }
}

pub fn dilation_from_json(j: &DilationDataJson) -> Result<DilationData> {
    let count = j.elements.len();
    if j.j.len() != count || j.k.len() != count || j.l.len() != count {
        return Err(Error::Invalid("dilation tables must share one length".into()));
    }
    let jmats: Vec<CMatrix> = j.j.iter().map(|m| matrix_from_json(m)).collect::<Result<_>>()?;
    let kvecs: Vec<CVector> = j.k.iter().map(|v| Ok(vector_from_json(v))).collect::<Result<_>>()?;
    for m in &jmats {
        if m.nrows() != j.k_dim || m.ncols() != j.k_dim {
            return Err(Error::Invalid("representation block shape mismatch".into()));
        }
    }
    for v in &kvecs {
        if v.len() != j.k_dim {
            return Err(Error::Invalid("cocycle vector shape mismatch".into()));
        }
    }
    for v in &j.modes.l_circ {
        if v.len() != j.k_dim {
            return Err(Error::Invalid("mode coupling shape mismatch".into()));
        }
    }
    Ok(DilationData {
        k_dim: j.k_dim,
        d: cx_from_json(j.d),
        elements: j
            .elements
            .iter()
            .map(element_from_json)
            .collect::<Result<_>>()?,
        j: jmats,
        k: kvecs,
        l: j.l.iter().map(|z| cx_from_json(*z)).collect(),
        modes: ModeData {
            l_circ: j.modes.l_circ.iter().map(|v| vector_from_json(v)).collect(),
            l_minus: j.modes.l_minus.iter().map(|z| cx_from_json(*z)).collect(),
        },
        residuals: DilationResiduals {
            representation: j.residuals.representation,
            cocycle: j.residuals.cocycle,
            coboundary: j.residuals.coboundary,
        },
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PseudoHilbertJson {
    pub e_dim: usize,
    pub k_dim: usize,
    pub n_modes: usize,
    pub d: CxJson,
    pub metric: Vec<Vec<CxJson>>,
    pub elements: Vec<ElementJson>,
    pub jmath: Vec<Vec<Vec<CxJson>>>,
    pub coupling: Vec<Vec<CxJson>>,
    pub flat_mult_residual: f64,
}

pub fn pseudo_hilbert_to_json(p: &PseudoHilbert) -> PseudoHilbertJson {
    PseudoHilbertJson {
        e_dim: p.e_dim,
        k_dim: p.k_dim,
        n_modes: p.n_modes,
        d: cx_to_json(p.d),
        metric: matrix_to_json(&p.metric),
        elements: p.elements.iter().map(element_to_json).collect(),
        jmath: p.jmath.iter().map(matrix_to_json).collect(),
        coupling: matrix_to_json(&p.coupling),
        flat_mult_residual: p.flat_mult_residual,
    }
}

// ---------------------------------------------------------------- model

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FormJson {
    Table {
        entries: Vec<(ElementJson, QuadrupleJson)>,
    },
    Dilated {
        data: DilationDataJson,
    },
    Birth {
        spec: BirthSpecJson,
    },
    ScalarPoisson {
        alpha: Vec<(ElementJson, CxJson)>,
        lambda: Vec<(ElementJson, CxJson)>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelJson {
    pub semigroup: SemigroupJson,
    pub n_modes: usize,
    pub form: FormJson,
}

pub fn model_to_json(m: &GeneratorModel) -> ModelJson {
    let form = match &m.form {
        GeneratorForm::Table(entries) => FormJson::Table {
            entries: entries
                .iter()
                .map(|(e, q)| (element_to_json(e), quadruple_to_json(q)))
                .collect(),
        },
        GeneratorForm::Dilated(d) => FormJson::Dilated {
            data: dilation_to_json(d),
        },
        GeneratorForm::Birth(s) => FormJson::Birth {
            spec: birth_spec_to_json(s),
        },
        GeneratorForm::ScalarPoisson(t) => FormJson::ScalarPoisson {
            alpha: t
                .alpha
                .iter()
                .map(|(e, v)| (element_to_json(e), cx_to_json(*v)))
                .collect(),
            lambda: t
                .lambda
                .iter()
                .map(|(e, v)| (element_to_json(e), cx_to_json(*v)))
                .collect(),
        },
    };
    ModelJson {
        semigroup: semigroup_to_json(&m.semigroup),
        n_modes: m.n_modes,
        form,
    }
}

pub fn model_from_json(j: &ModelJson) -> Result<GeneratorModel> {
    let semigroup = semigroup_from_json(&j.semigroup)?;
    match &j.form {
        FormJson::Table { entries } => {
            let entries = entries
                .iter()
                .map(|(e, q)| Ok((element_from_json(e)?, quadruple_from_json(q)?)))
                .collect::<Result<Vec<_>>>()?;
            GeneratorModel::table(semigroup, j.n_modes, entries)
        }
        FormJson::Dilated { data } => {
            GeneratorModel::dilated(semigroup, j.n_modes, dilation_from_json(data)?)
        }
        FormJson::Birth { spec } => {
            let spec = birth_spec_from_json(spec)?;
            if spec.n_modes != j.n_modes {
                return Err(Error::ModeMismatch(spec.n_modes, j.n_modes));
            }
            GeneratorModel::birth(spec)
        }
        FormJson::ScalarPoisson { alpha, lambda } => {
            let alpha = alpha
                .iter()
                .map(|(e, v)| Ok((element_from_json(e)?, cx_from_json(*v))))
                .collect::<Result<Vec<_>>>()?;
            let lambda = lambda
                .iter()
                .map(|(e, v)| Ok((element_from_json(e)?, cx_from_json(*v))))
                .collect::<Result<Vec<_>>>()?;
            GeneratorModel::scalar_poisson(semigroup, alpha, lambda)
        }
    }
}

pub fn model_from_str(s: &str) -> Result<GeneratorModel> {
    let parsed: ModelJson =
        serde_json::from_str(s).map_err(|e| Error::Invalid(format!("model JSON: {e}")))?;
    model_from_json(&parsed)
}

// ---------------------------------------------------------------- kernel spec

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoherentJson {
    /// [duration, value-array] segments.
    pub segments: Vec<(f64, Vec<CxJson>)>,
    pub tail: Vec<CxJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelPairJson {
    pub f: CoherentJson,
    pub y: ElementJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KernelSpecJson {
    pub t: f64,
    pub pairs: Vec<KernelPairJson>,
}

pub fn coherent_to_json(f: &CoherentFunction) -> CoherentJson {
    CoherentJson {
        segments: f
            .segments
            .iter()
            .map(|(d, v)| (*d, vector_to_json(v)))
            .collect(),
        tail: vector_to_json(&f.tail),
    }
}

pub fn coherent_from_json(j: &CoherentJson) -> Result<CoherentFunction> {
    CoherentFunction::new(
        j.segments
            .iter()
            .map(|(d, v)| (*d, vector_from_json(v)))
            .collect(),
        vector_from_json(&j.tail),
    )
}

pub fn kernel_spec_to_json(s: &KernelSpec) -> KernelSpecJson {
    KernelSpecJson {
        t: s.t,
        pairs: s
            .pairs
            .iter()
            .map(|(f, y)| KernelPairJson {
                f: coherent_to_json(f),
                y: element_to_json(y),
            })
            .collect(),
    }
}

pub fn kernel_spec_from_json(j: &KernelSpecJson) -> Result<KernelSpec> {
    Ok(KernelSpec {
        t: j.t,
        pairs: j
            .pairs
            .iter()
            .map(|p| Ok((coherent_from_json(&p.f)?, element_from_json(&p.y)?)))
            .collect::<Result<_>>()?,
    })
}

pub fn kernel_spec_from_str(s: &str) -> Result<KernelSpec> {
    let parsed: KernelSpecJson =
        serde_json::from_str(s).map_err(|e| Error::Invalid(format!("kernel spec JSON: {e}")))?;
    kernel_spec_from_json(&parsed)
}

// ---------------------------------------------------------------- reports

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CpdReportJson {
    pub verdict: bool,
    pub min_eigenvalue: f64,
    pub scale: f64,
    pub tolerance: f64,
    pub hermiticity_residual: f64,
    pub witness: Vec<CxJson>,
    pub sample: Vec<ElementJson>,
}

pub fn cpd_report_to_json(r: &CpdReport) -> CpdReportJson {
    CpdReportJson {
        verdict: r.verdict,
        min_eigenvalue: r.min_eigenvalue,
        scale: r.scale,
        tolerance: r.tolerance,
        hermiticity_residual: r.hermiticity_residual,
        witness: vector_to_json(&r.witness),
        sample: r.sample.iter().map(element_to_json).collect(),
    }
}

// ---------------------------------------------------------------- rendering

struct SciFormatter;

impl serde_json::ser::Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        if value.is_finite() {
            // 17 significant digits round-trip every double exactly
            write!(writer, "{:.16e}", value)
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()>
    where
        W: ?Sized + Write,
    {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes with every float at 17 significant digits; identical inputs
/// give byte-identical output.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciFormatter);
    value.serialize(&mut ser).expect("serializable report");
    String::from_utf8(out).expect("json is utf8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cr;
    use crate::semigroup::cyclic_group;

    #[test]
    fn quadruple_round_trip() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(19);
        for n in 0..4 {
            let q = ItoQuadruple::random(&mut rng, n);
            let j = quadruple_to_json(&q);
            let text = serde_json::to_string(&j).unwrap();
            let back: QuadrupleJson = serde_json::from_str(&text).unwrap();
            assert_eq!(quadruple_from_json(&back).unwrap(), q);
        }
    }

    #[test]
    fn complex_encoding_is_re_im_pairs() {
        let j = quadruple_to_json(&ItoQuadruple::from_scalar(crate::linalg::cx(1.5, -2.0)));
        let text = serde_json::to_string(&j).unwrap();
        assert!(text.contains("\"scalar\":[1.5,-2.0]"));
    }

    #[test]
    fn model_round_trip_table_and_poisson() {
        let sg = cyclic_group(2);
        let model = GeneratorModel::table(
            sg.clone(),
            0,
            vec![
                (Element::Index(0), ItoQuadruple::from_scalar(cr(0.0))),
                (Element::Index(1), ItoQuadruple::from_scalar(cr(-1.0))),
            ],
        )
        .unwrap();
        let text = serde_json::to_string(&model_to_json(&model)).unwrap();
        let back = model_from_str(&text).unwrap();
        let g = crate::germ::germ_of(&back, &Element::Index(1)).unwrap();
        assert_eq!(g.scalar(), cr(-1.0));

        let poisson = GeneratorModel::scalar_poisson(
            sg,
            vec![(Element::Index(0), cr(1.0)), (Element::Index(1), cr(0.5))],
            vec![(Element::Index(0), cr(-1.0)), (Element::Index(1), cr(0.0))],
        )
        .unwrap();
        let text = serde_json::to_string(&model_to_json(&poisson)).unwrap();
        let back = model_from_str(&text).unwrap();
        assert_eq!(
            back.poisson_values(&Element::Index(1)).unwrap(),
            (cr(0.5), cr(0.0))
        );
    }

    #[test]
    fn birth_spec_round_trip_checks_shapes() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(23);
        let spec = crate::birth::random_birth_spec(&mut rng, 2, 2, 1, true);
        let j = birth_spec_to_json(&spec);
        let text = serde_json::to_string(&j).unwrap();
        let back: BirthSpecJson = serde_json::from_str(&text).unwrap();
        assert_eq!(birth_spec_from_json(&back).unwrap(), spec);

        let mut broken = birth_spec_to_json(&spec);
        broken.scalar_tensors[0].data.pop();
        assert!(birth_spec_from_json(&broken).is_err());
    }

    #[test]
    fn dilated_model_round_trip_preserves_germ() {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(29);
        let model = crate::dilation::random_dilated_model(
            crate::dilation::GroupFamily::Cyclic(5),
            2,
            1,
            &mut rng,
        );
        let text = serde_json::to_string(&model_to_json(&model)).unwrap();
        let back = model_from_str(&text).unwrap();
        for i in 0..5 {
            let a = crate::germ::germ_of(&model, &Element::Index(i)).unwrap();
            let b = crate::germ::germ_of(&back, &Element::Index(i)).unwrap();
            assert!(crate::linalg::max_abs_diff(a.matrix(), b.matrix()) < 1e-15);
        }
    }

    #[test]
    fn kernel_spec_round_trip() {
        let f = CoherentFunction::new(
            vec![(0.5, vector_from_json(&[[1.0, 0.0]]))],
            vector_from_json(&[[0.0, 2.0]]),
        )
        .unwrap();
        let spec = KernelSpec {
            t: 1.0,
            pairs: vec![(f, Element::Index(0))],
        };
        let text = serde_json::to_string(&kernel_spec_to_json(&spec)).unwrap();
        let back = kernel_spec_from_str(&text).unwrap();
        assert_eq!(back.t, 1.0);
        assert_eq!(back.pairs[0].0.segments.len(), 1);
    }

    #[test]
    fn canonical_rendering_is_deterministic_and_17_digits() {
        #[derive(Serialize)]
        struct Sample {
            x: f64,
            y: f64,
        }
        let a = to_canonical_json(&Sample { x: 1.0, y: 1.0 / 3.0 });
        let b = to_canonical_json(&Sample { x: 1.0, y: 1.0 / 3.0 });
        assert_eq!(a, b);
        assert!(a.contains("1.0000000000000000e0"));
        assert!(a.contains("3.3333333333333331e-1"));
        // parse back exactly
        let parsed: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert_eq!(parsed["y"].as_f64().unwrap(), 1.0 / 3.0);
    }
}
