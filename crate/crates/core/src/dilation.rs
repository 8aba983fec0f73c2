//! Constructive dilation of a conditionally positive germ: Gram
//! factorization of the coboundary data into (K, j, k, l), assembly of the
//! pseudo-Hilbert representation on ℂ ⊕ K ⊕ ℂ, and verification that the
//! representation reproduces the germ.

use crate::cpd::{cpd_check, DEFAULT_TOL};
use crate::germ::{check_d_sign, germ_of, GeneratorModel};
use crate::linalg::{
    ceye, cr, hermitize, lstsq, max_abs, max_abs_diff, pseudo_inverse, random_cvector,
    random_unitary, CMatrix, CVector, C64,
};
use crate::semigroup::{cyclic_group, quaternion_group, Element, StarSemigroup};
use crate::{Error, Result};
use rand::Rng;

/// Default eigenvalue cutoff relative to the top Gram eigenvalue.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Default cap on star-and-product closure of input samples.
pub const DEFAULT_CLOSURE_CAP: usize = 512;
/// Residuals above this bound fail the construction outright.
pub const RESIDUAL_BOUND: f64 = 1e-6;
/// Pair count beyond which residual scans subsample the index range.
const RESIDUAL_PAIR_CAP: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DilationResiduals {
    /// max ‖j(x★z) − j(x)†j(z)‖.
    pub representation: f64,
    /// max ‖k(x★z) − j(x)†k(z) − k(x★)‖.
    pub cocycle: f64,
    /// max |l(x★z) − l(z) − l(x★) − k(x)†k(z)|.
    pub coboundary: f64,
}

impl DilationResiduals {
    pub fn max(&self) -> f64 {
        self.representation.max(self.cocycle).max(self.coboundary)
    }
}

/// Mode coupling data: one vector L_n^∘ ∈ K and one scalar L_n^- per mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeData {
    pub l_circ: Vec<CVector>,
    pub l_minus: Vec<C64>,
}

impl ModeData {
    pub fn empty() -> Self {
        ModeData {
            l_circ: Vec::new(),
            l_minus: Vec::new(),
        }
    }
}

/// The representation triple (j, k, l) on K = ℂ^k_dim over a star-closed
/// element sample, with the unit value d and the mode couplings.
#[derive(Debug, Clone)]
pub struct DilationData {
    pub k_dim: usize,
    pub d: C64,
    pub elements: Vec<Element>,
    pub j: Vec<CMatrix>,
    pub k: Vec<CVector>,
    pub l: Vec<C64>,
    pub modes: ModeData,
    pub residuals: DilationResiduals,
}

impl DilationData {
    pub fn index_of(&self, sg: &StarSemigroup, y: &Element) -> Result<usize> {
        self.elements
            .iter()
            .position(|e| sg.elements_equal(e, y))
            .ok_or(Error::OutsideTable)
    }
}

/// The assembled pseudo-Hilbert representation on E = ℂ ⊕ K ⊕ ℂ: the
/// indefinite metric, the block representation per element, and the
/// coupling matrix from the (time, modes) space into E.
#[derive(Debug, Clone)]
pub struct PseudoHilbert {
    pub e_dim: usize,
    pub k_dim: usize,
    pub n_modes: usize,
    pub d: C64,
    /// Metric G = [[0,0,1],[0,I,0],[1,0,d]] over (−, ∘, +).
    pub metric: CMatrix,
    pub elements: Vec<Element>,
    /// Block matrices [[1, k(y★)†, l(y)],[0, j(y), k(y)],[0,0,1]].
    pub jmath: Vec<CMatrix>,
    /// E_dim × (1+n) coupling with columns (time, modes).
    pub coupling: CMatrix,
    /// max over sampled pairs of ‖ȷ(x★z) − ȷ(x)♭ȷ(z)‖.
    pub flat_mult_residual: f64,
}

impl PseudoHilbert {
    pub fn index_of(&self, sg: &StarSemigroup, y: &Element) -> Result<usize> {
        self.elements
            .iter()
            .position(|e| sg.elements_equal(e, y))
            .ok_or(Error::OutsideTable)
    }

    pub fn metric_inverse(&self) -> CMatrix {
        let n = self.e_dim;
        let mut g_inv = CMatrix::zeros(n, n);
        g_inv[(0, 0)] = -self.d;
        g_inv[(0, n - 1)] = cr(1.0);
        g_inv[(n - 1, 0)] = cr(1.0);
        for i in 1..n - 1 {
            g_inv[(i, i)] = cr(1.0);
        }
        g_inv
    }

    /// Pseudo-adjoint A♭ = G⁻¹ A† G.
    pub fn flat(&self, a: &CMatrix) -> CMatrix {
        self.metric_inverse() * a.adjoint() * &self.metric
    }
}

/// Closes a sample under star and pairwise products, unit first; errors
/// when the closure exceeds `cap`.
pub fn close_sample(sg: &StarSemigroup, elems: &[Element], cap: usize) -> Result<Vec<Element>> {
    let mut closed: Vec<Element> = vec![sg.unit()];
    let push = |closed: &mut Vec<Element>, e: Element| -> Result<bool> {
        if closed.iter().any(|x| sg.elements_equal(x, &e)) {
            return Ok(false);
        }
        if closed.len() >= cap {
            return Err(Error::ClosureCapExceeded(cap));
        }
        closed.push(e);
        Ok(true)
    };
    for e in elems {
        sg.validate(e)?;
        push(&mut closed, e.clone())?;
    }
    loop {
        let mut grew = false;
        let snapshot = closed.clone();
        for e in &snapshot {
            grew |= push(&mut closed, sg.star(e)?)?;
        }
        let snapshot = closed.clone();
        for a in &snapshot {
            for b in &snapshot {
                grew |= push(&mut closed, sg.compose(a, b)?)?;
            }
        }
        if !grew {
            return Ok(closed);
        }
    }
}

fn residual_indices(count: usize) -> Vec<usize> {
    (0..count.min(RESIDUAL_PAIR_CAP)).collect()
}

fn compute_residuals(
    sg: &StarSemigroup,
    elements: &[Element],
    j: &[CMatrix],
    k: &[CVector],
    l: &[C64],
) -> Result<DilationResiduals> {
    let find = |y: &Element| -> Result<usize> {
        elements
            .iter()
            .position(|e| sg.elements_equal(e, y))
            .ok_or(Error::OutsideTable)
    };
    let idxs = residual_indices(elements.len());
    let mut rep = 0.0f64;
    let mut coc = 0.0f64;
    let mut cob = 0.0f64;
    for &xi in &idxs {
        let x = &elements[xi];
        let xs = find(&sg.star(x)?)?;
        for &zi in &idxs {
            let z = &elements[zi];
            let xz = find(&sg.star_compose(x, z)?)?;
            rep = rep.max(max_abs_diff(&j[xz], &(j[xi].adjoint() * &j[zi])));
            let coc_vec = &k[xz] - j[xi].adjoint() * &k[zi] - &k[xs];
            coc = coc.max(coc_vec.iter().map(|c| c.norm()).fold(0.0, f64::max));
            let gram = k[xi].dotc(&k[zi]);
            cob = cob.max((l[xz] - l[zi] - l[xs] - gram).norm());
        }
    }
    Ok(DilationResiduals {
        representation: rep,
        cocycle: coc,
        coboundary: cob,
    })
}

/// Gram matrix l(x★z) − l(x★) − l(z) of the scalar germ over a sample.
pub fn gram_matrix(model: &GeneratorModel, sample: &[Element]) -> Result<CMatrix> {
    let sg = &model.semigroup;
    let d = germ_of(model, &sg.unit())?.scalar();
    let l_of = |y: &Element| -> Result<C64> { Ok(germ_of(model, y)?.scalar() - d) };
    let count = sample.len();
    let mut gram = CMatrix::zeros(count, count);
    for (i, x) in sample.iter().enumerate() {
        let l_xs = l_of(&sg.star(x)?)?;
        for (j, z) in sample.iter().enumerate() {
            gram[(i, j)] = l_of(&sg.star_compose(x, z)?)? - l_xs - l_of(z)?;
        }
    }
    Ok(gram)
}

/// Builds (K, j, k, l) from a conditionally positive model over a sample.
///
/// The sample is star-and-product closed first (cap
/// [`DEFAULT_CLOSURE_CAP`]); the scalar coboundary l = λ − d is Gram
/// factorized with the eigenvalue cutoff `rank_tol` relative to the top
/// eigenvalue, j is solved in least squares on the span of the cocycle
/// vectors and completed by the identity on its complement, and the mode
/// couplings are fitted from the annihilation row of the germ.
pub fn build_dilation(
    model: &GeneratorModel,
    sample: &[Element],
    rank_tol: f64,
) -> Result<DilationData> {
    let sg = &model.semigroup;
    let closed = close_sample(sg, sample, DEFAULT_CLOSURE_CAP)?;
    let report = cpd_check(model, &closed, DEFAULT_TOL)?;
    if !report.verdict {
        return Err(Error::NotCpd(report.min_eigenvalue));
    }
    let d = germ_of(model, &sg.unit())?.scalar();
    check_d_sign(d);
    let count = closed.len();
    let l: Vec<C64> = closed
        .iter()
        .map(|y| Ok(germ_of(model, y)?.scalar() - d))
        .collect::<Result<_>>()?;

    let gram = hermitize(&gram_matrix(model, &closed)?);
    let eig = gram.symmetric_eigen();
    let top = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cutoff = rank_tol * top.max(1.0);
    for ev in eig.eigenvalues.iter() {
        if *ev < -cutoff.max(DEFAULT_TOL * top.max(1.0)) {
            return Err(Error::GramNotPsd(*ev));
        }
    }
    let kept: Vec<usize> = (0..count)
        .filter(|&i| eig.eigenvalues[i] > cutoff)
        .collect();
    let k_dim = kept.len();
    // coordinates k(y_j)[a] = sqrt(mu_a) conj(V[j][a])
    let k: Vec<CVector> = (0..count)
        .map(|jdx| {
            CVector::from_fn(k_dim, |a, _| {
                let col = kept[a];
                eig.eigenvectors[(jdx, col)].conj() * cr(eig.eigenvalues[col].sqrt())
            })
        })
        .collect();

    // j(x)† on span{k(z)}: j(x)† K = [k(x★z) − k(x★)], identity on the rest
    let k_span = CMatrix::from_fn(k_dim, count, |a, z| k[z][a]);
    let k_pinv = pseudo_inverse(&k_span, 1e-13);
    let projector = &k_span * &k_pinv;
    let complement = ceye(k_dim) - &projector;
    let find = |y: &Element| -> Result<usize> {
        closed
            .iter()
            .position(|e| sg.elements_equal(e, y))
            .ok_or(Error::OutsideTable)
    };
    let mut j: Vec<CMatrix> = Vec::with_capacity(count);
    for x in &closed {
        let xs = find(&sg.star(x)?)?;
        let mut rhs = CMatrix::zeros(k_dim, count);
        for (zi, z) in closed.iter().enumerate() {
            let xz = find(&sg.star_compose(x, z)?)?;
            let col = &k[xz] - &k[xs];
            for a in 0..k_dim {
                rhs[(a, zi)] = col[a];
            }
        }
        let j_adj = &rhs * &k_pinv + &complement;
        j.push(j_adj.adjoint());
    }

    // mode couplings from the annihilation row: λ_n(y★) = k(y)†L_n^∘ + L_n^-
    let n_modes = model.n_modes;
    let mut l_circ = Vec::with_capacity(n_modes);
    let mut l_minus = Vec::with_capacity(n_modes);
    if n_modes > 0 {
        let mut design = CMatrix::zeros(count, k_dim + 1);
        for (yi, _) in closed.iter().enumerate() {
            for a in 0..k_dim {
                design[(yi, a)] = k[yi][a].conj();
            }
            design[(yi, k_dim)] = cr(1.0);
        }
        for mode in 0..n_modes {
            let mut rhs = CMatrix::zeros(count, 1);
            for (yi, y) in closed.iter().enumerate() {
                let germ_at_star = germ_of(model, &sg.star(y)?)?;
                rhs[(yi, 0)] = germ_at_star.matrix()[(0, 1 + mode)];
            }
            let sol = lstsq(&design, &rhs, 1e-13);
            l_circ.push(CVector::from_fn(k_dim, |a, _| sol[(a, 0)]));
            l_minus.push(sol[(k_dim, 0)]);
        }
    }

    let residuals = compute_residuals(sg, &closed, &j, &k, &l)?;
    for (name, value) in [
        ("representation", residuals.representation),
        ("cocycle", residuals.cocycle),
        ("coboundary", residuals.coboundary),
    ] {
        if value > RESIDUAL_BOUND {
            return Err(Error::ResidualExceeded { name, value });
        }
    }
    Ok(DilationData {
        k_dim,
        d,
        elements: closed,
        j,
        k,
        l,
        modes: ModeData { l_circ, l_minus },
        residuals,
    })
}

/// Assembles the metric, the block representation, and the coupling from
/// dilation data, and measures its flat-multiplicativity.
pub fn assemble_pseudo_hilbert(dd: &DilationData, model: &GeneratorModel) -> Result<PseudoHilbert> {
    if dd.residuals.max() > RESIDUAL_BOUND {
        return Err(Error::ResidualExceeded {
            name: "input",
            value: dd.residuals.max(),
        });
    }
    let sg = &model.semigroup;
    let k_dim = dd.k_dim;
    let e_dim = k_dim + 2;
    let mut metric = CMatrix::zeros(e_dim, e_dim);
    metric[(0, e_dim - 1)] = cr(1.0);
    metric[(e_dim - 1, 0)] = cr(1.0);
    for i in 1..=k_dim {
        metric[(i, i)] = cr(1.0);
    }
    metric[(e_dim - 1, e_dim - 1)] = dd.d;

    let mut jmath = Vec::with_capacity(dd.elements.len());
    for (yi, y) in dd.elements.iter().enumerate() {
        let ys = dd.index_of(sg, &sg.star(y)?)?;
        let mut m = ceye(e_dim);
        for a in 0..k_dim {
            m[(0, 1 + a)] = dd.k[ys][a].conj();
            m[(1 + a, e_dim - 1)] = dd.k[yi][a];
            for b in 0..k_dim {
                m[(1 + a, 1 + b)] = dd.j[yi][(a, b)];
            }
        }
        m[(0, e_dim - 1)] = dd.l[yi];
        jmath.push(m);
    }

    let n_modes = model.n_modes;
    let mut coupling = CMatrix::zeros(e_dim, 1 + n_modes);
    coupling[(e_dim - 1, 0)] = cr(1.0);
    for mode in 0..n_modes {
        coupling[(0, 1 + mode)] = dd.modes.l_minus[mode];
        for a in 0..k_dim {
            coupling[(1 + a, 1 + mode)] = dd.modes.l_circ[mode][a];
        }
    }

    let mut ph = PseudoHilbert {
        e_dim,
        k_dim,
        n_modes,
        d: dd.d,
        metric,
        elements: dd.elements.clone(),
        jmath,
        coupling,
        flat_mult_residual: 0.0,
    };

    let idxs = residual_indices(ph.elements.len());
    let mut worst = 0.0f64;
    for &xi in &idxs {
        for &zi in &idxs {
            let xz = ph.index_of(sg, &sg.star_compose(&ph.elements[xi], &ph.elements[zi])?)?;
            let flat_prod = ph.flat(&ph.jmath[xi]) * &ph.jmath[zi];
            worst = worst.max(max_abs_diff(&ph.jmath[xz], &flat_prod));
        }
    }
    ph.flat_mult_residual = worst;
    Ok(ph)
}

/// Max over the sample of ‖L♭ȷ(y)L − λ(y)‖ with L♭ = L†G.
pub fn reconstruction_residual(
    ph: &PseudoHilbert,
    model: &GeneratorModel,
    sample: &[Element],
) -> Result<f64> {
    let l_flat = ph.coupling.adjoint() * &ph.metric;
    let mut worst = 0.0f64;
    for y in sample {
        let yi = ph.index_of(&model.semigroup, y)?;
        let rebuilt = &l_flat * &ph.jmath[yi] * &ph.coupling;
        let germ = germ_of(model, y)?;
        worst = worst.max(max_abs_diff(&rebuilt, germ.matrix()));
    }
    Ok(worst)
}

/// Birth decomposition λ = φ − κ read off at the zero element.
#[derive(Debug, Clone)]
pub struct BirthDecomposition {
    /// [[κ, κ_•],[κ_•†, 0]].
    pub kappa: CMatrix,
    pub phi: Vec<(Element, CMatrix)>,
    /// How far the κ-affected blocks of φ are from vanishing at zero.
    pub zero_residual: f64,
    /// Mode block of the germ at zero (legitimately nonzero: the
    /// order-zero tensor Gram).
    pub exchange_at_zero: CMatrix,
    pub psd_report: crate::cpd::CpdReport,
}

/// Splits a germ over an operator ball into its birth map and κ shift:
/// κ collects the negated scalar and boundary rows of λ(0) (the exchange
/// block of κ is zero), and φ(y) = λ(y) + κ is verified to vanish at zero
/// on the shifted blocks and to be positive definite blockwise over the
/// sample.
pub fn birth_decomposition(
    model: &GeneratorModel,
    sample: &[Element],
) -> Result<BirthDecomposition> {
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    let sg = &model.semigroup;
    let zero = sg.zero().ok_or(Error::NoZeroElement)?;
    let germ_zero = germ_of(model, &zero)?;
    let n = model.n_modes;
    let mut kappa = CMatrix::zeros(1 + n, 1 + n);
    kappa[(0, 0)] = -germ_zero.scalar();
    for a in 0..n {
        kappa[(0, 1 + a)] = -germ_zero.matrix()[(0, 1 + a)];
        kappa[(1 + a, 0)] = -germ_zero.matrix()[(0, 1 + a)].conj();
    }

    let phi_of = |y: &Element| -> Result<CMatrix> { Ok(germ_of(model, y)?.matrix() + &kappa) };

    let phi_zero = phi_of(&zero)?;
    let mut zero_residual = phi_zero[(0, 0)].norm();
    for a in 0..n {
        zero_residual = zero_residual
            .max(phi_zero[(0, 1 + a)].norm())
            .max(phi_zero[(1 + a, 0)].norm());
    }
    let exchange_at_zero = germ_zero.mode_block();

    let phi: Vec<(Element, CMatrix)> = sample
        .iter()
        .map(|y| Ok((y.clone(), phi_of(y)?)))
        .collect::<Result<_>>()?;

    let block = 1 + n;
    let count = sample.len();
    let mut big = CMatrix::zeros(count * block, count * block);
    for (i, x) in sample.iter().enumerate() {
        for (k, z) in sample.iter().enumerate() {
            let m = phi_of(&sg.star_compose(x, z)?)?;
            for a in 0..block {
                for b in 0..block {
                    big[(i * block + a, k * block + b)] = m[(a, b)];
                }
            }
        }
    }
    let psd_report = crate::cpd::psd_report(&big, DEFAULT_TOL, sample.to_vec());

    Ok(BirthDecomposition {
        kappa,
        phi,
        zero_residual,
        exchange_at_zero,
        psd_report,
    })
}

/// Which finite group a random dilated model lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupFamily {
    Cyclic(usize),
    Quaternion,
}

fn cyclic_rep_blocks<R: Rng + ?Sized>(rng: &mut R, m: usize, k_dim: usize) -> Vec<CMatrix> {
    // characters a ↦ ω^{r a}; at least one nontrivial exponent
    let mut exps: Vec<usize> = (0..k_dim).map(|_| rng.random_range(0..m)).collect();
    if exps.iter().all(|&r| r == 0) {
        exps[0] = 1 + rng.random_range(0..m.saturating_sub(1).max(1));
    }
    let omega = |r: usize, a: usize| {
        let theta = std::f64::consts::TAU * (r * a % m) as f64 / m as f64;
        C64::new(theta.cos(), theta.sin())
    };
    (0..m)
        .map(|a| CMatrix::from_fn(k_dim, k_dim, |i, j| {
            if i == j {
                omega(exps[i], a)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
        .collect()
}

fn quaternion_rep_blocks<R: Rng + ?Sized>(rng: &mut R, k_dim: usize) -> Vec<CMatrix> {
    let i = C64::new(0.0, 1.0);
    let one = cr(1.0);
    // the 2-dimensional irreducible representation on (1, −1, i, −i, j, −j, k, −k)
    let two_dim: Vec<CMatrix> = {
        let r1 = ceye(2);
        let ri = CMatrix::from_row_slice(2, 2, &[i, cr(0.0), cr(0.0), -i]);
        let rj = CMatrix::from_row_slice(2, 2, &[cr(0.0), one, -one, cr(0.0)]);
        let rk = CMatrix::from_row_slice(2, 2, &[cr(0.0), i, i, cr(0.0)]);
        vec![
            r1.clone(),
            -r1,
            ri.clone(),
            -ri,
            rj.clone(),
            -rj,
            rk.clone(),
            -rk,
        ]
    };
    // sign characters: trivial on ±1, signs (ε, δ, εδ) on the axes
    let character = |eps: f64, del: f64| -> Vec<CMatrix> {
        let values = [1.0, 1.0, eps, eps, del, del, eps * del, eps * del];
        values
            .iter()
            .map(|v| CMatrix::from_row_slice(1, 1, &[cr(*v)]))
            .collect()
    };
    let characters = [
        character(1.0, -1.0),
        character(-1.0, 1.0),
        character(-1.0, -1.0),
    ];
    let pick_char = |rng: &mut R| characters[rng.random_range(0..characters.len())].clone();
    let blocks: Vec<Vec<CMatrix>> = match k_dim {
        1 => vec![pick_char(rng)],
        2 => {
            if rng.random::<bool>() {
                vec![two_dim]
            } else {
                vec![pick_char(rng), pick_char(rng)]
            }
        }
        _ => {
            if rng.random::<bool>() {
                vec![two_dim, pick_char(rng)]
            } else {
                vec![pick_char(rng), pick_char(rng), pick_char(rng)]
            }
        }
    };
    (0..8)
        .map(|el| {
            let mut m = CMatrix::zeros(k_dim, k_dim);
            let mut off = 0;
            for b in &blocks {
                let d = b[el].nrows();
                for a in 0..d {
                    for c in 0..d {
                        m[(off + a, off + c)] = b[el][(a, c)];
                    }
                }
                off += d;
            }
            m
        })
        .collect()
}

/// Random conditionally positive model in dilated form: a random unitary
/// group representation of dimension `k_dim`, a coboundary cocycle
/// k = (j − 1)ς with l = ς†jς − ς†ς, a nonpositive d, and Gaussian mode
/// couplings.
pub fn random_dilated_model<R: Rng + ?Sized>(
    family: GroupFamily,
    k_dim: usize,
    n_modes: usize,
    rng: &mut R,
) -> GeneratorModel {
    assert!(k_dim >= 1);
    let (sg, rep) = match family {
        GroupFamily::Cyclic(m) => (cyclic_group(m), cyclic_rep_blocks(rng, m, k_dim)),
        GroupFamily::Quaternion => (quaternion_group(), quaternion_rep_blocks(rng, k_dim)),
    };
    let u = random_unitary(rng, k_dim);
    let j: Vec<CMatrix> = rep.iter().map(|r| &u * r * u.adjoint()).collect();
    let sigma = random_cvector(rng, k_dim);
    let k: Vec<CVector> = j.iter().map(|jy| jy * &sigma - &sigma).collect();
    let l: Vec<C64> = j
        .iter()
        .map(|jy| sigma.dotc(&(jy * &sigma)) - cr(sigma.norm_squared()))
        .collect();
    let d = cr(-rng.random::<f64>());
    // mode couplings live in the span of the cocycle vectors: that span is
    // the dilation space the germ determines, so couplings outside it
    // could never be recovered from germ data
    let span_combination = |rng: &mut R, k: &[CVector]| {
        let mut v = CVector::zeros(k_dim);
        for vec in k {
            v += vec * crate::linalg::complex_gaussian(rng);
        }
        v
    };
    let modes = ModeData {
        l_circ: (0..n_modes).map(|_| span_combination(rng, &k)).collect(),
        l_minus: (0..n_modes)
            .map(|_| crate::linalg::complex_gaussian(rng))
            .collect(),
    };
    let elements = sg.all_elements().expect("finite group");
    let residuals = compute_residuals(&sg, &elements, &j, &k, &l).expect("closed table");
    let data = DilationData {
        k_dim,
        d,
        elements,
        j,
        k,
        l,
        modes,
        residuals,
    };
    GeneratorModel::dilated(sg, n_modes, data).expect("consistent mode data")
}

/// Sorted Hermitian Gram spectrum of a model over a sample.
pub fn gram_spectrum(model: &GeneratorModel, sample: &[Element]) -> Result<Vec<f64>> {
    Ok(crate::linalg::hermitian_eigenvalues(&gram_matrix(
        model, sample,
    )?))
}

/// Convenience scale of a germ table over a sample (largest germ entry).
pub fn germ_scale(model: &GeneratorModel, sample: &[Element]) -> Result<f64> {
    let mut scale = 0.0f64;
    for y in sample {
        scale = scale.max(max_abs(germ_of(model, y)?.matrix()));
    }
    Ok(scale)
}
