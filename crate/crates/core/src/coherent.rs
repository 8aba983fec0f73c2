//! Coherent-vector matrix elements of the stochastic exponent.
//!
//! For piecewise-constant test functions the log of the normalized matrix
//! element is the segment-exact integral of the sesquilinear germ form
//! ⟨(1, f(s)) | λ(y) | (1, h(s))⟩, so no ODE solver error ever enters a
//! positivity verdict.

use crate::cpd::{psd_report, CpdReport};
use crate::germ::{germ_of, GeneratorModel, GermMatrix};
use crate::linalg::{cr, hermiticity_residual, max_abs, CMatrix, CVector, C64};
use crate::semigroup::Element;
use crate::{Error, Result};

/// Piecewise-constant test function: timed segments followed by a
/// constant tail.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentFunction {
    /// (duration, value) segments; durations strictly positive.
    pub segments: Vec<(f64, CVector)>,
    /// Value on the remaining half-line.
    pub tail: CVector,
}

impl CoherentFunction {
    pub fn constant(value: CVector) -> Self {
        CoherentFunction {
            segments: Vec::new(),
            tail: value,
        }
    }

    pub fn new(segments: Vec<(f64, CVector)>, tail: CVector) -> Result<Self> {
        let n = tail.len();
        for (dur, v) in &segments {
            if !(*dur > 0.0) {
                return Err(Error::Invalid(format!(
                    "segment durations must be positive, got {dur}"
                )));
            }
            if v.len() != n {
                return Err(Error::ModeMismatch(v.len(), n));
            }
        }
        Ok(CoherentFunction { segments, tail })
    }

    pub fn n_modes(&self) -> usize {
        self.tail.len()
    }

    pub fn value_at(&self, s: f64) -> &CVector {
        let mut cum = 0.0;
        for (dur, v) in &self.segments {
            cum += dur;
            if s < cum {
                return v;
            }
        }
        &self.tail
    }

    /// Initial value, the one entering small-time germ forms.
    pub fn initial_value(&self) -> &CVector {
        self.segments.first().map(|(_, v)| v).unwrap_or(&self.tail)
    }

    fn breakpoints_until(&self, t: f64) -> Vec<f64> {
        let mut cuts = Vec::new();
        let mut cum = 0.0;
        for (dur, _) in &self.segments {
            cum += dur;
            if cum < t {
                cuts.push(cum);
            } else {
                break;
            }
        }
        cuts
    }
}

/// A kernel evaluation request: a time horizon and (test function,
/// element) pairs.
#[derive(Debug, Clone)]
pub struct KernelSpec {
    pub t: f64,
    pub pairs: Vec<(CoherentFunction, Element)>,
}

impl KernelSpec {
    pub fn validate(&self, model: &GeneratorModel) -> Result<()> {
        if !(self.t > 0.0) {
            return Err(Error::Invalid(format!(
                "kernel horizon must be positive, got {}",
                self.t
            )));
        }
        if self.pairs.is_empty() {
            return Err(Error::EmptySample);
        }
        for (f, y) in &self.pairs {
            if f.n_modes() != model.n_modes {
                return Err(Error::ModeMismatch(f.n_modes(), model.n_modes));
            }
            model.semigroup.validate(y)?;
        }
        Ok(())
    }
}

/// Sesquilinear germ form ⟨(1,f) | λ | (1,h)⟩ =
/// λ + λ_•h + f†λ^• + f†λ_•^•h.
pub fn germ_form(germ: &GermMatrix, f: &CVector, h: &CVector) -> C64 {
    let n = germ.n_modes();
    let m = germ.matrix();
    let mut out = m[(0, 0)];
    for a in 0..n {
        out += m[(0, 1 + a)] * h[a];
        out += f[a].conj() * m[(1 + a, 0)];
        for b in 0..n {
            out += f[a].conj() * m[(1 + a, 1 + b)] * h[b];
        }
    }
    out
}

/// Segment-exact integral ∫₀ᵗ ⟨(1,f(s)) | λ(y) | (1,h(s))⟩ ds; the
/// exponential of the result is the normalized matrix element
/// φ_t(f, y, h).
pub fn log_matrix_element(
    model: &GeneratorModel,
    f: &CoherentFunction,
    y: &Element,
    h: &CoherentFunction,
    t: f64,
) -> Result<C64> {
    if !(t > 0.0) {
        return Err(Error::Invalid(format!("t must be positive, got {t}")));
    }
    if f.n_modes() != model.n_modes || h.n_modes() != model.n_modes {
        return Err(Error::ModeMismatch(f.n_modes(), model.n_modes));
    }
    let germ = germ_of(model, y)?;
    let mut cuts = vec![0.0];
    cuts.extend(f.breakpoints_until(t));
    cuts.extend(h.breakpoints_until(t));
    cuts.push(t);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut total = C64::new(0.0, 0.0);
    for win in cuts.windows(2) {
        let (a, b) = (win[0], win[1]);
        if b <= a {
            continue;
        }
        let mid = 0.5 * (a + b);
        let value = germ_form(&germ, f.value_at(mid), h.value_at(mid));
        total += value * cr(b - a);
    }
    Ok(total)
}

/// Kernel M_ik = exp(log φ_t(f_i, y_i★y_k, f_k)); Hermitian for
/// flat-symmetric models.
pub fn exponent_kernel(model: &GeneratorModel, spec: &KernelSpec) -> Result<CMatrix> {
    spec.validate(model)?;
    let sg = &model.semigroup;
    let count = spec.pairs.len();
    let mut m = CMatrix::zeros(count, count);
    for i in 0..count {
        for k in 0..count {
            let (fi, yi) = &spec.pairs[i];
            let (fk, yk) = &spec.pairs[k];
            let y = sg.star_compose(yi, yk)?;
            m[(i, k)] = log_matrix_element(model, fi, &y, fk, spec.t)?.exp();
        }
    }
    Ok(m)
}

/// Positive-semidefiniteness report for an (approximately Hermitian)
/// kernel matrix; verdicts are taken on the Hermitian part.
pub fn kernel_pd_report(m: &CMatrix, tol: f64) -> Result<CpdReport> {
    let herm = hermiticity_residual(m);
    if herm > 1e-8 * max_abs(m).max(1.0) {
        return Err(Error::NonHermitian(herm));
    }
    Ok(psd_report(m, tol, Vec::new()))
}

/// Largest |⟨(1, f_i(0)) | λ(y_i★y_k) | (1, f_k(0))⟩| over the spec's
/// pairs; the natural scale of small-time increments.
pub fn initial_germ_form_scale(model: &GeneratorModel, spec: &KernelSpec) -> Result<f64> {
    spec.validate(model)?;
    let sg = &model.semigroup;
    let mut scale = 0.0f64;
    for (fi, yi) in &spec.pairs {
        for (fk, yk) in &spec.pairs {
            let germ = germ_of(model, &sg.star_compose(yi, yk)?)?;
            scale = scale.max(germ_form(&germ, fi.initial_value(), fk.initial_value()).norm());
        }
    }
    Ok(scale)
}

/// Max deviation over pairs of the scaled increment (φ_t − 1)/t from the
/// sesquilinear germ form at time zero; first order in t for smooth
/// exponents.
pub fn small_t_generator_check(
    model: &GeneratorModel,
    spec: &KernelSpec,
    t_small: f64,
) -> Result<f64> {
    if !(t_small > 0.0 && t_small <= 1e-3) {
        return Err(Error::Invalid(format!(
            "t_small must lie in (0, 1e-3], got {t_small}"
        )));
    }
    spec.validate(model)?;
    let sg = &model.semigroup;
    let mut worst = 0.0f64;
    for (fi, yi) in &spec.pairs {
        for (fk, yk) in &spec.pairs {
            let y = sg.star_compose(yi, yk)?;
            let phi = log_matrix_element(model, fi, &y, fk, t_small)?.exp();
            let increment = (phi - cr(1.0)) / cr(t_small);
            let germ = germ_of(model, &y)?;
            let form = germ_form(&germ, fi.initial_value(), fk.initial_value());
            worst = worst.max((increment - form).norm());
        }
    }
    Ok(worst)
}
