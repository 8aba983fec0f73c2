//! Monte-Carlo checks of the classical Poisson exponent
//! (1+α(y))^{p(t)} exp[t λ(y)]: mean value against the closed form,
//! conditional martingale property, and the positive-definiteness of
//! empirical mean kernels.

use crate::germ::GeneratorModel;
use crate::linalg::{cr, CMatrix, C64};
use crate::semigroup::Element;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Inversion sampling stays exact in double precision for rates up to
/// roughly this value.
pub const MAX_RATE: f64 = 30.0;

/// A batch of unit-rate Poisson counts at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonRun {
    pub t: f64,
    pub paths: usize,
    pub seed: u64,
    pub counts: Vec<u64>,
}

fn path_rng(seed: u64, path: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path as u64);
    rng
}

/// Sequential cdf walk; exact and platform independent.
fn poisson_inversion<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> u64 {
    if rate == 0.0 {
        return 0;
    }
    let u: f64 = rng.random();
    let mut k = 0u64;
    let mut pmf = (-rate).exp();
    let mut cdf = pmf;
    while u > cdf {
        k += 1;
        pmf *= rate / k as f64;
        cdf += pmf;
        if pmf < f64::MIN_POSITIVE || k > 100_000 {
            break;
        }
    }
    k
}

/// Unit-rate Poisson(t) counts, one per path; each path draws from its
/// own deterministic substream of (seed, path index), so results do not
/// depend on scheduling.
pub fn sample_poisson_counts(t: f64, paths: usize, seed: u64) -> Result<PoissonRun> {
    if !(t >= 0.0) {
        return Err(Error::Invalid(format!("time must be nonnegative, got {t}")));
    }
    if t > MAX_RATE {
        return Err(Error::Invalid(format!(
            "rate {t} exceeds the inversion-sampling bound {MAX_RATE}"
        )));
    }
    if paths == 0 {
        return Err(Error::EmptySample);
    }
    let counts: Vec<u64> = (0..paths)
        .into_par_iter()
        .map(|i| poisson_inversion(&mut path_rng(seed, i), t))
        .collect();
    Ok(PoissonRun {
        t,
        paths,
        seed,
        counts,
    })
}

/// Joint counts (p(t), p(s)) per path via independent increments; the
/// second draw reuses the same path substream.
fn sample_joint_counts(t: f64, s: f64, paths: usize, seed: u64) -> Vec<(u64, u64)> {
    (0..paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(seed, i);
            let p_t = poisson_inversion(&mut rng, t);
            let inc = poisson_inversion(&mut rng, s - t);
            (p_t, p_t + inc)
        })
        .collect()
}

fn mean_and_std_error(values: &[C64]) -> (C64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<C64>() / cr(n);
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var: f64 = values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[derive(Debug, Clone)]
pub struct MeanExponentReport {
    pub estimate: C64,
    pub exact: C64,
    pub std_error: f64,
}

/// Empirical mean of (1+α(y))^{p} e^{tλ(y)} against the generating
/// function value e^{t(α(y)+λ(y))}.
pub fn mean_exponent_check(
    model: &GeneratorModel,
    y: &Element,
    t: f64,
    paths: usize,
    seed: u64,
) -> Result<MeanExponentReport> {
    let (alpha, lambda) = model.poisson_values(y)?;
    let run = sample_poisson_counts(t, paths, seed)?;
    let base = cr(1.0) + alpha;
    let weight = (cr(t) * lambda).exp();
    let values: Vec<C64> = run
        .counts
        .iter()
        .map(|&p| base.powu(p as u32) * weight)
        .collect();
    let (estimate, std_error) = mean_and_std_error(&values);
    let exact = (cr(t) * (alpha + lambda)).exp();
    Ok(MeanExponentReport {
        estimate,
        exact,
        std_error,
    })
}

#[derive(Debug, Clone)]
pub struct MartingaleBin {
    /// Value of p(t) shared by the bin's paths.
    pub count_value: u64,
    pub paths: usize,
    pub mean: C64,
    pub expected: C64,
    pub std_error: f64,
    /// |mean − expected| in units of the standard error.
    pub deviation: f64,
}

#[derive(Debug, Clone)]
pub struct MartingaleReport {
    pub max_deviation: f64,
    pub bins: Vec<MartingaleBin>,
    pub skipped_bins: Vec<u64>,
    /// Paths with p(t) beyond the binned range.
    pub overflow_paths: usize,
    /// |α(1) + λ(1)|; nonzero drift breaks the normalization in the mean.
    pub drift: f64,
}

/// Conditional martingale test: per bin p(t) = k, the mean of
/// m_s = (1+α(1))^{p(s)} e^{sλ(1)} must match (1+α(1))^k e^{tλ(1)}.
pub fn martingale_check(
    model: &GeneratorModel,
    t: f64,
    s: f64,
    paths: usize,
    seed: u64,
    bins: usize,
) -> Result<MartingaleReport> {
    if !(s > t && t > 0.0) {
        return Err(Error::Invalid(format!("need s > t > 0, got t={t}, s={s}")));
    }
    if bins == 0 {
        return Err(Error::Invalid("need at least one bin".into()));
    }
    let unit = model.semigroup.unit();
    let (alpha, lambda) = model.poisson_values(&unit)?;
    let drift = (alpha + lambda).norm();
    if drift > 1e-12 {
        log::warn!("martingale check with α(1) + λ(1) = {drift} ≠ 0");
    }
    let joint = sample_joint_counts(t, s, paths, seed);
    let base = cr(1.0) + alpha;
    let weight_s = (cr(s) * lambda).exp();
    let weight_t = (cr(t) * lambda).exp();
    let mut grouped: Vec<Vec<C64>> = vec![Vec::new(); bins];
    let mut overflow = 0usize;
    for (p_t, p_s) in joint {
        let m_s = base.powu(p_s as u32) * weight_s;
        if (p_t as usize) < bins {
            grouped[p_t as usize].push(m_s);
        } else {
            overflow += 1;
        }
    }
    let mut out_bins = Vec::new();
    let mut skipped = Vec::new();
    let mut max_dev = 0.0f64;
    for (k, values) in grouped.iter().enumerate() {
        if values.is_empty() {
            skipped.push(k as u64);
            continue;
        }
        let (mean, std_error) = mean_and_std_error(values);
        let expected = base.powu(k as u32) * weight_t;
        let diff = (mean - expected).norm();
        let deviation = if std_error > 0.0 {
            diff / std_error
        } else if diff <= 1e-12 * expected.norm().max(1.0) {
            0.0
        } else {
            f64::INFINITY
        };
        max_dev = max_dev.max(deviation);
        out_bins.push(MartingaleBin {
            count_value: k as u64,
            paths: values.len(),
            mean,
            expected,
            std_error,
            deviation,
        });
    }
    Ok(MartingaleReport {
        max_deviation: max_dev,
        bins: out_bins,
        skipped_bins: skipped,
        overflow_paths: overflow,
        drift,
    })
}

/// Empirical mean kernel [mean over paths of φ_t(y_i★y_k)] with all
/// entries sharing the same count paths, plus the largest entrywise
/// standard error.
pub fn mean_kernel(
    model: &GeneratorModel,
    elements: &[Element],
    t: f64,
    paths: usize,
    seed: u64,
) -> Result<(CMatrix, f64)> {
    if elements.is_empty() {
        return Err(Error::EmptySample);
    }
    let run = sample_poisson_counts(t, paths, seed)?;
    let sg = &model.semigroup;
    let count = elements.len();
    let mut kernel = CMatrix::zeros(count, count);
    let mut max_se = 0.0f64;
    for (i, x) in elements.iter().enumerate() {
        for (k, z) in elements.iter().enumerate() {
            let y = sg.star_compose(x, z)?;
            let (alpha, lambda) = model.poisson_values(&y)?;
            let base = cr(1.0) + alpha;
            let weight = (cr(t) * lambda).exp();
            let values: Vec<C64> = run
                .counts
                .iter()
                .map(|&p| base.powu(p as u32) * weight)
                .collect();
            let (mean, se) = mean_and_std_error(&values);
            kernel[(i, k)] = mean;
            max_se = max_se.max(se);
        }
    }
    Ok((kernel, max_se))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::cyclic_group;

    fn unit_model(alpha1: f64, lambda1: f64) -> GeneratorModel {
        let sg = cyclic_group(1);
        GeneratorModel::scalar_poisson(
            sg,
            vec![(Element::Index(0), cr(alpha1))],
            vec![(Element::Index(0), cr(lambda1))],
        )
        .unwrap()
    }

    #[test]
    fn zero_time_gives_zero_counts() {
        let run = sample_poisson_counts(0.0, 100, 7).unwrap();
        assert!(run.counts.iter().all(|&c| c == 0));
    }

    #[test]
    fn counts_are_reproducible() {
        let a = sample_poisson_counts(1.0, 2000, 42).unwrap();
        let b = sample_poisson_counts(1.0, 2000, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_poisson_counts(1.0, 2000, 43).unwrap();
        assert_ne!(a.counts, c.counts);
    }

    #[test]
    fn empirical_mean_and_vacuum_mass() {
        let m = 100_000;
        let run = sample_poisson_counts(1.0, m, 11).unwrap();
        let mean = run.counts.iter().sum::<u64>() as f64 / m as f64;
        assert!((mean - 1.0).abs() < 5.0 / (m as f64).sqrt());
        let p0 = run.counts.iter().filter(|&&c| c == 0).count() as f64 / m as f64;
        let exact = (-1.0f64).exp();
        let sigma = (exact * (1.0 - exact) / m as f64).sqrt();
        assert!((p0 - exact).abs() < 5.0 * sigma);
    }

    #[test]
    fn mean_exponent_cancellation() {
        // λ = −α pointwise makes the exact mean one
        let model = unit_model(1.0, -1.0);
        let report =
            mean_exponent_check(&model, &Element::Index(0), 1.0, 100_000, 3).unwrap();
        assert!((report.exact - cr(1.0)).norm() < 1e-15);
        assert!((report.estimate - report.exact).norm() <= 5.0 * report.std_error);
    }

    #[test]
    fn mean_exponent_against_generating_function() {
        let model = unit_model(-0.5, 0.0);
        let report =
            mean_exponent_check(&model, &Element::Index(0), 2.0, 100_000, 5).unwrap();
        assert!((report.exact - cr((-1.0f64).exp())).norm() < 1e-15);
        assert!((report.estimate - report.exact).norm() <= 5.0 * report.std_error);
    }

    #[test]
    fn martingale_binned_means() {
        let model = unit_model(1.0, -1.0);
        let report = martingale_check(&model, 0.5, 1.0, 100_000, 9, 10).unwrap();
        assert!(report.drift < 1e-15);
        assert!(report.max_deviation <= 5.0, "max dev {}", report.max_deviation);
        // conditional mean given p(t)=k is 2^k e^{-t}
        for bin in &report.bins {
            let expect = cr(2.0f64.powi(bin.count_value as i32) * (-0.5f64).exp());
            assert!((bin.expected - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn trivial_martingale_has_zero_deviation() {
        let model = unit_model(0.0, 0.0);
        let report = martingale_check(&model, 0.5, 1.0, 10_000, 1, 6).unwrap();
        assert_eq!(report.max_deviation, 0.0);
    }

    #[test]
    fn violated_normalization_drifts() {
        // α(1) + λ(1) = 0.2 drifts the unconditional mean like e^{0.2 s}
        let model = unit_model(1.0, -0.8);
        let report =
            mean_exponent_check(&model, &Element::Index(0), 1.0, 100_000, 13).unwrap();
        assert!((report.exact - cr(0.2f64.exp())).norm() < 1e-14);
        let mart = martingale_check(&model, 0.5, 1.0, 100_000, 13, 10).unwrap();
        assert!(mart.drift > 0.19);
        assert!(mart.max_deviation > 5.0, "drift must fail the 5σ band");
    }

    #[test]
    fn mean_kernel_is_psd_for_pd_data() {
        // on Z2: 1+α PD and κ+λ PD with α(1)+λ(1) = 0
        let sg = cyclic_group(2);
        let alpha = vec![
            (Element::Index(0), cr(1.0)),
            (Element::Index(1), cr(0.5)),
        ];
        let lambda = vec![
            (Element::Index(0), cr(-1.0)),
            (Element::Index(1), cr(-0.5)),
        ];
        let model = GeneratorModel::scalar_poisson(sg.clone(), alpha, lambda).unwrap();
        let elements = sg.all_elements().unwrap();
        let (kernel, max_se) = mean_kernel(&model, &elements, 1.0, 20_000, 17).unwrap();
        let report = crate::coherent::kernel_pd_report(&kernel, 1e-9).unwrap();
        assert!(report.min_eigenvalue >= -5.0 * max_se);
    }

    #[test]
    fn invalid_arguments() {
        assert!(sample_poisson_counts(-1.0, 10, 0).is_err());
        assert!(sample_poisson_counts(31.0, 10, 0).is_err());
        assert!(sample_poisson_counts(1.0, 0, 0).is_err());
        let model = unit_model(0.0, 0.0);
        assert!(martingale_check(&model, 1.0, 0.5, 100, 0, 4).is_err());
        let table_model = GeneratorModel::table(
            cyclic_group(1),
            0,
            vec![(Element::Index(0), crate::ito::ItoQuadruple::from_scalar(cr(0.0)))],
        )
        .unwrap();
        assert!(matches!(
            mean_exponent_check(&table_model, &Element::Index(0), 1.0, 10, 0),
            Err(Error::UnsupportedForm(_))
        ));
    }
}
