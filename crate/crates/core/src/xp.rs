//! Experiment harness: finite distributions, exact error evaluation, the
//! transductive hard instance, learning curves and generalization bounds.

use std::fmt::Write as _;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::hclass::{CoordSequence, HypothesisClass, Label, LabeledSample};
use crate::learn::{compress, sub_seed, CompressConfig, ListHypothesis, OneInclusionLearner, SchemeDims};
use crate::oig::{density_mu, DensityReport};
use crate::scalar::{from_count, ratio, Scalar};

/// Name of the pseudo-random generator behind every seeded routine.
pub const PRNG_ID: &str = "ChaCha8";

/// Schema identifier written at the top of learning-curve CSV output.
pub const LEARNING_CURVE_SCHEMA: &str = "listpac.learning_curve.v1";

/// A distribution over finitely many `(point, label)` pairs with integer
/// weights; probabilities are `weight / total` in any [`Scalar`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteDistribution<T> {
    support: Vec<(usize, Label)>,
    weights: Vec<u64>,
    total: u64,
    _scalar: std::marker::PhantomData<T>,
}

impl<T: Scalar> FiniteDistribution<T> {
    /// Distinct support pairs with positive integer weights.
    pub fn new(support: Vec<(usize, Label)>, weights: Vec<u64>) -> Result<Self> {
        if support.is_empty() || support.len() != weights.len() {
            return Err(Error::InvalidArgument("support and weights must be non-empty and aligned".into()));
        }
        let mut sorted = support.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("support entries must be distinct".into()));
        }
        if weights.contains(&0) {
            return Err(Error::InvalidArgument("weights must be positive".into()));
        }
        let total = weights.iter().sum();
        Ok(Self { support, weights, total, _scalar: std::marker::PhantomData })
    }

    pub fn uniform(support: Vec<(usize, Label)>) -> Result<Self> {
        let weights = vec![1; support.len()];
        Self::new(support, weights)
    }

    /// The distribution of `(x, row[x])` with `x` weighted by `point_weights`.
    pub fn labeled_by(row: &[Label], point_weights: &[u64]) -> Result<Self> {
        let (support, weights) = point_weights
            .iter()
            .enumerate()
            .filter(|&(_, &w)| w > 0)
            .map(|(x, &w)| ((x, row[x]), w))
            .unzip();
        Self::new(support, weights)
    }

    pub fn support(&self) -> &[(usize, Label)] {
        &self.support
    }

    pub fn weight(&self, index: usize) -> T {
        ratio(self.weights[index], self.total)
    }

    /// Some row of `class` agrees with every support pair.
    pub fn is_realizable_by(&self, class: &HypothesisClass) -> bool {
        class.realizes(&LabeledSample::new(self.support.clone()))
    }

    /// `m` i.i.d. draws.
    pub fn sample<R: Rng>(&self, m: usize, rng: &mut R) -> LabeledSample {
        (0..m)
            .map(|_| {
                let mut u = rng.random_range(0..self.total);
                let mut i = 0;
                while u >= self.weights[i] {
                    u -= self.weights[i];
                    i += 1;
                }
                self.support[i]
            })
            .collect()
    }
}

/// `Pr_{(x,y)~D}[y ∉ μ(x)]`, exactly.
pub fn estimate_error<T: Scalar>(mu: &ListHypothesis, dist: &FiniteDistribution<T>) -> T {
    let missed: u64 = dist
        .support
        .iter()
        .zip(&dist.weights)
        .filter(|(&(x, y), _)| !mu.contains(x, y))
        .map(|(_, &w)| w)
        .sum();
    ratio(missed, dist.total)
}

/// Learner used in transductive evaluations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Algorithm {
    /// The one-inclusion list algorithm over the whole class.
    OneInclusion,
    /// Always the same list.
    FixedList(Vec<Label>),
    /// Every label `1..=p`.
    FullLabelSet,
}

/// Default enumeration budget for transductive evaluations.
pub const DEFAULT_ENUMERATION_BUDGET: u128 = 2_000_000;

/// Exact `E_{h*~Unif(F)} E_{(S,x)~Unif(S*)^m} 1[A(S, h*|_S, x) ∌ h*(x)]`,
/// where `S` has `m - 1` points and `F` holds rows of `H|_{S*}`.
pub fn transductive_loo_error<T: Scalar>(
    class: &HypothesisClass,
    k: usize,
    algorithm: &Algorithm,
    star: &CoordSequence,
    family: &HypothesisClass,
    budget: u128,
) -> Result<T> {
    let m = star.len();
    if family.num_coords() != m {
        return Err(Error::InvalidArgument("family must live on the coordinates of the sequence".into()));
    }
    let sequences = (m as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    let work = sequences.saturating_mul(family.len() as u128);
    if work > budget {
        return Err(Error::CapExceeded { cap: budget.min(u64::MAX as u128) as u64 });
    }
    let mut learner = OneInclusionLearner::new(class, k)?;
    let mut misses: u64 = 0;
    for target in family.rows() {
        for code in 0..sequences as u64 {
            let mut digits = Vec::with_capacity(m);
            let mut c = code;
            for _ in 0..m {
                digits.push((c % m as u64) as usize);
                c /= m as u64;
            }
            let test = digits[m - 1];
            let sample: LabeledSample =
                digits[..m - 1].iter().map(|&j| (star.coords()[j], target[j])).collect();
            let list = run_algorithm(&mut learner, algorithm, class, &sample, star.coords()[test])?;
            if !list.contains(&target[test]) {
                misses += 1;
            }
        }
    }
    Ok(ratio(misses, sequences as u64 * family.len() as u64))
}

fn run_algorithm(
    learner: &mut OneInclusionLearner<'_>,
    algorithm: &Algorithm,
    class: &HypothesisClass,
    sample: &LabeledSample,
    x: usize,
) -> Result<Vec<Label>> {
    Ok(match algorithm {
        Algorithm::OneInclusion => learner.predict(sample, x)?,
        Algorithm::FixedList(list) => list.clone(),
        Algorithm::FullLabelSet => (1..=class.label_bound()).collect(),
    })
}

/// Lower rational approximation of `e`; dividing by it gives a slightly
/// larger (hence stricter) version of any `1/e`-scaled lower bound.
pub const E_LOWER: (u64, u64) = (2_718_281_828, 1_000_000_000);

#[derive(Clone, Debug, PartialEq)]
pub struct HardInstanceReport<T> {
    pub density: DensityReport<T>,
    /// Number of rows of the hard family on `S*`.
    pub family_size: usize,
    /// `μ / (e (k+1) m)` with `e` replaced by [`E_LOWER`].
    pub bound: T,
    /// `(1 - 1/m)^(m-1) μ / ((k+1) m)`, the sharper intermediate value.
    pub proof_bound: T,
    /// Exact error of the one-inclusion algorithm, when enumeration fits.
    pub exact: Option<T>,
    pub monte_carlo: T,
    pub trials: usize,
}

impl<T: Scalar> HardInstanceReport<T> {
    /// The exact error (when available) is at least the theoretical bound.
    pub fn exact_meets_bound(&self) -> Option<bool> {
        self.exact.as_ref().map(|e| *e >= self.bound)
    }
}

/// The transductive hard instance: `S*` and `F` attaining `μ_H(m)`, `D`
/// uniform on `S*`, `h*` uniform on `F`; measures the one-inclusion algorithm.
pub fn hard_instance_error<T: Scalar>(
    class: &HypothesisClass,
    k: usize,
    m: usize,
    trials: usize,
    seed: u64,
    avd_cap: u64,
    budget: u128,
) -> Result<HardInstanceReport<T>> {
    let density: DensityReport<T> = density_mu(class, m, k, avd_cap)?;
    let restricted = class.restrict(&density.coords)?;
    let family = restricted.subset(&density.witness).expect("density witness is non-empty");
    let mu = density.value.clone();
    let denom: T = from_count::<T>((k as u64 + 1) * m as u64);
    let e_lo: T = ratio(E_LOWER.0, E_LOWER.1);
    let bound = mu.clone() / (e_lo * denom.clone());
    let mut factor: T = from_count(1);
    for _ in 1..m {
        factor = factor * ratio(m as u64 - 1, m as u64);
    }
    let proof_bound = factor * mu / denom;
    let star = density.coords.clone();
    let exact = match transductive_loo_error(class, k, &Algorithm::OneInclusion, &star, &family, budget) {
        Ok(v) => Some(v),
        Err(Error::CapExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut learner = OneInclusionLearner::new(class, k)?;
    let mut misses = 0u64;
    for _ in 0..trials {
        let target = family.row(rng.random_range(0..family.len()));
        let draws: Vec<usize> = (0..m).map(|_| rng.random_range(0..m)).collect();
        let sample: LabeledSample = draws[..m - 1].iter().map(|&j| (star.coords()[j], target[j])).collect();
        let test = draws[m - 1];
        if !learner.predict(&sample, star.coords()[test])?.contains(&target[test]) {
            misses += 1;
        }
    }
    let monte_carlo = ratio(misses, trials.max(1) as u64);
    Ok(HardInstanceReport { density, family_size: family.len(), bound, proof_bound, exact, monte_carlo, trials })
}

fn check_delta<F: Float>(delta: F, allow_one: bool) -> Result<()> {
    let ok = delta > F::zero() && (delta < F::one() || (allow_one && delta == F::one()));
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument("delta must lie in (0, 1)".into()))
    }
}

fn float<F: Float>(v: f64) -> F {
    F::from(v).expect("representable")
}

/// `L_S + sqrt(2 L_S ln(1/δ) / m) + 4 ln(1/δ) / m`.
pub fn bernstein_bound<F: Float>(empirical: F, m: usize, delta: F) -> Result<F> {
    check_delta(delta, true)?;
    if m == 0 || empirical < F::zero() || empirical > F::one() {
        return Err(Error::InvalidArgument("need m >= 1 and empirical loss in [0, 1]".into()));
    }
    let m = float::<F>(m as f64);
    let log = (F::one() / delta).ln();
    Ok(empirical + (float::<F>(2.0) * empirical * log / m).sqrt() + float::<F>(4.0) * log / m)
}

fn check_size(r: usize, m: usize) -> Result<()> {
    if m == 0 || 2 * r > m {
        return Err(Error::InvalidArgument(format!("compression size {r} exceeds m/2 for m = {m}")));
    }
    Ok(())
}

/// `(8 r ln m + 8 ln(1/δ)) / m`, for `r <= m/2`.
pub fn compression_bound<F: Float>(r: usize, m: usize, delta: F) -> Result<F> {
    check_delta(delta, false)?;
    check_size(r, m)?;
    let eight = float::<F>(8.0);
    let mf = float::<F>(m as f64);
    Ok((eight * float::<F>(r as f64) * mf.ln() + eight * (F::one() / delta).ln()) / mf)
}

/// `sqrt(ln(2/δ)/(2m)) + sqrt((4 ln 2 + 4 r ln m + 4 ln(1/δ))/m)
///  + (8 ln 2 + 8 r ln m + 8 ln(1/δ) + r)/m`, for `r <= m/2`.
pub fn agnostic_bound<F: Float>(r: usize, m: usize, delta: F) -> Result<F> {
    check_delta(delta, false)?;
    check_size(r, m)?;
    let mf = float::<F>(m as f64);
    let rf = float::<F>(r as f64);
    let ln2 = float::<F>(2.0).ln();
    let lm = mf.ln();
    let ld = (F::one() / delta).ln();
    let four = float::<F>(4.0);
    let eight = float::<F>(8.0);
    let a = ((float::<F>(2.0) / delta).ln() / (float::<F>(2.0) * mf)).sqrt();
    let b = ((four * ln2 + four * rf * lm + four * ld) / mf).sqrt();
    let c = (eight * ln2 + eight * rf * lm + eight * ld + rf) / mf;
    Ok(a + b + c)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub trials: usize,
    pub m_grid: Vec<usize>,
    pub k: usize,
    pub t: usize,
    pub delta: f64,
    pub epsilon: f64,
    /// Stage-2 overrides passed to the compression scheme.
    pub n: Option<usize>,
    pub l: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.into()));
        if self.trials == 0 || self.k == 0 {
            return bad("trials and k must be positive");
        }
        if self.m_grid.is_empty() || self.m_grid.contains(&0) {
            return bad("m grid must be non-empty and positive");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) || !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("delta and epsilon must lie in (0, 1)");
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub error: f64,
    pub r: usize,
    /// `None` when `r > m/2`, where the bound does not apply.
    pub bound: Option<f64>,
    pub train_misses: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurveRow {
    pub m: usize,
    pub trials: Vec<TrialOutcome>,
}

impl CurveRow {
    pub fn mean_error(&self) -> f64 {
        self.trials.iter().map(|t| t.error).sum::<f64>() / self.trials.len() as f64
    }

    /// Population standard deviation of the trial errors.
    pub fn std_error(&self) -> f64 {
        let mean = self.mean_error();
        let var = self.trials.iter().map(|t| (t.error - mean).powi(2)).sum::<f64>() / self.trials.len() as f64;
        var.sqrt()
    }

    pub fn mean_r(&self) -> f64 {
        self.trials.iter().map(|t| t.r as f64).sum::<f64>() / self.trials.len() as f64
    }

    pub fn max_r(&self) -> usize {
        self.trials.iter().map(|t| t.r).max().unwrap_or(0)
    }

    pub fn vacuous(&self) -> usize {
        self.trials.iter().filter(|t| t.bound.is_none()).count()
    }

    pub fn mean_bound(&self) -> Option<f64> {
        let bounds: Vec<f64> = self.trials.iter().filter_map(|t| t.bound).collect();
        if bounds.is_empty() {
            None
        } else {
            Some(bounds.iter().sum::<f64>() / bounds.len() as f64)
        }
    }

    /// Fraction of all trials whose error exceeds an applicable bound.
    pub fn exceed_fraction(&self) -> f64 {
        let exceed = self.trials.iter().filter(|t| t.bound.is_some_and(|b| t.error > b)).count();
        exceed as f64 / self.trials.len() as f64
    }

    pub fn train_misses(&self) -> usize {
        self.trials.iter().map(|t| t.train_misses).sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearningCurve {
    pub config: ExperimentConfig,
    pub dims: SchemeDims,
    pub rows: Vec<CurveRow>,
}

impl LearningCurve {
    pub fn to_csv(&self) -> String {
        let c = &self.config;
        let mut out = String::new();
        writeln!(
            out,
            "# schema={LEARNING_CURVE_SCHEMA} prng={PRNG_ID} seed={} k={} t={} delta={} kds={} knat={}",
            c.seed, c.k, c.t, c.delta, self.dims.kds, self.dims.knat
        )
        .unwrap();
        out.push_str("m,trials,mean_error,std_error,mean_r,max_r,mean_bound,exceed_fraction,vacuous,train_misses\n");
        for row in &self.rows {
            let bound = row.mean_bound().map(|b| format!("{b:.6}")).unwrap_or_else(|| "NA".into());
            writeln!(
                out,
                "{},{},{:.6},{:.6},{:.3},{},{},{:.6},{},{}",
                row.m,
                row.trials.len(),
                row.mean_error(),
                row.std_error(),
                row.mean_r(),
                row.max_r(),
                bound,
                row.exceed_fraction(),
                row.vacuous(),
                row.train_misses()
            )
            .unwrap();
        }
        out
    }
}

/// For each `m` and trial: draw `S ~ D^m`, compress and reconstruct, and
/// record the exact error against `D` together with the realizable
/// compression bound at the achieved size `r`. Trials run in parallel and are
/// aggregated in trial order.
pub fn learning_curve(
    class: &HypothesisClass,
    dist: &FiniteDistribution<crate::Rational>,
    config: &ExperimentConfig,
    dims: SchemeDims,
) -> Result<LearningCurve> {
    config.validate()?;
    if !dist.is_realizable_by(class) {
        return Err(Error::NotRealizable("distribution support is not realized by the class".into()));
    }
    let mut rows = Vec::with_capacity(config.m_grid.len());
    for (mi, &m) in config.m_grid.iter().enumerate() {
        let trials: Vec<Result<TrialOutcome>> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let trial_seed = sub_seed(config.seed, (mi as u64) << 32 | trial as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
                let sample = dist.sample(m, &mut rng);
                let mut cc = CompressConfig::new(config.k, config.t, trial_seed);
                cc.n = config.n;
                cc.l = config.l;
                let result = compress(class, &sample, &cc, Some(dims))?;
                let train_misses = result.hypothesis.misses(&sample);
                let exact: crate::Rational = estimate_error(&result.hypothesis, dist);
                let error = num_traits::ToPrimitive::to_f64(&exact).unwrap_or(f64::NAN);
                let r = result.size();
                let bound = compression_bound::<f64>(r, m, config.delta).ok();
                Ok(TrialOutcome { error, r, bound, train_misses })
            })
            .collect();
        let trials = trials.into_iter().collect::<Result<Vec<_>>>()?;
        rows.push(CurveRow { m, trials });
    }
    Ok(LearningCurve { config: config.clone(), dims, rows })
}
