//! Monte Carlo estimation of the mean error curve `e[t]` and the empirical
//! convergence rates derived from it.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::{BitString, FitnessKind, FitnessSpec};
use crate::heuristics::{trajectory_into, AlgorithmSpec, RngStream};

/// Replicates per reduction chunk. Fixed so the floating-point reduction order does
/// not depend on the number of worker threads.
const CHUNK: usize = 32;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitSpec {
    #[default]
    #[serde(rename = "uniform")]
    UniformRandom,
    #[serde(rename = "zeros")]
    AllZeros,
    Fixed { bits: BitString },
}

impl InitSpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        if let InitSpec::Fixed { bits } = self {
            if bits.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: bits.len(),
                });
            }
        }
        Ok(())
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> BitString {
        match self {
            InitSpec::UniformRandom => BitString::random(n, rng),
            InitSpec::AllZeros => BitString::zeros(n),
            InitSpec::Fixed { bits } => bits.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    MonteCarlo,
    Oracle,
}

/// Mean error per step. `sem` is present exactly for Monte Carlo series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySeries {
    pub t_grid: Vec<usize>,
    pub mean_error: Vec<f64>,
    pub sem: Option<Vec<f64>>,
    pub replicates: usize,
    pub provenance: Provenance,
}

impl TrajectorySeries {
    pub fn from_oracle(values: Vec<f64>) -> Self {
        Self {
            t_grid: (0..values.len()).collect(),
            mean_error: values,
            sem: None,
            replicates: 0,
            provenance: Provenance::Oracle,
        }
    }

    pub fn len(&self) -> usize {
        self.mean_error.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean_error.is_empty()
    }

    pub fn one_step_rate(&self) -> Vec<f64> {
        one_step_rate(&self.mean_error)
    }

    pub fn average_rate(&self, t: usize) -> Result<f64> {
        average_rate(&self.mean_error, t)
    }

    /// `t,mean_error,sem,replicates`, one row per step.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,mean_error,sem,replicates")?;
        for (i, (&t, &m)) in self.t_grid.iter().zip(&self.mean_error).enumerate() {
            let sem = self
                .sem
                .as_ref()
                .map(|s| fmt_real(s[i]))
                .unwrap_or_default();
            writeln!(w, "{t},{},{sem},{}", fmt_real(m), self.replicates)?;
        }
        Ok(())
    }
}

/// 17 significant digits, enough to round-trip any double.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Running mean and sum of squared deviations per step.
#[derive(Clone)]
struct Moments {
    count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(len: usize) -> Self {
        Self {
            count: 0,
            mean: vec![0.0; len],
            m2: vec![0.0; len],
        }
    }

    fn merge(mut self, other: &Moments) -> Self {
        if other.count == 0 {
            return self;
        }
        if self.count == 0 {
            return other.clone();
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let total = na + nb;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * nb / total;
            self.m2[i] += other.m2[i] + delta * delta * na * nb / total;
        }
        self.count += other.count;
        self
    }
}

/// Averages `replicates` independent paths; replicate `r` uses stream `r` of `seed`
/// both for its initial point and for its steps.
pub fn estimate_mean_error(
    algo: &AlgorithmSpec,
    spec: &FitnessSpec,
    init: &InitSpec,
    steps: usize,
    replicates: usize,
    seed: u64,
) -> Result<TrajectorySeries> {
    if replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be at least 1".into()));
    }
    init.validate(spec.n())?;
    let kernel = algo.kernel(spec.n())?;
    let len = steps + 1;
    let chunks: Vec<usize> = (0..replicates.div_ceil(CHUNK)).collect();

    let partials = chunks
        .par_iter()
        .map(|&c| -> Result<Moments> {
            let mut acc = Moments::new(len);
            for r in c * CHUNK..((c + 1) * CHUNK).min(replicates) {
                let mut rng = RngStream::new(seed, r as u64);
                let x0 = init.sample(spec.n(), &mut rng);
                acc.count += 1;
                let k = acc.count as f64;
                trajectory_into(&kernel, spec, x0, steps, &mut rng, |t, e| {
                    let delta = e - acc.mean[t];
                    acc.mean[t] += delta / k;
                    acc.m2[t] += delta * (e - acc.mean[t]);
                })?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;

    let total = partials
        .iter()
        .fold(Moments::new(len), |acc, part| acc.merge(part));

    let r = replicates as f64;
    let sem = total
        .m2
        .iter()
        .map(|&m2| if replicates > 1 { (m2.max(0.0) / (r - 1.0)).sqrt() / r.sqrt() } else { 0.0 })
        .collect();

    Ok(TrajectorySeries {
        t_grid: (0..len).collect(),
        mean_error: total.mean.iter().map(|&m| m.max(0.0)).collect(),
        sem: Some(sem),
        replicates,
        provenance: Provenance::MonteCarlo,
    })
}

/// `r[t] = 1 - e[t+1]/e[t]`, or 0 where `e[t] = 0`.
pub fn one_step_rate(errors: &[f64]) -> Vec<f64> {
    errors
        .windows(2)
        .map(|w| if w[0] != 0.0 { 1.0 - w[1] / w[0] } else { 0.0 })
        .collect()
}

/// `R[t] = 1 - (e[t]/e[0])^(1/t)`, or 0 where `e[0] = 0`.
pub fn average_rate(errors: &[f64], t: usize) -> Result<f64> {
    if t == 0 {
        return Err(Error::InvalidParameter("average rate needs t >= 1".into()));
    }
    let e0 = *errors
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty error series".into()))?;
    let et = *errors.get(t).ok_or_else(|| {
        Error::InvalidParameter(format!("t = {t} is beyond the series length {}", errors.len()))
    })?;
    if e0 == 0.0 {
        return Ok(0.0);
    }
    Ok(1.0 - (et / e0).powf(1.0 / t as f64))
}

/// Exact `E[e(x[0])]` under the given initialisation.
pub fn initial_error_mean(spec: &FitnessSpec, init: &InitSpec) -> Result<f64> {
    init.validate(spec.n())?;
    let n = spec.n();
    Ok(match init {
        InitSpec::Fixed { bits } => spec.error(bits)?,
        InitSpec::AllZeros => spec.error(&BitString::zeros(n))?,
        InitSpec::UniformRandom => match spec.kind() {
            FitnessKind::Linear | FitnessKind::OneMax | FitnessKind::BinVal => spec.optimum() / 2.0,
            // E[LO] = sum_{i=1..n} 2^-i = 1 - 2^-n
            FitnessKind::LeadingOnes => (n as f64 - 1.0) + 0.5f64.powi(n as i32),
            FitnessKind::Zigzag => {
                let pmf = binomial_pmf(n, 0.5);
                let f_star = spec.optimum();
                pmf.iter()
                    .enumerate()
                    .map(|(k, &w)| w * (f_star - spec.level_value(k).expect("zigzag is level symmetric")))
                    .sum()
            }
        },
    })
}

/// `ln k!` for `k = 0..=n`.
pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Probability mass function of `Binomial(n, p)` for `p` in (0, 1).
pub fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    let lf = ln_factorials(n);
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    (0..=n)
        .map(|k| (lf[n] - lf[k] - lf[n - k] + k as f64 * lp + (n - k) as f64 * lq).exp())
        .collect()
}
