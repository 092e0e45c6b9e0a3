//! One-step Markov kernels of RLS, the (1+1) EA and fixed-temperature simulated
//! annealing (SA-T) over [`BitString`].
//!
//! Elitist selection keeps the offspring on equal fitness. SA-T proposes a
//! uniform 1-bit flip or a uniform 2-bit flip with probability 1/2 each, accepts
//! non-worsening moves always and worsening moves with `exp(-|Δf| / T)`, and
//! never leaves the optimum.

use std::cmp::Ordering;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::{BitString, FitnessSpec};

/// Deterministic random stream keyed by `(seed, stream_id)`.
///
/// ChaCha8 with the seed as key and the replicate index as stream number, so every
/// replicate draws from its own reproducible sequence on every platform.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgorithmKind {
    Rls,
    OnePlusOneEa,
    Sat,
}

impl AlgorithmKind {
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::Rls => "rls",
            AlgorithmKind::OnePlusOneEa => "ea",
            AlgorithmKind::Sat => "sa",
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum RawAlgorithmSpec {
    Rls,
    Ea {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mutation_rate: Option<f64>,
    },
    Sa {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        temperature: Option<f64>,
    },
}

/// Algorithm choice with optional parameters; unset parameters take their
/// dimension-dependent defaults (`p = 1/n`, `T = 1/ln n`) when resolved.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAlgorithmSpec", into = "RawAlgorithmSpec")]
pub enum AlgorithmSpec {
    Rls,
    OnePlusOneEa { mutation_rate: Option<f64> },
    Sat { temperature: Option<f64> },
}

impl TryFrom<RawAlgorithmSpec> for AlgorithmSpec {
    type Error = Error;

    fn try_from(raw: RawAlgorithmSpec) -> Result<Self> {
        let spec = match raw {
            RawAlgorithmSpec::Rls => AlgorithmSpec::Rls,
            RawAlgorithmSpec::Ea { mutation_rate } => AlgorithmSpec::OnePlusOneEa { mutation_rate },
            RawAlgorithmSpec::Sa { temperature } => AlgorithmSpec::Sat { temperature },
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<AlgorithmSpec> for RawAlgorithmSpec {
    fn from(spec: AlgorithmSpec) -> Self {
        match spec {
            AlgorithmSpec::Rls => RawAlgorithmSpec::Rls,
            AlgorithmSpec::OnePlusOneEa { mutation_rate } => RawAlgorithmSpec::Ea { mutation_rate },
            AlgorithmSpec::Sat { temperature } => RawAlgorithmSpec::Sa { temperature },
        }
    }
}

fn check_rate(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "mutation rate must lie in (0, 1), got {p}"
        )));
    }
    Ok(())
}

fn check_temperature(t: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "temperature must be positive and finite, got {t}"
        )));
    }
    Ok(())
}

impl AlgorithmSpec {
    pub fn rls() -> Self {
        AlgorithmSpec::Rls
    }

    pub fn ea() -> Self {
        AlgorithmSpec::OnePlusOneEa { mutation_rate: None }
    }

    pub fn ea_with_rate(p: f64) -> Result<Self> {
        check_rate(p)?;
        Ok(AlgorithmSpec::OnePlusOneEa {
            mutation_rate: Some(p),
        })
    }

    pub fn sa() -> Self {
        AlgorithmSpec::Sat { temperature: None }
    }

    pub fn sa_with_temperature(t: f64) -> Result<Self> {
        check_temperature(t)?;
        Ok(AlgorithmSpec::Sat {
            temperature: Some(t),
        })
    }

    pub fn kind(&self) -> AlgorithmKind {
        match self {
            AlgorithmSpec::Rls => AlgorithmKind::Rls,
            AlgorithmSpec::OnePlusOneEa { .. } => AlgorithmKind::OnePlusOneEa,
            AlgorithmSpec::Sat { .. } => AlgorithmKind::Sat,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            AlgorithmSpec::Rls => Ok(()),
            AlgorithmSpec::OnePlusOneEa { mutation_rate } => mutation_rate.map_or(Ok(()), check_rate),
            AlgorithmSpec::Sat { temperature } => temperature.map_or(Ok(()), check_temperature),
        }
    }

    /// Fills in dimension-dependent defaults.
    pub fn kernel(&self, n: usize) -> Result<Kernel> {
        self.validate()?;
        match *self {
            AlgorithmSpec::Rls => Ok(Kernel::Rls),
            AlgorithmSpec::OnePlusOneEa { mutation_rate } => {
                let p = mutation_rate.unwrap_or(1.0 / n as f64);
                if n == 1 && mutation_rate.is_none() {
                    // 1/n = 1 is outside (0, 1); the single bit is flipped with rate 1/2.
                    return Ok(Kernel::Ea { p: 0.5 });
                }
                check_rate(p)?;
                Ok(Kernel::Ea { p })
            }
            AlgorithmSpec::Sat { temperature } => {
                if n < 2 {
                    return Err(Error::InvalidParameter(
                        "SA-T needs n >= 2 for its 2-bit neighbourhood".into(),
                    ));
                }
                let t = temperature.unwrap_or_else(|| default_temperature(n));
                check_temperature(t)?;
                Ok(Kernel::Sa { temperature: t })
            }
        }
    }
}

/// `T = 1/ln n`, which makes `exp(-2/T) = n^-2`.
pub fn default_temperature(n: usize) -> f64 {
    1.0 / (n as f64).ln()
}

/// A fully parameterised one-step kernel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Kernel {
    Rls,
    Ea { p: f64 },
    Sa { temperature: f64 },
}

impl Kernel {
    pub fn is_elitist(&self) -> bool {
        !matches!(self, Kernel::Sa { .. })
    }

    pub fn kind(&self) -> AlgorithmKind {
        match self {
            Kernel::Rls => AlgorithmKind::Rls,
            Kernel::Ea { .. } => AlgorithmKind::OnePlusOneEa,
            Kernel::Sa { .. } => AlgorithmKind::Sat,
        }
    }

    /// Advances `x` by one step. `scratch` holds the offspring and is clobbered.
    pub(crate) fn step_in_place<R: Rng + ?Sized>(
        &self,
        spec: &FitnessSpec,
        x: &mut BitString,
        scratch: &mut BitString,
        rng: &mut R,
    ) {
        let n = x.len();
        match *self {
            Kernel::Rls => {
                scratch.clone_from(x);
                scratch.flip(rng.gen_range(0..n));
                if spec.compare_unchecked(scratch, x) != Ordering::Less {
                    std::mem::swap(x, scratch);
                }
            }
            Kernel::Ea { p } => {
                scratch.clone_from(x);
                mutate_bitwise(scratch, p, rng);
                if spec.compare_unchecked(scratch, x) != Ordering::Less {
                    std::mem::swap(x, scratch);
                }
            }
            Kernel::Sa { temperature } => {
                if spec.is_optimal(x) {
                    return;
                }
                scratch.clone_from(x);
                if rng.gen::<bool>() {
                    scratch.flip(rng.gen_range(0..n));
                } else {
                    let (i, j) = uniform_pair(n, rng);
                    scratch.flip(i);
                    scratch.flip(j);
                }
                let accept = match spec.compare_unchecked(scratch, x) {
                    Ordering::Greater | Ordering::Equal => true,
                    Ordering::Less => {
                        let delta = spec.delta_unchecked(x, scratch);
                        rng.gen::<f64>() < (delta / temperature).exp()
                    }
                };
                if accept {
                    std::mem::swap(x, scratch);
                }
            }
        }
    }

    pub fn step<R: Rng + ?Sized>(&self, spec: &FitnessSpec, x: &BitString, rng: &mut R) -> Result<BitString> {
        if x.len() != spec.n() {
            return Err(Error::DimensionMismatch {
                expected: spec.n(),
                got: x.len(),
            });
        }
        let mut state = x.clone();
        let mut scratch = x.clone();
        self.step_in_place(spec, &mut state, &mut scratch, rng);
        Ok(state)
    }
}

/// Flips every bit independently with probability `p`, jumping between flipped
/// positions with geometric gaps so the cost is proportional to `n p`.
fn mutate_bitwise<R: Rng + ?Sized>(x: &mut BitString, p: f64, rng: &mut R) {
    let n = x.len();
    let log_keep = (-p).ln_1p();
    let mut pos = 0usize;
    loop {
        let u: f64 = rng.gen();
        // P(gap >= k) = (1-p)^k
        let gap = ((-u).ln_1p() / log_keep).floor();
        if gap >= (n - pos) as f64 {
            break;
        }
        pos += gap as usize;
        x.flip(pos);
        pos += 1;
        if pos >= n {
            break;
        }
    }
}

/// Uniform unordered pair of distinct positions.
fn uniform_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

pub fn rls_step<R: Rng + ?Sized>(spec: &FitnessSpec, x: &BitString, rng: &mut R) -> Result<BitString> {
    Kernel::Rls.step(spec, x, rng)
}

pub fn ea_step<R: Rng + ?Sized>(spec: &FitnessSpec, x: &BitString, p: f64, rng: &mut R) -> Result<BitString> {
    check_rate(p)?;
    Kernel::Ea { p }.step(spec, x, rng)
}

pub fn sa_step<R: Rng + ?Sized>(
    spec: &FitnessSpec,
    x: &BitString,
    temperature: f64,
    rng: &mut R,
) -> Result<BitString> {
    check_temperature(temperature)?;
    if spec.n() < 2 {
        return Err(Error::InvalidParameter(
            "SA-T needs n >= 2 for its 2-bit neighbourhood".into(),
        ));
    }
    Kernel::Sa { temperature }.step(spec, x, rng)
}

/// Errors `e(x[0]), ..., e(x[steps])` along one sample path.
pub fn run_trajectory<R: Rng + ?Sized>(
    algo: &AlgorithmSpec,
    spec: &FitnessSpec,
    init: &BitString,
    steps: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    let kernel = algo.kernel(spec.n())?;
    let mut out = Vec::with_capacity(steps + 1);
    trajectory_into(&kernel, spec, init.clone(), steps, rng, |_, e| out.push(e))?;
    Ok(out)
}

/// Runs a path and reports `(t, e(x[t]))` for every `t` in `0..=steps`.
pub(crate) fn trajectory_into<R: Rng + ?Sized, F: FnMut(usize, f64)>(
    kernel: &Kernel,
    spec: &FitnessSpec,
    init: BitString,
    steps: usize,
    rng: &mut R,
    mut sink: F,
) -> Result<()> {
    if init.len() != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: spec.n(),
            got: init.len(),
        });
    }
    let mut x = init;
    let mut scratch = x.clone();
    let mut err = spec.error_unchecked(&x);
    sink(0, err);
    for t in 1..=steps {
        if err == 0.0 {
            // the optimum is absorbing for every kernel
            sink(t, 0.0);
            continue;
        }
        kernel.step_in_place(spec, &mut x, &mut scratch, rng);
        err = spec.error_unchecked(&x);
        sink(t, err);
    }
    Ok(())
}
