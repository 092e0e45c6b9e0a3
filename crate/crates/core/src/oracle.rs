//! Exact finite Markov-chain analysis of the heuristics.
//!
//! A [`ChainModel`] holds a dense row-stochastic matrix over either the full
//! hypercube `{0,1}^n` (`n <= 12`) or over ones-count levels `0..=n` (`n <= 200`,
//! OneMax and Zigzag only). From it we get the exact expected error
//! `e[t] = init · P^t · err`, the one- and two-step error-change ratio extrema,
//! and numerical checks of the exponential envelopes they imply.
//!
//! All kernels are time-homogeneous, so the extrema over time collapse to
//! extrema over non-optimal states.

use std::cmp::Ordering;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fitness::{BitString, FitnessSpec};
use crate::heuristics::{AlgorithmSpec, Kernel};
use crate::simulate::{binomial_pmf, fmt_real, InitSpec};

pub const FULL_CHAIN_MAX_N: usize = 12;
pub const LEVEL_CHAIN_MAX_N: usize = 200;

/// Relative tolerance of the envelope checks.
pub const SANDWICH_TOLERANCE: f64 = 1e-9;

pub const HOMOGENEITY_NOTE: &str =
    "kernels are time-homogeneous: extrema over non-optimal states replace inf/sup over t";

const ROW_SUM_TOLERANCE: f64 = 1e-12;
const PAR_THRESHOLD: usize = 256;
const COLUMN_BLOCK: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateSpace {
    /// Index `i` encodes the bit string with bit `k + 1` equal to bit `k` of `i`.
    Full { n: usize },
    /// Index `k` is the set of strings with `k` ones.
    Levels { n: usize },
    Custom,
}

#[derive(Clone, Debug)]
pub struct ChainModel {
    space: StateSpace,
    size: usize,
    transition: Vec<f64>,
    err: Vec<f64>,
    init: Vec<f64>,
    elitist: bool,
}

impl ChainModel {
    /// Builds a chain from explicit parts and checks its invariants.
    pub fn from_parts(transition: Vec<Vec<f64>>, err: Vec<f64>, init: Vec<f64>) -> Result<Self> {
        let size = err.len();
        if transition.len() != size || transition.iter().any(|r| r.len() != size) || init.len() != size {
            return Err(Error::InvalidParameter(
                "transition matrix, error vector and init must share one dimension".into(),
            ));
        }
        let chain = Self {
            space: StateSpace::Custom,
            size,
            transition: transition.into_iter().flatten().collect(),
            err,
            init,
            elitist: false,
        };
        chain.check_invariants()?;
        Ok(chain)
    }

    pub fn space(&self) -> StateSpace {
        self.space
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn probability(&self, from: usize, to: usize) -> f64 {
        self.transition[from * self.size + to]
    }

    pub fn row(&self, from: usize) -> &[f64] {
        &self.transition[from * self.size..(from + 1) * self.size]
    }

    pub fn errors(&self) -> &[f64] {
        &self.err
    }

    pub fn init(&self) -> &[f64] {
        &self.init
    }

    pub fn is_elitist(&self) -> bool {
        self.elitist
    }

    pub fn state_label(&self, s: usize) -> String {
        match self.space {
            StateSpace::Full { n } => BitString::from_index(s, n).to_string(),
            StateSpace::Levels { .. } => format!("|x|={s}"),
            StateSpace::Custom => format!("s{s}"),
        }
    }

    /// Replaces the initial distribution.
    pub fn set_init(&mut self, init: Vec<f64>) -> Result<()> {
        if init.len() != self.size {
            return Err(Error::DimensionMismatch {
                expected: self.size,
                got: init.len(),
            });
        }
        if init.iter().any(|&w| !(w >= 0.0)) || (init.iter().sum::<f64>() - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(Error::InvalidParameter(
                "initial distribution must be nonnegative and sum to 1".into(),
            ));
        }
        self.init = init;
        Ok(())
    }

    pub fn with_init(mut self, init: &InitSpec) -> Result<Self> {
        let dist = match (self.space, init) {
            (StateSpace::Full { n }, InitSpec::UniformRandom) => vec![1.0 / (1usize << n) as f64; self.size],
            (StateSpace::Levels { n }, InitSpec::UniformRandom) => binomial_pmf(n, 0.5),
            (StateSpace::Full { n }, InitSpec::AllZeros) => point_mass(self.size, 0, n)?,
            (StateSpace::Levels { n }, InitSpec::AllZeros) => point_mass(self.size, 0, n)?,
            (StateSpace::Full { n }, InitSpec::Fixed { bits }) => point_mass(self.size, bits.to_index(), n)
                .and_then(|d| if bits.len() == n { Ok(d) } else { Err(mismatch(n, bits.len())) })?,
            (StateSpace::Levels { n }, InitSpec::Fixed { bits }) => point_mass(self.size, bits.ones_count(), n)
                .and_then(|d| if bits.len() == n { Ok(d) } else { Err(mismatch(n, bits.len())) })?,
            (StateSpace::Custom, _) => {
                return Err(Error::InvalidParameter(
                    "custom chains take an explicit initial distribution".into(),
                ))
            }
        };
        self.set_init(dist)?;
        Ok(self)
    }

    fn check_invariants(&self) -> Result<()> {
        for s in 0..self.size {
            let row = self.row(s);
            if row.iter().any(|&p| !(p >= 0.0)) {
                return Err(Error::ChainInvariant(format!("row {s} has a negative entry")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                return Err(Error::ChainInvariant(format!("row {s} sums to {sum}")));
            }
            if !(self.err[s] >= 0.0) {
                return Err(Error::ChainInvariant(format!("state {s} has error {}", self.err[s])));
            }
            if self.elitist {
                if let Some(t) = (0..self.size).find(|&t| row[t] > 0.0 && self.err[t] > self.err[s]) {
                    return Err(Error::ChainInvariant(format!(
                        "elitist chain moves from {} to worse state {}",
                        self.state_label(s),
                        self.state_label(t)
                    )));
                }
            }
        }
        if (self.init.iter().sum::<f64>() - 1.0).abs() > ROW_SUM_TOLERANCE {
            return Err(Error::ChainInvariant("initial distribution does not sum to 1".into()));
        }
        Ok(())
    }

    /// `P v`: the expected value of `v` one step ahead, per starting state.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        let dot = |(i, o): (usize, &mut f64)| {
            *o = self.row(i).iter().zip(v).map(|(p, x)| p * x).sum();
        };
        if self.size >= PAR_THRESHOLD {
            out.par_iter_mut().enumerate().for_each(dot);
        } else {
            out.iter_mut().enumerate().for_each(dot);
        }
        out
    }

    /// `π P`: the state distribution one step later.
    pub fn push_forward(&self, dist: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.size];
        let size = self.size;
        let block = |(b, chunk): (usize, &mut [f64])| {
            let j0 = b * COLUMN_BLOCK;
            for (i, &w) in dist.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                let row = &self.transition[i * size + j0..i * size + j0 + chunk.len()];
                for (o, &p) in chunk.iter_mut().zip(row) {
                    *o += w * p;
                }
            }
        };
        if size >= PAR_THRESHOLD {
            out.par_chunks_mut(COLUMN_BLOCK).enumerate().for_each(block);
        } else {
            out.chunks_mut(COLUMN_BLOCK).enumerate().for_each(block);
        }
        out
    }

    /// `e[0], ..., e[horizon]`, one matrix-vector product per step.
    pub fn expected_error_curve(&self, horizon: usize) -> Vec<f64> {
        let mut v = self.err.clone();
        let mut out = Vec::with_capacity(horizon + 1);
        out.push(dot(&self.init, &v));
        for _ in 0..horizon {
            v = self.apply(&v);
            out.push(dot(&self.init, &v));
        }
        out
    }

    pub fn exact_expected_error(&self, t: usize) -> f64 {
        *self.expected_error_curve(t).last().expect("curve has t + 1 entries")
    }

    /// Largest one-step increase of the expected error over all states; a value
    /// `<= 0` means the error process is a supermartingale.
    pub fn max_expected_increase(&self) -> (f64, usize) {
        let next = self.apply(&self.err);
        next.iter()
            .zip(&self.err)
            .map(|(a, b)| a - b)
            .enumerate()
            .fold((f64::NEG_INFINITY, 0), |best, (s, d)| if d > best.0 { (d, s) } else { best })
    }

    /// `t,exact_error` rows for `t = 0..=horizon`.
    pub fn write_curve_csv<W: Write>(&self, horizon: usize, mut w: W) -> Result<()> {
        writeln!(w, "t,exact_error")?;
        for (t, e) in self.expected_error_curve(horizon).into_iter().enumerate() {
            writeln!(w, "{t},{}", fmt_real(e))?;
        }
        Ok(())
    }
}

/// Row accumulator with Neumaier compensation: the stay probability collects
/// thousands of small terms.
struct RowSum<'a> {
    row: &'a mut [f64],
    comp: Vec<f64>,
}

impl<'a> RowSum<'a> {
    fn new(row: &'a mut [f64]) -> Self {
        let comp = vec![0.0; row.len()];
        Self { row, comp }
    }

    fn add(&mut self, j: usize, v: f64) {
        let a = self.row[j];
        let s = a + v;
        self.comp[j] += if a.abs() >= v.abs() { (a - s) + v } else { (v - s) + a };
        self.row[j] = s;
    }

    fn finish(self) {
        for (r, c) in self.row.iter_mut().zip(self.comp) {
            *r += c;
        }
    }
}

fn mismatch(n: usize, got: usize) -> Error {
    Error::DimensionMismatch { expected: n, got }
}

fn point_mass(size: usize, at: usize, n: usize) -> Result<Vec<f64>> {
    if at >= size {
        return Err(mismatch(n, at));
    }
    let mut d = vec![0.0; size];
    d[at] = 1.0;
    Ok(d)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact transition matrix over `{0,1}^n`, by enumerating every move of the kernel.
pub fn build_full_chain(algo: &AlgorithmSpec, spec: &FitnessSpec) -> Result<ChainModel> {
    let n = spec.n();
    if n > FULL_CHAIN_MAX_N {
        return Err(Error::StateSpaceTooLarge {
            n,
            cap: FULL_CHAIN_MAX_N,
        });
    }
    let kernel = algo.kernel(n)?;
    let size = 1usize << n;
    let states: Vec<BitString> = (0..size).map(|i| BitString::from_index(i, n)).collect();

    // Dense fitness ranks make every acceptance test an integer comparison.
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| spec.compare_unchecked(&states[a], &states[b]));
    let mut rank = vec![0usize; size];
    for w in 1..size {
        let same = spec.compare_unchecked(&states[order[w]], &states[order[w - 1]]) == Ordering::Equal;
        rank[order[w]] = rank[order[w - 1]] + usize::from(!same);
    }

    let mut transition = vec![0.0; size * size];
    let fill_full_row = |x: usize, row: &mut RowSum| match kernel {
        Kernel::Rls => {
            for i in 0..n {
                let y = x ^ (1 << i);
                row.add(if rank[y] >= rank[x] { y } else { x }, 1.0 / n as f64);
            }
        }
        Kernel::Ea { p } => {
            let mask_prob: Vec<f64> = (0..=n as i32).map(|k| p.powi(k) * (1.0 - p).powi(n as i32 - k)).collect();
            for m in 0..size {
                let y = x ^ m;
                row.add(if rank[y] >= rank[x] { y } else { x }, mask_prob[m.count_ones() as usize]);
            }
        }
        Kernel::Sa { temperature } => {
            if spec.is_optimal(&states[x]) {
                row.add(x, 1.0);
                return;
            }
            let single = 0.5 / n as f64;
            let pair = 0.5 / (n * (n - 1) / 2) as f64;
            let mut propose = |y: usize, prob: f64| {
                let accept = if rank[y] >= rank[x] {
                    1.0
                } else {
                    (spec.delta_unchecked(&states[x], &states[y]) / temperature).exp()
                };
                row.add(y, prob * accept);
                row.add(x, prob * (1.0 - accept));
            };
            for i in 0..n {
                propose(x ^ (1 << i), single);
            }
            for i in 0..n {
                for j in i + 1..n {
                    propose(x ^ (1 << i) ^ (1 << j), pair);
                }
            }
        }
    };
    let fill_row = |(x, row): (usize, &mut [f64])| {
        let mut row = RowSum::new(row);
        fill_full_row(x, &mut row);
        row.finish();
    };
    if size >= PAR_THRESHOLD {
        transition.par_chunks_mut(size).enumerate().for_each(fill_row);
    } else {
        transition.chunks_mut(size).enumerate().for_each(fill_row);
    }

    let chain = ChainModel {
        space: StateSpace::Full { n },
        size,
        transition,
        err: states.iter().map(|x| spec.error_unchecked(x)).collect(),
        init: vec![1.0 / size as f64; size],
        elitist: kernel.is_elitist(),
    };
    chain.check_invariants()?;
    Ok(chain)
}

/// Exact chain over ones-count levels, valid because OneMax and Zigzag depend on
/// `|x|` only and all three kernels treat bit positions exchangeably.
pub fn build_level_chain(algo: &AlgorithmSpec, spec: &FitnessSpec) -> Result<ChainModel> {
    if !spec.kind().is_level_symmetric() {
        return Err(Error::NotLevelSymmetric(spec.kind().name().into()));
    }
    let n = spec.n();
    if n > LEVEL_CHAIN_MAX_N {
        return Err(Error::StateSpaceTooLarge {
            n,
            cap: LEVEL_CHAIN_MAX_N,
        });
    }
    let kernel = algo.kernel(n)?;
    let size = n + 1;
    let value: Vec<f64> = (0..=n)
        .map(|k| spec.level_value(k))
        .collect::<Result<_>>()?;
    let f_star = spec.optimum();
    let nf = n as f64;

    let mut transition = vec![0.0; size * size];
    for (i, row) in transition.chunks_mut(size).enumerate() {
        let mut row = RowSum::new(row);
        let zeros = n - i;
        match kernel {
            Kernel::Rls => {
                if zeros > 0 {
                    let target = if value[i + 1] >= value[i] { i + 1 } else { i };
                    row.add(target, zeros as f64 / nf);
                }
                if i > 0 {
                    let target = if value[i - 1] >= value[i] { i - 1 } else { i };
                    row.add(target, i as f64 / nf);
                }
            }
            Kernel::Ea { p } => {
                // zero-to-one and one-to-zero flip counts are independent binomials
                let up = binomial_pmf(zeros, p);
                let down = binomial_pmf(i, p);
                for (a, &pa) in up.iter().enumerate() {
                    for (b, &pb) in down.iter().enumerate() {
                        let j = i + a - b;
                        let target = if value[j] >= value[i] { j } else { i };
                        row.add(target, pa * pb);
                    }
                }
            }
            Kernel::Sa { temperature } => {
                if i == n {
                    row.add(i, 1.0);
                    row.finish();
                    continue;
                }
                let pairs = (n * (n - 1) / 2) as f64;
                let mut moves = vec![
                    (i + 1, 0.5 * zeros as f64 / nf),
                    (i, 0.5 * (i * zeros) as f64 / pairs),
                ];
                if i > 0 {
                    moves.push((i - 1, 0.5 * i as f64 / nf));
                }
                if zeros >= 2 {
                    moves.push((i + 2, 0.5 * (zeros * (zeros - 1) / 2) as f64 / pairs));
                }
                if i >= 2 {
                    moves.push((i - 2, 0.5 * (i * (i - 1) / 2) as f64 / pairs));
                }
                for (j, prob) in moves {
                    let accept = if value[j] >= value[i] {
                        1.0
                    } else {
                        ((value[j] - value[i]) / temperature).exp()
                    };
                    row.add(j, prob * accept);
                    row.add(i, prob * (1.0 - accept));
                }
            }
        }
        row.finish();
    }

    let chain = ChainModel {
        space: StateSpace::Levels { n },
        size,
        transition,
        err: value.iter().map(|v| f_star - v).collect(),
        init: binomial_pmf(n, 0.5),
        elitist: kernel.is_elitist(),
    };
    chain.check_invariants()?;
    Ok(chain)
}

/// One- and two-step error-change ratio extrema over non-optimal states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaSummary {
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta2_min: f64,
    pub delta2_max: f64,
    pub argmin_state: String,
    pub argmax_state: String,
    pub argmin_index: usize,
    pub argmax_index: usize,
}

impl DeltaSummary {
    /// `1 - δ''_min <= (1 - δ_min)^2` and `1 - δ''_max >= (1 - δ_max)^2`, up to `tol`.
    pub fn two_step_inequalities_hold(&self, tol: f64) -> (bool, bool) {
        let upper = 1.0 - self.delta2_min <= (1.0 - self.delta_min).powi(2) + tol;
        let lower = 1.0 - self.delta2_max >= (1.0 - self.delta_max).powi(2) - tol;
        (upper, lower)
    }
}

/// Per-state one-step ratios `(err[s] - (P err)[s]) / err[s]`, `None` on optimal states.
pub fn one_step_ratios(chain: &ChainModel) -> Vec<Option<f64>> {
    let next = chain.apply(&chain.err);
    chain
        .err
        .iter()
        .zip(&next)
        .map(|(&e, &m)| (e > 0.0).then(|| (e - m) / e))
        .collect()
}

pub fn delta_summary(chain: &ChainModel) -> Result<DeltaSummary> {
    let one = chain.apply(&chain.err);
    let two = chain.apply(&one);
    let mut best: Option<DeltaSummary> = None;
    for s in (0..chain.size).filter(|&s| chain.err[s] > 0.0) {
        let e = chain.err[s];
        let r1 = (e - one[s]) / e;
        let r2 = (e - two[s]) / e;
        let b = best.get_or_insert_with(|| DeltaSummary {
            delta_min: r1,
            delta_max: r1,
            delta2_min: r2,
            delta2_max: r2,
            argmin_state: chain.state_label(s),
            argmax_state: chain.state_label(s),
            argmin_index: s,
            argmax_index: s,
        });
        if r1 < b.delta_min {
            b.delta_min = r1;
            b.argmin_index = s;
            b.argmin_state = chain.state_label(s);
        }
        if r1 > b.delta_max {
            b.delta_max = r1;
            b.argmax_index = s;
            b.argmax_state = chain.state_label(s);
        }
        b.delta2_min = b.delta2_min.min(r2);
        b.delta2_max = b.delta2_max.max(r2);
    }
    best.ok_or(Error::AllStatesOptimal)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeCheck {
    OneStepLower,
    OneStepUpper,
    TwoStepLower,
    TwoStepUpper,
    TwoStepInequality,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub t: usize,
    pub check: EnvelopeCheck,
    pub bound: f64,
    pub value: f64,
    pub relative: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SandwichReport {
    pub summary: DeltaSummary,
    pub horizon: usize,
    pub tolerance: f64,
    pub max_violation: f64,
    pub violations: Vec<Violation>,
    /// `e[0](1-δ_min)^t - e[t]` per step.
    pub upper_gap: Vec<f64>,
    /// `e[t] - e[0](1-δ_max)^t` per step.
    pub lower_gap: Vec<f64>,
    /// The two-step envelope is never looser than the squared one-step one.
    pub two_step_tighter: bool,
    pub assumption: String,
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn relative_excess(excess: f64, bound: f64, value: f64) -> f64 {
    excess / bound.abs().max(value.abs()).max(f64::MIN_POSITIVE)
}

/// Checks `e[0](1-δ_max)^t <= e[t] <= e[0](1-δ_min)^t` for `t <= horizon`, the
/// two-step analogue at even steps, and the two-step ratio inequalities.
pub fn verify_sandwich(chain: &ChainModel, horizon: usize) -> Result<SandwichReport> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    let summary = delta_summary(chain)?;
    let curve = chain.expected_error_curve(horizon);
    let e0 = curve[0];
    let tol = SANDWICH_TOLERANCE;
    let mut violations = Vec::new();
    let mut max_violation = f64::NEG_INFINITY;
    let mut record = |t: usize, check: EnvelopeCheck, bound: f64, value: f64, excess: f64| {
        let rel = relative_excess(excess, bound, value);
        max_violation = max_violation.max(rel);
        if rel > tol {
            violations.push(Violation {
                t,
                check,
                bound,
                value,
                relative: rel,
            });
        }
    };

    let mut upper_gap = Vec::with_capacity(curve.len());
    let mut lower_gap = Vec::with_capacity(curve.len());
    let mut two_step_tighter = true;
    for (t, &e) in curve.iter().enumerate() {
        let upper = e0 * envelope_factor(summary.delta_min, t);
        let lower = e0 * envelope_factor(summary.delta_max, t);
        record(t, EnvelopeCheck::OneStepUpper, upper, e, e - upper);
        record(t, EnvelopeCheck::OneStepLower, lower, e, lower - e);
        upper_gap.push(upper - e);
        lower_gap.push(e - lower);
        if t % 2 == 0 {
            let k = t / 2;
            let upper2 = e0 * envelope_factor(summary.delta2_min, k);
            let lower2 = e0 * envelope_factor(summary.delta2_max, k);
            record(t, EnvelopeCheck::TwoStepUpper, upper2, e, e - upper2);
            record(t, EnvelopeCheck::TwoStepLower, lower2, e, lower2 - e);
            two_step_tighter &= relative_excess(upper2 - upper, upper, upper2) <= tol
                && relative_excess(lower - lower2, lower, lower2) <= tol;
        }
    }
    let (ineq_upper, ineq_lower) = summary.two_step_inequalities_hold(tol);
    if !ineq_upper {
        let bound = (1.0 - summary.delta_min).powi(2);
        record(0, EnvelopeCheck::TwoStepInequality, bound, 1.0 - summary.delta2_min, 1.0 - summary.delta2_min - bound);
    }
    if !ineq_lower {
        let bound = (1.0 - summary.delta_max).powi(2);
        record(0, EnvelopeCheck::TwoStepInequality, bound, 1.0 - summary.delta2_max, bound - (1.0 - summary.delta2_max));
    }

    Ok(SandwichReport {
        summary,
        horizon,
        tolerance: tol,
        max_violation,
        violations,
        upper_gap,
        lower_gap,
        two_step_tighter,
        assumption: HOMOGENEITY_NOTE.into(),
    })
}

/// `(1-δ)^t`, allowing any real `δ <= 1` (negative `δ` gives a growing envelope).
pub(crate) fn envelope_factor(delta: f64, t: usize) -> f64 {
    if t == 0 {
        1.0
    } else if delta >= 1.0 {
        0.0
    } else {
        (t as f64 * (-delta).ln_1p()).exp()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuffixViolation {
    pub t: usize,
    pub prefix: usize,
    /// 1-based bit position.
    pub bit: usize,
    pub probability: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuffixReport {
    pub n: usize,
    pub horizon: usize,
    pub tolerance: f64,
    pub checks: usize,
    pub max_deviation: f64,
    pub violations: Vec<SuffixViolation>,
}

impl SuffixReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Conditional levels with less mass than this are skipped.
const SUFFIX_MASS_FLOOR: f64 = 1e-200;

/// Iterates the (1+1) EA on LeadingOnes from a uniform start and checks that,
/// given `i` leading ones, bit `i+1` is 0 and every bit `j >= i+2` is 1 with
/// probability 1/2.
pub fn verify_uniform_suffix(n: usize, horizon: usize) -> Result<SuffixReport> {
    if n > FULL_CHAIN_MAX_N {
        return Err(Error::StateSpaceTooLarge {
            n,
            cap: FULL_CHAIN_MAX_N,
        });
    }
    let chain = build_full_chain(&AlgorithmSpec::ea(), &FitnessSpec::leading_ones(n)?)?;
    let tolerance = 1e-9;
    let prefix: Vec<usize> = (0..chain.size).map(|x| (!x).trailing_zeros().min(n as u32) as usize).collect();
    let mut dist = chain.init.clone();
    let mut report = SuffixReport {
        n,
        horizon,
        tolerance,
        checks: 0,
        max_deviation: 0.0,
        violations: Vec::new(),
    };
    for t in 0..=horizon {
        let mut mass = vec![0.0; n + 1];
        let mut ones = vec![vec![0.0; n]; n + 1];
        for (x, &w) in dist.iter().enumerate() {
            let i = prefix[x];
            mass[i] += w;
            for (j, acc) in ones[i].iter_mut().enumerate() {
                if (x >> j) & 1 == 1 {
                    *acc += w;
                }
            }
        }
        for i in 0..n {
            if mass[i] < SUFFIX_MASS_FLOOR {
                continue;
            }
            for j in i..n {
                let prob = ones[i][j] / mass[i];
                let expected = if j == i { 0.0 } else { 0.5 };
                let dev = (prob - expected).abs();
                report.checks += 1;
                report.max_deviation = report.max_deviation.max(dev);
                if dev > tolerance {
                    report.violations.push(SuffixViolation {
                        t,
                        prefix: i,
                        bit: j + 1,
                        probability: prob,
                    });
                }
            }
        }
        if t < horizon {
            dist = chain.push_forward(&dist);
        }
    }
    Ok(report)
}

/// Everything the CLI writes to `delta_report.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaReport {
    pub delta_min: f64,
    pub delta_max: f64,
    pub delta2_min: f64,
    pub delta2_max: f64,
    pub argmin_state: String,
    pub argmax_state: String,
    pub horizon: usize,
    pub max_violation: f64,
    pub violations: Vec<Violation>,
    pub two_step_tighter: bool,
    pub supermartingale_max_increase: f64,
    pub assumption: String,
}

impl DeltaReport {
    pub fn new(chain: &ChainModel, sandwich: &SandwichReport) -> Self {
        let s = &sandwich.summary;
        Self {
            delta_min: s.delta_min,
            delta_max: s.delta_max,
            delta2_min: s.delta2_min,
            delta2_max: s.delta2_max,
            argmin_state: s.argmin_state.clone(),
            argmax_state: s.argmax_state.clone(),
            horizon: sandwich.horizon,
            max_violation: sandwich.max_violation,
            violations: sandwich.violations.clone(),
            two_step_tighter: sandwich.two_step_tighter,
            supermartingale_max_increase: chain.max_expected_increase().0,
            assumption: sandwich.assumption.clone(),
        }
    }
}
