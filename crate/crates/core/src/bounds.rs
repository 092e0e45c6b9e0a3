//! Closed-form error envelopes `e0 (1 - δ)^t` and the ratio functions behind them.
//!
//! "Rigorous" curves use exact numeric ratio extrema and are valid bounds;
//! "nominal" curves drop lower-order terms and exist only as figure overlays.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::envelope_factor;
use crate::simulate::fmt_real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Upper,
    Lower,
    Exact,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Upper => "upper",
            BoundKind::Lower => "lower",
            BoundKind::Exact => "exact",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub label: String,
    pub kind: BoundKind,
    pub e0: f64,
    /// The ratio used for the envelope, absent for non-exponential curves.
    pub delta: Option<f64>,
    pub t_grid: Vec<usize>,
    pub values: Vec<f64>,
}

impl BoundCurve {
    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_kind(mut self, kind: BoundKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn value_at(&self, t: usize) -> Option<f64> {
        self.t_grid.iter().position(|&s| s == t).map(|k| self.values[k])
    }
}

/// Writes `t,value,label,kind` rows, curve after curve.
pub fn write_bounds_csv<W: Write>(curves: &[BoundCurve], mut w: W) -> Result<()> {
    writeln!(w, "t,value,label,kind")?;
    for c in curves {
        for (t, v) in c.t_grid.iter().zip(&c.values) {
            writeln!(w, "{t},{},{},{}", fmt_real(*v), c.label, c.kind.name())?;
        }
    }
    Ok(())
}

/// `0, 1, ..., steps`.
pub fn full_grid(steps: usize) -> Vec<usize> {
    (0..=steps).collect()
}

fn check_e0(e0: f64) -> Result<()> {
    if !(e0 >= 0.0 && e0.is_finite()) {
        return Err(Error::InvalidParameter(format!("initial error must be finite and >= 0, got {e0}")));
    }
    Ok(())
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::InvalidParameter(format!("n must be at least {min}, got {n}")));
    }
    Ok(())
}

/// `δ = 1` is allowed here: with `n = 1` several envelopes collapse to zero after one step.
fn envelope(label: &str, kind: BoundKind, e0: f64, delta: f64, t_grid: &[usize]) -> Result<BoundCurve> {
    check_e0(e0)?;
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!("delta must lie in [0, 1], got {delta}")));
    }
    Ok(BoundCurve {
        label: label.into(),
        kind,
        e0,
        delta: Some(delta),
        t_grid: t_grid.to_vec(),
        values: t_grid.iter().map(|&t| e0 * envelope_factor(delta, t)).collect(),
    })
}

/// `e0 (1 - δ)^t` evaluated as `e0 exp(t log1p(-δ))`.
pub fn exp_envelope(e0: f64, delta: f64, t_grid: &[usize]) -> Result<BoundCurve> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidParameter(format!("delta must lie in [0, 1), got {delta}")));
    }
    envelope("envelope", BoundKind::Upper, e0, delta, t_grid)
}

/// RLS on any linear function: `e[t] = e0 (1 - 1/n)^t`.
pub fn rls_linear_exact(e0: f64, n: usize, t_grid: &[usize]) -> Result<BoundCurve> {
    check_n(n, 1)?;
    envelope("rls_linear_exact", BoundKind::Exact, e0, 1.0 / n as f64, t_grid)
}

/// `p (1 - p)^(n-1)`: probability that exactly one given bit flips.
pub fn ea_mutation_delta(n: usize, p: f64) -> f64 {
    p * ((n as f64 - 1.0) * (-p).ln_1p()).exp()
}

pub fn ea_linear_upper(e0: f64, n: usize, t_grid: &[usize]) -> Result<BoundCurve> {
    check_n(n, 1)?;
    let delta = if n == 1 { 1.0 } else { ea_mutation_delta(n, 1.0 / n as f64) };
    envelope("ea_linear_upper", BoundKind::Upper, e0, delta, t_grid)
}

pub fn ea_linear_lower(e0: f64, n: usize, t_grid: &[usize]) -> Result<BoundCurve> {
    check_n(n, 1)?;
    envelope("ea_linear_lower", BoundKind::Lower, e0, 1.0 / n as f64, t_grid)
}

/// Upper envelope of the (1+1) EA with mutation rate `p` on linear functions.
pub fn ea_mutation_bound(e0: f64, n: usize, p: f64, t_grid: &[usize]) -> Result<BoundCurve> {
    check_n(n, 1)?;
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("mutation rate must lie in (0, 1), got {p}")));
    }
    envelope("ea_mutation_upper", BoundKind::Upper, e0, ea_mutation_delta(n, p), t_grid)
}

/// `S(k) = Σ_{j=1..k} j / 2^j = 2 - (k + 2) / 2^k`.
pub fn geometric_s(k: usize) -> f64 {
    2.0 - (k as f64 + 2.0) * 0.5f64.powi(k as i32)
}

/// Lower estimate of the LeadingOnes error-change ratio at `i` leading ones.
pub fn leadingones_case_ratio(i: usize, n: usize) -> Result<f64> {
    check_n(n, 1)?;
    if i >= n {
        return Err(Error::InvalidParameter(format!("level {i} outside 0..={}", n - 1)));
    }
    let nf = n as f64;
    let keep = (i as f64 * (-1.0 / nf).ln_1p()).exp();
    if i + 1 == n {
        return Ok(keep / nf);
    }
    Ok(keep / nf * geometric_s(n - i - 1) / (n - i) as f64)
}

/// Exact LeadingOnes error-change ratio at `i` leading ones when the bits behind
/// the first zero are uniform: the suffix contributes `2 - 2^-(n-i-1)` expected
/// levels including the flipped bit.
pub fn leadingones_exact_level_ratio(i: usize, n: usize) -> Result<f64> {
    check_n(n, 1)?;
    if i >= n {
        return Err(Error::InvalidParameter(format!("level {i} outside 0..={}", n - 1)));
    }
    let nf = n as f64;
    let keep = (i as f64 * (-1.0 / nf).ln_1p()).exp();
    let gain = 2.0 - 0.5f64.powi((n - i - 1) as i32);
    Ok(keep / nf * gain / (n - i) as f64)
}

/// `(δ_min, δ_max)` for the (1+1) EA with `p = 1/n` on LeadingOnes.
///
/// `δ_min` minimises the case ratios; `δ_max` maximises the exact level ratios,
/// which for `n >= 5` equals `(1-1/n)^(n-1)/n`.
pub fn leadingones_delta_bounds(n: usize) -> Result<(f64, f64)> {
    check_n(n, 2)?;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        lo = lo.min(leadingones_case_ratio(i, n)?);
        hi = hi.max(leadingones_exact_level_ratio(i, n)?);
    }
    Ok((lo, hi))
}

/// Expected LeadingOnes error of a uniform random string.
pub fn leadingones_initial_error(n: usize) -> f64 {
    n as f64 - 1.0 + 0.5f64.powi(n as i32)
}

pub fn leadingones_upper(n: usize, t_grid: &[usize]) -> Result<BoundCurve> {
    let (lo, _) = leadingones_delta_bounds(n)?;
    envelope("leadingones_upper_rigorous", BoundKind::Upper, leadingones_initial_error(n), lo, t_grid)
}

pub fn leadingones_lower(n: usize, t_grid: &[usize]) -> Result<BoundCurve> {
    let (_, hi) = leadingones_delta_bounds(n)?;
    envelope("leadingones_lower_rigorous", BoundKind::Lower, leadingones_initial_error(n), hi, t_grid)
}

/// `δ = 2/n²`.
pub fn leadingones_upper_nominal(n: usize, t_grid: &[usize]) -> Result<BoundCurve> {
    check_n(n, 2)?;
    let delta = 2.0 / (n * n) as f64;
    envelope("leadingones_upper_nominal", BoundKind::Upper, leadingones_initial_error(n), delta, t_grid)
}

/// `δ = 1/(e n)`.
pub fn leadingones_lower_nominal(n: usize, t_grid: &[usize]) -> Result<BoundCurve> {
    check_n(n, 2)?;
    let delta = 1.0 / (std::f64::consts::E * n as f64);
    envelope("leadingones_lower_nominal", BoundKind::Lower, leadingones_initial_error(n), delta, t_grid)
}

/// Linear fixed-budget approximation `n - 1 - 2t/n`; negative once `t > n(n-1)/2`.
pub fn leadingones_fixed_budget(n: usize, t: usize) -> f64 {
    n as f64 - 1.0 - 2.0 * t as f64 / n as f64
}

pub fn leadingones_fixed_budget_curve(n: usize, t_grid: &[usize]) -> Result<BoundCurve> {
    check_n(n, 1)?;
    Ok(BoundCurve {
        label: "leadingones_fixed_budget".into(),
        kind: BoundKind::Exact,
        e0: leadingones_fixed_budget(n, 0),
        delta: None,
        t_grid: t_grid.to_vec(),
        values: t_grid.iter().map(|&t| leadingones_fixed_budget(n, t)).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MutationRateOptimum {
    pub rate: f64,
    /// The maximiser sits on the boundary `p = 1` rather than inside `(0, 1)`.
    pub boundary: bool,
}

/// Maximiser of `p (1 - p)^(n-1)` over `(0, 1)`, which is `1/n`.
pub fn optimal_mutation_rate(n: usize) -> Result<MutationRateOptimum> {
    check_n(n, 1)?;
    Ok(MutationRateOptimum {
        rate: 1.0 / n as f64,
        boundary: n == 1,
    })
}

/// `ln f(a) - ln f(b)` for `f(p) = p (1 - p)^(n-1)`, accurate when `a ≈ b`.
fn log_ratio(n: usize, a: f64, b: f64) -> f64 {
    ((a - b) / b).ln_1p() + (n as f64 - 1.0) * ((b - a) / (1.0 - b)).ln_1p()
}

/// Golden-section search for the maximiser of `p (1 - p)^(n-1)` on `(0, 1)`.
pub fn golden_section_mutation_rate(n: usize, tol: f64) -> Result<f64> {
    check_n(n, 2)?;
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    while hi - lo > tol {
        if log_ratio(n, c, d) > 0.0 {
            hi = d;
            d = c;
            c = hi - inv_phi * (hi - lo);
        } else {
            lo = c;
            c = d;
            d = lo + inv_phi * (hi - lo);
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Best of `points` evenly spaced interior rates.
pub fn grid_scan_mutation_rate(n: usize, points: usize) -> Result<f64> {
    check_n(n, 1)?;
    if points == 0 {
        return Err(Error::InvalidParameter("grid needs at least one point".into()));
    }
    let h = 1.0 / (points + 1) as f64;
    Ok((1..=points)
        .map(|k| k as f64 * h)
        .fold((f64::NEG_INFINITY, 0.0), |best, p| {
            let v = ea_mutation_delta(n, p);
            if v > best.0 {
                (v, p)
            } else {
                best
            }
        })
        .1)
}

/// `(1/n²)(1 - 1/n)^(n-2)`: two specific zeros flip and nothing else.
pub fn zigzag_ea_delta(n: usize) -> f64 {
    let nf = n as f64;
    ((nf - 2.0) * (-1.0 / nf).ln_1p()).exp() / (nf * nf)
}

pub fn zigzag_ea_upper(e0: f64, n: usize, t_grid: &[usize]) -> Result<BoundCurve> {
    check_n(n, 2)?;
    envelope("zigzag_ea_upper", BoundKind::Upper, e0, zigzag_ea_delta(n), t_grid)
}

/// Four-event estimate of the SA-T error-change ratio on Zigzag at an even level `i`:
///
/// `(n-i-1)/(2n²) - e^(-1/T)/(2n²) - i e^(-3/T)/(2(n-i)n²) - i(i-1) e^(-2/T)/(2(n-i)n²)`.
pub fn zigzag_sa_ratio(i: usize, n: usize, temperature: f64) -> Result<f64> {
    check_n(n, 2)?;
    if i % 2 != 0 || i + 2 > n {
        return Err(Error::InvalidParameter(format!("level must be even and at most n-2, got {i}")));
    }
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::InvalidParameter(format!("temperature must be positive, got {temperature}")));
    }
    let (nf, i_f) = (n as f64, i as f64);
    let n2 = 2.0 * nf * nf;
    let rest = nf - i_f;
    Ok((rest - 1.0) / n2 - (-1.0 / temperature).exp() / n2
        - i_f * (-3.0 / temperature).exp() / (rest * n2)
        - i_f * (i_f - 1.0) * (-2.0 / temperature).exp() / (rest * n2))
}

/// Minimum of [`zigzag_sa_ratio`] over even levels, with the minimising level.
pub fn zigzag_sa_delta_min(n: usize, temperature: f64) -> Result<(f64, usize)> {
    let mut best = (f64::INFINITY, 0);
    for i in (0..=n.saturating_sub(2)).step_by(2) {
        let r = zigzag_sa_ratio(i, n, temperature)?;
        if r < best.0 {
            best = (r, i);
        }
    }
    Ok(best)
}

pub fn zigzag_sa_upper(e0: f64, n: usize, temperature: f64, t_grid: &[usize]) -> Result<BoundCurve> {
    let (delta, level) = zigzag_sa_delta_min(n, temperature)?;
    if delta <= 0.0 {
        return Err(Error::TemperatureTooHigh { level, ratio: delta });
    }
    envelope("zigzag_sa_upper", BoundKind::Upper, e0, delta, t_grid)
}

/// `g_a(i) = (1 - 1/n)^i / (n - i)`.
pub fn supplement_g_a(i: usize, n: usize) -> f64 {
    let nf = n as f64;
    (i as f64 * (-1.0 / nf).ln_1p()).exp() / (n - i) as f64
}

/// `g_b(i) = S(n - i - 1)`.
pub fn supplement_g_b(i: usize, n: usize) -> f64 {
    geometric_s(n - i - 1)
}

/// `g(i) = g_a(i) g_b(i)`, the case ratio scaled by `n`.
pub fn supplement_g(i: usize, n: usize) -> Result<f64> {
    check_n(n, 2)?;
    if i + 2 > n {
        return Err(Error::InvalidParameter(format!("i must be at most n-2, got {i}")));
    }
    Ok(supplement_g_a(i, n) * supplement_g_b(i, n))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupplementCheck {
    LowerBound,
    UpperBound,
    GaIncreasing,
    GbDecreasing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupplementViolation {
    pub i: usize,
    pub check: SupplementCheck,
    pub value: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SupplementReport {
    pub n: usize,
    pub tolerance: f64,
    pub min_g: f64,
    pub max_g: f64,
    pub violations: Vec<SupplementViolation>,
}

impl SupplementReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Relative slack of the supplement checks. `g(0)` and `g(1)` undershoot `2/n` by
/// `O(n 2^-n)`, invisible in double precision once `n >= 100`.
pub const SUPPLEMENT_TOLERANCE: f64 = 1e-12;

/// Checks `2/n <= g(i) <= (1-1/n)^(n-1)` and the monotonicity of `g_a` (non-decreasing)
/// and `g_b` (non-increasing) for `0 <= i <= n-2`.
pub fn verify_supplement(n: usize) -> Result<SupplementReport> {
    check_n(n, 2)?;
    let tol = SUPPLEMENT_TOLERANCE;
    let nf = n as f64;
    let lower = 2.0 / nf;
    let upper = ((nf - 1.0) * (-1.0 / nf).ln_1p()).exp();
    let mut report = SupplementReport {
        n,
        tolerance: tol,
        min_g: f64::INFINITY,
        max_g: f64::NEG_INFINITY,
        violations: Vec::new(),
    };
    let mut violations = Vec::new();
    for i in 0..=n - 2 {
        let g = supplement_g(i, n)?;
        report.min_g = report.min_g.min(g);
        report.max_g = report.max_g.max(g);
        if g < lower * (1.0 - tol) {
            violations.push(SupplementViolation { i, check: SupplementCheck::LowerBound, value: g, bound: lower });
        }
        if g > upper * (1.0 + tol) {
            violations.push(SupplementViolation { i, check: SupplementCheck::UpperBound, value: g, bound: upper });
        }
        if i > 0 {
            let (a0, a1) = (supplement_g_a(i - 1, n), supplement_g_a(i, n));
            if a1 < a0 * (1.0 - tol) {
                violations.push(SupplementViolation { i, check: SupplementCheck::GaIncreasing, value: a1, bound: a0 });
            }
            let (b0, b1) = (supplement_g_b(i - 1, n), supplement_g_b(i, n));
            if b1 > b0 * (1.0 + tol) {
                violations.push(SupplementViolation { i, check: SupplementCheck::GbDecreasing, value: b1, bound: b0 });
            }
        }
    }
    report.violations = violations;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn envelope_examples() {
        let c = exp_envelope(99.0, 0.01, &[0, 100]).unwrap();
        assert_eq!(c.values[0], 99.0);
        assert!((c.values[1] - 36.237).abs() < 1e-3);
        let flat = exp_envelope(5.0, 0.0, &[0, 7, 1000]).unwrap();
        assert!(flat.values.iter().all(|&v| v == 5.0));
        assert!(exp_envelope(1.0, 1.0, &[0]).is_err());
        assert!(exp_envelope(1.0, -0.1, &[0]).is_err());
        assert!(exp_envelope(-1.0, 0.1, &[0]).is_err());
    }

    #[test]
    fn envelope_matches_naive_power() {
        // dyadic rates keep 1 - δ exact, so only the two evaluation orders differ
        for k in [1, 2, 4, 10, 17, 26] {
            let delta = 0.5f64.powi(k);
            for &t in &[1usize, 10, 1000, 100_000, 1_000_000] {
                let v = exp_envelope(1.0, delta, &[t]).unwrap().values[0];
                let naive = (1.0 - delta).powf(t as f64);
                if naive > 1e-300 {
                    assert!(close(v, naive, 1e-12), "{delta} {t}: {v} vs {naive}");
                }
            }
        }
    }

    #[test]
    fn linear_envelopes() {
        let up = ea_linear_upper(1.0, 100, &[1]).unwrap();
        assert!((up.delta.unwrap() - 0.0036973).abs() < 1e-7);
        for n in [1usize, 2, 5, 30] {
            let grid = full_grid(50);
            let u = ea_linear_upper(3.0, n, &grid).unwrap();
            let l = ea_linear_lower(3.0, n, &grid).unwrap();
            let r = rls_linear_exact(3.0, n, &grid).unwrap();
            for k in 0..grid.len() {
                assert!(l.values[k] <= r.values[k] && r.values[k] <= u.values[k]);
            }
        }
        let one = ea_linear_upper(2.0, 1, &[0, 1, 2]).unwrap();
        assert_eq!(one.values, vec![2.0, 0.0, 0.0]);
        let m = ea_mutation_bound(1.0, 10, 0.2, &[0]).unwrap();
        assert!((m.delta.unwrap() - 0.026844).abs() < 1e-6);
        let a = ea_mutation_bound(1.0, 17, 1.0 / 17.0, &[0]).unwrap().delta.unwrap();
        let b = ea_linear_upper(1.0, 17, &[0]).unwrap().delta.unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn geometric_sum_closed_form() {
        for k in 0..=60 {
            let direct: f64 = (1..=k).map(|j| j as f64 / 2f64.powi(j as i32)).sum();
            assert!((geometric_s(k) - direct).abs() < 1e-15, "{k}");
        }
        assert_eq!(geometric_s(1), 0.5);
    }

    #[test]
    fn leadingones_ratios() {
        let n = 100;
        let nf = n as f64;
        let r = leadingones_case_ratio(n - 2, n).unwrap();
        assert!(close(r, (1.0 / nf) * (1.0 - 1.0 / nf).powi(n as i32 - 2) * 0.25, 1e-14));
        let end = leadingones_case_ratio(n - 1, n).unwrap();
        assert!((end - 0.0036973).abs() < 1e-7);
        assert!(leadingones_case_ratio(n, n).is_err());
        let (lo, hi) = leadingones_delta_bounds(n).unwrap();
        assert!(lo >= 0.9 * 2.0 / (nf * nf) && lo <= 3.0 / (nf * nf));
        assert!(lo <= 2.0 / (nf * nf) + 1e-4 / (nf * nf));
        assert!(close(hi, (1.0 - 1.0 / nf).powi(n as i32 - 1) / nf, 1e-14));
        let d = |n| leadingones_delta_bounds(n).unwrap().0;
        assert!(d(200) < d(100) && d(100) < d(50));
        for i in 0..n {
            assert!(leadingones_case_ratio(i, n).unwrap() <= leadingones_exact_level_ratio(i, n).unwrap());
        }
    }

    #[test]
    fn leadingones_curves() {
        let up = leadingones_upper(100, &[0]).unwrap();
        let lo = leadingones_lower(100, &[0]).unwrap();
        assert_eq!(up.values[0], 99.0 + 0.5f64.powi(100));
        assert_eq!(lo.values[0], up.values[0]);
        let nom = leadingones_upper_nominal(100, &[5000]).unwrap();
        assert!((nom.values[0] - 36.4).abs() < 0.05);
        assert_ne!(up.label, nom.label);
        assert_eq!(leadingones_fixed_budget(100, 5000), -1.0);
        assert_eq!(leadingones_fixed_budget(100, 1000), 79.0);
        assert_eq!(leadingones_fixed_budget(100, 0), 99.0);
    }

    #[test]
    fn mutation_rate_optimum() {
        for n in [2usize, 10, 100] {
            let opt = optimal_mutation_rate(n).unwrap();
            assert!(!opt.boundary);
            let gs = golden_section_mutation_rate(n, 1e-13).unwrap();
            assert!((gs - opt.rate).abs() < 1e-10, "{n}: {gs}");
            let grid = grid_scan_mutation_rate(n, 100_000).unwrap();
            assert!((grid - opt.rate).abs() <= 1.0 / 100_001.0, "{n}: {grid}");
        }
        let one = optimal_mutation_rate(1).unwrap();
        assert_eq!((one.rate, one.boundary), (1.0, true));
    }

    #[test]
    fn zigzag_deltas() {
        assert!((zigzag_ea_delta(100) - 3.7346e-5).abs() < 1e-8);
        // 1/(e n²) undershoots by about 1.5% at n = 100
        let approx = 1.0 / (std::f64::consts::E * 1e4);
        let gap = zigzag_ea_delta(100) / approx - 1.0;
        assert!(gap > 0.014 && gap < 0.016, "{gap}");
        let n = 40;
        let cold = zigzag_sa_delta_min(n, 1e-3).unwrap();
        assert_eq!(cold.1, n - 2);
        assert!(close(cold.0, 1.0 / (2.0 * (n * n) as f64), 1e-12));
        assert!(zigzag_sa_ratio(3, 10, 1.0).is_err());
        assert!(zigzag_sa_ratio(10, 10, 1.0).is_err());
        assert!(matches!(
            zigzag_sa_upper(1.0, 20, 50.0, &[0]),
            Err(Error::TemperatureTooHigh { .. })
        ));
    }

    #[test]
    fn supplement() {
        let n = 100;
        assert!(close(supplement_g(n - 2, n).unwrap(), (1.0 - 1.0 / n as f64).powi(n as i32 - 2) / 4.0, 1e-14));
        assert!((supplement_g_b(0, n) - (2.0 - (n as f64 + 1.0) / 2f64.powi(n as i32 - 1))).abs() < 1e-15);
        for n in [100, 150, 200] {
            let rep = verify_supplement(n).unwrap();
            assert!(rep.passed(), "{:?}", rep.violations);
        }
    }

    #[test]
    fn bounds_csv_layout() {
        let c = rls_linear_exact(2.0, 4, &[0, 1]).unwrap();
        let mut buf = Vec::new();
        write_bounds_csv(&[c], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,value,label,kind");
        assert!(lines[1].starts_with("0,2.0000000000000000e0,rls_linear_exact,exact"));
        assert_eq!(lines.len(), 3);
    }
}
