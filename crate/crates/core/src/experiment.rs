//! Experiment configuration, the figure presets and the file writers behind the CLI.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{self, write_bounds_csv, BoundCurve, BoundKind};
use crate::error::{Error, Result};
use crate::fitness::{FitnessKind, FitnessSpec};
use crate::heuristics::{AlgorithmSpec, Kernel};
use crate::oracle::{
    build_full_chain, build_level_chain, verify_sandwich, verify_uniform_suffix, ChainModel, DeltaReport,
    FULL_CHAIN_MAX_N, LEVEL_CHAIN_MAX_N,
};
use crate::simulate::{estimate_mean_error, fmt_real, initial_error_mean, InitSpec, TrajectorySeries};

pub const SCHEMA_VERSION: u32 = 1;

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const BOUNDS_FILE: &str = "bounds.csv";
pub const ORACLE_FILE: &str = "oracle.csv";
pub const DELTA_REPORT_FILE: &str = "delta_report.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const COMPARE_FILE: &str = "compare.csv";
pub const COMPARE_SUMMARY_FILE: &str = "compare_summary.json";

fn default_outputs() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: AlgorithmSpec,
    pub function: FitnessSpec,
    #[serde(default)]
    pub init: InitSpec,
    pub steps: usize,
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_outputs")]
    pub outputs: PathBuf,
    /// Empty means the defaults for this algorithm and function.
    #[serde(default)]
    pub bound_labels: Vec<String>,
    #[serde(default)]
    pub oracle: bool,
}

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub replicates: Option<usize>,
    pub steps: Option<usize>,
    pub outputs: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(algorithm: AlgorithmSpec, function: FitnessSpec, steps: usize, replicates: usize) -> Self {
        Self {
            algorithm,
            function,
            init: InitSpec::UniformRandom,
            steps,
            replicates,
            seed: 0,
            outputs: default_outputs(),
            bound_labels: Vec::new(),
            oracle: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(r) = o.replicates {
            self.replicates = r;
        }
        if let Some(t) = o.steps {
            self.steps = t;
        }
        if let Some(p) = &o.outputs {
            self.outputs = p.clone();
        }
    }

    pub fn n(&self) -> usize {
        self.function.n()
    }

    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::Config("steps must be at least 1".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        self.init.validate(self.n())?;
        self.algorithm.kernel(self.n())?;
        if self.oracle {
            oracle_space(&self.function)?;
        }
        for label in &self.bound_labels {
            BoundLabel::parse(label)?;
        }
        Ok(())
    }

    /// Bound labels actually emitted.
    pub fn resolved_bound_labels(&self) -> Vec<String> {
        if self.bound_labels.is_empty() {
            default_bound_labels(&self.algorithm, &self.function, &self.init)
                .into_iter()
                .map(|l| l.name().to_string())
                .collect()
        } else {
            self.bound_labels.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundLabel {
    RlsLinearExact,
    EaLinearUpper,
    EaLinearLower,
    EaMutationUpper,
    LeadingOnesUpperRigorous,
    LeadingOnesLowerRigorous,
    LeadingOnesUpperNominal,
    LeadingOnesLowerNominal,
    LeadingOnesFixedBudget,
    ZigzagEaUpper,
    ZigzagSaUpper,
}

impl BoundLabel {
    pub const ALL: [BoundLabel; 11] = [
        BoundLabel::RlsLinearExact,
        BoundLabel::EaLinearUpper,
        BoundLabel::EaLinearLower,
        BoundLabel::EaMutationUpper,
        BoundLabel::LeadingOnesUpperRigorous,
        BoundLabel::LeadingOnesLowerRigorous,
        BoundLabel::LeadingOnesUpperNominal,
        BoundLabel::LeadingOnesLowerNominal,
        BoundLabel::LeadingOnesFixedBudget,
        BoundLabel::ZigzagEaUpper,
        BoundLabel::ZigzagSaUpper,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundLabel::RlsLinearExact => "rls_linear_exact",
            BoundLabel::EaLinearUpper => "ea_linear_upper",
            BoundLabel::EaLinearLower => "ea_linear_lower",
            BoundLabel::EaMutationUpper => "ea_mutation_upper",
            BoundLabel::LeadingOnesUpperRigorous => "leadingones_upper_rigorous",
            BoundLabel::LeadingOnesLowerRigorous => "leadingones_lower_rigorous",
            BoundLabel::LeadingOnesUpperNominal => "leadingones_upper_nominal",
            BoundLabel::LeadingOnesLowerNominal => "leadingones_lower_nominal",
            BoundLabel::LeadingOnesFixedBudget => "leadingones_fixed_budget",
            BoundLabel::ZigzagEaUpper => "zigzag_ea_upper",
            BoundLabel::ZigzagSaUpper => "zigzag_sa_upper",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown bound label {s:?}")))
    }

    fn applies_to(self, kind: FitnessKind) -> bool {
        match self {
            BoundLabel::RlsLinearExact
            | BoundLabel::EaLinearUpper
            | BoundLabel::EaLinearLower
            | BoundLabel::EaMutationUpper => kind.is_linear(),
            BoundLabel::ZigzagEaUpper | BoundLabel::ZigzagSaUpper => kind == FitnessKind::Zigzag,
            _ => kind == FitnessKind::LeadingOnes,
        }
    }
}

pub fn default_bound_labels(algo: &AlgorithmSpec, spec: &FitnessSpec, init: &InitSpec) -> Vec<BoundLabel> {
    let n = spec.n();
    let Ok(kernel) = algo.kernel(n) else {
        return Vec::new();
    };
    let uniform = *init == InitSpec::UniformRandom;
    match (kernel, spec.kind()) {
        (Kernel::Rls, k) if k.is_linear() => vec![BoundLabel::RlsLinearExact],
        (Kernel::Ea { p }, k) if k.is_linear() => {
            if n > 1 && p == 1.0 / n as f64 {
                vec![BoundLabel::EaLinearUpper, BoundLabel::EaLinearLower]
            } else {
                vec![BoundLabel::EaMutationUpper]
            }
        }
        (Kernel::Ea { p }, FitnessKind::LeadingOnes) if uniform && n >= 2 && p == 1.0 / n as f64 => vec![
            BoundLabel::LeadingOnesUpperRigorous,
            BoundLabel::LeadingOnesLowerRigorous,
            BoundLabel::LeadingOnesUpperNominal,
            BoundLabel::LeadingOnesLowerNominal,
            BoundLabel::LeadingOnesFixedBudget,
        ],
        (Kernel::Ea { .. }, FitnessKind::Zigzag) => vec![BoundLabel::ZigzagEaUpper],
        (Kernel::Sa { .. }, FitnessKind::Zigzag) => vec![BoundLabel::ZigzagSaUpper],
        _ => Vec::new(),
    }
}

/// Evaluates one named bound on `0..=steps`.
pub fn bound_curve(label: BoundLabel, cfg: &ExperimentConfig) -> Result<BoundCurve> {
    let spec = &cfg.function;
    let n = spec.n();
    if !label.applies_to(spec.kind()) {
        return Err(Error::Config(format!(
            "bound {} does not apply to {}",
            label.name(),
            spec.kind().name()
        )));
    }
    let grid = bounds::full_grid(cfg.steps);
    let e0 = initial_error_mean(spec, &cfg.init)?;
    let kernel = cfg.algorithm.kernel(n)?;
    match label {
        BoundLabel::RlsLinearExact => bounds::rls_linear_exact(e0, n, &grid),
        BoundLabel::EaLinearUpper => bounds::ea_linear_upper(e0, n, &grid),
        BoundLabel::EaLinearLower => bounds::ea_linear_lower(e0, n, &grid),
        BoundLabel::EaMutationUpper => {
            let p = match kernel {
                Kernel::Ea { p } => p,
                _ => 1.0 / n as f64,
            };
            bounds::ea_mutation_bound(e0, n, p, &grid)
        }
        BoundLabel::LeadingOnesUpperRigorous => bounds::leadingones_upper(n, &grid),
        BoundLabel::LeadingOnesLowerRigorous => bounds::leadingones_lower(n, &grid),
        BoundLabel::LeadingOnesUpperNominal => bounds::leadingones_upper_nominal(n, &grid),
        BoundLabel::LeadingOnesLowerNominal => bounds::leadingones_lower_nominal(n, &grid),
        BoundLabel::LeadingOnesFixedBudget => bounds::leadingones_fixed_budget_curve(n, &grid),
        BoundLabel::ZigzagEaUpper => bounds::zigzag_ea_upper(e0, n, &grid),
        BoundLabel::ZigzagSaUpper => {
            let t = match kernel {
                Kernel::Sa { temperature } => temperature,
                _ => crate::heuristics::default_temperature(n),
            };
            bounds::zigzag_sa_upper(e0, n, t, &grid)
        }
    }
}

pub fn bound_curves(cfg: &ExperimentConfig) -> Result<Vec<BoundCurve>> {
    cfg.resolved_bound_labels()
        .iter()
        .map(|l| bound_curve(BoundLabel::parse(l)?, cfg))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleSpace {
    Full,
    Levels,
}

fn oracle_space(spec: &FitnessSpec) -> Result<OracleSpace> {
    let n = spec.n();
    if n <= FULL_CHAIN_MAX_N {
        Ok(OracleSpace::Full)
    } else if spec.kind().is_level_symmetric() && n <= LEVEL_CHAIN_MAX_N {
        Ok(OracleSpace::Levels)
    } else {
        Err(Error::Config(format!(
            "oracle needs n <= {FULL_CHAIN_MAX_N}, or n <= {LEVEL_CHAIN_MAX_N} for onemax and zigzag; got {} with n = {n}",
            spec.kind().name()
        )))
    }
}

/// Exact chain for the configured algorithm, function and initialisation.
pub fn build_chain(cfg: &ExperimentConfig) -> Result<ChainModel> {
    let chain = match oracle_space(&cfg.function)? {
        OracleSpace::Full => build_full_chain(&cfg.algorithm, &cfg.function)?,
        OracleSpace::Levels => build_level_chain(&cfg.algorithm, &cfg.function)?,
    };
    chain.with_init(&cfg.init)
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<()> {
    let mut w = create(dir, name)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn finish(mut w: BufWriter<File>) -> Result<()> {
    w.flush()?;
    Ok(())
}

/// Which artifacts a run produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunParts {
    pub trajectory: bool,
    pub bounds: bool,
    pub oracle: bool,
}

impl RunParts {
    pub fn all(cfg: &ExperimentConfig) -> Self {
        Self {
            trajectory: true,
            bounds: true,
            oracle: cfg.oracle,
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub files: Vec<String>,
    pub trajectory: Option<TrajectorySeries>,
    pub bounds: Vec<BoundCurve>,
    pub delta_report: Option<DeltaReport>,
}

/// Runs the configured experiment and writes its artifacts into `cfg.outputs`.
pub fn run(cfg: &ExperimentConfig, parts: RunParts, command: &str) -> Result<RunOutcome> {
    cfg.validate()?;
    let dir = cfg.outputs.as_path();
    fs::create_dir_all(dir)?;
    let mut outcome = RunOutcome {
        files: Vec::new(),
        trajectory: None,
        bounds: Vec::new(),
        delta_report: None,
    };
    if parts.trajectory {
        let series = estimate_mean_error(&cfg.algorithm, &cfg.function, &cfg.init, cfg.steps, cfg.replicates, cfg.seed)?;
        let mut w = create(dir, TRAJECTORY_FILE)?;
        series.write_csv(&mut w)?;
        finish(w)?;
        outcome.files.push(TRAJECTORY_FILE.into());
        outcome.trajectory = Some(series);
    }
    if parts.bounds {
        outcome.bounds = bound_curves(cfg)?;
        let mut w = create(dir, BOUNDS_FILE)?;
        write_bounds_csv(&outcome.bounds, &mut w)?;
        finish(w)?;
        outcome.files.push(BOUNDS_FILE.into());
    }
    if parts.oracle {
        let chain = build_chain(cfg)?;
        let mut w = create(dir, ORACLE_FILE)?;
        chain.write_curve_csv(cfg.steps, &mut w)?;
        finish(w)?;
        let sandwich = verify_sandwich(&chain, cfg.steps)?;
        let report = DeltaReport::new(&chain, &sandwich);
        write_json(dir, DELTA_REPORT_FILE, &report)?;
        outcome.files.push(ORACLE_FILE.into());
        outcome.files.push(DELTA_REPORT_FILE.into());
        outcome.delta_report = Some(report);
    }
    outcome.files.push(MANIFEST_FILE.into());
    write_json(dir, MANIFEST_FILE, &manifest(cfg, command, &outcome)?)?;
    Ok(outcome)
}

fn manifest(cfg: &ExperimentConfig, command: &str, outcome: &RunOutcome) -> Result<Value> {
    let mut resolved = cfg.clone();
    resolved.bound_labels = cfg.resolved_bound_labels();
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config": resolved,
        "kernel": cfg.algorithm.kernel(cfg.n())?,
        "initial_error": initial_error_mean(&cfg.function, &cfg.init)?,
        "bounds": outcome.bounds.iter().map(|b| json!({
            "label": b.label,
            "kind": b.kind,
            "e0": b.e0,
            "delta": b.delta,
        })).collect::<Vec<_>>(),
        "files": outcome.files,
    }))
}

/// The first upper (or exact) curve, used as a side's bound in comparisons.
fn primary_bound(curves: &[BoundCurve]) -> Option<&BoundCurve> {
    curves
        .iter()
        .find(|c| c.kind == BoundKind::Upper)
        .or_else(|| curves.iter().find(|c| c.kind == BoundKind::Exact))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompareSide {
    pub algorithm: AlgorithmSpec,
    pub kernel: Kernel,
    pub bound_label: Option<String>,
    pub delta: Option<f64>,
    pub final_mean_error: f64,
    pub final_sem: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompareSummary {
    pub schema_version: u32,
    pub function: FitnessSpec,
    pub steps: usize,
    pub replicates: usize,
    pub a: CompareSide,
    pub b: CompareSide,
    /// `bound_A >= bound_B` at every step, when both sides have a bound.
    pub bound_a_ge_bound_b: Option<bool>,
    /// Sign of `mean_error_A - mean_error_B` per step: `+`, `-` or `0`.
    pub sign_pattern: String,
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
    /// The final-step difference exceeds four combined standard errors.
    pub final_difference_significant: bool,
}

fn check_comparable(a: &ExperimentConfig, b: &ExperimentConfig) -> Result<()> {
    if a.function.kind() != b.function.kind() || a.n() != b.n() {
        return Err(Error::Config(format!(
            "compared configs need the same function: {} n={} vs {} n={}",
            a.function.kind().name(),
            a.n(),
            b.function.kind().name(),
            b.n()
        )));
    }
    if a.function.kind() == FitnessKind::Linear && a.function.coefficients() != b.function.coefficients() {
        return Err(Error::Config("compared linear functions have different coefficients".into()));
    }
    if a.steps != b.steps || a.replicates != b.replicates {
        return Err(Error::Config(format!(
            "compared configs need equal steps and replicates: {}x{} vs {}x{}",
            a.steps, a.replicates, b.steps, b.replicates
        )));
    }
    Ok(())
}

fn side(cfg: &ExperimentConfig, series: &TrajectorySeries, bound: Option<&BoundCurve>) -> Result<CompareSide> {
    let last = series.len() - 1;
    Ok(CompareSide {
        algorithm: cfg.algorithm,
        kernel: cfg.algorithm.kernel(cfg.n())?,
        bound_label: bound.map(|b| b.label.clone()),
        delta: bound.and_then(|b| b.delta),
        final_mean_error: series.mean_error[last],
        final_sem: series.sem.as_ref().map_or(0.0, |s| s[last]),
    })
}

/// Runs both configs and writes the joined CSV and summary into `dir`.
pub fn compare(a: &ExperimentConfig, b: &ExperimentConfig, dir: &Path) -> Result<CompareSummary> {
    a.validate()?;
    b.validate()?;
    check_comparable(a, b)?;
    fs::create_dir_all(dir)?;
    let sa = estimate_mean_error(&a.algorithm, &a.function, &a.init, a.steps, a.replicates, a.seed)?;
    let sb = estimate_mean_error(&b.algorithm, &b.function, &b.init, b.steps, b.replicates, b.seed)?;
    let ca = bound_curves(a)?;
    let cb = bound_curves(b)?;
    let (ba, bb) = (primary_bound(&ca), primary_bound(&cb));
    let sem = |s: &TrajectorySeries, t: usize| s.sem.as_ref().map_or(0.0, |v| v[t]);

    let mut w = create(dir, COMPARE_FILE)?;
    writeln!(w, "t,mean_error_A,sem_A,mean_error_B,sem_B,bound_A,bound_B")?;
    let mut pattern = String::with_capacity(sa.len());
    for t in 0..sa.len() {
        let cell = |c: Option<&BoundCurve>| c.map(|c| fmt_real(c.values[t])).unwrap_or_default();
        writeln!(
            w,
            "{t},{},{},{},{},{},{}",
            fmt_real(sa.mean_error[t]),
            fmt_real(sem(&sa, t)),
            fmt_real(sb.mean_error[t]),
            fmt_real(sem(&sb, t)),
            cell(ba),
            cell(bb)
        )?;
        let d = sa.mean_error[t] - sb.mean_error[t];
        pattern.push(if d > 0.0 { '+' } else if d < 0.0 { '-' } else { '0' });
    }
    finish(w)?;

    let last = sa.len() - 1;
    let spread = (sem(&sa, last).powi(2) + sem(&sb, last).powi(2)).sqrt();
    let summary = CompareSummary {
        schema_version: SCHEMA_VERSION,
        function: a.function.clone(),
        steps: a.steps,
        replicates: a.replicates,
        a: side(a, &sa, ba)?,
        b: side(b, &sb, bb)?,
        bound_a_ge_bound_b: match (ba, bb) {
            (Some(x), Some(y)) => Some(x.values.iter().zip(&y.values).all(|(p, q)| p >= q)),
            _ => None,
        },
        positive: pattern.matches('+').count(),
        negative: pattern.matches('-').count(),
        zero: pattern.matches('0').count(),
        sign_pattern: pattern,
        final_difference_significant: (sa.mean_error[last] - sb.mean_error[last]).abs() > 4.0 * spread,
    };
    write_json(dir, COMPARE_SUMMARY_FILE, &summary)?;
    Ok(summary)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Theorems,
    Supplement,
    Sandwich,
    Suffix,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Theorems => "theorems",
            Suite::Supplement => "supplement",
            Suite::Sandwich => "sandwich",
            Suite::Suffix => "suffix",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [Suite::Theorems, Suite::Supplement, Suite::Sandwich, Suite::Suffix]
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown verification suite {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceResult {
    pub instance: String,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub suite: Suite,
    pub passed: bool,
    pub instances: Vec<InstanceResult>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &InstanceResult> {
        self.instances.iter().filter(|i| !i.passed)
    }
}

/// Horizon of the theorem battery.
pub const THEOREM_HORIZON: usize = 500;

/// Function instances of the theorem battery at dimension `n`.
pub fn battery_functions(n: usize) -> Result<Vec<FitnessSpec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    Ok(vec![
        FitnessSpec::random_linear(n, &mut rng)?,
        FitnessSpec::binval(n)?,
        FitnessSpec::leading_ones(n)?,
        FitnessSpec::zigzag(n)?,
    ])
}

fn instance_name(algo: &AlgorithmSpec, spec: &FitnessSpec) -> String {
    format!("{} {} n={}", algo.kind().name(), spec.kind().name(), spec.n())
}

fn chain_check(algo: &AlgorithmSpec, chain: &ChainModel, horizon: usize, name: String) -> Result<InstanceResult> {
    let sandwich = verify_sandwich(chain, horizon)?;
    let curve = chain.expected_error_curve(horizon);
    let monotone = !chain.is_elitist() || curve.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let report = DeltaReport::new(chain, &sandwich);
    let passed = sandwich.passed() && sandwich.two_step_tighter && monotone;
    Ok(InstanceResult {
        instance: name,
        passed,
        detail: json!({
            "algorithm": algo,
            "report": report,
            "monotone": monotone,
        }),
    })
}

pub fn verify(suite: Suite) -> Result<VerifyReport> {
    let mut instances = Vec::new();
    match suite {
        Suite::Theorems => {
            for n in 4..=10 {
                for spec in battery_functions(n)? {
                    for algo in [AlgorithmSpec::rls(), AlgorithmSpec::ea(), AlgorithmSpec::sa()] {
                        let chain = build_full_chain(&algo, &spec)?;
                        instances.push(chain_check(&algo, &chain, THEOREM_HORIZON, instance_name(&algo, &spec))?);
                    }
                }
            }
        }
        Suite::Sandwich => {
            let mut rng = ChaCha8Rng::seed_from_u64(7);
            let full: Vec<(AlgorithmSpec, FitnessSpec, usize)> = vec![
                (AlgorithmSpec::rls(), FitnessSpec::random_linear(8, &mut rng)?, 500),
                (AlgorithmSpec::ea(), FitnessSpec::binval(8)?, 500),
                (AlgorithmSpec::ea(), FitnessSpec::leading_ones(8)?, 2000),
                (AlgorithmSpec::sa(), FitnessSpec::zigzag(8)?, 2000),
                (AlgorithmSpec::ea(), FitnessSpec::zigzag(10)?, 2000),
            ];
            for (algo, spec, horizon) in full {
                let chain = build_full_chain(&algo, &spec)?;
                instances.push(chain_check(&algo, &chain, horizon, instance_name(&algo, &spec))?);
            }
            for n in [50, 100] {
                for spec in [FitnessSpec::onemax(n)?, FitnessSpec::zigzag(n)?] {
                    for algo in [AlgorithmSpec::rls(), AlgorithmSpec::ea(), AlgorithmSpec::sa()] {
                        let chain = build_level_chain(&algo, &spec)?;
                        let name = format!("{} (levels)", instance_name(&algo, &spec));
                        instances.push(chain_check(&algo, &chain, 2000, name)?);
                    }
                }
            }
        }
        Suite::Supplement => {
            for n in [100, 150, 200] {
                let rep = bounds::verify_supplement(n)?;
                instances.push(InstanceResult {
                    instance: format!("supplement n={n}"),
                    passed: rep.passed(),
                    detail: serde_json::to_value(&rep)?,
                });
            }
        }
        Suite::Suffix => {
            for n in 2..=10 {
                let rep = verify_uniform_suffix(n, 500)?;
                instances.push(InstanceResult {
                    instance: format!("ea leadingones n={n}"),
                    passed: rep.passed(),
                    detail: serde_json::to_value(&rep)?,
                });
            }
        }
    }
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        suite,
        passed: instances.iter().all(|i| i.passed),
        instances,
    })
}

pub const PRESETS: [&str; 7] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7"];

pub const PRESET_REPLICATES: usize = 1000;

/// One Monte Carlo run inside a preset; `tag` distinguishes the file names.
#[derive(Clone, Debug)]
pub struct PresetRun {
    pub tag: Option<String>,
    pub config: ExperimentConfig,
}

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: String,
    pub runs: Vec<PresetRun>,
    /// Compare the first two runs.
    pub compare: bool,
}

fn preset_config(algo: AlgorithmSpec, spec: FitnessSpec, steps: usize, labels: &[BoundLabel]) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(algo, spec, steps, PRESET_REPLICATES);
    cfg.bound_labels = labels.iter().map(|l| l.name().to_string()).collect();
    cfg
}

pub fn preset(name: &str) -> Result<Preset> {
    use BoundLabel::*;
    let single = |cfg| vec![PresetRun { tag: None, config: cfg }];
    let (runs, compare) = match name {
        "fig1" => (single(preset_config(AlgorithmSpec::rls(), FitnessSpec::binval(100)?, 1000, &[RlsLinearExact])), false),
        "fig2" => (single(preset_config(AlgorithmSpec::ea(), FitnessSpec::binval(100)?, 2000, &[EaLinearUpper])), false),
        "fig3" => (single(preset_config(AlgorithmSpec::ea(), FitnessSpec::binval(100)?, 2000, &[EaLinearLower])), false),
        "fig4" => (
            single(preset_config(AlgorithmSpec::ea(), FitnessSpec::leading_ones(100)?, 10_000, &[LeadingOnesFixedBudget])),
            false,
        ),
        "fig5" => (
            single(preset_config(
                AlgorithmSpec::ea(),
                FitnessSpec::leading_ones(100)?,
                20_000,
                &[LeadingOnesUpperRigorous, LeadingOnesLowerRigorous, LeadingOnesUpperNominal, LeadingOnesLowerNominal],
            )),
            false,
        ),
        "fig6" => {
            let n = 10;
            let rates = [("p_1n", 1.0 / n as f64), ("p_2n", 2.0 / n as f64), ("p_half_n", 0.5 / n as f64)];
            let runs = rates
                .iter()
                .map(|&(tag, p)| {
                    Ok(PresetRun {
                        tag: Some(tag.into()),
                        config: preset_config(AlgorithmSpec::ea_with_rate(p)?, FitnessSpec::binval(n)?, 200, &[EaMutationUpper]),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            (runs, false)
        }
        "fig7" => (
            vec![
                PresetRun {
                    tag: Some("ea".into()),
                    config: preset_config(AlgorithmSpec::ea(), FitnessSpec::zigzag(100)?, 20_000, &[ZigzagEaUpper]),
                },
                PresetRun {
                    tag: Some("sa".into()),
                    config: preset_config(AlgorithmSpec::sa(), FitnessSpec::zigzag(100)?, 20_000, &[ZigzagSaUpper]),
                },
            ],
            true,
        ),
        other => {
            return Err(Error::Config(format!(
                "unknown preset {other:?}; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    };
    Ok(Preset {
        name: name.into(),
        runs,
        compare,
    })
}

/// Runs a preset into `dir`. Multi-run presets write `trajectory_<tag>.csv` and a
/// single `bounds.csv` with tagged labels.
pub fn run_preset(name: &str, overrides: &Overrides, dir: &Path) -> Result<Vec<String>> {
    let mut p = preset(name)?;
    for r in &mut p.runs {
        r.config.apply(overrides);
        r.config.outputs = dir.to_path_buf();
        r.config.validate()?;
    }
    fs::create_dir_all(dir)?;
    if let [only] = p.runs.as_slice() {
        return Ok(run(&only.config, RunParts::all(&only.config), &format!("preset {name}"))?.files);
    }

    let mut files = Vec::new();
    let mut curves = Vec::new();
    let mut configs = Vec::new();
    for r in &p.runs {
        let tag = r.tag.as_deref().unwrap_or("run");
        let c = &r.config;
        let series = estimate_mean_error(&c.algorithm, &c.function, &c.init, c.steps, c.replicates, c.seed)?;
        let file = format!("trajectory_{tag}.csv");
        let mut w = create(dir, &file)?;
        series.write_csv(&mut w)?;
        finish(w)?;
        files.push(file);
        for curve in bound_curves(c)? {
            let label = format!("{}_{tag}", curve.label);
            curves.push(curve.with_label(label));
        }
        let mut resolved = c.clone();
        resolved.bound_labels = c.resolved_bound_labels();
        configs.push(json!({ "tag": tag, "config": resolved, "kernel": c.algorithm.kernel(c.n())? }));
    }
    let mut w = create(dir, BOUNDS_FILE)?;
    write_bounds_csv(&curves, &mut w)?;
    finish(w)?;
    files.push(BOUNDS_FILE.into());
    if p.compare {
        compare(&p.runs[0].config, &p.runs[1].config, dir)?;
        files.push(COMPARE_FILE.into());
        files.push(COMPARE_SUMMARY_FILE.into());
    }
    files.push(MANIFEST_FILE.into());
    let manifest = json!({
        "schema_version": SCHEMA_VERSION,
        "command": format!("preset {name}"),
        "version": env!("CARGO_PKG_VERSION"),
        "runs": configs,
        "bounds": curves.iter().map(|b| json!({
            "label": b.label,
            "kind": b.kind,
            "e0": b.e0,
            "delta": b.delta,
        })).collect::<Vec<_>>(),
        "files": files,
    });
    write_json(dir, MANIFEST_FILE, &manifest)?;
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_json(extra: &str) -> String {
        format!(r#"{{"algorithm":{{"kind":"rls"}},"function":{{"kind":"onemax","n":5}},"steps":10,"replicates":4{extra}}}"#)
    }

    #[test]
    fn config_defaults() {
        let cfg = ExperimentConfig::from_json(&cfg_json("")).unwrap();
        assert_eq!(cfg.init, InitSpec::UniformRandom);
        assert_eq!(cfg.seed, 0);
        assert!(!cfg.oracle);
        assert_eq!(cfg.resolved_bound_labels(), vec!["rls_linear_exact".to_string()]);
    }

    #[test]
    fn config_rejections() {
        let zero = cfg_json("").replace("\"steps\":10", "\"steps\":0");
        assert!(matches!(ExperimentConfig::from_json(&zero), Err(Error::Config(_))));
        assert!(ExperimentConfig::from_json(&cfg_json(r#","bogus":1"#)).is_err());
        assert!(ExperimentConfig::from_json(&cfg_json(r#","bound_labels":["nope"]"#)).is_err());
        let big = cfg_json(r#","oracle":true"#).replace("\"onemax\",\"n\":5", "\"binval\",\"n\":20");
        assert!(ExperimentConfig::from_json(&big).is_err());
        let level = cfg_json(r#","oracle":true"#).replace("\"n\":5", "\"n\":150");
        assert!(ExperimentConfig::from_json(&level).is_ok());
    }

    #[test]
    fn bound_labels_check_function() {
        let mut cfg = ExperimentConfig::from_json(&cfg_json("")).unwrap();
        cfg.bound_labels = vec!["zigzag_ea_upper".into()];
        assert!(bound_curves(&cfg).is_err());
    }

    #[test]
    fn default_labels() {
        let lo = FitnessSpec::leading_ones(10).unwrap();
        let uni = InitSpec::UniformRandom;
        assert_eq!(default_bound_labels(&AlgorithmSpec::ea(), &lo, &uni).len(), 5);
        assert!(default_bound_labels(&AlgorithmSpec::ea(), &lo, &InitSpec::AllZeros).is_empty());
        let zz = FitnessSpec::zigzag(10).unwrap();
        assert_eq!(default_bound_labels(&AlgorithmSpec::sa(), &zz, &uni), vec![BoundLabel::ZigzagSaUpper]);
        let bv = FitnessSpec::binval(10).unwrap();
        let ea2 = AlgorithmSpec::ea_with_rate(0.2).unwrap();
        assert_eq!(default_bound_labels(&ea2, &bv, &uni), vec![BoundLabel::EaMutationUpper]);
    }

    #[test]
    fn presets_resolve() {
        for name in PRESETS {
            let p = preset(name).unwrap();
            for r in &p.runs {
                r.config.validate().unwrap();
                bound_curves(&r.config).unwrap();
            }
        }
        assert_eq!(preset("fig6").unwrap().runs.len(), 3);
        assert!(preset("fig9").is_err());
    }

    #[test]
    fn compare_rejects_mismatch() {
        let a = ExperimentConfig::from_json(&cfg_json("")).unwrap();
        let mut b = a.clone();
        b.steps = 11;
        let dir = std::env::temp_dir();
        assert!(matches!(compare(&a, &b, &dir), Err(Error::Config(_))));
    }
}
