use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use budgetlab::bounds::{self, BoundCurve};
use budgetlab::oracle::{self, ChainModel, FULL_CHAIN_MAX_N};
use budgetlab::simulate::{estimate_mean_error, InitSpec};
use budgetlab::{AlgorithmSpec, BitString, Error, FitnessSpec, RngStream};

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_bits(text: &str) -> PyResult<BitString> {
    text.parse::<BitString>().map_err(err)
}

/// "uniform", "zeros", or an explicit bit string such as "0110".
fn parse_init(text: &str) -> PyResult<InitSpec> {
    match text {
        "uniform" => Ok(InitSpec::UniformRandom),
        "zeros" => Ok(InitSpec::AllZeros),
        bits => Ok(InitSpec::Fixed { bits: parse_bits(bits)? }),
    }
}

#[pyclass(name = "Fitness", frozen)]
struct PyFitness {
    inner: FitnessSpec,
}

#[pymethods]
impl PyFitness {
    #[staticmethod]
    fn linear(coefficients: Vec<f64>) -> PyResult<Self> {
        Ok(Self { inner: FitnessSpec::linear(coefficients).map_err(err)? })
    }

    /// Weights drawn uniformly from (0, 1], reproducible from `seed`.
    #[staticmethod]
    #[pyo3(signature = (n, seed = 0))]
    fn random_linear(n: usize, seed: u64) -> PyResult<Self> {
        let mut rng = RngStream::new(seed, 0);
        Ok(Self { inner: FitnessSpec::random_linear(n, &mut rng).map_err(err)? })
    }

    #[staticmethod]
    fn onemax(n: usize) -> PyResult<Self> {
        Ok(Self { inner: FitnessSpec::onemax(n).map_err(err)? })
    }

    #[staticmethod]
    fn binval(n: usize) -> PyResult<Self> {
        Ok(Self { inner: FitnessSpec::binval(n).map_err(err)? })
    }

    #[staticmethod]
    fn leading_ones(n: usize) -> PyResult<Self> {
        Ok(Self { inner: FitnessSpec::leading_ones(n).map_err(err)? })
    }

    #[staticmethod]
    fn zigzag(n: usize) -> PyResult<Self> {
        Ok(Self { inner: FitnessSpec::zigzag(n).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().name()
    }

    #[getter]
    fn optimum(&self) -> f64 {
        self.inner.optimum()
    }

    fn evaluate(&self, bits: &str) -> PyResult<f64> {
        self.inner.evaluate(&parse_bits(bits)?).map_err(err)
    }

    fn error(&self, bits: &str) -> PyResult<f64> {
        self.inner.error(&parse_bits(bits)?).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Fitness({}, n={})", self.inner.kind().name(), self.inner.n())
    }
}

#[pyclass(name = "Algorithm", frozen)]
struct PyAlgorithm {
    inner: AlgorithmSpec,
}

#[pymethods]
impl PyAlgorithm {
    #[staticmethod]
    fn rls() -> Self {
        Self { inner: AlgorithmSpec::rls() }
    }

    /// Standard bit mutation; the rate defaults to 1/n.
    #[staticmethod]
    #[pyo3(signature = (mutation_rate = None))]
    fn ea(mutation_rate: Option<f64>) -> PyResult<Self> {
        let inner = match mutation_rate {
            Some(p) => AlgorithmSpec::ea_with_rate(p).map_err(err)?,
            None => AlgorithmSpec::ea(),
        };
        Ok(Self { inner })
    }

    /// Metropolis acceptance at a fixed temperature, 1/ln n by default.
    #[staticmethod]
    #[pyo3(signature = (temperature = None))]
    fn sa(temperature: Option<f64>) -> PyResult<Self> {
        let inner = match temperature {
            Some(t) => AlgorithmSpec::sa_with_temperature(t).map_err(err)?,
            None => AlgorithmSpec::sa(),
        };
        Ok(Self { inner })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().name()
    }

    fn __repr__(&self) -> String {
        format!("Algorithm({})", self.inner.kind().name())
    }
}

fn chain_for(algorithm: &PyAlgorithm, fitness: &PyFitness, init: &str) -> PyResult<ChainModel> {
    let spec = &fitness.inner;
    let chain = if spec.n() <= FULL_CHAIN_MAX_N {
        oracle::build_full_chain(&algorithm.inner, spec)
    } else {
        oracle::build_level_chain(&algorithm.inner, spec)
    }
    .map_err(err)?;
    chain.with_init(&parse_init(init)?).map_err(err)
}

/// Monte Carlo mean error with standard errors, one entry per step.
#[pyfunction]
#[pyo3(signature = (algorithm, fitness, steps, replicates, seed = 0, init = "uniform"))]
fn simulate<'py>(
    py: Python<'py>,
    algorithm: &PyAlgorithm,
    fitness: &PyFitness,
    steps: usize,
    replicates: usize,
    seed: u64,
    init: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let init = parse_init(init)?;
    let s = py
        .detach(|| estimate_mean_error(&algorithm.inner, &fitness.inner, &init, steps, replicates, seed))
        .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("t", s.t_grid)?;
    out.set_item("mean_error", s.mean_error)?;
    out.set_item("sem", s.sem)?;
    out.set_item("replicates", s.replicates)?;
    Ok(out)
}

/// Exact expected error for t = 0..=horizon from the Markov chain.
#[pyfunction]
#[pyo3(signature = (algorithm, fitness, horizon, init = "uniform"))]
fn exact_error(algorithm: &PyAlgorithm, fitness: &PyFitness, horizon: usize, init: &str) -> PyResult<Vec<f64>> {
    Ok(chain_for(algorithm, fitness, init)?.expected_error_curve(horizon))
}

/// Ratio extrema over non-optimal states plus the envelope check on the chain.
#[pyfunction]
#[pyo3(signature = (algorithm, fitness, horizon = 500, init = "uniform"))]
fn delta_report<'py>(
    py: Python<'py>,
    algorithm: &PyAlgorithm,
    fitness: &PyFitness,
    horizon: usize,
    init: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let chain = chain_for(algorithm, fitness, init)?;
    let rep = oracle::verify_sandwich(&chain, horizon).map_err(err)?;
    let s = &rep.summary;
    let out = PyDict::new(py);
    out.set_item("delta_min", s.delta_min)?;
    out.set_item("delta_max", s.delta_max)?;
    out.set_item("delta2_min", s.delta2_min)?;
    out.set_item("delta2_max", s.delta2_max)?;
    out.set_item("argmin_state", &s.argmin_state)?;
    out.set_item("argmax_state", &s.argmax_state)?;
    out.set_item("sandwich_holds", rep.passed())?;
    out.set_item("max_violation", rep.max_violation)?;
    Ok(out)
}

fn values(curve: budgetlab::Result<BoundCurve>) -> PyResult<Vec<f64>> {
    Ok(curve.map_err(err)?.values)
}

/// Named closed-form curve evaluated on t = 0..=steps.
#[pyfunction]
#[pyo3(signature = (label, n, steps, e0 = None, rate = None, temperature = None))]
fn bound(
    label: &str,
    n: usize,
    steps: usize,
    e0: Option<f64>,
    rate: Option<f64>,
    temperature: Option<f64>,
) -> PyResult<Vec<f64>> {
    let grid = bounds::full_grid(steps);
    let need_e0 = || e0.ok_or_else(|| PyValueError::new_err(format!("{label} needs e0")));
    match label {
        "rls_linear_exact" => values(bounds::rls_linear_exact(need_e0()?, n, &grid)),
        "ea_linear_upper" => values(bounds::ea_linear_upper(need_e0()?, n, &grid)),
        "ea_linear_lower" => values(bounds::ea_linear_lower(need_e0()?, n, &grid)),
        "ea_mutation_upper" => {
            let p = rate.unwrap_or(1.0 / n as f64);
            values(bounds::ea_mutation_bound(need_e0()?, n, p, &grid))
        }
        "leadingones_upper" => values(bounds::leadingones_upper(n, &grid)),
        "leadingones_lower" => values(bounds::leadingones_lower(n, &grid)),
        "leadingones_fixed_budget" => values(bounds::leadingones_fixed_budget_curve(n, &grid)),
        "zigzag_ea_upper" => values(bounds::zigzag_ea_upper(need_e0()?, n, &grid)),
        "zigzag_sa_upper" => {
            let t = temperature.unwrap_or_else(|| budgetlab::heuristics::default_temperature(n));
            values(bounds::zigzag_sa_upper(need_e0()?, n, t, &grid))
        }
        other => Err(PyValueError::new_err(format!("unknown bound label {other:?}"))),
    }
}

#[pyfunction]
fn leadingones_fixed_budget(n: usize, t: usize) -> f64 {
    bounds::leadingones_fixed_budget(n, t)
}

/// Mutation rate maximising the guaranteed per-step contraction on linear functions.
#[pyfunction]
fn optimal_mutation_rate(n: usize) -> PyResult<f64> {
    Ok(bounds::optimal_mutation_rate(n).map_err(err)?.rate)
}

/// Smallest ratio in the SA Zigzag bound and the level attaining it.
#[pyfunction]
#[pyo3(signature = (n, temperature = None))]
fn zigzag_sa_delta_min(n: usize, temperature: Option<f64>) -> PyResult<(f64, usize)> {
    let t = temperature.unwrap_or_else(|| budgetlab::heuristics::default_temperature(n));
    bounds::zigzag_sa_delta_min(n, t).map_err(err)
}

#[pyfunction]
fn verify_supplement(n: usize) -> PyResult<bool> {
    Ok(bounds::verify_supplement(n).map_err(err)?.passed())
}

#[pymodule(name = "budgetlab")]
fn budgetlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFitness>()?;
    m.add_class::<PyAlgorithm>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(exact_error, m)?)?;
    m.add_function(wrap_pyfunction!(delta_report, m)?)?;
    m.add_function(wrap_pyfunction!(bound, m)?)?;
    m.add_function(wrap_pyfunction!(leadingones_fixed_budget, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_mutation_rate, m)?)?;
    m.add_function(wrap_pyfunction!(zigzag_sa_delta_min, m)?)?;
    m.add_function(wrap_pyfunction!(verify_supplement, m)?)?;
    Ok(())
}
