//! Pseudo-Boolean benchmark functions and the approximation error.
//!
//! All functions are maximised and take their optimum at the all-ones string.
//! Fitness comparisons that drive selection go through [`FitnessSpec::compare_exact`],
//! which never rounds: BinVal already exceeds `2^53` at `n = 52`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported dimension.
pub const MAX_DIMENSION: usize = 1 << 16;

/// Largest BinVal dimension whose optimum `2^(n+1) - 2` is a finite double.
pub const MAX_BINVAL_DIMENSION: usize = 1022;

/// A fixed-length binary search point. Bit `i` (1-based) is stored at index `i - 1`
/// and is rendered as the `i`-th character of the string form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Self { bits: vec![false; n] }
    }

    pub fn ones(n: usize) -> Self {
        Self { bits: vec![true; n] }
    }

    /// Decodes a state index: bit `i` of the integer is position `i + 1`.
    pub fn from_index(index: usize, n: usize) -> Self {
        Self {
            bits: (0..n).map(|i| (index >> i) & 1 == 1).collect(),
        }
    }

    pub fn to_index(&self) -> usize {
        debug_assert!(self.bits.len() < usize::BITS as usize);
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | ((b as usize) << i))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Zero-based access.
    pub fn get(&self, index: usize) -> bool {
        self.bits[index]
    }

    pub fn flip(&mut self, index: usize) {
        self.bits[index] = !self.bits[index];
    }

    pub fn ones_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn leading_ones(&self) -> usize {
        self.bits.iter().take_while(|&&b| b).count()
    }

    pub fn is_all_ones(&self) -> bool {
        self.bits.iter().all(|&b| b)
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self {
            bits: (0..n).map(|_| rng.gen::<bool>()).collect(),
        }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParameter(format!(
                    "bit string contains {other:?}; only '0' and '1' are allowed"
                ))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { bits })
    }
}

impl Serialize for BitString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitnessKind {
    Linear,
    OneMax,
    BinVal,
    LeadingOnes,
    Zigzag,
}

impl FitnessKind {
    pub fn name(self) -> &'static str {
        match self {
            FitnessKind::Linear => "linear",
            FitnessKind::OneMax => "onemax",
            FitnessKind::BinVal => "binval",
            FitnessKind::LeadingOnes => "leadingones",
            FitnessKind::Zigzag => "zigzag",
        }
    }

    /// Linear, OneMax and BinVal share the weighted-sum representation.
    pub fn is_linear(self) -> bool {
        matches!(self, FitnessKind::Linear | FitnessKind::OneMax | FitnessKind::BinVal)
    }

    /// Fitness depends on the string only through its number of ones.
    pub fn is_level_symmetric(self) -> bool {
        matches!(self, FitnessKind::OneMax | FitnessKind::Zigzag)
    }
}

#[derive(Serialize, Deserialize)]
struct RawFitnessSpec {
    kind: FitnessKind,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coefficients: Option<Vec<f64>>,
}

/// A benchmark function of fixed dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFitnessSpec", into = "RawFitnessSpec")]
pub struct FitnessSpec {
    kind: FitnessKind,
    n: usize,
    /// Per-bit weights for the linear family, empty otherwise.
    weights: Vec<f64>,
}

impl TryFrom<RawFitnessSpec> for FitnessSpec {
    type Error = Error;

    fn try_from(raw: RawFitnessSpec) -> Result<Self> {
        match (raw.kind, raw.coefficients) {
            (FitnessKind::Linear, Some(c)) => {
                if c.len() != raw.n {
                    return Err(Error::InvalidSpec(format!(
                        "linear spec has n = {} but {} coefficients",
                        raw.n,
                        c.len()
                    )));
                }
                FitnessSpec::linear(c)
            }
            (FitnessKind::Linear, None) => Err(Error::InvalidSpec(
                "linear spec requires \"coefficients\"".into(),
            )),
            (kind, Some(_)) => Err(Error::InvalidSpec(format!(
                "\"coefficients\" is only accepted for kind \"linear\", not {:?}",
                kind.name()
            ))),
            (FitnessKind::OneMax, None) => FitnessSpec::onemax(raw.n),
            (FitnessKind::BinVal, None) => FitnessSpec::binval(raw.n),
            (FitnessKind::LeadingOnes, None) => FitnessSpec::leading_ones(raw.n),
            (FitnessKind::Zigzag, None) => FitnessSpec::zigzag(raw.n),
        }
    }
}

impl From<FitnessSpec> for RawFitnessSpec {
    fn from(spec: FitnessSpec) -> Self {
        RawFitnessSpec {
            kind: spec.kind,
            n: spec.n,
            coefficients: (spec.kind == FitnessKind::Linear).then_some(spec.weights),
        }
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n == 0 || n > MAX_DIMENSION {
        return Err(Error::InvalidSpec(format!(
            "dimension must lie in [1, {MAX_DIMENSION}], got {n}"
        )));
    }
    Ok(())
}

impl FitnessSpec {
    /// `f(x) = sum c_i x_i` with every `c_i > 0`.
    pub fn linear(coefficients: Vec<f64>) -> Result<Self> {
        check_dimension(coefficients.len())?;
        if let Some((i, c)) = coefficients
            .iter()
            .enumerate()
            .find(|(_, c)| !(c.is_finite() && **c > 0.0))
        {
            return Err(Error::InvalidSpec(format!(
                "linear coefficient c_{} = {c} must be positive and finite",
                i + 1
            )));
        }
        if !compensated_sum(coefficients.iter().copied()).is_finite() {
            return Err(Error::InvalidSpec("sum of coefficients overflows".into()));
        }
        Ok(Self {
            kind: FitnessKind::Linear,
            n: coefficients.len(),
            weights: coefficients,
        })
    }

    /// Linear function with coefficients drawn uniformly from `(0, 1]`.
    pub fn random_linear<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        Self::linear((0..n).map(|_| 1.0 - rng.gen::<f64>()).collect())
    }

    pub fn onemax(n: usize) -> Result<Self> {
        check_dimension(n)?;
        Ok(Self {
            kind: FitnessKind::OneMax,
            n,
            weights: vec![1.0; n],
        })
    }

    /// Weight `2^i` on bit `i` for `i = 1..=n`, so `f* = 2^(n+1) - 2`.
    pub fn binval(n: usize) -> Result<Self> {
        check_dimension(n)?;
        if n > MAX_BINVAL_DIMENSION {
            return Err(Error::InvalidSpec(format!(
                "binval optimum overflows a double for n = {n} > {MAX_BINVAL_DIMENSION}"
            )));
        }
        Ok(Self {
            kind: FitnessKind::BinVal,
            n,
            weights: (1..=n as i32).map(|i| 2f64.powi(i)).collect(),
        })
    }

    pub fn leading_ones(n: usize) -> Result<Self> {
        check_dimension(n)?;
        Ok(Self {
            kind: FitnessKind::LeadingOnes,
            n,
            weights: Vec::new(),
        })
    }

    pub fn zigzag(n: usize) -> Result<Self> {
        check_dimension(n)?;
        Ok(Self {
            kind: FitnessKind::Zigzag,
            n,
            weights: Vec::new(),
        })
    }

    pub fn kind(&self) -> FitnessKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Per-bit weights of a linear-family function; empty for the others.
    pub fn coefficients(&self) -> &[f64] {
        &self.weights
    }

    fn check_len(&self, x: &BitString) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &BitString) -> Result<f64> {
        self.check_len(x)?;
        Ok(self.evaluate_unchecked(x))
    }

    pub(crate) fn evaluate_unchecked(&self, x: &BitString) -> f64 {
        match self.kind {
            FitnessKind::OneMax => x.ones_count() as f64,
            FitnessKind::Linear | FitnessKind::BinVal => compensated_sum(
                x.bits()
                    .iter()
                    .zip(&self.weights)
                    .filter(|(&b, _)| b)
                    .map(|(_, &c)| c),
            ),
            FitnessKind::LeadingOnes => x.leading_ones() as f64,
            FitnessKind::Zigzag => zigzag_value(self.n, x.ones_count()),
        }
    }

    /// `f* = f(1^n)`.
    pub fn optimum(&self) -> f64 {
        match self.kind {
            FitnessKind::Linear | FitnessKind::OneMax | FitnessKind::BinVal => {
                compensated_sum(self.weights.iter().copied())
            }
            FitnessKind::LeadingOnes | FitnessKind::Zigzag => self.n as f64,
        }
    }

    /// Approximation error `f* - f(x)`.
    pub fn error(&self, x: &BitString) -> Result<f64> {
        self.check_len(x)?;
        Ok(self.error_unchecked(x))
    }

    pub(crate) fn error_unchecked(&self, x: &BitString) -> f64 {
        match self.kind {
            FitnessKind::OneMax => (self.n - x.ones_count()) as f64,
            // Summing the missing weights directly avoids cancellation in f* - f(x).
            FitnessKind::Linear | FitnessKind::BinVal => compensated_sum(
                x.bits()
                    .iter()
                    .zip(&self.weights)
                    .filter(|(&b, _)| !b)
                    .map(|(_, &c)| c),
            ),
            FitnessKind::LeadingOnes => (self.n - x.leading_ones()) as f64,
            FitnessKind::Zigzag => self.n as f64 - zigzag_value(self.n, x.ones_count()),
        }
    }

    /// Exact ordering of `f(x)` against `f(y)`.
    pub fn compare_exact(&self, x: &BitString, y: &BitString) -> Result<Ordering> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.compare_unchecked(x, y))
    }

    pub(crate) fn compare_unchecked(&self, x: &BitString, y: &BitString) -> Ordering {
        match self.kind {
            FitnessKind::OneMax => x.ones_count().cmp(&y.ones_count()),
            FitnessKind::BinVal => {
                // Bit n outweighs all lower bits together.
                for (a, b) in x.bits().iter().zip(y.bits()).rev() {
                    if a != b {
                        return a.cmp(b);
                    }
                }
                Ordering::Equal
            }
            FitnessKind::Linear => {
                let diff = self.linear_difference(x, y);
                diff.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
            }
            FitnessKind::LeadingOnes => x.leading_ones().cmp(&y.leading_ones()),
            FitnessKind::Zigzag => {
                let (fx, fy) = (zigzag_int(self.n, x.ones_count()), zigzag_int(self.n, y.ones_count()));
                fx.cmp(&fy)
            }
        }
    }

    /// `f(y) - f(x)` evaluated from the differing bits only.
    pub fn fitness_delta(&self, x: &BitString, y: &BitString) -> Result<f64> {
        self.check_len(x)?;
        self.check_len(y)?;
        Ok(self.delta_unchecked(x, y))
    }

    pub(crate) fn delta_unchecked(&self, x: &BitString, y: &BitString) -> f64 {
        match self.kind {
            FitnessKind::OneMax => y.ones_count() as f64 - x.ones_count() as f64,
            FitnessKind::Linear | FitnessKind::BinVal => -self.linear_difference(x, y),
            FitnessKind::LeadingOnes => y.leading_ones() as f64 - x.leading_ones() as f64,
            FitnessKind::Zigzag => {
                (zigzag_int(self.n, y.ones_count()) - zigzag_int(self.n, x.ones_count())) as f64
            }
        }
    }

    /// `f(x) - f(y)` with Neumaier summation over the bits where they differ.
    fn linear_difference(&self, x: &BitString, y: &BitString) -> f64 {
        compensated_sum(
            x.bits()
                .iter()
                .zip(y.bits())
                .zip(&self.weights)
                .filter(|((a, b), _)| a != b)
                .map(|((&a, _), &c)| if a { c } else { -c }),
        )
    }

    /// Fitness of any string with `ones` ones, for level-symmetric kinds.
    pub fn level_value(&self, ones: usize) -> Result<f64> {
        match self.kind {
            FitnessKind::OneMax => Ok(ones as f64),
            FitnessKind::Zigzag => Ok(zigzag_value(self.n, ones)),
            other => Err(Error::NotLevelSymmetric(other.name().into())),
        }
    }

    pub fn is_optimal(&self, x: &BitString) -> bool {
        x.is_all_ones()
    }
}

fn zigzag_int(n: usize, ones: usize) -> i64 {
    if (n - ones) % 2 == 0 {
        ones as i64
    } else {
        ones as i64 - 2
    }
}

/// Zigzag as a function of the ones-count: `|x|` when `n - |x|` is even, `|x| - 2` otherwise.
pub fn zigzag_value(n: usize, ones: usize) -> f64 {
    zigzag_int(n, ones) as f64
}

/// Neumaier's variant of Kahan summation.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn all_specs(n: usize, rng: &mut ChaCha8Rng) -> Vec<FitnessSpec> {
        vec![
            FitnessSpec::random_linear(n, rng).unwrap(),
            FitnessSpec::onemax(n).unwrap(),
            FitnessSpec::binval(n).unwrap(),
            FitnessSpec::leading_ones(n).unwrap(),
            FitnessSpec::zigzag(n).unwrap(),
        ]
    }

    #[test]
    fn evaluate_examples() {
        let lo = FitnessSpec::leading_ones(5).unwrap();
        assert_eq!(lo.evaluate(&bs("11010")).unwrap(), 2.0);
        let bv = FitnessSpec::binval(3).unwrap();
        assert_eq!(bv.evaluate(&bs("101")).unwrap(), 10.0);
        let zz = FitnessSpec::zigzag(4).unwrap();
        assert_eq!(zz.evaluate(&bs("0111")).unwrap(), 1.0);
    }

    #[test]
    fn optimum_examples() {
        assert_eq!(FitnessSpec::onemax(5).unwrap().optimum(), 5.0);
        assert_eq!(FitnessSpec::binval(3).unwrap().optimum(), 14.0);
        assert_eq!(FitnessSpec::zigzag(100).unwrap().optimum(), 100.0);
        assert_eq!(FitnessSpec::leading_ones(7).unwrap().optimum(), 7.0);
    }

    #[test]
    fn error_examples() {
        let bv = FitnessSpec::binval(3).unwrap();
        assert_eq!(bv.error(&bs("011")).unwrap(), 2.0);
        let zz = FitnessSpec::zigzag(4).unwrap();
        assert_eq!(zz.error(&bs("0111")).unwrap(), 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for spec in all_specs(6, &mut rng) {
            assert_eq!(spec.error(&BitString::ones(6)).unwrap(), 0.0);
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let spec = FitnessSpec::onemax(4).unwrap();
        assert!(matches!(
            spec.evaluate(&bs("101")),
            Err(Error::DimensionMismatch { expected: 4, got: 3 })
        ));
        assert!(spec.error(&bs("10101")).is_err());
        assert!(spec.compare_exact(&bs("1010"), &bs("101")).is_err());
    }

    #[test]
    fn binval_compare_beyond_double_precision() {
        let spec = FitnessSpec::binval(100).unwrap();
        let mut x = BitString::zeros(100);
        x.flip(99);
        let mut y = BitString::zeros(100);
        y.flip(0);
        assert_eq!(spec.compare_exact(&x, &y).unwrap(), Ordering::Greater);
        assert_eq!(spec.compare_exact(&y, &x).unwrap(), Ordering::Less);
        assert_eq!(spec.compare_exact(&x, &x).unwrap(), Ordering::Equal);

        // 2^100 + 2 and 2^100 + 4 round to the same double but must still be ordered.
        let mut a = x.clone();
        a.flip(0);
        let mut b = x.clone();
        b.flip(1);
        assert_eq!(spec.evaluate(&a).unwrap(), spec.evaluate(&b).unwrap());
        assert_eq!(spec.compare_exact(&a, &b).unwrap(), Ordering::Less);
    }

    #[test]
    fn onemax_compare_by_count() {
        let spec = FitnessSpec::onemax(5).unwrap();
        assert_eq!(
            spec.compare_exact(&bs("10101"), &bs("11000")).unwrap(),
            Ordering::Greater
        );
    }

    #[test]
    fn error_positive_off_optimum_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=12 {
            for spec in all_specs(n, &mut rng) {
                for idx in 0..(1usize << n) {
                    let x = BitString::from_index(idx, n);
                    let e = spec.error(&x).unwrap();
                    if x.is_all_ones() {
                        assert_eq!(e, 0.0);
                    } else {
                        assert!(e > 0.0, "{spec:?} {x}");
                    }
                }
            }
        }
    }

    #[test]
    fn linear_flip_zero_to_one_strictly_improves() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=10 {
            for _ in 0..3 {
                let spec = FitnessSpec::random_linear(n, &mut rng).unwrap();
                for idx in 0..(1usize << n) {
                    let x = BitString::from_index(idx, n);
                    for i in (0..n).filter(|&i| !x.get(i)) {
                        let mut y = x.clone();
                        y.flip(i);
                        assert_eq!(spec.compare_exact(&y, &x).unwrap(), Ordering::Greater);
                        assert!(spec.evaluate(&y).unwrap() > spec.evaluate(&x).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn compare_agrees_with_evaluate_small_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1, 5, 17, 30] {
            for spec in all_specs(n, &mut rng) {
                for _ in 0..2000 {
                    let x = BitString::random(n, &mut rng);
                    let y = BitString::random(n, &mut rng);
                    let expected = spec
                        .evaluate(&x)
                        .unwrap()
                        .partial_cmp(&spec.evaluate(&y).unwrap())
                        .unwrap();
                    if spec.kind() == FitnessKind::Linear {
                        // random coefficients are not exactly representable sums; only
                        // require agreement when the gap is well above rounding.
                        let gap = (spec.evaluate(&x).unwrap() - spec.evaluate(&y).unwrap()).abs();
                        if gap < 1e-12 {
                            continue;
                        }
                    }
                    assert_eq!(spec.compare_exact(&x, &y).unwrap(), expected, "{spec:?}");
                }
            }
        }
    }

    #[test]
    fn zigzag_matches_direct_transcription() {
        // f = |x| if n-|x| even, |x|-2 otherwise, written out independently for n = 6.
        let spec = FitnessSpec::zigzag(6).unwrap();
        for idx in 0..64usize {
            let ones = idx.count_ones() as i32;
            let expected = if (6 - ones) % 2 == 0 { ones } else { ones - 2 };
            let x = BitString::from_index(idx, 6);
            assert_eq!(spec.evaluate(&x).unwrap(), expected as f64);
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let spec: FitnessSpec = serde_json::from_str(r#"{"kind": "binval", "n": 100}"#).unwrap();
        assert_eq!(spec.kind(), FitnessKind::BinVal);
        let lin: FitnessSpec = serde_json::from_str(
            r#"{"kind": "linear", "n": 4, "coefficients": [0.3, 1.0, 2.5, 0.1]}"#,
        )
        .unwrap();
        assert_eq!(lin.optimum(), 3.9);
        let back: FitnessSpec = serde_json::from_str(&serde_json::to_string(&lin).unwrap()).unwrap();
        assert_eq!(back, lin);
        assert_eq!(
            serde_json::to_string(&spec).unwrap(),
            r#"{"kind":"binval","n":100}"#
        );

        for bad in [
            r#"{"kind": "linear", "n": 2, "coefficients": [1.0, -1.0]}"#,
            r#"{"kind": "linear", "n": 3, "coefficients": [1.0, 1.0]}"#,
            r#"{"kind": "linear", "n": 2}"#,
            r#"{"kind": "onemax", "n": 0}"#,
            r#"{"kind": "binval", "n": 2000}"#,
            r#"{"kind": "zigzag", "n": 3, "coefficients": [1, 1, 1]}"#,
        ] {
            assert!(serde_json::from_str::<FitnessSpec>(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn index_round_trip() {
        for idx in 0..256usize {
            assert_eq!(BitString::from_index(idx, 8).to_index(), idx);
        }
        assert_eq!(BitString::from_index(0b001, 3).to_string(), "100");
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let values = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(values), 2.0);
    }
}
