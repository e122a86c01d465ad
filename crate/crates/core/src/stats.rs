//! Statistical tests for binary sequences, following the NIST SP 800-22
//! formulations of the seven tests with closed-form p-values: frequency
//! (monobit), frequency within a block, runs, longest run of ones,
//! cumulative sums, serial and approximate entropy.
//!
//! The remaining tests of the suite are left to the reference
//! implementation; [`export_bitstream`] writes its ASCII input format.

use std::fmt;
use std::path::Path;

use serde::Serialize;
use statrs::function::{erf, gamma};

use crate::bits::BitSequence;
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    erf::erfc(x)
}

/// Regularized upper incomplete gamma function `Q(a, x)`.
pub fn igamc(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma::gamma_ur(a, x)
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

fn clamp_p(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TestId {
    Frequency,
    BlockFrequency,
    Runs,
    LongestRun,
    CumulativeSums,
    Serial,
    ApproximateEntropy,
}

impl TestId {
    pub const ALL: [TestId; 7] = [
        TestId::Frequency,
        TestId::BlockFrequency,
        TestId::Runs,
        TestId::LongestRun,
        TestId::CumulativeSums,
        TestId::Serial,
        TestId::ApproximateEntropy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestId::Frequency => "frequency",
            TestId::BlockFrequency => "block-frequency",
            TestId::Runs => "runs",
            TestId::LongestRun => "longest-run",
            TestId::CumulativeSums => "cumulative-sums",
            TestId::Serial => "serial",
            TestId::ApproximateEntropy => "approximate-entropy",
        }
    }

    pub fn from_name(name: &str) -> Result<TestId> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == name)
            .ok_or_else(|| invalid(format!("unknown test {name:?}")))
    }
}

impl fmt::Display for TestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TestParams {
    /// Block length `M` of the block frequency test.
    pub block_len: usize,
    /// Pattern length `m` of the serial test.
    pub serial_m: usize,
    /// Pattern length `m` of the approximate entropy test.
    pub entropy_m: usize,
}

impl Default for TestParams {
    fn default() -> Self {
        Self {
            block_len: 128,
            serial_m: 2,
            entropy_m: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TestReport {
    pub test: &'static str,
    pub params: String,
    pub p_values: Vec<f64>,
    pub alpha: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TestReport {
    fn new(test: TestId, params: String, p_values: Vec<f64>, alpha: f64) -> Self {
        let pass = !p_values.is_empty() && p_values.iter().all(|&p| p >= alpha);
        Self {
            test: test.name(),
            params,
            p_values,
            alpha,
            pass,
            error: None,
        }
    }

    fn failed(test: TestId, params: String, alpha: f64, err: &Error) -> Self {
        Self {
            test: test.name(),
            params,
            p_values: Vec::new(),
            alpha,
            pass: false,
            error: Some(err.to_string()),
        }
    }

    /// `test,params,p_values,pass` with p-values joined by `;`.
    pub fn csv_row(&self) -> String {
        let ps: Vec<String> = self.p_values.iter().map(|p| format!("{p:.6}")).collect();
        format!(
            "{},{},{},{}",
            self.test,
            self.params,
            ps.join(";"),
            self.pass
        )
    }

    pub const CSV_HEADER: &'static str = "test,params,p_values,pass";
}

fn require(test: &'static str, bits: &[u8], needed: usize) -> Result<()> {
    if bits.len() < needed {
        Err(Error::InsufficientData {
            test,
            needed,
            got: bits.len(),
        })
    } else {
        Ok(())
    }
}

/// Frequency (monobit) test.
pub fn frequency(bits: &[u8]) -> Result<f64> {
    require("frequency", bits, 1)?;
    let n = bits.len() as f64;
    let s: i64 = bits.iter().map(|&b| if b == 1 { 1 } else { -1 }).sum();
    let s_obs = (s as f64).abs() / n.sqrt();
    Ok(clamp_p(erfc(s_obs / std::f64::consts::SQRT_2)))
}

/// Frequency test within blocks of `m` bits; trailing bits are discarded.
pub fn block_frequency(bits: &[u8], m: usize) -> Result<f64> {
    if m == 0 {
        return Err(invalid("block length must be positive"));
    }
    require("block-frequency", bits, m)?;
    let blocks = bits.len() / m;
    let chi2: f64 = bits
        .chunks_exact(m)
        .map(|block| {
            let pi = block.iter().map(|&b| f64::from(b)).sum::<f64>() / m as f64;
            (pi - 0.5) * (pi - 0.5)
        })
        .sum::<f64>()
        * 4.0
        * m as f64;
    Ok(clamp_p(igamc(blocks as f64 / 2.0, chi2 / 2.0)))
}

/// Runs test. Returns 0 when the frequency prerequisite fails.
pub fn runs(bits: &[u8]) -> Result<f64> {
    require("runs", bits, 2)?;
    let n = bits.len() as f64;
    let pi = bits.iter().map(|&b| f64::from(b)).sum::<f64>() / n;
    if (pi - 0.5).abs() >= 2.0 / n.sqrt() {
        return Ok(0.0);
    }
    let v_obs = 1 + bits.windows(2).filter(|w| w[0] != w[1]).count();
    let num = (v_obs as f64 - 2.0 * n * pi * (1.0 - pi)).abs();
    let den = 2.0 * (2.0 * n).sqrt() * pi * (1.0 - pi);
    Ok(clamp_p(erfc(num / den)))
}

struct LongestRunTable {
    block: usize,
    // v <= first class bound, ..., v >= last class bound
    low: usize,
    probabilities: &'static [f64],
}

fn longest_run_table(n: usize) -> Option<LongestRunTable> {
    if n >= 750_000 {
        Some(LongestRunTable {
            block: 10_000,
            low: 10,
            probabilities: &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727],
        })
    } else if n >= 6272 {
        Some(LongestRunTable {
            block: 128,
            low: 4,
            probabilities: &[0.1174, 0.2430, 0.2493, 0.1752, 0.1027, 0.1124],
        })
    } else if n >= 128 {
        Some(LongestRunTable {
            block: 8,
            low: 1,
            probabilities: &[0.2148, 0.3672, 0.2305, 0.1875],
        })
    } else {
        None
    }
}

/// Longest run of ones in a block; block size chosen from the length.
pub fn longest_run(bits: &[u8]) -> Result<f64> {
    let table = longest_run_table(bits.len()).ok_or(Error::InsufficientData {
        test: "longest-run",
        needed: 128,
        got: bits.len(),
    })?;
    let classes = table.probabilities.len();
    let mut counts = vec![0u64; classes];
    for block in bits.chunks_exact(table.block) {
        let (mut best, mut run) = (0usize, 0usize);
        for &b in block {
            run = if b == 1 { run + 1 } else { 0 };
            best = best.max(run);
        }
        let class = best.clamp(table.low, table.low + classes - 1) - table.low;
        counts[class] += 1;
    }
    let blocks = (bits.len() / table.block) as f64;
    let chi2: f64 = counts
        .iter()
        .zip(table.probabilities)
        .map(|(&c, &p)| {
            let expected = blocks * p;
            (c as f64 - expected).powi(2) / expected
        })
        .sum();
    Ok(clamp_p(igamc((classes - 1) as f64 / 2.0, chi2 / 2.0)))
}

/// Cumulative sums test, forward (`true`) or backward.
pub fn cumulative_sums(bits: &[u8], forward: bool) -> Result<f64> {
    require("cumulative-sums", bits, 1)?;
    let n = bits.len() as i64;
    let step = |&b: &u8| if b == 1 { 1i64 } else { -1 };
    let mut s = 0i64;
    let mut z = 0i64;
    let mut visit = |d: i64| {
        s += d;
        z = z.max(s.abs());
    };
    if forward {
        bits.iter().map(step).for_each(&mut visit);
    } else {
        bits.iter().rev().map(step).for_each(&mut visit);
    }
    let sqrt_n = (n as f64).sqrt();
    let zf = z as f64;
    // integer bounds truncate toward zero, as in the reference code
    let mut sum1 = 0.0;
    for k in (-n / z + 1) / 4..=(n / z - 1) / 4 {
        let k = k as f64;
        sum1 +=
            normal_cdf((4.0 * k + 1.0) * zf / sqrt_n) - normal_cdf((4.0 * k - 1.0) * zf / sqrt_n);
    }
    let mut sum2 = 0.0;
    for k in (-n / z - 3) / 4..=(n / z - 1) / 4 {
        let k = k as f64;
        sum2 +=
            normal_cdf((4.0 * k + 3.0) * zf / sqrt_n) - normal_cdf((4.0 * k + 1.0) * zf / sqrt_n);
    }
    Ok(clamp_p(1.0 - sum1 + sum2))
}

/// Counts of every overlapping `m`-bit pattern, the sequence wrapping
/// around at the end.
fn pattern_counts(bits: &[u8], m: usize) -> Vec<u64> {
    let mut counts = vec![0u64; 1 << m];
    if m == 0 {
        counts[0] = bits.len() as u64;
        return counts;
    }
    let n = bits.len();
    let mask = (1usize << m) - 1;
    let mut word = 0usize;
    for k in 0..m - 1 {
        word = (word << 1) | usize::from(bits[k % n]);
    }
    for k in 0..n {
        word = ((word << 1) | usize::from(bits[(k + m - 1) % n])) & mask;
        counts[word] += 1;
    }
    counts
}

fn psi_squared(bits: &[u8], m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let n = bits.len() as f64;
    let sum: f64 = pattern_counts(bits, m)
        .iter()
        .map(|&c| (c as f64).powi(2))
        .sum();
    sum * (1u64 << m) as f64 / n - n
}

/// Serial test; returns both p-values.
pub fn serial(bits: &[u8], m: usize) -> Result<(f64, f64)> {
    if m < 2 {
        return Err(invalid("serial test needs m >= 2"));
    }
    require("serial", bits, m)?;
    let psi_m = psi_squared(bits, m);
    let psi_m1 = psi_squared(bits, m - 1);
    let psi_m2 = psi_squared(bits, m - 2);
    let del1 = psi_m - psi_m1;
    let del2 = psi_m - 2.0 * psi_m1 + psi_m2;
    let p1 = igamc((1u64 << (m - 1)) as f64 / 2.0, del1 / 2.0);
    let p2 = igamc((1u64 << (m - 2)) as f64 / 2.0, del2 / 2.0);
    Ok((clamp_p(p1), clamp_p(p2)))
}

fn phi(bits: &[u8], m: usize) -> f64 {
    let n = bits.len() as f64;
    pattern_counts(bits, m)
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum()
}

/// Approximate entropy test with pattern length `m`.
pub fn approximate_entropy(bits: &[u8], m: usize) -> Result<f64> {
    if m == 0 {
        return Err(invalid("approximate entropy needs m >= 1"));
    }
    require("approximate-entropy", bits, m + 1)?;
    let n = bits.len() as f64;
    let apen = phi(bits, m) - phi(bits, m + 1);
    let chi2 = 2.0 * n * (std::f64::consts::LN_2 - apen);
    Ok(clamp_p(igamc((1u64 << (m - 1)) as f64, chi2 / 2.0)))
}

/// Pearson chi-square of `counts` against the uniform distribution;
/// returns `(statistic, p-value)`.
pub fn chi_square_uniform(counts: &[u64]) -> (f64, f64) {
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    let dof = (counts.len() - 1) as f64;
    (stat, clamp_p(igamc(dof / 2.0, stat / 2.0)))
}

fn floor_log2(n: usize) -> usize {
    if n == 0 {
        0
    } else {
        (usize::BITS - 1 - n.leading_zeros()) as usize
    }
}

fn check_pattern_length(test: &'static str, n: usize, m: usize) -> Result<()> {
    // m < floor(log2 n) - 2
    if m + 2 < floor_log2(n) {
        Ok(())
    } else {
        Err(Error::InsufficientData {
            test,
            needed: 1usize.checked_shl((m + 3) as u32).unwrap_or(usize::MAX),
            got: n,
        })
    }
}

fn describe(which: TestId, params: &TestParams) -> String {
    match which {
        TestId::BlockFrequency => format!("M={}", params.block_len),
        TestId::Serial => format!("m={}", params.serial_m),
        TestId::ApproximateEntropy => format!("m={}", params.entropy_m),
        TestId::CumulativeSums => "forward;backward".into(),
        _ => String::new(),
    }
}

fn p_values(bits: &[u8], which: TestId, params: &TestParams) -> Result<Vec<f64>> {
    let n = bits.len();
    match which {
        TestId::Frequency => {
            require("frequency", bits, 100)?;
            Ok(vec![frequency(bits)?])
        }
        TestId::BlockFrequency => {
            require("block-frequency", bits, params.block_len.max(100))?;
            Ok(vec![block_frequency(bits, params.block_len)?])
        }
        TestId::Runs => {
            require("runs", bits, 100)?;
            Ok(vec![runs(bits)?])
        }
        TestId::LongestRun => Ok(vec![longest_run(bits)?]),
        TestId::CumulativeSums => {
            require("cumulative-sums", bits, 100)?;
            Ok(vec![
                cumulative_sums(bits, true)?,
                cumulative_sums(bits, false)?,
            ])
        }
        TestId::Serial => {
            check_pattern_length("serial", n, params.serial_m)?;
            let (p1, p2) = serial(bits, params.serial_m)?;
            Ok(vec![p1, p2])
        }
        TestId::ApproximateEntropy => {
            check_pattern_length("approximate-entropy", n, params.entropy_m)?;
            Ok(vec![approximate_entropy(bits, params.entropy_m)?])
        }
    }
}

/// Runs one test with its length requirements enforced.
pub fn run_test(
    bits: &BitSequence,
    which: TestId,
    params: &TestParams,
    alpha: f64,
) -> Result<TestReport> {
    let ps = p_values(bits.as_slice(), which, params)?;
    Ok(TestReport::new(which, describe(which, params), ps, alpha))
}

/// Runs every implemented test; a test whose requirements are not met
/// yields a failing report carrying the error.
pub fn run_battery(
    bits: &BitSequence,
    alpha: f64,
    params: &TestParams,
    execution: Execution,
) -> Vec<TestReport> {
    execution.map(&TestId::ALL, |&which| {
        run_test(bits, which, params, alpha)
            .unwrap_or_else(|e| TestReport::failed(which, describe(which, params), alpha, &e))
    })
}

/// Writes `bits` as ASCII `0`/`1` characters with no separators.
pub fn export_bitstream(bits: &BitSequence, path: impl AsRef<Path>) -> Result<()> {
    bits.write_ascii(path)
}
