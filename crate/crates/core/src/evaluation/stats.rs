use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Differences closer than this to zero count as ties with `mu0`, and
/// absolute differences closer than this share a rank.
const TIE_EPS: f64 = 1e-9;

/// Largest sample size for which the null distribution is enumerated.
pub const EXACT_LIMIT: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Wilcoxon {
    /// `W⁺`, the sum of ranks of positive differences.
    pub statistic: f64,
    /// One-sided p-value for the alternative `median > mu0`.
    pub p_value: f64,
    /// Non-zero differences used.
    pub n: usize,
    pub exact: bool,
}

/// Average ranks of `|d|`, with ties grouped under [`TIE_EPS`]. Also
/// returns the tie group sizes.
fn ranks(abs: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..abs.len()).collect();
    order.sort_by(|&a, &b| abs[a].total_cmp(&abs[b]));
    let mut r = vec![0.0; abs.len()];
    let mut groups = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && abs[order[j]] - abs[order[i]] <= TIE_EPS {
            j += 1;
        }
        let avg = (i + 1 + j) as f64 / 2.0;
        for &k in &order[i..j] {
            r[k] = avg;
        }
        groups.push(j - i);
        i = j;
    }
    (r, groups)
}

/// One-sided Wilcoxon signed-rank test of `median(values) > mu0`.
///
/// Exact for at most [`EXACT_LIMIT`] non-zero differences, normal
/// approximation with tie and continuity correction above.
pub fn wilcoxon_signed_rank(values: &[f64], mu0: f64) -> Result<Wilcoxon> {
    let diffs: Vec<f64> = values.iter().map(|v| v - mu0).filter(|d| d.abs() > TIE_EPS).collect();
    let n = diffs.len();
    if n < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: n });
    }
    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (r, groups) = ranks(&abs);
    let w: f64 = diffs.iter().zip(&r).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    if n <= EXACT_LIMIT {
        // Doubled ranks are integers, so the comparison is exact.
        let twice: Vec<u64> = r.iter().map(|x| (x * 2.0).round() as u64).collect();
        let target = (w * 2.0).round() as u64;
        let mut at_least = 0u64;
        for mask in 0u32..(1 << n) {
            let s: u64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| twice[i]).sum();
            if s >= target {
                at_least += 1;
            }
        }
        let p = at_least as f64 / (1u64 << n) as f64;
        return Ok(Wilcoxon { statistic: w, p_value: p, n, exact: true });
    }
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie: f64 = groups.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie;
    let p = if var <= 0.0 {
        if w > mean {
            0.0
        } else {
            1.0
        }
    } else {
        let z = (w - mean - 0.5) / var.sqrt();
        1.0 - Normal::standard().cdf(z)
    };
    Ok(Wilcoxon { statistic: w, p_value: p, n, exact: false })
}
