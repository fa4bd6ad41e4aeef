//! Shared statistics: log/log power-law regression, symbolic-sequence
//! entropy rates, and nearest-rank percentiles.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;

use crate::error::{Error, Result};

/// Ordinary least-squares fit of `log f = intercept + slope * log r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// Log/log regression coefficient; a Zipf distribution with exponent `s`
    /// fits with slope `-s`.
    pub slope: f64,
    /// Intercept on the natural-log scale.
    pub intercept: f64,
    /// Coefficient of determination of the log/log regression, in `[0, 1]`.
    pub r_squared: f64,
}

impl PowerLawFit {
    /// Frequency predicted by the fitted line at the given rank.
    pub fn predict(&self, rank: f64) -> f64 {
        (self.intercept + self.slope * rank.ln()).exp()
    }
}

/// Fits a power law `f(r) ∝ r^slope` to a rank/frequency table by ordinary
/// least squares on the (ln rank, ln frequency) pairs.
///
/// Requires at least 3 points, strictly increasing ranks, and strictly
/// positive frequencies.
pub fn fit_power_law(rank_frequency: &[(u64, f64)]) -> Result<PowerLawFit> {
    if rank_frequency.len() < 3 {
        return Err(Error::InvalidConfig(format!(
            "power-law fit needs at least 3 points, got {}",
            rank_frequency.len()
        )));
    }
    for window in rank_frequency.windows(2) {
        if window[1].0 <= window[0].0 {
            return Err(Error::InvalidConfig(
                "power-law fit requires strictly increasing ranks".into(),
            ));
        }
    }
    let mut xs = Vec::with_capacity(rank_frequency.len());
    let mut ys = Vec::with_capacity(rank_frequency.len());
    for &(rank, freq) in rank_frequency {
        if rank == 0 {
            return Err(Error::domain("rank", "rank >= 1", rank as f64));
        }
        if !(freq > 0.0) || !freq.is_finite() {
            return Err(Error::domain("frequency", "frequency > 0", freq));
        }
        xs.push((rank as f64).ln());
        ys.push(freq.ln());
    }
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(&ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InvalidConfig(
            "power-law fit requires variance in log rank".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    // R^2 on the log scale: 1 - SS_res / SS_tot, clamped against rounding.
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        let mut ss_res = 0.0;
        for (&x, &y) in xs.iter().zip(&ys) {
            let resid = y - (intercept + slope * x);
            ss_res += resid * resid;
        }
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok(PowerLawFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Which plug-in entropy estimator produced an [`EntropyEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyOrder {
    /// Shannon entropy of the empirical symbol distribution.
    Marginal,
    /// Conditional entropy of the next symbol given the current one,
    /// from empirical bigram counts.
    Conditional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub bits_per_symbol: f64,
    pub estimator: EntropyOrder,
    pub sequence_length: usize,
    pub alphabet_size: usize,
}

/// Plug-in entropy rate of a symbol sequence, in bits per symbol.
///
/// `order` 0 is the Shannon entropy of the empirical unigram distribution;
/// `order` 1 is the conditional entropy of the next symbol given the current
/// one, computed from empirical bigram counts (symbols occurring only at the
/// end of the sequence head no bigram and contribute zero weight).
pub fn entropy_rate<S: Eq + std::hash::Hash + Clone>(
    sequence: &[S],
    order: u8,
) -> Result<EntropyEstimate> {
    if sequence.is_empty() {
        return Err(Error::EmptyInput("entropy_rate sequence"));
    }
    let mut alphabet: HashMap<&S, usize> = HashMap::new();
    for s in sequence {
        let next = alphabet.len();
        alphabet.entry(s).or_insert(next);
    }
    let alphabet_size = alphabet.len();
    let bits = match order {
        0 => {
            let mut counts = vec![0u64; alphabet_size];
            for s in sequence {
                counts[alphabet[s]] += 1;
            }
            shannon_bits(&counts)
        }
        1 => {
            if sequence.len() < 2 {
                return Err(Error::InvalidConfig(
                    "order-1 entropy needs a sequence of length >= 2".into(),
                ));
            }
            // bigram[a][b] = number of transitions a -> b
            let mut bigram = vec![0u64; alphabet_size * alphabet_size];
            for pair in sequence.windows(2) {
                let a = alphabet[&pair[0]];
                let b = alphabet[&pair[1]];
                bigram[a * alphabet_size + b] += 1;
            }
            let total = (sequence.len() - 1) as f64;
            let mut h = 0.0;
            for a in 0..alphabet_size {
                let row = &bigram[a * alphabet_size..(a + 1) * alphabet_size];
                let row_total: u64 = row.iter().sum();
                if row_total == 0 {
                    continue;
                }
                h += (row_total as f64 / total) * shannon_bits(row);
            }
            h
        }
        other => {
            return Err(Error::InvalidConfig(format!(
                "entropy order must be 0 or 1, got {other}"
            )))
        }
    };
    Ok(EntropyEstimate {
        bits_per_symbol: bits,
        estimator: if order == 0 {
            EntropyOrder::Marginal
        } else {
            EntropyOrder::Conditional
        },
        sequence_length: sequence.len(),
        alphabet_size,
    })
}

/// Shannon entropy in bits of the distribution given by nonnegative counts.
fn shannon_bits(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let total = total as f64;
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / total;
            h -= p * p.log2();
        }
    }
    h
}

/// 1-based rank of the nearest-rank percentile: `ceil(p * n)`.
pub(crate) fn nearest_rank(n: usize, p: f64) -> usize {
    debug_assert!(p > 0.0 && p <= 1.0);
    ((p * n as f64).ceil() as usize).clamp(1, n)
}

/// Nearest-rank percentile: the `ceil(p * n)`-th smallest value.
pub fn percentile_nearest_rank(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptyInput("percentile values"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain("p", "0 < p <= 1", p));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("non-NaN percentile input"));
    Ok(sorted[nearest_rank(sorted.len(), p) - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn exact_zipf_recovers_slope_and_unit_r_squared() {
        let points: Vec<(u64, f64)> = (1..=50).map(|r| (r, 100.0 / r as f64)).collect();
        let fit = fit_power_law(&points).unwrap();
        assert_abs_diff_eq!(fit.slope, -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.r_squared, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn exact_power_law_with_fractional_exponent() {
        let points: Vec<(u64, f64)> = (1..=40)
            .map(|r| (r, 7.5 / (r as f64).powf(0.8)))
            .collect();
        let fit = fit_power_law(&points).unwrap();
        assert_abs_diff_eq!(fit.slope, -0.8, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.predict(1.0), 7.5, epsilon = 1e-9);
    }

    #[test]
    fn noisy_zipf_keeps_high_r_squared_across_seeds() {
        // Multiplicative lognormal noise, sigma = 0.1, ranks 1..=100.
        for seed in 0..10u64 {
            let mut rng = SplitMix64::new(1000 + seed);
            let points: Vec<(u64, f64)> = (1..=100)
                .map(|r| {
                    let noise = (0.1 * rng.next_standard_normal()).exp();
                    (r, 100.0 / r as f64 * noise)
                })
                .collect();
            let fit = fit_power_law(&points).unwrap();
            assert!(fit.r_squared >= 0.95, "seed {seed}: r2 = {}", fit.r_squared);
        }
    }

    #[test]
    fn fit_rejects_degenerate_inputs() {
        assert!(fit_power_law(&[(1, 1.0), (2, 0.5)]).is_err());
        assert!(fit_power_law(&[(1, 1.0), (2, 0.5), (2, 0.4)]).is_err());
        assert!(fit_power_law(&[(1, 1.0), (2, -0.5), (3, 0.2)]).is_err());
    }

    #[test]
    fn fit_is_scale_invariant_except_intercept() {
        let base: Vec<(u64, f64)> = (1..=30).map(|r| (r, 10.0 / (r as f64).powf(1.3))).collect();
        let scaled: Vec<(u64, f64)> = base.iter().map(|&(r, f)| (r, 13.0 * f)).collect();
        let a = fit_power_law(&base).unwrap();
        let b = fit_power_law(&scaled).unwrap();
        assert_abs_diff_eq!(a.slope, b.slope, epsilon = 1e-9);
        assert_abs_diff_eq!(a.r_squared, b.r_squared, epsilon = 1e-9);
        assert_abs_diff_eq!(b.intercept - a.intercept, 13.0f64.ln(), epsilon = 1e-9);
    }

    #[test]
    fn constant_sequence_has_zero_entropy_at_both_orders() {
        let seq = vec!["t"; 500];
        assert_eq!(entropy_rate(&seq, 0).unwrap().bits_per_symbol, 0.0);
        assert_eq!(entropy_rate(&seq, 1).unwrap().bits_per_symbol, 0.0);
    }

    #[test]
    fn alternating_sequence_is_deterministic_at_order_one() {
        let seq: Vec<u8> = (0..1000).map(|i| (i % 2) as u8).collect();
        let h1 = entropy_rate(&seq, 1).unwrap();
        assert_eq!(h1.bits_per_symbol, 0.0);
        // While the marginal entropy stays at one bit.
        let h0 = entropy_rate(&seq, 0).unwrap();
        assert_abs_diff_eq!(h0.bits_per_symbol, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn iid_uniform_four_symbols_is_two_bits() {
        let mut rng = SplitMix64::new(77);
        let seq: Vec<u8> = (0..100_000).map(|_| rng.next_below(4) as u8).collect();
        let h0 = entropy_rate(&seq, 0).unwrap();
        assert!((h0.bits_per_symbol - 2.0).abs() < 0.05, "{}", h0.bits_per_symbol);
        assert_eq!(h0.alphabet_size, 4);
    }

    #[test]
    fn conditioning_never_increases_entropy_on_long_sequences() {
        // Mix of iid and Markov-generated sequences, length 10^4 each.
        for seed in 0..20u64 {
            let mut rng = SplitMix64::new(90 + seed);
            let k = 2 + rng.next_below(8) as usize;
            let markov = seed % 2 == 0;
            let mut state = 0usize;
            let seq: Vec<u8> = (0..10_000)
                .map(|_| {
                    state = if markov && rng.next_bool(0.7) {
                        (state + 1) % k
                    } else {
                        rng.next_below(k as u64) as usize
                    };
                    state as u8
                })
                .collect();
            let h0 = entropy_rate(&seq, 0).unwrap().bits_per_symbol;
            let h1 = entropy_rate(&seq, 1).unwrap().bits_per_symbol;
            assert!(h1 <= h0 + 1e-9, "seed {seed}: h1={h1} h0={h0}");
        }
    }

    #[test]
    fn entropy_rejects_empty_input() {
        assert!(entropy_rate::<u8>(&[], 0).is_err());
        assert!(entropy_rate(&[1u8], 1).is_err());
    }

    #[test]
    fn percentile_examples() {
        let values: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(percentile_nearest_rank(&values, 0.10).unwrap(), 10.0);
        assert_eq!(percentile_nearest_rank(&[7.0], 0.33).unwrap(), 7.0);
        assert_eq!(percentile_nearest_rank(&[3.0, 1.0, 2.0], 1.0).unwrap(), 3.0);
        assert!(percentile_nearest_rank(&[], 0.5).is_err());
        assert!(percentile_nearest_rank(&[1.0], 0.0).is_err());
    }

    proptest! {
        #[test]
        fn percentile_at_one_is_the_maximum(values in proptest::collection::vec(-1e9..1e9f64, 1..200)) {
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(percentile_nearest_rank(&values, 1.0).unwrap(), max);
        }

        #[test]
        fn percentile_is_monotone_in_p(
            values in proptest::collection::vec(-1e6..1e6f64, 1..100),
            p1 in 0.01..1.0f64,
            p2 in 0.01..1.0f64,
        ) {
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            let a = percentile_nearest_rank(&values, lo).unwrap();
            let b = percentile_nearest_rank(&values, hi).unwrap();
            prop_assert!(a <= b);
        }

        #[test]
        fn r_squared_is_bounded(points in proptest::collection::vec((0.1..1e6f64), 3..40)) {
            let table: Vec<(u64, f64)> = points.iter().enumerate()
                .map(|(i, &f)| ((i + 1) as u64, f))
                .collect();
            let fit = fit_power_law(&table).unwrap();
            prop_assert!((0.0..=1.0).contains(&fit.r_squared));
        }
    }
}
