//! Deterministic random number generation.
//!
//! Every stochastic routine in this crate draws from [`SplitMix64`], a small
//! 64-bit generator with a fully specified algorithm, so that results are
//! bit-identical across platforms, compiler versions, and worker counts.
//! Parallel work derives one independent stream per task via
//! [`derive_seed`], which mixes a master seed with a task index.

/// SplitMix64 finalization step (Steele, Lea & Flood's mixer).
///
/// ```text
/// z = x + 0x9E3779B97F4A7C15
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
/// z = (z ^ (z >> 27)) * 0x94D049BB133111EB
/// return z ^ (z >> 31)
/// ```
#[inline]
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed for one unit of parallel work.
///
/// `derive_seed(master, i) = mix64(mix64(master) ^ mix64(i + 1))`.
///
/// The inner mixes decorrelate nearby master seeds and nearby indices, so
/// streams for consecutive shuffles (or documents) do not overlap in any
/// observable way.
#[inline]
pub fn derive_seed(master_seed: u64, index: u64) -> u64 {
    mix64(mix64(master_seed) ^ mix64(index.wrapping_add(1)))
}

/// SplitMix64: `state += 0x9E3779B97F4A7C15; output = mix(state)`.
///
/// Passes BigCrush, has period 2^64, and is cheap enough to construct per
/// task. Not suitable for cryptography.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform double in `[0, 1)` built from the top 53 bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)` via Lemire's widening-multiply rejection
    /// method (unbiased, no modulo in the common path).
    ///
    /// # Panics
    /// Panics if `n == 0`.
    #[inline]
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "next_below(0)");
        let mut x = self.next_u64();
        let mut m = (x as u128) * (n as u128);
        let mut low = m as u64;
        if low < n {
            let threshold = n.wrapping_neg() % n;
            while low < threshold {
                x = self.next_u64();
                m = (x as u128) * (n as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    #[inline]
    pub fn next_bool(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// In-place Fisher–Yates shuffle (descending index variant).
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }

    /// Draws an index from the categorical distribution with the given
    /// nonnegative weights (not necessarily normalized) by inverting a
    /// single uniform against the running cumulative sum.
    ///
    /// # Panics
    /// Panics if the weights are empty or sum to zero.
    pub fn next_weighted(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        assert!(total > 0.0, "next_weighted: weights sum to zero");
        let u = self.next_f64() * total;
        let mut acc = 0.0;
        for (i, &w) in weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        weights.len() - 1
    }

    /// Standard normal variate via the Box–Muller transform (one branch of
    /// the pair; the sibling value is discarded to keep the stream simple).
    pub fn next_standard_normal(&mut self) -> f64 {
        // u in (0, 1] so the log is finite.
        let u = 1.0 - self.next_f64();
        let v = self.next_f64();
        (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
    }

    /// Gamma(shape, 1) variate, Marsaglia–Tsang squeeze method.
    ///
    /// For `shape < 1` applies the boost `Gamma(a) = Gamma(a + 1) * U^(1/a)`.
    pub fn next_gamma(&mut self, shape: f64) -> f64 {
        assert!(shape > 0.0, "next_gamma: shape must be positive");
        if shape < 1.0 {
            let boost = self.next_f64().max(f64::MIN_POSITIVE).powf(1.0 / shape);
            return boost * self.next_gamma(shape + 1.0);
        }
        let d = shape - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.next_standard_normal();
            let v = 1.0 + c * x;
            if v <= 0.0 {
                continue;
            }
            let v = v * v * v;
            let u = self.next_f64().max(f64::MIN_POSITIVE);
            if u < 1.0 - 0.0331 * x * x * x * x {
                return d * v;
            }
            if u.ln() < 0.5 * x * x + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }

    /// Dirichlet variate with a symmetric concentration parameter.
    pub fn next_dirichlet_symmetric(&mut self, alpha: f64, len: usize) -> Vec<f64> {
        let mut draws: Vec<f64> = (0..len).map(|_| self.next_gamma(alpha)).collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 {
            for d in &mut draws {
                *d /= total;
            }
        } else {
            // All gammas underflowed (tiny alpha); fall back to a point mass.
            let k = self.next_below(len as u64) as usize;
            draws.iter_mut().for_each(|d| *d = 0.0);
            draws[k] = 1.0;
        }
        draws
    }

    /// Poisson variate, Knuth's product-of-uniforms method.
    ///
    /// Adequate for the small means used by the corpus generators; runtime
    /// is linear in the mean.
    pub fn next_poisson(&mut self, mean: f64) -> u64 {
        assert!(mean >= 0.0 && mean < 1e6, "next_poisson: mean out of range");
        let limit = (-mean).exp();
        let mut product = 1.0;
        let mut count = 0u64;
        loop {
            product *= self.next_f64();
            if product <= limit {
                return count;
            }
            count += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix64_matches_reference_vector() {
        // splitmix64(0) from the reference implementation.
        assert_eq!(mix64(0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn streams_are_reproducible() {
        let mut a = SplitMix64::new(42);
        let mut b = SplitMix64::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn derived_seeds_differ_per_index() {
        let seeds: Vec<u64> = (0..1000).map(|i| derive_seed(7, i)).collect();
        let mut dedup = seeds.clone();
        dedup.sort_unstable();
        dedup.dedup();
        assert_eq!(dedup.len(), seeds.len());
    }

    #[test]
    fn next_below_is_in_range_and_roughly_uniform() {
        let mut rng = SplitMix64::new(1);
        let mut counts = [0u32; 7];
        for _ in 0..70_000 {
            counts[rng.next_below(7) as usize] += 1;
        }
        for &c in &counts {
            assert!((8_000..12_000).contains(&c), "counts {counts:?}");
        }
    }

    #[test]
    fn next_f64_is_in_unit_interval() {
        let mut rng = SplitMix64::new(9);
        for _ in 0..10_000 {
            let x = rng.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut rng = SplitMix64::new(3);
        let mut v: Vec<u32> = (0..50).collect();
        rng.shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..50).collect::<Vec<u32>>());
        assert_ne!(v, (0..50).collect::<Vec<u32>>());
    }

    #[test]
    fn weighted_draw_tracks_weights() {
        let mut rng = SplitMix64::new(5);
        let weights = [1.0, 3.0];
        let mut ones = 0u32;
        for _ in 0..40_000 {
            if rng.next_weighted(&weights) == 1 {
                ones += 1;
            }
        }
        let frac = f64::from(ones) / 40_000.0;
        assert!((frac - 0.75).abs() < 0.01, "frac={frac}");
    }

    #[test]
    fn gamma_mean_matches_shape() {
        let mut rng = SplitMix64::new(11);
        for &shape in &[0.5, 1.0, 4.0] {
            let n = 20_000;
            let mean: f64 = (0..n).map(|_| rng.next_gamma(shape)).sum::<f64>() / n as f64;
            assert!((mean - shape).abs() < 0.1 * shape.max(0.5), "shape={shape} mean={mean}");
        }
    }

    #[test]
    fn poisson_mean_matches_parameter() {
        let mut rng = SplitMix64::new(13);
        let n = 20_000;
        let mean: f64 = (0..n).map(|_| rng.next_poisson(8.0) as f64).sum::<f64>() / n as f64;
        assert!((mean - 8.0).abs() < 0.1, "mean={mean}");
    }

    #[test]
    fn dirichlet_sums_to_one() {
        let mut rng = SplitMix64::new(17);
        let draw = rng.next_dirichlet_symmetric(0.3, 10);
        let total: f64 = draw.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert!(draw.iter().all(|&x| x >= 0.0));
    }
}
