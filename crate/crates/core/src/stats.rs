//! Monte Carlo estimates and deterministic chunked reductions.

use rayon::prelude::*;

/// Paths per reduction chunk. Chunk boundaries and summation order are fixed,
/// so reductions are bit-identical for any worker count.
pub const CHUNK: usize = 1 << 16;

/// A Monte Carlo estimate: sample mean, standard error of the mean, sample count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub n: usize,
}

impl Estimate {
    pub fn exact(value: f64, n: usize) -> Self {
        Self { value, std_error: 0.0, n }
    }

    /// Conservative standard error of `self - other`, ignoring the (positive)
    /// correlation common random numbers induce.
    pub fn combined_se(&self, other: &Estimate) -> f64 {
        self.std_error + other.std_error
    }

    /// Number of standard errors separating `self.value` from `target`.
    pub fn z_score(&self, target: f64) -> f64 {
        if self.std_error > 0.0 {
            (self.value - target) / self.std_error
        } else if self.value == target {
            0.0
        } else {
            f64::INFINITY.copysign(self.value - target)
        }
    }
}

/// Running mean and centred second moment (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    #[inline]
    pub(crate) fn push(&mut self, v: f64) {
        self.n += 1;
        let delta = v - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (v - self.mean);
    }

    pub(crate) fn merge(self, other: Moments) -> Moments {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Moments { n, mean: self.mean + delta * w, m2: self.m2 + other.m2 + delta * delta * self.n as f64 * w }
    }

    pub(crate) fn estimate(&self) -> Estimate {
        let std_error = if self.n > 1 { (self.m2.max(0.0) / (self.n - 1) as f64 / self.n as f64).sqrt() } else { 0.0 };
        Estimate { value: self.mean, std_error, n: self.n }
    }
}

/// Estimates the means of `M` per-path statistics over paths `0..n`.
pub(crate) fn chunked_estimates<const M: usize, F>(n: usize, sample: F) -> [Estimate; M]
where
    F: Fn(usize) -> [f64; M] + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<[Moments; M]> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = [Moments::default(); M];
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                let values = sample(i);
                for (a, v) in acc.iter_mut().zip(values) {
                    a.push(v);
                }
            }
            acc
        })
        .collect();
    let total = partials.into_iter().fold([Moments::default(); M], |mut total, part| {
        for (t, p) in total.iter_mut().zip(part) {
            *t = t.merge(p);
        }
        total
    });
    total.map(|m| m.estimate())
}

pub(crate) fn chunked_estimate<F>(n: usize, sample: F) -> Estimate
where
    F: Fn(usize) -> f64 + Sync,
{
    let [e] = chunked_estimates(n, |i| [sample(i)]);
    e
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn moments_match_two_pass() {
        let xs: Vec<f64> = (0..200_000).map(|i| ((i * 7919) % 1000) as f64 * 1e-3).collect();
        let e = chunked_estimate(xs.len(), |i| xs[i]);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        assert_relative_eq!(e.value, mean, max_relative = 1e-13);
        assert_relative_eq!(e.std_error, (var / xs.len() as f64).sqrt(), max_relative = 1e-10);
        assert_eq!(e.n, xs.len());
    }

    #[test]
    fn reduction_independent_of_threads() {
        let f = |i: usize| ((i as f64) * 0.37).sin();
        let n = 5 * CHUNK + 17;
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| chunked_estimate(n, f));
        let b = four.install(|| chunked_estimate(n, f));
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    }

    #[test]
    fn constant_sample_has_zero_error() {
        let e = chunked_estimate(1000, |_| 0.3);
        assert_eq!(e.std_error, 0.0);
        assert_relative_eq!(e.value, 0.3, max_relative = 1e-15);
    }
}
