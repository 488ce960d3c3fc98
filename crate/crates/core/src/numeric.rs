//! Compensated summation for long weighted sums.

/// Kahan accumulator.
///
/// Mixture functionals and weight validation sum up to ~10^5 terms; naive
/// accumulation can drift past the 1e-12 contracts, compensated
/// accumulation stays within a few ulp regardless of length.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub(crate) fn add(&mut self, term: f64) {
        let y = term - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::KahanSum;

    #[test]
    fn equal_weights_sum_to_one() {
        let n = 129_600; // 360x360 quadrature grid
        let w = 1.0 / n as f64;
        let mut sum = KahanSum::default();
        for _ in 0..n {
            sum.add(w);
        }
        assert!((sum.value() - 1.0).abs() < 1e-14);
    }
}
