//! Compensated summation.

use std::iter::Sum;
use std::ops::AddAssign;

/// Neumaier's variant of Kahan summation. The running compensation also
/// captures the case where the incoming term is larger than the partial sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl AddAssign<f64> for NeumaierSum {
    fn add_assign(&mut self, rhs: f64) {
        self.add(rhs);
    }
}

impl Sum<f64> for NeumaierSum {
    fn sum<I: Iterator<Item = f64>>(iter: I) -> Self {
        let mut acc = NeumaierSum::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

/// Compensated sum of an iterator of terms.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    terms.into_iter().sum::<NeumaierSum>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_next_to_large_ones() {
        let terms = [1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(terms), 1.0);
        let naive: f64 = terms.iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn many_tenths() {
        let s = compensated_sum(std::iter::repeat_n(0.1, 1_000_000));
        assert!((s - 100_000.0).abs() < 1e-9);
    }
}
