//! Compensated summation for long log-domain products.

/// Neumaier's variant of Kahan summation: tracks a running compensation that
/// also survives the case where the addend is larger than the partial sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
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

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator of f64 terms.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut acc = Neumaier::new();
    for t in terms {
        acc.add(t);
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancellation_loss() {
        // 1 + 1e100 - 1e100 = 1 exactly under compensation; naive sum gives 0.
        let terms = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(compensated_sum(terms), 2.0);
        let naive: f64 = terms.iter().sum();
        assert_eq!(naive, 0.0);
    }

    #[test]
    fn matches_exact_rational_sum() {
        // Sum of 10^7 copies of 0.1 accumulated forward: compensation keeps
        // the result within one ulp of 10^6.
        let mut acc = Neumaier::new();
        for _ in 0..10_000_000 {
            acc.add(0.1);
        }
        assert!((acc.total() - 1_000_000.0).abs() < 1e-9);
    }
}
