//! Compensated (Neumaier) summation for long reductions of mixed magnitude.

/// Running sum with a first-order error term.
///
/// Accumulating 2^24 payoff terms naively loses digits; the compensation
/// recovers them at the cost of one extra add per term.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial sum in, preserving its compensation term.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}
