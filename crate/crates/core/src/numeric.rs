//! Compensated summation.

/// Neumaier's variant of Kahan summation.
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

/// Prefix sums `[0, x_1, x_1 + x_2, …]`, each compensated.
pub fn cumulative(xs: &[f64]) -> Vec<f64> {
    let mut acc = NeumaierSum::new();
    let mut out = Vec::with_capacity(xs.len() + 1);
    out.push(0.0);
    for &x in xs {
        acc.add(x);
        out.push(acc.value());
    }
    out
}
