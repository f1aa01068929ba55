use statrs::function::erf::erf;

/// Running Gaussian summary of one numeric feature for one class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEstimator {
    weight: f64,
    mean: f64,
    var_sum: f64,
    min: f64,
    max: f64,
}

impl Default for GaussianEstimator {
    fn default() -> Self {
        Self {
            weight: 0.0,
            mean: 0.0,
            var_sum: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }
}

impl GaussianEstimator {
    pub const BYTES: usize = std::mem::size_of::<Self>();

    pub fn add(&mut self, value: f64) {
        self.weight += 1.0;
        let delta = value - self.mean;
        self.mean += delta / self.weight;
        self.var_sum += delta * (value - self.mean);
        self.min = self.min.min(value);
        self.max = self.max.max(value);
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    /// Sample standard deviation; 0 with fewer than two observations.
    pub fn std_dev(&self) -> f64 {
        if self.weight > 1.0 {
            (self.var_sum / (self.weight - 1.0)).max(0.0).sqrt()
        } else {
            0.0
        }
    }

    /// Density at `value`. A degenerate estimator puts all its mass on the
    /// mean.
    pub fn density(&self, value: f64) -> f64 {
        if self.weight <= 0.0 {
            return 0.0;
        }
        let sd = self.std_dev();
        if sd > 0.0 {
            let z = (value - self.mean) / sd;
            (-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt())
        } else if value == self.mean {
            1.0
        } else {
            0.0
        }
    }

    /// Weight expected at or below `threshold`.
    pub fn weight_at_or_below(&self, threshold: f64) -> f64 {
        if self.weight <= 0.0 || threshold < self.min {
            return 0.0;
        }
        if threshold >= self.max {
            return self.weight;
        }
        let sd = self.std_dev();
        if sd <= 0.0 {
            return if threshold >= self.mean {
                self.weight
            } else {
                0.0
            };
        }
        let z = (threshold - self.mean) / (sd * std::f64::consts::SQRT_2);
        self.weight * 0.5 * (1.0 + erf(z))
    }
}
