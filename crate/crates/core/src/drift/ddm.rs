use std::collections::VecDeque;

use crate::error::Result;
use crate::hoeffding::{ClassId, IncrementalClassifier};
use crate::stream::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftLevel {
    InControl,
    Warning,
    Drift,
}

/// Drift detection method: tracks the error rate `p` and its standard
/// deviation `s = sqrt(p(1-p)/n)`, remembering the minimum of `p + s`.
///
/// Warning when `p + s > p_min + 2 s_min`, drift when
/// `p + s > p_min + 3 s_min`. Drift resets the detector.
#[derive(Debug, Clone)]
pub struct Ddm {
    n: u64,
    errors: u64,
    p_min: f64,
    s_min: f64,
    min_instances: u64,
    warning_sigmas: f64,
    drift_sigmas: f64,
}

impl Default for Ddm {
    fn default() -> Self {
        Self::new(30)
    }
}

impl Ddm {
    pub fn new(min_instances: u64) -> Self {
        Self {
            n: 0,
            errors: 0,
            p_min: f64::INFINITY,
            s_min: f64::INFINITY,
            min_instances,
            warning_sigmas: 2.0,
            drift_sigmas: 3.0,
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    /// Error rate since the last reset.
    pub fn error_rate(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.errors as f64 / self.n as f64
        }
    }

    pub fn std(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let p = self.error_rate();
        (p * (1.0 - p) / self.n as f64).sqrt()
    }

    /// `p_min + s_min`; infinite until the guard period has passed.
    pub fn min_level(&self) -> f64 {
        self.p_min + self.s_min
    }

    pub fn reset(&mut self) {
        *self = Self::new(self.min_instances);
    }

    pub fn update(&mut self, correct: bool) -> DriftLevel {
        self.n += 1;
        if !correct {
            self.errors += 1;
        }
        if self.n < self.min_instances {
            return DriftLevel::InControl;
        }
        let p = self.error_rate();
        let s = self.std();
        if p + s <= self.p_min + self.s_min {
            self.p_min = p;
            self.s_min = s;
        }
        if p + s > self.p_min + self.drift_sigmas * self.s_min {
            self.reset();
            DriftLevel::Drift
        } else if p + s > self.p_min + self.warning_sigmas * self.s_min {
            DriftLevel::Warning
        } else {
            DriftLevel::InControl
        }
    }
}

/// Learner wrapper that monitors its own prequential errors with DDM.
///
/// Instances seen at warning level are buffered (at most
/// `buffer_capacity`). On drift the inner learner is replaced by a fresh
/// copy trained on that buffer.
#[derive(Clone)]
pub struct DdmClassifier {
    inner: Box<dyn IncrementalClassifier>,
    template: Box<dyn IncrementalClassifier>,
    ddm: Ddm,
    warning_buffer: VecDeque<Instance>,
    buffer_capacity: usize,
    drifts: u64,
    last_rebuild_size: Option<usize>,
}

pub fn wrap_with_ddm(inner: Box<dyn IncrementalClassifier>) -> DdmClassifier {
    DdmClassifier::new(inner, Ddm::default(), 1000)
}

impl DdmClassifier {
    pub fn new(inner: Box<dyn IncrementalClassifier>, ddm: Ddm, buffer_capacity: usize) -> Self {
        let mut template = inner.box_clone();
        template.reset();
        Self {
            inner,
            template,
            ddm,
            warning_buffer: VecDeque::new(),
            buffer_capacity,
            drifts: 0,
            last_rebuild_size: None,
        }
    }

    pub fn drifts(&self) -> u64 {
        self.drifts
    }

    /// Number of buffered instances the latest replacement was trained on.
    pub fn last_rebuild_size(&self) -> Option<usize> {
        self.last_rebuild_size
    }

    pub fn warning_buffer_len(&self) -> usize {
        self.warning_buffer.len()
    }

    pub fn inner(&self) -> &dyn IncrementalClassifier {
        self.inner.as_ref()
    }
}

impl IncrementalClassifier for DdmClassifier {
    fn learn_one(&mut self, x: &Instance) -> Result<()> {
        let y = x.require_label()?;
        let correct = self.inner.predict_one(x)? == y;
        match self.ddm.update(correct) {
            DriftLevel::InControl => self.warning_buffer.clear(),
            DriftLevel::Warning => {
                if self.warning_buffer.len() == self.buffer_capacity {
                    self.warning_buffer.pop_front();
                }
                self.warning_buffer.push_back(x.clone());
            }
            DriftLevel::Drift => {
                let mut fresh = self.template.box_clone();
                self.last_rebuild_size = Some(self.warning_buffer.len());
                for w in self.warning_buffer.drain(..) {
                    fresh.learn_one(&w)?;
                }
                self.inner = fresh;
                self.drifts += 1;
            }
        }
        self.inner.learn_one(x)
    }

    fn predict_one(&self, x: &Instance) -> Result<ClassId> {
        self.inner.predict_one(x)
    }

    fn reset(&mut self) {
        self.inner.reset();
        self.ddm.reset();
        self.warning_buffer.clear();
        self.last_rebuild_size = None;
    }

    fn size_bytes(&self) -> usize {
        let buffered: usize = self
            .warning_buffer
            .iter()
            .map(|x| std::mem::size_of::<Instance>() + 8 * x.dimension())
            .sum();
        std::mem::size_of::<Self>() + self.inner.size_bytes() + buffered
    }

    fn name(&self) -> String {
        format!("{}+ddm", self.inner.name())
    }

    fn box_clone(&self) -> Box<dyn IncrementalClassifier> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::hoeffding::MajorityClass;

    #[test]
    fn all_correct_stays_in_control() {
        let mut d = Ddm::default();
        for _ in 0..10_000 {
            assert_eq!(d.update(true), DriftLevel::InControl);
        }
    }

    #[test]
    fn error_rate_is_exact_fraction() {
        let mut d = Ddm::new(1_000_000);
        let mut errors = 0;
        for t in 1..=997u64 {
            let wrong = t % 7 == 0 || t % 11 == 0;
            errors += u64::from(wrong);
            d.update(!wrong);
            assert_eq!(d.error_rate(), errors as f64 / t as f64);
        }
    }

    #[test]
    fn min_level_never_increases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut d = Ddm::default();
        let mut last = f64::INFINITY;
        for _ in 0..3000 {
            let level = d.update(!rng.random_bool(0.2));
            if level == DriftLevel::Drift {
                last = f64::INFINITY;
                continue;
            }
            assert!(d.min_level() <= last);
            last = d.min_level();
        }
    }

    #[test]
    fn warning_then_recovery_without_drift() {
        let mut d = Ddm::default();
        for t in 0..1000 {
            assert_ne!(d.update(t % 10 != 0), DriftLevel::Drift);
        }
        let mut burst = 0;
        loop {
            let level = d.update(false);
            burst += 1;
            assert_ne!(
                level,
                DriftLevel::Drift,
                "drift before warning after {burst}"
            );
            if level == DriftLevel::Warning {
                break;
            }
        }
        let mut recovered = false;
        for _ in 0..500 {
            match d.update(true) {
                DriftLevel::Drift => panic!("drift during recovery"),
                DriftLevel::InControl => {
                    recovered = true;
                    break;
                }
                DriftLevel::Warning => {}
            }
        }
        assert!(recovered);
    }

    fn x(y: ClassId) -> Instance {
        Instance::labeled(0, vec![1.0], y).unwrap()
    }

    #[test]
    fn stationary_stream_passes_through() {
        let mut wrapped = wrap_with_ddm(Box::new(MajorityClass::new()));
        let mut plain = MajorityClass::new();
        for t in 0..2000 {
            let inst = x(usize::from(t % 5 == 0));
            assert_eq!(
                wrapped.predict_one(&inst).unwrap(),
                plain.predict_one(&inst).unwrap()
            );
            wrapped.learn_one(&inst).unwrap();
            plain.learn_one(&inst).unwrap();
        }
        assert_eq!(wrapped.drifts(), 0);
        assert_eq!(wrapped.name(), "majority+ddm");
    }

    #[test]
    fn drift_replaces_inner_learner() {
        let mut wrapped = wrap_with_ddm(Box::new(MajorityClass::new()));
        for _ in 0..500 {
            wrapped.learn_one(&x(0)).unwrap();
        }
        let mut t = 0;
        while wrapped.drifts() == 0 {
            wrapped.learn_one(&x(1)).unwrap();
            t += 1;
            assert!(t < 100);
        }
        // all-correct history pins p_min + s_min at 0, so the first error drifts
        // without a warning period and the replacement starts untrained
        assert_eq!(wrapped.last_rebuild_size(), Some(0));
        assert_eq!(wrapped.predict_one(&x(0)).unwrap(), 1);
    }

    #[test]
    fn unlabeled_instance_is_rejected() {
        let mut wrapped = wrap_with_ddm(Box::new(MajorityClass::new()));
        assert!(wrapped
            .learn_one(&Instance::new(0, vec![1.0], None).unwrap())
            .is_err());
    }
}
