use serde::Serialize;

use super::SchedulerError;
use crate::rational::Rational;

/// Splits time into windows of `Δ(1+ε)` slots. Arrivals in window `k` form
/// batch `k`; the last `⌈εΔ⌉` slots of a window are its clearing tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BatchController {
    pub delta: u64,
    pub epsilon: Rational,
    /// Clearing tail `⌈εΔ⌉`.
    pub clearing: u64,
    /// Window length `Δ + ⌈εΔ⌉`.
    pub window: u64,
}

impl BatchController {
    pub fn new(delta: u64, epsilon: Rational) -> Result<Self, SchedulerError> {
        if delta == 0 {
            return Err(SchedulerError::InvalidParameter("batch length must be at least 1".into()));
        }
        if !epsilon.is_positive() {
            return Err(SchedulerError::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
        }
        let clearing = (epsilon * Rational::from_int(delta as i128)).ceil() as u64;
        Ok(BatchController { delta, epsilon, clearing, window: delta + clearing })
    }

    pub fn batch_of(&self, t: u64) -> u64 {
        t / self.window
    }

    /// First slot after batch `k`'s window, when it may be flushed.
    pub fn close_of(&self, k: u64) -> u64 {
        (k + 1) * self.window
    }

    pub fn in_clearing(&self, t: u64) -> bool {
        t % self.window >= self.delta
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_settings() {
        let b = BatchController::new(3000, Rational::new(1, 200)).unwrap();
        assert_eq!((b.window, b.clearing), (3015, 15));
        let b = BatchController::new(1000, Rational::new(1, 200)).unwrap();
        assert_eq!(b.clearing, 5);
        assert!(BatchController::new(1000, Rational::ZERO).is_err());
    }

    #[test]
    fn windows() {
        let b = BatchController::new(10, Rational::new(1, 4)).unwrap();
        assert_eq!(b.window, 13);
        assert_eq!(b.batch_of(12), 0);
        assert_eq!(b.batch_of(13), 1);
        assert_eq!(b.close_of(0), 13);
        assert!(b.in_clearing(10) && !b.in_clearing(9));
    }
}
