use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::Instant;

/// Pipeline time source, nanosecond resolution, monotone non-decreasing.
///
/// In Simulated mode time only moves via explicit [`PipelineClock::advance_to`]
/// calls, which is what makes every scheduling behavior deterministically
/// testable.
#[derive(Debug, Clone)]
pub enum PipelineClock {
    Real(Instant),
    Simulated(Arc<AtomicU64>),
}

impl PipelineClock {
    pub fn real() -> Self {
        PipelineClock::Real(Instant::now())
    }

    pub fn simulated() -> Self {
        PipelineClock::Simulated(Arc::new(AtomicU64::new(0)))
    }

    pub fn now_ns(&self) -> u64 {
        match self {
            PipelineClock::Real(start) => start.elapsed().as_nanos() as u64,
            PipelineClock::Simulated(t) => t.load(Ordering::Acquire),
        }
    }

    /// Advances simulated time; never moves backwards. No-op on a real
    /// clock.
    pub fn advance_to(&self, t_ns: u64) {
        if let PipelineClock::Simulated(t) = self {
            t.fetch_max(t_ns, Ordering::AcqRel);
        }
    }
}
