//! The N-slot broadcast schedule that completes N-1 broadcast packets while
//! a unicast occupies one output per slot.

use super::gf::Gf;
use super::knowledge::{CoefficientVector, KnowledgeSpace};
use super::CodingError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XorSlot {
    /// 1-based output taken by the unicast in this slot.
    pub occupied_output: usize,
    /// 1-based outputs receiving the broadcast transmission.
    pub receivers: Vec<usize>,
    /// Coefficients over the N-1 broadcast packets.
    pub combination: CoefficientVector,
}

pub fn xor_broadcast_schedule(n: usize) -> Result<Vec<XorSlot>, CodingError> {
    if n < 3 {
        return Err(CodingError::InvalidParameter(format!("N must be at least 3, got {n}")));
    }
    Ok((1..=n)
        .map(|s| {
            let combination = if s < n { (1..n).map(|p| u8::from(p == s)).collect() } else { vec![1; n - 1] };
            XorSlot { occupied_output: s, receivers: (1..=n).filter(|&j| j != s).collect(), combination }
        })
        .collect())
}

/// Knowledge space of every output after the schedule, indexed by output - 1.
pub fn replay_xor_schedule(schedule: &[XorSlot]) -> Result<Vec<KnowledgeSpace>, CodingError> {
    let n = schedule.len();
    let dim = schedule.first().map_or(0, |s| s.combination.len());
    let mut spaces = vec![KnowledgeSpace::new(Gf::new(1).expect("GF(2) exists"), dim); n];
    for slot in schedule {
        for &j in &slot.receivers {
            spaces[j - 1].insert(&slot.combination)?;
        }
    }
    Ok(spaces)
}
