//! The uncoded fanout-splitting rate region of the benefit pattern.

use serde::Serialize;

use super::PolytopeError;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FsRegionCheck {
    pub inside: bool,
    /// Human-readable names of the violated inequalities.
    pub violated: Vec<String>,
    /// Smallest `s` such that the point scaled by `1/s` lies in the region.
    pub scaling: Rational,
}

/// Rows `(name, lhs, rhs)` of the region for broadcast rate `r0` and unicast
/// rates `r`.
fn rows(r0: Rational, r: &[Rational]) -> Vec<(String, Rational, Rational)> {
    let sum: Rational = r.iter().copied().sum();
    let mut out = vec![
        ("sum r_i <= 1".to_string(), sum, Rational::ONE),
        ("2 r0 + sum r_i <= 2".to_string(), Rational::from_int(2) * r0 + sum, Rational::from_int(2)),
    ];
    for (i, &ri) in r.iter().enumerate() {
        out.push((format!("r0 + r_{} <= 1", i + 1), r0 + ri, Rational::ONE));
    }
    out
}

pub fn fs_region_check(n: usize, r0: Rational, r: &[Rational]) -> Result<FsRegionCheck, PolytopeError> {
    if n < 2 {
        return Err(PolytopeError::InvalidParameter(format!("N must be at least 2, got {n}")));
    }
    if r.len() != n {
        return Err(PolytopeError::InvalidParameter(format!("expected {n} unicast rates, got {}", r.len())));
    }
    let mut violated = Vec::new();
    if r0.is_negative() {
        violated.push("r0 >= 0".to_string());
    }
    for (i, ri) in r.iter().enumerate() {
        if ri.is_negative() {
            violated.push(format!("r_{} >= 0", i + 1));
        }
    }
    let mut scaling = Rational::ZERO;
    for (name, lhs, rhs) in rows(r0, r) {
        if lhs > rhs {
            violated.push(name);
        }
        scaling = scaling.max(lhs / rhs);
    }
    Ok(FsRegionCheck { inside: violated.is_empty(), violated, scaling })
}

/// Minimum uniform speedup of the uncoded scheme at the special rate point.
pub fn fs_min_scaling(n: usize) -> Result<Rational, PolytopeError> {
    if n < 3 {
        return Err(PolytopeError::InvalidParameter(format!("N must be at least 3, got {n}")));
    }
    let u = Rational::from(n).recip();
    Ok(fs_region_check(n, Rational::ONE - u, &vec![u; n])?.scaling)
}
