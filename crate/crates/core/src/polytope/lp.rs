//! Exact dense-tableau simplex for `max c.x  s.t.  A x <= b, x >= 0` with
//! `b >= 0`, so the slack basis is feasible from the start. Bland's rule
//! guarantees termination on degenerate problems.

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LpError {
    #[error("right-hand side must be nonnegative")]
    NegativeRhs,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("objective is unbounded")]
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpSolution {
    pub value: Rational,
    pub x: Vec<Rational>,
    /// Optimal dual prices, one per constraint row.
    pub y: Vec<Rational>,
}

pub fn maximize(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> Result<LpSolution, LpError> {
    let n = c.len();
    let m = a.len();
    if b.len() != m {
        return Err(LpError::Dimension(format!("{m} rows but {} right-hand sides", b.len())));
    }
    if let Some(row) = a.iter().find(|r| r.len() != n) {
        return Err(LpError::Dimension(format!("row of length {} for {n} variables", row.len())));
    }
    if b.iter().any(|v| v.is_negative()) {
        return Err(LpError::NegativeRhs);
    }
    let width = n + m + 1;
    let rhs = n + m;
    let mut t: Vec<Vec<Rational>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = Vec::with_capacity(width);
            r.extend_from_slice(row);
            r.extend((0..m).map(|k| if k == i { Rational::ONE } else { Rational::ZERO }));
            r.push(b[i]);
            r
        })
        .collect();
    let mut obj: Vec<Rational> = c.iter().map(|v| -*v).chain(std::iter::repeat_n(Rational::ZERO, m + 1)).collect();
    let mut basis: Vec<usize> = (n..n + m).collect();

    loop {
        let Some(enter) = (0..rhs).find(|&j| obj[j].is_negative()) else { break };
        let mut leave: Option<usize> = None;
        for i in 0..m {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = t[i][rhs] / t[i][enter];
            leave = match leave {
                None => Some(i),
                Some(l) => {
                    let best = t[l][rhs] / t[l][enter];
                    if ratio < best || (ratio == best && basis[i] < basis[l]) {
                        Some(i)
                    } else {
                        Some(l)
                    }
                }
            };
        }
        let Some(r) = leave else { return Err(LpError::Unbounded) };
        pivot(&mut t, &mut obj, r, enter);
        basis[r] = enter;
    }

    let mut x = vec![Rational::ZERO; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][rhs];
        }
    }
    let y = (0..m).map(|i| obj[n + i]).collect();
    Ok(LpSolution { value: obj[rhs], x, y })
}

fn pivot(t: &mut [Vec<Rational>], obj: &mut [Rational], r: usize, c: usize) {
    let p = t[r][c];
    for v in t[r].iter_mut() {
        *v = *v / p;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[c].is_zero() {
            continue;
        }
        let f = row[c];
        for (v, pv) in row.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= f * *pv;
            }
        }
    }
    let f = obj[c];
    if !f.is_zero() {
        for (v, pv) in obj.iter_mut().zip(&prow) {
            if !pv.is_zero() {
                *v -= f * *pv;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q)
    }

    fn ints(v: &[i128]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_int(x)).collect()
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> 36 at (2, 6)
        let sol =
            maximize(&ints(&[3, 5]), &[ints(&[1, 0]), ints(&[0, 2]), ints(&[3, 2])], &ints(&[4, 12, 18])).unwrap();
        assert_eq!(sol.value, Rational::from_int(36));
        assert_eq!(sol.x, ints(&[2, 6]));
        assert_eq!(sol.y, vec![Rational::ZERO, r(3, 2), Rational::ONE]);
    }

    #[test]
    fn strong_duality_on_c5_fractional_clique() {
        // max sum y over the edges of C5 as constraints: value 5/2
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
        let a: Vec<Vec<Rational>> = edges
            .iter()
            .map(|&(u, v)| (0..5).map(|k| if k == u || k == v { Rational::ONE } else { Rational::ZERO }).collect())
            .collect();
        let sol = maximize(&[Rational::ONE; 5], &a, &[Rational::ONE; 5]).unwrap();
        assert_eq!(sol.value, r(5, 2));
        let dual: Rational = sol.y.iter().copied().sum();
        assert_eq!(dual, r(5, 2));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // classic cycling example under the largest-coefficient rule
        let c = vec![r(3, 4), Rational::from_int(-150), r(1, 50), Rational::from_int(-6)];
        let a = vec![
            vec![r(1, 4), Rational::from_int(-60), r(-1, 25), Rational::from_int(9)],
            vec![r(1, 2), Rational::from_int(-90), r(-1, 50), Rational::from_int(3)],
            vec![Rational::ZERO, Rational::ZERO, Rational::ONE, Rational::ZERO],
        ];
        let sol = maximize(&c, &a, &[Rational::ZERO, Rational::ZERO, Rational::ONE]).unwrap();
        assert_eq!(sol.value, r(1, 20));
    }

    #[test]
    fn unbounded_and_bad_input() {
        assert_eq!(maximize(&ints(&[1]), &[ints(&[-1])], &ints(&[1])), Err(LpError::Unbounded));
        assert_eq!(maximize(&ints(&[1]), &[ints(&[1])], &ints(&[-1])), Err(LpError::NegativeRhs));
        assert!(maximize(&ints(&[1, 1]), &[ints(&[1])], &ints(&[1])).is_err());
    }
}
