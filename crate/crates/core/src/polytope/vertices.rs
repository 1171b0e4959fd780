//! Exact vertex enumeration for bounded polytopes `{x >= 0 : A x <= b}` with
//! integer data, by the double description method on the homogenized cone
//! `{(x, t) >= 0 : A x - b t <= 0}`.
//!
//! Rays are integer vectors reduced by their gcd. Adjacency uses the
//! combinatorial test on zero sets.

use num_integer::Integer;

use crate::par::{self, Exec};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VertexError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("polytope is unbounded")]
    Unbounded,
}

#[derive(Clone, Debug)]
struct ZeroSet(Vec<u64>);

impl ZeroSet {
    fn new(words: usize) -> Self {
        ZeroSet(vec![0; words])
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn and(&self, o: &ZeroSet) -> ZeroSet {
        ZeroSet(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn subset_of(&self, o: &ZeroSet) -> bool {
        self.0.iter().zip(&o.0).all(|(a, b)| a & !b == 0)
    }
}

#[derive(Clone, Debug)]
struct Ray {
    z: Vec<i128>,
    zeros: ZeroSet,
}

fn normalize(z: &mut [i128]) {
    let g = z.iter().fold(0i128, |g, &v| g.gcd(&v));
    if g > 1 {
        for v in z.iter_mut() {
            *v /= g;
        }
    }
}

fn dot(h: &[i128], z: &[i128]) -> i128 {
    h.iter().zip(z).map(|(a, b)| a.checked_mul(*b).expect("rational overflow")).sum()
}

/// Vertices of `{x >= 0 : A x <= b}`, sorted lexicographically. Fails if the
/// set is unbounded. An empty set yields no vertices.
pub fn vertices_nonneg(a: &[Vec<i128>], b: &[i128], exec: Exec) -> Result<Vec<Vec<Rational>>, VertexError> {
    if a.len() != b.len() {
        return Err(VertexError::Dimension(format!("{} rows but {} right-hand sides", a.len(), b.len())));
    }
    let n = a.first().map_or(0, |r| r.len());
    if a.iter().any(|r| r.len() != n) {
        return Err(VertexError::Dimension("rows of unequal length".into()));
    }
    let d = n + 1;
    let total = d + a.len();
    let words = total.div_ceil(64).max(1);

    // start from the orthant: its rays are the unit vectors
    let mut rays: Vec<Ray> = (0..d)
        .map(|v| {
            let mut z = vec![0; d];
            z[v] = 1;
            let mut zeros = ZeroSet::new(words);
            for u in (0..d).filter(|&u| u != v) {
                zeros.insert(u);
            }
            Ray { z, zeros }
        })
        .collect();

    for (i, (row, &rhs)) in a.iter().zip(b).enumerate() {
        let idx = d + i;
        let mut h: Vec<i128> = row.clone();
        h.push(-rhs);
        let s: Vec<i128> = rays.iter().map(|r| dot(&h, &r.z)).collect();
        let plus: Vec<usize> = (0..rays.len()).filter(|&k| s[k] > 0).collect();
        let minus: Vec<usize> = (0..rays.len()).filter(|&k| s[k] < 0).collect();
        if plus.is_empty() {
            for (k, r) in rays.iter_mut().enumerate() {
                if s[k] == 0 {
                    r.zeros.insert(idx);
                }
            }
            continue;
        }
        let pairs: Vec<(usize, usize)> = plus
            .iter()
            .flat_map(|&p| minus.iter().map(move |&q| (p, q)))
            .filter(|&(p, q)| rays[p].zeros.and(&rays[q].zeros).len() + 2 >= d)
            .collect();
        let current = &rays;
        let created: Vec<Option<Ray>> = par::map(exec, &pairs, |&(p, q)| {
            let common = current[p].zeros.and(&current[q].zeros);
            let blocked = current.iter().enumerate().any(|(k, r)| k != p && k != q && common.subset_of(&r.zeros));
            if blocked {
                return None;
            }
            let (sp, sq) = (s[p], s[q]);
            let mut z: Vec<i128> = current[q]
                .z
                .iter()
                .zip(&current[p].z)
                .map(|(&zq, &zp)| {
                    sp.checked_mul(zq).and_then(|x| x.checked_sub(sq.checked_mul(zp)?)).expect("rational overflow")
                })
                .collect();
            normalize(&mut z);
            let mut zeros = common;
            zeros.insert(idx);
            Some(Ray { z, zeros })
        });
        let mut next: Vec<Ray> = Vec::with_capacity(rays.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if s[k] == 0 {
                r.zeros.insert(idx);
                next.push(r);
            } else if s[k] < 0 {
                next.push(r);
            }
        }
        next.extend(created.into_iter().flatten());
        rays = next;
    }

    let mut out = Vec::with_capacity(rays.len());
    for r in &rays {
        let t = r.z[n];
        if t == 0 {
            return Err(VertexError::Unbounded);
        }
        out.push(r.z[..n].iter().map(|&v| Rational::new(v, t)).collect::<Vec<_>>());
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Rank of an integer matrix by fraction-free elimination.
pub fn integer_rank(rows: &[Vec<i128>]) -> usize {
    let mut basis: Vec<(usize, Vec<i128>)> = Vec::new();
    for row in rows {
        let mut r = row.clone();
        for (p, b) in &basis {
            if r[*p] != 0 {
                let (f, g) = (b[*p], r[*p]);
                for (x, y) in r.iter_mut().zip(b) {
                    *x = f.checked_mul(*x).and_then(|v| v.checked_sub(g.checked_mul(*y)?)).expect("rational overflow");
                }
                normalize(&mut r);
            }
        }
        if let Some(p) = r.iter().position(|&x| x != 0) {
            basis.push((p, r));
        }
    }
    basis.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i128, q: i128) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn rank() {
        assert_eq!(integer_rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(integer_rank(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]), 3);
        assert_eq!(integer_rank(&[]), 0);
    }

    #[test]
    fn unit_square() {
        let v = vertices_nonneg(&[vec![1, 0], vec![0, 1]], &[1, 1], Exec::Sequential).unwrap();
        let ints = |a: i128, b: i128| vec![Rational::from_int(a), Rational::from_int(b)];
        assert_eq!(v, vec![ints(0, 0), ints(0, 1), ints(1, 0), ints(1, 1)]);
    }

    #[test]
    fn simplex_with_redundant_row() {
        let v = vertices_nonneg(&[vec![1, 1], vec![2, 2]], &[1, 5], Exec::Sequential).unwrap();
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn c5_edge_polytope_has_half_point() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
        let a: Vec<Vec<i128>> =
            edges.iter().map(|&(u, w)| (0..5).map(|k| i128::from(k == u || k == w)).collect()).collect();
        let v = vertices_nonneg(&a, &[1; 5], Exec::Parallel).unwrap();
        assert!(v.contains(&vec![r(1, 2); 5]));
        // 11 stable sets of C5 plus the all-halves point
        assert_eq!(v.len(), 12);
        let seq = vertices_nonneg(&a, &[1; 5], Exec::Sequential).unwrap();
        assert_eq!(v, seq);
    }

    #[test]
    fn unbounded_is_reported() {
        assert_eq!(vertices_nonneg(&[vec![1, -1]], &[1], Exec::Sequential), Err(VertexError::Unbounded));
    }

    #[test]
    fn degenerate_pyramid() {
        // square pyramid: apex (1/2,1/2,1) is degenerate (4 tight facets)
        let a = vec![vec![2, 0, 1], vec![0, 2, 1], vec![-2, 0, 1], vec![0, -2, 1]];
        let v = vertices_nonneg(&a, &[2, 2, 0, 0], Exec::Sequential).unwrap();
        assert_eq!(v.len(), 5);
        assert!(v.contains(&vec![r(1, 2), r(1, 2), Rational::ONE]));
    }
}
