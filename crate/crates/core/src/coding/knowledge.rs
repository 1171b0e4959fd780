//! Subspaces of F^n held in reduced row-echelon form.

use super::gf::Gf;
use super::CodingError;

pub type CoefficientVector = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeSpace {
    field: Gf,
    ambient: usize,
    /// Rows sorted by pivot; each has a 1 at its pivot and zeros at every
    /// other row's pivot.
    rows: Vec<(usize, Vec<u8>)>,
    /// `pivot_row[c]` is the index in `rows` whose pivot is column `c`.
    pivot_row: Vec<Option<usize>>,
}

impl KnowledgeSpace {
    pub fn new(field: Gf, ambient: usize) -> Self {
        KnowledgeSpace { field, ambient, rows: Vec::new(), pivot_row: vec![None; ambient] }
    }

    /// The whole space F^n.
    pub fn full(field: Gf, ambient: usize) -> Self {
        let mut s = Self::new(field, ambient);
        for i in 0..ambient {
            let mut e = vec![0; ambient];
            e[i] = 1;
            s.insert(&e).expect("unit vector has the right length");
        }
        s
    }

    pub fn spanned_by(field: Gf, ambient: usize, vs: &[CoefficientVector]) -> Result<Self, CodingError> {
        let mut s = Self::new(field, ambient);
        for v in vs {
            s.insert(v)?;
        }
        Ok(s)
    }

    pub fn field(&self) -> Gf {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    /// Pads every vector with zeros up to `ambient`.
    pub fn grow(&mut self, ambient: usize) {
        assert!(ambient >= self.ambient, "ambient dimension cannot shrink");
        for (_, r) in self.rows.iter_mut() {
            r.resize(ambient, 0);
        }
        self.pivot_row.resize(ambient, None);
        self.ambient = ambient;
    }

    pub fn basis(&self) -> Vec<CoefficientVector> {
        self.rows.iter().map(|(_, r)| r.clone()).collect()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    /// Smallest coordinate without a pivot, if any.
    pub fn first_non_pivot(&self) -> Option<usize> {
        self.pivot_row.iter().position(|p| p.is_none())
    }

    fn check_len(&self, v: &[u8]) -> Result<(), CodingError> {
        if v.len() != self.ambient {
            return Err(CodingError::LengthMismatch { expected: self.ambient, got: v.len() });
        }
        if let Some(&x) = v.iter().find(|&&x| !self.field.contains(x)) {
            return Err(CodingError::NotAFieldElement(x));
        }
        Ok(())
    }

    /// Residual of `v` after eliminating every pivot coordinate.
    pub fn reduce(&self, v: &[u8]) -> CoefficientVector {
        let mut r = v.to_vec();
        for (p, row) in &self.rows {
            let c = r[*p];
            if c != 0 {
                self.field.axpy(&mut r, c, row);
            }
        }
        r
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        debug_assert_eq!(v.len(), self.ambient);
        let mut r = v.to_vec();
        let mut start = 0;
        loop {
            let Some(off) = r[start..].iter().position(|&x| x != 0) else { return true };
            let j = start + off;
            match self.pivot_row[j] {
                None => return false,
                Some(k) => {
                    let c = r[j];
                    self.field.axpy(&mut r, c, &self.rows[k].1);
                    start = j + 1;
                }
            }
        }
    }

    /// Adds `v` to the span. Returns whether the dimension grew.
    pub fn insert(&mut self, v: &[u8]) -> Result<bool, CodingError> {
        self.check_len(v)?;
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|&x| x != 0) else { return Ok(false) };
        let inv = self.field.inv(r[p]);
        self.field.scale(&mut r, inv);
        for (_, row) in self.rows.iter_mut() {
            let c = row[p];
            if c != 0 {
                self.field.axpy(row, c, &r);
            }
        }
        let at = self.rows.partition_point(|(q, _)| *q < p);
        self.rows.insert(at, (p, r));
        for (k, (q, _)) in self.rows.iter().enumerate().skip(at) {
            self.pivot_row[*q] = Some(k);
        }
        Ok(true)
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient
    }

    pub fn is_subspace_of(&self, other: &KnowledgeSpace) -> bool {
        self.rows.iter().all(|(_, r)| other.contains(r))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Combination {
    /// Coefficients over the input basis.
    pub coefficients: Vec<u8>,
    /// The combined coefficient vector in packet coordinates.
    pub vector: CoefficientVector,
}

/// A combination of `input_basis` outside every receiver space.
///
/// Coefficients are fixed one at a time, each to the smallest field element
/// that leaves some completion outside all receivers. When the field is
/// larger than the number of receivers such an element always exists; with a
/// smaller field the search may fail with [`CodingError::FieldTooSmall`].
pub fn innovative_combination(
    input_basis: &[CoefficientVector],
    receivers: &[&KnowledgeSpace],
) -> Result<Combination, CodingError> {
    let Some(first) = receivers.first() else {
        return Err(CodingError::NoReceivers);
    };
    let field = first.field();
    let ambient = first.ambient();
    if receivers.iter().any(|r| r.ambient() != ambient || r.field() != field) {
        return Err(CodingError::Incompatible);
    }
    for b in input_basis {
        if b.len() != ambient {
            return Err(CodingError::LengthMismatch { expected: ambient, got: b.len() });
        }
    }
    let n = input_basis.len();
    // tail_in[j][t]: basis vectors t.. all lie in receiver j
    let tail_in: Vec<Vec<bool>> = receivers
        .iter()
        .map(|r| {
            let mut t = vec![true; n + 1];
            for s in (0..n).rev() {
                t[s] = t[s + 1] && r.contains(&input_basis[s]);
            }
            t
        })
        .collect();
    if let Some(j) = tail_in.iter().position(|t| t[0]) {
        return Err(CodingError::NothingInnovative { receiver: j });
    }
    let mut acc = vec![0u8; ambient];
    let mut coefficients = Vec::with_capacity(n);
    for t in 0..n {
        let mut chosen = None;
        for x in 0..field.order() {
            let x = x as u8;
            let mut cand = acc.clone();
            field.axpy(&mut cand, x, &input_basis[t]);
            let trapped = receivers.iter().zip(&tail_in).any(|(r, tail)| tail[t + 1] && r.contains(&cand));
            if !trapped {
                chosen = Some((x, cand));
                break;
            }
        }
        let Some((x, cand)) = chosen else {
            return Err(CodingError::FieldTooSmall { q: field.order(), receivers: receivers.len() });
        };
        coefficients.push(x);
        acc = cand;
    }
    debug_assert!(receivers.iter().all(|r| !r.contains(&acc)));
    Ok(Combination { coefficients, vector: acc })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncoveredVerdict {
    pub exists: bool,
    /// True when the verdict came from checking every vector.
    pub exhaustive: bool,
    pub witness: Option<CoefficientVector>,
}

/// Largest `q^n` searched exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 1 << 20;

/// Whether some vector of F^n lies outside all `subspaces`.
///
/// Small instances are decided by enumeration. Larger ones run the
/// coordinate-wise search, which always succeeds when the field has more
/// elements than there are subspaces; a failure on a smaller field is
/// reported as `exists: false, exhaustive: false` (inconclusive).
pub fn exists_uncovered_vector(
    field: Gf,
    n: usize,
    subspaces: &[KnowledgeSpace],
) -> Result<UncoveredVerdict, CodingError> {
    if subspaces.iter().any(|s| s.ambient() != n || s.field() != field) {
        return Err(CodingError::Incompatible);
    }
    if subspaces.is_empty() {
        return Ok(UncoveredVerdict { exists: n > 0, exhaustive: true, witness: (n > 0).then(|| vec![0; n]) });
    }
    if subspaces.iter().any(|s| s.is_full()) {
        return Ok(UncoveredVerdict { exists: false, exhaustive: true, witness: None });
    }
    let q = field.order();
    let total = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(q).filter(|&t| t <= EXHAUSTIVE_LIMIT));
    if total.is_some() {
        let mut v = vec![0u8; n];
        loop {
            if subspaces.iter().all(|s| !s.contains(&v)) {
                return Ok(UncoveredVerdict { exists: true, exhaustive: true, witness: Some(v) });
            }
            // base-q counter
            let mut k = 0;
            while k < n {
                if (v[k] as usize) + 1 < q {
                    v[k] += 1;
                    break;
                }
                v[k] = 0;
                k += 1;
            }
            if k == n {
                return Ok(UncoveredVerdict { exists: false, exhaustive: true, witness: None });
            }
        }
    }
    let basis: Vec<CoefficientVector> = (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = 1;
            e
        })
        .collect();
    let refs: Vec<&KnowledgeSpace> = subspaces.iter().collect();
    match innovative_combination(&basis, &refs) {
        Ok(c) => Ok(UncoveredVerdict { exists: true, exhaustive: false, witness: Some(c.vector) }),
        Err(CodingError::FieldTooSmall { .. }) => {
            Ok(UncoveredVerdict { exists: false, exhaustive: false, witness: None })
        }
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, i: usize) -> Vec<u8> {
        let mut e = vec![0; n];
        e[i] = 1;
        e
    }

    #[test]
    fn insert_tracks_dimension_and_rref() {
        let f = Gf::GF256;
        let mut s = KnowledgeSpace::new(f, 3);
        assert!(s.insert(&[0, 1, 1]).unwrap());
        assert!(s.insert(&[1, 1, 0]).unwrap());
        assert!(!s.insert(&[1, 0, 1]).unwrap());
        assert_eq!(s.dimension(), 2);
        assert_eq!(s.pivots(), vec![0, 1]);
        assert_eq!(s.basis(), vec![vec![1, 0, 1], vec![0, 1, 1]]);
        assert_eq!(s.first_non_pivot(), Some(2));
    }

    #[test]
    fn insert_rejects_wrong_length() {
        let mut s = KnowledgeSpace::new(Gf::GF256, 3);
        assert!(matches!(s.insert(&[1, 0]), Err(CodingError::LengthMismatch { .. })));
        let mut t = KnowledgeSpace::new(Gf::new(1).unwrap(), 2);
        assert!(matches!(t.insert(&[2, 0]), Err(CodingError::NotAFieldElement(2))));
    }

    #[test]
    fn grow_keeps_span() {
        let mut s = KnowledgeSpace::new(Gf::GF256, 2);
        s.insert(&[3, 5]).unwrap();
        s.grow(4);
        assert!(s.contains(&s.basis()[0].clone()));
        assert_eq!(s.basis()[0].len(), 4);
        assert!(s.insert(&[0, 0, 0, 1]).unwrap());
    }

    #[test]
    fn xor_for_two_complementary_receivers() {
        let f = Gf::GF256;
        let a = KnowledgeSpace::spanned_by(f, 2, &[unit(2, 1)]).unwrap();
        let b = KnowledgeSpace::spanned_by(f, 2, &[unit(2, 0)]).unwrap();
        let c = innovative_combination(&[unit(2, 0), unit(2, 1)], &[&a, &b]).unwrap();
        assert_eq!(c.vector, vec![1, 1]);
    }

    #[test]
    fn saturated_receiver_is_an_error() {
        let f = Gf::GF256;
        let full = KnowledgeSpace::full(f, 2);
        assert!(matches!(
            innovative_combination(&[unit(2, 0)], &[&full]),
            Err(CodingError::NothingInnovative { receiver: 0 })
        ));
        assert!(matches!(innovative_combination(&[unit(2, 0)], &[]), Err(CodingError::NoReceivers)));
    }

    #[test]
    fn gf2_three_lines_cover_the_plane() {
        // over GF(2) the three 1-dim subspaces of F^2 cover it
        let f = Gf::new(1).unwrap();
        let lines: Vec<KnowledgeSpace> = [[1u8, 0], [0, 1], [1, 1]]
            .iter()
            .map(|v| KnowledgeSpace::spanned_by(f, 2, &[v.to_vec()]).unwrap())
            .collect();
        let v = exists_uncovered_vector(f, 2, &lines).unwrap();
        assert!(!v.exists && v.exhaustive);
        let refs: Vec<&KnowledgeSpace> = lines.iter().collect();
        assert!(matches!(
            innovative_combination(&[unit(2, 0), unit(2, 1)], &refs),
            Err(CodingError::FieldTooSmall { .. })
        ));
    }
}
