//! Binary extension fields GF(2^m), 1 <= m <= 8, by log/exp tables.
//!
//! Elements are `u8` values below `2^m`. GF(2^8) uses the reduction
//! polynomial x^8 + x^4 + x^3 + x^2 + 1.

use std::sync::OnceLock;

pub type FieldElement = u8;

/// Primitive reduction polynomials, indexed by degree.
const POLYS: [u16; 9] = [0, 0b11, 0b111, 0b1011, 0b1_0011, 0b10_0101, 0b100_0011, 0b1000_1001, 0b1_0001_1101];

struct Tables {
    exp: Vec<u8>,
    log: Vec<u8>,
}

fn tables() -> &'static [Tables; 9] {
    static T: OnceLock<[Tables; 9]> = OnceLock::new();
    T.get_or_init(|| std::array::from_fn(build))
}

fn build(m: usize) -> Tables {
    if m == 0 {
        return Tables { exp: vec![], log: vec![] };
    }
    let q = 1usize << m;
    let order = q - 1;
    let mut exp = vec![0u8; 2 * order];
    let mut log = vec![0u8; q];
    let mut x: u16 = 1;
    for i in 0..order {
        exp[i] = x as u8;
        log[x as usize] = i as u8;
        if m > 1 {
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= POLYS[m];
            }
        }
    }
    for i in order..2 * order {
        exp[i] = exp[i - order];
    }
    Tables { exp, log }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gf {
    m: u8,
}

impl Default for Gf {
    fn default() -> Self {
        Gf::GF256
    }
}

impl Gf {
    pub const GF256: Gf = Gf { m: 8 };

    pub fn new(m: u8) -> Option<Gf> {
        (1..=8).contains(&m).then_some(Gf { m })
    }

    /// Smallest field with more than `k` elements.
    pub fn with_more_than(k: usize) -> Option<Gf> {
        (1u8..=8).find(|&m| (1usize << m) > k).map(|m| Gf { m })
    }

    pub fn degree(self) -> u8 {
        self.m
    }

    pub fn order(self) -> usize {
        1 << self.m
    }

    pub fn contains(self, a: u8) -> bool {
        (a as usize) < self.order()
    }

    pub fn add(self, a: u8, b: u8) -> u8 {
        a ^ b
    }

    pub fn mul(self, a: u8, b: u8) -> u8 {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = &tables()[self.m as usize];
        t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize]
    }

    /// Panics on zero.
    pub fn inv(self, a: u8) -> u8 {
        assert!(a != 0, "zero has no inverse");
        let t = &tables()[self.m as usize];
        let order = self.order() - 1;
        t.exp[(order - t.log[a as usize] as usize) % order]
    }

    pub fn div(self, a: u8, b: u8) -> u8 {
        self.mul(a, self.inv(b))
    }

    pub fn pow(self, a: u8, e: usize) -> u8 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let t = &tables()[self.m as usize];
        let order = self.order() - 1;
        t.exp[(t.log[a as usize] as usize * e) % order]
    }

    /// `dst += c * src`, elementwise.
    pub fn axpy(self, dst: &mut [u8], c: u8, src: &[u8]) {
        if c == 0 {
            return;
        }
        if c == 1 {
            for (d, s) in dst.iter_mut().zip(src) {
                *d ^= *s;
            }
            return;
        }
        let t = &tables()[self.m as usize];
        let lc = t.log[c as usize] as usize;
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d ^= t.exp[lc + t.log[s as usize] as usize];
            }
        }
    }

    pub fn scale(self, v: &mut [u8], c: u8) {
        for x in v.iter_mut() {
            *x = self.mul(*x, c);
        }
    }
}

/// Arithmetic shared by the byte field and the wide field, so the matrix
/// routines of the erasure code can serve both.
pub trait FieldOps: Copy {
    type Elem: Copy + Default + PartialEq + std::fmt::Debug;
    fn one(self) -> Self::Elem;
    fn is_zero(e: Self::Elem) -> bool;
    fn from_index(self, i: usize) -> Self::Elem;
    fn pow_elem(self, a: Self::Elem, e: usize) -> Self::Elem;
    fn inv_elem(self, a: Self::Elem) -> Self::Elem;
    fn scale_row(self, v: &mut [Self::Elem], c: Self::Elem);
    fn axpy_row(self, dst: &mut [Self::Elem], c: Self::Elem, src: &[Self::Elem]);
}

impl FieldOps for Gf {
    type Elem = u8;
    fn one(self) -> u8 {
        1
    }
    fn is_zero(e: u8) -> bool {
        e == 0
    }
    fn from_index(self, i: usize) -> u8 {
        debug_assert!(i < self.order());
        i as u8
    }
    fn pow_elem(self, a: u8, e: usize) -> u8 {
        self.pow(a, e)
    }
    fn inv_elem(self, a: u8) -> u8 {
        self.inv(a)
    }
    fn scale_row(self, v: &mut [u8], c: u8) {
        self.scale(v, c)
    }
    fn axpy_row(self, dst: &mut [u8], c: u8, src: &[u8]) {
        self.axpy(dst, c, src)
    }
}

/// GF(2^16) with reduction polynomial x^16 + x^12 + x^3 + x + 1. Used for
/// erasure codes too long for GF(2^8).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Gf16;

struct WideTables {
    exp: Vec<u16>,
    log: Vec<u32>,
}

const WIDE_POLY: u32 = 0x1_100B;
const WIDE_ORDER: usize = 65_535;

fn wide_tables() -> &'static WideTables {
    static T: OnceLock<WideTables> = OnceLock::new();
    T.get_or_init(|| {
        let mut exp = vec![0u16; 2 * WIDE_ORDER];
        let mut log = vec![0u32; WIDE_ORDER + 1];
        let mut x: u32 = 1;
        for i in 0..WIDE_ORDER {
            exp[i] = x as u16;
            log[x as usize] = i as u32;
            x <<= 1;
            if x & 0x1_0000 != 0 {
                x ^= WIDE_POLY;
            }
        }
        for i in WIDE_ORDER..2 * WIDE_ORDER {
            exp[i] = exp[i - WIDE_ORDER];
        }
        WideTables { exp, log }
    })
}

impl Gf16 {
    pub fn mul(self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        let t = wide_tables();
        t.exp[(t.log[a as usize] + t.log[b as usize]) as usize]
    }
}

impl FieldOps for Gf16 {
    type Elem = u16;
    fn one(self) -> u16 {
        1
    }
    fn is_zero(e: u16) -> bool {
        e == 0
    }
    fn from_index(self, i: usize) -> u16 {
        debug_assert!(i <= WIDE_ORDER);
        i as u16
    }
    fn pow_elem(self, a: u16, e: usize) -> u16 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let t = wide_tables();
        t.exp[(t.log[a as usize] as usize * e) % WIDE_ORDER]
    }
    /// Panics on zero.
    fn inv_elem(self, a: u16) -> u16 {
        assert!(a != 0, "zero has no inverse");
        let t = wide_tables();
        t.exp[(WIDE_ORDER - t.log[a as usize] as usize) % WIDE_ORDER]
    }
    fn scale_row(self, v: &mut [u16], c: u16) {
        for x in v.iter_mut() {
            *x = self.mul(*x, c);
        }
    }
    fn axpy_row(self, dst: &mut [u16], c: u16, src: &[u16]) {
        if c == 0 {
            return;
        }
        let t = wide_tables();
        let lc = t.log[c as usize] as usize;
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d ^= t.exp[lc + t.log[s as usize] as usize];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wide_field_is_a_field() {
        let f = Gf16;
        // the polynomial is primitive: powers of x hit every nonzero element once
        let t = wide_tables();
        let mut seen = vec![false; WIDE_ORDER + 1];
        for &e in &t.exp[..WIDE_ORDER] {
            assert!(!std::mem::replace(&mut seen[e as usize], true));
        }
        assert!(!seen[0]);
        for a in [1u16, 2, 3, 0x1234, 0xFFFF, 40_000] {
            assert_eq!(f.mul(a, f.inv_elem(a)), 1);
            assert_eq!(f.mul(a, 1), a);
            for b in [7u16, 0x8000, 513] {
                assert_eq!(f.mul(a, b), f.mul(b, a));
            }
        }
    }

    #[test]
    fn field_axioms_small_fields() {
        for m in 1..=4u8 {
            let f = Gf::new(m).unwrap();
            let q = f.order() as u8;
            for a in 0..q {
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.mul(a, 0), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1, "m={m} a={a}");
                }
                for b in 0..q {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    }
                }
            }
        }
    }

    #[test]
    fn gf256_generator_is_primitive() {
        let f = Gf::GF256;
        let mut seen = std::collections::HashSet::new();
        let mut x = 1u8;
        for _ in 0..255 {
            assert!(seen.insert(x));
            x = f.mul(x, 2);
        }
        assert_eq!(x, 1);
        // x^8 = x^4 + x^3 + x^2 + 1
        assert_eq!(f.pow(2, 8), 0b0001_1101);
    }

    #[test]
    fn inverses_in_gf256() {
        let f = Gf::GF256;
        for a in 1..=255u8 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
            assert_eq!(f.div(a, a), 1);
        }
    }

    #[test]
    fn field_sizing() {
        assert_eq!(Gf::with_more_than(3).unwrap().order(), 4);
        assert_eq!(Gf::with_more_than(4).unwrap().order(), 8);
        assert_eq!(Gf::with_more_than(255).unwrap().order(), 256);
        assert!(Gf::with_more_than(256).is_none());
        assert!(Gf::new(0).is_none() && Gf::new(9).is_none());
    }

    #[test]
    fn axpy_matches_scalar_ops() {
        let f = Gf::GF256;
        let mut d = vec![1u8, 2, 3, 0];
        let s = vec![7u8, 0, 9, 200];
        f.axpy(&mut d, 13, &s);
        let want: Vec<u8> = [1u8, 2, 3, 0].iter().zip(&s).map(|(&a, &b)| a ^ f.mul(13, b)).collect();
        assert_eq!(d, want);
    }
}
