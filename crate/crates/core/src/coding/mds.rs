//! Systematic Reed-Solomon style erasure code.
//!
//! The generator is `G = V * V_top^-1` where `V` is the `n x k` Vandermonde
//! matrix on the points `0, 1, .., n-1`. Any `k` rows of `V` are invertible,
//! so any `k` coded symbols determine the data, and the top `k` rows of `G`
//! are the identity.
//!
//! Codes with `n + k <= 256` work bytewise over GF(2^8). Longer codes switch
//! to GF(2^16) and read payloads as big-endian 16-bit words, so their
//! payload lengths must be even.

use super::gf::{FieldOps, Gf, Gf16};
use super::CodingError;

/// Largest `n + k` served by the byte field.
pub const NARROW_LIMIT: usize = 256;
/// Largest `n + k` served at all.
pub const WIDE_LIMIT: usize = 65_536;

#[derive(Debug, Clone, PartialEq, Eq)]
enum Generator {
    Narrow(Vec<Vec<u8>>),
    Wide(Vec<Vec<u16>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdsCode {
    pub n: usize,
    pub k: usize,
    generator: Generator,
}

/// Inverse of a square matrix, or `None` if singular.
fn invert<F: FieldOps>(f: F, m: &[Vec<F::Elem>]) -> Option<Vec<Vec<F::Elem>>> {
    let k = m.len();
    let zero = F::Elem::default();
    let mut a: Vec<Vec<F::Elem>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| if i == j { f.one() } else { zero }));
            r
        })
        .collect();
    for col in 0..k {
        let p = (col..k).find(|&r| !F::is_zero(a[r][col]))?;
        a.swap(col, p);
        let inv = f.inv_elem(a[col][col]);
        f.scale_row(&mut a[col], inv);
        let pivot = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != col && !F::is_zero(row[col]) {
                let c = row[col];
                f.axpy_row(row, c, &pivot);
            }
        }
    }
    Some(a.into_iter().map(|r| r[k..].to_vec()).collect())
}

fn mat_mul<F: FieldOps>(f: F, a: &[Vec<F::Elem>], b: &[Vec<F::Elem>]) -> Vec<Vec<F::Elem>> {
    a.iter()
        .map(|row| {
            let mut out = vec![F::Elem::default(); b[0].len()];
            for (&c, brow) in row.iter().zip(b) {
                f.axpy_row(&mut out, c, brow);
            }
            out
        })
        .collect()
}

fn systematic_generator<F: FieldOps>(f: F, n: usize, k: usize) -> Vec<Vec<F::Elem>> {
    let v: Vec<Vec<F::Elem>> = (0..n).map(|i| (0..k).map(|j| f.pow_elem(f.from_index(i), j)).collect()).collect();
    let top_inv = invert(f, &v[..k]).expect("Vandermonde on distinct points is invertible");
    mat_mul(f, &v, &top_inv)
}

fn to_words(p: &[u8]) -> Result<Vec<u16>, CodingError> {
    if !p.len().is_multiple_of(2) {
        return Err(CodingError::InvalidParameter(format!("wide codes need even payload lengths, got {}", p.len())));
    }
    Ok(p.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]])).collect())
}

fn from_words(w: &[u16]) -> Vec<u8> {
    w.iter().flat_map(|x| x.to_be_bytes()).collect()
}

fn words_of(ps: &[Vec<u8>]) -> Result<Vec<Vec<u16>>, CodingError> {
    ps.iter().map(|p| to_words(p)).collect()
}

impl MdsCode {
    pub fn new(n: usize, k: usize) -> Result<Self, CodingError> {
        if k == 0 || n < k || n + k > WIDE_LIMIT {
            return Err(CodingError::InvalidParameter(format!(
                "need 1 <= k <= n and n + k <= {WIDE_LIMIT}, got n={n} k={k}"
            )));
        }
        let generator = if n + k <= NARROW_LIMIT {
            Generator::Narrow(systematic_generator(Gf::GF256, n, k))
        } else {
            Generator::Wide(systematic_generator(Gf16, n, k))
        };
        Ok(MdsCode { n, k, generator })
    }

    /// True when the code runs over GF(2^16).
    pub fn is_wide(&self) -> bool {
        matches!(self.generator, Generator::Wide(_))
    }

    /// Row `i` of the generator, widened to 16 bits.
    pub fn generator_row(&self, i: usize) -> Vec<u16> {
        match &self.generator {
            Generator::Narrow(g) => g[i].iter().map(|&x| u16::from(x)).collect(),
            Generator::Wide(g) => g[i].clone(),
        }
    }

    pub fn encode(&self, data: &[Vec<u8>]) -> Result<Vec<Vec<u8>>, CodingError> {
        if data.len() != self.k {
            return Err(CodingError::InvalidParameter(format!("expected {} data packets, got {}", self.k, data.len())));
        }
        check_equal(data)?;
        Ok(match &self.generator {
            Generator::Narrow(g) => mat_mul(Gf::GF256, g, data),
            Generator::Wide(g) => mat_mul(Gf16, g, &words_of(data)?).iter().map(|w| from_words(w)).collect(),
        })
    }

    /// Reconstructs the data from the first `k` of `symbols`.
    pub fn decode(&self, symbols: &[(usize, Vec<u8>)]) -> Result<Vec<Vec<u8>>, CodingError> {
        let mut seen = vec![false; self.n];
        for (pos, _) in symbols {
            if *pos >= self.n {
                return Err(CodingError::PositionOutOfRange { pos: *pos, n: self.n });
            }
            if std::mem::replace(&mut seen[*pos], true) {
                return Err(CodingError::RepeatedPosition(*pos));
            }
        }
        if symbols.len() < self.k {
            return Err(CodingError::TooFewSymbols { need: self.k, got: symbols.len() });
        }
        let used = &symbols[..self.k];
        let payloads: Vec<Vec<u8>> = used.iter().map(|(_, p)| p.clone()).collect();
        check_equal(&payloads)?;
        const INDEPENDENT: &str = "any k generator rows are independent";
        Ok(match &self.generator {
            Generator::Narrow(g) => {
                let rows: Vec<Vec<u8>> = used.iter().map(|(pos, _)| g[*pos].clone()).collect();
                mat_mul(Gf::GF256, &invert(Gf::GF256, &rows).expect(INDEPENDENT), &payloads)
            }
            Generator::Wide(g) => {
                let rows: Vec<Vec<u16>> = used.iter().map(|(pos, _)| g[*pos].clone()).collect();
                let inv = invert(Gf16, &rows).expect(INDEPENDENT);
                mat_mul(Gf16, &inv, &words_of(&payloads)?).iter().map(|w| from_words(w)).collect()
            }
        })
    }
}

fn check_equal(packets: &[Vec<u8>]) -> Result<(), CodingError> {
    match packets.first() {
        Some(p) if packets.iter().any(|q| q.len() != p.len()) => Err(CodingError::UnequalPackets),
        _ => Ok(()),
    }
}

pub fn mds_encode(data: &[Vec<u8>], n: usize) -> Result<Vec<Vec<u8>>, CodingError> {
    MdsCode::new(n, data.len())?.encode(data)
}

pub fn mds_decode(symbols: &[(usize, Vec<u8>)], k: usize, n: usize) -> Result<Vec<Vec<u8>>, CodingError> {
    MdsCode::new(n, k)?.decode(symbols)
}

/// Width of the true-payload-count header carried by every frame packet.
pub const FRAME_HEADER_BYTES: usize = 2;

/// Pads `packets` with zero-filled dummies up to `k` and prefixes each with
/// the big-endian count of real packets, so outputs can drop the dummies
/// after decoding.
pub fn pack_frame(packets: &[Vec<u8>], k: usize, len: usize) -> Result<Vec<Vec<u8>>, CodingError> {
    if packets.len() > k || k > u16::MAX as usize {
        return Err(CodingError::InvalidParameter(format!("{} packets do not fit a frame of {k}", packets.len())));
    }
    if packets.iter().any(|p| p.len() != len) {
        return Err(CodingError::UnequalPackets);
    }
    let header = (packets.len() as u16).to_be_bytes();
    Ok((0..k)
        .map(|i| {
            let mut out = header.to_vec();
            match packets.get(i) {
                Some(p) => out.extend_from_slice(p),
                None => out.resize(FRAME_HEADER_BYTES + len, 0),
            }
            out
        })
        .collect())
}

pub fn unpack_frame(decoded: &[Vec<u8>]) -> Result<Vec<Vec<u8>>, CodingError> {
    let Some(first) = decoded.first() else { return Ok(Vec::new()) };
    if first.len() < FRAME_HEADER_BYTES {
        return Err(CodingError::InvalidParameter("frame packet shorter than its header".into()));
    }
    let count = u16::from_be_bytes([first[0], first[1]]) as usize;
    if count > decoded.len() {
        return Err(CodingError::InvalidParameter(format!(
            "header claims {count} packets in a frame of {}",
            decoded.len()
        )));
    }
    Ok(decoded[..count].iter().map(|p| p[FRAME_HEADER_BYTES..].to_vec()).collect())
}
