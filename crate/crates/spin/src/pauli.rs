//! Pauli words on a chain, packed into a pair of 64-bit masks.
//!
//! Site `i` holds the letter `(x_i, z_i)`: `(1,0) = X`, `(0,1) = Z`,
//! `(1,1) = Y`. A word is the site-wise product `i^(popcount(x & z)) X^x Z^z`,
//! which makes every word Hermitian and makes `Y` the genuine Pauli matrix.
//! Words are canonically anchored: the leftmost non-identity letter sits at
//! site 0, so equality of words is equality of translation classes.

use num_complex::Complex64;
use recmethod_core::{Error, Result};

/// One single-site letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Letter {
    I,
    X,
    Y,
    Z,
}

/// A canonical (anchored) Pauli word. Supports up to 64 sites.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliWord {
    x: u64,
    z: u64,
}

impl PauliWord {
    /// Builds a word from letters, shifting leading identities away.
    /// Errors when every letter is the identity or more than 64 sites
    /// are needed.
    pub fn from_letters(letters: &[Letter]) -> Result<Self> {
        if letters.len() > 64 {
            return Err(Error::Invalid("word exceeds the 64-site frame".into()));
        }
        let mut x = 0u64;
        let mut z = 0u64;
        for (i, l) in letters.iter().enumerate() {
            let (xb, zb) = match l {
                Letter::I => (0, 0),
                Letter::X => (1, 0),
                Letter::Y => (1, 1),
                Letter::Z => (0, 1),
            };
            x |= xb << i;
            z |= zb << i;
        }
        let support = x | z;
        if support == 0 {
            return Err(Error::Invalid("the identity is not a word".into()));
        }
        let shift = support.trailing_zeros();
        Ok(Self {
            x: x >> shift,
            z: z >> shift,
        })
    }

    /// Parses a string of `X`, `Y`, `Z`, `I` letters.
    pub fn parse(s: &str) -> Result<Self> {
        let letters: Vec<Letter> = s
            .chars()
            .map(|c| match c {
                'I' | 'i' => Ok(Letter::I),
                'X' | 'x' => Ok(Letter::X),
                'Y' | 'y' => Ok(Letter::Y),
                'Z' | 'z' => Ok(Letter::Z),
                other => Err(Error::Invalid(format!("unknown Pauli letter {other:?}"))),
            })
            .collect::<Result<_>>()?;
        Self::from_letters(&letters)
    }

    /// Builds directly from anchored masks. Callers guarantee bit 0 is set.
    #[inline]
    pub(crate) fn from_masks(x: u64, z: u64) -> Self {
        debug_assert!((x | z) & 1 == 1);
        Self { x, z }
    }

    #[inline]
    pub(crate) fn x_mask(self) -> u64 {
        self.x
    }

    #[inline]
    pub(crate) fn z_mask(self) -> u64 {
        self.z
    }

    /// Support extent in sites; the first and last letters are non-identity
    /// by construction.
    #[inline]
    pub fn len(self) -> u32 {
        64 - (self.x | self.z).leading_zeros()
    }

    pub fn letter(self, i: u32) -> Letter {
        match ((self.x >> i) & 1, (self.z >> i) & 1) {
            (0, 0) => Letter::I,
            (1, 0) => Letter::X,
            (1, 1) => Letter::Y,
            (0, 1) => Letter::Z,
            _ => unreachable!(),
        }
    }
}

impl std::fmt::Display for PauliWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len() {
            let c = match self.letter(i) {
                Letter::I => 'I',
                Letter::X => 'X',
                Letter::Y => 'Y',
                Letter::Z => 'Z',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl std::fmt::Debug for PauliWord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Display::fmt(self, f)
    }
}

/// Phase exponent of `i` for the mask-level product `P * Q`, both already
/// shifted into a common frame. The result masks are the XORs.
#[inline]
pub(crate) fn phase_quarters(px: u64, pz: u64, qx: u64, qz: u64) -> u8 {
    let rx = px ^ qx;
    let rz = pz ^ qz;
    let q = (px & pz).count_ones() as i32 + (qx & qz).count_ones() as i32
        - (rx & rz).count_ones() as i32
        + 2 * (pz & qx).count_ones() as i32;
    q.rem_euclid(4) as u8
}

/// Whether two frame-aligned words anticommute.
#[inline]
pub(crate) fn anticommute_masks(px: u64, pz: u64, qx: u64, qz: u64) -> bool {
    ((px & qz).count_ones() + (pz & qx).count_ones()) & 1 == 1
}

#[inline]
pub(crate) fn quarters_to_complex(q: u8) -> Complex64 {
    match q {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Both masks shifted into the smallest common frame. `shift` is the amount
/// `P` moved, so frame bit 0 sits at `-shift` in `P`'s own coordinates.
pub(crate) struct FramePair {
    pub px: u64,
    pub pz: u64,
    pub qx: u64,
    pub qz: u64,
    pub shift: u32,
}

pub(crate) fn frame(p: &PauliWord, q: &PauliWord, offset: i64) -> Result<FramePair> {
    if offset.unsigned_abs() > 64 {
        return Err(Error::Invalid(format!(
            "offset {offset} leaves the 64-site frame"
        )));
    }
    let shift = (-offset).max(0) as u32;
    let q_shift = (offset + shift as i64) as u32;
    if p.len() + shift > 64 || q.len() + q_shift > 64 {
        return Err(Error::Invalid(format!(
            "product of words of lengths {} and {} at offset {offset} leaves the 64-site frame",
            p.len(),
            q.len()
        )));
    }
    Ok(FramePair {
        px: p.x << shift,
        pz: p.z << shift,
        qx: q.x << q_shift,
        qz: q.z << q_shift,
        shift,
    })
}

/// Product `P · T^offset(Q)` as a phase exponent of `i` plus the result
/// word with its anchor position in `P`'s coordinates; `None` word when the
/// product is the identity.
pub(crate) fn product_parts(
    p: &PauliWord,
    q: &PauliWord,
    offset: i64,
) -> Result<(u8, Option<(PauliWord, i64)>)> {
    let f = frame(p, q, offset)?;
    let quarters = phase_quarters(f.px, f.pz, f.qx, f.qz);
    let (rx, rz) = (f.px ^ f.qx, f.pz ^ f.qz);
    if rx | rz == 0 {
        return Ok((quarters, None));
    }
    let anchor = (rx | rz).trailing_zeros();
    let word = PauliWord::from_masks(rx >> anchor, rz >> anchor);
    Ok((quarters, Some((word, anchor as i64 - f.shift as i64))))
}

/// Half the commutator `[P, T^offset(Q)] = 2 P T^offset(Q)` when the words
/// anticommute, as (phase exponent, word, anchor in `P`'s coordinates);
/// `None` when they commute. Anticommuting Hermitian words always multiply
/// to a non-identity word with an odd phase exponent.
pub(crate) fn commutator_part(
    p: &PauliWord,
    q: &PauliWord,
    offset: i64,
) -> Result<Option<(u8, PauliWord, i64)>> {
    let f = frame(p, q, offset)?;
    if !anticommute_masks(f.px, f.pz, f.qx, f.qz) {
        return Ok(None);
    }
    let quarters = phase_quarters(f.px, f.pz, f.qx, f.qz);
    let (rx, rz) = (f.px ^ f.qx, f.pz ^ f.qz);
    debug_assert!(rx | rz != 0 && quarters % 2 == 1);
    let anchor = (rx | rz).trailing_zeros();
    let word = PauliWord::from_masks(rx >> anchor, rz >> anchor);
    Ok(Some((quarters, word, anchor as i64 - f.shift as i64)))
}

/// Product `P · T^offset(Q)` as a unit phase and a canonical word; the word
/// is `None` when the product is the identity. Errors when the combined
/// frame exceeds 64 sites.
pub fn multiply_words(
    p: &PauliWord,
    q: &PauliWord,
    offset: i64,
) -> Result<(Complex64, Option<PauliWord>)> {
    let (quarters, word) = product_parts(p, q, offset)?;
    Ok((quarters_to_complex(quarters), word.map(|(w, _)| w)))
}

/// Whether `P` and `T^offset(Q)` anticommute (false for disjoint supports).
pub fn anticommutes(p: &PauliWord, q: &PauliWord, offset: i64) -> bool {
    match frame(p, q, offset) {
        Ok(f) => anticommute_masks(f.px, f.pz, f.qx, f.qz),
        Err(_) => false,
    }
}
