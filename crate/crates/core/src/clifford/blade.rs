//! Basis words `e_A w` of Cl(0,n) with an optional Witt pair `f`, `f+`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported number of Euclidean generators.
pub const MAX_GENERATORS: usize = 5;

/// Normal-ordered Witt words. `FPlusF` is the product `f+ f`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WittWord {
    One,
    F,
    FPlus,
    FPlusF,
}

impl WittWord {
    pub const ALL: [WittWord; 4] = [WittWord::One, WittWord::F, WittWord::FPlus, WittWord::FPlusF];

    pub fn index(self) -> usize {
        match self {
            WittWord::One => 0,
            WittWord::F => 1,
            WittWord::FPlus => 2,
            WittWord::FPlusF => 3,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Number of Witt generators in the word.
    pub fn generator_count(self) -> u32 {
        match self {
            WittWord::One => 0,
            WittWord::F | WittWord::FPlus => 1,
            WittWord::FPlusF => 2,
        }
    }

    fn is_odd(self) -> bool {
        self.generator_count() % 2 == 1
    }

    /// Product of two words as at most two `(coefficient, word)` terms.
    fn product(self, other: WittWord) -> ([(f64, WittWord); 2], usize) {
        use WittWord::*;
        let none = (0.0, One);
        match (self, other) {
            (One, w) | (w, One) => ([(1.0, w), none], 1),
            (F, F) | (FPlus, FPlus) | (FPlus, FPlusF) | (FPlusF, F) => ([none, none], 0),
            // f f+ = 1 - f+ f
            (F, FPlus) => ([(1.0, One), (-1.0, FPlusF)], 2),
            // f (f+ f) = (1 - f+ f) f = f
            (F, FPlusF) => ([(1.0, F), none], 1),
            (FPlus, F) => ([(1.0, FPlusF), none], 1),
            // (f+ f) f+ = f+ (1 - f+ f) = f+
            (FPlusF, FPlus) => ([(1.0, FPlus), none], 1),
            (FPlusF, FPlusF) => ([(1.0, FPlusF), none], 1),
        }
    }

    fn label(self) -> &'static str {
        match self {
            WittWord::One => "",
            WittWord::F => "f",
            WittWord::FPlus => "f+",
            WittWord::FPlusF => "f+f",
        }
    }
}

/// Canonical basis word: Euclidean blade (bit `i-1` set for `e_i`) times a Witt word.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BladeIndex {
    euclid: u8,
    witt: WittWord,
}

impl BladeIndex {
    pub const SCALAR: BladeIndex = BladeIndex { euclid: 0, witt: WittWord::One };

    pub fn scalar() -> Self {
        Self::SCALAR
    }

    /// Single generator `e_i`, 1-based.
    pub fn generator(i: usize) -> Result<Self> {
        if i == 0 || i > MAX_GENERATORS {
            return Err(Error::InvalidGenerator { index: i, n: MAX_GENERATORS });
        }
        Ok(Self { euclid: 1 << (i - 1), witt: WittWord::One })
    }

    /// Blade from a list of distinct 1-based generators, in any order. The
    /// result is the canonical ascending blade; the reordering sign is dropped.
    pub fn from_generators(gens: &[usize]) -> Result<Self> {
        let mut mask = 0u8;
        for &g in gens {
            let b = Self::generator(g)?.euclid;
            if mask & b != 0 {
                return Err(Error::Parse(format!("repeated generator e{g}")));
            }
            mask |= b;
        }
        Ok(Self { euclid: mask, witt: WittWord::One })
    }

    pub fn from_mask(euclid: u8, witt: WittWord) -> Self {
        Self { euclid, witt }
    }

    pub fn with_witt(self, witt: WittWord) -> Self {
        Self { witt, ..self }
    }

    pub fn euclid_mask(self) -> u8 {
        self.euclid
    }

    pub fn witt(self) -> WittWord {
        self.witt
    }

    /// Number of Euclidean generators `|A|`.
    pub fn grade(self) -> usize {
        self.euclid.count_ones() as usize
    }

    /// `|A|` plus the Witt generator count; drives the involution signs.
    pub fn generator_count(self) -> usize {
        self.grade() + self.witt.generator_count() as usize
    }

    /// Generators of the Euclidean part in ascending order.
    pub fn generators(self) -> impl Iterator<Item = usize> {
        (0..8).filter(move |b| self.euclid & (1 << b) != 0).map(|b| b + 1)
    }

    pub fn is_valid_for(self, n: usize, witt: bool) -> bool {
        (self.euclid as usize) < (1usize << n) && (witt || self.witt == WittWord::One)
    }
}

impl fmt::Display for BladeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.euclid == 0 && self.witt == WittWord::One {
            return f.write_str("e0");
        }
        for g in self.generators() {
            write!(f, "e{g}")?;
        }
        f.write_str(self.witt.label())
    }
}

impl FromStr for BladeIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid blade label {s:?}"));
        if s == "e0" || s == "1" {
            return Ok(Self::SCALAR);
        }
        let (euclid_part, witt) = if let Some(p) = s.strip_suffix("f+f") {
            (p, WittWord::FPlusF)
        } else if let Some(p) = s.strip_suffix("f+") {
            (p, WittWord::FPlus)
        } else if let Some(p) = s.strip_suffix('f') {
            (p, WittWord::F)
        } else {
            (s, WittWord::One)
        };
        let mut gens = Vec::new();
        let mut rest = euclid_part;
        while !rest.is_empty() {
            rest = rest.strip_prefix('e').ok_or_else(bad)?;
            let end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
            let g: usize = rest[..end].parse().map_err(|_| bad())?;
            gens.push(g);
            rest = &rest[end..];
        }
        if gens.is_empty() && witt == WittWord::One {
            return Err(bad());
        }
        if gens.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse(format!("blade {s:?} is not in ascending order")));
        }
        Ok(Self::from_generators(&gens)?.with_witt(witt))
    }
}

/// Result of a basis-word product: zero, one or two signed words.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct BladeProduct {
    terms: [(f64, BladeIndex); 2],
    len: usize,
}

impl BladeProduct {
    pub fn terms(&self) -> &[(f64, BladeIndex)] {
        &self.terms[..self.len]
    }

    pub fn is_zero(&self) -> bool {
        self.len == 0
    }
}

/// Sign from moving every generator of `b` left past the larger generators of `a`.
fn reorder_sign(a: u8, b: u8) -> f64 {
    let mut swaps = 0u32;
    let mut x = a >> 1;
    while x != 0 {
        swaps += (x & b).count_ones();
        x >>= 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Product without validation; callers guarantee both words fit the algebra.
pub(crate) fn blade_product_unchecked(a: BladeIndex, b: BladeIndex) -> BladeProduct {
    let mut sign = reorder_sign(a.euclid, b.euclid);
    // e_i e_i = -1
    if (a.euclid & b.euclid).count_ones() % 2 == 1 {
        sign = -sign;
    }
    // moving the Witt part of `a` through e_B
    if a.witt.is_odd() && b.euclid.count_ones() % 2 == 1 {
        sign = -sign;
    }
    let euclid = a.euclid ^ b.euclid;
    let (words, len) = a.witt.product(b.witt);
    let mut terms = [(0.0, BladeIndex::SCALAR); 2];
    for (slot, &(c, w)) in terms.iter_mut().zip(&words[..len]) {
        *slot = (sign * c, BladeIndex { euclid, witt: w });
    }
    BladeProduct { terms, len }
}

/// Normal-ordered product of two basis words in Cl(0,n) (Witt words allowed).
pub fn blade_product(a: BladeIndex, b: BladeIndex, n: usize) -> Result<BladeProduct> {
    if n == 0 || n > MAX_GENERATORS {
        return Err(Error::InvalidDimension(n));
    }
    for x in [a, b] {
        if !x.is_valid_for(n, true) {
            let index = (0..8).rev().find(|&i| x.euclid & (1 << i) != 0).unwrap_or(0) + 1;
            return Err(Error::InvalidGenerator { index, n });
        }
    }
    Ok(blade_product_unchecked(a, b))
}
