//! Exact floating-point summation.
//!
//! [`ExactSum`] keeps the sum of any sequence of `f64` values as a wide
//! fixed-point integer in units of 2^-1074, so the result does not depend on
//! the order or grouping of the additions. [`ExactSum::value`] rounds the
//! exact sum to the nearest `f64` (ties to even).

use smallvec::SmallVec;

const LIMB_BITS: i32 = 32;
const LIMB_MASK: i64 = 0xffff_ffff;
/// Each limb absorbs values below 2^32, so an `i64` limb can take well over
/// 2^30 additions before carries must be propagated.
const NORMALIZE_AFTER: u32 = 1 << 30;

#[derive(Debug, Clone, Default)]
pub struct ExactSum {
    /// Limb index of `limbs[0]`; limb `i` weighs 2^(32·i − 1074).
    lo: i32,
    limbs: SmallVec<[i64; 4]>,
    /// Additions since the last carry propagation.
    pending: u32,
    /// IEEE sum of the non-finite inputs, zero when there were none.
    special: f64,
}

impl ExactSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        if x == 0.0 {
            return;
        }
        if !x.is_finite() {
            self.special += x;
            return;
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i32;
        let fraction = bits & ((1u64 << 52) - 1);
        // value = mantissa · 2^(position − 1074)
        let (mantissa, position) = if biased == 0 {
            (fraction, 0)
        } else {
            (fraction | (1u64 << 52), biased - 1)
        };
        let limb = position / LIMB_BITS;
        let wide = (mantissa as u128) << (position % LIMB_BITS);
        let pieces = [
            (wide as i64) & LIMB_MASK,
            ((wide >> 32) as i64) & LIMB_MASK,
            (wide >> 64) as i64,
        ];
        self.cover(limb, limb + 2);
        let base = (limb - self.lo) as usize;
        for (i, piece) in pieces.into_iter().enumerate() {
            if negative {
                self.limbs[base + i] -= piece;
            } else {
                self.limbs[base + i] += piece;
            }
        }
        self.bump(1);
    }

    /// Adds another exact sum into this one.
    pub fn merge(&mut self, other: &ExactSum) {
        self.special += other.special;
        if other.limbs.is_empty() {
            return;
        }
        if other.pending >= NORMALIZE_AFTER / 2 {
            let mut other = other.clone();
            other.normalize();
            return self.merge(&other);
        }
        if self.pending >= NORMALIZE_AFTER / 2 {
            self.normalize();
        }
        let hi = other.lo + other.limbs.len() as i32 - 1;
        self.cover(other.lo, hi);
        let base = (other.lo - self.lo) as usize;
        for (i, &l) in other.limbs.iter().enumerate() {
            self.limbs[base + i] += l;
        }
        self.bump(other.pending);
    }

    /// The exact sum rounded to the nearest `f64`, ties to even.
    pub fn value(&self) -> f64 {
        if self.special != 0.0 || self.special.is_nan() {
            return self.special;
        }
        let mut work = self.clone();
        work.normalize();
        let negative = work.limbs.last().is_some_and(|&top| top < 0);
        if negative {
            for l in work.limbs.iter_mut() {
                *l = -*l;
            }
            work.normalize();
        }
        let magnitude = work.round_magnitude();
        if negative {
            -magnitude
        } else {
            magnitude
        }
    }

    pub fn is_zero(&self) -> bool {
        self.special == 0.0 && self.limbs.iter().all(|&l| l == 0)
    }

    fn bump(&mut self, adds: u32) {
        self.pending = self.pending.saturating_add(adds);
        if self.pending >= NORMALIZE_AFTER {
            self.normalize();
        }
    }

    /// Grows the window so it spans limbs `lo..=hi`.
    fn cover(&mut self, lo: i32, hi: i32) {
        if self.limbs.is_empty() {
            self.lo = lo;
            self.limbs.resize((hi - lo + 1) as usize, 0);
            return;
        }
        if lo < self.lo {
            let extra = (self.lo - lo) as usize;
            self.limbs.insert_many(0, std::iter::repeat_n(0, extra));
            self.lo = lo;
        }
        let top = self.lo + self.limbs.len() as i32 - 1;
        if hi > top {
            let len = self.limbs.len() + (hi - top) as usize;
            self.limbs.resize(len, 0);
        }
    }

    /// Propagates carries so every limb but the top one lies in [0, 2^32) and
    /// the top one is in [0, 2^32) or equal to -1; then trims zero limbs.
    fn normalize(&mut self) {
        let mut carry = 0i64;
        for l in self.limbs.iter_mut() {
            let v = *l + carry;
            carry = v >> LIMB_BITS;
            *l = v & LIMB_MASK;
        }
        while carry != 0 {
            if carry == -1 {
                self.limbs.push(-1);
                break;
            }
            self.limbs.push(carry & LIMB_MASK);
            carry >>= LIMB_BITS;
        }
        while self.limbs.last() == Some(&0) {
            self.limbs.pop();
        }
        let leading = self.limbs.iter().take_while(|&&l| l == 0).count();
        if leading > 0 {
            self.limbs.drain(..leading);
            self.lo += leading as i32;
        }
        if self.limbs.is_empty() {
            self.lo = 0;
        }
        self.pending = 1;
    }

    fn bit(&self, global: i64) -> bool {
        let limb = global.div_euclid(LIMB_BITS as i64) - self.lo as i64;
        if limb < 0 || limb >= self.limbs.len() as i64 {
            return false;
        }
        (self.limbs[limb as usize] >> global.rem_euclid(LIMB_BITS as i64)) & 1 == 1
    }

    fn any_bit_below(&self, global: i64) -> bool {
        let limb = global.div_euclid(LIMB_BITS as i64) - self.lo as i64;
        let offset = global.rem_euclid(LIMB_BITS as i64);
        for (i, &l) in self.limbs.iter().enumerate() {
            let i = i as i64;
            if i < limb && l != 0 {
                return true;
            }
            if i == limb {
                return l & ((1i64 << offset) - 1) != 0;
            }
        }
        false
    }

    /// Rounds a normalized non-negative window to the nearest `f64`.
    fn round_magnitude(&self) -> f64 {
        let Some(&top) = self.limbs.last() else {
            return 0.0;
        };
        let top_index = (self.lo + self.limbs.len() as i32 - 1) as i64;
        let msb = top_index * LIMB_BITS as i64 + 63 - (top as u64).leading_zeros() as i64;
        // Keep 53 significant bits, but never finer than 2^-1074.
        let cut = (msb - 52).max(0);
        let mut mantissa = 0u64;
        for g in (cut..=msb).rev() {
            mantissa = (mantissa << 1) | self.bit(g) as u64;
        }
        if cut > 0 {
            let round = self.bit(cut - 1);
            let sticky = self.any_bit_below(cut - 1);
            if round && (sticky || mantissa & 1 == 1) {
                mantissa += 1;
            }
        }
        scale_by_power_of_two(mantissa as f64, (cut - 1074) as i32)
    }
}

impl FromIterator<f64> for ExactSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut sum = ExactSum::new();
        for x in iter {
            sum.add(x);
        }
        sum
    }
}

/// `x · 2^exponent`, exact whenever the result is representable.
fn scale_by_power_of_two(mut x: f64, mut exponent: i32) -> f64 {
    let step = |e: i32| f64::from_bits(((e + 1023) as u64) << 52);
    while exponent > 1000 {
        x *= step(1000);
        exponent -= 1000;
    }
    while exponent < -1000 {
        x *= step(-1000);
        exponent += 1000;
    }
    x * step(exponent)
}
