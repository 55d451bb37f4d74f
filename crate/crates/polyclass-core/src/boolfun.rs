// SPDX-License-Identifier: MIT OR Apache-2.0

//! Boolean operations as bit-packed truth tables.
//!
//! An operation `f : {0,1}^n -> {0,1}` is stored as the `2^n`-bit mask of its
//! value column: bit `i` of [`TruthTable::bits`] is the value of `f` on the
//! assignment whose `j`-th coordinate is bit `j` of `i`.  Coordinate `0` is
//! the least significant bit, so it toggles fastest as the index increases.
//! Arities `1..=6` fit in a `u64`.
//!
//! # Key operations
//!
//! * **Minors** `f^{(α)}(c) = f(c ∘ α)` — identifying, permuting and
//!   introducing inessential variables ([`TruthTable::minor`]).
//! * **Duality** `f^d(a) = 1 - f(ā)` ([`TruthTable::dual`]), an involutive,
//!   order-reversing-free symmetry implemented by bit reversal plus
//!   complement.
//! * **The triangle relation** `f ⊲ g`, meaning `f(a) ≤ g(b)` whenever
//!   `a ≤ b` coordinatewise ([`TruthTable::triangle`]).  Equivalently
//!   `up(f) ≤ g` where `up` is the upward closure, or `f ≤ int(g)` where
//!   `int` is the monotone interior; both closure operators run in `n`
//!   mask-shift passes.
//! * **Symmetric 5-ary profiles** ([`Sym5Profile`]): the sixteen idempotent
//!   symmetric operations of arity five, encoded by their values on the
//!   weight classes `1..=4`.  These drive the infinite-index separations in
//!   the classification and admit constant-time comparison formulas.
//!
//! Enumeration helpers walk intervals `[lo, hi]` of the pointwise order in
//! ascending numeric order, which makes every enumeration in the crate
//! deterministic.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Largest supported arity: tables are `2^n` bits and must fit in a `u64`.
pub const MAX_ARITY: u8 = 6;

/// Bit masks of the projections: `VAR_MASK[j]` has bit `i` set iff bit `j`
/// of `i` is set (restricted to the table length of the ambient arity).
const VAR_MASK: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// A Boolean operation of arity `1..=6` as a bit-packed truth table.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruthTable {
    arity: u8,
    bits: u64,
}

impl core::fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "TruthTable({}, {})", self.arity, self.to_hex())
    }
}

impl TruthTable {
    /// Creates a table from its arity and value column.
    ///
    /// Fails if the arity is outside `1..=6` or if bits beyond position
    /// `2^arity` are set.
    pub fn new(arity: u8, bits: u64) -> Result<Self> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::ArityOutOfRange {
                arity,
                max: MAX_ARITY,
            });
        }
        let mask = full_mask(arity);
        if bits & !mask != 0 {
            return Err(Error::IndexOutOfRange {
                index: (64 - bits.leading_zeros()) as usize - 1,
                len: 1usize << arity,
            });
        }
        Ok(TruthTable { arity, bits })
    }

    /// The arity of the operation.
    #[inline]
    pub const fn arity(&self) -> u8 {
        self.arity
    }

    /// The raw value column (bit `i` is the value on assignment `i`).
    #[inline]
    pub const fn bits(&self) -> u64 {
        self.bits
    }

    /// Number of table entries, `2^arity`.
    #[inline]
    pub const fn len(&self) -> u32 {
        1u32 << self.arity
    }

    /// The projection onto coordinate `coord` (zero-based).
    pub fn projection(arity: u8, coord: u8) -> Result<Self> {
        if coord >= arity {
            return Err(Error::IndexOutOfRange {
                index: coord as usize,
                len: arity as usize,
            });
        }
        let mask = full_mask(arity);
        TruthTable::new(arity, VAR_MASK[coord as usize] & mask)
    }

    /// The `arity`-fold conjunction (value `1` exactly on the all-ones
    /// assignment); the least idempotent operation of its arity.
    pub fn conjunction(arity: u8) -> Result<Self> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::ArityOutOfRange {
                arity,
                max: MAX_ARITY,
            });
        }
        TruthTable::new(arity, 1u64 << ((1u32 << arity) - 1))
    }

    /// The `arity`-fold disjunction (value `0` exactly on the all-zeros
    /// assignment); the greatest idempotent operation of its arity.
    pub fn disjunction(arity: u8) -> Result<Self> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::ArityOutOfRange {
                arity,
                max: MAX_ARITY,
            });
        }
        TruthTable::new(arity, full_mask(arity) & !1)
    }

    /// Value of the operation on the assignment with index `index`.
    pub fn value(&self, index: u32) -> Result<bool> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: index as usize,
                len: self.len() as usize,
            });
        }
        Ok(self.bit(index))
    }

    #[inline]
    pub(crate) fn bit(&self, index: u32) -> bool {
        debug_assert!(index < self.len());
        (self.bits >> index) & 1 == 1
    }

    /// Number of assignments mapped to `1`.
    #[inline]
    pub fn ones(&self) -> u32 {
        self.bits.count_ones()
    }

    /// The minor `f^{(α)}` of arity `target_arity`, where `alpha[j]` names
    /// the variable of the minor substituted for coordinate `j` of `f`.
    pub fn minor(&self, alpha: &[u8], target_arity: u8) -> Result<Self> {
        if alpha.len() != self.arity as usize {
            return Err(Error::InvalidMinorMap {
                detail: "minor map length differs from arity",
            });
        }
        if target_arity == 0 || target_arity > MAX_ARITY {
            return Err(Error::ArityOutOfRange {
                arity: target_arity,
                max: MAX_ARITY,
            });
        }
        if alpha.iter().any(|&a| a >= target_arity) {
            return Err(Error::InvalidMinorMap {
                detail: "minor map names a coordinate outside the target arity",
            });
        }
        let len = 1u32 << target_arity;
        let mut bits = 0u64;
        for c in 0..len {
            let mut src = 0u32;
            for (j, &aj) in alpha.iter().enumerate() {
                src |= ((c >> aj) & 1) << j;
            }
            if self.bit(src) {
                bits |= 1u64 << c;
            }
        }
        TruthTable::new(target_arity, bits)
    }

    /// The dual operation `f^d(a) = 1 - f(ā)`.
    ///
    /// Reversing the value column maps index `a` to its complement, so the
    /// dual is "reverse within the table, then complement".
    pub fn dual(&self) -> Self {
        let len = self.len();
        let rev = self.bits.reverse_bits() >> (64 - len);
        TruthTable {
            arity: self.arity,
            bits: !rev & full_mask(self.arity),
        }
    }

    /// Pointwise order: `self(a) ≤ other(a)` for every assignment.
    pub fn leq(&self, other: &Self) -> Result<bool> {
        self.check_arity(other)?;
        Ok(self.bits & !other.bits == 0)
    }

    /// Pointwise meet (conjunction of value columns).
    pub fn meet(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        Ok(TruthTable {
            arity: self.arity,
            bits: self.bits & other.bits,
        })
    }

    /// Pointwise join (disjunction of value columns).
    pub fn join(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        Ok(TruthTable {
            arity: self.arity,
            bits: self.bits | other.bits,
        })
    }

    /// The triangle relation `f ⊲ g`: `f(a) ≤ g(b)` whenever `a ≤ b`
    /// coordinatewise.  Computed as `up(f) ≤ g`.
    pub fn triangle(&self, other: &Self) -> Result<bool> {
        self.check_arity(other)?;
        Ok(self.upward_closure().bits & !other.bits == 0)
    }

    /// Upward closure `up(f)(b) = max { f(a) : a ≤ b }`, the least monotone
    /// operation above `f`.  One shift pass per coordinate.
    pub fn upward_closure(&self) -> Self {
        let mut bits = self.bits;
        let mask = full_mask(self.arity);
        for j in 0..self.arity {
            let vm = VAR_MASK[j as usize] & mask;
            bits |= (bits & !vm & mask) << (1u32 << j);
        }
        TruthTable {
            arity: self.arity,
            bits: bits & mask,
        }
    }

    /// Monotone interior `int(g)(a) = min { g(b) : b ≥ a }`, the greatest
    /// monotone operation below `g`.  Adjoint to [`Self::upward_closure`]:
    /// `up(f) ≤ g` iff `f ≤ int(g)`.
    pub fn monotone_interior(&self) -> Self {
        let mut bits = self.bits;
        let mask = full_mask(self.arity);
        for j in 0..self.arity {
            let vm = VAR_MASK[j as usize] & mask;
            bits &= (bits >> (1u32 << j)) | vm;
        }
        TruthTable {
            arity: self.arity,
            bits: bits & mask,
        }
    }

    /// Whether the operation is monotone (equals its upward closure).
    pub fn is_monotone(&self) -> bool {
        self.upward_closure().bits == self.bits
    }

    /// Whether the operation equals its dual.
    pub fn is_self_dual(&self) -> bool {
        self.dual().bits == self.bits
    }

    /// Whether the operation is idempotent: `f(0,…,0) = 0` and
    /// `f(1,…,1) = 1`.
    pub fn is_idempotent(&self) -> bool {
        self.bits & 1 == 0 && self.bit(self.len() - 1)
    }

    /// Lowercase hex encoding of the value column, one nibble per four table
    /// entries; nibble `i` of the string holds bits `4i..4i+4`, so the first
    /// character is the low end of the table.
    pub fn to_hex(&self) -> String {
        let nibbles = nibble_count(self.arity);
        let mut s = String::with_capacity(nibbles);
        for i in 0..nibbles {
            let d = (self.bits >> (4 * i)) & 0xF;
            s.push(char::from_digit(d as u32, 16).unwrap());
        }
        s
    }

    /// Parses the hex encoding produced by [`Self::to_hex`].
    pub fn from_hex(arity: u8, hex: &str) -> Result<Self> {
        if arity == 0 || arity > MAX_ARITY {
            return Err(Error::ArityOutOfRange {
                arity,
                max: MAX_ARITY,
            });
        }
        let nibbles = nibble_count(arity);
        if hex.len() != nibbles {
            return Err(Error::IndexOutOfRange {
                index: hex.len(),
                len: nibbles,
            });
        }
        let mut bits = 0u64;
        for (i, ch) in hex.chars().enumerate() {
            let d = ch.to_digit(16).ok_or(Error::IndexOutOfRange {
                index: i,
                len: nibbles,
            })? as u64;
            bits |= d << (4 * i);
        }
        TruthTable::new(arity, bits)
    }

    #[inline]
    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: other.arity,
            });
        }
        Ok(())
    }
}

#[inline]
const fn full_mask(arity: u8) -> u64 {
    if arity >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << arity)) - 1
    }
}

const fn nibble_count(arity: u8) -> usize {
    let len = 1usize << arity;
    if len < 4 {
        1
    } else {
        len / 4
    }
}

/// Visits every table `t` with `lo ≤ t ≤ hi` (pointwise) in ascending order
/// of the underlying bit value.  The visitor may fail to abort the walk.
///
/// The interval is walked by ascending-submask enumeration of the free bits
/// `hi & !lo`, so the number of visits is `2^(ones(hi) - ones(lo))` when
/// `lo ≤ hi` and `0` otherwise.
pub fn for_each_in_interval(
    lo: &TruthTable,
    hi: &TruthTable,
    visit: &mut dyn FnMut(TruthTable) -> Result<()>,
) -> Result<()> {
    if lo.arity != hi.arity {
        return Err(Error::ArityMismatch {
            left: lo.arity,
            right: hi.arity,
        });
    }
    if lo.bits & !hi.bits != 0 {
        return Ok(());
    }
    let free = hi.bits & !lo.bits;
    let mut sub = 0u64;
    loop {
        visit(TruthTable {
            arity: lo.arity,
            bits: lo.bits | sub,
        })?;
        if sub == free {
            return Ok(());
        }
        sub = sub.wrapping_sub(free) & free;
    }
}

/// All idempotent operations of the given arity in ascending-bits order.
///
/// The idempotent operations of arity `n` are exactly the interval from the
/// `n`-fold conjunction to the `n`-fold disjunction, of size `2^(2^n - 2)`.
/// The `cap` parameter guards against accidentally materialising a huge
/// arity; enumeration requires `arity ≤ cap`.
pub fn enumerate_idempotent(arity: u8, cap: u8) -> Result<Vec<TruthTable>> {
    if arity == 0 || arity > cap || arity > MAX_ARITY {
        return Err(Error::ArityOutOfRange {
            arity,
            max: cap.min(MAX_ARITY),
        });
    }
    let lo = TruthTable::conjunction(arity)?;
    let hi = TruthTable::disjunction(arity)?;
    let mut out = Vec::with_capacity(1usize << ((1usize << arity) - 2).min(24));
    for_each_in_interval(&lo, &hi, &mut |t| {
        out.push(t);
        Ok(())
    })?;
    Ok(out)
}

/// An idempotent symmetric operation of arity `5`, encoded by its values
/// `a_1, …, a_4` on the assignment weight classes `1..=4` (weights `0` and
/// `5` are forced by idempotency).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Sym5Profile(pub [bool; 4]);

impl Sym5Profile {
    /// Profile from a 4-bit index; bit `j` of `index` is `a_{j+1}`.
    pub fn from_index(index: u8) -> Self {
        Sym5Profile([
            index & 1 != 0,
            index & 2 != 0,
            index & 4 != 0,
            index & 8 != 0,
        ])
    }

    /// The 4-bit index inverse to [`Self::from_index`].
    pub fn index(&self) -> u8 {
        (0..4).map(|j| (self.0[j] as u8) << j).sum()
    }

    /// All sixteen profiles in ascending index order.
    pub fn all() -> [Sym5Profile; 16] {
        core::array::from_fn(|i| Sym5Profile::from_index(i as u8))
    }

    /// The corresponding 32-entry truth table of arity `5`.
    pub fn to_table(&self) -> TruthTable {
        let mut bits = 0u64;
        for idx in 0..32u32 {
            let w = idx.count_ones() as usize;
            let v = match w {
                0 => false,
                5 => true,
                _ => self.0[w - 1],
            };
            if v {
                bits |= 1u64 << idx;
            }
        }
        TruthTable { arity: 5, bits }
    }

    /// Recovers the profile of an idempotent symmetric table of arity 5;
    /// `None` if the table is not of that shape.
    pub fn from_table(t: &TruthTable) -> Option<Self> {
        if t.arity != 5 {
            return None;
        }
        let mut vals = [None::<bool>; 6];
        for idx in 0..32u32 {
            let w = idx.count_ones() as usize;
            let v = t.bit(idx);
            match vals[w] {
                None => vals[w] = Some(v),
                Some(prev) if prev != v => return None,
                _ => {}
            }
        }
        if vals[0] == Some(true) || vals[5] == Some(false) {
            return None;
        }
        Some(Sym5Profile([
            vals[1].unwrap(),
            vals[2].unwrap(),
            vals[3].unwrap(),
            vals[4].unwrap(),
        ]))
    }

    /// The dual profile: `a^d_i = 1 - a_{5-i}`.
    pub fn dual(&self) -> Self {
        Sym5Profile([!self.0[3], !self.0[2], !self.0[1], !self.0[0]])
    }

    /// Pointwise order on tables: `a_i ≤ b_i` for all `i`.
    pub fn leq(&self, other: &Self) -> bool {
        (0..4).all(|i| self.0[i] <= other.0[i])
    }

    /// Triangle relation on symmetric tables: `a_i ≤ b_j` whenever `i ≤ j`.
    pub fn triangle(&self, other: &Self) -> bool {
        (0..4).all(|i| (i..4).all(|j| self.0[i] <= other.0[j]))
    }

    /// `h ≤ h^d`, i.e. no weight class pairs `(i, 5-i)` both valued `1`.
    pub fn leq_dual(&self) -> bool {
        self.leq(&self.dual())
    }

    /// `h ⊲ h^d`, which for symmetric 5-ary tables is `a_1 = a_2 = 0`.
    pub fn triangle_dual(&self) -> bool {
        !self.0[0] && !self.0[1]
    }

    /// Whether the profile is self-dual: `a_i = 1 - a_{5-i}`.
    pub fn is_self_dual(&self) -> bool {
        *self == self.dual()
    }

    /// Whether the operation is monotone: `a_1 ≤ a_2 ≤ a_3 ≤ a_4`.
    pub fn is_monotone(&self) -> bool {
        (0..3).all(|i| self.0[i] <= self.0[i + 1])
    }
}

mod serde_impl {
    use super::TruthTable;
    use alloc::string::String;
    use serde::de::Error as _;
    use serde::ser::SerializeStruct;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    struct Repr {
        arity: u8,
        bits: String,
    }

    impl Serialize for TruthTable {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            let mut st = s.serialize_struct("TruthTable", 2)?;
            st.serialize_field("arity", &self.arity())?;
            st.serialize_field("bits", &self.to_hex())?;
            st.end()
        }
    }

    impl<'de> Deserialize<'de> for TruthTable {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            let repr = Repr::deserialize(d)?;
            TruthTable::from_hex(repr.arity, &repr.bits)
                .map_err(|e| D::Error::custom(alloc::format!("{e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_validate() {
        assert!(TruthTable::new(0, 0).is_err());
        assert!(TruthTable::new(7, 0).is_err());
        assert!(TruthTable::new(2, 0x10).is_err(), "bit above table length");
        assert!(TruthTable::new(6, u64::MAX).is_ok());
        assert!(TruthTable::projection(2, 2).is_err());
    }

    #[test]
    fn projections_and_constants() {
        let x = TruthTable::projection(2, 0).unwrap();
        let y = TruthTable::projection(2, 1).unwrap();
        assert_eq!(x.bits(), 0b1010);
        assert_eq!(y.bits(), 0b1100);
        assert_eq!(TruthTable::conjunction(2).unwrap().bits(), 0b1000);
        assert_eq!(TruthTable::disjunction(2).unwrap().bits(), 0b1110);
        assert!(x.is_idempotent() && x.is_monotone() && x.is_self_dual());
    }

    #[test]
    fn value_indexing_is_little_endian() {
        // conj(a=1, b=0) = 0; index with coordinate 0 (= a) as LSB is 0b01.
        let conj = TruthTable::conjunction(2).unwrap();
        assert!(!conj.value(0b01).unwrap());
        assert!(conj.value(0b11).unwrap());
        assert!(conj.value(4).is_err());
    }

    #[test]
    fn arity_mismatch_reported() {
        let a = TruthTable::projection(2, 0).unwrap();
        let b = TruthTable::projection(3, 0).unwrap();
        assert_eq!(
            a.leq(&b),
            Err(crate::Error::ArityMismatch { left: 2, right: 3 })
        );
        assert!(a.triangle(&b).is_err());
        assert!(a.meet(&b).is_err());
    }

    #[test]
    fn minor_validates_map() {
        let conj = TruthTable::conjunction(2).unwrap();
        assert!(conj.minor(&[0], 1).is_err(), "wrong length");
        assert!(conj.minor(&[0, 2], 2).is_err(), "coordinate out of range");
        assert!(conj.minor(&[0, 1], 7).is_err(), "target arity out of range");
    }

    #[test]
    fn upward_closure_idempotent_and_extensive() {
        for bits in 0..256u64 {
            let f = TruthTable::new(3, bits).unwrap();
            let up = f.upward_closure();
            assert!(f.leq(&up).unwrap());
            assert_eq!(up.upward_closure(), up);
            assert!(up.is_monotone());
            let int = f.monotone_interior();
            assert!(int.leq(&f).unwrap());
            assert!(int.is_monotone());
        }
    }

    #[test]
    fn sym5_profile_index_roundtrip() {
        for i in 0..16 {
            assert_eq!(Sym5Profile::from_index(i).index(), i);
        }
    }
}
