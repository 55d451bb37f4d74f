// SPDX-License-Identifier: MIT OR Apache-2.0

//! Truncated minions and brute-force reasoning about them.
//!
//! A *minion* of multisorted Boolean operations is a set of operation tuples
//! closed under minors (coordinate identifications, permutations and dummy
//! coordinates), but — unlike a clone — not necessarily under composition.
//! This module works with *truncations*: the members of arities `1..=cap`
//! (with `cap` between `2` and `5`), optionally extended by the symmetric
//! members of arity `5` when `cap < 5`.  All sets are stored explicitly, so
//! every question about a truncation is decided by finite brute force.
//!
//! The central device is *binary determination*: a minion homomorphism `ξ`
//! between multisorted Boolean minions is determined by its action on binary
//! members.  Reading the value of `ξ(f)` at an input tuple `a` reduces to the
//! value of `ξ(g)` at `(0, 1)`, where `g` is the binary minor of `f` that
//! identifies the coordinates of `f` according to `a`.  [`extend_binary_map`]
//! turns this observation into an algorithm: it extends a candidate binary
//! map to all arities and validates the result, and [`hom_search`] tries all
//! candidate binary maps in a fixed order.  Homomorphisms found this way are
//! certificates valid up to the truncation cap (plus the attached arity-5
//! witnesses); refutations are exhaustive over binary maps, hence refute
//! every homomorphism between the full minions.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use crate::boolfun::TruthTable;
use crate::error::{Budget, Error, Result};
use crate::multisorted::{table_size, FiniteOp, MultiOp};

/// Enumerates all words `[arity] -> [m]` (as slices of length `arity` with
/// entries below `m`) in ascending odometer order, the last position varying
/// fastest.
fn for_each_word(
    arity: u8,
    m: u8,
    visit: &mut dyn FnMut(&[u8]) -> Result<()>,
) -> Result<()> {
    let mut word = vec![0u8; arity as usize];
    loop {
        visit(&word)?;
        let mut pos = word.len();
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            word[pos] += 1;
            if word[pos] < m {
                break;
            }
            word[pos] = 0;
        }
    }
}

/// Whether an arity-5 operation is invariant under all permutations of its
/// coordinates (checked on the transposition and cycle generators).
fn is_symmetric5(op: &MultiOp) -> Result<bool> {
    let swap: Vec<u8> = vec![1, 0, 2, 3, 4];
    let cycle: Vec<u8> = (0..5).map(|j| (j + 1) % 5).collect();
    Ok(op.minor(&swap, 5)? == *op && op.minor(&cycle, 5)? == *op)
}

/// A minion of multisorted Boolean operations, truncated at a fixed arity
/// cap.
///
/// The members of each arity `1..=cap` are stored as deduplicated,
/// ascendingly ordered lists; the position of an operation in its list is its
/// stable identity, used by [`TruncatedHom`] and by all search routines.
/// When `cap < 5`, the symmetric members of arity `5` may be attached as
/// extra witness elements; they participate in homomorphism validation
/// (their minors down to arities `<= cap` must commute) and sharpen
/// refutations that need arity-5 identities.
///
/// Serializes to a JSON dump listing the cap, the sort count and the element
/// tables per arity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedMinion {
    cap: u8,
    sorts: usize,
    elements: Vec<Vec<MultiOp>>,
    sym5: Option<Vec<MultiOp>>,
}

impl TruncatedMinion {
    /// Builds a truncation from explicit member enumerations.
    ///
    /// `elements[i]` must list the members of arity `i + 1`; the lists are
    /// deduplicated and sorted.  Every list must be nonempty, all operations
    /// must agree on the sort count, and the family must be closed under all
    /// minors within the cap — a violation is reported as
    /// [`Error::VerificationFailed`].  The optional `sym5` list attaches
    /// symmetric arity-5 witnesses (only allowed for `cap < 5`); their minors
    /// must also land inside the truncation.
    pub fn from_function_minion(
        cap: u8,
        elements: Vec<Vec<MultiOp>>,
        sym5: Option<Vec<MultiOp>>,
    ) -> Result<Self> {
        if !(2..=5).contains(&cap) {
            return Err(Error::ArityOutOfRange { arity: cap, max: 5 });
        }
        if elements.len() != cap as usize {
            return Err(Error::IndexOutOfRange {
                index: elements.len(),
                len: cap as usize,
            });
        }
        if cap == 5 && sym5.is_some() {
            return Err(Error::VerificationFailed {
                detail: String::from("arity-5 witnesses are redundant when the cap is 5"),
            });
        }
        let mut sorts: Option<usize> = None;
        let mut record = |op: &MultiOp, arity: u8| -> Result<()> {
            if op.arity() != arity {
                return Err(Error::ArityMismatch {
                    left: op.arity(),
                    right: arity,
                });
            }
            match sorts {
                None => sorts = Some(op.sorts()),
                Some(s) if s == op.sorts() => {}
                Some(s) => {
                    return Err(Error::SortOutOfRange {
                        sort: op.sorts(),
                        count: s,
                    })
                }
            }
            Ok(())
        };
        let mut stored = Vec::with_capacity(cap as usize);
        for (pos, list) in elements.into_iter().enumerate() {
            let arity = pos as u8 + 1;
            if list.is_empty() {
                return Err(Error::VerificationFailed {
                    detail: format!("no members at arity {arity}"),
                });
            }
            let mut set = BTreeSet::new();
            for op in list {
                record(&op, arity)?;
                set.insert(op);
            }
            stored.push(set.into_iter().collect::<Vec<_>>());
        }
        let sym5 = match sym5 {
            None => None,
            Some(list) => {
                let mut set = BTreeSet::new();
                for op in list {
                    record(&op, 5)?;
                    if !is_symmetric5(&op)? {
                        return Err(Error::VerificationFailed {
                            detail: String::from("an arity-5 witness is not symmetric"),
                        });
                    }
                    set.insert(op);
                }
                Some(set.into_iter().collect::<Vec<_>>())
            }
        };
        let minion = TruncatedMinion {
            cap,
            sorts: sorts.unwrap_or(0),
            elements: stored,
            sym5,
        };
        minion.check_closed()?;
        Ok(minion)
    }

    /// The arity cap.
    pub fn cap(&self) -> u8 {
        self.cap
    }

    /// The common sort count of all members.
    pub fn sorts(&self) -> usize {
        self.sorts
    }

    /// Member counts per arity `1..=cap`.
    pub fn sizes(&self) -> Vec<usize> {
        self.elements.iter().map(|list| list.len()).collect()
    }

    /// The sorted member list of one arity.
    pub fn arity_elements(&self, arity: u8) -> Result<&[MultiOp]> {
        if arity == 0 || arity > self.cap {
            return Err(Error::ArityOutOfRange {
                arity,
                max: self.cap,
            });
        }
        Ok(&self.elements[arity as usize - 1])
    }

    /// The member with the given identity at the given arity.
    pub fn element(&self, arity: u8, index: usize) -> Result<&MultiOp> {
        let list = self.arity_elements(arity)?;
        list.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: list.len(),
        })
    }

    /// The identity of an operation at the given arity, if it is a member.
    pub fn index_of(&self, arity: u8, op: &MultiOp) -> Result<Option<usize>> {
        Ok(self.arity_elements(arity)?.binary_search(op).ok())
    }

    /// The attached symmetric arity-5 witnesses, if any.
    pub fn sym5_elements(&self) -> Option<&[MultiOp]> {
        self.sym5.as_deref()
    }

    /// The identity of an arity-5 witness, if present.
    pub fn sym5_index_of(&self, op: &MultiOp) -> Option<usize> {
        self.sym5.as_ref().and_then(|list| list.binary_search(op).ok())
    }

    /// Whether every member (including the witnesses) is idempotent.
    pub fn is_idempotent(&self) -> bool {
        self.elements.iter().flatten().all(MultiOp::is_idempotent)
            && self.sym5.iter().flatten().all(MultiOp::is_idempotent)
    }

    /// The identity of the minor of member `index` (at `arity`, which may be
    /// `5` for a witness) under the word `alpha : [arity] -> [m]`.
    ///
    /// Construction guarantees closure, so a missing minor is an internal
    /// error.
    pub fn minor_index(&self, arity: u8, alpha: &[u8], m: u8, index: usize) -> Result<usize> {
        let op = if arity == 5 && self.cap < 5 {
            let list = self.sym5.as_ref().ok_or(Error::ArityOutOfRange {
                arity: 5,
                max: self.cap,
            })?;
            list.get(index).ok_or(Error::IndexOutOfRange {
                index,
                len: list.len(),
            })?
        } else {
            self.element(arity, index)?
        };
        let img = op.minor(alpha, m)?;
        self.index_of(m, &img)?.ok_or_else(|| Error::Internal {
            detail: format!("truncated minion lost closure at arity {arity}"),
        })
    }

    /// Verifies closure under all minors within the cap.
    fn check_closed(&self) -> Result<()> {
        let check = |op: &MultiOp, arity: u8| -> Result<()> {
            for m in 1..=self.cap {
                for_each_word(arity, m, &mut |word| {
                    let img = op.minor(word, m)?;
                    if self.index_of(m, &img)?.is_none() {
                        return Err(Error::VerificationFailed {
                            detail: format!(
                                "not closed under minors: an arity-{arity} member has an \
                                 arity-{m} minor outside the truncation"
                            ),
                        });
                    }
                    Ok(())
                })?;
            }
            Ok(())
        };
        for (pos, list) in self.elements.iter().enumerate() {
            for op in list {
                check(op, pos as u8 + 1)?;
            }
        }
        if let Some(list) = &self.sym5 {
            for op in list {
                check(op, 5)?;
            }
        }
        Ok(())
    }
}

/// A homomorphism between two truncations with equal caps, stored as index
/// maps per arity (and per witness list when both sides carry one).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TruncatedHom {
    maps: Vec<Vec<usize>>,
    sym5: Option<Vec<usize>>,
}

impl TruncatedHom {
    /// The index map of one arity.
    pub fn map(&self, arity: u8) -> Result<&[usize]> {
        if arity == 0 || arity as usize > self.maps.len() {
            return Err(Error::ArityOutOfRange {
                arity,
                max: self.maps.len() as u8,
            });
        }
        Ok(&self.maps[arity as usize - 1])
    }

    /// The binary index map.
    pub fn binary_map(&self) -> &[usize] {
        &self.maps[1]
    }

    /// The witness index map, if present.
    pub fn sym5_map(&self) -> Option<&[usize]> {
        self.sym5.as_deref()
    }

    /// Builds and verifies the homomorphism induced by an explicit operation
    /// map (for instance a term substitution or a sort selection).
    ///
    /// `f` receives each member of `m` and must return its intended image;
    /// the image must be a member of `n` of the same arity.  The result is
    /// verified in full before it is returned.
    pub fn from_map(
        m: &TruncatedMinion,
        n: &TruncatedMinion,
        f: &mut dyn FnMut(&MultiOp) -> Result<MultiOp>,
    ) -> Result<Self> {
        if m.cap() != n.cap() {
            return Err(Error::ArityMismatch {
                left: m.cap(),
                right: n.cap(),
            });
        }
        let mut maps = Vec::with_capacity(m.cap() as usize);
        for arity in 1..=m.cap() {
            let mut v = Vec::with_capacity(m.arity_elements(arity)?.len());
            for op in m.arity_elements(arity)? {
                let img = f(op)?;
                let ix = n.index_of(arity, &img)?.ok_or_else(|| Error::VerificationFailed {
                    detail: format!("the image of an arity-{arity} member is not in the target"),
                })?;
                v.push(ix);
            }
            maps.push(v);
        }
        let sym5 = match (m.sym5_elements(), n.sym5_elements()) {
            (Some(src), Some(_)) => {
                let mut v = Vec::with_capacity(src.len());
                for op in src {
                    let img = f(op)?;
                    let ix = n.sym5_index_of(&img).ok_or_else(|| Error::VerificationFailed {
                        detail: String::from("the image of an arity-5 witness is not in the target"),
                    })?;
                    v.push(ix);
                }
                Some(v)
            }
            _ => None,
        };
        let hom = TruncatedHom { maps, sym5 };
        hom.verify(m, n)?;
        Ok(hom)
    }

    /// Checks that this is a well-formed homomorphism from `m` to `n`:
    /// the maps have the right shapes, indices are in range, witness maps are
    /// present exactly when both sides carry witnesses, and every minor
    /// within the cap commutes with the mapping.
    pub fn verify(&self, m: &TruncatedMinion, n: &TruncatedMinion) -> Result<()> {
        if m.cap() != n.cap() {
            return Err(Error::ArityMismatch {
                left: m.cap(),
                right: n.cap(),
            });
        }
        let fail = |detail: String| Err(Error::VerificationFailed { detail });
        if self.maps.len() != m.cap() as usize {
            return fail(format!(
                "expected {} arity maps, found {}",
                m.cap(),
                self.maps.len()
            ));
        }
        for arity in 1..=m.cap() {
            let map = &self.maps[arity as usize - 1];
            if map.len() != m.arity_elements(arity)?.len() {
                return fail(format!("wrong domain size at arity {arity}"));
            }
            let target = n.arity_elements(arity)?.len();
            if map.iter().any(|&ix| ix >= target) {
                return fail(format!("image index out of range at arity {arity}"));
            }
        }
        match (&self.sym5, m.sym5_elements(), n.sym5_elements()) {
            (Some(_), Some(_), Some(_)) | (None, None, _) | (None, _, None) => {}
            _ => {
                return fail(String::from(
                    "arity-5 witness map must be present exactly when both sides carry witnesses",
                ))
            }
        }
        if let (Some(map), Some(src), Some(dst)) =
            (&self.sym5, m.sym5_elements(), n.sym5_elements())
        {
            if map.len() != src.len() {
                return fail(String::from("wrong witness domain size"));
            }
            if map.iter().any(|&ix| ix >= dst.len()) {
                return fail(String::from("witness image index out of range"));
            }
        }
        for arity in 1..=m.cap() {
            let map = &self.maps[arity as usize - 1];
            for target in 1..=m.cap() {
                for_each_word(arity, target, &mut |word| {
                    for (i, &ix) in map.iter().enumerate() {
                        let src = m.minor_index(arity, word, target, i)?;
                        let dst = n.minor_index(arity, word, target, ix)?;
                        if self.maps[target as usize - 1][src] != dst {
                            return Err(Error::VerificationFailed {
                                detail: format!(
                                    "minor commutation fails at arity {arity}, member {i}, \
                                     word {word:?}"
                                ),
                            });
                        }
                    }
                    Ok(())
                })?;
            }
        }
        if let Some(map) = &self.sym5 {
            for target in 1..=m.cap() {
                for_each_word(5, target, &mut |word| {
                    for (i, &ix) in map.iter().enumerate() {
                        let src = m.minor_index(5, word, target, i)?;
                        let dst = n.minor_index(5, word, target, ix)?;
                        if self.maps[target as usize - 1][src] != dst {
                            return Err(Error::VerificationFailed {
                                detail: format!(
                                    "minor commutation fails at an arity-5 witness, member {i}, \
                                     word {word:?}"
                                ),
                            });
                        }
                    }
                    Ok(())
                })?;
            }
        }
        Ok(())
    }
}

/// Result of extending a candidate binary map: either a verified
/// homomorphism, or a failure explaining a concrete counterexample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtendOutcome {
    /// The binary map extends; the verified homomorphism is attached.
    Hom(TruncatedHom),
    /// The binary map does not extend.
    Failure {
        /// A human-readable counterexample: which member, arity or word
        /// breaks membership or minor commutation.
        detail: String,
    },
}

/// The image of member `index` of arity `op_arity` under the homomorphism
/// determined by the binary map `xi2`, computed pointwise: the value at an
/// input tuple `a` is the value at `(0, 1)` of the `xi2`-image of the binary
/// minor of the member that identifies coordinates according to `a`.
fn determined_image(
    m: &TruncatedMinion,
    n: &TruncatedMinion,
    xi2: &[usize],
    op_arity: u8,
    index: usize,
) -> Result<MultiOp> {
    let entries = 1usize << op_arity;
    let mut bits = vec![0u64; n.sorts()];
    let mut word = vec![0u8; op_arity as usize];
    for t in 0..entries {
        for (j, w) in word.iter_mut().enumerate() {
            *w = ((t >> j) & 1) as u8;
        }
        let bin = m.minor_index(op_arity, &word, 2, index)?;
        let g = n.element(2, xi2[bin])?;
        for (s, table) in g.tables().iter().enumerate() {
            if table.value(2)? {
                bits[s] |= 1u64 << t;
            }
        }
    }
    let tables = bits
        .iter()
        .map(|&b| TruthTable::new(op_arity, b))
        .collect::<Result<Vec<_>>>()?;
    MultiOp::new(op_arity, tables)
}

/// Extends a candidate binary map `xi2 : members of arity 2 of m -> members
/// of arity 2 of n` to a full homomorphism, if possible.
///
/// Every arity is filled in by binary determination; the candidate fails if
/// a determined image is not a member of the target, if the determination is
/// inconsistent with `xi2` itself, or if any minor within the cap (or from
/// the arity-5 witnesses) fails to commute.  Malformed inputs (length or
/// ranges) are errors, not failures.
pub fn extend_binary_map(
    m: &TruncatedMinion,
    n: &TruncatedMinion,
    xi2: &[usize],
) -> Result<ExtendOutcome> {
    if m.cap() != n.cap() {
        return Err(Error::ArityMismatch {
            left: m.cap(),
            right: n.cap(),
        });
    }
    let m2 = m.arity_elements(2)?.len();
    let n2 = n.arity_elements(2)?.len();
    if xi2.len() != m2 {
        return Err(Error::IndexOutOfRange {
            index: xi2.len(),
            len: m2,
        });
    }
    if let Some(&bad) = xi2.iter().find(|&&ix| ix >= n2) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: n2,
        });
    }
    let fail = |detail: String| Ok(ExtendOutcome::Failure { detail });

    // Unary images first (cheap, and needed by the quick commutation kills).
    let mut unary = Vec::with_capacity(m.arity_elements(1)?.len());
    for i in 0..m.arity_elements(1)?.len() {
        let img = determined_image(m, n, xi2, 1, i)?;
        match n.index_of(1, &img)? {
            Some(ix) => unary.push(ix),
            None => {
                return fail(format!(
                    "the determined image of unary member {i} is not in the target"
                ))
            }
        }
    }

    // The binary map must reproduce itself under determination.
    for (i, &ix) in xi2.iter().enumerate() {
        let img = determined_image(m, n, xi2, 2, i)?;
        if n.index_of(2, &img)? != Some(ix) {
            return fail(format!(
                "the binary map is inconsistent with its own determination on member {i}"
            ));
        }
    }

    // Quick kills: words within arity 2 already weed out most candidates.
    let quick: [(&[u8], u8); 4] = [(&[0, 0], 1), (&[0, 0], 2), (&[1, 1], 2), (&[1, 0], 2)];
    for (i, &ix) in xi2.iter().enumerate() {
        for (word, target) in quick {
            let src = m.minor_index(2, word, target, i)?;
            let dst = n.minor_index(2, word, target, ix)?;
            let got = if target == 1 { unary[src] } else { xi2[src] };
            if got != dst {
                return fail(format!(
                    "minor commutation fails at arity 2, member {i}, word {word:?}"
                ));
            }
        }
    }

    let mut maps = Vec::with_capacity(m.cap() as usize);
    maps.push(unary);
    maps.push(xi2.to_vec());
    for arity in 3..=m.cap() {
        let mut v = Vec::with_capacity(m.arity_elements(arity)?.len());
        for i in 0..m.arity_elements(arity)?.len() {
            let img = determined_image(m, n, xi2, arity, i)?;
            match n.index_of(arity, &img)? {
                Some(ix) => v.push(ix),
                None => {
                    return fail(format!(
                        "the determined image of arity-{arity} member {i} is not in the target"
                    ))
                }
            }
        }
        maps.push(v);
    }
    let sym5 = match (m.sym5_elements(), n.sym5_elements()) {
        (Some(src), Some(_)) => {
            let mut v = Vec::with_capacity(src.len());
            for i in 0..src.len() {
                let img = determined_image(m, n, xi2, 5, i)?;
                match n.sym5_index_of(&img) {
                    Some(ix) => v.push(ix),
                    None => {
                        return fail(format!(
                            "the determined image of arity-5 witness {i} is not in the target"
                        ))
                    }
                }
            }
            Some(v)
        }
        _ => None,
    };
    let hom = TruncatedHom { maps, sym5 };
    match hom.verify(m, n) {
        Ok(()) => Ok(ExtendOutcome::Hom(hom)),
        Err(Error::VerificationFailed { detail }) => Ok(ExtendOutcome::Failure { detail }),
        Err(e) => Err(e),
    }
}

/// Iterates candidate binary maps in ascending odometer order, extending
/// each; collects the first success, or all successes.
///
/// When source and target are both idempotent, their unary parts are
/// singletons and the images of the two binary projections are forced, so
/// those slots are pinned instead of searched.  One budget unit is charged
/// per candidate.
fn search_impl(
    m: &TruncatedMinion,
    n: &TruncatedMinion,
    budget: &mut Budget,
    collect_all: bool,
) -> Result<Vec<TruncatedHom>> {
    if m.cap() != n.cap() {
        return Err(Error::ArityMismatch {
            left: m.cap(),
            right: n.cap(),
        });
    }
    let m2 = m.arity_elements(2)?.len();
    let n2 = n.arity_elements(2)?.len();
    let mut forced: Vec<Option<usize>> = vec![None; m2];
    if m.is_idempotent() && n.is_idempotent() {
        for coord in 0..2u8 {
            let pm = MultiOp::projection(m.sorts(), 2, coord)?;
            let pn = MultiOp::projection(n.sorts(), 2, coord)?;
            if let (Some(im), Some(inx)) = (m.index_of(2, &pm)?, n.index_of(2, &pn)?) {
                match forced[im] {
                    Some(prev) if prev != inx => return Ok(Vec::new()),
                    _ => forced[im] = Some(inx),
                }
            }
        }
    }
    let free: Vec<usize> = (0..m2).filter(|&i| forced[i].is_none()).collect();
    let mut xi2: Vec<usize> = forced.iter().map(|slot| slot.unwrap_or(0)).collect();
    let mut out = Vec::new();
    loop {
        budget.charge(1)?;
        if let ExtendOutcome::Hom(h) = extend_binary_map(m, n, &xi2)? {
            out.push(h);
            if !collect_all {
                return Ok(out);
            }
        }
        let mut pos = free.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            let slot = free[pos];
            xi2[slot] += 1;
            if xi2[slot] < n2 {
                break;
            }
            xi2[slot] = 0;
        }
    }
}

/// Searches for a homomorphism from `m` to `n`, trying candidate binary maps
/// in canonical order and returning the first that extends.
///
/// A `None` is an exhaustive refutation: no homomorphism between the full
/// minions can restrict to a valid map on the stored truncations.
pub fn hom_search(
    m: &TruncatedMinion,
    n: &TruncatedMinion,
    budget: &mut Budget,
) -> Result<Option<TruncatedHom>> {
    Ok(search_impl(m, n, budget, false)?.into_iter().next())
}

/// Enumerates all endomorphisms of `m` (in canonical candidate order).
pub fn endo_enumerate(m: &TruncatedMinion, budget: &mut Budget) -> Result<Vec<TruncatedHom>> {
    search_impl(m, m, budget, true)
}

fn is_permutation(map: &[usize], len: usize) -> bool {
    if map.len() != len {
        return false;
    }
    let mut seen = vec![false; len];
    for &ix in map {
        if seen[ix] {
            return false;
        }
        seen[ix] = true;
    }
    true
}

/// Whether every endomorphism of `m` has a bijective binary part — the
/// truncated counterpart of being a minion core.
pub fn is_core_truncated(m: &TruncatedMinion, budget: &mut Budget) -> Result<bool> {
    let len = m.arity_elements(2)?.len();
    let endos = endo_enumerate(m, budget)?;
    Ok(endos.iter().all(|h| is_permutation(h.binary_map(), len)))
}

fn distinct_count(map: &[usize]) -> usize {
    map.iter().copied().collect::<BTreeSet<_>>().len()
}

/// The image-size tuple of an endomorphism, compared lexicographically by
/// arity (witness list last).
fn image_key(h: &TruncatedHom) -> Vec<usize> {
    let mut key: Vec<usize> = h.maps.iter().map(|map| distinct_count(map)).collect();
    if let Some(map) = &h.sym5 {
        key.push(distinct_count(map));
    }
    key
}

/// The sub-minion spanned by the image of an endomorphism.
fn image_minion(m: &TruncatedMinion, h: &TruncatedHom) -> Result<TruncatedMinion> {
    let mut elements = Vec::with_capacity(m.cap() as usize);
    for arity in 1..=m.cap() {
        let mut set = BTreeSet::new();
        for &ix in h.map(arity)? {
            set.insert(m.element(arity, ix)?.clone());
        }
        elements.push(set.into_iter().collect::<Vec<_>>());
    }
    let sym5 = match (m.sym5_elements(), h.sym5_map()) {
        (Some(list), Some(map)) => {
            let mut set = BTreeSet::new();
            for &ix in map {
                set.insert(list[ix].clone());
            }
            Some(set.into_iter().collect::<Vec<_>>())
        }
        _ => None,
    };
    TruncatedMinion::from_function_minion(m.cap(), elements, sym5)
}

/// Shrinks `m` to a core by repeatedly applying the endomorphism whose image
/// sizes are lexicographically smallest (ties resolved by candidate order)
/// until the sizes stabilise.
///
/// The result admits homomorphisms to and from the input and passes
/// [`is_core_truncated`].
pub fn compute_core_truncated(
    m: &TruncatedMinion,
    budget: &mut Budget,
) -> Result<TruncatedMinion> {
    let mut current = m.clone();
    loop {
        let endos = endo_enumerate(&current, budget)?;
        let best = endos.iter().min_by_key(|h| image_key(h)).ok_or_else(|| Error::Internal {
            detail: String::from("a truncated minion has no endomorphisms"),
        })?;
        let mut full: Vec<usize> = current.sizes();
        if let Some(list) = current.sym5_elements() {
            full.push(list.len());
        }
        if image_key(best) == full {
            return Ok(current);
        }
        current = image_minion(&current, best)?;
    }
}

/// The homomorphism induced by a point map into the clone of all operations
/// on an `l`-element domain.
///
/// `x` assigns a point of `[l]` to every member of arity `l`; the image of a
/// member `f` of arity `n` is the `l`-valued operation whose value at an
/// argument tuple `c` (read as a word `[n] -> [l]`) is `x` applied to the
/// minor of `f` under `c`.  The images are returned per arity; the
/// construction commutes with all minors by associativity of minor-taking.
pub fn hom_from_point_map(
    m: &TruncatedMinion,
    x: &[u8],
    l: u8,
) -> Result<Vec<Vec<FiniteOp>>> {
    if l == 0 || l > m.cap() {
        return Err(Error::ArityOutOfRange { arity: l, max: m.cap() });
    }
    let size_l = m.arity_elements(l)?.len();
    if x.len() != size_l {
        return Err(Error::IndexOutOfRange {
            index: x.len(),
            len: size_l,
        });
    }
    if let Some(&bad) = x.iter().find(|&&v| v >= l) {
        return Err(Error::IndexOutOfRange {
            index: bad as usize,
            len: l as usize,
        });
    }
    let mut out = Vec::with_capacity(m.cap() as usize);
    for arity in 1..=m.cap() {
        let count = m.arity_elements(arity)?.len();
        let mut images = Vec::with_capacity(count);
        for i in 0..count {
            let mut values = vec![0u8; table_size(l, arity)];
            for_each_word(arity, l, &mut |word| {
                let minor = m.minor_index(arity, word, l, i)?;
                values[FiniteOp::index_of(l, word)] = x[minor];
                Ok(())
            })?;
            images.push(FiniteOp::new(l, arity, values)?);
        }
        out.push(images);
    }
    Ok(out)
}
