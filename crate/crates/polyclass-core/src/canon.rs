// SPDX-License-Identifier: MIT OR Apache-2.0

//! The canonical minions and the homomorphism order between them.
//!
//! Every clone determined by binary relations between Boolean sorts is
//! equivalent, as a minion, to exactly one of the minions named here:
//!
//! * `T` — the trivial clone on a one-element domain, represented as the
//!   zero-sorted clone whose only member of each arity is the empty
//!   operation tuple;
//! * `A_k` (`k ≥ 1`) — `k`-sorted tuples `h_1 ⊲ … ⊲ h_k ≤ h_k^d`;
//! * `B_k` (`k ≥ 1`) — `k`-sorted tuples `h_1 ⊲ … ⊲ h_k ⊲ h_k^d`;
//! * `C_k` (`k ≥ 2`) — `k`-sorted tuples
//!   `h_1 ⊲ … ⊲ h_{k-1} ≤ h_k = h_k^d` with `h_{k-1} ⊲ h_{k-1}^d`;
//! * `D_k` (`k ≥ 1`) — `k`-sorted tuples `h_1 ⊲ … ⊲ h_k = h_k^d`;
//! * `Binf` — monotone `h` with `h ⊲ h^d`;
//! * `Cinf` — pairs `(h_1, h_2)` with `h_1` monotone, `h_1 ⊲ h_2 = h_2^d`;
//! * `Dinf` — monotone self-dual `h`.
//!
//! All members are idempotent, and `C_1` coincides with `D_1` (its defining
//! conditions degenerate to self-duality), so identifiers normalize `C_1`
//! to `D_1`.  Alongside the identifiers this module provides membership
//! tests, pruned enumeration of members (full truth tables up to arity 4
//! and the symmetric slice at arity 5), the distinguished symmetric 5-ary
//! chain operations with the identity suites they satisfy, the decidable
//! homomorphism order [`poset_leq`] with its Hasse diagram [`poset_dot`],
//! and explicit sort-projection homomorphisms ([`table1_hom`]) witnessing
//! every inequality of the order.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::boolfun::{for_each_in_interval, Sym5Profile, TruthTable};
use crate::error::{Budget, Error, Result};
use crate::multisorted::MultiOp;

/// Family letter of a canonical minion identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoreKind {
    /// The trivial (zero-sorted) clone.
    T,
    /// The finite family `A_k`.
    A,
    /// The finite family `B_k`.
    B,
    /// The finite family `C_k` (`k ≥ 2`; `C_1` is stored as `D_1`).
    C,
    /// The finite family `D_k`.
    D,
    /// The monotone analogue of the `B` family.
    Binf,
    /// The monotone analogue of the `C` family.
    Cinf,
    /// The monotone analogue of the `D` family.
    Dinf,
}

/// Identifier of a canonical minion, normalized so that equal minions have
/// equal identifiers (`C_1` is stored as `D_1`).
///
/// Construct through the named constructors ([`CoreId::a`] and friends) or
/// by parsing the display form (`"T"`, `"A2"`, `"Binf"`, …); the fields are
/// private to keep the normalization invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CoreId {
    kind: CoreKind,
    index: u32,
}

impl CoreId {
    /// The trivial clone `T`.
    pub fn t() -> Self {
        CoreId {
            kind: CoreKind::T,
            index: 0,
        }
    }

    /// The minion `A_k`; requires `k ≥ 1`.
    pub fn a(k: u32) -> Result<Self> {
        Self::indexed(CoreKind::A, k)
    }

    /// The minion `B_k`; requires `k ≥ 1`.
    pub fn b(k: u32) -> Result<Self> {
        Self::indexed(CoreKind::B, k)
    }

    /// The minion `C_k`; requires `k ≥ 1`, and `C_1` normalizes to `D_1`.
    pub fn c(k: u32) -> Result<Self> {
        if k == 1 {
            Self::indexed(CoreKind::D, 1)
        } else {
            Self::indexed(CoreKind::C, k)
        }
    }

    /// The minion `D_k`; requires `k ≥ 1`.
    pub fn d(k: u32) -> Result<Self> {
        Self::indexed(CoreKind::D, k)
    }

    /// The minion `Binf`.
    pub fn binf() -> Self {
        CoreId {
            kind: CoreKind::Binf,
            index: 0,
        }
    }

    /// The minion `Cinf`.
    pub fn cinf() -> Self {
        CoreId {
            kind: CoreKind::Cinf,
            index: 0,
        }
    }

    /// The minion `Dinf`.
    pub fn dinf() -> Self {
        CoreId {
            kind: CoreKind::Dinf,
            index: 0,
        }
    }

    fn indexed(kind: CoreKind, k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidCore {
                detail: "family index must be at least 1",
            });
        }
        Ok(CoreId { kind, index: k })
    }

    /// The family letter.
    pub fn kind(&self) -> CoreKind {
        self.kind
    }

    /// The index `k` of a finite-family member, `None` for `T` and the
    /// infinite-index minions.
    pub fn finite_index(&self) -> Option<u32> {
        match self.kind {
            CoreKind::A | CoreKind::B | CoreKind::C | CoreKind::D => Some(self.index),
            _ => None,
        }
    }

    /// Number of sorts of the members.
    pub fn sort_count(&self) -> usize {
        match self.kind {
            CoreKind::T => 0,
            CoreKind::A | CoreKind::B | CoreKind::C | CoreKind::D => self.index as usize,
            CoreKind::Binf | CoreKind::Dinf => 1,
            CoreKind::Cinf => 2,
        }
    }
}

impl core::fmt::Display for CoreId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self.kind {
            CoreKind::T => write!(f, "T"),
            CoreKind::A => write!(f, "A{}", self.index),
            CoreKind::B => write!(f, "B{}", self.index),
            CoreKind::C => write!(f, "C{}", self.index),
            CoreKind::D => write!(f, "D{}", self.index),
            CoreKind::Binf => write!(f, "Binf"),
            CoreKind::Cinf => write!(f, "Cinf"),
            CoreKind::Dinf => write!(f, "Dinf"),
        }
    }
}

impl core::str::FromStr for CoreId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "T" => return Ok(CoreId::t()),
            "Binf" => return Ok(CoreId::binf()),
            "Cinf" => return Ok(CoreId::cinf()),
            "Dinf" => return Ok(CoreId::dinf()),
            _ => {}
        }
        let mut chars = s.chars();
        let head = chars.next().ok_or(Error::InvalidCore {
            detail: "empty core name",
        })?;
        let rest = chars.as_str();
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::InvalidCore {
                detail: "expected a family letter followed by a decimal index",
            });
        }
        let k: u32 = rest.parse().map_err(|_| Error::InvalidCore {
            detail: "family index does not fit in 32 bits",
        })?;
        match head {
            'A' => CoreId::a(k),
            'B' => CoreId::b(k),
            'C' => CoreId::c(k),
            'D' => CoreId::d(k),
            _ => Err(Error::InvalidCore {
                detail: "unknown family letter",
            }),
        }
    }
}

impl Serialize for CoreId {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CoreId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        struct V;
        impl de::Visitor<'_> for V {
            type Value = CoreId;

            fn expecting(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
                write!(f, "a canonical core name such as \"T\", \"A2\" or \"Binf\"")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> core::result::Result<CoreId, E> {
                v.parse().map_err(E::custom)
            }
        }
        deserializer.deserialize_str(V)
    }
}

/// How a sort of a member relates to the previous sort.
#[derive(Clone, Copy, Default, PartialEq, Eq)]
enum Link {
    /// No constraint against the previous sort.
    #[default]
    None,
    /// `previous ⊲ current`.
    Tri,
    /// `previous ≤ current`.
    Leq,
}

/// The per-sort constraints defining membership in one canonical minion.
#[derive(Clone, Copy, Default)]
struct SortPlan {
    link: Link,
    monotone: bool,
    tri_dual: bool,
    leq_dual: bool,
    self_dual: bool,
}

/// The defining chain of a core, one plan per sort.
fn sort_plans(core: &CoreId) -> Vec<SortPlan> {
    let k = core.sort_count();
    let mut plans = vec![SortPlan::default(); k];
    for (s, plan) in plans.iter_mut().enumerate() {
        if s > 0 {
            plan.link = Link::Tri;
        }
        let last = s + 1 == k;
        match core.kind {
            CoreKind::T => {}
            CoreKind::A => plan.leq_dual = last,
            CoreKind::B => plan.tri_dual = last,
            CoreKind::C => {
                if last {
                    plan.link = if s == 0 { Link::None } else { Link::Leq };
                    plan.self_dual = true;
                }
                if s + 2 == k {
                    plan.tri_dual = true;
                }
            }
            CoreKind::D => plan.self_dual = last,
            CoreKind::Binf => {
                plan.monotone = true;
                plan.tri_dual = true;
            }
            CoreKind::Cinf => {
                if s == 0 {
                    plan.monotone = true;
                } else {
                    plan.self_dual = true;
                }
            }
            CoreKind::Dinf => {
                plan.monotone = true;
                plan.self_dual = true;
            }
        }
    }
    plans
}

/// Whether an idempotent multisorted operation is a member of the core.
///
/// The sort count must match the core (`T` accepts only zero-sorted
/// operations); non-idempotent operations are simply non-members.
pub fn membership(core: &CoreId, op: &MultiOp) -> Result<bool> {
    let plans = sort_plans(core);
    if op.sorts() != plans.len() {
        return Err(Error::SortOutOfRange {
            sort: op.sorts(),
            count: plans.len(),
        });
    }
    if !op.is_idempotent() {
        return Ok(false);
    }
    let tables = op.tables();
    for (s, plan) in plans.iter().enumerate() {
        let t = &tables[s];
        let linked = match plan.link {
            Link::None => true,
            Link::Tri => tables[s - 1].triangle(t)?,
            Link::Leq => tables[s - 1].leq(t)?,
        };
        if !linked
            || (plan.monotone && !t.is_monotone())
            || (plan.tri_dual && !t.triangle(&t.dual())?)
            || (plan.leq_dual && !t.leq(&t.dual())?)
            || (plan.self_dual && !t.is_self_dual())
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// [`membership`] on the symmetric 5-ary slice, with members given by their
/// per-sort weight profiles.
pub fn membership_profiles(core: &CoreId, profiles: &[Sym5Profile]) -> Result<bool> {
    let plans = sort_plans(core);
    if profiles.len() != plans.len() {
        return Err(Error::SortOutOfRange {
            sort: profiles.len(),
            count: plans.len(),
        });
    }
    for (s, plan) in plans.iter().enumerate() {
        let p = &profiles[s];
        let linked = match plan.link {
            Link::None => true,
            Link::Tri => profiles[s - 1].triangle(p),
            Link::Leq => profiles[s - 1].leq(p),
        };
        if !linked
            || (plan.monotone && !p.is_monotone())
            || (plan.tri_dual && !p.triangle_dual())
            || (plan.leq_dual && !p.leq_dual())
            || (plan.self_dual && !p.is_self_dual())
        {
            return Ok(false);
        }
    }
    Ok(true)
}

fn full_rec(
    plans: &[SortPlan],
    arity: u8,
    budget: &mut Budget,
    prefix: &mut Vec<TruthTable>,
    visit: &mut dyn FnMut(&MultiOp) -> Result<()>,
) -> Result<()> {
    let s = prefix.len();
    if s == plans.len() {
        let op = MultiOp::new(arity, prefix.clone())?;
        return visit(&op);
    }
    let plan = plans[s];
    let mut lo = TruthTable::conjunction(arity)?;
    let hi = TruthTable::disjunction(arity)?;
    match plan.link {
        Link::None => {}
        Link::Tri => lo = lo.join(&prefix[s - 1].upward_closure())?,
        Link::Leq => lo = lo.join(&prefix[s - 1])?,
    }
    let mut inner = |t: TruthTable| -> Result<()> {
        budget.charge(1)?;
        if (plan.monotone && !t.is_monotone())
            || (plan.tri_dual && !t.triangle(&t.dual())?)
            || (plan.leq_dual && !t.leq(&t.dual())?)
            || (plan.self_dual && !t.is_self_dual())
        {
            return Ok(());
        }
        prefix.push(t);
        let r = full_rec(plans, arity, budget, prefix, visit);
        prefix.pop();
        r
    };
    for_each_in_interval(&lo, &hi, &mut inner)
}

fn sym_rec(
    plans: &[SortPlan],
    budget: &mut Budget,
    prefix: &mut Vec<Sym5Profile>,
    visit: &mut dyn FnMut(&MultiOp) -> Result<()>,
) -> Result<()> {
    let s = prefix.len();
    if s == plans.len() {
        let tables: Vec<TruthTable> = prefix.iter().map(Sym5Profile::to_table).collect();
        let op = MultiOp::new(5, tables)?;
        return visit(&op);
    }
    let plan = plans[s];
    for cand in Sym5Profile::all() {
        budget.charge(1)?;
        let linked = match plan.link {
            Link::None => true,
            Link::Tri => prefix[s - 1].triangle(&cand),
            Link::Leq => prefix[s - 1].leq(&cand),
        };
        if !linked
            || (plan.monotone && !cand.is_monotone())
            || (plan.tri_dual && !cand.triangle_dual())
            || (plan.leq_dual && !cand.leq_dual())
            || (plan.self_dual && !cand.is_self_dual())
        {
            continue;
        }
        prefix.push(cand);
        let r = sym_rec(plans, budget, prefix, visit);
        prefix.pop();
        r?;
    }
    Ok(())
}

/// Streams the members of a core at the given arity in ascending order.
///
/// Arities `1..=4` enumerate full truth-table tuples; arity `5` enumerates
/// the symmetric slice (by ascending profile index per sort), which is the
/// part of the minion the classification relies on at that arity.  One
/// budget step is charged per candidate table considered.
pub fn core_for_each(
    core: &CoreId,
    arity: u8,
    budget: &mut Budget,
    visit: &mut dyn FnMut(&MultiOp) -> Result<()>,
) -> Result<()> {
    if arity == 0 || arity > 5 {
        return Err(Error::ArityOutOfRange { arity, max: 5 });
    }
    let plans = sort_plans(core);
    if plans.is_empty() {
        budget.charge(1)?;
        let op = MultiOp::new(arity, Vec::new())?;
        return visit(&op);
    }
    if arity == 5 {
        let mut prefix = Vec::with_capacity(plans.len());
        sym_rec(&plans, budget, &mut prefix, visit)
    } else {
        let mut prefix = Vec::with_capacity(plans.len());
        full_rec(&plans, arity, budget, &mut prefix, visit)
    }
}

/// Collects [`core_for_each`] into a vector.
pub fn core_enumerate(core: &CoreId, arity: u8, budget: &mut Budget) -> Result<Vec<MultiOp>> {
    let mut out = Vec::new();
    core_for_each(core, arity, budget, &mut |op| {
        out.push(op.clone());
        Ok(())
    })?;
    Ok(out)
}

/// The binary part of a core, in ascending order.
pub fn binary_part(core: &CoreId, budget: &mut Budget) -> Result<Vec<MultiOp>> {
    core_enumerate(core, 2, budget)
}

/// The distinguished symmetric 5-ary members of the `k`-sorted canonical
/// minions, written by their per-sort weight profiles `(a_1, a_2, a_3, a_4)`:
///
/// * `t[i]` (for `1 ≤ i+1 ≤ k`) has profile `(0,0,0,0)` on sorts before
///   `i`, `(0,0,1,0)` on sort `i`, and `(0,0,1,1)` on sorts after `i`;
/// * `u` (only for `k ≥ 2`) has `(0,0,1,0)` on sort `k-2`, `(1,0,1,0)` on
///   sort `k-1`, and `(0,0,0,0)` elsewhere;
/// * `v` and `w` have `(1,0,1,0)` resp. `(0,1,0,1)` on the last sort and
///   `(0,0,0,0)` elsewhere.
///
/// The tuple `(t^1, …, t^k)` lies in `B_k` and satisfies the chain and
/// swap-symmetry identities; `(t^1, …, t^{k-1}, v)` and
/// `(t^1, …, t^{k-2}, u, w)` lie in `D_k` resp. `C_k` and satisfy the chain
/// and reversal identities.  These are the unique such tuples, which is what
/// separates the four families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainOps {
    /// The chain `t^1, …, t^k`.
    pub t: Vec<MultiOp>,
    /// The operation `u`; `None` exactly when `k = 1`.
    pub u: Option<MultiOp>,
    /// The operation `v`.
    pub v: MultiOp,
    /// The operation `w`.
    pub w: MultiOp,
}

/// Builds the [`ChainOps`] for `k ≥ 1` sorts.
pub fn chain_ops(k: u32) -> Result<ChainOps> {
    if k == 0 {
        return Err(Error::InvalidCore {
            detail: "chain operations need at least one sort",
        });
    }
    let k = k as usize;
    const ZERO: Sym5Profile = Sym5Profile([false, false, false, false]);
    const PEAK: Sym5Profile = Sym5Profile([false, false, true, false]);
    const TAIL: Sym5Profile = Sym5Profile([false, false, true, true]);
    const VCOL: Sym5Profile = Sym5Profile([true, false, true, false]);
    const WCOL: Sym5Profile = Sym5Profile([false, true, false, true]);
    let build = |cols: Vec<Sym5Profile>| -> Result<MultiOp> {
        MultiOp::new(5, cols.iter().map(Sym5Profile::to_table).collect())
    };
    let mut t = Vec::with_capacity(k);
    for i in 0..k {
        let cols = (0..k)
            .map(|c| {
                if c < i {
                    ZERO
                } else if c == i {
                    PEAK
                } else {
                    TAIL
                }
            })
            .collect();
        t.push(build(cols)?);
    }
    let last_only = |col: Sym5Profile| -> Result<MultiOp> {
        let mut cols = vec![ZERO; k];
        cols[k - 1] = col;
        build(cols)
    };
    let u = if k >= 2 {
        let mut cols = vec![ZERO; k];
        cols[k - 2] = PEAK;
        cols[k - 1] = VCOL;
        Some(build(cols)?)
    } else {
        None
    };
    Ok(ChainOps {
        t,
        u,
        v: last_only(VCOL)?,
        w: last_only(WCOL)?,
    })
}

/// A minor applied to a named operation: `ops[op]` precomposed with the
/// variable word `word` (entry `j` names the target variable substituted
/// for coordinate `j`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorExpr {
    /// Index of the operation in the ambient tuple.
    pub op: usize,
    /// The variable word.
    pub word: Vec<u8>,
}

/// One side of an identity: either a minor of a named operation or a bare
/// variable (a projection).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IdentitySide {
    /// `ops[expr.op]` applied to the variable word.
    Apply(MinorExpr),
    /// The variable with this index.
    Var(u8),
}

/// A single minor identity `lhs ≈ rhs` over `arity` target variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    /// Number of variables on both sides.
    pub arity: u8,
    /// Left-hand side.
    pub lhs: IdentitySide,
    /// Right-hand side.
    pub rhs: IdentitySide,
}

/// The named identity suites over a `k`-tuple of 5-ary operations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SuiteKind {
    /// `h^1(x,x,x,y,y) ≈ x` and `h^{i+1}(x,x,x,y,y) ≈ h^i(x,x,x,x,y)`.
    Chain,
    /// `h^k(x,x,x,x,y) ≈ h^k(y,y,y,y,x)`.
    Ab,
    /// `h^k(x,x,x,x,y) ≈ h^k(x,x,y,y,y)`.
    Cd,
    /// Invariance of every `h^i` under a transposition and a cycle of the
    /// five coordinates (hence under all permutations).
    Sym,
}

/// Builds the identity suite of the given kind for a `k`-tuple of 5-ary
/// operation symbols; requires `k ≥ 1`.
pub fn identity_suite(kind: SuiteKind, k: u32) -> Result<Vec<Identity>> {
    if k == 0 {
        return Err(Error::InvalidCore {
            detail: "identity suites need at least one operation symbol",
        });
    }
    let k = k as usize;
    const XXXXY: [u8; 5] = [0, 0, 0, 0, 1];
    const XXXYY: [u8; 5] = [0, 0, 0, 1, 1];
    const YYYYX: [u8; 5] = [1, 1, 1, 1, 0];
    const XXYYY: [u8; 5] = [0, 0, 1, 1, 1];
    let apply = |op: usize, word: [u8; 5]| {
        IdentitySide::Apply(MinorExpr {
            op,
            word: word.to_vec(),
        })
    };
    Ok(match kind {
        SuiteKind::Chain => {
            let mut suite = vec![Identity {
                arity: 2,
                lhs: apply(0, XXXYY),
                rhs: IdentitySide::Var(0),
            }];
            for i in 1..k {
                suite.push(Identity {
                    arity: 2,
                    lhs: apply(i, XXXYY),
                    rhs: apply(i - 1, XXXXY),
                });
            }
            suite
        }
        SuiteKind::Ab => vec![Identity {
            arity: 2,
            lhs: apply(k - 1, XXXXY),
            rhs: apply(k - 1, YYYYX),
        }],
        SuiteKind::Cd => vec![Identity {
            arity: 2,
            lhs: apply(k - 1, XXXXY),
            rhs: apply(k - 1, XXYYY),
        }],
        SuiteKind::Sym => {
            let mut suite = Vec::with_capacity(2 * k);
            for i in 0..k {
                suite.push(Identity {
                    arity: 5,
                    lhs: apply(i, [1, 0, 2, 3, 4]),
                    rhs: apply(i, [0, 1, 2, 3, 4]),
                });
                suite.push(Identity {
                    arity: 5,
                    lhs: apply(i, [1, 2, 3, 4, 0]),
                    rhs: apply(i, [0, 1, 2, 3, 4]),
                });
            }
            suite
        }
    })
}

fn eval_side(ops: &[MultiOp], side: &IdentitySide, arity: u8) -> Result<MultiOp> {
    match side {
        IdentitySide::Apply(expr) => ops
            .get(expr.op)
            .ok_or(Error::IndexOutOfRange {
                index: expr.op,
                len: ops.len(),
            })?
            .minor(&expr.word, arity),
        IdentitySide::Var(v) => {
            let sorts = ops
                .first()
                .ok_or(Error::IndexOutOfRange { index: 0, len: 0 })?
                .sorts();
            MultiOp::projection(sorts, arity, *v)
        }
    }
}

/// Whether the operation tuple satisfies every identity of the suite.
pub fn check_identities(ops: &[MultiOp], suite: &[Identity]) -> Result<bool> {
    for identity in suite {
        if eval_side(ops, &identity.lhs, identity.arity)?
            != eval_side(ops, &identity.rhs, identity.arity)?
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Position of an `A`/`B`-side core in its (descending) chain; larger means
/// lower in the homomorphism order.
fn ab_pos(c: &CoreId) -> Option<u64> {
    match c.kind {
        CoreKind::A => Some(2 * c.index as u64 - 1),
        CoreKind::B => Some(2 * c.index as u64),
        CoreKind::Binf => Some(u64::MAX),
        _ => None,
    }
}

/// Position of a `C`/`D`-side core in its chain.
fn cd_pos(c: &CoreId) -> Option<u64> {
    match c.kind {
        CoreKind::C => Some(2 * c.index as u64 - 2),
        CoreKind::D => Some(2 * c.index as u64 - 1),
        CoreKind::Cinf => Some(u64::MAX - 1),
        CoreKind::Dinf => Some(u64::MAX),
        _ => None,
    }
}

/// The homomorphism order on the canonical minions: whether there is a
/// minion homomorphism from `a` to `b`.
///
/// The order consists of two descending chains
/// `T ≥ A_1 ≥ B_1 ≥ A_2 ≥ B_2 ≥ … ≥ Binf` and
/// `D_1 ≥ C_2 ≥ D_2 ≥ C_3 ≥ … ≥ Cinf ≥ Dinf`, with the cross inequalities
/// `D_k ≤ A_k`, `C_k ≤ B_{k-1}` (and their downward consequences), plus
/// `Cinf, Dinf ≤ Binf`; `Binf` is incomparable with every finite `C`/`D`.
pub fn poset_leq(a: &CoreId, b: &CoreId) -> bool {
    if a == b || b.kind == CoreKind::T {
        return true;
    }
    if a.kind == CoreKind::T {
        return false;
    }
    match (ab_pos(a), ab_pos(b)) {
        (Some(pa), Some(pb)) => pa >= pb,
        (Some(_), None) => false,
        (None, Some(_)) => match (a.kind, b.kind) {
            (CoreKind::Cinf | CoreKind::Dinf, _) => true,
            (_, CoreKind::Binf) => false,
            (CoreKind::D, CoreKind::A) => b.index <= a.index,
            (CoreKind::D, CoreKind::B) => b.index < a.index,
            (CoreKind::C, _) => b.index < a.index,
            _ => false,
        },
        (None, None) => {
            // Both on the C/D side.
            cd_pos(a).unwrap_or(0) >= cd_pos(b).unwrap_or(u64::MAX)
        }
    }
}

/// A minion homomorphism between canonical minions given by a sort
/// projection: target sort `i` of the image is source sort `indices()[i]`
/// of the argument.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SortMap {
    source: usize,
    map: Vec<usize>,
}

impl SortMap {
    /// Builds a sort map; every entry must name a source sort.
    pub fn new(source: usize, map: Vec<usize>) -> Result<Self> {
        if let Some(&s) = map.iter().find(|&&s| s >= source) {
            return Err(Error::SortOutOfRange {
                sort: s,
                count: source,
            });
        }
        Ok(SortMap { source, map })
    }

    /// The identity map on `sorts` sorts.
    pub fn identity(sorts: usize) -> Self {
        SortMap {
            source: sorts,
            map: (0..sorts).collect(),
        }
    }

    /// Number of source sorts.
    pub fn source_sorts(&self) -> usize {
        self.source
    }

    /// Number of target sorts.
    pub fn target_sorts(&self) -> usize {
        self.map.len()
    }

    /// The underlying projection, indexed by target sort.
    pub fn indices(&self) -> &[usize] {
        &self.map
    }

    /// Applies the map to a member of the source minion.
    pub fn apply(&self, op: &MultiOp) -> Result<MultiOp> {
        if op.sorts() != self.source {
            return Err(Error::SortOutOfRange {
                sort: op.sorts(),
                count: self.source,
            });
        }
        let tables = self.map.iter().map(|&s| op.tables()[s]).collect();
        MultiOp::new(op.arity(), tables)
    }

    /// Composes with a following map (`self` from `a` to `b`, `next` from
    /// `b` to `c`, result from `a` to `c`).
    pub fn then(&self, next: &SortMap) -> Result<SortMap> {
        if next.source != self.map.len() {
            return Err(Error::SortOutOfRange {
                sort: next.source,
                count: self.map.len(),
            });
        }
        Ok(SortMap {
            source: self.source,
            map: next.map.iter().map(|&i| self.map[i]).collect(),
        })
    }
}

/// The generating homomorphisms out of `a`, instantiating edges into the
/// infinite families up to index `max_index`.
///
/// The generators are: `B_k ⊆ A_k`, `A_k → B_{k-1}` (drop the last sort),
/// `D_k ⊆ C_k ⊆` resp. `D_k ⊆ A_k` (inclusions), `C_k → D_{k-1}` (drop sort
/// `k-2`), `C_k → B_{k-1}` (drop the last sort), `Binf → B_j` (diagonal),
/// `Cinf → Binf` (first component), `Cinf → C_j` (spread), and
/// `Dinf → Cinf` (diagonal).
pub fn table1_edges(a: &CoreId, max_index: u32) -> Vec<(CoreId, SortMap)> {
    let k = a.index as usize;
    match a.kind {
        CoreKind::T => Vec::new(),
        CoreKind::A => {
            if a.index >= 2 {
                vec![(
                    CoreId {
                        kind: CoreKind::B,
                        index: a.index - 1,
                    },
                    SortMap {
                        source: k,
                        map: (0..k - 1).collect(),
                    },
                )]
            } else {
                Vec::new()
            }
        }
        CoreKind::B => vec![(
            CoreId {
                kind: CoreKind::A,
                index: a.index,
            },
            SortMap::identity(k),
        )],
        CoreKind::C => {
            let mut drop_mid: Vec<usize> = (0..k - 2).collect();
            drop_mid.push(k - 1);
            vec![
                (
                    CoreId {
                        kind: CoreKind::D,
                        index: a.index - 1,
                    },
                    SortMap {
                        source: k,
                        map: drop_mid,
                    },
                ),
                (
                    CoreId {
                        kind: CoreKind::B,
                        index: a.index - 1,
                    },
                    SortMap {
                        source: k,
                        map: (0..k - 1).collect(),
                    },
                ),
            ]
        }
        CoreKind::D => {
            let mut edges = Vec::new();
            if a.index >= 2 {
                edges.push((
                    CoreId {
                        kind: CoreKind::C,
                        index: a.index,
                    },
                    SortMap::identity(k),
                ));
            }
            edges.push((
                CoreId {
                    kind: CoreKind::A,
                    index: a.index,
                },
                SortMap::identity(k),
            ));
            edges
        }
        CoreKind::Binf => (1..=max_index)
            .map(|j| {
                (
                    CoreId {
                        kind: CoreKind::B,
                        index: j,
                    },
                    SortMap {
                        source: 1,
                        map: vec![0; j as usize],
                    },
                )
            })
            .collect(),
        CoreKind::Cinf => {
            let mut edges = vec![(
                CoreId::binf(),
                SortMap {
                    source: 2,
                    map: vec![0],
                },
            )];
            for j in 2..=max_index {
                let mut map = vec![0usize; j as usize - 1];
                map.push(1);
                edges.push((
                    CoreId {
                        kind: CoreKind::C,
                        index: j,
                    },
                    SortMap { source: 2, map },
                ));
            }
            edges
        }
        CoreKind::Dinf => vec![(
            CoreId::cinf(),
            SortMap {
                source: 1,
                map: vec![0, 0],
            },
        )],
    }
}

/// A concrete sort-projection homomorphism from `a` to `b`, found by
/// breadth-first composition of the generating homomorphisms; fails with
/// [`Error::NotComparable`] when `a ≰ b` in [`poset_leq`].
pub fn table1_hom(a: &CoreId, b: &CoreId) -> Result<SortMap> {
    if b.kind == CoreKind::T {
        return Ok(SortMap {
            source: a.sort_count(),
            map: Vec::new(),
        });
    }
    if a == b {
        return Ok(SortMap::identity(a.sort_count()));
    }
    let not_comparable = || Error::NotComparable {
        lower: a.to_string(),
        upper: b.to_string(),
    };
    if a.kind == CoreKind::T {
        return Err(not_comparable());
    }
    let bound = b.finite_index().map_or(2, |j| (j + 1).max(2));
    let mut visited: BTreeMap<CoreId, SortMap> = BTreeMap::new();
    let mut queue: VecDeque<CoreId> = VecDeque::new();
    visited.insert(*a, SortMap::identity(a.sort_count()));
    queue.push_back(*a);
    while let Some(cur) = queue.pop_front() {
        let cur_map = visited.get(&cur).cloned().ok_or(Error::Internal {
            detail: "queued core without a recorded map".to_string(),
        })?;
        if cur == *b {
            return Ok(cur_map);
        }
        for (next, edge) in table1_edges(&cur, bound) {
            if !visited.contains_key(&next) {
                visited.insert(next, cur_map.then(&edge)?);
                queue.push_back(next);
            }
        }
    }
    Err(not_comparable())
}

/// The Hasse diagram of the homomorphism order restricted to finite indices
/// `≤ max_k` (at least `1`), as a DOT digraph with edges pointing from the
/// smaller to the larger core.
pub fn poset_dot(max_k: u32) -> String {
    let mk = max_k.max(1);
    let mut out = String::from("digraph cores {\n  rankdir=BT;\n");
    let node = |out: &mut String, id: &CoreId| {
        out.push_str(&format!("  \"{id}\";\n"));
    };
    let a = |k: u32| CoreId {
        kind: CoreKind::A,
        index: k,
    };
    let b = |k: u32| CoreId {
        kind: CoreKind::B,
        index: k,
    };
    let c = |k: u32| CoreId {
        kind: CoreKind::C,
        index: k,
    };
    let d = |k: u32| CoreId {
        kind: CoreKind::D,
        index: k,
    };
    node(&mut out, &CoreId::t());
    for k in 1..=mk {
        node(&mut out, &a(k));
        node(&mut out, &b(k));
    }
    node(&mut out, &CoreId::binf());
    node(&mut out, &d(1));
    for k in 2..=mk {
        node(&mut out, &c(k));
        node(&mut out, &d(k));
    }
    node(&mut out, &CoreId::cinf());
    node(&mut out, &CoreId::dinf());
    let edge = |out: &mut String, lo: &CoreId, hi: &CoreId| {
        out.push_str(&format!("  \"{lo}\" -> \"{hi}\";\n"));
    };
    edge(&mut out, &a(1), &CoreId::t());
    edge(&mut out, &b(1), &a(1));
    for k in 2..=mk {
        edge(&mut out, &a(k), &b(k - 1));
        edge(&mut out, &b(k), &a(k));
    }
    edge(&mut out, &CoreId::binf(), &b(mk));
    if mk >= 2 {
        edge(&mut out, &c(2), &d(1));
        edge(&mut out, &d(2), &c(2));
        for k in 3..=mk {
            edge(&mut out, &c(k), &d(k - 1));
            edge(&mut out, &d(k), &c(k));
        }
    }
    edge(&mut out, &CoreId::cinf(), &d(mk));
    edge(&mut out, &CoreId::dinf(), &CoreId::cinf());
    for k in 1..=mk {
        edge(&mut out, &d(k), &a(k));
    }
    for k in 2..=mk {
        edge(&mut out, &c(k), &b(k - 1));
    }
    edge(&mut out, &CoreId::cinf(), &CoreId::binf());
    out.push_str("}\n");
    out
}
