// SPDX-License-Identifier: MIT OR Apache-2.0

//! Classification of reduced descriptions and relational structures onto the
//! canonical minion cores, with verified witness homomorphisms.
//!
//! The pipeline has three layers:
//!
//! 1. [`collapse_core`] maps a reduced description to the canonical core its
//!    clone is equivalent to, by a case split on monotonicity markers, the
//!    number of `g`-symbols and the parity of the chain rank.
//! 2. [`witness_forward`] and [`witness_backward`] produce the two
//!    homomorphisms realizing the equivalence: term expressions that send
//!    clone members into the core, and a symbol-to-sort assignment that pulls
//!    core members back into the clone.
//! 3. [`verify_witnesses`] checks both directions by brute force over every
//!    member at small arities (full tables up to arity 4, the symmetric slice
//!    at arity 5), so a [`ClassificationReport`] is only ever produced with
//!    machine-checked witnesses.
//!
//! [`classify_relations`] runs the whole pipeline starting from a structure of
//! at most binary relations between Boolean sorts; [`classify_reduced`] starts
//! from a reduced description directly.  The clone being classified is always
//! the *idempotent* polymorphism minion, which equals the full polymorphism
//! minion of the structure with all singleton unary relations adjoined; the
//! idempotent-core step therefore runs on that singleton expansion, and the
//! trivial outcome arises exactly for degenerate (zero-sort) inputs.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::boolfun::TruthTable;
use crate::canon::{self, CoreId, CoreKind};
use crate::descriptions::{
    extract_description, to_reduced, ReducedConstraint, ReducedDescription,
};
use crate::error::{Budget, Error, Result};
use crate::multisorted::{idempotent_core, CoreOutcome, MultiOp, Structure, TypedRelation};

/// A term over the symbols of a reduced description, built from pointwise
/// meets, joins and duals.
///
/// Symbols index the description's symbol list with the `f`-symbols first and
/// the `g`-symbols after them.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TermExpr {
    /// The `i`-th symbol.
    Symbol(usize),
    /// Pointwise conjunction of two terms.
    Meet(Box<TermExpr>, Box<TermExpr>),
    /// Pointwise disjunction of two terms.
    Join(Box<TermExpr>, Box<TermExpr>),
    /// The dual of a term.
    Dual(Box<TermExpr>),
}

impl TermExpr {
    /// The `i`-th symbol.
    pub fn symbol(i: usize) -> Self {
        TermExpr::Symbol(i)
    }

    /// Pointwise conjunction.
    pub fn meet(a: TermExpr, b: TermExpr) -> Self {
        TermExpr::Meet(Box::new(a), Box::new(b))
    }

    /// Pointwise disjunction.
    pub fn join(a: TermExpr, b: TermExpr) -> Self {
        TermExpr::Join(Box::new(a), Box::new(b))
    }

    /// The dual.
    pub fn dual(a: TermExpr) -> Self {
        TermExpr::Dual(Box::new(a))
    }

    /// Renders the term in prefix notation; symbols below `f_count` print as
    /// `f1, f2, …` and the remaining ones as `g1, g2, …`.
    pub fn to_prefix_string(&self, f_count: usize) -> String {
        match self {
            TermExpr::Symbol(i) => {
                if *i < f_count {
                    format!("f{}", i + 1)
                } else {
                    format!("g{}", i - f_count + 1)
                }
            }
            TermExpr::Meet(a, b) => format!(
                "(meet {} {})",
                a.to_prefix_string(f_count),
                b.to_prefix_string(f_count)
            ),
            TermExpr::Join(a, b) => format!(
                "(join {} {})",
                a.to_prefix_string(f_count),
                b.to_prefix_string(f_count)
            ),
            TermExpr::Dual(a) => format!("(dual {})", a.to_prefix_string(f_count)),
        }
    }
}

/// Evaluates a term over concrete truth tables, one per symbol.
pub fn eval_term(term: &TermExpr, ops: &[TruthTable]) -> Result<TruthTable> {
    match term {
        TermExpr::Symbol(i) => ops.get(*i).copied().ok_or(Error::SymbolOutOfRange {
            symbol: *i,
            count: ops.len(),
        }),
        TermExpr::Meet(a, b) => eval_term(a, ops)?.meet(&eval_term(b, ops)?),
        TermExpr::Join(a, b) => eval_term(a, ops)?.join(&eval_term(b, ops)?),
        TermExpr::Dual(a) => Ok(eval_term(a, ops)?.dual()),
    }
}

/// The canonical core a reduced description collapses onto.
///
/// With monotonicity markers present the core is `B_∞` (no `g`-symbols),
/// `C_∞` (`g`-symbols but none of them monotone) or `D_∞` (some monotone
/// `g`-symbol).  Otherwise let `r` be the chain rank and `l = ⌈r/2⌉`: without
/// `g`-symbols the core is `A_l` for odd `r` and `B_l` for even `r`; with
/// `g`-symbols it is `D_l` for odd `r` and `C_{l+1}` for even `r`, where
/// `r = 0` (no `f`-symbols at all) degenerates to `D_1`.
pub fn collapse_core(rd: &ReducedDescription) -> Result<CoreId> {
    rd.validate()?;
    if rd.has_monotone() {
        return Ok(if rd.has_monotone_g() {
            CoreId::dinf()
        } else if rd.g_count() > 0 {
            CoreId::cinf()
        } else {
            CoreId::binf()
        });
    }
    let chr = rd.chain_rank()?;
    if chr == 0 {
        return CoreId::d(1);
    }
    let l = chr.div_ceil(2);
    if rd.g_count() == 0 {
        if chr % 2 == 1 {
            CoreId::a(l)
        } else {
            CoreId::b(l)
        }
    } else if chr % 2 == 0 {
        CoreId::c(l + 1)
    } else {
        CoreId::d(l)
    }
}

/// All `f`-symbol ranks of a description without monotonicity markers.
fn ranks_of(rd: &ReducedDescription) -> Result<Vec<u32>> {
    (0..rd.f_count()).map(|i| rd.rank(i)).collect()
}

/// The longest `⊲`-chain ending at `end`, as symbol indices; among equally
/// long chains, each predecessor is the smallest-index symbol of the
/// required rank.
fn chain_to(rd: &ReducedDescription, ranks: &[u32], end: usize) -> Result<Vec<usize>> {
    let r = ranks[end] as usize;
    let mut path = vec![end; r];
    for pos in (0..r.saturating_sub(1)).rev() {
        let cur = path[pos + 1];
        let want = (pos + 1) as u32;
        let pred = (0..rd.f_count())
            .find(|&j| ranks[j] == want && rd.constraints().contains(&ReducedConstraint::FF(j, cur)))
            .ok_or_else(|| Error::Internal {
                detail: String::from("missing predecessor on a longest ⊲-chain"),
            })?;
        path[pos] = pred;
    }
    Ok(path)
}

/// The two interleaved chains `s₁ ⊲ … ⊲ s_l` and `t₁ ⊲ … ⊲ t_l` with
/// `s_l ≤ t_l^d` whose existence is guaranteed whenever the chain rank is
/// `chr ≥ 1`, extracted deterministically.
///
/// The three ways the chain rank can be attained are tried in a fixed order —
/// a plain rank, a sum `rank(f_i) + rank(f_j)` over a constraint
/// `f_i ⊲ f_j^d` (oriented so the larger rank comes first), and `2·rank(f_i)
/// + 1` over a constraint `f_i ⊲ g_j` — and ties are broken towards the
/// lexicographically smallest symbol indices.
fn claim_terms(rd: &ReducedDescription, chr: u32) -> Result<(Vec<TermExpr>, Vec<TermExpr>)> {
    let n = rd.f_count();
    let ranks = ranks_of(rd)?;
    let l = chr.div_ceil(2) as usize;

    // A plain rank attains the chain rank.
    if let Some(i) = (0..n).find(|&i| ranks[i] == chr) {
        let p = chain_to(rd, &ranks, i)?;
        let r = chr as usize;
        let s = (0..l).map(|a| TermExpr::symbol(p[a])).collect();
        let t = (0..l)
            .map(|a| TermExpr::dual(TermExpr::symbol(p[r - 1 - a])))
            .collect();
        return Ok((s, t));
    }

    // A constraint f_i ⊲ f_j^d attains it.
    let mut best: Option<(usize, usize)> = None;
    for c in rd.constraints() {
        if let ReducedConstraint::FFD(a, b) = *c {
            for (i, j) in [(a, b), (b, a)] {
                if ranks[i] + ranks[j] == chr && ranks[i] >= ranks[j] && best.map_or(true, |cur| (i, j) < cur)
                {
                    best = Some((i, j));
                }
            }
        }
    }
    if let Some((i, j)) = best {
        let r = ranks[i] as usize;
        let rp = ranks[j] as usize;
        let p = chain_to(rd, &ranks, i)?;
        let q = chain_to(rd, &ranks, j)?;
        let s = (0..l).map(|a| TermExpr::symbol(p[a])).collect();
        let mut t: Vec<TermExpr> = q.iter().map(|&x| TermExpr::symbol(x)).collect();
        for pos in ((r + rp - l + 1)..=r).rev() {
            t.push(TermExpr::dual(TermExpr::symbol(p[pos - 1])));
        }
        return Ok((s, t));
    }

    // A constraint f_i ⊲ g_j attains it.
    let mut best: Option<(usize, usize)> = None;
    for c in rd.constraints() {
        if let ReducedConstraint::FG(i, j) = *c {
            if 2 * ranks[i] + 1 == chr && best.map_or(true, |cur| (i, j) < cur) {
                best = Some((i, j));
            }
        }
    }
    let (i, j) = best.ok_or_else(|| Error::Internal {
        detail: String::from("chain rank attained by no constraint"),
    })?;
    let p = chain_to(rd, &ranks, i)?;
    let mut s: Vec<TermExpr> = p.iter().map(|&x| TermExpr::symbol(x)).collect();
    s.push(TermExpr::symbol(n + j));
    Ok((s.clone(), s))
}

/// The "capped" top sort `(g ∨ u) ∧ u^d` used whenever the core ends in a
/// self-dual sort.
fn cap_term(g: TermExpr, u: TermExpr) -> TermExpr {
    TermExpr::meet(TermExpr::join(g, u.clone()), TermExpr::dual(u))
}

/// The first monotone `f`-symbol, if any.
fn lowest_monotone_f(rd: &ReducedDescription) -> Option<usize> {
    rd.constraints()
        .iter()
        .filter_map(|c| match *c {
            ReducedConstraint::FF(i, j) if i == j => Some(i),
            _ => None,
        })
        .min()
}

/// The first monotone `g`-symbol, if any.
fn lowest_monotone_g(rd: &ReducedDescription) -> Option<usize> {
    rd.constraints()
        .iter()
        .filter_map(|c| match *c {
            ReducedConstraint::GG(j) => Some(j),
            _ => None,
        })
        .min()
}

/// The forward witness: one term per core sort, sending every member of the
/// description's clone into the canonical core.
///
/// In the finite cases the terms are the meets `s_i ∧ t_i` of the two chains
/// of [`claim_terms`], with the last sort replaced (odd chain rank) or
/// extended (even chain rank) by `(g₁ ∨ u) ∧ u^d`, `u = s_l ∧ t_l`, whenever
/// `g`-symbols are present.  In the monotone cases a single `f ∧ f^d` (for
/// `B_∞`), that meet plus its cap (for `C_∞`), or a monotone `g` alone (for
/// `D_∞`) suffices; without `f`-symbols the witness is `g₁` alone.
pub fn witness_forward(rd: &ReducedDescription) -> Result<Vec<TermExpr>> {
    rd.validate()?;
    let n = rd.f_count();
    let g1 = TermExpr::symbol(n);
    if rd.has_monotone() {
        if let Some(j) = lowest_monotone_g(rd) {
            return Ok(vec![TermExpr::symbol(n + j)]);
        }
        let i = lowest_monotone_f(rd).ok_or_else(|| Error::Internal {
            detail: String::from("monotone marker without a monotone symbol"),
        })?;
        let u = TermExpr::meet(TermExpr::symbol(i), TermExpr::dual(TermExpr::symbol(i)));
        if rd.g_count() == 0 {
            return Ok(vec![u]);
        }
        return Ok(vec![u.clone(), cap_term(g1, u)]);
    }
    let chr = rd.chain_rank()?;
    if chr == 0 {
        return Ok(vec![g1]);
    }
    let (s, t) = claim_terms(rd, chr)?;
    let l = s.len();
    let mut terms: Vec<TermExpr> = (0..l)
        .map(|i| TermExpr::meet(s[i].clone(), t[i].clone()))
        .collect();
    if rd.g_count() > 0 {
        let u = TermExpr::meet(s[l - 1].clone(), t[l - 1].clone());
        if chr % 2 == 1 {
            terms.pop();
        }
        terms.push(cap_term(g1, u));
    }
    Ok(terms)
}

/// The backward witness: for each symbol of the description, the core sort
/// it reads from and whether it takes the dual.
///
/// For a finite core with chain rank `r` and `l = ⌈r/2⌉`, a core member
/// `(h₁, …, h_k)` is padded to `h′ = (h₁, …, h_l, h_{r-l}^d, …, h₁^d)` and
/// each `f_i` reads `h′` at its rank, i.e. sort `rank-1` plain when
/// `rank ≤ l` and sort `r-rank` dualized otherwise; every `g`-symbol reads
/// the last (self-dual) sort.  In the monotone cases all symbols read the
/// single monotone sort, except that for `C_∞` the `g`-symbols read the
/// second (self-dual) sort.
pub fn witness_backward(rd: &ReducedDescription, core: &CoreId) -> Result<Vec<(usize, bool)>> {
    rd.validate()?;
    let expected = collapse_core(rd)?;
    if expected != *core {
        return Err(Error::InvalidCore {
            detail: "the core is not the collapse of the description",
        });
    }
    let n = rd.f_count();
    let m = rd.g_count();
    match core.kind() {
        CoreKind::Binf | CoreKind::Dinf => Ok(vec![(0, false); n + m]),
        CoreKind::Cinf => {
            let mut out = vec![(0, false); n];
            out.extend(core::iter::repeat((1, false)).take(m));
            Ok(out)
        }
        _ => {
            let chr = rd.chain_rank()?;
            let k = core.sort_count();
            if chr == 0 {
                return Ok(vec![(k - 1, false); m]);
            }
            let l = chr.div_ceil(2);
            let ranks = ranks_of(rd)?;
            let mut out = Vec::with_capacity(n + m);
            for &r in &ranks {
                out.push(if r <= l {
                    ((r - 1) as usize, false)
                } else {
                    ((chr - r) as usize, true)
                });
            }
            out.extend(core::iter::repeat((k - 1, false)).take(m));
            Ok(out)
        }
    }
}

/// Applies a forward witness to a clone member, producing its image in the
/// core.
pub fn apply_forward(terms: &[TermExpr], op: &MultiOp) -> Result<MultiOp> {
    let tables: Vec<TruthTable> = terms
        .iter()
        .map(|t| eval_term(t, op.tables()))
        .collect::<Result<_>>()?;
    MultiOp::new(op.arity(), tables)
}

/// Applies a backward witness to a core member, producing its image in the
/// clone (a table per description symbol).
pub fn apply_backward(assignment: &[(usize, bool)], member: &MultiOp) -> Result<MultiOp> {
    let tables: Vec<TruthTable> = assignment
        .iter()
        .map(|&(sort, dualed)| {
            let t = member
                .tables()
                .get(sort)
                .ok_or(Error::SortOutOfRange {
                    sort,
                    count: member.sorts(),
                })?;
            Ok(if dualed { t.dual() } else { *t })
        })
        .collect::<Result<_>>()?;
    MultiOp::new(member.arity(), tables)
}

/// Checks both witnesses by brute force: every clone member must map into
/// the core under the forward terms, and every core member must satisfy the
/// description under the backward assignment.
///
/// Full tables are checked at arities `1..=min(arity_cap, 4)` and the
/// symmetric slice at arity 5; `arity_cap` must lie in `2..=5`.  Both
/// enumerations charge the budget once per candidate.
pub fn verify_witnesses(
    rd: &ReducedDescription,
    core: &CoreId,
    forward: &[TermExpr],
    backward: &[(usize, bool)],
    arity_cap: u8,
    budget: &mut Budget,
) -> Result<()> {
    if !(2..=5).contains(&arity_cap) {
        return Err(Error::ArityOutOfRange {
            arity: arity_cap,
            max: 5,
        });
    }
    rd.validate()?;
    if forward.len() != core.sort_count() {
        return Err(Error::VerificationFailed {
            detail: String::from("forward witness length differs from the core sort count"),
        });
    }
    if backward.len() != rd.f_count() + rd.g_count() {
        return Err(Error::VerificationFailed {
            detail: String::from("backward witness length differs from the symbol count"),
        });
    }
    let desc = rd.to_description();
    let mut arities: Vec<u8> = (1..=arity_cap.min(4)).collect();
    arities.push(5);
    for &arity in &arities {
        rd.clo_for_each(arity, budget, &mut |op| {
            let image = apply_forward(forward, op)?;
            if !canon::membership(core, &image)? {
                return Err(Error::VerificationFailed {
                    detail: format!("forward image leaves {core} at arity {arity}"),
                });
            }
            Ok(())
        })?;
        canon::core_for_each(core, arity, budget, &mut |member| {
            let pulled = apply_backward(backward, member)?;
            if !desc.satisfied_by(&pulled)? {
                return Err(Error::VerificationFailed {
                    detail: format!(
                        "backward image violates the description at arity {arity}"
                    ),
                });
            }
            Ok(())
        })?;
    }
    Ok(())
}

/// A fully verified classification: the canonical core of a clone together
/// with the reduced description it went through, witness homomorphisms in
/// both directions, and a log of the pipeline stages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassificationReport {
    /// SHA-256 digest of a canonical encoding of the input.
    pub input_digest: String,
    /// The canonical core.
    pub core: CoreId,
    /// The reduced description of the clone; absent for the trivial
    /// zero-sorted clone.
    pub reduced: Option<ReducedDescription>,
    /// The forward witness terms in prefix notation, one per core sort.
    pub forward_terms: Vec<String>,
    /// The backward witness: per description symbol, the core sort it reads
    /// and whether it takes the dual.
    pub backward_map: Vec<(usize, bool)>,
    /// Whether both witnesses were verified; reports are only produced with
    /// this set, a failed verification surfaces as an error instead.
    pub verified: bool,
    /// Human-readable log of the pipeline stages.
    pub log: Vec<String>,
}

/// Hex SHA-256 of the canonical byte encoding of a structure; this is the
/// digest recorded by [`classify_relations`] in its report.
pub fn structure_digest(structure: &Structure) -> String {
    digest_hex(&encode_structure(structure))
}

/// Hex SHA-256 of a byte string.
fn digest_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(bytes);
    hex::encode(h.finalize())
}

fn push_u64(out: &mut Vec<u8>, v: u64) {
    out.extend_from_slice(&v.to_le_bytes());
}

/// Canonical byte encoding of a structure, for digesting.
fn encode_structure(s: &Structure) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(b"structure\x00");
    let k = s.signature.sorts();
    push_u64(&mut out, k as u64);
    for i in 0..k {
        let carrier = s.signature.carrier(i).expect("sort index in range");
        push_u64(&mut out, carrier.len() as u64);
        out.extend_from_slice(carrier);
    }
    push_u64(&mut out, s.relations.len() as u64);
    for rel in &s.relations {
        push_u64(&mut out, rel.typ.len() as u64);
        for &t in &rel.typ {
            push_u64(&mut out, t as u64);
        }
        push_u64(&mut out, rel.tuples.len() as u64);
        for tuple in &rel.tuples {
            out.extend_from_slice(tuple);
        }
    }
    out
}

/// Canonical byte encoding of a reduced description, for digesting.
fn encode_reduced(rd: &ReducedDescription) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(b"reduced\x00");
    push_u64(&mut out, rd.f_count() as u64);
    push_u64(&mut out, rd.g_count() as u64);
    push_u64(&mut out, rd.constraints().len() as u64);
    for c in rd.constraints() {
        match *c {
            ReducedConstraint::FF(i, j) => {
                out.push(0);
                push_u64(&mut out, i as u64);
                push_u64(&mut out, j as u64);
            }
            ReducedConstraint::FFD(i, j) => {
                out.push(1);
                push_u64(&mut out, i as u64);
                push_u64(&mut out, j as u64);
            }
            ReducedConstraint::FG(i, j) => {
                out.push(2);
                push_u64(&mut out, i as u64);
                push_u64(&mut out, j as u64);
            }
            ReducedConstraint::GG(j) => {
                out.push(3);
                push_u64(&mut out, j as u64);
            }
        }
    }
    out
}

/// The structure with all singleton unary relations adjoined; its full
/// polymorphism minion is the idempotent polymorphism minion of the input.
fn adjoin_singletons(structure: &Structure) -> Result<Structure> {
    let mut relations = structure.relations.clone();
    for s in 0..structure.signature.sorts() {
        for p in 0..structure.signature.size(s)? {
            let mut tuples = BTreeSet::new();
            tuples.insert(vec![p]);
            relations.push(TypedRelation::new(vec![s], tuples));
        }
    }
    Structure::new(structure.signature.clone(), relations)
}

/// Collapses a validated reduced description, computes and verifies both
/// witnesses and assembles the report.
fn finish_classification(
    input_digest: String,
    rd: ReducedDescription,
    arity_cap: u8,
    budget: &mut Budget,
    mut log: Vec<String>,
) -> Result<ClassificationReport> {
    rd.validate()?;
    log.push(format!(
        "reduced description: {} f-symbols, {} g-symbols, {} constraints",
        rd.f_count(),
        rd.g_count(),
        rd.constraints().len()
    ));
    let core = collapse_core(&rd)?;
    if !rd.has_monotone() {
        log.push(format!("chain rank {}", rd.chain_rank()?));
    }
    log.push(format!("canonical core: {core}"));
    let forward = witness_forward(&rd)?;
    let backward = witness_backward(&rd, &core)?;
    verify_witnesses(&rd, &core, &forward, &backward, arity_cap, budget)?;
    log.push(format!(
        "witnesses verified at arities 1..={} and at the symmetric slice of arity 5",
        arity_cap.min(4)
    ));
    let forward_terms = forward
        .iter()
        .map(|t| t.to_prefix_string(rd.f_count()))
        .collect();
    Ok(ClassificationReport {
        input_digest,
        core,
        reduced: Some(rd),
        forward_terms,
        backward_map: backward,
        verified: true,
        log,
    })
}

/// Classifies the idempotent polymorphism minion of a structure of at most
/// binary relations between Boolean sorts.
///
/// The pipeline: adjoin singleton unary relations (so that the idempotent
/// polymorphisms are all the polymorphisms), take the idempotent core,
/// short-circuit to the zero-sorted clone `T` when everything collapses,
/// otherwise extract the description, reduce it, collapse onto the canonical
/// core and verify both witnesses.  `arity_cap` bounds the verification
/// arity (`2..=5`, full tables capped at 4 plus the symmetric slice of 5).
pub fn classify_relations(
    structure: &Structure,
    arity_cap: u8,
    budget: &mut Budget,
) -> Result<ClassificationReport> {
    if !(2..=5).contains(&arity_cap) {
        return Err(Error::ArityOutOfRange {
            arity: arity_cap,
            max: 5,
        });
    }
    structure.validate()?;
    let input_digest = digest_hex(&encode_structure(structure));
    let mut log = vec![format!(
        "input: {} sorts, {} relations",
        structure.signature.sorts(),
        structure.relations.len()
    )];
    let expanded = adjoin_singletons(structure)?;
    match idempotent_core(&expanded, budget)? {
        CoreOutcome::Trivial => {
            log.push(String::from(
                "trivial idempotent core: the clone is the zero-sorted clone",
            ));
            Ok(ClassificationReport {
                input_digest,
                core: CoreId::t(),
                reduced: None,
                forward_terms: Vec::new(),
                backward_map: Vec::new(),
                verified: true,
                log,
            })
        }
        CoreOutcome::Core(core_data) => {
            log.push(format!(
                "idempotent core keeps {} sorts",
                core_data.kept_sorts.len()
            ));
            let desc = extract_description(&core_data.structure)?;
            log.push(format!(
                "extracted description: {} symbols, {} constraints",
                desc.symbol_count(),
                desc.constraints().len()
            ));
            let (rd, _symbols) = to_reduced(&desc)?;
            finish_classification(input_digest, rd, arity_cap, budget, log)
        }
    }
}

/// Classifies the clone of a reduced description directly.
pub fn classify_reduced(
    rd: &ReducedDescription,
    arity_cap: u8,
    budget: &mut Budget,
) -> Result<ClassificationReport> {
    if !(2..=5).contains(&arity_cap) {
        return Err(Error::ArityOutOfRange {
            arity: arity_cap,
            max: 5,
        });
    }
    rd.validate()?;
    let input_digest = digest_hex(&encode_reduced(rd));
    let log = vec![format!(
        "input: reduced description with {} f-symbols, {} g-symbols",
        rd.f_count(),
        rd.g_count()
    )];
    finish_classification(input_digest, rd.clone(), arity_cap, budget, log)
}
