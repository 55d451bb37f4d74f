// SPDX-License-Identifier: MIT OR Apache-2.0
//! Finite-domain structures with small projections, translated into Boolean
//! multisorted structures.
//!
//! A relation has *small projections* when each of its coordinate
//! projections — the set of values its tuples take at one coordinate — has
//! at most two elements.  For a one-sorted structure all of whose relations
//! are of this kind, the idempotent polymorphism clone is captured by a
//! Boolean multisorted structure: every two-element projection set becomes a
//! sort with its elements renamed to 0 and 1, each relation is re-typed over
//! the sorts of its coordinates (coordinates pinned to a single value are
//! dropped), and all singleton unary relations are adjoined.  Restricting a
//! polymorphism sortwise then gives a minion homomorphism onto the
//! polymorphisms of the translation, and a point map on the part of arity
//! equal to the domain size supplies one in the other direction, so
//! classification transfers in both directions.
//!
//! The entry point [`classify_finite`] runs a finite-domain structure
//! through the idempotent core, the translation, and the Boolean
//! classification pipeline, and then double-checks the sortwise restriction
//! pointwise on the binary polymorphisms when the enumeration fits the
//! budget.  [`inverse_construction`] realizes any Boolean multisorted
//! structure on the disjoint union of its sorts, inverting the translation
//! up to the adjoined singletons.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::boolfun::{TruthTable, MAX_ARITY};
use crate::canon::CoreId;
use crate::classify::{classify_relations, structure_digest, ClassificationReport};
use crate::error::{Budget, Error, Result};
use crate::multisorted::{
    idempotent_core, preserves_all, CoreOutcome, FiniteOp, GeneralOp, MultiOp, SortedSignature,
    Structure, TypedRelation,
};

/// The per-coordinate projection sets of a relation's tuple set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionProfile {
    sets: Vec<BTreeSet<u8>>,
}

impl ProjectionProfile {
    /// Computes the coordinate projections of a relation.
    pub fn of(relation: &TypedRelation) -> Self {
        let mut sets = vec![BTreeSet::new(); relation.arity()];
        for t in &relation.tuples {
            for (c, &v) in t.iter().enumerate() {
                sets[c].insert(v);
            }
        }
        ProjectionProfile { sets }
    }

    /// The projection sets, one per coordinate.
    pub fn sets(&self) -> &[BTreeSet<u8>] {
        &self.sets
    }

    /// Whether every projection has at most two elements.  An empty
    /// relation has empty projections and counts as small.
    pub fn is_small(&self) -> bool {
        self.sets.iter().all(|s| s.len() <= 2)
    }
}

/// Whether every relation of the structure has small projections.
pub fn small_projections_check(structure: &Structure) -> bool {
    structure
        .relations
        .iter()
        .all(|r| ProjectionProfile::of(r).is_small())
}

/// The result of translating a one-sorted structure with small projections
/// into a Boolean multisorted structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translation {
    /// The translated structure: one Boolean sort per two-element
    /// projection set, each relation re-typed over the sorts of its
    /// surviving coordinates, all singleton unary relations adjoined.
    pub structure: Structure,
    /// For each sort, the two original carrier *labels* renamed to 0 and 1,
    /// in ascending order.
    pub sort_dictionary: Vec<[u8; 2]>,
    /// For each sort, the two carrier *positions* renamed to 0 and 1; these
    /// are what relation tuples and operation tables address.  Positions
    /// and labels coincide when the carrier is `0..size`.
    pub sort_positions: Vec<[u8; 2]>,
}

/// Translates a one-sorted structure whose relations all have small
/// projections into a Boolean multisorted structure with the same
/// idempotent polymorphism clone.
///
/// Every two-element projection set becomes one sort (sorts are ordered by
/// their element pairs); coordinates whose projection is a single value are
/// dropped, and a relation whose coordinates are all dropped is a single
/// tuple, vacuous for idempotent operations, and is omitted.  All singleton
/// unary relations are adjoined at the end.  Empty relations and
/// projections of more than two elements are rejected.
pub fn translate_small_projections(structure: &Structure) -> Result<Translation> {
    structure.validate()?;
    if structure.signature.sorts() != 1 {
        return Err(Error::SortOutOfRange {
            sort: structure.signature.sorts(),
            count: 1,
        });
    }
    let labels = structure.signature.carrier(0)?;

    // Profile every relation, collecting the two-element projection sets
    // and rejecting anything larger.
    let mut profiles = Vec::with_capacity(structure.relations.len());
    let mut sort_set: BTreeSet<(u8, u8)> = BTreeSet::new();
    for (ri, rel) in structure.relations.iter().enumerate() {
        if rel.tuples.is_empty() {
            return Err(Error::EmptyRelation);
        }
        let profile = ProjectionProfile::of(rel);
        for (ci, p) in profile.sets().iter().enumerate() {
            match p.len() {
                0 | 1 => {}
                2 => {
                    let mut it = p.iter();
                    let a = *it.next().expect("two elements");
                    let b = *it.next().expect("two elements");
                    sort_set.insert((a, b));
                }
                _ => {
                    return Err(Error::LargeProjection {
                        relation: ri,
                        coordinate: ci,
                    })
                }
            }
        }
        profiles.push(profile);
    }
    let sort_positions: Vec<[u8; 2]> = sort_set.iter().map(|&(a, b)| [a, b]).collect();
    let sort_dictionary: Vec<[u8; 2]> = sort_positions
        .iter()
        .map(|p| [labels[p[0] as usize], labels[p[1] as usize]])
        .collect();
    let sort_index: BTreeMap<(u8, u8), usize> = sort_set
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect();

    // Re-type the relations over the surviving coordinates.
    let mut relations: Vec<TypedRelation> = Vec::new();
    for (rel, profile) in structure.relations.iter().zip(&profiles) {
        let keep: Vec<usize> = (0..rel.arity())
            .filter(|&c| profile.sets()[c].len() == 2)
            .collect();
        if keep.is_empty() {
            continue;
        }
        let mut typ = Vec::with_capacity(keep.len());
        let mut pairs = Vec::with_capacity(keep.len());
        for &c in &keep {
            let mut it = profile.sets()[c].iter();
            let a = *it.next().expect("two elements");
            let b = *it.next().expect("two elements");
            typ.push(sort_index[&(a, b)]);
            pairs.push([a, b]);
        }
        let mut tuples = BTreeSet::new();
        for t in &rel.tuples {
            let renamed: Vec<u8> = keep
                .iter()
                .zip(&pairs)
                .map(|(&c, pair)| u8::from(t[c] == pair[1]))
                .collect();
            tuples.insert(renamed);
        }
        relations.push(TypedRelation::new(typ, tuples));
    }
    for s in 0..sort_positions.len() {
        for v in 0..2u8 {
            relations.push(TypedRelation::new(vec![s], BTreeSet::from([vec![v]])));
        }
    }
    Ok(Translation {
        structure: Structure::new(SortedSignature::boolean(sort_positions.len()), relations)?,
        sort_dictionary,
        sort_positions,
    })
}

/// Restricts an operation on a finite domain to the given two-element
/// subsets, renaming each onto `{0,1}`.
///
/// `sorts` lists pairs of domain values in ascending order.  The operation
/// must map every tuple over `sorts[s]` back into `sorts[s]`; the result is
/// the multisorted Boolean operation whose sort-`s` table is the renamed
/// restriction.  An operation escaping one of the subsets is a
/// verification failure.
pub fn restrict_polymorphism(f: &FiniteOp, sorts: &[[u8; 2]]) -> Result<MultiOp> {
    let n = f.arity();
    if n == 0 || n > MAX_ARITY {
        return Err(Error::ArityOutOfRange {
            arity: n,
            max: MAX_ARITY,
        });
    }
    let mut tables = Vec::with_capacity(sorts.len());
    for pair in sorts {
        if pair[0] >= f.dom() || pair[1] >= f.dom() || pair[0] >= pair[1] {
            return Err(Error::IndexOutOfRange {
                index: pair[1] as usize,
                len: f.dom() as usize,
            });
        }
        let mut bits = 0u64;
        let mut args = vec![0u8; n as usize];
        for index in 0..(1usize << n) {
            for (j, a) in args.iter_mut().enumerate() {
                *a = pair[(index >> j) & 1];
            }
            let v = f.apply(&args)?;
            if v == pair[1] {
                bits |= 1 << index;
            } else if v != pair[0] {
                return Err(Error::VerificationFailed {
                    detail: format!(
                        "the operation leaves the two-element set {{{}, {}}}",
                        pair[0], pair[1]
                    ),
                });
            }
        }
        tables.push(TruthTable::new(n, bits)?);
    }
    MultiOp::new(n, tables)
}

/// The coordinates an operation actually depends on, in ascending order.
///
/// A coordinate is essential when changing only it can change the value.
/// Projections have exactly one essential coordinate, constants none, and
/// taking a minor can only move essential coordinates along the minor map.
pub fn essential_coordinates(g: &FiniteOp) -> Vec<u8> {
    let n = g.arity() as usize;
    let dom = g.dom();
    let values = g.values();
    let mut out = Vec::new();
    for i in 0..n {
        let mut args = vec![0u8; n];
        'search: loop {
            let base = values[FiniteOp::index_of(dom, &args)];
            for b in 1..dom {
                let mut probe = args.clone();
                probe[i] = b;
                if values[FiniteOp::index_of(dom, &probe)] != base {
                    out.push(i as u8);
                    break 'search;
                }
            }
            // Advance the other coordinates; coordinate i stays at 0.
            let mut pos = 0;
            loop {
                if pos == n {
                    break 'search;
                }
                if pos == i {
                    pos += 1;
                    continue;
                }
                args[pos] += 1;
                if args[pos] < dom {
                    break;
                }
                args[pos] = 0;
                pos += 1;
            }
        }
    }
    out
}

/// A classification report for a finite-domain structure: the Boolean
/// report plus the sort dictionary of the translation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FiniteClassification {
    /// The underlying report; its digest identifies the finite input.
    #[serde(flatten)]
    pub report: ClassificationReport,
    /// For each translated sort, the two original domain labels that were
    /// renamed to 0 and 1.
    pub sort_dictionary: Vec<[u8; 2]>,
}

/// Classifies the polymorphism clone of a one-sorted finite-domain
/// structure whose relations have small projections.
///
/// The pipeline: drop empty (vacuous) relations, reject large projections,
/// take the idempotent core, translate the core into a Boolean multisorted
/// structure and classify that.  When no two-element projection survives,
/// the core's relations are single tuples, its idempotent polymorphisms are
/// all idempotent operations, and the clone is that of one unconstrained
/// Boolean sort.  As an extra check, the sortwise restriction is verified
/// pointwise on the binary polymorphisms of the core whenever enumerating
/// all binary tables fits the remaining budget.
pub fn classify_finite(
    structure: &Structure,
    arity_cap: u8,
    budget: &mut Budget,
) -> Result<FiniteClassification> {
    if !(2..=5).contains(&arity_cap) {
        return Err(Error::ArityOutOfRange {
            arity: arity_cap,
            max: 5,
        });
    }
    structure.validate()?;
    if structure.signature.sorts() != 1 {
        return Err(Error::SortOutOfRange {
            sort: structure.signature.sorts(),
            count: 1,
        });
    }
    let input_digest = structure_digest(structure);
    let mut log = vec![format!(
        "finite domain: {} elements, {} relations",
        structure.signature.size(0)?,
        structure.relations.len()
    )];
    for (ri, rel) in structure.relations.iter().enumerate() {
        for (ci, p) in ProjectionProfile::of(rel).sets().iter().enumerate() {
            if p.len() > 2 {
                return Err(Error::LargeProjection {
                    relation: ri,
                    coordinate: ci,
                });
            }
        }
    }
    let kept: Vec<TypedRelation> = structure
        .relations
        .iter()
        .filter(|r| !r.tuples.is_empty())
        .cloned()
        .collect();
    if kept.len() < structure.relations.len() {
        log.push(format!(
            "dropped {} empty (vacuous) relations",
            structure.relations.len() - kept.len()
        ));
    }
    let cleaned = Structure::new(structure.signature.clone(), kept)?;

    let core = match idempotent_core(&cleaned, budget)? {
        CoreOutcome::Trivial => {
            log.push(String::from(
                "the idempotent core is a point: the clone is the zero-sorted clone",
            ));
            return Ok(FiniteClassification {
                report: ClassificationReport {
                    input_digest,
                    core: CoreId::t(),
                    reduced: None,
                    forward_terms: Vec::new(),
                    backward_map: Vec::new(),
                    verified: true,
                    log,
                },
                sort_dictionary: Vec::new(),
            });
        }
        CoreOutcome::Core(core) => core,
    };
    log.push(format!(
        "idempotent core keeps {} elements",
        core.structure.signature.size(0)?
    ));

    let translation = translate_small_projections(&core.structure)?;
    let sorts = translation.structure.signature.sorts();
    let (boolean_structure, sort_dictionary) = if sorts == 0 {
        // Single-tuple relations only: they pin their elements pointwise
        // and constrain idempotent operations in no other way, so the
        // clone is free on one Boolean sort.
        log.push(String::from(
            "translation: no two-element projections; the clone is free on one sort",
        ));
        (
            Structure::new(SortedSignature::boolean(1), Vec::new())?,
            Vec::new(),
        )
    } else {
        log.push(format!("translation: {sorts} Boolean sorts"));
        (
            translation.structure.clone(),
            translation.sort_dictionary.clone(),
        )
    };

    let mut report = classify_relations(&boolean_structure, arity_cap, budget)?;
    report.input_digest = input_digest;
    log.append(&mut report.log);
    report.log = log;

    if sorts > 0 {
        let dom = core.structure.signature.size(0)?;
        let exponent = u32::from(dom) * u32::from(dom);
        let total = u128::from(dom).checked_pow(exponent);
        let remaining = u128::from(budget.limit().saturating_sub(budget.used()));
        match total {
            Some(t) if t <= remaining => {
                let checked = verify_restriction(&core.structure, &translation, budget)?;
                report.log.push(format!(
                    "restriction homomorphism verified pointwise on {checked} binary polymorphisms"
                ));
            }
            _ => {
                report.log.push(String::from(
                    "restriction homomorphism not enumerated: binary table count exceeds the budget",
                ));
            }
        }
    }
    Ok(FiniteClassification {
        report,
        sort_dictionary,
    })
}

/// Enumerates every binary operation on the core domain, filters the
/// polymorphisms, and checks that each restricts to a polymorphism of the
/// translated structure.  Returns the number of polymorphisms checked.
fn verify_restriction(
    core: &Structure,
    translation: &Translation,
    budget: &mut Budget,
) -> Result<usize> {
    let dom = core.signature.size(0)?;
    let table = (dom as usize).pow(2);
    let mut values = vec![0u8; table];
    let mut count = 0usize;
    loop {
        budget.charge(1)?;
        let f = FiniteOp::new(dom, 2, values.clone())?;
        let g = GeneralOp::new(2, vec![f.clone()])?;
        if preserves_all(&g, core)? {
            let restricted = restrict_polymorphism(&f, &translation.sort_positions)?;
            let image = GeneralOp::new(
                2,
                restricted
                    .tables()
                    .iter()
                    .map(FiniteOp::from_truth_table)
                    .collect(),
            )?;
            if !preserves_all(&image, &translation.structure)? {
                return Err(Error::VerificationFailed {
                    detail: String::from(
                        "a binary polymorphism does not restrict to the translated structure",
                    ),
                });
            }
            count += 1;
        }
        let mut pos = 0;
        loop {
            if pos == table {
                return Ok(count);
            }
            values[pos] += 1;
            if values[pos] < dom {
                break;
            }
            values[pos] = 0;
            pos += 1;
        }
    }
}

/// Realizes a Boolean multisorted structure on the disjoint union of its
/// sorts: sort `s` contributes the elements `2s` and `2s + 1`, relations
/// keep their tuples under that re-labeling, and all singleton unary
/// relations are adjoined so that no element can collapse.  Translating the
/// result back recovers the input relations, with the singletons turning
/// into the ones the translation adjoins itself.
pub fn inverse_construction(structure: &Structure) -> Result<Structure> {
    structure.validate()?;
    let k = structure.signature.sorts();
    for s in 0..k {
        if structure.signature.size(s)? != 2 {
            return Err(Error::NonBooleanSort { sort: s });
        }
    }
    if k > 127 {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: 127,
        });
    }
    let size = if k == 0 { 1u8 } else { 2 * k as u8 };
    let mut relations: Vec<TypedRelation> = Vec::new();
    for rel in &structure.relations {
        let typ = vec![0usize; rel.arity()];
        let mut tuples = BTreeSet::new();
        for t in &rel.tuples {
            let relabeled: Vec<u8> = t
                .iter()
                .zip(&rel.typ)
                .map(|(&v, &s)| 2 * s as u8 + v)
                .collect();
            tuples.insert(relabeled);
        }
        relations.push(TypedRelation::new(typ, tuples));
    }
    for c in 0..size {
        relations.push(TypedRelation::new(vec![0], BTreeSet::from([vec![c]])));
    }
    Structure::new(SortedSignature::new(vec![(0..size).collect()])?, relations)
}
