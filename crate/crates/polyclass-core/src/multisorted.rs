// SPDX-License-Identifier: MIT OR Apache-2.0

//! Multisorted operations, typed relations, and polymorphisms.
//!
//! A *k-sorted* operation of arity `n` is a tuple `(f_1, …, f_k)` of `n`-ary
//! operations, one per sort, acting coordinatewise; minors are taken
//! componentwise.  Two representations coexist here:
//!
//! * [`MultiOp`] — the Boolean fast path: one [`TruthTable`] per sort.  All
//!   of the classification machinery (descriptions, canonical cores,
//!   truncated minions) runs on this type.
//! * [`GeneralOp`] — tuples of [`FiniteOp`]s over arbitrary finite carriers,
//!   used by polymorphism enumeration over general structures and by the
//!   finite-domain translation.
//!
//! A [`TypedRelation`] is a relation between (at most two, for this crate's
//! purposes; arbitrary arities are supported by the checker) sorts of a
//! [`SortedSignature`]; a [`Structure`] bundles a signature with its
//! relations.  [`pol_enumerate`] lists the (idempotent) polymorphisms of a
//! structure by backtracking over sorts with relation pruning, and
//! [`idempotent_core`] computes the retract of a structure under a
//! minimal-image unary polymorphism, adjoining singleton unary relations and
//! deleting one-element sorts.  These are the brute-force counterparts of
//! the syntactic pipeline in [`crate::descriptions`].
//!
//! Tuples and operation tables index carriers by *position* (`0..size`); any
//! translation between positions and user-facing element labels happens at
//! the serialization boundary.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::boolfun::TruthTable;
use crate::error::{Budget, Error, Result};

/// Maximum arity supported for general finite operations (the Boolean fast
/// path allows up to [`crate::boolfun::MAX_ARITY`]).
pub const MAX_GENERAL_ARITY: u8 = 6;

/// A signature: one finite carrier per sort, given by element labels.
///
/// Labels are arbitrary `u8`s (strictly increasing within a carrier);
/// operations and relation tuples refer to *positions* in the carrier, not
/// labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortedSignature {
    carriers: Vec<Vec<u8>>,
}

impl SortedSignature {
    /// Builds a signature from per-sort label lists.
    ///
    /// Every carrier must be nonempty with strictly increasing labels.
    pub fn new(carriers: Vec<Vec<u8>>) -> Result<Self> {
        for (s, c) in carriers.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::SortOutOfRange {
                    sort: s,
                    count: carriers.len(),
                });
            }
            if c.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::UnsupportedRelation {
                    detail: "carrier labels must be strictly increasing",
                });
            }
        }
        Ok(SortedSignature { carriers })
    }

    /// The `k`-sorted Boolean signature: every carrier is `{0, 1}`.
    pub fn boolean(k: usize) -> Self {
        SortedSignature {
            carriers: vec![vec![0, 1]; k],
        }
    }

    /// Number of sorts.
    pub fn sorts(&self) -> usize {
        self.carriers.len()
    }

    /// Labels of sort `s`.
    pub fn carrier(&self, s: usize) -> Result<&[u8]> {
        self.carriers.get(s).map(|c| c.as_slice()).ok_or(Error::SortOutOfRange {
            sort: s,
            count: self.carriers.len(),
        })
    }

    /// Size of the carrier of sort `s`.
    pub fn size(&self, s: usize) -> Result<u8> {
        Ok(self.carrier(s)?.len() as u8)
    }

    /// Whether every sort is two-element.
    pub fn is_boolean(&self) -> bool {
        self.carriers.iter().all(|c| c.len() == 2)
    }
}

/// An operation `f : [dom]^arity -> [dom]` on a single finite carrier,
/// stored as its value table in mixed-radix little-endian order: the table
/// index of arguments `(a_1, …, a_n)` is `Σ a_j · dom^(j-1)`, so coordinate
/// `0` toggles fastest (matching the Boolean bit layout).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FiniteOp {
    dom: u8,
    arity: u8,
    values: Vec<u8>,
}

impl core::fmt::Debug for FiniteOp {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "FiniteOp(dom {}, arity {}, {:?})", self.dom, self.arity, self.values)
    }
}

/// Number of table entries of a `dom`-valued operation of arity `n`.
pub fn table_size(dom: u8, arity: u8) -> usize {
    (dom as usize).pow(arity as u32)
}

impl FiniteOp {
    /// Creates an operation from its value table.
    pub fn new(dom: u8, arity: u8, values: Vec<u8>) -> Result<Self> {
        if dom == 0 {
            return Err(Error::UnsupportedRelation {
                detail: "empty carrier",
            });
        }
        if arity == 0 || arity > MAX_GENERAL_ARITY {
            return Err(Error::ArityOutOfRange {
                arity,
                max: MAX_GENERAL_ARITY,
            });
        }
        if values.len() != table_size(dom, arity) {
            return Err(Error::IndexOutOfRange {
                index: values.len(),
                len: table_size(dom, arity),
            });
        }
        if let Some(&v) = values.iter().find(|&&v| v >= dom) {
            return Err(Error::IndexOutOfRange {
                index: v as usize,
                len: dom as usize,
            });
        }
        Ok(FiniteOp { dom, arity, values })
    }

    /// The projection onto coordinate `coord`.
    pub fn projection(dom: u8, arity: u8, coord: u8) -> Result<Self> {
        if coord >= arity {
            return Err(Error::IndexOutOfRange {
                index: coord as usize,
                len: arity as usize,
            });
        }
        let n = table_size(dom, arity);
        let mut values = Vec::with_capacity(n);
        let stride = (dom as usize).pow(coord as u32);
        for idx in 0..n {
            values.push(((idx / stride) % dom as usize) as u8);
        }
        FiniteOp::new(dom, arity, values)
    }

    /// Carrier size.
    pub fn dom(&self) -> u8 {
        self.dom
    }

    /// Arity.
    pub fn arity(&self) -> u8 {
        self.arity
    }

    /// The raw value table.
    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Table index of an argument tuple.
    pub fn index_of(dom: u8, args: &[u8]) -> usize {
        let mut idx = 0usize;
        for &a in args.iter().rev() {
            idx = idx * dom as usize + a as usize;
        }
        idx
    }

    /// Applies the operation to an argument tuple.
    pub fn apply(&self, args: &[u8]) -> Result<u8> {
        if args.len() != self.arity as usize {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: args.len() as u8,
            });
        }
        if args.iter().any(|&a| a >= self.dom) {
            return Err(Error::IndexOutOfRange {
                index: *args.iter().max().unwrap() as usize,
                len: self.dom as usize,
            });
        }
        Ok(self.values[Self::index_of(self.dom, args)])
    }

    /// Whether `f(a, …, a) = a` for every carrier element.
    pub fn is_idempotent(&self) -> bool {
        let mut diag = vec![0u8; self.arity as usize];
        (0..self.dom).all(|a| {
            diag.iter_mut().for_each(|d| *d = a);
            self.values[Self::index_of(self.dom, &diag)] == a
        })
    }

    /// The minor `f^{(α)}` of arity `m`, `alpha[j]` naming the target
    /// coordinate substituted for coordinate `j`.
    pub fn minor(&self, alpha: &[u8], m: u8) -> Result<Self> {
        if alpha.len() != self.arity as usize {
            return Err(Error::InvalidMinorMap {
                detail: "minor map length differs from arity",
            });
        }
        if m == 0 || m > MAX_GENERAL_ARITY {
            return Err(Error::ArityOutOfRange {
                arity: m,
                max: MAX_GENERAL_ARITY,
            });
        }
        if alpha.iter().any(|&a| a >= m) {
            return Err(Error::InvalidMinorMap {
                detail: "minor map names a coordinate outside the target arity",
            });
        }
        let n = table_size(self.dom, m);
        let mut values = Vec::with_capacity(n);
        let mut args = vec![0u8; m as usize];
        let mut src = vec![0u8; self.arity as usize];
        for idx in 0..n {
            decode_tuple(self.dom, idx, &mut args);
            for (j, &aj) in alpha.iter().enumerate() {
                src[j] = args[aj as usize];
            }
            values.push(self.values[Self::index_of(self.dom, &src)]);
        }
        FiniteOp::new(self.dom, m, values)
    }

    /// Postcomposition with a unary map: `(u ∘ self)(args) = u(self(args))`.
    pub fn postcompose(&self, u: &Self) -> Result<Self> {
        if u.arity != 1 || u.dom != self.dom {
            return Err(Error::ArityMismatch {
                left: u.arity,
                right: 1,
            });
        }
        let values = self.values.iter().map(|&v| u.values[v as usize]).collect();
        FiniteOp::new(self.dom, self.arity, values)
    }

    /// Composition of unary operations: `(self ∘ other)(x) = self(other(x))`.
    pub fn compose_unary(&self, other: &Self) -> Result<Self> {
        if self.arity != 1 || other.arity != 1 {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: other.arity,
            });
        }
        if self.dom != other.dom {
            return Err(Error::ArityMismatch {
                left: self.dom,
                right: other.dom,
            });
        }
        let values = other.values.iter().map(|&v| self.values[v as usize]).collect();
        FiniteOp::new(self.dom, 1, values)
    }

    /// The set of values attained.
    pub fn image(&self) -> BTreeSet<u8> {
        self.values.iter().copied().collect()
    }

    /// Converts a two-element-domain operation to a truth table.
    pub fn to_truth_table(&self) -> Result<TruthTable> {
        if self.dom != 2 {
            return Err(Error::NonBooleanSort { sort: 0 });
        }
        let mut bits = 0u64;
        for (i, &v) in self.values.iter().enumerate() {
            if v == 1 {
                bits |= 1u64 << i;
            }
        }
        TruthTable::new(self.arity, bits)
    }

    /// Converts a truth table to a two-element-domain operation.
    pub fn from_truth_table(t: &TruthTable) -> Self {
        let len = t.len();
        let mut values = Vec::with_capacity(len as usize);
        for i in 0..len {
            values.push(t.value(i).unwrap() as u8);
        }
        FiniteOp {
            dom: 2,
            arity: t.arity(),
            values,
        }
    }
}

/// Writes the mixed-radix digits of `idx` (little-endian) into `out`.
pub(crate) fn decode_tuple(dom: u8, idx: usize, out: &mut [u8]) {
    let mut rest = idx;
    for o in out.iter_mut() {
        *o = (rest % dom as usize) as u8;
        rest /= dom as usize;
    }
}

/// A multisorted operation over arbitrary finite carriers: one [`FiniteOp`]
/// per sort, all of the same arity.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GeneralOp {
    arity: u8,
    components: Vec<FiniteOp>,
}

impl GeneralOp {
    /// Builds a multisorted operation from components of equal arity.
    pub fn new(arity: u8, components: Vec<FiniteOp>) -> Result<Self> {
        if let Some(c) = components.iter().find(|c| c.arity != arity) {
            return Err(Error::ArityMismatch {
                left: arity,
                right: c.arity,
            });
        }
        Ok(GeneralOp { arity, components })
    }

    /// Arity.
    pub fn arity(&self) -> u8 {
        self.arity
    }

    /// The per-sort components.
    pub fn components(&self) -> &[FiniteOp] {
        &self.components
    }

    /// Componentwise minor.
    pub fn minor(&self, alpha: &[u8], m: u8) -> Result<Self> {
        let components = self
            .components
            .iter()
            .map(|c| c.minor(alpha, m))
            .collect::<Result<Vec<_>>>()?;
        GeneralOp::new(m, components)
    }

    /// Whether every component is idempotent.
    pub fn is_idempotent(&self) -> bool {
        self.components.iter().all(FiniteOp::is_idempotent)
    }

    /// Componentwise composition of unary multisorted operations.
    pub fn compose_unary(&self, other: &Self) -> Result<Self> {
        if self.components.len() != other.components.len() {
            return Err(Error::SortOutOfRange {
                sort: other.components.len(),
                count: self.components.len(),
            });
        }
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.compose_unary(b))
            .collect::<Result<Vec<_>>>()?;
        GeneralOp::new(1, components)
    }

    /// Converts to the Boolean fast path; all carriers must be two-element.
    pub fn to_multi_op(&self) -> Result<MultiOp> {
        let tables = self
            .components
            .iter()
            .map(FiniteOp::to_truth_table)
            .collect::<Result<Vec<_>>>()?;
        MultiOp::new(self.arity, tables)
    }
}

/// A multisorted Boolean operation: one truth table per sort.
///
/// The empty tuple (zero sorts) is allowed — it is the unique member of each
/// arity of the trivial zero-sorted clone — which is why the arity is stored
/// explicitly.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiOp {
    arity: u8,
    tables: Vec<TruthTable>,
}

impl core::fmt::Debug for MultiOp {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "MultiOp({}, [", self.arity)?;
        for (i, t) in self.tables.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", t.to_hex())?;
        }
        write!(f, "])")
    }
}

impl MultiOp {
    /// Builds a multisorted Boolean operation from per-sort tables of equal
    /// arity.
    pub fn new(arity: u8, tables: Vec<TruthTable>) -> Result<Self> {
        if let Some(t) = tables.iter().find(|t| t.arity() != arity) {
            return Err(Error::ArityMismatch {
                left: arity,
                right: t.arity(),
            });
        }
        Ok(MultiOp { arity, tables })
    }

    /// The `k`-sorted projection onto coordinate `coord`.
    pub fn projection(k: usize, arity: u8, coord: u8) -> Result<Self> {
        let t = TruthTable::projection(arity, coord)?;
        Ok(MultiOp {
            arity,
            tables: vec![t; k],
        })
    }

    /// Arity.
    pub fn arity(&self) -> u8 {
        self.arity
    }

    /// Number of sorts.
    pub fn sorts(&self) -> usize {
        self.tables.len()
    }

    /// The per-sort truth tables.
    pub fn tables(&self) -> &[TruthTable] {
        &self.tables
    }

    /// Componentwise minor.
    pub fn minor(&self, alpha: &[u8], m: u8) -> Result<Self> {
        let tables = self
            .tables
            .iter()
            .map(|t| t.minor(alpha, m))
            .collect::<Result<Vec<_>>>()?;
        MultiOp::new(m, tables)
    }

    /// Whether every component is idempotent.
    pub fn is_idempotent(&self) -> bool {
        self.tables.iter().all(TruthTable::is_idempotent)
    }

    /// Converts to the general representation.
    pub fn to_general(&self) -> GeneralOp {
        GeneralOp {
            arity: self.arity,
            components: self.tables.iter().map(FiniteOp::from_truth_table).collect(),
        }
    }
}

/// A relation between sorts of a signature: a type (the list of sorts of its
/// coordinates) and a set of tuples of carrier positions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypedRelation {
    /// Sort of each coordinate.
    pub typ: Vec<usize>,
    /// The tuples, as carrier positions.
    pub tuples: BTreeSet<Vec<u8>>,
}

impl TypedRelation {
    /// Builds a typed relation.
    pub fn new(typ: Vec<usize>, tuples: BTreeSet<Vec<u8>>) -> Self {
        TypedRelation { typ, tuples }
    }

    /// Arity of the relation.
    pub fn arity(&self) -> usize {
        self.typ.len()
    }
}

/// A relational structure: a signature plus typed relations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure {
    /// The signature.
    pub signature: SortedSignature,
    /// The relations.
    pub relations: Vec<TypedRelation>,
}

impl Structure {
    /// Builds and validates a structure.
    pub fn new(signature: SortedSignature, relations: Vec<TypedRelation>) -> Result<Self> {
        let s = Structure {
            signature,
            relations,
        };
        s.validate()?;
        Ok(s)
    }

    /// Checks sort indices, tuple arities and carrier positions.
    pub fn validate(&self) -> Result<()> {
        for rel in &self.relations {
            for &s in &rel.typ {
                if s >= self.signature.sorts() {
                    return Err(Error::SortOutOfRange {
                        sort: s,
                        count: self.signature.sorts(),
                    });
                }
            }
            for t in &rel.tuples {
                if t.len() != rel.typ.len() {
                    return Err(Error::ArityMismatch {
                        left: rel.typ.len() as u8,
                        right: t.len() as u8,
                    });
                }
                for (p, &v) in t.iter().enumerate() {
                    let size = self.signature.size(rel.typ[p])?;
                    if v >= size {
                        return Err(Error::IndexOutOfRange {
                            index: v as usize,
                            len: size as usize,
                        });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Whether a multisorted operation preserves a typed relation: applying the
/// components coordinatewise to any `arity`-many tuples of the relation
/// yields a tuple of the relation.
pub fn preserves(op: &GeneralOp, rel: &TypedRelation) -> Result<bool> {
    let n = op.arity as usize;
    let tuples: Vec<&Vec<u8>> = rel.tuples.iter().collect();
    if tuples.is_empty() {
        return Ok(true);
    }
    for &s in &rel.typ {
        if s >= op.components.len() {
            return Err(Error::SortOutOfRange {
                sort: s,
                count: op.components.len(),
            });
        }
    }
    // Odometer over the n-fold choice of relation tuples.
    let mut choice = vec![0usize; n];
    let mut args = vec![0u8; n];
    loop {
        let mut result = Vec::with_capacity(rel.typ.len());
        for (p, &s) in rel.typ.iter().enumerate() {
            for (j, &c) in choice.iter().enumerate() {
                args[j] = tuples[c][p];
            }
            result.push(op.components[s].apply(&args)?);
        }
        if !rel.tuples.contains(&result) {
            return Ok(false);
        }
        // Advance the odometer.
        let mut j = 0;
        loop {
            if j == n {
                return Ok(true);
            }
            choice[j] += 1;
            if choice[j] < tuples.len() {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
    }
}

/// Whether an operation preserves every relation of a structure.
pub fn preserves_all(op: &GeneralOp, structure: &Structure) -> Result<bool> {
    for rel in &structure.relations {
        if !preserves(op, rel)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Enumerates per-sort candidate operations by backtracking over value-table
/// cells, pruning with the relations whose type mentions only this sort.
fn sort_candidates(
    structure: &Structure,
    sort: usize,
    arity: u8,
    idempotent_only: bool,
    budget: &mut Budget,
) -> Result<Vec<FiniteOp>> {
    let dom = structure.signature.size(sort)?;
    let cells = table_size(dom, arity);
    // Cells forced by idempotency: the table index of (a, …, a) must be a.
    let mut forced = vec![None::<u8>; cells];
    if idempotent_only {
        let diag = vec![0u8; arity as usize];
        let mut d = diag;
        for a in 0..dom {
            d.iter_mut().for_each(|x| *x = a);
            forced[FiniteOp::index_of(dom, &d)] = Some(a);
        }
    }
    // Same-sort relations, for pruning partial tables.
    let local: Vec<&TypedRelation> = structure
        .relations
        .iter()
        .filter(|r| !r.typ.is_empty() && r.typ.iter().all(|&s| s == sort))
        .collect();

    // For each local relation, the argument-tuple combinations it constrains,
    // as (result positions, cell indices): the partial table can be checked
    // once all the involved cells are filled.
    struct LocalCheck {
        rel: usize,
        cells: Vec<usize>,
        positions: usize,
    }
    let mut checks: Vec<LocalCheck> = Vec::new();
    for (ri, rel) in local.iter().enumerate() {
        let tuples: Vec<&Vec<u8>> = rel.tuples.iter().collect();
        if tuples.is_empty() {
            continue;
        }
        let n = arity as usize;
        let mut choice = vec![0usize; n];
        let mut args = vec![0u8; n];
        'outer: loop {
            let mut cell_list = Vec::with_capacity(rel.typ.len());
            for p in 0..rel.typ.len() {
                for (j, &c) in choice.iter().enumerate() {
                    args[j] = tuples[c][p];
                }
                cell_list.push(FiniteOp::index_of(dom, &args));
            }
            checks.push(LocalCheck {
                rel: ri,
                cells: cell_list,
                positions: rel.typ.len(),
            });
            let mut j = 0;
            loop {
                if j == n {
                    break 'outer;
                }
                choice[j] += 1;
                if choice[j] < tuples.len() {
                    break;
                }
                choice[j] = 0;
                j += 1;
            }
        }
    }
    // Index checks by their last-filled cell (cells are filled in order).
    let mut by_last: Vec<Vec<usize>> = vec![Vec::new(); cells];
    for (ci, ch) in checks.iter().enumerate() {
        let last = *ch.cells.iter().max().unwrap();
        by_last[last].push(ci);
    }

    let mut out = Vec::new();
    let mut values = vec![0u8; cells];
    let mut result = Vec::new();
    // Depth-first over cells in index order.
    fn rec(
        dom: u8,
        cell: usize,
        cells: usize,
        forced: &[Option<u8>],
        by_last: &[Vec<usize>],
        checks: &[LocalCheck],
        local: &[&TypedRelation],
        values: &mut Vec<u8>,
        result: &mut Vec<u8>,
        arity: u8,
        out: &mut Vec<FiniteOp>,
        budget: &mut Budget,
    ) -> Result<()> {
        if cell == cells {
            out.push(FiniteOp {
                dom,
                arity,
                values: values.clone(),
            });
            return Ok(());
        }
        let range: Vec<u8> = match forced[cell] {
            Some(v) => vec![v],
            None => (0..dom).collect(),
        };
        for v in range {
            budget.charge(1)?;
            values[cell] = v;
            let mut ok = true;
            for &ci in &by_last[cell] {
                let ch = &checks[ci];
                result.clear();
                for p in 0..ch.positions {
                    result.push(values[ch.cells[p]]);
                }
                if !local[ch.rel].tuples.contains(result) {
                    ok = false;
                    break;
                }
            }
            if ok {
                rec(
                    dom, cell + 1, cells, forced, by_last, checks, local, values, result, arity,
                    out, budget,
                )?;
            }
        }
        Ok(())
    }
    rec(
        dom,
        0,
        cells,
        &forced,
        &by_last,
        &checks,
        &local,
        &mut values,
        &mut result,
        arity,
        &mut out,
        budget,
    )?;
    Ok(out)
}

/// Enumerates the `arity`-ary (optionally idempotent) polymorphisms of a
/// structure, in ascending order of their componentwise value tables.
///
/// Backtracks over sorts in index order: once every sort mentioned by a
/// relation is assigned, the relation is checked, pruning the search.
pub fn pol_enumerate(
    structure: &Structure,
    arity: u8,
    idempotent_only: bool,
    budget: &mut Budget,
) -> Result<Vec<GeneralOp>> {
    structure.validate()?;
    let k = structure.signature.sorts();
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut candidates = Vec::with_capacity(k);
    for s in 0..k {
        candidates.push(sort_candidates(structure, s, arity, idempotent_only, budget)?);
    }
    // Relations to check after sort s is assigned: those whose maximum
    // mentioned sort is s and which span more than one sort (single-sort
    // relations were already enforced on the candidates).
    let mut after: Vec<Vec<&TypedRelation>> = vec![Vec::new(); k];
    for rel in &structure.relations {
        if rel.typ.is_empty() {
            continue;
        }
        let max = *rel.typ.iter().max().unwrap();
        if rel.typ.iter().any(|&s| s != max) {
            after[max].push(rel);
        }
    }
    let mut out = Vec::new();
    let mut stack: Vec<FiniteOp> = Vec::with_capacity(k);
    fn rec(
        s: usize,
        k: usize,
        arity: u8,
        candidates: &[Vec<FiniteOp>],
        after: &[Vec<&TypedRelation>],
        stack: &mut Vec<FiniteOp>,
        out: &mut Vec<GeneralOp>,
        budget: &mut Budget,
    ) -> Result<()> {
        if s == k {
            out.push(GeneralOp {
                arity,
                components: stack.clone(),
            });
            return Ok(());
        }
        for cand in &candidates[s] {
            budget.charge(1)?;
            stack.push(cand.clone());
            let probe = GeneralOp {
                arity,
                components: stack.clone(),
            };
            let mut ok = true;
            for rel in &after[s] {
                if !preserves(&probe, rel)? {
                    ok = false;
                    break;
                }
            }
            if ok {
                rec(s + 1, k, arity, candidates, after, stack, out, budget)?;
            }
            stack.pop();
        }
        Ok(())
    }
    rec(0, k, arity, &candidates, &after, &mut stack, &mut out, budget)?;
    Ok(out)
}

/// Outcome of [`idempotent_core`].
#[derive(Clone, Debug)]
pub enum CoreOutcome {
    /// Every sort collapsed to a single element: the clone is equivalent to
    /// the trivial zero-sorted clone.
    Trivial,
    /// A nontrivial core.
    Core(IdempotentCore),
}

/// The retract of a structure under a minimal-image unary polymorphism.
#[derive(Clone, Debug)]
pub struct IdempotentCore {
    /// The core structure: image carriers, image relations, singleton unary
    /// relations adjoined, singleton sorts deleted, sorts renumbered densely.
    pub structure: Structure,
    /// The idempotent unary polymorphism of the *original* structure whose
    /// image is the core.
    pub retraction: GeneralOp,
    /// Original sort index of each surviving sort.
    pub kept_sorts: Vec<usize>,
    /// For each surviving sort, the original carrier positions of its image
    /// elements (in ascending order).
    pub carrier_maps: Vec<Vec<u8>>,
}

/// Computes the idempotent core of a structure.
///
/// 1. Enumerate the unary polymorphisms and pick the one minimizing the sum
///    of image sizes (ties broken by the lexicographically least value
///    tables).
/// 2. Iterate composition with itself until idempotent; the image is then a
///    retract.
/// 3. Restrict relations to the image, adjoin singleton unary relations for
///    every image element, delete one-element sorts (projecting relations
///    away from the dropped coordinates), and renumber.
/// 4. Cross-check, at arities 1 and 2 and within budget, the retract
///    equivalence between the polymorphisms of the input and those of the
///    core ([`verify_core_retract`]); a mismatch is reported as an internal
///    error rather than silently producing a wrong classification.
pub fn idempotent_core(structure: &Structure, budget: &mut Budget) -> Result<CoreOutcome> {
    structure.validate()?;
    let k = structure.signature.sorts();
    if k == 0 {
        return Ok(CoreOutcome::Trivial);
    }
    let unary = pol_enumerate(structure, 1, false, budget)?;
    let best = unary
        .iter()
        .min_by_key(|op| {
            let total: usize = op.components.iter().map(|c| c.image().len()).sum();
            (total, op.components.clone())
        })
        .ok_or(Error::Internal {
            detail: "no unary polymorphism; the identity is always one".to_string(),
        })?;
    // Idempotent power: iterate z <- z ∘ u until z ∘ z = z.
    let mut z = best.clone();
    let mut steps = 0u32;
    loop {
        let zz = z.compose_unary(&z)?;
        if zz == z {
            break;
        }
        z = z.compose_unary(best)?;
        steps += 1;
        if steps > 4096 {
            return Err(Error::Internal {
                detail: "unary polymorphism failed to reach an idempotent power".to_string(),
            });
        }
    }

    // Image carriers and the position maps old -> new.
    let mut images: Vec<Vec<u8>> = Vec::with_capacity(k);
    let mut old_to_new: Vec<BTreeMap<u8, u8>> = Vec::with_capacity(k);
    for s in 0..k {
        let img: Vec<u8> = z.components[s].image().into_iter().collect();
        let map: BTreeMap<u8, u8> = img.iter().enumerate().map(|(i, &v)| (v, i as u8)).collect();
        images.push(img);
        old_to_new.push(map);
    }
    let kept: Vec<usize> = (0..k).filter(|&s| images[s].len() > 1).collect();
    if kept.is_empty() {
        return Ok(CoreOutcome::Trivial);
    }
    let dense: BTreeMap<usize, usize> = kept.iter().enumerate().map(|(i, &s)| (s, i)).collect();

    // Image relations: push tuples through z, translate to image positions,
    // drop coordinates of deleted sorts, then drop empty-type relations.
    let mut new_relations: Vec<TypedRelation> = Vec::new();
    for rel in &structure.relations {
        let keep_pos: Vec<usize> = (0..rel.typ.len())
            .filter(|&p| dense.contains_key(&rel.typ[p]))
            .collect();
        if keep_pos.is_empty() {
            continue;
        }
        let typ: Vec<usize> = keep_pos.iter().map(|&p| dense[&rel.typ[p]]).collect();
        let mut tuples = BTreeSet::new();
        for t in &rel.tuples {
            let mut img = Vec::with_capacity(keep_pos.len());
            for &p in &keep_pos {
                let s = rel.typ[p];
                let v = z.components[s].values()[t[p] as usize];
                img.push(old_to_new[s][&v]);
            }
            tuples.insert(img);
        }
        new_relations.push(TypedRelation { typ, tuples });
    }
    let image_rel_count = new_relations.len();
    // Singleton unary relations for every element of every surviving sort.
    for (new_s, &s) in kept.iter().enumerate() {
        for pos in 0..images[s].len() as u8 {
            new_relations.push(TypedRelation {
                typ: vec![new_s],
                tuples: BTreeSet::from([vec![pos]]),
            });
        }
    }
    let carriers: Vec<Vec<u8>> = kept
        .iter()
        .map(|&s| {
            let labels = structure.signature.carrier(s).unwrap();
            images[s].iter().map(|&p| labels[p as usize]).collect()
        })
        .collect();
    let core = Structure::new(SortedSignature::new(carriers)?, new_relations)?;
    let carrier_maps: Vec<Vec<u8>> = kept.iter().map(|&s| images[s].clone()).collect();
    let result = IdempotentCore {
        structure: core,
        retraction: z,
        kept_sorts: kept,
        carrier_maps,
    };
    match verify_core_retract(structure, &result, image_rel_count, budget) {
        Ok(()) => {}
        Err(Error::BudgetExceeded { .. }) => {
            // The cross-check is best-effort: a tight budget skips it but
            // never skips the construction itself.
        }
        Err(e) => return Err(e),
    }
    Ok(CoreOutcome::Core(result))
}

/// Restricts a polymorphism of the original structure to the core carriers:
/// apply componentwise to image tuples, push through the retraction, and
/// keep the surviving sorts.  For non-idempotent inputs the result need not
/// be idempotent; see [`core_restriction_hom`] for the corrected map.
pub fn restrict_to_core(op: &GeneralOp, core: &IdempotentCore) -> Result<GeneralOp> {
    let arity = op.arity;
    let mut components = Vec::with_capacity(core.kept_sorts.len());
    for (new_s, &s) in core.kept_sorts.iter().enumerate() {
        let comp = &op.components()[s];
        let zmap = &core.retraction.components()[s];
        let cm = &core.carrier_maps[new_s];
        let dom = cm.len() as u8;
        let n = table_size(dom, arity);
        let mut values = Vec::with_capacity(n);
        let mut args_new = vec![0u8; arity as usize];
        let mut args_old = vec![0u8; arity as usize];
        for idx in 0..n {
            decode_tuple(dom, idx, &mut args_new);
            for j in 0..arity as usize {
                args_old[j] = cm[args_new[j] as usize];
            }
            let v = zmap.values()[comp.apply(&args_old)? as usize];
            let new_v = cm.iter().position(|&c| c == v).ok_or(Error::Internal {
                detail: "retraction left its own image".to_string(),
            })?;
            values.push(new_v as u8);
        }
        components.push(FiniteOp::new(dom, arity, values)?);
    }
    GeneralOp::new(arity, components)
}

/// The inverse of a bijective unary operation.
fn inverse_unary(op: &FiniteOp) -> Result<FiniteOp> {
    let mut values = vec![u8::MAX; op.dom as usize];
    for (x, &v) in op.values.iter().enumerate() {
        if values[v as usize] != u8::MAX {
            return Err(Error::Internal {
                detail: "expected a bijective unary operation".to_string(),
            });
        }
        values[v as usize] = x as u8;
    }
    FiniteOp::new(op.dom, 1, values)
}

/// The homomorphism `Pol(input) -> Pol(core)` on a single operation:
/// restrict to the core carriers, push through the retraction, and correct
/// by the inverse of the diagonal so the result is idempotent.
///
/// The diagonal `α(x) = ξ(f)(x, …, x)` is a unary polymorphism of the core
/// and hence (the core being a core) a bijection; `α^{-1} ∘ ξ(f)` has
/// identity diagonal.  The correction commutes with minors because the
/// diagonal is invariant under taking minors, so this is a minion
/// homomorphism.
pub fn core_restriction_hom(op: &GeneralOp, core: &IdempotentCore) -> Result<GeneralOp> {
    let raw = restrict_to_core(op, core)?;
    let mut components = Vec::with_capacity(raw.components.len());
    for comp in &raw.components {
        let dom = comp.dom;
        let mut diag_vals = Vec::with_capacity(dom as usize);
        let mut d = vec![0u8; comp.arity as usize];
        for a in 0..dom {
            d.iter_mut().for_each(|x| *x = a);
            diag_vals.push(comp.values[FiniteOp::index_of(dom, &d)]);
        }
        let diag = FiniteOp::new(dom, 1, diag_vals)?;
        let inv = inverse_unary(&diag).map_err(|_| Error::Internal {
            detail: "diagonal of a restricted polymorphism is not a core automorphism"
                .to_string(),
        })?;
        components.push(comp.postcompose(&inv)?);
    }
    GeneralOp::new(raw.arity, components)
}

/// The homomorphism `Pol(core) -> Pol(input)` on a single operation:
/// precompose every coordinate with the retraction, extending the operation
/// from the image back to the whole carrier (sorts deleted as singletons
/// take the forced constant component).
pub fn core_section_hom(op: &GeneralOp, structure: &Structure, core: &IdempotentCore) -> Result<GeneralOp> {
    let arity = op.arity;
    let k = structure.signature.sorts();
    let mut components = Vec::with_capacity(k);
    for s in 0..k {
        let dom = structure.signature.size(s)?;
        let zmap = core.retraction.components()[s].values();
        let n = table_size(dom, arity);
        let mut values = Vec::with_capacity(n);
        let mut args = vec![0u8; arity as usize];
        if let Some(new_s) = core.kept_sorts.iter().position(|&t| t == s) {
            let cm = &core.carrier_maps[new_s];
            let comp = &op.components()[new_s];
            let mut args_new = vec![0u8; arity as usize];
            for idx in 0..n {
                decode_tuple(dom, idx, &mut args);
                for j in 0..arity as usize {
                    let zv = zmap[args[j] as usize];
                    args_new[j] = cm.iter().position(|&c| c == zv).ok_or(Error::Internal {
                        detail: "retraction left its own image".to_string(),
                    })? as u8;
                }
                values.push(cm[comp.apply(&args_new)? as usize]);
            }
        } else {
            // Collapsed sort: the retraction is constant on it.
            let c = zmap[0];
            values.resize(n, c);
        }
        components.push(FiniteOp::new(dom, arity, values)?);
    }
    GeneralOp::new(arity, components)
}

/// Checks, at arities 1 and 2, that the core construction really is a
/// polymorphism retract:
///
/// * every unary polymorphism of the core, ignoring the singletons the
///   construction adjoined (`image_rel_count` marks where they start) but
///   keeping any singleton relations the input itself carried, is
///   bijective — minimality of the retraction image guarantees this;
/// * [`core_restriction_hom`] sends every polymorphism of the input to a
///   polymorphism of the core (which, thanks to the singleton relations, is
///   automatically idempotent);
/// * [`core_section_hom`] sends every polymorphism of the core to a
///   polymorphism of the input, and restricting back is the identity.
fn verify_core_retract(
    structure: &Structure,
    core: &IdempotentCore,
    image_rel_count: usize,
    budget: &mut Budget,
) -> Result<()> {
    // Core property: unary polymorphisms of the image structure (without
    // the adjoined singleton relations) are bijections.
    let bare = Structure::new(
        core.structure.signature.clone(),
        core.structure.relations[..image_rel_count].to_vec(),
    )?;
    for u in pol_enumerate(&bare, 1, false, budget)? {
        for comp in u.components() {
            if inverse_unary(comp).is_err() {
                return Err(Error::Internal {
                    detail: "minimal-image retract admits a non-bijective unary polymorphism"
                        .to_string(),
                });
            }
        }
    }
    for arity in 1..=2u8 {
        let source = pol_enumerate(structure, arity, false, budget)?;
        for f in &source {
            let r = core_restriction_hom(f, core)?;
            if !preserves_all(&r, &core.structure)? {
                return Err(Error::Internal {
                    detail: alloc::format!(
                        "restriction of a polymorphism is not a core polymorphism \
                         at arity {arity}"
                    ),
                });
            }
        }
        let target = pol_enumerate(&core.structure, arity, false, budget)?;
        for g in &target {
            let lift = core_section_hom(g, structure, core)?;
            if !preserves_all(&lift, structure)? {
                return Err(Error::Internal {
                    detail: alloc::format!(
                        "section of a core polymorphism is not a polymorphism at arity {arity}"
                    ),
                });
            }
            if &core_restriction_hom(&lift, core)? != g {
                return Err(Error::Internal {
                    detail: alloc::format!(
                        "restriction does not invert the section at arity {arity}"
                    ),
                });
            }
        }
    }
    Ok(())
}
