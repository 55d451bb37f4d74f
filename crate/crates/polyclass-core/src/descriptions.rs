//! Descriptions: finite constraint systems over symbols `h_1, …, h_k`, one
//! symbol per Boolean sort.
//!
//! A constraint relates two symbol occurrences, each optionally dualized,
//! either by the triangle relation `⊲` or by equality.  The clone of a
//! description at arity `n` is the set of all idempotent `k`-sorted `n`-ary
//! operations whose components satisfy every constraint.
//!
//! The central operation is [`to_reduced`], which normalizes a description
//! into a *reduced form*: equalities survive only as implicit self-duality
//! of `g`-symbols, and `⊲` survives only in the four shapes `f_i ⊲ f_j`,
//! `f_i ⊲ f_j^d`, `f_i ⊲ g_j`, and the monotonicity marker `g_i ⊲ g_i`
//! (equivalently `f_i ⊲ f_i`), with no `⊲`-cycles through distinct symbols.
//! The pipeline is:
//!
//! 1. [`forced_merge`] — merge symbols forced equal (up to duality) by
//!    antisymmetry, via strongly connected components of the literal graph;
//! 2. simple adjustments — rewrite both-sides-dual constraints, strip dual
//!    markers on self-dual symbols, and reorient constraints that place a
//!    self-dual symbol on the left;
//! 3. a 2-CNF over the symbols (one clause per constraint) decides which
//!    symbols to replace by their duals so that every constraint lands in an
//!    allowed shape; the formula is solved by the implication-graph
//!    strong-component method and is always satisfiable for pipeline inputs;
//! 4. the adjustments run once more on the flipped constraints.
//!
//! [`extract_description`] produces a description from a structure whose
//! sorts are all two-element, mapping each binary relation to the constraint
//! it imposes on idempotent polymorphisms and dropping relations that every
//! idempotent operation preserves.  [`ReducedDescription::chain_rank`]
//! computes the numeric invariant that drives the collapse to a canonical
//! minion, and [`Description::clo_enumerate`] materializes clones at small
//! arity (full tables up to arity 4, symmetric profiles at arity 5).

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::boolfun::{for_each_in_interval, Sym5Profile, TruthTable};
use crate::error::{Budget, Error, Result};
use crate::multisorted::{MultiOp, Structure};

/// A symbol occurrence: a symbol index with an optional dual marker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    /// Index of the symbol, `0`-based.
    pub symbol: usize,
    /// Whether the occurrence is dualized.
    pub dual: bool,
}

impl Literal {
    /// A plain occurrence of `symbol`.
    pub fn plain(symbol: usize) -> Self {
        Literal {
            symbol,
            dual: false,
        }
    }

    /// A dualized occurrence of `symbol`.
    pub fn dualed(symbol: usize) -> Self {
        Literal { symbol, dual: true }
    }

    /// The occurrence with the dual marker toggled.
    pub fn toggled(&self) -> Self {
        Literal {
            symbol: self.symbol,
            dual: !self.dual,
        }
    }
}

/// The two constraint relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintKind {
    /// The triangle relation `⊲`: left of every pointwise-`≤` pair below
    /// right, equivalently a monotone operation fits between the sides.
    Tri,
    /// Extensional equality.
    Eq,
}

/// A single constraint between two symbol occurrences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    /// The relation.
    pub kind: ConstraintKind,
    /// Left occurrence.
    pub lhs: Literal,
    /// Right occurrence.
    pub rhs: Literal,
}

impl Constraint {
    /// A triangle constraint `lhs ⊲ rhs`.
    pub fn tri(lhs: Literal, rhs: Literal) -> Self {
        Constraint {
            kind: ConstraintKind::Tri,
            lhs,
            rhs,
        }
    }

    /// An equality constraint `lhs = rhs`.
    pub fn eq(lhs: Literal, rhs: Literal) -> Self {
        Constraint {
            kind: ConstraintKind::Eq,
            lhs,
            rhs,
        }
    }

    /// Canonical form under set semantics, or `None` when trivially true.
    ///
    /// Equalities are symmetric and invariant under dualizing both sides, so
    /// they are stored with the smaller occurrence first and a plain left
    /// side.  Triangle constraints are directional and kept as given.
    fn normalized(self) -> Option<Self> {
        match self.kind {
            ConstraintKind::Tri => Some(self),
            ConstraintKind::Eq => {
                if self.lhs == self.rhs {
                    return None;
                }
                let (mut a, mut b) = (self.lhs, self.rhs);
                if b < a {
                    core::mem::swap(&mut a, &mut b);
                }
                if a.dual {
                    a = a.toggled();
                    b = b.toggled();
                    if b < a {
                        core::mem::swap(&mut a, &mut b);
                    }
                }
                Some(Constraint::eq(a, b))
            }
        }
    }
}

/// A description: a set of constraints over `k` symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Description {
    k: usize,
    constraints: Vec<Constraint>,
}

impl Description {
    /// Builds a description, normalizing equalities, dropping trivial
    /// constraints and deduplicating.
    pub fn new(k: usize, constraints: Vec<Constraint>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for c in constraints {
            for l in [&c.lhs, &c.rhs] {
                if l.symbol >= k {
                    return Err(Error::SymbolOutOfRange {
                        symbol: l.symbol,
                        count: k,
                    });
                }
            }
            if let Some(n) = c.normalized() {
                set.insert(n);
            }
        }
        Ok(Description {
            k,
            constraints: set.into_iter().collect(),
        })
    }

    /// Number of symbols.
    pub fn symbol_count(&self) -> usize {
        self.k
    }

    /// The constraints, sorted and deduplicated.
    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Whether the given multisorted operation satisfies every constraint.
    ///
    /// The operation must have one component per symbol; idempotency is not
    /// checked here.
    pub fn satisfied_by(&self, op: &MultiOp) -> Result<bool> {
        if op.sorts() != self.k {
            return Err(Error::SortOutOfRange {
                sort: op.sorts(),
                count: self.k,
            });
        }
        let table = |l: &Literal| {
            let t = op.tables()[l.symbol];
            if l.dual {
                t.dual()
            } else {
                t
            }
        };
        for c in &self.constraints {
            let (a, b) = (table(&c.lhs), table(&c.rhs));
            let ok = match c.kind {
                ConstraintKind::Tri => a.triangle(&b)?,
                ConstraintKind::Eq => a == b,
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Streams the clone of the description at the given arity in ascending
    /// componentwise table order.
    ///
    /// Arities `1..=4` enumerate full truth tables; arity `5` enumerates
    /// symmetric operations only, one candidate per weight profile.  The
    /// budget is charged once per generated candidate table, before
    /// filtering.  Errors from the visitor abort the enumeration.
    pub fn clo_for_each(
        &self,
        arity: u8,
        budget: &mut Budget,
        visit: &mut dyn FnMut(&MultiOp) -> Result<()>,
    ) -> Result<()> {
        if arity == 0 || arity > 5 {
            return Err(Error::ArityOutOfRange { arity, max: 5 });
        }
        let mut self_cs: Vec<Vec<Constraint>> = vec![Vec::new(); self.k];
        let mut late_cs: Vec<Vec<Constraint>> = vec![Vec::new(); self.k];
        for c in &self.constraints {
            let (a, b) = (c.lhs.symbol, c.rhs.symbol);
            if a == b {
                self_cs[a].push(*c);
            } else {
                late_cs[a.max(b)].push(*c);
            }
        }
        if arity == 5 {
            let mut profiles = Vec::with_capacity(self.k);
            return clo_sym_rec(self, &self_cs, &late_cs, &mut profiles, budget, visit);
        }
        let ctx = CloCtx {
            desc: self,
            arity,
            conj: TruthTable::conjunction(arity)?,
            disj: TruthTable::disjunction(arity)?,
            self_cs,
            late_cs,
        };
        let mut tables = Vec::with_capacity(self.k);
        clo_rec(&ctx, 0, &mut tables, budget, visit)
    }

    /// Materializes the clone of the description at the given arity.
    pub fn clo_enumerate(&self, arity: u8, budget: &mut Budget) -> Result<Vec<MultiOp>> {
        let mut out = Vec::new();
        self.clo_for_each(arity, budget, &mut |op| {
            out.push(op.clone());
            Ok(())
        })?;
        Ok(out)
    }
}

struct CloCtx<'a> {
    desc: &'a Description,
    arity: u8,
    conj: TruthTable,
    disj: TruthTable,
    self_cs: Vec<Vec<Constraint>>,
    late_cs: Vec<Vec<Constraint>>,
}

/// Whether a single table satisfies a constraint relating a symbol to itself.
fn self_constraint_ok(c: &Constraint, t: &TruthTable) -> Result<bool> {
    Ok(match (c.kind, c.lhs.dual, c.rhs.dual) {
        (ConstraintKind::Tri, false, false) | (ConstraintKind::Tri, true, true) => t.is_monotone(),
        (ConstraintKind::Tri, false, true) => t.triangle(&t.dual())?,
        (ConstraintKind::Tri, true, false) => t.dual().triangle(t)?,
        (ConstraintKind::Eq, a, b) => a == b || t.is_self_dual(),
    })
}

/// Backtracking enumeration over full tables, one symbol at a time.
///
/// Constraints to earlier symbols are turned into exact interval bounds:
/// `X ⊲ W` is `X ≤ int(W)` and `W ⊲ X` is `up(W) ≤ X`, with duals handled by
/// reflecting the bound.
fn clo_rec(
    ctx: &CloCtx<'_>,
    s: usize,
    tables: &mut Vec<TruthTable>,
    budget: &mut Budget,
    visit: &mut dyn FnMut(&MultiOp) -> Result<()>,
) -> Result<()> {
    if s == ctx.desc.k {
        let op = MultiOp::new(ctx.arity, tables.clone())?;
        return visit(&op);
    }
    let mut lo = ctx.conj;
    let mut hi = ctx.disj;
    for c in &ctx.late_cs[s] {
        let (me_dual, other, me_left) = if c.lhs.symbol == s {
            (c.lhs.dual, c.rhs, true)
        } else {
            (c.rhs.dual, c.lhs, false)
        };
        let mut w = tables[other.symbol];
        if other.dual {
            w = w.dual();
        }
        match c.kind {
            ConstraintKind::Eq => {
                let v = if me_dual { w.dual() } else { w };
                lo = lo.join(&v)?;
                hi = hi.meet(&v)?;
            }
            ConstraintKind::Tri if me_left => {
                let b = w.monotone_interior();
                if me_dual {
                    lo = lo.join(&b.dual())?;
                } else {
                    hi = hi.meet(&b)?;
                }
            }
            ConstraintKind::Tri => {
                let b = w.upward_closure();
                if me_dual {
                    hi = hi.meet(&b.dual())?;
                } else {
                    lo = lo.join(&b)?;
                }
            }
        }
    }
    for_each_in_interval(&lo, &hi, &mut |t| {
        budget.charge(1)?;
        for c in &ctx.self_cs[s] {
            if !self_constraint_ok(c, &t)? {
                return Ok(());
            }
        }
        tables.push(t);
        let r = clo_rec(ctx, s + 1, tables, budget, visit);
        tables.pop();
        r
    })
}

/// Whether a profile satisfies a constraint relating a symbol to itself.
fn self_constraint_ok_profile(c: &Constraint, p: &Sym5Profile) -> bool {
    match (c.kind, c.lhs.dual, c.rhs.dual) {
        (ConstraintKind::Tri, false, false) | (ConstraintKind::Tri, true, true) => p.is_monotone(),
        (ConstraintKind::Tri, false, true) => p.triangle(&p.dual()),
        (ConstraintKind::Tri, true, false) => p.dual().triangle(p),
        (ConstraintKind::Eq, a, b) => a == b || p.is_self_dual(),
    }
}

/// Symmetric-profile enumeration at arity 5.
fn clo_sym_rec(
    desc: &Description,
    self_cs: &[Vec<Constraint>],
    late_cs: &[Vec<Constraint>],
    profiles: &mut Vec<Sym5Profile>,
    budget: &mut Budget,
    visit: &mut dyn FnMut(&MultiOp) -> Result<()>,
) -> Result<()> {
    let s = profiles.len();
    if s == desc.k {
        let tables: Vec<TruthTable> = profiles.iter().map(Sym5Profile::to_table).collect();
        let op = MultiOp::new(5, tables)?;
        return visit(&op);
    }
    'cand: for index in 0..16u8 {
        budget.charge(1)?;
        let p = Sym5Profile::from_index(index);
        for c in &self_cs[s] {
            if !self_constraint_ok_profile(c, &p) {
                continue 'cand;
            }
        }
        for c in &late_cs[s] {
            let prof = |l: &Literal| {
                let q = if l.symbol == s { p } else { profiles[l.symbol] };
                if l.dual {
                    q.dual()
                } else {
                    q
                }
            };
            let (a, b) = (prof(&c.lhs), prof(&c.rhs));
            let ok = match c.kind {
                ConstraintKind::Tri => a.triangle(&b),
                ConstraintKind::Eq => a == b,
            };
            if !ok {
                continue 'cand;
            }
        }
        profiles.push(p);
        let r = clo_sym_rec(desc, self_cs, late_cs, profiles, budget, visit);
        profiles.pop();
        r?;
    }
    Ok(())
}

/// Extracts the description of a structure whose sorts are all two-element.
///
/// Each binary relation is matched against the constraint table; relations
/// preserved by every idempotent operation (all unary relations, singletons,
/// coordinate-fixing pairs, the same-sort diagonal, full and empty
/// relations) contribute nothing.  The clone of the result equals the
/// idempotent polymorphism minion of the input at every arity.
///
/// Errors on relations of arity greater than two and on non-Boolean sorts.
pub fn extract_description(core: &Structure) -> Result<Description> {
    let k = core.signature.sorts();
    for s in 0..k {
        if core.signature.carrier(s)? != [0, 1] {
            return Err(Error::NonBooleanSort { sort: s });
        }
    }
    let mut constraints = Vec::new();
    for r in &core.relations {
        match r.arity() {
            0 | 1 => continue,
            2 => {
                let mut mask = 0u8;
                for t in &r.tuples {
                    mask |= 1 << (t[0] * 2 + t[1]);
                }
                let (i, j) = (r.typ[0], r.typ[1]);
                let c = match mask {
                    // Missing (1,1): h_i ⊲ h_j^d.
                    0b0111 => Some(Constraint::tri(Literal::plain(i), Literal::dualed(j))),
                    // Missing (0,0): h_i^d ⊲ h_j.
                    0b1110 => Some(Constraint::tri(Literal::dualed(i), Literal::plain(j))),
                    // Missing (1,0): h_i ⊲ h_j.
                    0b1011 => Some(Constraint::tri(Literal::plain(i), Literal::plain(j))),
                    // Missing (0,1): h_i^d ⊲ h_j^d.
                    0b1101 => Some(Constraint::tri(Literal::dualed(i), Literal::dualed(j))),
                    // Diagonal: h_i = h_j.
                    0b1001 => Some(Constraint::eq(Literal::plain(i), Literal::plain(j))),
                    // Inequality: h_i = h_j^d.
                    0b0110 => Some(Constraint::eq(Literal::plain(i), Literal::dualed(j))),
                    _ => None,
                };
                constraints.extend(c);
            }
            _ => {
                return Err(Error::UnsupportedRelation {
                    detail: "relations of arity greater than two are not supported",
                })
            }
        }
    }
    Description::new(k, constraints)
}

/// Result of [`forced_merge`]: the merged description plus the bookkeeping
/// needed to translate operations between the original and merged symbol
/// sets.
#[derive(Clone, Debug)]
pub struct ForcedMerge {
    /// The description over the surviving symbols.
    pub merged: Description,
    /// For each original symbol, the index of its surviving symbol.
    pub target: Vec<usize>,
    /// For each original symbol, whether it is the dual of its survivor.
    pub dual: Vec<bool>,
    /// For each surviving symbol, whether it is forced self-dual.
    pub self_dual: Vec<bool>,
}

/// Iterative strongly-connected-components computation.
///
/// Returns one component id per vertex, numbered in order of completion, so
/// ids form a reverse topological order of the condensation: every edge goes
/// from a larger id to a smaller or equal id.  Roots are taken in ascending
/// vertex order and neighbors in adjacency order, making the numbering
/// deterministic.
fn tarjan_scc(adj: &[Vec<usize>]) -> Vec<u32> {
    const UNSET: u32 = u32::MAX;
    let n = adj.len();
    let mut index = vec![UNSET; n];
    let mut low = vec![0u32; n];
    let mut comp = vec![UNSET; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_index = 0u32;
    let mut next_comp = 0u32;
    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        call.push((root, 0));
        while let Some(frame) = call.last_mut() {
            let (v, child) = *frame;
            if child < adj[v].len() {
                frame.1 += 1;
                let w = adj[v][child];
                if index[w] == UNSET {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(parent) = call.last() {
                    let p = parent.0;
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("component stack underflow");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Merges symbols forced equal up to duality.
///
/// The literal graph has one vertex per symbol polarity; a constraint
/// `a ⊲ b` adds the edge `a → b` together with its reflection
/// `b^d → a^d`, and an equality adds edges both ways.  Since `⊲` implies
/// `≤` on idempotent operations, any cycle forces extensional equality, so
/// symbols whose polarities share a strong component are merged, recording
/// the relative polarity; a symbol whose two polarities meet is forced
/// self-dual, which the merged description records as an explicit
/// self-duality constraint.  Survivors keep the smallest symbol index of
/// their class and are renumbered densely in ascending order.
pub fn forced_merge(d: &Description) -> ForcedMerge {
    let k = d.k;
    let vertex = |l: &Literal| 2 * l.symbol + l.dual as usize;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); 2 * k];
    for c in &d.constraints {
        let (a, b) = (c.lhs, c.rhs);
        match c.kind {
            ConstraintKind::Tri => {
                adj[vertex(&a)].push(vertex(&b));
                adj[vertex(&b.toggled())].push(vertex(&a.toggled()));
            }
            ConstraintKind::Eq => {
                adj[vertex(&a)].push(vertex(&b));
                adj[vertex(&b)].push(vertex(&a));
                adj[vertex(&a.toggled())].push(vertex(&b.toggled()));
                adj[vertex(&b.toggled())].push(vertex(&a.toggled()));
            }
        }
    }
    let comp = tarjan_scc(&adj);
    // Two symbols merge when their polarity components intersect; the
    // components of a symbol's two polarities always come as a dual pair, so
    // intersection is an equivalence.
    let mut survivor_of_comp: Vec<Option<usize>> = vec![None; 2 * k];
    let mut target = vec![0usize; k];
    let mut dual = vec![false; k];
    let mut survivors: Vec<usize> = Vec::new();
    let mut self_dual_survivor: Vec<bool> = Vec::new();
    for s in 0..k {
        let (cp, cn) = (comp[2 * s] as usize, comp[2 * s + 1] as usize);
        let is_self_dual = cp == cn;
        if let Some(surv) = survivor_of_comp[cp].or(survivor_of_comp[cn]) {
            target[s] = surv;
            dual[s] = !is_self_dual && comp[2 * s] == comp[2 * surv + 1];
        } else {
            survivor_of_comp[cp] = Some(s);
            survivor_of_comp[cn] = Some(s);
            target[s] = s;
            survivors.push(s);
            self_dual_survivor.push(is_self_dual);
        }
    }
    let mut new_index = vec![0usize; k];
    for (i, &s) in survivors.iter().enumerate() {
        new_index[s] = i;
    }
    for s in 0..k {
        target[s] = new_index[target[s]];
    }
    let rewrite = |l: &Literal| Literal {
        symbol: target[l.symbol],
        dual: l.dual ^ dual[l.symbol],
    };
    let mut constraints: Vec<Constraint> = d
        .constraints
        .iter()
        .map(|c| Constraint {
            kind: c.kind,
            lhs: rewrite(&c.lhs),
            rhs: rewrite(&c.rhs),
        })
        .collect();
    for (i, &sd) in self_dual_survivor.iter().enumerate() {
        if sd {
            constraints.push(Constraint::eq(Literal::plain(i), Literal::dualed(i)));
        }
    }
    let merged = Description::new(survivors.len(), constraints)
        .expect("rewritten constraints stay in range");
    ForcedMerge {
        merged,
        target,
        dual,
        self_dual: self_dual_survivor,
    }
}

/// Normalizes merged constraints into the shapes the 2-CNF understands.
///
/// Dual markers on self-dual symbols are stripped, both-sides-dual
/// constraints between plain symbols are rewritten by skew symmetry
/// (`a^d ⊲ b^d` becomes `b ⊲ a`), constraints with a self-dual symbol on
/// the left are reoriented (`g ⊲ f` becomes `f^d ⊲ g`, `g ⊲ f^d` becomes
/// `f ⊲ g`), self-duality markers are absorbed, and duplicates collapse.
fn adjust(constraints: &[Constraint], self_dual: &[bool]) -> Result<BTreeSet<Constraint>> {
    let mut out = BTreeSet::new();
    for c in constraints {
        let strip = |l: &Literal| {
            if self_dual[l.symbol] {
                Literal::plain(l.symbol)
            } else {
                *l
            }
        };
        let (mut a, mut b) = (strip(&c.lhs), strip(&c.rhs));
        match c.kind {
            ConstraintKind::Eq => {
                if a.symbol == b.symbol && self_dual[a.symbol] {
                    continue;
                }
                if a == b {
                    continue;
                }
                return Err(Error::NotReduced {
                    detail: "equality between distinct merged symbols",
                });
            }
            ConstraintKind::Tri => {
                let (ag, bg) = (self_dual[a.symbol], self_dual[b.symbol]);
                match (ag, bg) {
                    (false, false) => {
                        if a.dual && b.dual {
                            let (x, y) = (b.toggled(), a.toggled());
                            a = x;
                            b = y;
                        }
                    }
                    (false, true) => {}
                    (true, false) => {
                        // g ⊲ f^e reorients to f^{!e} ⊲ g.
                        let (x, y) = (b.toggled(), a);
                        a = x;
                        b = y;
                    }
                    (true, true) => {
                        if a.symbol != b.symbol {
                            return Err(Error::NotReduced {
                                detail: "comparability of distinct self-dual symbols",
                            });
                        }
                    }
                }
                out.insert(Constraint::tri(a, b));
            }
        }
    }
    Ok(out)
}

/// A literal of a 2-CNF clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CnfLit {
    /// Variable index.
    pub var: usize,
    /// Whether the literal is the variable's negation.
    pub negated: bool,
}

/// A 2-CNF formula: a conjunction of two-literal clauses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    vars: usize,
    clauses: Vec<[CnfLit; 2]>,
}

impl CnfFormula {
    /// Builds a formula, checking variable ranges.
    pub fn new(vars: usize, clauses: Vec<[CnfLit; 2]>) -> Result<Self> {
        for c in &clauses {
            for l in c {
                if l.var >= vars {
                    return Err(Error::IndexOutOfRange {
                        index: l.var,
                        len: vars,
                    });
                }
            }
        }
        Ok(CnfFormula { vars, clauses })
    }

    /// Number of variables.
    pub fn vars(&self) -> usize {
        self.vars
    }

    /// The clauses.
    pub fn clauses(&self) -> &[[CnfLit; 2]] {
        &self.clauses
    }
}

/// Builds the flip-selection 2-CNF of a merged description.
///
/// Variables are the merged symbols (`true` means "replace the symbol by its
/// dual"); `self_dual` marks the symbols whose flips are semantic no-ops.
/// After the simple adjustments, each constraint contributes one clause:
///
/// - `f_i ⊲ f_j`   → `(¬f_i ∨ f_j)`
/// - `f_i ⊲ f_j^d` → `(¬f_i ∨ ¬f_j)`
/// - `f_i^d ⊲ f_j` → `(f_i ∨ f_j)`
/// - `f_i ⊲ g_j`   → `(¬f_i ∨ ¬g_j)`
/// - `f_i^d ⊲ g_j` → `(f_i ∨ g_j)`
///
/// and monotonicity markers on self-dual symbols contribute nothing.
pub fn build_2cnf(d: &Description, self_dual: &[bool]) -> Result<CnfFormula> {
    if self_dual.len() != d.k {
        return Err(Error::IndexOutOfRange {
            index: self_dual.len(),
            len: d.k,
        });
    }
    let adjusted = adjust(&d.constraints, self_dual)?;
    clauses_of_adjusted(&adjusted, self_dual, d.k)
}

fn clauses_of_adjusted(
    adjusted: &BTreeSet<Constraint>,
    self_dual: &[bool],
    vars: usize,
) -> Result<CnfFormula> {
    let mut clauses = Vec::new();
    for c in adjusted {
        let (a, b) = (c.lhs, c.rhs);
        let (ag, bg) = (self_dual[a.symbol], self_dual[b.symbol]);
        let clause = match (ag, bg, a.dual, b.dual) {
            (true, true, _, _) => continue,
            (false, false, false, false) => [lit_pos(a.symbol, true), lit_pos(b.symbol, false)],
            (false, false, false, true) => [lit_pos(a.symbol, true), lit_pos(b.symbol, true)],
            (false, false, true, false) => [lit_pos(a.symbol, false), lit_pos(b.symbol, false)],
            (false, true, false, _) => [lit_pos(a.symbol, true), lit_pos(b.symbol, true)],
            (false, true, true, _) => [lit_pos(a.symbol, false), lit_pos(b.symbol, false)],
            _ => {
                return Err(Error::NotReduced {
                    detail: "constraint shape outside the clause table",
                })
            }
        };
        clauses.push(clause);
    }
    CnfFormula::new(vars, clauses)
}

fn lit_pos(var: usize, negated: bool) -> CnfLit {
    CnfLit { var, negated }
}

/// Solves a 2-CNF by the implication-graph strong-component method.
///
/// Deterministic: components are numbered by Tarjan's algorithm with roots
/// in ascending vertex order, and a variable is `true` exactly when its
/// positive literal's component comes after its negation's component in the
/// topological order of the condensation (equivalently, has the smaller
/// completion number).  Returns `None` when unsatisfiable.
pub fn apt_solve(f: &CnfFormula) -> Option<Vec<bool>> {
    apt_core(f, &vec![false; f.vars]).expect("no identified variables")
}

/// [`apt_solve`] with *identified* variables, whose two polarities are
/// linked by implication edges both ways.
///
/// An identified variable behaves as if false in both polarities: any clause
/// it appears in must be satisfied through its other literal, and the
/// returned assignment values it `false`.  Identified variables are exempt
/// from the unsatisfiability check.  Errors when a clause has both literals
/// on identified variables, which would make the clause unsatisfiable by
/// construction.
pub fn apt_solve_self_dual(f: &CnfFormula, self_dual: &[bool]) -> Result<Option<Vec<bool>>> {
    apt_core(f, self_dual)
}

fn apt_core(f: &CnfFormula, self_dual: &[bool]) -> Result<Option<Vec<bool>>> {
    if self_dual.len() != f.vars {
        return Err(Error::IndexOutOfRange {
            index: self_dual.len(),
            len: f.vars,
        });
    }
    for c in &f.clauses {
        if self_dual[c[0].var] && self_dual[c[1].var] {
            return Err(Error::NotReduced {
                detail: "clause with two identified literals",
            });
        }
    }
    // Vertex 2v is ¬x_v, vertex 2v+1 is x_v.
    let vert = |l: &CnfLit| 2 * l.var + !l.negated as usize;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); 2 * f.vars];
    for c in &f.clauses {
        adj[vert(&c[0]) ^ 1].push(vert(&c[1]));
        adj[vert(&c[1]) ^ 1].push(vert(&c[0]));
    }
    for (v, &sd) in self_dual.iter().enumerate() {
        if sd {
            adj[2 * v].push(2 * v + 1);
            adj[2 * v + 1].push(2 * v);
        }
    }
    let comp = tarjan_scc(&adj);
    let mut phi = vec![false; f.vars];
    for v in 0..f.vars {
        if !self_dual[v] && comp[2 * v] == comp[2 * v + 1] {
            return Ok(None);
        }
        phi[v] = comp[2 * v + 1] < comp[2 * v];
    }
    Ok(Some(phi))
}

/// A constraint of a reduced description, over `f`-symbols (plain) and
/// `g`-symbols (implicitly self-dual).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ReducedConstraint {
    /// `f_i ⊲ f_j`; `i = j` marks `f_i` monotone.
    FF(usize, usize),
    /// `f_i ⊲ f_j^d`.
    FFD(usize, usize),
    /// `f_i ⊲ g_j`.
    FG(usize, usize),
    /// `g_i ⊲ g_i`: marks `g_i` monotone.
    GG(usize),
}

/// A description in reduced form.
///
/// Symbols split into `n` `f`-symbols and `m` `g`-symbols; every `g`
/// carries the implicit constraint `g = g^d`, and the explicit constraints
/// are restricted to the [`ReducedConstraint`] shapes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedDescription {
    f_count: usize,
    g_count: usize,
    constraints: Vec<ReducedConstraint>,
}

impl ReducedDescription {
    /// Builds a reduced description, checking index ranges and
    /// deduplicating; structural invariants are checked by [`validate`].
    ///
    /// [`validate`]: ReducedDescription::validate
    pub fn new(
        f_count: usize,
        g_count: usize,
        constraints: Vec<ReducedConstraint>,
    ) -> Result<Self> {
        let check_f = |i: usize| {
            if i >= f_count {
                Err(Error::SymbolOutOfRange {
                    symbol: i,
                    count: f_count,
                })
            } else {
                Ok(())
            }
        };
        let check_g = |j: usize| {
            if j >= g_count {
                Err(Error::SymbolOutOfRange {
                    symbol: j,
                    count: g_count,
                })
            } else {
                Ok(())
            }
        };
        let mut set = BTreeSet::new();
        for c in constraints {
            match c {
                ReducedConstraint::FF(i, j) | ReducedConstraint::FFD(i, j) => {
                    check_f(i)?;
                    check_f(j)?;
                }
                ReducedConstraint::FG(i, j) => {
                    check_f(i)?;
                    check_g(j)?;
                }
                ReducedConstraint::GG(j) => check_g(j)?,
            }
            set.insert(c);
        }
        Ok(ReducedDescription {
            f_count,
            g_count,
            constraints: set.into_iter().collect(),
        })
    }

    /// Number of `f`-symbols.
    pub fn f_count(&self) -> usize {
        self.f_count
    }

    /// Number of `g`-symbols.
    pub fn g_count(&self) -> usize {
        self.g_count
    }

    /// The constraints, sorted and deduplicated.
    pub fn constraints(&self) -> &[ReducedConstraint] {
        &self.constraints
    }

    /// Checks the reduced-form invariants: at least one symbol, and no
    /// `⊲`-cycle through distinct symbols.
    pub fn validate(&self) -> Result<()> {
        if self.f_count + self.g_count == 0 {
            return Err(Error::NotReduced {
                detail: "a reduced description needs at least one symbol",
            });
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.f_count];
        for c in &self.constraints {
            if let ReducedConstraint::FF(i, j) = *c {
                if i != j {
                    adj[i].push(j);
                }
            }
        }
        let comp = tarjan_scc(&adj);
        for c in 0..self.f_count {
            if comp.iter().filter(|&&x| x as usize == c).count() > 1 {
                return Err(Error::NotReduced {
                    detail: "⊲-cycle through distinct symbols",
                });
            }
        }
        Ok(())
    }

    /// Whether any monotonicity marker (`f_i ⊲ f_i` or `g_i ⊲ g_i`) is
    /// present.
    pub fn has_monotone(&self) -> bool {
        self.has_monotone_f() || self.has_monotone_g()
    }

    /// Whether some `f`-symbol is marked monotone.
    pub fn has_monotone_f(&self) -> bool {
        self.constraints
            .iter()
            .any(|c| matches!(c, ReducedConstraint::FF(i, j) if i == j))
    }

    /// Whether some `g`-symbol is marked monotone.
    pub fn has_monotone_g(&self) -> bool {
        self.constraints
            .iter()
            .any(|c| matches!(c, ReducedConstraint::GG(_)))
    }

    /// All `f`-symbol ranks: the vertex count of the longest `⊲`-chain
    /// ending at each symbol.
    fn ranks(&self) -> Result<Vec<u32>> {
        if self.has_monotone() {
            return Err(Error::NotReduced {
                detail: "rank is undefined in the presence of monotonicity markers",
            });
        }
        let mut rank = vec![1u32; self.f_count];
        // Longest-path relaxation; the graph is acyclic for valid inputs,
        // so |V| rounds suffice and a further change signals a cycle.
        for round in 0..=self.f_count {
            let mut changed = false;
            for c in &self.constraints {
                if let ReducedConstraint::FF(i, j) = *c {
                    if rank[j] < rank[i] + 1 {
                        rank[j] = rank[i] + 1;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
            if round == self.f_count {
                return Err(Error::NotReduced {
                    detail: "⊲-cycle through distinct symbols",
                });
            }
        }
        Ok(rank)
    }

    /// The rank of an `f`-symbol: the vertex count of the longest `⊲`-chain
    /// ending at it.  Errors when monotonicity markers are present.
    pub fn rank(&self, f: usize) -> Result<u32> {
        if f >= self.f_count {
            return Err(Error::SymbolOutOfRange {
                symbol: f,
                count: self.f_count,
            });
        }
        Ok(self.ranks()?[f])
    }

    /// The chain rank: the maximum over all ranks, over `rank(f_i) +
    /// rank(f_j)` for constraints `f_i ⊲ f_j^d`, and over `2·rank(f_i) + 1`
    /// for constraints `f_i ⊲ g_j`; `0` when there are no `f`-symbols.
    /// Errors when monotonicity markers are present.
    pub fn chain_rank(&self) -> Result<u32> {
        if self.has_monotone() {
            return Err(Error::NotReduced {
                detail: "chain rank is undefined in the presence of monotonicity markers",
            });
        }
        if self.f_count == 0 {
            return Ok(0);
        }
        let r = self.ranks()?;
        let mut best = *r.iter().max().expect("nonempty ranks");
        for c in &self.constraints {
            match *c {
                ReducedConstraint::FFD(i, j) => best = best.max(r[i] + r[j]),
                ReducedConstraint::FG(i, _) => best = best.max(2 * r[i] + 1),
                _ => {}
            }
        }
        Ok(best)
    }

    /// The equivalent plain description: symbols `0..n` are the `f`'s,
    /// `n..n+m` the `g`'s, with explicit self-duality constraints for the
    /// `g`'s.
    pub fn to_description(&self) -> Description {
        let n = self.f_count;
        let k = n + self.g_count;
        let mut cs = Vec::new();
        for c in &self.constraints {
            cs.push(match *c {
                ReducedConstraint::FF(i, j) => {
                    Constraint::tri(Literal::plain(i), Literal::plain(j))
                }
                ReducedConstraint::FFD(i, j) => {
                    Constraint::tri(Literal::plain(i), Literal::dualed(j))
                }
                ReducedConstraint::FG(i, j) => {
                    Constraint::tri(Literal::plain(i), Literal::plain(n + j))
                }
                ReducedConstraint::GG(j) => {
                    Constraint::tri(Literal::plain(n + j), Literal::plain(n + j))
                }
            });
        }
        for j in 0..self.g_count {
            cs.push(Constraint::eq(Literal::plain(n + j), Literal::dualed(n + j)));
        }
        Description::new(k, cs).expect("reduced constraints stay in range")
    }

    /// Streams the clone of the reduced description; see
    /// [`Description::clo_for_each`].
    pub fn clo_for_each(
        &self,
        arity: u8,
        budget: &mut Budget,
        visit: &mut dyn FnMut(&MultiOp) -> Result<()>,
    ) -> Result<()> {
        self.to_description().clo_for_each(arity, budget, visit)
    }

    /// Materializes the clone of the reduced description.
    pub fn clo_enumerate(&self, arity: u8, budget: &mut Budget) -> Result<Vec<MultiOp>> {
        self.to_description().clo_enumerate(arity, budget)
    }
}

/// A symbol of a reduced description.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RSymbol {
    /// The `i`-th `f`-symbol.
    F(usize),
    /// The `j`-th `g`-symbol.
    G(usize),
}

/// The symbol translation produced by [`to_reduced`]: for each original
/// symbol, its reduced target and whether the original is the target's dual.
///
/// [`expand`] turns a member of the reduced clone into the corresponding
/// member of the original clone and [`project`] inverts it; both act
/// componentwise (copy, optionally dualize) and therefore commute with
/// minors.
///
/// [`expand`]: SymbolMap::expand
/// [`project`]: SymbolMap::project
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolMap {
    entries: Vec<(RSymbol, bool)>,
    f_count: usize,
    g_count: usize,
}

impl SymbolMap {
    /// Per-original-symbol targets and dual markers.
    pub fn entries(&self) -> &[(RSymbol, bool)] {
        &self.entries
    }

    /// Number of `f`-symbols in the reduced description.
    pub fn f_count(&self) -> usize {
        self.f_count
    }

    /// Number of `g`-symbols in the reduced description.
    pub fn g_count(&self) -> usize {
        self.g_count
    }

    fn reduced_index(&self, r: RSymbol) -> usize {
        match r {
            RSymbol::F(i) => i,
            RSymbol::G(j) => self.f_count + j,
        }
    }

    /// Maps a member of the reduced clone to the original symbol set.
    pub fn expand(&self, op: &MultiOp) -> Result<MultiOp> {
        let k = self.f_count + self.g_count;
        if op.sorts() != k {
            return Err(Error::SortOutOfRange {
                sort: op.sorts(),
                count: k,
            });
        }
        let tables: Vec<TruthTable> = self
            .entries
            .iter()
            .map(|&(r, d)| {
                let t = op.tables()[self.reduced_index(r)];
                if d {
                    t.dual()
                } else {
                    t
                }
            })
            .collect();
        MultiOp::new(op.arity(), tables)
    }

    /// Maps a member of the original clone to the reduced symbol set, using
    /// the smallest original preimage of each reduced symbol; inverse to
    /// [`expand`](SymbolMap::expand) on clone members.
    pub fn project(&self, op: &MultiOp) -> Result<MultiOp> {
        if op.sorts() != self.entries.len() {
            return Err(Error::SortOutOfRange {
                sort: op.sorts(),
                count: self.entries.len(),
            });
        }
        let k = self.f_count + self.g_count;
        let mut tables = Vec::with_capacity(k);
        for r in 0..k {
            let (orig, &(_, d)) = self
                .entries
                .iter()
                .enumerate()
                .find(|(_, (t, _))| self.reduced_index(*t) == r)
                .ok_or(Error::Internal {
                    detail: alloc::string::String::from("reduced symbol without preimage"),
                })?;
            let t = op.tables()[orig];
            tables.push(if d { t.dual() } else { t });
        }
        MultiOp::new(op.arity(), tables)
    }
}

/// Reduces a description to reduced form.
///
/// Pipeline: [`forced_merge`], simple adjustments, the flip-selection 2-CNF
/// solved by [`apt_solve_self_dual`], dual substitution for the symbols the
/// assignment marks (flips on self-dual symbols are no-ops and discarded),
/// and the adjustments once more.  The returned [`SymbolMap`] composes the
/// merge polarities with the flips.
///
/// The 2-CNF of a merged description is always satisfiable — an
/// unsatisfiable formula would force some symbol's two polarities into one
/// strong component of the literal graph, which the merge has already
/// collapsed — so an `UNSAT` outcome is reported as an internal error.
pub fn to_reduced(d: &Description) -> Result<(ReducedDescription, SymbolMap)> {
    let fm = forced_merge(d);
    let k2 = fm.merged.symbol_count();
    let mut f_of = vec![usize::MAX; k2];
    let mut g_of = vec![usize::MAX; k2];
    let (mut f_count, mut g_count) = (0usize, 0usize);
    for s in 0..k2 {
        if fm.self_dual[s] {
            g_of[s] = g_count;
            g_count += 1;
        } else {
            f_of[s] = f_count;
            f_count += 1;
        }
    }
    let adjusted = adjust(&fm.merged.constraints, &fm.self_dual)?;
    let cnf = clauses_of_adjusted(&adjusted, &fm.self_dual, k2)?;
    let phi = apt_solve_self_dual(&cnf, &fm.self_dual)?.ok_or_else(|| Error::Internal {
        detail: alloc::string::String::from("reduction 2-CNF unexpectedly unsatisfiable"),
    })?;
    let flip = |l: &Literal| {
        if !fm.self_dual[l.symbol] && phi[l.symbol] {
            l.toggled()
        } else {
            *l
        }
    };
    let flipped: Vec<Constraint> = adjusted
        .iter()
        .map(|c| Constraint {
            kind: c.kind,
            lhs: flip(&c.lhs),
            rhs: flip(&c.rhs),
        })
        .collect();
    let mut reduced_cs = Vec::new();
    for c in adjust(&flipped, &fm.self_dual)? {
        let (a, b) = (c.lhs, c.rhs);
        let (ag, bg) = (fm.self_dual[a.symbol], fm.self_dual[b.symbol]);
        let rc = match (ag, bg, a.dual, b.dual) {
            (false, false, false, false) => ReducedConstraint::FF(f_of[a.symbol], f_of[b.symbol]),
            (false, false, false, true) => ReducedConstraint::FFD(f_of[a.symbol], f_of[b.symbol]),
            (false, true, false, _) => ReducedConstraint::FG(f_of[a.symbol], g_of[b.symbol]),
            (true, true, _, _) => ReducedConstraint::GG(g_of[a.symbol]),
            _ => {
                return Err(Error::Internal {
                    detail: alloc::string::String::from(
                        "constraint left unreduced after the 2-CNF flips",
                    ),
                })
            }
        };
        reduced_cs.push(rc);
    }
    let rd = ReducedDescription::new(f_count, g_count, reduced_cs)?;
    if k2 > 0 {
        rd.validate()?;
    }
    let entries: Vec<(RSymbol, bool)> = (0..d.k)
        .map(|s| {
            let t = fm.target[s];
            if fm.self_dual[t] {
                (RSymbol::G(g_of[t]), false)
            } else {
                (RSymbol::F(f_of[t]), fm.dual[s] ^ phi[t])
            }
        })
        .collect();
    Ok((
        rd,
        SymbolMap {
            entries,
            f_count,
            g_count,
        },
    ))
}

mod serde_impl {
    use super::*;
    use alloc::string::String;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct LitRepr(usize, bool);

    #[derive(Serialize, Deserialize)]
    struct ConRepr {
        kind: String,
        lhs: LitRepr,
        rhs: LitRepr,
    }

    #[derive(Serialize, Deserialize)]
    struct DescRepr {
        k: usize,
        constraints: Vec<ConRepr>,
    }

    #[derive(Serialize, Deserialize)]
    struct RedRepr {
        f: usize,
        g: usize,
        constraints: Vec<ConRepr>,
    }

    fn con_repr(kind: &ConstraintKind, lhs: &Literal, rhs: &Literal) -> ConRepr {
        ConRepr {
            kind: String::from(match kind {
                ConstraintKind::Tri => "tri",
                ConstraintKind::Eq => "eq",
            }),
            lhs: LitRepr(lhs.symbol + 1, lhs.dual),
            rhs: LitRepr(rhs.symbol + 1, rhs.dual),
        }
    }

    fn con_parse(r: &ConRepr) -> core::result::Result<Constraint, &'static str> {
        let kind = match r.kind.as_str() {
            "tri" => ConstraintKind::Tri,
            "eq" => ConstraintKind::Eq,
            _ => return Err("constraint kind must be \"tri\" or \"eq\""),
        };
        let lit = |l: &LitRepr| {
            if l.0 == 0 {
                Err("symbol indices are 1-based")
            } else {
                Ok(Literal {
                    symbol: l.0 - 1,
                    dual: l.1,
                })
            }
        };
        Ok(Constraint {
            kind,
            lhs: lit(&r.lhs)?,
            rhs: lit(&r.rhs)?,
        })
    }

    impl Serialize for Description {
        fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            DescRepr {
                k: self.k,
                constraints: self
                    .constraints
                    .iter()
                    .map(|c| con_repr(&c.kind, &c.lhs, &c.rhs))
                    .collect(),
            }
            .serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for Description {
        fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
            let repr = DescRepr::deserialize(d)?;
            let mut cs = Vec::with_capacity(repr.constraints.len());
            for c in &repr.constraints {
                cs.push(con_parse(c).map_err(D::Error::custom)?);
            }
            Description::new(repr.k, cs).map_err(D::Error::custom)
        }
    }

    impl Serialize for ReducedDescription {
        fn serialize<S: Serializer>(&self, s: S) -> core::result::Result<S::Ok, S::Error> {
            let n = self.f_count;
            let tri = ConstraintKind::Tri;
            RedRepr {
                f: self.f_count,
                g: self.g_count,
                constraints: self
                    .constraints
                    .iter()
                    .map(|c| match *c {
                        ReducedConstraint::FF(i, j) => {
                            con_repr(&tri, &Literal::plain(i), &Literal::plain(j))
                        }
                        ReducedConstraint::FFD(i, j) => {
                            con_repr(&tri, &Literal::plain(i), &Literal::dualed(j))
                        }
                        ReducedConstraint::FG(i, j) => {
                            con_repr(&tri, &Literal::plain(i), &Literal::plain(n + j))
                        }
                        ReducedConstraint::GG(j) => {
                            con_repr(&tri, &Literal::plain(n + j), &Literal::plain(n + j))
                        }
                    })
                    .collect(),
            }
            .serialize(s)
        }
    }

    impl<'de> Deserialize<'de> for ReducedDescription {
        fn deserialize<D: Deserializer<'de>>(d: D) -> core::result::Result<Self, D::Error> {
            let repr = RedRepr::deserialize(d)?;
            let n = repr.f;
            let mut cs = Vec::with_capacity(repr.constraints.len());
            for raw in &repr.constraints {
                let c = con_parse(raw).map_err(D::Error::custom)?;
                let bad = || D::Error::custom("constraint not in a reduced shape");
                if c.kind != ConstraintKind::Tri || c.lhs.dual {
                    return Err(bad());
                }
                let (a, b) = (c.lhs.symbol, c.rhs.symbol);
                let rc = if a < n && b < n {
                    if c.rhs.dual {
                        ReducedConstraint::FFD(a, b)
                    } else {
                        ReducedConstraint::FF(a, b)
                    }
                } else if a < n && b >= n && !c.rhs.dual {
                    ReducedConstraint::FG(a, b - n)
                } else if a >= n && a == b && !c.rhs.dual {
                    ReducedConstraint::GG(a - n)
                } else {
                    return Err(bad());
                };
                cs.push(rc);
            }
            ReducedDescription::new(repr.f, repr.g, cs).map_err(D::Error::custom)
        }
    }
}
