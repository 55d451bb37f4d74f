// SPDX-License-Identifier: MIT OR Apache-2.0

//! Release acceptance suite: one test per criterion.  Each test prints a
//! single `[criterion N] PASS` line (visible with `--nocapture`) summarizing
//! what was verified and how long the checked operation took.

use std::collections::BTreeSet;
use std::time::Instant;

use polyclass_core::boolfun::{enumerate_idempotent, Sym5Profile, TruthTable};
use polyclass_core::canon::{
    core_enumerate, core_for_each, membership, poset_leq, table1_hom, CoreId,
};
use polyclass_core::classify::classify_relations;
use polyclass_core::descriptions::{
    apt_solve, to_reduced, CnfFormula, CnfLit, Constraint, ConstraintKind, Description, Literal,
};
use polyclass_core::error::Budget;
use polyclass_core::mincore::{
    compute_core_truncated, hom_search, is_core_truncated, TruncatedHom, TruncatedMinion,
};
use polyclass_core::multisorted::{MultiOp, SortedSignature, Structure, TypedRelation};
use polyclass_core::translate::classify_finite;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// Shared helpers.
// ---------------------------------------------------------------------------

fn big_budget() -> Budget {
    Budget::new(400_000_000)
}

fn core(name: &str) -> CoreId {
    name.parse().expect("core name")
}

fn tt(arity: u8, hex: &str) -> TruthTable {
    TruthTable::from_hex(arity, hex).expect("hex table")
}

fn mop(arity: u8, hexes: &[&str]) -> MultiOp {
    MultiOp::new(arity, hexes.iter().map(|h| tt(arity, h)).collect()).expect("multisorted op")
}

/// A Boolean structure from binary relations given as (type, tuple list).
fn structure(k: usize, rels: &[(usize, usize, &[[u8; 2]])]) -> Structure {
    let relations = rels
        .iter()
        .map(|&(i, j, tuples)| {
            let set: BTreeSet<Vec<u8>> = tuples.iter().map(|t| t.to_vec()).collect();
            TypedRelation::new(vec![i, j], set)
        })
        .collect();
    Structure::new(SortedSignature::boolean(k), relations).expect("valid structure")
}

/// A one-sorted structure on the domain `{0, .., size-1}` from binary tuples.
fn finite(size: u8, tuples: &[[u8; 2]]) -> Structure {
    let set: BTreeSet<Vec<u8>> = tuples.iter().map(|t| t.to_vec()).collect();
    Structure::new(
        SortedSignature::new(vec![(0..size).collect()]).expect("carrier"),
        vec![TypedRelation::new(vec![0, 0], set)],
    )
    .expect("valid structure")
}

/// The cap-`cap` truncation of a canonical core, optionally with the
/// symmetric arity-5 slice attached.
fn truncate(name: &str, cap: u8, sym5: bool) -> TruncatedMinion {
    let id = core(name);
    let mut b = big_budget();
    let elements: Vec<Vec<MultiOp>> = (1..=cap)
        .map(|n| core_enumerate(&id, n, &mut b).expect("enumeration"))
        .collect();
    let s5 = sym5.then(|| core_enumerate(&id, 5, &mut b).expect("arity-5 slice"));
    TruncatedMinion::from_function_minion(cap, elements, s5).expect("canonical truncation")
}

const LEQ: &[[u8; 2]] = &[[0, 0], [0, 1], [1, 1]];
const NEQ: &[[u8; 2]] = &[[0, 1], [1, 0]];
const NAND_GRAPH: &[[u8; 2]] = &[[0, 0], [0, 1], [1, 0]];

// ---------------------------------------------------------------------------
// 1. Binary-part tables of the canonical minions.
// ---------------------------------------------------------------------------

#[test]
fn criterion_01_binary_part_tables() {
    let t0 = Instant::now();
    let and = "8";
    let x = "a";
    let y = "c";

    let binary_part = |name: &str| -> BTreeSet<MultiOp> {
        core_enumerate(&core(name), 2, &mut big_budget())
            .expect("binary part")
            .into_iter()
            .collect()
    };

    let dinf: BTreeSet<MultiOp> = [mop(2, &[x]), mop(2, &[y])].into_iter().collect();
    assert_eq!(binary_part("Dinf"), dinf, "Dinf binary part");

    let binf: BTreeSet<MultiOp> = [mop(2, &[x]), mop(2, &[y]), mop(2, &[and])]
        .into_iter()
        .collect();
    assert_eq!(binary_part("Binf"), binf, "Binf binary part");

    let cinf: BTreeSet<MultiOp> = [
        mop(2, &[and, x]),
        mop(2, &[and, y]),
        mop(2, &[x, x]),
        mop(2, &[y, y]),
    ]
    .into_iter()
    .collect();
    assert_eq!(binary_part("Cinf"), cinf, "Cinf binary part");

    for k in 1usize..=3 {
        let mut expected: BTreeSet<MultiOp> = BTreeSet::new();
        for tail in [x, y] {
            for i in 0..=k {
                let hexes: Vec<&str> = (0..k).map(|s| if s < i { and } else { tail }).collect();
                expected.insert(mop(2, &hexes));
            }
        }
        assert_eq!(expected.len(), 2 * k + 1, "2k+1 binary members at k={k}");
        let a = binary_part(&format!("A{k}"));
        let b = binary_part(&format!("B{k}"));
        assert_eq!(a, expected, "A{k} binary part");
        assert_eq!(b, expected, "B{k} binary part");
    }

    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 1, "binary parts took {elapsed:?}");
    println!(
        "[criterion 1] PASS — binary parts of Dinf/Binf/Cinf and A1..A3=B1..B3 \
         match the closed-form tables ({elapsed:?})"
    );
}

// ---------------------------------------------------------------------------
// 2. The four-sorted running example, end to end at cap 4.
// ---------------------------------------------------------------------------

#[test]
fn criterion_02_running_example() {
    let gamma = structure(
        4,
        &[
            (0, 1, NEQ),
            (1, 2, LEQ),
            (2, 3, NAND_GRAPH),
        ],
    );
    let t0 = Instant::now();
    let report = classify_relations(&gamma, 4, &mut big_budget()).expect("classification");
    let elapsed = t0.elapsed();
    assert_eq!(report.core, core("A2"));
    assert!(report.verified, "witnesses must verify");
    assert_eq!(report.forward_terms.len(), 2, "one term per A2 sort");
    assert!(elapsed.as_secs() < 10, "cap-4 classification took {elapsed:?}");
    println!(
        "[criterion 2] PASS — four-sorted running example classifies to A2 with verified \
         witnesses at arities 1..=4 plus the symmetric arity-5 slice ({elapsed:?})"
    );
}

// ---------------------------------------------------------------------------
// 3. Single-relation battery.
// ---------------------------------------------------------------------------

#[test]
fn criterion_03_single_relation_battery() {
    let t0 = Instant::now();
    let cases: Vec<(Structure, &str)> = vec![
        (structure(0, &[]), "T"),
        (structure(1, &[(0, 0, LEQ)]), "Binf"),
        (structure(1, &[(0, 0, NEQ)]), "D1"),
        (structure(1, &[(0, 0, NAND_GRAPH)]), "B1"),
        (structure(2, &[(0, 1, LEQ), (1, 1, NEQ)]), "D2"),
    ];
    for (gamma, expected) in &cases {
        let report = classify_relations(gamma, 3, &mut big_budget()).expect("classification");
        assert_eq!(report.core, core(expected), "battery case {expected}");
        assert!(report.verified, "battery case {expected} must verify");
    }
    println!(
        "[criterion 3] PASS — battery {{∅→T, ≤→Binf, ≠→D1, co-(1,1)→B1, f⊲g→D2}} \
         classified and verified ({:?})",
        t0.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 4. Reducer soundness on a random corpus with two-way truncated homs.
// ---------------------------------------------------------------------------

fn random_description(rng: &mut ChaCha8Rng, k: usize, max_constraints: usize) -> Description {
    let c = rng.gen_range(0..=max_constraints);
    let mut constraints = Vec::new();
    for _ in 0..c {
        let kind = if rng.gen_ratio(3, 4) {
            ConstraintKind::Tri
        } else {
            ConstraintKind::Eq
        };
        constraints.push(Constraint {
            kind,
            lhs: Literal {
                symbol: rng.gen_range(0..k),
                dual: rng.gen_bool(0.5),
            },
            rhs: Literal {
                symbol: rng.gen_range(0..k),
                dual: rng.gen_bool(0.5),
            },
        });
    }
    Description::new(k, constraints).expect("random description")
}

/// Variable-identification patterns used to spot-check minor commutation on
/// the clones that are too large for the fully verified hom construction.
fn alpha_family(arity: u8) -> Vec<(Vec<u8>, u8)> {
    let mut family = vec![(vec![0; arity as usize], 1)];
    for mask in 0..(1u32 << arity) {
        let alpha: Vec<u8> = (0..arity).map(|i| ((mask >> i) & 1) as u8).collect();
        family.push((alpha, 2));
    }
    family
}

#[test]
fn criterion_04_reducer_soundness_corpus() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_2026);
    let cases = 500usize;
    let mut fully_verified = 0usize;
    for case in 0..cases {
        let k = rng.gen_range(1..=3usize);
        let d = random_description(&mut rng, k, 4);
        let (rd, sm) = to_reduced(&d).expect("reduction");
        rd.validate().expect("reduced-form invariants");

        let mut orig_parts: Vec<Vec<MultiOp>> = Vec::new();
        let mut red_parts: Vec<Vec<MultiOp>> = Vec::new();
        let mut total = 0usize;
        for arity in 1..=3u8 {
            let orig = d.clo_enumerate(arity, &mut big_budget()).expect("clone");
            let red = rd.clo_enumerate(arity, &mut big_budget()).expect("clone");
            assert_eq!(orig.len(), red.len(), "case {case}: sizes at arity {arity}");
            total += orig.len() + red.len();
            orig_parts.push(orig);
            red_parts.push(red);
        }

        // The symbol map gives mutually inverse member bijections.
        for a in 0..3usize {
            let red_set: BTreeSet<&MultiOp> = red_parts[a].iter().collect();
            let orig_set: BTreeSet<&MultiOp> = orig_parts[a].iter().collect();
            for t in &orig_parts[a] {
                let image = sm.project(t).expect("projection");
                assert!(red_set.contains(&image), "case {case}: projection lands inside");
                assert_eq!(sm.expand(&image).expect("expansion"), *t, "case {case}");
            }
            for t in &red_parts[a] {
                let image = sm.expand(t).expect("expansion");
                assert!(orig_set.contains(&image), "case {case}: expansion lands inside");
            }
        }

        if total <= 60_000 {
            // Full hom construction: every member mapped, every minor of
            // every image re-checked inside the target truncation.
            let dm = TruncatedMinion::from_function_minion(3, orig_parts, None)
                .expect("original truncation");
            let rm = TruncatedMinion::from_function_minion(3, red_parts, None)
                .expect("reduced truncation");
            TruncatedHom::from_map(&dm, &rm, &mut |op| sm.project(op))
                .expect("forward truncated hom");
            TruncatedHom::from_map(&rm, &dm, &mut |op| sm.expand(op))
                .expect("backward truncated hom");
            fully_verified += 1;
        } else {
            // Near-free clone: verify minor commutation pointwise instead.
            for (a, part) in red_parts.iter().enumerate() {
                let arity = (a + 1) as u8;
                for t in part {
                    let x = sm.expand(t).expect("expansion");
                    for (alpha, m) in alpha_family(arity) {
                        assert_eq!(
                            sm.expand(&t.minor(&alpha, m).expect("minor")).expect("expansion"),
                            x.minor(&alpha, m).expect("minor"),
                            "case {case}: minor commutation"
                        );
                    }
                }
            }
        }
    }
    assert!(
        fully_verified * 10 >= cases * 9,
        "only {fully_verified}/{cases} cases admitted the fully verified hom construction"
    );
    println!(
        "[criterion 4] PASS — {cases} random descriptions reduced; invariants hold and two-way \
         cap-3 homs exist ({fully_verified} via the fully verified construction) ({:?})",
        t0.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 5. Core property of every canonical truncation.
// ---------------------------------------------------------------------------

#[test]
fn criterion_05_canonical_truncations_are_cores() {
    let t0 = Instant::now();
    let names = [
        "T", "A1", "B1", "A2", "B2", "A3", "B3", "Binf", "D1", "C2", "D2", "C3", "D3", "Cinf",
        "Dinf",
    ];
    for name in names {
        let m = truncate(name, 3, true);
        assert!(
            is_core_truncated(&m, &mut big_budget()).expect("core check"),
            "{name} truncation must be a core"
        );
    }
    println!(
        "[criterion 5] PASS — all {} canonical cap-3 truncations (with symmetric-5 witnesses) \
         pass is_core_truncated ({:?})",
        names.len(),
        t0.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 6. The homomorphism order: ladder, generator homs, refutations.
// ---------------------------------------------------------------------------

#[test]
fn criterion_06_poset_ladder_generators_refutations() {
    let t0 = Instant::now();
    let names = [
        "T", "A1", "B1", "A2", "B2", "A3", "B3", "Binf", "D1", "C2", "D2", "C3", "D3", "Cinf",
        "Dinf",
    ];
    let covers = [
        ("A1", "T"),
        ("B1", "A1"),
        ("A2", "B1"),
        ("B2", "A2"),
        ("A3", "B2"),
        ("B3", "A3"),
        ("Binf", "B3"),
        ("C2", "D1"),
        ("D2", "C2"),
        ("C3", "D2"),
        ("D3", "C3"),
        ("Cinf", "D3"),
        ("Dinf", "Cinf"),
        ("D1", "A1"),
        ("D2", "A2"),
        ("D3", "A3"),
        ("C2", "B1"),
        ("C3", "B2"),
        ("Cinf", "Binf"),
    ];

    // Reflexive-transitive closure of the two-chain ladder.
    let index = |n: &str| names.iter().position(|m| *m == n).expect("known core");
    let mut closure = [[false; 15]; 15];
    for i in 0..15 {
        closure[i][i] = true;
    }
    for (a, b) in covers {
        closure[index(a)][index(b)] = true;
    }
    for m in 0..15 {
        for i in 0..15 {
            for j in 0..15 {
                if closure[i][m] && closure[m][j] {
                    closure[i][j] = true;
                }
            }
        }
    }
    for (i, a) in names.iter().enumerate() {
        for (j, b) in names.iter().enumerate() {
            assert_eq!(
                poset_leq(&core(a), &core(b)),
                closure[i][j],
                "poset_leq({a}, {b})"
            );
        }
    }

    // Every generator hom maps members to members at arities 1..=4 and on
    // the symmetric arity-5 slice.
    let mut images = 0usize;
    for (a, b) in covers {
        let (src, dst) = (core(a), core(b));
        let sm = table1_hom(&src, &dst).expect("generator hom");
        for arity in [1u8, 2, 3, 4, 5] {
            let mut bad = 0usize;
            core_for_each(&src, arity, &mut big_budget(), &mut |op| {
                let image = sm.apply(op)?;
                if !membership(&dst, &image)? {
                    bad += 1;
                }
                images += 1;
                Ok(())
            })
            .expect("stream");
            assert_eq!(bad, 0, "{a} -> {b} images at arity {arity}");
        }
    }

    // The four non-inequality families are exhaustively refuted.
    let refuted = [
        ("Binf", "D1"),
        ("Cinf", "Dinf"),
        ("D2", "B2"),
        ("D3", "B3"),
        ("C2", "A2"),
        ("C3", "A3"),
    ];
    for (a, b) in refuted {
        let m = truncate(a, 3, true);
        let n = truncate(b, 3, true);
        assert!(
            hom_search(&m, &n, &mut big_budget())
                .expect("search")
                .is_none(),
            "{a} -> {b} must have no homomorphism"
        );
    }

    println!(
        "[criterion 6] PASS — poset_leq matches the ladder on all 225 pairs; 19 generator homs \
         verified on {images} member images up to arity 4 plus symmetric 5; 6 non-inequalities \
         refuted at cap 3 ({:?})",
        t0.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 7. Symmetric arity-5 comparisons against definitional brute force.
// ---------------------------------------------------------------------------

#[test]
fn criterion_07_symmetric_five_comparisons() {
    let t0 = Instant::now();
    // Value of the profile-`i` symmetric operation on a 5-bit assignment.
    let val = |i: u8, mask: u32| -> bool {
        match mask.count_ones() {
            0 => false,
            5 => true,
            w => (i >> (w - 1)) & 1 == 1,
        }
    };
    let val_dual = |i: u8, mask: u32| -> bool { !val(i, !mask & 31) };
    let brute_leq = |p: u8, q: u8| (0u32..32).all(|m| !val(p, m) || val(q, m));
    let brute_tri = |p: u8, q: u8| {
        (0u32..32).all(|a| (0u32..32).all(|b| (a & !b) != 0 || !val(p, a) || val(q, b)))
    };
    let brute_leq_dual = |p: u8| (0u32..32).all(|m| !val(p, m) || val_dual(p, m));
    let brute_tri_dual = |p: u8| {
        (0u32..32).all(|a| (0u32..32).all(|b| (a & !b) != 0 || !val(p, a) || val_dual(p, b)))
    };
    let brute_self_dual = |p: u8| (0u32..32).all(|m| val(p, m) == val_dual(p, m));

    for i in 0..16u8 {
        let p = Sym5Profile::from_index(i);
        assert_eq!(p.leq_dual(), brute_leq_dual(i), "h ≤ h^d at {i}");
        assert_eq!(p.triangle_dual(), brute_tri_dual(i), "h ⊲ h^d at {i}");
        assert_eq!(p.is_self_dual(), brute_self_dual(i), "h = h^d at {i}");
        for j in 0..16u8 {
            let q = Sym5Profile::from_index(j);
            assert_eq!(p.leq(&q), brute_leq(i, j), "≤ at {i},{j}");
            assert_eq!(p.triangle(&q), brute_tri(i, j), "⊲ at {i},{j}");
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 1, "profile comparisons took {elapsed:?}");
    println!(
        "[criterion 7] PASS — all 16×16 profile pairs agree with 2^5 brute force on the five \
         comparison relations ({elapsed:?})"
    );
}

// ---------------------------------------------------------------------------
// 8. 2-SAT solver against exhaustive assignment enumeration.
// ---------------------------------------------------------------------------

#[test]
fn criterion_08_two_sat_oracle() {
    let t0 = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_2008);
    for case in 0..1000 {
        let vars = rng.gen_range(1..=12usize);
        let n_clauses = rng.gen_range(0..=16);
        let clauses: Vec<[CnfLit; 2]> = (0..n_clauses)
            .map(|_| {
                [
                    CnfLit {
                        var: rng.gen_range(0..vars),
                        negated: rng.gen_bool(0.5),
                    },
                    CnfLit {
                        var: rng.gen_range(0..vars),
                        negated: rng.gen_bool(0.5),
                    },
                ]
            })
            .collect();
        let formula = CnfFormula::new(vars, clauses.clone()).expect("formula");
        let got = apt_solve(&formula);
        let want = (0u32..1 << vars).any(|mask| {
            clauses
                .iter()
                .all(|c| c.iter().any(|l| (mask >> l.var & 1 == 1) != l.negated))
        });
        assert_eq!(got.is_some(), want, "case {case}: satisfiability verdict");
        if let Some(a) = got {
            assert!(
                clauses.iter().all(|c| c.iter().any(|l| a[l.var] != l.negated)),
                "case {case}: returned assignment must satisfy"
            );
        }
    }
    println!(
        "[criterion 8] PASS — apt_solve agrees with exhaustive enumeration on 1000 random \
         formulas with ≤ 12 variables ({:?})",
        t0.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 9. The operation-algebra law suite, exhaustive at arity ≤ 3.
// ---------------------------------------------------------------------------

fn all_tables(arity: u8) -> Vec<TruthTable> {
    (0..1u64 << (1u32 << arity))
        .map(|bits| TruthTable::new(arity, bits).expect("table"))
        .collect()
}

#[test]
fn criterion_09_law_suite() {
    let t0 = Instant::now();
    for arity in 1..=3u8 {
        let tables = all_tables(arity);
        let n = tables.len();

        // Involution and De Morgan on all pairs.
        for f in &tables {
            assert_eq!(f.dual().dual(), *f, "dual involution");
        }
        for f in &tables {
            for g in &tables {
                assert_eq!(
                    f.meet(g).unwrap().dual(),
                    f.dual().join(&g.dual()).unwrap(),
                    "De Morgan (meet)"
                );
                assert_eq!(
                    f.join(g).unwrap().dual(),
                    f.dual().meet(&g.dual()).unwrap(),
                    "De Morgan (join)"
                );
            }
        }

        // Relation matrices once, laws from the matrices.
        let mut leq = vec![false; n * n];
        let mut tri = vec![false; n * n];
        for (i, f) in tables.iter().enumerate() {
            for (j, g) in tables.iter().enumerate() {
                leq[i * n + j] = f.leq(g).unwrap();
                tri[i * n + j] = f.triangle(g).unwrap();
            }
        }

        // Skew symmetry, ⊲ ⇒ ≤, and ⊲-reflexivity ⇔ monotonicity.
        for (i, f) in tables.iter().enumerate() {
            assert_eq!(tri[i * n + i], f.is_monotone(), "⊲ reflexivity");
            for (j, g) in tables.iter().enumerate() {
                assert_eq!(
                    f.triangle(&g.dual()).unwrap(),
                    g.triangle(&f.dual()).unwrap(),
                    "skew symmetry"
                );
                if tri[i * n + j] {
                    assert!(leq[i * n + j], "⊲ implies ≤");
                }
            }
        }

        // Strong transitivity over all triples.
        for i in 0..n {
            for j in 0..n {
                let lij = leq[i * n + j];
                let tij = tri[i * n + j];
                if !lij && !tij {
                    continue;
                }
                for k in 0..n {
                    if lij && tri[j * n + k] {
                        assert!(tri[i * n + k], "≤;⊲ transitivity");
                    }
                    if tij && leq[j * n + k] {
                        assert!(tri[i * n + k], "⊲;≤ transitivity");
                    }
                }
            }
        }

        // Compatibility of ⊲ with meet and join over all related quadruples.
        let position: std::collections::BTreeMap<TruthTable, usize> = tables
            .iter()
            .enumerate()
            .map(|(i, t)| (*t, i))
            .collect();
        let meet_ix: Vec<usize> = tables
            .iter()
            .flat_map(|f| {
                tables
                    .iter()
                    .map(|g| position[&f.meet(g).unwrap()])
                    .collect::<Vec<_>>()
            })
            .collect();
        let join_ix: Vec<usize> = tables
            .iter()
            .flat_map(|f| {
                tables
                    .iter()
                    .map(|g| position[&f.join(g).unwrap()])
                    .collect::<Vec<_>>()
            })
            .collect();
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| tri[i * n + j])
            .collect();
        for &(f, g) in &pairs {
            for &(f2, g2) in &pairs {
                assert!(
                    tri[meet_ix[f * n + f2] * n + meet_ix[g * n + g2]],
                    "compatibility with meet"
                );
                assert!(
                    tri[join_ix[f * n + f2] * n + join_ix[g * n + g2]],
                    "compatibility with join"
                );
            }
        }

        // The self-dual interpolation: g = g^d and f ≤ f^d give a self-dual
        // h = (g ∨ f) ∧ f^d above f.
        for g in tables.iter().filter(|g| g.is_self_dual()) {
            for f in tables.iter().filter(|f| f.leq(&f.dual()).unwrap()) {
                let h = g.join(f).unwrap().meet(&f.dual()).unwrap();
                assert!(f.leq(&h).unwrap(), "f ≤ h");
                assert!(h.is_self_dual(), "h self-dual");
            }
        }
    }
    println!(
        "[criterion 9] PASS — involution, De Morgan, skew symmetry, strong transitivity, \
         meet/join compatibility, and the self-dual interpolation hold exhaustively at \
         arity ≤ 3 ({:?})",
        t0.elapsed()
    );
}

// ---------------------------------------------------------------------------
// 10. Finite-domain translation of the worked examples.
// ---------------------------------------------------------------------------

#[test]
fn criterion_10_translation_worked_examples() {
    let t0 = Instant::now();

    let diseq = finite(3, &[[0, 1], [1, 0]]);
    let report = classify_finite(&diseq, 3, &mut big_budget()).expect("classification");
    assert_eq!(report.report.core, core("D1"));
    assert!(report.report.verified);
    assert_eq!(report.sort_dictionary, vec![[0, 1]]);
    assert!(
        report
            .report
            .log
            .iter()
            .any(|l| l.contains("restriction homomorphism verified pointwise")),
        "restriction check must run for the disequality example"
    );

    let chain = finite(3, &[[0, 1], [0, 2], [1, 2]]);
    let report = classify_finite(&chain, 3, &mut big_budget()).expect("classification");
    assert_eq!(report.report.core, core("B1"));
    assert!(report.report.verified);
    assert_eq!(report.sort_dictionary, vec![[0, 1], [1, 2]]);
    assert!(
        report
            .report
            .log
            .iter()
            .any(|l| l.contains("verified pointwise on 81 binary polymorphisms")),
        "restriction check must cover all 81 binary polymorphisms of the cored chain"
    );

    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs() < 60, "translation examples took {elapsed:?}");
    println!(
        "[criterion 10] PASS — worked finite structures classify to D1 and B1 with the \
         restriction homomorphism verified pointwise on every binary polymorphism ({elapsed:?})"
    );
}

// ---------------------------------------------------------------------------
// 11. The core of the free idempotent clone.
// ---------------------------------------------------------------------------

#[test]
fn criterion_11_free_clone_core() {
    let t0 = Instant::now();
    let elements: Vec<Vec<MultiOp>> = (1..=3u8)
        .map(|arity| {
            enumerate_idempotent(arity, 3)
                .expect("idempotent tables")
                .into_iter()
                .map(|t| MultiOp::new(arity, vec![t]).expect("one-sorted member"))
                .collect()
        })
        .collect();
    let free = TruncatedMinion::from_function_minion(3, elements, None).expect("free truncation");
    assert_eq!(free.sizes(), vec![1, 4, 64]);

    let collapsed = compute_core_truncated(&free, &mut big_budget()).expect("core computation");
    assert_eq!(collapsed.sizes(), vec![1, 3, 27]);

    let a1 = truncate("A1", 3, false);
    assert!(
        hom_search(&collapsed, &a1, &mut big_budget())
            .expect("search")
            .is_some(),
        "core -> A1"
    );
    assert!(
        hom_search(&a1, &collapsed, &mut big_budget())
            .expect("search")
            .is_some(),
        "A1 -> core"
    );
    println!(
        "[criterion 11] PASS — the cap-3 free idempotent clone cores to sizes [1, 3, 27], \
         two-way hom-equivalent to the A1 truncation ({:?})",
        t0.elapsed()
    );
}
