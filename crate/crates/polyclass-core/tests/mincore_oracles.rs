// SPDX-License-Identifier: MIT OR Apache-2.0

//! Oracle tests for truncated minions: construction from function
//! enumerations, minor lookups, binary-map extension, homomorphism search,
//! endomorphism enumeration, core detection and computation, and point-map
//! homomorphisms into finite clones.
//!
//! Expected values are frozen from hand computations on the canonical
//! minions; the heavier cross-checks live in the acceptance suite.

use polyclass_core::boolfun::{enumerate_idempotent, TruthTable};
use polyclass_core::canon::{core_enumerate, CoreId};
use polyclass_core::error::Budget;
use polyclass_core::mincore::{
    compute_core_truncated, endo_enumerate, extend_binary_map, hom_from_point_map, hom_search,
    is_core_truncated, ExtendOutcome, TruncatedHom, TruncatedMinion,
};
use polyclass_core::multisorted::{table_size, FiniteOp, MultiOp};
use polyclass_core::Error;

fn big_budget() -> Budget {
    Budget::new(200_000_000)
}

fn core(name: &str) -> CoreId {
    name.parse().expect("core name")
}

fn tt(arity: u8, hex: &str) -> TruthTable {
    TruthTable::from_hex(arity, hex).expect("truth table")
}

/// Single-sorted operation from one table.
fn op1(t: TruthTable) -> MultiOp {
    MultiOp::new(t.arity(), vec![t]).expect("single-sorted operation")
}

/// Truncation of a canonical minion, optionally with the symmetric arity-5
/// witness elements attached.
fn truncate(name: &str, cap: u8, sym5: bool) -> TruncatedMinion {
    let c = core(name);
    let mut b = big_budget();
    let elements: Vec<Vec<MultiOp>> = (1..=cap)
        .map(|n| core_enumerate(&c, n, &mut b).expect("enumeration"))
        .collect();
    let s5 = if sym5 {
        Some(core_enumerate(&c, 5, &mut b).expect("arity-5 enumeration"))
    } else {
        None
    };
    TruncatedMinion::from_function_minion(cap, elements, s5).expect("canonical truncation")
}

/// Truncation of the clone of all idempotent operations on one Boolean sort.
fn idempotent_clone(cap: u8) -> TruncatedMinion {
    let elements: Vec<Vec<MultiOp>> = (1..=cap)
        .map(|n| {
            enumerate_idempotent(n, cap)
                .expect("idempotent enumeration")
                .into_iter()
                .map(op1)
                .collect()
        })
        .collect();
    TruncatedMinion::from_function_minion(cap, elements, None).expect("idempotent truncation")
}

/// Truncation of the projection-only clone on one Boolean sort.
fn projections_minion(cap: u8) -> TruncatedMinion {
    let elements: Vec<Vec<MultiOp>> = (1..=cap)
        .map(|n| {
            (0..n)
                .map(|i| MultiOp::projection(1, n, i).expect("projection"))
                .collect()
        })
        .collect();
    TruncatedMinion::from_function_minion(cap, elements, None).expect("projection truncation")
}

// ---------------------------------------------------------------------------
// Construction.
// ---------------------------------------------------------------------------

#[test]
fn construction_freezes_sizes_and_orders() {
    // The trivial zero-sorted clone has exactly one member per arity.
    let t = truncate("T", 3, false);
    assert_eq!(t.sizes(), vec![1, 1, 1]);
    assert_eq!(t.sorts(), 0);

    // Projections only: one unary, two binary, three ternary members.
    let p = projections_minion(3);
    assert_eq!(p.sizes(), vec![1, 2, 3]);

    // The monotone chain minion on one sort: binary part {meet, x, y} and
    // eleven ternary members.
    let binf = truncate("Binf", 3, false);
    assert_eq!(binf.sizes(), vec![1, 3, 11]);
    assert_eq!(binf.element(2, 0).unwrap(), &op1(tt(2, "8")));
    assert_eq!(binf.element(2, 1).unwrap(), &op1(tt(2, "a")));
    assert_eq!(binf.element(2, 2).unwrap(), &op1(tt(2, "c")));

    // The monotone self-dual minion: binary part {x, y}, ternary part
    // {x, y, z, majority}.
    let dinf = truncate("Dinf", 3, false);
    assert_eq!(dinf.sizes(), vec![1, 2, 4]);

    // Elements are deduplicated and stored in ascending order regardless of
    // the input order.
    let shuffled = TruncatedMinion::from_function_minion(
        2,
        vec![
            vec![op1(tt(1, "2"))],
            vec![op1(tt(2, "c")), op1(tt(2, "a")), op1(tt(2, "c")), op1(tt(2, "8"))],
        ],
        None,
    )
    .expect("shuffled construction");
    assert_eq!(shuffled.sizes(), vec![1, 3]);
    assert_eq!(shuffled.element(2, 0).unwrap(), &op1(tt(2, "8")));

    // The free idempotent clone on one sort truncates to (1, 4, 64).
    let idem = idempotent_clone(3);
    assert_eq!(idem.sizes(), vec![1, 4, 64]);

    // Attaching the symmetric arity-5 members keeps them available.
    let with5 = truncate("Binf", 3, true);
    assert!(with5.sym5_elements().is_some());
    assert!(!with5.sym5_elements().unwrap().is_empty());
    let mut b = big_budget();
    assert_eq!(
        with5.sym5_elements().unwrap().len(),
        core_enumerate(&core("Binf"), 5, &mut b).unwrap().len()
    );
}

#[test]
fn closure_violations_are_rejected() {
    // Binary meet without its ternary minors is not minor-closed.
    let bad = TruncatedMinion::from_function_minion(
        3,
        vec![
            vec![op1(tt(1, "2"))],
            vec![op1(tt(2, "8")), op1(tt(2, "a")), op1(tt(2, "c"))],
            vec![MultiOp::projection(1, 3, 0).unwrap()],
        ],
        None,
    );
    assert!(matches!(bad, Err(Error::VerificationFailed { .. })));

    // Arity lists must match the cap and be nonempty.
    assert!(TruncatedMinion::from_function_minion(3, vec![vec![op1(tt(1, "2"))]], None).is_err());
    assert!(TruncatedMinion::from_function_minion(
        2,
        vec![vec![op1(tt(1, "2"))], vec![]],
        None
    )
    .is_err());

    // Mixed sort counts are rejected.
    assert!(TruncatedMinion::from_function_minion(
        2,
        vec![
            vec![op1(tt(1, "2"))],
            vec![MultiOp::projection(2, 2, 0).unwrap(), MultiOp::projection(2, 2, 1).unwrap()],
        ],
        None,
    )
    .is_err());

    // Arity-5 witnesses must be symmetric: a lone projection is not.
    let proj5 = MultiOp::projection(1, 5, 0).unwrap();
    assert!(TruncatedMinion::from_function_minion(
        2,
        vec![vec![op1(tt(1, "2"))], vec![op1(tt(2, "a")), op1(tt(2, "c"))]],
        Some(vec![proj5]),
    )
    .is_err());
}

#[test]
fn minor_lookups_are_functorial() {
    let binf = truncate("Binf", 3, false);

    // Identity words index identically.
    for arity in 1..=3u8 {
        let word: Vec<u8> = (0..arity).collect();
        for i in 0..binf.sizes()[arity as usize - 1] {
            assert_eq!(binf.minor_index(arity, &word, arity, i).unwrap(), i);
        }
    }

    // Composition: collapsing 3 -> 2 -> 2 agrees with the composed word.
    for i in 0..binf.sizes()[2] {
        for a in 0..8u32 {
            let alpha: Vec<u8> = (0..3).map(|j| ((a >> j) & 1) as u8).collect();
            for b in 0..4u32 {
                let beta: Vec<u8> = (0..2).map(|j| ((b >> j) & 1) as u8).collect();
                let composed: Vec<u8> = alpha.iter().map(|&j| beta[j as usize]).collect();
                let step = binf.minor_index(3, &alpha, 2, i).unwrap();
                assert_eq!(
                    binf.minor_index(2, &beta, 2, step).unwrap(),
                    binf.minor_index(3, &composed, 2, i).unwrap()
                );
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Binary-map extension.
// ---------------------------------------------------------------------------

#[test]
fn binary_maps_determine_extensions() {
    let binf = truncate("Binf", 3, false);

    // The identity binary map extends to the identity homomorphism.
    match extend_binary_map(&binf, &binf, &[0, 1, 2]).unwrap() {
        ExtendOutcome::Hom(h) => {
            assert_eq!(h.map(1).unwrap(), &[0]);
            assert_eq!(h.map(2).unwrap(), &[0, 1, 2]);
            let id3: Vec<usize> = (0..11).collect();
            assert_eq!(h.map(3).unwrap(), id3.as_slice());
        }
        ExtendOutcome::Failure { detail } => panic!("identity should extend: {detail}"),
    }

    // Sending the meet to a projection breaks minor commutation (the meet is
    // symmetric under swapping its arguments, a projection is not).
    match extend_binary_map(&binf, &binf, &[1, 1, 2]).unwrap() {
        ExtendOutcome::Hom(_) => panic!("meet cannot map to a projection"),
        ExtendOutcome::Failure { detail } => assert!(!detail.is_empty()),
    }
    match extend_binary_map(&binf, &binf, &[2, 1, 2]).unwrap() {
        ExtendOutcome::Hom(_) => panic!("meet cannot map to a projection"),
        ExtendOutcome::Failure { .. } => {}
    }

    // Malformed binary maps are errors, not failures.
    assert!(extend_binary_map(&binf, &binf, &[0, 1]).is_err());
    assert!(extend_binary_map(&binf, &binf, &[0, 1, 3]).is_err());

    // Caps of source and target must agree.
    let binf2 = truncate("Binf", 2, false);
    assert!(extend_binary_map(&binf, &binf2, &[0, 1, 2]).is_err());
}

#[test]
fn the_argument_swap_is_an_endomorphism() {
    // Binary part of the two-sorted monotone/self-dual mixed minion, in
    // ascending order: (meet, x), (meet, y), (x, x), (y, y).
    let cinf = truncate("Cinf", 3, true);
    assert_eq!(cinf.sizes()[0], 1);
    assert_eq!(cinf.sizes()[1], 4);
    assert_eq!(
        cinf.element(2, 0).unwrap(),
        &MultiOp::new(2, vec![tt(2, "8"), tt(2, "a")]).unwrap()
    );
    assert_eq!(
        cinf.element(2, 2).unwrap(),
        &MultiOp::new(2, vec![tt(2, "a"), tt(2, "a")]).unwrap()
    );

    // Swapping the two mixed members while fixing the projections extends to
    // a homomorphism that is bijective in every arity.
    match extend_binary_map(&cinf, &cinf, &[1, 0, 2, 3]).unwrap() {
        ExtendOutcome::Hom(h) => {
            assert_eq!(h.map(2).unwrap(), &[1, 0, 2, 3]);
            for arity in 1..=3u8 {
                let mut seen: Vec<usize> = h.map(arity).unwrap().to_vec();
                seen.sort_unstable();
                let all: Vec<usize> = (0..cinf.sizes()[arity as usize - 1]).collect();
                assert_eq!(seen, all, "bijective at arity {arity}");
            }
            let identity = match extend_binary_map(&cinf, &cinf, &[0, 1, 2, 3]).unwrap() {
                ExtendOutcome::Hom(h) => h,
                ExtendOutcome::Failure { detail } => panic!("identity failed: {detail}"),
            };
            assert_ne!(h, identity);
        }
        ExtendOutcome::Failure { detail } => panic!("swap should extend: {detail}"),
    }
}

// ---------------------------------------------------------------------------
// Homomorphism search.
// ---------------------------------------------------------------------------

#[test]
fn searches_find_and_refute_homomorphisms() {
    let mut b = big_budget();

    // Monotone self-dual members embed diagonally into the two-sorted mixed
    // minion: h maps to (h, h).
    let dinf = truncate("Dinf", 3, false);
    let cinf = truncate("Cinf", 3, false);
    let h = hom_search(&dinf, &cinf, &mut b).unwrap().expect("diagonal");
    assert_eq!(h.map(2).unwrap(), &[2, 3]);
    for (i, m3) in h.map(3).unwrap().iter().enumerate() {
        let t = dinf.element(3, i).unwrap().tables()[0];
        let expected = MultiOp::new(3, vec![t, t]).unwrap();
        assert_eq!(cinf.element(3, *m3).unwrap(), &expected);
    }

    // The mixed minion projects onto its monotone sort.
    let binf = truncate("Binf", 3, false);
    let h = hom_search(&cinf, &binf, &mut b).unwrap().expect("first sort");
    for (i, m3) in h.map(3).unwrap().iter().enumerate() {
        let t = cinf.element(3, i).unwrap().tables()[0];
        assert_eq!(binf.element(3, *m3).unwrap(), &op1(t));
    }

    // No homomorphism takes the monotone chain minion onto the self-dual
    // one: both images of the meet fail commutativity.
    let binf5 = truncate("Binf", 3, true);
    let d15 = truncate("D1", 3, true);
    assert!(hom_search(&binf5, &d15, &mut b).unwrap().is_none());

    // The self-dual minion does not map into the monotone chain minion: the
    // minority operation's forced image is not monotone below its dual.
    let d1 = truncate("D1", 3, false);
    let b1 = truncate("B1", 3, false);
    assert!(hom_search(&d1, &b1, &mut b).unwrap().is_none());

    // The trivial clone maps nowhere with sorts (projection images clash),
    // but everything maps onto the trivial clone.
    let trivial = truncate("T", 3, false);
    let a1 = truncate("A1", 3, false);
    assert!(hom_search(&trivial, &a1, &mut b).unwrap().is_none());
    assert!(hom_search(&a1, &trivial, &mut b).unwrap().is_some());

    // Search is deterministic: re-running returns the same homomorphism.
    let again = hom_search(&dinf, &cinf, &mut b).unwrap().expect("diagonal");
    assert_eq!(again.map(2).unwrap(), &[2, 3]);
}

#[test]
fn homs_that_agree_on_binary_parts_coincide() {
    let binf = truncate("Binf", 3, false);
    let identity = match extend_binary_map(&binf, &binf, &[0, 1, 2]).unwrap() {
        ExtendOutcome::Hom(h) => h,
        ExtendOutcome::Failure { detail } => panic!("identity failed: {detail}"),
    };

    // The term map h -> h meet dual(h) fixes the binary part of the monotone
    // chain minion pointwise, so it must be the identity everywhere.
    let by_terms = TruncatedHom::from_map(&binf, &binf, &mut |op: &MultiOp| {
        let t = op.tables()[0];
        let u = t.meet(&t.dual())?;
        MultiOp::new(op.arity(), vec![u])
    })
    .expect("term map is a homomorphism");
    assert_eq!(by_terms, identity);

    // Collapsing everything onto the first projection is not a homomorphism.
    let collapse = TruncatedHom::from_map(&binf, &binf, &mut |op: &MultiOp| {
        MultiOp::projection(1, op.arity(), 0)
    });
    assert!(matches!(collapse, Err(Error::VerificationFailed { .. })));
}

// ---------------------------------------------------------------------------
// Endomorphisms and cores.
// ---------------------------------------------------------------------------

#[test]
fn endomorphisms_fix_projections_on_idempotent_minions() {
    let cinf = truncate("Cinf", 3, false);
    let mut b = big_budget();
    let endos = endo_enumerate(&cinf, &mut b).unwrap();
    assert!(endos.len() >= 2, "identity and the swap at least");
    for e in &endos {
        assert_eq!(e.map(1).unwrap(), &[0]);
        assert_eq!(e.map(2).unwrap()[2], 2, "first projection fixed");
        assert_eq!(e.map(2).unwrap()[3], 3, "second projection fixed");
    }
}

#[test]
fn core_detection_matches_the_frozen_verdicts() {
    let mut b = big_budget();
    for name in [
        "A1", "B1", "D1", "A2", "B2", "C2", "D2", "Binf", "Cinf", "Dinf",
    ] {
        let m = truncate(name, 3, true);
        assert!(
            is_core_truncated(&m, &mut b).unwrap(),
            "{name} should be a core"
        );
    }

    // The projection-only clone is its own core.
    assert!(is_core_truncated(&projections_minion(3), &mut b).unwrap());

    // The free idempotent clone admits the non-bijective endomorphism
    // h -> h meet dual(h).
    assert!(!is_core_truncated(&idempotent_clone(3), &mut b).unwrap());
}

#[test]
fn core_computation_collapses_the_free_idempotent_clone() {
    let mut b = big_budget();
    let idem = idempotent_clone(3);
    let collapsed = compute_core_truncated(&idem, &mut b).unwrap();
    assert_eq!(collapsed.sizes(), vec![1, 3, 27]);
    assert!(is_core_truncated(&collapsed, &mut b).unwrap());

    // The image is exactly the truncation of the least nontrivial canonical
    // minion: all members lying below their own dual.
    let a1 = truncate("A1", 3, false);
    assert_eq!(collapsed, a1);

    // And it is two-way homomorphically equivalent to the input's core.
    assert!(hom_search(&collapsed, &a1, &mut b).unwrap().is_some());
    assert!(hom_search(&a1, &collapsed, &mut b).unwrap().is_some());
}

#[test]
fn core_computation_fixes_cores() {
    let mut b = big_budget();
    let dinf = truncate("Dinf", 3, true);
    assert_eq!(compute_core_truncated(&dinf, &mut b).unwrap(), dinf);

    let trivial = truncate("T", 3, false);
    assert_eq!(compute_core_truncated(&trivial, &mut b).unwrap(), trivial);
}

// ---------------------------------------------------------------------------
// Point-map homomorphisms into finite clones.
// ---------------------------------------------------------------------------

#[test]
fn point_maps_give_homomorphisms_into_finite_clones() {
    // Projections with the index map give back projections.
    let p = projections_minion(3);
    let hom = hom_from_point_map(&p, &[0, 1], 2).unwrap();
    for arity in 1..=3u8 {
        for (i, img) in hom[arity as usize - 1].iter().enumerate() {
            assert_eq!(img, &FiniteOp::projection(2, arity, i as u8).unwrap());
        }
    }

    // On the monotone chain minion, evaluating each member at the point
    // (0, 1) embeds every operation as its own finite table.
    let binf = truncate("Binf", 3, false);
    let hom = hom_from_point_map(&binf, &[0, 0, 1], 2).unwrap();
    for arity in 1..=3u8 {
        for (i, img) in hom[arity as usize - 1].iter().enumerate() {
            let t = binf.element(arity, i).unwrap().tables()[0];
            assert_eq!(img, &FiniteOp::from_truth_table(&t));
        }
    }

    // The construction always commutes with minors.
    for arity in 1..=3u8 {
        for i in 0..binf.sizes()[arity as usize - 1] {
            for m in 1..=3u8 {
                for word_id in 0..(m as u32).pow(arity as u32) {
                    let mut alpha = Vec::with_capacity(arity as usize);
                    let mut w = word_id;
                    for _ in 0..arity {
                        alpha.push((w % m as u32) as u8);
                        w /= m as u32;
                    }
                    let j = binf.minor_index(arity, &alpha, m, i).unwrap();
                    assert_eq!(
                        hom[m as usize - 1][j],
                        hom[arity as usize - 1][i].minor(&alpha, m).unwrap()
                    );
                }
            }
        }
    }

    // A constant point map sends everything to a constant operation.
    let hom = hom_from_point_map(&binf, &[0, 0, 0], 2).unwrap();
    for arity in 1..=3u8 {
        for img in &hom[arity as usize - 1] {
            assert_eq!(img, &FiniteOp::new(2, arity, vec![0; table_size(2, arity)]).unwrap());
        }
    }

    // Domain and length validation.
    assert!(matches!(
        hom_from_point_map(&binf, &[0, 0, 1], 0),
        Err(Error::ArityOutOfRange { .. })
    ));
    assert!(matches!(
        hom_from_point_map(&binf, &[0, 0, 1], 4),
        Err(Error::ArityOutOfRange { .. })
    ));
    assert!(matches!(
        hom_from_point_map(&binf, &[0, 0], 2),
        Err(Error::IndexOutOfRange { .. })
    ));
    assert!(matches!(
        hom_from_point_map(&binf, &[0, 2, 1], 2),
        Err(Error::IndexOutOfRange { .. })
    ));
}

// ---------------------------------------------------------------------------
// Budgets and dumps.
// ---------------------------------------------------------------------------

#[test]
fn budgets_are_enforced() {
    let idem = idempotent_clone(3);
    let mut tiny = Budget::new(3);
    assert!(matches!(
        endo_enumerate(&idem, &mut tiny),
        Err(Error::BudgetExceeded { .. })
    ));
}

#[test]
fn dumps_serialize_elements() {
    let binf = truncate("Binf", 3, true);
    let v = serde_json::to_value(&binf).unwrap();
    assert_eq!(v["cap"], 3);
    assert_eq!(v["sorts"], 1);
    assert_eq!(v["elements"].as_array().unwrap().len(), 3);
    assert_eq!(v["elements"][2].as_array().unwrap().len(), 11);
    assert!(v["sym5"].is_array());

    let trivial = truncate("T", 2, false);
    let v = serde_json::to_value(&trivial).unwrap();
    assert!(v["sym5"].is_null());
}
