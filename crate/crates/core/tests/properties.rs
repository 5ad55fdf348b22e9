mod common;

use ecic::bounds::{alpha_bound, kappa_bound, singleton_bound};
use ecic::construct_search::{optimal_length_search, random_construct};
use ecic::decoder::{build_receiver_decoder, decode, exhaustive_correctness_check};
use ecic::field_linalg::{
    code_min_distance, code_min_distance_generic, coset_leader, parity_check_matrix, Elem, FMatrix, FVector, Field,
};
use ecic::index_codes::{
    generalized_independence_number, min_rank, receiver_margin, verify_ecic, verify_ic, LinearIndexCode,
};
use ecic::instance::IcsiInstance;
use ecic::Budgets;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const BUDGET: u64 = 1 << 22;

fn matrix(
    q: u32,
    rows: impl Strategy<Value = usize>,
    cols: impl Strategy<Value = usize>,
) -> impl Strategy<Value = FMatrix> {
    (rows, cols).prop_flat_map(move |(r, c)| {
        prop::collection::vec(prop::collection::vec(0..q as Elem, c), r)
            .prop_map(move |data| FMatrix::from_rows(&Field::new(q).unwrap(), c, &data).unwrap())
    })
}

/// Receivers as (demand, side-information bitmask) pairs over `n ≤ 4` messages.
fn instance() -> impl Strategy<Value = IcsiInstance> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0u8..16), 1..=4).prop_map(move |rx| {
            let demands = rx.iter().map(|&(f, _)| f).collect();
            let side = rx
                .iter()
                .map(|&(f, mask)| (0..n).filter(|&j| j != f && mask >> j & 1 == 1).collect())
                .collect();
            IcsiInstance::new(n, demands, side).unwrap()
        })
    })
}

fn code(q: u32, max_len: usize) -> impl Strategy<Value = LinearIndexCode> {
    instance().prop_flat_map(move |inst| {
        let n = inst.messages();
        matrix(q, Just(n), 1..=max_len).prop_map(move |l| LinearIndexCode::new(inst.clone(), l).unwrap())
    })
}

fn field_q() -> impl Strategy<Value = u32> {
    prop_oneof![Just(2u32), Just(3u32)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parity_check_annihilates_and_complements_rank(g in field_q().prop_flat_map(|q| matrix(q, 1usize..=4, 1usize..=7))) {
        let h = parity_check_matrix(&g);
        prop_assert_eq!(g.rank() + h.rank(), g.cols());
        prop_assert!(g.mul(&h.transpose()).unwrap().is_zero());
    }

    #[test]
    fn packed_and_generic_distance_agree(g in matrix(2, 1usize..=6, 1usize..=12)) {
        prop_assume!(!g.is_zero());
        prop_assert_eq!(code_min_distance(&g, BUDGET).unwrap(), code_min_distance_generic(&g, BUDGET).unwrap());
    }

    #[test]
    fn coset_leader_is_a_lightest_solution(h in field_q().prop_flat_map(|q| matrix(q, 1usize..=3, 1usize..=5)), seed: u64) {
        let f = h.field().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = FVector::new(&f, common::random_matrix(&mut rng, &f, 1, h.cols()).row(0).to_vec()).unwrap();
        let s = h.mul_vec(&e).unwrap();
        let leader = coset_leader(&h, &s, h.cols()).unwrap();
        prop_assert_eq!(h.mul_vec(&leader).unwrap(), s.clone());
        // Oracle: the lightest of all q^N vectors with the same syndrome.
        let q = f.order();
        let lightest = (0..q.pow(h.cols() as u32))
            .map(|mut k| {
                let v: Vec<Elem> = (0..h.cols()).map(|_| { let d = k % q; k /= q; d as Elem }).collect();
                FVector::new(&f, v).unwrap()
            })
            .filter(|v| h.mul_vec(v).unwrap() == s)
            .map(|v| v.weight())
            .min()
            .unwrap();
        prop_assert_eq!(leader.weight(), lightest);
    }

    #[test]
    fn index_code_test_is_radius_zero(c in field_q().prop_flat_map(|q| code(q, 5))) {
        prop_assert_eq!(verify_ic(&c), verify_ecic(&c, 0, BUDGET).unwrap().valid);
    }

    #[test]
    fn alpha_at_most_kappa(inst in instance(), q in field_q()) {
        let alpha = generalized_independence_number(&inst, 24).unwrap().alpha;
        let kappa = min_rank(&inst, &Field::new(q).unwrap(), 1 << 24).unwrap().kappa;
        prop_assert!(alpha <= kappa);
    }

    #[test]
    fn bounds_grow_with_delta(inst in instance()) {
        let f = Field::new(2).unwrap();
        let b = Budgets::default();
        let at = |d| (alpha_bound(&inst, &f, d, &b).unwrap(), kappa_bound(&inst, &f, d, &b).unwrap(), singleton_bound(&inst, &f, d, &b).unwrap());
        let (a0, k0, s0) = at(0);
        let (a1, k1, s1) = at(1);
        prop_assert!(a0 < a1 || a0 == 0);
        prop_assert!(k0 < k1 || k0 == 0);
        prop_assert_eq!(s1, s0 + 2);
        prop_assert!(a1 <= k1 && s1 <= k1);
    }

    #[test]
    fn random_construct_is_reproducible(inst in instance(), seed: u64) {
        let f = Field::new(2).unwrap();
        let b = Budgets::default();
        let len = inst.messages() + 2;
        let a = random_construct(&inst, &f, 1, len, 5, seed, None, &b).unwrap();
        let z = random_construct(&inst, &f, 1, len, 5, seed, None, &b).unwrap();
        prop_assert_eq!(a, z);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn decoder_succeeds_exactly_on_valid_codes(c in code(2, 5), delta in 0usize..=1) {
        if !verify_ic(&c) {
            // Some receiver cannot even decode error-free words.
            prop_assert!(exhaustive_correctness_check(&c, delta, BUDGET).is_err());
            return Ok(());
        }
        let rep = exhaustive_correctness_check(&c, delta, BUDGET).unwrap();
        prop_assert_eq!(rep.passed, verify_ecic(&c, delta, BUDGET).unwrap().valid);
        if rep.passed {
            prop_assert_eq!(rep.relevance_violations, 0);
        }
    }

    #[test]
    fn estimate_reproduces_the_syndrome(c in code(3, 5), seed: u64) {
        let f = c.field().clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = FVector::new(&f, common::random_matrix(&mut rng, &f, 1, c.instance().messages()).row(0).to_vec()).unwrap();
        let e = FVector::new(&f, common::random_matrix(&mut rng, &f, 1, c.length()).row(0).to_vec()).unwrap();
        let y = c.encode(&x).unwrap().add(&e).unwrap();
        for i in 0..c.instance().receivers() {
            let dec = build_receiver_decoder(&c, i).unwrap();
            let side: Vec<Elem> = dec.frame.side_info.iter().map(|&j| x.get(j)).collect();
            let out = decode(&dec, &y, &side, c.length());
            // Decoding is refused exactly where the demanded symbol is undetermined.
            prop_assert_eq!(out.is_err(), receiver_margin(&c, i, BUDGET).unwrap() == 0);
            let Ok(out) = out else { continue };
            prop_assert_eq!(dec.parity.mul_vec(&out.error_estimate).unwrap(), dec.parity.mul_vec(&e).unwrap());
            prop_assert!(out.estimate_weight <= e.weight());
        }
    }

    #[test]
    fn optimum_lies_between_the_bounds(inst in instance(), delta in 0usize..=1) {
        let f = Field::new(2).unwrap();
        let b = Budgets::default();
        let out = optimal_length_search(&inst, &f, delta, &b).unwrap();
        let opt = out.optimal_length.unwrap();
        prop_assert!(alpha_bound(&inst, &f, delta, &b).unwrap() <= opt);
        prop_assert!(opt <= kappa_bound(&inst, &f, delta, &b).unwrap());
        if let Some(w) = out.witness {
            prop_assert!(verify_ecic(&w, delta, BUDGET).unwrap().valid);
        }
    }
}
