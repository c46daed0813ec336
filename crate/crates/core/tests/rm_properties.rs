use proptest::prelude::*;
use rm_access::rm::{
    capacity, compose_from_layers, generate_sequence_quaternary_oracle, inner_product, nested_compose, walsh_row,
};
use rm_access::{generate_sequence, id_to_pair, pair_to_id, RmPair, UserId};

fn pair(m: usize, d: u128) -> RmPair {
    id_to_pair(UserId::new(d, m).unwrap())
}

/// Rank over GF(2) of a binary matrix given as rows.
fn gf2_rank(mut rows: Vec<Vec<u8>>) -> usize {
    let n = rows.len();
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..n).find(|&r| rows[r][c] == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..n {
            if r != rank && rows[r][c] == 1 {
                let pivot = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn roundtrip_exhaustive_small_orders() {
    for m in 2..=4 {
        for d in 0..capacity(m) {
            let id = UserId::new(d, m).unwrap();
            assert_eq!(pair_to_id(&id_to_pair(id)), id);
        }
    }
}

#[test]
fn distinct_ids_give_distinct_sequences() {
    for m in 2..=4 {
        let mut seen = std::collections::HashSet::new();
        for d in 0..capacity(m) {
            assert!(seen.insert(generate_sequence(&pair(m, d)).chips().to_vec()));
        }
    }
}

#[test]
fn quaternary_form_matches_bipolar_exhaustive() {
    for m in 2..=4 {
        let scale = 1.0 / ((1u64 << m) as f64).sqrt();
        for d in 0..capacity(m) {
            let p = pair(m, d);
            let quat = generate_sequence_quaternary_oracle(&p);
            let bip = generate_sequence(&p);
            for (q, &c) in quat.iter().zip(bip.chips()) {
                assert!((q.re - c as f64 * scale).abs() < 1e-15 && q.im.abs() < 1e-15, "m={m} d={d}");
            }
        }
    }
}

#[test]
fn inner_products_follow_the_rank_law() {
    for m in 3..=4 {
        for d1 in 0..capacity(m) {
            for d2 in d1 + 1..capacity(m) {
                let (p1, p2) = (pair(m, d1), pair(m, d2));
                let diff: Vec<Vec<u8>> = p1
                    .matrix()
                    .iter()
                    .zip(p2.matrix())
                    .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x ^ y).collect())
                    .collect();
                let rank = gf2_rank(diff);
                assert_eq!(rank % 2, 0);
                let r = rank / 2;
                let ip = inner_product(&generate_sequence(&p1), &generate_sequence(&p2))
                    .unwrap()
                    .abs();
                assert!(ip == 0 || ip == 1 << (m - r), "m={m} {d1} {d2}: ip {ip}, rank {rank}");
            }
        }
    }
}

#[test]
fn shared_top_layer_implies_shared_top_bit() {
    let m = 6;
    for d1 in (0..capacity(m)).step_by(97) {
        for d2 in (0..capacity(m)).step_by(89) {
            let (p1, p2) = (pair(m, d1), pair(m, d2));
            if p1.layer(m).unwrap() == p2.layer(m).unwrap() {
                assert_eq!(p1.b(0), p2.b(0));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn roundtrip_random(m in 5usize..=10, raw in any::<u128>()) {
        let id = UserId::new(raw % capacity(m), m).unwrap();
        prop_assert_eq!(pair_to_id(&id_to_pair(id)), id);
    }

    #[test]
    fn b_has_even_weight(m in 2usize..=12, raw in any::<u128>()) {
        let p = pair(m, raw % capacity(m));
        let wt: u32 = p.b_vector().iter().map(|&b| b as u32).sum();
        prop_assert_eq!(wt % 2, 0);
    }

    #[test]
    fn nested_structure_holds_at_every_layer(m in 2usize..=10, raw in any::<u128>()) {
        let p = pair(m, raw % capacity(m));
        for s in 2..=m {
            let whole = p.sub_sequence(s).unwrap();
            let half = p.sub_sequence(s - 1).unwrap();
            let v = walsh_row(&p.layer(s).unwrap());
            prop_assert_eq!(nested_compose(&half, &v).unwrap(), whole);
        }
        prop_assert_eq!(compose_from_layers(&p), generate_sequence(&p));
    }

    #[test]
    fn matrix_roundtrip(m in 2usize..=10, raw in any::<u128>()) {
        let p = pair(m, raw % capacity(m));
        let q = RmPair::from_matrix(&p.matrix(), &p.b_vector()).unwrap();
        prop_assert_eq!(q, p);
    }
}
