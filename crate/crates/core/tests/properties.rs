//! Randomized property suite for the engine invariants, driven by seeded
//! generators so every run is reproducible.

use ahmd_core::bits::SimplexSet;
use ahmd_core::capacity::{ocap_closed_set, ocap_element, TraceData};
use ahmd_core::cover::{
    greedy_refinement, join, mediant_bound, ord, pullback_cover, refinement_dimension, Cover,
};
use ahmd_core::nerve::{
    breve_value, coords_span_nerve_simplex, nerve, nerve_map, subordinate_partition, theta,
    verify_partition,
};
use ahmd_core::rat::{rat, rat_int, rat_ratio_u, Rat};
use ahmd_core::simplicial::{
    closure_and_boundary, preimage, ClosedSet, Complex, OpenSet, PLFunction, Subdivision, Tower,
};
use ahmd_core::system::{
    compose_maps, mean_dimension_sequence, pullback_stage_cover, AHSystem, DiagonalMap, Leg,
};
use ahmd_core::variation::{oscillation, variation_dimension, FunctionFamily};
use ahmd_testkit as kit;
use num::Signed;
use proptest::prelude::*;
use rand::Rng as _;

const BUDGET: u64 = 1_000_000;

#[test]
fn preimage_commutes_with_union_and_intersection() {
    let mut rng = kit::rng(101);
    for _ in 0..200 {
        let dom = kit::random_base(&mut rng);
        let cod = kit::random_base(&mut rng);
        let f = kit::random_map(&mut rng, &dom, &cod);
        let u = kit::random_open_set(&mut rng, &cod);
        let v = kit::random_open_set(&mut rng, &cod);
        let pu = preimage(&f, &u).unwrap();
        let pv = preimage(&f, &v).unwrap();
        let pi = preimage(&f, &u.intersection(&v).unwrap()).unwrap();
        let ps = preimage(&f, &u.union(&v).unwrap()).unwrap();
        assert_eq!(pi, pu.intersection(&pv).unwrap());
        assert_eq!(ps, pu.union(&pv).unwrap());
    }
}

#[test]
fn preimage_preserves_up_closed() {
    let mut rng = kit::rng(102);
    for _ in 0..200 {
        let dom = kit::random_base(&mut rng);
        let cod = kit::random_base(&mut rng);
        let f = kit::random_map(&mut rng, &dom, &cod);
        let u = kit::random_open_set(&mut rng, &cod);
        let p = preimage(&f, &u).unwrap();
        // re-validate through the checked constructor
        assert!(OpenSet::new(dom.clone(), p.members().clone()).is_ok());
    }
}

#[test]
fn lifted_membership_equals_carrier_membership() {
    let mut rng = kit::rng(103);
    for _ in 0..60 {
        let base = kit::random_base(&mut rng);
        let u = kit::random_open_set(&mut rng, &base);
        let sub = Subdivision::of(&base);
        let lifted = sub.lift_open(u.members());
        for id in 0..sub.complex().simplex_count() {
            assert_eq!(lifted.contains(id), u.contains(sub.carrier(id)));
        }
        assert_eq!(sub.complex().connected_components(), base.connected_components());
    }
}

#[test]
fn join_elements_contained_in_both_factors() {
    let mut rng = kit::rng(104);
    for _ in 0..100 {
        let base = kit::random_base(&mut rng);
        let a = kit::random_cover(&mut rng, &base, 3);
        let b = kit::random_cover(&mut rng, &base, 3);
        let j = join(&a, &b).unwrap();
        for e in j.elements() {
            assert!(a.elements().iter().any(|u| e.is_subset(u)));
            assert!(b.elements().iter().any(|u| e.is_subset(u)));
        }
        assert_eq!(ord(&j), kit::ord_oracle(&j));
    }
}

#[test]
fn pullback_order_never_exceeds_source_order() {
    let mut rng = kit::rng(105);
    for _ in 0..150 {
        let dom = kit::random_base(&mut rng);
        let cod = kit::random_base(&mut rng);
        let f = kit::random_map(&mut rng, &dom, &cod);
        let a = kit::random_cover(&mut rng, &cod, 3);
        let p = pullback_cover(&f, &a).unwrap();
        assert!(ord(&p) <= ord(&a));
    }
}

#[test]
fn refinement_monotone_under_pullback_and_subadditive() {
    // Lemma-style inequalities, exhaustively searched on 2-dimensional bases
    let mut rng = kit::rng(106);
    for round in 0..60 {
        let base = kit::random_base(&mut rng);
        let a = kit::random_cover(&mut rng, &base, 2);
        let b = kit::random_cover(&mut rng, &base, 2);
        let da = refinement_dimension(&a, 0, BUDGET).unwrap();
        let db = refinement_dimension(&b, 0, BUDGET).unwrap();
        let dj = refinement_dimension(&join(&a, &b).unwrap(), 0, BUDGET).unwrap();
        assert!(da.exact && db.exact && dj.exact);
        assert!(dj.value <= da.value + db.value, "round {round}");

        let dom = kit::random_base(&mut rng);
        let f = kit::random_map(&mut rng, &dom, &base);
        let dp = refinement_dimension(&pullback_cover(&f, &a).unwrap(), 0, BUDGET).unwrap();
        assert!(dp.exact);
        assert!(dp.value <= da.value, "round {round}");
    }
}

#[test]
fn refinement_level_monotone() {
    let mut rng = kit::rng(107);
    for _ in 0..25 {
        let base = kit::random_base(&mut rng);
        let a = kit::random_cover(&mut rng, &base, 3);
        let r0 = refinement_dimension(&a, 0, BUDGET).unwrap();
        let r1 = refinement_dimension(&a, 1, BUDGET).unwrap();
        assert!(r0.exact && r1.exact);
        assert!(r1.value <= r0.value);
    }
}

#[test]
fn certificates_always_verify() {
    let mut rng = kit::rng(108);
    for _ in 0..60 {
        let base = kit::random_base(&mut rng);
        let a = kit::random_cover(&mut rng, &base, 3);
        let r = refinement_dimension(&a, 0, BUDGET).unwrap();
        r.certificate.verify(&a).unwrap();
        assert!(r.certificate.achieved_order <= ord(&a));
        let g = greedy_refinement(&a, 0);
        g.verify(&a).unwrap();
        assert!(g.achieved_order <= ord(&a));
        assert!(g.achieved_order >= r.value);
    }
}

proptest! {
    #[test]
    fn mediant_below_max_ratio(
        rows in prop::collection::vec((1i64..60, 1i64..60, 1i64..20), 1..6)
    ) {
        let a: Vec<Rat> = rows.iter().map(|r| rat_int(r.0)).collect();
        let b: Vec<Rat> = rows.iter().map(|r| rat_int(r.1)).collect();
        let m: Vec<Rat> = rows.iter().map(|r| rat_int(r.2)).collect();
        let v = mediant_bound(&a, &b, &m).unwrap();
        let max = a.iter().zip(&b).map(|(x, y)| x / y).max().unwrap();
        prop_assert!(v <= max);
    }

    #[test]
    fn oscillation_nonnegative_and_monotone(seed in 0u64..500) {
        let mut rng = kit::rng(seed);
        let base = kit::random_base(&mut rng);
        let f = kit::random_profile(&mut rng, &base, 6);
        let small = kit::random_open_set(&mut rng, &base);
        let big = small.union(&kit::random_open_set(&mut rng, &base)).unwrap();
        let os = oscillation(std::slice::from_ref(&f), &small).unwrap();
        let ob = oscillation(std::slice::from_ref(&f), &big).unwrap();
        prop_assert!(os >= rat_int(0));
        prop_assert!(os <= ob);
    }
}

#[test]
fn stage_pullback_factors_through_composition() {
    let mut rng = kit::rng(109);
    for _ in 0..40 {
        let sys = kit::random_system(
            &mut rng,
            &kit::SystemShape { stages: 3, max_blocks: 2, max_legs: 2 },
        );
        let covers = kit::stage_random_covers(&mut rng, &sys, 0, 2);
        for k in 0..sys.blocks(2).len() {
            let direct = pullback_stage_cover(&sys, 0, 2, k, &covers).unwrap();
            // step through stage 1: pull covers back per block, then pull again
            let mids: Vec<Cover> = (0..sys.blocks(1).len())
                .map(|m| pullback_stage_cover(&sys, 0, 1, m, &covers).unwrap())
                .collect();
            let stepped = pullback_stage_cover(&sys, 1, 2, k, &mids).unwrap();
            // same membership profile: identical element sets after dedup
            let mut a: Vec<SimplexSet> =
                direct.elements().iter().map(|e| e.members().clone()).collect();
            let mut b: Vec<SimplexSet> =
                stepped.elements().iter().map(|e| e.members().clone()).collect();
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }
}

#[test]
fn composition_stays_unital() {
    let mut rng = kit::rng(110);
    for _ in 0..40 {
        let sys = kit::random_system(
            &mut rng,
            &kit::SystemShape { stages: 4, max_blocks: 3, max_legs: 2 },
        );
        let comp = compose_maps(&sys, 0, 3).unwrap();
        for k in 0..sys.blocks(3).len() {
            let supplied: u64 = (0..sys.blocks(0).len())
                .map(|l| comp.legs[l][k].len() as u64 * sys.size(0, l))
                .sum();
            assert_eq!(supplied, sys.size(3, k));
        }
    }
}

#[test]
fn stage_bound_against_base_maximum() {
    // the normalized refined-cover order at any later stage never exceeds
    // the base maximum (the mediant estimate)
    let mut rng = kit::rng(111);
    for _ in 0..30 {
        let sys = kit::random_system(
            &mut rng,
            &kit::SystemShape { stages: 3, max_blocks: 2, max_legs: 2 },
        );
        let covers = kit::stage_random_covers(&mut rng, &sys, 0, 2);
        let base_max: Rat = (0..sys.blocks(0).len())
            .map(|l| {
                let d = refinement_dimension(&covers[l], 0, BUDGET).unwrap();
                assert!(d.exact);
                rat_ratio_u(d.value as u64, sys.size(0, l))
            })
            .max()
            .unwrap();
        for j in 1..3 {
            for k in 0..sys.blocks(j).len() {
                let c = pullback_stage_cover(&sys, 0, j, k, &covers).unwrap();
                let d = refinement_dimension(&c, 0, BUDGET).unwrap();
                assert!(d.exact);
                assert!(rat_ratio_u(d.value as u64, sys.size(j, k)) <= base_max);
            }
        }
    }
}

#[test]
fn mean_dimension_sequences_non_increasing() {
    let mut rng = kit::rng(112);
    for _ in 0..25 {
        let sys = kit::random_system(
            &mut rng,
            &kit::SystemShape { stages: 4, max_blocks: 2, max_legs: 2 },
        );
        let covers = kit::stage_random_covers(&mut rng, &sys, 0, 2);
        let est = mean_dimension_sequence(&sys, 0, &covers, 3, 0, BUDGET).unwrap();
        assert!(est.values.iter().all(|v| v.exact));
        assert!(est.non_increasing());
    }
}

#[test]
fn leg_permutation_invariance() {
    let mut rng = kit::rng(113);
    for _ in 0..20 {
        let sys = kit::random_system(
            &mut rng,
            &kit::SystemShape { stages: 2, max_blocks: 2, max_legs: 3 },
        );
        // shuffle every leg list
        let mut maps: Vec<DiagonalMap> = sys.maps().to_vec();
        for map in &mut maps {
            for row in &mut map.legs {
                for legs in row.iter_mut() {
                    legs.reverse();
                }
            }
        }
        let shuffled = AHSystem::new(
            (0..sys.stage_count()).map(|i| sys.blocks(i).to_vec()).collect(),
            maps,
        )
        .unwrap();
        let covers = kit::stage_random_covers(&mut rng, &sys, 0, 2);
        let a = mean_dimension_sequence(&sys, 0, &covers, 1, 0, BUDGET).unwrap();
        let b = mean_dimension_sequence(&shuffled, 0, &covers, 1, 0, BUDGET).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert_eq!(x.value, y.value);
        }
        // trace variation is unchanged as well
        let profiles: Vec<PLFunction> = sys
            .blocks(0)
            .iter()
            .map(|b| kit::random_profile(&mut rng, &b.space, 5))
            .collect();
        let eps = rat(1, 1000);
        let ra = ahmd_core::capacity::svt_probe(&sys, 0, &profiles, 1, &eps).unwrap();
        let rb = ahmd_core::capacity::svt_probe(&shuffled, 0, &profiles, 1, &eps).unwrap();
        assert_eq!(ra.values, rb.values);
    }
}

#[test]
fn dirac_convex_combinations_never_exceed_reported_capacity() {
    let mut rng = kit::rng(114);
    for _ in 0..40 {
        let sys = kit::random_system(
            &mut rng,
            &kit::SystemShape { stages: 3, max_blocks: 2, max_legs: 2 },
        );
        let l = rng.gen_range(0..sys.blocks(0).len());
        let f = TraceData {
            stage: 0,
            block: l,
            profile: kit::random_profile(&mut rng, &sys.blocks(0)[l].space, 6),
        };
        let report = ocap_element(&sys, &f, 2).unwrap();
        assert!(report.monotone_max);
        for j in 0..=2usize {
            let cap = report.stage_max(j).unwrap();
            let capf = ahmd_core::rat::rat_to_f64(cap);
            for k in 0..sys.blocks(j).len() {
                // rebuild the pushforward profile through the composed legs
                let space = &sys.blocks(j)[k].space;
                let mut values = vec![0f64; space.vertex_count() as usize];
                if j == 0 {
                    if k == l {
                        for (v, val) in f.profile.values().iter().enumerate() {
                            values[v] = ahmd_core::rat::rat_to_f64(val);
                        }
                    }
                } else {
                    let comp = compose_maps(&sys, 0, j).unwrap();
                    for leg in &comp.legs[l][k] {
                        for v in 0..space.vertex_count() {
                            values[v as usize] += ahmd_core::rat::rat_to_f64(
                                f.profile.value(leg.map.apply_vertex(v)),
                            );
                        }
                    }
                }
                let n = sys.size(j, k) as f64;
                for _ in 0..50 {
                    let mut w: Vec<f64> =
                        (0..values.len()).map(|_| rng.gen_range(0.0..1.0)).collect();
                    let total: f64 = w.iter().sum();
                    for x in &mut w {
                        *x /= total;
                    }
                    let tau: f64 =
                        w.iter().zip(&values).map(|(wi, vi)| wi * vi).sum::<f64>() / n;
                    assert!(tau <= capf + 1e-12);
                }
            }
        }
    }
}

#[test]
fn closed_set_capacity_below_dominating_element() {
    let mut rng = kit::rng(115);
    for _ in 0..40 {
        let sys = kit::random_system(
            &mut rng,
            &kit::SystemShape { stages: 3, max_blocks: 2, max_legs: 2 },
        );
        let l = rng.gen_range(0..sys.blocks(0).len());
        let space = sys.blocks(0)[l].space.clone();
        // a random closed set and a profile with f >= n * 1_E
        let open = kit::random_open_set(&mut rng, &space);
        let (closure, _) = closure_and_boundary(&open);
        let e = closure;
        let n = sys.size(0, l);
        let values: Vec<Rat> = (0..space.vertex_count())
            .map(|v| {
                let hit = space.vertex_star(v).intersects(e.members());
                if hit { rat_int(n as i64) } else { rat_int(0) }
            })
            .collect();
        let f = TraceData {
            stage: 0,
            block: l,
            profile: PLFunction::new(space.clone(), values).unwrap(),
        };
        let re = ocap_closed_set(&sys, 0, l, &e, 2).unwrap();
        let rf = ocap_element(&sys, &f, 2).unwrap();
        for (se, sf) in re.per_stage.iter().zip(&rf.per_stage) {
            assert!(se.max <= sf.max, "stage {}", se.stage);
        }
        assert!(re.monotone_max);
    }
}

#[test]
fn variation_invariant_under_doubling_legs() {
    // adding identity legs in pairs with proportional size scaling keeps the
    // trace variation of the pushforward unchanged
    let p = Complex::path(3);
    let mk = |copies: usize| {
        let legs: Vec<Leg> = (0..copies)
            .map(|_| Leg {
                map: ahmd_core::simplicial::SimplicialMap::identity(p.clone()),
                class: None,
            })
            .collect();
        AHSystem::new(
            vec![
                vec![ahmd_core::system::Block { space: p.clone(), matrix_size: 1 }],
                vec![ahmd_core::system::Block {
                    space: p.clone(),
                    matrix_size: copies as u64,
                }],
            ],
            vec![DiagonalMap { legs: vec![vec![legs]], alt_pairings: Vec::new() }],
        )
        .unwrap()
    };
    let profile = PLFunction::new(p.clone(), vec![rat_int(0), rat_int(3), rat_int(1)]).unwrap();
    let eps = rat(1, 1000);
    let single = ahmd_core::capacity::svt_probe(&mk(1), 0, &[profile.clone()], 1, &eps).unwrap();
    let doubled = ahmd_core::capacity::svt_probe(&mk(2), 0, &[profile], 1, &eps).unwrap();
    assert_eq!(single.values[1], doubled.values[1]);
}

#[test]
fn partition_invariants_and_theta_bound() {
    let mut rng = kit::rng(116);
    for _ in 0..60 {
        let base = kit::random_base(&mut rng);
        let a = kit::random_cover(&mut rng, &base, 3);
        let p = match subordinate_partition(&a, 1) {
            Ok(p) => p,
            Err(e) => panic!("level 1 partitions always exist: {e:?}"),
        };
        verify_partition(&p).unwrap();
        let f = kit::random_profile(&mut rng, p.complex(), 8);
        let t = theta(&p, &f).unwrap();
        let bound = p.max_oscillation(&f).unwrap();
        // sample at two extra subdivision levels
        let tower = Tower::new(p.complex(), 2);
        let lf = tower.lift_pl(&f);
        let lt = tower.lift_pl(&t);
        for v in 0..tower.top().vertex_count() {
            let diff = (lt.value(v) - lf.value(v)).abs();
            assert!(diff <= bound);
        }
        // nerve dimension and factorization through the coordinate map
        let nv = nerve(&a);
        assert_eq!(nv.dimension, ord(&a));
        let coords = nerve_map(&p);
        for v in 0..p.complex().vertex_count() {
            assert!(coords_span_nerve_simplex(&nv, &coords[v as usize]));
            let rhs = breve_value(&p, &f, &coords[v as usize]).unwrap();
            assert_eq!(t.value(v), &rhs);
        }
    }
}

#[test]
fn admissible_refinements_stay_admissible() {
    let mut rng = kit::rng(117);
    for _ in 0..80 {
        let base = kit::random_base(&mut rng);
        let f = kit::random_profile(&mut rng, &base, 4);
        let family = FunctionFamily::new(base.clone(), vec![vec![f]]).unwrap();
        let eps = rat(rng.gen_range(1..8), rng.gen_range(1..4));
        let u = kit::random_open_set(&mut rng, &base);
        let v = kit::random_open_set(&mut rng, &base);
        let w = u.intersection(&v).unwrap();
        let ou = oscillation(&family.members()[0], &u).unwrap();
        let ow = oscillation(&family.members()[0], &w).unwrap();
        if ou < eps {
            assert!(ow < eps);
        }
    }
}

#[test]
fn variation_bounded_by_refinement_on_admissible_covers() {
    // the diagonal comparison: when a cover is admissible for the family,
    // the variation dimension is at most the refinement dimension
    let mut rng = kit::rng(118);
    let mut done = 0;
    while done < 25 {
        let base = kit::random_base(&mut rng);
        let f = kit::random_profile(&mut rng, &base, 3);
        let family = FunctionFamily::new(base.clone(), vec![vec![f]]).unwrap();
        let a = kit::random_cover(&mut rng, &base, 2);
        let eps_needed: Rat = a
            .elements()
            .iter()
            .map(|e| oscillation(&family.members()[0], e).unwrap())
            .max()
            .unwrap();
        let eps = eps_needed + rat(1, 7);
        let vd = match variation_dimension(&family, &eps, 0, BUDGET) {
            Ok(r) => r,
            Err(_) => continue,
        };
        let rd = refinement_dimension(&a, 0, BUDGET).unwrap();
        assert!(vd.exact && rd.exact);
        assert!(vd.value <= rd.value);
        done += 1;
    }
}

#[test]
fn boundary_of_open_sets_closed_and_disjoint() {
    let mut rng = kit::rng(119);
    for _ in 0..100 {
        let base = kit::random_base(&mut rng);
        let u = kit::random_open_set(&mut rng, &base);
        let (cl, bd) = closure_and_boundary(&u);
        assert!(ClosedSet::new(base.clone(), cl.members().clone()).is_ok());
        assert!(ClosedSet::new(base.clone(), bd.members().clone()).is_ok());
        assert!(!bd.members().intersects(u.members()));
        assert!(bd.members().is_subset(cl.members()));
    }
}
