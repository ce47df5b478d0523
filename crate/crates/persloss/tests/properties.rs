//! Structural invariants: poset closure laws, flow axioms over random
//! step flows, exact linear algebra laws, critical-value behaviour, and
//! the metric lemmas (forward monotonicity, spectrum law, splitting
//! bounds, representative domination).

mod common;

use common::*;
use persloss::backend::{compose, image_basis, Matrix, Morphism, Object};
use persloss::flow::{is_line_preserving, LinePreserving};
use persloss::loss::{Assignment, DiagramAlgorithm, Strategy as LossStrategy};
use persloss::metric::{merging_distance, morphism_distance, reducing_constants, ExtDistance};
use persloss::poset::FinitePoset;
use persloss::rational::rint;
use persloss::reduce;
use proptest::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

// ---------------------------------------------------------------------
// posets
// ---------------------------------------------------------------------

proptest! {
    #[test]
    fn transitive_closure_is_idempotent(edges in proptest::collection::vec((0usize..8, 0usize..8), 0..16)) {
        let labels: Vec<String> = (0..8).map(|i| i.to_string()).collect();
        let pairs: Vec<(String, String)> = edges
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let Ok(first) = FinitePoset::build(labels.clone(), &pairs) else {
            // cyclic inputs are rejected; nothing to check
            return Ok(());
        };
        // close again over the full relation: nothing may change
        let mut closure_pairs = Vec::new();
        for p in 0..first.len() {
            for q in 0..first.len() {
                if first.lt(p, q) {
                    closure_pairs.push((p.to_string(), q.to_string()));
                }
            }
        }
        let second = FinitePoset::build(labels, &closure_pairs).unwrap();
        for p in 0..first.len() {
            for q in 0..first.len() {
                prop_assert_eq!(first.leq(p, q), second.leq(p, q));
            }
        }
        prop_assert_eq!(first.hasse_edges(), second.hasse_edges());
    }

    #[test]
    fn max_predecessors_is_attained(edges in proptest::collection::vec((0usize..7, 0usize..7), 0..14)) {
        let labels: Vec<String> = (0..7).map(|i| i.to_string()).collect();
        let pairs: Vec<(String, String)> = edges
            .iter()
            .filter(|(a, b)| a < b)
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        let poset = FinitePoset::build(labels, &pairs).unwrap();
        let counts: Vec<usize> = (0..poset.len()).map(|q| poset.predecessors(q).len()).collect();
        for &c in &counts {
            prop_assert!(c <= poset.max_predecessors());
        }
        prop_assert!(counts.iter().any(|&c| c == poset.max_predecessors()));
    }

    #[test]
    fn grid_order_is_componentwise(shape in proptest::collection::vec(1usize..5, 1..4)) {
        prop_assume!(shape.iter().product::<usize>() <= 125);
        let poset = FinitePoset::grid(&shape).unwrap();
        for p in 0..poset.len() {
            for q in 0..poset.len() {
                let cp = poset.coords(p).unwrap();
                let cq = poset.coords(q).unwrap();
                let componentwise = cp.iter().zip(&cq).all(|(a, b)| a <= b);
                prop_assert_eq!(poset.leq(p, q), componentwise);
            }
        }
    }
}

// ---------------------------------------------------------------------
// flows
// ---------------------------------------------------------------------

#[test]
fn random_chain_flows_satisfy_all_axioms() {
    for seed in 0..60u64 {
        let mut rng = common::Rng::new(seed);
        let len = rng.range(2, 12);
        let poset = FinitePoset::grid(&[len]).unwrap();
        let flow = random_chain_flow(&mut rng, len);
        let report = flow.validate(&poset);
        assert!(report.is_valid(), "seed {seed}: {:?}", report.issues());
        assert_eq!(flow.archimedean_witness(&poset), None, "seed {seed}");
        // monotone in epsilon across the whole breakpoint grid
        let bps = flow.breakpoints();
        for (i, a) in bps.iter().enumerate() {
            for b in &bps[i..] {
                for p in 0..len {
                    assert!(poset.leq(
                        flow.translation_at(*a).apply(p),
                        flow.translation_at(*b).apply(p)
                    ));
                }
            }
        }
    }
}

#[test]
fn induced_grid_flows_decompose_per_axis() {
    for shape in [vec![3, 4], vec![2, 2, 3]] {
        let poset = FinitePoset::grid(&shape).unwrap();
        let flow = floor_grid_flow(&poset);
        assert!(flow.validate(&poset).is_valid());
        for t in flow.translations() {
            match is_line_preserving(t, &poset).unwrap() {
                LinePreserving::Yes(axes) => {
                    // reconstruction: the product of the axis translations
                    // is the translation itself
                    for idx in 0..poset.len() {
                        let coords = poset.coords(idx).unwrap();
                        let image: Vec<usize> = coords
                            .iter()
                            .enumerate()
                            .map(|(a, &x)| axes[a].apply(x))
                            .collect();
                        assert_eq!(poset.grid_index(&image).unwrap(), t.apply(idx));
                    }
                }
                LinePreserving::No { .. } => panic!("induced flows are line-preserving"),
            }
        }
    }
}

// ---------------------------------------------------------------------
// backend linear algebra
// ---------------------------------------------------------------------

fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    proptest::collection::vec(proptest::collection::vec(0u64..2, cols), rows)
        .prop_map(move |data| Matrix::from_rows(data, cols, 2).unwrap())
}

proptest! {
    #[test]
    fn rank_laws_over_gf2(a in arb_matrix(3, 3), b in arb_matrix(3, 3)) {
        let prod = a.mul(&b).unwrap();
        prop_assert!(prod.rank() <= a.rank().min(b.rank()));
        let diff = a.sub(&b).unwrap();
        prop_assert!(diff.rank() <= a.rank() + b.rank());
        // maps agree on every vector iff the difference has trivial image
        let trivial = image_basis(&diff).is_zero();
        let mut agree = true;
        for x in 0..8u64 {
            let v = vec![x & 1, (x >> 1) & 1, (x >> 2) & 1];
            if a.apply(&v).unwrap() != b.apply(&v).unwrap() {
                agree = false;
            }
        }
        prop_assert_eq!(trivial, agree);
    }

    #[test]
    fn rref_canonicalizes(a in arb_matrix(4, 3)) {
        let mut reduced = a.clone();
        let rank = reduced.rref();
        let mut again = reduced.clone();
        prop_assert_eq!(again.rref(), rank);
        prop_assert_eq!(reduced, again);
    }
}

// ---------------------------------------------------------------------
// modules: critical values and functoriality
// ---------------------------------------------------------------------

#[test]
fn critical_value_lemma_finite_form() {
    // forward: an interval without criticals is constant; backward: a
    // constant interval that surrounds each member's neighbours contains
    // no criticals. Exhaustive over random chain modules.
    for seed in 0..40u64 {
        let mut rng = common::Rng::new(seed);
        let len = rng.range(3, 9);
        let poset = Arc::new(FinitePoset::grid(&[len]).unwrap());
        let module = random_set_chain_module(&mut rng, &poset);
        let criticals = module.critical_values().unwrap();
        for lo in 0..len {
            for hi in lo..len {
                let members: Vec<usize> = (lo..=hi).collect();
                let interval = poset.interval_check(&members).unwrap();
                let has_critical = members.iter().any(|m| criticals.contains(m));
                if !has_critical {
                    assert!(
                        module.is_constant_on(&interval),
                        "seed {seed}: critical-free interval {members:?} is not constant"
                    );
                }
                let surrounds = (lo == 0 || members.contains(&(lo.saturating_sub(1))))
                    && (hi + 1 >= len || members.contains(&(hi + 1)));
                if surrounds && module.is_constant_on(&interval) {
                    assert!(
                        !has_critical,
                        "seed {seed}: constant surrounded interval {members:?} contains a critical"
                    );
                }
            }
        }
        // tameness is recorded, never assumed: the critical data is a
        // finite set by construction
        match module.critical_data().unwrap() {
            persloss::pmodule::CriticalData::Linear(c) => assert!(c.len() <= len),
            _ => unreachable!(),
        }
    }
}

#[test]
fn derived_maps_are_functorial_on_random_grids() {
    for seed in 0..10u64 {
        let mut rng = common::Rng::new(seed);
        let poset = Arc::new(FinitePoset::grid(&[3, 3]).unwrap());
        let module = random_product_grid_module(&mut rng, &poset);
        assert!(module.validate().is_valid());
        for p in 0..poset.len() {
            for r in 0..poset.len() {
                for q in 0..poset.len() {
                    if poset.leq(p, r) && poset.leq(r, q) {
                        let direct = module.map_between(p, q).unwrap();
                        let split = compose(
                            &module.map_between(p, r).unwrap(),
                            &module.map_between(r, q).unwrap(),
                        )
                        .unwrap();
                        assert_eq!(*direct, split);
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------
// metric lemmas
// ---------------------------------------------------------------------

#[test]
fn merging_distance_is_monotone_under_pushforward() {
    // p <= q and c, c' the images of b, b': the distance can only shrink
    for seed in 0..60u64 {
        let mut rng = common::Rng::new(seed);
        let len = rng.range(3, 8);
        let poset = Arc::new(FinitePoset::grid(&[len]).unwrap());
        let module = random_set_chain_module(&mut rng, &poset);
        let flow = random_chain_flow(&mut rng, len);
        for p in 0..len {
            for q in p..len {
                let push = module.map_between(p, q).unwrap();
                let Morphism::Map(push) = &*push else { unreachable!() };
                let elems = object_elements(module.object(p));
                for a in &elems {
                    for b in &elems {
                        let d_source = merging_distance(&module, &flow, p, a, b).unwrap();
                        let (persloss::metric::Elem::Point(x), persloss::metric::Elem::Point(y)) =
                            (a, b)
                        else {
                            unreachable!()
                        };
                        let d_target = merging_distance(
                            &module,
                            &flow,
                            q,
                            &persloss::metric::Elem::Point(push.apply(*x)),
                            &persloss::metric::Elem::Point(push.apply(*y)),
                        )
                        .unwrap();
                        assert!(
                            d_target <= d_source,
                            "seed {seed}: pushforward increased the distance"
                        );
                        // Archimedean backward bound: images at finite
                        // distance pull back to finite distance
                        if d_target.is_finite() {
                            assert!(d_source.is_finite(), "seed {seed}");
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn finite_distances_lie_in_the_reducing_set() {
    for seed in 0..80u64 {
        let mut rng = common::Rng::new(seed);
        let len = rng.range(3, 8);
        let poset = Arc::new(FinitePoset::grid(&[len]).unwrap());
        let (module, flow);
        if seed % 2 == 0 {
            module = random_set_chain_module(&mut rng, &poset);
            flow = random_chain_flow(&mut rng, len);
        } else {
            module = random_vec_chain_module(&mut rng, &poset, 2);
            flow = floor_chain_flow(len);
        }
        for q in 0..len {
            let set = reducing_constants(&module, &flow, q).unwrap();
            let elems = object_elements(module.object(q));
            for a in &elems {
                for b in &elems {
                    let d = merging_distance(&module, &flow, q, a, b).unwrap();
                    if let ExtDistance::Finite(v) = d {
                        assert!(
                            *v.numer() == 0 || set.constants.contains(&v),
                            "seed {seed}: distance {v} at {q} outside D = {:?}",
                            set.constants
                        );
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------
// loss lemmas
// ---------------------------------------------------------------------

fn random_chain_instance(seed: u64) -> (Assignment, persloss::StepFlow) {
    let mut rng = common::Rng::new(seed);
    let len = rng.range(3, 8);
    let poset = Arc::new(FinitePoset::grid(&[len]).unwrap());
    let f = Arc::new(random_set_chain_module(&mut rng, &poset));
    let g = Arc::new(random_set_chain_module(&mut rng, &poset));
    let flow = random_chain_flow(&mut rng, len);
    let eps_idx = rng.below(2.min(flow.breakpoints().len()));
    let eps = flow.breakpoints()[eps_idx];
    let asgn = random_assignment(&mut rng, &f, &g, &flow, eps);
    (asgn, flow)
}

#[test]
fn parallelogram_losses_split_along_chains() {
    for seed in 0..60u64 {
        let (asgn, flow) = random_chain_instance(seed);
        let n = asgn.module_f().poset().len();
        for p in 0..n {
            for r in p + 1..n {
                for q in r + 1..n {
                    let pq = asgn.loss_par_left(&flow, p, q).unwrap();
                    let pr = asgn.loss_par_left(&flow, p, r).unwrap();
                    let rq = asgn.loss_par_left(&flow, r, q).unwrap();
                    assert!(pq <= pr.max(rq), "seed {seed}: splitting bound failed");
                    if asgn.module_f().map_between(p, r).unwrap().is_iso() {
                        assert!(rq <= pr.max(pq), "seed {seed}: iso splitting bound failed");
                    }
                }
            }
        }
    }
}

#[test]
fn diagram_losses_lie_in_the_reducing_sets() {
    for seed in 0..40u64 {
        let (asgn, flow) = random_chain_instance(seed);
        let n = asgn.module_f().poset().len();
        let s = asgn.translation().clone();
        for p in 0..n {
            for q in p + 1..n {
                let loss = asgn.loss_par_left(&flow, p, q).unwrap();
                if let ExtDistance::Finite(v) = loss {
                    if *v.numer() != 0 {
                        let d = reducing_constants(asgn.module_g(), &flow, s.apply(q)).unwrap();
                        assert!(
                            d.constants.contains(&v),
                            "seed {seed}: loss {v} outside the reducing set"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn translation_never_increases_parallelogram_losses() {
    let mut checked = 0usize;
    for seed in 0..100u64 {
        let (asgn, flow) = random_chain_instance(seed);
        let mut rng = common::Rng::new(seed ^ 0xabcdef);
        let bps = flow.breakpoints();
        let delta = bps[rng.range(1, bps.len() - 1)];
        let r = flow.translation_at(delta);
        let translated = asgn.translate(r, Some(delta)).unwrap();
        let n = asgn.module_f().poset().len();
        let s = asgn.translation().clone();
        for p in 0..n {
            for q in p + 1..n {
                assert!(
                    translated.loss_par_left(&flow, p, q).unwrap()
                        <= asgn.loss_par_left(&flow, p, q).unwrap(),
                    "seed {seed}: phi parallelogram loss increased"
                );
                assert!(
                    translated.loss_par_right(&flow, p, q).unwrap()
                        <= asgn.loss_par_right(&flow, p, q).unwrap(),
                    "seed {seed}: psi parallelogram loss increased"
                );
            }
        }
        for p in 0..n {
            let sp = s.apply(p);
            let rsp = r.apply(sp);
            let down_bound = asgn
                .loss_tri_down(&flow, p)
                .unwrap()
                .max(asgn.loss_par_right(&flow, sp, rsp).unwrap());
            assert!(
                translated.loss_tri_down(&flow, p).unwrap() <= down_bound,
                "seed {seed}: triangle-down bound failed"
            );
            let up_bound = asgn
                .loss_tri_up(&flow, p)
                .unwrap()
                .max(asgn.loss_par_left(&flow, sp, rsp).unwrap());
            assert!(
                translated.loss_tri_up(&flow, p).unwrap() <= up_bound,
                "seed {seed}: triangle-up bound failed"
            );
        }
        checked += 1;
    }
    assert_eq!(checked, 100);
}

// ---------------------------------------------------------------------
// reduction lemmas
// ---------------------------------------------------------------------

/// Constructible random instance over a chain, built by extension.
fn random_constructible(seed: u64) -> Option<(Assignment, persloss::StepFlow)> {
    let mut rng = common::Rng::new(seed);
    let len = rng.range(4, 9);
    let poset = Arc::new(FinitePoset::grid(&[len]).unwrap());
    let f = Arc::new(random_set_chain_module(&mut rng, &poset));
    let g = Arc::new(random_set_chain_module(&mut rng, &poset));
    let flow = floor_chain_flow(len);
    let eps = rint(1);
    let dec = reduce::decompose_linear(&f, &g, &flow, eps).ok()?;
    let t = flow.translation_at(eps).clone();
    let phi_b: BTreeMap<usize, Morphism> = dec
        .b_f
        .iter()
        .map(|&b| (b, random_component(&mut rng, f.object(b), g.object(t.apply(b)))))
        .collect();
    let psi_b: BTreeMap<usize, Morphism> = dec
        .b_g
        .iter()
        .map(|&b| (b, random_component(&mut rng, g.object(b), f.object(t.apply(b)))))
        .collect();
    reduce::extend_constructible(f, g, &flow, eps, &phi_b, &psi_b).ok().map(|a| (a, flow))
}

#[test]
fn random_extensions_are_constructible_and_reduce_exactly() {
    let mut passed = 0usize;
    for seed in 0..100u64 {
        let Some((asgn, flow)) = random_constructible(seed) else { continue };
        let (linear, _) = reduce::total_loss_linear(&asgn, &flow, DiagramAlgorithm::Naive)
            .expect("extension is constructible");
        let naive = asgn.total_loss(&flow, LossStrategy::Naive, DiagramAlgorithm::Naive).unwrap();
        assert_eq!(linear.total, naive.total, "seed {seed}");
        passed += 1;
    }
    assert!(passed == 100, "only {passed} extensions succeeded");
}

#[test]
fn same_loss_within_constant_intervals() {
    for seed in 0..60u64 {
        let Some((asgn, flow)) = random_constructible(seed) else { continue };
        let f = asgn.module_f();
        let criticals = f.critical_values().unwrap();
        let n = f.poset().len();
        // walk the maximal constant runs (c, c') between consecutive criticals
        let mut run = Vec::new();
        for t in 0..=n {
            if t < n && !criticals.contains(&t) {
                run.push(t);
                continue;
            }
            // closing a run at critical t (or the top); the run's upper
            // fence is t when it exists
            if run.len() >= 2 && t < n {
                for &s in &run {
                    for &u in &run {
                        if s < u {
                            let a = asgn.loss_par_left(&flow, s, t).unwrap();
                            let b = asgn.loss_par_left(&flow, u, t).unwrap();
                            assert_eq!(a, b, "seed {seed}: loss differs inside a run");
                        }
                    }
                }
            }
            run.clear();
        }
    }
}

#[test]
fn representatives_dominate_their_pieces() {
    for seed in 0..40u64 {
        let Some((asgn, flow)) = random_constructible(seed) else { continue };
        let eps = asgn.epsilon().unwrap();
        let dec =
            reduce::decompose_linear(asgn.module_f(), asgn.module_g(), &flow, eps).unwrap();
        // triangle losses: every element of a piece is dominated by the
        // piece representative
        for piece in &dec.pieces_f {
            let rep_loss = asgn.loss_tri_down(&flow, piece.rep).unwrap();
            for &s in &piece.members {
                assert!(
                    asgn.loss_tri_down(&flow, s).unwrap() <= rep_loss,
                    "seed {seed}: triangle loss not dominated"
                );
            }
        }
        // parallelogram losses across consecutive pieces are dominated by
        // the representative pair
        for a in &dec.pieces_f {
            for b in &dec.pieces_f {
                if a.rep >= b.rep {
                    continue;
                }
                let rep_loss = asgn.loss_par_left(&flow, a.rep, b.rep).unwrap();
                for &p in &a.members {
                    for &q in &b.members {
                        if p <= q {
                            assert!(
                                asgn.loss_par_left(&flow, p, q).unwrap() <= rep_loss,
                                "seed {seed}: parallelogram loss not dominated"
                            );
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn realized_limits_satisfy_the_cone_property() {
    // for p <= q in a subdivision piece with minimum m:
    // F[m <= q] = F[p <= q] . F[m <= p]
    for seed in 0..40u64 {
        let Some((asgn, flow)) = random_constructible(seed) else { continue };
        let eps = asgn.epsilon().unwrap();
        let dec =
            reduce::decompose_linear(asgn.module_f(), asgn.module_g(), &flow, eps).unwrap();
        let f = asgn.module_f();
        for piece in &dec.pieces_f {
            let m = piece.rep;
            for &p in &piece.members {
                for &q in &piece.members {
                    if p <= q {
                        let direct = f.map_between(m, q).unwrap();
                        let split = compose(
                            &f.map_between(m, p).unwrap(),
                            &f.map_between(p, q).unwrap(),
                        )
                        .unwrap();
                        assert_eq!(*direct, split, "seed {seed}");
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------
// distance on parallel morphisms
// ---------------------------------------------------------------------

#[test]
fn morphism_distance_is_the_sup_of_pointwise_distances() {
    for seed in 0..40u64 {
        let mut rng = common::Rng::new(seed);
        let len = rng.range(3, 7);
        let poset = Arc::new(FinitePoset::grid(&[len]).unwrap());
        let module = random_set_chain_module(&mut rng, &poset);
        let flow = random_chain_flow(&mut rng, len);
        let q = rng.below(len);
        let source = Object::set((0..rng.range(1, 3)).map(|i| format!("s{i}")).collect());
        let f = random_component(&mut rng, &source, module.object(q));
        let g = random_component(&mut rng, &source, module.object(q));
        let d = morphism_distance(&module, &flow, q, &f, &g).unwrap();
        let (Morphism::Map(fm), Morphism::Map(gm)) = (&f, &g) else { unreachable!() };
        let mut sup = ExtDistance::zero();
        for i in 0..fm.source {
            sup = sup.max(
                merging_distance(
                    &module,
                    &flow,
                    q,
                    &persloss::metric::Elem::Point(fm.apply(i)),
                    &persloss::metric::Elem::Point(gm.apply(i)),
                )
                .unwrap(),
            );
        }
        assert_eq!(d, sup, "seed {seed}");
    }
}


#[test]
fn random_grid_extensions_reduce_exactly() {
    let mut passed = 0usize;
    for seed in 0..30u64 {
        let mut rng = common::Rng::new(seed ^ 0x6d1d);
        let shape = if seed % 3 == 0 { vec![3, 3] } else { vec![4, 3] };
        let poset = Arc::new(FinitePoset::grid(&shape).unwrap());
        let f = Arc::new(random_product_grid_module(&mut rng, &poset));
        let g = Arc::new(random_product_grid_module(&mut rng, &poset));
        let flow = floor_grid_flow(&poset);
        let eps = rint(1);
        let dec = reduce::decompose_grid(&f, &g, &flow, eps).expect("product modules decompose");
        let t = flow.translation_at(eps).clone();
        let phi_b: BTreeMap<usize, Morphism> = dec
            .cubes_f
            .iter()
            .map(|c| (c.min, random_component(&mut rng, f.object(c.min), g.object(t.apply(c.min)))))
            .collect();
        let psi_b: BTreeMap<usize, Morphism> = dec
            .cubes_g
            .iter()
            .map(|c| (c.min, random_component(&mut rng, g.object(c.min), f.object(t.apply(c.min)))))
            .collect();
        let asgn = reduce::extend_constructible_grid(
            Arc::clone(&f),
            Arc::clone(&g),
            &flow,
            eps,
            &phi_b,
            &psi_b,
        )
        .expect("extension succeeds on constant cubes");
        let naive = asgn.total_loss(&flow, LossStrategy::Naive, DiagramAlgorithm::Naive).unwrap();
        let (grid, _) = reduce::total_loss_grid(&asgn, &flow, DiagramAlgorithm::Naive)
            .expect("extension is cube-wise constructible");
        assert_eq!(grid.total, naive.total, "seed {seed}");
        passed += 1;
    }
    assert_eq!(passed, 30);
}

#[test]
fn predecessor_total_matches_naive_on_random_grid_assignments() {
    // arbitrary (not necessarily constructible) assignments over genuinely
    // partial orders: the Hasse-pair total must still equal the all-pairs
    // total
    for seed in 0..20u64 {
        let mut rng = common::Rng::new(seed ^ 0x9d);
        let shape = if seed % 2 == 0 { vec![3, 3] } else { vec![2, 2, 3] };
        let poset = Arc::new(FinitePoset::grid(&shape).unwrap());
        let f = Arc::new(random_product_grid_module(&mut rng, &poset));
        let g = Arc::new(random_product_grid_module(&mut rng, &poset));
        let flow = floor_grid_flow(&poset);
        let eps = flow.breakpoints()[rng.below(2)];
        let asgn = random_assignment(&mut rng, &f, &g, &flow, eps);
        let naive = asgn.total_loss(&flow, LossStrategy::Naive, DiagramAlgorithm::Naive).unwrap();
        let pred = asgn
            .total_loss(&flow, LossStrategy::Predecessor, DiagramAlgorithm::Naive)
            .unwrap();
        assert_eq!(naive.total, pred.total, "seed {seed}");
        let cap = poset.max_predecessors() * poset.len();
        assert!(pred.counters.par_left_evals <= cap, "seed {seed}");
    }
}
