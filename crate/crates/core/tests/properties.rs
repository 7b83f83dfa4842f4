//! Invariants of the sweep solver checked against the exact oracles.

use std::ops::ControlFlow;

use anydijkstra::analysis::{extract_path, within_tolerance};
use anydijkstra::costs::{random_lattice, RngSpec};
use anydijkstra::oracle::{brute_force_distances, dijkstra_reference, min_turn_oracle};
use anydijkstra::rng::SplitMix64;
use anydijkstra::sweep::{init_state, relax_column, ColumnIndexing, IterationReport, NO_PRED};
use anydijkstra::{linear_index, to_coords, Grid, GridDims, Lattice, NodeCoord, Solver, SolverOptions};
use proptest::prelude::*;

fn dims(h: usize, w: usize) -> GridDims {
    GridDims::new(h, w).unwrap()
}

/// Small integer costs, zero included, so equal-cost alternatives are common.
fn integer_lattice(d: GridDims, seed: u64) -> Lattice {
    let mut rng = SplitMix64::new(seed);
    let mut draw = move |_, _| (rng.next_u64() % 4) as f64;
    let v: Vec<f64> = (0..(d.height - 1) * d.width).map(|k| draw(k, 0)).collect();
    let h: Vec<f64> = (0..d.height * (d.width - 1)).map(|k| draw(k, 0)).collect();
    Lattice::new(d, &v, &h).unwrap()
}

fn lattice_strategy(max: usize) -> impl Strategy<Value = (Lattice, NodeCoord)> {
    (1..=max, 1..=max, any::<u64>(), any::<bool>(), any::<u64>()).prop_map(|(h, w, seed, ints, pick)| {
        let d = dims(h, w);
        let l = if ints {
            integer_lattice(d, seed)
        } else {
            random_lattice(d, RngSpec::uniform(seed))
        };
        let s = d.coord_of((pick % d.node_count() as u64) as usize);
        (l, s)
    })
}

/// The textbook per-source rule: every source `u` pushes `bed[u]` plus the
/// running edge sum to every other node of its column.
fn per_source_relax(bed: &mut [f64], pred: &mut [u32], edges: &[f64], sources: &[bool]) {
    let len = bed.len();
    for u in 0..len {
        if !sources[u] {
            continue;
        }
        let mut c = bed[u];
        for x in u + 1..len {
            c += edges[x - 1];
            if c < bed[x] {
                bed[x] = c;
                pred[x] = (x - 1) as u32;
            }
        }
        let mut c = bed[u];
        for x in (0..u).rev() {
            c += edges[x];
            if c < bed[x] {
                bed[x] = c;
                pred[x] = (x + 1) as u32;
            }
        }
    }
}

fn random_column(rng: &mut SplitMix64, len: usize) -> (Vec<f64>, Vec<f64>) {
    let edges = (0..len - 1)
        .map(|_| if rng.next_u64().is_multiple_of(5) { 0.0 } else { rng.next_f64() })
        .collect();
    let bed = (0..len)
        .map(|_| {
            if rng.next_u64().is_multiple_of(2) {
                f64::INFINITY
            } else {
                10.0 * rng.next_f64()
            }
        })
        .collect();
    (bed, edges)
}

/// Sums the pred trace of every finite node, source first.
fn trace_costs(l: &Lattice, bed: &Grid<f64>, pred: &Grid<u32>, source: NodeCoord) -> Vec<Option<f64>> {
    let d = l.dims();
    d.coords()
        .map(|t| {
            if !bed.get(t).is_finite() {
                return None;
            }
            let mut nodes = vec![t];
            let mut cur = t;
            while cur != source {
                assert!(nodes.len() <= d.node_count(), "pred cycle at {t:?}");
                let p = *pred.get(cur);
                assert_ne!(p, NO_PRED, "finite node {cur:?} without predecessor");
                let prev = d.coord_of(p as usize);
                assert!(prev.is_adjacent(cur));
                nodes.push(prev);
                cur = prev;
            }
            Some(
                nodes
                    .iter()
                    .rev()
                    .zip(nodes.iter().rev().skip(1))
                    .fold(0.0, |acc, (a, b)| acc + l.edge_cost(*a, *b).unwrap()),
            )
        })
        .collect()
}

#[test]
fn two_pass_equals_per_source_rule_on_arbitrary_columns() {
    let mut rng = SplitMix64::new(0xC011);
    for _ in 0..1000 {
        let len = 2 + (rng.next_u64() % 63) as usize;
        let (bed, edges) = random_column(&mut rng, len);
        let init_pred: Vec<u32> = (0..len as u32).collect();

        let (mut a, mut pa, mut ua) = (bed.clone(), init_pred.clone(), vec![false; len]);
        relax_column(&mut a, &mut pa, &mut ua, &edges, ColumnIndexing { base: 0, step: 1 });

        let sources: Vec<bool> = bed.iter().map(|b| b.is_finite()).collect();
        let (mut b, mut pb) = (bed.clone(), init_pred.clone());
        per_source_relax(&mut b, &mut pb, &edges, &sources);

        assert_eq!(a, b, "bed differs for {bed:?} / {edges:?}");
        for x in 0..len {
            if a[x] != bed[x] {
                // Both predecessors must realize the same value.
                for p in [pa[x] as usize, pb[x] as usize] {
                    let e = edges[x.min(p)];
                    assert_eq!(a[p] + e, a[x]);
                }
            }
        }
    }
}

#[test]
fn per_source_rule_gated_by_updates_matches_full_relaxation() {
    let mut rng = SplitMix64::new(0x6A7E);
    for _ in 0..500 {
        let len = 2 + (rng.next_u64() % 63) as usize;
        let (mut bed, edges) = random_column(&mut rng, len);
        bed[(rng.next_u64() % len as u64) as usize] = 0.0;
        let mut pred: Vec<u32> = vec![0; len];
        let mut upd = vec![false; len];
        relax_column(
            &mut bed,
            &mut pred,
            &mut upd,
            &edges,
            ColumnIndexing { base: 0, step: 1 },
        );

        // Lower a few entries, as the other orientation would, and mark them.
        let mut marked = vec![false; len];
        for _ in 0..3 {
            let k = (rng.next_u64() % len as u64) as usize;
            bed[k] *= rng.next_f64();
            marked[k] = true;
        }

        let (mut full, mut pf, mut uf) = (bed.clone(), pred.clone(), vec![false; len]);
        relax_column(&mut full, &mut pf, &mut uf, &edges, ColumnIndexing { base: 0, step: 1 });
        let (mut gated, mut pg) = (bed.clone(), pred.clone());
        per_source_relax(&mut gated, &mut pg, &edges, &marked);
        assert_eq!(full, gated);
    }
}

#[test]
fn heap_dijkstra_matches_brute_force() {
    for (h, w) in [(1, 1), (1, 4), (2, 2), (2, 3), (3, 3), (3, 4), (4, 4)] {
        for seed in 0..12 {
            let l = if seed % 2 == 0 {
                random_lattice(dims(h, w), RngSpec::uniform(seed))
            } else {
                integer_lattice(dims(h, w), seed)
            };
            for s in l.dims().coords() {
                let exact = dijkstra_reference(&l, s).unwrap();
                let brute = brute_force_distances(&l, s).unwrap();
                for (a, b) in exact.dist.as_slice().iter().zip(brute.as_slice()) {
                    assert!((a - b).abs() <= 1e-12, "{h}x{w} seed {seed} from {s:?}: {a} vs {b}");
                }
            }
        }
    }
}

#[test]
fn unit_grids_converge_in_two_iterations_from_any_source() {
    for n in [2, 5, 9] {
        let l = Lattice::uniform(dims(n, n), 1.0).unwrap();
        for s in l.dims().coords() {
            let r = Solver::default().solve(&l, s, None).unwrap();
            assert!(r.converged);
            assert_eq!(r.k_iterations, 2);
            for c in l.dims().coords() {
                assert_eq!(r.distance(c), (c.row.abs_diff(s.row) + c.col.abs_diff(s.col)) as f64);
            }
        }
    }
}

#[test]
fn skipping_clean_columns_changes_nothing() {
    for seed in 0..30 {
        let d = dims(3 + seed as usize % 17, 2 + seed as usize % 13);
        let l = if seed % 3 == 0 {
            integer_lattice(d, seed)
        } else {
            random_lattice(d, RngSpec::uniform(seed))
        };
        let s = d.coord_of((seed as usize * 7) % d.node_count());
        let base = Solver::new(SolverOptions::sequential())
            .unwrap()
            .solve(&l, s, None)
            .unwrap();
        let skip = Solver::new(SolverOptions::sequential().with_skip_clean_columns(true))
            .unwrap()
            .solve(&l, s, None)
            .unwrap();
        assert_eq!(base.bed, skip.bed);
        assert_eq!(base.pred, skip.pred);
        assert_eq!(base.k_iterations, skip.k_iterations);
        let counts = |r: &anydijkstra::SolveResult| r.reports.iter().map(IterationReport::updates).collect::<Vec<_>>();
        assert_eq!(counts(&base), counts(&skip));
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let l = random_lattice(dims(150, 130), RngSpec::uniform(77));
    let s = NodeCoord::new(75, 3);
    let solve = |opts: SolverOptions| Solver::new(opts).unwrap().solve(&l, s, None).unwrap();
    let one = solve(SolverOptions::sequential());
    for opts in [
        SolverOptions::default().with_threads(2),
        SolverOptions::default().with_threads(3),
        SolverOptions::default().with_threads(8),
        SolverOptions::default(),
        SolverOptions::default().with_threads(4).with_skip_clean_columns(true),
    ] {
        let r = solve(opts);
        assert!(r
            .bed
            .as_slice()
            .iter()
            .zip(one.bed.as_slice())
            .all(|(a, b)| a.to_bits() == b.to_bits()));
        assert_eq!(r.pred, one.pred);
        assert_eq!(r.k_iterations, one.k_iterations);
    }
}

#[test]
fn distances_are_symmetric() {
    for seed in 0..10 {
        let l = random_lattice(dims(9, 14), RngSpec::uniform(seed));
        let mut rng = SplitMix64::new(seed);
        let pick = |rng: &mut SplitMix64| l.dims().coord_of((rng.next_u64() % l.node_count() as u64) as usize);
        let (s, t) = (pick(&mut rng), pick(&mut rng));
        let a = Solver::default().solve(&l, s, None).unwrap().distance(t);
        let b = Solver::default().solve(&l, t, None).unwrap().distance(s);
        assert!(within_tolerance(a, b), "{a} vs {b}");
    }
}

#[test]
fn turn_bound_on_small_lattices() {
    for seed in 0..40u64 {
        let mut rng = SplitMix64::new(seed ^ 0x7A11);
        let d = dims(1 + (rng.next_u64() % 12) as usize, 1 + (rng.next_u64() % 12) as usize);
        let l = if seed % 2 == 0 {
            random_lattice(d, RngSpec::uniform(seed))
        } else {
            integer_lattice(d, seed)
        };
        let s = d.coord_of((rng.next_u64() % d.node_count() as u64) as usize);
        let turns = min_turn_oracle(&l, s).unwrap();
        let exact = dijkstra_reference(&l, s).unwrap();

        let mut snapshots: Vec<Grid<f64>> = Vec::new();
        let mut obs = |_: &IterationReport, v: anydijkstra::sweep::DistanceView<'_>| {
            snapshots.push(v.to_grid());
            ControlFlow::Continue(())
        };
        Solver::default().solve(&l, s, Some(&mut obs)).unwrap();
        for c in d.coords() {
            let m = *turns.min_turns.get(c) as usize;
            let snap = &snapshots[m.min(snapshots.len() - 1)];
            assert!(
                within_tolerance(*snap.get(c), exact.distance(c)),
                "seed {seed}: {c:?} needs {m} turns but is {} after iteration {}",
                snap.get(c),
                m + 1
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn index_bijection(h in 1usize..40, w in 1usize..40, k in any::<usize>()) {
        let d = dims(h, w);
        let k = k % d.node_count();
        let c = to_coords(k, d).unwrap();
        prop_assert_eq!(linear_index(c, d).unwrap(), k);
        prop_assert!(linear_index(NodeCoord::new(h, 0), d).is_err());
    }

    #[test]
    fn transpose_is_an_involution((l, _) in lattice_strategy(9)) {
        let t = l.transposed();
        prop_assert_eq!(&t.transposed(), &l);
        let d = l.dims();
        for c in d.coords() {
            for (n, w, _) in l.neighbors(c) {
                prop_assert_eq!(l.edge_cost(n, c), Some(w));
                prop_assert_eq!(t.edge_cost(c.transposed(), n.transposed()), Some(w));
            }
        }
    }

    #[test]
    fn sweeps_are_monotone_and_traces_realizable((l, s) in lattice_strategy(10)) {
        let solver = Solver::new(SolverOptions::sequential()).unwrap();
        let mut state = init_state(&l, s).unwrap();
        let cap = l.node_count() + 1;
        while !state.is_converged() {
            prop_assert!(state.iteration() < cap);
            for _ in 0..2 {
                let before = state.bed_grid();
                solver.sweep(&mut state, &l);
                let after = state.bed_grid();
                prop_assert!(after.as_slice().iter().zip(before.as_slice()).all(|(a, b)| a <= b));
                let upd = state.upd_grid();
                for (k, (a, b)) in after.as_slice().iter().zip(before.as_slice()).enumerate() {
                    prop_assert_eq!(upd.as_slice()[k], a < b);
                }
                let traced = trace_costs(&l, &after, &state.pred_grid(), s);
                for (t, b) in traced.iter().zip(after.as_slice()) {
                    if let Some(t) = t {
                        prop_assert!(*t <= b + 1e-12 * l.node_count() as f64);
                    }
                }
            }
            solver.iterate(&mut state, &l);
        }
        prop_assert_eq!(*state.pred_grid().get(s) as usize, l.dims().index_of(s));
    }

    #[test]
    fn converged_fields_match_heap_dijkstra((l, s) in lattice_strategy(16)) {
        let r = Solver::default().solve(&l, s, None).unwrap();
        prop_assert!(r.converged);
        prop_assert!(r.k_iterations <= l.node_count() + 1);
        let exact = dijkstra_reference(&l, s).unwrap();
        let turns = min_turn_oracle(&l, s).unwrap();
        for c in l.dims().coords() {
            prop_assert!(within_tolerance(r.distance(c), exact.distance(c)));
            prop_assert!((turns.dist.get(c) - exact.distance(c)).abs() <= 1e-12 * (1.0 + exact.distance(c)));
            let p = extract_path(&r, s, c, &l).unwrap();
            prop_assert!((p.cost - r.distance(c)).abs() <= 1e-12 * p.nodes.len() as f64);
            // Relaxation consistency of both results.
            for (n, w, _) in l.neighbors(c) {
                prop_assert!(exact.distance(n) <= exact.distance(c) + w);
                prop_assert!(r.distance(n) <= r.distance(c) + w);
            }
        }
        // One more iteration on the converged field changes nothing.
        let mut state = init_state(&l, s).unwrap();
        let solver = Solver::new(SolverOptions::sequential()).unwrap();
        while !state.is_converged() {
            solver.iterate(&mut state, &l);
        }
        prop_assert_eq!(solver.iterate(&mut state, &l).updates(), 0);
    }
}
