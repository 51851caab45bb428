use proptest::prelude::*;

use offspring::distribution::codec::{decode_island_task, encode_island_task};
use offspring::emo_strategy::{partition, IslandTask};
use offspring::engine::EngineParams;
use offspring::objective::{dominates, nondominated_filter, ObjectiveVector, ParetoArchive, Solution, Truncation};
use offspring::problems::{hypervolume_2d, ProblemKind};
use offspring::topology::TopologySpec;

fn point(dim: usize) -> impl Strategy<Value = ObjectiveVector> {
    // Small integer grid so that ties and equal points are common.
    prop::collection::vec(0u8..6, dim)
        .prop_map(|v| ObjectiveVector::new(v.into_iter().map(f64::from).collect()).unwrap())
}

fn point_set() -> impl Strategy<Value = Vec<ObjectiveVector>> {
    (2usize..5).prop_flat_map(|dim| prop::collection::vec(point(dim), 0..60))
}

fn solution(p: &ObjectiveVector) -> Solution {
    Solution { genome: p.values().to_vec(), objectives: p.clone() }
}

proptest! {
    #[test]
    fn dominance_is_a_strict_partial_order(a in point(3), b in point(3), c in point(3)) {
        prop_assert!(!dominates(&a, &a).unwrap());
        if dominates(&a, &b).unwrap() {
            prop_assert!(!dominates(&b, &a).unwrap());
            if dominates(&b, &c).unwrap() {
                prop_assert!(dominates(&a, &c).unwrap());
            }
        }
    }

    #[test]
    fn filter_is_idempotent_and_keeps_no_dominated_point(points in point_set()) {
        let once = nondominated_filter(&points).unwrap();
        prop_assert_eq!(nondominated_filter(&once).unwrap(), once.clone());
        for p in &once {
            prop_assert!(points.contains(p));
            prop_assert!(!points.iter().any(|q| dominates(q, p).unwrap()));
        }
        for p in &points {
            let dropped = !once.contains(p);
            prop_assert_eq!(dropped, points.iter().any(|q| dominates(q, p).unwrap()));
        }
    }

    #[test]
    fn bounded_archive_stays_a_small_antichain(points in point_set(), capacity in 1usize..12) {
        let mut archive = ParetoArchive::new(capacity).unwrap();
        for p in &points {
            archive.insert_solution(solution(p)).unwrap();
            prop_assert!(archive.len() <= capacity);
        }
        let members = archive.objectives();
        for (i, a) in members.iter().enumerate() {
            for (j, b) in members.iter().enumerate() {
                if i != j {
                    prop_assert!(!dominates(a, b).unwrap());
                    prop_assert!(!a.same_bits(b));
                }
            }
        }
        if !points.is_empty() {
            prop_assert!(!archive.is_empty());
        }
    }

    #[test]
    fn hypervolume_truncation_never_lowers_hypervolume(
        raw in prop::collection::vec((0.0f64..10.0, 0.0f64..10.0), 1..80),
        capacity in 1usize..10,
    ) {
        let reference = [11.0, 11.0];
        let mut archive = ParetoArchive::with_truncation(capacity, Truncation::Hypervolume2d(reference)).unwrap();
        let mut last = 0.0;
        for (x, y) in raw {
            let p = ObjectiveVector::new(vec![x, y]).unwrap();
            archive.insert_solution(solution(&p)).unwrap();
            let hv = hypervolume_2d(&archive.objectives(), reference).unwrap();
            prop_assert!(hv >= last, "hypervolume fell from {} to {}", last, hv);
            last = hv;
        }
    }

    #[test]
    fn built_topologies_are_simple_and_symmetric(n in 12usize..80, seed in any::<u64>(), kind in 0usize..4) {
        let spec = [
            TopologySpec::Lattice { wrap: true },
            TopologySpec::SmallWorld { k: 4, p: 0.2 },
            TopologySpec::ScaleFree { m0: 4, m: 2 },
            TopologySpec::Random { p: 0.1 },
        ][kind];
        // Lattices need a non-degenerate factorization.
        let Ok(t) = spec.build(n, seed) else { return Ok(()); };
        prop_assert_eq!(t.node_count(), n);
        for v in 0..n {
            let nb = t.neighborhood(v).unwrap();
            prop_assert!(!nb.contains(&v));
            prop_assert!(nb.windows(2).all(|w| w[0] < w[1]));
            for &u in nb {
                prop_assert!(t.neighborhood(u).unwrap().contains(&v));
            }
        }
        prop_assert_eq!(spec.build(n, seed).unwrap(), t);
    }

    #[test]
    fn partition_is_balanced(total in 1usize..5000, islands in 1usize..64) {
        prop_assume!(total >= islands);
        let sizes = partition(total, islands).unwrap();
        prop_assert_eq!(sizes.len(), islands);
        prop_assert_eq!(sizes.iter().sum::<usize>(), total);
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn island_task_codec_roundtrips(
        seed in any::<u64>(),
        nodes in 1u32..20,
        genes in prop::option::of(prop::collection::vec(-1e3f64..1e3, 30)),
    ) {
        let task = IslandTask {
            island_id: 3,
            iteration: 9,
            problem: ProblemKind::Zdt1,
            topology: TopologySpec::SmallWorld { k: 4, p: 0.25 },
            topology_seed: seed.rotate_left(7),
            node_count: nodes,
            params: EngineParams { seed, archive_capacity: Some(7), ..EngineParams::default() },
            injected: genes.map(|g| vec![g; nodes as usize]),
        };
        prop_assert_eq!(decode_island_task(&encode_island_task(&task)).unwrap(), task);
    }
}
