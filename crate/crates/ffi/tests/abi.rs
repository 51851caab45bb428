use std::ffi::{CStr, CString};
use std::ptr;

use offspring_ffi::*;

fn last_error() -> String {
    let p = ofs_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn problem(name: &str) -> *mut OfsProblem {
    let name = CString::new(name).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ofs_problem_new(name.as_ptr(), &mut p) }, OfsStatus::Ok);
    p
}

#[test]
fn problem_lookup_and_evaluation() {
    let name = CString::new("zdt9").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { ofs_problem_new(name.as_ptr(), &mut p) }, OfsStatus::UnknownProblem);
    assert!(p.is_null());
    assert!(last_error().contains("zdt9"));
    assert_eq!(unsafe { ofs_problem_new(ptr::null(), &mut p) }, OfsStatus::NullArgument);

    let p = problem("dtlz2");
    unsafe {
        assert_eq!(ofs_problem_decision_count(p), 12);
        assert_eq!(ofs_problem_objective_count(p), 3);
        // x = 0.5 everywhere puts the point on the unit sphere.
        let genome = [0.5; 12];
        let mut out = [0.0; 3];
        let mut written = 0;
        assert_eq!(ofs_problem_evaluate(p, genome.as_ptr(), 12, out.as_mut_ptr(), 3, &mut written), OfsStatus::Ok);
        assert_eq!(written, 3);
        let norm: f64 = out.iter().map(|v| v * v).sum();
        assert!((norm - 1.0).abs() < 1e-12);

        assert_eq!(
            ofs_problem_evaluate(p, genome.as_ptr(), 12, out.as_mut_ptr(), 2, &mut written),
            OfsStatus::BufferTooSmall
        );
        assert_eq!(written, 3);
        assert_eq!(
            ofs_problem_evaluate(p, genome.as_ptr(), 5, out.as_mut_ptr(), 3, &mut written),
            OfsStatus::InvalidArgument
        );
        ofs_problem_free(p);
        assert_eq!(ofs_problem_decision_count(ptr::null()), 0);
        ofs_problem_free(ptr::null_mut());
    }
}

#[test]
fn topology_handles() {
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(ofs_topology_new(OfsTopologyKind::SmallWorld, 30, 4, 0, 0.2, 5, &mut t), OfsStatus::Ok);
        assert_eq!(ofs_topology_node_count(t), 30);
        assert_eq!(ofs_topology_edge_count(t), 60);
        let mut buf = [0usize; 30];
        let mut written = 0;
        assert_eq!(ofs_topology_neighbors(t, 0, buf.as_mut_ptr(), 30, &mut written), OfsStatus::Ok);
        assert!(written >= 1 && buf[..written].windows(2).all(|w| w[0] < w[1]));
        assert_eq!(ofs_topology_neighbors(t, 30, buf.as_mut_ptr(), 30, &mut written), OfsStatus::InvalidArgument);
        ofs_topology_free(t);

        let mut bad = ptr::null_mut();
        assert_eq!(
            ofs_topology_new(OfsTopologyKind::SmallWorld, 30, 3, 0, 0.2, 5, &mut bad),
            OfsStatus::InvalidArgument
        );
        assert!(bad.is_null());
        assert_eq!(
            ofs_topology_new(OfsTopologyKind::Random, 10, 0, 0, 0.5, 1, ptr::null_mut()),
            OfsStatus::NullArgument
        );
    }
}

#[test]
fn archive_outcomes() {
    let mut a = ptr::null_mut();
    unsafe {
        assert_eq!(ofs_archive_new(2, &mut a), OfsStatus::Ok);
        let mut outcome = OfsInsertOutcome::Accepted;
        let insert = |a, v: [f64; 2], o: &mut OfsInsertOutcome| ofs_archive_insert(a, v.as_ptr(), 2, o);
        assert_eq!(insert(a, [1.0, 4.0], &mut outcome), OfsStatus::Ok);
        assert_eq!(outcome, OfsInsertOutcome::Accepted);
        assert_eq!(insert(a, [1.0, 4.0], &mut outcome), OfsStatus::Ok);
        assert_eq!(outcome, OfsInsertOutcome::RejectedDuplicate);
        assert_eq!(insert(a, [2.0, 5.0], &mut outcome), OfsStatus::Ok);
        assert_eq!(outcome, OfsInsertOutcome::RejectedDominated);
        assert_eq!(insert(a, [4.0, 1.0], &mut outcome), OfsStatus::Ok);
        assert_eq!(insert(a, [2.0, 2.0], &mut outcome), OfsStatus::Ok);
        assert!(matches!(outcome, OfsInsertOutcome::AcceptedWithTruncation | OfsInsertOutcome::CandidateTruncated));
        assert_eq!(ofs_archive_len(a), 2);

        let mut buf = [0.0; 4];
        let mut written = 0;
        assert_eq!(ofs_archive_objectives(a, buf.as_mut_ptr(), 4, &mut written), OfsStatus::Ok);
        assert_eq!(written, 4);
        assert_eq!(ofs_archive_objectives(a, buf.as_mut_ptr(), 3, &mut written), OfsStatus::BufferTooSmall);
        let three = [1.0, 2.0, 3.0];
        assert_eq!(ofs_archive_insert(a, three.as_ptr(), 3, &mut outcome), OfsStatus::InvalidArgument);
        assert!(last_error().contains("3-objective") || last_error().contains("2-objective"));
        ofs_archive_free(a);
    }
}

#[test]
fn engine_run_is_seeded() {
    let p = problem("zdt1");
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(ofs_topology_new(OfsTopologyKind::Lattice, 36, 1, 0, 0.0, 2, &mut t), OfsStatus::Ok);
        let fronts: Vec<Vec<f64>> = (0..2)
            .map(|_| {
                let mut r = ptr::null_mut();
                assert_eq!(ofs_run_new(p, t, 15, 77, &mut r), OfsStatus::Ok);
                assert_eq!(ofs_run_objective_count(r), 2);
                assert!(ofs_run_pure_seconds(r) > 0.0);
                let mut buf = vec![0.0; 2 * ofs_run_front_len(r)];
                let mut written = 0;
                assert_eq!(ofs_run_front(r, buf.as_mut_ptr(), buf.len(), &mut written), OfsStatus::Ok);
                assert_eq!(written, buf.len());
                ofs_run_free(r);
                buf
            })
            .collect();
        assert!(!fronts[0].is_empty());
        assert_eq!(fronts[0], fronts[1]);
        let mut r = ptr::null_mut();
        assert_eq!(ofs_run_new(ptr::null(), t, 15, 77, &mut r), OfsStatus::NullArgument);
        ofs_topology_free(t);
        ofs_problem_free(p);
    }
}

#[test]
fn experiment_from_config_text() {
    let dir = tempfile::tempdir().unwrap();
    let out = CString::new(dir.path().to_str().unwrap()).unwrap();
    let cfg = CString::new("total_individuals = 40\nisland_count = 2\niterations = 2\ngenerations_per_iteration = 3\n")
        .unwrap();
    assert_eq!(unsafe { ofs_experiment_run(cfg.as_ptr(), out.as_ptr()) }, OfsStatus::Ok);
    assert!(dir.path().join("front.txt").exists());

    let bad = CString::new("island_count = many\n").unwrap();
    assert_eq!(unsafe { ofs_experiment_run(bad.as_ptr(), out.as_ptr()) }, OfsStatus::Config);
    assert!(last_error().contains("island_count"));
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(ofs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
