use magnonsim_web::{curve, truth_table_report, JunctionDemo};

#[test]
fn opposite_phase_packets_bounce() {
    let mut demo = JunctionDemo::build(120, 0.5, true).unwrap();
    assert_eq!(demo.positions().len(), 2 * demo.sites());
    let start = demo.shares();
    assert!((start[0] - 1.0).abs() < 1e-12 && start[1] == 0.0, "{start:?}");
    demo.step(6000).unwrap();
    let [back, through] = demo.shares()[..] else { panic!() };
    assert!(back > 0.99 && through < 1e-3, "{back} {through}");
}

#[test]
fn in_phase_packets_pass() {
    let mut demo = JunctionDemo::build(120, 0.5, false).unwrap();
    demo.step(6000).unwrap();
    assert!(demo.shares()[1] > 0.95, "{:?}", demo.shares());
    assert!(demo.time() > 119.0);
}

#[test]
fn too_short_arms_are_rejected() {
    assert!(JunctionDemo::build(20, 0.5, false).is_err());
}

#[test]
fn table_report() {
    let csv = truth_table_report(magnonsim::logic::FIG3_NET).unwrap();
    assert!(csv.contains("# injective_phase_only = false"));
    assert!(csv.contains("\n0,0,1,0,8,8,0,ok\n"), "{csv}");
    let err = truth_table_report("port A in\nedge w A B len=x\n").unwrap_err();
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn curves() {
    let pts = curve("t", 1e-12, 1e-9, 50, 0.8, 1e-11, false).unwrap();
    assert_eq!(pts.len(), 100);
    assert!(pts.chunks(2).zip(pts.chunks(2).skip(1)).all(|(a, b)| b[1] > a[1]));
    let pts = curve("nc", 1.0, 3.0, 3, 0.8, 1e-11, false).unwrap();
    assert_eq!(pts.iter().step_by(2).copied().collect::<Vec<_>>(), [1.0, 2.0, 3.0]);
    assert!(curve("mass", 0.0, 1.0, 5, 0.8, 1e-11, false).is_err());
}
