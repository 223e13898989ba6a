use super::*;
use crate::catalog::bell2q;

#[test]
fn stabilization_time_fixtures() {
    let dt = 0.001;
    let window = 10;
    // Identically zero: stabilized from the start.
    assert_eq!(stabilization_time(&vec![0.0; 50], dt, 0.001, window, 20.0).unwrap(), 0.0);
    // Identically one: never stabilizes.
    assert_eq!(stabilization_time(&vec![1.0; 50], dt, 0.001, window, 20.0).unwrap(), 20.0);
    // Crosses at index 37 and stays: 37 * dt.
    let mut curve = vec![0.5; 100];
    for v in curve.iter_mut().skip(37) {
        *v = 0.0005;
    }
    let t = stabilization_time(&curve, dt, 0.001, window, 20.0).unwrap();
    assert!((t - 0.037).abs() < 1e-12);
    // A dip shorter than the window does not count.
    let mut curve = vec![0.5; 100];
    for v in curve.iter_mut().skip(37).take(window - 1) {
        *v = 0.0005;
    }
    assert_eq!(stabilization_time(&curve, dt, 0.001, window, 20.0).unwrap(), 20.0);
    // The streak may not end before a full window fits.
    let mut curve = vec![0.5; 40];
    for v in curve.iter_mut().skip(35) {
        *v = 0.0;
    }
    assert_eq!(stabilization_time(&curve, dt, 0.001, window, 20.0).unwrap(), 20.0);
    assert!(stabilization_time(&[], dt, 0.001, window, 20.0).is_err());
}

fn dummy_report(mean_time: f64, success_rate: f64) -> EvalReport {
    EvalReport {
        controller: "zero".to_string(),
        protocol: EvalProtocol::default(),
        dt: 0.001,
        trajectories: Vec::new(),
        success_rate,
        mean_time,
        mean_final_distance: 0.0,
        mean_curves: Vec::new(),
        grand_mean_curve: Vec::new(),
        tags: Vec::new(),
    }
}

#[test]
fn comparison_reproduces_reference_time_reductions() {
    // 4.59 vs 5.86 a.u. is a 21.7% reduction; 10.41 vs 12.33 is 15.6%.
    let s = compare_reports(&dummy_report(4.59, 1.0), &dummy_report(5.86, 1.0));
    assert!((s.relative_time_reduction * 100.0 - 21.7).abs() < 0.05);
    let s = compare_reports(&dummy_report(10.41, 1.0), &dummy_report(12.33, 1.0));
    assert!((s.relative_time_reduction * 100.0 - 15.6).abs() < 0.05);
    assert!(s.protocols_match);
    let s = compare_reports(&dummy_report(1.0, 0.9), &dummy_report(1.0, 0.6));
    assert!((s.success_rate_delta - 0.3).abs() < 1e-12);
}

fn tiny_protocol() -> EvalProtocol {
    EvalProtocol {
        n_initial_states: 2,
        n_noise_realizations: 2,
        t_max: 0.05,
        seed: 7,
        ..EvalProtocol::default()
    }
}

#[test]
fn zero_controller_grid_aggregates_consistently() {
    let entry = bell2q();
    let report = evaluate_controller(&Controller::Zero, &entry, &tiny_protocol()).unwrap();
    assert_eq!(report.trajectories.len(), 4);
    assert_eq!(report.mean_curves.len(), 2);
    // Grand mean is the equal-weight mean of per-initial-state means.
    for (k, &v) in report.grand_mean_curve.iter().enumerate() {
        let manual = report.mean_curves.iter().map(|c| c[k]).sum::<f64>() / 2.0;
        assert!((v - manual).abs() < 1e-12);
    }
    // 50 steps of free diffusion cannot hit the 1e-3 ball and hold it.
    assert_eq!(report.success_rate, 0.0);
    assert_eq!(report.mean_time, report.protocol.t_max);
    for t in &report.trajectories {
        assert!((0.0..=1.0).contains(&t.final_distance));
        // Downsample every 10th of 50 steps plus t=0: 6 samples.
        assert_eq!(t.curve.len(), 6);
    }
}

#[test]
fn evaluation_is_deterministic_in_the_protocol_seed() {
    let entry = bell2q();
    let a = evaluate_controller(&Controller::Zero, &entry, &tiny_protocol()).unwrap();
    let b = evaluate_controller(&Controller::Zero, &entry, &tiny_protocol()).unwrap();
    assert_eq!(a.mean_final_distance.to_bits(), b.mean_final_distance.to_bits());
    for (ta, tb) in a.trajectories.iter().zip(&b.trajectories) {
        assert_eq!(ta.curve, tb.curve);
    }
    let mut other = tiny_protocol();
    other.seed = 8;
    let d = evaluate_controller(&Controller::Zero, &entry, &other).unwrap();
    assert_ne!(a.mean_final_distance.to_bits(), d.mean_final_distance.to_bits());
}

#[test]
fn lyapunov_controller_runs_through_the_harness() {
    let entry = bell2q();
    let config = crate::baseline::LyapunovConfig::default();
    let report =
        evaluate_controller(&Controller::Lyapunov(&config), &entry, &tiny_protocol()).unwrap();
    assert_eq!(report.controller, "lyapunov");
    assert_eq!(report.trajectories.len(), 4);
}

#[test]
fn eta_and_delay_tags_are_recorded() {
    let entry = bell2q();
    let protocol = EvalProtocol {
        eta_override: Some(0.8),
        delay_steps: 50,
        ..tiny_protocol()
    };
    let report = evaluate_controller(&Controller::Zero, &entry, &protocol).unwrap();
    assert!(report.tags.iter().any(|t| t == "eta=0.8"));
    assert!(report.tags.iter().any(|t| t == "delay=0.05"));
}

#[test]
fn csv_outputs_are_written() {
    let entry = bell2q();
    let report = evaluate_controller(&Controller::Zero, &entry, &tiny_protocol()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    report.write_csv(dir.path()).unwrap();
    for name in ["trajectories.csv", "summary.csv", "mean_curve.csv"] {
        let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.lines().count() >= 2, "{name} has no data rows");
    }
    let traj = std::fs::read_to_string(dir.path().join("trajectories.csv")).unwrap();
    assert_eq!(traj.lines().count(), 1 + 4);
}

#[test]
fn degenerate_protocols_are_rejected() {
    let entry = bell2q();
    let mut p = tiny_protocol();
    p.downsample = 0;
    assert!(evaluate_controller(&Controller::Zero, &entry, &p).is_err());
    let mut p = tiny_protocol();
    p.n_initial_states = 0;
    assert!(evaluate_controller(&Controller::Zero, &entry, &p).is_err());
}
