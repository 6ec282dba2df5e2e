use qrgg::bounds::{full_report, p_prime_interval, PPrimeSource};
use qrgg::experiment::{run_experiment_with_jobs, ExperimentConfig};
use qrgg::graph::ConnectivityGraph;
use qrgg::model::ConnectionModel;
use qrgg::{multicast_capacity, Seed};

#[test]
fn f32_pipeline_tracks_f64() {
    let m64 = ConnectionModel::<f64>::fixed(0.1, 0.2, 0.5).unwrap();
    let m32: ConnectionModel<f32> = m64.convert();

    let (lo32, hi32) = p_prime_interval(&m32).unwrap();
    let (lo64, hi64) = p_prime_interval(&m64).unwrap();
    assert!((f64::from(lo32) - lo64).abs() < 1e-6);
    assert!((f64::from(hi32) - hi64).abs() < 1e-6);

    let r32 = full_report(200, 1, &m32, 0, PPrimeSource::Fixed(0.067f32)).unwrap();
    let r64 = full_report(200, 1, &m64, 0, PPrimeSource::Fixed(0.067)).unwrap();
    assert!((f64::from(r32.expected_c0) - r64.expected_c0).abs() < 1e-4);
    assert!((f64::from(r32.epsilon_lower) - r64.epsilon_lower).abs() < 1e-5);
    assert_eq!(r32.vacuous_lower, r64.vacuous_lower);
}

#[test]
fn f32_graphs_and_experiments_run() {
    let model = ConnectionModel::<f32>::fixed(0.15, 0.25, 0.5).unwrap();
    let g = ConnectivityGraph::build(80, 2, &model, Seed(1)).unwrap();
    let capacity = multicast_capacity(&g).unwrap();
    assert!(capacity as usize <= g.degree(qrgg::SOURCE));

    let mut config = ExperimentConfig::new(80, 1, model, 40, 2);
    config.p_prime_samples = 10_000;
    let a = run_experiment_with_jobs(&config, 1).unwrap();
    let b = run_experiment_with_jobs(&config, 3).unwrap();
    assert_eq!(a, b);
    assert!(a.mean > 0.0);
}
